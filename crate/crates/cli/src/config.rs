use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Deserialize;
use thermoecon::analysis::{InflationOptions, DEFAULT_CONSTANCY_THRESHOLD};
use thermoecon::ingest::OutputFormat;
use thermoecon::pipeline::PipelineOptions;
use thermoecon::reconstruction::DATASET_LABELS;

pub const DEFAULT_DATA_DIR: &str = "data";
pub const DEFAULT_OUT_DIR: &str = "out";

/// Claim groups the `verify` command can be limited to.
pub const ANALYSIS_SELECTORS: [&str; 6] = ["units", "gwp", "w-over-e", "fits", "inflation", "morris"];

/// Settings read from `--config`; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub datasets: Vec<String>,
    pub analyses: Vec<String>,
    pub pipeline: PipelineOptions,
    pub constancy_threshold: Option<f64>,
    pub inflation: InflationOptions,
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        for d in &self.datasets {
            resolve_datasets(d)?;
        }
        for a in &self.analyses {
            if !ANALYSIS_SELECTORS.contains(&a.as_str()) {
                bail!("unknown analysis '{a}'; valid analyses: {}", ANALYSIS_SELECTORS.join(", "));
            }
        }
        if let Some(t) = self.constancy_threshold {
            if t.is_nan() || t <= 0.0 {
                bail!("constancy_threshold must be positive, got {t}");
            }
        }
        self.pipeline.reconstruction.validate()?;
        Ok(())
    }

    pub fn threshold(&self) -> f64 {
        self.constancy_threshold.unwrap_or(DEFAULT_CONSTANCY_THRESHOLD)
    }
}

fn normalise(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace('-', "_")
}

/// Maps a selector (`all`, a label, or its kebab-case form) to dataset labels.
pub fn resolve_datasets(selector: &str) -> anyhow::Result<Vec<&'static str>> {
    let wanted = normalise(selector);
    if wanted == "all" {
        return Ok(DATASET_LABELS.to_vec());
    }
    match DATASET_LABELS.iter().find(|l| normalise(l) == wanted) {
        Some(label) => Ok(vec![*label]),
        None => bail!(
            "unknown dataset '{selector}'; valid datasets: all, {}",
            DATASET_LABELS.join(", ")
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors() {
        assert_eq!(resolve_datasets("e-rep").unwrap(), vec!["E_Rep"]);
        assert_eq!(resolve_datasets("W_sum_RepMorris").unwrap(), vec!["W_sum_RepMorris"]);
        assert_eq!(resolve_datasets("all").unwrap().len(), 8);
        let err = resolve_datasets("bogus").unwrap_err().to_string();
        assert!(err.contains("Y_RepMorris") && err.contains("Pop"));
    }

    #[test]
    fn config_parsing() {
        let c: RunConfig = serde_json::from_str(
            r#"{"datasets":["pop"],"pipeline":{"method":"A","reconstruction":{"truncate_w_years":0}},"inflation":{"lag":2}}"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.inflation.lag, 2);
        assert_eq!(c.inflation.outlier_cutoff, 10.0);
        assert_eq!(c.pipeline.reconstruction.truncate_w_years, 0);
        assert_eq!(c.pipeline.reconstruction.gk_ratio, 0.03827);

        let bad: RunConfig = serde_json::from_str(r#"{"datasets":["nope"]}"#).unwrap();
        assert!(bad.validate().is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"unknown":1}"#).is_err());
    }
}
