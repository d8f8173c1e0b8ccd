//! Numbered reproduction claims, each evaluated against the pipeline and
//! reported as one PASS/FAIL line.

use serde::Serialize;
use serde_json::json;
use thermoecon::analysis::{self, InflationOptions};
use thermoecon::pipeline::Pipeline;
use thermoecon::series::{self, growth_factor};
use thermoecon::{units, Result, Year, YearRange};

#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub values: serde_json::Value,
}

impl Claim {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!("{verdict} {} {}: {}", self.id, self.title, self.detail)
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn range(a: Year, b: Year) -> Result<YearRange> {
    YearRange::new(a, b)
}

pub fn growth_constant(p: &Pipeline) -> Result<Claim> {
    let e = p.e_rep()?;
    let a = growth_factor(e.at(1)?, e.at(1800)?, 1799)?;
    Ok(Claim {
        id: "AC-1",
        title: "energy growth factor 1..1800",
        pass: within(a, 1.00073, 1e-5),
        detail: format!("a = {a:.9} (target 1.00073 ± 1e-5)"),
        values: json!({ "growth_factor": a }),
    })
}

pub fn twh_conversion(p: &Pipeline) -> Result<Claim> {
    let ej = units::twh_to_ej(12_825.0)?;
    let supplement_e1 = p.supplement().ok().and_then(|s| s.0.e.get(1));
    Ok(Claim {
        id: "AC-2",
        title: "12825 TWh in EJ",
        pass: within(ej, 46.17, 0.01),
        detail: format!("{ej:.4} EJ (target 46.17 ± 0.01)"),
        values: json!({ "ej": ej, "supplement_e_year1": supplement_e1 }),
    })
}

pub fn composite_gwp(p: &Pipeline) -> Result<Claim> {
    let (mean, sigma) = analysis::mean_ratio(p.y_rep()?, &p.series("Y_LW")?)?;
    Ok(Claim {
        id: "AC-3",
        title: "Y_Rep / Y_LW",
        pass: within(mean, 1.44, 0.02) && within(sigma, 0.06, 0.02),
        detail: format!("mean {mean:.4}, sigma {sigma:.4} (target 1.44 ± 0.02, 0.06 ± 0.02)"),
        values: json!({ "mean": mean, "sigma": sigma }),
    })
}

pub fn w_over_e_fit(p: &Pipeline) -> Result<Claim> {
    let fit = analysis::fit_linear(&p.series("W_over_E")?, range(1970, 2020)?, 1970)?;
    let slope_ok = within(fit.slope, 1.18e-3, 0.2 * 1.18e-3);
    let intercept_ok = within(fit.intercept, 3.131, 0.02 * 3.131);
    Ok(Claim {
        id: "AC-4",
        title: "linear fit of supplement W/E, 1970-2020",
        pass: slope_ok && intercept_ok,
        detail: format!(
            "slope {:.4e} (target 1.18e-3 ± 20%), intercept {:.4} (target 3.131 ± 2%)",
            fit.slope, fit.intercept
        ),
        values: serde_json::to_value(fit).unwrap_or_default(),
    })
}

pub fn constancy(p: &Pipeline, from: Year, to: Year, threshold: f64) -> Result<Claim> {
    let window = range(from, to)?;
    let rep = analysis::test_w_over_e_constancy(&p.w_sum_rep_morris()?.series, p.e_rep()?, window, threshold)?;
    let lw = analysis::test_w_over_e_constancy(&p.w_sum_lw()?.series, &p.series("E_LW")?, window, threshold)?;
    Ok(Claim {
        id: "AC-5",
        title: "W_sum_RepMorris / E_Rep constancy",
        pass: rep.falsified && rep.fit.slope > lw.fit.slope,
        detail: format!(
            "falsified = {} (drift {:.4} vs threshold {threshold}), slope {:.4e} vs W_sum_LW/E_LW slope {:.4e} (lw falsified = {})",
            rep.falsified, rep.relative_slope, rep.fit.slope, lw.fit.slope, lw.falsified
        ),
        values: json!({ "rep_morris": rep, "lw": lw }),
    })
}

pub fn w_lw_exponential(p: &Pipeline) -> Result<Claim> {
    let fit = analysis::fit_exponential(&p.series("W_LW")?, range(1, 1969)?, 0)?;
    Ok(Claim {
        id: "AC-6",
        title: "exponential fit of W_LW, 1-1969",
        pass: within(fit.r2, 0.943, 0.01) && (5.5e-4..=6.1e-4).contains(&fit.rate),
        detail: format!(
            "r2 {:.4} (target 0.943 ± 0.01), rate {:.4e} (target in [5.5e-4, 6.1e-4]), amplitude {:.4}",
            fit.r2, fit.rate, fit.amplitude
        ),
        values: serde_json::to_value(fit).unwrap_or_default(),
    })
}

pub fn inflation(p: &Pipeline, from: Year, to: Year, options: InflationOptions) -> Result<Claim> {
    let energy = p.e_rep()?.restrict(range(from - 1 - options.lag, to)?);
    let cpi = p.cpi()?.restrict(range(from, to)?);
    let report = analysis::test_de_dt_inflation(&energy, &cpi, options)?;
    let negative: Vec<Year> = [1980, 1981, 1982, 2009]
        .into_iter()
        .filter(|&y| report.de_dt.get(y).is_some_and(|v| v < 0.0))
        .collect();
    let negatives_ok = negative.len() == 4;
    let crossings_ok = report.zero_crossings.len() >= 4;
    let outliers_ok = report.outliers == [2009, 2012, 2015];
    Ok(Claim {
        id: "AC-7",
        title: "dE/dt against CPI inflation",
        pass: negatives_ok && crossings_ok && outliers_ok && !report.discontinuity,
        detail: format!(
            "negative dE/dt in {negative:?} (want 1980-1982, 2009), crossings {:?} (want >= 4), outliers {:?} (want [2009, 2012, 2015]), discontinuity {} (want false), lag {}",
            report.zero_crossings, report.outliers, report.discontinuity, options.lag
        ),
        values: serde_json::to_value(&report).unwrap_or_default(),
    })
}

pub fn morris_anchor(p: &Pipeline) -> Result<Claim> {
    let ext = p.morris_extension()?;
    Ok(Claim {
        id: "AC-8",
        title: "Morris energy at year 1",
        pass: ext.anchor_consistent(),
        detail: format!(
            "{:.5} EJ vs anchor {} EJ ({:+.3}%, tolerance 0.1%)",
            ext.year1_energy_ej,
            p.options().reconstruction.year1_energy_ej,
            ext.year1_deviation * 100.0
        ),
        values: json!({ "year1_energy_ej": ext.year1_energy_ej, "deviation": ext.year1_deviation }),
    })
}

pub fn gk_constancy(p: &Pipeline) -> Result<Claim> {
    let gk = p.options().reconstruction.gk_ratio;
    let early = range(Year::MIN, 1)?;
    let ratio = series::ratio(&p.y_rep_morris()?.restrict(early), &p.e_rep_morris()?.restrict(early))?;
    let worst = ratio.values().map(|r| (r / gk - 1.0).abs()).fold(0.0, f64::max);
    Ok(Claim {
        id: "AC-9",
        title: "Y_RepMorris / E_RepMorris up to year 1",
        pass: worst <= 1e-12,
        detail: format!("max relative deviation from {gk} is {worst:.3e} over {} years", ratio.len()),
        values: json!({ "max_relative_deviation": worst, "years": ratio.len() }),
    })
}

/// Every data-backed claim in the named groups (all groups when empty).
pub fn evaluate(
    p: &Pipeline,
    groups: &[String],
    threshold: f64,
    inflation_options: InflationOptions,
) -> Vec<Result<Claim>> {
    let wanted = |g: &str| groups.is_empty() || groups.iter().any(|s| s == g);
    let mut out = Vec::new();
    if wanted("units") {
        out.push(growth_constant(p));
        out.push(twh_conversion(p));
    }
    if wanted("gwp") {
        out.push(composite_gwp(p));
    }
    if wanted("w-over-e") {
        out.push(w_over_e_fit(p));
        out.push(constancy(p, 1970, 2019, threshold));
    }
    if wanted("fits") {
        out.push(w_lw_exponential(p));
    }
    if wanted("inflation") {
        out.push(inflation(p, 1970, 2019, inflation_options));
    }
    if wanted("morris") {
        out.push(morris_anchor(p));
        out.push(gk_constancy(p));
    }
    out
}
