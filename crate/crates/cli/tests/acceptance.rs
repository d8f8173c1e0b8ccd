//! Acceptance criteria AC-1 .. AC-11, one PASS/FAIL line each.
//!
//! Every data-backed criterion recomputes its statistic through an
//! independent route in this file and requires both routes to agree before
//! comparing against the target.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use thermoecon::analysis::{self, InflationOptions};
use thermoecon::ingest::{self, OutputFormat};
use thermoecon::model::{self, EbcdInputs, GrowthSpec};
use thermoecon::pipeline::{Pipeline, PipelineOptions, MORRIS_FILE};
use thermoecon::series::{self, AnnualSeries};
use thermoecon::{units, Unit, Year, YearRange};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const PROPERTY_CASES: u32 = 256;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn pipeline() -> Pipeline {
    Pipeline::new(data_dir(), PipelineOptions::default()).expect("default options are valid")
}

fn range(a: Year, b: Year) -> YearRange {
    YearRange::new(a, b).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Plain OLS of y on x, written out independently of the library.
fn oracle_ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean = sy / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, intercept, 1.0 - ss_res / ss_tot)
}

fn window_xy(s: &AnnualSeries, r: YearRange, origin: Year) -> (Vec<f64>, Vec<f64>) {
    s.points()
        .iter()
        .filter(|(y, _)| r.contains(*y))
        .map(|&(y, v)| ((y - origin) as f64, v))
        .unzip()
}

fn ac1() -> Outcome {
    let a = series::growth_factor(5.45875, 20.3508, 1799).map_err(err)?;
    let oracle = (20.3508f64 / 5.45875).powf(1.0 / 1799.0);
    check(
        (a - 1.00073).abs() <= 1e-5 && close(a, oracle, 1e-12),
        format!("growth_factor = {a:.9}, oracle {oracle:.9}, target 1.00073 ± 1e-5"),
    )
}

fn ac2() -> Outcome {
    let ej = units::twh_to_ej(12_825.0).map_err(err)?;
    let oracle = 12_825.0 * 3.6e15 / 1e18;
    check(
        (ej - 46.17).abs() <= 0.01 && close(ej, oracle, 1e-12),
        format!("12825 TWh = {ej} EJ (oracle {oracle}), target 46.17 ± 0.01"),
    )
}

fn ac3() -> Outcome {
    let p = pipeline();
    let y_rep = p.y_rep().map_err(err)?;
    let y_lw = p.series("Y_LW").map_err(err)?;
    let (mean, sigma) = analysis::mean_ratio(y_rep, &y_lw).map_err(err)?;
    let ratios: Vec<f64> = y_rep
        .points()
        .iter()
        .filter_map(|&(y, v)| y_lw.get(y).map(|d| v / d))
        .collect();
    let n = ratios.len() as f64;
    let o_mean = ratios.iter().sum::<f64>() / n;
    let o_sigma = (ratios.iter().map(|r| (r - o_mean).powi(2)).sum::<f64>() / n).sqrt();
    if !close(mean, o_mean, 1e-12) || !close(sigma, o_sigma, 1e-9) {
        return Err(format!("routes disagree: library ({mean}, {sigma}) vs oracle ({o_mean}, {o_sigma})"));
    }
    check(
        (mean - 1.44).abs() <= 0.02 && (sigma - 0.06).abs() <= 0.02,
        format!("mean(Y_Rep/Y_LW) = {mean:.4}, sigma = {sigma:.4} over {} years; target 1.44 ± 0.02, 0.06 ± 0.02", ratios.len()),
    )
}

fn ac4() -> Outcome {
    let p = pipeline();
    let s = p.series("W_over_E").map_err(err)?;
    let r = range(1970, 2020);
    let fit = analysis::fit_linear(&s, r, 1970).map_err(err)?;
    let (xs, ys) = window_xy(&s, r, 1970);
    let (o_slope, o_intercept, _) = oracle_ols(&xs, &ys);
    if !close(fit.slope, o_slope, 1e-8) || !close(fit.intercept, o_intercept, 1e-10) {
        return Err(format!("routes disagree: {fit:?} vs oracle ({o_slope}, {o_intercept})"));
    }
    check(
        (fit.slope - 1.18e-3).abs() <= 0.2 * 1.18e-3 && (fit.intercept - 3.131).abs() <= 0.02 * 3.131,
        format!(
            "slope {:.4e} (target 1.18e-3 ± 20%), intercept {:.4} (target 3.131 ± 2%)",
            fit.slope, fit.intercept
        ),
    )
}

fn ac5() -> Outcome {
    let p = pipeline();
    let r = range(1970, 2019);
    let w_rm = &p.w_sum_rep_morris().map_err(err)?.series;
    let e_rep = p.e_rep().map_err(err)?;
    let verdict = analysis::test_w_over_e_constancy(w_rm, e_rep, r, 0.05).map_err(err)?;
    let lw = analysis::test_w_over_e_constancy(&p.w_sum_lw().map_err(err)?.series, &p.series("E_LW").map_err(err)?, r, 0.05)
        .map_err(err)?;

    // oracle: W recomputed as a plain running sum of Y_RepMorris
    let y = p.y_rep_morris().map_err(err)?;
    let mut running = 0.0;
    let mut w_oracle = BTreeMap::new();
    for &(year, v) in y.points() {
        running += v;
        w_oracle.insert(year, running);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = r
        .years()
        .map(|year| ((year - 1970) as f64, w_oracle[&year] / e_rep.at(year).unwrap()))
        .unzip();
    let (o_slope, _, _) = oracle_ols(&xs, &ys);
    let o_mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let o_drift = o_slope * 49.0 / o_mean;
    if !close(verdict.fit.slope, o_slope, 1e-8) || !close(verdict.relative_slope, o_drift, 1e-8) {
        return Err(format!("routes disagree: slope {} vs {o_slope}", verdict.fit.slope));
    }
    check(
        verdict.falsified && verdict.fit.slope > lw.fit.slope,
        format!(
            "falsified = {} (drift {:.4}), slope {:.4e} vs W_sum_LW/E_LW slope {:.4e}",
            verdict.falsified, verdict.relative_slope, verdict.fit.slope, lw.fit.slope
        ),
    )
}

fn ac6() -> Outcome {
    let p = pipeline();
    let w = p.series("W_LW").map_err(err)?;
    let r = range(1, 1969);
    let fit = analysis::fit_exponential(&w, r, 0).map_err(err)?;
    let (xs, ys) = window_xy(&w, r, 0);
    let logs: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let (o_rate, o_log_amp, o_r2) = oracle_ols(&xs, &logs);
    if !close(fit.rate, o_rate, 1e-8) || !close(fit.amplitude, o_log_amp.exp(), 1e-8) || !close(fit.r2, o_r2, 1e-9) {
        return Err(format!("routes disagree: {fit:?} vs oracle rate {o_rate}, r2 {o_r2}"));
    }
    check(
        (fit.r2 - 0.943).abs() <= 0.01 && (5.5e-4..=6.1e-4).contains(&fit.rate),
        format!(
            "r2 {:.4} (target 0.943 ± 0.01), rate {:.4e} (target in [5.5e-4, 6.1e-4]), amplitude {:.4}",
            fit.r2, fit.rate, fit.amplitude
        ),
    )
}

fn inflation_report(lag: Year) -> Result<analysis::InflationReport, String> {
    let p = pipeline();
    let e = p.e_rep().map_err(err)?.restrict(range(1969 - lag, 2019));
    let cpi = p.cpi().map_err(err)?.restrict(range(1970, 2019));
    analysis::test_de_dt_inflation(&e, &cpi, InflationOptions { lag, ..Default::default() }).map_err(err)
}

fn ac7() -> Outcome {
    let report = inflation_report(0)?;
    let p = pipeline();
    let e = p.e_rep().map_err(err)?;
    // oracle: first differences and ratios straight from E and CPI
    let cpi = p.cpi().map_err(err)?;
    let mut o_outliers = Vec::new();
    let mut signs = Vec::new();
    for year in 1970..=2019 {
        let d = e.at(year).unwrap() - e.at(year - 1).unwrap();
        if d != 0.0 {
            signs.push((year, d > 0.0));
        }
        if (d / cpi.at(year).unwrap()).abs() > 10.0 {
            o_outliers.push(year);
        }
    }
    let o_crossings: Vec<Year> = signs.windows(2).filter(|w| w[0].1 != w[1].1).map(|w| w[1].0).collect();
    if o_outliers != report.outliers || o_crossings != report.zero_crossings {
        return Err(format!(
            "routes disagree: outliers {:?} vs {o_outliers:?}, crossings {:?} vs {o_crossings:?}",
            report.outliers, report.zero_crossings
        ));
    }
    let negative: Vec<Year> = [1980, 1981, 1982, 2009]
        .into_iter()
        .filter(|&y| report.de_dt.get(y).is_some_and(|v| v < 0.0))
        .collect();
    check(
        negative.len() == 4
            && report.zero_crossings.len() >= 4
            && report.outliers == [2009, 2012, 2015]
            && !report.discontinuity,
        format!(
            "negative dE/dt {negative:?}, crossings {:?}, outliers {:?} (target [2009, 2012, 2015]), discontinuity {}",
            report.zero_crossings, report.outliers, report.discontinuity
        ),
    )
}

fn ac8() -> Outcome {
    let p = pipeline();
    let ext = p.morris_extension().map_err(err)?;
    // oracle: the year-1 row of the fixture with the population split in millions
    let text = std::fs::read_to_string(data_dir().join(MORRIS_FILE)).map_err(err)?;
    let row: Vec<f64> = text
        .lines()
        .find(|l| l.starts_with("1,"))
        .ok_or("fixture has no year-1 row")?
        .split(',')
        .skip(1)
        .map(|c| c.parse().unwrap())
        .collect();
    let people = [34e6, 74e6, 6e6, (226.0 - 34.0 - 74.0 - 6.0) * 1e6];
    let split_energy: f64 = row.iter().zip(people).map(|(k, n)| k * n * 4184.0 * 365.25 / 1e18).sum();
    let pop1 = p.population().map_err(err)?.at(1).map_err(err)?;
    let scaled = split_energy * pop1 / 226e6;
    if !close(ext.year1_energy_ej, scaled, 1e-12) {
        return Err(format!("routes disagree: {} vs {scaled}", ext.year1_energy_ej));
    }
    let dev_split = split_energy / 5.45875 - 1.0;
    let dev_built = ext.year1_energy_ej / 5.45875 - 1.0;
    check(
        dev_split.abs() <= 1e-3 && dev_built.abs() <= 1e-3,
        format!(
            "split {{34, 74, 6, 112}}M gives {split_energy:.6} EJ ({:+.4}%), built with Pop(1) = {:.2}M gives {:.6} EJ ({:+.4}%)",
            dev_split * 100.0,
            pop1 / 1e6,
            ext.year1_energy_ej,
            dev_built * 100.0
        ),
    )
}

fn ac9() -> Outcome {
    let p = pipeline();
    let y = p.y_rep_morris().map_err(err)?;
    let e = p.e_rep_morris().map_err(err)?;
    let mut worst = 0.0f64;
    let mut n = 0;
    for &(year, v) in y.points().iter().take_while(|(year, _)| *year <= 1) {
        worst = worst.max((v / e.at(year).unwrap() / 0.03827 - 1.0).abs());
        n += 1;
    }
    check(
        worst <= 1e-12 && n > 0,
        format!("max |Y/E / 0.03827 - 1| = {worst:.3e} over {n} years up to year 1"),
    )
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn positive_series() -> impl Strategy<Value = AnnualSeries> {
    (-15_000i64..2000, prop::collection::vec(1e-3f64..1e4, 2..120))
        .prop_map(|(first, v)| AnnualSeries::from_values("s", Unit::Exajoule, first, v).unwrap())
}

fn ac10() -> Outcome {
    run_property("telescoping", positive_series(), |s| {
        let first = s.first_year().unwrap();
        let w = series::cumulative_sum(&series::diff_yoy(&s).unwrap(), first + 1).unwrap();
        let s0 = s.at(first).unwrap();
        for &(year, v) in &s.points()[1..] {
            prop_assert!((w.at(year).unwrap() + s0 - v).abs() <= 1e-9 * v.abs().max(1.0));
        }
        Ok(())
    })?;

    let ebcd = (1e-3f64..1e6, 1e-3f64..1e6, 1e-3f64..1e6, 1e-3f64..1e6, 0.0f64..=1.0, 1e-2f64..1e2);
    run_property("homogeneity", ebcd, |(ek, k, el, l, share, c)| {
        let base = model::ebcd_lambda(&EbcdInputs::new(ek, k, el, l).with_capital_share(share)).unwrap();
        let energy = model::ebcd_lambda(&EbcdInputs::new(c * ek, k, c * el, l).with_capital_share(share)).unwrap();
        let money = model::ebcd_lambda(&EbcdInputs::new(ek, c * k, el, c * l).with_capital_share(share)).unwrap();
        prop_assert!(close(energy, c * base, 1e-10));
        prop_assert!(close(money, base / c, 1e-10));
        Ok(())
    })?;

    run_property("production round trip", (1e-6f64..1e21, 1e-6f64..1e15), |(e_a, y)| {
        let lambda = model::lambda_from_observables(e_a, y).unwrap();
        prop_assert!(close(model::production_from_energy(e_a, lambda).unwrap(), y, 1e-12));
        Ok(())
    })?;

    let chain = prop::collection::vec((0.0f64..1e3, 0.0f64..=1.0, 0.0f64..=1.0), 1..60);
    run_property("energy chain ordering", chain, |rows| {
        let g = AnnualSeries::from_values("g", Unit::Exajoule, 1900, rows.iter().map(|r| r.0)).unwrap();
        let a = AnnualSeries::from_values("a", Unit::Dimensionless, 1900, rows.iter().map(|r| r.1)).unwrap();
        let x = AnnualSeries::from_values("x", Unit::Dimensionless, 1900, rows.iter().map(|r| r.2)).unwrap();
        for year in model::energy_chain(&g, &a, Some(&x)).unwrap() {
            prop_assert!(year.exergy <= year.available && year.available <= year.gibbs);
        }
        Ok(())
    })?;

    let rate = prop_oneof![Just(0.0), 1e-6f64..0.5, -0.5f64..-1e-6];
    run_property("growth trichotomy", (1e-3f64..1e6, rate, 2i64..300), |(y0, i, n)| {
        let s = model::growth_series(&GrowthSpec::new(y0, i), range(0, n), "Y", Unit::Dimensionless).unwrap();
        let v: Vec<f64> = s.values().collect();
        let ok = if i > 0.0 {
            v.windows(2).all(|w| w[1] > w[0])
        } else if i < 0.0 {
            v.windows(2).all(|w| w[1] < w[0])
        } else {
            v.iter().all(|&x| x == y0)
        };
        prop_assert!(ok);
        Ok(())
    })?;

    run_property("linear OLS exactness", (-1e3f64..1e3, -1e3f64..1e3, 3usize..300, -5000i64..3000), |(b, a, n, first)| {
        let s = AnnualSeries::from_values("s", Unit::Dimensionless, first, (0..n).map(|i| a + b * i as f64)).unwrap();
        let fit = analysis::fit_linear(&s, range(first, first + n as Year - 1), first).unwrap();
        prop_assert!((fit.slope - b).abs() <= 1e-9 * b.abs().max(1.0));
        prop_assert!((fit.intercept - a).abs() <= 1e-9 * a.abs().max(1.0));
        Ok(())
    })?;

    run_property("exponential OLS exactness", (1e-3f64..1e3, -0.05f64..0.05, 3usize..300), |(amp, r, n)| {
        let s = AnnualSeries::from_values("s", Unit::Dimensionless, 0, (0..n).map(|i| amp * (r * i as f64).exp())).unwrap();
        let fit = analysis::fit_exponential(&s, range(0, n as Year - 1), 0).unwrap();
        prop_assert!((fit.rate - r).abs() <= 1e-9);
        prop_assert!(close(fit.amplitude, amp, 1e-9));
        // growth series recover ln(1 + i)
        let i = r.exp_m1().max(-0.9);
        let g = model::growth_series(&GrowthSpec::new(amp, i), range(0, n as Year - 1), "g", Unit::Dimensionless).unwrap();
        let fit = analysis::fit_exponential(&g, range(0, n as Year - 1), 0).unwrap();
        prop_assert!((fit.rate - (1.0 + i).ln()).abs() <= 1e-9);
        Ok(())
    })?;

    let values = prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..80);
    run_property("write/read round trip", (-20_000i64..3000, values), |(first, v)| {
        let s = AnnualSeries::from_values("E_Rep", Unit::Exajoule, first, v).unwrap();
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let dir = tempfile::tempdir().unwrap();
            ingest::write_outputs(std::slice::from_ref(&s), &[], format, dir.path()).unwrap();
            let (back, _) = ingest::read_outputs(dir.path()).unwrap();
            prop_assert_eq!(back.len(), 1);
            prop_assert_eq!(back[0].label(), s.label());
            prop_assert_eq!(back[0].unit(), s.unit());
            for (a, b) in back[0].points().iter().zip(s.points()) {
                prop_assert_eq!(a.0, b.0);
                prop_assert_eq!(a.1.to_bits(), b.1.to_bits());
            }
        }
        Ok(())
    })?;

    Ok(format!("8 properties x {PROPERTY_CASES} cases"))
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&path).unwrap())
        })
        .collect()
}

fn ac11() -> Outcome {
    let root = tempfile::tempdir().map_err(err)?;
    let mut trees = Vec::new();
    for run in ["first", "second"] {
        let out = root.path().join(run);
        let status = Command::new(env!("CARGO_BIN_EXE_thermoecon"))
            .args(["build", "--dataset", "all", "--data-dir"])
            .arg(data_dir())
            .arg("--out-dir")
            .arg(&out)
            .output()
            .map_err(err)?;
        if !matches!(status.status.code(), Some(0 | 1)) {
            return Err(format!("build failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        trees.push(tree(&out));
    }
    let files = trees[0].len();
    let bytes: usize = trees[0].values().map(Vec::len).sum();
    check(
        trees[0] == trees[1] && files > 0,
        format!("{files} files, {bytes} bytes, identical = {}", trees[0] == trees[1]),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("AC-1 growth factor", ac1),
        ("AC-2 TWh to EJ", ac2),
        ("AC-3 composite GWP ratio", ac3),
        ("AC-4 W/E linear fit", ac4),
        ("AC-5 constancy falsification", ac5),
        ("AC-6 W_LW exponential fit", ac6),
        ("AC-7 dE/dt against inflation", ac7),
        ("AC-8 Morris year-1 energy", ac8),
        ("AC-9 GK ratio up to year 1", ac9),
        ("AC-10 property suite", ac10),
        ("AC-11 determinism", ac11),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if let Ok(r) = inflation_report(2) {
        println!(
            "note: with dE/dt lagged two years the outliers are {:?} and crossings {:?}",
            r.outliers, r.zero_crossings
        );
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
