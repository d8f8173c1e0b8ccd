//! Least-squares fits and the falsification tests built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{self, AnnualSeries, Year, YearRange};

/// Default relative-drift threshold for the constancy test.
pub const DEFAULT_CONSTANCY_THRESHOLD: f64 = 0.05;
/// Default |dE/dt ÷ CPI| cutoff for outliers.
pub const DEFAULT_OUTLIER_CUTOFF: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub range: YearRange,
    pub x_origin: Year,
    pub n: usize,
}

impl LinearFit {
    pub fn predict(&self, year: Year) -> f64 {
        self.intercept + self.slope * (year - self.x_origin) as f64
    }
}

/// Log-linear fit `value = amplitude · e^(rate · (year - x_origin))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub amplitude: f64,
    pub rate: f64,
    /// Coefficient of determination of the regression on ln(value).
    pub r2: f64,
    pub range: YearRange,
    pub x_origin: Year,
    pub n: usize,
}

impl ExpFit {
    pub fn predict(&self, year: Year) -> f64 {
        self.amplitude * (self.rate * (year - self.x_origin) as f64).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyVerdict {
    pub fit: LinearFit,
    pub mean: f64,
    /// slope · span / mean: the fitted drift across the window relative to its level.
    pub relative_slope: f64,
    pub threshold: f64,
    pub falsified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InflationOptions {
    pub outlier_cutoff: f64,
    /// CPI near a zero crossing counts as diverging when it exceeds this
    /// multiple of the largest |CPI| seen away from every crossing.
    pub divergence_factor: f64,
    /// Half-width, in years, of the neighbourhood searched around a crossing.
    pub divergence_window: Year,
    /// Pairs `dE/dt(t - lag)` with `CPI(t)` when forming the ratio series.
    pub lag: Year,
}

impl Default for InflationOptions {
    fn default() -> Self {
        InflationOptions {
            outlier_cutoff: DEFAULT_OUTLIER_CUTOFF,
            divergence_factor: 3.0,
            divergence_window: 1,
            lag: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InflationReport {
    #[serde(serialize_with = "crate::ingest::serialize_series")]
    pub de_dt: AnnualSeries,
    #[serde(serialize_with = "crate::ingest::serialize_series")]
    pub cpi: AnnualSeries,
    #[serde(serialize_with = "crate::ingest::serialize_series")]
    pub ratio: AnnualSeries,
    /// Years whose dE/dt has the opposite sign to the previous nonzero value.
    pub zero_crossings: Vec<Year>,
    pub outliers: Vec<Year>,
    pub options: InflationOptions,
    /// True when CPI diverges near some zero crossing.
    pub discontinuity: bool,
}

struct Ols {
    slope: f64,
    intercept: f64,
    r2: f64,
}

fn ols(xs: &[f64], ys: &[f64]) -> Result<Ols> {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    // SS_tot = 0 means a constant target; report r2 = 0 rather than NaN
    let r2 = if syy == 0.0 {
        0.0
    } else {
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let e = y - (intercept + slope * x);
                e * e
            })
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(Ols {
        slope,
        intercept,
        r2,
    })
}

fn window(series: &AnnualSeries, range: YearRange) -> Result<Vec<(Year, f64)>> {
    let points = series.restrict(range).points().to_vec();
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    Ok(points)
}

/// Ordinary least squares of value on `year - x_origin` over `range`.
pub fn fit_linear(series: &AnnualSeries, range: YearRange, x_origin: Year) -> Result<LinearFit> {
    let points = window(series, range)?;
    let xs: Vec<f64> = points.iter().map(|&(y, _)| (y - x_origin) as f64).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v).collect();
    let fit = ols(&xs, &ys)?;
    Ok(LinearFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r2: fit.r2,
        range,
        x_origin,
        n: points.len(),
    })
}

/// Least squares of ln(value) on `year - x_origin`; every value in range must be positive.
pub fn fit_exponential(series: &AnnualSeries, range: YearRange, x_origin: Year) -> Result<ExpFit> {
    let points = window(series, range)?;
    if let Some(&(year, value)) = points.iter().find(|&&(_, v)| v <= 0.0) {
        return Err(Error::NonPositive {
            what: format!("'{}' at year {year}", series.label()),
            value,
        });
    }
    let xs: Vec<f64> = points.iter().map(|&(y, _)| (y - x_origin) as f64).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
    let fit = ols(&xs, &ys)?;
    Ok(ExpFit {
        amplitude: fit.intercept.exp(),
        rate: fit.slope,
        r2: fit.r2,
        range,
        x_origin,
        n: points.len(),
    })
}

/// Tests whether W/E is constant over `range`: fits a line to the ratio
/// (origin at the window start) and calls constancy falsified when the
/// fitted drift across the window exceeds `threshold` of the mean level.
pub fn test_w_over_e_constancy(
    w: &AnnualSeries,
    e: &AnnualSeries,
    range: YearRange,
    threshold: f64,
) -> Result<ConstancyVerdict> {
    let ratio = series::ratio(w, e)?;
    let fit = fit_linear(&ratio, range, range.start())?;
    let windowed = ratio.restrict(range);
    let mean = windowed.values().sum::<f64>() / windowed.len() as f64;
    let relative_slope = fit.slope * range.span() as f64 / mean;
    Ok(ConstancyVerdict {
        fit,
        mean,
        relative_slope,
        threshold,
        falsified: relative_slope.abs() > threshold,
    })
}

fn zero_crossings(series: &AnnualSeries) -> Vec<Year> {
    let mut crossings = Vec::new();
    let mut previous_sign = 0.0;
    for &(year, value) in series.points() {
        if value == 0.0 {
            continue;
        }
        let sign = value.signum();
        if previous_sign != 0.0 && sign != previous_sign {
            crossings.push(year);
        }
        previous_sign = sign;
    }
    crossings
}

/// Compares year-on-year energy change with CPI inflation, looking for the
/// divergence in inflation that a division by dE/dt → 0 would imply.
pub fn test_de_dt_inflation(
    energy: &AnnualSeries,
    cpi: &AnnualSeries,
    options: InflationOptions,
) -> Result<InflationReport> {
    let de_dt = series::diff_yoy(energy)?.with_label(format!("d{}/dt", energy.label()));
    let overlap: Vec<Year> = de_dt.years().filter(|&y| cpi.get(y).is_some()).collect();
    if overlap.len() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: overlap.len(),
        });
    }

    let mut ratio_points = Vec::new();
    for &(year, inflation) in cpi.points() {
        if let Some(change) = de_dt.get(year - options.lag) {
            if inflation == 0.0 {
                return Err(Error::ZeroDenominator {
                    label: cpi.label().to_string(),
                    year,
                });
            }
            ratio_points.push((year, change / inflation));
        }
    }
    let ratio = AnnualSeries::new(
        format!("{}/{}", de_dt.label(), cpi.label()),
        crate::Unit::ratio(de_dt.unit(), cpi.unit()),
        ratio_points,
    )?;

    let crossings = zero_crossings(&de_dt);
    let outliers = ratio
        .points()
        .iter()
        .filter(|&&(_, r)| r.abs() > options.outlier_cutoff)
        .map(|&(y, _)| y)
        .collect();

    let near_crossing =
        |year: Year| crossings.iter().any(|&c| (year - c).abs() <= options.divergence_window);
    let baseline = cpi
        .points()
        .iter()
        .filter(|&&(y, _)| !near_crossing(y))
        .map(|&(_, v)| v.abs())
        .fold(0.0, f64::max);
    let discontinuity = baseline > 0.0
        && cpi
            .points()
            .iter()
            .any(|&(y, v)| near_crossing(y) && v.abs() > options.divergence_factor * baseline);

    Ok(InflationReport {
        de_dt,
        cpi: cpi.clone(),
        ratio,
        zero_crossings: crossings,
        outliers,
        options,
        discontinuity,
    })
}

/// Mean and population standard deviation of `a(y) / b(y)` over shared years.
pub fn mean_ratio(a: &AnnualSeries, b: &AnnualSeries) -> Result<(f64, f64)> {
    let r = series::ratio(a, b)?;
    if r.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: r.len(),
        });
    }
    let n = r.len() as f64;
    let mean = r.values().sum::<f64>() / n;
    let var = r.values().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}
