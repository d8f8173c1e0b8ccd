//! Builders for the reconstructed GWP, energy, population and cumulative
//! production series.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{self, AnnualSeries, Year, YearRange};
use crate::units::{self, Unit};

pub const LABEL_Y_REP: &str = "Y_Rep";
pub const LABEL_E_REP: &str = "E_Rep";
pub const LABEL_Y_REP_MORRIS: &str = "Y_RepMorris";
pub const LABEL_E_REP_MORRIS: &str = "E_RepMorris";
pub const LABEL_W_SUM_LW: &str = "W_sum_LW";
pub const LABEL_W_SUM_REP_MORRIS: &str = "W_sum_RepMorris";
pub const LABEL_W_LW_PROJ: &str = "W_LW_proj";
pub const LABEL_POP: &str = "Pop";

/// Every dataset label the builders emit, in build order.
pub const DATASET_LABELS: [&str; 8] = [
    LABEL_Y_REP,
    LABEL_E_REP,
    LABEL_Y_REP_MORRIS,
    LABEL_E_REP_MORRIS,
    LABEL_W_SUM_LW,
    LABEL_W_SUM_REP_MORRIS,
    LABEL_W_LW_PROJ,
    LABEL_POP,
];

/// Lowest per-capita energy capture the Morris tables allow.
pub const MORRIS_FLOOR_KCAL: f64 = 4000.0;
/// Base year of the Geary-Khamis dollars the fixed price ratio is quoted in.
pub const GK_BASE_YEAR: i32 = 1990;
/// Last year of the pre-industrial exponential segment of the GWP build.
pub const GWP_EXPONENTIAL_END: Year = 1820;
pub const GWP_COMPOSITE_START: Year = 1960;
pub const GWP_COMPOSITE_END: Year = 1990;
/// First year carried by the commercial energy tables.
pub const ENERGY_TABLE_START: Year = 1800;

/// Amplitude and rate of `W(x) = amplitude · e^(rate · x)`, x in calendar years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpCurve {
    pub amplitude: f64,
    pub rate: f64,
}

impl ExpCurve {
    /// Curve with amplitude 244.064 and rate 5.596e-4 (the default).
    pub const PRIMARY: ExpCurve = ExpCurve {
        amplitude: 244.064,
        rate: 5.596e-4,
    };
    /// Alternative parameterisation: amplitude 2.440, rate 5.965e-4.
    pub const ALTERNATE: ExpCurve = ExpCurve {
        amplitude: 2.440,
        rate: 5.965e-4,
    };

    pub fn at(&self, year: Year) -> f64 {
        self.amplitude * (self.rate * year as f64).exp()
    }

    pub fn doubling_time(&self) -> f64 {
        std::f64::consts::LN_2 / self.rate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructionConfig {
    pub year1_energy_ej: f64,
    /// Trillion 1990 GK dollars per EJ.
    pub gk_ratio: f64,
    /// Used only when the energy tables lack a row for 1800.
    pub e_1800_ej: f64,
    pub w_lw_fit: ExpCurve,
    pub truncate_w_years: usize,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig {
            year1_energy_ej: 5.45875,
            gk_ratio: 0.03827,
            e_1800_ej: 20.3508,
            w_lw_fit: ExpCurve::PRIMARY,
            truncate_w_years: 1000,
        }
    }
}

impl ReconstructionConfig {
    pub fn validate(&self) -> Result<()> {
        for (what, value) in [
            ("year1_energy_ej", self.year1_energy_ej),
            ("gk_ratio", self.gk_ratio),
            ("e_1800_ej", self.e_1800_ej),
            ("w_lw_fit.amplitude", self.w_lw_fit.amplitude),
            ("w_lw_fit.rate", self.w_lw_fit.rate),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositive {
                    what: what.into(),
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Interpolation used for energy between year 1 and 1800.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EnergyMethod {
    /// Constant-rate growth between the two anchors.
    A,
    /// Follows the population curve between the anchors.
    #[default]
    B,
}

impl FromStr for EnergyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" | "A" => Ok(EnergyMethod::A),
            "b" | "B" => Ok(EnergyMethod::B),
            other => Err(Error::InvalidInput(format!(
                "unknown energy interpolation method '{other}' (expected A or B)"
            ))),
        }
    }
}

impl fmt::Display for EnergyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyMethod::A => "A",
            EnergyMethod::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Civilization {
    West,
    East,
    Americas,
    HunterGatherer,
}

impl Civilization {
    pub const ALL: [Civilization; 4] = [
        Civilization::West,
        Civilization::East,
        Civilization::Americas,
        Civilization::HunterGatherer,
    ];

    pub fn column(&self) -> &'static str {
        match self {
            Civilization::West => "west",
            Civilization::East => "east",
            Civilization::Americas => "americas",
            Civilization::HunterGatherer => "hunter_gatherer",
        }
    }
}

/// Per-capita daily energy capture by civilisation, with the population
/// split that weights them.
#[derive(Debug, Clone, PartialEq)]
pub struct MorrisTable {
    kcal: [AnnualSeries; 4],
    shares: [f64; 4],
}

impl MorrisTable {
    /// Population split at year 1, in millions: West, East, Americas, and
    /// the remainder of the total living as hunter-gatherers.
    pub const YEAR1_POPULATION_MILLIONS: [f64; 3] = [34.0, 74.0, 6.0];
    pub const YEAR1_TOTAL_MILLIONS: f64 = 226.0;

    /// `kcal` rows are in [`Civilization::ALL`] order.
    pub fn new(kcal: [AnnualSeries; 4], shares: [f64; 4]) -> Result<Self> {
        for row in &kcal {
            if row.is_empty() {
                return Err(Error::InvalidSeries {
                    label: row.label().to_string(),
                    reason: "no energy capture rows".into(),
                });
            }
            for &(year, value) in row.points() {
                if value < 0.0 {
                    return Err(Error::Negative {
                        what: format!("energy capture '{}' at year {year}", row.label()),
                        value,
                    });
                }
                if value < MORRIS_FLOOR_KCAL {
                    return Err(Error::OutOfBounds {
                        what: format!("energy capture '{}' at year {year}", row.label()),
                        value,
                        min: MORRIS_FLOOR_KCAL,
                        max: f64::INFINITY,
                    });
                }
            }
        }
        if shares.iter().any(|&s| !(0.0..=1.0).contains(&s)) {
            return Err(Error::InvalidInput(format!(
                "population shares must lie in [0, 1], got {shares:?}"
            )));
        }
        let total: f64 = shares.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "population shares must sum to 1, got {total}"
            )));
        }
        Ok(MorrisTable { kcal, shares })
    }

    /// Shares derived from the year-1 population split.
    pub fn default_shares() -> [f64; 4] {
        let [west, east, americas] = Self::YEAR1_POPULATION_MILLIONS;
        let total = Self::YEAR1_TOTAL_MILLIONS;
        let hunter_gatherer = total - west - east - americas;
        [west / total, east / total, americas / total, hunter_gatherer / total]
    }

    pub fn kcal(&self, civ: Civilization) -> &AnnualSeries {
        &self.kcal[civ as usize]
    }

    pub fn share(&self, civ: Civilization) -> f64 {
        self.shares[civ as usize]
    }
}

/// A cumulative series whose first `flagged` years are kept but marked as
/// unreliable.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeSeries {
    pub series: AnnualSeries,
    pub flagged: usize,
}

impl CumulativeSeries {
    pub fn flagged_years(&self) -> impl Iterator<Item = Year> + '_ {
        self.series.years().take(self.flagged)
    }

    pub fn is_flagged(&self, year: Year) -> bool {
        self.flagged_years().any(|y| y == year)
    }

    /// The points after the flagged prefix.
    pub fn reliable(&self) -> Result<AnnualSeries> {
        let points = self.series.points()[self.flagged.min(self.series.len())..].to_vec();
        AnnualSeries::new(self.series.label(), self.series.unit().clone(), points)
    }
}

/// Energy and production extended back before year 1 from the Morris tables.
#[derive(Debug, Clone, PartialEq)]
pub struct MorrisExtension {
    pub energy: AnnualSeries,
    pub production: AnnualSeries,
    /// Energy the tables imply at year 1.
    pub year1_energy_ej: f64,
    /// `year1_energy_ej / cfg.year1_energy_ej - 1`.
    pub year1_deviation: f64,
}

impl MorrisExtension {
    pub const ANCHOR_TOLERANCE: f64 = 1e-3;

    pub fn anchor_consistent(&self) -> bool {
        self.year1_deviation.abs() <= Self::ANCHOR_TOLERANCE
    }
}

fn range(start: Year, end: Year) -> Result<YearRange> {
    YearRange::new(start, end)
}

fn require(series: &AnnualSeries, year: Year) -> Result<f64> {
    series.get(year).ok_or_else(|| Error::MissingAnchor {
        label: series.label().to_string(),
        year,
    })
}

/// Exponential fill between each consecutive pair of anchors inside `within`.
fn fill_exponential_piecewise(series: &AnnualSeries, within: YearRange) -> Result<AnnualSeries> {
    let anchors: Vec<Year> = series.years().filter(|&y| within.contains(y)).collect();
    let mut out = series.clone();
    for pair in anchors.windows(2) {
        out = series::fill_exponential(&out, range(pair[0], pair[1])?)?;
    }
    Ok(out)
}

/// Composite GWP: constant-rate growth between the sparse anchors up to
/// 1820, straight lines to 1960, the yearly shape of `fred_gwp` scaled to the
/// anchors of `owid_gwp` through 1990, and `owid_gwp` as given afterwards.
///
/// The result carries the unit of `owid_gwp`.
pub fn build_y_rep(owid_gwp: &AnnualSeries, fred_gwp: &AnnualSeries) -> Result<AnnualSeries> {
    let first = owid_gwp.first_year().ok_or(Error::InsufficientData { needed: 2, got: 0 })?;
    let last = owid_gwp.last_year().expect("non-empty");
    require(owid_gwp, GWP_EXPONENTIAL_END)?;
    require(owid_gwp, GWP_COMPOSITE_START)?;
    require(owid_gwp, GWP_COMPOSITE_END)?;
    owid_gwp.require_consecutive_from(GWP_COMPOSITE_END)?;
    if first >= GWP_EXPONENTIAL_END {
        return Err(Error::MissingAnchor {
            label: owid_gwp.label().to_string(),
            year: first.min(1),
        });
    }

    let early = fill_exponential_piecewise(owid_gwp, range(first, GWP_EXPONENTIAL_END)?)?;
    let mid = series::fill_linear(&early, range(GWP_EXPONENTIAL_END, GWP_COMPOSITE_START)?)?;

    let composite = range(GWP_COMPOSITE_START, GWP_COMPOSITE_END)?;
    let mut multipliers = Vec::new();
    for (year, value) in owid_gwp.restrict(composite).points().iter().copied() {
        let fred = fred_gwp.get(year).ok_or_else(|| Error::NoOverlap {
            left: owid_gwp.label().to_string(),
            right: format!("{} at {year}", fred_gwp.label()),
        })?;
        if fred == 0.0 {
            return Err(Error::ZeroDenominator {
                label: fred_gwp.label().to_string(),
                year,
            });
        }
        multipliers.push((year, value / fred));
    }
    let multipliers = series::fill_linear(
        &AnnualSeries::new("multiplier", Unit::Dimensionless, multipliers)?,
        composite,
    )?;
    let mut scaled = Vec::with_capacity(composite.len());
    for year in composite.years() {
        // anchor years keep the OWID value itself
        let value = match owid_gwp.get(year) {
            Some(v) => v,
            None => multipliers.at(year)? * fred_gwp.at(year)?,
        };
        scaled.push((year, value));
    }

    let out = mid.upsert(scaled)?;
    let out = out.restrict(range(first, last)?);
    Ok(out.with_label(LABEL_Y_REP))
}

/// Multiplier `OWID/FRED` at each OWID anchor of the composite window, as
/// used by [`build_y_rep`].
pub fn composite_multipliers(owid_gwp: &AnnualSeries, fred_gwp: &AnnualSeries) -> Result<AnnualSeries> {
    let composite = range(GWP_COMPOSITE_START, GWP_COMPOSITE_END)?;
    let owid = owid_gwp.restrict(composite);
    series::ratio(&owid, fred_gwp).map(|r| r.with_label("multiplier").with_unit(Unit::Dimensionless))
}

/// Total primary energy in EJ from per-source TWh tables, extended back to
/// year 1 with the configured anchor and `method`.
pub fn build_e_rep(
    sources_twh: &[AnnualSeries],
    population: &AnnualSeries,
    cfg: &ReconstructionConfig,
    method: EnergyMethod,
) -> Result<AnnualSeries> {
    cfg.validate()?;
    if let Some(bad) = sources_twh.iter().find(|s| *s.unit() != Unit::TerawattHour) {
        return Err(Error::UnitMismatch {
            left: Unit::TerawattHour,
            right: bad.unit().clone(),
        });
    }
    let total_twh = AnnualSeries::sum("energy", sources_twh)?;
    let mut ej = Vec::with_capacity(total_twh.len());
    for &(year, twh) in total_twh.points() {
        ej.push((year, units::twh_to_ej(twh)?));
    }
    let mut energy = AnnualSeries::new(LABEL_E_REP, Unit::Exajoule, ej)?;
    if energy.get(ENERGY_TABLE_START).is_none() {
        energy = energy.upsert([(ENERGY_TABLE_START, cfg.e_1800_ej)])?;
    }
    let energy = energy.restrict(range(ENERGY_TABLE_START, Year::MAX)?);
    let last = energy.last_year().expect("non-empty");
    let energy = series::fill_linear(&energy, range(ENERGY_TABLE_START, last)?)?;

    let anchored = energy.upsert([(1, cfg.year1_energy_ej)])?;
    let early = range(1, ENERGY_TABLE_START)?;
    match method {
        EnergyMethod::A => series::fill_exponential(&anchored, early),
        EnergyMethod::B => series::fill_proportional(&anchored, population, early),
    }
}

/// Energy capture for every year from the population's first year to year 1,
/// weighting each civilisation's per-capita capture by its population share,
/// and its value through the fixed GK price ratio.
pub fn build_morris_extension(
    morris: &MorrisTable,
    population: &AnnualSeries,
    cfg: &ReconstructionConfig,
) -> Result<MorrisExtension> {
    cfg.validate()?;
    let first = population
        .first_year()
        .ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
    if first > 1 {
        return Err(Error::NotCovered {
            label: population.label().to_string(),
            year: 1,
        });
    }
    let span = range(first, 1)?;
    let mut rows = Vec::with_capacity(4);
    for civ in Civilization::ALL {
        let row = morris.kcal(civ);
        let (lo, hi) = (row.first_year().expect("non-empty"), row.last_year().expect("non-empty"));
        if lo > first || hi < 1 {
            return Err(Error::InvalidInput(format!(
                "energy capture row '{}' covers {lo}..={hi}, needs {first}..=1",
                row.label()
            )));
        }
        rows.push(series::fill_linear(row, range(lo, hi)?)?);
    }

    let mut energy = Vec::with_capacity(span.len());
    for year in span.years() {
        let people = population.at(year)?;
        let mut total = 0.0;
        for (civ, row) in Civilization::ALL.iter().zip(&rows) {
            total += units::kcal_capture_to_ej_per_year(row.at(year)?, morris.share(*civ) * people)?;
        }
        energy.push((year, total));
    }
    let energy = AnnualSeries::new(LABEL_E_REP_MORRIS, Unit::Exajoule, energy)?;
    let production = energy
        .scale(cfg.gk_ratio)?
        .with_label(LABEL_Y_REP_MORRIS)
        .with_unit(Unit::TrillionUsd { base_year: GK_BASE_YEAR });
    let year1 = energy.at(1)?;
    Ok(MorrisExtension {
        year1_energy_ej: year1,
        year1_deviation: year1 / cfg.year1_energy_ej - 1.0,
        energy,
        production,
    })
}

/// Cumulative sum of `y` from `start`, with the first `truncate` years flagged.
pub fn build_w(y: &AnnualSeries, start: Year, truncate: usize) -> Result<CumulativeSeries> {
    let series = series::cumulative_sum(y, start)?;
    let flagged = truncate.min(series.len());
    Ok(CumulativeSeries { series, flagged })
}

/// Evaluates `fit` on every year of `range`.
pub fn project_w_lw_backward(fit: ExpCurve, range: YearRange) -> Result<AnnualSeries> {
    if fit.amplitude.is_nan() || fit.amplitude <= 0.0 {
        return Err(Error::NonPositive {
            what: "curve amplitude".into(),
            value: fit.amplitude,
        });
    }
    AnnualSeries::from_values(
        LABEL_W_LW_PROJ,
        Unit::TrillionUsd { base_year: GK_BASE_YEAR },
        range.start(),
        range.years().map(|x| fit.at(x)),
    )
}

/// Mean of the available sources at every year any of them reports,
/// then straight lines between those years.
pub fn build_population(sources: &[AnnualSeries]) -> Result<AnnualSeries> {
    if sources.is_empty() {
        return Err(Error::InvalidInput("population needs at least one source".into()));
    }
    let mut by_year: std::collections::BTreeMap<Year, (f64, usize)> = Default::default();
    for source in sources {
        if *source.unit() != Unit::Person {
            return Err(Error::UnitMismatch {
                left: Unit::Person,
                right: source.unit().clone(),
            });
        }
        for &(year, value) in source.points() {
            let entry = by_year.entry(year).or_insert((0.0, 0));
            entry.0 += value;
            entry.1 += 1;
        }
    }
    let points: Vec<(Year, f64)> = by_year
        .into_iter()
        .map(|(year, (sum, n))| (year, sum / n as f64))
        .collect();
    let anchors = AnnualSeries::new(LABEL_POP, Unit::Person, points)?;
    let span = range(
        anchors.first_year().ok_or(Error::InsufficientData { needed: 1, got: 0 })?,
        anchors.last_year().expect("non-empty"),
    )?;
    series::fill_linear(&anchors, span)
}
