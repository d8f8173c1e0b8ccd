//! Annual time series and the gap-filling, differencing, summation and ratio
//! operations the reconstruction and analysis layers are built from.
//!
//! Years are astronomical integers: year 0 exists and precedes year 1, so
//! arithmetic on the grid never has to skip a value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Unit;

pub type Year = i64;

/// Inclusive range of calendar years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YearRange {
    start: Year,
    end: Year,
}

impl YearRange {
    pub fn new(start: Year, end: Year) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidRange { start, end });
        }
        Ok(YearRange { start, end })
    }

    pub fn start(&self) -> Year {
        self.start
    }

    pub fn end(&self) -> Year {
        self.end
    }

    /// Number of years between the endpoints (`end - start`).
    pub fn span(&self) -> Year {
        self.end - self.start
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, year: Year) -> bool {
        (self.start..=self.end).contains(&year)
    }

    pub fn years(&self) -> impl Iterator<Item = Year> {
        self.start..=self.end
    }
}

/// Ordered `(year, value)` pairs with a label and a unit tag.
///
/// Construction validates that years are strictly increasing and that every
/// value is finite, so every instance in circulation satisfies both.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualSeries {
    label: String,
    unit: Unit,
    points: Vec<(Year, f64)>,
}

impl AnnualSeries {
    pub fn new(label: impl Into<String>, unit: Unit, points: Vec<(Year, f64)>) -> Result<Self> {
        let label = label.into();
        for pair in points.windows(2) {
            let (prev, next) = (pair[0].0, pair[1].0);
            if next == prev {
                return Err(Error::DuplicateYear { year: next });
            }
            if next < prev {
                return Err(Error::InvalidSeries {
                    label,
                    reason: format!("years not increasing ({prev} then {next})"),
                });
            }
        }
        if let Some(&(year, value)) = points.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidSeries {
                label,
                reason: format!("non-finite value {value} at year {year}"),
            });
        }
        Ok(AnnualSeries {
            label,
            unit,
            points,
        })
    }

    /// Builds a series from `values` laid on consecutive years starting at `first`.
    pub fn from_values(
        label: impl Into<String>,
        unit: Unit,
        first: Year,
        values: impl IntoIterator<Item = f64>,
    ) -> Result<Self> {
        let points = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (first + i as Year, v))
            .collect();
        Self::new(label, unit, points)
    }

    /// Sorts the points by year before validating.
    pub fn from_unsorted(
        label: impl Into<String>,
        unit: Unit,
        mut points: Vec<(Year, f64)>,
    ) -> Result<Self> {
        points.sort_by_key(|&(year, _)| year);
        Self::new(label, unit, points)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn unit(&self) -> &Unit {
        &self.unit
    }

    pub fn points(&self) -> &[(Year, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = Year> + '_ {
        self.points.iter().map(|&(y, _)| y)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|&(_, v)| v)
    }

    pub fn first_year(&self) -> Option<Year> {
        self.points.first().map(|&(y, _)| y)
    }

    pub fn last_year(&self) -> Option<Year> {
        self.points.last().map(|&(y, _)| y)
    }

    pub fn get(&self, year: Year) -> Option<f64> {
        self.points
            .binary_search_by_key(&year, |&(y, _)| y)
            .ok()
            .map(|i| self.points[i].1)
    }

    /// Like [`get`](Self::get) but reports the missing year as an error.
    pub fn at(&self, year: Year) -> Result<f64> {
        self.get(year).ok_or_else(|| Error::NotCovered {
            label: self.label.clone(),
            year,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_unit(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }

    /// Points whose year falls inside `range`.
    pub fn restrict(&self, range: YearRange) -> AnnualSeries {
        AnnualSeries {
            label: self.label.clone(),
            unit: self.unit.clone(),
            points: self
                .points
                .iter()
                .copied()
                .filter(|&(y, _)| range.contains(y))
                .collect(),
        }
    }

    pub fn map_values(&self, f: impl Fn(Year, f64) -> f64) -> Result<AnnualSeries> {
        let points = self.points.iter().map(|&(y, v)| (y, f(y, v))).collect();
        AnnualSeries::new(self.label.clone(), self.unit.clone(), points)
    }

    pub fn scale(&self, factor: f64) -> Result<AnnualSeries> {
        self.map_values(|_, v| v * factor)
    }

    /// Fails unless every year from `from` to the last point is present.
    pub fn require_consecutive_from(&self, from: Year) -> Result<&[(Year, f64)]> {
        let start = self
            .points
            .binary_search_by_key(&from, |&(y, _)| y)
            .map_err(|_| Error::NotCovered {
                label: self.label.clone(),
                year: from,
            })?;
        let tail = &self.points[start..];
        for pair in tail.windows(2) {
            if pair[1].0 != pair[0].0 + 1 {
                return Err(Error::Gap {
                    label: self.label.clone(),
                    after: pair[0].0,
                    next: pair[1].0,
                });
            }
        }
        Ok(tail)
    }

    /// Overwrites or inserts the given points, keeping the rest.
    pub fn upsert(&self, updates: impl IntoIterator<Item = (Year, f64)>) -> Result<AnnualSeries> {
        let mut merged: std::collections::BTreeMap<Year, f64> = self.points.iter().copied().collect();
        merged.extend(updates);
        AnnualSeries::new(self.label.clone(), self.unit.clone(), merged.into_iter().collect())
    }

    /// Concatenates series whose year spans do not overlap. All parts must
    /// share one unit.
    pub fn concat(label: impl Into<String>, parts: &[&AnnualSeries]) -> Result<AnnualSeries> {
        let unit = parts
            .first()
            .map(|s| s.unit.clone())
            .ok_or_else(|| Error::InvalidInput("concat needs at least one series".into()))?;
        let mut points = Vec::new();
        for part in parts {
            if part.unit != unit {
                return Err(Error::UnitMismatch {
                    left: unit,
                    right: part.unit.clone(),
                });
            }
            points.extend_from_slice(&part.points);
        }
        AnnualSeries::new(label, unit, points)
    }

    /// Sums several series of one unit on the union of their years; a
    /// series absent at a year contributes nothing there.
    pub fn sum(label: impl Into<String>, parts: &[AnnualSeries]) -> Result<AnnualSeries> {
        let unit = parts
            .first()
            .map(|s| s.unit.clone())
            .ok_or_else(|| Error::InvalidInput("sum needs at least one series".into()))?;
        let mut totals: std::collections::BTreeMap<Year, f64> = Default::default();
        for part in parts {
            if part.unit != unit {
                return Err(Error::UnitMismatch {
                    left: unit,
                    right: part.unit.clone(),
                });
            }
            for &(y, v) in &part.points {
                *totals.entry(y).or_insert(0.0) += v;
            }
        }
        AnnualSeries::new(label, unit, totals.into_iter().collect())
    }
}

/// Constant per-year factor `a` with `n0 * a^span == ny`.
pub fn growth_factor(n0: f64, ny: f64, span: Year) -> Result<f64> {
    if n0 <= 0.0 {
        return Err(Error::NonPositive {
            what: "start value".into(),
            value: n0,
        });
    }
    if ny <= 0.0 {
        return Err(Error::NonPositive {
            what: "end value".into(),
            value: ny,
        });
    }
    if span < 1 {
        return Err(Error::InvalidInput(format!(
            "growth span must be at least one year, got {span}"
        )));
    }
    Ok(((ny / n0).ln() / span as f64).exp())
}

fn anchor(series: &AnnualSeries, year: Year) -> Result<f64> {
    series.get(year).ok_or_else(|| Error::MissingAnchor {
        label: series.label.clone(),
        year,
    })
}

/// Fills every year of `range` with constant-rate growth between the values
/// at its two endpoints. Points outside `range` are kept; interior points are
/// replaced.
pub fn fill_exponential(series: &AnnualSeries, range: YearRange) -> Result<AnnualSeries> {
    let n0 = anchor(series, range.start)?;
    let ny = anchor(series, range.end)?;
    let span = range.span();
    if span == 0 {
        return Ok(series.clone());
    }
    // validates positivity of both anchors
    growth_factor(n0, ny, span)?;
    let log_rate = (ny / n0).ln() / span as f64;
    let interior = (range.start + 1..range.end)
        .map(|year| (year, n0 * (log_rate * (year - range.start) as f64).exp()));
    series.upsert(interior)
}

/// Fills every year of `range` by straight lines between the nearest
/// enclosing points already present. Both endpoints must be present.
pub fn fill_linear(series: &AnnualSeries, range: YearRange) -> Result<AnnualSeries> {
    anchor(series, range.start)?;
    anchor(series, range.end)?;
    let anchors: Vec<(Year, f64)> = series
        .points
        .iter()
        .copied()
        .filter(|&(y, _)| range.contains(y))
        .collect();
    let mut filled = Vec::with_capacity(range.len());
    for pair in anchors.windows(2) {
        let ((y0, v0), (y1, v1)) = (pair[0], pair[1]);
        filled.push((y0, v0));
        let width = (y1 - y0) as f64;
        for year in y0 + 1..y1 {
            let t = (year - y0) as f64 / width;
            filled.push((year, v0 + (v1 - v0) * t));
        }
    }
    if let Some(&last) = anchors.last() {
        filled.push(last);
    }
    series.upsert(filled)
}

/// Fills `range` so the result follows the shape of `reference` while
/// matching the anchor values at both endpoints.
///
/// The shape term is `anchors(start) * reference(y) / reference(start)`.
/// It is multiplied by a factor ramping linearly from 1 at the start to
/// `anchors(end) / shape(end)` at the end, so both anchors are hit.
pub fn fill_proportional(
    anchors: &AnnualSeries,
    reference: &AnnualSeries,
    range: YearRange,
) -> Result<AnnualSeries> {
    let a_start = anchor(anchors, range.start)?;
    let a_end = anchor(anchors, range.end)?;
    let mut reference_values = Vec::with_capacity(range.len());
    for year in range.years() {
        let r = reference.at(year)?;
        if r <= 0.0 {
            return Err(Error::NonPositive {
                what: format!("reference '{}' at year {year}", reference.label),
                value: r,
            });
        }
        reference_values.push(r);
    }
    let span = range.span();
    if span == 0 {
        return Ok(anchors.clone());
    }
    let r_start = reference_values[0];
    let raw_end = a_start * reference_values[range.len() - 1] / r_start;
    let end_correction = a_end / raw_end;
    let interior = (range.start + 1..range.end).map(|year| {
        let offset = year - range.start;
        let raw = a_start * reference_values[offset as usize] / r_start;
        let t = offset as f64 / span as f64;
        (year, raw * (1.0 + (end_correction - 1.0) * t))
    });
    anchors.upsert(interior)
}

/// Running total from `from` to the last year: `out(t) = sum(series(from..=t))`.
pub fn cumulative_sum(series: &AnnualSeries, from: Year) -> Result<AnnualSeries> {
    let tail = series.require_consecutive_from(from)?;
    let mut total = 0.0;
    let points = tail
        .iter()
        .map(|&(y, v)| {
            total += v;
            (y, total)
        })
        .collect();
    AnnualSeries::new(series.label.clone(), series.unit.clone(), points)
}

/// Year-on-year first difference, `out(t) = s(t) - s(t-1)`, starting one
/// year after the input.
pub fn diff_yoy(series: &AnnualSeries) -> Result<AnnualSeries> {
    if series.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: series.len(),
        });
    }
    let first = series.first_year().expect("non-empty");
    series.require_consecutive_from(first)?;
    let points = series
        .points
        .windows(2)
        .map(|w| (w[1].0, w[1].1 - w[0].1))
        .collect();
    AnnualSeries::new(series.label.clone(), series.unit.clone(), points)
}

/// Pointwise quotient on the years both series share.
pub fn ratio(numerator: &AnnualSeries, denominator: &AnnualSeries) -> Result<AnnualSeries> {
    let label = format!("{}/{}", numerator.label, denominator.label);
    let mut points = Vec::new();
    for &(year, num) in &numerator.points {
        if let Some(den) = denominator.get(year) {
            if den == 0.0 {
                return Err(Error::ZeroDenominator { label, year });
            }
            points.push((year, num / den));
        }
    }
    if points.is_empty() {
        return Err(Error::NoOverlap {
            left: numerator.label.clone(),
            right: denominator.label.clone(),
        });
    }
    AnnualSeries::new(
        label,
        Unit::ratio(&numerator.unit, &denominator.unit),
        points,
    )
}
