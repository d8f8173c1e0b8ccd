//! Unit tags carried by every series, and the fixed conversion constants.
//!
//! Tags are metadata: they make series self-describing and let binary
//! operations reject mismatched operands. No deflator chain is applied to
//! currency tags; the base year only records which dollars a value is in.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exajoules per terawatt-hour.
pub const EJ_PER_TWH: f64 = 0.0036;
/// Joules per kilocalorie.
pub const JOULES_PER_KCAL: f64 = 4184.0;
/// Mean Julian year length in days.
pub const DAYS_PER_YEAR: f64 = 365.25;
pub const JOULES_PER_EJ: f64 = 1e18;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Unit {
    Exajoule,
    TerawattHour,
    Joule,
    KcalPerCapitaDay,
    /// Trillions of US dollars at the prices of `base_year`.
    TrillionUsd { base_year: i32 },
    /// Trillions of US dollars at the prices of each observation's own year.
    TrillionUsdCurrent,
    GearyKhamisDollar,
    UsdPerExajoule,
    Person,
    Percent,
    Dimensionless,
    Ratio(Box<Unit>, Box<Unit>),
}

impl Unit {
    /// Builds `num / den`, simplifying `X/X` to dimensionless and `X/1` to `X`.
    pub fn ratio(num: &Unit, den: &Unit) -> Unit {
        if num == den {
            Unit::Dimensionless
        } else if *den == Unit::Dimensionless {
            num.clone()
        } else {
            Unit::Ratio(Box::new(num.clone()), Box::new(den.clone()))
        }
    }

    pub fn is_energy(&self) -> bool {
        matches!(self, Unit::Exajoule | Unit::TerawattHour | Unit::Joule)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Exajoule => f.write_str("EJ"),
            Unit::TerawattHour => f.write_str("TWh"),
            Unit::Joule => f.write_str("J"),
            Unit::KcalPerCapitaDay => f.write_str("kcal/cap/day"),
            Unit::TrillionUsd { base_year } => write!(f, "trillion USD({base_year})"),
            Unit::TrillionUsdCurrent => f.write_str("trillion USD(current)"),
            Unit::GearyKhamisDollar => f.write_str("GK$"),
            Unit::UsdPerExajoule => f.write_str("USD/EJ"),
            Unit::Person => f.write_str("person"),
            Unit::Percent => f.write_str("%"),
            Unit::Dimensionless => f.write_str("1"),
            Unit::Ratio(num, den) => write!(f, "({num})/({den})"),
        }
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unit = match s {
            "EJ" => Unit::Exajoule,
            "TWh" => Unit::TerawattHour,
            "J" => Unit::Joule,
            "kcal/cap/day" => Unit::KcalPerCapitaDay,
            "trillion USD(current)" => Unit::TrillionUsdCurrent,
            "GK$" => Unit::GearyKhamisDollar,
            "USD/EJ" => Unit::UsdPerExajoule,
            "person" => Unit::Person,
            "%" => Unit::Percent,
            "1" => Unit::Dimensionless,
            _ => {
                if let Some(year) = s
                    .strip_prefix("trillion USD(")
                    .and_then(|rest| rest.strip_suffix(')'))
                {
                    let base_year = year
                        .parse()
                        .map_err(|_| Error::UnknownUnit(s.to_string()))?;
                    Unit::TrillionUsd { base_year }
                } else if s.starts_with('(') {
                    parse_ratio(s)?
                } else {
                    return Err(Error::UnknownUnit(s.to_string()));
                }
            }
        };
        Ok(unit)
    }
}

// "(num)/(den)" with arbitrarily nested parenthesised operands.
fn parse_ratio(s: &str) -> Result<Unit> {
    let bad = || Error::UnknownUnit(s.to_string());
    let close = matching_paren(s, 0).ok_or_else(bad)?;
    let num = &s[1..close];
    let rest = s[close + 1..].strip_prefix('/').ok_or_else(bad)?;
    if !rest.starts_with('(') || matching_paren(rest, 0) != Some(rest.len() - 1) {
        return Err(bad());
    }
    let den = &rest[1..rest.len() - 1];
    Ok(Unit::Ratio(Box::new(num.parse()?), Box::new(den.parse()?)))
}

fn matching_paren(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices().skip(open) {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

impl Serialize for Unit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Unit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Terawatt-hours to exajoules.
pub fn twh_to_ej(twh: f64) -> Result<f64> {
    if twh < 0.0 {
        return Err(Error::Negative {
            what: "energy (TWh)".into(),
            value: twh,
        });
    }
    Ok(twh * EJ_PER_TWH)
}

pub fn ej_to_twh(ej: f64) -> Result<f64> {
    if ej < 0.0 {
        return Err(Error::Negative {
            what: "energy (EJ)".into(),
            value: ej,
        });
    }
    Ok(ej / EJ_PER_TWH)
}

/// Annual energy capture of a population, in EJ per year, from a daily
/// per-capita intake in kilocalories.
pub fn kcal_capture_to_ej_per_year(kcal_per_cap_day: f64, population: f64) -> Result<f64> {
    if kcal_per_cap_day < 0.0 {
        return Err(Error::Negative {
            what: "energy capture (kcal/cap/day)".into(),
            value: kcal_per_cap_day,
        });
    }
    if population < 0.0 {
        return Err(Error::Negative {
            what: "population".into(),
            value: population,
        });
    }
    Ok(kcal_per_cap_day * JOULES_PER_KCAL * DAYS_PER_YEAR * population / JOULES_PER_EJ)
}

/// Values an energy quantity in currency through a fixed price ratio
/// (trillion dollars per EJ). Returns the value tagged with the ratio's
/// currency.
pub fn energy_to_gk_dollars(ej: f64, trillion_usd_per_ej: f64, base_year: i32) -> Result<(f64, Unit)> {
    if trillion_usd_per_ej <= 0.0 {
        return Err(Error::NonPositive {
            what: "price ratio (trillion USD/EJ)".into(),
            value: trillion_usd_per_ej,
        });
    }
    Ok((ej * trillion_usd_per_ej, Unit::TrillionUsd { base_year }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn twh_conversion_matches_published_figure() {
        assert_relative_eq!(twh_to_ej(12825.0).unwrap(), 46.17, epsilon = 1e-9);
        assert_eq!(twh_to_ej(0.0).unwrap(), 0.0);
        assert_relative_eq!(twh_to_ej(1000.0).unwrap(), 3.6, epsilon = 1e-12);
        assert!(twh_to_ej(-1.0).is_err());
    }

    #[test]
    fn kcal_capture() {
        // 4000 kcal * 4184 J * 365.25 d * 1e6 people
        let expected = 4000.0 * 4184.0 * 365.25 * 1e6 / 1e18;
        assert_relative_eq!(expected, 6.112824e-3, max_relative = 1e-12);
        let got = kcal_capture_to_ej_per_year(4000.0, 1e6).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        assert_relative_eq!(got * 150_000.0, 916.9236, max_relative = 1e-6);
        assert_eq!(kcal_capture_to_ej_per_year(0.0, 123.0).unwrap(), 0.0);
        assert!(kcal_capture_to_ej_per_year(-1.0, 1.0).is_err());
        assert!(kcal_capture_to_ej_per_year(1.0, -1.0).is_err());
    }

    #[test]
    fn gk_valuation() {
        let (v, unit) = energy_to_gk_dollars(1.0, 0.03827, 1990).unwrap();
        assert_eq!(v, 0.03827);
        assert_eq!(unit, Unit::TrillionUsd { base_year: 1990 });
        assert_eq!(energy_to_gk_dollars(0.0, 0.5, 1990).unwrap().0, 0.0);
        let (v, _) = energy_to_gk_dollars(5.45875, 0.03827, 1990).unwrap();
        assert_relative_eq!(v, 0.2089063625, max_relative = 1e-12);
        assert!(energy_to_gk_dollars(1.0, 0.0, 1990).is_err());
    }

    #[test]
    fn ratio_tags_simplify() {
        assert_eq!(Unit::ratio(&Unit::Exajoule, &Unit::Exajoule), Unit::Dimensionless);
        assert_eq!(Unit::ratio(&Unit::Person, &Unit::Dimensionless), Unit::Person);
        let r = Unit::ratio(&Unit::TrillionUsd { base_year: 1990 }, &Unit::Exajoule);
        assert_eq!(r.to_string(), "(trillion USD(1990))/(EJ)");
    }

    #[test]
    fn tags_parse_back() {
        let nested = Unit::ratio(
            &Unit::ratio(&Unit::Exajoule, &Unit::Person),
            &Unit::Percent,
        );
        for unit in [
            Unit::Exajoule,
            Unit::TerawattHour,
            Unit::Joule,
            Unit::KcalPerCapitaDay,
            Unit::TrillionUsd { base_year: 2011 },
            Unit::TrillionUsdCurrent,
            Unit::GearyKhamisDollar,
            Unit::UsdPerExajoule,
            Unit::Person,
            Unit::Percent,
            Unit::Dimensionless,
            nested,
        ] {
            assert_eq!(unit.to_string().parse::<Unit>().unwrap(), unit);
        }
        assert!("".parse::<Unit>().is_err());
        assert!("furlongs".parse::<Unit>().is_err());
        assert!("(EJ)/EJ".parse::<Unit>().is_err());
    }
}
