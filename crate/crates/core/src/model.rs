//! The energy/production equation system.
//!
//! Aggregate production efficiency Λ (J per $) is the production-weighted
//! mean of firm efficiencies λᵢ, each of which may be modelled with an
//! energy-based Cobb-Douglas form. Production, available energy and Λ are
//! tied by `Y = E_A / Λ`. The energy chain runs from Gibbs free-energy yield
//! through conversion efficiency α(t) to available energy, and through
//! useful-work efficiency ε(t) to net exergy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{AnnualSeries, Year, YearRange};

/// Relative slack allowed when the firm production total exceeds GWP.
pub const COVERAGE_TOLERANCE: f64 = 1e-6;

/// Default capital earnings share in the Cobb-Douglas form.
pub const DEFAULT_CAPITAL_SHARE: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirmProduction {
    /// Conversion efficiency, J per $.
    pub lambda: f64,
    /// Production, $.
    pub production: f64,
}

/// Inputs to one firm's efficiency λᵢ.
///
/// `capital_share` is the Cobb-Douglas exponent on capital; the labour
/// exponent is `1 - capital_share`. It is unrelated to the time-varying
/// conversion efficiency carried by [`EnergyChainYear::conversion_efficiency`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EbcdInputs {
    /// Energy consumption of capital, J.
    pub capital_energy: f64,
    /// Capital, $.
    pub capital: f64,
    /// Available energy of labour, J.
    pub labour_energy: f64,
    /// Labour, $.
    pub labour: f64,
    pub capital_share: f64,
}

impl EbcdInputs {
    pub fn new(capital_energy: f64, capital: f64, labour_energy: f64, labour: f64) -> Self {
        EbcdInputs {
            capital_energy,
            capital,
            labour_energy,
            labour,
            capital_share: DEFAULT_CAPITAL_SHARE,
        }
    }

    pub fn with_capital_share(mut self, share: f64) -> Self {
        self.capital_share = share;
        self
    }

    pub fn labour_share(&self) -> f64 {
        1.0 - self.capital_share
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyChainYear {
    pub year: Year,
    /// Gibbs free-energy yield, J.
    pub gibbs: f64,
    /// α(t), fraction of the Gibbs yield made available.
    pub conversion_efficiency: f64,
    /// Available energy, J.
    pub available: f64,
    /// ε(t), fraction of available energy turned into useful work.
    pub useful_work_efficiency: f64,
    /// Net exergy, J.
    pub exergy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSpec {
    /// Initial value, $.
    pub initial: f64,
    /// Interest (growth) rate per year.
    pub rate: f64,
}

impl GrowthSpec {
    pub fn new(initial: f64, rate: f64) -> Self {
        GrowthSpec { initial, rate }
    }

    /// Per-year growth factor `g = 1 + i`.
    pub fn factor(&self) -> f64 {
        1.0 + self.rate
    }
}

fn positive(what: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive {
            what: what.into(),
            value,
        })
    }
}

fn unit_interval(what: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfBounds {
            what: what.into(),
            value,
            min: 0.0,
            max: 1.0,
        })
    }
}

/// Λ = Σ λᵢ·Pᵢ / GWP.
///
/// Firms need not cover all of GWP; a partial list yields a partial
/// aggregate. Σ Pᵢ may exceed GWP by at most [`COVERAGE_TOLERANCE`].
pub fn lambda_aggregate(firms: &[FirmProduction], gwp: f64) -> Result<f64> {
    positive("GWP", gwp)?;
    if firms.is_empty() {
        return Err(Error::InvalidInput("firm list is empty".into()));
    }
    let mut covered = 0.0;
    let mut weighted = 0.0;
    for firm in firms {
        positive("firm efficiency", firm.lambda)?;
        if firm.production < 0.0 {
            return Err(Error::Negative {
                what: "firm production".into(),
                value: firm.production,
            });
        }
        covered += firm.production;
        weighted += firm.lambda * firm.production;
    }
    if covered > gwp * (1.0 + COVERAGE_TOLERANCE) {
        return Err(Error::InvalidInput(format!(
            "firm production {covered} exceeds GWP {gwp}"
        )));
    }
    Ok(weighted / gwp)
}

/// λᵢ = (E_K/K)^α · (E_L/L)^(1-α), in J per $.
pub fn ebcd_lambda(inputs: &EbcdInputs) -> Result<f64> {
    positive("capital energy", inputs.capital_energy)?;
    positive("capital", inputs.capital)?;
    positive("labour energy", inputs.labour_energy)?;
    positive("labour", inputs.labour)?;
    unit_interval("capital share", inputs.capital_share)?;
    let capital_intensity = inputs.capital_energy / inputs.capital;
    let labour_intensity = inputs.labour_energy / inputs.labour;
    Ok(capital_intensity.powf(inputs.capital_share) * labour_intensity.powf(inputs.labour_share()))
}

/// Y = E_A / Λ.
pub fn production_from_energy(available_energy: f64, lambda: f64) -> Result<f64> {
    positive("aggregate efficiency", lambda)?;
    Ok(available_energy / lambda)
}

/// Λ = E_A / Y. Its reciprocal is production per joule.
pub fn lambda_from_observables(available_energy: f64, production: f64) -> Result<f64> {
    positive("production", production)?;
    Ok(available_energy / production)
}

/// Builds the per-year energy chain. `useful_work` defaults to 1 for every
/// year when absent.
pub fn energy_chain(
    gibbs: &AnnualSeries,
    conversion: &AnnualSeries,
    useful_work: Option<&AnnualSeries>,
) -> Result<Vec<EnergyChainYear>> {
    let same_grid = |other: &AnnualSeries| gibbs.years().eq(other.years());
    if !same_grid(conversion) || useful_work.is_some_and(|eps| !same_grid(eps)) {
        return Err(Error::InvalidInput(format!(
            "energy chain inputs for '{}' do not share a year grid",
            gibbs.label()
        )));
    }
    gibbs
        .points()
        .iter()
        .zip(conversion.values())
        .enumerate()
        .map(|(i, (&(year, e_g), alpha))| {
            let eps = useful_work.map_or(1.0, |s| s.points()[i].1);
            unit_interval(&format!("conversion efficiency at {year}"), alpha)?;
            unit_interval(&format!("useful-work efficiency at {year}"), eps)?;
            let available = alpha * e_g;
            Ok(EnergyChainYear {
                year,
                gibbs: e_g,
                conversion_efficiency: alpha,
                available,
                useful_work_efficiency: eps,
                exergy: eps * available,
            })
        })
        .collect()
}

/// Y(t) = Y₀ · g^(t - start) over `range`.
pub fn growth_series(spec: &GrowthSpec, range: YearRange, label: &str, unit: crate::Unit) -> Result<AnnualSeries> {
    let g = spec.factor();
    positive("growth factor", g)?;
    AnnualSeries::from_values(
        label,
        unit,
        range.start(),
        range.years().map(|t| spec.initial * g.powf((t - range.start()) as f64)),
    )
}

/// w = W / E, cumulative production per unit of current-year energy.
pub fn w_ratio(cumulative_production: f64, energy: f64) -> Result<f64> {
    if energy == 0.0 {
        return Err(Error::InvalidInput("energy is zero; W/E undefined".into()));
    }
    Ok(cumulative_production / energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Unit;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn firm(lambda: f64, production: f64) -> FirmProduction {
        FirmProduction { lambda, production }
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(lambda_aggregate(&[firm(7.0, 10.0)], 10.0).unwrap(), 7.0);
        assert_eq!(lambda_aggregate(&[firm(1.0, 5.0), firm(3.0, 5.0)], 10.0).unwrap(), 2.0);
        let weighted = (2.0 * 10.0 + 4.0 * 20.0 + 6.0 * 30.0) / 60.0;
        let got = lambda_aggregate(&[firm(2.0, 10.0), firm(4.0, 20.0), firm(6.0, 30.0)], 60.0).unwrap();
        assert_relative_eq!(got, weighted, max_relative = 1e-15);
        assert_relative_eq!(got, 14.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn aggregate_partial_coverage_and_errors() {
        // half the economy covered gives half the weight
        assert_eq!(lambda_aggregate(&[firm(4.0, 5.0)], 10.0).unwrap(), 2.0);
        assert!(lambda_aggregate(&[firm(4.0, 11.0)], 10.0).is_err());
        assert!(lambda_aggregate(&[firm(4.0, 10.0 * (1.0 + 1e-7))], 10.0).is_ok());
        assert!(lambda_aggregate(&[], 10.0).is_err());
        assert!(lambda_aggregate(&[firm(1.0, 1.0)], 0.0).is_err());
        assert!(lambda_aggregate(&[firm(1.0, -1.0)], 1.0).is_err());
        assert!(lambda_aggregate(&[firm(0.0, 1.0)], 1.0).is_err());
    }

    #[test]
    fn ebcd_examples() {
        for share in [0.0, 0.3, 2.0 / 3.0, 1.0] {
            let got = ebcd_lambda(&EbcdInputs::new(10.0, 2.0, 25.0, 5.0).with_capital_share(share)).unwrap();
            assert_relative_eq!(got, 5.0, max_relative = 1e-14);
        }
        let got = ebcd_lambda(&EbcdInputs::new(8.0, 1.0, 1.0, 1.0)).unwrap();
        assert_relative_eq!(got, 4.0, max_relative = 1e-14);
        let got = ebcd_lambda(&EbcdInputs::new(2.0, 1.0, 16.0, 1.0).with_capital_share(0.75)).unwrap();
        assert_relative_eq!(got, 2f64.powf(1.75), max_relative = 1e-14);
        assert_relative_eq!(got, 3.3636, max_relative = 1e-4);
    }

    #[test]
    fn ebcd_rejects_bad_inputs() {
        assert!(ebcd_lambda(&EbcdInputs::new(1.0, 0.0, 1.0, 1.0)).is_err());
        assert!(ebcd_lambda(&EbcdInputs::new(1.0, 1.0, 1.0, -1.0)).is_err());
        assert!(ebcd_lambda(&EbcdInputs::new(1.0, 1.0, 1.0, 1.0).with_capital_share(1.2)).is_err());
        assert!(ebcd_lambda(&EbcdInputs::new(1.0, 1.0, 1.0, 1.0).with_capital_share(-0.1)).is_err());
        assert_relative_eq!(EbcdInputs::new(1.0, 1.0, 1.0, 1.0).capital_share, 2.0 / 3.0);
    }

    #[test]
    fn production_and_lambda() {
        assert_eq!(production_from_energy(100.0, 2.0).unwrap(), 50.0);
        assert_eq!(production_from_energy(0.0, 3.0).unwrap(), 0.0);
        assert!(production_from_energy(1.0, 0.0).is_err());
        assert_eq!(lambda_from_observables(100.0, 50.0).unwrap(), 2.0);
        assert_eq!(lambda_from_observables(std::f64::consts::E, std::f64::consts::E).unwrap(), 1.0);
        assert!(lambda_from_observables(1.0, 0.0).is_err());
    }

    #[test]
    fn chain_examples() {
        let g = AnnualSeries::from_values("eg", Unit::Joule, 0, [100.0, 40.0]).unwrap();
        let one = AnnualSeries::from_values("a", Unit::Dimensionless, 0, [1.0, 1.0]).unwrap();
        let half = AnnualSeries::from_values("a", Unit::Dimensionless, 0, [0.5, 0.5]).unwrap();
        let zero = AnnualSeries::from_values("a", Unit::Dimensionless, 0, [0.0, 0.0]).unwrap();

        for rec in energy_chain(&g, &one, Some(&one)).unwrap() {
            assert_eq!(rec.exergy, rec.gibbs);
            assert_eq!(rec.available, rec.gibbs);
        }
        let recs = energy_chain(&g, &half, Some(&half)).unwrap();
        assert_eq!((recs[0].available, recs[0].exergy), (50.0, 25.0));
        for rec in energy_chain(&g, &zero, None).unwrap() {
            assert_eq!((rec.available, rec.exergy), (0.0, 0.0));
        }
        // absent ε means lossless last stage
        let recs = energy_chain(&g, &half, None).unwrap();
        assert_eq!(recs[1].exergy, recs[1].available);

        let bad = AnnualSeries::from_values("a", Unit::Dimensionless, 0, [0.5, 1.5]).unwrap();
        assert!(energy_chain(&g, &bad, None).is_err());
        let shifted = AnnualSeries::from_values("a", Unit::Dimensionless, 1, [0.5, 0.5]).unwrap();
        assert!(energy_chain(&g, &shifted, None).is_err());
    }

    #[test]
    fn growth_examples() {
        let r = YearRange::new(0, 2).unwrap();
        let unit = Unit::TrillionUsd { base_year: 2019 };
        let flat = growth_series(&GrowthSpec::new(100.0, 0.0), r, "y", unit.clone()).unwrap();
        assert!(flat.values().all(|v| v == 100.0));
        let compound = growth_series(&GrowthSpec::new(100.0, 0.05), r, "y", unit.clone()).unwrap();
        assert_relative_eq!(compound.at(2).unwrap(), 110.25, max_relative = 1e-14);
        let decay = growth_series(&GrowthSpec::new(1.0, -0.5), r, "y", unit.clone()).unwrap();
        assert_eq!(decay.at(2).unwrap(), 0.25);
        assert!(growth_series(&GrowthSpec::new(1.0, -1.0), r, "y", unit).is_err());
    }

    #[test]
    fn w_ratio_examples() {
        assert_eq!(w_ratio(6.0, 2.0).unwrap(), 3.0);
        assert_eq!(w_ratio(0.0, 2.5).unwrap(), 0.0);
        assert!(w_ratio(1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn ebcd_homogeneity(
            ek in 1e-3f64..1e3, k in 1e-3f64..1e3, el in 1e-3f64..1e3, l in 1e-3f64..1e3,
            share in 0.0f64..=1.0, c in 1e-2f64..1e2,
        ) {
            let base = ebcd_lambda(&EbcdInputs::new(ek, k, el, l).with_capital_share(share)).unwrap();
            let energy_scaled = ebcd_lambda(&EbcdInputs::new(c * ek, k, c * el, l).with_capital_share(share)).unwrap();
            let money_scaled = ebcd_lambda(&EbcdInputs::new(ek, c * k, el, c * l).with_capital_share(share)).unwrap();
            prop_assert!((energy_scaled / (c * base) - 1.0).abs() < 1e-12);
            prop_assert!((money_scaled * c / base - 1.0).abs() < 1e-12);
        }

        #[test]
        fn identical_firms_fix_the_aggregate(lambda in 1e-3f64..1e3, weights in prop::collection::vec(0.0f64..100.0, 1..20)) {
            let total: f64 = weights.iter().sum();
            prop_assume!(total > 0.0);
            let firms: Vec<_> = weights.iter().map(|&p| firm(lambda, p)).collect();
            let got = lambda_aggregate(&firms, total).unwrap();
            prop_assert!((got / lambda - 1.0).abs() < 1e-12);
        }

        #[test]
        fn production_round_trip(e in 1e-6f64..1e12, y in 1e-6f64..1e12) {
            let lambda = lambda_from_observables(e, y).unwrap();
            let back = production_from_energy(e, lambda).unwrap();
            prop_assert!((back / y - 1.0).abs() < 1e-12);
        }

        #[test]
        fn chain_is_ordered(values in prop::collection::vec((0.0f64..1e3, 0.0f64..=1.0, 0.0f64..=1.0), 1..20)) {
            let n = values.len();
            let g = AnnualSeries::from_values("g", Unit::Joule, 0, values.iter().map(|v| v.0)).unwrap();
            let a = AnnualSeries::from_values("a", Unit::Dimensionless, 0, values.iter().map(|v| v.1)).unwrap();
            let e = AnnualSeries::from_values("e", Unit::Dimensionless, 0, values.iter().map(|v| v.2)).unwrap();
            let recs = energy_chain(&g, &a, Some(&e)).unwrap();
            prop_assert_eq!(recs.len(), n);
            for r in recs {
                prop_assert!(r.exergy <= r.available && r.available <= r.gibbs);
                prop_assert_eq!(r.available, r.conversion_efficiency * r.gibbs);
                prop_assert_eq!(r.exergy, r.useful_work_efficiency * r.available);
            }
        }

        #[test]
        fn growth_monotonicity(y0 in 1e-3f64..1e3, rate in -0.9f64..0.9, len in 2i64..200) {
            let r = YearRange::new(0, len).unwrap();
            let s = growth_series(&GrowthSpec::new(y0, rate), r, "y", Unit::Dimensionless).unwrap();
            let v: Vec<f64> = s.values().collect();
            if rate > 0.0 {
                prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
            } else if rate < 0.0 {
                prop_assert!(v.windows(2).all(|w| w[1] < w[0]));
            }
        }
    }
}
