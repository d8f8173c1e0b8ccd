//! Loads the vendored source tables from a data directory and builds the
//! labelled datasets on demand, caching every intermediate result.

use std::cell::OnceCell;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{self, CalendarConvention, CsvTableSpec, SupplementColumns, SupplementLayout, SupplementWarning};
use crate::reconstruction::{self as rec, CumulativeSeries, EnergyMethod, MorrisExtension, MorrisTable, ReconstructionConfig};
use crate::series::{AnnualSeries, Year, YearRange};
use crate::units::Unit;

pub const ENERGY_MIX_FILE: &str = "owid_energy_mix_twh.csv";
pub const GDP_FILE: &str = "owid_gdp.csv";
pub const FRED_GWP_FILE: &str = "fred_gwp.csv";
pub const CPI_FILE: &str = "fred_cpi.csv";
pub const POPULATION_FILE: &str = "population_sources.csv";
pub const MORRIS_FILE: &str = "morris_energy_capture.csv";
pub const SUPPLEMENT_FILE: &str = "lw_supplement.csv";

pub const GDP_COLUMN: &str = "world_gdp";
pub const GDP_BASE_YEAR: i32 = 2011;
pub const FRED_GWP_COLUMN: &str = "world_gdp_current_usd";
pub const CPI_COLUMN: &str = "cpi_inflation";

/// First year of the back-projected cumulative production curve.
pub const BACK_PROJECTION_START: Year = -14000;

/// Supplement-derived series addressable by name alongside the dataset labels.
pub const SUPPLEMENT_LABELS: [&str; 4] = ["Y_LW", "E_LW", "W_LW", "W_over_E"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineOptions {
    pub reconstruction: ReconstructionConfig,
    pub method: EnergyMethod,
    pub supplement_layout: SupplementLayout,
    pub calendar: CalendarConvention,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            reconstruction: ReconstructionConfig::default(),
            method: EnergyMethod::B,
            supplement_layout: SupplementLayout::default(),
            calendar: CalendarConvention::Astronomical,
        }
    }
}

pub struct Pipeline {
    dir: PathBuf,
    options: PipelineOptions,
    energy_sources: OnceCell<Vec<AnnualSeries>>,
    gdp: OnceCell<AnnualSeries>,
    fred: OnceCell<AnnualSeries>,
    cpi: OnceCell<AnnualSeries>,
    population_sources: OnceCell<Vec<AnnualSeries>>,
    morris: OnceCell<MorrisTable>,
    supplement: OnceCell<(SupplementColumns, Vec<SupplementWarning>)>,
    population: OnceCell<AnnualSeries>,
    y_rep: OnceCell<AnnualSeries>,
    e_rep: OnceCell<AnnualSeries>,
    extension: OnceCell<MorrisExtension>,
    y_rep_morris: OnceCell<AnnualSeries>,
    e_rep_morris: OnceCell<AnnualSeries>,
    w_sum_lw: OnceCell<CumulativeSeries>,
    w_sum_rep_morris: OnceCell<CumulativeSeries>,
}

fn cached<T>(cell: &OnceCell<T>, init: impl FnOnce() -> Result<T>) -> Result<&T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let value = init()?;
    Ok(cell.get_or_init(|| value))
}

impl Pipeline {
    pub fn new(dir: impl Into<PathBuf>, options: PipelineOptions) -> Result<Self> {
        options.reconstruction.validate()?;
        Ok(Pipeline {
            dir: dir.into(),
            options,
            energy_sources: OnceCell::new(),
            gdp: OnceCell::new(),
            fred: OnceCell::new(),
            cpi: OnceCell::new(),
            population_sources: OnceCell::new(),
            morris: OnceCell::new(),
            supplement: OnceCell::new(),
            population: OnceCell::new(),
            y_rep: OnceCell::new(),
            e_rep: OnceCell::new(),
            extension: OnceCell::new(),
            y_rep_morris: OnceCell::new(),
            e_rep_morris: OnceCell::new(),
            w_sum_lw: OnceCell::new(),
            w_sum_rep_morris: OnceCell::new(),
        })
    }

    pub fn data_dir(&self) -> &Path {
        &self.dir
    }

    pub fn options(&self) -> &PipelineOptions {
        &self.options
    }

    fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    fn single(&self, file: &str, column: &str, unit: Unit) -> Result<AnnualSeries> {
        let spec = CsvTableSpec::uniform(self.path(file), &[column], unit).with_calendar(self.options.calendar);
        Ok(ingest::read_series(&spec)?.remove(0))
    }

    /// Every non-year column of `file`, all with the same unit.
    fn all_columns(&self, file: &str, unit: Unit) -> Result<Vec<AnnualSeries>> {
        let path = self.path(file);
        let header = ingest::read_header(&path, b',')?;
        let columns: Vec<&str> = header.iter().map(String::as_str).filter(|c| *c != "year").collect();
        let spec = CsvTableSpec::uniform(&path, &columns, unit).with_calendar(self.options.calendar);
        let series = ingest::read_series(&spec)?;
        Ok(series.into_iter().filter(|s| !s.is_empty()).collect())
    }

    pub fn energy_sources(&self) -> Result<&[AnnualSeries]> {
        cached(&self.energy_sources, || self.all_columns(ENERGY_MIX_FILE, Unit::TerawattHour)).map(Vec::as_slice)
    }

    pub fn owid_gdp(&self) -> Result<&AnnualSeries> {
        cached(&self.gdp, || {
            self.single(GDP_FILE, GDP_COLUMN, Unit::TrillionUsd { base_year: GDP_BASE_YEAR })
        })
    }

    pub fn fred_gwp(&self) -> Result<&AnnualSeries> {
        cached(&self.fred, || self.single(FRED_GWP_FILE, FRED_GWP_COLUMN, Unit::TrillionUsdCurrent))
    }

    pub fn cpi(&self) -> Result<&AnnualSeries> {
        cached(&self.cpi, || self.single(CPI_FILE, CPI_COLUMN, Unit::Percent))
    }

    pub fn population_sources(&self) -> Result<&[AnnualSeries]> {
        cached(&self.population_sources, || self.all_columns(POPULATION_FILE, Unit::Person)).map(Vec::as_slice)
    }

    pub fn morris_table(&self) -> Result<&MorrisTable> {
        cached(&self.morris, || {
            let path = self.path(MORRIS_FILE);
            let columns = rec::Civilization::ALL.map(|c| c.column());
            let spec = CsvTableSpec::uniform(&path, &columns, Unit::KcalPerCapitaDay).with_calendar(self.options.calendar);
            let rows: [AnnualSeries; 4] = ingest::read_series(&spec)?
                .try_into()
                .map_err(|_| Error::InvalidInput("expected four energy capture columns".into()))?;
            MorrisTable::new(rows, MorrisTable::default_shares())
        })
    }

    pub fn supplement(&self) -> Result<&(SupplementColumns, Vec<SupplementWarning>)> {
        cached(&self.supplement, || {
            ingest::read_supplement(&self.path(SUPPLEMENT_FILE), &self.options.supplement_layout)
        })
    }

    pub fn population(&self) -> Result<&AnnualSeries> {
        cached(&self.population, || rec::build_population(self.population_sources()?))
    }

    pub fn y_rep(&self) -> Result<&AnnualSeries> {
        cached(&self.y_rep, || rec::build_y_rep(self.owid_gdp()?, self.fred_gwp()?))
    }

    pub fn e_rep(&self) -> Result<&AnnualSeries> {
        cached(&self.e_rep, || {
            rec::build_e_rep(
                self.energy_sources()?,
                self.population()?,
                &self.options.reconstruction,
                self.options.method,
            )
        })
    }

    pub fn morris_extension(&self) -> Result<&MorrisExtension> {
        cached(&self.extension, || {
            rec::build_morris_extension(self.morris_table()?, self.population()?, &self.options.reconstruction)
        })
    }

    fn after_year1(series: &AnnualSeries) -> Result<AnnualSeries> {
        Ok(series.restrict(YearRange::new(2, Year::MAX)?))
    }

    /// Morris-derived energy up to year 1, then E_Rep.
    pub fn e_rep_morris(&self) -> Result<&AnnualSeries> {
        cached(&self.e_rep_morris, || {
            let early = &self.morris_extension()?.energy;
            let late = Self::after_year1(self.e_rep()?)?;
            AnnualSeries::concat(rec::LABEL_E_REP_MORRIS, &[early, &late])
        })
    }

    /// Morris-derived production up to year 1, then Y_Rep, tagged with the
    /// unit of Y_Rep.
    pub fn y_rep_morris(&self) -> Result<&AnnualSeries> {
        cached(&self.y_rep_morris, || {
            let y_rep = self.y_rep()?;
            let early = self.morris_extension()?.production.clone().with_unit(y_rep.unit().clone());
            let late = Self::after_year1(y_rep)?;
            AnnualSeries::concat(rec::LABEL_Y_REP_MORRIS, &[&early, &late])
        })
    }

    pub fn w_sum_lw(&self) -> Result<&CumulativeSeries> {
        cached(&self.w_sum_lw, || {
            let y = &self.supplement()?.0.y;
            let start = y.first_year().ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
            let mut w = rec::build_w(y, start, self.options.reconstruction.truncate_w_years)?;
            w.series = w.series.with_label(rec::LABEL_W_SUM_LW);
            Ok(w)
        })
    }

    pub fn w_sum_rep_morris(&self) -> Result<&CumulativeSeries> {
        cached(&self.w_sum_rep_morris, || {
            let y = self.y_rep_morris()?;
            let start = y.first_year().ok_or(Error::InsufficientData { needed: 1, got: 0 })?;
            let mut w = rec::build_w(y, start, 0)?;
            w.series = w.series.with_label(rec::LABEL_W_SUM_REP_MORRIS);
            Ok(w)
        })
    }

    pub fn w_lw_proj(&self) -> Result<AnnualSeries> {
        rec::project_w_lw_backward(
            self.options.reconstruction.w_lw_fit,
            YearRange::new(BACK_PROJECTION_START, 0)?,
        )
    }

    /// Builds one dataset by its label.
    pub fn dataset(&self, label: &str) -> Result<AnnualSeries> {
        match label {
            rec::LABEL_Y_REP => self.y_rep().cloned(),
            rec::LABEL_E_REP => self.e_rep().cloned(),
            rec::LABEL_Y_REP_MORRIS => self.y_rep_morris().cloned(),
            rec::LABEL_E_REP_MORRIS => self.e_rep_morris().cloned(),
            rec::LABEL_W_SUM_LW => Ok(self.w_sum_lw()?.series.clone()),
            rec::LABEL_W_SUM_REP_MORRIS => Ok(self.w_sum_rep_morris()?.series.clone()),
            rec::LABEL_W_LW_PROJ => self.w_lw_proj(),
            rec::LABEL_POP => self.population().cloned(),
            other => Err(unknown_label(other)),
        }
    }

    /// A dataset label or one of [`SUPPLEMENT_LABELS`].
    pub fn series(&self, name: &str) -> Result<AnnualSeries> {
        let supplement = || self.supplement().map(|s| &s.0);
        match name {
            "Y_LW" => Ok(supplement()?.y.clone().with_label(name)),
            "E_LW" => Ok(supplement()?.e.clone().with_label(name)),
            "W_LW" => Ok(supplement()?.w.clone().with_label(name)),
            "W_over_E" => Ok(supplement()?.w_over_e.clone().with_label(name)),
            other => self.dataset(other),
        }
    }
}

fn unknown_label(label: &str) -> Error {
    Error::InvalidInput(format!(
        "unknown series '{label}'; valid names: {}, {}",
        rec::DATASET_LABELS.join(", "),
        SUPPLEMENT_LABELS.join(", ")
    ))
}
