//! Thermodynamic model of economic production, reconstruction of long-run
//! world GWP and energy series, and the tests that check the model against
//! them.

pub mod analysis;
pub mod error;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod reconstruction;
pub mod series;
pub mod units;

pub use error::{Error, Result};
pub use series::{AnnualSeries, Year, YearRange};
pub use units::Unit;
