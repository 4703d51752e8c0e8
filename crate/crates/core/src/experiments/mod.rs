//! Ensemble experiments behind the headline numerics, plus their
//! configuration and CSV plumbing.

pub mod config;
mod exponent;
mod lil;
pub mod output;
mod range;
mod sandwich;
mod triad;

pub use config::Config;
pub use exponent::{exponent_experiment, nominal_exponent, Estimator, ExponentOptions, ExponentPoint, ExponentReport, VARIANCE_FLAG_LIMIT};
pub use lil::{lil_bands, Band, Extremum, Functional, LilStatistic, ALL_FUNCTIONALS};
pub use output::{fmt_f64, manifest_line, CsvTable};
pub use range::{range_ratio, z2_range_scaling, RangeRatio, RangeScaling};
pub use sandwich::{sandwich_audit, AuditRow, SandwichAudit};
pub use triad::{confinement_rate, exponent_triad, gasket_triad, ConfinementRate, GasketTriad, Triad, TriadOptions};
