//! Classical Moiré (shadow-mode) Stark deflectometry.
//!
//! A beam of neutral particles passes three identical gratings; an
//! inhomogeneous electric field near the second grating shifts the shadow
//! pattern by an amount proportional to the susceptibility-to-mass ratio.
//! Scanning the third grating reveals the pattern, and placing it at the
//! right offset enriches one species over another.

pub mod analysis;
pub mod beam;
pub mod cli;
pub mod deflector;
pub mod engine;
pub mod error;
pub mod grating;
pub mod orientation;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod species;
pub mod units;

pub use analysis::{enrichment, fit_fringe, normalize, optimize_voltage, Enrichment, FringeFit, VoltageOptimum};
pub use beam::BeamModel;
pub use deflector::DeflectionField;
pub use engine::{analytic_scan, run_scan, FringeScan, Scenario, ScanSet, SpeciesEntry};
pub use error::{Error, Result};
pub use grating::GratingSpec;
pub use orientation::OrientationMode;
pub use species::{preset, Species, SwcntSpec};
