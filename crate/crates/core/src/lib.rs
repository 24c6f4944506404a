//! Exact rotating-frame (Jaynes-Cummings) and counter-rotating-frame
//! (anti-Jaynes-Cummings) dynamics of the quantum Rabi model, with an
//! independent dense-matrix propagator to check every closed form.

pub mod analytic;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod figures;
pub mod hilbert;
pub mod model;
pub mod oracle;
pub mod output;
pub mod verify;

pub use error::{QrmError, Result};
