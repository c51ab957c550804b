//! Simulation of pre- and post-selected quantum systems: ABL probabilities,
//! weak values, von Neumann pointer dynamics, the binomial time-translation
//! machine and protective measurements.

pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod ideal;
pub mod states;
pub mod weak;
pub mod pointer;
pub mod time_machine;
pub mod protective;
pub mod scenarios;
