//! Exact, globally optimal training of two-layer ReLU networks over the rationals.

pub mod cells;
pub mod concave;
pub mod config;
pub mod convex;
pub mod dichotomy;
pub mod driver;
pub mod error;
pub mod io;
pub mod linalg;
pub mod linf;
pub mod lp;
pub mod model;
pub mod oracles;
pub mod rational;
pub mod reduction;

pub use config::{TrainConfig, EPS_CMP};
pub use error::{Error, Result};
pub use rational::Rational;
