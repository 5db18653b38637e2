// `!(x > 0.0)` is the NaN-rejecting form used for argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod montecarlo;
pub mod orderstats;
pub mod quad;
pub mod ras;
pub mod specfun;
pub mod sum;
pub mod sweep;
pub mod tas;
pub mod validate;

pub use config::SystemConfig;
pub use error::{Error, Result};
pub use evaluation::{Evaluation, Method};
