//! Closed-form evaluation with a quadrature fallback.
//!
//! The order-statistic expansions alternate in sign. When the terms nearly
//! cancel, the closed form loses the digits the caller needs, and the same
//! expectation is recomputed by quadrature of the direct density.

use serde::Serialize;

use crate::error::Result;
use crate::orderstats::CANCELLATION_WARN_RATIO;
use crate::sum::SeriesValue;

/// Estimated relative error above which the closed form is abandoned.
pub const FALLBACK_REL_ERROR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// A positive quantity carried by its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub ln_value: f64,
    /// `Σ|terms| / |Σ terms|` of the closed form (1 when there was nothing to cancel).
    pub cancellation: f64,
    pub method: Method,
}

impl Evaluation {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// Accepts `closed` unless its cancellation times `term_rel_error` exceeds
/// [`FALLBACK_REL_ERROR`] (or it is not positive), in which case `quadrature`
/// supplies the log of the value.
pub(crate) fn resolve<Q>(
    what: &str,
    closed: Result<SeriesValue>,
    term_rel_error: f64,
    quadrature: Q,
) -> Result<Evaluation>
where
    Q: FnOnce() -> Result<f64>,
{
    let (cancellation, reason) = match &closed {
        Ok(v) if v.sign > 0.0 && v.cancellation * term_rel_error <= FALLBACK_REL_ERROR => {
            if v.cancellation > CANCELLATION_WARN_RATIO {
                log::warn!("{what}: closed-form cancellation {:.1e}", v.cancellation);
            }
            return Ok(Evaluation {
                ln_value: v.ln_abs,
                cancellation: v.cancellation,
                method: Method::ClosedForm,
            });
        }
        Ok(v) => (v.cancellation, format!("cancellation {:.1e}", v.cancellation)),
        Err(e) => (f64::INFINITY, e.to_string()),
    };
    log::info!("{what}: closed form unreliable ({reason}); using quadrature");
    Ok(Evaluation {
        ln_value: quadrature()?,
        cancellation,
        method: Method::Quadrature,
    })
}
