//! Compensated summation, including a sign-tracked variant for terms that
//! are only representable through their logarithm.

use std::iter::FromIterator;

/// Kahan-Babuska-Neumaier accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        s.extend(iter);
        s
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Result of a sign-tracked series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    /// `ln |sum|`; `-inf` when the sum is exactly zero.
    pub ln_abs: f64,
    /// -1, 0 or +1.
    pub sign: f64,
    /// `sum |t_i| / |sum t_i|`, the condition number of the summation.
    pub cancellation: f64,
}

impl SeriesValue {
    pub fn value(&self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }
}

/// Accumulates terms `sign * exp(ln_mag)` and sums them with compensation
/// after rescaling by the largest magnitude, so that neither overflow nor
/// underflow of individual terms loses the result.
#[derive(Debug, Default, Clone)]
pub struct SignedLogSum {
    terms: Vec<(f64, f64)>,
}

impl SignedLogSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sign: f64, ln_mag: f64) {
        if sign != 0.0 && ln_mag > f64::NEG_INFINITY {
            self.terms.push((sign.signum(), ln_mag));
        }
    }

    pub fn push_value(&mut self, x: f64) {
        if x != 0.0 {
            self.push(x.signum(), x.abs().ln());
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn finish(&self) -> SeriesValue {
        let lmax = self.terms.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
        if lmax == f64::NEG_INFINITY {
            return SeriesValue {
                ln_abs: f64::NEG_INFINITY,
                sign: 0.0,
                cancellation: 1.0,
            };
        }
        if lmax == f64::INFINITY || lmax.is_nan() {
            return SeriesValue {
                ln_abs: lmax,
                sign: 1.0,
                cancellation: f64::INFINITY,
            };
        }
        let mut signed = NeumaierSum::new();
        let mut absolute = NeumaierSum::new();
        for &(s, l) in &self.terms {
            let m = (l - lmax).exp();
            signed.add(s * m);
            absolute.add(m);
        }
        let total = signed.value();
        if total == 0.0 {
            return SeriesValue {
                ln_abs: f64::NEG_INFINITY,
                sign: 0.0,
                cancellation: f64::INFINITY,
            };
        }
        SeriesValue {
            ln_abs: lmax + total.abs().ln(),
            sign: total.signum(),
            cancellation: absolute.value() / total.abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_keeps_small_addends() {
        let s: NeumaierSum = [1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn signed_log_sum_handles_huge_magnitudes() {
        let mut s = SignedLogSum::new();
        s.push(1.0, 1000.0);
        s.push(-1.0, 1000.0 + (0.5f64).ln());
        let v = s.finish();
        assert!((v.ln_abs - (1000.0 + 0.5f64.ln())).abs() < 1e-12);
        assert_eq!(v.sign, 1.0);
        assert!((v.cancellation - 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_cancellation_reports_zero() {
        let mut s = SignedLogSum::new();
        s.push_value(2.5);
        s.push_value(-2.5);
        let v = s.finish();
        assert_eq!(v.sign, 0.0);
        assert_eq!(v.value(), 0.0);
        assert!(v.cancellation.is_infinite());
    }
}
