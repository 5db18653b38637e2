//! Value-list syntax shared by the sweep flags.
//!
//! `a,b,c` lists values, `start:step:stop` is an inclusive arithmetic range,
//! `start:stop` uses step 1, and items can be mixed: `1,4:6`.

const MAX_POINTS: usize = 100_000;

/// A parsed list of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Reals(pub Vec<f64>);

/// A parsed list of positive integers.
#[derive(Debug, Clone, PartialEq)]
pub struct Counts(pub Vec<u32>);

/// Rounds away the drift of repeated float steps (`0.1 * 3`).
fn tidy(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn range(start: f64, step: f64, stop: f64) -> Result<Vec<f64>, String> {
    if step == 0.0 || (stop - start) * step < 0.0 {
        return Err(format!("step {step} never reaches {stop} from {start}"));
    }
    let span = (stop - start) / step;
    if span > MAX_POINTS as f64 {
        return Err(format!("range {start}:{step}:{stop} has more than {MAX_POINTS} points"));
    }
    let n = (span + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| tidy(start + i as f64 * step)).collect())
}

/// Parses a list of real values.
pub fn reals(s: &str) -> Result<Reals, String> {
    parse_reals(s).map(Reals)
}

pub fn counts(s: &str) -> Result<Counts, String> {
    parse_counts(s).map(Counts)
}

pub fn log_reals(s: &str) -> Result<Reals, String> {
    parse_log_range(s).map(Reals)
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(number(v)?),
            [a, b] => out.extend(range(number(a)?, 1.0, number(b)?)?),
            [a, st, b] => out.extend(range(number(a)?, number(st)?, number(b)?)?),
            _ => return Err(format!("`{item}` is not a value or start:step:stop range")),
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

/// Parses a list of positive integers (antenna counts).
pub fn parse_counts(s: &str) -> Result<Vec<u32>, String> {
    parse_reals(s)?
        .into_iter()
        .map(|v| {
            if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u32)
            } else {
                Err(format!("{v} is not a positive integer"))
            }
        })
        .collect()
}

/// Parses `start:stop[:per_decade]` into log-spaced values from `start` to
/// `stop` inclusive, 5 per decade by default.
pub fn parse_log_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let (start, stop, per_decade) = match parts.as_slice() {
        [a, b] => (number(a)?, number(b)?, 5.0),
        [a, b, p] => (number(a)?, number(b)?, number(p)?),
        _ => return Err(format!("`{s}` is not start:stop[:per_decade]")),
    };
    if !(start > 0.0 && stop >= start) {
        return Err(format!("log range needs 0 < start <= stop, got {start}:{stop}"));
    }
    if !(per_decade >= 1.0 && per_decade.fract() == 0.0) {
        return Err(format!(
            "points per decade must be a positive integer, got {per_decade}"
        ));
    }
    let (lo, hi) = (start.log10(), stop.log10());
    let span = (hi - lo) * per_decade;
    if span > MAX_POINTS as f64 {
        return Err(format!("log range {s} has more than {MAX_POINTS} points"));
    }
    let n = (span + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| tidy(10f64.powf(lo + i as f64 / per_decade))).collect())
}
