//! Parsers for `lo..hi` range flags.

use psdeq_core::inequalities::{DimRange, Interval};

fn split_range(s: &str) -> Option<(&str, &str)> {
    s.split_once("..=").or_else(|| s.split_once(".."))
}

/// `x` or `lo..hi` (both ends inclusive).
pub fn parse_interval(s: &str) -> Result<Interval, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("'{t}' is not a finite number"))
    };
    match split_range(s) {
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(format!("empty range {lo}..{hi}"));
            }
            Ok(Interval::new(lo, hi))
        }
        None => Ok(Interval::point(num(s)?)),
    }
}

/// `d` or `lo..hi` (both ends inclusive), dimensions ≥ 1.
pub fn parse_dims(s: &str) -> Result<DimRange, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("'{t}' is not a dimension"))
    };
    let (lo, hi) = match split_range(s) {
        Some((lo, hi)) => (num(lo)?, num(hi)?),
        None => {
            let d = num(s)?;
            (d, d)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("bad dimension range {lo}..{hi}"));
    }
    Ok(DimRange::new(lo, hi))
}
