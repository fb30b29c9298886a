use crate::error::{Error, Result};
use crate::raster::ScalarMap;

/// Minimum number of maps in which a pixel must be valid for the aggregate
/// to be valid: `ceil(n / 2)`.
pub fn quorum(n: usize) -> usize {
    n.div_ceil(2)
}

fn median_in_place(vals: &mut [f64]) -> f64 {
    let n = vals.len();
    let mid = n / 2;
    let (lower, upper, _) = vals.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Per-pixel median over a stack of maps.
///
/// Only valid entries contribute. A pixel is valid in the output iff it is
/// valid in at least `ceil(n / 2)` maps; an even number of contributors
/// yields the mean of the two central values.
pub fn median_aggregate(stack: &[ScalarMap]) -> Result<ScalarMap> {
    let first = stack
        .first()
        .ok_or_else(|| Error::Aggregation("empty stack".into()))?;
    for (i, m) in stack.iter().enumerate().skip(1) {
        if m.dims() != first.dims() {
            return Err(Error::Aggregation(format!(
                "map {i} is {}x{}, expected {}x{}",
                m.width(),
                m.height(),
                first.width(),
                first.height()
            )));
        }
        if m.space() != first.space() {
            return Err(Error::Aggregation(format!(
                "map {i} is in {}, expected {}",
                m.space(),
                first.space()
            )));
        }
    }

    let need = quorum(stack.len());
    let len = first.len();
    let mut values = vec![0.0; len];
    let mut valid = vec![false; len];
    let mut scratch = Vec::with_capacity(stack.len());
    for p in 0..len {
        scratch.clear();
        scratch.extend(
            stack
                .iter()
                .filter(|m| m.valid()[p])
                .map(|m| m.values()[p]),
        );
        if scratch.len() >= need && !scratch.is_empty() {
            values[p] = median_in_place(&mut scratch);
            valid[p] = true;
        } else {
            values[p] = f64::NAN;
        }
    }
    ScalarMap::new(first.width(), first.height(), values, valid, first.space())
}
