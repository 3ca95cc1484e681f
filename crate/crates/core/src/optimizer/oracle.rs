//! Exhaustive simplex-lattice search, an independent check on the LP.

use super::{RateBounds, RateConstraintSet};
use crate::error::{Error, Result};

/// Best weighted objective at a fixed schedule: the rates are capped by the
/// per-target minima, and the sum cap is spent on the heavier weight first.
pub fn grid_point_value(b: RateBounds, lambda: f64) -> f64 {
    let ua = b.ra.max(0.0);
    let ub = b.rb.max(0.0);
    let us = b.sum.max(0.0);
    let (ra, rb) = if lambda >= 0.5 {
        let ra = ua.min(us);
        (ra, ub.min(us - ra))
    } else {
        let rb = ub.min(us);
        (ua.min(us - rb), rb)
    };
    lambda * ra + (1.0 - lambda) * rb
}

/// Evaluates every Δ with coordinates in multiples of `step` and returns the
/// largest weighted objective found.
pub fn grid_oracle(cs: &RateConstraintSet, lambda: f64, step: f64) -> Result<f64> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::InvalidArgument(format!("grid step {step} outside (0, 0.1]")));
    }
    let n = (1.0 / step).round() as usize;
    if ((n as f64) * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("grid step {step} does not divide 1")));
    }
    cs.validate()?;
    cs.check_bounded()?;
    let t = cs.t;
    let mut counts = vec![0usize; t];
    let mut delta = vec![0.0; t];
    let mut best = f64::NEG_INFINITY;
    walk(0, n, &mut counts, &mut |c| {
        for (d, k) in delta.iter_mut().zip(c) {
            *d = *k as f64 / n as f64;
        }
        best = best.max(grid_point_value(cs.bounds_at(&delta), lambda));
    });
    Ok(best)
}

// Enumerates compositions of `left` into the remaining coordinates.
fn walk(pos: usize, left: usize, counts: &mut [usize], f: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        f(counts);
        return;
    }
    for k in 0..=left {
        counts[pos] = k;
        walk(pos + 1, left - k, counts, f);
    }
}

#[cfg(test)]
mod tests {
    use super::super::Target;
    use super::*;

    #[test]
    fn examples() {
        let mut cs = RateConstraintSet::new(2);
        cs.push(Target::Ra, vec![2.0, 0.0]);
        cs.push(Target::Rb, vec![0.0, 0.0]);
        assert!((grid_oracle(&cs, 1.0, 0.01).unwrap() - 2.0).abs() < 1e-12);

        let mut cs = RateConstraintSet::new(2);
        cs.push(Target::Ra, vec![1.0, 0.0]);
        cs.push(Target::Ra, vec![0.0, 1.0]);
        cs.push(Target::Rb, vec![0.0, 0.0]);
        assert!((grid_oracle(&cs, 1.0, 0.01).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lattice_size() {
        let mut seen = 0;
        walk(0, 10, &mut [0; 3], &mut |_| seen += 1);
        assert_eq!(seen, 66);
    }

    #[test]
    fn step_checks() {
        let mut cs = RateConstraintSet::new(2);
        cs.push(Target::Sum, vec![1.0, 1.0]);
        assert!(grid_oracle(&cs, 0.5, 0.2).is_err());
        assert!(grid_oracle(&cs, 0.5, 0.03).is_err());
        assert!(grid_oracle(&cs, 0.5, 0.05).is_ok());
    }
}
