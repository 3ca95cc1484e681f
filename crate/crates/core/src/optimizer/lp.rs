//! Dense primal simplex for the phase-allocation LP.
//!
//! All coefficients are nonnegative, so `ΣΔ = 1` can be relaxed to `ΣΔ <= 1`
//! (raising any Δ only loosens constraints) and the origin is a feasible
//! starting basis. Ties between optimal vertices are broken
//! lexicographically: weighted objective, then `R_a`, then `R_b`, then `ΣΔ`.
//! Each later stage is restricted to the optimal face of the earlier ones by
//! freezing columns with strictly negative reduced cost.
//!
//! Large pools (outer bounds enumerate up to 2^m cuts per rate) are handled by
//! constraint generation: solve on a working subset, add the most violated
//! rows, repeat.

use serde::{Deserialize, Serialize};

use super::{PhaseSchedule, RateConstraintSet, RatePair, Target};
use crate::error::{Error, Result};

const FULL_POOL: usize = 64;
const CUTS_PER_ROUND: usize = 8;
const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub rates: RatePair,
    pub schedule: PhaseSchedule,
    pub objective: f64,
}

/// Maximizes `λ R_a + (1-λ) R_b` over rates and Δ on the simplex.
pub fn max_weighted(cs: &RateConstraintSet, lambda: f64) -> Result<Solution> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} outside [0, 1]")));
    }
    cs.validate()?;
    cs.check_bounded()?;

    let scale = cs
        .constraints
        .iter()
        .flat_map(|c| c.coeff.iter().copied())
        .fold(1.0f64, f64::max);
    let cut_tol = 1e-12 * scale;

    let mut active: Vec<usize> = if cs.len() <= FULL_POOL { (0..cs.len()).collect() } else { seed(cs) };
    loop {
        let x = solve_subset(cs, &active, lambda, scale)?;
        let (rates, delta) = x;
        let mut violated: Vec<(f64, usize)> = cs
            .constraints
            .iter()
            .enumerate()
            .filter(|(k, _)| !active.contains(k))
            .filter_map(|(k, c)| {
                let lhs = match c.target {
                    Target::Ra => rates.ra,
                    Target::Rb => rates.rb,
                    Target::Sum => rates.ra + rates.rb,
                };
                let v = lhs - c.rhs(&delta);
                (v > cut_tol).then_some((v, k))
            })
            .collect();
        if violated.is_empty() {
            let objective = rates.weighted(lambda);
            return Ok(Solution { rates, schedule: PhaseSchedule::new(delta)?, objective });
        }
        violated.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        active.extend(violated.iter().take(CUTS_PER_ROUND).map(|v| v.1));
        active.sort_unstable();
    }
}

// Per target, the row that is tightest at the uniform schedule.
fn seed(cs: &RateConstraintSet) -> Vec<usize> {
    let uniform = vec![1.0 / cs.t as f64; cs.t];
    let mut picks = Vec::new();
    for target in [Target::Ra, Target::Rb, Target::Sum] {
        let best = cs
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.target == target)
            .min_by(|x, y| x.1.rhs(&uniform).total_cmp(&y.1.rhs(&uniform)));
        if let Some((k, _)) = best {
            picks.push(k);
        }
    }
    picks
}

fn solve_subset(cs: &RateConstraintSet, active: &[usize], lambda: f64, scale: f64) -> Result<(RatePair, Vec<f64>)> {
    let t = cs.t;
    let n = t + 2;
    let rows = active.len() + 1;
    let mut tab = Tableau::new(rows, n);
    for (r, &k) in active.iter().enumerate() {
        let c = &cs.constraints[k];
        if c.target.bounds_ra() {
            tab.set(r, 0, 1.0);
        }
        if c.target.bounds_rb() {
            tab.set(r, 1, 1.0);
        }
        for (l, v) in c.coeff.iter().enumerate() {
            tab.set(r, 2 + l, -v);
        }
    }
    for l in 0..t {
        tab.set(rows - 1, 2 + l, 1.0);
    }
    tab.set_rhs(rows - 1, 1.0);

    let cost_eps = 1e-11 * scale;
    let mut frozen = vec![false; tab.cols];
    let mut stage = |obj: Vec<f64>, tab: &mut Tableau| -> Result<()> { tab.optimize(&obj, &mut frozen, cost_eps) };

    let mut c1 = vec![0.0; tab.cols];
    c1[0] = lambda;
    c1[1] = 1.0 - lambda;
    stage(c1, &mut tab)?;
    let mut c2 = vec![0.0; tab.cols];
    c2[0] = 1.0;
    stage(c2, &mut tab)?;
    let mut c3 = vec![0.0; tab.cols];
    c3[1] = 1.0;
    stage(c3, &mut tab)?;
    let mut c4 = vec![0.0; tab.cols];
    for v in c4.iter_mut().skip(2).take(t) {
        *v = 1.0;
    }
    stage(c4, &mut tab)?;

    let x = tab.primal(n);
    let rates = RatePair::new(x[0].max(0.0), x[1].max(0.0));
    let mut delta: Vec<f64> = x[2..].iter().map(|d| d.max(0.0)).collect();
    let s: f64 = delta.iter().sum();
    if s > 0.0 {
        delta.iter_mut().for_each(|d| *d /= s);
    } else {
        delta = vec![1.0 / t as f64; t];
    }
    Ok((rates, delta))
}

struct Tableau {
    rows: usize,
    cols: usize,
    width: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    // `n` structural columns followed by one slack per row; last column is the rhs.
    fn new(rows: usize, n: usize) -> Self {
        let cols = n + rows;
        let width = cols + 1;
        let mut a = vec![0.0; rows * width];
        for r in 0..rows {
            a[r * width + n + r] = 1.0;
        }
        Tableau { rows, cols, width, a, basis: (n..n + rows).collect() }
    }

    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * self.width + c] = v;
    }

    fn set_rhs(&mut self, r: usize, v: f64) {
        self.a[r * self.width + self.cols] = v;
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.width + c]
    }

    fn reduced_costs(&self, obj: &[f64]) -> Vec<f64> {
        let mut d = obj.to_vec();
        for r in 0..self.rows {
            let cb = obj[self.basis[r]];
            if cb != 0.0 {
                for (j, dj) in d.iter_mut().enumerate() {
                    *dj -= cb * self.at(r, j);
                }
            }
        }
        d
    }

    /// Maximizes `obj · x` over the face left open by `frozen`, then freezes
    /// every column whose reduced cost is strictly negative.
    fn optimize(&mut self, obj: &[f64], frozen: &mut [bool], eps: f64) -> Result<()> {
        let mut d = self.reduced_costs(obj);
        let mut pivots = 0;
        loop {
            // Bland: lowest-index improving column.
            let Some(enter) = (0..self.cols).find(|&j| !frozen[j] && d[j] > eps) else {
                break;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let arj = self.at(r, enter);
                if arj > PIVOT_EPS {
                    let ratio = self.at(r, self.cols) / arj;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-13 || (ratio <= lratio + 1e-13 && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = leave else {
                return Err(Error::Unbounded("the weighted objective"));
            };
            self.pivot(pr, enter);
            let f = d[enter];
            for (j, dj) in d.iter_mut().enumerate() {
                *dj -= f * self.at(pr, j);
            }
            d[enter] = 0.0;
            pivots += 1;
            if pivots > MAX_PIVOTS {
                return Err(Error::InvalidConstraint("simplex iteration limit reached".into()));
            }
        }
        for j in 0..self.cols {
            if d[j] < -eps {
                frozen[j] = true;
            }
        }
        Ok(())
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.at(pr, pc);
        for j in 0..w {
            self.a[pr * w + j] /= p;
        }
        self.a[pr * w + pc] = 1.0;
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f != 0.0 {
                for j in 0..w {
                    let v = self.a[pr * w + j];
                    if v != 0.0 {
                        self.a[r * w + j] -= f * v;
                    }
                }
                self.a[r * w + pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for r in 0..self.rows {
            if self.basis[r] < n {
                x[self.basis[r]] = self.at(r, self.cols);
            }
        }
        x
    }
}
