//! Pareto frontier of a union of regions by a weighted-sum sweep.

use std::fmt::Display;

use rayon::prelude::*;
use serde::Serialize;

use super::{max_weighted, RateConstraintSet, RatePair, Solution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct TraceOptions {
    /// Reduce the points to the vertices of their upper-right convex hull
    /// (time sharing across configurations).
    pub hull: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub lambda: f64,
    pub rates: RatePair,
    pub delta: Vec<f64>,
    pub objective: f64,
    pub config_index: usize,
    pub config_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub protocol: String,
    pub t: usize,
    pub hull: bool,
    pub points: Vec<BoundaryPoint>,
}

impl RegionBoundary {
    pub fn max_sum_rate(&self) -> f64 {
        self.points.iter().map(|p| p.rates.sum()).fold(0.0, f64::max)
    }

    /// Weighted objective of the point traced at `lambda`, if present.
    pub fn value_at(&self, lambda: f64) -> Option<f64> {
        self.points.iter().find(|p| (p.lambda - lambda).abs() < 1e-12).map(|p| p.objective)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,R_a,R_b");
        for l in 1..=self.t {
            s.push_str(&format!(",delta_{l}"));
        }
        s.push_str(",config_id\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{}", p.lambda, p.rates.ra, p.rates.rb));
            for d in &p.delta {
                s.push_str(&format!(",{d}"));
            }
            s.push_str(&format!(",{}\n", p.config_id));
        }
        s
    }
}

/// `n` evenly spaced weights in `[0, 1]`.
pub fn lambda_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
    }
}

/// For each weight, maximizes over every configuration and keeps the best
/// (ties: larger `(R_a, R_b)`, then lower config index).
///
/// Configurations are pruned with the bound
/// `v_c(λ) <= λ max R_a + (1-λ) max R_b`, which makes sweeps over the 4^m
/// decode-set assignments tractable.
pub fn trace_boundary<C, F>(builder: F, configs: &[C], lambdas: &[f64], opts: TraceOptions) -> Result<RegionBoundary>
where
    C: Display + Sync,
    F: Fn(&C) -> Result<RateConstraintSet> + Sync,
{
    if configs.is_empty() || lambdas.is_empty() {
        return Err(Error::InvalidArgument("trace_boundary needs configs and weights".into()));
    }
    let sets: Vec<RateConstraintSet> = configs.par_iter().map(&builder).collect::<Result<_>>()?;
    let t = sets[0].t;
    if sets.iter().any(|s| s.t != t) {
        return Err(Error::InvalidConstraint("configurations disagree on the phase count".into()));
    }

    let extremes: Vec<(f64, f64)> = sets
        .par_iter()
        .map(|cs| Ok((max_weighted(cs, 1.0)?.objective, max_weighted(cs, 0.0)?.objective)))
        .collect::<Result<_>>()?;

    let mut points: Vec<BoundaryPoint> = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut order: Vec<(f64, usize)> = extremes
                .iter()
                .enumerate()
                .map(|(k, (ra, rb))| (lambda * ra + (1.0 - lambda) * rb, k))
                .collect();
            order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            let mut best: Option<(Solution, usize)> = None;
            for (ub, k) in order {
                if let Some((b, _)) = &best {
                    if ub < b.objective - tie_tol(b.objective) {
                        break;
                    }
                }
                let sol = max_weighted(&sets[k], lambda)?;
                if best.as_ref().is_none_or(|(b, bk)| beats(&sol, k, b, *bk)) {
                    best = Some((sol, k));
                }
            }
            let (sol, k) = best.expect("at least one configuration");
            Ok(BoundaryPoint {
                lambda,
                rates: sol.rates,
                delta: sol.schedule.delta().to_vec(),
                objective: sol.objective,
                config_index: k,
                config_id: configs[k].to_string(),
            })
        })
        .collect::<Result<_>>()?;

    points.sort_by(|x, y| x.rates.ra.total_cmp(&y.rates.ra).then(y.rates.rb.total_cmp(&x.rates.rb)).then(x.lambda.total_cmp(&y.lambda)));
    if opts.hull {
        points = upper_hull(points);
    }
    Ok(RegionBoundary { protocol: String::new(), t, hull: opts.hull, points })
}

fn tie_tol(v: f64) -> f64 {
    1e-12 * v.abs().max(1.0)
}

fn beats(sol: &Solution, k: usize, best: &Solution, best_k: usize) -> bool {
    let tol = tie_tol(best.objective);
    if sol.objective > best.objective + tol {
        return true;
    }
    if sol.objective < best.objective - tol {
        return false;
    }
    let key = |s: &Solution| (s.rates.ra, s.rates.rb);
    let (a, b) = (key(sol), key(best));
    if a.0 > b.0 + tol {
        return true;
    }
    if a.0 < b.0 - tol {
        return false;
    }
    if a.1 > b.1 + tol {
        return true;
    }
    if a.1 < b.1 - tol {
        return false;
    }
    k < best_k
}

// Upper-right hull of points sorted by R_a ascending.
fn upper_hull(points: Vec<BoundaryPoint>) -> Vec<BoundaryPoint> {
    let mut pts: Vec<BoundaryPoint> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(last) = pts.last() {
            if (last.rates.ra - p.rates.ra).abs() < 1e-12 && (last.rates.rb - p.rates.rb).abs() < 1e-12 {
                continue;
            }
        }
        pts.push(p);
    }
    let mut hull: Vec<BoundaryPoint> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let o = &hull[hull.len() - 2].rates;
            let a = &hull[hull.len() - 1].rates;
            let cross = (a.ra - o.ra) * (p.rates.rb - o.rb) - (a.rb - o.rb) * (p.rates.ra - o.ra);
            // Drop the middle point unless it turns clockwise.
            if cross >= -1e-12 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::super::Target;
    use super::*;

    fn boxed(ra: f64, rb: f64) -> RateConstraintSet {
        let mut cs = RateConstraintSet::new(1);
        cs.push(Target::Ra, vec![ra]);
        cs.push(Target::Rb, vec![rb]);
        cs
    }

    #[test]
    fn one_config_anchors() {
        let b = trace_boundary(|_: &usize| Ok(boxed(2.0, 3.0)), &[0usize], &[0.0, 1.0], TraceOptions::default()).unwrap();
        assert_eq!(b.points.len(), 2);
        assert!(b.points.iter().all(|p| p.rates == RatePair::new(2.0, 3.0)));
    }

    #[test]
    fn dominant_config_wins() {
        let build = |k: &usize| Ok(if *k == 0 { boxed(1.0, 1.0) } else { boxed(2.0, 2.0) });
        let b = trace_boundary(build, &[0usize, 1], &lambda_grid(11), TraceOptions::default()).unwrap();
        assert!(b.points.iter().all(|p| p.config_index == 1));
    }

    #[test]
    fn hull_drops_dominated_corner() {
        let mut tri = RateConstraintSet::new(1);
        tri.push(Target::Sum, vec![1.0]);
        let build = |k: &usize| Ok(match k {
            0 => boxed(1.0, 0.1),
            1 => boxed(0.1, 1.0),
            _ => tri.clone(),
        });
        let b = trace_boundary(build, &[0usize, 1, 2], &lambda_grid(21), TraceOptions { hull: true }).unwrap();
        for w in b.points.windows(2) {
            assert!(w[0].rates.ra < w[1].rates.ra);
            assert!(w[0].rates.rb > w[1].rates.rb);
        }
        assert!(b.points.len() >= 2);
    }

    #[test]
    fn lambda_grid_ends() {
        let g = lambda_grid(101);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
    }
}
