//! Linear constraint sets over `(R_a, R_b, Δ_1..Δ_t)` and their optimizers.
//!
//! Every constraint reads `target <= Σ_ℓ Δ_ℓ · coeff[ℓ]` where the target is
//! `R_a`, `R_b` or `R_a + R_b`. The phase durations live on the simplex.

mod boundary;
mod lp;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use boundary::{lambda_grid, trace_boundary, BoundaryPoint, RegionBoundary, TraceOptions};
pub use lp::{max_weighted, Solution};
pub use oracle::{grid_oracle, grid_point_value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    Ra,
    Rb,
    Sum,
}

impl Target {
    pub fn bounds_ra(self) -> bool {
        matches!(self, Target::Ra | Target::Sum)
    }

    pub fn bounds_rb(self) -> bool {
        matches!(self, Target::Rb | Target::Sum)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub target: Target,
    pub coeff: Vec<f64>,
}

impl Constraint {
    pub fn rhs(&self, delta: &[f64]) -> f64 {
        self.coeff.iter().zip(delta).map(|(c, d)| c * d).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateConstraintSet {
    pub t: usize,
    pub constraints: Vec<Constraint>,
}

/// Tightest right-hand side per target at a fixed schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    pub ra: f64,
    pub rb: f64,
    pub sum: f64,
}

impl RateConstraintSet {
    pub fn new(t: usize) -> Self {
        RateConstraintSet { t, constraints: Vec::new() }
    }

    pub fn push(&mut self, target: Target, coeff: Vec<f64>) {
        debug_assert_eq!(coeff.len(), self.t);
        self.constraints.push(Constraint { target, coeff });
    }

    /// Adds `target <= c · Δ_phase` (phase is 1-based).
    pub fn push_single(&mut self, target: Target, phase: usize, c: f64) {
        let mut coeff = vec![0.0; self.t];
        coeff[phase - 1] = c;
        self.push(target, coeff);
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn of(&self, target: Target) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(move |c| c.target == target)
    }

    /// Shape and sign checks: `t >= 1`, every row has `t` finite nonnegative
    /// coefficients.
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::InvalidConstraint("phase count t must be at least 1".into()));
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeff.len() != self.t {
                return Err(Error::InvalidConstraint(format!(
                    "constraint {k} has {} coefficients, expected {}",
                    c.coeff.len(),
                    self.t
                )));
            }
            if let Some(v) = c.coeff.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidConstraint(format!("constraint {k} has coefficient {v}")));
            }
        }
        Ok(())
    }

    pub fn check_bounded(&self) -> Result<()> {
        if !self.constraints.iter().any(|c| c.target.bounds_ra()) {
            return Err(Error::Unbounded("R_a"));
        }
        if !self.constraints.iter().any(|c| c.target.bounds_rb()) {
            return Err(Error::Unbounded("R_b"));
        }
        Ok(())
    }

    pub fn bounds_at(&self, delta: &[f64]) -> RateBounds {
        let mut b = RateBounds { ra: f64::INFINITY, rb: f64::INFINITY, sum: f64::INFINITY };
        for c in &self.constraints {
            let v = c.rhs(delta);
            let slot = match c.target {
                Target::Ra => &mut b.ra,
                Target::Rb => &mut b.rb,
                Target::Sum => &mut b.sum,
            };
            *slot = slot.min(v);
        }
        b
    }

    /// Largest violation of any constraint by `rates` at `delta` (0 if feasible).
    pub fn max_violation(&self, rates: RatePair, delta: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| {
                let lhs = match c.target {
                    Target::Ra => rates.ra,
                    Target::Rb => rates.rb,
                    Target::Sum => rates.ra + rates.rb,
                };
                lhs - c.rhs(delta)
            })
            .fold(0.0, f64::max)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: f64) -> RateConstraintSet {
        RateConstraintSet {
            t: self.t,
            constraints: self
                .constraints
                .iter()
                .map(|k| Constraint { target: k.target, coeff: k.coeff.iter().map(|v| v * c).collect() })
                .collect(),
        }
    }

    /// Drops constraints that are exact duplicates of an earlier row.
    pub fn dedup(&mut self) {
        let mut seen: Vec<Constraint> = Vec::with_capacity(self.constraints.len());
        for c in self.constraints.drain(..) {
            if !seen.contains(&c) {
                seen.push(c);
            }
        }
        self.constraints = seen;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RatePair {
    #[serde(rename = "R_a")]
    pub ra: f64,
    #[serde(rename = "R_b")]
    pub rb: f64,
}

impl RatePair {
    pub fn new(ra: f64, rb: f64) -> Self {
        RatePair { ra, rb }
    }

    pub fn sum(&self) -> f64 {
        self.ra + self.rb
    }

    pub fn weighted(&self, lambda: f64) -> f64 {
        lambda * self.ra + (1.0 - lambda) * self.rb
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule {
    delta: Vec<f64>,
}

impl PhaseSchedule {
    pub const TOLERANCE: f64 = 1e-9;

    pub fn new(delta: Vec<f64>) -> Result<Self> {
        if delta.is_empty() {
            return Err(Error::InvalidArgument("empty phase schedule".into()));
        }
        if delta.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::InvalidArgument(format!("negative or non-finite duration in {delta:?}")));
        }
        let s: f64 = delta.iter().sum();
        if (s - 1.0).abs() > Self::TOLERANCE {
            return Err(Error::InvalidArgument(format!("durations sum to {s}, not 1")));
        }
        Ok(PhaseSchedule { delta })
    }

    pub fn uniform(t: usize) -> Self {
        PhaseSchedule { delta: vec![1.0 / t as f64; t] }
    }

    pub fn t(&self) -> usize {
        self.delta.len()
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }
}
