//! Network geometry, channel gains and the Gaussian capacity function.
//!
//! Nodes are indexed `0..=m+1`: index 0 is terminal `a`, index `m + 1` is
//! terminal `b`, and `1..=m` are the relays. Gains are stored as squared
//! magnitudes `|h_ij|^2` with unit noise power.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `C(x) = log2(1 + x)`, checked.
pub fn capacity(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(x));
    }
    Ok(cap(x))
}

// ln_1p keeps the low-SNR end accurate.
#[inline]
pub(crate) fn cap(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Converts a power in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub(crate) fn check_power(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPower(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const A: NodeId = NodeId(0);

    pub fn b(m: usize) -> NodeId {
        NodeId(m + 1)
    }

    pub fn relay(i: usize) -> NodeId {
        NodeId(i)
    }

    pub fn checked(index: usize, m: usize) -> Result<NodeId> {
        if index > m + 1 {
            return Err(Error::InvalidArgument(format!(
                "node index {index} out of range for m = {m}"
            )));
        }
        Ok(NodeId(index))
    }

    /// `"a"`, `"b"` or `"r<i>"`.
    pub fn label(self, m: usize) -> String {
        match self.0 {
            0 => "a".to_string(),
            i if i == m + 1 => "b".to_string(),
            i => format!("r{i}"),
        }
    }
}

/// Symmetric matrix of squared channel magnitudes among the `m + 2` nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainMatrix {
    m: usize,
    g: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawGains {
    m: usize,
    g: Vec<Vec<f64>>,
}

impl GainMatrix {
    /// Validates shape, symmetry, zero diagonal and nonnegativity.
    pub fn new(m: usize, g: Vec<Vec<f64>>) -> Result<Self> {
        let n = m + 2;
        if g.len() != n || g.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGains(format!("expected a {n}x{n} matrix for m = {m}")));
        }
        for i in 0..n {
            if g[i][i] != 0.0 {
                return Err(Error::InvalidGains(format!("diagonal entry {i} is {}", g[i][i])));
            }
            for j in 0..n {
                let v = g[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidGains(format!("entry ({i},{j}) = {v}")));
                }
                let w = g[j][i];
                if (v - w).abs() > 1e-12 * v.abs().max(w.abs()).max(1.0) {
                    return Err(Error::InvalidGains(format!("not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(GainMatrix { m, g })
    }

    /// Builds from magnitudes `|h_ij|`, squaring every entry.
    pub fn from_magnitudes(m: usize, h: &[Vec<f64>]) -> Result<Self> {
        let g = h.iter().map(|row| row.iter().map(|v| v * v).collect()).collect();
        Self::new(m, g)
    }

    /// Every pair of distinct nodes (including a-b) has squared gain `h_sq`.
    pub fn equal(m: usize, h_sq: f64) -> Result<Self> {
        let n = m + 2;
        let g = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { h_sq }).collect())
            .collect();
        Self::new(m, g)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nodes(&self) -> usize {
        self.m + 2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.g[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.g
    }

    pub fn b(&self) -> usize {
        self.m + 1
    }

    /// Replaces the direct a-b gain.
    pub fn with_direct(mut self, h_ab_sq: f64) -> Result<Self> {
        if !h_ab_sq.is_finite() || h_ab_sq < 0.0 {
            return Err(Error::InvalidGains(format!("direct gain {h_ab_sq}")));
        }
        let b = self.b();
        self.g[0][b] = h_ab_sq;
        self.g[b][0] = h_ab_sq;
        Ok(self)
    }

    /// Swaps the roles of `a` and `b` and reverses the relay order:
    /// node `i` becomes node `m + 1 - i`.
    pub fn mirrored(&self) -> GainMatrix {
        let n = self.nodes();
        let g = (0..n)
            .map(|i| (0..n).map(|j| self.g[n - 1 - i][n - 1 - j]).collect())
            .collect();
        GainMatrix { m: self.m, g }
    }

    /// Relabels the relays so that the `k`-th relay of the result is
    /// `order[k-1]` of `self`. Terminals stay in place.
    pub fn reordered(&self, order: &[usize]) -> Result<GainMatrix> {
        let m = self.m;
        let mut seen = vec![false; m + 1];
        if order.len() != m || order.iter().any(|&r| r == 0 || r > m || std::mem::replace(&mut seen[r], true)) {
            return Err(Error::InvalidConfig(format!("{order:?} is not a permutation of 1..={m}")));
        }
        let map: Vec<usize> = std::iter::once(0).chain(order.iter().copied()).chain(std::iter::once(m + 1)).collect();
        let g = map.iter().map(|&i| map.iter().map(|&j| self.g[i][j]).collect()).collect();
        Ok(GainMatrix { m, g })
    }

    /// Keeps only the listed relays, in the given order.
    pub fn induced(&self, relays: &[usize]) -> Result<GainMatrix> {
        let m = self.m;
        if relays.iter().any(|&r| r == 0 || r > m) {
            return Err(Error::InvalidConfig(format!("relay list {relays:?} out of range")));
        }
        let map: Vec<usize> = std::iter::once(0).chain(relays.iter().copied()).chain(std::iter::once(m + 1)).collect();
        let g = map.iter().map(|&i| map.iter().map(|&j| self.g[i][j]).collect()).collect();
        GainMatrix::new(relays.len(), g)
    }

    /// Smallest and largest off-diagonal squared gain.
    pub fn extremes(&self) -> (f64, f64) {
        let n = self.nodes();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                lo = lo.min(self.g[i][j]);
                hi = hi.max(self.g[i][j]);
            }
        }
        (lo, hi)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("m={}\n", self.m);
        for row in &self.g {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty gain file".into()))?;
        let m: usize = header
            .strip_prefix("m=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}, expected m=<value>")))?;
        let mut g = Vec::with_capacity(m + 2);
        for line in lines {
            let row = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{c:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            g.push(row);
        }
        Self::new(m, g)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawGains = serde_json::from_str(text)?;
        Self::new(raw.m, raw.g)
    }
}

impl fmt::Display for GainMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.g {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:8.4}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// The two-relay example network. Its entries are magnitudes and get squared.
pub fn example_gains() -> GainMatrix {
    let h = [
        vec![0.0, 1.2, 0.8, 0.2],
        vec![1.2, 0.0, 2.0, 0.8],
        vec![0.8, 2.0, 0.0, 1.2],
        vec![0.2, 0.8, 1.2, 0.0],
    ];
    GainMatrix::from_magnitudes(2, &h).expect("constant matrix is valid")
}

/// Nodes on a line segment with path loss `k / d^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Positions of `a`, the relays, and `b`, in that order.
    pub positions: Vec<f64>,
    pub pathloss_exponent: f64,
    pub k: f64,
    pub direct_gain_override: Option<f64>,
}

impl Geometry {
    pub fn new(positions: Vec<f64>, pathloss_exponent: f64, k: f64, direct_gain_override: Option<f64>) -> Result<Self> {
        if positions.len() < 3 {
            return Err(Error::DegenerateGeometry("need a, b and at least one relay".into()));
        }
        if !(pathloss_exponent > 0.0 && pathloss_exponent.is_finite()) || !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("exponent {pathloss_exponent} and k {k} must be positive")));
        }
        if positions[0] != 0.0 {
            return Err(Error::DegenerateGeometry("terminal a must sit at 0".into()));
        }
        for w in positions.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::DegenerateGeometry(format!(
                    "positions must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Geometry { positions, pathloss_exponent, k, direct_gain_override })
    }

    pub fn m(&self) -> usize {
        self.positions.len() - 2
    }

    pub fn gains(&self) -> Result<GainMatrix> {
        let n = self.positions.len();
        let mut g = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let d = (self.positions[i] - self.positions[j]).abs();
                    g[i][j] = self.k / d.powf(self.pathloss_exponent);
                }
            }
        }
        let gm = GainMatrix::new(n - 2, g)?;
        match self.direct_gain_override {
            Some(h) => gm.with_direct(h),
            None => Ok(gm),
        }
    }
}

/// Relays evenly spaced on `[0, d_ab]`, relay `i` at `i/(m+1) * d_ab`.
pub fn line_gains(m: usize, d_ab: f64, exponent: f64, k: f64, h_ab_sq: Option<f64>) -> Result<GainMatrix> {
    line_geometry(m, d_ab, exponent, k, h_ab_sq)?.gains()
}

pub fn line_geometry(m: usize, d_ab: f64, exponent: f64, k: f64, h_ab_sq: Option<f64>) -> Result<Geometry> {
    if m == 0 {
        return Err(Error::InvalidArgument("line geometry needs m >= 1".into()));
    }
    if !(d_ab > 0.0 && d_ab.is_finite()) {
        return Err(Error::DegenerateGeometry(format!("d_ab = {d_ab}")));
    }
    let positions = (0..m + 2).map(|i| i as f64 / (m + 1) as f64 * d_ab).collect();
    Geometry::new(positions, exponent, k, h_ab_sq)
}

/// Gives each listed node `P / |set|`.
pub fn equal_power_split(transmitters: &[NodeId], p: f64) -> Result<BTreeMap<NodeId, f64>> {
    check_power(p)?;
    let mut set: Vec<NodeId> = transmitters.to_vec();
    set.sort();
    set.dedup();
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let share = p / set.len() as f64;
    Ok(set.into_iter().map(|n| (n, share)).collect())
}
