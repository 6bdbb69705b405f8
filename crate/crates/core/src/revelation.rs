//! Conditioning data for partially revealed random graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::error::{input, Result};
use crate::graph::Graph;

/// The information a partially revealed graph is conditioned on: the induced
/// subgraph `H` on the revealed part `A`, the degree parity of every `a` in `A`
/// and the parity of the total edge count.
///
/// `a` keeps its order, which the removal procedure uses as `a_1, a_2, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Revelation {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "H")]
    pub h: Vec<(usize, usize)>,
    pub deg_parity: BTreeMap<usize, u8>,
    pub edge_parity: u8,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    0.1
}

impl Revelation {
    /// Nothing revealed except the edge-count parity.
    pub fn empty(edge_parity: u8, alpha: f64) -> Self {
        Self { a: Vec::new(), h: Vec::new(), deg_parity: BTreeMap::new(), edge_parity, alpha }
    }

    /// Reads off the revelation a concrete graph satisfies for the revealed set `a`.
    pub fn from_graph(g: &Graph, a: Vec<usize>, alpha: f64) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &v in &a {
            if v >= g.n() || !seen.insert(v) {
                return input(format!("revealed vertex {v} is out of range or repeated"));
            }
        }
        let mask = VertexSet::from_iter(g.n(), a.iter().copied());
        let mut h: Vec<(usize, usize)> = g.edges().filter(|&(u, v)| mask.contains(u) && mask.contains(v)).collect();
        h.sort_unstable();
        let deg_parity = a.iter().map(|&v| (v, (g.degree(v) % 2) as u8)).collect();
        Ok(Self { a, h, deg_parity, edge_parity: (g.edge_count() % 2) as u8, alpha })
    }

    /// Checks internal consistency against a vertex count `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &v in &self.a {
            if v >= n {
                return input(format!("revealed vertex {v} outside 0..{n}"));
            }
            if !seen.insert(v) {
                return input(format!("revealed vertex {v} listed twice"));
            }
        }
        let mut edges = BTreeSet::new();
        for &(u, v) in &self.h {
            if u == v || !seen.contains(&u) || !seen.contains(&v) {
                return input(format!("revealed edge ({u},{v}) must join two distinct vertices of A"));
            }
            if !edges.insert((u.min(v), u.max(v))) {
                return input(format!("revealed edge ({u},{v}) listed twice"));
            }
        }
        if self.deg_parity.len() != self.a.len() || !self.deg_parity.keys().all(|v| seen.contains(v)) {
            return input("deg_parity must have exactly one entry per revealed vertex");
        }
        if self.deg_parity.values().chain([&self.edge_parity]).any(|&b| b > 1) {
            return input("parity targets must be 0 or 1");
        }
        if !(0.0..0.5).contains(&self.alpha) {
            return input(format!("alpha must lie in [0, 1/2), got {}", self.alpha));
        }
        Ok(())
    }

    /// Whether `|A| <= n^{1-2 alpha}`.
    pub fn within_budget(&self, n: usize) -> bool {
        (self.a.len() as f64) <= (n as f64).powf(1.0 - 2.0 * self.alpha)
    }

    /// Degree of `a` inside `H`.
    pub fn h_degree(&self, a: usize) -> usize {
        self.h.iter().filter(|&&(u, v)| u == a || v == a).count()
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("revelation serializes")
    }
}

/// True iff `g[A] = H`, every `deg_g(a)` has the target parity and `e(g)` has
/// the target parity. Returns false for a revelation that does not fit `g`.
pub fn verify_revelation(g: &Graph, rev: &Revelation) -> bool {
    if rev.validate(g.n()).is_err() {
        return false;
    }
    let h: BTreeSet<(usize, usize)> = rev.h.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    for (i, &u) in rev.a.iter().enumerate() {
        for &v in &rev.a[i + 1..] {
            if g.has_edge(u, v) != h.contains(&(u.min(v), u.max(v))) {
                return false;
            }
        }
    }
    rev.deg_parity.iter().all(|(&a, &s)| (g.degree(a) % 2) as u8 == s) && (g.edge_count() % 2) as u8 == rev.edge_parity
}
