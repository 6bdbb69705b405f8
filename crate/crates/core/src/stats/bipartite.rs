use serde::{Deserialize, Serialize};

use crate::error::{capacity, input, Result};
use crate::rng::RandomSource;
use crate::sampling::check_probability;

use super::distribution::{exact_parity_distribution, sample_parity_distribution, MAX_ARITY};
use super::family::IndexSetFamily;
use super::uniformity::{fix_parity_check, sampled_uniformity, UniformityReport, EXACT_SLACK};

/// Largest `|A| |B|` for the exact probe.
pub const MAX_EXACT_EDGES: usize = 24;
/// Largest `|A| |B|` for the exhaustive switch check.
pub const MAX_SWITCH_EDGES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ProbeMode {
    Exact,
    MonteCarlo { trials: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipartiteProbe {
    pub a_size: usize,
    pub b_size: usize,
    pub p: f64,
    pub report: UniformityReport,
    /// `e^{-eta p*^2 / 30}` with `eta = min(|A|, |B|)`.
    pub size_bound: f64,
    /// Whether the measured fix-parity epsilon is at most `size_bound`
    /// (sampled mode: whether the bound is consistent with the counts).
    pub within_bound: bool,
}

/// Edge `(a_i, b_j)` of the complete bipartite graph is ground element `i |B| + j`.
/// The first `|A|` sets are the stars of `A`, the rest those of `B`, so the
/// parities are `(par(a, B))_a` followed by `(par(b, A))_b`.
pub fn bipartite_family(a_size: usize, b_size: usize) -> Result<IndexSetFamily> {
    if a_size == 0 || b_size == 0 {
        return input("both sides need at least one vertex");
    }
    let mut sets: Vec<Vec<usize>> = (0..a_size).map(|i| (0..b_size).map(|j| i * b_size + j).collect()).collect();
    sets.extend((0..b_size).map(|j| (0..a_size).map(|i| i * b_size + j).collect()));
    IndexSetFamily::new(a_size * b_size, sets)
}

/// Law of the degree parities of a p-random bipartite graph on `A ⊔ B`.
///
/// The parities always sum to an even number (each edge is counted on both
/// sides), so the report carries a fix-parity entry for class 0. Exact mode
/// enumerates all `2^{|A||B|}` graphs; sampled mode draws `trials` graphs from
/// `rng` and reports intervals instead of a hard verdict.
pub fn bipartite_fix_parity_probe(
    a_size: usize,
    b_size: usize,
    p: f64,
    mode: ProbeMode,
    rng: &mut RandomSource,
) -> Result<BipartiteProbe> {
    check_probability(p)?;
    if a_size + b_size > MAX_ARITY {
        return capacity(format!("{} parities exceed the table limit {MAX_ARITY}", a_size + b_size));
    }
    let fam = bipartite_family(a_size, b_size)?;
    let report = match mode {
        ProbeMode::Exact => {
            if a_size * b_size > MAX_EXACT_EDGES {
                return capacity(format!("exact probe over {} edges exceeds {MAX_EXACT_EDGES}", a_size * b_size));
            }
            fix_parity_check(&exact_parity_distribution(&fam, p)?)
        }
        ProbeMode::MonteCarlo { trials } => sampled_uniformity(&sample_parity_distribution(&fam, p, trials, rng)?),
    };
    let p_star = p.min(1.0 - p);
    let size_bound = (-(a_size.min(b_size) as f64) * p_star * p_star / 30.0).exp();
    let within_bound = match (&report.fix_parity, mode) {
        (Some(fp), ProbeMode::Exact) => fp.epsilon <= size_bound + EXACT_SLACK,
        (Some(fp), ProbeMode::MonteCarlo { .. }) => fp.interval.is_some_and(|(lo, _)| lo <= size_bound),
        (None, _) => false,
    };
    Ok(BipartiteProbe { a_size, b_size, p, report, size_bound, within_bound })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchReport {
    pub graphs: u64,
    /// Graphs where every consecutive pair `b_i, b_{i+1}` differs on its half of `A`.
    pub eligible: u64,
    /// Switches applied (eligible graphs times `|B| - 1`).
    pub switches: u64,
    pub violations: u64,
}

/// Exhaustive check of the switching map used to show that, once the parities
/// of `A` are fixed, the parities of `B` are fix-parity uniform.
///
/// `A` is split into halves `A_0` (the first `ceil(|A|/2)` vertices) and `A_1`.
/// For consecutive `b_i, b_{i+1}` (1-based `i`) with `j = i mod 2`, the map
/// finds the first `a` in `A_j` adjacent to exactly one of them and swaps the
/// two edges. On graphs where every consecutive pair has such an `a`, each
/// switch must keep the edge count, every `par(a, B)` and every other
/// `par(b, A)`, flip `par(b_i, A)` and `par(b_{i+1}, A)`, stay eligible and be
/// its own inverse. Every bipartite graph on the given sides is tried.
pub fn check_switch_involution(a_size: usize, b_size: usize) -> Result<SwitchReport> {
    if a_size < 2 || b_size < 2 {
        return input("the switch needs |A| >= 2 and |B| >= 2");
    }
    if a_size * b_size > MAX_SWITCH_EDGES {
        return capacity(format!("{} edges exceed the switch-check limit {MAX_SWITCH_EDGES}", a_size * b_size));
    }
    let b = b_size;
    let bit = |i: usize, j: usize| 1u32 << (i * b + j);
    let half = a_size.div_ceil(2);
    let side = |j: usize| if j == 0 { 0..half } else { half..a_size };
    let first_diff =
        |h: u32, i: usize| -> Option<usize> { side(i % 2).find(|&a| (h & bit(a, i - 1) != 0) != (h & bit(a, i) != 0)) };
    let eligible = |h: u32| (1..b).all(|i| first_diff(h, i).is_some());
    let row_par = |h: u32| -> Vec<u32> {
        (0..a_size).map(|a| (0..b).filter(|&j| h & bit(a, j) != 0).count() as u32 & 1).collect()
    };
    let col_par = |h: u32| -> Vec<u32> {
        (0..b).map(|j| (0..a_size).filter(|&a| h & bit(a, j) != 0).count() as u32 & 1).collect()
    };
    let switch = |h: u32, i: usize| -> u32 {
        let a = first_diff(h, i).expect("eligible graph");
        h ^ bit(a, i - 1) ^ bit(a, i)
    };

    let mut rep = SwitchReport::default();
    for h in 0u32..1 << (a_size * b) {
        rep.graphs += 1;
        if !eligible(h) {
            continue;
        }
        rep.eligible += 1;
        let (rows, cols) = (row_par(h), col_par(h));
        for i in 1..b {
            rep.switches += 1;
            let g = switch(h, i);
            let mut expect_cols = cols.clone();
            expect_cols[i - 1] ^= 1;
            expect_cols[i] ^= 1;
            let ok = g.count_ones() == h.count_ones()
                && row_par(g) == rows
                && col_par(g) == expect_cols
                && eligible(g)
                && switch(g, i) == h;
            if !ok {
                rep.violations += 1;
            }
        }
    }
    Ok(rep)
}
