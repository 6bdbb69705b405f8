use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::error::{capacity, input, Result};
use crate::graph::{Graph, PotentialEdgeSet};
use crate::revelation::Revelation;
use crate::rng::RandomSource;

use super::config::{balanced_chunks, block_count, check_alpha, shuffled_rest, CandidatePolicy, RemovalConfig};
use super::uw::{uw_removal, RemovalOutcome};

/// Which half of `V \ A` a derived family belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    B,
    C,
}

/// Vertex sets derived for one half `X` from the removal in which `X` played
/// the role of `W`. `β_1, β_2, ...` are the vertices of `X` in the order that
/// removal took them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideSets {
    /// `i_X`: number of vertices removed from `X`.
    pub removed_count: usize,
    /// `i_X mod s` with values in `1..=s` (0 when nothing was removed).
    pub residue: usize,
    /// Block-group width used for this side after any clamping.
    pub eta: usize,
    /// `V_X`: the vertices of `X` left over.
    pub remaining: Vec<usize>,
    /// `X^P = {β_1, ..., β_η}`.
    pub prefix: Vec<usize>,
    /// `X^Q = {β_{i-η+1}, ..., β_i}`.
    pub suffix: Vec<usize>,
    /// `D_X^P = X_1 ∪ ... ∪ X_η`.
    pub prefix_blocks: Vec<usize>,
    /// `D_X^Q`: the `η` blocks ending at `X_{i mod s}`, indices taken cyclically.
    pub suffix_blocks: Vec<usize>,
    /// `A_X = (X_# ∪ D_X^P ∪ D_X^Q) ∩ V_X`, the revealed part of the next level.
    pub revealed: Vec<usize>,
    /// `T_X^P = (V_X ∪ X^Q) \ (D_X^P ∪ X_#)`.
    pub prefix_targets: Vec<usize>,
    /// `T_X^Q = V_X \ A_X`.
    pub suffix_targets: Vec<usize>,
    /// Set when `i - η + 1 <= 2s` forced a smaller `η`.
    pub eta_clamped: bool,
}

impl SideSets {
    /// Whether `{u, v}` lies in `Σ_X = binom(X, 2) \ (binom(V_X, 2) ∪
    /// S(X^P, T_X^P) ∪ S(X^Q, T_X^Q))`. `in_half` is the indicator of `X`.
    pub fn sigma_contains(&self, in_half: &VertexSet, u: usize, v: usize) -> bool {
        if u == v || !in_half.contains(u) || !in_half.contains(v) {
            return false;
        }
        let n = in_half.universe();
        let set = |xs: &[usize]| VertexSet::from_iter(n, xs.iter().copied());
        let (rem, p, tp, q, tq) = (
            set(&self.remaining),
            set(&self.prefix),
            set(&self.prefix_targets),
            set(&self.suffix),
            set(&self.suffix_targets),
        );
        let across =
            |a: &VertexSet, b: &VertexSet| (a.contains(u) && b.contains(v)) || (a.contains(v) && b.contains(u));
        !(rem.contains(u) && rem.contains(v)) && !across(&p, &tp) && !across(&q, &tq)
    }
}

/// Both derived families after a doubly successful run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedSets {
    pub b: SideSets,
    pub c: SideSets,
}

/// Split of `V \ A` into halves `B` and `C` (each in ascending order) with the
/// block structure both removals use.
///
/// Each half is cut into `s + 1` balanced consecutive chunks with boundaries
/// `r_1 < ... < r_{s+1} = |X|`. Blocks run in decreasing position: `X_s` is
/// the first chunk, `X_1` the `s`-th and the reserve `X_#` the last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleRemovalPlan {
    pub n: usize,
    pub alpha: f64,
    pub revelation: Revelation,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub s: usize,
    pub eta: usize,
    pub b_bounds: Vec<usize>,
    pub c_bounds: Vec<usize>,
    #[serde(default)]
    pub candidate_policy: CandidatePolicy,
    pub derived: Option<DerivedSets>,
}

/// Defaults and overrides for [`make_double_plan`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanParams {
    pub alpha: f64,
    pub s_factor: f64,
    pub s: Option<usize>,
    pub eta: Option<usize>,
}

fn bounds(len: usize, s: usize) -> Vec<usize> {
    let chunks = balanced_chunks(&(0..len).collect::<Vec<_>>(), s + 1);
    chunks
        .iter()
        .scan(0, |acc, c| {
            *acc += c.len();
            Some(*acc)
        })
        .collect()
}

/// Default `η = max(1, floor(0.02 n^{1/2 - alpha}))`.
pub fn default_eta(n: usize, alpha: f64) -> usize {
    ((0.02 * (n as f64).powf(0.5 - alpha)).floor() as usize).max(1)
}

/// Builds a random double-removal plan.
///
/// `η` defaults to [`default_eta`] and is then lowered (never below 1) until
/// `η * max block size <= 0.01 n^{1 - 2 alpha}`, so the bound holds up to one
/// block of slack. Fails with a capacity error naming the first constraint the
/// vertex count cannot meet: nonempty blocks, the revealed-part budget
/// `|A| <= n^{1 - 2 alpha}`, the next level's budget
/// `(1 + 2η) * max block size <= n^{1 - 2 alpha}`, or room for
/// `i - η + 1 > 2s` at the expected removal count `|X| / 2`.
pub fn make_double_plan(
    n: usize,
    rev: &Revelation,
    params: PlanParams,
    rng: &mut RandomSource,
) -> Result<DoubleRemovalPlan> {
    check_alpha(params.alpha)?;
    rev.validate(n)?;
    let budget = (n as f64).powf(1.0 - 2.0 * params.alpha);
    if rev.a.len() as f64 > budget {
        return capacity(format!("revealed part has {} vertices, budget n^(1-2 alpha) is {budget:.1}", rev.a.len()));
    }
    let s = match params.s {
        Some(0) => return input("s must be at least 1"),
        Some(s) => s,
        None => block_count(n, params.alpha, params.s_factor),
    };
    let rest = shuffled_rest(n, rev, rng);
    let half = rest.len().div_ceil(2);
    let mut b = rest[..half].to_vec();
    let mut c = rest[half..].to_vec();
    b.sort_unstable();
    c.sort_unstable();
    if c.len() < s + 1 {
        return capacity(format!("halves of size {} cannot fill s + 1 = {} nonempty blocks", c.len(), s + 1));
    }
    let max_block = b.len().div_ceil(s + 1);
    let eta = match params.eta {
        Some(0) => return input("eta must be at least 1"),
        Some(e) => e,
        None => {
            let cap = (0.01 * budget / max_block as f64).floor() as usize;
            default_eta(n, params.alpha).min(cap.max(1))
        }
    };
    if eta > s {
        return capacity(format!("eta = {eta} exceeds the block count s = {s}"));
    }
    if ((1 + 2 * eta) * max_block) as f64 > budget {
        return capacity(format!(
            "next revealed part could reach (1 + 2 eta) * {max_block} = {} vertices, budget is {budget:.1}",
            (1 + 2 * eta) * max_block
        ));
    }
    if c.len() / 2 < 2 * s + eta {
        return capacity(format!(
            "expected removal count {} leaves no room for i - eta + 1 > 2s = {}",
            c.len() / 2,
            2 * s
        ));
    }
    let b_bounds = bounds(b.len(), s);
    let c_bounds = bounds(c.len(), s);
    Ok(DoubleRemovalPlan {
        n,
        alpha: params.alpha,
        revelation: rev.clone(),
        b,
        c,
        s,
        eta,
        b_bounds,
        c_bounds,
        candidate_policy: CandidatePolicy::LowestIndex,
        derived: None,
    })
}

impl DoubleRemovalPlan {
    fn half(&self, side: Side) -> (&[usize], &[usize]) {
        match side {
            Side::B => (&self.b, &self.b_bounds),
            Side::C => (&self.c, &self.c_bounds),
        }
    }

    /// `(X_#, [X_1, ..., X_s])` for half `X`.
    pub fn blocks(&self, side: Side) -> (Vec<usize>, Vec<Vec<usize>>) {
        let (xs, r) = self.half(side);
        let s = self.s;
        let start = |k: usize| if k == 0 { 0 } else { r[k - 1] };
        let reserve = xs[r[s - 1]..r[s]].to_vec();
        let blocks = (1..=s).map(|i| xs[start(s - i)..r[s - i]].to_vec()).collect();
        (reserve, blocks)
    }

    /// Removal with `U = other half` and `W = blocks of side`.
    pub fn config(&self, w_side: Side) -> RemovalConfig {
        let (w_reserve, w_blocks) = self.blocks(w_side);
        let u = match w_side {
            Side::B => self.c.clone(),
            Side::C => self.b.clone(),
        };
        RemovalConfig {
            revelation: self.revelation.clone(),
            u,
            w_reserve,
            w_blocks,
            candidate_policy: self.candidate_policy,
        }
    }

    /// Derived sets of half `side` from a successful removal in which that half
    /// was `W`. If `i - η + 1 <= 2s`, `η` is lowered to `max(1, i - 2s)` for this
    /// side and a warning is logged.
    pub fn side_sets(&self, side: Side, out: &RemovalOutcome) -> Result<SideSets> {
        let Some(remaining) = out.remaining.clone() else {
            return input("derived sets need a successful removal");
        };
        let n = self.n;
        let s = self.s;
        let (xs, _) = self.half(side);
        let in_half = VertexSet::from_iter(n, xs.iter().copied());
        let beta: Vec<usize> = out.removed.iter().copied().filter(|&v| in_half.contains(v)).collect();
        let i = beta.len();
        let mut eta = self.eta;
        let mut eta_clamped = false;
        if i < 2 * s + eta {
            let lowered = i.saturating_sub(2 * s).max(1);
            if lowered < eta {
                log::warn!("removed count {i} too small for eta = {eta} with s = {s}; using eta = {lowered}");
                eta = lowered;
            }
            eta_clamped = true;
        }
        let take = eta.min(i);
        let prefix = beta[..take].to_vec();
        let suffix = beta[i - take..].to_vec();
        let residue = if i == 0 { 0 } else { (i - 1) % s + 1 };
        let (reserve, blocks) = self.blocks(side);
        let prefix_blocks: Vec<usize> = blocks[..eta.min(s)].concat();
        let suffix_blocks: Vec<usize> = if i == 0 {
            Vec::new()
        } else {
            (0..eta.min(s))
                .map(|k| ((residue as isize - 1 - k as isize).rem_euclid(s as isize)) as usize)
                .flat_map(|idx| blocks[idx].iter().copied())
                .collect()
        };
        let set = |v: &[usize]| VertexSet::from_iter(n, v.iter().copied());
        let rem = set(&remaining);
        let dp = set(&prefix_blocks);
        let res = set(&reserve);
        let mut revealed_set = res.union(&dp);
        revealed_set.union_with(&set(&suffix_blocks));
        revealed_set.intersect_with(&rem);
        let mut tp = rem.union(&set(&suffix));
        tp.difference_with(&dp);
        tp.difference_with(&res);
        let tq = rem.difference(&revealed_set);
        let mut sorted_prefix_blocks = prefix_blocks;
        sorted_prefix_blocks.sort_unstable();
        let mut sorted_suffix_blocks = suffix_blocks;
        sorted_suffix_blocks.sort_unstable();
        Ok(SideSets {
            removed_count: i,
            residue,
            eta,
            remaining,
            prefix,
            suffix,
            prefix_blocks: sorted_prefix_blocks,
            suffix_blocks: sorted_suffix_blocks,
            revealed: revealed_set.to_vec(),
            prefix_targets: tp.to_vec(),
            suffix_targets: tq.to_vec(),
            eta_clamped,
        })
    }

    /// `Σ_X` as an explicit pair set. Quadratic in `|X|`.
    pub fn sigma(&self, side: Side) -> Option<PotentialEdgeSet> {
        let derived = self.derived.as_ref()?;
        let sets = match side {
            Side::B => &derived.b,
            Side::C => &derived.c,
        };
        let (xs, _) = self.half(side);
        let in_half = VertexSet::from_iter(self.n, xs.iter().copied());
        let mut out = PotentialEdgeSet::new();
        for (k, &u) in xs.iter().enumerate() {
            for &v in &xs[k + 1..] {
                if sets.sigma_contains(&in_half, u, v) {
                    out.insert(u, v).expect("distinct");
                }
            }
        }
        Some(out)
    }

    pub fn half_vertices(&self, side: Side) -> &[usize] {
        self.half(side).0
    }
}

/// Outcome of running both removals of a plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleRemovalOutcome {
    /// `(B, C)`-removal: `U = B`, `W = C`.
    pub bc: RemovalOutcome,
    /// `(C, B)`-removal: `U = C`, `W = B`.
    pub cb: RemovalOutcome,
    pub plan: DoubleRemovalPlan,
}

/// Runs the `(B, C)`- and `(C, B)`-removals on the same graph. When both
/// succeed the plan's derived sets are filled in; otherwise they stay empty.
pub fn double_removal(g: &Graph, plan: &DoubleRemovalPlan) -> Result<DoubleRemovalOutcome> {
    if g.n() != plan.n {
        return input(format!("plan built for {} vertices, graph has {}", plan.n, g.n()));
    }
    let bc = uw_removal(g, &plan.config(Side::C));
    let cb = uw_removal(g, &plan.config(Side::B));
    let mut plan = plan.clone();
    if bc.succeeded() && cb.succeeded() {
        plan.derived = Some(DerivedSets { b: plan.side_sets(Side::B, &cb)?, c: plan.side_sets(Side::C, &bc)? });
    }
    Ok(DoubleRemovalOutcome { bc, cb, plan })
}
