use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::RandomSource;

use super::EliminationOrder;

/// Which even-degree vertex the greedy decider removes next. Ties go to the
/// lowest index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyPolicy {
    #[default]
    FirstIndex,
    Random,
    MinDegree,
    MaxDegree,
}

impl GreedyPolicy {
    pub const ALL: [GreedyPolicy; 4] = [Self::FirstIndex, Self::Random, Self::MinDegree, Self::MaxDegree];
}

impl FromStr for GreedyPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-index" => Ok(Self::FirstIndex),
            "random" => Ok(Self::Random),
            "min-degree" => Ok(Self::MinDegree),
            "max-degree" => Ok(Self::MaxDegree),
            other => Err(Error::Input(format!("unknown greedy policy `{other}`"))),
        }
    }
}

/// Greedily removes even-degree vertices of `g[start]` until at most `stop_at`
/// remain or no even-degree vertex is left. Returns the removed sequence and the
/// vertices still present.
pub fn greedy_prefix(
    g: &Graph,
    start: &VertexSet,
    stop_at: usize,
    policy: GreedyPolicy,
    rng: &mut RandomSource,
) -> (Vec<usize>, VertexSet) {
    let mut remaining = start.clone();
    let mut degree: Vec<usize> =
        (0..g.n()).map(|v| if start.contains(v) { g.degree_into(v, start) } else { 0 }).collect();
    let mut removed = Vec::new();
    let mut candidates = Vec::new();
    while remaining.len() > stop_at {
        candidates.clear();
        candidates.extend(remaining.iter().filter(|&v| degree[v].is_multiple_of(2)));
        let pick = match policy {
            GreedyPolicy::FirstIndex => candidates.first().copied(),
            GreedyPolicy::Random => candidates.choose(rng).copied(),
            GreedyPolicy::MinDegree => candidates.iter().copied().min_by_key(|&v| (degree[v], v)),
            GreedyPolicy::MaxDegree => candidates.iter().copied().min_by_key(|&v| (usize::MAX - degree[v], v)),
        };
        let Some(v) = pick else { break };
        remaining.remove(v);
        for u in g.neighbors(v).intersection(&remaining).iter() {
            degree[u] -= 1;
        }
        removed.push(v);
    }
    (removed, remaining)
}

/// Greedy decider: succeeds when it gets down to two vertices.
pub fn greedy_even_degenerate(g: &Graph, policy: GreedyPolicy, rng: &mut RandomSource) -> Option<EliminationOrder> {
    let (mut order, rest) = greedy_prefix(g, &VertexSet::full(g.n()), 2, policy, rng);
    if rest.len() > 2 {
        return None;
    }
    order.extend(rest.iter());
    Some(order)
}
