use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::degeneracy::{
    exact_even_degenerate_with_limit, greedy_prefix, verify_ordering, EliminationOrder, GreedyPolicy,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::revelation::Revelation;
use crate::rng::RandomSource;

use super::config::DEFAULT_S_FACTOR;
use super::double::{make_double_plan, PlanParams, Side};
use super::uw::uw_removal;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifierParams {
    pub alpha: f64,
    pub s_factor: f64,
    pub eta: Option<usize>,
    /// Graphs with at most this many vertices go to the exact decider.
    pub dp_threshold: usize,
    /// Fresh double-removal plans tried per level.
    pub max_attempts: usize,
    /// Randomized greedy runs tried when no plan fits or all attempts fail.
    pub greedy_tries: usize,
}

impl Default for CertifierParams {
    fn default() -> Self {
        Self { alpha: 0.1, s_factor: DEFAULT_S_FACTOR, eta: None, dp_threshold: 20, max_attempts: 3, greedy_tries: 8 }
    }
}

/// How one level of the recursion was settled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "path")]
pub enum LevelPath {
    Exact,
    /// The removal with `W = C` succeeded and the rest was certified on `V_C`.
    RemovalBc,
    /// The removal with `W = B` succeeded and the rest was certified on `V_B`.
    RemovalCb,
    /// Greedy removal down to the exact threshold.
    Greedy {
        reason: String,
    },
    Failed {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub depth: usize,
    pub n: usize,
    pub revealed: usize,
    /// Double-removal plans tried at this level.
    pub attempts: usize,
    #[serde(flatten)]
    pub path: LevelPath,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifierResult {
    pub order: Option<EliminationOrder>,
    pub trail: Vec<LevelRecord>,
}

/// Searches for an elimination order of `g` by recursive double removal.
///
/// Small graphs go to the exact decider. Otherwise a fresh double-removal plan
/// is drawn; if the removal with `W = C` succeeds the search recurses on
/// `g[V_C]` with revealed part `A_C`, else (or if that recursion fails) the
/// removal with `W = B` and `g[V_B]` are tried, for up to `max_attempts`
/// plans. When no plan fits the vertex count or every attempt fails, randomized
/// greedy removal down to the exact threshold is tried `greedy_tries` times.
/// A returned order always passes [`verify_ordering`].
pub fn recursive_even_degenerate(
    g: &Graph,
    rev: &Revelation,
    params: &CertifierParams,
    rng: &mut RandomSource,
) -> Result<CertifierResult> {
    rev.validate(g.n())?;
    let mut trail = Vec::new();
    let order = certify(g, rev, params, rng, 0, &mut trail)?;
    if let Some(order) = &order {
        assert!(verify_ordering(g, order)?, "certifier produced an invalid order");
    }
    Ok(CertifierResult { order, trail })
}

fn certify(
    g: &Graph,
    rev: &Revelation,
    params: &CertifierParams,
    rng: &mut RandomSource,
    depth: usize,
    trail: &mut Vec<LevelRecord>,
) -> Result<Option<EliminationOrder>> {
    let n = g.n();
    let mut record = LevelRecord { depth, n, revealed: rev.a.len(), attempts: 0, path: LevelPath::Exact };
    if n <= params.dp_threshold {
        let order = exact_even_degenerate_with_limit(g, params.dp_threshold)?;
        if order.is_none() {
            record.path = LevelPath::Failed { reason: "not even-degenerate".into() };
        }
        trail.push(record);
        return Ok(order);
    }
    let slot = trail.len();
    trail.push(record.clone());

    let plan_params = PlanParams { alpha: params.alpha, s_factor: params.s_factor, s: None, eta: params.eta };
    let mut reason = format!("{} double-removal attempts failed", params.max_attempts);
    for attempt in 1..=params.max_attempts {
        let plan = match make_double_plan(n, rev, plan_params, rng) {
            Ok(plan) => plan,
            Err(Error::Capacity(msg)) => {
                reason = msg;
                break;
            }
            Err(e) => return Err(e),
        };
        record.attempts = attempt;
        for (w_side, path) in [(Side::C, LevelPath::RemovalBc), (Side::B, LevelPath::RemovalCb)] {
            let out = uw_removal(g, &plan.config(w_side));
            if !out.succeeded() {
                continue;
            }
            let sets = plan.side_sets(w_side, &out)?;
            let sub_vertices = &sets.remaining;
            let sub = g.induced(sub_vertices);
            let mut local = vec![usize::MAX; n];
            for (i, &v) in sub_vertices.iter().enumerate() {
                local[v] = i;
            }
            let a_local: Vec<usize> = sets.revealed.iter().map(|&v| local[v]).collect();
            let sub_rev = Revelation::from_graph(&sub, a_local, params.alpha)?;
            if let Some(sub_order) = certify(&sub, &sub_rev, params, rng, depth + 1, trail)? {
                let mut order = out.removed.clone();
                order.extend(sub_order.iter().map(|&i| sub_vertices[i]));
                record.path = path;
                trail[slot] = record;
                return Ok(Some(order));
            }
        }
    }

    let full = VertexSet::full(n);
    for _ in 0..params.greedy_tries {
        let (mut prefix, rest) = greedy_prefix(g, &full, params.dp_threshold, GreedyPolicy::Random, rng);
        if rest.len() > params.dp_threshold {
            continue;
        }
        let rest = rest.to_vec();
        let sub = g.induced(&rest);
        if let Some(sub_order) = exact_even_degenerate_with_limit(&sub, params.dp_threshold)? {
            prefix.extend(sub_order.iter().map(|&i| rest[i]));
            record.path = LevelPath::Greedy { reason };
            trail[slot] = record;
            return Ok(Some(prefix));
        }
    }
    record.path = LevelPath::Failed { reason };
    trail[slot] = record;
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::complete;
    use crate::sampling::sample_gnp;

    #[test]
    fn empty_graph() {
        let g = Graph::empty(100);
        let res = recursive_even_degenerate(
            &g,
            &Revelation::empty(0, 0.1),
            &CertifierParams::default(),
            &mut RandomSource::new(0, 0),
        )
        .unwrap();
        assert!(verify_ordering(&g, &res.order.unwrap()).unwrap());
    }

    #[test]
    fn k4_goes_to_exact() {
        let g = complete(4);
        let res = recursive_even_degenerate(
            &g,
            &Revelation::empty(0, 0.1),
            &CertifierParams::default(),
            &mut RandomSource::new(0, 0),
        )
        .unwrap();
        assert!(res.order.is_none());
        assert_eq!(res.trail[0].path, LevelPath::Failed { reason: "not even-degenerate".into() });
    }

    #[test]
    fn random_graph_is_certified() {
        let mut rng = RandomSource::new(8, 0);
        let g = sample_gnp(1000, 0.5, &mut rng).unwrap();
        let rev = Revelation::empty((g.edge_count() % 2) as u8, 0.1);
        let res = recursive_even_degenerate(&g, &rev, &CertifierParams::default(), &mut rng).unwrap();
        let order = res.order.expect("certified");
        assert!(verify_ordering(&g, &order).unwrap());
        assert!(matches!(res.trail[0].path, LevelPath::RemovalBc | LevelPath::RemovalCb));
    }
}
