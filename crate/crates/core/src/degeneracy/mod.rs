//! Deciders for even-degeneracy and even-decomposability.
//!
//! An elimination order `v_1, ..., v_n` is valid when every `v_i` with
//! `i <= n - 2` has an even number of neighbours among `v_{i+1}, ..., v_n`.
//! Removing a vertex of even back-degree never changes the parity of the edge
//! count, which is why a valid order ends on two vertices joined by exactly
//! `e(G) mod 2` edges.

mod decomposable;
mod exact;
mod greedy;
mod witness;

pub use decomposable::{
    exact_even_decomposable, exact_even_decomposable_with_limit, verify_chain, DecompositionChain,
    DEFAULT_DECOMPOSABLE_LIMIT,
};
pub use exact::{exact_even_degenerate, exact_even_degenerate_with_limit, DEFAULT_DP_LIMIT};
pub use greedy::{greedy_even_degenerate, greedy_prefix, GreedyPolicy};
pub use witness::{build_prescribed_witness, WitnessLabels};

use crate::bitset::VertexSet;
use crate::error::{input, Result};
use crate::graph::Graph;

/// A permutation `v_1, ..., v_n` of the vertices, removal order first.
pub type EliminationOrder = Vec<usize>;

pub(crate) fn check_permutation(n: usize, order: &[usize]) -> Result<()> {
    if order.len() != n {
        return input(format!("order has {} entries for {n} vertices", order.len()));
    }
    let mut seen = VertexSet::empty(n);
    for &v in order {
        if v >= n || !seen.insert(v) {
            return input(format!("order is not a permutation (entry {v})"));
        }
    }
    Ok(())
}

/// Checks an elimination order. Fails with an input error if `order` is not a
/// permutation of the vertices.
pub fn verify_ordering(g: &Graph, order: &[usize]) -> Result<bool> {
    check_permutation(g.n(), order)?;
    let n = g.n();
    let mut remaining = VertexSet::full(n);
    for &v in order.iter().take(n.saturating_sub(2)) {
        remaining.remove(v);
        if g.degree_into(v, &remaining) % 2 == 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that each `prefix[i]` has an even number of neighbours in the vertex
/// set left after removing `prefix[..=i]` from `start`.
pub fn verify_prefix(g: &Graph, start: &VertexSet, prefix: &[usize]) -> bool {
    let mut remaining = start.clone();
    for &v in prefix {
        if !remaining.remove(v) || g.degree_into(v, &remaining) % 2 == 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    #[test]
    fn cycle_orders() {
        let c4 = cycle(4);
        assert!(verify_ordering(&c4, &[0, 2, 1, 3]).unwrap());
        assert!(!verify_ordering(&c4, &[0, 1, 2, 3]).unwrap());
    }

    #[test]
    fn tiny_graphs_are_vacuous() {
        assert!(verify_ordering(&complete(2), &[1, 0]).unwrap());
        assert!(verify_ordering(&Graph::empty(1), &[0]).unwrap());
        assert!(verify_ordering(&Graph::empty(0), &[]).unwrap());
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(verify_ordering(&cycle(4), &[0, 0, 1, 2]).is_err());
        assert!(verify_ordering(&cycle(4), &[0, 1, 2]).is_err());
        assert!(verify_ordering(&cycle(4), &[0, 1, 2, 9]).is_err());
    }
}
