use crate::bitset::VertexSet;
use crate::error::{capacity, Result};
use crate::graph::Graph;

pub const DEFAULT_DECOMPOSABLE_LIMIT: usize = 14;

/// Nested vertex sets `V = V_1 ⊇ V_2 ⊇ ... ⊇ V_k = ∅`, each as sorted vertices.
pub type DecompositionChain = Vec<Vec<usize>>;

pub fn exact_even_decomposable(g: &Graph) -> Result<Option<DecompositionChain>> {
    exact_even_decomposable_with_limit(g, DEFAULT_DECOMPOSABLE_LIMIT)
}

/// Search over subsets `S` with `e(g[S])` even. A step removes a nonempty
/// independent subset of `S`; larger subsets (by mask value) are tried first and
/// dead states are memoized.
pub fn exact_even_decomposable_with_limit(g: &Graph, limit: usize) -> Result<Option<DecompositionChain>> {
    let n = g.n();
    if n > limit.min(20) {
        return capacity(format!("decomposition search limited to {} vertices, graph has {n}", limit.min(20)));
    }
    let adj = g.small_masks();
    let size = 1usize << n;
    let mut even = vec![false; size];
    let mut independent = vec![false; size];
    let mut edges = vec![0u32; size];
    even[0] = true;
    independent[0] = true;
    for s in 1..size {
        let v = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let inside = (adj[v] & rest as u32).count_ones();
        edges[s] = edges[rest] + inside;
        even[s] = edges[s].is_multiple_of(2);
        independent[s] = independent[rest] && inside == 0;
    }
    let full = size - 1;
    if !even[full] {
        return Ok(None);
    }
    let mut dead = vec![false; size];
    let mut chain = vec![full];
    if descend(full, &even, &independent, &mut dead, &mut chain) {
        Ok(Some(chain.into_iter().map(|s| (0..n).filter(|v| s >> v & 1 == 1).collect()).collect()))
    } else {
        Ok(None)
    }
}

fn descend(s: usize, even: &[bool], independent: &[bool], dead: &mut [bool], chain: &mut Vec<usize>) -> bool {
    if s == 0 {
        return true;
    }
    let mut d = s;
    while d != 0 {
        let next = s & !d;
        if independent[d] && even[next] && !dead[next] {
            chain.push(next);
            if descend(next, even, independent, dead, chain) {
                return true;
            }
            chain.pop();
            dead[next] = true;
        }
        d = (d - 1) & s;
    }
    dead[s] = true;
    false
}

/// Checks a decomposition chain against `g`.
pub fn verify_chain(g: &Graph, chain: &[Vec<usize>]) -> bool {
    let n = g.n();
    let as_set = |vs: &[usize]| -> Option<VertexSet> {
        let mut s = VertexSet::empty(n);
        for &v in vs {
            if v >= n || !s.insert(v) {
                return None;
            }
        }
        Some(s)
    };
    let Some(sets) = chain.iter().map(|c| as_set(c)).collect::<Option<Vec<_>>>() else {
        return false;
    };
    if sets.first().map(VertexSet::len) != Some(n) || sets.last().map(VertexSet::is_empty) != Some(true) {
        return false;
    }
    for pair in sets.windows(2) {
        let (big, small) = (&pair[0], &pair[1]);
        if !small.is_subset(big) || small == big || g.edges_within(big) % 2 == 1 {
            return false;
        }
        let diff = big.difference(small);
        if g.edges_within(&diff) != 0 {
            return false;
        }
    }
    true
}
