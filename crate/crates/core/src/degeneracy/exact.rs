use crate::error::{capacity, Result};
use crate::graph::Graph;

use super::EliminationOrder;

pub const DEFAULT_DP_LIMIT: usize = 22;

const UNREACHED: u8 = 0xFF;
const ROOT: u8 = 0xFE;

/// Exact decision by reachability over remaining-vertex subsets.
pub fn exact_even_degenerate(g: &Graph) -> Result<Option<EliminationOrder>> {
    exact_even_degenerate_with_limit(g, DEFAULT_DP_LIMIT)
}

/// State `T` is the set of vertices still present. From `T` we may remove any
/// `v` in `T` with an even number of neighbours in `T \ {v}`; states with at
/// most two vertices accept. Each reached state stores the vertex whose removal
/// first reached it, which doubles as the visited mark.
pub fn exact_even_degenerate_with_limit(g: &Graph, limit: usize) -> Result<Option<EliminationOrder>> {
    let n = g.n();
    if n > limit.min(30) {
        return capacity(format!("exact decider limited to {} vertices, graph has {n}", limit.min(30)));
    }
    if n <= 2 {
        return Ok(Some((0..n).collect()));
    }
    let adj = g.small_masks();
    let full: u32 = (1u32 << n) - 1;
    let mut pred = vec![UNREACHED; 1usize << n];
    pred[full as usize] = ROOT;
    let mut stack = vec![full];
    let mut accept = None;
    'search: while let Some(t) = stack.pop() {
        let mut rest = t;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let next = t & !(1 << v);
            if (adj[v] & next).count_ones() % 2 == 1 || pred[next as usize] != UNREACHED {
                continue;
            }
            pred[next as usize] = v as u8;
            if next.count_ones() <= 2 {
                accept = Some(next);
                break 'search;
            }
            stack.push(next);
        }
    }
    let Some(end) = accept else { return Ok(None) };
    let mut order = Vec::with_capacity(n);
    let mut t = end;
    while t != full {
        let v = pred[t as usize];
        order.push(v as usize);
        t |= 1 << v;
    }
    order.reverse();
    order.extend((0..n).filter(|v| end >> v & 1 == 1));
    Ok(Some(order))
}
