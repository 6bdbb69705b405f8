#![allow(dead_code)]

use std::collections::BTreeMap;

use evendeg::{Graph, RandomSource, Revelation};
use rand::seq::SliceRandom;
use rand::Rng;

/// Graph on `n` vertices from a bit mask over the pairs `(u, v)`, `u < v`, in
/// lexicographic order.
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges(n, pairs.enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e)).unwrap()
}

/// Revelation with `|A| = k` random vertices of `0..n`, a random `H` on `A`
/// and random parity targets.
pub fn random_revelation(n: usize, k: usize, rng: &mut RandomSource) -> Revelation {
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(rng);
    let a: Vec<usize> = vs[..k].to_vec();
    let mut h = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.gen_bool(0.5) {
                h.push((a[i].min(a[j]), a[i].max(a[j])));
            }
        }
    }
    let deg_parity: BTreeMap<usize, u8> = a.iter().map(|&v| (v, rng.gen_range(0..2))).collect();
    Revelation { a, h, deg_parity, edge_parity: rng.gen_range(0..2), alpha: 0.1 }
}
