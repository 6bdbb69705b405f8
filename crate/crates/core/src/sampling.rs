//! Samplers for `G(n, p)` and for `G(n, p)` conditioned on parity information.
//!
//! The conditional samplers are exact and never reject. A group of `k` iid
//! Bernoulli(p) bits has even sum with probability `(1 + (1 - 2p)^k) / 2`, so
//! the bits can be drawn left to right with the conditional probability of each
//! bit given the parity still owed by the rest.

use rand::Rng;

use crate::bitset::VertexSet;
use crate::error::{input, Error, Result};
use crate::graph::Graph;
use crate::revelation::Revelation;
use crate::rng::RandomSource;

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        input(format!("edge probability must lie in (0, 1), got {p}"))
    }
}

/// Probability that `k` iid Bernoulli(p) bits sum to `parity` mod 2.
pub fn parity_probability(k: usize, p: f64, parity: u8) -> f64 {
    let bias = (1.0 - 2.0 * p).powf(k as f64);
    if parity == 0 {
        (1.0 + bias) / 2.0
    } else {
        (1.0 - bias) / 2.0
    }
}

/// `P[X_1 = 1 | X_1 + ... + X_k = parity]` for iid Bernoulli(p) bits.
pub fn leading_bit_probability(k: usize, p: f64, parity: u8) -> f64 {
    debug_assert!(k >= 1);
    p * parity_probability(k - 1, p, parity ^ 1) / parity_probability(k, p, parity)
}

/// Draws `count` bits conditioned on their sum having parity `target` and hands
/// them to `sink` in order.
fn draw_constrained<F: FnMut(usize, bool)>(
    count: usize,
    p: f64,
    target: u8,
    rng: &mut RandomSource,
    mut sink: F,
) -> Result<()> {
    if count == 0 {
        return if target == 0 {
            Ok(())
        } else {
            Err(Error::Infeasible("an empty group of bits cannot have odd parity".into()))
        };
    }
    let mut owed = target & 1;
    for i in 0..count {
        let remaining = count - i;
        let bit =
            if remaining == 1 { owed == 1 } else { rng.gen::<f64>() < leading_bit_probability(remaining, p, owed) };
        owed ^= bit as u8;
        sink(i, bit);
    }
    debug_assert_eq!(owed, 0);
    Ok(())
}

/// Samples `G(n, p)`: every pair, in lexicographic order, is an edge with
/// probability `p`.
pub fn sample_gnp(n: usize, p: f64, rng: &mut RandomSource) -> Result<Graph> {
    check_probability(p)?;
    if n == 0 {
        return input("a graph needs at least one vertex");
    }
    let mut rows: Vec<VertexSet> = (0..n).map(|_| VertexSet::empty(n)).collect();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                rows[u].insert(v);
                rows[v].insert(u);
            }
        }
    }
    Ok(Graph::from_rows(rows))
}

/// `t` iid Bernoulli(p) bits conditioned on `sum mod 2 == target`.
pub fn sample_parity_constrained_bits(t: usize, p: f64, target: u8, rng: &mut RandomSource) -> Result<Vec<bool>> {
    check_probability(p)?;
    let mut out = vec![false; t];
    draw_constrained(t, p, target, rng, |i, b| out[i] = b)?;
    Ok(out)
}

/// Exact sample of `G(n, p)` conditioned on `rev`.
///
/// The pairs split into three independent groups: pairs inside `A` (fixed to
/// `H`), the stars `S(a, V \ A)` (one parity constraint each, fixed by the
/// degree targets), and pairs inside `V \ A` (one parity constraint, fixed by
/// the edge-count target). Stars are drawn for `a` in ascending order, each
/// star and then the inner pairs in ascending vertex order.
pub fn sample_partially_revealed(n: usize, p: f64, rev: &Revelation, rng: &mut RandomSource) -> Result<Graph> {
    check_probability(p)?;
    rev.validate(n)?;
    let mut rows: Vec<VertexSet> = (0..n).map(|_| VertexSet::empty(n)).collect();
    for &(u, v) in &rev.h {
        rows[u].insert(v);
        rows[v].insert(u);
    }
    let revealed = VertexSet::from_iter(n, rev.a.iter().copied());
    let outside: Vec<usize> = revealed.complement().to_vec();

    let mut stars_parity = 0u8;
    let mut centers = rev.a.clone();
    centers.sort_unstable();
    for &a in &centers {
        let target = (rev.deg_parity[&a] + rev.h_degree(a) as u8) & 1;
        stars_parity ^= target;
        draw_constrained(outside.len(), p, target, rng, |i, bit| {
            if bit {
                rows[a].insert(outside[i]);
                rows[outside[i]].insert(a);
            }
        })
        .map_err(|_| Error::Infeasible(format!("vertex {a} needs odd degree but V \\ A is empty")))?;
    }

    let residual = (rev.edge_parity + rev.h.len() as u8 % 2 + stars_parity) & 1;
    let m = outside.len();
    let inner = m * m.saturating_sub(1) / 2;
    let mut pairs = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j)));
    draw_constrained(inner, p, residual, rng, |_, bit| {
        let (i, j) = pairs.next().expect("pair count matches");
        if bit {
            rows[outside[i]].insert(outside[j]);
            rows[outside[j]].insert(outside[i]);
        }
    })
    .map_err(|_| Error::Infeasible("no pairs outside A are left to fix the edge-count parity".into()))?;
    Ok(Graph::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revelation::verify_revelation;

    /// Conditional law of the first bit by enumerating all `2^t` outcomes.
    fn enumerate_first_bit(t: usize, p: f64, parity: u8) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for x in 0u32..1 << t {
            if (x.count_ones() & 1) as u8 != parity {
                continue;
            }
            let k = x.count_ones() as i32;
            let w = p.powi(k) * (1.0 - p).powi(t as i32 - k);
            den += w;
            if x & 1 == 1 {
                num += w;
            }
        }
        num / den
    }

    #[test]
    fn leading_bit_matches_enumeration() {
        assert!((leading_bit_probability(3, 0.3, 0) - 0.126 / 0.532).abs() < 1e-12);
        assert!((leading_bit_probability(3, 0.5, 0) - 0.5).abs() < 1e-12);
        for t in 1..10 {
            for &p in &[0.1, 0.3, 0.5, 0.8] {
                for parity in 0..2 {
                    let exact = enumerate_first_bit(t, p, parity);
                    assert!((leading_bit_probability(t, p, parity) - exact).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn constrained_bits_hit_target() {
        let mut rng = RandomSource::new(3, 0);
        for t in 1..20 {
            for target in 0..2 {
                let bits = sample_parity_constrained_bits(t, 0.2, target, &mut rng).unwrap();
                assert_eq!(bits.iter().filter(|&&b| b).count() % 2, target as usize);
            }
        }
        assert!(matches!(sample_parity_constrained_bits(0, 0.5, 1, &mut rng), Err(Error::Infeasible(_))));
        assert!(sample_parity_constrained_bits(0, 0.5, 0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn gnp_basics() {
        let mut rng = RandomSource::new(1, 0);
        assert_eq!(sample_gnp(1, 0.5, &mut rng).unwrap().edge_count(), 0);
        assert!(sample_gnp(5, 1.0, &mut rng).is_err());
        let a = sample_gnp(50, 0.3, &mut RandomSource::new(9, 2)).unwrap();
        let b = sample_gnp(50, 0.3, &mut RandomSource::new(9, 2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn partially_revealed_satisfies_constraints() {
        let mut rng = RandomSource::new(11, 0);
        for trial in 0..200 {
            let src = sample_gnp(12, 0.4, &mut rng).unwrap();
            let a: Vec<usize> = (0..trial % 5)
                .map(|i| (i * 7 + trial) % 12)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let rev = Revelation::from_graph(&src, a, 0.1).unwrap();
            let g = sample_partially_revealed(12, 0.4, &rev, &mut rng).unwrap();
            assert!(verify_revelation(&g, &rev));
        }
    }

    #[test]
    fn infeasible_when_nothing_left() {
        let mut rev = Revelation::empty(1, 0.1);
        rev.a = vec![0, 1];
        rev.deg_parity = [(0, 0), (1, 0)].into_iter().collect();
        let mut rng = RandomSource::new(0, 0);
        assert!(matches!(sample_partially_revealed(3, 0.5, &rev, &mut rng), Err(Error::Infeasible(_))));
    }
}
