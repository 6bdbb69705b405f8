mod common;

use std::collections::BTreeMap;

use common::graph_from_mask;
use evendeg::sampling::{sample_gnp, sample_partially_revealed};
use evendeg::{verify_revelation, RandomSource, Revelation};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const N: usize = 4;
const PAIRS: usize = N * (N - 1) / 2;

fn mask_of(g: &evendeg::Graph) -> u64 {
    let pairs = (0..N).flat_map(|u| (u + 1..N).map(move |v| (u, v)));
    pairs.enumerate().filter(|&(_, (u, v))| g.has_edge(u, v)).fold(0, |m, (i, _)| m | 1 << i)
}

/// Law of `G(4, p)` conditioned on `rev`, by enumerating all 64 graphs.
fn conditional_law(rev: &Revelation, p: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..1u64 << PAIRS)
        .map(|m| {
            if !verify_revelation(&graph_from_mask(N, m), rev) {
                return 0.0;
            }
            let e = m.count_ones() as i32;
            p.powi(e) * (1.0 - p).powi(PAIRS as i32 - e)
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Pearson statistic over the support of `law`; also returns the degrees of freedom.
fn chi_square(counts: &[u64], law: &[f64], samples: u64) -> (f64, f64) {
    let mut stat = 0.0;
    let mut cells = 0;
    for (c, &q) in counts.iter().zip(law) {
        if q > 0.0 {
            let e = q * samples as f64;
            stat += (*c as f64 - e).powi(2) / e;
            cells += 1;
        } else {
            assert_eq!(*c, 0, "sample outside the conditional support");
        }
    }
    (stat, (cells - 1) as f64)
}

fn fixtures() -> Vec<Revelation> {
    let rev = |a: Vec<usize>, h: Vec<(usize, usize)>, par: &[(usize, u8)], edge_parity: u8| Revelation {
        a,
        h,
        deg_parity: par.iter().copied().collect::<BTreeMap<_, _>>(),
        edge_parity,
        alpha: 0.1,
    };
    vec![
        rev(vec![], vec![], &[], 1),
        rev(vec![0], vec![], &[(0, 1)], 0),
        rev(vec![2, 0], vec![(0, 2)], &[(0, 0), (2, 1)], 1),
    ]
}

#[test]
fn conditional_sampler_matches_enumeration() {
    let samples = 200_000u64;
    for (i, rev) in fixtures().iter().enumerate() {
        for p in [0.3, 0.5] {
            let law = conditional_law(rev, p);
            let mut counts = vec![0u64; 1 << PAIRS];
            let mut rng = RandomSource::new(41, i as u64);
            for _ in 0..samples {
                let g = sample_partially_revealed(N, p, rev, &mut rng).unwrap();
                assert!(verify_revelation(&g, rev));
                counts[mask_of(&g) as usize] += 1;
            }
            let (stat, df) = chi_square(&counts, &law, samples);
            let pval = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
            assert!(pval > 1e-3, "fixture {i}, p = {p}: chi2 = {stat:.1} on {df} df, p-value {pval:.2e}");
        }
    }
}

#[test]
fn gnp_edge_count_is_binomial() {
    let (n, p, samples) = (12usize, 0.3, 20_000u64);
    let m = n * (n - 1) / 2;
    let mut counts = vec![0u64; m + 1];
    let mut rng = RandomSource::new(5, 0);
    for _ in 0..samples {
        counts[sample_gnp(n, p, &mut rng).unwrap().edge_count()] += 1;
    }
    let binom = statrs::distribution::Binomial::new(p, m as u64).unwrap();
    use statrs::distribution::Discrete;
    // Pool the thin tails so each expected count is at least 5.
    let law: Vec<f64> = (0..=m as u64).map(|k| binom.pmf(k)).collect();
    let (mut stat, mut cells, mut acc_c, mut acc_e) = (0.0, 0, 0.0, 0.0);
    for (c, q) in counts.iter().zip(&law) {
        acc_c += *c as f64;
        acc_e += q * samples as f64;
        if acc_e >= 5.0 {
            stat += (acc_c - acc_e).powi(2) / acc_e;
            cells += 1;
            (acc_c, acc_e) = (0.0, 0.0);
        }
    }
    let pval = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
    assert!(pval > 1e-3, "chi2 = {stat:.1}, p-value {pval:.2e}");
}
