use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{capacity, input, Result};
use crate::sampling::check_probability;

use super::family::IndexSetFamily;

/// Largest ground set the exhaustive enumeration accepts.
pub const MAX_ENUMERATION_BITS: usize = 24;
/// Largest number of parities whose joint law is tabulated.
pub const MAX_ARITY: usize = 22;

const SUM_TOLERANCE: f64 = 1e-12;

/// Law of `(Y_1, ..., Y_r)` on `{0,1}^r`. `mass[y]` is the probability of the
/// outcome whose bit `j` is `Y_{j+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityDistribution {
    r: usize,
    mass: Vec<f64>,
}

impl ParityDistribution {
    pub fn new(r: usize, mass: Vec<f64>) -> Result<Self> {
        if r > MAX_ARITY || mass.len() != 1 << r {
            return input(format!("a law on {{0,1}}^{r} needs {} masses (r <= {MAX_ARITY})", 1usize << r.min(63)));
        }
        if mass.iter().any(|&m| !(0.0..=1.0 + SUM_TOLERANCE).contains(&m)) {
            return input("masses must lie in [0, 1]");
        }
        let total = neumaier(mass.iter().copied());
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return input(format!("masses sum to {total}, not 1"));
        }
        Ok(Self { r, mass })
    }

    pub fn uniform(r: usize) -> Self {
        let m = 1.0 / (1u64 << r) as f64;
        Self { r, mass: vec![m; 1 << r] }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn prob(&self, outcome: u64) -> f64 {
        self.mass[outcome as usize]
    }

    /// Law of `(Y_1, ..., Y_k)`, the first `k` coordinates.
    pub fn marginal_prefix(&self, k: usize) -> ParityDistribution {
        let mut mass = vec![0.0; 1 << k];
        let mask = (1usize << k) - 1;
        for (y, &m) in self.mass.iter().enumerate() {
            mass[y & mask] += m;
        }
        Self { r: k, mass }
    }
}

/// Compensated (Neumaier) sum.
pub(crate) fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Accumulator::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[derive(Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// `w[k] = p^k (1-p)^(t-k)`, computed in log space.
fn popcount_weights(t: usize, p: f64) -> Vec<f64> {
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (0..=t)
        .map(|k| {
            let a = if k == 0 { 0.0 } else { k as f64 * lp };
            let b = if k == t { 0.0 } else { (t - k) as f64 * lq };
            (a + b).exp()
        })
        .collect()
}

/// Exact law of `xor of cols[i] over the i with X_i = 1` for iid Bernoulli(p)
/// bits `X_0..X_{t-1}`, as a table over `0..2^width`.
///
/// The `2^t` assignments are split into shards by their top bits and each shard
/// is walked in Gray-code order, so every step flips one bit and updates the
/// outcome with one xor. Shards are reduced in index order, so the result does
/// not depend on the thread count.
pub(crate) fn enumerate_columns(cols: &[u64], width: usize, p: f64) -> Vec<f64> {
    let t = cols.len();
    let weights = popcount_weights(t, p);
    let cells = 1usize << width;
    let high = if width <= 16 { t.min(4) } else { 0 };
    let low = t - high;
    let shards: Vec<Vec<Accumulator>> = (0..1u64 << high)
        .into_par_iter()
        .map(|h| {
            let mut acc = vec![Accumulator::default(); cells];
            let mut y = (0..high).filter(|&b| h >> b & 1 == 1).fold(0, |y, b| y ^ cols[low + b]);
            let mut pop = h.count_ones() as usize;
            let mut x = 0u64;
            acc[y as usize].add(weights[pop]);
            for step in 1..1u64 << low {
                let bit = step.trailing_zeros() as usize;
                x ^= 1 << bit;
                y ^= cols[bit];
                if x >> bit & 1 == 1 {
                    pop += 1;
                } else {
                    pop -= 1;
                }
                acc[y as usize].add(weights[pop]);
            }
            acc
        })
        .collect();
    (0..cells)
        .map(|c| {
            let mut total = Accumulator::default();
            for shard in &shards {
                total.add(shard[c].sum);
                total.add(shard[c].comp);
            }
            total.value()
        })
        .collect()
}

/// Exact law of the parities `Y_j = sum over A_j of X_i (mod 2)` for iid
/// Bernoulli(p) bits, by enumerating all `2^t` assignments.
pub fn exact_parity_distribution(fam: &IndexSetFamily, p: f64) -> Result<ParityDistribution> {
    check_probability(p)?;
    if fam.t() > MAX_ENUMERATION_BITS {
        return capacity(format!("enumeration over 2^{} assignments exceeds 2^{MAX_ENUMERATION_BITS}", fam.t()));
    }
    if fam.r() > MAX_ARITY {
        return capacity(format!("{} parities exceed the table limit {MAX_ARITY}", fam.r()));
    }
    let mass = enumerate_columns(&fam.columns(), fam.r(), p);
    Ok(ParityDistribution { r: fam.r(), mass })
}

/// Outcome counts from sampling the parities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParitySample {
    pub r: usize,
    pub samples: u64,
    pub counts: Vec<u64>,
}

impl ParitySample {
    pub fn from_outcomes(r: usize, outcomes: impl IntoIterator<Item = u64>) -> Result<Self> {
        if r > MAX_ARITY {
            return capacity(format!("{r} parities exceed the table limit {MAX_ARITY}"));
        }
        let mut counts = vec![0u64; 1 << r];
        let mut samples = 0;
        for y in outcomes {
            counts[y as usize] += 1;
            samples += 1;
        }
        if samples == 0 {
            return input("no samples");
        }
        Ok(Self { r, samples, counts })
    }

    pub fn empirical(&self) -> ParityDistribution {
        let n = self.samples as f64;
        ParityDistribution { r: self.r, mass: self.counts.iter().map(|&c| c as f64 / n).collect() }
    }
}

/// Draws `samples` assignments of the bits and tallies the parity outcomes.
pub fn sample_parity_distribution<R: Rng + ?Sized>(
    fam: &IndexSetFamily,
    p: f64,
    samples: u64,
    rng: &mut R,
) -> Result<ParitySample> {
    check_probability(p)?;
    let cols = fam.columns();
    let outcomes = (0..samples).map(|_| cols.iter().fold(0u64, |y, &c| if rng.gen::<f64>() < p { y ^ c } else { y }));
    ParitySample::from_outcomes(fam.r(), outcomes.collect::<Vec<_>>())
}
