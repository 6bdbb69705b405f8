use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{input, Error, Result};
use crate::sampling::check_probability;

use super::distribution::{exact_parity_distribution, ParityDistribution, ParitySample};
use super::f2::BitMatrix;
use super::family::IndexSetFamily;

/// Slack for floating-point noise when comparing an exact epsilon to a bound.
pub const EXACT_SLACK: f64 = 1e-12;

/// Overall significance level of sampled reports.
pub const SAMPLED_LEVEL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Method {
    Exact,
    /// Estimated from samples. Intervals are simultaneous Clopper-Pearson
    /// intervals at `level`, split evenly over the cells.
    MonteCarlo {
        samples: u64,
        level: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixParity {
    /// The parity class `s` holding the whole support.
    pub parity: u8,
    pub epsilon: f64,
    /// Sampled mode: range of epsilon consistent with the counts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    /// Least epsilon for which the law is epsilon-uniform (1 if none below 1).
    pub epsilon: f64,
    /// Present when the support lies in one parity class.
    #[serde(rename = "fixParity")]
    pub fix_parity: Option<FixParity>,
    pub method: Method,
    /// Sampled mode: range of epsilon consistent with the counts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
    /// Sampled mode: cells with no samples. They are left out of the point
    /// estimates, since an empty cell may be a true zero or just unsampled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empty_cells: Option<usize>,
}

impl UniformityReport {
    /// Sampled mode: whether `eps` is consistent with the counts at the
    /// report's level. Exact mode: whether `eps` equals the exact value.
    pub fn consistent_with(&self, eps: f64) -> bool {
        match self.interval {
            Some((lo, hi)) => lo - EXACT_SLACK <= eps && eps <= hi + EXACT_SLACK,
            None => (self.epsilon - eps).abs() <= EXACT_SLACK,
        }
    }
}

/// How far a probability ratio is from 1 in the multiplicative sense: the
/// least `eps` with `1 - eps <= ratio <= 1 / (1 - eps)`.
pub fn ratio_deviation(ratio: f64) -> f64 {
    if ratio <= 0.0 || !ratio.is_finite() {
        1.0
    } else if ratio <= 1.0 {
        1.0 - ratio
    } else {
        1.0 - 1.0 / ratio
    }
}

fn epsilon_of(masses: impl Iterator<Item = f64>, scale: f64) -> f64 {
    masses.map(|m| ratio_deviation(m * scale)).fold(0.0, f64::max).clamp(0.0, 1.0)
}

fn parity_of(y: usize) -> u8 {
    (y.count_ones() & 1) as u8
}

/// Occupied parity classes: `Some(s)` when all mass sits on outcomes of parity `s`.
fn single_class(occupied: impl Iterator<Item = (usize, bool)>) -> Option<u8> {
    let mut seen = [false; 2];
    for (y, occ) in occupied {
        if occ {
            seen[parity_of(y) as usize] = true;
        }
    }
    match seen {
        [true, false] => Some(0),
        [false, true] => Some(1),
        _ => None,
    }
}

/// Exact epsilon-uniformity of a law: `max(1 - min_s 2^r P(s), 1 - 1/(max_s 2^r P(s)))`.
pub fn epsilon_uniform_estimate(d: &ParityDistribution) -> UniformityReport {
    let scale = (1u64 << d.r()) as f64;
    UniformityReport {
        epsilon: epsilon_of(d.mass().iter().copied(), scale),
        fix_parity: None,
        method: Method::Exact,
        interval: None,
        empty_cells: None,
    }
}

/// Like [`epsilon_uniform_estimate`], and also checks whether the support lies
/// in one parity class `s`; if so, reports the least epsilon for which the law
/// is epsilon-close to the uniform law on that class (mass `2^-(r-1)` each).
pub fn fix_parity_check(d: &ParityDistribution) -> UniformityReport {
    let mut report = epsilon_uniform_estimate(d);
    if d.r() == 0 {
        return report;
    }
    let class = single_class(d.mass().iter().enumerate().map(|(y, &m)| (y, m > 0.0)));
    report.fix_parity = class.map(|s| {
        let scale = (1u64 << (d.r() - 1)) as f64;
        let in_class = d.mass().iter().enumerate().filter(|(y, _)| parity_of(*y) == s).map(|(_, &m)| m);
        FixParity { parity: s, epsilon: epsilon_of(in_class, scale), interval: None }
    });
    report
}

/// Clopper-Pearson interval for a binomial proportion at two-sided level `alpha`.
pub fn clopper_pearson(count: u64, n: u64, alpha: f64) -> (f64, f64) {
    let (c, n) = (count as f64, n as f64);
    let lo =
        if count == 0 { 0.0 } else { Beta::new(c, n - c + 1.0).map(|b| b.inverse_cdf(alpha / 2.0)).unwrap_or(0.0) };
    let hi = if count as f64 >= n {
        1.0
    } else {
        Beta::new(c + 1.0, n - c).map(|b| b.inverse_cdf(1.0 - alpha / 2.0)).unwrap_or(1.0)
    };
    (lo, hi)
}

/// Range of epsilon over all laws whose cells lie in the given intervals.
fn epsilon_interval(bounds: &[(f64, f64)], scale: f64) -> (f64, f64) {
    let hi =
        bounds.iter().map(|&(l, u)| ratio_deviation(l * scale).max(ratio_deviation(u * scale))).fold(0.0, f64::max);
    // A cell forces deviation only if its whole interval avoids 1/scale.
    let lo = bounds
        .iter()
        .map(|&(l, u)| {
            if u * scale < 1.0 {
                ratio_deviation(u * scale)
            } else if l * scale > 1.0 {
                ratio_deviation(l * scale)
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    (lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0))
}

/// Sampled counterpart of [`fix_parity_check`]. Point estimates use the
/// nonempty cells only; empty cells are counted in `empty_cells` and widen the
/// intervals. A sample on both parity classes means no fix-parity entry.
pub fn sampled_uniformity(sample: &ParitySample) -> UniformityReport {
    let r = sample.r;
    let cells = sample.counts.len();
    let alpha = SAMPLED_LEVEL / cells as f64;
    let n = sample.samples as f64;
    let bounds: Vec<(f64, f64)> = sample.counts.iter().map(|&c| clopper_pearson(c, sample.samples, alpha)).collect();
    let scale = (1u64 << r) as f64;
    let nonempty = || sample.counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / n);
    let mut report = UniformityReport {
        epsilon: epsilon_of(nonempty(), scale),
        fix_parity: None,
        method: Method::MonteCarlo { samples: sample.samples, level: SAMPLED_LEVEL },
        interval: Some(epsilon_interval(&bounds, scale)),
        empty_cells: Some(sample.counts.iter().filter(|&&c| c == 0).count()),
    };
    if r == 0 {
        return report;
    }
    if let Some(s) = single_class(sample.counts.iter().enumerate().map(|(y, &c)| (y, c > 0))) {
        let half = (1u64 << (r - 1)) as f64;
        let class: Vec<usize> = (0..cells).filter(|&y| parity_of(y) == s).collect();
        let in_class = class.iter().filter(|&&y| sample.counts[y] > 0).map(|&y| sample.counts[y] as f64 / n);
        let class_bounds: Vec<(f64, f64)> = class.iter().map(|&y| bounds[y]).collect();
        report.fix_parity = Some(FixParity {
            parity: s,
            epsilon: epsilon_of(in_class, half),
            interval: Some(epsilon_interval(&class_bounds, half)),
        });
    }
    report
}

/// Exact law of the parity of `eta` iid Bernoulli(p) bits, with the decay
/// bound `|1 - 2p|^eta <= e^{-2 eta p*}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleParityBias {
    /// `P[Y = 0] = (1 + (1 - 2p)^eta) / 2`.
    pub zero: f64,
    pub one: f64,
    /// `|1 - 2p|^eta`, which is also the exact epsilon-uniformity of `Y`.
    pub deviation: f64,
    /// `e^{-2 eta p*}` with `p* = min(p, 1 - p)`.
    pub bound: f64,
}

impl SingleParityBias {
    pub fn holds(&self) -> bool {
        self.deviation <= self.bound + EXACT_SLACK
    }
}

pub fn single_parity_bias(p: f64, eta: usize) -> Result<SingleParityBias> {
    if !(0.0..=1.0).contains(&p) {
        return input(format!("probability must lie in [0, 1], got {p}"));
    }
    if eta == 0 {
        return input("eta must be at least 1");
    }
    let bias = (1.0 - 2.0 * p).powi(eta as i32);
    let p_star = p.min(1.0 - p);
    Ok(SingleParityBias {
        zero: (1.0 + bias) / 2.0,
        one: (1.0 - bias) / 2.0,
        deviation: bias.abs(),
        bound: (-2.0 * eta as f64 * p_star).exp(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayeredCheck {
    pub r: usize,
    /// `min(layering number, |A_r|)`: the last set must carry `eta` bits too.
    pub eta: usize,
    /// `r e^{-2 eta p*}`.
    pub bound: f64,
    /// Exact epsilon of the (possibly transformed) family's parity law.
    pub epsilon: f64,
    pub transformed: bool,
    /// With a transform: whether `P'[T y] = P[y]` for every outcome `y`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_identity: Option<bool>,
    pub holds: bool,
}

/// Checks that the parities of an eta-layered family are `r e^{-2 eta p*}`-uniform.
///
/// With `transform = Some(T)` the checked family is `T` applied to `fam`
/// (which must itself be layered), exercising the invertible-change route. The
/// exact law comes from full enumeration. Fails with `Inapplicable` when the
/// bound is 1 or more, since the claim is then vacuous.
pub fn check_layered_uniformity(fam: &IndexSetFamily, p: f64, transform: Option<&BitMatrix>) -> Result<LayeredCheck> {
    check_probability(p)?;
    let r = fam.r();
    let last = fam.sets().last().map_or(0, Vec::len);
    let eta = fam.layering_number().min(last);
    let p_star = p.min(1.0 - p);
    let bound = r as f64 * (-2.0 * eta as f64 * p_star).exp();
    if bound >= 1.0 {
        return Err(Error::Inapplicable(format!("r e^(-2 eta p*) = {bound:.4} with eta = {eta}, r = {r}")));
    }
    let base = exact_parity_distribution(fam, p)?;
    let (law, event_identity) = match transform {
        None => (base, None),
        Some(t) => {
            let image = exact_parity_distribution(&fam.apply_f2_transform(t)?, p)?;
            let same = (0..1u64 << r).all(|y| (image.prob(t.apply(y)) - base.prob(y)).abs() <= EXACT_SLACK);
            (image, Some(same))
        }
    };
    let epsilon = epsilon_uniform_estimate(&law).epsilon;
    Ok(LayeredCheck {
        r,
        eta,
        bound,
        epsilon,
        transformed: transform.is_some(),
        event_identity,
        holds: epsilon <= bound + EXACT_SLACK && event_identity != Some(false),
    })
}
