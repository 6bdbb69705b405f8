use serde::{Deserialize, Serialize};

use crate::error::{capacity, input, Result};
use crate::sampling::check_probability;

use super::distribution::{enumerate_columns, exact_parity_distribution};
use super::family::IndexSetFamily;
use super::uniformity::{fix_parity_check, ratio_deviation, FixParity, EXACT_SLACK};

/// Largest ground set for the conditioning check.
pub const MAX_AFFECTED_BITS: usize = 20;
/// Largest `k + r`, the width of the joint table of `(X, Y)`.
pub const MAX_JOINT_WIDTH: usize = 22;

/// Bits `X_0..X_{t-1}` iid Bernoulli(p), split into `X = (X_0..X_{k-1})` and
/// `X' = (X_k..X_{t-1})`. `Y_j` is the parity over `A_j`, `Z_j` the parity over
/// `A_j ∩ {k..t-1}` and `W` the parity of `Y_1 + ... + Y_r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffectednessSetup {
    pub family: IndexSetFamily,
    pub k: usize,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum Verdict {
    Holds { deviation: f64, bound: f64 },
    Violated { deviation: f64, bound: f64 },
    Inapplicable { reason: String },
}

impl Verdict {
    fn judge(deviation: f64, bound: f64) -> Self {
        if deviation <= bound + EXACT_SLACK {
            Verdict::Holds { deviation, bound }
        } else {
            Verdict::Violated { deviation, bound }
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated { .. })
    }

    pub fn is_applicable(&self) -> bool {
        !matches!(self, Verdict::Inapplicable { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffectednessReport {
    /// Exact epsilon-uniformity of `Z`.
    pub eps_z: f64,
    /// Present when `Z` is supported on one parity class.
    pub fix_parity_z: Option<FixParity>,
    /// Exact epsilon-uniformity of `Y`.
    pub eps_y: f64,
    /// `Y` is `eps_z`-uniform whenever `Z` is.
    pub uniform_y: Verdict,
    /// `(X | Y = y)` is `2 eps_z`-close to `X` for every `y`, when `eps_z < 1/2`.
    pub affected: Verdict,
    /// `(X | Y = y)` is `2 eps`-close to `(X | W = w(y))` when `Z` is fix-parity
    /// `eps`-uniform with `eps < 1/2`.
    pub fix_parity: Verdict,
}

impl AffectednessReport {
    pub fn violated(&self) -> bool {
        self.uniform_y.is_violated() || self.affected.is_violated() || self.fix_parity.is_violated()
    }

    /// Whether either conditioning claim had its hypothesis met.
    pub fn applicable(&self) -> bool {
        self.affected.is_applicable() || self.fix_parity.is_applicable()
    }
}

/// Checks the two conditioning claims on one setup by exhaustive enumeration.
///
/// The joint law of `(X, Y)` is tabulated exactly; `(X | Y = y)` is compared
/// with `X` and with `(X | W = w)` by pointwise probability ratios for every
/// `y` in the support of `Y`. Claims whose hypothesis on `Z` fails are
/// reported as inapplicable rather than checked.
#[allow(clippy::needless_range_loop)]
pub fn check_conditional_affectedness(setup: &AffectednessSetup) -> Result<AffectednessReport> {
    let AffectednessSetup { family, k, p } = setup;
    let (t, k, p, r) = (family.t(), *k, *p, family.r());
    check_probability(p)?;
    if t > MAX_AFFECTED_BITS {
        return capacity(format!("{t} bits exceed the limit {MAX_AFFECTED_BITS}"));
    }
    if k == 0 || k >= t {
        return input(format!("split point k = {k} must satisfy 1 <= k < t = {t}"));
    }
    if k + r > MAX_JOINT_WIDTH {
        return capacity(format!("joint table of width k + r = {} exceeds {MAX_JOINT_WIDTH}", k + r));
    }

    let z_law = exact_parity_distribution(&family.restrict(|i| i >= k), p)?;
    let z_report = fix_parity_check(&z_law);
    let eps_z = z_report.epsilon;

    // Key = x | y << k: low bits are X, high bits are Y.
    let cols: Vec<u64> = family
        .columns()
        .into_iter()
        .enumerate()
        .map(|(i, c)| if i < k { (1 << i) | (c << k) } else { c << k })
        .collect();
    let joint = enumerate_columns(&cols, k + r, p);
    let xs = 1usize << k;
    let ys = 1usize << r;
    let at = |x: usize, y: usize| joint[x | y << k];

    let p_x: Vec<f64> = (0..xs)
        .map(|x| {
            let ones = x.count_ones() as i32;
            p.powi(ones) * (1.0 - p).powi(k as i32 - ones)
        })
        .collect();
    let p_y: Vec<f64> = (0..ys).map(|y| (0..xs).map(|x| at(x, y)).sum()).collect();
    let w_of = |y: usize| y.count_ones() as usize & 1;
    let mut p_xw = vec![[0.0f64; 2]; xs];
    let mut p_w = [0.0f64; 2];
    for y in 0..ys {
        p_w[w_of(y)] += p_y[y];
        for (x, row) in p_xw.iter_mut().enumerate() {
            row[w_of(y)] += at(x, y);
        }
    }

    let y_law: Vec<f64> = p_y.iter().map(|m| m * ys as f64).collect();
    let eps_y = y_law.iter().map(|&m| ratio_deviation(m)).fold(0.0, f64::max);
    let uniform_y = if eps_z < 1.0 {
        Verdict::judge(eps_y, eps_z)
    } else {
        Verdict::Inapplicable { reason: "Z is not epsilon-uniform for any epsilon < 1".into() }
    };

    let affected = if eps_z < 0.5 {
        let mut dev = 0.0f64;
        for y in (0..ys).filter(|&y| p_y[y] > 0.0) {
            for x in 0..xs {
                dev = dev.max(ratio_deviation(at(x, y) / (p_y[y] * p_x[x])));
            }
        }
        Verdict::judge(dev, 2.0 * eps_z)
    } else {
        Verdict::Inapplicable { reason: format!("eps_Z = {eps_z:.4} is not below 1/2") }
    };

    let fix_parity = match z_report.fix_parity {
        Some(fp) if fp.epsilon < 0.5 => {
            let mut dev = 0.0f64;
            for y in (0..ys).filter(|&y| p_y[y] > 0.0) {
                let w = w_of(y);
                for x in 0..xs {
                    let given_y = at(x, y) / p_y[y];
                    let given_w = p_xw[x][w] / p_w[w];
                    if given_y == 0.0 && given_w == 0.0 {
                        continue;
                    }
                    dev = dev.max(ratio_deviation(given_y / given_w));
                }
            }
            Verdict::judge(dev, 2.0 * fp.epsilon)
        }
        Some(fp) => {
            Verdict::Inapplicable { reason: format!("Z is fix-parity {:.4}-uniform, not below 1/2", fp.epsilon) }
        }
        None => Verdict::Inapplicable { reason: "Z occupies both parity classes".into() },
    };

    Ok(AffectednessReport { eps_z, fix_parity_z: z_report.fix_parity, eps_y, uniform_y, affected, fix_parity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;
    use rand::Rng;

    fn setup(t: usize, sets: &[&[usize]], k: usize, p: f64) -> AffectednessSetup {
        AffectednessSetup { family: IndexSetFamily::new(t, sets.iter().map(|s| s.to_vec()).collect()).unwrap(), k, p }
    }

    #[test]
    fn fair_bits_leave_x_unaffected() {
        let s = setup(6, &[&[0, 3, 4], &[1, 5]], 2, 0.5);
        let rep = check_conditional_affectedness(&s).unwrap();
        assert!(rep.eps_z < 1e-12);
        match rep.affected {
            Verdict::Holds { deviation, .. } => assert!(deviation < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn biased_single_private_bits_are_inapplicable() {
        // Z_j is a single Bernoulli(0.3) bit each, so Z is far from uniform:
        // the smallest cell has mass 0.027 against 1/8.
        let s = setup(6, &[&[0, 3], &[1, 4], &[2, 5]], 3, 0.3);
        let rep = check_conditional_affectedness(&s).unwrap();
        assert!((rep.eps_z - (1.0 - 8.0 * 0.027)).abs() < 1e-12);
        assert!(!rep.affected.is_applicable());
        assert!(!rep.violated());
    }

    #[test]
    fn wider_private_blocks_hold() {
        let s = setup(14, &[&[0, 2, 3, 4, 5, 6, 7, 8], &[1, 9, 10, 11, 12, 13]], 2, 0.35);
        let rep = check_conditional_affectedness(&s).unwrap();
        assert!(rep.eps_z < 0.5);
        assert!(matches!(rep.affected, Verdict::Holds { .. }));
        assert!(matches!(rep.uniform_y, Verdict::Holds { .. }));
    }

    #[test]
    fn fix_parity_route() {
        // Degree parities of a bipartite 2x2 graph. X is the edge a0b0; every
        // parity set keeps at least one edge of X', and the restricted parities
        // always have an even sum.
        let e = |a: usize, b: usize| a * 2 + b;
        let sets: Vec<Vec<usize>> =
            vec![vec![e(0, 0), e(0, 1)], vec![e(1, 0), e(1, 1)], vec![e(0, 0), e(1, 0)], vec![e(0, 1), e(1, 1)]];
        let s = AffectednessSetup { family: IndexSetFamily::new(4, sets).unwrap(), k: 1, p: 0.45 };
        let rep = check_conditional_affectedness(&s).unwrap();
        let fp = rep.fix_parity_z.unwrap();
        assert_eq!(fp.parity, 0);
        assert!(fp.epsilon < 0.5);
        assert!(matches!(rep.fix_parity, Verdict::Holds { .. }), "{rep:?}");
    }

    #[test]
    fn random_eligible_setups_hold() {
        let mut rng = RandomSource::new(12, 0);
        let mut eligible = 0;
        for _ in 0..300 {
            let t = rng.gen_range(6..=14);
            let k = rng.gen_range(1..=3);
            let r = rng.gen_range(1..=3);
            let sets: Vec<Vec<usize>> = (0..r).map(|_| (0..t).filter(|_| rng.gen_bool(0.5)).collect()).collect();
            let p = [0.3, 0.45, 0.5, 0.6][rng.gen_range(0..4)];
            let s = AffectednessSetup { family: IndexSetFamily::new(t, sets).unwrap(), k, p };
            let rep = check_conditional_affectedness(&s).unwrap();
            assert!(!rep.violated(), "{s:?} {rep:?}");
            eligible += usize::from(rep.applicable());
        }
        assert!(eligible > 50);
    }

    #[test]
    fn bad_split_rejected() {
        assert!(check_conditional_affectedness(&setup(3, &[&[0]], 0, 0.5)).is_err());
        assert!(check_conditional_affectedness(&setup(3, &[&[0]], 3, 0.5)).is_err());
    }
}
