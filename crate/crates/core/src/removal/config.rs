use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::error::{capacity, input, Result};
use crate::revelation::Revelation;
use crate::rng::RandomSource;

/// Default multiplier in `s = round(s_factor * n^{1/2 + alpha})`.
///
/// With a multiplier of 1 the blocks hold about `n^{1/2 - alpha} / 2` vertices,
/// which at `n` in the low thousands is too few for an odd round to find an
/// eligible partner reliably. See the README for the calibration.
pub const DEFAULT_S_FACTOR: f64 = 0.15;

/// How `uw_removal` picks among several eligible partners.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CandidatePolicy {
    #[default]
    LowestIndex,
    Random {
        seed: u64,
    },
}

/// Input of one (U, W)-removal: the revealed part `A` (in the revelation's
/// order), the ordered list `U`, the reserve block `W_#` and the cyclically
/// probed blocks `W_1, ..., W_s` (stored at indices `0..s`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemovalConfig {
    pub revelation: Revelation,
    pub u: Vec<usize>,
    pub w_reserve: Vec<usize>,
    pub w_blocks: Vec<Vec<usize>>,
    #[serde(default)]
    pub candidate_policy: CandidatePolicy,
}

/// Where a vertex sits in a removal configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Revealed,
    Front,
    Reserve,
    /// Block `W_j`, `j` in `1..=s`.
    Block(usize),
}

impl RemovalConfig {
    /// Number of probed blocks `s`.
    pub fn s(&self) -> usize {
        self.w_blocks.len()
    }

    /// `a_1, ..., a_|A|, u_1, ..., u_|U|`.
    pub fn sequence(&self) -> impl Iterator<Item = usize> + '_ {
        self.revelation.a.iter().chain(&self.u).copied()
    }

    pub fn w_vertices(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.w_reserve.iter().chain(self.w_blocks.iter().flatten()).copied().collect();
        w.sort_unstable();
        w
    }

    pub fn vertex_count(&self) -> usize {
        self.revelation.a.len()
            + self.u.len()
            + self.w_reserve.len()
            + self.w_blocks.iter().map(Vec::len).sum::<usize>()
    }

    /// Role of every vertex `0..n`; fails unless the parts partition `0..n`.
    pub fn roles(&self, n: usize) -> Result<Vec<Role>> {
        let mut roles: Vec<Option<Role>> = vec![None; n];
        let mut assign = |v: usize, role: Role| -> Result<()> {
            match roles.get_mut(v) {
                None => input(format!("vertex {v} outside 0..{n}")),
                Some(Some(_)) => input(format!("vertex {v} assigned twice")),
                Some(slot) => {
                    *slot = Some(role);
                    Ok(())
                }
            }
        };
        for &v in &self.revelation.a {
            assign(v, Role::Revealed)?;
        }
        for &v in &self.u {
            assign(v, Role::Front)?;
        }
        for &v in &self.w_reserve {
            assign(v, Role::Reserve)?;
        }
        for (j, block) in self.w_blocks.iter().enumerate() {
            for &v in block {
                assign(v, Role::Block(j + 1))?;
            }
        }
        roles
            .into_iter()
            .enumerate()
            .map(|(v, r)| r.ok_or_else(|| crate::Error::Input(format!("vertex {v} is in no part"))))
            .collect()
    }

    /// Checks that `A, U, W` partition `0..n`, that `s >= 1` and that the blocks
    /// `W_#, W_1, ..., W_s` are balanced.
    pub fn validate(&self, n: usize) -> Result<()> {
        self.revelation.validate(n)?;
        self.roles(n)?;
        if self.w_blocks.is_empty() {
            return input("a removal needs at least one probed block");
        }
        let sizes = std::iter::once(self.w_reserve.len()).chain(self.w_blocks.iter().map(Vec::len));
        let (lo, hi) = sizes.fold((usize::MAX, 0), |(lo, hi), k| (lo.min(k), hi.max(k)));
        if hi - lo > 1 {
            return input(format!("W blocks are unbalanced (sizes range {lo}..={hi})"));
        }
        Ok(())
    }

    pub fn block_set(&self, j: usize, n: usize) -> VertexSet {
        VertexSet::from_iter(n, self.w_blocks[j - 1].iter().copied())
    }
}

/// `max(1, round(s_factor * n^{1/2 + alpha}))`.
pub fn block_count(n: usize, alpha: f64, s_factor: f64) -> usize {
    ((s_factor * (n as f64).powf(0.5 + alpha)).round() as usize).max(1)
}

/// Splits `items` into `k` consecutive chunks whose sizes differ by at most one,
/// larger chunks first.
pub fn balanced_chunks(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let base = items.len() / k;
    let extra = items.len() % k;
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let len = base + usize::from(i < extra);
        out.push(items[start..start + len].to_vec());
        start += len;
    }
    out
}

/// `V \ A` in a uniformly random order drawn from `rng`.
pub(crate) fn shuffled_rest(n: usize, rev: &Revelation, rng: &mut RandomSource) -> Vec<usize> {
    let revealed = VertexSet::from_iter(n, rev.a.iter().copied());
    let mut rest = revealed.complement().to_vec();
    rest.shuffle(rng);
    rest
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        input(format!("alpha must lie in (0, 1/2), got {alpha}"))
    }
}

/// Random configuration for a (U, W)-removal on `n` vertices.
///
/// `V \ A` is split uniformly at random into `U` (`floor` half) and `W`, both
/// listed in ascending order. `W` is cut into `s + 1` balanced consecutive
/// chunks; the first is the reserve `W_#`, the rest are `W_1, ..., W_s`.
pub fn make_uw_config(
    n: usize,
    rev: &Revelation,
    alpha: f64,
    s_factor: f64,
    rng: &mut RandomSource,
) -> Result<RemovalConfig> {
    check_alpha(alpha)?;
    if s_factor <= 0.0 || !s_factor.is_finite() {
        return input(format!("s-factor must be positive, got {s_factor}"));
    }
    rev.validate(n)?;
    if !rev.within_budget(n) {
        return capacity(format!(
            "revealed part has {} vertices, more than n^(1-2 alpha) = {:.1}",
            rev.a.len(),
            (n as f64).powf(1.0 - 2.0 * alpha)
        ));
    }
    let s = block_count(n, alpha, s_factor);
    let rest = shuffled_rest(n, rev, rng);
    let half = rest.len() / 2;
    let mut u = rest[..half].to_vec();
    let mut w = rest[half..].to_vec();
    u.sort_unstable();
    w.sort_unstable();
    if w.len() < s + 1 {
        return capacity(format!("|W| = {} cannot fill s + 1 = {} nonempty blocks", w.len(), s + 1));
    }
    let mut chunks = balanced_chunks(&w, s + 1);
    let w_reserve = chunks.remove(0);
    Ok(RemovalConfig {
        revelation: rev.clone(),
        u,
        w_reserve,
        w_blocks: chunks,
        candidate_policy: CandidatePolicy::LowestIndex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_count_examples() {
        assert_eq!(block_count(10_000, 0.1, 1.0), 251);
        assert_eq!(block_count(4, 0.1, 0.01), 1);
    }

    #[test]
    fn chunks_are_balanced() {
        let items: Vec<usize> = (0..101).collect();
        let chunks = balanced_chunks(&items, 11);
        assert_eq!(chunks.len(), 11);
        assert_eq!(chunks.concat(), items);
        let sizes: Vec<usize> = chunks.iter().map(Vec::len).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn config_partitions_vertices() {
        let rev = Revelation::empty(0, 0.1);
        let cfg = make_uw_config(100, &rev, 0.1, 1.0, &mut RandomSource::new(5, 0)).unwrap();
        assert_eq!((cfg.u.len(), cfg.w_vertices().len()), (50, 50));
        assert_eq!(cfg.s(), block_count(100, 0.1, 1.0));
        cfg.validate(100).unwrap();
        let again = make_uw_config(100, &rev, 0.1, 1.0, &mut RandomSource::new(5, 0)).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn capacity_when_blocks_would_be_empty() {
        let rev = Revelation::empty(0, 0.1);
        let err = make_uw_config(20, &rev, 0.1, 5.0, &mut RandomSource::new(0, 0));
        assert!(matches!(err, Err(crate::Error::Capacity(_))));
    }
}
