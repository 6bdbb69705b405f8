use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

use super::f2::{BitMatrix, MAX_DIM};

/// Ordered sets `A_1, ..., A_r` over the ground set `0..t`. Each `A_j` indexes
/// the Bernoulli bits whose sum gives the parity `Y_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct IndexSetFamily {
    t: usize,
    sets: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawFamily {
    t: usize,
    sets: Vec<Vec<usize>>,
}

impl TryFrom<RawFamily> for IndexSetFamily {
    type Error = crate::Error;
    fn try_from(raw: RawFamily) -> Result<Self> {
        IndexSetFamily::new(raw.t, raw.sets)
    }
}

impl IndexSetFamily {
    /// Sorts and deduplicates each set. Fails if `r = 0`, `r > 64` or an
    /// element is not below `t`.
    pub fn new(t: usize, mut sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.is_empty() {
            return input("a family needs at least one set");
        }
        if sets.len() > MAX_DIM {
            return input(format!("at most {MAX_DIM} sets are supported, got {}", sets.len()));
        }
        for set in &mut sets {
            set.sort_unstable();
            set.dedup();
            if let Some(&e) = set.last() {
                if e >= t {
                    return input(format!("element {e} outside the ground set 0..{t}"));
                }
            }
        }
        Ok(Self { t, sets })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn r(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// For each ground element `i`, the mask whose bit `j` says `i ∈ A_j`.
    pub fn columns(&self) -> Vec<u64> {
        let mut cols = vec![0u64; self.t];
        for (j, set) in self.sets.iter().enumerate() {
            for &i in set {
                cols[i] |= 1 << j;
            }
        }
        cols
    }

    fn from_columns(t: usize, r: usize, cols: &[u64]) -> Self {
        let sets = (0..r).map(|j| (0..t).filter(|&i| cols[i] >> j & 1 == 1).collect()).collect();
        Self { t, sets }
    }

    /// Largest `eta` for which the sequence is eta-layered: the minimum over
    /// `j < r` of `|A_j \ (A_{j+1} ∪ ... ∪ A_r)|`. A single set is layered for
    /// every `eta`; `t + 1` stands in for infinity then.
    pub fn layering_number(&self) -> usize {
        if self.sets.len() == 1 {
            return self.t + 1;
        }
        let mut later = vec![false; self.t];
        let mut eta = usize::MAX;
        for (j, set) in self.sets.iter().enumerate().rev() {
            if j + 1 < self.sets.len() {
                eta = eta.min(set.iter().filter(|&&i| !later[i]).count());
            }
            for &i in set {
                later[i] = true;
            }
        }
        eta
    }

    /// Applies `T` to the indicator vector of every ground element:
    /// `(1_{A'_1}(i), ..., 1_{A'_r}(i)) = T (1_{A_1}(i), ..., 1_{A_r}(i))`.
    /// The parities then satisfy `Y' = T Y` for every assignment of the bits.
    pub fn apply_f2_transform(&self, t_mat: &BitMatrix) -> Result<Self> {
        if t_mat.dim() != self.r() {
            return input(format!("{}x{} transform for {} sets", t_mat.dim(), t_mat.dim(), self.r()));
        }
        if !t_mat.is_invertible() {
            return input("transform is singular over F2");
        }
        let cols: Vec<u64> = self.columns().into_iter().map(|c| t_mat.apply(c)).collect();
        Ok(Self::from_columns(self.t, self.r(), &cols))
    }

    /// Each set cut down to the elements satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        let sets = self.sets.iter().map(|s| s.iter().copied().filter(|&i| keep(i)).collect()).collect();
        Self { t: self.t, sets }
    }

    /// Random eta-layered family: `A_j` gets `eta` private elements (never used
    /// by later sets) plus each earlier-placed element independently with
    /// probability `overlap`. Needs `t >= (r - 1) * eta`.
    pub fn random_layered<R: Rng + ?Sized>(t: usize, r: usize, eta: usize, overlap: f64, rng: &mut R) -> Result<Self> {
        if r == 0 || (r - 1) * eta > t {
            return input(format!("cannot fit {r} sets with {eta} private elements in 0..{t}"));
        }
        let mut ground: Vec<usize> = (0..t).collect();
        ground.shuffle(rng);
        // Sets are built back to front so "later" elements are already placed.
        let mut sets = vec![Vec::new(); r];
        let mut used = 0;
        for j in (0..r).rev() {
            let fresh = if j + 1 == r { eta.min(t) } else { eta };
            let mut set: Vec<usize> = ground[used..used + fresh].to_vec();
            set.extend(ground[..used].iter().copied().filter(|_| rng.gen::<f64>() < overlap));
            used += fresh;
            sets[j] = set;
        }
        Self::new(t, sets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;
    use proptest::{prop_assert_eq, proptest};

    fn fam(t: usize, sets: &[&[usize]]) -> IndexSetFamily {
        IndexSetFamily::new(t, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    #[test]
    fn layering_examples() {
        assert_eq!(fam(6, &[&[1, 2, 3], &[3, 4, 5]]).layering_number(), 2);
        assert_eq!(fam(2, &[&[1], &[1]]).layering_number(), 0);
        assert_eq!(fam(12, &[&[0, 1, 2], &[3, 4, 5], &[6, 7, 8], &[9, 10, 11]]).layering_number(), 3);
        assert_eq!(fam(5, &[&[0]]).layering_number(), 6);
    }

    #[test]
    fn transform_example() {
        let f = fam(3, &[&[1], &[1, 2]]);
        let t = BitMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(f.apply_f2_transform(&t).unwrap(), fam(3, &[&[1], &[2]]));
        assert_eq!(f.apply_f2_transform(&BitMatrix::identity(2)).unwrap(), f);
        let singular = BitMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(f.apply_f2_transform(&singular).is_err());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(IndexSetFamily::new(3, vec![vec![3]]).is_err());
        assert!(IndexSetFamily::new(3, vec![]).is_err());
        assert!(serde_json::from_str::<IndexSetFamily>(r#"{"t":2,"sets":[[5]]}"#).is_err());
    }

    #[test]
    fn random_layered_meets_eta() {
        let mut rng = RandomSource::new(3, 0);
        for _ in 0..200 {
            let r = rng.gen_range(1..5);
            let eta = rng.gen_range(0..4);
            let f = IndexSetFamily::random_layered(16, r, eta, 0.4, &mut rng).unwrap();
            assert!(f.layering_number() >= eta);
        }
    }

    proptest! {
        #[test]
        fn transform_round_trip(seed in 0u64..500, r in 1usize..6) {
            let mut rng = RandomSource::new(seed, 1);
            let f = IndexSetFamily::random_layered(12, r, 2, 0.5, &mut rng).unwrap();
            let t = BitMatrix::random_invertible(r, &mut rng);
            let back = f.apply_f2_transform(&t).unwrap().apply_f2_transform(&t.inverse().unwrap()).unwrap();
            prop_assert_eq!(back, f);
        }

        #[test]
        fn reversing_disjoint_family_keeps_layering(sizes in proptest::collection::vec(1usize..5, 2..6)) {
            let mut sets = Vec::new();
            let mut next = 0;
            for &k in &sizes {
                sets.push((next..next + k).collect::<Vec<_>>());
                next += k;
            }
            let f = IndexSetFamily::new(next, sets.clone()).unwrap();
            sets.reverse();
            let g = IndexSetFamily::new(next, sets).unwrap();
            // All but the last set count, so reversal can change which set is exempt.
            let expect = |s: &[usize]| s[..s.len() - 1].iter().copied().min().unwrap();
            let mut rev = sizes.clone();
            rev.reverse();
            prop_assert_eq!(f.layering_number(), expect(&sizes));
            prop_assert_eq!(g.layering_number(), expect(&rev));
        }
    }
}
