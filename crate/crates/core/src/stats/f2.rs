use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{input, Result};

/// Largest dimension a [`BitMatrix`] supports.
pub const MAX_DIM: usize = 64;

/// Square matrix over F2. Row `i` is a bit mask whose bit `j` is entry `(i, j)`;
/// a vector is a mask whose bit `j` is coordinate `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    dim: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn identity(dim: usize) -> Self {
        assert!(dim <= MAX_DIM);
        Self { dim, rows: (0..dim).map(|i| 1u64 << i).collect() }
    }

    pub fn from_masks(dim: usize, rows: Vec<u64>) -> Result<Self> {
        if dim > MAX_DIM || rows.len() != dim {
            return input(format!("expected {dim} rows of a {dim}x{dim} matrix (dim <= {MAX_DIM})"));
        }
        let mask = low_mask(dim);
        if rows.iter().any(|&r| r & !mask != 0) {
            return input("matrix row has bits beyond its dimension");
        }
        Ok(Self { dim, rows })
    }

    /// Builds a matrix from 0/1 entries, one inner vector per row.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let dim = rows.len();
        let mut masks = Vec::with_capacity(dim);
        for row in rows {
            if row.len() != dim {
                return input(format!("row of length {} in a {dim}x{dim} matrix", row.len()));
            }
            let mut m = 0u64;
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m |= 1 << j,
                    _ => return input(format!("matrix entry {b} is not a bit")),
                }
            }
            masks.push(m);
        }
        Self::from_masks(dim, masks)
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(|&r| (0..self.dim).map(|j| (r >> j & 1) as u8).collect()).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    /// `T v`.
    pub fn apply(&self, v: u64) -> u64 {
        self.rows.iter().enumerate().fold(0, |acc, (i, &r)| acc | (u64::from((r & v).count_ones() & 1) << i))
    }

    /// `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.dim, other.dim);
        // Row i of the product is the xor of the rows of `other` selected by row i of `self`.
        let rows = self
            .rows
            .iter()
            .map(|&r| (0..self.dim).filter(|&j| r >> j & 1 == 1).fold(0, |acc, j| acc ^ other.rows[j]))
            .collect();
        BitMatrix { dim: self.dim, rows }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.dim {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r >> col & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.dim
    }

    /// Gauss-Jordan inverse, `None` when singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        let mut a = self.rows.clone();
        let mut inv = BitMatrix::identity(self.dim).rows;
        for col in 0..self.dim {
            let p = (col..self.dim).find(|&i| a[i] >> col & 1 == 1)?;
            a.swap(col, p);
            inv.swap(col, p);
            for i in 0..self.dim {
                if i != col && a[i] >> col & 1 == 1 {
                    a[i] ^= a[col];
                    inv[i] ^= inv[col];
                }
            }
        }
        Some(BitMatrix { dim: self.dim, rows: inv })
    }

    /// Uniformly random invertible matrix (rejection sampling; a random square
    /// matrix over F2 is invertible with probability above 0.28).
    pub fn random_invertible<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> BitMatrix {
        let mask = low_mask(dim);
        loop {
            let m = BitMatrix { dim, rows: (0..dim).map(|_| rng.gen::<u64>() & mask).collect() };
            if m.is_invertible() {
                return m;
            }
        }
    }
}

pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(d)?;
        BitMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
