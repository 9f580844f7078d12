//! Square matrices over `Z/ℓⁿ`.

use std::fmt;

use crate::arith::{ipow, mod_inverse};
use crate::error::{Error, Result};
use crate::group::GroupElement;

/// An `r×r` matrix over `Z/ℓⁿ` with entries in `[0, ℓⁿ)`.
///
/// Ordering is lexicographic on the row-major entries, which fixes the
/// canonical element order of every matrix group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix {
    entries: Box<[u32]>,
    prime: u32,
    exponent: u32,
    dim: u32,
}

impl ModMatrix {
    /// Builds a matrix from integer rows, reducing entries. Does not check
    /// invertibility; use [`ModMatrix::invertible`] for group elements.
    pub fn from_rows(prime: u32, exponent: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!("rows {rows:?} do not form a square matrix")));
        }
        if exponent == 0 {
            return Err(Error::LevelOutOfRange { level: 0, max: u32::MAX });
        }
        let m = ipow(prime as u64, exponent) as i64;
        assert!(m < (1 << 31), "modulus too large");
        let entries = rows.iter().flatten().map(|&x| x.rem_euclid(m) as u32).collect();
        Ok(ModMatrix { entries, prime, exponent, dim: dim as u32 })
    }

    /// Like [`ModMatrix::from_rows`] but rejects non-invertible matrices.
    pub fn invertible(prime: u32, exponent: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let m = Self::from_rows(prime, exponent, rows)?;
        if !m.is_invertible() {
            return Err(Error::NotInvertible { modulus: m.modulus() });
        }
        Ok(m)
    }

    pub fn from_flat(prime: u32, exponent: u32, dim: usize, flat: Vec<u64>) -> Self {
        assert_eq!(flat.len(), dim * dim);
        let m = ipow(prime as u64, exponent);
        let entries = flat.into_iter().map(|x| (x % m) as u32).collect();
        ModMatrix { entries, prime, exponent, dim: dim as u32 }
    }

    pub fn identity(prime: u32, exponent: u32, dim: usize) -> Self {
        Self::scalar(prime, exponent, dim, 1)
    }

    pub fn scalar(prime: u32, exponent: u32, dim: usize, value: i64) -> Self {
        let m = ipow(prime as u64, exponent) as i64;
        let mut entries = vec![0u32; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = value.rem_euclid(m) as u32;
        }
        ModMatrix { entries: entries.into_boxed_slice(), prime, exponent, dim: dim as u32 }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn modulus(&self) -> u64 {
        ipow(self.prime as u64, self.exponent)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim as usize + j] as u64
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.get(i, j) as i64).collect()).collect()
    }

    /// Reduction modulo `ℓ^level`.
    pub fn reduce(&self, level: u32) -> ModMatrix {
        assert!(level >= 1 && level <= self.exponent);
        let m = ipow(self.prime as u64, level) as u32;
        ModMatrix {
            entries: self.entries.iter().map(|&x| x % m).collect(),
            prime: self.prime,
            exponent: level,
            dim: self.dim,
        }
    }

    /// Is `self ≡ 1 (mod ℓ^level)`? Level 0 is always true.
    pub fn is_congruent_identity(&self, level: u32) -> bool {
        if level == 0 {
            return true;
        }
        let m = ipow(self.prime as u64, level.min(self.exponent));
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| self.get(i, j) % m == u64::from(i == j)))
    }

    /// Largest `k ≤ n` with `self ≡ 1 (mod ℓ^k)`.
    pub fn congruence_depth(&self) -> u32 {
        let mut k = 0;
        while k < self.exponent && self.is_congruent_identity(k + 1) {
            k += 1;
        }
        k
    }

    pub fn add(&self, other: &ModMatrix) -> ModMatrix {
        let m = self.modulus();
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(&a, &b)| ((a as u64 + b as u64) % m) as u32)
            .collect();
        self.with_entries(entries)
    }

    pub fn sub(&self, other: &ModMatrix) -> ModMatrix {
        let m = self.modulus();
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(&a, &b)| ((a as u64 + m - b as u64) % m) as u32)
            .collect();
        self.with_entries(entries)
    }

    pub fn scale(&self, c: u64) -> ModMatrix {
        let m = self.modulus();
        let c = c % m;
        let entries = self.entries.iter().map(|&a| (a as u64 * c % m) as u32).collect();
        self.with_entries(entries)
    }

    fn with_entries(&self, entries: Box<[u32]>) -> ModMatrix {
        ModMatrix { entries, prime: self.prime, exponent: self.exponent, dim: self.dim }
    }

    pub fn matmul(&self, other: &ModMatrix) -> ModMatrix {
        debug_assert_eq!(self.dim, other.dim);
        debug_assert_eq!(self.exponent, other.exponent);
        let d = self.dim();
        let m = self.modulus();
        let mut entries = vec![0u32; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0u64;
                for k in 0..d {
                    acc = (acc + self.get(i, k) * other.get(k, j)) % m;
                }
                entries[i * d + j] = acc as u32;
            }
        }
        self.with_entries(entries.into_boxed_slice())
    }

    pub fn bracket(&self, other: &ModMatrix) -> ModMatrix {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn is_invertible(&self) -> bool {
        self.det_mod_prime() != 0
    }

    /// Determinant reduced modulo `ℓ`.
    pub fn det_mod_prime(&self) -> u64 {
        let p = self.prime as u64;
        let d = self.dim();
        let mut a: Vec<Vec<u64>> =
            (0..d).map(|i| (0..d).map(|j| self.get(i, j) % p).collect()).collect();
        let mut det = 1u64;
        for col in 0..d {
            let Some(piv) = (col..d).find(|&r| a[r][col] != 0) else {
                return 0;
            };
            if piv != col {
                a.swap(piv, col);
                det = (p - det) % p;
            }
            det = det * a[col][col] % p;
            let inv = mod_inverse(a[col][col], p).unwrap();
            for r in col + 1..d {
                let f = a[r][col] * inv % p;
                for c in col..d {
                    a[r][c] = (a[r][c] + p * p - f * a[col][c] % p) % p;
                }
            }
        }
        det
    }

    /// Determinant modulo `ℓⁿ` (Leibniz expansion; intended for small ranks).
    pub fn det(&self) -> u64 {
        let d = self.dim();
        let m = self.modulus() as i128;
        let mut perm: Vec<usize> = (0..d).collect();
        let mut total: i128 = 0;
        permute(&mut perm, 0, &mut |p| {
            let mut sign = 1i128;
            for i in 0..d {
                for j in i + 1..d {
                    if p[i] > p[j] {
                        sign = -sign;
                    }
                }
            }
            let mut term = sign;
            for (i, &pi) in p.iter().enumerate() {
                term = term * self.get(i, pi) as i128 % m;
            }
            total = (total + term).rem_euclid(m);
        });
        total as u64
    }

    /// Inverse by Gauss–Jordan elimination with unit pivots.
    pub fn try_inverse(&self) -> Option<ModMatrix> {
        let d = self.dim();
        let m = self.modulus();
        let p = self.prime as u64;
        let mut a: Vec<Vec<u64>> = (0..d)
            .map(|i| {
                let mut row: Vec<u64> = (0..d).map(|j| self.get(i, j)).collect();
                row.extend((0..d).map(|j| u64::from(i == j)));
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| a[r][col] % p != 0)?;
            a.swap(piv, col);
            let inv = mod_inverse(a[col][col], m)?;
            for x in a[col].iter_mut() {
                *x = *x * inv % m;
            }
            for r in 0..d {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for c in 0..2 * d {
                        a[r][c] = (a[r][c] + m - f * a[col][c] % m) % m;
                    }
                }
            }
        }
        let flat = a.into_iter().flat_map(|row| row[d..].to_vec()).collect();
        Some(ModMatrix::from_flat(self.prime, self.exponent, d, flat))
    }

    /// Block-diagonal sum of two matrices at the same level.
    pub fn direct_sum(&self, other: &ModMatrix) -> ModMatrix {
        let (a, b) = (self.dim(), other.dim());
        let n = a + b;
        let mut flat = vec![0u64; n * n];
        for i in 0..a {
            for j in 0..a {
                flat[i * n + j] = self.get(i, j);
            }
        }
        for i in 0..b {
            for j in 0..b {
                flat[(a + i) * n + a + j] = other.get(i, j);
            }
        }
        ModMatrix::from_flat(self.prime, self.exponent, n, flat)
    }
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

impl GroupElement for ModMatrix {
    fn mul(&self, other: &Self) -> Self {
        self.matmul(other)
    }

    fn inverse(&self) -> Self {
        self.try_inverse().expect("inverse of a non-invertible matrix")
    }

    fn identity_like(&self) -> Self {
        ModMatrix::identity(self.prime, self.exponent, self.dim())
    }

    fn is_identity(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| self.get(i, j) == u64::from(i == j)))
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} mod {}^{}", self.rows(), self.prime, self.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let g = ModMatrix::invertible(3, 2, &[vec![2, 1], vec![1, 1]]).unwrap();
        let gi = g.inverse();
        assert!(g.mul(&gi).is_identity());
        assert_eq!(g.det(), 1);
    }

    #[test]
    fn non_invertible_rejected() {
        let err = ModMatrix::invertible(3, 2, &[vec![3, 0], vec![0, 1]]).unwrap_err();
        assert_eq!(err, Error::NotInvertible { modulus: 9 });
    }

    #[test]
    fn depth_and_reduction() {
        let g = ModMatrix::from_rows(3, 3, &[vec![1, 9], vec![0, 1]]).unwrap();
        assert_eq!(g.congruence_depth(), 2);
        assert!(g.reduce(2).is_identity());
    }
}
