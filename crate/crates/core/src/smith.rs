//! Smith normal form and submodules over the chain ring `Z/ℓⁿ`.
//!
//! Every ideal of `Z/ℓⁿ` is `(ℓ^v)`, so elimination always pivots on an
//! entry of minimal valuation. Column operations are tracked so that row
//! spans can be written in a diagonal basis.

use crate::arith::{ipow, mod_inverse, valuation_mod};

/// `U·A·V = diag(ℓ^{v_0}, ℓ^{v_1}, …)` for some invertible `U`, `V`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Valuation of each diagonal entry, `exponent` for zero entries.
    /// Length is `min(rows, cols)`, ascending.
    pub valuations: Vec<u32>,
    /// The column transform `V` (`cols × cols`).
    pub transform: Vec<Vec<u64>>,
    /// `V⁻¹`.
    pub inverse: Vec<Vec<u64>>,
}

#[derive(Clone, Copy, Debug)]
struct Ring {
    prime: u64,
    exponent: u32,
    modulus: u64,
}

impl Ring {
    fn new(prime: u64, exponent: u32) -> Self {
        Ring { prime, exponent, modulus: ipow(prime, exponent) }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.modulus as u128) as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b % self.modulus) % self.modulus
    }

    fn val(&self, a: u64) -> u32 {
        valuation_mod(a, self.prime, self.exponent)
    }
}

fn identity(n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
}

/// Smith normal form of a `rows × cols` matrix with entries in `[0, ℓⁿ)`.
pub fn smith(prime: u64, exponent: u32, matrix: &[Vec<u64>], cols: usize) -> Smith {
    let ring = Ring::new(prime, exponent);
    let mut a: Vec<Vec<u64>> =
        matrix.iter().map(|r| r.iter().map(|&x| x % ring.modulus).collect()).collect();
    let rows = a.len();
    let mut v = identity(cols);
    let mut vinv = identity(cols);
    let mut valuations = Vec::with_capacity(rows.min(cols));
    for t in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let val = ring.val(x);
                    if best.is_none_or(|(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else {
            valuations.extend(std::iter::repeat_n(exponent, rows.min(cols) - t));
            break;
        };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            vinv.swap(t, pj);
        }
        let unit = a[t][t] / ipow(prime, val);
        let uinv = mod_inverse(unit % ring.modulus, ring.modulus).expect("unit part");
        for x in a[t].iter_mut() {
            *x = ring.mul(*x, uinv);
        }
        let pivot_scale = ipow(prime, val);
        for i in 0..rows {
            if i != t && a[i][t] != 0 {
                let f = a[i][t] / pivot_scale;
                for j in t..cols {
                    let d = ring.mul(f, a[t][j]);
                    a[i][j] = ring.sub(a[i][j], d);
                }
            }
        }
        for j in t + 1..cols {
            if a[t][j] != 0 {
                let f = a[t][j] / pivot_scale;
                // column j -= f·column t, on A and on V; V⁻¹ gets row t += f·row j.
                for row in a.iter_mut() {
                    let d = ring.mul(f, row[t]);
                    row[j] = ring.sub(row[j], d);
                }
                for row in v.iter_mut() {
                    let d = ring.mul(f, row[t]);
                    row[j] = ring.sub(row[j], d);
                }
                for k in 0..cols {
                    let add = ring.mul(f, vinv[j][k]);
                    vinv[t][k] = (vinv[t][k] + add) % ring.modulus;
                }
            }
        }
        valuations.push(val);
    }
    Smith { valuations, transform: v, inverse: vinv }
}

/// `log_ℓ |{x ∈ (Z/ℓⁿ)^cols : A·x = 0}|`, the kernel of `x ↦ A x`.
pub fn kernel_log_size(prime: u64, exponent: u32, matrix: &[Vec<u64>], cols: usize) -> u32 {
    let s = smith(prime, exponent, matrix, cols);
    let diag: u32 = s.valuations.iter().sum();
    diag + exponent * (cols - s.valuations.len()) as u32
}

/// Exponents `e_i > 0` with `(Z/ℓⁿ)^cols / rowspan(A) ≅ ⊕ Z/ℓ^{e_i}`.
pub fn cokernel_invariants(prime: u64, exponent: u32, matrix: &[Vec<u64>], cols: usize) -> Vec<u32> {
    let s = smith(prime, exponent, matrix, cols);
    let mut out: Vec<u32> = s.valuations.iter().copied().filter(|&v| v > 0).collect();
    out.extend(std::iter::repeat_n(exponent, cols - s.valuations.len()));
    out.sort_unstable();
    out
}

/// A submodule of `(Z/ℓⁿ)^dim`, stored as `span{ℓ^{v_i} w_i}` where `w_i`
/// are the rows of an invertible matrix.
#[derive(Clone, Debug)]
pub struct Submodule {
    prime: u64,
    exponent: u32,
    dim: usize,
    valuations: Vec<u32>,
    transform: Vec<Vec<u64>>,
    inverse: Vec<Vec<u64>>,
}

impl Submodule {
    pub fn from_generators(prime: u64, exponent: u32, dim: usize, gens: &[Vec<u64>]) -> Self {
        let s = smith(prime, exponent, gens, dim);
        let mut valuations = s.valuations;
        valuations.resize(dim, exponent);
        Submodule { prime, exponent, dim, valuations, transform: s.transform, inverse: s.inverse }
    }

    pub fn zero(prime: u64, exponent: u32, dim: usize) -> Self {
        Self::from_generators(prime, exponent, dim, &[])
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of nonzero diagonal generators.
    pub fn rank(&self) -> usize {
        self.valuations.iter().filter(|&&v| v < self.exponent).count()
    }

    /// Valuations of the nonzero diagonal generators (the elementary divisors).
    pub fn divisors(&self) -> Vec<u32> {
        self.valuations.iter().copied().filter(|&v| v < self.exponent).collect()
    }

    /// `log_ℓ` of the cardinality.
    pub fn log_order(&self) -> u32 {
        self.valuations.iter().map(|&v| self.exponent - v).sum()
    }

    /// Generators `ℓ^{v_i} w_i` of the nonzero summands.
    pub fn basis(&self) -> Vec<Vec<u64>> {
        let ring = Ring::new(self.prime, self.exponent);
        self.valuations
            .iter()
            .enumerate()
            .filter(|(_, &v)| v < self.exponent)
            .map(|(i, &v)| {
                let s = ipow(self.prime, v);
                self.inverse[i].iter().map(|&x| ring.mul(x, s)).collect()
            })
            .collect()
    }

    fn raw_coordinates(&self, y: &[u64]) -> Vec<u64> {
        let ring = Ring::new(self.prime, self.exponent);
        (0..self.dim)
            .map(|j| {
                (0..self.dim).fold(0u64, |acc, k| (acc + ring.mul(y[k], self.transform[k][j])) % ring.modulus)
            })
            .collect()
    }

    /// Coordinates of `y` on [`Submodule::basis`], each reduced modulo the
    /// order of its summand; `None` if `y` is not in the module.
    pub fn coordinates(&self, y: &[u64]) -> Option<Vec<u64>> {
        let ring = Ring::new(self.prime, self.exponent);
        let raw = self.raw_coordinates(y);
        let mut out = Vec::new();
        for (i, &v) in self.valuations.iter().enumerate() {
            let c = raw[i];
            if v >= self.exponent {
                if c != 0 {
                    return None;
                }
                continue;
            }
            if ring.val(c) < v {
                return None;
            }
            out.push((c / ipow(self.prime, v)) % ipow(self.prime, self.exponent - v));
        }
        Some(out)
    }

    pub fn contains(&self, y: &[u64]) -> bool {
        self.coordinates(y).is_some()
    }

    pub fn contains_module(&self, other: &Submodule) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }

    /// Exponents of the invariant factors of `self / sub`, one per nonzero
    /// summand of `self` (zero for summands that survive entirely in `sub`).
    /// Panics if `sub` is not contained in `self`.
    pub fn quotient_invariants(&self, sub: &Submodule) -> Vec<u32> {
        let k = self.rank();
        let orders: Vec<u32> = self.divisors().iter().map(|&v| self.exponent - v).collect();
        let mut rel: Vec<Vec<u64>> = sub
            .basis()
            .iter()
            .map(|b| self.coordinates(b).expect("submodule not contained"))
            .collect();
        for (i, &o) in orders.iter().enumerate() {
            let mut row = vec![0u64; k];
            row[i] = ipow(self.prime, o) % ipow(self.prime, self.exponent);
            rel.push(row);
        }
        let s = smith(self.prime, self.exponent, &rel, k);
        let mut out = s.valuations;
        out.resize(k, self.exponent);
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_of_small_matrix() {
        // [[3, 0], [0, 9]] over Z/27: valuations 1, 2.
        let s = smith(3, 3, &[vec![3, 0], vec![0, 9]], 2);
        assert_eq!(s.valuations, vec![1, 2]);
        // [[2, 4], [4, 2]] over Z/9: det = -12, valuation 1 after unit pivot.
        let s = smith(3, 2, &[vec![2, 4], vec![4, 2]], 2);
        assert_eq!(s.valuations, vec![0, 1]);
    }

    #[test]
    fn kernel_sizes() {
        // 5·x = 0 on (Z/125)^2: kernel 25^2.
        let a = vec![vec![5, 0], vec![0, 5]];
        assert_eq!(kernel_log_size(5, 3, &a, 2), 2);
        assert_eq!(kernel_log_size(5, 3, &[], 2), 6);
    }

    #[test]
    fn transforms_are_inverse() {
        let a = vec![vec![3, 6, 1], vec![9, 2, 4]];
        let s = smith(3, 3, &a, 3);
        for i in 0..3 {
            for j in 0..3 {
                let x: u64 = (0..3).map(|k| s.transform[i][k] * s.inverse[k][j]).sum::<u64>() % 27;
                assert_eq!(x, u64::from(i == j));
            }
        }
    }

    #[test]
    fn submodule_membership_and_quotient() {
        let m = Submodule::from_generators(3, 3, 2, &[vec![1, 0], vec![0, 3]]);
        assert_eq!(m.log_order(), 3 + 2);
        assert!(m.contains(&[2, 6]));
        assert!(!m.contains(&[0, 1]));
        let sub = Submodule::from_generators(3, 3, 2, &[vec![3, 0], vec![0, 9]]);
        assert_eq!(m.quotient_invariants(&sub), vec![1, 1]);
        assert_eq!(m.quotient_invariants(&m), vec![0, 0]);
    }
}
