//! ℓ-adic logarithms, Lie lattices and finite-level perfectness evidence.
//!
//! Nothing here proves Lie perfectness; every output is evidence at the
//! working level only.

use crate::arith::{ipow, mod_inverse, valuation};
use crate::error::{Error, Result};
use crate::layered::LayeredGroup;
use crate::matrix::ModMatrix;
use crate::smith::Submodule;
use crate::tower::{reduce_all, GroupTower, TOP_CAP};

/// Square matrices modulo an arbitrary `m < 2⁶³`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Mat {
    dim: usize,
    m: u64,
    a: Vec<u64>,
}

impl Mat {
    fn zero(dim: usize, m: u64) -> Self {
        Mat { dim, m, a: vec![0; dim * dim] }
    }

    fn mul(&self, o: &Mat) -> Mat {
        let d = self.dim;
        let mut out = Mat::zero(d, self.m);
        for i in 0..d {
            for k in 0..d {
                let x = self.a[i * d + k] as u128;
                if x == 0 {
                    continue;
                }
                for j in 0..d {
                    let y = &mut out.a[i * d + j];
                    *y = ((*y as u128 + x * o.a[k * d + j] as u128) % self.m as u128) as u64;
                }
            }
        }
        out
    }
}

fn domain_depth(prime: u32) -> u32 {
    if prime == 2 {
        2
    } else {
        1
    }
}

/// Number of series terms after which every term vanishes mod `ℓⁿ`, and the
/// largest `ℓ`-valuation of a denominator `k` among them.
fn series_terms(prime: u32, n: u32) -> (u64, u32) {
    let terms = 2 * n as u64 + 4;
    let e = (1..=terms).map(|k| valuation(k, prime as u64)).max().unwrap_or(0);
    (terms, e)
}

/// `log g = Σ_{k≥1} (−1)^{k+1} (g − 1)^k / k` modulo `ℓⁿ`.
///
/// Domain: `g ≡ 1 mod ℓ` for odd `ℓ`, `g ≡ 1 mod 4` for `ℓ = 2`. The series
/// is summed at precision `ℓ^{n+E}` so each division by `ℓ^{v(k)}` is exact.
pub fn matrix_log(g: &ModMatrix, n: u32) -> Result<ModMatrix> {
    let (prime, d) = (g.prime(), g.dim());
    if n == 0 || n > g.exponent() {
        return Err(Error::LevelOutOfRange { level: n, max: g.exponent() });
    }
    let depth = domain_depth(prime);
    if g.exponent() < depth || !g.is_congruent_identity(depth) {
        return Err(Error::OutsideDomain);
    }
    let (terms, e) = series_terms(prime, n);
    let big = ipow(prime as u64, n + e);
    let small = ipow(prime as u64, n);
    let mut x = Mat::zero(d, big);
    for i in 0..d {
        for j in 0..d {
            x.a[i * d + j] = (g.get(i, j) + big - u64::from(i == j)) % big;
        }
    }
    let mut power = x.clone();
    let mut acc = vec![0u64; d * d];
    for k in 1..=terms {
        let v = valuation(k, prime as u64);
        let unit = k / ipow(prime as u64, v);
        let inv = mod_inverse(unit % small, small).expect("unit part is invertible");
        let scale = ipow(prime as u64, v);
        let sign_neg = k % 2 == 0;
        for (slot, &y) in acc.iter_mut().zip(&power.a) {
            debug_assert_eq!(y % scale, 0);
            let t = ((y / scale) % small) as u128 * inv as u128 % small as u128;
            let t = t as u64;
            *slot = if sign_neg { (*slot + small - t) % small } else { (*slot + t) % small };
        }
        power = power.mul(&x);
    }
    Ok(ModMatrix::from_flat(prime, n, d, acc))
}

/// A `Z/ℓ^k`-lattice of `r×r` matrices, stored as a Smith-reduced
/// submodule of `M_r(Z/ℓ^k)` (vectors are row-major flattenings).
#[derive(Clone, Debug)]
pub struct LieLattice {
    pub prime: u32,
    /// Working precision `k`.
    pub level: u32,
    pub dim: usize,
    pub module: Submodule,
    /// Elementary divisors of the bracket span inside the lattice, as
    /// valuations; `0` is a unit, `level` a missing direction.
    pub bracket_divisors: Vec<u32>,
}

impl LieLattice {
    pub fn rank(&self) -> usize {
        self.module.rank()
    }

    pub fn basis(&self) -> Vec<ModMatrix> {
        self.module
            .basis()
            .into_iter()
            .map(|v| ModMatrix::from_flat(self.prime, self.level, self.dim, v))
            .collect()
    }

    pub fn contains(&self, x: &ModMatrix) -> bool {
        self.module.contains(&flatten(x))
    }

    /// `g x g⁻¹ ∈ L` for every basis element `x` and every `g` given.
    pub fn is_adjoint_invariant(&self, gens: &[ModMatrix]) -> bool {
        gens.iter().all(|g| {
            let g = g.reduce(self.level);
            let gi = g.try_inverse().expect("group element");
            self.basis().iter().all(|x| self.contains(&g.matmul(x).matmul(&gi)))
        })
    }

    /// All divisors are units: `[L, L]` has index prime to `ℓ`.
    pub fn is_perfect_evidence(&self) -> bool {
        self.bracket_divisors.iter().all(|&v| v == 0)
    }
}

fn flatten(x: &ModMatrix) -> Vec<u64> {
    x.entries().iter().map(|&e| e as u64).collect()
}

fn bracket_span(prime: u64, level: u32, dim: usize, basis: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mats: Vec<ModMatrix> =
        basis.iter().map(|v| ModMatrix::from_flat(prime as u32, level, dim, v.clone())).collect();
    let mut out = Vec::new();
    for (i, a) in mats.iter().enumerate() {
        for b in &mats[i + 1..] {
            out.push(flatten(&a.bracket(b)));
        }
    }
    out
}

/// Smallest bracket-closed lattice containing `gens`.
fn lie_closure(prime: u64, level: u32, dim: usize, gens: Vec<Vec<u64>>) -> Submodule {
    let mut gens = gens;
    loop {
        let module = Submodule::from_generators(prime, level, dim * dim, &gens);
        let new: Vec<Vec<u64>> = bracket_span(prime, level, dim, &module.basis())
            .into_iter()
            .filter(|v| !module.contains(v))
            .collect();
        if new.is_empty() {
            return module;
        }
        gens = module.basis();
        gens.extend(new);
    }
}

/// `ℓ^{-m} log Π(m)` at precision `N − m`, closed under the bracket.
///
/// Generators of `Π(m)` come from the layered view of the tower's top
/// level; `m` must be at least 1 (2 when `ℓ = 2`) and below `N`.
pub fn lie_lattice(tower: &GroupTower, m: u32) -> Result<LieLattice> {
    let g = tower.layered()?;
    lie_lattice_of(&g, m)
}

pub fn lie_lattice_of(g: &LayeredGroup, m: u32) -> Result<LieLattice> {
    let (prime, n, dim) = (g.prime(), g.level(), g.dim());
    if m < domain_depth(prime) || m >= n {
        return Err(Error::LevelOutOfRange { level: m, max: n - 1 });
    }
    let level = n - m;
    let shift = ipow(prime as u64, m);
    let small = ipow(prime as u64, level);
    let mut gens = Vec::new();
    for x in g.congruence_kernel_generators(m) {
        let l = matrix_log(&x, n)?;
        gens.push(l.entries().iter().map(|&e| (e as u64 / shift) % small).collect());
    }
    let module = lie_closure(prime as u64, level, dim, gens);
    let bracket = Submodule::from_generators(
        prime as u64,
        level,
        dim * dim,
        &bracket_span(prime as u64, level, dim, &module.basis()),
    );
    let bracket_divisors = module.quotient_invariants(&bracket);
    Ok(LieLattice { prime, level, dim, module, bracket_divisors })
}

/// Elementary divisors of `[L, L]` inside `L`.
pub fn perfectness_index(l: &LieLattice) -> Vec<u32> {
    l.bracket_divisors.clone()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianizationGrowth {
    /// `|U_n^{ab}|` for `n = 1..=N`.
    pub orders: Vec<u128>,
    /// The last two orders agree.
    pub stabilized: bool,
}

/// Orders of the abelianizations of the reductions `U_n` of the subgroup
/// generated by `u_gens` (given at the top level).
pub fn abelianization_growth(tower: &GroupTower, u_gens: &[ModMatrix]) -> Result<AbelianizationGrowth> {
    let mut orders = Vec::new();
    for n in 1..=tower.max_level() {
        let u = LayeredGroup::generate(&reduce_all(u_gens, n), TOP_CAP)?;
        let d = u.derived(TOP_CAP)?;
        orders.push(u.order() / d.order());
    }
    let stabilized = orders.len() >= 2 && orders[orders.len() - 1] == orders[orders.len() - 2];
    Ok(AbelianizationGrowth { orders, stabilized })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u32, n: u32, rows: [[i64; 2]; 2]) -> ModMatrix {
        ModMatrix::from_rows(p, n, &[rows[0].to_vec(), rows[1].to_vec()]).unwrap()
    }

    #[test]
    fn log_examples() {
        let id = ModMatrix::identity(5, 3, 2);
        assert_eq!(matrix_log(&id, 3).unwrap(), ModMatrix::from_flat(5, 3, 2, vec![0; 4]));
        let g = m(3, 2, [[1, 3], [0, 1]]);
        assert_eq!(matrix_log(&g, 2).unwrap(), m(3, 2, [[0, 3], [0, 0]]));
        assert_eq!(matrix_log(&m(3, 2, [[2, 0], [0, 1]]), 2), Err(Error::OutsideDomain));
        assert_eq!(matrix_log(&m(2, 3, [[3, 0], [0, 1]]), 3), Err(Error::OutsideDomain));
    }

    #[test]
    fn log_of_scalar_is_additive() {
        // log((1+ℓ)^2) = 2 log(1+ℓ).
        let a = ModMatrix::scalar(5, 4, 1, 6);
        let la = matrix_log(&a, 4).unwrap();
        let la2 = matrix_log(&a.matmul(&a), 4).unwrap();
        assert_eq!(la2, la.add(&la));
        assert_eq!(la.congruence_depth(), 0);
        assert_eq!(la.get(0, 0) % 5, 0);
        assert_ne!(la.get(0, 0) % 25, 0);
    }

    fn sl2(p: u32, n: u32) -> GroupTower {
        GroupTower::new(vec![m(p, n, [[1, 1], [0, 1]]), m(p, n, [[1, 0], [1, 1]])], 1000).unwrap()
    }

    #[test]
    fn sl2_lattice_is_perfect() {
        let l = lie_lattice(&sl2(5, 3), 1).unwrap();
        assert_eq!(l.rank(), 3);
        assert!(l.is_perfect_evidence());
        assert!(l.is_adjoint_invariant(sl2(5, 3).generators()));
    }

    #[test]
    fn borel_lattice_is_not_perfect() {
        let t = GroupTower::new(vec![m(3, 4, [[2, 0], [0, 1]]), m(3, 4, [[1, 0], [0, 2]]), m(3, 4, [[1, 1], [0, 1]])], 1000)
            .unwrap();
        let l = lie_lattice(&t, 1).unwrap();
        assert_eq!(l.rank(), 3);
        assert!(!l.is_perfect_evidence());
        assert_eq!(perfectness_index(&l).iter().filter(|&&v| v == 0).count(), 1);
    }

    #[test]
    fn procyclic_growth_is_unbounded() {
        let t = GroupTower::new(vec![ModMatrix::scalar(3, 4, 1, 4)], 1000).unwrap();
        let g = abelianization_growth(&t, t.generators()).unwrap();
        assert_eq!(g.orders, vec![1, 3, 9, 27]);
        let l = lie_lattice(&t, 1).unwrap();
        assert_eq!(l.rank(), 1);
        assert_eq!(perfectness_index(&l), vec![3]);
    }
}
