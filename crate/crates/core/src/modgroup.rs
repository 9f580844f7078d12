//! Finite matrix groups over `Z/ℓⁿ`: closure, congruence kernels, cores,
//! Frattini subgroups and abelianizations.

use crate::error::{Error, Result};
use crate::group::{subgroup_unchecked, FiniteGroup, GroupElement, Subgroup};
use crate::lattice::{self, SubgroupClass};
use crate::matrix::ModMatrix;

/// An enumerated group of invertible matrices over `Z/ℓⁿ`.
pub type ModGroup = FiniteGroup<ModMatrix>;

/// Default cap on enumerated group orders.
pub const ORDER_CAP: usize = 2_000_000;

/// Checks that all generators share `(ℓ, n, r)` and are invertible.
pub fn check_generators(gens: &[ModMatrix]) -> Result<(u32, u32, usize)> {
    let first = gens.first().ok_or_else(|| Error::DimensionMismatch("no generators".into()))?;
    let shape = (first.prime(), first.exponent(), first.dim());
    for g in gens {
        if (g.prime(), g.exponent(), g.dim()) != shape {
            return Err(Error::DimensionMismatch(format!(
                "generator {g:?} does not match prime {}, level {}, rank {}",
                shape.0, shape.1, shape.2
            )));
        }
        if !g.is_invertible() {
            return Err(Error::NotInvertible { modulus: g.modulus() });
        }
    }
    Ok(shape)
}

/// Breadth-first closure of `gens`; elements are ordered lexicographically.
pub fn close_generate(gens: &[ModMatrix], cap: usize) -> Result<ModGroup> {
    check_generators(gens)?;
    FiniteGroup::generate(gens[0].identity_like(), gens, cap)
}

/// Level `n` of a matrix group.
pub fn level(g: &ModGroup) -> u32 {
    g.element(g.identity()).exponent()
}

/// `Π(m) = {g ≡ 1 mod ℓ^m}`.
pub fn congruence_kernel(g: &ModGroup, m: u32) -> Result<Subgroup> {
    let n = level(g);
    if m > n {
        return Err(Error::LevelOutOfRange { level: m, max: n });
    }
    let members =
        (0..g.order() as u32).filter(|&i| g.element(i).is_congruent_identity(m)).collect();
    Ok(subgroup_unchecked(members, g.order()))
}

/// Largest subgroup of `h` normal in `g`.
pub fn normal_core<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup) -> Result<Subgroup> {
    g.check_subgroup(h)?;
    Ok(g.core_in(&g.whole(), h))
}

/// Frattini subgroup of `h ≤ g`.
pub fn frattini<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup, cap: usize) -> Result<Subgroup> {
    g.check_subgroup(h)?;
    lattice::frattini(g, h, cap)
}

/// Invariant factors of `h^{ab}`; empty when `h` is perfect.
pub fn abelianization<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup) -> Vec<u64> {
    lattice::abelianization_invariants(g, h)
}

pub fn subgroup_lattice<E: GroupElement>(g: &FiniteGroup<E>, cap: usize) -> Result<Vec<SubgroupClass>> {
    lattice::subgroup_classes(g, cap)
}

/// Index map of reduction `Π_n → Π_m` between two enumerated levels.
pub fn reduction_map(upper: &ModGroup, lower: &ModGroup) -> Result<Vec<u32>> {
    let m = level(lower);
    upper
        .elements()
        .iter()
        .map(|e| {
            lower
                .index_of(&e.reduce(m))
                .ok_or_else(|| Error::NotASubgroup(format!("{e:?} does not reduce into the lower group")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u32, n: u32, rows: [[i64; 2]; 2]) -> ModMatrix {
        ModMatrix::invertible(p, n, &[rows[0].to_vec(), rows[1].to_vec()]).unwrap()
    }

    #[test]
    fn closure_examples() {
        let id = close_generate(&[ModMatrix::identity(3, 1, 2)], 10).unwrap();
        assert_eq!(id.order(), 1);
        let c4 = close_generate(&[m(2, 2, [[1, 1], [0, 1]])], 10).unwrap();
        assert_eq!(c4.order(), 4);
        let sl = close_generate(&[m(3, 1, [[1, 1], [0, 1]]), m(3, 1, [[1, 0], [1, 1]])], 100).unwrap();
        assert_eq!(sl.order(), 24);
        let bad = ModMatrix::from_rows(3, 1, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(matches!(close_generate(&[bad], 10), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn kernels_of_sl2_mod_9() {
        let g = close_generate(&[m(3, 2, [[1, 1], [0, 1]]), m(3, 2, [[1, 0], [1, 1]])], 1000).unwrap();
        assert_eq!(congruence_kernel(&g, 0).unwrap().order(), g.order());
        assert_eq!(congruence_kernel(&g, 1).unwrap().order(), 27);
        assert!(congruence_kernel(&g, 2).unwrap().is_trivial());
        assert!(congruence_kernel(&g, 3).is_err());
    }

    #[test]
    fn quaternion_frattini() {
        let q8 = close_generate(&[m(3, 2, [[0, -1], [1, 0]]), m(3, 2, [[1, 4], [4, -1]])], 100).unwrap();
        assert_eq!(q8.order(), 8);
        assert_eq!(frattini(&q8, &q8.whole(), 100).unwrap().order(), 2);
        assert_eq!(lattice::frattini_by_maximal(&q8, &q8.whole(), 100).unwrap().order(), 2);
    }

    #[test]
    fn sl2_mod_3_abelianization() {
        let g = close_generate(&[m(3, 1, [[1, 1], [0, 1]]), m(3, 1, [[1, 0], [1, 1]])], 100).unwrap();
        assert_eq!(abelianization(&g, &g.whole()), vec![3]);
        assert_eq!(subgroup_lattice(&g, 100).unwrap().len(), 7);
    }
}
