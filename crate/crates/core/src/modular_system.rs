//! The Frattini system `C_n(Π)`, reduction assumptions, the uniform index
//! bound and fixed-point counts.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::arith::{ipow, is_power_of};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, Subgroup};
use crate::lattice::{self, LATTICE_CAP};
use crate::layered::LayeredGroup;
use crate::matrix::ModMatrix;
use crate::modgroup::{check_generators, congruence_kernel, ModGroup};
use crate::perm::Perm;
use crate::smith;
use crate::tower::{GroupTower, TOP_CAP};

/// Per-level outcome of [`verify_reduction_assumptions`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssumptionLevel {
    pub n: u32,
    /// `K_C(Π) = K_C(CΠ(n))` at the top level; `None` at `n = N`, where
    /// `Π(N)` is trivial and the comparison carries no information.
    pub core_stable: Option<bool>,
    /// `|Π̃_C(n)|` with `Π̃_C(n)` the normal core of `CΠ(n)`.
    pub tilde_order: usize,
    /// `[Π̃_C(n-1) : Π̃_C(n)]`.
    pub tilde_index: usize,
    pub ell_group: bool,
}

#[derive(Clone, Debug)]
pub struct AssumptionReport {
    pub levels: Vec<AssumptionLevel>,
}

impl AssumptionReport {
    pub fn core_stable(&self) -> bool {
        self.levels.iter().all(|l| l.core_stable != Some(false))
    }

    /// Smallest `n` from which every quotient `Π̃_C(m-1)/Π̃_C(m)` is an
    /// `ℓ`-group.
    pub fn ell_group_from(&self) -> Option<u32> {
        let last_bad = self.levels.iter().rev().find(|l| !l.ell_group).map(|l| l.n);
        match last_bad {
            None => self.levels.first().map(|l| l.n),
            Some(n) if n as usize == self.levels.len() => None,
            Some(n) => Some(n + 1),
        }
    }
}

/// Subgroups `Π̃_C(n)` for `n = 0..=N` at the top level.
pub fn tilde_groups(g: &ModGroup, c: &Subgroup, n_max: u32) -> Result<Vec<Subgroup>> {
    (0..=n_max)
        .map(|n| {
            let amb = g.product(c, &congruence_kernel(g, n)?);
            Ok(g.core_in(&g.whole(), &amb))
        })
        .collect()
}

/// Checks core stability and the `ℓ`-group property of the tilde filtration
/// at the top level of the tower.
pub fn verify_reduction_assumptions(tower: &GroupTower, c_gens: &[ModMatrix]) -> Result<AssumptionReport> {
    let n_max = tower.max_level();
    let g = tower.level(n_max)?;
    let c = tower.image_subgroup(n_max, c_gens)?;
    let core = g.core_in(&g.whole(), &c);
    let tilde = tilde_groups(g, &c, n_max)?;
    let mut levels = Vec::new();
    for n in 1..=n_max {
        let core_stable = if n < n_max {
            let amb = g.product(&c, &congruence_kernel(g, n)?);
            Some(g.core_in(&amb, &c) == core)
        } else {
            None
        };
        let idx = tilde[n as usize - 1].order() / tilde[n as usize].order();
        levels.push(AssumptionLevel {
            n,
            core_stable,
            tilde_order: tilde[n as usize].order(),
            tilde_index: idx,
            ell_group: is_power_of(idx as u64, tower.prime() as u64),
        });
    }
    Ok(AssumptionReport { levels })
}

/// `C_n(Π)` at one level, computed inside `Π_N`.
#[derive(Clone, Debug)]
pub struct ModularLevel {
    pub n: u32,
    pub subgroups: Vec<Subgroup>,
    /// `[Π_N : U]` per subgroup.
    pub indices: Vec<usize>,
    /// `ψ_n(U) = UΦ(Π(n-2))` as an index into the previous level's list.
    pub psi: Vec<usize>,
    /// Whether the list equals `{U : Π(n) ⊆ U, Π(n-1) ⊄ U}`.
    pub congruence_description: bool,
}

/// Action of `g` on the cosets of the normal subgroup `n`, giving the
/// quotient as a permutation group and the projection of every element.
pub fn quotient_by_normal<E: GroupElement>(g: &FiniteGroup<E>, n: &Subgroup) -> Result<(FiniteGroup<Perm>, Vec<u32>)> {
    let (labels, reps) = g.left_coset_labels(n);
    let perm_of = |x: u32| Perm::from_images(reps.iter().map(|&r| labels[g.mul(x, r) as usize]).collect());
    let gens: Vec<Perm> = g.generators().iter().map(|&x| perm_of(x)).collect();
    let identity = Perm::identity(reps.len());
    let q = FiniteGroup::generate(identity, &gens, usize::MAX)?;
    // x ↦ image is constant on cosets; compute once per coset.
    let coset_image: Vec<u32> = reps.iter().map(|&r| q.index_of(&perm_of(r)).unwrap()).collect();
    let map = labels.iter().map(|&l| coset_image[l as usize]).collect();
    Ok((q, map))
}

/// All subgroups of `g` containing the normal subgroup `n`.
pub fn subgroups_containing<E: GroupElement>(g: &FiniteGroup<E>, n: &Subgroup, cap: usize) -> Result<Vec<Subgroup>> {
    let (q, map) = quotient_by_normal(g, n)?;
    let mut out: Vec<Subgroup> = lattice::all_subgroups(&q, cap)?
        .iter()
        .map(|u| g.preimage_of(&map, u))
        .collect();
    out.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
    Ok(out)
}

/// `Φ(Π_N)`. `Φ(Π(1))` is characteristic in the normal `ℓ`-group `Π(1)`,
/// hence lies in `Φ(Π_N)`, so the maximal-subgroup search runs on the
/// quotient by it.
fn whole_frattini(g: &ModGroup, n_top: u32, ell: u64) -> Result<Subgroup> {
    if n_top < 2 {
        return lattice::frattini(g, &g.whole(), LATTICE_CAP);
    }
    let below = lattice::frattini_of_p_group(g, &congruence_kernel(g, 1)?, ell);
    let (q, map) = quotient_by_normal(g, &below)?;
    let phi_q = lattice::frattini(&q, &q.whole(), LATTICE_CAP)?;
    Ok(g.preimage_of(&map, &phi_q))
}

/// `C_1(Π), …, C_{up_to}(Π)` inside the top level of the tower.
pub fn modular_levels(tower: &GroupTower, up_to: u32) -> Result<Vec<ModularLevel>> {
    let n_top = tower.max_level();
    if up_to > n_top {
        return Err(Error::LevelOutOfRange { level: up_to, max: n_top });
    }
    let g = tower.level(n_top)?;
    let ell = tower.prime() as u64;
    let mut out: Vec<ModularLevel> = Vec::new();
    let mut previous: Vec<Subgroup> = vec![g.whole()];
    let mut phi_prev: Option<Subgroup> = None;
    for n in 1..=up_to {
        let p = congruence_kernel(g, n - 1)?;
        let phi = if n >= 2 { lattice::frattini_of_p_group(g, &p, ell) } else { whole_frattini(g, n_top, ell)? };
        let subgroups: Vec<Subgroup> = subgroups_containing(g, &phi, LATTICE_CAP)?
            .into_iter()
            .filter(|u| !p.is_subgroup_of(u))
            .collect();
        let index_of_prev: FxHashMap<&[u32], usize> =
            previous.iter().enumerate().map(|(i, u)| (u.members(), i)).collect();
        let mut psi = Vec::with_capacity(subgroups.len());
        for u in &subgroups {
            let image = match &phi_prev {
                Some(f) => g.product(u, f),
                None => g.whole(),
            };
            let i = *index_of_prev.get(image.members()).ok_or_else(|| {
                Error::IdentityViolation(format!("ψ_{n} image of a subgroup of order {} is not in C_{}", u.order(), n - 1))
            })?;
            psi.push(i);
        }
        let kernel_n = congruence_kernel(g, n)?;
        let by_congruence: FxHashSet<Vec<u32>> = subgroups_containing(g, &kernel_n, LATTICE_CAP)?
            .into_iter()
            .filter(|u| !p.is_subgroup_of(u))
            .map(|u| u.members().to_vec())
            .collect();
        let ours: FxHashSet<Vec<u32>> = subgroups.iter().map(|u| u.members().to_vec()).collect();
        out.push(ModularLevel {
            n,
            indices: subgroups.iter().map(|u| g.order() / u.order()).collect(),
            subgroups: subgroups.clone(),
            psi,
            congruence_description: ours == by_congruence,
        });
        previous = subgroups;
        phi_prev = Some(phi);
    }
    Ok(out)
}

/// First level at which `C_n(Π)` coincides with the congruence description.
pub fn first_coinciding_level(levels: &[ModularLevel]) -> Option<u32> {
    let last_bad = levels.iter().rev().find(|l| !l.congruence_description).map(|l| l.n);
    match last_bad {
        None => levels.first().map(|l| l.n),
        Some(n) if n as usize == levels.len() => None,
        Some(n) => Some(n + 1),
    }
}

/// Index into `level.subgroups` of some `U ⊇ c`.
pub fn containing_member(level: &ModularLevel, c: &Subgroup) -> Option<usize> {
    level.subgroups.iter().position(|u| c.is_subgroup_of(u))
}

/// Classification of one point subgroup `Π_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointClass {
    /// Smallest `m ≤ N-1` with `Π(m) ⊆ Π_x`, if any.
    pub witness_level: Option<u32>,
    /// `[Π_N : Π_{x,N}]`.
    pub index: u128,
}

impl PointClass {
    pub fn is_generic(&self) -> bool {
        self.witness_level.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct IndexBound {
    pub level: u32,
    pub points: Vec<PointClass>,
    /// Largest witness level among generic points.
    pub n0: u32,
    /// `max([Π : Π(n0)], [Π : Π_x] over generic x)`.
    pub bound: u128,
}

/// Generic-at-level / exceptional-so-far classification of point subgroups
/// (given by generators at the top level) and the resulting index bound.
pub fn uniform_index_bound(tower: &GroupTower, points: &[Vec<ModMatrix>]) -> Result<IndexBound> {
    let pi = tower.layered()?;
    let n_top = tower.max_level();
    let mut classes = Vec::new();
    for gens in points {
        let px = if gens.is_empty() {
            LayeredGroup::generate(&[ModMatrix::identity(tower.prime(), n_top, tower.rank())], TOP_CAP)?
        } else {
            LayeredGroup::generate(gens, TOP_CAP)?
        };
        if let Some(g) = px.generators().iter().find(|g| !pi.contains(g)) {
            return Err(Error::NotASubgroup(format!("{g:?} is not in Π")));
        }
        let witness = (0..n_top).find(|&m| {
            let kernel_gens =
                if m == 0 { pi.generators().to_vec() } else { pi.congruence_kernel_generators(m) };
            kernel_gens.iter().all(|k| px.contains(k))
        });
        classes.push(PointClass { witness_level: witness, index: pi.order() / px.order() });
    }
    let n0 = classes.iter().filter_map(|c| c.witness_level).max().unwrap_or(0);
    let generic_max = classes.iter().filter(|c| c.is_generic()).map(|c| c.index).max().unwrap_or(1);
    let bound = generic_max.max(pi.order() / pi.congruence_kernel_order(n0));
    Ok(IndexBound { level: n_top, points: classes, n0, bound })
}

/// Vectors `v ∈ (Z/ℓⁿ)^r` with `g v = χ(g) v` for all `g` in a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoints {
    /// `log_ℓ` of the count.
    pub log_count: u32,
    pub count: u128,
    /// The module is `⊕ Z/ℓ^{e}` over these exponents (all `> 0`).
    pub invariants: Vec<u32>,
}

/// Bound on closure states used to spot-check multiplicativity of `χ`.
const CHARACTER_SAMPLE: usize = 100_000;

/// Fixed points of the group generated by `gens`, twisted by `χ` (unit
/// values on the generators; `None` for the trivial character).
pub fn fixed_points(gens: &[ModMatrix], chi: Option<&[u64]>) -> Result<FixedPoints> {
    let (prime, n, r) = check_generators(gens)?;
    let m = ipow(prime as u64, n);
    let chi: Vec<u64> = match chi {
        Some(c) => {
            if c.len() != gens.len() {
                return Err(Error::BadCharacter(format!("{} values for {} generators", c.len(), gens.len())));
            }
            if let Some(bad) = c.iter().find(|&&x| x % prime as u64 == 0) {
                return Err(Error::BadCharacter(format!("value {bad} is not a unit")));
            }
            c.iter().map(|x| x % m).collect()
        }
        None => vec![1; gens.len()],
    };
    check_character(gens, &chi, m)?;
    let mut rows = Vec::with_capacity(gens.len() * r);
    for (g, &c) in gens.iter().zip(&chi) {
        let d = g.sub(&ModMatrix::scalar(prime, n, r, c as i64));
        for i in 0..r {
            rows.push((0..r).map(|j| d.get(i, j)).collect::<Vec<u64>>());
        }
    }
    let s = smith::smith(prime as u64, n, &rows, r);
    let mut invariants: Vec<u32> = s.valuations.iter().copied().filter(|&v| v > 0).collect();
    invariants.extend(std::iter::repeat_n(n, r - s.valuations.len()));
    invariants.sort_unstable();
    let log_count = invariants.iter().sum();
    Ok(FixedPoints { log_count, count: (prime as u128).pow(log_count), invariants })
}

/// Walks the closure of `(g, χ(g))` pairs; a group element reached with two
/// different values means `χ` does not extend to a character.
fn check_character(gens: &[ModMatrix], chi: &[u64], m: u64) -> Result<()> {
    let id = gens[0].identity_like();
    let mut value: FxHashMap<ModMatrix, u64> = FxHashMap::default();
    value.insert(id.clone(), 1);
    let mut queue = std::collections::VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        let vx = value[&x];
        for (s, &c) in gens.iter().zip(chi) {
            let y = x.mul(s);
            let vy = vx * c % m;
            match value.get(&y) {
                Some(&old) if old != vy => {
                    return Err(Error::BadCharacter(format!("{y:?} gets values {old} and {vy}")));
                }
                Some(_) => {}
                None => {
                    if value.len() >= CHARACTER_SAMPLE {
                        return Ok(());
                    }
                    value.insert(y.clone(), vy);
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(p: u32, n: u32, r: usize, x: i64) -> ModMatrix {
        ModMatrix::scalar(p, n, r, x)
    }

    #[test]
    fn fixed_point_examples() {
        let fp = fixed_points(&[ModMatrix::identity(3, 2, 2)], None).unwrap();
        assert_eq!(fp.count, 81);
        let fp = fixed_points(&[scalar(5, 3, 2, -1)], None).unwrap();
        assert_eq!(fp.count, 1);
        let fp = fixed_points(&[scalar(5, 3, 2, 6)], None).unwrap();
        assert_eq!(fp.count, 25);
        assert_eq!(fp.invariants, vec![1, 1]);
        // χ = the scalar itself: everything is fixed.
        let fp = fixed_points(&[scalar(5, 3, 2, 6)], Some(&[6])).unwrap();
        assert_eq!(fp.count, 125u128.pow(2));
    }

    #[test]
    fn bad_character_detected() {
        // g of order 2 with χ(g) = 2: χ(g²) = 4 ≠ 1.
        let g = ModMatrix::invertible(5, 1, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(fixed_points(&[g], Some(&[2])), Err(Error::BadCharacter(_))));
    }

    #[test]
    fn procyclic_modular_levels() {
        let t = GroupTower::new(vec![scalar(3, 4, 1, 4)], 10_000).unwrap();
        let levels = modular_levels(&t, 3).unwrap();
        for l in &levels {
            assert_eq!(l.subgroups.len(), 1);
        }
        // Π = Π(1) here, so nothing lies between Π(1) and Π(0) at n = 1.
        assert!(!levels[0].congruence_description);
        assert_eq!(first_coinciding_level(&levels), Some(2));
        assert_eq!(levels[0].indices, vec![3]);
    }

    #[test]
    fn diagonal_modular_levels() {
        let gens = vec![
            ModMatrix::invertible(3, 3, &[vec![4, 0], vec![0, 1]]).unwrap(),
            ModMatrix::invertible(3, 3, &[vec![1, 0], vec![0, 4]]).unwrap(),
        ];
        let t = GroupTower::new(gens, 10_000).unwrap();
        let levels = modular_levels(&t, 2).unwrap();
        assert_eq!(levels[0].subgroups.len(), 5);
    }

    #[test]
    fn index_bound_examples() {
        let gens = vec![
            ModMatrix::invertible(3, 3, &[vec![2, 0], vec![0, 1]]).unwrap(),
            ModMatrix::invertible(3, 3, &[vec![1, 1], vec![0, 1]]).unwrap(),
        ];
        let t = GroupTower::new(gens.clone(), 100_000).unwrap();
        let b = uniform_index_bound(&t, &[gens.clone()]).unwrap();
        assert_eq!(b.points[0].witness_level, Some(0));
        assert_eq!(b.bound, 1);
        let pi1 = t.layered().unwrap().congruence_kernel_generators(1);
        let b = uniform_index_bound(&t, &[pi1]).unwrap();
        assert_eq!(b.points[0].witness_level, Some(1));
        assert_eq!(b.bound, 6);
        // the diagonal part alone never contains a congruence kernel
        let b = uniform_index_bound(&t, &[vec![gens[0].clone()]]).unwrap();
        assert!(!b.points[0].is_generic());
        assert_eq!(b.bound, 1);
    }
}
