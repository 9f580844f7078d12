//! Cosets, double cosets, stabilizers and the fiber-count lemma.

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::group::{subgroup_unchecked, FiniteGroup, GroupElement, Subgroup};
use crate::modular_system::verify_reduction_assumptions;
use crate::perm::Perm;
use crate::tower::GroupTower;

/// Left cosets `xC` of `C ≤ G`.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    /// Minimal element of each coset, ascending.
    pub representatives: Vec<u32>,
    /// Coset number of every element of `G`.
    pub labels: Vec<u32>,
}

impl CosetSpace {
    pub fn size(&self) -> usize {
        self.representatives.len()
    }
}

pub fn left_cosets<E: GroupElement>(g: &FiniteGroup<E>, c: &Subgroup) -> Result<CosetSpace> {
    g.check_subgroup(c)?;
    let (labels, representatives) = g.left_coset_labels(c);
    Ok(CosetSpace { representatives, labels })
}

/// The partition of `G` into classes `HxC`.
#[derive(Clone, Debug)]
pub struct DoubleCosetDecomposition {
    /// `(minimal element, size)` per class, ordered by representative.
    pub classes: Vec<(u32, usize)>,
    pub total: usize,
}

impl DoubleCosetDecomposition {
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

/// Orbits of `h` on the cosets of a coset space, as coset-number lists.
pub fn orbits_on_cosets<E: GroupElement>(
    g: &FiniteGroup<E>,
    h: &Subgroup,
    space: &CosetSpace,
) -> Vec<Vec<u32>> {
    let gens = g.subgroup_generators(h);
    let mut orbit_of = vec![u32::MAX; space.size()];
    let mut orbits = Vec::new();
    for start in 0..space.size() as u32 {
        if orbit_of[start as usize] != u32::MAX {
            continue;
        }
        let id = orbits.len() as u32;
        orbit_of[start as usize] = id;
        let mut orbit = vec![start];
        let mut head = 0;
        while head < orbit.len() {
            let rep = space.representatives[orbit[head] as usize];
            head += 1;
            for &s in &gens {
                let k = space.labels[g.mul(s, rep) as usize];
                if orbit_of[k as usize] == u32::MAX {
                    orbit_of[k as usize] = id;
                    orbit.push(k);
                }
            }
        }
        orbits.push(orbit);
    }
    orbits
}

/// Number of double cosets `H\G/C`, without building the decomposition.
pub fn double_coset_count<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup, space: &CosetSpace) -> usize {
    orbits_on_cosets(g, h, space).len()
}

pub fn double_cosets<E: GroupElement>(
    g: &FiniteGroup<E>,
    h: &Subgroup,
    c: &Subgroup,
) -> Result<DoubleCosetDecomposition> {
    g.check_subgroup(h)?;
    let space = left_cosets(g, c)?;
    let mut classes: Vec<(u32, usize)> = orbits_on_cosets(g, h, &space)
        .into_iter()
        .map(|orbit| {
            let rep = orbit.iter().map(|&k| space.representatives[k as usize]).min().unwrap();
            (rep, orbit.len() * c.order())
        })
        .collect();
    classes.sort_unstable();
    Ok(DoubleCosetDecomposition { classes, total: g.order() })
}

/// `{i ∈ I : i x C = x C} = I ∩ x C x⁻¹`.
pub fn stabilizer_on_cosets<E: GroupElement>(g: &FiniteGroup<E>, i: &Subgroup, x: u32, c: &Subgroup) -> Subgroup {
    let xi = g.inv(x);
    let members = i.members().iter().copied().filter(|&y| c.contains(g.mul(g.mul(xi, y), x))).collect();
    subgroup_unchecked(members, g.order())
}

/// Image of `g` acting on the left cosets of `c`: a permutation group
/// isomorphic to `G/core(C)`, with the image of every element.
pub fn coset_action<E: GroupElement>(g: &FiniteGroup<E>, c: &Subgroup) -> Result<(FiniteGroup<Perm>, Vec<u32>)> {
    g.check_subgroup(c)?;
    let (labels, reps) = g.left_coset_labels(c);
    let perm_of = |x: u32| Perm::from_images(reps.iter().map(|&r| labels[g.mul(x, r) as usize]).collect());
    let gens: Vec<Perm> = g.generators().iter().map(|&x| perm_of(x)).collect();
    let q = FiniteGroup::generate(Perm::identity(reps.len()), &gens, usize::MAX)?;
    // The image is constant on cosets of the core.
    let core = g.core_in(&g.whole(), c);
    let (core_labels, core_reps) = g.left_coset_labels(&core);
    let image: Vec<u32> = core_reps.iter().map(|&r| q.index_of(&perm_of(r)).unwrap()).collect();
    Ok((q, core_labels.iter().map(|&l| image[l as usize]).collect()))
}

/// A left action of an enumerated group on `0..points`, as a table.
#[derive(Clone, Debug)]
pub struct Action {
    points: usize,
    table: Vec<u32>,
}

impl Action {
    /// Tabulates `act(g, x)`; checks the identity acts trivially and the
    /// table is compatible with multiplication by generators.
    pub fn new<E: GroupElement>(
        g: &FiniteGroup<E>,
        points: usize,
        act: impl Fn(u32, u32) -> u32,
    ) -> Result<Self> {
        let mut table = Vec::with_capacity(g.order() * points);
        for a in 0..g.order() as u32 {
            for x in 0..points as u32 {
                let y = act(a, x);
                if y as usize >= points {
                    return Err(Error::DimensionMismatch(format!("point {y} out of range")));
                }
                table.push(y);
            }
        }
        let action = Action { points, table };
        for x in 0..points as u32 {
            if action.apply(g.identity(), x) != x {
                return Err(Error::NotASubgroup("identity does not act trivially".into()));
            }
        }
        for a in 0..g.order() as u32 {
            for &s in g.generators() {
                let ab = g.mul(a, s);
                if (0..points as u32).any(|x| action.apply(ab, x) != action.apply(a, action.apply(s, x))) {
                    return Err(Error::NotASubgroup("table is not a group action".into()));
                }
            }
        }
        Ok(action)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn apply(&self, g: u32, x: u32) -> u32 {
        self.table[g as usize * self.points + x as usize]
    }

    pub fn stabilizer<E: GroupElement>(&self, g: &FiniteGroup<E>, x: u32) -> Subgroup {
        let members = (0..g.order() as u32).filter(|&a| self.apply(a, x) == x).collect();
        subgroup_unchecked(members, g.order())
    }

    /// Orbits of a subgroup, each sorted, ordered by minimal point.
    pub fn orbits<E: GroupElement>(&self, g: &FiniteGroup<E>, h: &Subgroup) -> Vec<Vec<u32>> {
        let gens = g.subgroup_generators(h);
        let mut seen = vec![false; self.points];
        let mut out = Vec::new();
        for start in 0..self.points as u32 {
            if seen[start as usize] {
                continue;
            }
            seen[start as usize] = true;
            let mut orbit = vec![start];
            let mut head = 0;
            while head < orbit.len() {
                let x = orbit[head];
                head += 1;
                for &s in &gens {
                    let y = self.apply(s, x);
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        orbit.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }
}

/// Number of `H`-orbits inside the `G`-orbit of `x`, for `H` normal in `G`:
/// `|G|·|Stab_G(x) ∩ H| / (|H|·|Stab_G(x)|)`.
pub fn fiber_size_lemma<E: GroupElement>(
    g: &FiniteGroup<E>,
    action: &Action,
    h: &Subgroup,
    x: u32,
) -> Result<u64> {
    g.check_subgroup(h)?;
    if !g.is_normal(h) {
        return Err(Error::NotNormal("H must be normal in G".into()));
    }
    let stab = action.stabilizer(g, x);
    let num = (g.order() * stab.intersection(h).order()) as u64;
    let den = (h.order() * stab.order()) as u64;
    if num % den != 0 {
        return Err(Error::NonIntegral(format!("fiber size {num}/{den}")));
    }
    Ok(num / den)
}

/// One row of [`ratio_series`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioRow {
    pub level: u32,
    pub double_cosets: usize,
    pub index: usize,
    pub ratio: Rational,
    /// `1/[I_n K_n : K_n]` with `K_n` the core of `C_n` in `Π_n`.
    pub target: Rational,
}

#[derive(Clone, Debug)]
pub struct RatioSeries {
    pub rows: Vec<RatioRow>,
    /// Ratios at the last two levels coincide.
    pub stabilized: bool,
    /// Last ratio equals the last target.
    pub matches_target: bool,
}

/// `|I_n\Π_n/C_n| / |Π_n/C_n|` per level, with the core-quotient target.
pub fn ratio_series(tower: &GroupTower, c_gens: &[crate::ModMatrix], i_gens: &[crate::ModMatrix]) -> Result<RatioSeries> {
    let report = verify_reduction_assumptions(tower, c_gens)?;
    if let Some(bad) = report.levels.iter().find(|l| l.core_stable == Some(false)) {
        return Err(Error::AssumptionViolated(format!(
            "normal core of C differs from the core of C·Π({}) at level {}",
            bad.n,
            tower.max_level()
        )));
    }
    let mut rows = Vec::new();
    for n in 1..=tower.max_level() {
        let g = tower.level(n)?;
        let c = tower.image_subgroup(n, c_gens)?;
        let i = tower.image_subgroup(n, i_gens)?;
        let space = left_cosets(g, &c)?;
        let count = double_coset_count(g, &i, &space);
        let core = g.core_in(&g.whole(), &c);
        let target = Rational::new(i.intersection(&core).order() as i128, i.order() as i128);
        rows.push(RatioRow {
            level: n,
            double_cosets: count,
            index: space.size(),
            ratio: Rational::new(count as i128, space.size() as i128),
            target,
        });
    }
    let stabilized = rows.len() >= 2 && rows[rows.len() - 1].ratio == rows[rows.len() - 2].ratio;
    let matches_target = rows.last().is_some_and(|r| r.ratio == r.target);
    Ok(RatioSeries { rows, stabilized, matches_target })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s4() -> FiniteGroup<Perm> {
        let a = Perm::from_images(vec![1, 2, 3, 0]);
        let b = Perm::from_images(vec![1, 0, 2, 3]);
        FiniteGroup::generate(Perm::identity(4), &[a, b], 1000).unwrap()
    }

    #[test]
    fn coset_counts() {
        let g = s4();
        assert_eq!(left_cosets(&g, &g.whole()).unwrap().size(), 1);
        assert_eq!(left_cosets(&g, &g.trivial()).unwrap().size(), 24);
        let c = g.subgroup(&[g.index_of(&Perm::from_images(vec![1, 2, 3, 0])).unwrap()]);
        assert_eq!(left_cosets(&g, &c).unwrap().size(), 6);
    }

    #[test]
    fn double_coset_sizes() {
        let g = s4();
        let h = g.subgroup(&[g.index_of(&Perm::from_images(vec![1, 0, 2, 3])).unwrap()]);
        let c = g.subgroup(&[g.index_of(&Perm::from_images(vec![1, 2, 0, 3])).unwrap()]);
        let d = double_cosets(&g, &h, &c).unwrap();
        assert_eq!(d.classes.iter().map(|c| c.1).sum::<usize>(), 24);
        for &(x, size) in &d.classes {
            let s = stabilizer_on_cosets(&g, &h, x, &c);
            assert_eq!(size, h.order() * c.order() / s.order());
        }
        assert_eq!(double_cosets(&g, &g.whole(), &c).unwrap().count(), 1);
        assert_eq!(double_cosets(&g, &g.trivial(), &g.trivial()).unwrap().count(), 24);
    }

    #[test]
    fn fiber_lemma_on_natural_action() {
        let g = s4();
        let act = Action::new(&g, 4, |a, x| g.element(a).apply(x)).unwrap();
        let v4 = g.normal_closure(&[g.index_of(&Perm::from_images(vec![1, 0, 3, 2])).unwrap()]);
        assert_eq!(v4.order(), 4);
        assert_eq!(fiber_size_lemma(&g, &act, &v4, 0).unwrap(), 1);
        assert_eq!(fiber_size_lemma(&g, &act, &g.trivial(), 0).unwrap(), 4);
        assert_eq!(fiber_size_lemma(&g, &act, &g.whole(), 0).unwrap(), 1);
    }
}
