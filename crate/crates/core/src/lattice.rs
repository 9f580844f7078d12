//! Subgroup lattices up to conjugacy, maximal subgroups, Frattini subgroups
//! and abelianization invariants for enumerated groups.

use rustc_hash::FxHashSet;

use crate::arith::{factor, ipow, prime_power, valuation};
use crate::error::{Error, Result};
use crate::group::{subgroup_unchecked, FiniteGroup, GroupElement, Subgroup};

/// Default bound on the group order for lattice computations.
pub const LATTICE_CAP: usize = 10_000;

/// Bound on the number of subgroups (all conjugates) a lattice may hold.
const MAX_SUBGROUPS: usize = 2_000_000;

/// A conjugacy class of subgroups.
#[derive(Clone, Debug)]
pub struct SubgroupClass {
    pub representative: Subgroup,
    /// Number of conjugates.
    pub size: usize,
}

/// One generator per cyclic subgroup of prime-power order, ascending.
pub fn cyclic_generators<E: GroupElement>(g: &FiniteGroup<E>) -> Vec<u32> {
    let mut seen = FxHashSet::default();
    let mut out = Vec::new();
    for x in 0..g.order() as u32 {
        if x == g.identity() || prime_power(g.element_order(x)).is_none() {
            continue;
        }
        let c = g.subgroup(&[x]);
        if seen.insert(c.members().to_vec()) {
            out.push(x);
        }
    }
    out
}

/// All distinct conjugates of `h`.
pub fn conjugates<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup) -> Vec<Subgroup> {
    let mut seen = FxHashSet::default();
    let mut out = Vec::new();
    for x in 0..g.order() as u32 {
        let c = g.conjugate_subgroup(x, h);
        if seen.insert(c.members().to_vec()) {
            out.push(c);
        }
    }
    out
}

/// Subgroups of `g` up to conjugacy, by cyclic extension: every subgroup is
/// reached from a smaller class representative by adjoining one cyclic
/// subgroup of prime-power order. Sorted by (order, members).
pub fn subgroup_classes<E: GroupElement>(g: &FiniteGroup<E>, cap: usize) -> Result<Vec<SubgroupClass>> {
    if g.order() > cap {
        return Err(Error::CapExceeded { what: "subgroup lattice group order", cap });
    }
    let cyclics = cyclic_generators(g);
    let mut seen: FxHashSet<Vec<u32>> = FxHashSet::default();
    let mut classes: Vec<SubgroupClass> = Vec::new();
    let trivial = g.trivial();
    seen.insert(trivial.members().to_vec());
    classes.push(SubgroupClass { representative: trivial, size: 1 });
    let mut head = 0;
    while head < classes.len() {
        let h = classes[head].representative.clone();
        head += 1;
        let hgens = g.subgroup_generators(&h);
        for &c in &cyclics {
            if h.contains(c) {
                continue;
            }
            let mut gens = hgens.clone();
            gens.push(c);
            let k = g.subgroup(&gens);
            if seen.contains(k.members()) {
                continue;
            }
            let conj = conjugates(g, &k);
            for s in &conj {
                seen.insert(s.members().to_vec());
            }
            if seen.len() > MAX_SUBGROUPS {
                return Err(Error::CapExceeded { what: "number of subgroups", cap: MAX_SUBGROUPS });
            }
            classes.push(SubgroupClass { representative: k, size: conj.len() });
        }
    }
    classes.sort_by(|a, b| {
        (a.representative.order(), a.representative.members())
            .cmp(&(b.representative.order(), b.representative.members()))
    });
    Ok(classes)
}

/// Every subgroup of `g` (all conjugates expanded).
pub fn all_subgroups<E: GroupElement>(g: &FiniteGroup<E>, cap: usize) -> Result<Vec<Subgroup>> {
    let mut out = Vec::new();
    for c in subgroup_classes(g, cap)? {
        out.extend(conjugates(g, &c.representative));
    }
    out.sort_by(|a, b| (a.order(), a.members()).cmp(&(b.order(), b.members())));
    Ok(out)
}

/// Representatives of the conjugacy classes of maximal subgroups.
pub fn maximal_subgroup_classes<E: GroupElement>(g: &FiniteGroup<E>, cap: usize) -> Result<Vec<Subgroup>> {
    let cyclics = cyclic_generators(g);
    let mut out = Vec::new();
    for c in subgroup_classes(g, cap)? {
        let m = c.representative;
        if m.order() == g.order() {
            continue;
        }
        let mgens = g.subgroup_generators(&m);
        let maximal = cyclics.iter().filter(|&&x| !m.contains(x)).all(|&x| {
            let mut gens = mgens.clone();
            gens.push(x);
            g.subgroup(&gens).order() == g.order()
        });
        if maximal {
            out.push(m);
        }
    }
    Ok(out)
}

/// The subgroup `h` as a group in its own right, with the embedding of its
/// indices into `g` (index `i` of the new group is `h.members()[i]`).
pub fn subgroup_as_group<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup) -> FiniteGroup<E> {
    let elements: Vec<E> = h.members().iter().map(|&i| g.element(i).clone()).collect();
    let gens: Vec<E> = g.subgroup_generators(h).iter().map(|&i| g.element(i).clone()).collect();
    FiniteGroup::from_closed_elements(elements, &gens)
}

fn lift_subgroup<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup, inner: &Subgroup) -> Subgroup {
    let members: Vec<u32> = inner.members().iter().map(|&i| h.members()[i as usize]).collect();
    subgroup_unchecked(members, g.order())
}

/// Frattini subgroup of `h` as the intersection of its maximal subgroups.
pub fn frattini_by_maximal<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup, cap: usize) -> Result<Subgroup> {
    let inner = subgroup_as_group(g, h);
    let mut phi = inner.whole();
    for m in maximal_subgroup_classes(&inner, cap)? {
        phi = phi.intersection(&inner.core_in(&inner.whole(), &m));
    }
    Ok(lift_subgroup(g, h, &phi))
}

/// `h^p [h, h]` for a `p`-group `h`: the normal closure in `h` of the
/// `p`-th powers and pairwise commutators of a generating set.
pub fn frattini_of_p_group<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup, p: u64) -> Subgroup {
    let gens = g.subgroup_generators(h);
    let mut set: Vec<u32> = gens.iter().map(|&x| g.pow(x, p)).collect();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            set.push(g.commutator(a, b));
        }
    }
    g.normal_closure_in(&gens, &set)
}

/// Frattini subgroup of `h`: the power-commutator formula when `h` is a
/// `p`-group, the maximal-subgroup intersection otherwise.
pub fn frattini<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup, cap: usize) -> Result<Subgroup> {
    if h.order() == 1 {
        return Ok(h.clone());
    }
    match prime_power(h.order() as u64) {
        Some((p, _)) => Ok(frattini_of_p_group(g, h, p)),
        None => frattini_by_maximal(g, h, cap),
    }
}

/// Invariant factors `d_1 | d_2 | …` (all `> 1`) of `h / [h, h]`.
pub fn abelianization_invariants<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup) -> Vec<u64> {
    let d = g.derived(h);
    let order = (h.order() / d.order()) as u64;
    let mut columns: Vec<Vec<u64>> = Vec::new();
    for (p, e) in factor(order) {
        // r[k] = log_p |A[p^k]|
        let mut r = vec![0u32];
        let mut k = 1;
        while *r.last().unwrap() < e {
            let pk = ipow(p, k);
            let count = h.members().iter().filter(|&&x| d.contains(g.pow(x, pk))).count() / d.order();
            r.push(valuation(count as u64, p));
            k += 1;
        }
        // number of cyclic factors of order ≥ p^k is r[k] - r[k-1]
        let ge: Vec<u32> = (1..r.len()).map(|k| r[k] - r[k - 1]).collect();
        let mut exps = Vec::new();
        for k in 0..ge.len() {
            let next = ge.get(k + 1).copied().unwrap_or(0);
            for _ in 0..ge[k] - next {
                exps.push(k as u32 + 1);
            }
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        columns.push(exps.into_iter().map(|x| ipow(p, x)).collect());
    }
    let len = columns.iter().map(Vec::len).max().unwrap_or(0);
    let mut out: Vec<u64> = (0..len)
        .map(|i| columns.iter().map(|c| c.get(i).copied().unwrap_or(1)).product())
        .collect();
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn cyclic(n: u32) -> FiniteGroup<Perm> {
        let c = Perm::from_images((1..n).chain([0]).collect());
        FiniteGroup::generate(Perm::identity(n as usize), &[c], 1000).unwrap()
    }

    fn s4() -> FiniteGroup<Perm> {
        let a = Perm::from_images(vec![1, 2, 3, 0]);
        let b = Perm::from_images(vec![1, 0, 2, 3]);
        FiniteGroup::generate(Perm::identity(4), &[a, b], 1000).unwrap()
    }

    #[test]
    fn cyclic_lattice() {
        let g = cyclic(4);
        assert_eq!(subgroup_classes(&g, 100).unwrap().len(), 3);
        let g = cyclic(12);
        assert_eq!(subgroup_classes(&g, 100).unwrap().len(), 6);
        assert_eq!(abelianization_invariants(&g, &g.whole()), vec![12]);
    }

    #[test]
    fn s4_lattice() {
        let g = s4();
        let classes = subgroup_classes(&g, 100).unwrap();
        assert_eq!(classes.len(), 11);
        assert_eq!(classes.iter().map(|c| c.size).sum::<usize>(), 30);
        assert!(frattini(&g, &g.whole(), 100).unwrap().is_trivial());
        assert_eq!(abelianization_invariants(&g, &g.whole()), vec![2]);
    }

    #[test]
    fn frattini_paths_agree_on_cyclic_p_group() {
        let g = cyclic(8);
        let a = frattini_of_p_group(&g, &g.whole(), 2);
        let b = frattini_by_maximal(&g, &g.whole(), 100).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.order(), 4);
    }

    #[test]
    fn klein_invariants() {
        let a = Perm::from_images(vec![1, 0, 2, 3]);
        let b = Perm::from_images(vec![0, 1, 3, 2]);
        let g = FiniteGroup::generate(Perm::identity(4), &[a, b], 10).unwrap();
        assert_eq!(abelianization_invariants(&g, &g.whole()), vec![2, 2]);
    }
}
