//! Finite groups stored as an explicit, canonically ordered element list.
//!
//! Elements are indexed `0..order` in their `Ord` order, so every algorithm
//! built on indices is deterministic. Subgroups are index sets into a parent
//! [`FiniteGroup`]; the parent is never stored, callers pass it alongside.

use std::collections::VecDeque;
use std::fmt::Debug;
use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

/// An element of some ambient group with computable products and inverses.
pub trait GroupElement: Clone + Eq + Hash + Ord + Debug {
    fn mul(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    /// The identity of the ambient group this element lives in.
    fn identity_like(&self) -> Self;

    fn is_identity(&self) -> bool {
        *self == self.identity_like()
    }

    fn pow(&self, mut exp: u64) -> Self {
        let mut acc = self.identity_like();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    fn element_order(&self) -> u64 {
        let mut k = 1;
        let mut x = self.clone();
        while !x.is_identity() {
            x = x.mul(self);
            k += 1;
        }
        k
    }
}

/// Fixed-size bit set over element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, i: u32) -> bool {
        let i = i as usize;
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Returns true if the bit was newly set.
    #[inline]
    pub fn insert(&mut self, i: u32) -> bool {
        let i = i as usize;
        let w = &mut self.words[i / 64];
        let bit = 1u64 << (i % 64);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

/// A subgroup of a [`FiniteGroup`], as a sorted list of element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<u32>,
    mask: BitSet,
}

impl Subgroup {
    fn from_sorted(members: Vec<u32>, parent_order: usize) -> Self {
        let mut mask = BitSet::new(parent_order);
        for &m in &members {
            mask.insert(m);
        }
        Subgroup { members, mask }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    #[inline]
    pub fn contains(&self, i: u32) -> bool {
        self.mask.contains(i)
    }

    pub fn mask(&self) -> &BitSet {
        &self.mask
    }

    pub fn parent_order(&self) -> usize {
        self.mask.len()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.mask.is_subset(&other.mask)
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let members = self.members.iter().copied().filter(|&m| other.contains(m)).collect();
        Subgroup::from_sorted(members, self.parent_order())
    }
}

/// A finite group given by an explicit element list.
#[derive(Clone, Debug)]
pub struct FiniteGroup<E: GroupElement> {
    elements: Vec<E>,
    index: FxHashMap<E, u32>,
    inverses: Vec<u32>,
    generators: Vec<u32>,
    identity: u32,
    table: Option<Vec<u32>>,
}

/// Groups up to this order get a precomputed multiplication table.
pub const TABLE_LIMIT: usize = 1024;

impl<E: GroupElement> FiniteGroup<E> {
    /// Breadth-first closure of `gens` under right multiplication.
    pub fn generate(identity: E, gens: &[E], cap: usize) -> Result<Self> {
        let mut seen: FxHashMap<E, ()> = FxHashMap::default();
        let mut queue = VecDeque::new();
        seen.insert(identity.clone(), ());
        queue.push_back(identity.clone());
        while let Some(x) = queue.pop_front() {
            for s in gens {
                let y = x.mul(s);
                if !seen.contains_key(&y) {
                    if seen.len() >= cap {
                        return Err(Error::CapExceeded { what: "group order", cap });
                    }
                    seen.insert(y.clone(), ());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<E> = seen.into_keys().collect();
        elements.sort();
        Ok(Self::from_sorted_elements(elements, gens))
    }

    fn from_sorted_elements(elements: Vec<E>, gens: &[E]) -> Self {
        let index: FxHashMap<E, u32> =
            elements.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        let inverses = elements.iter().map(|e| index[&e.inverse()]).collect();
        let identity = index[&elements[0].identity_like()];
        let mut generators: Vec<u32> = gens.iter().map(|g| index[g]).collect();
        generators.sort_unstable();
        generators.dedup();
        let mut g = FiniteGroup { elements, index, inverses, generators, identity, table: None };
        if g.order() <= TABLE_LIMIT {
            let n = g.order();
            let mut table = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    table.push(g.index[&g.elements[a].mul(&g.elements[b])]);
                }
            }
            g.table = Some(table);
        }
        g
    }

    /// Builds a group from an already closed element list.
    pub fn from_closed_elements(mut elements: Vec<E>, gens: &[E]) -> Self {
        elements.sort();
        elements.dedup();
        Self::from_sorted_elements(elements, gens)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &E {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, e: &E) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    /// Indices of the generators the group was built from.
    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if let Some(t) = &self.table {
            return t[a as usize * self.elements.len() + b as usize];
        }
        let p = self.elements[a as usize].mul(&self.elements[b as usize]);
        self.index[&p]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    /// `g h g⁻¹`.
    #[inline]
    pub fn conjugate(&self, g: u32, h: u32) -> u32 {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn pow(&self, a: u32, mut exp: u64) -> u32 {
        let (mut acc, mut base) = (self.identity, a);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: u32) -> u64 {
        let (mut k, mut x) = (1, a);
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        g.iter().all(|&a| g.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_sorted((0..self.order() as u32).collect(), self.order())
    }

    pub fn trivial(&self) -> Subgroup {
        Subgroup::from_sorted(vec![self.identity], self.order())
    }

    /// Subgroup generated by the given element indices.
    pub fn subgroup(&self, gens: &[u32]) -> Subgroup {
        let mut mask = BitSet::new(self.order());
        let mut members = vec![self.identity];
        mask.insert(self.identity);
        let gens: Vec<u32> = gens.iter().copied().filter(|&g| g != self.identity).collect();
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            head += 1;
            for &s in &gens {
                let y = self.mul(x, s);
                if mask.insert(y) {
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        Subgroup { members, mask }
    }

    /// Subgroup generated by explicit elements of the ambient type.
    pub fn subgroup_of_elements(&self, gens: &[E]) -> Result<Subgroup> {
        let idx = gens
            .iter()
            .map(|g| {
                self.index_of(g)
                    .ok_or_else(|| Error::NotASubgroup(format!("{g:?} is not in the group")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.subgroup(&idx))
    }

    /// Builds a subgroup from a member list, checking closure.
    pub fn subgroup_from_members(&self, members: &[u32]) -> Result<Subgroup> {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.last().is_some_and(|&m| m as usize >= self.order()) {
            return Err(Error::NotASubgroup("index out of range".into()));
        }
        let closed = self.subgroup(&sorted);
        if closed.members != sorted {
            return Err(Error::NotASubgroup("member list is not closed".into()));
        }
        Ok(closed)
    }

    pub fn check_subgroup(&self, h: &Subgroup) -> Result<()> {
        if h.parent_order() != self.order() || !h.contains(self.identity) {
            return Err(Error::NotASubgroup("subgroup belongs to a different group".into()));
        }
        Ok(())
    }

    /// A small generating set of `h`, chosen greedily in index order.
    pub fn subgroup_generators(&self, h: &Subgroup) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut current = self.trivial();
        for &x in h.members() {
            if !current.contains(x) {
                gens.push(x);
                current = self.subgroup(&gens);
                if current.order() == h.order() {
                    break;
                }
            }
        }
        gens
    }

    /// Is `n` normalised by every element of `by` (given by generators)?
    pub fn normalizes(&self, by_gens: &[u32], n: &Subgroup) -> bool {
        by_gens
            .iter()
            .all(|&g| n.members().iter().all(|&x| n.contains(self.conjugate(g, x))))
    }

    pub fn is_normal(&self, n: &Subgroup) -> bool {
        self.normalizes(&self.generators, n)
    }

    pub fn conjugate_subgroup(&self, g: u32, h: &Subgroup) -> Subgroup {
        let mut members: Vec<u32> = h.members().iter().map(|&x| self.conjugate(g, x)).collect();
        members.sort_unstable();
        Subgroup::from_sorted(members, self.order())
    }

    /// Smallest subgroup containing `set` and normalised by `by_gens`.
    pub fn normal_closure_in(&self, by_gens: &[u32], set: &[u32]) -> Subgroup {
        let mut gens: Vec<u32> = set.to_vec();
        let mut h = self.subgroup(&gens);
        loop {
            let mut added = false;
            'scan: for &g in by_gens {
                for i in 0..gens.len() {
                    let c = self.conjugate(g, gens[i]);
                    if !h.contains(c) {
                        gens.push(c);
                        h = self.subgroup(&gens);
                        added = true;
                        break 'scan;
                    }
                }
            }
            if !added {
                return h;
            }
        }
    }

    pub fn normal_closure(&self, set: &[u32]) -> Subgroup {
        let gens = self.generators.clone();
        self.normal_closure_in(&gens, set)
    }

    /// Commutator subgroup `[A, B]` of two subgroups normalised by `self`'s
    /// generators; computed as the normal closure of generator commutators.
    pub fn commutator_of(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let ga = self.subgroup_generators(a);
        let gb = self.subgroup_generators(b);
        let mut set = Vec::new();
        for &x in &ga {
            for &y in &gb {
                set.push(self.commutator(x, y));
            }
        }
        let mut by = ga.clone();
        by.extend_from_slice(&gb);
        self.normal_closure_in(&by, &set)
    }

    /// Derived subgroup of the subgroup `h`.
    pub fn derived(&self, h: &Subgroup) -> Subgroup {
        let gens = self.subgroup_generators(h);
        let mut set = Vec::new();
        for (i, &x) in gens.iter().enumerate() {
            for &y in &gens[i + 1..] {
                set.push(self.commutator(x, y));
            }
        }
        self.normal_closure_in(&gens, &set)
    }

    pub fn is_abelian_subgroup(&self, h: &Subgroup) -> bool {
        let g = self.subgroup_generators(h);
        g.iter().all(|&a| g.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Product set `A·B`, required to be a subgroup.
    pub fn product(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut gens = self.subgroup_generators(a);
        gens.extend(self.subgroup_generators(b));
        self.subgroup(&gens)
    }

    /// Left cosets `g·C`: a label per element and the minimal representative
    /// of each coset, in increasing order.
    pub fn left_coset_labels(&self, c: &Subgroup) -> (Vec<u32>, Vec<u32>) {
        let mut label = vec![u32::MAX; self.order()];
        let mut reps = Vec::with_capacity(self.order() / c.order());
        for g in 0..self.order() as u32 {
            if label[g as usize] != u32::MAX {
                continue;
            }
            let k = reps.len() as u32;
            reps.push(g);
            for &x in c.members() {
                label[self.mul(g, x) as usize] = k;
            }
        }
        (label, reps)
    }

    /// Normal core of `h` in the subgroup generated by `by_gens`, computed as
    /// the kernel of the action of `h` on cosets `A/h`.
    pub fn core_in(&self, ambient: &Subgroup, h: &Subgroup) -> Subgroup {
        let (label, _) = self.left_coset_labels(h);
        let mut reps = Vec::new();
        let mut seen = rustc_hash::FxHashSet::default();
        for &a in ambient.members() {
            if seen.insert(label[a as usize]) {
                reps.push(a);
            }
        }
        let members: Vec<u32> = h
            .members()
            .iter()
            .copied()
            .filter(|&x| reps.iter().all(|&r| label[self.mul(x, r) as usize] == label[r as usize]))
            .collect();
        Subgroup::from_sorted(members, self.order())
    }

    /// Image of a subgroup under a homomorphism given as an index map.
    pub fn image_of<F: GroupElement>(
        &self,
        target: &FiniteGroup<F>,
        map: &[u32],
        h: &Subgroup,
    ) -> Subgroup {
        let mut members: Vec<u32> = h.members().iter().map(|&x| map[x as usize]).collect();
        members.sort_unstable();
        members.dedup();
        Subgroup::from_sorted(members, target.order())
    }

    /// Preimage of a subgroup of `target` under an index map.
    pub fn preimage_of(&self, map: &[u32], h: &Subgroup) -> Subgroup {
        let members = (0..self.order() as u32).filter(|&x| h.contains(map[x as usize])).collect();
        Subgroup::from_sorted(members, self.order())
    }

    pub fn subgroup_of_mask(&self, mask: &BitSet) -> Subgroup {
        let members = (0..self.order() as u32).filter(|&x| mask.contains(x)).collect();
        Subgroup::from_sorted(members, self.order())
    }
}

/// Builds a sorted subgroup directly; members must form a subgroup.
pub(crate) fn subgroup_unchecked(members: Vec<u32>, parent_order: usize) -> Subgroup {
    debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
    Subgroup::from_sorted(members, parent_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn s3() -> FiniteGroup<Perm> {
        let a = Perm::from_images(vec![1, 2, 0]);
        let b = Perm::from_images(vec![1, 0, 2]);
        FiniteGroup::generate(Perm::identity(3), &[a, b], 100).unwrap()
    }

    #[test]
    fn closure_and_cosets() {
        let g = s3();
        assert_eq!(g.order(), 6);
        let c = g.subgroup(&[g.index_of(&Perm::from_images(vec![1, 0, 2])).unwrap()]);
        let (label, reps) = g.left_coset_labels(&c);
        assert_eq!(reps.len(), 3);
        assert!(label.iter().all(|&l| l < 3));
        assert!(g.core_in(&g.whole(), &c).is_trivial());
        let a3 = g.derived(&g.whole());
        assert_eq!(a3.order(), 3);
        assert!(g.is_normal(&a3));
    }

    #[test]
    fn cap_is_enforced() {
        let a = Perm::from_images(vec![1, 2, 3, 0]);
        let err = FiniteGroup::generate(Perm::identity(4), &[a], 3).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }
}
