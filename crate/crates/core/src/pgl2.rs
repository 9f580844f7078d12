//! `PGL₂(F_q)` as a permutation group on the projective line, and the
//! classification of its subgroups.

use std::fmt;

use crate::arith::{factor, ipow, is_power_of, prime_power};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};
use crate::lattice::{self, subgroup_as_group};
use crate::perm::Perm;

/// Default bound on `q`.
pub const Q_CAP: u64 = 16;

/// `F_{p^e}` with elements encoded as base-`p` digit strings of polynomial
/// coefficients (constant term first).
#[derive(Clone, Debug)]
pub struct FiniteField {
    pub p: u64,
    pub e: u32,
    pub q: u64,
    /// Coefficients of the monic modulus, constant term first (length `e + 1`).
    pub modulus: Vec<u64>,
    add: Vec<u32>,
    mul: Vec<u32>,
}

/// Pinned irreducibles: `x²+x+1`, `x³+x+1`, `x²+1`, `x⁴+x+1`.
fn pinned_modulus(p: u64, e: u32) -> Option<Vec<u64>> {
    match (p, e) {
        (_, 1) => Some(vec![0, 1]),
        (2, 2) => Some(vec![1, 1, 1]),
        (2, 3) => Some(vec![1, 1, 0, 1]),
        (3, 2) => Some(vec![1, 0, 1]),
        (2, 4) => Some(vec![1, 1, 0, 0, 1]),
        _ => None,
    }
}

fn digits(x: u64, p: u64, e: u32) -> Vec<u64> {
    (0..e).map(|i| x / ipow(p, i) % p).collect()
}

fn undigits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of two polynomials over `F_p` modulo a monic `modulus`.
fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            for (i, &m) in modulus.iter().enumerate() {
                prod[k - e + i] = (prod[k - e + i] + p - c * m % p) % p;
            }
        }
    }
    prod.truncate(e);
    prod
}

/// First monic irreducible of degree `e` in lexicographic order, found by
/// trial division by every monic polynomial of degree `≤ e/2`.
fn search_modulus(p: u64, e: u32) -> Vec<u64> {
    'outer: for low in 0..ipow(p, e) {
        let mut m = digits(low, p, e);
        m.push(1);
        for d in 1..=e / 2 {
            for f in 0..ipow(p, d) {
                let mut div = digits(f, p, d);
                div.push(1);
                if poly_divides(&div, &m, p) {
                    continue 'outer;
                }
            }
        }
        return m;
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_divides(d: &[u64], m: &[u64], p: u64) -> bool {
    let mut r = m.to_vec();
    let dd = d.len() - 1;
    for k in (dd..r.len()).rev() {
        let c = r[k];
        if c != 0 {
            for (i, &x) in d.iter().enumerate() {
                r[k - dd + i] = (r[k - dd + i] + p - c * x % p) % p;
            }
        }
    }
    r[..dd].iter().all(|&x| x == 0)
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let modulus = pinned_modulus(p, e).unwrap_or_else(|| search_modulus(p, e));
        let mut add = vec![0u32; (q * q) as usize];
        let mut mul = vec![0u32; (q * q) as usize];
        for a in 0..q {
            let da = digits(a, p, e);
            for b in 0..q {
                let db = digits(b, p, e);
                let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&s, p) as u32;
                let m = if e == 1 { vec![a * b % p] } else { poly_mulmod(&da, &db, &modulus, p) };
                mul[(a * q + b) as usize] = undigits(&m, p) as u32;
            }
        }
        Ok(FiniteField { p, e, q, modulus, add, mul })
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        self.add[(a * self.q + b) as usize] as u64
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.mul[(a * self.q + b) as usize] as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        (0..self.q).find(|&b| self.add(a, b) == 0).unwrap()
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        (1..self.q).find(|&b| self.mul(a, b) == 1)
    }

    /// Smallest generator of the multiplicative group.
    pub fn primitive_element(&self) -> u64 {
        let n = self.q - 1;
        let primes: Vec<u64> = factor(n).into_iter().map(|(r, _)| r).collect();
        (1..self.q)
            .find(|&a| primes.iter().all(|&r| self.pow(a, n / r) != 1))
            .expect("multiplicative group is cyclic")
    }

    pub fn pow(&self, a: u64, mut k: u64) -> u64 {
        let (mut acc, mut base) = (1, a);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }
}

/// `PGL₂(F_q)` acting on `P¹(F_q) = F_q ∪ {∞}`; the point `q` is `∞`.
#[derive(Clone, Debug)]
pub struct Pgl2Group {
    pub q: u64,
    pub field: FiniteField,
    pub group: FiniteGroup<Perm>,
}

/// Permutation of `x ↦ (ax + b)/(cx + d)` on `P¹(F_q)`, or `None` if singular.
pub fn mobius(f: &FiniteField, a: u64, b: u64, c: u64, d: u64) -> Option<Perm> {
    let q = f.q;
    let det = f.add(f.mul(a, d), f.neg(f.mul(b, c)));
    if det == 0 {
        return None;
    }
    let images = (0..=q)
        .map(|x| {
            let (num, den) = if x == q { (a, c) } else { (f.add(f.mul(a, x), b), f.add(f.mul(c, x), d)) };
            match f.inv(den) {
                Some(i) => f.mul(num, i) as u32,
                None => q as u32,
            }
        })
        .collect();
    Some(Perm::from_images(images))
}

impl Pgl2Group {
    pub fn element_of(&self, a: u64, b: u64, c: u64, d: u64) -> Option<u32> {
        mobius(&self.field, a, b, c, d).and_then(|p| self.group.index_of(&p))
    }
}

/// Generated by `x ↦ x + 1`, `x ↦ ωx` and `x ↦ 1/x`.
pub fn build_pgl2(q: u64, cap: u64) -> Result<Pgl2Group> {
    if q > cap {
        return Err(Error::CapExceeded { what: "field size q", cap: cap as usize });
    }
    let field = FiniteField::new(q)?;
    let omega = field.primitive_element();
    let gens: Vec<Perm> = [(1, 1, 0, 1), (omega, 0, 0, 1), (0, 1, 1, 0)]
        .into_iter()
        .map(|(a, b, c, d)| mobius(&field, a, b, c, d).unwrap())
        .collect();
    let group = FiniteGroup::generate(Perm::identity(q as usize + 1), &gens, (q * q * q) as usize)?;
    assert_eq!(group.order() as u64, q * q * q - q, "PGL₂ order");
    Ok(Pgl2Group { q, field, group })
}

/// The subgroup types of `PGL₂(F̄_p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubgroupClass {
    Cyclic(u64),
    Dihedral(u64),
    A4,
    S4,
    A5,
    /// Elementary abelian `p^a` extended by cyclic of order `m` prime to `p`.
    ElemAbelianByCyclic(u64, u64),
    Psl2(u64),
    Pgl2(u64),
}

impl fmt::Display for SubgroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupClass::Cyclic(m) => write!(f, "C{m}"),
            SubgroupClass::Dihedral(n) => write!(f, "D{n}"),
            SubgroupClass::A4 => write!(f, "A4"),
            SubgroupClass::S4 => write!(f, "S4"),
            SubgroupClass::A5 => write!(f, "A5"),
            SubgroupClass::ElemAbelianByCyclic(pa, m) => write!(f, "E{pa}:C{m}"),
            SubgroupClass::Psl2(q) => write!(f, "PSL2({q})"),
            SubgroupClass::Pgl2(q) => write!(f, "PGL2({q})"),
        }
    }
}

fn cyclic_test(h: &FiniteGroup<Perm>) -> Option<SubgroupClass> {
    let n = h.order() as u64;
    (0..n as u32).any(|x| h.element_order(x) == n).then_some(SubgroupClass::Cyclic(n))
}

/// Rotation subgroup and a reflection for a dihedral group of order `≥ 4`.
fn dihedral_parts(h: &FiniteGroup<Perm>) -> Option<(u32, u32)> {
    let n = h.order() as u64;
    if n < 4 || n % 2 == 1 {
        return None;
    }
    let m = n / 2;
    for r in 0..n as u32 {
        if h.element_order(r) != m {
            continue;
        }
        let rot = h.subgroup(&[r]);
        let rinv = h.inv(r);
        if let Some(s) = (0..n as u32)
            .find(|&s| !rot.contains(s) && h.element_order(s) == 2 && h.conjugate(s, r) == rinv)
        {
            return Some((r, s));
        }
    }
    None
}

fn dihedral_test(h: &FiniteGroup<Perm>) -> Option<SubgroupClass> {
    dihedral_parts(h).map(|_| SubgroupClass::Dihedral(h.order() as u64))
}

fn polyhedral_test(h: &FiniteGroup<Perm>) -> Option<SubgroupClass> {
    let whole = h.whole();
    let d = h.derived(&whole);
    match h.order() {
        12 if d.order() == 4 => Some(SubgroupClass::A4),
        24 if d.order() == 12 && h.derived(&d).order() == 4 => Some(SubgroupClass::S4),
        60 if d.order() == 60 => Some(SubgroupClass::A5),
        _ => None,
    }
}

fn elem_abelian_by_cyclic_test(h: &FiniteGroup<Perm>, p: u64) -> Option<SubgroupClass> {
    let n = h.order() as u64;
    let members: Vec<u32> = (0..n as u32).filter(|&x| is_power_of(h.element_order(x), p)).collect();
    let sylow = h.subgroup_from_members(&members).ok()?;
    let pa = sylow.order() as u64;
    let m = n / pa;
    if m % p == 0 || !h.is_abelian_subgroup(&sylow) {
        return None;
    }
    if sylow.members().iter().any(|&x| h.pow(x, p) != h.identity()) {
        return None;
    }
    let cyclic = (0..n as u32).any(|x| {
        let mut y = x;
        let mut k = 1;
        while !sylow.contains(y) {
            y = h.mul(y, x);
            k += 1;
        }
        k == m
    });
    cyclic.then_some(SubgroupClass::ElemAbelianByCyclic(pa, m))
}

fn psl_order(q: u64) -> u64 {
    (q * q * q - q) / if q % 2 == 0 { 1 } else { 2 }
}

fn field_sizes(p: u64, n: u64) -> impl Iterator<Item = u64> {
    (1..).map(move |r| ipow(p, r)).take_while(move |&q| q * q * q - q <= 2 * n)
}

fn psl_test(h: &FiniteGroup<Perm>, p: u64) -> Option<SubgroupClass> {
    let n = h.order() as u64;
    let q = field_sizes(p, n).find(|&q| psl_order(q) == n)?;
    (h.derived(&h.whole()).order() as u64 == n).then_some(SubgroupClass::Psl2(q))
}

fn pgl_test(h: &FiniteGroup<Perm>, p: u64) -> Option<SubgroupClass> {
    let n = h.order() as u64;
    let q = field_sizes(p, n).find(|&q| q * q * q - q == n)?;
    let d = h.derived(&h.whole());
    if d.order() as u64 != psl_order(q) {
        return None;
    }
    let inner = subgroup_as_group(h, &d);
    (q <= 3 || inner.derived(&inner.whole()).order() == d.order()).then_some(SubgroupClass::Pgl2(q))
}

/// Every class of the taxonomy that `s` satisfies, in precedence order.
pub fn matching_classes(g: &Pgl2Group, s: &Subgroup) -> Vec<SubgroupClass> {
    let h = subgroup_as_group(&g.group, s);
    let p = g.field.p;
    [
        cyclic_test(&h),
        dihedral_test(&h),
        polyhedral_test(&h),
        elem_abelian_by_cyclic_test(&h, p),
        psl_test(&h, p),
        pgl_test(&h, p),
    ]
    .into_iter()
    .flatten()
    .collect()
}

/// The first matching class under the precedence
/// Cyclic > Dihedral > {A4, S4, A5} > ElemAbelianByCyclic > PSL2 > PGL2.
pub fn classify_subgroup(g: &Pgl2Group, s: &Subgroup) -> Result<SubgroupClass> {
    matching_classes(g, s).into_iter().next().ok_or(Error::Unclassifiable { order: s.order() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtlasRow {
    pub class: SubgroupClass,
    pub order: usize,
    /// Number of conjugacy classes of subgroups of this type.
    pub count: usize,
}

/// Conjugacy classes of subgroups grouped by type, ordered by (order, type).
pub fn atlas(g: &Pgl2Group) -> Result<Vec<AtlasRow>> {
    let mut rows: Vec<AtlasRow> = Vec::new();
    for c in lattice::subgroup_classes(&g.group, lattice::LATTICE_CAP)? {
        let class = classify_subgroup(g, &c.representative)?;
        match rows.iter_mut().find(|r| r.class == class) {
            Some(r) => r.count += 1,
            None => rows.push(AtlasRow { class, order: c.representative.order(), count: 1 }),
        }
    }
    rows.sort_by_key(|r| (r.order, r.class));
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllSubgroupReport {
    pub q: u64,
    pub ell: u64,
    pub counts: Vec<(SubgroupClass, usize)>,
    /// Every subgroup is cyclic, or `ℓ = 2` and dihedral.
    pub all_cyclic_or_dihedral: bool,
    /// Dihedral `2`-groups checked to contain a normal cyclic subgroup of
    /// index 4 with Klein four quotient.
    pub dihedral_sequences_verified: usize,
}

/// Checks the `ℓ`-subgroups of `PGL₂(F_q)` for `ℓ ∤ q`.
pub fn verify_ell_subgroups(g: &Pgl2Group, ell: u64) -> Result<EllSubgroupReport> {
    if g.q % ell == 0 {
        return Err(Error::NotPrimePower(ell));
    }
    let mut counts: Vec<(SubgroupClass, usize)> = Vec::new();
    let mut ok = true;
    let mut verified = 0;
    for c in lattice::subgroup_classes(&g.group, lattice::LATTICE_CAP)? {
        let s = c.representative;
        if !is_power_of(s.order() as u64, ell) {
            continue;
        }
        let class = classify_subgroup(g, &s)?;
        match class {
            SubgroupClass::Cyclic(_) => {}
            SubgroupClass::Dihedral(_) if ell == 2 => {
                if dihedral_sequence_holds(g, &s) {
                    verified += 1;
                } else {
                    ok = false;
                }
            }
            _ => ok = false,
        }
        match counts.iter_mut().find(|(k, _)| *k == class) {
            Some((_, n)) => *n += 1,
            None => counts.push((class, 1)),
        }
    }
    counts.sort();
    Ok(EllSubgroupReport { q: g.q, ell, counts, all_cyclic_or_dihedral: ok, dihedral_sequences_verified: verified })
}

/// `⟨r²⟩` is normal and cyclic with quotient Klein four.
fn dihedral_sequence_holds(g: &Pgl2Group, s: &Subgroup) -> bool {
    let h = subgroup_as_group(&g.group, s);
    let Some((r, _)) = dihedral_parts(&h) else { return false };
    let c = h.subgroup(&[h.mul(r, r)]);
    if !h.is_normal(&c) || c.order() * 4 != h.order() {
        return false;
    }
    // The quotient has order 4 and exponent 2.
    (0..h.order() as u32).all(|x| c.contains(h.mul(x, x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let f = FiniteField::new(q).unwrap();
            for a in 1..q {
                let inv = f.inv(a).expect("field");
                assert_eq!(f.mul(a, inv), 1);
            }
            assert_eq!(f.pow(f.primitive_element(), q - 1), 1);
        }
        assert!(matches!(FiniteField::new(6), Err(Error::NotPrimePower(6))));
    }

    #[test]
    fn orders() {
        for (q, n) in [(2, 6), (3, 24), (4, 60), (5, 120), (7, 336), (8, 504), (9, 720)] {
            assert_eq!(build_pgl2(q, Q_CAP).unwrap().group.order(), n);
        }
        assert!(matches!(build_pgl2(17, Q_CAP), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn small_classifications() {
        let g = build_pgl2(5, Q_CAP).unwrap();
        assert_eq!(classify_subgroup(&g, &g.group.trivial()).unwrap(), SubgroupClass::Cyclic(1));
        let u = g.element_of(1, 1, 0, 1).unwrap();
        let s = g.group.subgroup(&[u]);
        assert_eq!(
            matching_classes(&g, &s),
            vec![SubgroupClass::Cyclic(5), SubgroupClass::ElemAbelianByCyclic(5, 1)]
        );
        assert_eq!(classify_subgroup(&g, &g.group.whole()).unwrap(), SubgroupClass::Pgl2(5));
        let g3 = build_pgl2(3, Q_CAP).unwrap();
        let m = matching_classes(&g3, &g3.group.whole());
        assert_eq!(m, vec![SubgroupClass::S4, SubgroupClass::Pgl2(3)]);
        let g4 = build_pgl2(4, Q_CAP).unwrap();
        assert_eq!(classify_subgroup(&g4, &g4.group.whole()).unwrap(), SubgroupClass::A5);
    }

    #[test]
    fn ell_subgroups_q7() {
        let g = build_pgl2(7, Q_CAP).unwrap();
        let r = verify_ell_subgroups(&g, 2).unwrap();
        assert!(r.all_cyclic_or_dihedral);
        assert!(r.counts.iter().any(|(c, _)| matches!(c, SubgroupClass::Dihedral(_))));
        assert!(r.counts.iter().any(|(c, _)| matches!(c, SubgroupClass::Cyclic(_))));
        assert!(r.dihedral_sequences_verified > 0);
        let r3 = verify_ell_subgroups(&build_pgl2(5, Q_CAP).unwrap(), 3).unwrap();
        assert!(r3.counts.iter().all(|(c, _)| matches!(c, SubgroupClass::Cyclic(_))));
    }
}
