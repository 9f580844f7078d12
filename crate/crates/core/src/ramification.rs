//! Lower-numbering ramification filtrations given as group data.
//!
//! A filtration `G_0 ⊇ G_1 ⊇ …` is stored as the list of its nontrivial
//! terms; `G_j` is trivial for `j ≥ len`. An empty list is an unramified
//! puncture. The real-indexed filtration uses `G_t = G_{⌈t⌉}`.

use crate::arith::{is_power_of, Rational};
use crate::error::{Error, Result};
use crate::group::{subgroup_unchecked, FiniteGroup, GroupElement, Subgroup};
use crate::lattice::subgroup_as_group;
use crate::modular_system::quotient_by_normal;
use crate::perm::Perm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InertiaFiltration {
    chain: Vec<Subgroup>,
    p: u64,
    parent_order: usize,
}

impl InertiaFiltration {
    /// Validates and trims a chain `[G_0, G_1, …]` of subgroups of `g`.
    pub fn new<E: GroupElement>(g: &FiniteGroup<E>, chain: Vec<Subgroup>, p: u64) -> Result<Self> {
        let mut chain = chain;
        while chain.last().is_some_and(|s| s.is_trivial()) {
            chain.pop();
        }
        let f = InertiaFiltration { chain, p, parent_order: g.order() };
        f.validate(g)?;
        Ok(f)
    }

    /// Skips validation; for chains derived from a valid filtration.
    pub(crate) fn derived(chain: Vec<Subgroup>, p: u64, parent_order: usize) -> Self {
        let mut chain = chain;
        while chain.last().is_some_and(|s| s.is_trivial()) {
            chain.pop();
        }
        InertiaFiltration { chain, p, parent_order }
    }

    pub fn unramified<E: GroupElement>(g: &FiniteGroup<E>, p: u64) -> Self {
        InertiaFiltration { chain: Vec::new(), p, parent_order: g.order() }
    }

    /// Tame filtration `G_0 = s`, `G_1 = 1`.
    pub fn tame<E: GroupElement>(g: &FiniteGroup<E>, s: Subgroup, p: u64) -> Result<Self> {
        Self::new(g, vec![s], p)
    }

    /// Checks the defining properties against `g`.
    pub fn validate<E: GroupElement>(&self, g: &FiniteGroup<E>) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidFiltration(m));
        if self.parent_order != g.order() {
            return bad("filtration belongs to a different group".into());
        }
        let Some(g0) = self.chain.first() else { return Ok(()) };
        let g0_gens = g.subgroup_generators(g0);
        for (j, s) in self.chain.iter().enumerate() {
            g.check_subgroup(s)?;
            if j > 0 && !s.is_subgroup_of(&self.chain[j - 1]) {
                return bad(format!("G_{j} is not contained in G_{}", j - 1));
            }
            if !g.normalizes(&g0_gens, s) {
                return bad(format!("G_{j} is not normal in G_0"));
            }
        }
        let g1 = self.chain.get(1).cloned().unwrap_or_else(|| g.trivial());
        if !is_power_of(g1.order() as u64, self.p) && g1.order() != 1 {
            return bad(format!("G_1 has order {}, not a power of p = {}", g1.order(), self.p));
        }
        let tame = (g0.order() / g1.order()) as u64;
        if tame % self.p == 0 {
            return bad(format!("[G_0 : G_1] = {tame} is divisible by p = {}", self.p));
        }
        let cyclic = g0.members().iter().any(|&x| {
            let mut y = x;
            let mut k = 1;
            while !g1.contains(y) {
                y = g.mul(y, x);
                k += 1;
            }
            k == tame
        });
        if !cyclic {
            return bad("G_0/G_1 is not cyclic".into());
        }
        for j in 1..self.chain.len() {
            let s = &self.chain[j];
            let next = self.chain.get(j + 1).cloned().unwrap_or_else(|| g.trivial());
            let gens = g.subgroup_generators(s);
            if gens.iter().any(|&x| !next.contains(g.pow(x, self.p))) {
                return bad(format!("G_{j}/G_{} has an element of order other than p", j + 1));
            }
            for &a in &gens {
                for &b in &gens {
                    if !next.contains(g.commutator(a, b)) {
                        return bad(format!("G_{j}/G_{} is not abelian", j + 1));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn parent_order(&self) -> usize {
        self.parent_order
    }

    /// Number of nontrivial terms (the first `j` with `G_j = 1`).
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn chain(&self) -> &[Subgroup] {
        &self.chain
    }

    /// `G_j`, or `None` when it is trivial.
    pub fn group(&self, j: usize) -> Option<&Subgroup> {
        self.chain.get(j)
    }

    /// `|G_j|`.
    pub fn order_at(&self, j: usize) -> usize {
        self.chain.get(j).map_or(1, Subgroup::order)
    }

    /// Ramification index `|G_0|`.
    pub fn e(&self) -> usize {
        self.order_at(0)
    }

    pub fn is_tame(&self) -> bool {
        self.chain.len() <= 1
    }

    /// `G_0`, trivial for an unramified puncture.
    pub fn inertia<E: GroupElement>(&self, g: &FiniteGroup<E>) -> Subgroup {
        self.chain.first().cloned().unwrap_or_else(|| g.trivial())
    }

    /// Conjugate filtration `x G_j x⁻¹`.
    pub fn conjugate<E: GroupElement>(&self, g: &FiniteGroup<E>, x: u32) -> Self {
        let chain = self.chain.iter().map(|s| g.conjugate_subgroup(x, s)).collect();
        InertiaFiltration { chain, p: self.p, parent_order: self.parent_order }
    }
}

/// `d = Σ_{j≥0} (|G_j| − 1)`.
pub fn different_exponent(f: &InertiaFiltration) -> u64 {
    f.chain.iter().map(|s| s.order() as u64 - 1).sum()
}

/// `(G_j ∩ S)_j` for `S ≤ G_0`.
pub fn restricted_filtration(f: &InertiaFiltration, s: &Subgroup) -> InertiaFiltration {
    let chain = f.chain.iter().map(|g| g.intersection(s)).collect();
    InertiaFiltration::derived(chain, f.p, f.parent_order)
}

/// A continuous increasing piecewise-linear function on `[0, ∞)` with
/// `ψ(0) = 0`, linear on each `[j, j+1]` and beyond the last breakpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinearFn {
    /// `slopes[j]` is the slope on `(j, j+1]`; the last slope continues to
    /// infinity.
    slopes: Vec<Rational>,
    /// `values[j] = ψ(j)` for `j ≤ slopes.len() - 1`.
    values: Vec<Rational>,
}

impl PiecewiseLinearFn {
    fn from_slopes(slopes: Vec<Rational>) -> Self {
        let mut values = vec![Rational::from_integer(0)];
        for s in &slopes[..slopes.len() - 1] {
            let last = *values.last().unwrap();
            values.push(last + s);
        }
        PiecewiseLinearFn { slopes, values }
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn eval(&self, u: Rational) -> Rational {
        assert!(u >= Rational::from_integer(0), "ψ is defined on [0, ∞)");
        let last = self.slopes.len() - 1;
        let j = (u.floor().to_integer() as usize).min(last);
        self.values[j] + self.slopes[j] * (u - Rational::from_integer(j as i128))
    }

    /// `ψ⁻¹(v)` for `v ≥ 0`.
    pub fn inverse(&self, v: Rational) -> Rational {
        let last = self.slopes.len() - 1;
        let mut j = 0;
        while j < last && self.values[j + 1] < v {
            j += 1;
        }
        Rational::from_integer(j as i128) + (v - self.values[j]) / self.slopes[j]
    }

    /// `min{w ∈ Z_{≥0} : ψ(w) ≥ v}`.
    pub fn min_integer_preimage(&self, v: Rational) -> u64 {
        self.inverse(v).ceil().to_integer().max(0) as u64
    }
}

/// `ψ(u) = ∫₀ᵘ dt / [G_0 : G_t]`: slope `|G_j|/|G_0|` on `(j−1, j]` and
/// `1/|G_0|` beyond the last nontrivial term.
pub fn herbrand_psi(f: &InertiaFiltration) -> PiecewiseLinearFn {
    let e = f.e() as i128;
    let mut slopes: Vec<Rational> =
        (1..=f.len()).map(|j| Rational::new(f.order_at(j) as i128, e)).collect();
    slopes.push(Rational::new(1, e));
    PiecewiseLinearFn::from_slopes(slopes)
}

/// A filtration on `G_0 N / N`, realized on the cosets of `N` in `G_0`.
#[derive(Clone, Debug)]
pub struct QuotientFiltration {
    /// `G_0/N` as a permutation group.
    pub group: FiniteGroup<Perm>,
    /// Image in `group` of each member of `G_0`, in the order of
    /// `G_0.members()`.
    pub projection: Vec<u32>,
    pub filtration: InertiaFiltration,
    /// Preimages in the ambient group of the nontrivial terms.
    pub preimages: Vec<Subgroup>,
    /// `N` itself.
    pub kernel: Subgroup,
}

/// Quotient filtration by `N ⊴ G_0`: `(G/N)_j = G_u N/N` with
/// `u = min{w ∈ Z : ψ_N(w) ≥ j}`, `ψ_N` the Herbrand function of the
/// restriction to `N`.
pub fn quotient_filtration<E: GroupElement>(
    g: &FiniteGroup<E>,
    f: &InertiaFiltration,
    n: &Subgroup,
) -> Result<QuotientFiltration> {
    let g0 = f.inertia(g);
    if !n.is_subgroup_of(&g0) {
        return Err(Error::NotNormal("N is not contained in G_0".into()));
    }
    if !g.normalizes(&g.subgroup_generators(&g0), n) {
        return Err(Error::NotNormal("N is not normal in G_0".into()));
    }
    let preimage_chain = quotient_preimages(g, f, n);
    let inner = subgroup_as_group(g, &g0);
    let pos = |x: u32| g0.members().binary_search(&x).unwrap() as u32;
    let n_inner = subgroup_unchecked(n.members().iter().map(|&x| pos(x)).collect(), inner.order());
    let (group, projection) = quotient_by_normal(&inner, &n_inner)?;
    let chain = preimage_chain
        .iter()
        .map(|s| {
            let inner_s = subgroup_unchecked(s.members().iter().map(|&x| pos(x)).collect(), inner.order());
            inner.image_of(&group, &projection, &inner_s)
        })
        .collect();
    let filtration = InertiaFiltration::derived(chain, f.p, group.order());
    Ok(QuotientFiltration { group, projection, filtration, preimages: preimage_chain, kernel: n.clone() })
}

/// Preimages `G_u N` of the quotient filtration by `N`, trimmed where they
/// reach `N`. Requires `N ⊴ G_0`.
pub fn quotient_preimages<E: GroupElement>(g: &FiniteGroup<E>, f: &InertiaFiltration, n: &Subgroup) -> Vec<Subgroup> {
    let psi_n = herbrand_psi(&restricted_filtration(f, n));
    let mut out = Vec::new();
    for j in 0.. {
        let u = psi_n.min_integer_preimage(Rational::from_integer(j)) as usize;
        let gu = f.group(u).cloned().unwrap_or_else(|| g.trivial());
        let image = g.product(&gu, n);
        if image.order() == n.order() {
            break;
        }
        out.push(image);
    }
    out
}

/// Output of [`stabilized_wild_data`] for one level.
#[derive(Clone, Debug)]
pub struct WildLevel {
    pub level: u32,
    /// `e(1) = |ker(I_n → I_1)|`.
    pub e1: usize,
    /// Pulled-back chain `Ĩ_{n,k} = φ⁻¹((I_1)_k)` for `k = 1..=j0`.
    pub stabilized: Vec<Subgroup>,
}

#[derive(Clone, Debug)]
pub struct WildData {
    /// Smallest `j` with `(I_1)_j` trivial.
    pub j0: usize,
    /// `|(I_1)_k|` for `k = 1..=j0`.
    pub level_one_orders: Vec<usize>,
    pub levels: Vec<WildLevel>,
}

/// Checks the stabilization of wild inertia along a tower and returns the
/// pulled-back chains. `levels[k]` is `(Π_n, F_n)` at level `k + 1` and
/// `maps[k]` sends `Π_n` to `Π_1` (identity map for `k = 0`); `ell` is the
/// tower prime.
pub fn stabilized_wild_data<E: GroupElement>(
    levels: &[(&FiniteGroup<E>, &InertiaFiltration)],
    maps: &[Vec<u32>],
    ell: u64,
) -> Result<WildData> {
    let (g1, f1) = levels.first().ok_or_else(|| Error::WildMismatch("no levels".into()))?;
    let i1 = f1.inertia(g1);
    let j0 = f1.len();
    let level_one_orders = (1..=j0).map(|k| f1.order_at(k)).collect();
    let mut out = Vec::new();
    for (k, ((g, f), map)) in levels.iter().zip(maps).enumerate() {
        let level = k as u32 + 1;
        let mismatch = |m: String| Err(Error::WildMismatch(format!("level {level}: {m}")));
        let i_n = f.inertia(g);
        let image = g.image_of(g1, map, &i_n);
        if image != i1 {
            return mismatch("inertia does not map onto level-1 inertia".into());
        }
        let kernel: Vec<u32> = i_n.members().iter().copied().filter(|&x| map[x as usize] == g1.identity()).collect();
        let e1 = kernel.len();
        if !is_power_of(e1 as u64, ell) {
            return mismatch(format!("kernel of order {e1} is not an ℓ-group"));
        }
        let w_n = f.group(1).cloned().unwrap_or_else(|| g.trivial());
        let w_1 = f1.group(1).cloned().unwrap_or_else(|| g1.trivial());
        if w_n.order() != w_1.order() || g.image_of(g1, map, &w_n) != w_1 {
            return mismatch("wild inertia does not map isomorphically".into());
        }
        let stabilized: Vec<Subgroup> = (1..=j0)
            .map(|k| {
                let target = f1.group(k).cloned().unwrap_or_else(|| g1.trivial());
                let members = w_n.members().iter().copied().filter(|&x| target.contains(map[x as usize])).collect();
                subgroup_unchecked(members, g.order())
            })
            .collect();
        let beyond = e1 * j0;
        for j in 1..=beyond.max(f.len()) {
            let expected_order =
                if j <= beyond { stabilized[j.div_ceil(e1) - 1].order() } else { 1 };
            let ok = if j <= beyond {
                f.group(j).map_or(expected_order == 1, |s| *s == stabilized[j.div_ceil(e1) - 1])
            } else {
                f.group(j).is_none()
            };
            if !ok {
                return mismatch(format!("G_{j} differs from the stabilized closed form"));
            }
        }
        out.push(WildLevel { level, e1, stabilized });
    }
    Ok(WildData { j0, level_one_orders, levels: out })
}

/// Level-`n` filtration obtained from a level-1 filtration by the closed
/// form: `G_0 = I_n`, `G_j = W_n ∩ φ⁻¹((I_1)_{⌈j/e(1)⌉})` for `j ≥ 1`, where
/// `W_n` is the set of `p`-elements of `I_n` (its normal `p`-Sylow).
pub fn pullback_filtration<E: GroupElement>(
    g: &FiniteGroup<E>,
    i_n: &Subgroup,
    map: &[u32],
    g1: &FiniteGroup<E>,
    f1: &InertiaFiltration,
) -> Result<InertiaFiltration> {
    let p = f1.p;
    let e1 = i_n.members().iter().filter(|&&x| map[x as usize] == g1.identity()).count();
    let wild: Vec<u32> =
        i_n.members().iter().copied().filter(|&x| is_power_of(g.element_order(x), p)).collect();
    let mut chain = vec![i_n.clone()];
    for j in 1..=e1 * f1.len() {
        let target = f1.group(j.div_ceil(e1)).cloned().unwrap_or_else(|| g1.trivial());
        let members: Vec<u32> = wild.iter().copied().filter(|&x| target.contains(map[x as usize])).collect();
        chain.push(g.subgroup_from_members(&members)?);
    }
    InertiaFiltration::new(g, chain, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    fn cyclic(n: u32) -> FiniteGroup<Perm> {
        let c = Perm::from_images((1..n).chain([0]).collect());
        FiniteGroup::generate(Perm::identity(n as usize), &[c], 1000).unwrap()
    }

    #[test]
    fn differents() {
        let g = cyclic(6);
        assert_eq!(different_exponent(&InertiaFiltration::unramified(&g, 2)), 0);
        let c3 = g.subgroup(&[g.pow(g.generators()[0], 2)]);
        let tame = InertiaFiltration::tame(&g, c3.clone(), 2).unwrap();
        assert_eq!(different_exponent(&tame), 2);
        let g = cyclic(3);
        let wild = InertiaFiltration::new(&g, vec![g.whole(), g.whole()], 3).unwrap();
        assert_eq!(different_exponent(&wild), 4);
        assert!(InertiaFiltration::tame(&g, g.whole(), 3).is_err());
    }

    #[test]
    fn psi_examples() {
        let g = cyclic(5);
        let id = herbrand_psi(&InertiaFiltration::unramified(&g, 2));
        assert_eq!(id.eval(Rational::new(7, 2)), Rational::new(7, 2));
        let tame = herbrand_psi(&InertiaFiltration::tame(&g, g.whole(), 2).unwrap());
        assert_eq!(tame.eval(Rational::from_integer(5)), Rational::from_integer(1));
        let wild = herbrand_psi(&InertiaFiltration::new(&g, vec![g.whole(), g.whole()], 5).unwrap());
        assert_eq!(wild.eval(Rational::from_integer(1)), Rational::from_integer(1));
        assert_eq!(wild.eval(Rational::from_integer(2)), Rational::new(6, 5));
        assert_eq!(wild.inverse(Rational::new(6, 5)), Rational::from_integer(2));
        assert_eq!(wild.min_integer_preimage(Rational::new(11, 10)), 2);
    }

    #[test]
    fn quotient_by_tame_kernel_rescales() {
        // C_15 with p = 5: G_0 = C_15, G_1 = G_2 = C_5, N = C_3 tame.
        let g = cyclic(15);
        let x = g.generators()[0];
        let c5 = g.subgroup(&[g.pow(x, 3)]);
        let c3 = g.subgroup(&[g.pow(x, 5)]);
        let f = InertiaFiltration::new(&g, vec![g.whole(), c5.clone(), c5.clone()], 5).unwrap();
        let q = quotient_filtration(&g, &f, &c3).unwrap();
        // ψ_N(w) = w/3, so (G/N)_j = G_{3j} N / N: orders 5, 5 (j = 0), then trivial from j = 1.
        assert_eq!(q.filtration.len(), 1);
        assert_eq!(q.filtration.e(), 5);
        let trivial = quotient_filtration(&g, &f, &g.trivial()).unwrap();
        assert_eq!(trivial.filtration.len(), 3);
        let full = quotient_filtration(&g, &f, &g.whole()).unwrap();
        assert!(full.filtration.is_empty());
    }
}
