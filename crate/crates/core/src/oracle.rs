//! Brute-force oracles for the test suite and the CLI `--oracle` flag.
//!
//! These work on element values with naive set algorithms and share no code
//! with the fast paths they check (no multiplication tables, coset labels,
//! lattice search or Smith forms). Speed is not a goal.

use std::collections::{BTreeSet, HashSet};

use crate::arith::{ipow, mod_inverse, valuation, Rational};
use crate::covers::CoverSpec;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, Subgroup};
use crate::matrix::ModMatrix;
use crate::ramification::InertiaFiltration;

/// An oracle value tagged with how it was obtained and the size bound it
/// was run under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult<T> {
    pub value: T,
    pub method: &'static str,
    pub bound: usize,
}

fn check_bound(size: usize, bound: usize, what: &'static str) -> Result<()> {
    if size > bound {
        return Err(Error::CapExceeded { what, cap: bound });
    }
    Ok(())
}

fn members<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup) -> Vec<E> {
    h.members().iter().map(|&i| g.element(i).clone()).collect()
}

fn closure<E: GroupElement>(identity: &E, gens: &[E]) -> BTreeSet<E> {
    let mut set = BTreeSet::from([identity.clone()]);
    let mut frontier = vec![identity.clone()];
    while let Some(x) = frontier.pop() {
        for s in gens {
            let y = x.mul(s);
            if set.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    set
}

pub const DOUBLE_COSET_BOUND: usize = 5000;

/// Sizes of the classes `HxC`, ordered by their least element.
pub fn brute_double_cosets<E: GroupElement>(
    g: &FiniteGroup<E>,
    h: &Subgroup,
    c: &Subgroup,
) -> Result<OracleResult<Vec<usize>>> {
    check_bound(g.order(), DOUBLE_COSET_BOUND, "oracle group order")?;
    let (hs, cs) = (members(g, h), members(g, c));
    let mut seen: HashSet<E> = HashSet::new();
    let mut sizes = Vec::new();
    for x in g.elements() {
        if seen.contains(x) {
            continue;
        }
        let mut class = HashSet::new();
        for a in &hs {
            let ax = a.mul(x);
            for b in &cs {
                class.insert(ax.mul(b));
            }
        }
        sizes.push(class.len());
        seen.extend(class);
    }
    Ok(OracleResult { value: sizes, method: "exhaustive HxC scan", bound: DOUBLE_COSET_BOUND })
}

pub const ORBIT_BOUND: usize = 200 * 500;

/// Number of `H`-orbits inside the `G`-orbit of `x` for an action given
/// on element values.
pub fn brute_fiber_count<E: GroupElement>(
    g: &FiniteGroup<E>,
    act: impl Fn(&E, u32) -> u32,
    h: &Subgroup,
    x: u32,
) -> Result<OracleResult<u64>> {
    let orbit: BTreeSet<u32> = g.elements().iter().map(|a| act(a, x)).collect();
    check_bound(g.order() * orbit.len(), ORBIT_BOUND, "oracle action size")?;
    let hs = members(g, h);
    let mut seen = BTreeSet::new();
    let mut count = 0u64;
    for &y in &orbit {
        if seen.contains(&y) {
            continue;
        }
        count += 1;
        for a in &hs {
            seen.insert(act(a, y));
        }
    }
    Ok(OracleResult { value: count, method: "H-orbit scan of one G-orbit", bound: ORBIT_BOUND })
}

pub const GENUS_BOUND: usize = 2000;

/// `i(s) = #{j : s ∈ G_j}`, so that `d = Σ_{s ≠ 1} i(s)` (Hilbert).
fn hilbert_index<E: GroupElement>(g: &FiniteGroup<E>, f: &InertiaFiltration, s: &E) -> u64 {
    let idx = g.index_of(s).unwrap();
    f.chain().iter().filter(|grp| grp.members().contains(&idx)).count() as u64
}

/// Genus of `X_H` by listing the points `xH`, their `I`-orbits, and the
/// differents through Hilbert's formula.
pub fn brute_genus<E: GroupElement>(spec: &CoverSpec<'_, E>, h: &Subgroup) -> Result<OracleResult<i64>> {
    let g = spec.group;
    check_bound(g.order(), GENUS_BOUND, "oracle group order")?;
    let hs = members(g, h);
    let coset_of = |x: &E| -> BTreeSet<E> { hs.iter().map(|y| x.mul(y)).collect() };
    let cosets: BTreeSet<BTreeSet<E>> = g.elements().iter().map(coset_of).collect();
    let degree = cosets.len() as i64;
    let mut euler = degree * (2 * spec.base_genus as i64 - 2);
    for f in &spec.punctures {
        let is = f.chain().first().map(|s| members(g, s)).unwrap_or_else(|| vec![g.element(g.identity()).clone()]);
        let d: u64 = is.iter().filter(|s| !s.is_identity()).map(|s| hilbert_index(g, f, s)).sum();
        let mut seen: BTreeSet<BTreeSet<E>> = BTreeSet::new();
        for coset in &cosets {
            if seen.contains(coset) {
                continue;
            }
            let x = coset.iter().next().unwrap();
            for i in &is {
                seen.insert(coset_of(&i.mul(x)));
            }
            let xi = x.inverse();
            let stab: Vec<&E> = is.iter().filter(|i| hs.contains(&xi.mul(i).mul(x))).collect();
            let d_q: u64 = stab.iter().filter(|s| !s.is_identity()).map(|s| hilbert_index(g, f, s)).sum();
            let e_q = stab.len() as u64;
            if (d - d_q) % e_q != 0 {
                return Err(Error::NonIntegral(format!("different ({d} - {d_q})/{e_q}")));
            }
            euler += ((d - d_q) / e_q) as i64;
        }
    }
    if euler % 2 != 0 {
        return Err(Error::NonIntegralGenus { euler, degree: degree as u64 });
    }
    Ok(OracleResult { value: euler / 2 + 1, method: "point-by-point Riemann-Hurwitz", bound: GENUS_BOUND })
}

pub const MIN_GRID: u64 = 1000;

/// Midpoint sum for `∫₀ᵘ dt/[G_0 : G_t]` with `grid` steps per unit.
pub fn psi_numeric(f: &InertiaFiltration, u: Rational, grid: u64) -> OracleResult<Rational> {
    let grid = grid.max(MIN_GRID);
    let e = f.e() as i128;
    let integrand = |t: Rational| {
        let j = t.ceil().to_integer() as usize;
        Rational::new(f.order_at(j) as i128, e)
    };
    let step = Rational::new(1, grid as i128);
    let mut acc = Rational::from_integer(0);
    let mut t = Rational::from_integer(0);
    while t + step <= u {
        acc += integrand(t + step / 2) * step;
        t += step;
    }
    if t < u {
        acc += integrand((t + u) / 2) * (u - t);
    }
    OracleResult { value: acc, method: "midpoint rule", bound: grid as usize }
}

fn mat_mul_mod(a: &[i128], b: &[i128], d: usize, m: i128) -> Vec<i128> {
    let mut out = vec![0i128; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut s = 0i128;
            for k in 0..d {
                s = (s + a[i * d + k] * b[k * d + j]) % m;
            }
            out[i * d + j] = s;
        }
    }
    out
}

/// `exp Y = Σ Y^k / k!` modulo `ℓⁿ` for `Y ≡ 0 mod ℓ` (mod 4 when `ℓ = 2`).
pub fn truncated_exp(y: &ModMatrix, n: u32) -> Result<OracleResult<ModMatrix>> {
    let (p, d) = (y.prime() as u64, y.dim());
    let depth = if p == 2 { 2 } else { 1 };
    let m0 = ipow(p, depth);
    if y.entries().iter().any(|&e| e as u64 % m0 != 0) {
        return Err(Error::OutsideDomain);
    }
    // v(k!) ≤ k/(ℓ−1) and v(Y^k) ≥ k·depth, so 4n terms suffice.
    let terms = 4 * n as u64 + 4;
    let extra: u32 = (1..=terms).map(|k| valuation(k, p)).sum();
    let big = ipow(p, n + extra) as i128;
    let small = ipow(p, n) as i128;
    let x: Vec<i128> = y.entries().iter().map(|&e| e as i128).collect();
    let mut acc = vec![0i128; d * d];
    for i in 0..d {
        acc[i * d + i] = 1;
    }
    let mut power = x.clone();
    let (mut fact_unit, mut fact_val) = (1i128, 0u32);
    for k in 1..=terms {
        let v = valuation(k, p);
        fact_val += v;
        fact_unit = fact_unit * (k / ipow(p, v)) as i128 % small;
        let inv = mod_inverse(fact_unit.rem_euclid(small) as u64, small as u64).unwrap() as i128;
        let scale = ipow(p, fact_val) as i128;
        for (a, &c) in acc.iter_mut().zip(&power) {
            *a = (*a + (c / scale) % small * inv) % small;
        }
        power = mat_mul_mod(&power, &x, d, big);
    }
    let flat = acc.into_iter().map(|v| v.rem_euclid(small) as u64).collect();
    Ok(OracleResult { value: ModMatrix::from_flat(p as u32, n, d, flat), method: "truncated exponential", bound: terms as usize })
}

/// `∩_x x H x⁻¹` over all `x ∈ G`.
pub fn brute_normal_core<E: GroupElement>(g: &FiniteGroup<E>, h: &Subgroup) -> OracleResult<BTreeSet<E>> {
    let hs: BTreeSet<E> = members(g, h).into_iter().collect();
    let mut core = hs.clone();
    for x in g.elements() {
        let xi = x.inverse();
        core.retain(|y| hs.contains(&xi.mul(y).mul(x)));
    }
    OracleResult { value: core, method: "intersection of conjugates", bound: g.order() }
}

pub const FIXED_POINT_BOUND: usize = 1 << 20;

/// `#{v ∈ (Z/ℓⁿ)^r : g v = χ(g) v for every generator}`.
pub fn brute_fixed_points(gens: &[ModMatrix], chi: Option<&[u64]>) -> Result<OracleResult<u64>> {
    let g0 = &gens[0];
    let (m, r) = (g0.modulus(), g0.dim());
    let total = (m as usize).checked_pow(r as u32).unwrap_or(usize::MAX);
    check_bound(total, FIXED_POINT_BOUND, "oracle vector count")?;
    let mut count = 0;
    let mut v = vec![0u64; r];
    for code in 0..total {
        let mut c = code;
        for slot in v.iter_mut() {
            *slot = c as u64 % m;
            c /= m as usize;
        }
        let ok = gens.iter().enumerate().all(|(k, g)| {
            let scalar = chi.map_or(1, |c| c[k]) % m;
            (0..r).all(|i| {
                let gv: u64 = (0..r).map(|j| g.get(i, j) * v[j]).sum::<u64>() % m;
                gv == scalar * v[i] % m
            })
        });
        count += u64::from(ok);
    }
    Ok(OracleResult { value: count, method: "vector enumeration", bound: FIXED_POINT_BOUND })
}

pub const SUBGROUP_BOUND: usize = 128;

/// Every subgroup, reached by adjoining one element at a time to smaller
/// subgroups.
pub fn brute_subgroups<E: GroupElement>(g: &FiniteGroup<E>) -> Result<OracleResult<Vec<BTreeSet<E>>>> {
    check_bound(g.order(), SUBGROUP_BOUND, "oracle group order")?;
    let id = g.element(g.identity()).clone();
    let mut found: BTreeSet<BTreeSet<E>> = BTreeSet::from([BTreeSet::from([id.clone()])]);
    let mut frontier: Vec<BTreeSet<E>> = found.iter().cloned().collect();
    while let Some(s) = frontier.pop() {
        for x in g.elements() {
            if s.contains(x) {
                continue;
            }
            let mut gens: Vec<E> = s.iter().cloned().collect();
            gens.push(x.clone());
            let t = closure(&id, &gens);
            if found.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    Ok(OracleResult { value: found.into_iter().collect(), method: "one-element extension", bound: SUBGROUP_BOUND })
}

/// Intersection of all maximal subgroups, from [`brute_subgroups`].
pub fn brute_frattini<E: GroupElement>(g: &FiniteGroup<E>) -> Result<OracleResult<BTreeSet<E>>> {
    let all = brute_subgroups(g)?.value;
    let n = g.order();
    let proper: Vec<&BTreeSet<E>> = all.iter().filter(|s| s.len() < n).collect();
    let maximal = proper.iter().filter(|s| !proper.iter().any(|t| t.len() > s.len() && s.is_subset(t)));
    let mut phi: BTreeSet<E> = g.elements().iter().cloned().collect();
    for m in maximal {
        phi.retain(|x| m.contains(x));
    }
    Ok(OracleResult { value: phi, method: "maximal subgroup intersection", bound: SUBGROUP_BOUND })
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
    fn oracle_sanity() {
        let g = s3();
        assert_eq!(brute_double_cosets(&g, &g.whole(), &g.trivial()).unwrap().value, vec![6]);
        assert_eq!(brute_double_cosets(&g, &g.trivial(), &g.trivial()).unwrap().value.len(), 6);
        assert_eq!(brute_subgroups(&g).unwrap().value.len(), 6);
        assert_eq!(brute_frattini(&g).unwrap().value.len(), 1);
        let f = InertiaFiltration::unramified(&g, 5);
        assert_eq!(psi_numeric(&f, Rational::from_integer(1), 1000).value, Rational::from_integer(1));
    }

    #[test]
    fn exp_inverts_log() {
        let g = ModMatrix::from_rows(5, 3, &[vec![6, 5], vec![10, 21]]).unwrap();
        let l = crate::lie::matrix_log(&g, 3).unwrap();
        assert_eq!(truncated_exp(&l, 3).unwrap().value, g);
    }
}
