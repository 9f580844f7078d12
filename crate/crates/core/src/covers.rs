//! Riemann–Hurwitz on group data: genus and `λ = (2g − 2)/deg` of the
//! intermediate covers `X_H → X` of a Galois cover with group `G`.

use crate::arith::Rational;
use crate::cosets::{coset_action, left_cosets, orbits_on_cosets, stabilizer_on_cosets};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, Subgroup};
use crate::matrix::ModMatrix;
use crate::modgroup::ModGroup;
use crate::perm::Perm;
use crate::ramification::{
    different_exponent, pullback_filtration, quotient_preimages, restricted_filtration, stabilized_wild_data,
    InertiaFiltration,
};
use crate::tower::{reduce_all, GroupTower};

/// A Galois cover given by its group and the inertia filtrations above the
/// punctures `P_1, …, P_r` (one per puncture, up to conjugacy).
#[derive(Clone, Debug)]
pub struct CoverSpec<'a, E: GroupElement> {
    pub base_genus: u64,
    pub p: u64,
    pub ell: u64,
    pub group: &'a FiniteGroup<E>,
    pub punctures: Vec<InertiaFiltration>,
}

impl<'a, E: GroupElement> CoverSpec<'a, E> {
    pub fn new(
        base_genus: u64,
        p: u64,
        ell: u64,
        group: &'a FiniteGroup<E>,
        punctures: Vec<InertiaFiltration>,
    ) -> Result<Self> {
        if p == ell {
            return Err(Error::InvalidFiltration(format!("residue characteristic equals ℓ = {ell}")));
        }
        for (i, f) in punctures.iter().enumerate() {
            if f.parent_order() != group.order() || f.p() != p {
                return Err(Error::InvalidFiltration(format!("puncture {i} does not belong to this cover")));
            }
        }
        Ok(CoverSpec { base_genus, p, ell, group, punctures })
    }
}

/// A point `Q` of `X_H` over a puncture, from the `I`-orbit of `xH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointData {
    pub representative: u32,
    /// `|I ∩ xHx⁻¹|`, the ramification of `X_G → X_H` at `Q`.
    pub e_q: usize,
    /// Different exponent of `X_G → X_H` at `Q`.
    pub d_q: u64,
    /// Ramification of `X_H → X` at `Q`.
    pub e_over: usize,
    /// Different exponent of `X_H → X` at `Q`.
    pub d_over: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PunctureReport {
    pub e: usize,
    pub d: u64,
    pub points: Vec<PointData>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusReport {
    pub subgroup: Subgroup,
    pub degree: usize,
    pub punctures: Vec<PunctureReport>,
    /// `2g_H − 2`.
    pub euler: i64,
    pub genus: i64,
    pub lambda: Rational,
}

impl GenusReport {
    /// `2g − 2 ≥ −2`; group data alone does not guarantee a connected cover.
    pub fn is_geometric(&self) -> bool {
        self.euler >= -2
    }
}

pub fn genus_of_quotient<E: GroupElement>(spec: &CoverSpec<'_, E>, h: &Subgroup) -> Result<GenusReport> {
    let g = spec.group;
    let space = left_cosets(g, h)?;
    let degree = space.size();
    let mut euler = degree as i64 * (2 * spec.base_genus as i64 - 2);
    let mut punctures = Vec::with_capacity(spec.punctures.len());
    for (i, f) in spec.punctures.iter().enumerate() {
        let inertia = f.inertia(g);
        let d = different_exponent(f);
        let mut points = Vec::new();
        for orbit in orbits_on_cosets(g, &inertia, &space) {
            let x = space.representatives[orbit[0] as usize];
            let s = stabilizer_on_cosets(g, &inertia, x, h);
            let d_q = different_exponent(&restricted_filtration(f, &s));
            let e_q = s.order();
            if (d - d_q) % e_q as u64 != 0 {
                return Err(Error::NonIntegralDifferent { puncture: i });
            }
            let e_over = f.e() / e_q;
            debug_assert_eq!(e_over, orbit.len());
            points.push(PointData { representative: x, e_q, d_q, e_over, d_over: (d - d_q) / e_q as u64 });
        }
        let total: usize = points.iter().map(|q| q.e_over).sum();
        if total != degree {
            return Err(Error::IdentityViolation(format!(
                "ramification over puncture {i} sums to {total}, not the degree {degree}"
            )));
        }
        euler += points.iter().map(|q| q.d_over as i64).sum::<i64>();
        punctures.push(PunctureReport { e: f.e(), d, points });
    }
    if euler % 2 != 0 {
        return Err(Error::NonIntegralGenus { euler, degree: degree as u64 });
    }
    Ok(GenusReport {
        subgroup: h.clone(),
        degree,
        punctures,
        euler,
        genus: euler / 2 + 1,
        lambda: Rational::new(euler as i128, degree as i128),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSeries {
    pub degrees: Vec<usize>,
    pub genera: Vec<i64>,
    pub lambdas: Vec<Rational>,
    /// `λ` never decreases along the tower.
    pub monotone: bool,
    pub genus_strictly_increasing: bool,
    /// At the last level, `λ > 0` (the finite shadow of `g → ∞`).
    pub limit_positive: bool,
}

/// `λ` along a tower, one report per level.
pub fn lambda_series(reports: &[GenusReport]) -> LambdaSeries {
    let lambdas: Vec<Rational> = reports.iter().map(|r| r.lambda).collect();
    let genera: Vec<i64> = reports.iter().map(|r| r.genus).collect();
    LambdaSeries {
        degrees: reports.iter().map(|r| r.degree).collect(),
        monotone: lambdas.windows(2).all(|w| w[0] <= w[1]),
        genus_strictly_increasing: genera.windows(2).all(|w| w[0] < w[1]),
        limit_positive: lambdas.last().is_some_and(|l| *l > Rational::from_integer(0)),
        genera,
        lambdas,
    }
}

/// The cover `X_K → X` for `K` the normal core of `C`, realized on the
/// faithful action of `G/K` on `G/C`.
#[derive(Clone, Debug)]
pub struct QuotientCover {
    pub group: FiniteGroup<Perm>,
    pub projection: Vec<u32>,
    pub core: Subgroup,
    /// Image of `C`, the stabilizer of the base coset.
    pub subgroup: Subgroup,
    /// Quotient filtrations by `I_i ∩ K`.
    pub punctures: Vec<InertiaFiltration>,
}

pub fn quotient_cover<E: GroupElement>(spec: &CoverSpec<'_, E>, c: &Subgroup) -> Result<QuotientCover> {
    let g = spec.group;
    let (group, projection) = coset_action(g, c)?;
    let core = g.core_in(&g.whole(), c);
    let subgroup = g.image_of(&group, &projection, c);
    let mut punctures = Vec::with_capacity(spec.punctures.len());
    for f in &spec.punctures {
        let n = f.inertia(g).intersection(&core);
        let chain = quotient_preimages(g, f, &n).iter().map(|s| g.image_of(&group, &projection, s)).collect();
        punctures.push(InertiaFiltration::new(&group, chain, spec.p)?);
    }
    Ok(QuotientCover { group, projection, core, subgroup, punctures })
}

impl QuotientCover {
    pub fn spec(&self, base_genus: u64, p: u64, ell: u64) -> Result<CoverSpec<'_, Perm>> {
        CoverSpec::new(base_genus, p, ell, &self.group, self.punctures.clone())
    }
}

/// Both sides of `λ_{X_K} − λ_{X_C} = (1/[G:C]) Σ_i Σ_{Q|P_i} d_Q/e_Q`, where
/// `Q` runs over the points of `X_C` and `d_Q, e_Q` belong to `X_K → X_C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TildeComparison {
    pub index: usize,
    pub core_order: usize,
    pub lambda_tilde: Rational,
    pub lambda_c: Rational,
    pub gap: Rational,
    pub claimed_sum: Rational,
    /// The same sum with each `d_Q` expanded as `Σ_j ((e_Q)_j − 1)`.
    pub claimed_by_jumps: Rational,
    /// `λ_{X_K}` and `λ_{X_C}` computed on `G` itself agree with the
    /// quotient computation (transitivity of the different).
    pub consistent_with_base: bool,
}

pub fn compare_tilde_vs_c<E: GroupElement>(spec: &CoverSpec<'_, E>, c: &Subgroup) -> Result<TildeComparison> {
    let q = quotient_cover(spec, c)?;
    let qspec = q.spec(spec.base_genus, spec.p, spec.ell)?;
    let tilde = genus_of_quotient(&qspec, &q.group.trivial())?;
    let at_c = genus_of_quotient(&qspec, &q.subgroup)?;
    let gap = tilde.lambda - at_c.lambda;

    let space = left_cosets(&q.group, &q.subgroup)?;
    let index = space.size();
    let mut sum = Rational::from_integer(0);
    let mut by_jumps = Rational::from_integer(0);
    for f in &q.punctures {
        let inertia = f.inertia(&q.group);
        for orbit in orbits_on_cosets(&q.group, &inertia, &space) {
            let x = space.representatives[orbit[0] as usize];
            let s = stabilizer_on_cosets(&q.group, &inertia, x, &q.subgroup);
            let r = restricted_filtration(f, &s);
            let e_q = s.order() as i128;
            sum += Rational::new(different_exponent(&r) as i128, e_q);
            for j in 0..r.len() {
                by_jumps += Rational::new(r.order_at(j) as i128 - 1, e_q);
            }
        }
    }
    let scale = Rational::new(1, index as i128);
    let (claimed_sum, claimed_by_jumps) = (sum * scale, by_jumps * scale);
    if gap != claimed_sum || claimed_sum != claimed_by_jumps {
        return Err(Error::IdentityViolation(format!(
            "λ gap {gap} differs from the stabilizer sum {claimed_sum} / {claimed_by_jumps}"
        )));
    }
    let base_tilde = genus_of_quotient(spec, &q.core)?;
    let base_c = genus_of_quotient(spec, c)?;
    Ok(TildeComparison {
        index,
        core_order: q.core.order(),
        lambda_tilde: tilde.lambda,
        lambda_c: at_c.lambda,
        gap,
        claimed_sum,
        claimed_by_jumps,
        consistent_with_base: base_tilde.lambda == tilde.lambda && base_c.lambda == at_c.lambda,
    })
}

/// One filtration step of the counting identities over a puncture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummationRow {
    pub j: usize,
    /// `Σ_Q (e/e_j)·((e_Q)_j/e_Q)`.
    pub weighted: Rational,
    /// `|I_j \ G/C|`.
    pub orbits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummationCheck {
    pub index: usize,
    /// `Σ_Q e/e_Q`, which must equal the index.
    pub total: Rational,
    pub rows: Vec<SummationRow>,
}

/// Checks `Σ_Q e/e_Q = [G:C]` and, for each `j`, that the weighted sum over
/// the points `Q` of `X_C` above puncture `i` counts `I_j`-orbits on `G/C`.
pub fn summation_identities<E: GroupElement>(
    spec: &CoverSpec<'_, E>,
    c: &Subgroup,
    puncture: usize,
) -> Result<SummationCheck> {
    let q = quotient_cover(spec, c)?;
    let f = &q.punctures[puncture];
    let g = &q.group;
    let space = left_cosets(g, &q.subgroup)?;
    let inertia = f.inertia(g);
    let e = inertia.order() as i128;
    let stabs: Vec<Subgroup> = orbits_on_cosets(g, &inertia, &space)
        .iter()
        .map(|o| stabilizer_on_cosets(g, &inertia, space.representatives[o[0] as usize], &q.subgroup))
        .collect();
    let total: Rational = stabs.iter().map(|s| Rational::new(e, s.order() as i128)).sum();
    if total != Rational::from_integer(space.size() as i128) {
        return Err(Error::IdentityViolation(format!("Σ e/e_Q = {total}, index {}", space.size())));
    }
    let mut rows = Vec::new();
    for j in 0..=f.len() {
        let ij = f.group(j).cloned().unwrap_or_else(|| g.trivial());
        let weighted: Rational = stabs
            .iter()
            .map(|s| Rational::new(e * s.intersection(&ij).order() as i128, ij.order() as i128 * s.order() as i128))
            .sum();
        let orbits = orbits_on_cosets(g, &ij, &space).len();
        if weighted != Rational::from_integer(orbits as i128) {
            return Err(Error::IdentityViolation(format!("j = {j}: weighted sum {weighted}, {orbits} orbits")));
        }
        rows.push(SummationRow { j, weighted, orbits });
    }
    Ok(SummationCheck { index: space.size(), total, rows })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondTermRow {
    pub level: u32,
    pub e1: usize,
    /// `Σ_{j≥1} [(e_j/e)·|I_j\G/C|/[G:C] − 1/e]`.
    pub direct: Rational,
    /// The same value from the stabilized chain.
    pub stabilized: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondTermSeries {
    pub rows: Vec<SecondTermRow>,
    pub last_magnitude: Rational,
    /// `|value|` never increases.
    pub shrinking: bool,
}

/// The wild second term per level for puncture `i`. `levels[k]` is the
/// cover and `C_n` at level `k + 1`; `maps[k]` sends `Π_n` to `Π_1`.
pub fn second_term_series<E: GroupElement>(
    levels: &[(CoverSpec<'_, E>, Subgroup)],
    maps: &[Vec<u32>],
    puncture: usize,
) -> Result<SecondTermSeries> {
    let covers: Vec<QuotientCover> =
        levels.iter().map(|(spec, c)| quotient_cover(spec, c)).collect::<Result<_>>()?;
    let first = &covers[0];
    // G'_n → G'_1 through a preimage in Π_n.
    let mut quotient_maps = Vec::with_capacity(covers.len());
    for (q, map) in covers.iter().zip(maps) {
        let mut qm = vec![u32::MAX; q.group.order()];
        for (x, &y) in q.projection.iter().enumerate() {
            if qm[y as usize] == u32::MAX {
                qm[y as usize] = first.projection[map[x] as usize];
            }
        }
        quotient_maps.push(qm);
    }
    let pairs: Vec<(&FiniteGroup<Perm>, &InertiaFiltration)> =
        covers.iter().map(|q| (&q.group, &q.punctures[puncture])).collect();
    let ell = levels[0].0.ell;
    let wild = stabilized_wild_data(&pairs, &quotient_maps, ell)?;
    let mut rows = Vec::new();
    for (k, q) in covers.iter().enumerate() {
        let f = &q.punctures[puncture];
        let space = left_cosets(&q.group, &q.subgroup)?;
        let index = space.size() as i128;
        let ratio = |s: &Subgroup| Rational::new(orbits_on_cosets(&q.group, s, &space).len() as i128, index);
        let e = f.e() as i128;
        let mut direct = Rational::from_integer(0);
        for j in 1..f.len() {
            let ij = f.group(j).unwrap();
            direct += Rational::new(ij.order() as i128, e) * ratio(ij) - Rational::new(1, e);
        }
        let level = &wild.levels[k];
        let i1 = pairs[0].1.e() as i128;
        let mut stabilized = Rational::from_integer(0);
        for (s, &order) in level.stabilized.iter().zip(&wild.level_one_orders) {
            let order = order as i128;
            stabilized += Rational::from_integer(order) * (ratio(s) - Rational::new(1, order));
        }
        stabilized /= Rational::from_integer(i1);
        if direct != stabilized {
            return Err(Error::IdentityViolation(format!(
                "level {}: second term {direct} differs from stabilized form {stabilized}",
                level.level
            )));
        }
        rows.push(SecondTermRow { level: level.level, e1: level.e1, direct, stabilized });
    }
    let mags: Vec<Rational> = rows.iter().map(|r| if r.direct < Rational::from_integer(0) { -r.direct } else { r.direct }).collect();
    Ok(SecondTermSeries {
        last_magnitude: mags.last().copied().unwrap_or_default(),
        shrinking: mags.windows(2).all(|w| w[1] <= w[0]),
        rows,
    })
}

/// A puncture of a tower cover: inertia generators (top level) and the
/// lower filtration `[G_1, G_2, …]` as generator lists at the base level.
/// An empty `lower` is a tame puncture.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PunctureSpec {
    pub inertia: Vec<ModMatrix>,
    pub lower: Vec<Vec<ModMatrix>>,
}

/// The filtration `G_0 = ⟨inertia⟩, G_j = ⟨lower[j-1]⟩` inside `g` (all
/// generators reduced to the level of `g`).
pub fn explicit_filtration(g: &ModGroup, puncture: &PunctureSpec, p: u64) -> Result<InertiaFiltration> {
    let n = crate::modgroup::level(g);
    let mut chain = vec![g.subgroup_of_elements(&reduce_all(&puncture.inertia, n))?];
    for gens in &puncture.lower {
        chain.push(g.subgroup_of_elements(&reduce_all(gens, n))?);
    }
    InertiaFiltration::new(g, chain, p)
}

/// A tower of covers `X_{Π(n)} → X`: the filtration is explicit at level 1
/// and pulled back to level `n` by the stabilized closed form.
#[derive(Clone, Debug)]
pub struct TowerCover<'t> {
    pub tower: &'t GroupTower,
    pub p: u64,
    pub base_genus: u64,
    pub c_gens: Vec<ModMatrix>,
    pub punctures: Vec<PunctureSpec>,
}

impl<'t> TowerCover<'t> {
    pub fn filtrations(&self, n: u32) -> Result<Vec<InertiaFiltration>> {
        let g1 = self.tower.level(1)?;
        let gn = self.tower.level(n)?;
        let map = if n == 1 { (0..g1.order() as u32).collect() } else { crate::modgroup::reduction_map(gn, g1)? };
        self.punctures
            .iter()
            .map(|pu| {
                let f1 = explicit_filtration(g1, pu, self.p)?;
                if n == 1 {
                    return Ok(f1);
                }
                let i_n = self.tower.image_subgroup(n, &pu.inertia)?;
                pullback_filtration(gn, &i_n, &map, g1, &f1)
            })
            .collect()
    }

    /// The cover at level `n` and `C_n`.
    pub fn level_spec(&self, n: u32) -> Result<(CoverSpec<'t, ModMatrix>, Subgroup)> {
        let spec = CoverSpec::new(
            self.base_genus,
            self.p,
            self.tower.prime() as u64,
            self.tower.level(n)?,
            self.filtrations(n)?,
        )?;
        Ok((spec, self.tower.image_subgroup(n, &self.c_gens)?))
    }

    /// Genus of `X_{C Π(n)}` for `n = 1..=N`.
    pub fn genus_series(&self) -> Result<(Vec<GenusReport>, LambdaSeries)> {
        let mut reports = Vec::new();
        for n in 1..=self.tower.max_level() {
            let (spec, c) = self.level_spec(n)?;
            reports.push(genus_of_quotient(&spec, &c)?);
        }
        let series = lambda_series(&reports);
        Ok((reports, series))
    }

    pub fn second_term(&self, puncture: usize) -> Result<SecondTermSeries> {
        let g1 = self.tower.level(1)?;
        let mut levels = Vec::new();
        let mut maps = Vec::new();
        for n in 1..=self.tower.max_level() {
            levels.push(self.level_spec(n)?);
            maps.push(if n == 1 {
                (0..g1.order() as u32).collect()
            } else {
                crate::modgroup::reduction_map(self.tower.level(n)?, g1)?
            });
        }
        second_term_series(&levels, &maps, puncture)
    }
}

/// Index of the first non-abelian group in a tower of covering groups. A
/// tower of genus-1 Galois covers of a genus-1 curve has only abelian
/// groups, so a hit rules out genus 1 along the tower.
pub fn tower_abelianity_obstruction<E: GroupElement>(groups: &[&FiniteGroup<E>]) -> Option<usize> {
    groups.iter().position(|g| !g.is_abelian())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: u32) -> FiniteGroup<Perm> {
        let c = Perm::from_images((1..n).chain([0]).collect());
        FiniteGroup::generate(Perm::identity(n as usize), &[c], 1000).unwrap()
    }

    #[test]
    fn z3_three_tame_points_is_elliptic() {
        let g = cyclic(3);
        let tame = InertiaFiltration::tame(&g, g.whole(), 2).unwrap();
        let spec = CoverSpec::new(0, 2, 3, &g, vec![tame.clone(), tame.clone(), tame]).unwrap();
        let top = genus_of_quotient(&spec, &g.trivial()).unwrap();
        assert_eq!(top.genus, 1);
        let base = genus_of_quotient(&spec, &g.whole()).unwrap();
        assert_eq!((base.genus, base.lambda), (0, Rational::from_integer(-2)));
    }

    #[test]
    fn unramified_lambda_is_constant() {
        let g = cyclic(4);
        let spec = CoverSpec::new(2, 3, 2, &g, vec![]).unwrap();
        for h in [g.whole(), g.subgroup(&[g.pow(g.generators()[0], 2)]), g.trivial()] {
            let r = genus_of_quotient(&spec, &h).unwrap();
            assert_eq!(r.lambda, Rational::from_integer(2));
            assert_eq!(r.genus, r.degree as i64 + 1);
        }
    }

    #[test]
    fn normal_c_has_zero_gap() {
        let g = cyclic(6);
        let x = g.generators()[0];
        let c2 = g.subgroup(&[g.pow(x, 3)]);
        let tame = InertiaFiltration::tame(&g, c2.clone(), 3).unwrap();
        let spec = CoverSpec::new(1, 3, 2, &g, vec![tame]).unwrap();
        let cmp = compare_tilde_vs_c(&spec, &c2).unwrap();
        assert_eq!(cmp.gap, Rational::from_integer(0));
        assert!(cmp.consistent_with_base);
    }

    #[test]
    fn wild_z4_counts() {
        // C_4 with p = 2, lower jumps 1 and 3: d = 3 + 3 + 1 + 1 = 8.
        let g = cyclic(4);
        let x = g.generators()[0];
        let c2 = g.subgroup(&[g.pow(x, 2)]);
        let f = InertiaFiltration::new(&g, vec![g.whole(), g.whole(), c2.clone(), c2.clone()], 2).unwrap();
        let spec = CoverSpec::new(0, 2, 3, &g, vec![f]).unwrap();
        let top = genus_of_quotient(&spec, &g.trivial()).unwrap();
        assert_eq!(top.euler, 4 * -2 + 8);
        let mid = genus_of_quotient(&spec, &c2).unwrap();
        // Restricted to C_2: d_Q = 4, intermediate different (8 − 4)/2 = 2.
        assert_eq!(mid.punctures[0].points[0].d_over, 2);
        let check = summation_identities(&spec, &c2, 0).unwrap();
        assert_eq!(check.index, 2);
        let cmp = compare_tilde_vs_c(&spec, &g.trivial()).unwrap();
        assert_eq!(cmp.gap, Rational::from_integer(0));
        assert!(cmp.consistent_with_base);
    }
}
