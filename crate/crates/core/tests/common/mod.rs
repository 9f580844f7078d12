//! Randomized corpora shared by the integration and acceptance tests.
#![allow(dead_code)]

use openimage_core::covers::CoverSpec;
use openimage_core::lattice;
use openimage_core::ramification::InertiaFiltration;
use openimage_core::{FiniteGroup, Perm, Subgroup};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PRIMES: [u64; 4] = [2, 3, 5, 7];

pub fn random_perm(rng: &mut ChaCha8Rng, degree: usize) -> Perm {
    let mut images: Vec<u32> = (0..degree as u32).collect();
    images.shuffle(rng);
    Perm::from_images(images)
}

/// A permutation group on at most 7 points, generated by one or two random
/// permutations, with order in `2..=max_order`.
pub fn random_perm_group(rng: &mut ChaCha8Rng, max_order: usize) -> FiniteGroup<Perm> {
    loop {
        let degree = rng.gen_range(3..=7);
        let count = rng.gen_range(1..=2);
        let gens: Vec<Perm> = (0..count).map(|_| random_perm(rng, degree)).collect();
        if let Ok(g) = FiniteGroup::generate(Perm::identity(degree), &gens, max_order) {
            if g.order() >= 2 {
                return g;
            }
        }
    }
}

pub fn random_element<E: openimage_core::GroupElement>(rng: &mut ChaCha8Rng, g: &FiniteGroup<E>) -> u32 {
    rng.gen_range(0..g.order() as u32)
}

fn p_part(n: u64, p: u64) -> u64 {
    let mut q = 1;
    let mut n = n;
    while n % p == 0 {
        n /= p;
        q *= p;
    }
    q
}

/// A filtration on the cyclic group `⟨x⟩` of order `m·p^a` with lower jumps
/// built from integral upper jumps (so Hasse–Arf holds). `None` when the
/// chain would be longer than `max_len`.
pub fn cyclic_filtration<E: openimage_core::GroupElement>(
    rng: &mut ChaCha8Rng,
    g: &FiniteGroup<E>,
    x: u32,
    p: u64,
    max_len: usize,
) -> Option<InertiaFiltration> {
    let order = g.element_order(x);
    let wild = p_part(order, p);
    let m = order / wild;
    let g0 = g.subgroup(&[x]);
    if wild == 1 {
        return InertiaFiltration::tame(g, g0, p).ok();
    }
    let mut a = 0;
    while p.pow(a) < wild {
        a += 1;
    }
    // Subgroup of order p^{a-k}; upper jumps step by 1 or 2.
    let layer = |k: u32| g.subgroup(&[g.pow(x, m * p.pow(k))]);
    let mut lower = m * rng.gen_range(1..=2u64);
    let mut jumps = vec![lower];
    for k in 1..a {
        lower += m * p.pow(k) * rng.gen_range(1..=2u64);
        jumps.push(lower);
    }
    if lower as usize > max_len {
        return None;
    }
    let mut chain = vec![g0];
    for j in 1..=lower {
        let passed = jumps.iter().filter(|&&i| i < j).count() as u32;
        chain.push(layer(passed));
    }
    InertiaFiltration::new(g, chain, p).ok()
}

/// One randomized cover: group, residue prime, label prime and punctures.
pub struct CoverCase {
    pub group: FiniteGroup<Perm>,
    pub base_genus: u64,
    pub p: u64,
    pub ell: u64,
    pub punctures: Vec<InertiaFiltration>,
}

impl CoverCase {
    pub fn spec(&self) -> CoverSpec<'_, Perm> {
        CoverSpec::new(self.base_genus, self.p, self.ell, &self.group, self.punctures.clone()).unwrap()
    }
}

/// A cover with base genus at least 1 and each puncture filtration used
/// twice, so that `2g − 2` is even for every intermediate cover.
pub fn random_cover(rng: &mut ChaCha8Rng, max_order: usize) -> CoverCase {
    loop {
        let group = random_perm_group(rng, max_order);
        let dividing: Vec<u64> = PRIMES.iter().copied().filter(|&q| group.order() as u64 % q == 0).collect();
        let p = if rng.gen_bool(0.6) && !dividing.is_empty() {
            *dividing.choose(rng).unwrap()
        } else {
            *PRIMES.choose(rng).unwrap()
        };
        let ell = *PRIMES.iter().find(|&&q| q != p).unwrap();
        let distinct = rng.gen_range(1..=2);
        let mut punctures = Vec::new();
        for _ in 0..distinct {
            let x = random_element(rng, &group);
            if let Some(f) = cyclic_filtration(rng, &group, x, p, 120) {
                punctures.push(f.clone());
                punctures.push(f);
            }
        }
        if punctures.is_empty() {
            continue;
        }
        return CoverCase { group, base_genus: rng.gen_range(1..=2), p, ell, punctures };
    }
}

/// Subgroups to test on `g`: every class representative for small groups,
/// otherwise a handful of random one- and two-generator subgroups.
pub fn test_subgroups(rng: &mut ChaCha8Rng, g: &FiniteGroup<Perm>) -> Vec<Subgroup> {
    if g.order() <= 120 {
        return lattice::subgroup_classes(g, 120).unwrap().into_iter().map(|c| c.representative).collect();
    }
    let mut out = vec![g.trivial(), g.whole()];
    for _ in 0..6 {
        let count = rng.gen_range(1..=2);
        let gens: Vec<u32> = (0..count).map(|_| random_element(rng, g)).collect();
        let h = g.subgroup(&gens);
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}
