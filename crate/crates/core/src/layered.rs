//! Matrix groups too large to enumerate, stored along the congruence
//! filtration.
//!
//! A group `G ⊆ GL_r(Z/ℓᴺ)` is kept as its image mod `ℓ` (enumerated, with a
//! lift of each element) together with a polycyclic sequence of the kernel
//! `G ∩ Γ(1)`. Each layer `Γ(k)/Γ(k+1)` embeds in `M_r(F_ℓ)` via
//! `g ↦ (g − 1)/ℓᵏ`, and the sequence is closed under `ℓ`-th powers and
//! commutators, so membership is a sift and the order is `|top|·ℓ^{Σ dim}`.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use crate::arith::{ipow, mod_inverse};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::matrix::ModMatrix;

#[derive(Clone, Debug)]
struct LayerVector {
    pivot: usize,
    vector: Vec<u64>,
    element: ModMatrix,
}

/// Polycyclic sequence of an `ℓ`-subgroup of `Γ(1) ⊆ GL_r(Z/ℓᴺ)`.
#[derive(Clone, Debug)]
pub struct KernelPcgs {
    prime: u32,
    level: u32,
    dim: usize,
    /// `layers[k - 1]` holds the basis of layer `k`, `1 ≤ k < N`.
    layers: Vec<Vec<LayerVector>>,
}

impl KernelPcgs {
    pub fn new(prime: u32, level: u32, dim: usize) -> Self {
        KernelPcgs { prime, level, dim, layers: vec![Vec::new(); level.saturating_sub(1) as usize] }
    }

    fn layer_vector(&self, g: &ModMatrix, k: u32) -> Vec<u64> {
        let l = self.prime as u64;
        let scale = ipow(l, k);
        let m = g.modulus();
        let d = self.dim;
        let mut v = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let x = (g.get(i, j) + m - u64::from(i == j)) % m;
                v.push(x / scale % l);
            }
        }
        v
    }

    /// Reduces `g ∈ Γ(1)` against the sequence. Returns the residue element,
    /// its layer and its reduced layer vector, or `None` if `g` sifts to 1.
    fn sift(&self, mut g: ModMatrix) -> Option<(u32, ModMatrix, Vec<u64>)> {
        let l = self.prime as u64;
        debug_assert!(g.is_congruent_identity(1));
        for k in 1..self.level {
            if g.is_congruent_identity(k + 1) {
                continue;
            }
            let mut v = self.layer_vector(&g, k);
            for b in &self.layers[k as usize - 1] {
                let c = v[b.pivot];
                if c != 0 {
                    g = g.mul(&b.element.inverse().pow(c));
                    for (x, y) in v.iter_mut().zip(&b.vector) {
                        *x = (*x + l * l - c * y) % l;
                    }
                }
            }
            if v.iter().any(|&x| x != 0) {
                return Some((k, g, v));
            }
            debug_assert!(g.is_congruent_identity(k + 1));
        }
        debug_assert!(g.is_identity());
        None
    }

    pub fn contains(&self, g: &ModMatrix) -> bool {
        g.is_congruent_identity(1) && self.sift(g.clone()).is_none()
    }

    /// Adds `g` (and everything needed to keep the sequence closed).
    pub fn insert(&mut self, g: ModMatrix) {
        let l = self.prime as u64;
        let mut work = VecDeque::from([g]);
        while let Some(x) = work.pop_front() {
            let Some((k, h, v)) = self.sift(x) else { continue };
            let pivot = v.iter().position(|&c| c != 0).unwrap();
            let s = mod_inverse(v[pivot], l).unwrap();
            let element = h.pow(s);
            let vector: Vec<u64> = v.iter().map(|&c| c * s % l).collect();
            let mut follow = vec![element.pow(l)];
            for layer in &self.layers {
                for b in layer {
                    follow.push(element.inverse().mul(&b.element.inverse()).mul(&element).mul(&b.element));
                }
            }
            self.layers[k as usize - 1].push(LayerVector { pivot, vector, element });
            work.extend(follow);
        }
    }

    /// `log_ℓ` of the order.
    pub fn log_order(&self) -> u32 {
        self.layers.iter().map(|l| l.len() as u32).sum()
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    /// Sequence elements lying in `Γ(m)`; they generate `G ∩ Γ(m)`.
    pub fn generators_from_layer(&self, m: u32) -> Vec<ModMatrix> {
        self.layers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i as u32 + 1 >= m)
            .flat_map(|(_, l)| l.iter().map(|b| b.element.clone()))
            .collect()
    }
}

/// A subgroup of `GL_r(Z/ℓᴺ)` given by generators, with exact order and
/// membership.
#[derive(Clone, Debug)]
pub struct LayeredGroup {
    prime: u32,
    level: u32,
    dim: usize,
    generators: Vec<ModMatrix>,
    top: Vec<ModMatrix>,
    top_index: FxHashMap<ModMatrix, usize>,
    lifts: Vec<ModMatrix>,
    kernel: KernelPcgs,
}

impl LayeredGroup {
    /// `top_cap` bounds the size of the image mod `ℓ`.
    pub fn generate(gens: &[ModMatrix], top_cap: usize) -> Result<Self> {
        let first = gens.first().ok_or_else(|| Error::DimensionMismatch("no generators".into()))?;
        let (prime, level, dim) = (first.prime(), first.exponent(), first.dim());
        if gens.iter().any(|g| g.prime() != prime || g.exponent() != level || g.dim() != dim) {
            return Err(Error::DimensionMismatch("generators differ in prime, level or rank".into()));
        }
        if let Some(g) = gens.iter().find(|g| !g.is_invertible()) {
            return Err(Error::NotInvertible { modulus: g.modulus() });
        }
        let id = ModMatrix::identity(prime, level, dim);
        let mut top = vec![id.reduce(1)];
        let mut lifts = vec![id.clone()];
        let mut top_index = FxHashMap::default();
        top_index.insert(top[0].clone(), 0usize);
        let reduced: Vec<ModMatrix> = gens.iter().map(|g| g.reduce(1)).collect();
        let mut kernel = KernelPcgs::new(prime, level, dim);
        let mut head = 0;
        while head < top.len() {
            for (s, sbar) in gens.iter().zip(&reduced) {
                let y = top[head].mul(sbar);
                let lift = lifts[head].mul(s);
                match top_index.get(&y) {
                    Some(&j) => {
                        let schreier = lifts[j].inverse().mul(&lift);
                        if level > 1 && !schreier.is_identity() {
                            kernel.insert(schreier);
                        }
                    }
                    None => {
                        if top.len() >= top_cap {
                            return Err(Error::CapExceeded { what: "image mod ℓ", cap: top_cap });
                        }
                        top_index.insert(y.clone(), top.len());
                        top.push(y);
                        lifts.push(lift);
                    }
                }
            }
            head += 1;
        }
        Ok(LayeredGroup { prime, level, dim, generators: gens.to_vec(), top, top_index, lifts, kernel })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ModMatrix] {
        &self.generators
    }

    pub fn top_order(&self) -> usize {
        self.top.len()
    }

    pub fn kernel(&self) -> &KernelPcgs {
        &self.kernel
    }

    /// Exact order as a `u128`.
    pub fn order(&self) -> u128 {
        self.top.len() as u128 * (self.prime as u128).pow(self.kernel.log_order())
    }

    pub fn contains(&self, g: &ModMatrix) -> bool {
        let Some(&i) = self.top_index.get(&g.reduce(1)) else {
            return false;
        };
        self.kernel.contains(&self.lifts[i].inverse().mul(g))
    }

    /// Generators of `G ∩ Γ(m)` for `m ≥ 1`.
    pub fn congruence_kernel_generators(&self, m: u32) -> Vec<ModMatrix> {
        assert!(m >= 1);
        self.kernel.generators_from_layer(m)
    }

    /// Order of `G ∩ Γ(m)`.
    pub fn congruence_kernel_order(&self, m: u32) -> u128 {
        if m == 0 {
            return self.order();
        }
        let dims = self.kernel.layer_dims();
        let e: usize = dims.iter().skip(m as usize - 1).sum();
        (self.prime as u128).pow(e as u32)
    }

    /// Image under reduction mod `ℓ^n`.
    pub fn reduce(&self, n: u32, top_cap: usize) -> Result<LayeredGroup> {
        let gens: Vec<ModMatrix> = self.generators.iter().map(|g| g.reduce(n)).collect();
        LayeredGroup::generate(&gens, top_cap)
    }

    /// Normal closure of `set` under conjugation by `self`'s generators.
    pub fn normal_closure(&self, set: &[ModMatrix], top_cap: usize) -> Result<LayeredGroup> {
        let id = ModMatrix::identity(self.prime, self.level, self.dim);
        let mut gens: Vec<ModMatrix> = set.iter().filter(|g| !g.is_identity()).cloned().collect();
        if gens.is_empty() {
            return LayeredGroup::generate(&[id], top_cap);
        }
        loop {
            let h = LayeredGroup::generate(&gens, top_cap)?;
            let mut new = Vec::new();
            for g in &self.generators {
                let gi = g.inverse();
                for x in h.generators.iter().chain(h.kernel.generators_from_layer(1).iter()) {
                    let c = g.mul(x).mul(&gi);
                    if !h.contains(&c) && !new.iter().any(|y: &ModMatrix| *y == c) {
                        new.push(c);
                    }
                }
            }
            if new.is_empty() {
                return Ok(h);
            }
            gens.extend(new);
        }
    }

    /// Derived subgroup.
    pub fn derived(&self, top_cap: usize) -> Result<LayeredGroup> {
        let mut set = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                set.push(a.inverse().mul(&b.inverse()).mul(a).mul(b));
            }
        }
        self.normal_closure(&set, top_cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    fn sl2_gens(p: u32, n: u32) -> Vec<ModMatrix> {
        vec![
            ModMatrix::invertible(p, n, &[vec![1, 1], vec![0, 1]]).unwrap(),
            ModMatrix::invertible(p, n, &[vec![1, 0], vec![1, 1]]).unwrap(),
        ]
    }

    #[test]
    fn order_matches_enumeration() {
        let gens = sl2_gens(3, 2);
        let lg = LayeredGroup::generate(&gens, 10_000).unwrap();
        let fg = FiniteGroup::generate(gens[0].identity_like(), &gens, 100_000).unwrap();
        assert_eq!(lg.order(), fg.order() as u128);
        assert_eq!(lg.order(), 24 * 27);
        for e in fg.elements() {
            assert!(lg.contains(e));
        }
        let outside = ModMatrix::invertible(3, 2, &[vec![2, 0], vec![0, 1]]).unwrap();
        assert!(!lg.contains(&outside));
    }

    #[test]
    fn sl2_mod_625_order_and_perfectness() {
        let lg = LayeredGroup::generate(&sl2_gens(5, 4), 10_000).unwrap();
        assert_eq!(lg.order(), 120 * 125u128.pow(3));
        assert_eq!(lg.congruence_kernel_order(1), 125u128.pow(3));
        let d = lg.derived(10_000).unwrap();
        assert_eq!(d.order(), lg.order());
    }

    #[test]
    fn borel_derived_is_unipotent() {
        let gens = vec![
            ModMatrix::invertible(3, 3, &[vec![2, 0], vec![0, 1]]).unwrap(),
            ModMatrix::invertible(3, 3, &[vec![1, 0], vec![0, 2]]).unwrap(),
            ModMatrix::invertible(3, 3, &[vec![1, 1], vec![0, 1]]).unwrap(),
        ];
        let lg = LayeredGroup::generate(&gens, 1000).unwrap();
        assert_eq!(lg.order(), 18 * 18 * 27);
        assert_eq!(lg.derived(1000).unwrap().order(), 27);
    }
}
