use crate::group::GroupElement;

/// A permutation of `0..n`, acting on the left: `(a·b)(i) = a(b(i))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm(Box<[u32]>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Self {
        debug_assert!({
            let mut seen = vec![false; images.len()];
            images.iter().all(|&i| !std::mem::replace(&mut seen[i as usize], true))
        });
        Perm(images.into_boxed_slice())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, i: u32) -> u32 {
        self.0[i as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }
}

impl GroupElement for Perm {
    fn mul(&self, other: &Self) -> Self {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv.into_boxed_slice())
    }

    fn identity_like(&self) -> Self {
        Perm::identity(self.0.len())
    }

    fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }
}
