//! Towers `Π_N ↠ Π_{N-1} ↠ … ↠ Π_1` of reductions of one generated group.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::layered::LayeredGroup;
use crate::matrix::ModMatrix;
use crate::modgroup::{self, close_generate, ModGroup};

/// Cap on the image mod `ℓ` used for layered views of a tower.
pub const TOP_CAP: usize = 200_000;

/// The finite shadow of a closed subgroup of `GL_r(Z_ℓ)` up to level `N`.
/// Levels are enumerated on first use.
#[derive(Debug)]
pub struct GroupTower {
    prime: u32,
    rank: usize,
    max_level: u32,
    generators: Vec<ModMatrix>,
    cap: usize,
    levels: Vec<OnceLock<ModGroup>>,
}

impl Clone for GroupTower {
    fn clone(&self) -> Self {
        GroupTower::new(self.generators.clone(), self.cap).expect("validated generators")
    }
}

impl GroupTower {
    /// `gens` live at the top level `N`; `cap` bounds every enumerated level.
    pub fn new(gens: Vec<ModMatrix>, cap: usize) -> Result<Self> {
        let (prime, max_level, rank) = modgroup::check_generators(&gens)?;
        Ok(GroupTower {
            prime,
            rank,
            max_level,
            generators: gens,
            cap,
            levels: (0..max_level).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn generators(&self) -> &[ModMatrix] {
        &self.generators
    }

    /// The tower cut off at level `n`.
    pub fn truncate(&self, n: u32) -> Result<GroupTower> {
        self.check_level(n)?;
        GroupTower::new(reduce_all(&self.generators, n), self.cap)
    }

    fn check_level(&self, n: u32) -> Result<()> {
        if n == 0 || n > self.max_level {
            return Err(Error::LevelOutOfRange { level: n, max: self.max_level });
        }
        Ok(())
    }

    pub fn generators_at(&self, n: u32) -> Result<Vec<ModMatrix>> {
        self.check_level(n)?;
        Ok(reduce_all(&self.generators, n))
    }

    /// `Π_n`, enumerated.
    pub fn level(&self, n: u32) -> Result<&ModGroup> {
        self.check_level(n)?;
        let cell = &self.levels[n as usize - 1];
        if let Some(g) = cell.get() {
            return Ok(g);
        }
        let g = close_generate(&reduce_all(&self.generators, n), self.cap)?;
        let _ = cell.set(g);
        Ok(cell.get().unwrap())
    }

    /// Image in `Π_n` of the subgroup generated by `gens` (given at any
    /// level `≥ n`).
    pub fn image_subgroup(&self, n: u32, gens: &[ModMatrix]) -> Result<Subgroup> {
        let g = self.level(n)?;
        if gens.iter().any(|x| x.exponent() < n) {
            return Err(Error::LevelOutOfRange { level: n, max: gens[0].exponent() });
        }
        g.subgroup_of_elements(&reduce_all(gens, n))
    }

    /// Index map of `Π_n → Π_{n-1}`, for `n ≥ 2`.
    pub fn reduction_map(&self, n: u32) -> Result<Vec<u32>> {
        if n < 2 {
            return Err(Error::LevelOutOfRange { level: n, max: self.max_level });
        }
        modgroup::reduction_map(self.level(n)?, self.level(n - 1)?)
    }

    /// Layered view of `Π_N` (no enumeration of the full group).
    pub fn layered(&self) -> Result<LayeredGroup> {
        LayeredGroup::generate(&self.generators, TOP_CAP)
    }
}

pub fn reduce_all(gens: &[ModMatrix], n: u32) -> Vec<ModMatrix> {
    gens.iter().map(|g| g.reduce(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn borel_levels() {
        let gens = vec![
            ModMatrix::invertible(3, 3, &[vec![2, 0], vec![0, 1]]).unwrap(),
            ModMatrix::invertible(3, 3, &[vec![1, 0], vec![0, 2]]).unwrap(),
            ModMatrix::invertible(3, 3, &[vec![1, 1], vec![0, 1]]).unwrap(),
        ];
        let t = GroupTower::new(gens, 100_000).unwrap();
        let orders: Vec<usize> = (1..=3).map(|n| t.level(n).unwrap().order()).collect();
        assert_eq!(orders, vec![12, 324, 8748]);
        let map = t.reduction_map(3).unwrap();
        let mut hits = vec![0usize; 324];
        for &m in &map {
            hits[m as usize] += 1;
        }
        assert!(hits.iter().all(|&h| h == 27));
        assert!(t.level(4).is_err());
    }
}
