//! Full-grid reference evaluation of the measure at a fixed generation.
//!
//! Enumerates every leaf of the stated generation, converts the log-domain
//! leaf masses to linear double-double and accumulates exact-order prefix
//! sums. Queries against grid-aligned intervals then take two lookups.
//! This is deliberately a different evaluation route from
//! [`crate::cascade::mass_of_interval`]: no greedy decomposition, no
//! boundary recursion, no log-sum-exp — it exists to check that path.

use crate::cascade::{generation_length_exp2, pull_back_tile};
use crate::dd::Dd;
use crate::dyadic::{DyadicRational, IntervalD};
use crate::error::{CoreError, Result};
use crate::weight::PhiConfig;
use num_traits::ToPrimitive;

pub struct GridOracle {
    generation: i32,
    leaf_exp: i64,
    /// prefix[m] = mu([-1, -1 + m * 2^leaf_exp)) in linear double-double
    prefix: Vec<Dd>,
}

impl GridOracle {
    /// Builds the full generation grid; practical for generation <= 5
    /// (2^21 leaves).
    pub fn build(generation: i32, cfg: &PhiConfig) -> Result<Self> {
        if !(0..=5).contains(&generation) {
            return Err(CoreError::Domain(format!(
                "grid oracle supports generations 0..=5, got {generation}"
            )));
        }
        let levels = generation as u32 + 1;
        // ln mass shares per level tile, reused across all families
        let mut tile_lns: Vec<Vec<Dd>> = Vec::with_capacity(levels as usize);
        for level in 1..=levels {
            let mut v = Vec::with_capacity(1 << level);
            for pos in 0..(1u64 << level) {
                v.push(cfg.log_phi_integral(&pull_back_tile(level, pos))?.ln());
            }
            tile_lns.push(v);
        }
        let leaf_count: u64 = tile_lns.iter().map(|v| v.len() as u64).product();
        let mut prefix = Vec::with_capacity(leaf_count as usize + 1);
        prefix.push(Dd::from_f64(0.0));

        // depth-first, left-to-right: leaves come out in spatial order
        fn walk(tile_lns: &[Vec<Dd>], ln: Dd, acc: &mut Dd, prefix: &mut Vec<Dd>) {
            match tile_lns.split_first() {
                None => {
                    *acc += ln.exp();
                    prefix.push(*acc);
                }
                Some((level, rest)) => {
                    for &t in level {
                        walk(rest, ln + t, acc, prefix);
                    }
                }
            }
        }
        let mut acc = Dd::from_f64(0.0);
        walk(&tile_lns, Dd::from_f64(0.0), &mut acc, &mut prefix);
        debug_assert_eq!(prefix.len() as u64, leaf_count + 1);
        Ok(GridOracle {
            generation,
            leaf_exp: generation_length_exp2(generation),
            prefix,
        })
    }

    pub fn generation(&self) -> i32 {
        self.generation
    }

    pub fn leaf_count(&self) -> usize {
        self.prefix.len() - 1
    }

    /// Total mass of the grid (should be 1 up to quadrature error).
    pub fn total(&self) -> Dd {
        *self.prefix.last().unwrap()
    }

    /// mu(J) for an interval aligned to the leaf grid, as ln (f64) or
    /// None for an empty/zero-mass query.
    pub fn ln_mass_of_aligned(&self, j: &IntervalD) -> Result<Option<f64>> {
        let a = self.grid_index(j.left())?;
        let b = self.grid_index(j.right())?;
        if b <= a {
            return Ok(None);
        }
        let v = self.prefix[b] - self.prefix[a];
        if v.hi() <= 0.0 {
            return Ok(None);
        }
        Ok(Some(v.ln().to_f64()))
    }

    fn grid_index(&self, x: &DyadicRational) -> Result<usize> {
        let offset = x - &DyadicRational::from_int(-1);
        let idx = offset.floor_shr(self.leaf_exp);
        let back = DyadicRational::new(idx.clone(), self.leaf_exp);
        if back != offset {
            return Err(CoreError::Domain(format!(
                "{x} is not aligned to the generation-{} grid",
                self.generation
            )));
        }
        idx.to_usize()
            .filter(|&i| i < self.prefix.len())
            .ok_or_else(|| CoreError::Domain(format!("{x} outside the grid")))
    }
}
