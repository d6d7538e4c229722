//! The cascade measure itself: construction intervals, pull-backs, node
//! masses, certified enclosures of mu on arbitrary intervals, and
//! mass-distributed sampling.
//!
//! A node is addressed by its path (i_1, ..., i_p) with i_m in
//! {+-1, ..., +-2^{m-1}}; a path of length p names a generation p-1
//! construction interval (the empty path is the root [-1,1)). Each node
//! splits into 2^{p+1} equal half-open children, enumerated left to
//! right, and the m-th child (0-based, left to right) draws its mass
//! share from the pull-back tile [-1 + m 2^{1-p'}, -1 + (m+1) 2^{1-p'})
//! at child level p' = p+1: the tiles of one family always retile the
//! whole support, which is what makes the masses conserve exactly.

use crate::dyadic::{DyadicRational, IntervalD};
use crate::error::{CoreError, Result};
use crate::logpos::{log_sum, LogPos};
use crate::weight::PhiConfig;
use crate::LogPositive;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Hard ceiling on the child level: families have 2^p members and tile
/// enumeration must stay addressable.
const MAX_LEVEL: u32 = 40;

/// Path in the cascade tree: coordinate m lies in {+-1, ..., +-2^{m-1}}.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeIndex {
    path: Vec<i64>,
}

impl NodeIndex {
    pub fn root() -> Self {
        NodeIndex { path: Vec::new() }
    }

    pub fn from_path(path: Vec<i64>) -> Result<Self> {
        for (idx, &i) in path.iter().enumerate() {
            let level = idx as u32 + 1;
            let bound = 1i64 << (level - 1);
            if i == 0 || i.abs() > bound {
                return Err(CoreError::Domain(format!(
                    "coordinate {i} at level {level} outside [{}]",
                    bound
                )));
            }
        }
        Ok(NodeIndex { path })
    }

    pub fn path(&self) -> &[i64] {
        &self.path
    }

    pub fn level(&self) -> u32 {
        self.path.len() as u32
    }

    /// Generation of the interval this index names; the root is -1.
    pub fn generation(&self) -> i32 {
        self.path.len() as i32 - 1
    }

    pub fn child(&self, ordinal: i64) -> Result<Self> {
        let mut path = self.path.clone();
        path.push(ordinal);
        NodeIndex::from_path(path)
    }

    /// Mirror image: negating every coordinate reflects the interval
    /// through 0.
    pub fn reflected(&self) -> Self {
        NodeIndex {
            path: self.path.iter().map(|i| -i).collect(),
        }
    }
}

impl std::fmt::Debug for NodeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "NodeIndex{:?}", self.path)
    }
}

/// Signed child ordinal from the 0-based left-to-right position at `level`.
pub fn ordinal_from_position(level: u32, pos: u64) -> i64 {
    let half = 1u64 << (level - 1);
    if pos < half {
        pos as i64 - half as i64
    } else {
        pos as i64 - half as i64 + 1
    }
}

/// 0-based left-to-right position of a signed ordinal at `level`.
pub fn position_from_ordinal(level: u32, ordinal: i64) -> u64 {
    let half = 1i64 << (level - 1);
    if ordinal < 0 {
        (ordinal + half) as u64
    } else {
        (ordinal + half - 1) as u64
    }
}

/// The pull-back tile of the child at `pos` (0-based) on `level`:
/// `[-1 + pos*2^{1-level}, -1 + (pos+1)*2^{1-level})`. One family's tiles
/// exactly retile [-1, 1).
pub fn pull_back_tile(level: u32, pos: u64) -> IntervalD {
    debug_assert!(level >= 1 && level <= MAX_LEVEL && pos < (1u64 << level));
    pull_back_union(level, pos, pos + 1)
}

/// Union of the tiles at positions [pos_lo, pos_hi) — a single interval.
pub fn pull_back_union(level: u32, pos_lo: u64, pos_hi: u64) -> IntervalD {
    debug_assert!(pos_lo < pos_hi && pos_hi <= (1u64 << level));
    let e = 1 - level as i64;
    let minus_one = DyadicRational::from_int(-1);
    let left = &minus_one + &DyadicRational::new(BigInt::from(pos_lo), e);
    let right = &minus_one + &DyadicRational::new(BigInt::from(pos_hi), e);
    IntervalD::new(left, right).expect("tile union is nonempty")
}

/// A construction interval with its exact extent and log-domain mass.
#[derive(Clone, Debug)]
pub struct ConstructionInterval {
    pub index: NodeIndex,
    pub extent: IntervalD,
    pub ln_mass: LogPositive,
}

impl ConstructionInterval {
    pub fn root() -> Self {
        ConstructionInterval {
            index: NodeIndex::root(),
            extent: IntervalD::support(),
            ln_mass: LogPos::one(),
        }
    }

    pub fn generation(&self) -> i32 {
        self.index.generation()
    }

    pub fn length(&self) -> DyadicRational {
        self.extent.length()
    }
}

/// The pull-back of one child: the subinterval of [-1,1) whose
/// phi-integral is that child's mass share.
#[derive(Clone, Debug)]
pub struct PullBack {
    pub child_ordinal: i64,
    pub extent: IntervalD,
}

pub fn pull_back(level: u32, ordinal: i64) -> PullBack {
    let pos = position_from_ordinal(level, ordinal);
    PullBack {
        child_ordinal: ordinal,
        extent: pull_back_tile(level, pos),
    }
}

/// Length of generation-g intervals: 2^{1 - (g+1)(g+2)/2}.
pub fn generation_length_exp2(generation: i32) -> i64 {
    let g = generation as i64;
    1 - (g + 1) * (g + 2) / 2
}

/// All 2^{p+1} children of a node (child level p+1), tiling it exactly.
pub fn children(
    node: &ConstructionInterval,
    cfg: &PhiConfig,
) -> Result<Vec<ConstructionInterval>> {
    let level = node.index.level() + 1;
    if level > 22 {
        return Err(CoreError::Domain(format!(
            "refusing to materialize 2^{level} children; walk the tree lazily instead"
        )));
    }
    let count = 1u64 << level;
    let child_len_exp = generation_length_exp2(node.generation() + 1);
    let child_len = DyadicRational::pow2(child_len_exp);
    let mut out = Vec::with_capacity(count as usize);
    for pos in 0..count {
        let tile = pull_back_tile(level, pos);
        let share = cfg.log_phi_integral(&tile)?;
        let left = node.extent.left() + &(&DyadicRational::new(BigInt::from(pos), 0) * &child_len);
        let extent = IntervalD::new(left.clone(), &left + &child_len)?;
        out.push(ConstructionInterval {
            index: node.index.child(ordinal_from_position(level, pos))?,
            extent,
            ln_mass: node.ln_mass.mul(&share),
        });
    }
    Ok(out)
}

/// The unique generation-`generation` construction interval containing x.
pub fn locate(
    x: &DyadicRational,
    generation: i32,
    cfg: &PhiConfig,
) -> Result<ConstructionInterval> {
    Ok(chain(x, generation, cfg)?.pop().expect("chain nonempty"))
}

/// The chain root -> generation g of construction intervals containing x
/// (root excluded; entry k is the generation-k interval).
pub fn chain(
    x: &DyadicRational,
    generation: i32,
    cfg: &PhiConfig,
) -> Result<Vec<ConstructionInterval>> {
    let support = IntervalD::support();
    if !support.contains_point(x) {
        return Err(CoreError::Domain(format!("point {x} outside [-1, 1)")));
    }
    if generation < 0 || generation as u32 + 1 > MAX_LEVEL {
        return Err(CoreError::Domain(format!("generation {generation} out of range")));
    }
    let mut node = ConstructionInterval::root();
    let mut out = Vec::with_capacity(generation as usize + 1);
    for level in 1..=(generation as u32 + 1) {
        let child_len_exp = generation_length_exp2(level as i32 - 1);
        let offset = x - node.extent.left();
        let pos = offset
            .floor_shr(child_len_exp)
            .to_u64()
            .expect("child position fits u64");
        let tile = pull_back_tile(level, pos);
        let share = cfg.log_phi_integral(&tile)?;
        let child_len = DyadicRational::pow2(child_len_exp);
        let left =
            node.extent.left() + &(&DyadicRational::new(BigInt::from(pos), 0) * &child_len);
        let extent = IntervalD::new(left.clone(), &left + &child_len)?;
        node = ConstructionInterval {
            index: node.index.child(ordinal_from_position(level, pos))?,
            extent,
            ln_mass: node.ln_mass.mul(&share),
        };
        out.push(node.clone());
    }
    Ok(out)
}

/// Certified two-sided bounds on mu of an interval.
#[derive(Clone, Debug)]
pub struct MassEnclosure {
    pub lower: LogPositive,
    pub upper: LogPositive,
    pub generation_reached: i32,
}

impl MassEnclosure {
    fn exact(v: LogPositive, generation_reached: i32) -> Self {
        MassEnclosure {
            lower: v,
            upper: v,
            generation_reached,
        }
    }

    /// upper/lower - 1; 0 when both bounds vanish, +inf when only the
    /// lower does.
    pub fn relative_gap(&self) -> f64 {
        if self.upper.is_zero() {
            return 0.0;
        }
        if self.lower.is_zero() {
            return f64::INFINITY;
        }
        self.upper.ln_ratio(&self.lower).to_f64().exp_m1()
    }

    pub fn converged(&self, rel_gap: f64) -> bool {
        self.relative_gap() <= rel_gap
    }

    /// Geometric midpoint of the bounds, the scalar most analyses report.
    pub fn midpoint(&self) -> LogPositive {
        if self.lower.is_zero() || self.upper.is_zero() {
            return self.upper;
        }
        LogPos::from_ln((self.lower.ln() + self.upper.ln()).mul_pwr2(0.5))
    }

    pub fn contains_ln(&self, ln_value: f64) -> bool {
        let lo_ok = self.lower.is_zero() || self.lower.ln_f64() <= ln_value;
        let hi_ok = !self.upper.is_zero() && ln_value <= self.upper.ln_f64();
        lo_ok && hi_ok
    }
}

struct EncloseState<'a> {
    cfg: &'a PhiConfig,
    rel_gap: f64,
    max_gen: i32,
    lower: LogPositive,
    unresolved: Vec<LogPositive>,
    deepest: i32,
}

/// Certified enclosure of mu(J) for an arbitrary interval J (clipped to
/// the support; outside mass is zero).
///
/// J is decomposed greedily into maximal runs of whole construction
/// intervals, whose masses are exact by the cascade rule, plus at most two
/// boundary fragments per level. A fragment stops being refined once its
/// whole-child upper bound drops below rel_gap/4 times the accumulated
/// lower bound, or at max_gen; whatever remains unresolved widens the
/// upper bound only.
pub fn mass_of_interval(
    j: &IntervalD,
    rel_gap: f64,
    max_gen: i32,
    cfg: &PhiConfig,
) -> Result<MassEnclosure> {
    if !(rel_gap > 0.0) {
        return Err(CoreError::Domain(format!("rel_gap {rel_gap} <= 0")));
    }
    let support = IntervalD::support();
    let clip = match support.intersect(j) {
        Some(c) => c,
        None => return Ok(MassEnclosure::exact(LogPos::zero(), 0)),
    };
    if clip == support {
        return Ok(MassEnclosure::exact(LogPos::one(), 0));
    }
    let mut state = EncloseState {
        cfg,
        rel_gap,
        max_gen,
        lower: LogPos::zero(),
        unresolved: Vec::new(),
        deepest: 0,
    };
    let root = ConstructionInterval::root();
    descend(&root.extent, &root.ln_mass, 1, &clip, &mut state)?;

    // fold quadrature slack into the certified bounds: every contribution
    // is a product of at most (level+1) integrals at the configured
    // relative tolerance
    let depth_limbs = 2.0 * (state.deepest.max(1) as f64 + 2.0);
    let slack = depth_limbs * cfg.quad_rel_tol();
    let lower = widen(&state.lower, (-slack).ln_1p());
    let mut upper_core = state.lower;
    if !state.unresolved.is_empty() {
        state.unresolved.push(upper_core);
        upper_core = log_sum(&state.unresolved);
    }
    let upper = widen(&upper_core, slack.ln_1p());
    Ok(MassEnclosure {
        lower,
        upper,
        generation_reached: state.deepest,
    })
}

fn widen(v: &LogPositive, ln_factor: f64) -> LogPositive {
    if v.is_zero() {
        *v
    } else {
        v.mul(&LogPos::from_ln_f64(ln_factor))
    }
}

/// Recursive decomposition step: `sub = clip ∩ node` is nonempty and a
/// strict subinterval of the node at entry.
fn descend(
    node_extent: &IntervalD,
    node_mass: &LogPositive,
    level: u32,
    clip: &IntervalD,
    state: &mut EncloseState<'_>,
) -> Result<()> {
    let sub = node_extent
        .intersect(clip)
        .expect("descend called with intersecting clip");
    if &sub == node_extent {
        state.lower = state.lower.add(node_mass);
        return Ok(());
    }
    let node_generation = level as i32 - 2; // generation of the node itself
    state.deepest = state.deepest.max(node_generation + 1);
    if node_generation + 1 > state.max_gen || level > MAX_LEVEL {
        state.unresolved.push(*node_mass);
        return Ok(());
    }
    let child_len_exp = generation_length_exp2(node_generation + 1);
    let l = node_extent.left();
    let count = 1u64 << level;

    // positions of the children fully inside sub
    let left_off = sub.left() - l;
    let right_off = sub.right() - l;
    let a_full = ceil_pos(&left_off, child_len_exp);
    let b_full = right_off.floor_shr(child_len_exp).to_u64().unwrap();
    let left_aligned = floor_is_exact(&left_off, child_len_exp);
    let right_aligned = floor_is_exact(&right_off, child_len_exp);

    if a_full < b_full {
        let share = state
            .cfg
            .log_phi_integral(&pull_back_union(level, a_full, b_full))?;
        state.lower = state.lower.add(&node_mass.mul(&share));
    }

    // children only partially covered: the one holding sub.left (unless
    // aligned) and the one holding sub.right (unless aligned); they can
    // coincide when sub sits inside a single child
    let mut fragments: Vec<u64> = Vec::with_capacity(2);
    if !left_aligned {
        fragments.push(left_off.floor_shr(child_len_exp).to_u64().unwrap());
    }
    if !right_aligned && b_full < count && !fragments.contains(&b_full) {
        fragments.push(b_full);
    }
    for pos in fragments {
        let tile = pull_back_tile(level, pos);
        let share = state.cfg.log_phi_integral(&tile)?;
        let child_mass = node_mass.mul(&share);
        // prune when the whole child is negligible next to what we hold
        if !state.lower.is_zero() && !child_mass.is_zero() {
            let cutoff = state.lower.ln_f64() + (state.rel_gap / 4.0).ln();
            if child_mass.ln_f64() <= cutoff {
                state.unresolved.push(child_mass);
                continue;
            }
        }
        let child_len = DyadicRational::pow2(child_len_exp);
        let left = l + &(&DyadicRational::new(BigInt::from(pos), 0) * &child_len);
        let extent = IntervalD::new(left.clone(), &left + &child_len)?;
        descend(&extent, &child_mass, level + 1, clip, state)?;
    }
    Ok(())
}

fn ceil_pos(offset: &DyadicRational, exp: i64) -> u64 {
    let fl = offset.floor_shr(exp);
    let back = &DyadicRational::new(fl.clone(), exp);
    let fl_u = fl.to_u64().unwrap();
    if back == offset {
        fl_u
    } else {
        fl_u + 1
    }
}

fn floor_is_exact(offset: &DyadicRational, exp: i64) -> bool {
    let fl = offset.floor_shr(exp);
    &DyadicRational::new(fl, exp) == offset
}

/// Writes one JSON line per node up to `generation`:
/// `{"path":[..],"left":{"m":..,"e":..},"len_exp2":..,"ln_mass":..}`.
pub fn export_tree<W: Write>(
    w: &mut W,
    generation: i32,
    cfg: &PhiConfig,
) -> Result<u64> {
    if !(0..=5).contains(&generation) {
        return Err(CoreError::Domain(format!(
            "tree export supports generations 0..=5, got {generation}"
        )));
    }
    #[derive(Serialize)]
    struct Row<'a> {
        path: &'a [i64],
        left: &'a DyadicRational,
        len_exp2: i64,
        ln_mass: f64,
    }
    let mut count = 0u64;
    let mut stack = vec![ConstructionInterval::root()];
    while let Some(node) = stack.pop() {
        if node.generation() >= 0 {
            let row = Row {
                path: node.index.path(),
                left: node.extent.left(),
                len_exp2: generation_length_exp2(node.generation()),
                ln_mass: node.ln_mass.ln_f64(),
            };
            serde_json::to_writer(&mut *w, &row)?;
            w.write_all(b"\n")?;
            count += 1;
        }
        if node.generation() < generation {
            let mut kids = children(&node, cfg)?;
            kids.reverse(); // DFS left-to-right output order
            stack.extend(kids);
        }
    }
    Ok(count)
}

/// Deterministic mu-distributed sampler: descends `max_generation + 1`
/// levels choosing each child with its exact mass share (shares are the
/// f64-precision phi masses of the level's tiles, identical for every
/// family of one level).
pub struct MuSampler {
    rng_seed: u64,
    max_generation: u32,
    tables: Vec<Vec<f64>>,
}

impl MuSampler {
    pub fn new(rng_seed: u64, max_generation: u32) -> Result<Self> {
        if max_generation + 1 > 24 {
            return Err(CoreError::Domain(format!(
                "sampler depth {max_generation} too deep (max 23)"
            )));
        }
        Ok(MuSampler {
            rng_seed,
            max_generation,
            tables: Vec::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn max_generation(&self) -> u32 {
        self.max_generation
    }

    fn ensure_tables(&mut self, cfg: &PhiConfig) -> Result<()> {
        if !self.tables.is_empty() {
            return Ok(());
        }
        let levels = self.max_generation + 1;
        for level in 1..=levels {
            let count = 1u64 << level;
            let mut cum = Vec::with_capacity(count as usize + 1);
            cum.push(0.0f64);
            let mut acc = 0.0;
            for pos in 0..count {
                acc += cfg.phi_mass_f64(&pull_back_tile(level, pos))?;
                cum.push(acc);
            }
            let total = *cum.last().unwrap();
            for v in &mut cum {
                *v /= total;
            }
            self.tables.push(cum);
        }
        Ok(())
    }

    /// Draws n points; each is returned as the left endpoint of its final
    /// generation-`max_generation` interval together with the node index.
    pub fn sample(
        &mut self,
        n: usize,
        cfg: &PhiConfig,
    ) -> Result<Vec<(DyadicRational, NodeIndex)>> {
        self.ensure_tables(cfg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mut left = DyadicRational::from_int(-1);
            let mut index = NodeIndex::root();
            for level in 1..=(self.max_generation + 1) {
                let cum = &self.tables[(level - 1) as usize];
                let u: f64 = rng.gen();
                let pos = match cum.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
                    Ok(k) => k as u64,
                    Err(k) => (k as u64).saturating_sub(1),
                }
                .min((1u64 << level) - 1);
                let child_len_exp = generation_length_exp2(level as i32 - 1);
                left = &left
                    + &(&DyadicRational::new(BigInt::from(pos), 0)
                        * &DyadicRational::pow2(child_len_exp));
                index = index.child(ordinal_from_position(level, pos))?;
            }
            out.push((left, index));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PhiConfig {
        PhiConfig::new(1e-12).unwrap()
    }

    fn dy(s: &str) -> DyadicRational {
        s.parse().unwrap()
    }

    fn iv(l: &str, r: &str) -> IntervalD {
        IntervalD::new(dy(l), dy(r)).unwrap()
    }

    #[test]
    fn root_splits_into_equal_halves() {
        let cfg = cfg();
        let kids = children(&ConstructionInterval::root(), &cfg).unwrap();
        assert_eq!(kids.len(), 2);
        assert_eq!(kids[0].extent, iv("-1", "0"));
        assert_eq!(kids[1].extent, iv("0", "1"));
        for k in &kids {
            assert!((k.ln_mass.ln_f64() - 0.5f64.ln()).abs() < 1e-12);
        }
        // phi even: the two shares are the same computation, bit for bit
        assert_eq!(kids[0].ln_mass.ln(), kids[1].ln_mass.ln());
    }

    #[test]
    fn second_level_masses_match_oracle() {
        // children of [0,1): 0.5 * phi over the four gen-1 tiles
        let cfg = cfg();
        let right = locate(&dy("0"), 0, &cfg).unwrap();
        let kids = children(&right, &cfg).unwrap();
        assert_eq!(kids.len(), 4);
        let want = [0.031_595_452_478_176, 0.218_404_547_521_824];
        let got: Vec<f64> = kids.iter().map(|k| k.ln_mass.ln_f64().exp()).collect();
        assert!((got[0] - want[0]).abs() < 1e-12, "{got:?}");
        assert!((got[1] - want[1]).abs() < 1e-12);
        assert!((got[2] - want[1]).abs() < 1e-12);
        assert!((got[3] - want[0]).abs() < 1e-12);
        // lengths 1/4, tiling the parent
        for w in kids.windows(2) {
            assert_eq!(w[0].extent.right(), w[1].extent.left());
        }
        assert_eq!(kids[0].extent.left(), right.extent.left());
        assert_eq!(kids[3].extent.right(), right.extent.right());
    }

    #[test]
    fn conservation_at_sampled_nodes() {
        let cfg = cfg();
        let mut sampler = MuSampler::new(7, 3).unwrap();
        let pts = sampler.sample(5, &cfg).unwrap();
        for (x, _) in pts {
            let chain = chain(&x, 3, &cfg).unwrap();
            let mut node = ConstructionInterval::root();
            for next in chain {
                let kids = children(&node, &cfg).unwrap();
                let masses: Vec<LogPositive> =
                    kids.iter().map(|k| k.ln_mass).collect();
                let total = log_sum(&masses);
                let err = total.ln_ratio(&node.ln_mass).abs().to_f64();
                assert!(err < 1e-12, "conservation err {err:e}");
                node = next;
            }
        }
    }

    #[test]
    fn locate_respects_half_open_convention() {
        let cfg = cfg();
        let at_zero = locate(&dy("0"), 0, &cfg).unwrap();
        assert_eq!(at_zero.extent, iv("0", "1"));
        let at_minus1 = locate(&dy("-1"), 0, &cfg).unwrap();
        assert_eq!(at_minus1.extent, iv("-1", "0"));
        assert!(locate(&dy("1"), 0, &cfg).is_err());
    }

    #[test]
    fn leftmost_chain_mass_decays_superexponentially() {
        let cfg = cfg();
        let chain = chain(&dy("-1"), 4, &cfg).unwrap();
        let mut prev_drop = 0.0f64;
        for w in chain.windows(2) {
            let drop = w[0].ln_mass.ln_f64() - w[1].ln_mass.ln_f64();
            assert!(drop > prev_drop * 1.5, "drop {drop} after {prev_drop}");
            prev_drop = drop;
        }
    }

    #[test]
    fn locate_nests() {
        let cfg = cfg();
        let x = dy("5*2^-4");
        let coarse = locate(&x, 1, &cfg).unwrap();
        let fine = locate(&x, 2, &cfg).unwrap();
        assert!(coarse.extent.contains(&fine.extent));
        assert_eq!(
            &fine.index.path()[..coarse.index.path().len()],
            coarse.index.path()
        );
    }

    #[test]
    fn full_support_is_exactly_one() {
        let cfg = cfg();
        let m = mass_of_interval(&iv("-1", "1"), 1e-8, 10, &cfg).unwrap();
        assert!(m.lower == m.upper);
        assert_eq!(m.lower.ln_f64(), 0.0);
        // and anything containing the support clips to exactly one
        let m2 = mass_of_interval(&iv("-4", "4"), 1e-8, 10, &cfg).unwrap();
        assert_eq!(m2.upper.ln_f64(), 0.0);
    }

    #[test]
    fn quarter_interval_enclosure_matches_oracle() {
        let cfg = cfg();
        let m = mass_of_interval(&iv("0", "2^-2"), 1e-8, 10, &cfg).unwrap();
        let want = 0.031_595_452_478_175_995_f64.ln();
        assert!(m.contains_ln(want), "{m:?}");
        assert!(m.relative_gap() < 1e-8);
        // symmetric ball doubles it
        let b = mass_of_interval(&iv("-1*2^-2", "2^-2"), 1e-8, 10, &cfg).unwrap();
        let want2 = (2.0 * 0.031_595_452_478_175_995_f64).ln();
        assert!(b.contains_ln(want2), "{b:?}");
    }

    #[test]
    fn reflection_symmetry_of_masses() {
        let cfg = cfg();
        // interior of its generation-2 interval, so the mirrored point
        // lands in the mirrored interval
        let x = dy("13*2^-7");
        let node = locate(&x, 2, &cfg).unwrap();
        let mirrored = locate(&(-&x), 2, &cfg).unwrap();
        // the mirrored point sits in the mirrored interval (up to the
        // half-open boundary convention) with identical mass
        let err = node
            .ln_mass
            .ln_ratio(&mirrored.ln_mass)
            .abs()
            .to_f64();
        assert!(err < 1e-12, "mirror mass err {err:e}");
        assert_eq!(node.extent.reflect().left(), mirrored.extent.left());
    }

    #[test]
    fn sampler_is_deterministic_and_in_range() {
        let cfg = cfg();
        let mut s1 = MuSampler::new(42, 6).unwrap();
        let mut s2 = MuSampler::new(42, 6).unwrap();
        let a = s1.sample(50, &cfg).unwrap();
        let b = s2.sample(50, &cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for ((xa, ia), (xb, ib)) in a.iter().zip(&b) {
            assert_eq!(xa, xb);
            assert_eq!(ia, ib);
            let node = locate(xa, 6, &cfg).unwrap();
            assert!(node.extent.contains_point(xa));
            assert_eq!(&node.index, ia);
        }
    }

    #[test]
    fn sampler_halves_frequency() {
        let cfg = cfg();
        let mut s = MuSampler::new(2024, 5).unwrap();
        let pts = s.sample(10_000, &cfg).unwrap();
        let zero = DyadicRational::zero();
        let right = pts.iter().filter(|(x, _)| *x >= zero).count() as f64;
        let freq = right / 10_000.0;
        // binomial: 0.5 +- 3 sqrt(0.25/n)
        assert!((freq - 0.5).abs() < 3.0 * (0.25f64 / 10_000.0).sqrt() + 1e-9, "freq {freq}");
    }

    #[test]
    fn enclosure_monotone_in_inclusion() {
        let cfg = cfg();
        let small = mass_of_interval(&iv("2^-3", "2^-1"), 1e-8, 12, &cfg).unwrap();
        let big = mass_of_interval(&iv("0", "3*2^-2"), 1e-8, 12, &cfg).unwrap();
        // J ⊆ J' ⇒ upper(J) ≤ upper(J')(1 + 2 rel_gap), lower(J) ≤ upper(J')
        assert!(small.upper.ln_f64() <= big.upper.ln_f64() + (2.0 * 1e-8f64).ln_1p());
        assert!(small.lower <= big.upper);
    }

    #[test]
    fn export_emits_all_nodes() {
        let cfg = cfg();
        let mut buf = Vec::new();
        let n = export_tree(&mut buf, 1, &cfg).unwrap();
        // generations 0 and 1: 2 + 8 nodes
        assert_eq!(n, 10);
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 10);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["path"][0], serde_json::json!(-1));
        assert_eq!(first["len_exp2"], serde_json::json!(0));
    }
}
