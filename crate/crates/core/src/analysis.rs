//! Doubling-ratio scans, construction of points with prescribed
//! boundary-distance bands, porosity estimation, and instance checkers
//! for the comparability lemmas.

use crate::cascade::{
    chain, generation_length_exp2, mass_of_interval, ConstructionInterval,
    MassEnclosure,
};
use crate::dyadic::{DyadicRational, IntervalD};
use crate::error::{CoreError, Result};
use crate::weight::PhiConfig;
use num_traits::ToPrimitive;
use serde::Serialize;

/// Enclosure parameters threaded through every mass query.
#[derive(Clone, Copy, Debug)]
pub struct MassParams {
    pub rel_gap: f64,
    pub max_gen: i32,
}

impl Default for MassParams {
    fn default() -> Self {
        MassParams {
            rel_gap: 1e-8,
            max_gen: 18,
        }
    }
}

impl MassParams {
    pub fn mass(&self, j: &IntervalD, cfg: &PhiConfig) -> Result<MassEnclosure> {
        mass_of_interval(j, self.rel_gap, self.max_gen, cfg)
    }

    pub fn ball_mass(
        &self,
        x: &DyadicRational,
        r: &DyadicRational,
        cfg: &PhiConfig,
    ) -> Result<MassEnclosure> {
        self.mass(&IntervalD::ball(x, r)?, cfg)
    }
}

/// One row of a doubling scan at radius r.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingScanRow {
    pub r: DyadicRational,
    pub ln2_r: f64,
    pub ln_mu_r: f64,
    pub ln_mu_2r: f64,
    pub ln_mu_17r: f64,
    /// mu(B(x,2r))/mu(B(x,r)) as ln (finite even when the linear ratio
    /// overflows) and linearized when representable.
    pub ln_ratio2: f64,
    pub ln_ratio17: f64,
    pub ratio2: f64,
    pub ratio17: f64,
    pub enclosure_gap: f64,
    pub gap_flagged: bool,
}

/// Masses of B(x,r), B(x,2r), B(x,17r) per scale, with ratios from
/// enclosure midpoints.
pub fn doubling_scan(
    x: &DyadicRational,
    scales: &[DyadicRational],
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<Vec<DoublingScanRow>> {
    if !IntervalD::support().contains_point(x) {
        return Err(CoreError::Domain(format!("scan point {x} outside [-1,1)")));
    }
    let mut rows = Vec::with_capacity(scales.len());
    for r in scales {
        let m1 = params.ball_mass(x, r, cfg)?;
        let m2 = params.ball_mass(x, &r.mul_pow2(1), cfg)?;
        let m17 = params.ball_mass(x, &(&DyadicRational::from_int(17) * r), cfg)?;
        let gap = m1
            .relative_gap()
            .max(m2.relative_gap())
            .max(m17.relative_gap());
        let (c1, c2, c17) = (m1.midpoint(), m2.midpoint(), m17.midpoint());
        let ln_ratio2 = c2.ln_ratio(&c1).to_f64();
        let ln_ratio17 = c17.ln_ratio(&c1).to_f64();
        rows.push(DoublingScanRow {
            r: r.clone(),
            ln2_r: r.log2_f64(),
            ln_mu_r: c1.ln_f64(),
            ln_mu_2r: c2.ln_f64(),
            ln_mu_17r: c17.ln_f64(),
            ln_ratio2,
            ln_ratio17,
            ratio2: ln_ratio2.exp(),
            ratio17: ln_ratio17.exp(),
            enclosure_gap: gap,
            gap_flagged: gap > 1e-6,
        });
    }
    Ok(rows)
}

/// One entry of a band schedule: at generation `k`, the point must sit at
/// distance within [2^{-i} l(I), 2^{-i+1} l(I)] of the boundary of its
/// generation-k interval.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScheduleEntry {
    pub i: u32,
    pub k: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct BandWitness {
    pub entry: ScheduleEntry,
    /// extent of the generation-k interval containing x
    pub interval: IntervalD,
    pub distance: DyadicRational,
    pub band_lo: DyadicRational,
    pub band_hi: DyadicRational,
}

impl BandWitness {
    /// Exact dyadic band membership, no tolerance anywhere.
    pub fn holds(&self) -> bool {
        self.band_lo <= self.distance && self.distance <= self.band_hi
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NonDoublingPoint {
    pub x: DyadicRational,
    pub schedule: Vec<ScheduleEntry>,
    pub witnesses: Vec<BandWitness>,
}

impl NonDoublingPoint {
    /// Scheduled radii r_i = d(x, boundary of I_{k_i}).
    pub fn scheduled_radii(&self) -> Vec<DyadicRational> {
        self.witnesses.iter().map(|w| w.distance.clone()).collect()
    }
}

/// Builds a point whose chain satisfies every scheduled band, by steering
/// the descent into the left band of each scheduled interval. The bands
/// are aligned so that the next scheduled interval can anchor at the band
/// bottom, which keeps every membership exactly verifiable.
pub fn build_nondoubling_point(
    schedule: &[ScheduleEntry],
    cfg: &PhiConfig,
) -> Result<NonDoublingPoint> {
    if schedule.is_empty() {
        return Err(CoreError::InfeasibleSchedule("empty schedule".into()));
    }
    let mut prev_k: Option<u32> = None;
    for (n, e) in schedule.iter().enumerate() {
        if e.i < 2 {
            return Err(CoreError::InfeasibleSchedule(format!(
                "entry {n}: i = {} < 2 (bands need d <= l/2)",
                e.i
            )));
        }
        if e.i > e.k + 2 {
            return Err(CoreError::InfeasibleSchedule(format!(
                "entry {n}: band 2^-{} of a generation-{} interval is not \
                 resolvable by generation-{} intervals",
                e.i,
                e.k,
                e.k + 1
            )));
        }
        if let Some(pk) = prev_k {
            if e.k <= pk {
                return Err(CoreError::InfeasibleSchedule(format!(
                    "entry {n}: generation {} not greater than previous {}",
                    e.k, pk
                )));
            }
        }
        prev_k = Some(e.k);
    }

    // feasible closed region [f_lo, f_hi]; x will end up at its bottom
    let support = IntervalD::support();
    let mut f_lo = support.left().clone();
    let mut f_hi = support.right().clone();
    let mut banded = false;
    let mut node = ConstructionInterval::root();
    for (n, e) in schedule.iter().enumerate() {
        while node.generation() < e.k as i32 {
            let level = node.index.level() + 1;
            let child_exp = generation_length_exp2(node.generation() + 1);
            let child_len = DyadicRational::pow2(child_exp);
            let pos = if banded {
                // bands are child-grid aligned: anchor at the band bottom
                let offset = &f_lo - node.extent.left();
                let mut p = offset.floor_shr(child_exp).to_u64().unwrap_or(0);
                let left = node.extent.left()
                    + &(&DyadicRational::new(p.into(), 0) * &child_len);
                if left < f_lo {
                    p += 1;
                }
                p
            } else {
                // before any band: stay on a central chain
                1u64 << (level - 1)
            };
            let left =
                node.extent.left() + &(&DyadicRational::new(pos.into(), 0) * &child_len);
            let right = &left + &child_len;
            if left < f_lo || right > f_hi {
                return Err(CoreError::InfeasibleSchedule(format!(
                    "entry {n}: no generation-{} interval fits inside the band \
                     left from entry {}",
                    node.generation() + 1,
                    n.saturating_sub(1)
                )));
            }
            let tile = crate::cascade::pull_back_tile(level, pos);
            let share = cfg.log_phi_integral(&tile)?;
            node = ConstructionInterval {
                index: node.index.child(crate::cascade::ordinal_from_position(level, pos))?,
                extent: IntervalD::new(left, right)?,
                ln_mass: node.ln_mass.mul(&share),
            };
        }
        // impose the band of this entry: [L + 2^-i l, L + 2^-i+1 l]
        let ell_exp = generation_length_exp2(e.k as i32);
        f_lo = node.extent.left() + &DyadicRational::pow2(ell_exp - e.i as i64);
        f_hi = node.extent.left() + &DyadicRational::pow2(ell_exp - e.i as i64 + 1);
        banded = true;
    }

    let x = f_lo;
    let deepest = schedule.last().unwrap().k;
    let full_chain = chain(&x, deepest as i32, cfg)?;
    let mut witnesses = Vec::with_capacity(schedule.len());
    for e in schedule {
        let node = &full_chain[e.k as usize];
        let ell_exp = generation_length_exp2(e.k as i32);
        let w = BandWitness {
            entry: *e,
            interval: node.extent.clone(),
            distance: node.extent.distance_to_boundary(&x),
            band_lo: DyadicRational::pow2(ell_exp - e.i as i64),
            band_hi: DyadicRational::pow2(ell_exp - e.i as i64 + 1),
        };
        if !w.holds() {
            return Err(CoreError::InfeasibleSchedule(format!(
                "constructed point misses band (i={}, k={}): d = {}",
                e.i, e.k, w.distance
            )));
        }
        witnesses.push(w);
    }
    Ok(NonDoublingPoint {
        x,
        schedule: schedule.to_vec(),
        witnesses,
    })
}

/// A doubling-scan row at a scheduled radius, checked against the
/// clipped tail-ratio lower bound.
#[derive(Clone, Debug, Serialize)]
pub struct NonDoublingScanRow {
    pub row: DoublingScanRow,
    /// lambda(i) = l(B(x,r_i)) / l(I_{k_i}) = 2 r_i / l(I_{k_i})
    pub lambda: f64,
    pub ln_g_bound: f64,
    /// the bound's tail intervals had to be clipped to the support
    pub g_clipped: bool,
    /// certified: lower(17r)/upper(r) >= G
    pub bound_ok: bool,
}

/// Runs the doubling scan at the scheduled radii of a constructed point
/// and verifies mu(B(x,17r_i))/mu(B(x,r_i)) >= G_{9/8, 4 lambda(i)} row
/// by row, with certified enclosure sides.
pub fn nondoubling_scan(
    point: &NonDoublingPoint,
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<Vec<NonDoublingScanRow>> {
    let mut out = Vec::with_capacity(point.witnesses.len());
    for w in &point.witnesses {
        let r = &w.distance;
        let rows = doubling_scan(&point.x, std::slice::from_ref(r), params, cfg)?;
        let row = rows.into_iter().next().unwrap();
        let ell = w.interval.length();
        let lambda = r.mul_pow2(1).ratio_f64(&ell);
        let (ln_g, clipped) = cfg.g_ratio_ln_clipped(9.0 / 8.0, 4.0 * lambda)?;
        // certified lower bound on the ratio
        let m1 = params.ball_mass(&point.x, r, cfg)?;
        let m17 = params.ball_mass(&point.x, &(&DyadicRational::from_int(17) * r), cfg)?;
        let certified_ln_ratio = m17.lower.ln_ratio(&m1.upper).to_f64();
        out.push(NonDoublingScanRow {
            row,
            lambda,
            ln_g_bound: ln_g,
            g_clipped: clipped,
            bound_ok: certified_ln_ratio >= ln_g,
        });
    }
    Ok(out)
}

/// Result of a porosity search: the largest certified relative hole.
#[derive(Clone, Debug, Serialize)]
pub struct PorosityResult {
    pub x: DyadicRational,
    pub r: DyadicRational,
    pub epsilon: f64,
    pub delta: f64,
    pub hole_center: DyadicRational,
    pub certified: bool,
    pub ln_hole_mass: f64,
    pub ln_ball_mass: f64,
}

/// Scans a dyadic grid of candidate holes B(y, delta r) inside B(x, r)
/// for the largest delta with mu(hole) <= epsilon mu(ball), certified by
/// enclosures on both sides. Candidate centers are the construction
/// endpoints of generations <= grid_gen inside the ball (plus x itself);
/// delta runs over 32nds from 1 downward.
pub fn porosity_search(
    x: &DyadicRational,
    r: &DyadicRational,
    epsilon: f64,
    grid_gen: i32,
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<PorosityResult> {
    if !r.is_positive() {
        return Err(CoreError::Domain(format!("radius {r} <= 0")));
    }
    let ball = IntervalD::ball(x, r)?;
    if ball.intersect(&IntervalD::support()).is_none() {
        return Err(CoreError::Domain(format!(
            "ball B({x}, {r}) misses the support"
        )));
    }
    if epsilon >= 1.0 {
        return Ok(PorosityResult {
            x: x.clone(),
            r: r.clone(),
            epsilon,
            delta: 1.0,
            hole_center: x.clone(),
            certified: true,
            ln_hole_mass: f64::NAN,
            ln_ball_mass: f64::NAN,
        });
    }
    let ball_enc = params.mass(&ball, cfg)?;
    let ln_eps = crate::Dd::from_f64(epsilon).ln();

    // candidate hole centers: construction endpoints inside the ball
    let mut candidates: Vec<DyadicRational> = vec![x.clone()];
    for g in 0..=grid_gen {
        let exp = generation_length_exp2(g);
        let lo = ceil_div_pow2(&(ball.left() - &DyadicRational::from_int(-1)), exp);
        let hi = (ball.right() - &DyadicRational::from_int(-1))
            .floor_shr(exp)
            .to_i64()
            .unwrap_or(0);
        if hi < lo {
            continue;
        }
        if (hi - lo) as usize > 256 {
            continue; // deep grids explode; coarse edges carry the holes
        }
        for m in lo..=hi {
            let y = &DyadicRational::from_int(-1) + &DyadicRational::new(m.into(), exp);
            if !candidates.contains(&y) {
                candidates.push(y);
            }
        }
    }
    candidates.sort_by(|a, b| {
        let da = (a - x).abs();
        let db = (b - x).abs();
        da.cmp(&db).then_with(|| a.cmp(b))
    });
    candidates.truncate(96);

    for t in (1..=32u32).rev() {
        let delta_dy = DyadicRational::new(t.into(), -5);
        let hole_r = &delta_dy * r;
        for y in &candidates {
            // exact containment B(y, delta r) subset of B(x, r)
            if &(&(y - x).abs() + &hole_r) > r {
                continue;
            }
            let hole = IntervalD::ball(y, &hole_r)?;
            let hole_enc = params.mass(&hole, cfg)?;
            let certified = match (&hole_enc.upper, &ball_enc.lower) {
                (hu, _) if hu.is_zero() => true,
                (_, bl) if bl.is_zero() => false,
                (hu, bl) => hu.ln() <= bl.ln() + ln_eps,
            };
            if certified {
                return Ok(PorosityResult {
                    x: x.clone(),
                    r: r.clone(),
                    epsilon,
                    delta: t as f64 / 32.0,
                    hole_center: y.clone(),
                    certified: true,
                    ln_hole_mass: hole_enc.upper.ln_f64(),
                    ln_ball_mass: ball_enc.lower.ln_f64(),
                });
            }
        }
    }
    Ok(PorosityResult {
        x: x.clone(),
        r: r.clone(),
        epsilon,
        delta: 0.0,
        hole_center: x.clone(),
        certified: false,
        ln_hole_mass: f64::NAN,
        ln_ball_mass: ball_enc.lower.ln_f64(),
    })
}

fn ceil_div_pow2(offset: &DyadicRational, exp: i64) -> i64 {
    let fl = offset.floor_shr(exp);
    let back = DyadicRational::new(fl.clone(), exp);
    let f = fl.to_i64().unwrap_or(i64::MAX);
    if &back == offset {
        f
    } else {
        f + 1
    }
}

/// Verdict on (C, lambda)-comparability of a pair of intervals.
#[derive(Clone, Debug, Serialize)]
pub struct ComparabilityReport {
    pub a: IntervalD,
    pub b: IntervalD,
    /// the configured comparability constant the verdict is tested against
    pub c_bound: f64,
    pub lambda: f64,
    pub ln_ratio: f64,
    /// measured constant: max(ratio/lambda, lambda/ratio)
    pub c_star: f64,
    pub verdict: bool,
}

/// Interior comparability: for J inside I_k with d(J, dI_k) >= tau l(I_k)
/// and a nonempty next-generation packing, measures mu(J)/mu(I_k) against
/// lambda = l(J)/l(I_k) and tests the configured constant.
pub fn check_mu_lemma_1(
    j: &IntervalD,
    i_k: &ConstructionInterval,
    tau: f64,
    c_tau: f64,
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<ComparabilityReport> {
    if !i_k.extent.contains(j) {
        return Err(CoreError::Precondition(format!(
            "J = {j} not inside I_k = {}",
            i_k.extent
        )));
    }
    if packing_count(j, i_k.generation() + 1) == 0 {
        return Err(CoreError::Precondition(format!(
            "packing of {j} by generation-{} intervals is empty",
            i_k.generation() + 1
        )));
    }
    let ell_i = i_k.length();
    let d_left = j.left() - i_k.extent.left();
    let d_right = i_k.extent.right() - j.right();
    let d = d_left.min(d_right);
    let tau_ell = &DyadicRational::from_f64_exact(tau)? * &ell_i;
    if d < tau_ell {
        return Err(CoreError::Precondition(format!(
            "d(J, boundary of I_k) = {d} < tau l(I_k)"
        )));
    }
    let lambda = j.length().ratio_f64(&ell_i);
    let mj = params.mass(j, cfg)?;
    let ln_ratio = mj.midpoint().ln_ratio(&i_k.ln_mass).to_f64();
    let c_star = (ln_ratio - lambda.ln()).abs().exp();
    Ok(ComparabilityReport {
        a: j.clone(),
        b: i_k.extent.clone(),
        c_bound: c_tau,
        lambda,
        ln_ratio,
        c_star,
        verdict: c_star <= c_tau,
    })
}

/// Number of generation-`gen` construction intervals fully inside j.
pub fn packing_count(j: &IntervalD, gen: i32) -> u64 {
    let exp = generation_length_exp2(gen);
    let minus_one = DyadicRational::from_int(-1);
    let a = ceil_div_pow2(&(j.left() - &minus_one), exp);
    let b = (j.right() - &minus_one).floor_shr(exp).to_i64().unwrap_or(0);
    (b - a).max(0) as u64
}

/// Report for the neighbor-comparability check on the cover of a small
/// interval deep inside I_k.
#[derive(Clone, Debug, Serialize)]
pub struct CoverComparabilityReport {
    pub j: IntervalD,
    pub i_k: IntervalD,
    /// measured doubling constant mu(5J)/mu(J)
    pub c_measured_ln: f64,
    /// theoretical D = max{6^25 C^25, C(1/4)^2} in ln
    pub d_theory_ln: f64,
    /// worst measured pair ratio over the cover, in ln
    pub d_star_ln: f64,
    pub cover_card: u64,
    pub length_ratio: f64,
    /// l(J)/l(I_k) < 1/20 (reported, not enforced: the shift-lemma
    /// threshold it stands in for has no stated numeric value)
    pub length_ratio_small: bool,
    pub verdict: bool,
}

/// Checks that all pairs of next-generation intervals meeting J are
/// (D,1)-comparable for D = max{6^25 C^25, C(1/4)^2}, with C measured as
/// mu(5J)/mu(J).
pub fn check_mu_lemma_2(
    j: &IntervalD,
    i_k: &ConstructionInterval,
    c_quarter: f64,
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<CoverComparabilityReport> {
    let gen_next = i_k.generation() + 1;
    if packing_count(j, gen_next) == 0 {
        return Err(CoreError::Precondition(format!(
            "packing of {j} by generation-{gen_next} intervals is empty"
        )));
    }
    let mid = j.midpoint();
    let half5 = &DyadicRational::from_int(5) * &j.length().mul_pow2(-1);
    let five_j = IntervalD::new(&mid - &half5, &mid + &half5)?;
    if !i_k.extent.contains(&five_j) {
        return Err(CoreError::Precondition(format!(
            "5J = {five_j} not inside I_k = {}",
            i_k.extent
        )));
    }
    let m5 = params.mass(&five_j, cfg)?;
    let mj = params.mass(j, cfg)?;
    let c_measured_ln = m5.midpoint().ln_ratio(&mj.midpoint()).to_f64().max(0.0);
    let d_theory_ln = (25.0 * (6.0f64.ln() + c_measured_ln)).max(2.0 * c_quarter.ln());

    // cover: next-generation children of I_k meeting J
    let exp = generation_length_exp2(gen_next);
    let l = i_k.extent.left();
    let m_lo = (j.left() - l).floor_shr(exp).to_u64().unwrap();
    let mut m_hi = (j.right() - l).floor_shr(exp).to_u64().unwrap();
    if floor_exact(&(j.right() - l), exp) {
        // right endpoint on the grid: that child only touches J in a null set
        m_hi = m_hi.saturating_sub(1);
    }
    let count = m_hi - m_lo + 1;
    if count > (1 << 16) {
        return Err(CoreError::Domain(format!(
            "cover of {j} has {count} members; choose a smaller J"
        )));
    }
    // tile positions are family-relative, so the offset within I_k is
    // already the tile position
    let level = i_k.index.level() + 1;
    let mut ln_min = f64::INFINITY;
    let mut ln_max = f64::NEG_INFINITY;
    for m in m_lo..=m_hi {
        let tile = crate::cascade::pull_back_tile(level, m);
        let share = cfg.log_phi_integral(&tile)?;
        let ln = i_k.ln_mass.mul(&share).ln_f64();
        ln_min = ln_min.min(ln);
        ln_max = ln_max.max(ln);
    }
    let d_star_ln = ln_max - ln_min;
    Ok(CoverComparabilityReport {
        j: j.clone(),
        i_k: i_k.extent.clone(),
        c_measured_ln,
        d_theory_ln,
        d_star_ln,
        cover_card: count,
        length_ratio: j.length().ratio_f64(&i_k.length()),
        length_ratio_small: j.length().ratio_f64(&i_k.length()) < 0.05,
        verdict: d_star_ln <= d_theory_ln,
    })
}

/// Report for the boundary-anchored mass-ratio bound.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryRatioReport {
    pub j: IntervalD,
    pub j_star: IntervalD,
    pub i_k: IntervalD,
    pub c: f64,
    pub lambda: f64,
    pub ln_g_bound: f64,
    /// certified lower bound on ln mu(J*)/mu(J)
    pub ln_ratio_certified: f64,
    pub ln_ratio_mid: f64,
    pub holds: bool,
}

/// For J inside J* inside I_k with J touching the boundary of I_k,
/// nonempty packing, and l(J*) = C l(J), C > 8: checks
/// mu(J*)/mu(J) >= G_{C/8, 4 lambda}.
pub fn check_mu_lemma_3(
    j: &IntervalD,
    j_star: &IntervalD,
    i_k: &ConstructionInterval,
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<BoundaryRatioReport> {
    if !j_star.contains(j) || !i_k.extent.contains(j_star) {
        return Err(CoreError::Precondition(format!(
            "need J {j} inside J* {j_star} inside I_k {}",
            i_k.extent
        )));
    }
    if packing_count(j, i_k.generation() + 1) == 0 {
        return Err(CoreError::Precondition(format!(
            "packing of {j} by generation-{} intervals is empty",
            i_k.generation() + 1
        )));
    }
    let touches = j.left() == i_k.extent.left() || j.right() == i_k.extent.right();
    if !touches {
        return Err(CoreError::Precondition(format!(
            "closure of {j} does not touch the boundary of {}",
            i_k.extent
        )));
    }
    let c = j_star.length().ratio_f64(&j.length());
    if !(c > 8.0) {
        return Err(CoreError::Precondition(format!(
            "l(J*)/l(J) = {c} <= 8"
        )));
    }
    let lambda = j.length().ratio_f64(&i_k.length());
    let g = cfg.g_ratio(c / 8.0, 4.0 * lambda)?;
    let mj = params.mass(j, cfg)?;
    let mstar = params.mass(j_star, cfg)?;
    let ln_ratio_certified = mstar.lower.ln_ratio(&mj.upper).to_f64();
    let ln_ratio_mid = mstar.midpoint().ln_ratio(&mj.midpoint()).to_f64();
    Ok(BoundaryRatioReport {
        j: j.clone(),
        j_star: j_star.clone(),
        i_k: i_k.extent.clone(),
        c,
        lambda,
        ln_g_bound: g.ln_g,
        ln_ratio_certified,
        ln_ratio_mid,
        holds: ln_ratio_certified >= g.ln_g,
    })
}

fn floor_exact(offset: &DyadicRational, exp: i64) -> bool {
    let fl = offset.floor_shr(exp);
    &DyadicRational::new(fl, exp) == offset
}
