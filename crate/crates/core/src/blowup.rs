//! Finite-scale blow-up approximants of the measure around a point:
//! nu_{x,r}(A) = mu(x + rA) / mu(B(x,r)) evaluated on grids, the
//! exceptional endpoint sets where density bounds may fail, and the
//! ratio checks backing the tangent-flatness and non-doubling contrasts.

use crate::analysis::MassParams;
use crate::cascade::{chain, generation_length_exp2};
use crate::dyadic::{DyadicRational, IntervalD};
use crate::error::{CoreError, Result};
use crate::weight::PhiConfig;
use num_traits::ToPrimitive;
use serde::Serialize;

/// A scale (x, r) at which the window generation K satisfies
/// I_{K+1} inside B(x,r) and B(x,5r) inside I_K.
#[derive(Clone, Debug, Serialize)]
pub struct BlowupScale {
    pub x: DyadicRational,
    pub r: DyadicRational,
    pub window: Option<BlowupWindow>,
    pub absent_reason: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupWindow {
    /// the window generation K
    pub k: i32,
    /// l(I_K)/r from exact lengths
    pub rho: f64,
    /// cardinality of the generation-(K+1) cover of B(x,r)
    pub n_cover: u64,
}

/// Finds the smallest window generation by exact inclusion tests along
/// the chain at x, or reports which inclusion fails.
pub fn blowup_scale(
    x: &DyadicRational,
    r: &DyadicRational,
    max_gen: i32,
    cfg: &PhiConfig,
) -> Result<BlowupScale> {
    if !IntervalD::support().contains_point(x) {
        return Err(CoreError::Domain(format!("point {x} outside [-1,1)")));
    }
    if !r.is_positive() || r > &DyadicRational::one() {
        return Err(CoreError::Domain(format!("radius {r} outside (0, 1]")));
    }
    let nodes = chain(x, max_gen, cfg)?;
    let ball_lo = x - r;
    let ball_hi = x + r;
    let five_lo = x - &(&DyadicRational::from_int(5) * r);
    let five_hi = x + &(&DyadicRational::from_int(5) * r);
    let mut first_inner: Option<i32> = None;
    for k in 0..max_gen {
        let i_k = &nodes[k as usize];
        let i_k1 = &nodes[k as usize + 1];
        let inner = *i_k1.extent.left() >= ball_lo && *i_k1.extent.right() <= ball_hi;
        if inner && first_inner.is_none() {
            first_inner = Some(k);
        }
        let outer = five_lo >= *i_k.extent.left() && five_hi < *i_k.extent.right();
        if inner && outer {
            let rho = i_k.length().ratio_f64(r);
            let n_cover = cover_count(x, r, k + 1);
            return Ok(BlowupScale {
                x: x.clone(),
                r: r.clone(),
                window: Some(BlowupWindow { k, rho, n_cover }),
                absent_reason: None,
            });
        }
    }
    let reason = match first_inner {
        None => format!(
            "B(x,r) contains no full generation-(k+1) interval for k < {max_gen}"
        ),
        Some(k0) => format!(
            "5r exceeds I_K at every K >= {k0} where I_(K+1) fits inside B(x,r)"
        ),
    };
    Ok(BlowupScale {
        x: x.clone(),
        r: r.clone(),
        window: None,
        absent_reason: Some(reason),
    })
}

fn cover_count(x: &DyadicRational, r: &DyadicRational, gen: i32) -> u64 {
    let exp = generation_length_exp2(gen);
    let minus_one = DyadicRational::from_int(-1);
    let lo = (&(x - r) - &minus_one).floor_shr(exp).to_i64().unwrap_or(0);
    let hi = (&(x + r) - &minus_one).floor_shr(exp).to_i64().unwrap_or(0);
    // intervals [m, m+1) with m in [lo, hi] meet the closed ball
    (hi - lo + 1).max(0) as u64
}

/// Endpoints of the generation-(K+1) intervals packed inside the closed
/// ball B(x, r), in exact and (e-x)/r normalized form.
#[derive(Clone, Debug, Serialize)]
pub struct EPointSet {
    pub points: Vec<DyadicRational>,
    pub normalized: Vec<f64>,
}

/// E points at the window generation of the scale.
pub fn detect_e(scale: &BlowupScale) -> Result<EPointSet> {
    let window = scale.window.as_ref().ok_or_else(|| {
        CoreError::Precondition("detect_e needs a scale with a window generation".into())
    })?;
    Ok(detect_e_at_gen(&scale.x, &scale.r, window.k + 1))
}

/// E points of B(x,r) computed with generation-`gen` intervals.
pub fn detect_e_at_gen(x: &DyadicRational, r: &DyadicRational, gen: i32) -> EPointSet {
    let exp = generation_length_exp2(gen);
    let minus_one = DyadicRational::from_int(-1);
    let lo_off = &(x - r) - &minus_one;
    let hi_off = &(x + r) - &minus_one;
    let a = ceil_i64(&lo_off, exp);
    let b = hi_off.floor_shr(exp).to_i64().unwrap_or(i64::MIN);
    let mut points = Vec::new();
    let mut normalized = Vec::new();
    // endpoints of fully packed intervals: {-1 + m 2^exp : a <= m <= b}
    // (every such endpoint already lies in the closed ball)
    if a <= b {
        for m in a..=b {
            let e = &minus_one + &DyadicRational::new(m.into(), exp);
            normalized.push((&e - x).ratio_f64(r));
            points.push(e);
        }
    }
    EPointSet { points, normalized }
}

fn ceil_i64(offset: &DyadicRational, exp: i64) -> i64 {
    let fl = offset.floor_shr(exp);
    let back = DyadicRational::new(fl.clone(), exp);
    let f = fl.to_i64().unwrap_or(i64::MAX);
    if &back == offset {
        f
    } else {
        f + 1
    }
}

/// One grid point of a density profile.
#[derive(Clone, Debug, Serialize)]
pub struct ProfilePoint {
    pub z: f64,
    /// ln nu(B(z, delta)); -inf when the window misses the support
    pub ln_nu: f64,
    /// nu(B(z, delta)) / (2 delta), linear
    pub nu_density: f64,
    pub near_e: bool,
    pub enclosure_gap: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityProfile {
    pub scale: BlowupScale,
    pub delta: f64,
    pub points: Vec<ProfilePoint>,
    pub e_normalized: Vec<f64>,
}

/// nu(B(z, delta)) for dyadic z, delta: mu(B(x + r z, delta r)) divided by
/// mu(B(x, r)). When z = 0 and delta = 1 the two balls are the same
/// interval, so the ratio is exactly one by construction.
pub fn nu_ball(
    x: &DyadicRational,
    r: &DyadicRational,
    z: &DyadicRational,
    delta: &DyadicRational,
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<(f64, f64)> {
    let y = x + &(r * z);
    let num = params.ball_mass(&y, &(delta * r), cfg)?;
    let den = params.ball_mass(x, r, cfg)?;
    let gap = num.relative_gap().max(den.relative_gap());
    if num.upper.is_zero() {
        return Ok((f64::NEG_INFINITY, gap));
    }
    Ok((num.midpoint().ln_ratio(&den.midpoint()).to_f64(), gap))
}

/// Density profile of the blow-up at (x, r) on a uniform grid of m points
/// over [-big_r, big_r] with window radius delta. m - 1 must be a power
/// of two so the grid stays exactly dyadic.
pub fn density_profile(
    x: &DyadicRational,
    r: &DyadicRational,
    big_r: f64,
    m: usize,
    delta: f64,
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<DensityProfile> {
    if m < 3 || !(m - 1).is_power_of_two() {
        return Err(CoreError::Domain(format!(
            "grid size {m} is not 2^s + 1"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CoreError::Domain(format!("delta {delta} outside (0,1)")));
    }
    let big_r_dy = DyadicRational::from_f64_exact(big_r)?;
    if !big_r_dy.is_positive() {
        return Err(CoreError::Domain(format!("R {big_r} <= 0")));
    }
    let delta_dy = DyadicRational::from_f64_exact(delta)?;
    let scale = blowup_scale(x, r, params.max_gen, cfg)?;
    let e_normalized = match &scale.window {
        Some(_) => detect_e(&scale)?.normalized,
        None => Vec::new(),
    };
    let steps = (m - 1) as i64;
    let step = big_r_dy.mul_pow2(1 - steps.trailing_zeros() as i64);
    debug_assert_eq!(steps.count_ones(), 1);
    let den = params.ball_mass(x, r, cfg)?;
    let hole_r = &delta_dy * r;
    let mut points = Vec::with_capacity(m);
    for jdx in 0..m {
        let z = &(-&big_r_dy) + &(&DyadicRational::from_int(jdx as i64) * &step);
        let y = x + &(r * &z);
        let ball = IntervalD::ball(&y, &hole_r)?;
        let (ln_nu, gap, degenerate) = match ball.intersect(&IntervalD::support()) {
            None => (f64::NEG_INFINITY, 0.0, false),
            Some(_) => {
                let num = params.mass(&ball, cfg)?;
                let gap = num.relative_gap().max(den.relative_gap());
                let ln = if num.upper.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    num.midpoint().ln_ratio(&den.midpoint()).to_f64()
                };
                (ln, gap, !gap.is_finite() || gap > 1e-4)
            }
        };
        let zf = z.to_f64();
        let near_e = e_normalized
            .iter()
            .any(|e| (e - zf).abs() < delta);
        points.push(ProfilePoint {
            z: zf,
            ln_nu,
            nu_density: (ln_nu.exp()) / (2.0 * delta),
            near_e,
            enclosure_gap: gap,
            degenerate,
        });
    }
    Ok(DensityProfile {
        scale,
        delta,
        points,
        e_normalized,
    })
}

/// Interior max/min of the density over grid points at distance at least
/// `exclusion` from every detected E point (degenerate points skipped).
/// Returns None when nothing survives the exclusion.
pub fn interior_flatness(profile: &DensityProfile, exclusion: f64) -> Option<(f64, f64)> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut seen = false;
    for p in &profile.points {
        if p.degenerate {
            continue;
        }
        let clear = profile
            .e_normalized
            .iter()
            .all(|e| (e - p.z).abs() >= exclusion);
        if !clear {
            continue;
        }
        seen = true;
        min = min.min(p.nu_density);
        max = max.max(p.nu_density);
    }
    seen.then_some((min, max))
}

/// One comparability measurement of Condition-style windows: the pair
/// (B(x + rz, delta r), B(x, r)) measured against delta.
#[derive(Clone, Debug, Serialize)]
pub struct Cond64Row {
    pub r: DyadicRational,
    pub delta: f64,
    pub ln_ratio: f64,
    /// max(ratio/delta, delta/ratio)
    pub c_z_star: f64,
    pub enclosure_gap: f64,
}

/// For each scale r and each delta, measures how (B(y_i, delta r), B(x,r))
/// compares to delta. Bounded c_z_star across shrinking delta is the
/// finite-scale signature of good density behavior at z; blow-up happens
/// on the exceptional endpoint set.
pub fn check_condition_64(
    x: &DyadicRational,
    scales: &[DyadicRational],
    z: f64,
    deltas: &[f64],
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<Vec<Cond64Row>> {
    if !(z.abs() < 1.0) {
        return Err(CoreError::Domain(format!("z = {z} outside (-1, 1)")));
    }
    let z_dy = DyadicRational::from_f64_exact(z)?;
    let mut rows = Vec::new();
    for r in scales {
        for &delta in deltas {
            if !(delta > 0.0 && delta < 1.0 - z.abs()) {
                return Err(CoreError::Domain(format!(
                    "delta {delta} outside (0, 1-|z|)"
                )));
            }
            let delta_dy = DyadicRational::from_f64_exact(delta)?;
            let (ln_ratio, gap) = nu_ball(x, r, &z_dy, &delta_dy, params, cfg)?;
            let c_z_star = (ln_ratio - delta.ln()).abs().exp();
            rows.push(Cond64Row {
                r: r.clone(),
                delta,
                ln_ratio,
                c_z_star,
                enclosure_gap: gap,
            });
        }
    }
    Ok(rows)
}

/// One row of the tangent-normalization cross-check table.
#[derive(Clone, Debug, Serialize)]
pub struct PreissRow {
    pub r: DyadicRational,
    /// ln of nu_r(B(0,R)) / nu_r(B(0,1)) = ln mu(B(x,Rr)) / mu(B(x,r))
    pub ln_ratio: f64,
    pub ratio: f64,
    /// cover cardinality at the window generation, when one exists
    pub n_cover: Option<u64>,
    pub enclosure_gap: f64,
}

/// nu_r(B(0,R))/nu_r(B(0,1)) per scale. The normalization cancels, so
/// the table is invariant under renormalizing the approximant.
pub fn preiss_crosscheck(
    x: &DyadicRational,
    big_r: f64,
    scales: &[DyadicRational],
    params: MassParams,
    cfg: &PhiConfig,
) -> Result<Vec<PreissRow>> {
    if !(big_r >= 1.0) {
        return Err(CoreError::Domain(format!("R = {big_r} < 1")));
    }
    let big_r_dy = DyadicRational::from_f64_exact(big_r)?;
    let mut rows = Vec::with_capacity(scales.len());
    for r in scales {
        let inner = params.ball_mass(x, r, cfg)?;
        let outer = params.ball_mass(x, &(&big_r_dy * r), cfg)?;
        let ln_ratio = outer.midpoint().ln_ratio(&inner.midpoint()).to_f64();
        let n_cover = blowup_scale(x, r, params.max_gen, cfg)?
            .window
            .map(|w| w.n_cover);
        rows.push(PreissRow {
            r: r.clone(),
            ln_ratio,
            ratio: ln_ratio.exp(),
            n_cover,
            enclosure_gap: inner.relative_gap().max(outer.relative_gap()),
        });
    }
    Ok(rows)
}
