//! Property-check suites behind `verify phi|mu|tangent`: each check runs
//! one invariant of the construction and reports pass/fail with a detail
//! string. Deterministic given the seed.

use crate::analysis::MassParams;
use crate::blowup::{
    blowup_scale, check_condition_64, density_profile, detect_e_at_gen, interior_flatness,
    nu_ball,
};
use crate::cascade::{children, locate, mass_of_interval, ConstructionInterval, MuSampler};
use crate::dd::Dd;
use crate::dyadic::{DyadicRational, IntervalD};
use crate::error::Result;
use crate::expint;
use crate::logpos::log_sum;
use crate::oracle::GridOracle;
use crate::weight::PhiConfig;
use crate::LogPositive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

/// Weight-function suite: normalization, symmetry, monotonicity,
/// integral brackets, tail ratios and the shift probe.
pub fn phi_suite(cfg: &PhiConfig, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // normalization against the exponential-integral oracle c = 1/(2 E2(1))
    let oracle_ln = (Dd::from_f64(2.0) * expint::e2(Dd::from_f64(1.0))?)
        .recip()
        .ln();
    let diff = (cfg.ln_c().ln() - oracle_ln).abs().to_f64();
    out.push(Check::new(
        "phi.normalization-oracle",
        diff <= 1e-8,
        format!("|ln c - ln(1/(2E2(1)))| = {diff:.3e} (c = {:.9})", cfg.ln_c().to_linear_f64()),
    ));

    let residual = cfg.normalization_residual()?;
    out.push(Check::new(
        "phi.normalization-residual",
        residual <= 10.0 * cfg.quad_rel_tol(),
        format!("|phi([-1,1)) - 1| = {residual:.3e}"),
    ));

    // halves are bitwise equal and each is 1/2
    let left = cfg.log_phi_integral(&iv_int(-1, 0)?)?;
    let right = cfg.log_phi_integral(&iv_int(0, 1)?)?;
    let half_err = (left.ln_f64() - 0.5f64.ln()).abs();
    out.push(Check::new(
        "phi.symmetry-halves",
        left.ln() == right.ln() && half_err < 10.0 * cfg.quad_rel_tol(),
        format!("phi([-1,0)) = phi([0,1)) bitwise; |ln - ln 1/2| = {half_err:.3e}"),
    ));

    // strict monotonicity on a dyadic grid: increasing on (-1,0], decreasing on [0,1)
    let mut monotone = true;
    let mut prev = cfg.phi_eval_dyadic(&DyadicRational::new((-63i64).into(), -6))?;
    for m in -62..=0i64 {
        let cur = cfg.phi_eval_dyadic(&DyadicRational::new(m.into(), -6))?;
        if cur <= prev {
            monotone = false;
        }
        prev = cur;
    }
    for m in 1..=63i64 {
        let cur = cfg.phi_eval_dyadic(&DyadicRational::new(m.into(), -6))?;
        if cur >= prev {
            monotone = false;
        }
        prev = cur;
    }
    out.push(Check::new(
        "phi.monotone-grid",
        monotone,
        "strictly increasing on (-1,0], strictly decreasing on [0,1) at 2^-6 steps".into(),
    ));

    // monotone-function sandwich on one-sided intervals
    let mut sandwich_ok = true;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (a, b) = random_subinterval(&mut rng, -1.0, 0.0);
        let i = IntervalD::new(a.clone(), b.clone())?;
        let val = cfg.log_phi_integral(&i)?;
        let ln_len = i.length().ln_dd()?.to_f64();
        let fa = cfg.phi_eval_dyadic(&a)?;
        let fb = cfg.phi_eval_dyadic(&b)?;
        let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
        let lo_ok = lo.is_zero() || val.ln_f64() >= lo.ln_f64() + ln_len - 1e-9;
        let hi_ok = val.ln_f64() <= hi.ln_f64() + ln_len + 1e-9;
        if !(lo_ok && hi_ok) {
            sandwich_ok = false;
            worst = val.ln_f64();
        }
    }
    out.push(Check::new(
        "phi.endpoint-sandwich",
        sandwich_ok,
        if sandwich_ok {
            "min(phi(a),phi(b)) l(I) <= phi(I) <= max(phi(a),phi(b)) l(I) on 50 draws".into()
        } else {
            format!("sandwich violated, ln phi(I) = {worst:.6}")
        },
    ));

    // interior bracket: phi(tau) l(I) <= phi(I) <= phi(0) l(I)
    let mut bracket_ok = true;
    for tau in [0.25, 0.5, 0.75] {
        let phi0 = cfg.phi_eval(0.0)?.ln_f64();
        let phit = cfg.phi_eval(tau)?.ln_f64();
        for _ in 0..200 {
            let (a, b) = random_subinterval(&mut rng, -tau, tau);
            let i = IntervalD::new(a, b)?;
            let ln_len = i.length().ln_dd()?.to_f64();
            let v = cfg.log_phi_integral(&i)?.ln_f64();
            if v < phit + ln_len - 1e-9 || v > phi0 + ln_len + 1e-9 {
                bracket_ok = false;
            }
        }
    }
    out.push(Check::new(
        "phi.interior-bracket",
        bracket_ok,
        "phi(tau) l(I) <= phi(I) <= phi(0) l(I), tau in {1/4,1/2,3/4}, 200 draws each".into(),
    ));

    // additivity of adjacent intervals
    let mut add_ok = true;
    let mut add_worst = 0.0f64;
    for _ in 0..50 {
        let (a, b) = random_subinterval(&mut rng, -1.0, 0.875);
        let (_, c) = random_subinterval(&mut rng, b.to_f64(), 1.0);
        let whole = cfg.log_phi_integral(&IntervalD::new(a.clone(), c.clone())?)?;
        let p1 = cfg.log_phi_integral(&IntervalD::new(a, b.clone())?)?;
        let p2 = cfg.log_phi_integral(&IntervalD::new(b.clone(), c)?)?;
        let err = p1.add(&p2).ln_ratio(&whole).abs().to_f64();
        add_worst = add_worst.max(err);
        if err > 10.0 * cfg.quad_rel_tol() {
            add_ok = false;
        }
    }
    out.push(Check::new(
        "phi.additivity",
        add_ok,
        format!("worst |ln(phi(I1)+phi(I2)) - ln phi(I1 u I2)| = {add_worst:.3e}"),
    ));

    // tail ratio grid: G_{2, 2^-j} nondecreasing as eps halves, and the
    // proof's lower bound holds at every grid point
    let mut g_ok = true;
    let mut prev_ln_g = f64::NEG_INFINITY;
    for j in 3..=40 {
        let g = cfg.g_ratio(2.0, 2f64.powi(-j))?;
        if g.ln_g < prev_ln_g || !g.satisfies_proof_bound() {
            g_ok = false;
        }
        prev_ln_g = g.ln_g;
    }
    let spot1 = cfg.g_ratio(1.0, 0.125)?.ln_g == 0.0;
    let g01 = cfg.g_ratio(2.0, 0.1)?.ln_g;
    let spot2 = (g01 - 520.316_701_601_407_06f64.ln()).abs() < 0.01;
    let spot3 = cfg.g_ratio(2.0, 0.01)?.ln_g > 15.0 * 10f64.ln();
    out.push(Check::new(
        "phi.tail-ratio-grid",
        g_ok && spot1 && spot2 && spot3,
        format!(
            "G monotone on eps = 2^-3..2^-40; G(1,-)=1: {spot1}; G(2,0.1) ~ 520.3: {spot2}; G(2,0.01) > 1e15: {spot3}"
        ),
    ));

    // shift probe: vacuous flat case and a steep near-boundary case
    let flat = cfg.shift_ratio_probe(
        &IntervalD::new(dy("-105*2^-10"), dy("-100*2^-10"))?,
        10.0,
        2,
    )?;
    let steep = cfg.shift_ratio_probe(
        &IntervalD::new(dy("-4095*2^-12"), dy("-2047*2^-11"))?,
        2.0,
        3,
    )?;
    out.push(Check::new(
        "phi.shift-probe",
        !flat.hypothesis_exceeds
            && flat.implication_holds
            && steep.hypothesis_exceeds
            && steep.implication_holds,
        format!(
            "flat: vacuous ({:.3}); steep: hypothesis ln {:.1} with all conclusions above ln threshold {:.3}",
            flat.ln_hypothesis, steep.ln_hypothesis, steep.ln_threshold
        ),
    ));

    Ok(out)
}

/// Measure suite: conservation, tiling, reflection, enclosure soundness
/// against the full-grid oracle, and inclusion monotonicity.
pub fn mu_suite(cfg: &PhiConfig, params: MassParams, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d75);
    let conserve_gen = params.max_gen.min(8);

    // conservation and tiling along sampled chains
    let mut sampler = MuSampler::new(seed, conserve_gen as u32)?;
    let pts = sampler.sample(20, cfg)?;
    let mut worst_cons = 0.0f64;
    let mut tiling_ok = true;
    for (x, _) in &pts {
        let mut node = ConstructionInterval::root();
        for g in 0..=conserve_gen {
            let kids = children(&node, cfg)?;
            let masses: Vec<LogPositive> = kids.iter().map(|k| k.ln_mass).collect();
            let err = log_sum(&masses).ln_ratio(&node.ln_mass).abs().to_f64();
            worst_cons = worst_cons.max(err);
            for w in kids.windows(2) {
                if w[0].extent.right() != w[1].extent.left() {
                    tiling_ok = false;
                }
            }
            if kids[0].extent.left() != node.extent.left()
                || kids.last().unwrap().extent.right() != node.extent.right()
            {
                tiling_ok = false;
            }
            node = locate(x, g, cfg)?;
        }
    }
    out.push(Check::new(
        "mu.conservation",
        worst_cons <= 1e-12,
        format!("worst |ln sum(children) - ln parent| = {worst_cons:.3e} over 20 chains to generation {conserve_gen}"),
    ));
    out.push(Check::new(
        "mu.tiling",
        tiling_ok,
        "children concatenate to the parent with zero gap/overlap (exact)".into(),
    ));

    // reflection symmetry of sampled node masses
    let mut refl_worst = 0.0f64;
    for (x, idx) in pts.iter().take(10) {
        let node = locate(x, conserve_gen.min(6), cfg)?;
        let mirrored_x = find_interior_mirror(x);
        let mirrored = locate(&mirrored_x, conserve_gen.min(6), cfg)?;
        let err = node.ln_mass.ln_ratio(&mirrored.ln_mass).abs().to_f64();
        refl_worst = refl_worst.max(err);
        let _ = idx;
    }
    out.push(Check::new(
        "mu.reflection-symmetry",
        refl_worst <= 1e-12,
        format!("worst mirror-mass deviation = {refl_worst:.3e}"),
    ));

    // enclosure soundness against the generation-5 grid oracle
    let oracle = GridOracle::build(5, cfg)?;
    let exp5 = crate::cascade::generation_length_exp2(5);
    let count = oracle.leaf_count() as u64;
    let minus_one = DyadicRational::from_int(-1);
    let mut sound = true;
    let mut gap_ok = true;
    for _ in 0..25 {
        let a = rng.gen_range(0..count - 1);
        let b = rng.gen_range(a + 1..=count);
        let j = IntervalD::new(
            &minus_one + &DyadicRational::new(a.into(), exp5),
            &minus_one + &DyadicRational::new(b.into(), exp5),
        )?;
        let want = oracle.ln_mass_of_aligned(&j)?.unwrap();
        let enc = mass_of_interval(&j, params.rel_gap, params.max_gen, cfg)?;
        if !enc.contains_ln(want) {
            sound = false;
        }
        if enc.relative_gap() > params.rel_gap {
            gap_ok = false;
        }
    }
    out.push(Check::new(
        "mu.enclosure-soundness",
        sound && gap_ok,
        "25 random grid intervals: oracle in [lower, upper], gap <= rel_gap".into(),
    ));

    // inclusion monotonicity
    let outer = mass_of_interval(&iv_dy("-1*2^-1", "3*2^-2")?, params.rel_gap, params.max_gen, cfg)?;
    let inner = mass_of_interval(&iv_dy("-1*2^-2", "2^-1")?, params.rel_gap, params.max_gen, cfg)?;
    let mono = inner.upper.ln_f64() <= outer.upper.ln_f64() + (2.0 * params.rel_gap).ln_1p()
        && inner.lower <= outer.upper;
    out.push(Check::new(
        "mu.inclusion-monotonicity",
        mono,
        "upper(J) <= upper(J')(1+2 rel_gap) and lower(J) <= upper(J') for J in J'".into(),
    ));

    // sampler determinism
    let mut s1 = MuSampler::new(seed, 6)?;
    let mut s2 = MuSampler::new(seed, 6)?;
    let det = s1.sample(20, cfg)? == s2.sample(20, cfg)?;
    out.push(Check::new(
        "mu.sampler-determinism",
        det,
        "same seed and depth reproduce the sample sequence exactly".into(),
    ));

    Ok(out)
}

/// Blow-up suite: normalization, reflection symmetry at the symmetric
/// chain, endpoint-set stability, interior flatness, and the
/// comparability contrast on and off the endpoint set.
pub fn tangent_suite(cfg: &PhiConfig, params: MassParams, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    // normalization of the approximant is literal
    let mut norm_ok = true;
    let mut sampler = MuSampler::new(seed ^ 0x7461, 9)?;
    let pts = sampler.sample(3, cfg)?;
    for (x, _) in &pts {
        let r = locate(x, 6, cfg)?.length().mul_pow2(-2);
        let (ln, _) = nu_ball(
            x,
            &r,
            &DyadicRational::zero(),
            &DyadicRational::one(),
            params,
            cfg,
        )?;
        if ln != 0.0 {
            norm_ok = false;
        }
    }
    out.push(Check::new(
        "tangent.normalization",
        norm_ok,
        "nu(B(0,1)) = 1 exactly (identical enclosure in numerator and denominator)".into(),
    ));

    // symmetric chain at 0
    let prof0 = density_profile(
        &DyadicRational::zero(),
        &dy("2^-8"),
        1.0,
        65,
        2f64.powi(-5),
        params,
        cfg,
    )?;
    let mut sym_worst = 0.0f64;
    let n = prof0.points.len();
    for i in 0..n {
        let (a, b) = (&prof0.points[i], &prof0.points[n - 1 - i]);
        if a.ln_nu.is_finite() && b.ln_nu.is_finite() {
            sym_worst = sym_worst.max((a.ln_nu - b.ln_nu).abs());
        }
    }
    out.push(Check::new(
        "tangent.origin-symmetry",
        sym_worst <= 1e-10,
        format!("worst |ln nu(z) - ln nu(-z)| = {sym_worst:.3e} at x = 0"),
    ));

    // E points recomputed one generation deeper form a superset
    let mut stable = true;
    for (x, _) in &pts {
        let node = locate(x, 7, cfg)?;
        let r = node.length().mul_pow2(-2);
        let scale = blowup_scale(x, &r, params.max_gen, cfg)?;
        if let Some(w) = &scale.window {
            let e1 = detect_e_at_gen(x, &r, w.k + 1);
            let e2 = detect_e_at_gen(x, &r, w.k + 2);
            for p in &e1.points {
                if !e2.points.contains(p) {
                    stable = false;
                }
            }
        }
    }
    out.push(Check::new(
        "tangent.e-point-stability",
        stable,
        "generation K+2 endpoint set contains the generation K+1 set".into(),
    ));

    // flatness: interior max/min bounded at a valid scale of a sampled point
    let mut flat_detail = String::from("no valid window found");
    let mut flat_ok = true;
    'outer: for (x, _) in &pts {
        for k in (6..=9).rev() {
            let node = locate(x, k, cfg)?;
            let r = node.length().mul_pow2(-4);
            let scale = blowup_scale(x, &r, params.max_gen, cfg)?;
            if scale.window.is_none() {
                continue;
            }
            let delta = 2f64.powi(-6);
            let prof = density_profile(x, &r, 1.0, 129, delta, params, cfg)?;
            if let Some((mn, mx)) = interior_flatness(&prof, 2.0 * delta) {
                flat_ok = mx / mn <= 100.0;
                flat_detail = format!("interior max/min = {:.3} at generation {k}", mx / mn);
                break 'outer;
            }
        }
    }
    out.push(Check::new("tangent.interior-flatness", flat_ok, flat_detail));

    // comparability contrast: z pinned to an endpoint blows up as the
    // window shrinks below the endpoint spacing, while the mid-gap z
    // stays bounded
    let (x0, _) = &pts[0];
    let mut contrast_detail = String::from("no window for contrast");
    let mut contrast_ok = true;
    for k in (5..=9).rev() {
        let node = locate(x0, k, cfg)?;
        let r = node.length().mul_pow2(-4);
        let scale = blowup_scale(x0, &r, params.max_gen, cfg)?;
        let Some(w) = &scale.window else { continue };
        let e = detect_e_at_gen(x0, &r, w.k + 1);
        let Some((e_near, e_next)) = adjacent_e_pair(&e.normalized) else {
            continue;
        };
        let spacing = (e_next - e_near).abs();
        let z_mid = 0.5 * (e_near + e_next);
        let deltas: Vec<f64> = [8.0, 32.0, 128.0]
            .iter()
            .map(|d| spacing / d)
            .filter(|&d| d > 0.0 && d < 1.0 - e_near.abs().max(z_mid.abs()))
            .collect();
        if deltas.len() < 2 {
            continue;
        }
        let at_e = check_condition_64(x0, &[r.clone()], e_near, &deltas, params, cfg)?;
        let away = check_condition_64(x0, &[r.clone()], z_mid, &deltas, params, cfg)?;
        let blow: f64 = at_e.last().unwrap().c_z_star;
        let stay: f64 = away.iter().map(|r| r.c_z_star).fold(0.0, f64::max);
        contrast_ok = blow > 10.0 * stay;
        contrast_detail = format!(
            "c* at endpoint = {blow:.3e} vs mid-gap max {stay:.3e} (windows down to spacing/128)"
        );
        break;
    }
    out.push(Check::new(
        "tangent.e-point-contrast",
        contrast_ok,
        contrast_detail,
    ));

    Ok(out)
}

/// The endpoint nearest 0 together with its nearest neighbor.
fn adjacent_e_pair(normalized: &[f64]) -> Option<(f64, f64)> {
    let near = normalized
        .iter()
        .copied()
        .filter(|z| z.abs() < 0.5)
        .min_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())?;
    let next = normalized
        .iter()
        .copied()
        .filter(|&z| z != near)
        .min_by(|a, b| {
            (a - near)
                .abs()
                .partial_cmp(&(b - near).abs())
                .unwrap()
        })?;
    Some((near, next))
}

fn dy(s: &str) -> DyadicRational {
    s.parse().expect("static dyadic literal")
}

fn iv_int(a: i64, b: i64) -> Result<IntervalD> {
    IntervalD::new(DyadicRational::from_int(a), DyadicRational::from_int(b))
}

fn iv_dy(a: &str, b: &str) -> Result<IntervalD> {
    IntervalD::new(dy(a), dy(b))
}

/// Random dyadic subinterval of (lo, hi) at resolution 2^-20.
fn random_subinterval(
    rng: &mut ChaCha8Rng,
    lo: f64,
    hi: f64,
) -> (DyadicRational, DyadicRational) {
    let scale = 1 << 20;
    let lo_t = (lo * scale as f64).ceil() as i64;
    let hi_t = (hi * scale as f64).floor() as i64;
    let a = rng.gen_range(lo_t..hi_t - 1);
    let b = rng.gen_range(a + 1..=hi_t);
    (
        DyadicRational::new(a.into(), -20),
        DyadicRational::new(b.into(), -20),
    )
}

/// A nearby point on the mirrored side that shares the mirrored chain:
/// reflecting x and nudging it inside by half a deep grid step keeps it
/// interior to the mirrored generation-6 interval.
fn find_interior_mirror(x: &DyadicRational) -> DyadicRational {
    // x is a left endpoint of its deepest interval, so -x is a right
    // endpoint; shift left by a tiny dyadic to land strictly inside
    &(-x) - &DyadicRational::pow2(-120)
}
