//! The weight function phi(t) = c exp(1/(|t|-1)) on [-1,1], its
//! normalization, and rigorous log-domain integrals over dyadic
//! subintervals.
//!
//! Integrals are computed after the substitution u = 1/(1-t) (mirrored
//! onto [0,1) for the left half), which turns every phi-integral into
//! `c * e^{-u1} * int_0^L e^{-v} (u1+v)^{-2} dv`
//! with u1 >= 1. The linear-domain integrand stays in [0,1] no matter how
//! close I sits to the endpoints, and the exponentially small prefactor is
//! carried symbolically in the log. The exponential-integral identity for
//! these integrals lives in [`crate::expint`] and is used only to test
//! this module, never inside it.

use crate::dd::Dd;
use crate::dyadic::{DyadicRational, IntervalD};
use crate::error::{CoreError, Result};
use crate::logpos::LogPos;
use crate::quad::{integrate_positive, QuadScalar};
use crate::real::Real;
use crate::LogPositive;

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

/// The residual integrand decays like e^{-v}; beyond this cap the tail is
/// below 2e-28 of the total, under every tolerance this crate accepts.
const V_CAP: f64 = 64.0;
const PANEL_EDGES: [f64; 8] = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, V_CAP];

const CACHE_FORMAT: &str = "phi-cache";
const CACHE_VERSION: u32 = 1;

/// Weight-function context: normalization constant, quadrature tolerance
/// and the memo table of integrals the cascade re-queries at every
/// generation.
pub struct PhiConfig {
    ln_c: Dd,
    quad_rel_tol: f64,
    cache: Mutex<HashMap<IntervalD, LogPositive>>,
}

impl PhiConfig {
    pub fn new(quad_rel_tol: f64) -> Result<Self> {
        if !(quad_rel_tol > 0.0 && quad_rel_tol <= 1e-6) {
            return Err(CoreError::Domain(format!(
                "quad_rel_tol {quad_rel_tol} outside (0, 1e-6]"
            )));
        }
        let ln_c = compute_ln_c(quad_rel_tol)?;
        Ok(PhiConfig {
            ln_c,
            quad_rel_tol,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn quad_rel_tol(&self) -> f64 {
        self.quad_rel_tol
    }

    /// The normalization constant c as a log-domain positive.
    pub fn ln_c(&self) -> LogPositive {
        LogPos::from_ln(self.ln_c)
    }

    /// phi at a point given as f64 (any f64 is an exact dyadic).
    pub fn phi_eval(&self, t: f64) -> Result<LogPositive> {
        if !(t.abs() <= 1.0) {
            return Err(CoreError::Domain(format!("phi domain: |{t}| > 1")));
        }
        if t.abs() == 1.0 {
            return Ok(LogPos::zero());
        }
        let at = Dd::from_f64(t.abs());
        let ln = self.ln_c + (at - Dd::from_f64(1.0)).recip();
        Ok(LogPos::from_ln(ln))
    }

    /// phi at an exact dyadic point.
    pub fn phi_eval_dyadic(&self, t: &DyadicRational) -> Result<LogPositive> {
        let one = DyadicRational::one();
        let abs = t.abs();
        if abs > one {
            return Err(CoreError::Domain(format!("phi domain: |{t}| > 1")));
        }
        if abs == one {
            return Ok(LogPos::zero());
        }
        let ln = self.ln_c + (abs.to_dd() - Dd::from_f64(1.0)).recip();
        Ok(LogPos::from_ln(ln))
    }

    /// ln of the phi-integral over `i`, certified to the configured
    /// relative tolerance; memoized on the exact interval.
    pub fn log_phi_integral(&self, i: &IntervalD) -> Result<LogPositive> {
        if let Some(hit) = self.cache.lock().unwrap().get(i) {
            return Ok(*hit);
        }
        let raw = phi_integral_raw::<Dd>(i, self.quad_rel_tol)?;
        let value = match raw {
            None => LogPos::zero(),
            Some(ln) => LogPos::from_ln(self.ln_c + ln),
        };
        self.cache.lock().unwrap().insert(i.clone(), value);
        Ok(value)
    }

    /// phi(I) at plain f64 precision, uncached. Sampling probabilities are
    /// built from this; certified results never touch it.
    pub fn phi_mass_f64(&self, i: &IntervalD) -> Result<f64> {
        let raw = phi_integral_raw::<f64>(i, 1e-14)?;
        Ok(match raw {
            None => 0.0,
            Some(ln) => (self.ln_c.to_f64() + ln).exp(),
        })
    }

    /// The ratio G_{C,eps} = phi([-1,-1+C eps]) / phi([-1,-1+eps]).
    pub fn g_ratio(&self, c: f64, epsilon: f64) -> Result<GRatio> {
        if !(c >= 1.0) || !c.is_finite() {
            return Err(CoreError::Domain(format!("g_ratio: C = {c} < 1")));
        }
        if !(epsilon > 0.0) || c * epsilon > 1.0 {
            return Err(CoreError::Domain(format!(
                "g_ratio: C*eps = {} outside (0, 1]",
                c * epsilon
            )));
        }
        let (ln_g, _) = self.g_ratio_ln_clipped(c, epsilon)?;
        Ok(GRatio {
            c,
            epsilon,
            ln_g,
        })
    }

    /// G with both intervals clipped to the support. Scan rows whose
    /// geometry pushes C*eps past 1 are checked against this clipped value
    /// and flagged, so the clipping is visible rather than silent.
    pub fn g_ratio_ln_clipped(&self, c: f64, epsilon: f64) -> Result<(f64, bool)> {
        if !(c >= 1.0) || !(epsilon > 0.0) {
            return Err(CoreError::Domain(format!(
                "g_ratio: C = {c}, eps = {epsilon}"
            )));
        }
        let two = DyadicRational::from_int(2);
        let ce = &DyadicRational::from_f64_exact(c)? * &DyadicRational::from_f64_exact(epsilon)?;
        let eps = DyadicRational::from_f64_exact(epsilon)?;
        let clipped = ce > two || eps > two;
        let num = self.left_tail(&ce.min(two.clone()))?;
        let den = self.left_tail(&eps.min(two))?;
        Ok((num.ln_ratio(&den).to_f64(), clipped || c * epsilon > 1.0))
    }

    /// phi([-1, -1+w)) for dyadic w in (0, 2].
    pub fn left_tail(&self, width: &DyadicRational) -> Result<LogPositive> {
        let left = DyadicRational::from_int(-1);
        let i = IntervalD::new(left.clone(), &left + width)?;
        self.log_phi_integral(&i)
    }

    /// Translation-ratio probe for the shift lemma: reports the hypothesis
    /// ratio phi(I+l)/phi(I), the N conclusion ratios, and whether
    /// hypothesis > M implies every conclusion > M^{1/8}/2.
    pub fn shift_ratio_probe(
        &self,
        i: &IntervalD,
        m: f64,
        n: usize,
    ) -> Result<ShiftProbeReport> {
        if !(m > 1.0) || n == 0 {
            return Err(CoreError::Domain(format!(
                "shift probe needs M > 1 and N >= 1 (got M={m}, N={n})"
            )));
        }
        let support = IntervalD::support();
        let ell = i.length();
        let shift_total = &DyadicRational::from_int(n as i64 + 1) * &ell;
        let last = i.translate(&shift_total);
        if !support.contains(i) || !support.contains(&last) {
            return Err(CoreError::Domain(format!(
                "probe: I + {}*l(I) escapes [-1,1)",
                n + 1
            )));
        }
        let base = self.log_phi_integral(i)?;
        let shifted_one = self.log_phi_integral(&i.translate(&ell))?;
        let ln_hypothesis = shifted_one.ln_ratio(&base).to_f64();
        let mut ln_conclusions = Vec::with_capacity(n);
        for np in 1..=n {
            let lo = i.translate(&(&DyadicRational::from_int(np as i64) * &ell));
            let hi = i.translate(&(&DyadicRational::from_int(np as i64 + 1) * &ell));
            let r = self
                .log_phi_integral(&hi)?
                .ln_ratio(&self.log_phi_integral(&lo)?)
                .to_f64();
            ln_conclusions.push(r);
        }
        let ln_threshold = m.ln() / 8.0 - std::f64::consts::LN_2;
        let hypothesis_exceeds = ln_hypothesis > m.ln();
        let implication_holds =
            !hypothesis_exceeds || ln_conclusions.iter().all(|&r| r > ln_threshold);
        Ok(ShiftProbeReport {
            interval: i.clone(),
            ell_log2: ell.log2_f64(),
            m,
            n,
            ln_hypothesis,
            ln_conclusions,
            ln_threshold,
            hypothesis_exceeds,
            implication_holds,
        })
    }

    /// Residual of the normalization identity: | phi([-1,0)) + phi([0,1)) - 1 |.
    pub fn normalization_residual(&self) -> Result<f64> {
        let minus1 = DyadicRational::from_int(-1);
        let zero = DyadicRational::zero();
        let one = DyadicRational::one();
        let l = self.log_phi_integral(&IntervalD::new(minus1, zero.clone())?)?;
        let r = self.log_phi_integral(&IntervalD::new(zero, one)?)?;
        Ok(l.add(&r).ln_f64().exp_m1().abs())
    }

    pub fn cache_len(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    /// Stable fingerprint of the cache-relevant configuration.
    pub fn cache_fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x1_0000_01b3);
            }
        };
        eat(CACHE_FORMAT.as_bytes());
        eat(&CACHE_VERSION.to_le_bytes());
        eat(&self.quad_rel_tol.to_bits().to_le_bytes());
        eat(&self.ln_c.hi().to_bits().to_le_bytes());
        eat(&self.ln_c.lo().to_bits().to_le_bytes());
        format!("{h:016x}")
    }

    /// Persist the memo table. Entries are sorted so identical caches
    /// produce identical files.
    pub fn save_cache(&self, path: &Path) -> Result<usize> {
        let snapshot: Vec<(IntervalD, LogPositive)> = {
            let guard = self.cache.lock().unwrap();
            let mut v: Vec<_> = guard.iter().map(|(k, x)| (k.clone(), *x)).collect();
            v.sort_by(|a, b| {
                a.0.left()
                    .cmp(b.0.left())
                    .then_with(|| a.0.right().cmp(b.0.right()))
            });
            v
        };
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        let header = CacheHeader {
            format: CACHE_FORMAT.to_string(),
            version: CACHE_VERSION,
            quad_rel_tol: self.quad_rel_tol,
            fingerprint: self.cache_fingerprint(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for (interval, value) in &snapshot {
            let entry = CacheEntry {
                interval: interval.clone(),
                ln_hi: if value.is_zero() { None } else { Some(value.ln().hi()) },
                ln_lo: if value.is_zero() { None } else { Some(value.ln().lo()) },
                zero: value.is_zero().then_some(true),
            };
            serde_json::to_writer(&mut w, &entry)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(snapshot.len())
    }

    /// Load a previously saved memo table. A missing, corrupt or
    /// mismatched cache is discarded in full and 0 is returned.
    pub fn load_cache(&self, path: &Path) -> usize {
        let file = match std::fs::File::open(path) {
            Ok(f) => f,
            Err(_) => return 0,
        };
        let mut lines = BufReader::new(file).lines();
        let header: CacheHeader = match lines.next() {
            Some(Ok(l)) => match serde_json::from_str(&l) {
                Ok(h) => h,
                Err(_) => return 0,
            },
            _ => return 0,
        };
        if header.format != CACHE_FORMAT
            || header.version != CACHE_VERSION
            || header.quad_rel_tol != self.quad_rel_tol
            || header.fingerprint != self.cache_fingerprint()
        {
            return 0;
        }
        let support = IntervalD::new(
            DyadicRational::from_int(-1),
            DyadicRational::one(),
        )
        .unwrap();
        let mut staged = Vec::new();
        for line in lines {
            let line = match line {
                Ok(l) => l,
                Err(_) => return 0,
            };
            if line.trim().is_empty() {
                continue;
            }
            let entry: CacheEntry = match serde_json::from_str(&line) {
                Ok(e) => e,
                Err(_) => return 0,
            };
            let value = if entry.zero == Some(true) {
                LogPos::zero()
            } else {
                match (entry.ln_hi, entry.ln_lo) {
                    (Some(hi), Some(lo)) if hi.is_finite() && lo.is_finite() => {
                        LogPos::from_ln(Dd::new(hi, lo))
                    }
                    _ => return 0,
                }
            };
            if !support.contains(&entry.interval) {
                return 0;
            }
            staged.push((entry.interval, value));
        }
        let n = staged.len();
        let mut guard = self.cache.lock().unwrap();
        for (k, v) in staged {
            guard.entry(k).or_insert(v);
        }
        n
    }
}

impl std::fmt::Debug for PhiConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhiConfig")
            .field("ln_c", &self.ln_c)
            .field("quad_rel_tol", &self.quad_rel_tol)
            .field("cache_len", &self.cache_len())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    format: String,
    version: u32,
    quad_rel_tol: f64,
    fingerprint: String,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    interval: IntervalD,
    #[serde(skip_serializing_if = "Option::is_none")]
    ln_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ln_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zero: Option<bool>,
}

/// The ratio G_{C,eps} together with its parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GRatio {
    pub c: f64,
    pub epsilon: f64,
    pub ln_g: f64,
}

impl GRatio {
    /// The proof's lower bound ln(C-D) + (D-1)/(D eps), valid for every
    /// D in (1, C).
    pub fn proof_lower_bound_ln(&self, d: f64) -> f64 {
        (self.c - d).ln() + (d - 1.0) / (d * self.epsilon)
    }

    /// Checks ln G against the bound on an interior grid of D values.
    pub fn satisfies_proof_bound(&self) -> bool {
        if self.c <= 1.0 {
            return true;
        }
        (1..32).all(|k| {
            let d = 1.0 + (self.c - 1.0) * (k as f64) / 32.0;
            self.ln_g >= self.proof_lower_bound_ln(d) - 1e-9
        })
    }
}

/// Outcome of [`PhiConfig::shift_ratio_probe`].
#[derive(Debug, Clone, Serialize)]
pub struct ShiftProbeReport {
    pub interval: IntervalD,
    pub ell_log2: f64,
    pub m: f64,
    pub n: usize,
    pub ln_hypothesis: f64,
    pub ln_conclusions: Vec<f64>,
    pub ln_threshold: f64,
    pub hypothesis_exceeds: bool,
    pub implication_holds: bool,
}

/// Standalone normalization computation (what `PhiConfig::new` runs).
pub fn normalization_constant(quad_rel_tol: f64) -> Result<LogPositive> {
    Ok(LogPos::from_ln(compute_ln_c(quad_rel_tol)?))
}

fn compute_ln_c(quad_rel_tol: f64) -> Result<Dd> {
    if !(quad_rel_tol > 0.0 && quad_rel_tol <= 1e-6) {
        return Err(CoreError::Domain(format!(
            "quad_rel_tol {quad_rel_tol} outside (0, 1e-6]"
        )));
    }
    // int_0^1 e^{1/(t-1)} dt = e^{-1} int_0^inf e^{-v} (1+v)^{-2} dv
    let ln_half_raw = |tol: f64| -> Result<Dd> {
        let j = residual_integral(Dd::from_f64(1.0), None, tol)?;
        Ok(j.ln() - Dd::from_f64(1.0))
    };
    let tight = ln_half_raw(quad_rel_tol * 0.05)?;
    let check = ln_half_raw(quad_rel_tol * 0.025)?;
    if (tight - check).abs().to_f64() > quad_rel_tol {
        return Err(CoreError::QuadratureNonConvergence(format!(
            "normalization drifted by {:.3e} between refinement levels",
            (tight - check).abs().to_f64()
        )));
    }
    // c = 1 / (2 * int_0^1 e^{1/(t-1)} dt)
    Ok(-(check + Dd::from_f64(2.0).ln()))
}

/// ln of int_I e^{1/(|t|-1)} dt (no normalization), or None for an
/// interval of zero measure. `i` must satisfy -1 <= left < right <= 1.
fn phi_integral_raw<R: QuadScalar>(i: &IntervalD, tol: f64) -> Result<Option<R>> {
    let minus_one = DyadicRational::from_int(-1);
    let one = DyadicRational::one();
    let zero = DyadicRational::zero();
    if *i.left() < minus_one || *i.right() > one {
        return Err(CoreError::Domain(format!(
            "phi integral over {i} outside [-1, 1]"
        )));
    }
    if *i.left() >= zero {
        return right_side_raw(i.left(), i.right(), tol).map(Some);
    }
    if *i.right() <= zero {
        // phi is even: mirror [a,b) onto [-b,-a)
        return right_side_raw(&-i.right(), &-i.left(), tol).map(Some);
    }
    // straddling 0: split into [left,0) mirrored plus [0,right)
    let left_part: R = right_side_raw(&zero, &-i.left(), tol)?;
    let right_part: R = right_side_raw(&zero, i.right(), tol)?;
    let a = LogPos::<R>::from_ln(left_part);
    let b = LogPos::<R>::from_ln(right_part);
    Ok(Some(a.add(&b).ln()))
}

/// ln of int over [t1, t2) of e^{-1/(1-t)} dt for dyadic 0 <= t1 < t2 <= 1.
fn right_side_raw<R: QuadScalar>(
    t1: &DyadicRational,
    t2: &DyadicRational,
    tol: f64,
) -> Result<R> {
    let one = DyadicRational::one();
    debug_assert!(t1 < t2 && *t2 <= one && !t1.is_negative());
    let omt1 = &one - t1; // 1 - t1 > 0
    let u1: R = dyadic_to_scalar::<R>(&omt1).recip();
    let delta: Option<R> = if *t2 == one {
        None
    } else {
        let omt2 = &one - t2;
        let num = t2 - t1;
        // delta = (t2-t1) / ((1-t1)(1-t2)), formed without cancellation
        Some(
            dyadic_to_scalar::<R>(&num)
                / (dyadic_to_scalar::<R>(&omt1) * dyadic_to_scalar::<R>(&omt2)),
        )
    };
    let j = residual_integral(u1, delta, tol)?;
    Ok(j.ln() - u1)
}

fn dyadic_to_scalar<R: Real>(d: &DyadicRational) -> R {
    // both limbs of the ~106-bit approximation; f64 collapses them
    let dd = d.to_dd();
    R::from_f64(dd.hi()) + R::from_f64(dd.lo())
}

/// int_0^{min(delta, cap)} e^{-v} (u1+v)^{-2} dv over fixed dyadic panels.
fn residual_integral<R: QuadScalar>(u1: R, delta: Option<R>, tol: f64) -> Result<R> {
    let cap = match delta {
        Some(d) if d.to_f64() < V_CAP => d,
        _ => R::from_f64(V_CAP),
    };
    let f = |v: R| {
        let w = (u1 + v).recip();
        (-v).exp() * w * w
    };
    let mut total = R::zero();
    let mut prev = R::zero();
    for &edge in &PANEL_EDGES[1..] {
        let hi = if R::from_f64(edge) < cap {
            R::from_f64(edge)
        } else {
            cap
        };
        if hi <= prev {
            break;
        }
        total = total + integrate_positive(&f, prev, hi, tol)?;
        if hi == cap {
            break;
        }
        prev = hi;
    }
    if total <= R::zero() {
        return Err(CoreError::QuadratureNonConvergence(format!(
            "nonpositive residual integral at u1 = {u1}"
        )));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expint;

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
    fn normalization_matches_expint_oracle() {
        // c = 1 / (2 E2(1)), E2 evaluated by the independent series/CF path
        let cfg = cfg();
        let oracle = (Dd::from_f64(2.0) * expint::e2(Dd::from_f64(1.0)).unwrap())
            .recip()
            .ln();
        let got = cfg.ln_c().ln();
        let rel = (got - oracle).abs().to_f64();
        assert!(rel < 1e-13, "ln c = {got:?}, oracle {oracle:?}, diff {rel:e}");
    }

    #[test]
    fn phi_point_values() {
        let cfg = cfg();
        // phi(0) = c e^{-1}, phi(1/2) = c e^{-2}
        let p0 = cfg.phi_eval(0.0).unwrap().to_linear_f64();
        let c = cfg.ln_c().to_linear_f64();
        assert!((p0 - c * (-1.0f64).exp()).abs() < 1e-14);
        let ph = cfg.phi_eval(0.5).unwrap().to_linear_f64();
        assert!((ph - c * (-2.0f64).exp()).abs() < 1e-14);
        assert!(cfg.phi_eval(1.0).unwrap().is_zero());
        assert!(cfg.phi_eval(-1.0).unwrap().is_zero());
        assert!(cfg.phi_eval(1.0000001).is_err());
    }

    #[test]
    fn halves_integrate_to_one_half() {
        let cfg = cfg();
        let r = cfg.log_phi_integral(&iv("0", "1")).unwrap();
        assert!((r.ln_f64() - 0.5f64.ln()).abs() < 1e-13);
        let l = cfg.log_phi_integral(&iv("-1", "0")).unwrap();
        assert!((l.ln_f64() - 0.5f64.ln()).abs() < 1e-13);
        assert!(cfg.normalization_residual().unwrap() < 1e-12);
    }

    #[test]
    fn interval_value_against_e2_oracle() {
        let cfg = cfg();
        // phi([0,1/2)) = c (E2(1) - E2(2)/2): mpmath 0.4368090950436480090762284
        let got = cfg.log_phi_integral(&iv("0", "2^-1")).unwrap().to_linear_f64();
        assert!(
            (got - 0.436_809_095_043_648_009).abs() < 1e-13,
            "phi([0,1/2)) = {got}"
        );
        // deep tail: ln phi([1-2^-10, 1)) = ln(c a E2(1/a)), a = 2^-10
        let a = 2f64.powi(-10);
        let got_ln = cfg
            .log_phi_integral(&iv("1023*2^-10", "1"))
            .unwrap()
            .ln_f64();
        let oracle = cfg.ln_c().ln_f64()
            + a.ln()
            + expint::ln_e2(Dd::from_f64(1.0 / a)).unwrap().to_f64();
        assert!((got_ln - oracle).abs() < 1e-10, "{got_ln} vs {oracle}");
    }

    #[test]
    fn additivity_of_adjacent_intervals() {
        let cfg = cfg();
        let whole = cfg.log_phi_integral(&iv("-1*2^-2", "3*2^-2")).unwrap();
        let a = cfg.log_phi_integral(&iv("-1*2^-2", "2^-3")).unwrap();
        let b = cfg.log_phi_integral(&iv("2^-3", "3*2^-2")).unwrap();
        let sum = a.add(&b);
        assert!((sum.ln_ratio(&whole)).abs().to_f64() < 1e-12);
    }

    #[test]
    fn g_ratio_reference_points() {
        let cfg = cfg();
        let g1 = cfg.g_ratio(1.0, 0.25).unwrap();
        assert_eq!(g1.ln_g, 0.0);
        // G_{2,0.1} = 2 E2(5)/E2(10) = 520.3167016014070626888201
        let g = cfg.g_ratio(2.0, 0.1).unwrap();
        let want = 520.316_701_601_407_06_f64.ln();
        assert!((g.ln_g - want).abs() < 1e-10, "{} vs {want}", g.ln_g);
        assert!(g.satisfies_proof_bound());
        // G_{2,0.01} > 10^15
        let g2 = cfg.g_ratio(2.0, 0.01).unwrap();
        assert!(g2.ln_g > 15.0 * 10f64.ln());
        assert!(g2.satisfies_proof_bound());
        // domain guard
        assert!(cfg.g_ratio(2.0, 0.6).is_err());
    }

    #[test]
    fn mirrored_intervals_bitwise_equal() {
        let cfg = cfg();
        let a = cfg.log_phi_integral(&iv("2^-3", "2^-1")).unwrap();
        let b = cfg.log_phi_integral(&iv("-1*2^-1", "-1*2^-3")).unwrap();
        assert_eq!(a.ln().hi(), b.ln().hi());
        assert_eq!(a.ln().lo(), b.ln().lo());
    }

    #[test]
    fn shift_probe_flat_and_steep() {
        let cfg = cfg();
        // nearly flat region: hypothesis ratio < 10, implication vacuous
        let flat = cfg
            .shift_ratio_probe(&iv("-105*2^-10", "-100*2^-10"), 10.0, 2)
            .unwrap();
        assert!(!flat.hypothesis_exceeds);
        assert!(flat.implication_holds);
        // steep region: I = [-1+2^-12, -1+2^-11), M = 2, N = 3
        let steep = cfg
            .shift_ratio_probe(&iv("-4095*2^-12", "-2047*2^-11"), 2.0, 3)
            .unwrap();
        assert!(steep.hypothesis_exceeds);
        assert!(steep.implication_holds);
        for &r in &steep.ln_conclusions {
            assert!(r > steep.ln_threshold);
        }
        // identical call gives identical bits (determinism contract)
        let again = cfg
            .shift_ratio_probe(&iv("-4095*2^-12", "-2047*2^-11"), 2.0, 3)
            .unwrap();
        assert_eq!(again.ln_hypothesis, steep.ln_hypothesis);
        assert_eq!(again.ln_conclusions, steep.ln_conclusions);
    }

    #[test]
    fn cache_round_trip() {
        let cfg = cfg();
        let _ = cfg.log_phi_integral(&iv("0", "2^-1")).unwrap();
        let _ = cfg.log_phi_integral(&iv("-1", "0")).unwrap();
        let dir = std::env::temp_dir().join("phi-cache-test");
        let _ = std::fs::create_dir_all(&dir);
        let path = dir.join("cache.jsonl");
        let saved = cfg.save_cache(&path).unwrap();
        assert_eq!(saved, cfg.cache_len());

        let fresh = PhiConfig::new(1e-12).unwrap();
        assert_eq!(fresh.load_cache(&path), saved);
        let v1 = cfg.log_phi_integral(&iv("0", "2^-1")).unwrap();
        let v2 = fresh.log_phi_integral(&iv("0", "2^-1")).unwrap();
        assert_eq!(v1.ln().hi(), v2.ln().hi());
        assert_eq!(v1.ln().lo(), v2.ln().lo());

        // corrupt cache is discarded in full
        std::fs::write(&path, "garbage\n{not json").unwrap();
        let poisoned = PhiConfig::new(1e-12).unwrap();
        assert_eq!(poisoned.load_cache(&path), 0);
        assert_eq!(poisoned.cache_len(), 0);

        // tolerance mismatch is also discarded
        cfg.save_cache(&path).unwrap();
        let other = PhiConfig::new(1e-10).unwrap();
        assert_eq!(other.load_cache(&path), 0);
        let _ = std::fs::remove_file(&path);
    }
}
