//! Quantitative checks on computed profiles: oscillatory tail fits, total
//! variation growth, rescaling convergence rates, dispersion roots and
//! approximation tables for non-smooth profiles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Jet3;
use crate::numerics::{linear_fit, solve_dense};
use crate::profiles::Profile;

/// Inner edge of the tail region used by the fits.
pub const TAIL_START: f64 = 10.0;
/// Spacing of the uniform samples taken from profiles.
pub const SAMPLE_STEP: f64 = 0.01;
/// Distance below which a family counts as converged.
pub const ADMISSIBILITY_TOL: f64 = 1e-3;

/// `g − ℓ ≈ c |z|^d cos(a |z|^{3/2} + φ)` on the oscillatory side `z ≤ −TAIL_START`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryTailFit {
    pub c: f64,
    pub a0_fit: f64,
    /// Phase offset `φ`, reduced to `(−π, π]`.
    pub c0_fit: f64,
    pub decay_exp: f64,
    /// RMS of the fit residual relative to the RMS of the data.
    pub residual: f64,
}

impl AiryTailFit {
    pub fn model(&self, z: f64) -> f64 {
        let r = z.abs();
        self.c * r.powf(self.decay_exp) * (self.a0_fit * r.powf(1.5) + self.c0_fit).cos()
    }
}

pub fn airy_tail_fit(p: &Profile) -> Result<AiryTailFit> {
    airy_tail_fit_from(p, TAIL_START)
}

/// Tail fit over `z ∈ [z_min, −z_start]`.
pub fn airy_tail_fit_from(p: &Profile, z_start: f64) -> Result<AiryTailFit> {
    let limit = p.far_limit.ok_or_else(|| Error::InsufficientTail("profile has no measured far-field limit".into()))?;
    let hi = -z_start.abs();
    if p.is_empty() || p.z_min() >= hi {
        return Err(Error::InsufficientTail(format!("profile does not reach z = {hi}")));
    }
    let n = ((hi - p.z_min()) / SAMPLE_STEP).floor() as usize + 1;
    let (r, w): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|k| {
            let z = hi - k as f64 * SAMPLE_STEP;
            (z.abs(), p.value(z).expect("inside range") - limit)
        })
        .unzip();
    fit_oscillatory_tail(&r, &w)
}

/// Fits `w ≈ c r^d cos(a r^{3/2} + φ)` for samples ordered by increasing `r`.
pub fn fit_oscillatory_tail(r: &[f64], w: &[f64]) -> Result<AiryTailFit> {
    let init = initial_guess(r, w)?;
    let params = levenberg_marquardt(r, w, init);
    let [c, d, a, phi] = params;
    let model = |ri: f64| c * ri.powf(d) * (a * ri.powf(1.5) + phi).cos();
    let ss: f64 = r.iter().zip(w).map(|(&ri, &wi)| (wi - model(ri)).powi(2)).sum();
    let sw: f64 = w.iter().map(|v| v * v).sum();
    // a negative amplitude is a half-period phase shift
    let (c, phi) = if c < 0.0 { (-c, phi + std::f64::consts::PI) } else { (c, phi) };
    Ok(AiryTailFit { c, a0_fit: a, c0_fit: wrap_phase(phi), decay_exp: d, residual: (ss / sw.max(1e-300)).sqrt() })
}

fn wrap_phase(phi: f64) -> f64 {
    use std::f64::consts::PI;
    let t = phi.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Extrema of the sampled tail, refined by parabolic interpolation.
fn tail_extrema(r: &[f64], w: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..w.len().saturating_sub(1) {
        let (a, b, c) = (w[i - 1], w[i], w[i + 1]);
        if (b - a) * (c - b) < 0.0 {
            let denom = a - 2.0 * b + c;
            let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            let h = r[i + 1] - r[i];
            out.push((r[i] + shift * h, b - 0.25 * (a - c) * shift));
        }
    }
    out
}

fn initial_guess(r: &[f64], w: &[f64]) -> Result<[f64; 4]> {
    use std::f64::consts::PI;
    let ext = tail_extrema(r, w);
    if ext.len() < 5 {
        return Err(Error::InsufficientTail(format!("{} tail extrema, need 5", ext.len())));
    }
    // consecutive extrema are half a period apart in phase
    let k: Vec<f64> = (0..ext.len()).map(|i| i as f64).collect();
    let s: Vec<f64> = ext.iter().map(|(ri, _)| ri.powf(1.5)).collect();
    let (slope, _, _) = linear_fit(&k, &s)?;
    let a = PI / slope;
    let (sx, sy) = ext.iter().fold((0.0, 0.0), |(sx, sy), &(ri, wi)| {
        let target = if wi > 0.0 { 0.0 } else { PI };
        let phi = target - a * ri.powf(1.5);
        (sx + phi.cos(), sy + phi.sin())
    });
    let phi = sy.atan2(sx);
    let lr: Vec<f64> = ext.iter().map(|(ri, _)| ri.ln()).collect();
    let lw: Vec<f64> = ext.iter().map(|(_, wi)| wi.abs().max(1e-300).ln()).collect();
    let (d, lc, _) = linear_fit(&lr, &lw)?;
    Ok([lc.exp(), d, a, phi])
}

fn levenberg_marquardt(r: &[f64], w: &[f64], init: [f64; 4]) -> [f64; 4] {
    let cost = |p: &[f64; 4]| -> f64 {
        r.iter().zip(w).map(|(&ri, &wi)| (wi - p[0] * ri.powf(p[1]) * (p[2] * ri.powf(1.5) + p[3]).cos()).powi(2)).sum()
    };
    let mut p = init;
    let mut current = cost(&p);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let mut jtj = vec![vec![0.0; 4]; 4];
        let mut jtr = vec![0.0; 4];
        for (&ri, &wi) in r.iter().zip(w) {
            let amp = ri.powf(p[1]);
            let r32 = ri.powf(1.5);
            let th = p[2] * r32 + p[3];
            let (s, c) = th.sin_cos();
            let f = p[0] * amp * c;
            let jac = [amp * c, f * ri.ln(), -p[0] * amp * s * r32, -p[0] * amp * s];
            let res = wi - f;
            for a in 0..4 {
                jtr[a] += jac[a] * res;
                for b in 0..4 {
                    jtj[a][b] += jac[a] * jac[b];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut m = jtj.clone();
            for (a, row) in m.iter_mut().enumerate() {
                row[a] += lambda * jtj[a][a].max(1e-300);
            }
            let Some(delta) = solve_dense(m, jtr.clone()) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [p[0] + delta[0], p[1] + delta[1], p[2] + delta[2], p[3] + delta[3]];
            let c = cost(&trial);
            if c.is_finite() && c < current {
                let rel = (current - c) / current.max(1e-300);
                p = trial;
                current = c;
                lambda = (lambda * 0.3).max(1e-12);
                improved = rel > 1e-15;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    p
}

/// `Σ |g_{i+1} − g_i|` over a lattice of spacing `SAMPLE_STEP` anchored at
/// zero, plus the window endpoints. Windows that meet at a lattice point are
/// additive.
pub fn total_variation(p: &Profile, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::InvalidInput("window must be increasing".into()));
    }
    if lo < p.z_min() || hi > p.z_max() {
        return Err(Error::OutOfWindow(format!("[{lo}, {hi}] not within [{}, {}]", p.z_min(), p.z_max())));
    }
    let k0 = (lo / SAMPLE_STEP).ceil() as i64;
    let k1 = (hi / SAMPLE_STEP).floor() as i64;
    let mut z = vec![lo];
    z.extend((k0..=k1).map(|k| k as f64 * SAMPLE_STEP).filter(|&s| s > lo && s < hi));
    z.push(hi);
    let g: Vec<f64> = z.iter().map(|&s| p.value(s).expect("inside range")).collect();
    Ok(total_variation_samples(&g))
}

pub fn total_variation_samples(g: &[f64]) -> f64 {
    g.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Slope of `ln TV([−Z, 0])` against `ln Z`.
pub fn tv_growth_exponent(p: &Profile, zs: &[f64]) -> Result<f64> {
    if zs.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: zs.len() });
    }
    let mut lx = Vec::with_capacity(zs.len());
    let mut ly = Vec::with_capacity(zs.len());
    for &z in zs {
        lx.push(z.ln());
        ly.push(total_variation(p, (-z, 0.0))?.ln());
    }
    Ok(linear_fit(&lx, &ly)?.0)
}

/// `I(t) = ∫_{−l}^0 |g(x (−t)^{−1/3}) − ℓ| dx` for the fixed profile, with
/// `ℓ` its far-field limit (the rescaled solution converges to `ℓ` there).
pub fn rescaling_integral(p: &Profile, l: f64, t: f64) -> Result<f64> {
    if !(t < 0.0) {
        return Err(Error::InvalidInput("t must be negative".into()));
    }
    let limit = p.far_limit.ok_or_else(|| Error::InsufficientTail("profile has no measured far-field limit".into()))?;
    let s = (-t).cbrt();
    let zmax = l / s;
    if -zmax < p.z_min() {
        return Err(Error::OutOfWindow(format!("z = {} below the profile range", -zmax)));
    }
    // trapezoid in z on a fixed lattice, then dx = s dz
    let n = (zmax / SAMPLE_STEP * 2.0).ceil() as usize;
    let h = zmax / n as f64;
    let f = |k: usize| (p.value(-(k as f64) * h).expect("inside range") - limit).abs();
    let mut sum = 0.5 * (f(0) + f(n));
    for k in 1..n {
        sum += f(k);
    }
    Ok(s * h * sum)
}

/// Exponent `q` of `I(t) ∼ (−t)^q` from a geometric sequence of times whose
/// rescaled windows `l/(−t)^{1/3}` span `[0.2, 0.9]·|z_min|`.
pub fn convergence_rate(p: &Profile, l: f64) -> Result<f64> {
    Ok(convergence_table(p, l)?.0)
}

/// As [`convergence_rate`], also returning the `(t, I(t))` samples.
pub fn convergence_table(p: &Profile, l: f64) -> Result<(f64, Vec<(f64, f64)>)> {
    if !(l > 0.0) {
        return Err(Error::InvalidInput("window length must be positive".into()));
    }
    let depth = p.z_min().abs();
    let count = 12;
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let zw = 0.2 * depth * (4.5f64).powf(k as f64 / (count - 1) as f64);
        let t = -(l / zw).powi(3);
        rows.push((t, rescaling_integral(p, l, t)?));
    }
    if rows.iter().all(|&(_, v)| v == 0.0) {
        return Ok((f64::INFINITY, rows));
    }
    let lx: Vec<f64> = rows.iter().map(|(t, _)| (-t).ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|(_, v)| v.max(1e-300).ln()).collect();
    Ok((linear_fit(&lx, &ly)?.0, rows))
}

/// Roots of `λ³ = u/ε²`, the real root first.
pub fn dispersion_eigenvalues(u: f64, epsilon: f64) -> Result<[Complex64; 3]> {
    if epsilon == 0.0 || !epsilon.is_finite() {
        return Err(Error::InvalidInput("epsilon must be finite and nonzero".into()));
    }
    let real = (u / (epsilon * epsilon)).cbrt();
    let turn = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let r = Complex64::new(real, 0.0);
    Ok([r, r * turn, r * turn.conj()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissibilityVerdict {
    NumericallyGAdmissible,
    NonConvergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityRow {
    pub param: f64,
    pub sup: Option<f64>,
    pub l1: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub window: (f64, f64),
    pub tolerance: f64,
    pub rows: Vec<AdmissibilityRow>,
    pub verdict: AdmissibilityVerdict,
}

/// Distances from family members to `target` on the compact `window`.
/// Failures of the family are recorded in the table, never raised.
pub fn g_admissibility_report<T, M, F>(
    target: &T,
    family: F,
    params: &[f64],
    window: (f64, f64),
    tolerance: f64,
) -> AdmissibilityReport
where
    T: Jet3 + ?Sized,
    M: Jet3,
    F: Fn(f64) -> Result<M>,
{
    let (lo, hi) = window;
    let n = 4001;
    let h = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    let reference: Option<Vec<f64>> = grid.iter().map(|&z| target.jet3_at(z).map(|j| j[0])).collect();
    let rows: Vec<AdmissibilityRow> = params
        .iter()
        .map(|&param| {
            let fail = |msg: String| AdmissibilityRow { param, sup: None, l1: None, error: Some(msg) };
            let Some(reference) = reference.as_ref() else {
                return fail("window outside the target".into());
            };
            let member = match family(param) {
                Ok(m) => m,
                Err(e) => return fail(e.to_string()),
            };
            let mut sup: f64 = 0.0;
            let mut l1 = 0.0;
            for (i, &z) in grid.iter().enumerate() {
                let Some(v) = member.jet3_at(z).map(|j| j[0]) else {
                    return fail(format!("member undefined at z = {z}"));
                };
                let d = (v - reference[i]).abs();
                sup = sup.max(d);
                l1 += if i == 0 || i == n - 1 { 0.5 * d * h } else { d * h };
            }
            AdmissibilityRow { param, sup: Some(sup), l1: Some(l1), error: None }
        })
        .collect();
    let sups: Option<Vec<f64>> = rows.iter().map(|r| r.sup).collect();
    let verdict = match sups {
        Some(s) if !s.is_empty() && s.windows(2).all(|w| w[1] <= w[0]) && *s.last().unwrap() < tolerance => {
            AdmissibilityVerdict::NumericallyGAdmissible
        }
        _ => AdmissibilityVerdict::NonConvergent,
    };
    AdmissibilityReport { window, tolerance, rows, verdict }
}
