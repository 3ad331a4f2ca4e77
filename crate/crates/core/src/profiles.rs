//! Self-similar profiles of `u_t = (u u_x)_xx`.
//!
//! Blow-up profiles `u = (-t)^α g(x/(-t)^β)` and rarefaction profiles
//! `u = t^α g(x/t^β)`, `β = (1+α)/3`, solve
//!
//! ```text
//! (g g')'' = ±[ ((1+α)/3) g' z − α g ]      (+ blow-up, − rarefaction)
//! ```
//!
//! The ODE degenerates where `g = 0`. It is integrated in the regularized
//! form `g''' = sign(g)/sqrt(ν² + g²) · (rhs − 3 g' g'')` and every orbit is
//! started a small distance away from the degenerate point, seeded by a local
//! power series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{fornberg_weights, linear_fit, linspace, quintic_hermite};
use crate::ode::{find_root, integrate, OdeSettings, Termination};

/// Offset from a degenerate point (origin or singular zero) where orbits start.
pub const SEED_OFFSET: f64 = 1e-4;
/// Far-field extent of shot profiles.
pub const FAR_FIELD: f64 = 50.0;
/// Number of oscillation periods averaged by the far-field estimator.
pub const TAIL_PERIODS: usize = 5;
/// The critical exponent where the profile ODE admits the cubic saw.
pub const ALPHA_CRITICAL: f64 = -0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Blowup,
    Rarefaction,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Blowup => 1.0,
            Branch::Rarefaction => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Branch::Blowup => Branch::Rarefaction,
            Branch::Rarefaction => Branch::Blowup,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityParams {
    pub alpha: f64,
    pub beta: f64,
    pub branch: Branch,
}

impl SimilarityParams {
    pub fn new(alpha: f64, branch: Branch) -> Self {
        Self { alpha, beta: (1.0 + alpha) / 3.0, branch }
    }

    pub fn blowup(alpha: f64) -> Self {
        Self::new(alpha, Branch::Blowup)
    }

    /// Exponent `3α/(1+α)` of the power-law far field `g ~ C|z|^p`.
    pub fn far_exponent(&self) -> f64 {
        3.0 * self.alpha / (1.0 + self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Oscillatory approach to a constant far field (α = 0).
    BoundedOscillatory,
    /// Regular far field `g ~ C|z|^{3α/(1+α)}` with `α ≠ 0`.
    PowerLawTail,
    CubicGrowth,
    FiniteInterface,
    SqrtSingularity,
}

/// A sampled similarity profile. Samples carry `g`, `g'` and `g''` so the
/// profile can be evaluated between nodes by quintic Hermite interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub z: Vec<f64>,
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
    pub d2g: Vec<f64>,
    pub params: SimilarityParams,
    pub origin_slope: f64,
    /// Far-field coefficient as `z → −∞` (the limit itself when α = 0).
    pub far_limit: Option<f64>,
    /// Far-field coefficient as `z → +∞`.
    pub far_limit_plus: Option<f64>,
    pub interface_z0: Option<f64>,
    pub classification: Classification,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z_min(&self) -> f64 {
        self.z[0]
    }

    pub fn z_max(&self) -> f64 {
        self.z[self.z.len() - 1]
    }

    /// `(g, g', g'')` at `z`, or `None` outside the sampled range.
    pub fn jet(&self, z: f64) -> Option<[f64; 3]> {
        if self.z.is_empty() || z < self.z_min() || z > self.z_max() {
            return None;
        }
        if let Some(z0) = self.interface_z0 {
            // the zero region lies on the far side of the interface from the origin
            if (z - z0) * z0.signum() >= 0.0 {
                return Some([0.0; 3]);
            }
        }
        let n = self.z.len();
        if n == 1 {
            return Some([self.g[0], self.dg[0], self.d2g[0]]);
        }
        let i = self.z.partition_point(|&s| s <= z).clamp(1, n - 1) - 1;
        Some(quintic_hermite(
            self.z[i],
            [self.g[i], self.dg[i], self.d2g[i]],
            self.z[i + 1],
            [self.g[i + 1], self.dg[i + 1], self.d2g[i + 1]],
            z,
        ))
    }

    pub fn value(&self, z: f64) -> Option<f64> {
        self.jet(z).map(|j| j[0])
    }

    /// `(g, g', g'', g''')` at `z`. The third derivative comes from
    /// finite-difference weights on the stored second derivatives.
    pub fn jet3(&self, z: f64) -> Option<[f64; 4]> {
        let [g, g1, g2] = self.jet(z)?;
        let n = self.z.len();
        if n < 5 {
            return None;
        }
        let i = self.z.partition_point(|&s| s <= z);
        let lo = i.saturating_sub(3).min(n - 6.min(n));
        let hi = (lo + 6).min(n);
        let nodes = &self.z[lo..hi];
        let w = fornberg_weights(z, nodes, 1);
        let g3 = w[1].iter().zip(&self.d2g[lo..hi]).map(|(c, v)| c * v).sum();
        Some([g, g1, g2, g3])
    }

    /// Values on an arbitrary grid; points outside the profile give `None`.
    pub fn resample(&self, grid: &[f64]) -> Vec<Option<f64>> {
        grid.iter().map(|&z| self.value(z)).collect()
    }

    /// Uniform resampling of `g` on `[a, b]`; errors if the window exceeds the
    /// computed range.
    pub fn sample_uniform(&self, a: f64, b: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if a < self.z_min() || b > self.z_max() {
            return Err(Error::OutOfWindow(format!("[{a}, {b}] not within [{}, {}]", self.z_min(), self.z_max())));
        }
        let z = linspace(a, b, n);
        let g = z.iter().map(|&s| self.value(s).expect("inside range")).collect();
        Ok((z, g))
    }
}

/// One-sided orbit of the profile ODE in integration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub z: Vec<f64>,
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
    pub d2g: Vec<f64>,
    pub termination: Termination,
}

impl Orbit {
    pub fn last_z(&self) -> f64 {
        *self.z.last().expect("orbit has the seed node")
    }

    pub fn completed(&self) -> bool {
        self.termination == Termination::ReachedEnd
    }
}

/// Right-hand side of the regularized profile ODE for the state `(g, g', g'')`.
pub fn rhs_regularized(state: [f64; 3], z: f64, alpha: f64, nu: f64, branch: Branch) -> [f64; 3] {
    let [g, g1, g2] = state;
    let linear = branch.sign() * ((1.0 + alpha) / 3.0 * g1 * z - alpha * g);
    let sgn = if g > 0.0 {
        1.0
    } else if g < 0.0 {
        -1.0
    } else {
        0.0
    };
    let g3 = sgn / (nu * nu + g * g).sqrt() * (linear - 3.0 * g1 * g2);
    [g1, g2, g3]
}

/// Three-term odd expansion of the α = 0 blow-up profile about the origin,
/// `C z + z³/72 + z⁵/(51840 C)`.
pub fn origin_series(c: f64, z: f64) -> Result<f64> {
    if c == 0.0 {
        return Err(Error::Domain("origin slope C must be nonzero".into()));
    }
    Ok(c * z + z.powi(3) / 72.0 + z.powi(5) / (51840.0 * c))
}

/// Coefficients `a_1, a_3, ..., a_{2k-1}` of the odd power-series solution
/// through the origin with `g'(0) = slope`.
pub fn odd_series_coefficients(alpha: f64, slope: f64, branch: Branch, terms: usize) -> Vec<f64> {
    // a[n] is the coefficient of z^n; even ones vanish.
    let top = 2 * terms;
    let mut a = vec![0.0; top + 2];
    a[1] = slope;
    let s = branch.sign();
    let mut n = 1;
    while n + 2 < top {
        // Coefficient of z^n in (1/2)(g^2)''' equals that of the linear side.
        let lin = s * a[n] * (n as f64 * (1.0 + alpha) - 3.0 * alpha) / 3.0;
        let lhs_factor = 0.5 * ((n + 1) * (n + 2) * (n + 3)) as f64;
        let mut cross = 0.0;
        for i in 2..=n + 1 {
            cross += a[i] * a[n + 3 - i];
        }
        a[n + 2] = (lin / lhs_factor - cross) / (2.0 * slope);
        n += 2;
    }
    (0..terms).map(|k| a[2 * k + 1]).collect()
}

fn odd_series_jet(coeffs: &[f64], z: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, &c) in coeffs.iter().enumerate() {
        let p = (2 * k + 1) as i32;
        let pf = p as f64;
        out[0] += c * z.powi(p);
        out[1] += c * pf * z.powi(p - 1);
        if p >= 2 {
            out[2] += c * pf * (pf - 1.0) * z.powi(p - 2);
        }
    }
    out
}

/// Integrates the profile ODE from a seed state to `z_end`.
pub fn integrate_orbit(
    params: SimilarityParams,
    seed_z: f64,
    seed: [f64; 3],
    z_end: f64,
    settings: &OdeSettings,
) -> Result<Orbit> {
    let (alpha, branch, nu) = (params.alpha, params.branch, settings.nu);
    let traj = integrate(
        |z, y, d| {
            let r = rhs_regularized([y[0], y[1], y[2]], z, alpha, nu, branch);
            d.copy_from_slice(&r);
        },
        &seed,
        (seed_z, z_end),
        settings,
        &[],
    )?;
    let mut orbit = Orbit {
        z: traj.times.clone(),
        g: traj.component(0),
        dg: traj.component(1),
        d2g: traj.component(2),
        termination: traj.termination,
    };
    // Drop a final node that overflowed; the rest is still a valid orbit.
    if orbit.termination == Termination::BlowupDetected && orbit.z.len() > 1 {
        let last = orbit.z.len() - 1;
        if !(orbit.g[last].is_finite() && orbit.dg[last].is_finite() && orbit.d2g[last].is_finite()) {
            orbit.z.pop();
            orbit.g.pop();
            orbit.dg.pop();
            orbit.d2g.pop();
        }
    }
    Ok(orbit)
}

/// Odd orbit leaving the origin with `g(0) = g''(0) = 0`, `g'(0) = slope`,
/// integrated towards `z_end` (either sign).
pub fn shoot_from_origin(params: SimilarityParams, slope: f64, z_end: f64, settings: &OdeSettings) -> Result<Orbit> {
    if slope == 0.0 {
        return Err(Error::Domain("origin slope must be nonzero".into()));
    }
    let coeffs = odd_series_coefficients(params.alpha, slope, params.branch, 4);
    let z_seed = SEED_OFFSET.copysign(z_end);
    let seed = odd_series_jet(&coeffs, z_seed);
    let mut orbit = integrate_orbit(params, z_seed, seed, z_end, settings)?;
    orbit.z.insert(0, 0.0);
    orbit.g.insert(0, 0.0);
    orbit.dg.insert(0, slope);
    orbit.d2g.insert(0, 0.0);
    Ok(orbit)
}

/// Joins a left orbit (integrated towards −∞) and a right orbit (towards +∞)
/// that share their first node into ascending arrays.
fn join_orbits(left: &Orbit, right: &Orbit) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut z: Vec<f64> = left.z.iter().rev().copied().collect();
    let mut g: Vec<f64> = left.g.iter().rev().copied().collect();
    let mut dg: Vec<f64> = left.dg.iter().rev().copied().collect();
    let mut d2g: Vec<f64> = left.d2g.iter().rev().copied().collect();
    let skip = usize::from(right.z.first() == left.z.first());
    z.extend(&right.z[skip..]);
    g.extend(&right.g[skip..]);
    dg.extend(&right.dg[skip..]);
    d2g.extend(&right.d2g[skip..]);
    (z, g, dg, d2g)
}

/// Odd blow-up profile on `[-depth, depth]` with `g'(0) = slope`, without
/// normalizing the far field. Shots at α slightly above −1/10 approximate the
/// saw on compacts.
pub fn origin_shot_profile(alpha: f64, slope: f64, depth: f64, settings: &OdeSettings) -> Result<Profile> {
    if alpha < ALPHA_CRITICAL {
        return Err(Error::CompleteBlowup { alpha });
    }
    if !(depth > 0.0) {
        return Err(Error::InvalidInput("depth must be positive".into()));
    }
    odd_profile(SimilarityParams::blowup(alpha), slope, depth, settings)
}

/// Odd blow-up profile on `[-depth, depth]` with `g'(0) = slope`.
fn odd_profile(params: SimilarityParams, slope: f64, depth: f64, settings: &OdeSettings) -> Result<Profile> {
    let left = shoot_from_origin(params, slope, -depth, settings)?;
    if !left.completed() {
        return Err(classify_failed_orbit(params.alpha, &left));
    }
    let right = shoot_from_origin(params, slope, depth, settings)?;
    if !right.completed() {
        return Err(classify_failed_orbit(params.alpha, &right));
    }
    let (z, g, dg, d2g) = join_orbits(&left, &right);
    Ok(Profile {
        z,
        g,
        dg,
        d2g,
        params,
        origin_slope: slope,
        far_limit: None,
        far_limit_plus: None,
        interface_z0: None,
        classification: if params.alpha == 0.0 {
            Classification::BoundedOscillatory
        } else {
            Classification::PowerLawTail
        },
    })
}

fn classify_failed_orbit(alpha: f64, orbit: &Orbit) -> Error {
    match orbit.termination {
        Termination::StepUnderflow | Termination::BlowupDetected if alpha < ALPHA_CRITICAL => {
            Error::CompleteBlowup { alpha }
        }
        Termination::BlowupDetected => Error::BlowupDetected { t: orbit.last_z() },
        Termination::StepUnderflow => {
            Error::ShootingFailed(format!("orbit stalled at z = {} (step underflow)", orbit.last_z()))
        }
        _ => Error::ShootingFailed("orbit terminated early".into()),
    }
}

/// Far-field coefficient of a shot with the given origin slope.
fn far_coefficient_of_shot(params: SimilarityParams, slope: f64, depth: f64, settings: &OdeSettings) -> Result<f64> {
    let orbit = shoot_from_origin(params, slope, -depth, settings)?;
    if !orbit.completed() {
        return Err(classify_failed_orbit(params.alpha, &orbit));
    }
    tail_coefficient(&orbit.z, &orbit.g, &orbit.dg, &orbit.d2g, params.far_exponent())
}

/// Shoots the odd blow-up profile whose far-field coefficient as `z → −∞`
/// equals `target_limit`.
///
/// A single orbit with `g'(0) = −1` is integrated, its far-field
/// coefficient `ℓ` measured, and the profile is mapped onto the target by the
/// scaling `g ↦ a³ g(z/a)` with `a = (target/ℓ)^{1/(3−p)}`. Bisection over
/// the slope is used only when `ℓ` cannot be measured.
pub fn shoot_profile(alpha: f64, target_limit: f64, settings: &OdeSettings) -> Result<Profile> {
    if alpha < ALPHA_CRITICAL {
        return Err(Error::CompleteBlowup { alpha });
    }
    if alpha <= ALPHA_CRITICAL {
        return Err(Error::InvalidInput(
            "the critical exponent has no bounded shot profile; use exact::build_saw".into(),
        ));
    }
    if !(target_limit > 0.0 && target_limit.is_finite()) {
        return Err(Error::InvalidInput("target_limit must be positive".into()));
    }
    let params = SimilarityParams::blowup(alpha);
    let p = params.far_exponent();
    let scale_for = |ell: f64| (target_limit / ell).powf(1.0 / (3.0 - p));

    let profile = match far_coefficient_of_shot(params, -1.0, FAR_FIELD, settings) {
        Ok(ell) if ell > 0.0 => {
            let a = scale_for(ell);
            let depth = if a < 1.0 { FAR_FIELD / a * (1.0 + 1e-6) } else { FAR_FIELD };
            rescale_profile(&odd_profile(params, -1.0, depth, settings)?, a)?
        }
        Ok(_) | Err(Error::InsufficientTail(_)) => {
            let slope = bisect_slope(params, target_limit, settings)?;
            odd_profile(params, slope, FAR_FIELD, settings)?
        }
        Err(e) => return Err(e),
    };
    let mut profile = profile;
    let limit = estimate_far_field_limit(&profile)?;
    profile.far_limit = Some(limit);
    profile.far_limit_plus = Some(-limit);
    Ok(profile)
}

fn bisect_slope(params: SimilarityParams, target: f64, settings: &OdeSettings) -> Result<f64> {
    let mismatch = |s: f64| -> f64 {
        match far_coefficient_of_shot(params, -s.exp(), FAR_FIELD, settings) {
            Ok(ell) if ell > 0.0 => (ell / target).ln(),
            _ => f64::NAN,
        }
    };
    let s = find_root(mismatch, (-6.0, 6.0), 1e-10)
        .map_err(|e| Error::ShootingFailed(format!("no slope bracket for target {target}: {e}")))?;
    Ok(-s.exp())
}

/// Maps a profile through the scaling symmetry `g_a(z) = a³ g(z/a)`.
pub fn rescale_profile(p: &Profile, a: f64) -> Result<Profile> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidInput("scale factor must be finite and nonzero".into()));
    }
    let n = p.z.len();
    let order: Vec<usize> = if a > 0.0 { (0..n).collect() } else { (0..n).rev().collect() };
    let a2 = a * a;
    let a3 = a2 * a;
    let z = order.iter().map(|&i| a * p.z[i]).collect();
    let g = order.iter().map(|&i| a3 * p.g[i]).collect();
    let dg = order.iter().map(|&i| a2 * p.dg[i]).collect();
    let d2g = order.iter().map(|&i| a * p.d2g[i]).collect();
    // far-field coefficient of a³ g(z/a) picks up a^{3−p}
    let k = a.abs().powf(3.0 - p.params.far_exponent()) * a.signum();
    let (far_limit, far_limit_plus) = if a > 0.0 {
        (p.far_limit.map(|v| k * v), p.far_limit_plus.map(|v| k * v))
    } else {
        (p.far_limit_plus.map(|v| k * v), p.far_limit.map(|v| k * v))
    };
    Ok(Profile {
        z,
        g,
        dg,
        d2g,
        params: p.params,
        origin_slope: a2 * p.origin_slope,
        far_limit,
        far_limit_plus,
        interface_z0: p.interface_z0.map(|z0| a * z0),
        classification: p.classification,
    })
}

/// Mean of `h = g/|z|^p` over the last few oscillation periods of the far
/// tail at the start of the arrays (`z[0]` is the far end).
fn tail_coefficient(z: &[f64], g: &[f64], dg: &[f64], d2g: &[f64], p: f64) -> Result<f64> {
    let n = z.len();
    if n < 8 {
        return Err(Error::InsufficientTail("too few samples".into()));
    }
    // Orient so that index 0 is the far end.
    let (zf, ze) = (z[0], z[n - 1]);
    let far_first = zf.abs() > ze.abs();
    let pick = |i: usize| if far_first { i } else { n - 1 - i };
    let far = z[pick(0)];
    let near_limit = 0.5 * far.abs();
    // dense uniform resample of the outer half, from the far end inward
    let step = 0.005;
    let m = ((far.abs() - near_limit) / step).floor() as usize;
    if m < 16 {
        return Err(Error::InsufficientTail("tail window too short".into()));
    }
    let dir = -far.signum();
    // Build an ascending view for interpolation.
    let mut idx: Vec<usize> = (0..n).collect();
    if z[0] > z[n - 1] {
        idx.reverse();
    }
    let zs: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
    let eval = |s: f64| -> f64 {
        let k = zs.partition_point(|&v| v <= s).clamp(1, n - 1) - 1;
        let (i0, i1) = (idx[k], idx[k + 1]);
        quintic_hermite(z[i0], [g[i0], dg[i0], d2g[i0]], z[i1], [g[i1], dg[i1], d2g[i1]], s)[0]
    };
    let xs: Vec<f64> = (0..=m).map(|k| far + dir * step * k as f64).collect();
    let hs: Vec<f64> = xs.iter().map(|&s| eval(s) / s.abs().powf(p)).collect();

    // local maxima, refined by a parabola through three samples
    let mut maxima: Vec<f64> = Vec::new();
    for k in 1..m {
        if hs[k] > hs[k - 1] && hs[k] >= hs[k + 1] {
            let denom = hs[k - 1] - 2.0 * hs[k] + hs[k + 1];
            let off = if denom != 0.0 { 0.5 * (hs[k - 1] - hs[k + 1]) / denom } else { 0.0 };
            maxima.push(k as f64 + off.clamp(-0.5, 0.5));
        }
    }
    if maxima.len() < 4 {
        return Err(Error::InsufficientTail(format!("{} oscillation maxima resolved, need at least 4", maxima.len())));
    }
    let periods = (maxima.len() - 1).min(TAIL_PERIODS);
    let (k0, k1) = (maxima[0], maxima[periods]);
    // trapezoid over [k0, k1] in sample-index units
    let interp = |x: f64| -> f64 {
        let i = (x.floor() as usize).min(m - 1);
        let f = x - i as f64;
        hs[i] * (1.0 - f) + hs[i + 1] * f
    };
    let i0 = k0.ceil() as usize;
    let i1 = k1.floor() as usize;
    let mut area = 0.5 * (i0 as f64 - k0) * (interp(k0) + hs[i0]);
    for i in i0..i1 {
        area += 0.5 * (hs[i] + hs[i + 1]);
    }
    area += 0.5 * (k1 - i1 as f64) * (hs[i1] + interp(k1));
    Ok(area / (k1 - k0))
}

/// Far-field coefficient as `z → −∞`, averaged over the last oscillation
/// periods of the tail (the limit itself for α = 0).
pub fn estimate_far_field_limit(p: &Profile) -> Result<f64> {
    if p.is_empty() || p.z_min() > -30.0 {
        return Err(Error::InsufficientTail("grid must reach z <= -30".into()));
    }
    let pow = p.params.far_exponent();
    // constant profiles have nothing to average
    let tail: Vec<usize> = (0..p.len()).filter(|&i| p.z[i] <= 0.5 * p.z_min()).collect();
    let h = |i: usize| p.g[i] / p.z[i].abs().powf(pow);
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &i| (a.min(h(i)), b.max(h(i))));
    if hi - lo <= 1e-14 * hi.abs().max(1.0) {
        return Ok(0.5 * (lo + hi));
    }
    let end = p.z.partition_point(|&s| s <= 0.0).max(8).min(p.len());
    tail_coefficient(&p.z[..end], &p.g[..end], &p.dg[..end], &p.d2g[..end], pow)
}

/// Far-field coefficient as `z → +∞`.
pub fn estimate_far_field_limit_plus(p: &Profile) -> Result<f64> {
    let mirrored = rescale_profile(p, -1.0)?;
    estimate_far_field_limit(&mirrored).map(|v| -v)
}

/// Leading coefficient `A` of the quadratic contact `g ≈ A (z − z0)²` at a
/// finite interface.
pub fn interface_coefficient(alpha: f64, z0: f64) -> f64 {
    (1.0 + alpha) * z0 / 18.0
}

/// Cubic coefficient of the interface expansion `A h² + B h³`, `h = z − z0`.
pub fn interface_cubic_coefficient(alpha: f64) -> f64 {
    (2.0 - alpha) / 126.0
}

/// Profile with a finite interface at `z0 > 0`: `g ≈ A (z − z0)²` as
/// `z → z0⁻` and `g ≡ 0` beyond.
pub fn interface_profile(alpha: f64, z0: f64, settings: &OdeSettings) -> Result<Profile> {
    interface_profile_to(alpha, z0, -FAR_FIELD, settings)
}

fn interface_profile_to(alpha: f64, z0: f64, z_end: f64, settings: &OdeSettings) -> Result<Profile> {
    if !(z0 > 0.0) {
        return Err(Error::InvalidInput("interface position must be positive".into()));
    }
    let params = SimilarityParams::blowup(alpha);
    let a = interface_coefficient(alpha, z0);
    let b = interface_cubic_coefficient(alpha);
    let h = -SEED_OFFSET;
    let seed = [a * h * h + b * h * h * h, 2.0 * a * h + 3.0 * b * h * h, 2.0 * a + 6.0 * b * h];
    let orbit = integrate_orbit(params, z0 + h, seed, z_end, settings)?;
    if !orbit.completed() {
        return Err(Error::BlowupDetected { t: orbit.last_z() });
    }
    let mut z: Vec<f64> = orbit.z.iter().rev().copied().collect();
    let mut g: Vec<f64> = orbit.g.iter().rev().copied().collect();
    let mut dg: Vec<f64> = orbit.dg.iter().rev().copied().collect();
    let mut d2g: Vec<f64> = orbit.d2g.iter().rev().copied().collect();
    z.push(z0);
    g.push(0.0);
    dg.push(0.0);
    d2g.push(2.0 * a);
    let right_end = z0 + FAR_FIELD.max(z_end.abs());
    for s in linspace(z0, right_end, 201).into_iter().skip(1) {
        z.push(s);
        g.push(0.0);
        dg.push(0.0);
        d2g.push(0.0);
    }
    let mut profile = Profile {
        z,
        g,
        dg,
        d2g,
        params,
        origin_slope: 0.0,
        far_limit: None,
        far_limit_plus: Some(0.0),
        interface_z0: Some(z0),
        classification: Classification::FiniteInterface,
    };
    if let Some([_, slope, _]) = profile.jet(0.0) {
        profile.origin_slope = slope;
    }
    profile.far_limit = estimate_far_field_limit(&profile).ok();
    Ok(profile)
}

/// The α = 0 interface profile with unit far-field limit, which forms the
/// reflected Heaviside step in the blow-up limit.
#[derive(Debug, Clone, PartialEq)]
pub struct HeavisideSolution {
    pub z0: f64,
    pub h0: f64,
    pub profile: Profile,
}

pub fn solve_heaviside(settings: &OdeSettings) -> Result<HeavisideSolution> {
    let unit = interface_profile(0.0, 1.0, settings)?;
    let ell = unit.far_limit.ok_or_else(|| Error::ShootingFailed("far-field limit of the interface orbit".into()))?;
    let a = ell.powf(-1.0 / 3.0);
    let mut profile = rescale_profile(&unit, a)?;
    profile.far_limit = Some(estimate_far_field_limit(&profile)?);
    let h0 = profile.value(0.0).expect("origin inside profile");
    Ok(HeavisideSolution { z0: a, h0, profile })
}

/// Profiles passing regularly through a singular zero `g(z0) = 0` with
/// `g'(z0) = C < 0` (α = 0).
///
/// Large far-field amplitudes stretch the oscillation period, so the window
/// is widened until both far-field coefficients can be measured.
pub fn singular_point_family(z0: f64, c: f64, settings: &OdeSettings) -> Result<Profile> {
    let mut depth = FAR_FIELD;
    loop {
        let p = singular_point_family_window(z0, c, (-depth, depth), settings)?;
        if (p.far_limit.is_some() && p.far_limit_plus.is_some()) || depth >= 16.0 * FAR_FIELD {
            return Ok(p);
        }
        depth *= 2.0;
    }
}

/// As [`singular_point_family`] on an explicit window `(z_lo, z_hi)`.
pub fn singular_point_family_window(z0: f64, c: f64, window: (f64, f64), settings: &OdeSettings) -> Result<Profile> {
    if !(z0 > 0.0) {
        return Err(Error::InvalidInput("singular point must be positive".into()));
    }
    if !(c < 0.0) {
        return Err(Error::InvalidInput("slope C must be negative".into()));
    }
    let (z_lo, z_hi) = window;
    if !(z_lo < z0 && z_hi > z0) {
        return Err(Error::InvalidInput("window must contain z0".into()));
    }
    let params = SimilarityParams::blowup(0.0);
    let seed =
        |h: f64| [c * h + z0 / 18.0 * h * h + h * h * h / 72.0, c + z0 / 9.0 * h + h * h / 24.0, z0 / 9.0 + h / 12.0];
    let left = integrate_orbit(params, z0 - SEED_OFFSET, seed(-SEED_OFFSET), z_lo, settings)?;
    if !left.completed() {
        return Err(Error::BlowupDetected { t: left.last_z() });
    }
    let right = integrate_orbit(params, z0 + SEED_OFFSET, seed(SEED_OFFSET), z_hi, settings)?;
    if !right.completed() {
        return Err(Error::BlowupDetected { t: right.last_z() });
    }
    let mut z: Vec<f64> = left.z.iter().rev().copied().collect();
    let mut g: Vec<f64> = left.g.iter().rev().copied().collect();
    let mut dg: Vec<f64> = left.dg.iter().rev().copied().collect();
    let mut d2g: Vec<f64> = left.d2g.iter().rev().copied().collect();
    z.push(z0);
    g.push(0.0);
    dg.push(c);
    d2g.push(z0 / 9.0);
    z.extend(&right.z);
    g.extend(&right.g);
    dg.extend(&right.dg);
    d2g.extend(&right.d2g);
    let mut profile = Profile {
        z,
        g,
        dg,
        d2g,
        params,
        origin_slope: 0.0,
        far_limit: None,
        far_limit_plus: None,
        interface_z0: None,
        classification: Classification::BoundedOscillatory,
    };
    if let Some([_, slope, _]) = profile.jet(0.0) {
        profile.origin_slope = slope;
    }
    if profile.z_min() <= -30.0 {
        profile.far_limit = estimate_far_field_limit(&profile).ok();
    }
    if profile.z_max() >= 30.0 {
        profile.far_limit_plus = estimate_far_field_limit_plus(&profile).ok();
    }
    Ok(profile)
}

/// Result of fitting a local singularity model to orbit samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityFit {
    pub classification: Classification,
    /// Location of the zero for the sqrt and quadratic models.
    pub z0: Option<f64>,
    /// `C` in `C sqrt|z − z0|`, `A` in `A (z − z0)²`, or `g/z³` for cubic growth.
    pub coefficient: f64,
    pub relative_residual: f64,
}

const FIT_TOLERANCE: f64 = 1e-2;

/// Classifies the local behaviour of orbit samples near a degenerate end:
/// cubic growth `g ≈ z³/60`, a square-root zero `g ≈ C sqrt|z − z0|`, or a
/// quadratic contact `g ≈ A (z − z0)²`. The square-root model is tried
/// before the quadratic one.
pub fn detect_singularity(z: &[f64], g: &[f64]) -> Result<SingularityFit> {
    let n = z.len();
    if n < 5 || g.len() != n {
        return Err(Error::InsufficientSamples { needed: 5, got: n });
    }
    // cubic growth: g/z³ settles at 1/60 at large |z|
    let far = (0..n).max_by(|&i, &j| z[i].abs().total_cmp(&z[j].abs())).expect("non-empty");
    if z[far].abs() >= 10.0 {
        let ratio = g[far] / z[far].powi(3);
        if (ratio * 60.0 - 1.0).abs() < 0.05 {
            return Ok(SingularityFit {
                classification: Classification::CubicGrowth,
                z0: None,
                coefficient: ratio,
                relative_residual: (ratio * 60.0 - 1.0).abs(),
            });
        }
    }
    // sqrt model: g² is linear in z
    let g2: Vec<f64> = g.iter().map(|v| v * v).collect();
    let scale2 = g2.iter().fold(0.0f64, |m, v| m.max(*v));
    if let Ok((slope, icpt, rms)) = linear_fit(z, &g2) {
        if scale2 > 0.0 && slope != 0.0 && rms / scale2 < FIT_TOLERANCE {
            let z0 = -icpt / slope;
            let sign = g.iter().map(|v| v.signum()).sum::<f64>().signum();
            return Ok(SingularityFit {
                classification: Classification::SqrtSingularity,
                z0: Some(z0),
                coefficient: sign * slope.abs().sqrt(),
                relative_residual: rms / scale2,
            });
        }
    }
    // quadratic contact: sqrt|g| is linear in z
    let r: Vec<f64> = g.iter().map(|v| v.abs().sqrt()).collect();
    let scale = r.iter().fold(0.0f64, |m, v| m.max(*v));
    if let Ok((slope, icpt, rms)) = linear_fit(z, &r) {
        if scale > 0.0 && slope != 0.0 && rms / scale < FIT_TOLERANCE {
            let z0 = -icpt / slope;
            let sign = g.iter().map(|v| v.signum()).sum::<f64>().signum();
            return Ok(SingularityFit {
                classification: Classification::FiniteInterface,
                z0: Some(z0),
                coefficient: sign * slope * slope,
                relative_residual: rms / scale,
            });
        }
    }
    Err(Error::Unclassified)
}

/// Samples of an orbit close to its last node where `|g|` has dropped below
/// `fraction` of its running maximum; used to classify terminal zeros.
pub fn terminal_samples(orbit: &Orbit, fraction: f64) -> (Vec<f64>, Vec<f64>) {
    let gmax = orbit.g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = fraction * gmax;
    let mut start = orbit.z.len();
    while start > 0 && orbit.g[start - 1].abs() <= cut {
        start -= 1;
    }
    (orbit.z[start..].to_vec(), orbit.g[start..].to_vec())
}

/// `g(−z)` on the rarefaction branch.
pub fn reflect_to_rarefaction(p: &Profile) -> Profile {
    let n = p.len();
    let rev = |v: &[f64], s: f64| (0..n).rev().map(|i| s * v[i]).collect::<Vec<_>>();
    Profile {
        z: rev(&p.z, -1.0),
        g: rev(&p.g, 1.0),
        dg: rev(&p.dg, -1.0),
        d2g: rev(&p.d2g, 1.0),
        params: SimilarityParams { branch: p.params.branch.flipped(), ..p.params },
        origin_slope: -p.origin_slope,
        far_limit: p.far_limit_plus,
        far_limit_plus: p.far_limit,
        interface_z0: p.interface_z0.map(|z0| -z0),
        classification: p.classification,
    }
}

/// Limit `u(x, 0⁻) = C∓ |x|^{3α/(1+α)}` of a blow-up similarity solution.
pub fn final_time_profile(alpha: f64, c_minus: f64, c_plus: f64, x: f64) -> Result<f64> {
    if !(alpha > ALPHA_CRITICAL) {
        return Err(Error::InvalidInput("alpha must exceed -1/10".into()));
    }
    let p = 3.0 * alpha / (1.0 + alpha);
    if x == 0.0 {
        return if p < 0.0 {
            Err(Error::SingularAtOrigin)
        } else if p == 0.0 {
            Ok(0.5 * (c_minus + c_plus))
        } else {
            Ok(0.0)
        };
    }
    let c = if x < 0.0 { c_minus } else { c_plus };
    Ok(c * x.abs().powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> OdeSettings {
        OdeSettings::default()
    }

    #[test]
    fn rhs_examples() {
        let r = rhs_regularized([1.0, 0.0, 0.0], -5.0, 0.0, 1e-12, Branch::Blowup);
        assert_eq!(r, [0.0, 0.0, 0.0]);
        let r = rhs_regularized([1.0, 0.1, 0.0], -9.0, 0.0, 1e-12, Branch::Blowup);
        assert!((r[2] + 0.3).abs() < 1e-10);
        // rarefaction flips the linear part
        let r = rhs_regularized([1.0, 0.1, 0.0], -9.0, 0.0, 1e-12, Branch::Rarefaction);
        assert!((r[2] - 0.3).abs() < 1e-10);
    }

    #[test]
    fn exact_cubic_satisfies_critical_ode() {
        // g = -z + z³/60 solves the α = -1/10 equation; g''' = 1/10
        let z: f64 = -1.0;
        let state = [-z + z.powi(3) / 60.0, -1.0 + z * z / 20.0, z / 10.0];
        let r = rhs_regularized(state, z, -0.1, 1e-12, Branch::Blowup);
        assert!((r[2] - 0.1).abs() < 1e-12, "{}", r[2]);
    }

    #[test]
    fn origin_series_values() {
        assert_eq!(origin_series(-0.51, 0.0).unwrap(), 0.0);
        let v = origin_series(-1.0, 0.1).unwrap();
        let by_hand = -0.1 + 1e-3 / 72.0 - 1e-5 / 51840.0;
        assert!((v - by_hand).abs() < 1e-16);
        assert!((v - (-0.09998612)).abs() < 1e-8);
        assert!(origin_series(0.0, 0.1).is_err());
    }

    #[test]
    fn series_recursion_matches_closed_terms() {
        let c = -0.7;
        let a = odd_series_coefficients(0.0, c, Branch::Blowup, 3);
        assert!((a[0] - c).abs() < 1e-15);
        assert!((a[1] - 1.0 / 72.0).abs() < 1e-15);
        assert!((a[2] - 1.0 / (51840.0 * c)).abs() < 1e-15);
        // general α: cubic coefficient (1 − 2α)/72
        let a = odd_series_coefficients(-0.1, -1.0, Branch::Blowup, 3);
        assert!((a[1] - 1.0 / 60.0).abs() < 1e-15);
        // at α = −1/10 the cubic solution truncates
        assert!(a[2].abs() < 1e-15);
    }

    #[test]
    fn series_residual_is_high_order() {
        // Residual of the truncated series decays like z^(2k+1) with k terms.
        let c = -1.0;
        let coeffs = odd_series_coefficients(0.0, c, Branch::Blowup, 5);
        let res = |z: f64| {
            let h = 1e-3 * z.abs();
            let f = |s: f64| {
                let j = odd_series_jet(&coeffs, s);
                j[0] * j[1]
            };
            let d2 = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
            let j = odd_series_jet(&coeffs, z);
            d2 - j[1] * z / 3.0
        };
        assert!(res(0.05).abs() < 1e-9, "{}", res(0.05));
    }

    #[test]
    fn s_minus_origin_slope() {
        let p = shoot_profile(0.0, 1.0, &settings()).unwrap();
        assert!((p.origin_slope + 0.51).abs() < 0.02, "{}", p.origin_slope);
        assert!(p.z_min() <= -50.0 && p.z_max() >= 50.0);
        assert_eq!(p.classification, Classification::BoundedOscillatory);
        assert!((p.far_limit.unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn s_minus_is_positive_left_and_odd() {
        let p = shoot_profile(0.0, 1.0, &settings()).unwrap();
        for (z, g) in p.z.iter().zip(&p.g) {
            if *z < 0.0 {
                assert!(*g > 0.0, "g({z}) = {g}");
            }
        }
        for k in 1..=400 {
            let z = 0.1 * k as f64;
            let s = p.value(-z).unwrap() + p.value(z).unwrap();
            assert!(s.abs() < 1e-9, "z={z}: {s}");
        }
    }

    #[test]
    fn target_limit_eight_is_rescale_by_two() {
        let p1 = shoot_profile(0.0, 1.0, &settings()).unwrap();
        let p8 = shoot_profile(0.0, 8.0, &settings()).unwrap();
        assert!((p8.origin_slope / p1.origin_slope - 4.0).abs() < 1e-9);
        let scaled = rescale_profile(&p1, 2.0).unwrap();
        for k in 0..100 {
            let z = -40.0 + 0.8 * k as f64;
            let d = scaled.value(z).unwrap() - p8.value(z).unwrap();
            assert!(d.abs() < 1e-7, "z={z}: {d}");
        }
    }

    #[test]
    fn negative_alpha_shot() {
        let p = shoot_profile(-0.05, 1.0, &settings()).unwrap();
        assert_eq!(p.classification, Classification::PowerLawTail);
        for (z, g) in p.z.iter().zip(&p.g) {
            if *z < 0.0 {
                assert!(*g > 0.0);
            }
        }
        assert!((p.far_limit.unwrap() - 1.0).abs() < 1e-3);
        // independent shot with the recorded slope reproduces the coefficient
        let q = odd_profile(SimilarityParams::blowup(-0.05), p.origin_slope, FAR_FIELD, &settings()).unwrap();
        let ell = estimate_far_field_limit(&q).unwrap();
        assert!((ell - 1.0).abs() < 2e-3, "{ell}");
    }

    #[test]
    fn shoot_rejects_supercritical_negative_alpha() {
        assert!(matches!(shoot_profile(-0.2, 1.0, &settings()), Err(Error::CompleteBlowup { .. })));
        assert!(shoot_profile(0.0, -1.0, &settings()).is_err());
    }

    #[test]
    fn rescale_identity_and_reflection() {
        let p = shoot_profile(0.0, 1.0, &settings()).unwrap();
        assert_eq!(rescale_profile(&p, 1.0).unwrap(), p);
        let m = rescale_profile(&p, -1.0).unwrap();
        // a = -1 maps g to -g(-z) which is g for an odd profile
        for k in 0..50 {
            let z = -45.0 + 1.8 * k as f64;
            assert!((m.value(z).unwrap() - p.value(z).unwrap()).abs() < 1e-9);
        }
        assert!((m.far_limit.unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rescale_to_unit_limit() {
        let base = odd_profile(SimilarityParams::blowup(0.0), -1.0, 80.0, &settings()).unwrap();
        let ell = estimate_far_field_limit(&base).unwrap();
        let unit = rescale_profile(&base, ell.powf(-1.0 / 3.0)).unwrap();
        let est = estimate_far_field_limit(&unit).unwrap();
        assert!((est - 1.0).abs() < 1e-3, "{est}");
    }

    #[test]
    fn far_field_constant_and_rescaled() {
        let z = linspace(-60.0, 0.0, 200);
        let p = Profile {
            g: vec![1.0; z.len()],
            dg: vec![0.0; z.len()],
            d2g: vec![0.0; z.len()],
            z,
            params: SimilarityParams::blowup(0.0),
            origin_slope: 0.0,
            far_limit: None,
            far_limit_plus: None,
            interface_z0: None,
            classification: Classification::BoundedOscillatory,
        };
        assert_eq!(estimate_far_field_limit(&p).unwrap(), 1.0);
        let s = shoot_profile(0.0, 1.0, &settings()).unwrap();
        let r = rescale_profile(&s, 2.0).unwrap();
        assert!((estimate_far_field_limit(&r).unwrap() - 8.0).abs() < 8e-3);
    }

    #[test]
    fn far_field_needs_tail() {
        let s = shoot_profile(0.0, 1.0, &settings()).unwrap();
        let short = rescale_profile(&s, 0.5).unwrap(); // reaches only z = -25
        assert!(matches!(estimate_far_field_limit(&short), Err(Error::InsufficientTail(_))));
    }

    #[test]
    fn nu_robustness() {
        let a = shoot_profile(0.0, 1.0, &settings()).unwrap();
        let b = shoot_profile(0.0, 1.0, &settings().with_nu(0.5e-12)).unwrap();
        assert!((a.origin_slope - b.origin_slope).abs() < 1e-6);
    }

    #[test]
    fn interface_seed_coefficient() {
        assert_eq!(interface_coefficient(0.0, 1.8), 0.1);
        // leading-order residual of A (z − z0)² vanishes at every α
        for alpha in [-0.05, 0.0, 0.3, 1.0] {
            let z0 = 2.0;
            let a = interface_coefficient(alpha, z0);
            let res = |h: f64| {
                let z = z0 + h;
                let (g, g1, g2, g3) = (a * h * h, 2.0 * a * h, 2.0 * a, 0.0);
                g * g3 + 3.0 * g1 * g2 - ((1.0 + alpha) / 3.0 * g1 * z - alpha * g)
            };
            let r1 = res(-1e-3) / 1e-3;
            let r2 = res(-1e-4) / 1e-4;
            assert!(r2.abs() < r1.abs() * 0.2, "alpha {alpha}: {r1} {r2}");
        }
    }

    #[test]
    fn heaviside_parameters() {
        let h = solve_heaviside(&settings()).unwrap();
        assert!((h.z0 - 2.192).abs() < 0.01, "{}", h.z0);
        assert!((h.h0 - 0.4197).abs() < 0.005, "{}", h.h0);
        assert!((h.profile.far_limit.unwrap() - 1.0).abs() < 5e-3);
        assert_eq!(h.profile.value(h.z0 + 1.0), Some(0.0));
    }

    #[test]
    fn heaviside_two_paths_agree() {
        let h = solve_heaviside(&settings()).unwrap();
        let direct = interface_profile(0.0, h.z0, &settings()).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..=800 {
            let z = -45.0 + (h.z0 + 45.0) * k as f64 / 800.0;
            worst = worst.max((direct.value(z).unwrap() - h.profile.value(z).unwrap()).abs());
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn interface_flux_is_continuous() {
        let p = interface_profile(0.0, 2.0, &settings()).unwrap();
        // (g g')' = g'² + g g'' → 0 from the left
        let [g, g1, g2] = p.jet(2.0 - 1e-3).unwrap();
        assert!((g1 * g1 + g * g2).abs() < 1e-5);
    }

    #[test]
    fn singular_family_z0_five() {
        let p = singular_point_family(5.0, -1.0, &settings()).unwrap();
        let cm = p.far_limit.unwrap();
        let cp = p.far_limit_plus.unwrap();
        assert!(cm > 0.0 && cp < 0.0);
        assert!((cm + cp).abs() > 1.0, "C- = {cm}, C+ = {cp}");
    }

    #[test]
    fn singular_family_seed_reductions() {
        // z0 → 0 recovers the origin series; C = 0 leaves the interface seed
        let c = -0.8;
        let h: f64 = 0.01;
        let seed = c * h + 0.0 / 18.0 * h * h + h.powi(3) / 72.0;
        assert!((seed - (c * h + h.powi(3) / 72.0)).abs() < 1e-18);
        assert!((origin_series(c, h).unwrap() - seed).abs() < 1e-11);
        let z0 = 3.0;
        let with_zero_c = 0.0 * h + z0 / 18.0 * h * h;
        assert_eq!(with_zero_c, interface_coefficient(0.0, z0) * h * h);
    }

    #[test]
    fn classify_synthetic_models() {
        let z: Vec<f64> = linspace(1.001, 1.2, 40);
        let g: Vec<f64> = z.iter().map(|s| 2.0 * (s - 1.0).sqrt()).collect();
        let fit = detect_singularity(&z, &g).unwrap();
        assert_eq!(fit.classification, Classification::SqrtSingularity);
        assert!((fit.coefficient - 2.0).abs() < 0.02);
        assert!((fit.z0.unwrap() - 1.0).abs() < 1e-6);

        let z: Vec<f64> = linspace(-40.0, -30.0, 40);
        let g: Vec<f64> = z.iter().map(|s| s.powi(3) / 60.0).collect();
        assert_eq!(detect_singularity(&z, &g).unwrap().classification, Classification::CubicGrowth);

        let z: Vec<f64> = linspace(1.0, 1.3, 40);
        let g: Vec<f64> = z.iter().map(|s| 0.3 * (s - 1.4).powi(2)).collect();
        let fit = detect_singularity(&z, &g).unwrap();
        assert_eq!(fit.classification, Classification::FiniteInterface);
        assert!((fit.coefficient - 0.3).abs() < 1e-6);

        let z: Vec<f64> = linspace(0.0, 6.0, 40);
        let g: Vec<f64> = z.iter().map(|s| s.sin()).collect();
        assert!(matches!(detect_singularity(&z, &g), Err(Error::Unclassified)));
    }

    #[test]
    fn supercritical_shot_hits_sqrt_zero() {
        let orbit = shoot_from_origin(SimilarityParams::blowup(-0.2), -1.0, -30.0, &settings()).unwrap();
        assert!(!orbit.completed());
        let (z, g) = terminal_samples(&orbit, 0.05);
        let fit = detect_singularity(&z, &g).unwrap();
        assert_eq!(fit.classification, Classification::SqrtSingularity);
        assert!(fit.coefficient > 0.0);
        assert!(fit.z0.unwrap() < 0.0);
    }

    #[test]
    fn reflection_involution_and_far_conditions() {
        let p = shoot_profile(0.0, 1.0, &settings()).unwrap();
        let r = reflect_to_rarefaction(&p);
        assert_eq!(r.params.branch, Branch::Rarefaction);
        assert_eq!(reflect_to_rarefaction(&r), p);
        assert!((r.far_limit.unwrap() + 1.0).abs() < 1e-3);
        assert!((r.far_limit_plus.unwrap() - 1.0).abs() < 1e-3);
        assert!((r.value(-3.0).unwrap() - p.value(3.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn final_time_exponents() {
        assert!((final_time_profile(0.5, 2.0, -2.0, -3.0).unwrap() - 6.0).abs() < 1e-12);
        assert!((final_time_profile(2.0, 1.0, -1.0, 3.0).unwrap() + 9.0).abs() < 1e-12);
        let p: f64 = 3.0 * (-0.05) / 0.95;
        assert!((p + 3.0 / 19.0).abs() < 1e-15);
        let v = final_time_profile(-0.05, 1.0, -1.0, -1e-6).unwrap();
        assert!((v - 1e-6f64.powf(p)).abs() < 1e-9 && v > 8.0);
        assert!(matches!(final_time_profile(-0.05, 1.0, -1.0, 0.0), Err(Error::SingularAtOrigin)));
        assert!(final_time_profile(-0.2, 1.0, -1.0, 1.0).is_err());
    }
}
