//! Adaptive explicit Runge–Kutta integration and bracketed root finding.
//!
//! The integrator is the Dormand–Prince 5(4) embedded pair with a PI step
//! controller. Accepted steps are stored together with the vector field at
//! each node so that the trajectory can be evaluated anywhere by cubic
//! Hermite interpolation. Scalar event functions are located on that
//! interpolant and terminate the integration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances, regularization and step bounds shared by every ODE solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Regularization of the degenerate `1/g` factor in the profile ODEs.
    pub nu: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    pub blowup_threshold: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            nu: 1e-12,
            max_step: 1.0,
            min_step: 1e-13,
            max_steps: 2_000_000,
            blowup_threshold: 1e8,
        }
    }
}

impl OdeSettings {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.rel_tol = tol;
        self.abs_tol = tol;
        self
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if self.nu < 0.0 {
            return Err(Error::InvalidInput("nu must be non-negative".into()));
        }
        if !(self.min_step > 0.0 && self.min_step < self.max_step) {
            return Err(Error::InvalidInput("step bounds must satisfy 0 < min_step < max_step".into()));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::InvalidInput("blowup_threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedEnd,
    EventHit,
    BlowupDetected,
    StepUnderflow,
}

/// Accepted integration nodes with the vector field at each node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub derivatives: Vec<Vec<f64>>,
    pub termination: Termination,
    /// Index of the event function that stopped the integration.
    pub event: Option<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial node")
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least the initial node")
    }

    /// Component `k` of every stored state.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[k]).collect()
    }

    /// Cubic Hermite dense output. `t` must lie within the integrated range.
    pub fn interpolate(&self, t: f64) -> Option<Vec<f64>> {
        let n = self.times.len();
        if n == 0 {
            return None;
        }
        let forward = n < 2 || self.times[n - 1] >= self.times[0];
        let (lo, hi) = if forward { (self.times[0], self.times[n - 1]) } else { (self.times[n - 1], self.times[0]) };
        if t < lo || t > hi {
            return None;
        }
        if n == 1 {
            return Some(self.states[0].clone());
        }
        // index of the interval containing t
        let i = if forward {
            self.times.partition_point(|&s| s <= t).clamp(1, n - 1) - 1
        } else {
            self.times.partition_point(|&s| s >= t).clamp(1, n - 1) - 1
        };
        Some(hermite(
            self.times[i],
            &self.states[i],
            &self.derivatives[i],
            self.times[i + 1],
            &self.states[i + 1],
            &self.derivatives[i + 1],
            t,
        ))
    }
}

fn hermite(t0: f64, y0: &[f64], f0: &[f64], t1: f64, y1: &[f64], f1: &[f64], t: f64) -> Vec<f64> {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    (0..y0.len()).map(|k| h00 * y0[k] + h10 * h * f0[k] + h01 * y1[k] + h11 * h * f1[k]).collect()
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_BETA: f64 = 0.04;

/// A scalar event function `e(t, y)`; a sign change terminates integration.
pub type EventFn<'a> = &'a dyn Fn(f64, &[f64]) -> f64;

/// Integrates `y' = rhs(t, y)` over `span` (either direction).
///
/// Blow-up and step underflow are reported through
/// [`Trajectory::termination`] so callers keep the partial solution.
pub fn integrate<F>(
    mut rhs: F,
    y0: &[f64],
    span: (f64, f64),
    settings: &OdeSettings,
    events: &[EventFn<'_>],
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    settings.validate()?;
    let (t_start, t_end) = span;
    if !(t_start.is_finite() && t_end.is_finite()) || t_start == t_end {
        return Err(Error::InvalidInput("integration span must be finite and nondegenerate".into()));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("initial state must be finite".into()));
    }
    let n = y0.len();
    let dir = (t_end - t_start).signum();
    let span_len = (t_end - t_start).abs();
    let event_tol = (settings.rel_tol * span_len).max(f64::EPSILON * span_len);

    let mut t = t_start;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; n];
    rhs(t, &y, &mut f);
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("vector field is not finite at the initial state".into()));
    }

    let mut traj = Trajectory {
        times: vec![t],
        states: vec![y.clone()],
        derivatives: vec![f.clone()],
        termination: Termination::ReachedEnd,
        event: None,
    };
    let mut event_vals: Vec<f64> = events.iter().map(|e| e(t, &y)).collect();

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    let mut h = initial_step(&mut rhs, t, &y, &f, dir, settings).min(span_len);
    let mut err_old: f64 = 1e-4;
    let mut steps = 0usize;
    let mut rejected_last = false;

    loop {
        if steps >= settings.max_steps {
            return Err(Error::MaxStepsExceeded(settings.max_steps));
        }
        let remaining = (t_end - t).abs();
        if remaining <= f64::EPSILON * t.abs().max(1.0) {
            break;
        }
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        if h < settings.min_step && !last {
            traj.termination = Termination::StepUnderflow;
            return Ok(traj);
        }
        let hs = dir * h;

        for i in 0..n {
            ytmp[i] = y[i] + hs * A21 * f[i];
        }
        rhs(t + C2 * hs, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A31 * f[i] + A32 * k2[i]);
        }
        rhs(t + C3 * hs, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A41 * f[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * hs, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A51 * f[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * hs, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A61 * f[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t_end } else { t + hs };
        rhs(t + hs, &ytmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i] + hs * (A71 * f[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t_new, &ynew, &mut k7);
        steps += 1;

        let mut err = 0.0;
        for i in 0..n {
            let e = hs * (E1 * f[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = settings.abs_tol + settings.rel_tol * y[i].abs().max(ynew[i].abs());
            err += (e / sc) * (e / sc);
        }
        err = (err / n as f64).sqrt();

        if !err.is_finite() {
            // non-finite stage values: retreat hard
            h *= FAC_MIN;
            rejected_last = true;
            continue;
        }

        if err <= 1.0 {
            let fac = if err == 0.0 {
                FAC_MAX
            } else {
                let expo = 0.2 - PI_BETA * 0.75;
                (SAFETY * err.powf(-expo) * err_old.powf(PI_BETA)).clamp(FAC_MIN, FAC_MAX)
            };
            err_old = err.max(1e-4);
            let t_prev = t;
            let y_prev = std::mem::replace(&mut y, ynew.clone());
            let f_prev = std::mem::replace(&mut f, k7.clone());
            t = t_new;

            // terminal events
            let mut hit: Option<(usize, f64)> = None;
            for (idx, e) in events.iter().enumerate() {
                let v_new = e(t, &y);
                let v_old = event_vals[idx];
                if v_old != 0.0 && (v_new == 0.0 || v_old.signum() != v_new.signum()) {
                    let g = |s: f64| e(s, &hermite(t_prev, &y_prev, &f_prev, t, &y, &f, s));
                    let (a, b) = if t_prev < t { (t_prev, t) } else { (t, t_prev) };
                    let te = if v_new == 0.0 { t } else { find_root(g, (a, b), event_tol).unwrap_or(t) };
                    let earlier = match hit {
                        None => true,
                        Some((_, th)) => (te - t_prev).abs() < (th - t_prev).abs(),
                    };
                    if earlier {
                        hit = Some((idx, te));
                    }
                }
                event_vals[idx] = v_new;
            }
            if let Some((idx, te)) = hit {
                let ye = hermite(t_prev, &y_prev, &f_prev, t, &y, &f, te);
                let mut fe = vec![0.0; n];
                rhs(te, &ye, &mut fe);
                if te != t_prev {
                    traj.times.push(te);
                    traj.states.push(ye);
                    traj.derivatives.push(fe);
                }
                traj.termination = Termination::EventHit;
                traj.event = Some(idx);
                return Ok(traj);
            }

            traj.times.push(t);
            traj.states.push(y.clone());
            traj.derivatives.push(f.clone());

            if y.iter().any(|v| !v.is_finite() || v.abs() > settings.blowup_threshold) {
                traj.termination = Termination::BlowupDetected;
                return Ok(traj);
            }
            if last {
                break;
            }
            let mut h_next = h * fac;
            if rejected_last {
                h_next = h_next.min(h);
            }
            h = h_next.min(settings.max_step);
            rejected_last = false;
        } else {
            let expo = 0.2 - PI_BETA * 0.75;
            h *= (SAFETY * err.powf(-expo)).max(FAC_MIN);
            rejected_last = true;
        }
    }
    traj.termination = Termination::ReachedEnd;
    Ok(traj)
}

fn initial_step<F>(rhs: &mut F, t: f64, y: &[f64], f: &[f64], dir: f64, s: &OdeSettings) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let sc: Vec<f64> = y.iter().map(|v| s.abs_tol + s.rel_tol * v.abs()).collect();
    let norm =
        |v: &[f64]| -> f64 { (v.iter().zip(&sc).map(|(a, b)| (a / b) * (a / b)).sum::<f64>() / n as f64).sqrt() };
    let d0 = norm(y);
    let d1 = norm(f);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(s.max_step);
    let y1: Vec<f64> = (0..n).map(|i| y[i] + dir * h0 * f[i]).collect();
    let mut f1 = vec![0.0; n];
    rhs(t + dir * h0, &y1, &mut f1);
    let df: Vec<f64> = (0..n).map(|i| (f1[i] - f[i]) / h0).collect();
    let d2 = norm(&df);
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1).min(s.max_step).max(s.min_step)
}

/// Brent's method on a sign-changing bracket. The returned root sits in a
/// bracket of width at most `tol`.
pub fn find_root<F>(mut f: F, bracket: (f64, f64), tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    const MAX_ITER: usize = 200;
    let (mut a, mut b) = bracket;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: bracket.0, hi: bracket.1 });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b);
    }
    Err(Error::MaxIterations(MAX_ITER))
}
