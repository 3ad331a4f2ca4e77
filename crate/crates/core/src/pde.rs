//! Method-of-lines solver for `u_t = (u u_x)_xx − ε u_xxxx` on `[−L, L]`.
//!
//! The nonlinear term is written as `½(u²)_xxx` and discretized as the third
//! central difference `D₊D₋D₀` of the nodal square, which keeps the scheme in
//! conservation form: constants and the step `−sign x` are discretely
//! stationary. Time stepping is classical RK4.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::solve_tridiagonal;
use crate::profiles::{Branch, Classification, Profile, SimilarityParams};

pub const MIN_GRID: usize = 64;
pub const BLOWUP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// Boundary nodes hold the far-field values of the initial data.
    PinnedFarField,
    /// Boundary nodes hold zero.
    DirichletZero,
    /// `u = u_x = 0` at both ends, realized by even reflection of the
    /// ghost values about the boundary node.
    Clamped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    /// `−sign x`
    SMinus,
    /// `sign x`
    SPlus,
    /// `H(−x)`
    HLeft,
    /// `H(x)`
    HRight,
}

impl DataKind {
    /// Values to the left and right of the jump.
    pub fn sides(self) -> (f64, f64) {
        match self {
            DataKind::SMinus => (1.0, -1.0),
            DataKind::SPlus => (-1.0, 1.0),
            DataKind::HLeft => (1.0, 0.0),
            DataKind::HRight => (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannData {
    pub kind: DataKind,
    /// Width of the tanh ramp; `None` means four grid spacings, `Some(0.0)`
    /// the raw step.
    pub smoothing_width: Option<f64>,
}

impl RiemannData {
    pub fn new(kind: DataKind) -> Self {
        Self { kind, smoothing_width: None }
    }

    pub fn raw(kind: DataKind) -> Self {
        Self { kind, smoothing_width: Some(0.0) }
    }

    pub fn with_width(kind: DataKind, width: f64) -> Self {
        Self { kind, smoothing_width: Some(width) }
    }

    pub fn value(&self, x: f64, dx: f64) -> f64 {
        let (a, b) = self.kind.sides();
        let width = self.smoothing_width.unwrap_or(4.0 * dx);
        let ramp = if width > 0.0 {
            (2.0 * x / width).tanh()
        } else if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.0
        };
        0.5 * (a + b) + 0.5 * (b - a) * ramp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeState {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub t: f64,
    pub epsilon: f64,
    pub bc: BoundaryCondition,
    pub pins: (f64, f64),
    pub dx: f64,
    pub half_width: f64,
}

fn uniform_grid(l: f64, n: usize) -> Result<(Vec<f64>, f64)> {
    if n < MIN_GRID {
        return Err(Error::InvalidGrid(format!("need at least {MIN_GRID} nodes, got {n}")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidGrid("half-width L must be positive".into()));
    }
    let dx = 2.0 * l / (n - 1) as f64;
    // symmetric construction keeps x = 0 exact for odd n
    let x = (0..n).map(|i| if 2 * i + 1 == n { 0.0 } else { -l + i as f64 * dx }).collect();
    Ok((x, dx))
}

/// Default regularization tied to the grid, `ε = dx²`.
pub fn default_epsilon(l: f64, n: usize) -> f64 {
    let dx = 2.0 * l / (n.max(2) - 1) as f64;
    dx * dx
}

pub fn make_state(data: RiemannData, l: f64, n: usize, epsilon: f64) -> Result<PdeState> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidInput("epsilon must be non-negative".into()));
    }
    let (x, dx) = uniform_grid(l, n)?;
    let u: Vec<f64> = x.iter().map(|&s| data.value(s, dx)).collect();
    let pins = (u[0], u[n - 1]);
    Ok(PdeState { x, u, t: 0.0, epsilon, bc: BoundaryCondition::PinnedFarField, pins, dx, half_width: l })
}

/// State with arbitrary initial values; boundary nodes are forced to the
/// boundary condition.
pub fn make_state_with<F: Fn(f64) -> f64>(
    f: F,
    l: f64,
    n: usize,
    epsilon: f64,
    bc: BoundaryCondition,
) -> Result<PdeState> {
    let (x, dx) = uniform_grid(l, n)?;
    build_state(f, x, dx, l, epsilon, bc)
}

/// State on an arbitrary interval `[a, b]`, used for boundary value problems
/// posed on a half-line segment.
pub fn make_state_on<F: Fn(f64) -> f64>(
    f: F,
    interval: (f64, f64),
    n: usize,
    epsilon: f64,
    bc: BoundaryCondition,
) -> Result<PdeState> {
    let (a, b) = interval;
    if !(b > a) {
        return Err(Error::InvalidGrid("interval must be increasing".into()));
    }
    let half = 0.5 * (b - a);
    let (x, dx) = uniform_grid(half, n)?;
    let shift = 0.5 * (a + b);
    let x = x.into_iter().map(|s| s + shift).collect();
    build_state(f, x, dx, half, epsilon, bc)
}

fn build_state<F: Fn(f64) -> f64>(
    f: F,
    x: Vec<f64>,
    dx: f64,
    half_width: f64,
    epsilon: f64,
    bc: BoundaryCondition,
) -> Result<PdeState> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidInput("epsilon must be non-negative".into()));
    }
    let n = x.len();
    let mut u: Vec<f64> = x.iter().map(|&s| f(s)).collect();
    let pins = match bc {
        BoundaryCondition::PinnedFarField => (u[0], u[n - 1]),
        BoundaryCondition::DirichletZero | BoundaryCondition::Clamped => (0.0, 0.0),
    };
    u[0] = pins.0;
    u[n - 1] = pins.1;
    Ok(PdeState { x, u, t: 0.0, epsilon, bc, pins, dx, half_width })
}

/// Right-hand side `D₊D₋D₀(½u²) − ε D⁴u` at interior nodes; boundary
/// entries are zero. Ghost values beyond the boundary copy the boundary node.
pub fn spatial_operator(u: &[f64], dx: f64, epsilon: f64, out: &mut [f64]) {
    spatial_operator_bc(u, dx, epsilon, BoundaryCondition::PinnedFarField, out)
}

/// As [`spatial_operator`] with ghost values chosen by the boundary condition.
pub fn spatial_operator_bc(u: &[f64], dx: f64, epsilon: f64, bc: BoundaryCondition, out: &mut [f64]) {
    let n = u.len();
    let last = n as isize - 1;
    let reflect = bc == BoundaryCondition::Clamped;
    let at = |i: isize| -> f64 {
        let j = if !reflect {
            i.clamp(0, last)
        } else if i < 0 {
            -i
        } else if i > last {
            2 * last - i
        } else {
            i
        };
        u[j as usize]
    };
    let c3 = 1.0 / (2.0 * dx * dx * dx);
    let c4 = epsilon / (dx * dx * dx * dx);
    let node = |um2: f64, um1: f64, u0: f64, up1: f64, up2: f64| {
        let disp = 0.5 * (up2 * up2 - 2.0 * up1 * up1 + 2.0 * um1 * um1 - um2 * um2) * c3;
        disp - (up2 - 4.0 * up1 + 6.0 * u0 - 4.0 * um1 + um2) * c4
    };
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for i in (1..n - 1).filter(|&i| i < 2 || i + 2 >= n) {
        let k = i as isize;
        out[i] = node(at(k - 2), at(k - 1), u[i], at(k + 1), at(k + 2));
    }
    // interior nodes, written over windows so the loop vectorizes
    if n > 4 {
        for (o, w) in out[2..n - 2].iter_mut().zip(u.windows(5)) {
            *o = node(w[0], w[1], w[2], w[3], w[4]);
        }
    }
}

/// Step-size rule `dt = min(c3 dx³/max(1, max|u|), c4 dx⁴/ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtControl {
    pub c3: f64,
    pub c4: f64,
    /// Use this step (still checked against the limit) instead of the rule.
    pub fixed: Option<f64>,
}

impl Default for DtControl {
    fn default() -> Self {
        Self { c3: 0.25, c4: 0.125, fixed: None }
    }
}

impl DtControl {
    pub fn limit(&self, state: &PdeState) -> f64 {
        stability_limit(&state.u, state.dx, state.epsilon, self.c3, self.c4)
    }

    pub fn dt(&self, state: &PdeState) -> f64 {
        self.fixed.unwrap_or_else(|| self.limit(state))
    }
}

fn stability_limit(u: &[f64], dx: f64, epsilon: f64, c3: f64, c4: f64) -> f64 {
    let umax = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let disp = c3 * dx.powi(3) / umax;
    if epsilon > 0.0 {
        disp.min(c4 * dx.powi(4) / epsilon)
    } else {
        disp
    }
}

/// Stage buffers reused across RK4 steps.
struct Rk4Work {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4Work {
    fn new(n: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n] }
    }

    fn step<F: Fn(&[f64], &mut [f64])>(&mut self, u: &mut [f64], dt: f64, rhs: F) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        rhs(u, k1);
        for ((t, &v), &k) in tmp.iter_mut().zip(u.iter()).zip(k1.iter()) {
            *t = v + 0.5 * dt * k;
        }
        rhs(tmp, k2);
        for ((t, &v), &k) in tmp.iter_mut().zip(u.iter()).zip(k2.iter()) {
            *t = v + 0.5 * dt * k;
        }
        rhs(tmp, k3);
        for ((t, &v), &k) in tmp.iter_mut().zip(u.iter()).zip(k3.iter()) {
            *t = v + dt * k;
        }
        rhs(tmp, k4);
        for (i, v) in u.iter_mut().enumerate() {
            *v += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// One RK4 step of size `dt`.
pub fn step(state: &PdeState, dt: f64) -> Result<PdeState> {
    let mut next = state.clone();
    step_in_place(&mut next, dt, &mut Rk4Work::new(state.u.len()))?;
    Ok(next)
}

fn step_in_place(state: &mut PdeState, dt: f64, work: &mut Rk4Work) -> Result<()> {
    let limit = stability_limit(&state.u, state.dx, state.epsilon, 0.25, 0.125);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, limit });
    }
    let (dx, eps, bc) = (state.dx, state.epsilon, state.bc);
    work.step(&mut state.u, dt, |u, out| spatial_operator_bc(u, dx, eps, bc, out));
    let n = state.u.len();
    state.u[0] = state.pins.0;
    state.u[n - 1] = state.pins.1;
    state.t += dt;
    if state.u.iter().any(|v| !(v.abs() <= BLOWUP_THRESHOLD)) {
        return Err(Error::BlowupDetected { t: state.t });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeDiagnostics {
    pub t: f64,
    pub mass_left: f64,
    pub mass_right: f64,
    pub h_minus1: f64,
    pub sup: f64,
}

impl PdeDiagnostics {
    pub fn of(state: &PdeState) -> Self {
        let n = state.u.len();
        let mid = n / 2;
        let trap =
            |lo: usize, hi: usize| -> f64 { (lo..hi).map(|i| 0.5 * state.dx * (state.u[i] + state.u[i + 1])).sum() };
        let (mass_left, mass_right) = if n % 2 == 1 {
            (trap(0, mid), trap(mid, n - 1))
        } else {
            // x = 0 falls between nodes mid−1 and mid
            let half = 0.25 * state.dx * (state.u[mid - 1] + state.u[mid]);
            (trap(0, mid - 1) + half, half + trap(mid, n - 1))
        };
        Self {
            t: state.t,
            mass_left,
            mass_right,
            h_minus1: h_minus1_norm(state),
            sup: state.u.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass_left + self.mass_right
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub samples: Vec<PdeDiagnostics>,
    pub steps: usize,
    /// First time the solution departed from the pins next to the boundary,
    /// which ends the window where the far-field model is valid.
    pub boundary_contact: Option<f64>,
}

/// Tolerance on the deviation from the pins that counts as boundary contact.
pub const BOUNDARY_CONTACT_TOL: f64 = 1e-6;

/// Advances to `t_end`, recording diagnostics every `record_interval` (and
/// at both ends).
pub fn evolve(
    state: &PdeState,
    t_end: f64,
    control: &DtControl,
    record_interval: f64,
) -> Result<(PdeState, EvolveReport)> {
    if !(t_end > state.t) {
        return Err(Error::InvalidInput("t_end must exceed the current time".into()));
    }
    let mut cur = state.clone();
    let mut samples = vec![PdeDiagnostics::of(&cur)];
    let mut next_record = cur.t + record_interval;
    let mut steps = 0;
    let mut contact = None;
    let n = cur.u.len();
    let mut work = Rk4Work::new(n);
    while cur.t < t_end {
        let mut dt = control.dt(&cur);
        let last = cur.t + dt >= t_end;
        if last {
            dt = t_end - cur.t;
        }
        step_in_place(&mut cur, dt, &mut work)?;
        if last {
            cur.t = t_end;
        }
        steps += 1;
        if contact.is_none()
            && ((cur.u[2] - cur.pins.0).abs() > BOUNDARY_CONTACT_TOL
                || (cur.u[n - 3] - cur.pins.1).abs() > BOUNDARY_CONTACT_TOL)
        {
            contact = Some(cur.t);
        }
        if record_interval > 0.0 && cur.t >= next_record && !last {
            samples.push(PdeDiagnostics::of(&cur));
            while next_record <= cur.t {
                next_record += record_interval;
            }
        }
    }
    samples.push(PdeDiagnostics::of(&cur));
    Ok((cur, EvolveReport { samples, steps, boundary_contact: contact }))
}

/// `(∫ g u)^{1/2}` with `−g'' = u`, `g(±L) = 0`, solved on the grid.
pub fn h_minus1_norm(state: &PdeState) -> f64 {
    h_minus1_norm_of(&state.u, state.dx)
}

pub fn h_minus1_norm_of(u: &[f64], dx: f64) -> f64 {
    let n = u.len();
    if n < 3 {
        return 0.0;
    }
    let m = n - 2;
    let h2 = dx * dx;
    let lower = vec![-1.0; m];
    let diag = vec![2.0; m];
    let upper = vec![-1.0; m];
    let rhs: Vec<f64> = u[1..n - 1].iter().map(|v| v * h2).collect();
    let g = solve_tridiagonal(&lower, &diag, &upper, &rhs);
    let s: f64 = g.iter().zip(&u[1..n - 1]).map(|(a, b)| a * b).sum::<f64>() * dx;
    s.max(0.0).sqrt()
}

/// `Σ (D₊u)² dx`, the discrete `‖u_x‖²`.
pub fn gradient_norm_sq(u: &[f64], dx: f64) -> f64 {
    u.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / dx
}

/// Four-point Lagrange interpolation of nodal values.
pub fn interpolate_nodal(x: &[f64], u: &[f64], s: f64) -> Option<f64> {
    let n = x.len();
    if s < x[0] || s > x[n - 1] {
        return None;
    }
    let dx = x[1] - x[0];
    let k = (((s - x[0]) / dx).floor() as isize).clamp(1, n as isize - 3) as usize;
    let idx = [k - 1, k, k + 1, k + 2];
    let mut v = 0.0;
    for &i in &idx {
        let mut w = 1.0;
        for &j in &idx {
            if j != i {
                w *= (s - x[j]) / (x[i] - x[j]);
            }
        }
        v += w * u[i];
    }
    Some(v)
}

/// Samples `v(z) = u(z s, t)` with `s = (T − t)^{1/3}` on the blow-up branch
/// or `s = t^{1/3}` on the rarefaction branch.
pub fn rescale_to_similarity(state: &PdeState, t_blowup: Option<f64>, branch: Branch, z: &[f64]) -> Result<Profile> {
    let s = match branch {
        Branch::Blowup => {
            let tb = t_blowup.ok_or_else(|| Error::InvalidInput("blow-up branch needs T".into()))?;
            if !(state.t < tb) {
                return Err(Error::OutOfWindow(format!("t = {} is not before T = {tb}", state.t)));
            }
            (tb - state.t).cbrt()
        }
        Branch::Rarefaction => {
            if !(state.t > 0.0) {
                return Err(Error::OutOfWindow("rarefaction rescaling needs t > 0".into()));
            }
            state.t.cbrt()
        }
    };
    if z.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: z.len() });
    }
    let mut g = Vec::with_capacity(z.len());
    for &zz in z {
        let v = interpolate_nodal(&state.x, &state.u, zz * s)
            .ok_or_else(|| Error::OutOfWindow(format!("z = {zz} maps to x = {} outside the grid", zz * s)))?;
        g.push(v);
    }
    let (dg, d2g) = finite_difference_derivatives(z, &g);
    Ok(Profile {
        z: z.to_vec(),
        g,
        dg,
        d2g,
        params: SimilarityParams::new(0.0, branch),
        origin_slope: 0.0,
        far_limit: None,
        far_limit_plus: None,
        interface_z0: None,
        classification: Classification::BoundedOscillatory,
    })
    .map(|mut p| {
        p.origin_slope = p.jet(0.0).map_or(0.0, |j| j[1]);
        p
    })
}

fn finite_difference_derivatives(z: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = z.len();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let (a, b, c) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        let (h0, h1) = (z[b] - z[a], z[c] - z[b]);
        let s0 = (g[b] - g[a]) / h0;
        let s1 = (g[c] - g[b]) / h1;
        let second = 2.0 * (s1 - s0) / (h0 + h1);
        d2[i] = second;
        d1[i] = s0 + second * (z[i] - 0.5 * (z[a] + z[b]));
    }
    (d1, d2)
}

/// Solution of the rescaled equation `v_τ = (v v_z)_zz − (1/3) z v_z − ε v_zzzz`
/// on a uniform `z` grid with pinned ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledState {
    pub z: Vec<f64>,
    pub v: Vec<f64>,
    pub tau: f64,
    pub epsilon: f64,
    pub dz: f64,
}

impl RescaledState {
    pub fn new(z: Vec<f64>, v: Vec<f64>, epsilon: f64) -> Result<Self> {
        if z.len() != v.len() || z.len() < 5 {
            return Err(Error::InvalidGrid("rescaled grid needs at least 5 matching nodes".into()));
        }
        let dz = z[1] - z[0];
        if !(dz > 0.0) || z.windows(2).any(|w| ((w[1] - w[0]) - dz).abs() > 1e-9 * dz) {
            return Err(Error::InvalidGrid("rescaled grid must be uniform and increasing".into()));
        }
        Ok(Self { z, v, tau: 0.0, epsilon, dz })
    }

    /// Seeds the state from a profile sampled on `n` nodes of `[−Z, Z]`.
    pub fn from_profile(p: &Profile, big_z: f64, n: usize, epsilon: f64) -> Result<Self> {
        let (z, v) = p.sample_uniform(-big_z, big_z, n)?;
        Self::new(z, v, epsilon)
    }
}

/// Rescaled right-hand side at interior nodes.
pub fn rescaled_operator(v: &[f64], z: &[f64], dz: f64, epsilon: f64, out: &mut [f64]) {
    spatial_operator(v, dz, epsilon, out);
    let n = v.len();
    for i in 1..n - 1 {
        out[i] -= z[i] / 3.0 * (v[i + 1] - v[i - 1]) / (2.0 * dz);
    }
}

/// Discrete norm `(Σ r² dz)^{1/2}` of the stationary residual
/// `(v v_z)_zz − (1/3) z v_z` over the nodes whose five-point stencil lies
/// inside the grid, so the ghost extension does not enter.
pub fn stationary_residual(state: &RescaledState) -> f64 {
    let n = state.v.len();
    let mut r = vec![0.0; n];
    rescaled_operator(&state.v, &state.z, state.dz, 0.0, &mut r);
    (r[2..n - 2].iter().map(|x| x * x).sum::<f64>() * state.dz).sqrt()
}

/// Integrates the rescaled equation to `tau_end`, recording the sup distance
/// to `reference` on `|z| ≤ window` after every `record_every` steps.
pub fn evolve_rescaled(
    state: &RescaledState,
    tau_end: f64,
    reference: &[f64],
    window: f64,
    record_every: usize,
) -> Result<(RescaledState, Vec<(f64, f64)>)> {
    if reference.len() != state.v.len() {
        return Err(Error::InvalidInput("reference must live on the state grid".into()));
    }
    let distance = |v: &[f64]| -> f64 {
        state
            .z
            .iter()
            .zip(v.iter().zip(reference))
            .filter(|(z, _)| z.abs() <= window)
            .fold(0.0f64, |m, (_, (a, b))| m.max((a - b).abs()))
    };
    let zmax = state.z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut cur = state.clone();
    let mut record = vec![(cur.tau, distance(&cur.v))];
    let n = cur.v.len();
    let (z, dz, eps) = (cur.z.clone(), cur.dz, cur.epsilon);
    let mut steps = 0usize;
    let mut work = Rk4Work::new(n);
    while cur.tau < tau_end {
        let mut dt = stability_limit(&cur.v, dz, eps, 0.25, 0.125).min(0.5 * dz / (zmax / 3.0).max(1e-300));
        if cur.tau + dt > tau_end {
            dt = tau_end - cur.tau;
        }
        let pins = (cur.v[0], cur.v[n - 1]);
        work.step(&mut cur.v, dt, |v, out| rescaled_operator(v, &z, dz, eps, out));
        cur.v[0] = pins.0;
        cur.v[n - 1] = pins.1;
        cur.tau += dt;
        steps += 1;
        if cur.v.iter().any(|v| !(v.abs() <= BLOWUP_THRESHOLD)) {
            return Err(Error::BlowupDetected { t: cur.tau });
        }
        if record_every > 0 && steps.is_multiple_of(record_every) {
            record.push((cur.tau, distance(&cur.v)));
        }
    }
    if record.last().map(|r| r.0) != Some(cur.tau) {
        record.push((cur.tau, distance(&cur.v)));
    }
    Ok((cur, record))
}
