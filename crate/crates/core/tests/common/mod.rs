//! Experiments shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use nde_lab::blowup::{BlowupCertificate, TimeOrder};
use nde_lab::cli::{odi_coefficient, odi_state};
use nde_lab::ode::OdeSettings;
use nde_lab::pde::{
    default_epsilon, evolve, gradient_norm_sq, h_minus1_norm, make_state, make_state_with, rescale_to_similarity,
    BoundaryCondition, DataKind, DtControl, PdeState, RiemannData,
};
use nde_lab::profiles::{reflect_to_rarefaction, shoot_profile, Branch};

fn l1_to_step(state: &PdeState) -> f64 {
    let half = 0.5 * state.half_width;
    state
        .x
        .iter()
        .zip(&state.u)
        .filter(|(x, _)| x.abs() <= half)
        .map(|(&x, &u)| {
            let step = if x > 0.0 {
                -1.0
            } else if x < 0.0 {
                1.0
            } else {
                0.0
            };
            (u - step).abs() * state.dx
        })
        .sum()
}

/// Worst L¹ distance to the step on the central half-domain over `t ≤ 0.1`;
/// `epsilon = None` selects `dx²`.
pub fn shock_stays_put(n: usize, epsilon: Option<f64>) -> (f64, f64) {
    let l = 4.0;
    let eps = epsilon.unwrap_or_else(|| default_epsilon(l, n));
    let mut state = make_state(RiemannData::new(DataKind::SMinus), l, n, eps).unwrap();
    let mut worst = l1_to_step(&state);
    for k in 1..=10 {
        state = evolve(&state, 0.01 * k as f64, &DtControl::default(), 0.0).unwrap().0;
        worst = worst.max(l1_to_step(&state));
    }
    (worst, state.t)
}

pub fn rarefaction_distance(n: usize, t_end: f64) -> f64 {
    let l = 4.0;
    let eps = default_epsilon(l, n);
    let state = make_state(RiemannData::new(DataKind::SPlus), l, n, eps).unwrap();
    let (last, _) = evolve(&state, t_end, &DtControl::default(), 0.0).unwrap();
    let target = reflect_to_rarefaction(&shoot_profile(0.0, 1.0, &OdeSettings::default()).unwrap());
    let z: Vec<f64> = (0..=600).map(|k| -3.0 + 0.01 * k as f64).collect();
    let v = rescale_to_similarity(&last, None, Branch::Rarefaction, &z).unwrap();
    z.iter().zip(&v.g).map(|(&s, g)| (g - target.value(s).unwrap()).abs()).fold(0.0, f64::max)
}

fn bump(amplitude: f64, epsilon: f64) -> PdeState {
    make_state_with(|x| amplitude * (-4.0 * x * x).exp(), 2.0, 257, epsilon, BoundaryCondition::DirichletZero).unwrap()
}

fn curvature_variation(u: &[f64]) -> f64 {
    u.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).sum()
}

/// Relative drift of the H⁻¹ norm at ε = 0 over the window where the run is
/// still smooth, and the window length. Without regularization grid-scale
/// modes grow, so the window ends once `Σ|D²u|` has doubled.
pub fn inviscid_drift(t_max: f64) -> (f64, f64) {
    let mut s = bump(0.1, 0.0);
    let n0 = h_minus1_norm(&s);
    let c0 = curvature_variation(&s.u);
    let mut worst = 0.0f64;
    let mut valid = 0.0;
    for k in 1..=200 {
        let t = t_max * k as f64 / 200.0;
        match evolve(&s, t, &DtControl::default(), 0.0) {
            Ok((next, _)) if curvature_variation(&next.u) <= 2.0 * c0 => s = next,
            _ => break,
        }
        worst = worst.max((h_minus1_norm(&s) - n0).abs() / n0);
        valid = s.t;
    }
    (worst, valid)
}

/// Largest relative mismatch between the measured `d‖u‖²_{-1}/dt` and
/// `−2ε‖u_x‖²`, plus whether the norm was monotone.
pub fn dissipation_mismatch(epsilon: f64) -> (f64, bool) {
    let mut s = bump(0.1, epsilon);
    let h = 2e-3;
    let mut worst = 0.0f64;
    let mut monotone = true;
    let mut prev = h_minus1_norm(&s);
    for k in 1..=10 {
        let next = evolve(&s, k as f64 * h, &DtControl::default(), 0.0).unwrap().0;
        let n1 = h_minus1_norm(&next);
        monotone &= n1 <= prev;
        let measured = (n1 * n1 - prev * prev) / h;
        let predicted = -epsilon * (gradient_norm_sq(&s.u, s.dx) + gradient_norm_sq(&next.u, next.dx));
        worst = worst.max((measured - predicted).abs() / predicted.abs());
        prev = n1;
        s = next;
    }
    (worst, monotone)
}

/// Runs the compactly supported ODI data and checks `J' ≥ (3/L⁷)J²` along
/// the run sampled every 0.005 up to `t_end`.
pub fn odi_run(t_end: f64) -> BlowupCertificate {
    let l = 1.0;
    let mut state = odi_state(l, 257, 1e-3).unwrap();
    let j0 = odi_coefficient(&state, l).unwrap();
    let mut traj = vec![(0.0, j0)];
    let samples = (t_end / 0.005).round() as usize;
    for k in 1..=samples {
        state = evolve(&state, 0.005 * k as f64, &DtControl::default(), 0.0).unwrap().0;
        traj.push((state.t, odi_coefficient(&state, l).unwrap()));
    }
    BlowupCertificate::eigenfunction(j0, l, TimeOrder::First).unwrap().with_trajectory(traj, 1e-2).unwrap()
}

/// Empirical L¹ order from nested grids with shared nodes, fixed ε, fixed
/// ramp width and a common time step.
pub fn grid_order(t_end: f64) -> (f64, [f64; 2]) {
    let (l, eps, width) = (2.0, 1e-3, 0.2);
    let ns = [129usize, 257, 513];
    let data = RiemannData::with_width(DataKind::SPlus, width);
    let finest = make_state(data, l, ns[2], eps).unwrap();
    let control = DtControl { fixed: Some(0.5 * DtControl::default().limit(&finest)), ..DtControl::default() };
    let runs: Vec<PdeState> =
        ns.iter().map(|&n| evolve(&make_state(data, l, n, eps).unwrap(), t_end, &control, 0.0).unwrap().0).collect();
    let diff = |a: &PdeState, b: &PdeState| -> f64 {
        a.u.iter().enumerate().map(|(i, v)| (v - b.u[2 * i]).abs() * a.dx).sum()
    };
    let e = [diff(&runs[0], &runs[1]), diff(&runs[1], &runs[2])];
    ((e[0] / e[1]).log2(), e)
}
