//! Blow-up certificates for the Cauchy/boundary problem on `[−L, 0]`.
//!
//! The eigenfunction method tests the solution against `φ = −(x+L)³`, whose
//! third derivative is constant, and derives the quadratic inequality
//! `J' ≥ (3/L⁷) J²` for `J(t) = −∫ u φ`. The capacity method for the
//! second-order-in-time equation uses a space-time cut-off instead.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gauss_kronrod, simpson_uniform, trapezoid};
use crate::ode::{integrate, OdeSettings, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeOrder {
    First,
    Second,
    Third,
}

/// `φ(x) = −(x+L)³` on `[−L, 0]`.
pub fn cut_weight(l: f64, x: f64) -> Result<f64> {
    if x < -l || x > 0.0 {
        return Err(Error::OutOfDomain { x, lo: -l, hi: 0.0 });
    }
    Ok(-(x + l).powi(3))
}

/// `J = ∫_{−L}^0 u(x) φ(x) dx = −∫ u (x+L)³ dx`. Samples on a uniform grid use
/// composite Simpson, others the trapezoid rule.
pub fn expansion_coefficient(x: &[f64], u: &[f64], l: f64) -> Result<f64> {
    if x.len() != u.len() || x.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: x.len().min(u.len()) });
    }
    let w: Vec<f64> = x.iter().zip(u).map(|(&s, &v)| v * (s + l).powi(3)).collect();
    let h = x[1] - x[0];
    let uniform = x.windows(2).all(|p| ((p[1] - p[0]) - h).abs() <= 1e-9 * h.abs());
    let integral = if uniform { simpson_uniform(h, &w) } else { trapezoid(x, &w) };
    Ok(-integral)
}

/// `∫_1^∞ (s³ − 1)^{−1/2} ds`, evaluated after `s = 1 + w²` and `w ↦ 1/w`
/// on the outer half, which leaves two smooth integrals on `[0, 1]`.
pub fn cubic_escape_integral() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        let inner = gauss_kronrod(|w| 2.0 / (3.0 + 3.0 * w * w + w.powi(4)).sqrt(), 0.0, 1.0, 1e-15, 1e-15, 200)
            .expect("smooth integrand");
        let outer = gauss_kronrod(|v| 2.0 / (1.0 + 3.0 * v * v + 3.0 * v.powi(4)).sqrt(), 0.0, 1.0, 1e-15, 1e-15, 200)
            .expect("smooth integrand");
        inner.0 + outer.0
    })
}

/// Blow-up time of `F''' = F²`, `F(0) = 1`, `F'(0) = F''(0) = 0`.
pub fn third_order_unit_time() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        let settings = OdeSettings { blowup_threshold: 1e12, max_step: 0.05, ..OdeSettings::default() };
        let traj = integrate(
            |_, y, d| {
                d[0] = y[1];
                d[1] = y[2];
                d[2] = y[0] * y[0];
            },
            &[1.0, 0.0, 0.0],
            (0.0, 100.0),
            &settings,
            &[],
        )
        .expect("unit problem integrates");
        assert_eq!(traj.termination, Termination::BlowupDetected);
        // the last finite sample sits on the asymptote F ≈ 60/(τ* − τ)³
        let k = (0..traj.len()).rev().find(|&i| traj.states[i][0].is_finite() && traj.states[i][0] < 1e12).unwrap();
        traj.times[k] + (60.0 / traj.states[k][0]).cbrt()
    })
}

/// Upper bound on the blow-up time from the comparison problem
/// `J^{(n)} = (3/L⁷) J²`, `J(0) = J0`, lower derivatives zero.
pub fn blowup_time_bound(j0: f64, l: f64, order: TimeOrder) -> Result<f64> {
    if !(j0 > 0.0) {
        return Err(Error::NonpositiveJ0(j0));
    }
    if !(l > 0.0) {
        return Err(Error::InvalidInput("L must be positive".into()));
    }
    let k = 3.0 / l.powi(7);
    Ok(match order {
        TimeOrder::First => 1.0 / (k * j0),
        TimeOrder::Second => 1.5f64.sqrt() * cubic_escape_integral() / (k * j0).sqrt(),
        TimeOrder::Third => third_order_unit_time() / (k * j0).cbrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdiReport {
    pub satisfied: bool,
    /// Minimum of `(J' − kJ²)/(kJ²)` over interior samples.
    pub min_margin: f64,
    pub worst_time: f64,
}

/// Checks `J' ≥ (3/L⁷) J²` with centred differences at interior samples,
/// allowing a relative shortfall `tol`.
pub fn odi_check(traj: &[(f64, f64)], l: f64, tol: f64) -> Result<OdiReport> {
    if traj.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: traj.len() });
    }
    let k = 3.0 / l.powi(7);
    let mut min_margin = f64::INFINITY;
    let mut worst_time = traj[1].0;
    for w in traj.windows(3) {
        let (t0, j0) = w[0];
        let (t1, j1) = w[1];
        let (t2, j2) = w[2];
        // nonuniform centred difference
        let (h0, h1) = (t1 - t0, t2 - t1);
        let dj = (h0 * h0 * (j2 - j1) + h1 * h1 * (j1 - j0)) / (h0 * h1 * (h0 + h1));
        let rhs = k * j1 * j1;
        let margin = (dj - rhs) / rhs.max(f64::MIN_POSITIVE);
        if margin < min_margin {
            min_margin = margin;
            worst_time = t1;
        }
    }
    Ok(OdiReport { satisfied: min_margin >= -tol, min_margin, worst_time })
}

/// Time cut-off `φ0(τ) = τ^p (1 − τ)^p` on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeCutoff {
    pub power: i32,
}

impl Default for TimeCutoff {
    fn default() -> Self {
        Self { power: 4 }
    }
}

impl TimeCutoff {
    pub fn value(&self, t: f64) -> f64 {
        (t * (1.0 - t)).powi(self.power)
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        // φ = w^p with w = τ(1−τ), w' = 1 − 2τ, w'' = −2
        let p = self.power as f64;
        let w = t * (1.0 - t);
        let w1 = 1.0 - 2.0 * t;
        p * (p - 1.0) * w.powi(self.power - 2) * w1 * w1 - 2.0 * p * w.powi(self.power - 1)
    }

    /// `c0 = ∫_0^1 |φ0''|²/φ0 dτ`, or `DivergentC0` when adaptive quadrature
    /// does not converge.
    pub fn capacity_constant(&self) -> Result<f64> {
        if self.power < 2 {
            return Err(Error::DivergentC0);
        }
        gauss_kronrod(|t| self.second_derivative(t).powi(2) / self.value(t), 0.0, 1.0, 1e-12, 1e-12, 2000)
            .map(|(v, _)| v)
            .ok_or(Error::DivergentC0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityBound {
    pub j0: f64,
    pub c0: f64,
    pub t0: f64,
}

/// Capacity bound for `u_tt = (u u_x)_xx` from the initial velocity on
/// `[0, L]`: `J0 = ∫ u_t(x,0) (L−x)³ dx` and `T0 = (c0 L⁷/(7 J0))^{1/3}`.
pub fn capacity_bound(x: &[f64], ut0: &[f64], l: f64, cutoff: TimeCutoff) -> Result<CapacityBound> {
    if x.len() != ut0.len() || x.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: x.len().min(ut0.len()) });
    }
    let w: Vec<f64> = x.iter().zip(ut0).map(|(&s, &v)| v * (l - s).powi(3)).collect();
    let h = x[1] - x[0];
    let uniform = x.windows(2).all(|p| ((p[1] - p[0]) - h).abs() <= 1e-9 * h.abs());
    let j0 = if uniform { simpson_uniform(h, &w) } else { trapezoid(x, &w) };
    if !(j0 > 0.0) {
        return Err(Error::NonpositiveJ0(j0));
    }
    let c0 = cutoff.capacity_constant()?;
    Ok(CapacityBound { j0, c0, t0: (c0 * l.powi(7) / (7.0 * j0)).cbrt() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupCertificate {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "J0")]
    pub j0: f64,
    pub order: TimeOrder,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub odi_margin: Option<f64>,
    pub odi_satisfied: Option<bool>,
    pub c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_trajectory: Option<Vec<(f64, f64)>>,
}

impl BlowupCertificate {
    pub fn eigenfunction(j0: f64, l: f64, order: TimeOrder) -> Result<Self> {
        Ok(Self {
            l,
            j0,
            order,
            t0: blowup_time_bound(j0, l, order)?,
            odi_margin: None,
            odi_satisfied: None,
            c0: None,
            j_trajectory: None,
        })
    }

    pub fn with_trajectory(mut self, traj: Vec<(f64, f64)>, tol: f64) -> Result<Self> {
        let report = odi_check(&traj, self.l, tol)?;
        self.odi_margin = Some(report.min_margin);
        self.odi_satisfied = Some(report.satisfied);
        self.j_trajectory = Some(traj);
        Ok(self)
    }

    pub fn capacity(bound: CapacityBound, l: f64) -> Self {
        Self {
            l,
            j0: bound.j0,
            order: TimeOrder::Second,
            t0: bound.t0,
            odi_margin: None,
            odi_satisfied: None,
            c0: Some(bound.c0),
            j_trajectory: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linspace;
    use proptest::prelude::*;

    #[test]
    fn cut_weight_examples() {
        assert_eq!(cut_weight(1.0, -1.0).unwrap(), 0.0);
        assert_eq!(cut_weight(1.0, 0.0).unwrap(), -1.0);
        assert!(matches!(cut_weight(1.0, 0.5), Err(Error::OutOfDomain { .. })));
        let h = 1e-2;
        for k in 2..98 {
            let x = -1.0 + k as f64 * h;
            let f = |s: f64| -(s + 1.0f64).powi(3);
            let d3 = (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h.powi(3));
            assert!((d3 + 6.0).abs() < 1e-6, "{d3}");
        }
    }

    #[test]
    fn expansion_coefficient_examples() {
        let x = linspace(-1.0, 0.0, 201);
        let ones = vec![-1.0; x.len()];
        assert!((expansion_coefficient(&x, &ones, 1.0).unwrap() - 0.25).abs() < 1e-14);
        assert_eq!(expansion_coefficient(&x, &vec![0.0; x.len()], 1.0).unwrap(), 0.0);
        // u = x(x+1): −∫ x(x+1)^4 dx on (−1, 0) = 1/30
        let u: Vec<f64> = x.iter().map(|s| s * (s + 1.0)).collect();
        assert!((expansion_coefficient(&x, &u, 1.0).unwrap() - 1.0 / 30.0).abs() < 1e-9);
        let x2 = linspace(-1.0, 0.0, 401);
        let u2: Vec<f64> = x2.iter().map(|s| s * (s + 1.0)).collect();
        let d = expansion_coefficient(&x2, &u2, 1.0).unwrap() - expansion_coefficient(&x, &u, 1.0).unwrap();
        assert!(d.abs() < 1e-8);
    }

    #[test]
    fn first_order_bound() {
        assert_eq!(blowup_time_bound(1.0, 1.0, TimeOrder::First).unwrap(), 1.0 / 3.0);
        assert!((blowup_time_bound(0.25, 1.0, TimeOrder::First).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(matches!(blowup_time_bound(0.0, 1.0, TimeOrder::First), Err(Error::NonpositiveJ0(_))));
        let t0 = blowup_time_bound(1.0, 1.0, TimeOrder::First).unwrap();
        let traj =
            integrate(|_, y, d| d[0] = 3.0 * y[0] * y[0], &[1.0], (0.0, 1.0), &OdeSettings::default(), &[]).unwrap();
        assert_eq!(traj.termination, Termination::BlowupDetected);
        assert!((traj.last_time() - t0).abs() < 1e-4);
    }

    #[test]
    fn escape_integral_value() {
        // (1/3) B(1/6, 1/2) = 2.428650648...
        assert!((cubic_escape_integral() - 2.428_650_648).abs() < 1e-8);
    }

    #[test]
    fn higher_order_bounds_match_comparison_odes() {
        // derivatives outgrow J near blow-up, so the threshold must be high
        let s = OdeSettings { blowup_threshold: 1e60, ..OdeSettings::default() };
        let t2 = blowup_time_bound(2.0, 1.0, TimeOrder::Second).unwrap();
        let traj = integrate(
            |_, y, d| {
                d[0] = y[1];
                d[1] = 3.0 * y[0] * y[0];
            },
            &[2.0, 0.0],
            (0.0, 10.0),
            &s,
            &[],
        )
        .unwrap();
        assert!((traj.last_time() - t2).abs() < 1e-4, "{} vs {t2}", traj.last_time());
        let t3 = blowup_time_bound(2.0, 1.0, TimeOrder::Third).unwrap();
        let traj = integrate(
            |_, y, d| {
                d[0] = y[1];
                d[1] = y[2];
                d[2] = 3.0 * y[0] * y[0];
            },
            &[2.0, 0.0, 0.0],
            (0.0, 10.0),
            &s,
            &[],
        )
        .unwrap();
        assert!((traj.last_time() - t3).abs() < 1e-4, "{} vs {t3}", traj.last_time());
    }

    #[test]
    fn odi_examples() {
        let (l, t0): (f64, f64) = (1.0, 1.0);
        let traj: Vec<(f64, f64)> =
            linspace(0.0, 0.9, 200).into_iter().map(|t| (t, l.powi(7) / (3.0 * (t0 - t)))).collect();
        let r = odi_check(&traj, l, 1e-3).unwrap();
        assert!(r.satisfied && r.min_margin.abs() < 1e-3, "{r:?}");
        let flat: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, 1.0)).collect();
        let r = odi_check(&flat, l, 1e-3).unwrap();
        assert!(!r.satisfied && r.min_margin < 0.0);
        assert!(matches!(odi_check(&flat[..2], l, 1e-3), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn capacity_cutoffs() {
        assert!(matches!(TimeCutoff { power: 2 }.capacity_constant(), Err(Error::DivergentC0)));
        let c0 = TimeCutoff::default().capacity_constant().unwrap();
        // exact value: ∫ (12 w² w'² − 8 w³)² / w⁴ with w = τ(1−τ)
        let exact = gauss_kronrod(
            |t| {
                let w = t * (1.0 - t);
                let w1 = 1.0 - 2.0 * t;
                (12.0 * w1 * w1 - 8.0 * w).powi(2)
            },
            0.0,
            1.0,
            1e-14,
            1e-14,
            50,
        )
        .unwrap()
        .0;
        assert!((c0 - exact).abs() < 1e-8 * exact, "{c0} vs {exact}");
        let x = linspace(0.0, 1.0, 101);
        let neg = vec![-1.0; x.len()];
        assert!(matches!(capacity_bound(&x, &neg, 1.0, TimeCutoff::default()), Err(Error::NonpositiveJ0(_))));
        let pos = vec![1.0; x.len()];
        let b = capacity_bound(&x, &pos, 1.0, TimeCutoff::default()).unwrap();
        assert!((b.j0 - 0.25).abs() < 1e-12);
        assert!((b.t0 - (c0 / (7.0 * 0.25)).cbrt()).abs() < 1e-12);
    }

    #[test]
    fn certificate_json() {
        let c = BlowupCertificate::eigenfunction(1.0, 1.0, TimeOrder::First).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["T0"], serde_json::json!(1.0 / 3.0));
        assert_eq!(v["order"], "first");
    }

    proptest! {
        #[test]
        fn bounds_monotone(j in 0.1..10.0f64, l in 0.5..2.0f64, dj in 0.01..1.0f64, dl in 0.01..1.0f64) {
            for order in [TimeOrder::First, TimeOrder::Second, TimeOrder::Third] {
                let t = blowup_time_bound(j, l, order).unwrap();
                prop_assert!(blowup_time_bound(j + dj, l, order).unwrap() < t);
                prop_assert!(blowup_time_bound(j, l + dl, order).unwrap() > t);
            }
            let x = linspace(0.0, l, 101);
            let u = vec![j; x.len()];
            let t = capacity_bound(&x, &u, l, TimeCutoff::default()).unwrap().t0;
            let u2 = vec![j + dj; x.len()];
            prop_assert!(capacity_bound(&x, &u2, l, TimeCutoff::default()).unwrap().t0 < t);
        }
    }
}
