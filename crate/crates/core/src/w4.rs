//! The equation restricted to the invariant subspace `Span{1, x, x², x³}`.
//!
//! For `u = C0 + C1 x + C2 x² + C3 x³` the operator `(u u_x)_xx` is again a
//! cubic, so the PDE reduces to four coupled Riccati-type ODEs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate, OdeSettings, Trajectory};

/// Closeness to the blow-up time below which the closed form is not evaluated.
pub const BLOWUP_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct W4State {
    pub t: f64,
    pub c: [f64; 4],
}

pub fn w4_rhs(c: [f64; 4]) -> [f64; 4] {
    let [c0, c1, c2, c3] = c;
    [6.0 * (c1 * c2 + c0 * c3), 12.0 * (c2 * c2 + 2.0 * c1 * c3), 60.0 * c2 * c3, 60.0 * c3 * c3]
}

/// Exact blow-up orbit with `τ = T − t`:
///
/// ```text
/// C3 = 1/(60τ),  C2 = A0/τ,  C1 = B0 τ^{-2/5} + 20 A0²/τ,
/// C0 = D0 τ^{-1/10} + 20 A0 B0 τ^{-2/5} + (400/3) A0³/τ.
/// ```
pub fn w4_closed_form(big_t: f64, a0: f64, b0: f64, d0: f64, t: f64) -> Result<W4State> {
    let tau = guarded_tau(big_t, t)?;
    let c3 = 1.0 / (60.0 * tau);
    let c2 = a0 / tau;
    let c1 = b0 * tau.powf(-0.4) + 20.0 * a0 * a0 / tau;
    let c0 = d0 * tau.powf(-0.1) + 20.0 * a0 * b0 * tau.powf(-0.4) + 400.0 / 3.0 * a0.powi(3) / tau;
    Ok(W4State { t, c: [c0, c1, c2, c3] })
}

/// The closed form as usually printed, with `−60 τ^{-3/5}` in `C1` and
/// `−720 A0 τ^{-3/5}` in `C0`. Kept to document that it is not an orbit of
/// [`w4_rhs`].
pub fn w4_closed_form_printed(big_t: f64, a0: f64, b0: f64, d0: f64, t: f64) -> Result<W4State> {
    let tau = guarded_tau(big_t, t)?;
    let c3 = 1.0 / (60.0 * tau);
    let c2 = a0 / tau;
    let c1 = b0 * tau.powf(-0.4) - 60.0 * tau.powf(-0.6);
    let c0 = d0 * tau.powf(-0.1) + 20.0 * a0 * b0 * tau.powf(-0.4) - 720.0 * a0 * tau.powf(-0.6);
    Ok(W4State { t, c: [c0, c1, c2, c3] })
}

fn guarded_tau(big_t: f64, t: f64) -> Result<f64> {
    let tau = big_t - t;
    if tau < BLOWUP_GUARD {
        return Err(Error::AtBlowup);
    }
    Ok(tau)
}

/// Constants `(T, A0, B0, D0)` of the exact orbit through `c` at time `t`.
pub fn w4_constants(t: f64, c: [f64; 4]) -> Result<(f64, f64, f64, f64)> {
    let tau = 1.0 / (60.0 * c[3]);
    if !(c[3] > 0.0) {
        return Err(Error::NonBlowup(c[3]));
    }
    let a0 = c[2] * tau;
    let b0 = (c[1] - 20.0 * a0 * a0 / tau) * tau.powf(0.4);
    let d0 = (c[0] - 20.0 * a0 * b0 * tau.powf(-0.4) - 400.0 / 3.0 * a0.powi(3) / tau) * tau.powf(0.1);
    Ok((t + tau, a0, b0, d0))
}

pub fn w4_blowup_time(c3_initial: f64) -> Result<f64> {
    if !(c3_initial > 0.0) {
        return Err(Error::NonBlowup(c3_initial));
    }
    Ok(1.0 / (60.0 * c3_initial))
}

/// Integrates the coefficient system from `c` at `t = 0` up to `t_end` or
/// numerical blow-up.
pub fn w4_integrate(c: [f64; 4], t_end: f64, settings: &OdeSettings) -> Result<Trajectory> {
    integrate(|_, y, d| d.copy_from_slice(&w4_rhs([y[0], y[1], y[2], y[3]])), &c, (0.0, t_end), settings, &[])
}

/// Coefficients of `(u u_x)_xx = (u²)'''/2` for a polynomial `u`, computed by
/// dense polynomial arithmetic.
pub fn spatial_operator_coeffs(u: &[f64]) -> Vec<f64> {
    if u.is_empty() {
        return Vec::new();
    }
    let mut sq = vec![0.0; 2 * u.len() - 1];
    for (i, a) in u.iter().enumerate() {
        for (j, b) in u.iter().enumerate() {
            sq[i + j] += a * b;
        }
    }
    let mut out = vec![0.0; sq.len().saturating_sub(3)];
    for (k, o) in out.iter_mut().enumerate() {
        let f = ((k + 1) * (k + 2) * (k + 3)) as f64;
        *o = 0.5 * f * sq[k + 3];
    }
    out
}
