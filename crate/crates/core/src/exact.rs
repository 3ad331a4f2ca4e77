//! Closed-form solutions: invariant cubics, the piecewise-cubic saw profile
//! at the critical exponent, travelling waves and shock speeds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linear_fit;
use crate::ode::find_root;
use crate::profiles::Profile;

/// One cubic piece `C0 + C1 z + C2 z² + C3 z³` on `[z_left, z_right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicPiece {
    pub z_left: f64,
    pub z_right: f64,
    pub coeffs: [f64; 4],
}

impl CubicPiece {
    pub fn jet3(&self, z: f64) -> [f64; 4] {
        cubic_jet(&self.coeffs, z)
    }
}

fn cubic_jet(c: &[f64; 4], z: f64) -> [f64; 4] {
    [
        c[0] + z * (c[1] + z * (c[2] + z * c[3])),
        c[1] + z * (2.0 * c[2] + 3.0 * z * c[3]),
        2.0 * c[2] + 6.0 * z * c[3],
        6.0 * c[3],
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseCubic {
    /// Pieces in ascending order of `z`.
    pub pieces: Vec<CubicPiece>,
    /// Interior zeros of `g` where pieces meet, in ascending order.
    pub breakpoints: Vec<f64>,
}

impl PiecewiseCubic {
    pub fn single(coeffs: [f64; 4]) -> Self {
        Self {
            pieces: vec![CubicPiece { z_left: f64::NEG_INFINITY, z_right: f64::INFINITY, coeffs }],
            breakpoints: Vec::new(),
        }
    }

    pub fn z_min(&self) -> f64 {
        self.pieces[0].z_left
    }

    pub fn z_max(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].z_right
    }

    /// Index of the piece containing `z`; at a breakpoint the right piece wins.
    pub fn piece_index(&self, z: f64) -> Option<usize> {
        if z < self.z_min() || z > self.z_max() {
            return None;
        }
        let i = self.pieces.partition_point(|p| p.z_right <= z);
        Some(i.min(self.pieces.len() - 1))
    }

    pub fn jet3(&self, z: f64) -> Option<[f64; 4]> {
        self.piece_index(z).map(|i| self.pieces[i].jet3(z))
    }

    pub fn value(&self, z: f64) -> Option<f64> {
        self.jet3(z).map(|j| j[0])
    }

    /// One-sided derivatives `(g'(z⁻), g'(z⁺))`.
    pub fn slopes_at(&self, z: f64) -> Option<(f64, f64)> {
        let i = self.piece_index(z)?;
        let right = self.pieces[i].jet3(z)[1];
        let left = if i > 0 && self.pieces[i].z_left == z { self.pieces[i - 1].jet3(z)[1] } else { right };
        Some((left, right))
    }

    pub fn sample(&self, z: &[f64]) -> Vec<Option<f64>> {
        z.iter().map(|&s| self.value(s)).collect()
    }
}

/// Anything that can be differentiated three times pointwise.
pub trait Jet3 {
    fn jet3_at(&self, z: f64) -> Option<[f64; 4]>;
}

impl Jet3 for PiecewiseCubic {
    fn jet3_at(&self, z: f64) -> Option<[f64; 4]> {
        self.jet3(z)
    }
}

impl Jet3 for CubicPiece {
    fn jet3_at(&self, z: f64) -> Option<[f64; 4]> {
        Some(self.jet3(z))
    }
}

impl Jet3 for Profile {
    fn jet3_at(&self, z: f64) -> Option<[f64; 4]> {
        self.jet3(z)
    }
}

/// Pointwise residual `(g g')'' − ((1+α)/3) g' z + α g` of the blow-up
/// profile equation; `NaN` outside the domain of `g`.
pub fn residual<G: Jet3 + ?Sized>(g: &G, alpha: f64, z: f64) -> f64 {
    match g.jet3_at(z) {
        Some([g0, g1, g2, g3]) => g0 * g3 + 3.0 * g1 * g2 - (1.0 + alpha) / 3.0 * g1 * z + alpha * g0,
        None => f64::NAN,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InvariantCubic {
    /// `C0 + C1 z + z³/60`, exact at α = −1/10.
    I { c0: f64, c1: f64 },
    /// `(400/3) C2³ + 20 C2² z + C2 z² + z³/60`, exact at α = −1.
    II { c2: f64 },
}

pub fn invariant_cubic(kind: InvariantCubic) -> PiecewiseCubic {
    let coeffs = match kind {
        InvariantCubic::I { c0, c1 } => [c0, c1, 0.0, 1.0 / 60.0],
        InvariantCubic::II { c2 } => [400.0 / 3.0 * c2.powi(3), 20.0 * c2 * c2, c2, 1.0 / 60.0],
    };
    PiecewiseCubic::single(coeffs)
}

/// The saw profile on `(z_{n−1}, 0]`: `num_humps` positive cubic humps
/// joined at zeros with mirrored slopes, starting from `−m z + z³/60`.
pub fn build_saw(m: f64, num_humps: usize) -> Result<PiecewiseCubic> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidInput("saw slope m must be positive".into()));
    }
    if num_humps == 0 {
        return Err(Error::InsufficientHumps { needed: 1, got: 0 });
    }
    let mut coeffs = [0.0, -m, 0.0, 1.0 / 60.0];
    let mut right = 0.0;
    let mut zk = -(60.0 * m).sqrt();
    let mut pieces = vec![CubicPiece { z_left: zk, z_right: right, coeffs }];
    let mut breakpoints = vec![zk];
    for _ in 1..num_humps {
        let s_plus = cubic_jet(&coeffs, zk)[1];
        let c1 = -s_plus - zk * zk / 20.0;
        let c0 = -c1 * zk - zk.powi(3) / 60.0;
        coeffs = [c0, c1, 0.0, 1.0 / 60.0];
        right = zk;
        // g = (z − z_k) q(z); the next zero is the root of q left of z_k
        let q = |z: f64| (z * z + zk * z + zk * zk) / 60.0 + c1;
        if q(zk) >= 0.0 {
            return Err(Error::RootNotFound(zk));
        }
        let mut lo = zk - 1.0;
        while q(lo) < 0.0 {
            lo = zk - 2.0 * (zk - lo);
            if lo < -1e12 {
                return Err(Error::RootNotFound(zk));
            }
        }
        let tol = 1e-15 * zk.abs().max(1.0);
        zk = find_root(q, (lo, zk), tol).map_err(|_| Error::RootNotFound(zk))?;
        pieces.push(CubicPiece { z_left: zk, z_right: right, coeffs });
        breakpoints.push(zk);
    }
    pieces.reverse();
    breakpoints.reverse();
    // the outermost zero bounds the domain, it is not an interior breakpoint
    breakpoints.remove(0);
    Ok(PiecewiseCubic { pieces, breakpoints })
}

/// Location and height of the maximum of each hump, ordered from the origin
/// outward.
pub fn saw_peaks(saw: &PiecewiseCubic) -> Vec<(f64, f64)> {
    saw.pieces
        .iter()
        .rev()
        .filter_map(|p| {
            // g' = C1 + z²/20 vanishes at z = −sqrt(−20 C1) on the negative axis
            let c1 = p.coeffs[1];
            if c1 >= 0.0 {
                return None;
            }
            let z = -(-c1 / (3.0 * p.coeffs[3])).sqrt();
            (z > p.z_left && z < p.z_right).then(|| (z, p.jet3(z)[0]))
        })
        .collect()
}

/// Power-law fit `h ≈ C_env |z|^exponent` of the saw's hump heights.
pub fn saw_envelope_fit(saw: &PiecewiseCubic) -> Result<(f64, f64)> {
    let peaks = saw_peaks(saw);
    if peaks.len() < 8 {
        return Err(Error::InsufficientHumps { needed: 8, got: peaks.len() });
    }
    let lx: Vec<f64> = peaks.iter().map(|(z, _)| z.abs().ln()).collect();
    let ly: Vec<f64> = peaks.iter().map(|(_, h)| h.ln()).collect();
    let (slope, icpt, _) = linear_fit(&lx, &ly)?;
    Ok((icpt.exp(), slope))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TwKind {
    Constant { c: f64 },
    SqrtBranch { a1: f64, a2: f64 },
    Parabola { b: f64 },
}

/// Travelling wave `u = f(x − λt)` of the equation, `f` solving
/// `−λ f = (f f')' + A0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravellingWave {
    pub speed: f64,
    pub a0: f64,
    pub kind: TwKind,
}

pub fn tw_solution(speed: f64, a0: f64, kind: TwKind) -> Result<TravellingWave> {
    if let TwKind::Parabola { .. } = kind {
        if speed == 0.0 {
            return Err(Error::InvalidInput("parabolic waves need a nonzero speed".into()));
        }
    }
    Ok(TravellingWave { speed, a0, kind })
}

impl TravellingWave {
    /// `(f, f', f'')` at `y`.
    pub fn jet(&self, y: f64) -> Result<[f64; 3]> {
        match self.kind {
            TwKind::Constant { c } => Ok([c, 0.0, 0.0]),
            TwKind::SqrtBranch { a1, a2 } => {
                let arg = a1 * y + a2;
                if arg < 0.0 {
                    return Err(Error::Domain(format!("negative argument {arg} under square root")));
                }
                let f = arg.sqrt();
                Ok([f, 0.5 * a1 / f, -0.25 * a1 * a1 / (f * f * f)])
            }
            TwKind::Parabola { b } => {
                let l = self.speed;
                let f = -l / 6.0 * (y + b).powi(2) - 1.5 * self.a0 / l;
                Ok([f, -l / 3.0 * (y + b), -l / 3.0])
            }
        }
    }

    pub fn value(&self, y: f64) -> Result<f64> {
        self.jet(y).map(|j| j[0])
    }

    /// Flux `(f f')' = f'² + f f''`.
    pub fn flux(&self, y: f64) -> Result<f64> {
        let [f, f1, f2] = self.jet(y)?;
        Ok(f1 * f1 + f * f2)
    }
}

/// Shock speed `λ = −[flux]/[u]` with flux `(u u_x)_x`.
pub fn rankine_hugoniot_speed(flux_jump: f64, value_jump: f64) -> Result<f64> {
    if value_jump == 0.0 {
        return Err(Error::ZeroJump);
    }
    Ok(-flux_jump / value_jump)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn saw_first_breakpoint_and_second_hump() {
        let saw = build_saw(1.0, 3).unwrap();
        let n = saw.pieces.len();
        let hump1 = saw.pieces[n - 1];
        assert!((hump1.z_left + 60f64.sqrt()).abs() < 1e-12);
        let hump2 = saw.pieces[n - 2].coeffs;
        assert!((hump2[0] + 4.0 * 60f64.sqrt()).abs() < 1e-12);
        assert!((hump2[1] + 5.0).abs() < 1e-12);
        assert_eq!(hump2[2], 0.0);
        assert_eq!(hump2[3], 1.0 / 60.0);
        let rho = saw.pieces[n - 2].z_left / hump1.z_left;
        assert!((rho - (17f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn saw_matching_conditions() {
        let saw = build_saw(1.0, 15).unwrap();
        for &zk in &saw.breakpoints {
            assert!(saw.value(zk).unwrap().abs() < 1e-12);
            let (l, r) = saw.slopes_at(zk).unwrap();
            assert!((l + r).abs() < 1e-12 * r.abs().max(1.0), "{l} {r}");
            // (g²)'' = 2(g'² + g g'') is continuous because g = 0 and |g'| matches
            let i = saw.piece_index(zk).unwrap();
            let jr = saw.pieces[i].jet3(zk);
            let jl = saw.pieces[i - 1].jet3(zk);
            let flux = |j: [f64; 4]| 2.0 * (j[1] * j[1] + j[0] * j[2]);
            assert!((flux(jr) - flux(jl)).abs() < 1e-10);
        }
    }

    #[test]
    fn saw_humps_positive_and_decaying() {
        let saw = build_saw(1.0, 12).unwrap();
        for p in &saw.pieces {
            let mid = 0.5 * (p.z_left + p.z_right);
            assert!(p.jet3(mid)[0] > 0.0);
        }
        let peaks = saw_peaks(&saw);
        for w in peaks.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        let bps: Vec<f64> = saw.pieces.iter().rev().map(|p| p.z_left).collect();
        let rho_max = (17f64.sqrt() - 1.0) / 2.0;
        for w in bps.windows(2) {
            let r = w[1] / w[0];
            assert!(r > 1.0 && r <= rho_max + 1e-12);
        }
    }

    #[test]
    fn saw_pieces_solve_critical_equation() {
        let saw = build_saw(1.0, 10).unwrap();
        for p in &saw.pieces {
            for k in 1..10 {
                let z = p.z_left + (p.z_right - p.z_left) * k as f64 / 10.0;
                assert!(residual(p, -0.1, z).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn saw_envelope_exponent() {
        let (c_env, e) = saw_envelope_fit(&build_saw(1.0, 12).unwrap()).unwrap();
        assert!((e + 1.0 / 3.0).abs() < 0.05, "{e}");
        assert!(c_env > 0.0);
        let (_, e4) = saw_envelope_fit(&build_saw(4.0, 12).unwrap()).unwrap();
        assert!((e - e4).abs() < 0.01);
        assert!(matches!(saw_envelope_fit(&build_saw(1.0, 5).unwrap()), Err(Error::InsufficientHumps { .. })));
    }

    #[test]
    fn saw_scaling_in_m() {
        let s1 = build_saw(1.0, 6).unwrap();
        let s4 = build_saw(4.0, 6).unwrap();
        for k in 0..60 {
            let z = s4.z_min() * k as f64 / 60.0;
            let lhs = s4.value(z).unwrap();
            let rhs = 8.0 * s1.value(z / 2.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn invariant_cubic_examples() {
        let g = invariant_cubic(InvariantCubic::I { c0: 0.0, c1: -1.0 });
        assert!(residual(&g, -0.1, -1.0).abs() < 1e-12);
        let g = invariant_cubic(InvariantCubic::II { c2: 0.0 });
        assert_eq!(g.pieces[0].coeffs, [0.0, 0.0, 0.0, 1.0 / 60.0]);
        let g = invariant_cubic(InvariantCubic::II { c2: 1.0 });
        for z in [-3.0, 0.0, 2.5, 11.0] {
            let r = residual(&g, -1.0, z);
            let scale = g.value(z).unwrap().abs().max(1.0);
            assert!(r.abs() < 1e-10 * scale, "{r}");
        }
    }

    #[test]
    fn pure_cubic_residual_by_hand() {
        // g = z³/60 at z = −2: g = −2/15, g' = 1/5, g'' = −1/5, g''' = 1/10,
        // (g g')'' = g g''' + 3 g' g'' = −2/15, and (1/3) g' z = −2/15.
        let g = invariant_cubic(InvariantCubic::II { c2: 0.0 });
        let by_hand: f64 = (-2.0 / 15.0) * 0.1 + 3.0 * 0.2 * (-0.2) - (1.0 / 3.0) * 0.2 * (-2.0);
        assert!(by_hand.abs() < 1e-15);
        assert!((residual(&g, 0.0, -2.0) - by_hand).abs() < 1e-15);
        // a generic cubic does not solve the α = 0 equation
        let h = invariant_cubic(InvariantCubic::I { c0: 0.0, c1: -1.0 });
        let hand: f64 = {
            let (z, g0, g1, g2, g3) = (-2.0, 2.0 - 8.0 / 60.0, -1.0 + 0.2, -0.2, 0.1);
            g0 * g3 + 3.0 * g1 * g2 - g1 * z / 3.0
        };
        assert!(hand.abs() > 0.1);
        assert!((residual(&h, 0.0, -2.0) - hand).abs() < 1e-14);
    }

    #[test]
    fn travelling_wave_examples() {
        let tw = tw_solution(-6.0, 0.0, TwKind::Parabola { b: 0.0 }).unwrap();
        for y in [-2.0, 0.5, 3.0] {
            assert!((tw.value(y).unwrap() - y * y).abs() < 1e-14);
            assert!((6.0 * y * y - tw.flux(y).unwrap()).abs() < 1e-12);
        }
        let s = tw_solution(0.0, 0.0, TwKind::SqrtBranch { a1: 1.0, a2: 0.0 }).unwrap();
        assert!(s.flux(2.0).unwrap().abs() < 1e-14);
        assert!(matches!(s.value(-1.0), Err(Error::Domain(_))));
        assert!(tw_solution(0.0, 1.0, TwKind::Parabola { b: 0.0 }).is_err());
    }

    #[test]
    fn rankine_hugoniot_examples() {
        assert_eq!(rankine_hugoniot_speed(0.0, -2.0).unwrap(), 0.0);
        assert_eq!(rankine_hugoniot_speed(1.0, -2.0).unwrap(), 0.5);
        assert!(matches!(rankine_hugoniot_speed(1.0, 0.0), Err(Error::ZeroJump)));
        // S₋: constants ±1 glued at the origin have no flux jump
        let l = tw_solution(0.0, 0.0, TwKind::Constant { c: 1.0 }).unwrap();
        let r = tw_solution(0.0, 0.0, TwKind::Constant { c: -1.0 }).unwrap();
        let speed = rankine_hugoniot_speed(
            r.flux(0.0).unwrap() - l.flux(0.0).unwrap(),
            r.value(0.0).unwrap() - l.value(0.0).unwrap(),
        );
        assert_eq!(speed.unwrap(), 0.0);
    }

    #[test]
    fn parabola_to_constant_speed() {
        let (lambda, a0) = (2.0, 1.0);
        let left = tw_solution(lambda, a0, TwKind::Parabola { b: 0.3 }).unwrap();
        let right = tw_solution(lambda, a0, TwKind::Constant { c: -a0 / lambda }).unwrap();
        let y = 0.5;
        let speed = rankine_hugoniot_speed(
            right.flux(y).unwrap() - left.flux(y).unwrap(),
            right.value(y).unwrap() - left.value(y).unwrap(),
        )
        .unwrap();
        assert!((speed - lambda).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn kind_one_residual_vanishes(c0 in -5.0..5.0f64, c1 in -5.0..5.0f64, z in -20.0..20.0f64) {
            let g = invariant_cubic(InvariantCubic::I { c0, c1 });
            prop_assert!(residual(&g, -0.1, z).abs() < 1e-10);
        }

        #[test]
        fn kind_two_residual_vanishes(idx in 0usize..3, z in -20.0..20.0f64) {
            let c2 = [-1.0, 0.3, 2.0][idx];
            let g = invariant_cubic(InvariantCubic::II { c2 });
            let scale = g.value(z).unwrap().abs().max(1.0);
            prop_assert!(residual(&g, -1.0, z).abs() < 1e-10 * scale);
        }
    }
}
