use nde_lab::ode::{integrate, OdeSettings, Trajectory};

const A0: f64 = 2.0 / 9.0 * 1.732_050_807_568_877_2;

fn solve(sign: f64) -> Trajectory {
    let s = OdeSettings { max_step: 0.01, ..OdeSettings::default() };
    integrate(
        move |z, y, d| {
            d[0] = y[1];
            d[1] = sign * z * y[0] / 3.0;
        },
        &[1.0, 0.3],
        (0.0, -40.0),
        &s,
        &[],
    )
    .unwrap()
}

fn zeros(tr: &Trajectory) -> Vec<f64> {
    let mut out = Vec::new();
    for (w, s) in tr.times.windows(2).zip(tr.states.windows(2)) {
        let (a, b) = (s[0][0], s[1][0]);
        if a * b < 0.0 {
            out.push(w[0] - a * (w[1] - w[0]) / (b - a));
        }
    }
    out
}

/// Local frequency `π / Δz` between consecutive zeros against the phase
/// derivative `(3/2) a0 |z|^{1/2}` of `a0 |z|^{3/2}`.
#[test]
fn tail_equation_oscillates_with_airy_frequency() {
    let zs = zeros(&solve(1.0));
    assert!(zs.len() > 20);
    for w in zs.windows(2).filter(|w| w[0] < -5.0) {
        let mid = 0.5 * (w[0] + w[1]).abs();
        let measured = std::f64::consts::PI / (w[0] - w[1]).abs();
        let predicted = 1.5 * A0 * mid.sqrt();
        assert!((measured / predicted - 1.0).abs() < 0.02, "z = {mid}: {measured} vs {predicted}");
    }
}

/// With the opposite sign the left half-line is the evanescent side.
#[test]
fn opposite_sign_does_not_oscillate_on_the_left() {
    let tr = solve(-1.0);
    assert!(zeros(&tr).len() <= 1);
    assert!(tr.last_state()[0].abs() > 1e6);
}
