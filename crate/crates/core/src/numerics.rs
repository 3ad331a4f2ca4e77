//! Small numerical building blocks: interpolation, finite-difference
//! weights, quadrature and linear least squares.

use crate::error::{Error, Result};

/// Evaluates the quintic Hermite interpolant matching value, first and
/// second derivative at both ends of `[z0, z1]`. Returns `(g, g', g'')`.
pub fn quintic_hermite(z0: f64, j0: [f64; 3], z1: f64, j1: [f64; 3], z: f64) -> [f64; 3] {
    let h = z1 - z0;
    let s = (z - z0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    // basis polynomials and their first two s-derivatives
    let h0 = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        -60.0 * s + 180.0 * s2 - 120.0 * s3,
    ];
    let h1 = [
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        -36.0 * s + 96.0 * s2 - 60.0 * s3,
    ];
    let h2 = [
        0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
        s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4,
        1.0 - 9.0 * s + 18.0 * s2 - 10.0 * s3,
    ];
    let h3 = [10.0 * s3 - 15.0 * s4 + 6.0 * s5, 30.0 * s2 - 60.0 * s3 + 30.0 * s4, 60.0 * s - 180.0 * s2 + 120.0 * s3];
    let h4 = [-4.0 * s3 + 7.0 * s4 - 3.0 * s5, -12.0 * s2 + 28.0 * s3 - 15.0 * s4, -24.0 * s + 84.0 * s2 - 60.0 * s3];
    let h5 = [0.5 * s3 - s4 + 0.5 * s5, 1.5 * s2 - 4.0 * s3 + 2.5 * s4, 3.0 * s - 12.0 * s2 + 10.0 * s3];
    let mut out = [0.0; 3];
    let scale = [1.0, 1.0 / h, 1.0 / (h * h)];
    for k in 0..3 {
        out[k] = scale[k]
            * (h0[k] * j0[0]
                + h * h1[k] * j0[1]
                + h * h * h2[k] * j0[2]
                + h3[k] * j1[0]
                + h * h4[k] * j1[1]
                + h * h * h5[k] * j1[2]);
    }
    out
}

/// Fornberg's algorithm: weights `w[m][j]` such that the `m`-th derivative
/// at `x0` is approximated by `sum_j w[m][j] f(nodes[j])`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Uniform grid of `n` points on `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect()
        }
    }
}

/// Geometric sequence of `n` points from `a` to `b` (both positive).
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

/// Trapezoid rule on arbitrary sorted abscissae.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1])).sum()
}

/// Composite Simpson rule on a uniform grid; falls back to a trapezoid
/// panel for the last interval when the number of intervals is odd.
pub fn simpson_uniform(h: f64, y: &[f64]) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * h * (y[0] + y[1]);
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut s = y[0] + y[even];
    for (i, v) in y.iter().enumerate().take(even).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = s * h / 3.0;
    if even < intervals {
        total += 0.5 * h * (y[n - 2] + y[n - 1]);
    }
    total
}

/// Least-squares line `y = slope * x + intercept`; also returns the RMS
/// residual.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("degenerate abscissae in linear fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum::<f64>() / nf).sqrt();
    Ok((slope, intercept, rms))
}

/// Solves a small dense linear system by Gaussian elimination with partial
/// pivoting. `a` is row-major `n x n`.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Thomas algorithm for a tridiagonal system. `lower[0]` and
/// `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature. Returns `None` when the
/// requested accuracy is not reached within `max_intervals` subdivisions.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Option<(f64, f64)> {
    let mut intervals = vec![gk15(&f, a, b)];
    loop {
        let total: f64 = intervals.iter().map(|i| i.2).sum();
        let err: f64 = intervals.iter().map(|i| i.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return None;
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Some((total, err));
        }
        if intervals.len() >= max_intervals {
            return None;
        }
        let (idx, _) = intervals.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        intervals.push(gk15(&f, lo, mid));
        intervals.push(gk15(&f, mid, hi));
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64, f64) {
    const XK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_8,
    ];
    const WG: [f64; 4] =
        [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = WK[7] * fc;
    let mut rg = WG[3] * fc;
    for j in 0..7 {
        let x = h * XK[j];
        let s = f(c - x) + f(c + x);
        rk += WK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (a, b, rk * h, ((rk - rg) * h).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_hermite_reproduces_quintics() {
        let p = |z: f64| {
            [
                1.0 - 2.0 * z + 0.5 * z.powi(3) + 0.1 * z.powi(5),
                -2.0 + 1.5 * z * z + 0.5 * z.powi(4),
                3.0 * z + 2.0 * z.powi(3),
            ]
        };
        let (a, b) = (0.3, 1.7);
        for k in 0..=10 {
            let z = a + (b - a) * k as f64 / 10.0;
            let v = quintic_hermite(a, p(a), b, p(b), z);
            let e = p(z);
            for i in 0..3 {
                assert!((v[i] - e[i]).abs() < 1e-12, "{i} {z}");
            }
        }
    }

    #[test]
    fn fornberg_third_derivative_of_cubic() {
        let nodes = [0.0, 0.1, 0.25, 0.4, 0.6];
        let w = fornberg_weights(0.3, &nodes, 3);
        let f = |x: f64| 2.0 * x.powi(3) - x;
        let d3: f64 = nodes.iter().zip(&w[3]).map(|(x, c)| c * f(*x)).sum();
        assert!((d3 - 12.0).abs() < 1e-8);
        let d1: f64 = nodes.iter().zip(&w[1]).map(|(x, c)| c * f(*x)).sum();
        assert!((d1 - (6.0 * 0.09 - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let x = linspace(0.0, 2.0, 11);
        let y: Vec<f64> = x.iter().map(|v| v.powi(3)).collect();
        assert!((simpson_uniform(0.2, &y) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let lower = [0.0, -1.0, -1.0, -1.0];
        let diag = [2.0, 2.0, 2.0, 2.0];
        let upper = [-1.0, -1.0, -1.0, 0.0];
        let rhs = [1.0, 0.0, 0.0, 1.0];
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_kronrod_smooth_and_singular() {
        let (v, _) = gauss_kronrod(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-13, 1e-13, 200).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!(gauss_kronrod(|x| 1.0 / (x * x), 0.0, 1.0, 1e-10, 1e-10, 500).is_none());
    }
}
