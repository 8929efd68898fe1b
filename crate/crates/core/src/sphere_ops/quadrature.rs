//! Gauss–Legendre quadrature and fully normalized associated Legendre
//! functions.
//!
//! The Legendre functions carry the Condon–Shortley phase and are normalized
//! so that `integral q_l^m(u)^2 du = 1` on `[-1, 1]`; spherical harmonics are
//! then `Y_lm = q_l^m(cos theta) e^{i m phi} / sqrt(2 pi)`.

use std::f64::consts::PI;

/// Gauss–Legendre nodes (ascending, strictly inside `(-1, 1)`) and weights.
///
/// Newton iteration on the degree-`n` Legendre polynomial from the Chebyshev
/// initial guess; exact for polynomial degree `<= 2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_poly_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // the Chebyshev guess enumerates nodes in descending order
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_poly_and_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_poly_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Table of normalized associated Legendre values `q_l^m(u)` for all
/// `0 <= m <= l <= l_max`, stored triangularly as `table[l][m]`.
pub fn normalized_assoc_legendre(l_max: usize, u: f64) -> Vec<Vec<f64>> {
    let sin_theta = (1.0 - u * u).max(0.0).sqrt();
    let mut table: Vec<Vec<f64>> = (0..=l_max).map(|l| vec![0.0; l + 1]).collect();
    table[0][0] = (0.5f64).sqrt();

    // diagonal: q_m^m = -sqrt((2m+1)/(2m)) sin(theta) q_{m-1}^{m-1}
    for m in 1..=l_max {
        let mf = m as f64;
        table[m][m] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta * table[m - 1][m - 1];
    }
    // first off-diagonal: q_{m+1}^m = sqrt(2m+3) u q_m^m
    for m in 0..l_max {
        table[m + 1][m] = (2.0 * m as f64 + 3.0).sqrt() * u * table[m][m];
    }
    // upward recurrence in l
    for m in 0..=l_max {
        for l in (m + 2)..=l_max {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            table[l][m] = a * (u * table[l - 1][m] - b * table[l - 2][m]);
        }
    }
    table
}

/// Signed-`m` lookup into a [`normalized_assoc_legendre`] table:
/// `q_l^{-m} = (-1)^m q_l^m`, zero outside `|m| <= l`.
pub fn q_signed(table: &[Vec<f64>], l: usize, m: i64) -> f64 {
    if m.unsigned_abs() as usize > l {
        return 0.0;
    }
    let am = m.unsigned_abs() as usize;
    let v = table[l][am];
    if m < 0 && am % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `d/d theta` of `q_l^m(cos theta)` from the signed-`m` ladder:
/// `dq = [sqrt((l-m)(l+m+1)) q_l^{m+1} - sqrt((l+m)(l-m+1)) q_l^{m-1}] / 2`.
pub fn dq_dtheta(table: &[Vec<f64>], l: usize, m: i64) -> f64 {
    let lf = l as f64;
    let mf = m as f64;
    let up = ((lf - mf) * (lf + mf + 1.0)).max(0.0).sqrt();
    let down = ((lf + mf) * (lf - mf + 1.0)).max(0.0).sqrt();
    0.5 * (up * q_signed(table, l, m + 1) - down * q_signed(table, l, m - 1))
}
