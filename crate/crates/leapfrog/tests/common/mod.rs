//! Direct-quadrature realizations of the torus operators, used as
//! independent oracles for the mode-wise implementations.

#![allow(dead_code)]

use std::f64::consts::PI;

use leapfrog::quad;
use leapfrog::spectral::FourierSeries;

/// `(1/2π)∫₀^{2π} ln|sin(u/2)| f(u) du`, graded toward both endpoints.
pub fn log_sin_average<F: Fn(f64) -> f64>(f: F) -> f64 {
    let g = |u: f64| (0.5 * u).sin().abs().ln();
    let left = quad::graded(0.0, PI, 0.15, 40, 20, |u| g(u) * f(u));
    let right = quad::graded(0.0, PI, 0.15, 40, 20, |v| g(2.0 * PI - v) * f(2.0 * PI - v));
    (left + right) / (2.0 * PI)
}

/// `−(1/π)∫₀^π sin^m(η/2) ln sin(η/2) cos(nη) dη`.
pub fn inm_quadrature(m: u32, n: i64) -> f64 {
    let f = |e: f64| {
        let s = (0.5 * e).sin();
        s.powi(m as i32) * s.ln() * (n as f64 * e).cos()
    };
    let panels = 16;
    let h = PI / panels as f64;
    let first = quad::graded(0.0, h, 0.15, 40, 20, f);
    let rest = quad::composite(h, PI, panels - 1, 30, f);
    -(first + rest) / PI
}

/// `⨍ (h(η) − h(θ)) cot((η−θ)/2) dη` by the trapezoid rule on a grid
/// offset from `θ`.
pub fn hilbert_pv(h: &FourierSeries, theta: f64, n: usize) -> f64 {
    let h0 = h.eval(theta);
    (0..n)
        .map(|k| {
            let u = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            (h.eval(theta + u) - h0) / (0.5 * u).tan()
        })
        .sum::<f64>()
        / n as f64
}

fn trapezoid<F: Fn(f64) -> f64>(n: usize, f: F) -> f64 {
    (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).sum::<f64>() / n as f64
}

/// `∂θ[−g₃ ⨍ (cos(θ+2η) + cos(2θ+η)) h(η) dη]`.
pub fn ds_quadrature(h: &FourierSeries, g3: f64, theta: f64) -> f64 {
    -g3 * trapezoid(64, |e| {
        (-(theta + 2.0 * e).sin() - 2.0 * (2.0 * theta + e).sin()) * h.eval(e)
    })
}

/// `−4g₃ ∂θ ⨍ ln|sin((θ−η)/2)| (cos θ + cos η) h(η) dη`, differentiated
/// under the integral after the shift `η = θ − u`.
pub fn hu0_quadrature(h: &FourierSeries, g3: f64, theta: f64) -> f64 {
    let dh = h.derivative();
    let (c, s) = (theta.cos(), theta.sin());
    -4.0 * g3
        * log_sin_average(|u| {
            let e = theta - u;
            -s * h.eval(e) + (c + e.cos()) * dh.eval(e) - e.sin() * h.eval(e)
        })
}

/// `∂θ` of the mode-one operator from its defining integrals:
/// `−(1/8)(2p₁₁)^{−3/2}(cos θ ⨍h cos + 3 sin θ ⨍h sin) + |ln ε|⁻¹p₁₁^{−1/2} ⨍ h⋆(η) ∇²G[𝒵(θ), 𝒵⋆(η)] dη`
/// with `𝒵(θ) = ((2p₁₁)^{1/4} cos θ, (2p₁₁)^{−1/4} sin θ)`, `𝒵⋆` likewise with `p₂₁`,
/// and `cross[a][b] = ∂_{p₁,a}∂_{p₂,b}G`.
pub fn dq_quadrature(
    h: &FourierSeries,
    h_star: &FourierSeries,
    p11: f64,
    p21: f64,
    log_eps: f64,
    cross: [[f64; 2]; 2],
    theta: f64,
) -> f64 {
    let n = 64;
    let hc = trapezoid(n, |e| h.eval(e) * e.cos());
    let hs = trapezoid(n, |e| h.eval(e) * e.sin());
    let local = -(2.0 * p11).powf(-1.5) / 8.0 * (-theta.sin() * hc + 3.0 * theta.cos() * hs);
    let (a, b) = ((2.0 * p11).powf(0.25), (2.0 * p21).powf(0.25));
    let dz = [-a * theta.sin(), theta.cos() / a];
    let coupling = trapezoid(n, |e| {
        let zs = [b * e.cos(), e.sin() / b];
        let mut acc = 0.0;
        for i in 0..2 {
            for k in 0..2 {
                acc += dz[i] * zs[k] * cross[i][k];
            }
        }
        h_star.eval(e) * acc
    });
    local + coupling / (p11.sqrt() * log_eps)
}

/// Sample a series' values at a few angles.
pub fn probe_angles() -> [f64; 5] {
    [0.0, 0.4, 1.3, 2.9, 5.1]
}
