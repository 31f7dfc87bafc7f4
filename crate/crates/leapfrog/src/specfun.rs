//! The auxiliary function `J(s) = ∫₀^π cosθ (s+2−2cosθ)^{-1/2} dθ`, its
//! small-`s` series, the Legendre function `Q_{1/2}`, and identity checks.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{check_open, Error, Result};
use crate::quad;

/// Relative agreement required between successive panel doublings.
pub const DEFAULT_TOL: f64 = 1e-14;

/// Coefficients of `J(s) = |ln s| Σ Aₙ sⁿ + Σ Bₙ sⁿ` near `s = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct JSeriesCoeffs {
    pub a: [f64; 4],
    pub b: [f64; 3],
}

impl JSeriesCoeffs {
    pub fn new() -> Self {
        let ln8 = 8f64.ln();
        Self {
            a: [0.5, 3.0 / 32.0, -15.0 / 2048.0, 105.0 / 98304.0],
            b: [
                ln8 - 2.0,
                -1.0 / 16.0 + 3.0 / 16.0 * ln8,
                31.0 / 2048.0 - 15.0 / 1024.0 * ln8,
            ],
        }
    }
}

impl Default for JSeriesCoeffs {
    fn default() -> Self {
        Self::new()
    }
}

/// Integrand choice: `J` itself or its derivative `J'`.
#[derive(Clone, Copy)]
enum Kind {
    Value,
    Derivative,
}

/// Doubling composite Gauss–Legendre until two passes agree.
fn doubling<F: Fn(f64) -> f64>(a: f64, b: f64, tol: f64, f: F) -> Result<f64> {
    let mut panels = 1;
    let mut prev = quad::composite(a, b, panels, 20, &f);
    for _ in 0..12 {
        panels *= 2;
        let cur = quad::composite(a, b, panels, 20, &f);
        if (cur - prev).abs() <= tol * cur.abs().max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        what: "J integral",
        change: (prev - quad::composite(a, b, panels / 2, 20, &f)).abs(),
    })
}

fn j_integral(s: f64, kind: Kind, tol: f64) -> Result<f64> {
    check_open("s", s, 0.0, f64::INFINITY)?;
    let a = s + 2.0;
    let sa = a.sqrt();
    // With b = s + 2 − 2cosθ, subtracting the θ-independent value a = s+2 gives
    // sign-definite integrands (∫cosθ dθ = 0), free of cancellation for large s.
    let value_far = |th: f64| {
        let c = th.cos();
        let b = a - 2.0 * c;
        let sb = b.sqrt();
        2.0 * c * c / (sa * sb * (sa + sb))
    };
    let deriv_far = |th: f64| {
        let c = th.cos();
        let b = a - 2.0 * c;
        let sb = b.sqrt();
        -(c * c) * (a + sa * sb + b) / ((sa + sb) * a * sa * b * sb)
    };
    if s >= 1.0 {
        return match kind {
            Kind::Value => doubling(0.0, PI, tol, value_far),
            Kind::Derivative => doubling(0.0, PI, tol, deriv_far),
        };
    }
    // θ ∈ [0, π/2]: sin(θ/2) = (√s/2) sinh v removes the near-singularity at θ = 0.
    let vmax = (2f64.sqrt() / s.sqrt()).asinh();
    let near = |v: f64| {
        let t = 0.5 * s.sqrt() * v.sinh();
        let t2 = t * t;
        let root = (1.0 - t2).sqrt();
        match kind {
            Kind::Value => (1.0 - 2.0 * t2) / root,
            Kind::Derivative => {
                let ch = v.cosh();
                -0.5 * (1.0 - 2.0 * t2) / (s * ch * ch * root)
            }
        }
    };
    let lower = doubling(0.0, vmax, tol, near)?;
    let upper = match kind {
        Kind::Value => doubling(FRAC_PI_2, PI, tol, |th| th.cos() / (a - 2.0 * th.cos()).sqrt())?,
        Kind::Derivative => doubling(FRAC_PI_2, PI, tol, |th| {
            let b = a - 2.0 * th.cos();
            -0.5 * th.cos() / (b * b.sqrt())
        })?,
    };
    Ok(lower + upper)
}

/// Below this `s` the closed elliptic form is used; above it the
/// cancellation in `(s+2)K − (s+4)E` grows like `s²` and the quadrature
/// takes over.
const ELLIPTIC_MAX_S: f64 = 4.0;

/// Complete elliptic integrals `(K, E)` of modulus `k`, given `k'² = 1 − k²`,
/// by the arithmetic–geometric mean.
pub fn elliptic_ke(k_prime_sq: f64) -> Result<(f64, f64)> {
    check_open("k'^2", k_prime_sq, 0.0, 1.0 + f64::EPSILON)?;
    let (mut a, mut b) = (1.0f64, k_prime_sq.sqrt());
    let mut sum = 0.5 * (1.0 - k_prime_sq);
    let mut weight = 0.5;
    for _ in 0..40 {
        let c = 0.5 * (a - b);
        weight *= 2.0;
        sum += weight * c * c;
        let next = (a * b).sqrt();
        a = 0.5 * (a + b);
        b = next;
        if c.abs() <= 1e-17 * a {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    Ok((k, k * (1.0 - sum)))
}

/// `J` and `J'` from `J = ((s+2)K − (s+4)E)/√(s+4)` with `k² = 4/(s+4)`.
fn j_elliptic(s: f64) -> Result<(f64, f64)> {
    let m = s + 4.0;
    let (k, e) = elliptic_ke(s / m)?;
    let root = m.sqrt();
    let n = (s + 2.0) * k - m * e;
    let dn = 0.5 * (k - e) - (s + 2.0) * e / (2.0 * s) + (s + 2.0) * k / (2.0 * m);
    Ok((n / root, dn / root - n / (2.0 * m * root)))
}

/// `J(s)` to relative accuracy about [`DEFAULT_TOL`].
pub fn eval_j(s: f64) -> Result<f64> {
    check_open("s", s, 0.0, f64::INFINITY)?;
    if s < ELLIPTIC_MAX_S {
        return Ok(j_elliptic(s)?.0);
    }
    j_integral(s, Kind::Value, DEFAULT_TOL)
}

/// `J(s)` with an explicit doubling tolerance.
pub fn eval_j_tol(s: f64, tol: f64) -> Result<f64> {
    j_integral(s, Kind::Value, tol)
}

/// `J'(s) = −½ ∫₀^π cosθ (s+2−2cosθ)^{-3/2} dθ`.
pub fn eval_j_prime(s: f64) -> Result<f64> {
    check_open("s", s, 0.0, f64::INFINITY)?;
    if s < ELLIPTIC_MAX_S {
        return Ok(j_elliptic(s)?.1);
    }
    j_integral(s, Kind::Derivative, DEFAULT_TOL)
}

/// `J'(s)` by quadrature with an explicit doubling tolerance.
pub fn eval_j_prime_tol(s: f64, tol: f64) -> Result<f64> {
    j_integral(s, Kind::Derivative, tol)
}

/// Truncated small-`s` series `|ln s| Σ_{n≤n_max} Aₙ sⁿ + Σ_{n≤min(n_max,2)} Bₙ sⁿ`.
///
/// No `B₃` is available, so for `n_max = 3` the regular part stops at `s²`
/// and the truncation error is `O(s³)` rather than `O(s⁴ |ln s|)`.
pub fn eval_j_series(s: f64, n_max: usize) -> Result<f64> {
    check_open("s", s, 0.0, 4.0)?;
    if n_max > 3 {
        return Err(Error::Invalid(format!("series order {n_max} exceeds 3")));
    }
    let c = JSeriesCoeffs::new();
    let l = s.ln().abs();
    let log_part: f64 = (0..=n_max).map(|n| c.a[n] * s.powi(n as i32)).sum();
    let reg_part: f64 = (0..=n_max.min(2)).map(|n| c.b[n] * s.powi(n as i32)).sum();
    Ok(l * log_part + reg_part)
}

/// Default finite-difference step for the ODE check.
pub fn default_ode_step(s: f64) -> f64 {
    (1e-4f64).max(1e-3 * s)
}

fn ode_residual_with(s: f64, h: f64, j: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    if !(h > 0.0 && h < s) {
        return Err(Error::Domain { what: "h", value: h });
    }
    let (jm, j0, jp) = (j(s - h)?, j(s)?, j(s + h)?);
    let d1 = (jp - jm) / (2.0 * h);
    let d2 = (jp - 2.0 * j0 + jm) / (h * h);
    Ok((s * (s + 4.0) * d2 + 2.0 * (s + 2.0) * d1 - 0.75 * j0).abs())
}

/// `|s(s+4)J'' + 2(s+2)J' − ¾J|` with `J'`, `J''` by central differences of `J`.
pub fn check_j_ode(s: f64, h: f64) -> Result<f64> {
    ode_residual_with(s, h, eval_j)
}

/// Same residual with `J` evaluated at a chosen quadrature tolerance.
pub fn check_j_ode_tol(s: f64, h: f64, tol: f64) -> Result<f64> {
    ode_residual_with(s, h, |x| eval_j_tol(x, tol))
}

/// Residual with Richardson-extrapolated differences (steps `h` and `h/2`),
/// removing the `O(h²)` stencil error.
pub fn check_j_ode_richardson(s: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h < s) {
        return Err(Error::Domain { what: "h", value: h });
    }
    let diffs = |h: f64| -> Result<(f64, f64)> {
        let (jm, j0, jp) = (eval_j(s - h)?, eval_j(s)?, eval_j(s + h)?);
        Ok(((jp - jm) / (2.0 * h), (jp - 2.0 * j0 + jm) / (h * h)))
    };
    let (a1, a2) = diffs(h)?;
    let (b1, b2) = diffs(0.5 * h)?;
    let d1 = (4.0 * b1 - a1) / 3.0;
    let d2 = (4.0 * b2 - a2) / 3.0;
    let j0 = eval_j(s)?;
    Ok((s * (s + 4.0) * d2 + 2.0 * (s + 2.0) * d1 - 0.75 * j0).abs())
}

/// `Q_{1/2}(x) = ∫₀^π cosθ (2x − 2cosθ)^{-1/2} dθ` for `x > 1`, evaluated by
/// adaptive Gauss–Kronrod directly in θ (independent of the `J` path).
pub fn legendre_q_half(x: f64) -> Result<f64> {
    check_open("x", x, 1.0, f64::INFINITY)?;
    let d = 2.0 * (x - 1.0);
    // 2x − 2cosθ = d + 4sin²(θ/2), written without cancellation.
    let f = |th: f64| {
        let sh = (0.5 * th).sin();
        th.cos() / (d + 4.0 * sh * sh).sqrt()
    };
    // Split where the near-singular scale √d sits so bisection starts well.
    let knee = d.sqrt().min(1.0);
    let a = quad::adaptive(0.0, knee, 1e-15, 1e-14, f)?;
    let b = quad::adaptive(knee, PI, 1e-15, 1e-14, f)?;
    Ok(a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Composite Simpson with a large, fixed panel count.
    fn simpson(s: f64, n: usize) -> f64 {
        let h = PI / n as f64;
        let f = |t: f64| t.cos() / (s + 2.0 - 2.0 * t.cos()).sqrt();
        let mut acc = f(0.0) + f(PI);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn elliptic_form_matches_quadrature() {
        for k in 0..60 {
            let s = 10f64.powf(-9.0 + 0.16 * k as f64);
            let (j, jp) = j_elliptic(s).unwrap();
            let q = eval_j_tol(s, 1e-15).unwrap();
            let qp = eval_j_prime_tol(s, 1e-15).unwrap();
            assert!((j - q).abs() <= 2e-14 * q.abs().max(1.0), "J at {s}: {j} vs {q}");
            assert!((jp - qp).abs() <= 2e-13 * qp.abs(), "J' at {s}: {jp} vs {qp}");
        }
    }

    #[test]
    fn elliptic_special_values() {
        let (k, e) = elliptic_ke(1.0).unwrap();
        assert_abs_diff_eq!(k, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(e, FRAC_PI_2, epsilon = 1e-15);
        // k² = ½: K = Γ(1/4)²/(4√π)
        let (k, _) = elliptic_ke(0.5).unwrap();
        assert_abs_diff_eq!(k, 1.854_074_677_301_372, epsilon = 1e-14);
    }

    #[test]
    fn series_coefficients_exact() {
        let c = JSeriesCoeffs::new();
        assert_eq!(c.a, [0.5, 3.0 / 32.0, -15.0 / 2048.0, 105.0 / 98304.0]);
        assert_eq!(c.b[0], 8f64.ln() - 2.0);
    }

    #[test]
    fn far_field_oracle() {
        // (s+2−2c)^{-1/2} = s^{-1/2}(1 − (1−c)/s + …) ⇒ J ≈ (π/2)s^{-3/2}
        let s = 1e8;
        let j = eval_j(s).unwrap();
        let oracle = FRAC_PI_2 * s.powf(-1.5);
        assert!(((j - oracle) / oracle).abs() < 5e-4);
    }

    #[test]
    fn simpson_oracle_at_one() {
        let j = eval_j(1.0).unwrap();
        assert_abs_diff_eq!(j, simpson(1.0, 1_000_000), epsilon = 1e-10);
    }

    #[test]
    fn small_s_matches_series() {
        let s: f64 = 1e-4;
        let err = (eval_j(s).unwrap() - eval_j_series(s, 3).unwrap()).abs();
        assert!(err <= 10.0 * s.powi(4) * s.ln().abs(), "err = {err:e}");
    }

    #[test]
    fn series_examples() {
        assert_eq!(eval_j_series(1.0, 0).unwrap(), 8f64.ln() - 2.0);
        let j = eval_j(0.5).unwrap();
        let e3 = (j - eval_j_series(0.5, 3).unwrap()).abs();
        let e1 = (j - eval_j_series(0.5, 1).unwrap()).abs();
        assert!(e3 < e1);
        assert!((eval_j(0.01).unwrap() - eval_j_series(0.01, 2).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn series_domain() {
        assert!(eval_j_series(4.0, 1).is_err());
        assert!(eval_j_series(-1.0, 1).is_err());
        assert!(eval_j_series(0.5, 4).is_err());
        assert!(eval_j(0.0).is_err());
        assert!(eval_j(-2.0).is_err());
    }

    #[test]
    fn ode_examples() {
        assert!(check_j_ode(1.0, default_ode_step(1.0)).unwrap() < 1e-5);
        assert!(check_j_ode(0.1, default_ode_step(0.1)).unwrap() < 1e-4);
        assert!(check_j_ode(10.0, default_ode_step(10.0)).unwrap() < 1e-6);
    }

    #[test]
    fn ode_residual_improves_with_precision() {
        let s = 2.0;
        let coarse = check_j_ode_tol(s, 1e-4, 1e-5).unwrap();
        let fine = check_j_ode_tol(s, 1e-4, 1e-14).unwrap();
        assert!(fine <= coarse, "fine {fine:e} coarse {coarse:e}");
    }

    #[test]
    fn derivative_matches_differences() {
        for s in [0.01, 0.3, 1.0, 7.0, 120.0] {
            let h = 1e-5 * s;
            let fd = (eval_j(s + h).unwrap() - eval_j(s - h).unwrap()) / (2.0 * h);
            let d = eval_j_prime(s).unwrap();
            assert!(((fd - d) / d).abs() < 1e-7, "s = {s}");
        }
    }

    #[test]
    fn legendre_identity() {
        assert_abs_diff_eq!(legendre_q_half(1.5).unwrap(), eval_j(1.0).unwrap(), epsilon = 1e-10);
        assert_abs_diff_eq!(legendre_q_half(2.0).unwrap(), eval_j(2.0).unwrap(), epsilon = 1e-10);
        let q = legendre_q_half(1.0001).unwrap();
        assert!(q.is_finite() && q > 0.0 && q < 10.0);
        assert!(legendre_q_half(1.0).is_err());
    }

    #[test]
    fn j_decreasing_on_log_grid() {
        let vals: Vec<f64> = (0..60)
            .map(|k| eval_j(10f64.powf(-6.0 + 0.2 * k as f64)).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn consistent_across_branch_switch(s in 0.05f64..20.0) {
                // the s ≥ 1 and s < 1 branches must agree with the θ-direct path
                let j = eval_j(s).unwrap();
                let q = legendre_q_half(0.5 * s + 1.0).unwrap();
                prop_assert!((j - q).abs() <= 1e-11 * j.abs().max(1.0));
            }

            #[test]
            fn positive(s in 1e-8f64..1e6) {
                prop_assert!(eval_j(s).unwrap() > 0.0);
            }
        }
    }
}
