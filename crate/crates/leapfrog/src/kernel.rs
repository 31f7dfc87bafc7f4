//! The axisymmetric Green kernel `G = (ϱϱ')^{1/4} J(s)` in the `(ϱ, z)`
//! half-plane, its gradients and second derivatives, and the local
//! asymptotic expansions near the diagonal.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{eval_j, eval_j_prime};

/// A planar vector `(a, b)` stored as `a + i b`; multiplication by `i`
/// is the rotation by +π/2.
pub type Planar = Complex64;

/// A point `(ϱ, z)` with `ϱ = r²/2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    rho: f64,
    z: f64,
}

impl HalfPlanePoint {
    pub fn new(rho: f64, z: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::Domain {
                what: "rho",
                value: rho,
            });
        }
        if !z.is_finite() {
            return Err(Error::Domain { what: "z", value: z });
        }
        Ok(Self { rho, z })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn as_planar(&self) -> Planar {
        Planar::new(self.rho, self.z)
    }

    pub fn from_planar(p: Planar) -> Result<Self> {
        Self::new(p.re, p.im)
    }

    /// The point shifted by a planar displacement.
    pub fn shifted(&self, d: Planar) -> Result<Self> {
        Self::new(self.rho + d.re, self.z + d.im)
    }
}

/// Which argument of `G` a derivative acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

/// `s`-argument of `J` given both radii and the exact differences.
fn s_arg(r1: f64, r2: f64, drho: f64, dz: f64) -> f64 {
    let srt = r1.sqrt() + r2.sqrt();
    // 2(√ϱ−√ϱ')² = 2(ϱ−ϱ')²/(√ϱ+√ϱ')²
    (2.0 * drho * drho / (srt * srt) + dz * dz) / (2.0 * (r1 * r2).sqrt())
}

fn g_parts(r1: f64, r2: f64, drho: f64, dz: f64) -> Result<f64> {
    let s = s_arg(r1, r2, drho, dz);
    if s == 0.0 {
        return Err(Error::Singular);
    }
    Ok((r1 * r2).powf(0.25) * eval_j(s)?)
}

/// Green kernel `G(p, q)`.
pub fn eval_g(p: HalfPlanePoint, q: HalfPlanePoint) -> Result<f64> {
    g_parts(p.rho, q.rho, p.rho - q.rho, p.z - q.z)
}

/// `G(base + a, base + b)` with the difference `a − b` formed exactly,
/// which keeps precision when both displacements are tiny.
pub fn eval_g_displaced(base: HalfPlanePoint, a: Planar, b: Planar) -> Result<f64> {
    let p = base.shifted(a)?;
    let q = base.shifted(b)?;
    let d = a - b;
    g_parts(p.rho, q.rho, d.re, d.im)
}

fn grad_first(r1: f64, r2: f64, drho: f64, dz: f64) -> Result<Planar> {
    let s = s_arg(r1, r2, drho, dz);
    if s == 0.0 {
        return Err(Error::Singular);
    }
    let pref = (r1 * r2).powf(0.25);
    let root = (r1 * r2).sqrt();
    let j = eval_j(s)?;
    let jp = eval_j_prime(s)?;
    let ds_drho = (drho - 0.5 * dz * dz) / (2.0 * r1 * root);
    let ds_dz = dz / root;
    Ok(Planar::new(pref * (j / (4.0 * r1) + jp * ds_drho), pref * jp * ds_dz))
}

/// `∇_p G` (`which = First`) or `∇_q G` (`which = Second`), analytic in `J'`.
pub fn grad_g(p: HalfPlanePoint, q: HalfPlanePoint, which: Which) -> Result<Planar> {
    match which {
        Which::First => grad_first(p.rho, q.rho, p.rho - q.rho, p.z - q.z),
        Which::Second => grad_first(q.rho, p.rho, q.rho - p.rho, q.z - p.z),
    }
}

/// `|(2ϱ∂²_ϱ + ∂²_z) G|` in the first argument by central differences.
pub fn check_harmonic(p: HalfPlanePoint, q: HalfPlanePoint, h: f64) -> Result<f64> {
    let g = |dr: f64, dz: f64| -> Result<f64> { g_parts(p.rho + dr, q.rho, p.rho + dr - q.rho, p.z + dz - q.z) };
    let g0 = g(0.0, 0.0)?;
    let grr = (g(h, 0.0)? - 2.0 * g0 + g(-h, 0.0)?) / (h * h);
    let gzz = (g(0.0, h)? - 2.0 * g0 + g(0.0, -h)?) / (h * h);
    Ok((2.0 * p.rho * grr + gzz).abs())
}

/// Second derivatives `∂_a ∂_b G(P₁, P₂)` with the variables ordered
/// `(p₁₁, p₁₂, p₂₁, p₂₂)`, by central differences of the analytic gradient.
///
/// `step` is absolute; with `richardson` the `O(h²)` error is extrapolated away.
pub fn hessian(p1: HalfPlanePoint, p2: HalfPlanePoint, step: f64, richardson: bool) -> Result<[[f64; 4]; 4]> {
    let grad_all = |x: [f64; 4]| -> Result<[f64; 4]> {
        let a = HalfPlanePoint::new(x[0], x[1])?;
        let b = HalfPlanePoint::new(x[2], x[3])?;
        let g1 = grad_g(a, b, Which::First)?;
        let g2 = grad_g(a, b, Which::Second)?;
        Ok([g1.re, g1.im, g2.re, g2.im])
    };
    let base = [p1.rho, p1.z, p2.rho, p2.z];
    let central = |h: f64| -> Result<[[f64; 4]; 4]> {
        let mut out = [[0.0; 4]; 4];
        for col in 0..4 {
            let mut xp = base;
            let mut xm = base;
            xp[col] += h;
            xm[col] -= h;
            let (gp, gm) = (grad_all(xp)?, grad_all(xm)?);
            for row in 0..4 {
                out[row][col] = (gp[row] - gm[row]) / (2.0 * h);
            }
        }
        Ok(out)
    };
    let mut hs = central(step)?;
    if richardson {
        let half = central(0.5 * step)?;
        for r in 0..4 {
            for c in 0..4 {
                hs[r][c] = (4.0 * half[r][c] - hs[r][c]) / 3.0;
            }
        }
    }
    // symmetrise the two finite-difference estimates of each mixed derivative
    for r in 0..4 {
        for c in (r + 1)..4 {
            let m = 0.5 * (hs[r][c] + hs[c][r]);
            hs[r][c] = m;
            hs[c][r] = m;
        }
    }
    Ok(hs)
}

/// Which expansion a coefficient table belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionRole {
    /// Isotropic shifts `Z + εX`, `Z + εY`.
    Plain,
    /// Shifts scaled by `(2z₁)^{±1/4}` in the two components.
    Anisotropic,
    /// Gradient of the anisotropic expansion in the first point.
    Gradient,
}

/// Coefficients of an expansion `|ln ε| Σ aₙ εⁿ⁺ᵏ + Σ bₙ εⁿ⁺ᵏ`
/// (`k = 0` for values, `k = −1` for gradients).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTable<C> {
    pub role: ExpansionRole,
    pub log_coeffs: Vec<C>,
    pub reg_coeffs: Vec<C>,
}

impl ExpansionTable<f64> {
    pub fn evaluate(&self, eps: f64) -> f64 {
        let l = -eps.ln();
        let a: f64 = self
            .log_coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * eps.powi(n as i32))
            .sum();
        let b: f64 = self
            .reg_coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * eps.powi(n as i32))
            .sum();
        l * a + b
    }
}

impl ExpansionTable<Planar> {
    /// `|ln ε| Σ_{n=1..3} εⁿ⁻¹ 𝒞ₙ + Σ_{n=0..2} εⁿ⁻¹ 𝒟ₙ`; `log_coeffs[0]` is `𝒞₁`.
    pub fn evaluate(&self, eps: f64) -> Planar {
        let l = -eps.ln();
        let a: Planar = self
            .log_coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * eps.powi(n as i32))
            .sum();
        let b: Planar = self
            .reg_coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * eps.powi(n as i32 - 1))
            .sum();
        a * l + b
    }
}

fn check_eps(eps: f64) -> Result<f64> {
    crate::error::check_open("eps", eps, 0.0, 1.0)
}

/// Coefficients `𝒜₀..𝒜₃`, `ℬ₀..ℬ₂` for `G(Z+εX, Z+εY)`.
pub fn plain_table(z: HalfPlanePoint, x: Planar, y: Planar) -> Result<ExpansionTable<f64>> {
    let z1 = z.rho;
    let (x1, x2, y1, y2) = (x.re, x.im, y.re, y.im);
    let d1 = x1 - y1;
    let d2 = x2 - y2;
    let d = d1 * d1 + 2.0 * z1 * d2 * d2;
    if d <= 0.0 {
        return Err(Error::Degenerate("D = 0: coincident shifts"));
    }
    let e = d1 * d1 + z1 * d2 * d2;
    let sz = z1.sqrt();
    let ln8 = 8f64.ln();
    let p0 = d / (4.0 * z1 * z1);
    let lp = ln8 - 2.0 - 0.5 * p0.ln();
    let sum = x1 + y1;
    let a = vec![
        sz,
        sum / (4.0 * sz),
        (6.0 * z1 * d2 * d2 - 2.0 * x1 * y1 - 3.0 * x1 * x1 - 3.0 * y1 * y1) / (64.0 * z1.powf(1.5)),
        sum * (5.0 * x1 * x1 - 2.0 * x1 * y1 + 5.0 * y1 * y1 - 6.0 * z1 * d2 * d2) / (256.0 * z1.powf(2.5)),
    ];
    let quartic = 15.0 * x1.powi(4) - 12.0 * x1.powi(3) * y1 - 6.0 * x1 * x1 * y1 * y1 - 12.0 * x1 * y1.powi(3)
        + 15.0 * y1.powi(4)
        + 4.0 * z1 * d2 * d2 * (3.0 * x1 * x1 + 2.0 * x1 * y1 + 3.0 * y1 * y1);
    let b = vec![
        sz * lp,
        sum / (4.0 * sz) * lp + sum / (2.0 * sz) * e / d,
        (x1 * y1 - 1.5 * x1 * x1 - 1.5 * y1 * y1) / (16.0 * z1.powf(1.5)) * lp
            + sum * sum / (8.0 * z1.powf(1.5)) * e / d
            + (3.0 * ln8 - 1.0) / 16.0 * sz * p0
            + sum * sum / (4.0 * z1.powf(1.5)) * (e / d).powi(2)
            - 3.0 / 32.0 * sz * p0 * p0.ln()
            - quartic / (32.0 * z1.powf(1.5) * d),
    ];
    Ok(ExpansionTable {
        role: ExpansionRole::Plain,
        log_coeffs: a,
        reg_coeffs: b,
    })
}

/// `G(Z+εX, Z+εY)` from the plain expansion.
pub fn expand_g_plain(z: HalfPlanePoint, x: Planar, y: Planar, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(plain_table(z, x, y)?.evaluate(eps))
}

/// Anisotropic shift `X̃ = ((2z₁)^{1/4}x₁, (2z₁)^{-1/4}x₂)`.
pub fn anisotropic_shift(z1: f64, x: Planar) -> Planar {
    let q = (2.0 * z1).powf(0.25);
    Planar::new(q * x.re, x.im / q)
}

/// Script coefficient `ℬ₂(X, Y)` of the anisotropic expansion.
fn script_b2(z1: f64, x: Planar, y: Planar) -> f64 {
    let (x1, x2, y1, y2) = (x.re, x.im, y.re, y.im);
    let d1 = x1 - y1;
    let d2 = x2 - y2;
    let n2 = d1 * d1 + d2 * d2;
    let ln8 = 8f64.ln();
    let r2 = 2f64.sqrt();
    let sum = x1 + y1;
    let ratio = (d1 * d1 + 0.5 * d2 * d2) / n2;
    let quartic = 15.0 * x1.powi(4) + 15.0 * y1.powi(4)
        - 12.0 * x1.powi(3) * y1
        - 12.0 * x1 * y1.powi(3)
        - 6.0 * x1 * x1 * y1 * y1
        + (6.0 * x1 * x1 + 4.0 * x1 * y1 + 6.0 * y1 * y1) * d2 * d2;
    r2 / (16.0 * z1) * (x1 * y1 - 1.5 * x1 * x1 - 1.5 * y1 * y1) * (ln8 - 2.0 - 0.5 * n2.ln() + 0.75 * (2.0 * z1).ln())
        + r2 / (8.0 * z1) * sum * sum * ratio
        + r2 / (64.0 * z1) * (3.0 * ln8 - 1.0) * n2
        + r2 / (4.0 * z1) * sum * sum * ratio * ratio
        - 3.0 * r2 / (128.0 * z1) * n2 * (n2 / (2.0 * z1).powf(1.5)).ln()
        - r2 / (32.0 * z1) / n2 * quartic
}

/// Coefficients `𝒜₀..𝒜₃`, `ℬ₀..ℬ₂` of the anisotropically scaled expansion.
pub fn anisotropic_table(z: HalfPlanePoint, x: Planar, y: Planar) -> Result<ExpansionTable<f64>> {
    let z1 = z.rho;
    let (x1, x2, y1, y2) = (x.re, x.im, y.re, y.im);
    let d1 = x1 - y1;
    let d2 = x2 - y2;
    let n2 = d1 * d1 + d2 * d2;
    if n2 <= 0.0 {
        return Err(Error::Degenerate("X = Y"));
    }
    let sz = z1.sqrt();
    let ln8 = 8f64.ln();
    let sum = x1 + y1;
    let q = 2f64.powf(0.25) / (4.0 * z1.powf(0.25));
    let a = vec![
        sz,
        q * sum,
        2f64.sqrt() / (64.0 * z1) * (3.0 * d2 * d2 - 2.0 * x1 * y1 - 3.0 * x1 * x1 - 3.0 * y1 * y1),
        2f64.powf(0.75) / (256.0 * z1.powf(1.75))
            * sum
            * (5.0 * x1 * x1 - 2.0 * x1 * y1 + 5.0 * y1 * y1 - 3.0 * d2 * d2),
    ];
    let b = vec![
        sz * (ln8 - 2.0) - 0.5 * sz * n2.ln() + 0.75 * sz * (2.0 * z1).ln(),
        q * sum * (1.25 * ln8 + 0.75 * z1.ln() - 1.0 + d1 * d1 / n2 - 0.5 * n2.ln()),
        script_b2(z1, x, y),
    ];
    Ok(ExpansionTable {
        role: ExpansionRole::Anisotropic,
        log_coeffs: a,
        reg_coeffs: b,
    })
}

/// `G` at the anisotropically scaled points from the script expansion.
pub fn expand_g_anisotropic(z: HalfPlanePoint, x: Planar, y: Planar, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    Ok(anisotropic_table(z, x, y)?.evaluate(eps))
}

/// Coefficients `𝒞₁..𝒞₃`, `𝒟₀..𝒟₂` of `∇₁G` at the anisotropically scaled
/// points; `𝒟₂` is the scaled numerical X-gradient of `ℬ₂`.
pub fn gradient_table(z: HalfPlanePoint, x: Planar, y: Planar) -> Result<ExpansionTable<Planar>> {
    let z1 = z.rho;
    let (x1, x2, y1, y2) = (x.re, x.im, y.re, y.im);
    let d1 = x1 - y1;
    let d2 = x2 - y2;
    let n2 = d1 * d1 + d2 * d2;
    if n2 <= 0.0 {
        return Err(Error::Degenerate("X = Y"));
    }
    let sz = z1.sqrt();
    let q = (2.0 * z1).powf(0.25);
    let ln8 = 8f64.ln();
    let sum = x1 + y1;
    let c1 = Planar::new(1.0 / (4.0 * sz), 0.0);
    let c2 = Planar::new(-q * (y1 + 3.0 * x1), 3.0 * q.powi(3) * d2) / (32.0 * z1.powf(1.5));
    let c3 = Planar::new(
        15.0 * x1 * x1 + 6.0 * x1 * y1 + 3.0 * y1 * y1 - 3.0 * d2 * d2,
        -6.0 * (2.0 * z1).sqrt() * sum * d2,
    ) * (2f64.sqrt() / (256.0 * z1 * z1));
    let d0 = -sz * Planar::new(d1 / (q * n2), q * d2 / n2);
    let s2z = (2.0 * z1).sqrt();
    let d1c = Planar::new(
        1.25 * ln8 + 0.75 * z1.ln() - 1.0 - 0.5 * n2.ln() + (d1 * d1 + sum * d1) / n2
            - 2.0 * sum * d1.powi(3) / (n2 * n2),
        -s2z * sum * d2 / n2 - 2.0 * s2z * sum * d1 * d1 * d2 / (n2 * n2),
    ) / (4.0 * sz);
    let h = 1e-5 * n2.sqrt().max(1e-3);
    let db2_dx1 = (script_b2(z1, x + h, y) - script_b2(z1, x - h, y)) / (2.0 * h);
    let ih = Planar::new(0.0, h);
    let db2_dx2 = (script_b2(z1, x + ih, y) - script_b2(z1, x - ih, y)) / (2.0 * h);
    let d2c = Planar::new(db2_dx1 / q, q * db2_dx2);
    Ok(ExpansionTable {
        role: ExpansionRole::Gradient,
        log_coeffs: vec![c1, c2, c3],
        reg_coeffs: vec![d0, d1c, d2c],
    })
}

/// `∇₁G` (or `∇₂G` with `which = Second`, i.e. `X ↔ Y`) at the scaled points.
pub fn expand_grad_g(z: HalfPlanePoint, x: Planar, y: Planar, eps: f64, which: Which) -> Result<Planar> {
    check_eps(eps)?;
    let table = match which {
        Which::First => gradient_table(z, x, y)?,
        Which::Second => gradient_table(z, y, x)?,
    };
    Ok(table.evaluate(eps))
}

/// Leading limits of `|ln ε|^{-1}∂²G` along the leapfrog scaling
/// `p₁₁ − p₂₁ = r(2κ)^{1/4}x₁`, `p₁₂ − p₂₂ = r(2κ)^{-1/4}x₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDerivLimits {
    /// `|ln ε|^{-1}∂²_{p₁₁}G`
    pub d11_11: f64,
    /// `|ln ε|^{-1}∂²_{p₁₂}G`
    pub d12_12: f64,
    /// `|ln ε|^{-1}∂_{p₁₁}∂_{p₁₂}G`
    pub d11_12: f64,
}

/// Limits of the normalised second derivatives; independent of `ε` at
/// leading order (the remainder is `O(|ln ε|^{-1/2})`).
pub fn second_deriv_asymptotics(kappa: f64, eps: f64, x1: f64, x2: f64) -> Result<SecondDerivLimits> {
    crate::error::check_open("kappa", kappa, 0.0, f64::INFINITY)?;
    check_eps(eps)?;
    let r2 = x1 * x1 + x2 * x2;
    if r2 == 0.0 {
        return Err(Error::Degenerate("scaled separation is zero"));
    }
    let r4 = r2 * r2;
    let sk = kappa.sqrt();
    Ok(SecondDerivLimits {
        d11_11: (x1 * x1 - x2 * x2) / (2.0 * sk * r4),
        d12_12: -sk * (x1 * x1 - x2 * x2) / r4,
        d11_12: 2f64.sqrt() * x1 * x2 / r4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn pt(r: f64, z: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(r, z).unwrap()
    }

    #[test]
    fn symmetric_and_translation_invariant() {
        let (p, q) = (pt(1.0, 0.0), pt(2.0, 1.0));
        assert_abs_diff_eq!(eval_g(p, q).unwrap(), eval_g(q, p).unwrap(), epsilon = 1e-14);
        let shifted = eval_g(pt(1.0, 3.3), pt(2.0, 4.3)).unwrap();
        assert_abs_diff_eq!(shifted, eval_g(p, q).unwrap(), epsilon = 1e-13);
    }

    #[test]
    fn end_to_end_quadrature_oracle() {
        let (p, q) = (pt(1.0, 0.0), pt(1.0, 1.0));
        // s = 1/2 for these points
        let oracle = crate::quad::adaptive(0.0, PI, 1e-15, 1e-15, |t| t.cos() / (2.5 - 2.0 * t.cos()).sqrt()).unwrap();
        assert_abs_diff_eq!(eval_g(p, q).unwrap(), oracle, epsilon = 1e-10);
    }

    #[test]
    fn decreasing_in_vertical_separation() {
        let v: Vec<f64> = [0.1, 0.2, 0.5, 1.0]
            .iter()
            .map(|&z| eval_g(pt(1.0, 0.0), pt(1.0, z)).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn coincident_points_rejected() {
        assert_eq!(eval_g(pt(1.0, 0.0), pt(1.0, 0.0)), Err(Error::Singular));
        assert!(HalfPlanePoint::new(0.0, 1.0).is_err());
    }

    #[test]
    fn gradient_matches_differences() {
        let (p, q) = (pt(1.0, 0.0), pt(2.0, 1.0));
        let h = 1e-5;
        let g = grad_g(p, q, Which::First).unwrap();
        let fr = (eval_g(pt(1.0 + h, 0.0), q).unwrap() - eval_g(pt(1.0 - h, 0.0), q).unwrap()) / (2.0 * h);
        let fz = (eval_g(pt(1.0, h), q).unwrap() - eval_g(pt(1.0, -h), q).unwrap()) / (2.0 * h);
        assert_abs_diff_eq!(g.re, fr, epsilon = 1e-6);
        assert_abs_diff_eq!(g.im, fz, epsilon = 1e-6);
        let g2 = grad_g(p, q, Which::Second).unwrap();
        let fr2 = (eval_g(p, pt(2.0 + h, 1.0)).unwrap() - eval_g(p, pt(2.0 - h, 1.0)).unwrap()) / (2.0 * h);
        assert_abs_diff_eq!(g2.re, fr2, epsilon = 1e-6);
    }

    #[test]
    fn vertical_gradients_cancel() {
        let (p, q) = (pt(1.0, 0.0), pt(1.5, 0.3));
        let a = grad_g(p, q, Which::First).unwrap();
        let b = grad_g(p, q, Which::Second).unwrap();
        assert_abs_diff_eq!(a.im + b.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn harmonic_examples() {
        let r1 = check_harmonic(pt(1.0, 0.0), pt(2.0, 1.0), 1e-4).unwrap();
        let r2 = check_harmonic(pt(0.5, 0.0), pt(0.5, 2.0), 1e-4).unwrap();
        assert!(r1 < 1e-5 && r2 < 1e-5, "{r1:e} {r2:e}");
    }

    #[test]
    fn harmonic_stencil_is_second_order() {
        let (p, q) = (pt(1.0, 0.0), pt(1.2, 0.1));
        let a = check_harmonic(p, q, 2e-3).unwrap();
        let b = check_harmonic(p, q, 1e-3).unwrap();
        let ratio = a / b;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn plain_low_order_coefficients() {
        let t = plain_table(pt(1.0, 0.0), Planar::new(1.0, 0.0), Planar::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(t.log_coeffs[0], 1.0);
        assert_abs_diff_eq!(t.log_coeffs[1], 0.25);
        assert!(plain_table(pt(1.0, 0.0), Planar::new(0.3, 0.2), Planar::new(0.3, 0.2)).is_err());
    }

    #[test]
    fn anisotropic_b0_contains_distance_log() {
        let c: f64 = 0.7;
        let z = pt(0.6, 0.0);
        let t = anisotropic_table(z, Planar::new(c, 0.3), Planar::new(-c, 0.3)).unwrap();
        let sz = 0.6f64.sqrt();
        let rest = sz * (8f64.ln() - 2.0) + 0.75 * sz * 1.2f64.ln();
        assert_abs_diff_eq!(t.reg_coeffs[0] - rest, -0.5 * sz * (4.0 * c * c).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(t.log_coeffs[0], sz);
    }

    #[test]
    fn anisotropic_equals_plain_at_scaled_shifts() {
        let z = pt(0.45, 0.2);
        let (x, y) = (Planar::new(0.3, -0.7), Planar::new(-0.4, 0.2));
        let a = anisotropic_table(z, x, y).unwrap();
        let p = plain_table(z, anisotropic_shift(0.45, x), anisotropic_shift(0.45, y)).unwrap();
        for n in 0..4 {
            assert_abs_diff_eq!(a.log_coeffs[n], p.log_coeffs[n], epsilon = 1e-13);
        }
        for n in 0..3 {
            assert_abs_diff_eq!(a.reg_coeffs[n], p.reg_coeffs[n], epsilon = 1e-12);
        }
    }

    #[test]
    fn printed_gradient_coefficients_match_differentiated_values() {
        // 𝒞ₙ and 𝒟₀, 𝒟₁ against diag((2z)^{-1/4}, (2z)^{1/4}) ∇_X of 𝒜ₙ, ℬₙ
        let z = pt(0.6, 0.0);
        let (x, y) = (Planar::new(0.3, -0.7), Planar::new(-0.4, 0.2));
        let g = gradient_table(z, x, y).unwrap();
        let q = (1.2f64).powf(0.25);
        let h = 1e-6;
        let diff = |f: &dyn Fn(Planar) -> f64| {
            let dx1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let ih = Planar::new(0.0, h);
            let dx2 = (f(x + ih) - f(x - ih)) / (2.0 * h);
            Planar::new(dx1 / q, q * dx2)
        };
        for n in 1..4 {
            let v = diff(&|xx| anisotropic_table(z, xx, y).unwrap().log_coeffs[n]);
            assert_abs_diff_eq!(g.log_coeffs[n - 1].re, v.re, epsilon = 1e-8);
            assert_abs_diff_eq!(g.log_coeffs[n - 1].im, v.im, epsilon = 1e-8);
        }
        for n in 0..2 {
            let v = diff(&|xx| anisotropic_table(z, xx, y).unwrap().reg_coeffs[n]);
            assert_abs_diff_eq!(g.reg_coeffs[n].re, v.re, epsilon = 1e-8);
            assert_abs_diff_eq!(g.reg_coeffs[n].im, v.im, epsilon = 1e-8);
        }
    }

    #[test]
    fn second_derivative_limit_values() {
        let l = second_deriv_asymptotics(0.4, 1e-3, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(l.d11_11, 1.0 / (2.0 * 0.4f64.sqrt()), epsilon = 1e-15);
        let d = second_deriv_asymptotics(0.4, 1e-3, 0.8, 0.8).unwrap();
        assert_eq!(d.d11_11, 0.0);
        assert_eq!(d.d12_12, 0.0);
        assert!(second_deriv_asymptotics(0.4, 1e-3, 0.0, 0.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]
            #[test]
            fn symmetry(r1 in 0.05f64..3.0, z1 in -2.0f64..2.0, r2 in 0.05f64..3.0, z2 in -2.0f64..2.0) {
                prop_assume!((r1 - r2).abs() + (z1 - z2).abs() > 1e-3);
                let a = eval_g(pt(r1, z1), pt(r2, z2)).unwrap();
                let b = eval_g(pt(r2, z2), pt(r1, z1)).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }

            #[test]
            fn z_translation(r1 in 0.1f64..3.0, r2 in 0.1f64..3.0, dz in 0.05f64..2.0, c in -5.0f64..5.0) {
                let a = eval_g(pt(r1, 0.0), pt(r2, dz)).unwrap();
                let b = eval_g(pt(r1, c), pt(r2, dz + c)).unwrap();
                prop_assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0));
            }
        }
    }
}
