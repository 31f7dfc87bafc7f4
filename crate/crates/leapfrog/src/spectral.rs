//! Fourier toolkit on the circle and the 2-torus: sparse mode series, the
//! Hilbert transform, the log-kernel multipliers `Λₘ`, the finite-rank
//! operators `∂θS`, `H_{u,0}` and `∂θQ`, integral-identity checks and the
//! small-divisor transport inverter with its admissibility scan.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Debug;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quad::CornerRule;

/// Index of a Fourier mode: `n` for `e^{inθ}` or `(ℓ, j)` for `e^{i(ℓφ+jθ)}`.
pub trait ModeIndex: Copy + Ord + Debug + Send + Sync {
    fn neg(self) -> Self;
    fn zero() -> Self;
}

impl ModeIndex for i64 {
    fn neg(self) -> Self {
        -self
    }
    fn zero() -> Self {
        0
    }
}

impl ModeIndex for (i64, i64) {
    fn neg(self) -> Self {
        (-self.0, -self.1)
    }
    fn zero() -> Self {
        (0, 0)
    }
}

/// Sparse Fourier series. With the reality flag set every write keeps
/// `c₋ₖ = conj(cₖ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries<I: ModeIndex = i64> {
    modes: BTreeMap<I, Complex64>,
    real: bool,
}

impl<I: ModeIndex> Default for FourierSeries<I> {
    fn default() -> Self {
        Self::real()
    }
}

impl<I: ModeIndex> FourierSeries<I> {
    pub fn real() -> Self {
        Self {
            modes: BTreeMap::new(),
            real: true,
        }
    }

    pub fn complex() -> Self {
        Self {
            modes: BTreeMap::new(),
            real: false,
        }
    }

    /// Build from explicit coefficients; for a real series a missing
    /// partner is filled in and inconsistent partners are rejected.
    pub fn from_modes<It: IntoIterator<Item = (I, Complex64)>>(modes: It, real: bool) -> Result<Self> {
        let mut out = if real { Self::real() } else { Self::complex() };
        for (k, c) in modes {
            if real {
                if let Some(prev) = out.modes.get(&k) {
                    if (prev - c).norm() > 1e-12 * (1.0 + c.norm()) {
                        return Err(Error::Invalid(format!("mode {k:?} breaks conjugate symmetry")));
                    }
                }
                if k == I::zero() && c.im.abs() > 1e-12 * (1.0 + c.re.abs()) {
                    return Err(Error::Invalid("mean of a real series must be real".into()));
                }
            }
            out.set(k, c);
        }
        Ok(out)
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coeff(&self, k: I) -> Complex64 {
        self.modes.get(&k).copied().unwrap_or_default()
    }

    pub fn set(&mut self, k: I, c: Complex64) {
        if self.real {
            if k == I::zero() {
                self.modes.insert(k, Complex64::new(c.re, 0.0));
                return;
            }
            self.modes.insert(k.neg(), c.conj());
        }
        self.modes.insert(k, c);
    }

    pub fn add_to(&mut self, k: I, c: Complex64) {
        let v = self.coeff(k) + c;
        if self.real || k == I::zero() {
            self.set(k, v);
        } else {
            self.modes.insert(k, v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (I, Complex64)> + '_ {
        self.modes.iter().map(|(k, c)| (*k, *c))
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mean(&self) -> Complex64 {
        self.coeff(I::zero())
    }

    /// Apply a mode-wise map. The reality flag is kept only if `real_out`.
    pub fn map_modes<F: Fn(I, Complex64) -> Complex64>(&self, real_out: bool, f: F) -> Self {
        FourierSeries {
            modes: self.modes.iter().map(|(k, c)| (*k, f(*k, *c))).collect(),
            real: real_out && self.real,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_modes(true, |_, c| c * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = FourierSeries {
            modes: self.modes.clone(),
            real: self.real && other.real,
        };
        for (k, c) in other.iter() {
            *out.modes.entry(k).or_default() += c;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Drop coefficients with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        FourierSeries {
            modes: self
                .modes
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(k, c)| (*k, *c))
                .collect(),
            real: self.real,
        }
    }

    /// `(Σ |cₖ|²)^{1/2}`, the normalized L² norm.
    pub fn l2_norm(&self) -> f64 {
        self.modes.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Normalized L² inner product `Σ cₖ conj(dₖ)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.modes.iter().map(|(k, c)| c * other.coeff(*k).conj()).sum()
    }
}

fn fft_forward(buf: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

fn signed_mode(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

impl FourierSeries<i64> {
    pub fn constant(c: f64) -> Self {
        let mut s = Self::real();
        s.set(0, Complex64::new(c, 0.0));
        s
    }

    /// `a cos kθ`
    pub fn cosine(k: i64, a: f64) -> Self {
        let mut s = Self::real();
        s.set(k.abs(), Complex64::new(0.5 * a, 0.0));
        s
    }

    /// `b sin kθ`
    pub fn sine(k: i64, b: f64) -> Self {
        let mut s = Self::real();
        let c = Complex64::new(0.0, -0.5 * b);
        s.set(k.abs(), if k >= 0 { c } else { -c });
        s
    }

    /// Real trigonometric polynomial `Σ aₖ cos kθ + bₖ sin kθ` (index = k−1).
    pub fn from_cos_sin(cos: &[f64], sin: &[f64]) -> Self {
        let mut s = Self::real();
        for (i, a) in cos.iter().enumerate() {
            s.add_to(i as i64 + 1, Complex64::new(0.5 * a, 0.0));
        }
        for (i, b) in sin.iter().enumerate() {
            s.add_to(i as i64 + 1, Complex64::new(0.0, -0.5 * b));
        }
        s
    }

    /// Coefficients from equispaced samples `h(2πk/n)`; the Nyquist mode of
    /// an even grid is split evenly between `±n/2`.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft_forward(&mut buf);
        let mut s = Self::real();
        for (k, c) in buf.iter().enumerate() {
            let m = signed_mode(k, n);
            if m < 0 {
                continue;
            }
            let mut c = c / n as f64;
            if n.is_multiple_of(2) && m as usize == n / 2 {
                c = Complex64::new(0.5 * c.re, 0.0);
            }
            s.set(m, c);
        }
        s
    }

    /// Sample a function on an `n`-point grid and transform.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, n: usize) -> Self {
        let samples: Vec<f64> = (0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect();
        Self::from_samples(&samples)
    }

    pub fn eval_complex(&self, theta: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * theta))
            .sum()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_complex(theta).re
    }

    /// Values on the grid `2πk/n`.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.eval(2.0 * PI * k as f64 / n as f64)).collect()
    }

    pub fn max_mode(&self) -> i64 {
        self.modes.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// Real cosine coefficient `aₖ = 2 Re cₖ` (`a₀` is the mean).
    pub fn cos_coeff(&self, k: i64) -> f64 {
        if k == 0 {
            return self.coeff(0).re;
        }
        let c = self.coeff(k.abs());
        let d = self.coeff(-k.abs());
        (c + d).re
    }

    /// Real sine coefficient `bₖ = −2 Im cₖ`.
    pub fn sin_coeff(&self, k: i64) -> f64 {
        let c = self.coeff(k.abs());
        let d = self.coeff(-k.abs());
        let b = (Complex64::i() * (c - d)).re;
        if k < 0 {
            -b
        } else {
            b
        }
    }

    pub fn derivative(&self) -> Self {
        self.map_modes(true, |k, c| c * Complex64::new(0.0, k as f64))
    }

    /// Pointwise product `cos θ · h`.
    pub fn times_cos(&self) -> Self {
        let mut out = FourierSeries {
            modes: BTreeMap::new(),
            real: self.real,
        };
        for (k, c) in self.iter() {
            *out.modes.entry(k + 1).or_default() += 0.5 * c;
            *out.modes.entry(k - 1).or_default() += 0.5 * c;
        }
        out
    }

    /// Pointwise product (convolution of coefficients).
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = FourierSeries {
            modes: BTreeMap::new(),
            real: self.real && other.real,
        };
        for (k, c) in self.iter() {
            for (m, d) in other.iter() {
                *out.modes.entry(k + m).or_default() += c * d;
            }
        }
        out
    }

    /// Keep `|k| ≤ n`.
    pub fn truncated(&self, n: i64) -> Self {
        FourierSeries {
            modes: self.modes.range(-n..=n).map(|(k, c)| (*k, *c)).collect(),
            real: self.real,
        }
    }
}

impl FourierSeries<(i64, i64)> {
    /// Coefficients from samples on the `nφ × nθ` grid, row-major in φ.
    pub fn from_samples_2d(samples: &[f64], n_phi: usize, n_theta: usize) -> Result<Self> {
        if samples.len() != n_phi * n_theta {
            return Err(Error::Invalid(format!(
                "expected {} samples, got {}",
                n_phi * n_theta,
                samples.len()
            )));
        }
        let mut grid: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut planner = FftPlanner::new();
        let row = planner.plan_fft_forward(n_theta);
        for r in grid.chunks_mut(n_theta) {
            row.process(r);
        }
        let col = planner.plan_fft_forward(n_phi);
        let mut tmp = vec![Complex64::default(); n_phi];
        for j in 0..n_theta {
            for i in 0..n_phi {
                tmp[i] = grid[i * n_theta + j];
            }
            col.process(&mut tmp);
            for i in 0..n_phi {
                grid[i * n_theta + j] = tmp[i];
            }
        }
        let norm = (n_phi * n_theta) as f64;
        let mut s = Self::real();
        for i in 0..n_phi {
            for j in 0..n_theta {
                let l = signed_mode(i, n_phi);
                let m = signed_mode(j, n_theta);
                // Nyquist rows/columns are dropped to keep the series real.
                if (n_phi.is_multiple_of(2) && i == n_phi / 2) || (n_theta.is_multiple_of(2) && j == n_theta / 2) {
                    continue;
                }
                s.modes.insert((l, m), grid[i * n_theta + j] / norm);
            }
        }
        Ok(s)
    }

    pub fn eval(&self, phi: f64, theta: f64) -> f64 {
        self.modes
            .iter()
            .map(|((l, j), c)| c * Complex64::from_polar(1.0, *l as f64 * phi + *j as f64 * theta))
            .sum::<Complex64>()
            .re
    }

    /// `∂_φ`
    pub fn d_phi(&self) -> Self {
        self.map_modes(true, |(l, _), c| c * Complex64::new(0.0, l as f64))
    }

    /// `∂_θ`
    pub fn d_theta(&self) -> Self {
        self.map_modes(true, |(_, j), c| c * Complex64::new(0.0, j as f64))
    }
}

/// Cosine or sine half of a single-mode projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Cos,
    Sin,
}

/// Single-mode projection `Π_{k,c} h = aₖ cos kθ` or `Π_{k,s} h = bₖ sin kθ`.
pub fn project(series: &FourierSeries, k: i64, part: Part) -> Result<FourierSeries> {
    if k < 1 {
        return Err(Error::Invalid(format!("projection mode must be ≥ 1, got {k}")));
    }
    if !series.is_real() {
        return Err(Error::Invalid("projection needs a real series".into()));
    }
    Ok(match part {
        Part::Cos => FourierSeries::cosine(k, series.cos_coeff(k)),
        Part::Sin => FourierSeries::sine(k, series.sin_coeff(k)),
    })
}

/// Hilbert transform, multiplier `i·sign(n)`. A nonzero mean is dropped
/// with a warning.
pub fn hilbert(series: &FourierSeries) -> FourierSeries {
    if series.mean().norm() > 1e-14 {
        log::warn!("hilbert: annihilating nonzero mean {}", series.mean());
    }
    series
        .map_modes(true, |k, c| c * Complex64::new(0.0, k.signum() as f64))
        .pruned(0.0)
}

fn digamma_any(a: f64) -> f64 {
    if a > 0.0 {
        digamma(a)
    } else {
        digamma(1.0 - a) - PI / (PI * a).tan()
    }
}

/// `Γ(x)/Γ(x + k)` as a finite product.
fn gamma_ratio(x: f64, k: u32) -> f64 {
    (0..k).map(|i| 1.0 / (x + i as f64)).product()
}

/// Fourier coefficient `I_{m,n} = −⨍ |sin(η/2)|^m ln|sin(η/2)| e^{inη} dη`
/// from the Gamma/digamma closed form; `Λₘ e^{inθ} = I_{m,n} e^{inθ}`.
pub fn inm(m: u32, n: i64) -> f64 {
    let n = n.unsigned_abs() as f64;
    let mf = m as f64;
    let a = 0.5 * mf - n + 1.0;
    let b = 0.5 * mf + n + 1.0;
    let sign_n = if (n as u64).is_multiple_of(2) { 1.0 } else { -1.0 };
    // C = (−1)ⁿ 2^{−m} Γ(m+1)
    let c = sign_n * (1..=m).map(f64::from).product::<f64>() / 2f64.powi(m as i32);
    if a > 0.0 {
        let r = (-ln_gamma(a) - ln_gamma(b)).exp();
        let bracket = -(2f64.ln()) + digamma(mf + 1.0) - 0.5 * digamma(a) - 0.5 * digamma(b);
        return -c * r * bracket;
    }
    if a == a.floor() {
        // ψ(a)/Γ(a) → (−1)^{k+1} k! at a = −k, and Γ(k+1)/Γ(b) is a product
        let k = -a;
        let sign_k = if (k as u64).is_multiple_of(2) { -1.0 } else { 1.0 };
        return 0.5 * c * sign_k * gamma_ratio(k + 1.0, m + 1);
    }
    // 1/Γ(a) = sin(πa) Γ(1−a)/π
    let r = (PI * a).sin() / PI * gamma_ratio(1.0 - a, m + 1);
    let bracket = -(2f64.ln()) + digamma(mf + 1.0) - 0.5 * digamma_any(a) - 0.5 * digamma(b);
    -c * r * bracket
}

/// Leading large-`n` behaviour of `I_{m,n}`: for odd `m = 2k+1`,
/// `Γ(2k+2)(−1)^{k+1}/(π 2^{2k+1}) · n^{−2k−2}(ln n + ln 2 − ψ(2k+2))`;
/// for even `m = 2k`, `2^{−(2k+1)}Γ(2k+1)(−1)^k n^{−(2k+1)}`.
pub fn inm_asymptotic(m: u32, n: i64) -> f64 {
    let n = n.unsigned_abs() as f64;
    let k = (m / 2) as i32;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    if m % 2 == 1 {
        let c = -(ln_gamma(m as f64 + 1.0)).exp() * sign / (PI * 2f64.powi(m as i32));
        c * n.powi(-(m as i32) - 1) * (n.ln() + 2f64.ln() - digamma(m as f64 + 1.0))
    } else {
        2f64.powi(-(m as i32) - 1) * (ln_gamma(m as f64 + 1.0)).exp() * sign * n.powi(-(m as i32) - 1)
    }
}

/// `Λₘ h` mode by mode.
pub fn lambda_m(series: &FourierSeries, m: u32) -> FourierSeries {
    series.map_modes(true, |k, c| c * inm(m, k))
}

/// `∂θS[h]` with `S[h] = −g₃ ⨍ (cos(θ+2η) + cos(2θ+η)) h(η) dη`;
/// only modes `±1, ±2` of `h` contribute.
pub fn op_s(series: &FourierSeries, g3: f64) -> FourierSeries {
    let h = |k| series.coeff(k);
    let mut s = FourierSeries::real();
    // ⨍cos(θ+2η)e^{inη} = ½(e^{iθ}δ_{n,−2} + e^{−iθ}δ_{n,2}), likewise for cos(2θ+η)
    s.add_to(1, -0.5 * g3 * h(-2));
    s.add_to(2, -0.5 * g3 * h(-1));
    s.derivative().pruned(0.0)
}

/// `H_{u,0}[h] = 4g₃ ∂θ(cos θ · Λ₀h + Λ₀(cos · h))`, which equals
/// `−½(2p)^{−3/4} ∂θ ⨍ ln|sin((θ−η)/2)| (cos θ + cos η) h(η) dη` when `g₃ = ⅛(2p)^{−3/4}`.
pub fn op_hu0(series: &FourierSeries, g3: f64) -> FourierSeries {
    let a = lambda_m(series, 0).times_cos();
    let b = lambda_m(&series.times_cos(), 0);
    a.add(&b).scale(4.0 * g3).derivative().pruned(0.0)
}

/// Coefficients of the mode-one operator `∂θQ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QCoefficients {
    /// Radius parameter `p₁₁` of the ring the operator acts on.
    pub p11: f64,
    /// Coupling coefficients `q₁ … q₄` to the companion ring.
    pub q: [f64; 4],
}

impl QCoefficients {
    /// Build `q₁…q₄` from the mixed second derivatives
    /// `g[a][b] = ∂_{p₁,a}∂_{p₂,b}G` (components 0 = ϱ, 1 = z).
    pub fn from_cross_hessian(p11: f64, p21: f64, log_eps: f64, g: [[f64; 2]; 2]) -> Self {
        let r = 0.5f64.sqrt() / log_eps;
        let a = (2.0 * p11).powf(0.25);
        let b = (2.0 * p21).powf(0.25);
        Self {
            p11,
            q: [
                -r / a * b * g[0][0],
                -r / (a * b) * g[0][1],
                r / (a * a * a) * b * g[1][0],
                r / (a * a * a * b) * g[1][1],
            ],
        }
    }
}

/// `∂θQ[h] = (c₀h₁c + q₁h⋆₁c + q₂h⋆₁s) sin θ + (−3c₀h₁s + q₃h⋆₁c + q₄h⋆₁s) cos θ`
/// with `c₀ = (1/16)(2p₁₁)^{−3/2}`; `h_star` is the companion series.
pub fn op_q(series: &FourierSeries, h_star: &FourierSeries, q: &QCoefficients) -> FourierSeries {
    let c0 = (2.0 * q.p11).powf(-1.5) / 16.0;
    let (h1c, h1s) = (series.cos_coeff(1), series.sin_coeff(1));
    let (s1c, s1s) = (h_star.cos_coeff(1), h_star.sin_coeff(1));
    let [q1, q2, q3, q4] = q.q;
    let sin = c0 * h1c + q1 * s1c + q2 * s1s;
    let cos = -3.0 * c0 * h1s + q3 * s1c + q4 * s1s;
    FourierSeries::sine(1, sin).add(&FourierSeries::cosine(1, cos))
}

/// One row of [`integral_identities`].
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub quadrature: f64,
    pub exact: f64,
    pub deviation: f64,
}

/// Angle at which the θ-dependent identities are evaluated.
pub const IDENTITY_THETA: f64 = 0.7;

/// Disc integrals with a singular or discontinuous integrand at `ρ = 1`,
/// `η = θ`. The `η`-range is split at `θ` and each half is integrated with a
/// Duffy rule whose corner sits at the singular point.
fn disc_integral<F: Fn(f64, f64) -> f64>(theta: f64, rule: &CornerRule, f: F) -> f64 {
    let lo = rule.integrate(1.0, theta, 0.0, theta - PI, &f);
    let hi = rule.integrate(1.0, theta, 0.0, theta + PI, &f);
    lo + hi
}

/// Evaluate the disc integral identities by quadrature. The first four use
/// `∫₀^{2π}∫₀¹ … ρdρdη`; the θ-dependent ones use the averaged measure and
/// are evaluated at [`IDENTITY_THETA`].
pub fn integral_identities() -> Vec<IdentityCheck> {
    let rule = CornerRule::default().refined();
    let th = IDENTITY_THETA;
    let ct = th.cos();
    // e^{iθ} − ρe^{iη} in a form that stays accurate next to the singular point
    let diff = |t: f64, r: f64, e: f64| {
        let (sp, sm) = ((0.5 * (t + e)).sin(), (0.5 * (t - e)).sin());
        let cp = (0.5 * (t + e)).cos();
        ((1.0 - r) * e.cos() - 2.0 * sp * sm, (1.0 - r) * e.sin() + 2.0 * cp * sm)
    };
    let d0 = |r: f64, e: f64| {
        let (x, y) = diff(0.0, r, e);
        x * x + y * y
    };
    let dt = |r: f64, e: f64| {
        let (x, y) = diff(th, r, e);
        x * x + y * y
    };
    let cm = |r: f64, e: f64| diff(th, r, e).0;
    let sm = |r: f64, e: f64| diff(th, r, e).1;
    let avg = 1.0 / (2.0 * PI);
    let rows: Vec<(&'static str, f64, f64)> = vec![
        (
            "log kernel, mean",
            disc_integral(0.0, &rule, |r, e| 0.5 * d0(r, e).ln() * r),
            0.0,
        ),
        (
            "log kernel, first mode",
            disc_integral(0.0, &rule, |r, e| d0(r, e).ln() * e.cos() * r * r),
            -PI / 2.0,
        ),
        (
            "log kernel, second mode",
            disc_integral(0.0, &rule, |r, e| d0(r, e).ln() * (2.0 * e).cos() * r.powi(3)),
            -PI / 6.0,
        ),
        (
            "velocity kernel, radial part",
            disc_integral(0.0, &rule, |r, e| (1.0 - r * e.cos()) / d0(r, e) * r),
            PI,
        ),
        (
            "cos-cos ratio",
            avg * disc_integral(th, &rule, |r, e| cm(r, e).powi(2) / dt(r, e) * r),
            0.25 + (2.0 * th).cos() / 8.0,
        ),
        (
            "cos-sin ratio",
            avg * disc_integral(th, &rule, |r, e| (ct + r * e.cos()) * sm(r, e) / dt(r, e) * r),
            0.375 * (2.0 * th).sin(),
        ),
        (
            "quartic cos ratio",
            avg * disc_integral(th, &rule, |r, e| {
                (ct + r * e.cos()) * cm(r, e).powi(3) / dt(r, e).powi(2) * r
            }),
            3.0 / 16.0 + (2.0 * th).cos() / 4.0,
        ),
        (
            "quartic cos²sin² ratio",
            avg * disc_integral(th, &rule, |r, e| {
                (ct + r * e.cos()) * cm(r, e) * sm(r, e).powi(2) / dt(r, e).powi(2) * r
            }),
            1.0 / 16.0 + (2.0 * th).cos() / 8.0,
        ),
        (
            "quartic cos³sin ratio",
            avg * disc_integral(th, &rule, |r, e| {
                (ct + r * e.cos()) * cm(r, e).powi(2) * sm(r, e) / dt(r, e).powi(2) * r
            }),
            (2.0 * th).sin() / 16.0,
        ),
        (
            "cubic cos ratio",
            avg * disc_integral(th, &rule, |r, e| (ct + r * e.cos()) * cm(r, e).powi(2) / dt(r, e) * r),
            0.25 * ct + (3.0 * th).cos() / 12.0,
        ),
    ];
    rows.into_iter()
        .map(|(name, q, exact)| IdentityCheck {
            name,
            quadrature: q,
            exact,
            deviation: (q - exact).abs(),
        })
        .collect()
}

/// Small-divisor thresholds: modes need `|ε₁ωℓ + jc| ≥ ν⟨j⟩^{−τ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiophantineParams {
    nu: f64,
    tau: f64,
    n_cut: i64,
}

impl DiophantineParams {
    pub fn new(nu: f64, tau: f64, n_cut: i64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::Domain { what: "nu", value: nu });
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain {
                what: "tau",
                value: tau,
            });
        }
        if n_cut < 1 {
            return Err(Error::Domain {
                what: "n_cut",
                value: n_cut as f64,
            });
        }
        Ok(Self { nu, tau, n_cut })
    }

    /// `ν = ε²|ln ε|^{0.75}`, `τ = 2`, cutoff 16.
    pub fn for_eps(eps: f64) -> Result<Self> {
        let l = -eps.ln();
        Self::new(eps * eps * l.powf(0.75), 2.0, 16)
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn n_cut(&self) -> i64 {
        self.n_cut
    }

    fn bracket(j: i64) -> f64 {
        j.unsigned_abs().max(1) as f64
    }

    /// `|d| ⟨j⟩^τ / ν`; the mode is admissible when this is ≥ 1.
    pub fn margin(&self, divisor: f64, j: i64) -> f64 {
        divisor.abs() * Self::bracket(j).powf(self.tau) / self.nu
    }
}

/// Smooth even cutoff: 0 for `|ξ| ≤ 1/3`, 1 for `|ξ| ≥ 1/2`.
pub fn chi(xi: f64) -> f64 {
    let x = (xi.abs() - 1.0 / 3.0) * 6.0;
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Outcome of [`transport_invert`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransportReport {
    /// `‖(ε₁ω∂φ + c∂θ)ρ − Π_N h‖` over coefficients.
    pub residual: f64,
    /// Modes with `χ < 1`, with the cutoff value applied.
    pub cut_modes: Vec<((i64, i64), f64)>,
    /// `‖(1 − χ)Π_N h‖`.
    pub cut_norm: f64,
    /// Whether every retained mode satisfies the Diophantine bound.
    pub all_admissible: bool,
    /// Number of modes of `h` beyond `|j| ≤ N`.
    pub truncated: usize,
}

/// Regularized inverse of `ε₁ω∂φ + c∂θ` on modes `|j| ≤ N`:
/// `ρ_{ℓj} = −i χ(d⟨j⟩^τ/ν) h_{ℓj}/d`, `d = ε₁ωℓ + jc`.
pub fn transport_invert(
    h: &FourierSeries<(i64, i64)>,
    eps1: f64,
    omega: f64,
    c: f64,
    dio: &DiophantineParams,
) -> (FourierSeries<(i64, i64)>, TransportReport) {
    let mut rho = if h.is_real() {
        FourierSeries::real()
    } else {
        FourierSeries::complex()
    };
    let mut residual2 = 0.0;
    let mut cut_norm2 = 0.0;
    let mut cut_modes = Vec::new();
    let mut all_admissible = true;
    let mut truncated = 0;
    for ((l, j), hc) in h.iter() {
        if j.abs() > dio.n_cut {
            truncated += 1;
            continue;
        }
        let d = eps1 * omega * l as f64 + j as f64 * c;
        let margin = dio.margin(d, j);
        if (l, j) != (0, 0) && margin < 1.0 {
            all_admissible = false;
        }
        let x = if d == 0.0 { 0.0 } else { chi(margin) };
        if x < 1.0 {
            cut_modes.push(((l, j), x));
            cut_norm2 += ((1.0 - x) * hc).norm_sqr();
        }
        let r = if x == 0.0 {
            Complex64::default()
        } else {
            Complex64::new(0.0, -x) * hc / d
        };
        rho.modes.insert((l, j), r);
        let back = Complex64::new(0.0, d) * r;
        residual2 += (back - hc).norm_sqr();
    }
    (
        rho,
        TransportReport {
            residual: residual2.sqrt(),
            cut_modes,
            cut_norm: cut_norm2.sqrt(),
            all_admissible,
            truncated,
        },
    )
}

/// One λ of a divisor scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorRow {
    pub lambda: f64,
    pub admissible: bool,
    /// Smallest normalized margin `|d|⟨j⟩^τ/ν` over the scanned modes.
    pub worst_margin: f64,
    /// `|d|` at that mode.
    pub worst_divisor: f64,
    pub worst_l: i64,
    pub worst_j: i64,
}

/// Per-λ table and excluded grid fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorScan {
    pub rows: Vec<DivisorRow>,
    pub excluded_fraction: f64,
}

fn scan_one(lambda: f64, eps1: f64, omega: f64, c: f64, dio: &DiophantineParams) -> DivisorRow {
    let mut best = DivisorRow {
        lambda,
        admissible: true,
        worst_margin: f64::INFINITY,
        worst_divisor: f64::INFINITY,
        worst_l: 0,
        worst_j: 0,
    };
    let step = eps1 * omega;
    let mut consider = |l: i64, j: i64| {
        if (l, j) == (0, 0) {
            return;
        }
        let d = step * l as f64 + j as f64 * c;
        let m = dio.margin(d, j);
        if m < best.worst_margin {
            best.worst_margin = m;
            best.worst_divisor = d.abs();
            best.worst_l = l;
            best.worst_j = j;
        }
    };
    // (−ℓ, −j) mirrors (ℓ, j); for each j ≥ 0 only the integers nearest the
    // exact resonance ℓ = −jc/(ε₁ω) can attain the minimum.
    consider(1, 0);
    for j in 1..=dio.n_cut {
        if step == 0.0 {
            consider(0, j);
            continue;
        }
        let x = -(j as f64) * c / step;
        let f = x.floor();
        if f.abs() < 9.0e15 {
            consider(f as i64, j);
            consider(f as i64 + 1, j);
        }
    }
    best.admissible = best.worst_margin >= 1.0;
    best
}

/// Scan `λ` for small divisors `ε₁ω(λ)ℓ + jc(λ)`, `1 ≤ j ≤ N`, `ℓ ∈ ℤ`.
pub fn divisor_scan<W, C>(
    eps1: f64,
    omega_fn: W,
    c_fn: C,
    lambda_grid: &[f64],
    dio: &DiophantineParams,
) -> Result<DivisorScan>
where
    W: Fn(f64) -> Result<f64> + Sync,
    C: Fn(f64) -> Result<f64> + Sync,
{
    let rows = lambda_grid
        .par_iter()
        .map(|&lambda| Ok(scan_one(lambda, eps1, omega_fn(lambda)?, c_fn(lambda)?, dio)))
        .collect::<Result<Vec<_>>>()?;
    let excluded = rows.iter().filter(|r| !r.admissible).count();
    let excluded_fraction = if rows.is_empty() {
        0.0
    } else {
        excluded as f64 / rows.len() as f64
    };
    Ok(DivisorScan {
        rows,
        excluded_fraction,
    })
}
