//! Ring boundaries, the stream function on them and the contour functional.
//!
//! Time is measured by the phase `φ = ω ∫₀^τ √(2p₁₁)` along a measured
//! period of the perturbed filament orbit; ring 1 is parametrized by
//! `γ = P₁ + iε|ln ε|⁻¹V₁ + ε w 𝒵` with `w = √(1 + 2εf)` and
//! `𝒵(θ) = ((2p₁₁)^{1/4} cos θ, (2p₁₁)^{−1/4} sin θ)`; ring 2 uses its own
//! `p₂₁` and the shape at the phase reached half a period later in `τ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filaments::{self, FilamentPair, Model, PhysicalParams, Trajectory};
use crate::kernel::{self, HalfPlanePoint, Planar};
use crate::modeone::LimitingOrbit;
use crate::quad::{self, CornerRule};
use crate::spectral::{FourierSeries, QCoefficients};

/// A measured period of the perturbed filament pair together with the
/// phase map `τ ↦ φ`.
#[derive(Debug, Clone)]
pub struct RingOrbit {
    params: PhysicalParams,
    period: f64,
    omega: f64,
    /// vertical displacement of both filaments over one period
    drift: f64,
    traj: Trajectory,
    /// `∫₀^{t₁} √(2p₁₁)` at the end of every dense step
    cumulative: Vec<f64>,
}

impl RingOrbit {
    pub fn new(params: &PhysicalParams, tol: f64) -> Result<Self> {
        let m = filaments::measure_period(params, Model::Perturbed, tol)?;
        Self::from_measurement(params, m.period, m.trajectory)
    }

    pub fn from_measurement(params: &PhysicalParams, period: f64, traj: Trajectory) -> Result<Self> {
        if traj.model != Model::Perturbed {
            return Err(Error::Invalid("ring orbit needs a perturbed trajectory".into()));
        }
        traj.require_span(0.0, period)?;
        let rule = quad::gauss_legendre(5);
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(traj.dense.steps.len());
        for st in &traj.dense.steps {
            for (t, w) in rule.mapped(st.t0, st.t1()) {
                acc += w * (2.0 * st.eval(t)[0]).sqrt();
            }
            cumulative.push(acc);
        }
        let start = traj.pair_at(0.0)?;
        let end = traj.pair_at(period)?;
        let mut orbit = Self {
            params: *params,
            period,
            omega: 1.0,
            drift: 0.5 * ((end.p1.z() - start.p1.z()) + (end.p2.z() - start.p2.z())),
            traj,
            cumulative,
        };
        orbit.omega = 2.0 * PI / orbit.raw_phase(period)?;
        Ok(orbit)
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Vertical displacement per period.
    pub fn drift_per_period(&self) -> f64 {
        self.drift
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }

    /// `∫₀^τ √(2p₁₁)` for `τ` inside the stored steps.
    fn raw_phase(&self, tau: f64) -> Result<f64> {
        self.traj.require_span(0.0, tau)?;
        let steps = &self.traj.dense.steps;
        let k = steps.partition_point(|s| s.t1() < tau).min(steps.len() - 1);
        let before = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        let st = &steps[k];
        let part: f64 = quad::gauss_legendre(8)
            .mapped(st.t0, tau)
            .map(|(t, w)| w * (2.0 * st.eval(t)[0]).sqrt())
            .sum();
        Ok(before + part)
    }

    fn reduce_tau(&self, tau: f64) -> (f64, f64) {
        let k = (tau / self.period).floor();
        (tau - k * self.period, k)
    }

    /// `φ(τ)` for any real `τ`.
    pub fn phase_of_tau(&self, tau: f64) -> Result<f64> {
        let (t, k) = self.reduce_tau(tau);
        Ok(self.omega * self.raw_phase(t)? + 2.0 * PI * k)
    }

    /// Inverse of [`phase_of_tau`](Self::phase_of_tau), by safeguarded Newton.
    pub fn tau_of_phase(&self, phi: f64) -> Result<f64> {
        let k = (phi / (2.0 * PI)).floor();
        let target = phi - 2.0 * PI * k;
        let (mut lo, mut hi) = (0.0, self.period);
        let mut t = self.period * target / (2.0 * PI);
        for _ in 0..60 {
            let r = self.omega * self.raw_phase(t)? - target;
            if r.abs() < 1e-15 {
                break;
            }
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let slope = self.omega * (2.0 * self.traj.state_at(t)?[0]).sqrt();
            let next = t - r / slope;
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 * self.period {
                break;
            }
        }
        Ok(t + k * self.period)
    }

    /// Phase of ring 1 half a period after phase `φ`: `φ(τ(φ) + T/2)`.
    /// Ring 2 at `φ` is ring 1 at this phase; it is `φ + π` only as ε → 0,
    /// since the phase clock runs with `√(2p₁₁)`.
    pub fn partner_phase(&self, phi: f64) -> Result<f64> {
        self.phase_of_tau(self.tau_of_phase(phi)? + 0.5 * self.period)
    }

    /// Lab-frame filament positions at phase `φ`.
    pub fn pair_at_phase(&self, phi: f64) -> Result<FilamentPair> {
        let tau = self.tau_of_phase(phi)?;
        self.pair_at_tau(tau)
    }

    pub fn pair_at_tau(&self, tau: f64) -> Result<FilamentPair> {
        let (t, k) = self.reduce_tau(tau);
        let pair = self.traj.pair_at(t)?;
        let up = Planar::new(0.0, k * self.drift);
        FilamentPair::new(pair.p1.shifted(up)?, pair.p2.shifted(up)?)
    }

    /// `(dP₁/dφ, dP₂/dφ)`.
    pub fn velocity_at_phase(&self, phi: f64) -> Result<(Planar, Planar)> {
        let pair = self.pair_at_phase(phi)?;
        let (v1, v2) = filaments::filament_rhs(&pair, &self.params)?;
        let rate = self.omega * (2.0 * pair.p1.rho()).sqrt();
        Ok((v1 / rate, v2 / rate))
    }
}

/// Which ring a boundary point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ring {
    One,
    Two,
}

/// Shape perturbation `f(φ, θ)` of ring 1; ring 2 carries
/// `f(φ̃, θ)` with `φ̃` the [partner phase](RingOrbit::partner_phase).
#[derive(Debug, Clone, PartialEq)]
pub struct RingShape {
    eps: f64,
    f: FourierSeries<(i64, i64)>,
}

impl RingShape {
    pub fn new(eps: f64, f: FourierSeries<(i64, i64)>) -> Self {
        Self { eps, f }
    }

    /// `f ≡ 0`.
    pub fn trivial(eps: f64) -> Self {
        Self::new(eps, FourierSeries::real())
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn profile(&self) -> &FourierSeries<(i64, i64)> {
        &self.f
    }

    /// `θ ↦ f(φ, θ)` and `θ ↦ ∂_φ f(φ, θ)`.
    pub fn slice(&self, phi: f64) -> ShapeSlice {
        let mut f = BTreeMap::new();
        let mut fp = BTreeMap::new();
        for ((l, m), c) in self.f.iter() {
            if m < 0 {
                continue;
            }
            let v = c * Complex64::from_polar(1.0, l as f64 * phi);
            *f.entry(m).or_insert(Complex64::default()) += v;
            *fp.entry(m).or_insert(Complex64::default()) += v * Complex64::new(0.0, l as f64);
        }
        let build = |modes: BTreeMap<i64, Complex64>| {
            let mut s = FourierSeries::real();
            for (m, c) in modes {
                s.set(m, c);
            }
            s
        };
        let f = build(f);
        ShapeSlice {
            eps: self.eps,
            df: f.derivative(),
            f,
            f_phi: build(fp),
        }
    }
}

/// One-time view of a shape.
#[derive(Debug, Clone)]
pub struct ShapeSlice {
    eps: f64,
    pub f: FourierSeries,
    pub df: FourierSeries,
    pub f_phi: FourierSeries,
}

impl ShapeSlice {
    fn trivial(&self) -> bool {
        self.f.is_empty()
    }

    /// `w = √(1 + 2εf)`.
    pub fn w(&self, theta: f64) -> Result<f64> {
        if self.trivial() {
            return Ok(1.0);
        }
        let a = 1.0 + 2.0 * self.eps * self.f.eval(theta);
        if a <= 0.0 {
            return Err(Error::Domain {
                what: "1 + 2 eps f",
                value: a,
            });
        }
        Ok(a.sqrt())
    }
}

/// Speed modulations `V₁(φ)`, `V₂(φ)` as Fourier series in `φ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpeedShift {
    pub v1: FourierSeries,
    pub v2: FourierSeries,
}

impl SpeedShift {
    /// `U₋ = V₁ − V₂`.
    pub fn u_minus(&self, phi: f64) -> f64 {
        self.v1.eval(phi) - self.v2.eval(phi)
    }
}

/// Anisotropic frame vector `𝒵(θ)` for radius parameter `p`.
pub fn frame_z(p: f64, theta: f64) -> Planar {
    let q = (2.0 * p).powf(0.25);
    Planar::new(q * theta.cos(), theta.sin() / q)
}

fn frame_z_theta(p: f64, theta: f64) -> Planar {
    let q = (2.0 * p).powf(0.25);
    Planar::new(-q * theta.sin(), theta.cos() / q)
}

/// Boundary point of `ring` at phase `φ` and angle `θ`.
pub fn boundary_gamma(
    orbit: &RingOrbit,
    speed: &SpeedShift,
    shape: &RingShape,
    ring: Ring,
    phi: f64,
    theta: f64,
) -> Result<Planar> {
    let pair = orbit.pair_at_phase(phi)?;
    let eps = shape.eps();
    let l = orbit.params.log_eps();
    let (p, v, slice) = match ring {
        Ring::One => (pair.p1, speed.v1.eval(phi), shape.slice(phi)),
        Ring::Two => (pair.p2, speed.v2.eval(phi), shape.slice(orbit.partner_phase(phi)?)),
    };
    let w = slice.w(theta)?;
    Ok(p.as_planar() + Planar::new(0.0, eps * v / l) + eps * w * frame_z(p.rho(), theta))
}

/// [`boundary_gamma`] with the time given as `τ`.
pub fn boundary_gamma_tau(
    orbit: &RingOrbit,
    speed: &SpeedShift,
    shape: &RingShape,
    ring: Ring,
    tau: f64,
    theta: f64,
) -> Result<Planar> {
    boundary_gamma(orbit, speed, shape, ring, orbit.phase_of_tau(tau)?, theta)
}

/// Quadrature resolution for the stream function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiResolution {
    /// Duffy rule for each half of the self-interaction rectangle.
    pub corner: CornerRule,
    /// Periodic trapezoid points in `η` for the other ring.
    pub eta_points: usize,
    /// Gauss points in the radial variable for the other ring.
    pub radial_points: usize,
}

impl Default for PsiResolution {
    fn default() -> Self {
        Self {
            corner: CornerRule::default(),
            eta_points: 48,
            radial_points: 16,
        }
    }
}

impl PsiResolution {
    /// Roughly doubled resolution in every direction.
    pub fn refined(self) -> Self {
        Self {
            corner: self.corner.refined(),
            eta_points: 2 * self.eta_points,
            radial_points: self.radial_points + 8,
        }
    }
}

/// Self- and interaction contributions to `Ψ(γ)`, both including the `√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiParts {
    pub self_part: f64,
    pub interaction: f64,
}

impl PsiParts {
    pub fn total(&self) -> f64 {
        self.self_part + self.interaction
    }
}

/// Everything the stream function needs at one phase.
#[derive(Debug, Clone)]
struct PhaseFrame {
    eps: f64,
    own: HalfPlanePoint,
    other: HalfPlanePoint,
    own_shape: ShapeSlice,
    other_shape: ShapeSlice,
    /// `ε|ln ε|⁻¹ (V_own − V_other)`
    shift: f64,
}

fn phase_frame(orbit: &RingOrbit, speed: &SpeedShift, shape: &RingShape, ring: Ring, phi: f64) -> Result<PhaseFrame> {
    let pair = orbit.pair_at_phase(phi)?;
    let eps = shape.eps();
    let u = speed.u_minus(phi) * eps / orbit.params.log_eps();
    let (a, b) = (shape.slice(phi), shape.slice(orbit.partner_phase(phi)?));
    Ok(match ring {
        Ring::One => PhaseFrame {
            eps,
            own: pair.p1,
            other: pair.p2,
            own_shape: a,
            other_shape: b,
            shift: u,
        },
        Ring::Two => PhaseFrame {
            eps,
            own: pair.p2,
            other: pair.p1,
            own_shape: b,
            other_shape: a,
            shift: -u,
        },
    })
}

impl PhaseFrame {
    fn self_part(&self, theta: f64, rule: &CornerRule) -> Result<f64> {
        let p = self.own.rho();
        let x = self.eps * self.own_shape.w(theta)? * frame_z(p, theta);
        let mut err = None;
        let mut f = |eta: f64, sigma: f64| -> f64 {
            let run = || -> Result<f64> {
                let w = self.own_shape.w(eta)?;
                let y = self.eps * sigma * w * frame_z(p, eta);
                Ok(w * w * sigma * kernel::eval_g_displaced(self.own, x, y)?)
            };
            run().unwrap_or_else(|e| {
                err.get_or_insert(e);
                0.0
            })
        };
        let v =
            rule.integrate(theta, 1.0, theta + PI, 0.0, &mut f) + rule.integrate(theta, 1.0, theta - PI, 0.0, &mut f);
        if let Some(e) = err {
            return Err(e);
        }
        Ok(2f64.sqrt() * v / (2.0 * PI))
    }

    fn interaction(&self, theta: f64, res: &PsiResolution) -> Result<f64> {
        let x = self.own.as_planar()
            + Planar::new(0.0, self.shift)
            + self.eps * self.own_shape.w(theta)? * frame_z(self.own.rho(), theta);
        let target = HalfPlanePoint::from_planar(x)?;
        let q = self.other.rho();
        let gl = quad::gauss_legendre(res.radial_points);
        let mut acc = 0.0;
        for eta in quad::periodic_grid(res.eta_points) {
            let w = self.other_shape.w(eta)?;
            let z = frame_z(q, eta);
            for (sigma, ws) in gl.mapped(0.0, 1.0) {
                let y = HalfPlanePoint::from_planar(self.other.as_planar() + self.eps * sigma * w * z)?;
                acc += ws * w * w * sigma * kernel::eval_g(target, y)?;
            }
        }
        Ok(2f64.sqrt() * acc / res.eta_points as f64)
    }
}

/// `Ψ(γ(φ, θ))` on the boundary of `ring`, split into its two parts.
pub fn stream_psi(
    orbit: &RingOrbit,
    speed: &SpeedShift,
    shape: &RingShape,
    ring: Ring,
    phi: f64,
    theta: f64,
    res: &PsiResolution,
) -> Result<PsiParts> {
    let frame = phase_frame(orbit, speed, shape, ring, phi)?;
    Ok(PsiParts {
        self_part: frame.self_part(theta, &res.corner)?,
        interaction: frame.interaction(theta, res)?,
    })
}

/// [`stream_psi`] evaluated at `res` and `res.refined()`; fails with a
/// quadrature error when the two differ by more than `tol` (relative).
pub fn stream_psi_checked(
    orbit: &RingOrbit,
    speed: &SpeedShift,
    shape: &RingShape,
    ring: Ring,
    phi: f64,
    theta: f64,
    res: &PsiResolution,
    tol: f64,
) -> Result<PsiParts> {
    let a = stream_psi(orbit, speed, shape, ring, phi, theta, res)?;
    let b = stream_psi(orbit, speed, shape, ring, phi, theta, &res.refined())?;
    let change = (a.total() - b.total()).abs() / b.total().abs().max(1e-300);
    if change > tol {
        return Err(Error::Quadrature {
            what: "stream function",
            change,
        });
    }
    Ok(b)
}

/// `F` on a uniform θ grid at one phase.
#[derive(Debug, Clone)]
pub struct FunctionalSample {
    pub phi: f64,
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
    /// `Ψ(γ(φ, θₖ))`
    pub psi: Vec<f64>,
}

impl FunctionalSample {
    /// Trigonometric interpolant of `F(φ, ·)`.
    pub fn series(&self) -> FourierSeries {
        FourierSeries::from_samples(&self.values)
    }

    pub fn theta_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn at(&self, theta: f64) -> f64 {
        self.series().eval(theta)
    }
}

/// `F(ε, V₁, V₂, f)(φ, θₖ)` on `n_theta` equispaced angles (the ring-1
/// equation). `∂_θΨ` is obtained by spectral differentiation of the samples.
pub fn functional_f(
    orbit: &RingOrbit,
    speed: &SpeedShift,
    shape: &RingShape,
    phi: f64,
    n_theta: usize,
    res: &PsiResolution,
) -> Result<FunctionalSample> {
    let frame = phase_frame(orbit, speed, shape, Ring::One, phi)?;
    let theta = quad::periodic_grid(n_theta);
    let psi = theta
        .par_iter()
        .map(|&t| Ok(frame.self_part(t, &res.corner)? + frame.interaction(t, res)?))
        .collect::<Result<Vec<f64>>>()?;
    let dpsi = FourierSeries::from_samples(&psi).derivative().samples(n_theta);

    let eps = shape.eps();
    let l = orbit.params.log_eps();
    let omega = orbit.omega();
    let p = frame.own.rho();
    let (v1, _) = orbit.velocity_at_phase(phi)?;
    let pdot = v1.re;
    let vdot = speed.v1.derivative().eval(phi);
    let slice = &frame.own_shape;
    let drive = l * v1 + Planar::new(0.0, eps * vdot);

    let mut values = Vec::with_capacity(n_theta);
    for (k, &t) in theta.iter().enumerate() {
        let (f, ft, fp) = (slice.f.eval(t), slice.df.eval(t), slice.f_phi.eval(t));
        let w = slice.w(t)?;
        let wt = eps * ft / w;
        let dgamma = eps * (wt * frame_z(p, t) + w * frame_z_theta(p, t));
        // a · (i b) = Im(a b̄)
        let transport = (drive * dgamma.conj()).im;
        let stretch = 2.0 * eps * ft * (2.0 * t).sin() + 2.0 * (1.0 + 2.0 * eps * f) * (2.0 * t).cos();
        values.push(
            eps.powi(3) * l * omega * fp + dpsi[k] / (2.0 * p).sqrt() - omega * transport
                + eps * eps * l * omega * pdot / (8.0 * p) * stretch,
        );
    }
    Ok(FunctionalSample {
        phi,
        theta,
        values,
        psi,
    })
}

/// Auxiliary coefficient functions at one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxValues {
    pub phi: f64,
    pub f2: f64,
    pub h2: f64,
    pub g2: f64,
    pub g3: f64,
    pub q: [f64; 4],
    pub b: f64,
    /// `α̌` of the limiting orbit
    pub alpha_check: f64,
    /// `ȟ₂` of the limiting orbit
    pub h2_check: f64,
    pub p11: f64,
    /// `dp₁₁/dφ`
    pub p11_dot: f64,
}

impl AuxValues {
    /// `g₃ cos 3θ − 2ε|ln ε| g₂ cos 2θ + 2ε|ln ε| f₂ sin 2θ`.
    pub fn h0(&self, eps: f64, log_eps: f64, theta: f64) -> f64 {
        self.g3 * (3.0 * theta).cos() - 2.0 * eps * log_eps * self.g2 * (2.0 * theta).cos()
            + 2.0 * eps * log_eps * self.f2 * (2.0 * theta).sin()
    }
}

/// Evaluate the auxiliary functions at `phis`. Second derivatives of `G`
/// come from central differences of the analytic gradient with step
/// `1e-4 |P₁ − P₂|` and Richardson extrapolation.
pub fn aux_functions(orbit: &RingOrbit, limiting: &LimitingOrbit, phis: &[f64]) -> Result<Vec<AuxValues>> {
    phis.par_iter().map(|&phi| aux_at(orbit, limiting, phi)).collect()
}

pub fn aux_at(orbit: &RingOrbit, limiting: &LimitingOrbit, phi: f64) -> Result<AuxValues> {
    let pair = orbit.pair_at_phase(phi)?;
    let (p1, p2) = (pair.p1, pair.p2);
    let step = 1e-4 * (p1.as_planar() - p2.as_planar()).norm();
    let h = kernel::hessian(p1, p2, step, true)?;
    let l = orbit.params.log_eps();
    let kappa = orbit.params.kappa();
    let p = p1.rho();
    let f2 = (2.0 * p).powf(-0.5) / 2f64.sqrt() / l * h[0][1];
    let h2 = -h[1][1] / (p.sqrt() * l);
    let g2 = 0.25 * (2.0 * p).powf(-0.5) * (3.0 / (8.0 * p) - 2.0 * p.sqrt() / l * h[0][0] + h[1][1] / (p.sqrt() * l));
    let g3 = 0.125 * (2.0 * p).powf(-0.75);
    let q = QCoefficients::from_cross_hessian(p, p2.rho(), l, [[h[0][2], h[0][3]], [h[1][2], h[1][3]]]).q;
    let phi_lim = phi.rem_euclid(2.0 * PI);
    let h2_check = limiting.h2_check(phi_lim)?;
    let (v1, _) = orbit.velocity_at_phase(phi)?;
    Ok(AuxValues {
        phi,
        f2,
        h2,
        g2,
        g3,
        q,
        b: (3.0 / (16.0 * kappa) + h2_check) / (16.0 * kappa),
        alpha_check: limiting.alpha_check(phi_lim)?,
        h2_check,
        p11: p,
        p11_dot: v1.re,
    })
}

/// Low θ-modes of `F(φ, ·)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModeCoefficients {
    pub sin3: f64,
    pub cos2: f64,
    pub sin2: f64,
    pub cos1: f64,
    pub sin1: f64,
}

impl ModeCoefficients {
    pub fn of(series: &FourierSeries) -> Self {
        Self {
            sin3: series.sin_coeff(3),
            cos2: series.cos_coeff(2),
            sin2: series.sin_coeff(2),
            cos1: series.cos_coeff(1),
            sin1: series.sin_coeff(1),
        }
    }
}

/// Measured low modes of `F(ε, V₁, V₂, 0)` and their leading-order
/// predictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrivialProjection {
    pub phi: f64,
    pub measured: ModeCoefficients,
    pub predicted: ModeCoefficients,
    pub aux: AuxValues,
}

/// Leading-order low modes of `F` at `f = 0`:
/// `sin 3θ: −εg₃`, `cos 2θ: ε²|ln ε|(f₂ + ωṗ₁₁/(4p₁₁))`, `sin 2θ: ε²|ln ε|g₂`,
/// `cos θ: −½ε²(2p₁₁)^{−1/4}U₋h₂`, `sin θ: ε²(2p₁₁)^{1/4}(ωV̇₁ − U₋f₂ − ε|ln ε|b)`.
pub fn predicted_trivial_modes(
    aux: &AuxValues,
    eps: f64,
    log_eps: f64,
    omega: f64,
    speed: &SpeedShift,
) -> ModeCoefficients {
    let phi = aux.phi;
    let u = speed.u_minus(phi);
    let vdot = speed.v1.derivative().eval(phi);
    let q = (2.0 * aux.p11).powf(0.25);
    let e2l = eps * eps * log_eps;
    ModeCoefficients {
        sin3: -eps * aux.g3,
        cos2: e2l * (aux.f2 + omega * aux.p11_dot / (4.0 * aux.p11)),
        sin2: e2l * aux.g2,
        cos1: -0.5 * eps * eps / q * u * aux.h2,
        sin1: eps * eps * q * (omega * vdot - u * aux.f2 - eps * log_eps * aux.b),
    }
}

/// Project `F(ε, V₁, V₂, 0)(φ, ·)` onto the low modes and compare.
pub fn project_f_trivial(
    orbit: &RingOrbit,
    limiting: &LimitingOrbit,
    speed: &SpeedShift,
    phi: f64,
    n_theta: usize,
    res: &PsiResolution,
) -> Result<TrivialProjection> {
    let eps = orbit.params.eps();
    let sample = functional_f(orbit, speed, &RingShape::trivial(eps), phi, n_theta, res)?;
    let aux = aux_at(orbit, limiting, phi)?;
    Ok(TrivialProjection {
        phi,
        measured: ModeCoefficients::of(&sample.series()),
        predicted: predicted_trivial_modes(&aux, eps, orbit.params.log_eps(), orbit.omega(), speed),
        aux,
    })
}

/// The leading profile `h₀(φ, θ)` as a double Fourier series, from the
/// auxiliary functions on `n_phi` equispaced phases (the
/// `O(ε|ln ε|^{1/2})` remainder is not included).
pub fn approx_profile_h0(
    orbit: &RingOrbit,
    limiting: &LimitingOrbit,
    n_phi: usize,
) -> Result<FourierSeries<(i64, i64)>> {
    let phis = quad::periodic_grid(n_phi);
    let aux = aux_functions(orbit, limiting, &phis)?;
    let (eps, l) = (orbit.params.eps(), orbit.params.log_eps());
    let n_theta = 8;
    let thetas = quad::periodic_grid(n_theta);
    let samples: Vec<f64> = aux
        .iter()
        .flat_map(|a| thetas.iter().map(move |&t| a.h0(eps, l, t)))
        .collect();
    Ok(FourierSeries::from_samples_2d(&samples, n_phi, n_theta)?.pruned(1e-15))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn orbit() -> RingOrbit {
        RingOrbit::new(&PhysicalParams::new(0.05, 0.4, 1.0).unwrap(), 1e-11).unwrap()
    }

    #[test]
    fn phase_map_roundtrip() {
        let o = orbit();
        assert_abs_diff_eq!(o.phase_of_tau(o.period()).unwrap(), 2.0 * PI, epsilon = 1e-12);
        for phi in [0.3, 2.0, 4.4, 7.1, -1.2] {
            let tau = o.tau_of_phase(phi).unwrap();
            assert_abs_diff_eq!(o.phase_of_tau(tau).unwrap(), phi, epsilon = 1e-11);
        }
    }

    #[test]
    fn trivial_shape_has_unit_w() {
        let s = RingShape::trivial(0.05).slice(1.0);
        assert_eq!(s.w(0.3).unwrap(), 1.0);
    }

    #[test]
    fn shape_slice_values_and_derivatives() {
        let f = FourierSeries::from_samples_2d(
            &(0..64)
                .map(|k| {
                    let (i, j) = (k / 8, k % 8);
                    let (p, t) = (2.0 * PI * i as f64 / 8.0, 2.0 * PI * j as f64 / 8.0);
                    (p.cos() + 0.5) * (3.0 * t).cos()
                })
                .collect::<Vec<_>>(),
            8,
            8,
        )
        .unwrap();
        let shape = RingShape::new(0.05, f);
        let s = shape.slice(0.4);
        assert_abs_diff_eq!(s.f.eval(0.9), (0.4f64.cos() + 0.5) * 2.7f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.f_phi.eval(0.9), -0.4f64.sin() * 2.7f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            s.df.eval(0.9),
            -3.0 * (0.4f64.cos() + 0.5) * 2.7f64.sin(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn inadmissible_shape_is_rejected() {
        let f = FourierSeries::from_samples_2d(&[-30.0; 16], 4, 4).unwrap();
        let s = RingShape::new(0.05, f).slice(0.0);
        assert!(matches!(s.w(0.0), Err(Error::Domain { .. })));
    }
}
