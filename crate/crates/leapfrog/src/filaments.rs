//! Two coaxial vortex filaments: the Hamiltonian, the equations of motion,
//! the scaled planar reductions, trajectory integration, the closed-form
//! period, orbital symmetries, drift speed and frequency.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{check_open, Error, Result};
use crate::kernel::{eval_g, grad_g, HalfPlanePoint, Planar, Which};
use crate::ode::{self, bisect_on_step, DenseSolution, Integrator, OdeSystem, Step, Tolerance};
use crate::quad;

/// Core size `ε`, mean radius parameter `κ` and orbit amplitude `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    eps: f64,
    kappa: f64,
    lambda: f64,
    log_eps: f64,
    r_eps: f64,
    alpha: f64,
}

impl PhysicalParams {
    /// Requires `0 < ε < e^{-1}` so that `|ln ε| > 1`.
    pub fn new(eps: f64, kappa: f64, lambda: f64) -> Result<Self> {
        check_open("eps", eps, 0.0, (-1f64).exp())?;
        check_open("kappa", kappa, 0.0, f64::INFINITY)?;
        check_open("lambda", lambda, 0.0, f64::INFINITY)?;
        let log_eps = -eps.ln();
        Ok(Self {
            eps,
            kappa,
            lambda,
            log_eps,
            r_eps: (2.0 * kappa).powf(0.25) / log_eps.sqrt(),
            alpha: lambda * lambda / (8.0 * kappa),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    /// `|ln ε|`
    pub fn log_eps(&self) -> f64 {
        self.log_eps
    }
    /// `r_ε = (2κ)^{1/4} |ln ε|^{-1/2}`
    pub fn r_eps(&self) -> f64 {
        self.r_eps
    }
    /// `α = λ²/(8κ)`
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.eps, self.kappa, lambda)
    }
}

/// Positions of the two filaments in the `(ϱ, z)` half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilamentPair {
    pub p1: HalfPlanePoint,
    pub p2: HalfPlanePoint,
}

impl FilamentPair {
    pub fn new(p1: HalfPlanePoint, p2: HalfPlanePoint) -> Result<Self> {
        if p1 == p2 {
            return Err(Error::Singular);
        }
        Ok(Self { p1, p2 })
    }

    pub fn from_array(y: &[f64]) -> Result<Self> {
        Self::new(HalfPlanePoint::new(y[0], y[1])?, HalfPlanePoint::new(y[2], y[3])?)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.p1.rho(), self.p1.z(), self.p2.rho(), self.p2.z()]
    }

    pub fn swapped(&self) -> Self {
        Self {
            p1: self.p2,
            p2: self.p1,
        }
    }
}

/// Reduced planar coordinates of the relative position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledState {
    pub x1: f64,
    pub x2: f64,
}

impl ScaledState {
    /// `|x₁² + x₂² − λ² e^{−(x₁²−λ²)/(8κ)}|`
    pub fn levelset_residual(&self, lambda: f64, kappa: f64) -> f64 {
        let r2 = self.x1 * self.x1 + self.x2 * self.x2;
        (r2 - lambda * lambda * (-(self.x1 * self.x1 - lambda * lambda) / (8.0 * kappa)).exp()).abs()
    }
}

/// Which planar system is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// The `ε → 0` limit of the scaled relative motion.
    Limiting,
    /// The full filament system (the exact scaled reduction).
    Perturbed,
}

/// Self-induced vertical speed of a filament at radius parameter `p`,
/// without the `|ln ε|^{-1}` prefactor.
fn self_induced(p: f64, log_eps: f64) -> f64 {
    0.25 / (2.0 * p).sqrt() * (log_eps + 0.25 * (5.0 * 8f64.ln() + 3.0 * p.ln() - 1.0))
}

fn self_energy(p: f64, log_eps: f64) -> f64 {
    p.sqrt() / (2.0 * 2f64.sqrt()) * (log_eps - 1.75 + 1.25 * 8f64.ln() + 0.75 * p.ln())
}

/// `H = G(P₁,P₂)/√2 + Σⱼ (√p_{j1}/(2√2))(|ln ε| − 7/4 + (5/4)ln 8 + (3/4)ln p_{j1})`.
pub fn hamiltonian_h(pair: &FilamentPair, params: &PhysicalParams) -> Result<f64> {
    let l = params.log_eps;
    Ok(eval_g(pair.p1, pair.p2)? / 2f64.sqrt() + self_energy(pair.p1.rho(), l) + self_energy(pair.p2.rho(), l))
}

/// Velocities `(Ṗ₁, Ṗ₂)`:
/// `Ṗⱼ = ∇⊥_{Pⱼ}G/(√2|ln ε|) + i(2p_{j1})^{-1/2}[|ln ε| + ¼(5 ln 8 + 3 ln p_{j1} − 1)]/(4|ln ε|)`.
pub fn filament_rhs(pair: &FilamentPair, params: &PhysicalParams) -> Result<(Planar, Planar)> {
    let l = params.log_eps;
    let i = Planar::i();
    let g1 = grad_g(pair.p1, pair.p2, Which::First)?;
    let g2 = grad_g(pair.p1, pair.p2, Which::Second)?;
    let c = 1.0 / (2f64.sqrt() * l);
    let v1 = i * g1 * c + i * (self_induced(pair.p1.rho(), l) / l);
    let v2 = i * g2 * c + i * (self_induced(pair.p2.rho(), l) / l);
    Ok((v1, v2))
}

/// Scaled → physical: `p₁₁ = κ + ½r(2κ)^{1/4}x₁`, `p₂₁ = κ − ½r(2κ)^{1/4}x₁`,
/// `p₁₂ − p₂₂ = r(2κ)^{-1/4}x₂`, with midpoint height `center_z`.
pub fn scaled_to_pair(s: ScaledState, params: &PhysicalParams, center_z: f64) -> Result<FilamentPair> {
    let q = (2.0 * params.kappa).powf(0.25);
    let a = 0.5 * params.r_eps * q * s.x1;
    let b = 0.5 * params.r_eps * s.x2 / q;
    FilamentPair::new(
        HalfPlanePoint::new(params.kappa + a, center_z + b)?,
        HalfPlanePoint::new(params.kappa - a, center_z - b)?,
    )
}

/// Physical → scaled coordinates (inverse of [`scaled_to_pair`]).
pub fn pair_to_scaled(pair: &FilamentPair, params: &PhysicalParams) -> ScaledState {
    let q = (2.0 * params.kappa).powf(0.25);
    ScaledState {
        x1: (pair.p1.rho() - pair.p2.rho()) / (params.r_eps * q),
        x2: (pair.p1.z() - pair.p2.z()) * q / params.r_eps,
    }
}

/// Initial data `(x₁, x₂) = (λ, 0)` placed at midpoint height 0.
pub fn initial_pair(params: &PhysicalParams) -> Result<FilamentPair> {
    scaled_to_pair(
        ScaledState {
            x1: params.lambda,
            x2: 0.0,
        },
        params,
        0.0,
    )
}

fn limiting_rhs(s: ScaledState, kappa: f64) -> Result<[f64; 2]> {
    let r2 = s.x1 * s.x1 + s.x2 * s.x2;
    if r2 == 0.0 {
        return Err(Error::Singular);
    }
    Ok([s.x2 / r2, -s.x1 / r2 - s.x1 / (8.0 * kappa)])
}

/// Velocity of the scaled relative position.
///
/// The perturbed model maps to physical coordinates, applies
/// [`filament_rhs`] and maps back; the time variable is unchanged.
pub fn reduced_rhs(s: ScaledState, params: &PhysicalParams, model: Model) -> Result<[f64; 2]> {
    match model {
        Model::Limiting => limiting_rhs(s, params.kappa),
        Model::Perturbed => {
            if s.x1 == 0.0 && s.x2 == 0.0 {
                return Err(Error::Singular);
            }
            let pair = scaled_to_pair(s, params, 0.0)?;
            let (v1, v2) = filament_rhs(&pair, params)?;
            let q = (2.0 * params.kappa).powf(0.25);
            let d = v1 - v2;
            Ok([d.re / (params.r_eps * q), d.im * q / params.r_eps])
        }
    }
}

struct LimitingSystem {
    kappa: f64,
}

impl OdeSystem for LimitingSystem {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let v = limiting_rhs(ScaledState { x1: y[0], x2: y[1] }, self.kappa)?;
        dy.copy_from_slice(&v);
        Ok(())
    }
}

struct FilamentSystem {
    params: PhysicalParams,
}

impl OdeSystem for FilamentSystem {
    fn dim(&self) -> usize {
        4
    }
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let (v1, v2) = filament_rhs(&FilamentPair::from_array(y)?, &self.params)?;
        dy.copy_from_slice(&[v1.re, v1.im, v2.re, v2.im]);
        Ok(())
    }
}

/// Initial state in either coordinate system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Scaled(ScaledState),
    Physical(FilamentPair),
}

/// Sample states of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum States {
    Physical(Vec<FilamentPair>),
    Scaled(Vec<ScaledState>),
}

/// Conserved-quantity log at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogEntry {
    Physical { hamiltonian: f64, sum_rho: f64 },
    Scaled { levelset_residual: f64 },
}

/// Accepted-step samples plus the dense interpolant.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: PhysicalParams,
    pub model: Model,
    pub times: Vec<f64>,
    pub states: States,
    pub logs: Vec<LogEntry>,
    pub dense: DenseSolution,
}

impl Trajectory {
    pub fn t_min(&self) -> f64 {
        self.dense.t_min()
    }

    pub fn t_max(&self) -> f64 {
        self.dense.t_max()
    }

    /// Raw integrator state at `t`.
    pub fn state_at(&self, t: f64) -> Result<Vec<f64>> {
        self.dense.eval(t).ok_or(Error::Span {
            have_min: self.t_min(),
            have_max: self.t_max(),
            need_min: t,
            need_max: t,
        })
    }

    pub fn require_span(&self, lo: f64, hi: f64) -> Result<()> {
        let tol = 1e-9 * (hi - lo).abs().max(1.0);
        if self.t_min() > lo + tol || self.t_max() < hi - tol {
            return Err(Error::Span {
                have_min: self.t_min(),
                have_max: self.t_max(),
                need_min: lo,
                need_max: hi,
            });
        }
        Ok(())
    }

    /// Filament positions at `t` (the scaling map with midpoint height 0
    /// is used for the limiting model).
    pub fn pair_at(&self, t: f64) -> Result<FilamentPair> {
        let y = self.state_at(t)?;
        match self.model {
            Model::Perturbed => FilamentPair::from_array(&y),
            Model::Limiting => scaled_to_pair(ScaledState { x1: y[0], x2: y[1] }, &self.params, 0.0),
        }
    }

    pub fn scaled_at(&self, t: f64) -> Result<ScaledState> {
        let y = self.state_at(t)?;
        Ok(match self.model {
            Model::Perturbed => pair_to_scaled(&FilamentPair::from_array(&y)?, &self.params),
            Model::Limiting => ScaledState { x1: y[0], x2: y[1] },
        })
    }

    /// `∫_a^b f(t, y(t)) dt` by 5-point Gauss–Legendre on every step of the
    /// dense output that meets `[a, b]`.
    pub fn integrate_along<F: Fn(f64, &[f64]) -> Result<f64>>(&self, a: f64, b: f64, f: F) -> Result<f64> {
        let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
        self.require_span(lo, hi)?;
        let rule = quad::gauss_legendre(5);
        let mut acc = 0.0;
        for st in &self.dense.steps {
            let (s0, s1) = (st.t0.min(st.t1()), st.t0.max(st.t1()));
            let (c0, c1) = (s0.max(lo), s1.min(hi));
            if c1 <= c0 {
                continue;
            }
            for (t, w) in rule.mapped(c0, c1) {
                acc += w * f(t, &st.eval(t))?;
            }
        }
        Ok(sign * acc)
    }
}

fn initial_vector(state0: &InitialState, params: &PhysicalParams, model: Model) -> Result<Vec<f64>> {
    Ok(match (model, state0) {
        (Model::Limiting, InitialState::Scaled(s)) => vec![s.x1, s.x2],
        (Model::Limiting, InitialState::Physical(p)) => {
            let s = pair_to_scaled(p, params);
            vec![s.x1, s.x2]
        }
        (Model::Perturbed, InitialState::Scaled(s)) => scaled_to_pair(*s, params, 0.0)?.to_array().to_vec(),
        (Model::Perturbed, InitialState::Physical(p)) => p.to_array().to_vec(),
    })
}

fn run_steps(params: &PhysicalParams, model: Model, y0: &[f64], t_end: f64, tol: f64) -> Result<Vec<Step>> {
    let tol = Tolerance::new(tol);
    match model {
        Model::Limiting => ode::solve(&LimitingSystem { kappa: params.kappa }, 0.0, y0, t_end, tol),
        Model::Perturbed => ode::solve(&FilamentSystem { params: *params }, 0.0, y0, t_end, tol),
    }
}

fn assemble(params: &PhysicalParams, model: Model, dense: DenseSolution) -> Result<Trajectory> {
    let mut times = Vec::with_capacity(dense.steps.len() + 1);
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(dense.steps.len() + 1);
    if let Some(first) = dense.steps.first() {
        let (t, y) = if first.h > 0.0 {
            (first.t0, first.y0.clone())
        } else {
            (first.t1(), first.y1.clone())
        };
        times.push(t);
        raw.push(y);
    }
    for st in &dense.steps {
        let (t, y) = if st.h > 0.0 {
            (st.t1(), st.y1.clone())
        } else {
            (st.t0, st.y0.clone())
        };
        times.push(t);
        raw.push(y);
    }
    let (states, logs) = match model {
        Model::Perturbed => {
            let pairs = raw
                .iter()
                .map(|y| FilamentPair::from_array(y))
                .collect::<Result<Vec<_>>>()?;
            let logs = pairs
                .iter()
                .map(|p| {
                    Ok(LogEntry::Physical {
                        hamiltonian: hamiltonian_h(p, params)?,
                        sum_rho: p.p1.rho() + p.p2.rho(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (States::Physical(pairs), logs)
        }
        Model::Limiting => {
            let s: Vec<ScaledState> = raw.iter().map(|y| ScaledState { x1: y[0], x2: y[1] }).collect();
            let logs = s
                .iter()
                .map(|s| LogEntry::Scaled {
                    levelset_residual: s.levelset_residual(params.lambda, params.kappa),
                })
                .collect();
            (States::Scaled(s), logs)
        }
    };
    Ok(Trajectory {
        params: *params,
        model,
        times,
        states,
        logs,
        dense,
    })
}

/// Integrate on `[0, t_end]` with local error tolerance `tol`.
pub fn integrate(
    state0: &InitialState,
    params: &PhysicalParams,
    model: Model,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    integrate_span(state0, params, model, 0.0, t_end, tol)
}

/// Integrate forward to `t_max ≥ 0` and backward to `t_min ≤ 0` from the
/// state given at `t = 0`, merging both into one dense trajectory.
pub fn integrate_span(
    state0: &InitialState,
    params: &PhysicalParams,
    model: Model,
    t_min: f64,
    t_max: f64,
    tol: f64,
) -> Result<Trajectory> {
    if !(t_min <= 0.0 && t_max >= 0.0 && t_max > t_min) {
        return Err(Error::Invalid(format!("span [{t_min}, {t_max}] must contain 0")));
    }
    let y0 = initial_vector(state0, params, model)?;
    let mut dense = DenseSolution::default();
    if t_max > 0.0 {
        dense.steps = run_steps(params, model, &y0, t_max, tol)?;
    }
    if t_min < 0.0 {
        let back = run_steps(params, model, &y0, t_min, tol)?;
        dense.prepend_backward(back);
    }
    assemble(params, model, dense)
}

/// Closed-form period of the limiting orbit through `(λ, 0)`:
/// `T₀ = 2λ² ∫₀¹ e^{α(1−s)}/√(e^{α(1−s)} − s) ds/√s`, evaluated with `s = sin²u`,
/// which turns both endpoint singularities into a smooth integrand.
pub fn period_t0(lambda: f64, kappa: f64) -> Result<f64> {
    check_open("lambda", lambda, 0.0, f64::INFINITY)?;
    check_open("kappa", kappa, 0.0, f64::INFINITY)?;
    let alpha = lambda * lambda / (8.0 * kappa);
    let f = |u: f64| {
        let c = u.cos();
        let c2 = c * c;
        let ratio = if c2 < 1e-300 { alpha } else { (alpha * c2).exp_m1() / c2 };
        (alpha * c2).exp() / (1.0 + ratio).sqrt()
    };
    let mut prev = quad::composite(0.0, FRAC_PI_2, 1, 32, f);
    let mut panels = 1;
    loop {
        panels *= 2;
        let cur = quad::composite(0.0, FRAC_PI_2, panels, 32, f);
        if (cur - prev).abs() <= 1e-15 * cur.abs() || panels >= 64 {
            return Ok(4.0 * lambda * lambda * cur);
        }
        prev = cur;
    }
}

/// Lower/upper bounds `2πλ²/√(1+α) ≤ T₀ ≤ 2πλ²e^{α/2}`.
pub fn period_bounds(lambda: f64, kappa: f64) -> (f64, f64) {
    let alpha = lambda * lambda / (8.0 * kappa);
    let base = 2.0 * PI * lambda * lambda;
    (base / (1.0 + alpha).sqrt(), base * (0.5 * alpha).exp())
}

/// Measured period and the trajectory that produced it.
#[derive(Debug, Clone)]
pub struct PeriodMeasurement {
    pub period: f64,
    pub trajectory: Trajectory,
}

/// First return to `{x₂ = 0, x₁ > 0}` crossing downward (as at the start),
/// starting from `(λ, 0)`.
pub fn measure_period(params: &PhysicalParams, model: Model, tol: f64) -> Result<PeriodMeasurement> {
    let state0 = InitialState::Scaled(ScaledState {
        x1: params.lambda,
        x2: 0.0,
    });
    let y0 = initial_vector(&state0, params, model)?;
    let t_max = 10.0 * period_bounds(params.lambda, params.kappa).1;
    // x₂ ∝ component difference; x₁ ∝ radial difference
    let (sec, side): (fn(&[f64]) -> f64, fn(&[f64]) -> f64) = match model {
        Model::Limiting => (|y| y[1], |y| y[0]),
        Model::Perturbed => (|y| y[1] - y[3], |y| y[0] - y[2]),
    };
    let lim = LimitingSystem { kappa: params.kappa };
    let fil = FilamentSystem { params: *params };
    let tol_s = Tolerance::new(tol);
    let mut steps = Vec::new();
    let period = match model {
        Model::Limiting => find_return(&lim, &y0, t_max, tol_s, sec, side, &mut steps)?,
        Model::Perturbed => find_return(&fil, &y0, t_max, tol_s, sec, side, &mut steps)?,
    };
    let trajectory = assemble(params, model, DenseSolution { steps })?;
    Ok(PeriodMeasurement { period, trajectory })
}

fn find_return<S: OdeSystem>(
    sys: &S,
    y0: &[f64],
    t_max: f64,
    tol: Tolerance,
    sec: fn(&[f64]) -> f64,
    side: fn(&[f64]) -> f64,
    steps: &mut Vec<Step>,
) -> Result<f64> {
    let mut integ = Integrator::new(sys, 0.0, y0, 1.0, tol)?;
    while integ.t() < t_max {
        let st = integ.step(t_max)?;
        let found = sec(&st.y0) > 0.0 && sec(&st.y1) <= 0.0 && side(&st.y1) > 0.0;
        steps.push(st);
        if found {
            let st = steps.last().expect("step recorded");
            let t = bisect_on_step(st, sec, 1e-14 * st.t1().max(1.0));
            return Ok(t);
        }
    }
    Err(Error::NonPeriodic { t_max })
}

/// Largest deviations from the orbital symmetries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// `max |p₁₁(τ+T/2) − p₂₁(τ)|`
    pub half_period_rho: f64,
    /// `max |(p₁₂−p₂₂)(τ+T/2) + (p₁₂−p₂₂)(τ)|`
    pub half_period_z: f64,
    /// `max |x₁(−τ) − x₁(τ)|`
    pub reflection_x1: f64,
    /// `max |x₂(−τ) + x₂(τ)|`
    pub reflection_x2: f64,
}

impl SymmetryReport {
    pub fn max(&self) -> f64 {
        self.half_period_rho
            .max(self.half_period_z)
            .max(self.reflection_x1)
            .max(self.reflection_x2)
    }
}

/// Check the half-period exchange and time-reflection symmetries on a
/// trajectory spanning at least `[−T, 3T/2]`.
pub fn check_symmetries(traj: &Trajectory, period: f64) -> Result<SymmetryReport> {
    traj.require_span(-period, 1.5 * period)?;
    let n = 256;
    let mut rep = SymmetryReport {
        half_period_rho: 0.0,
        half_period_z: 0.0,
        reflection_x1: 0.0,
        reflection_x2: 0.0,
    };
    for k in 0..=n {
        let t = period * k as f64 / n as f64;
        let a = traj.pair_at(t)?;
        let b = traj.pair_at(t + 0.5 * period)?;
        rep.half_period_rho = rep.half_period_rho.max((b.p1.rho() - a.p2.rho()).abs());
        let dza = a.p1.z() - a.p2.z();
        let dzb = b.p1.z() - b.p2.z();
        rep.half_period_z = rep.half_period_z.max((dzb + dza).abs());
        let f = traj.scaled_at(t)?;
        let r = traj.scaled_at(-t)?;
        rep.reflection_x1 = rep.reflection_x1.max((r.x1 - f.x1).abs());
        rep.reflection_x2 = rep.reflection_x2.max((r.x2 + f.x2).abs());
    }
    Ok(rep)
}

fn require_physical(traj: &Trajectory) -> Result<()> {
    if traj.model != Model::Perturbed {
        return Err(Error::Invalid("requires a physical (perturbed) trajectory".into()));
    }
    Ok(())
}

/// Period average of the vertical midpoint velocity `(ṗ₁₂ + ṗ₂₂)/2`,
/// by quadrature of the velocity field along the trajectory.
pub fn drift_speed(traj: &Trajectory, period: f64) -> Result<f64> {
    require_physical(traj)?;
    let params = traj.params;
    let total = traj.integrate_along(0.0, period, |_, y| {
        let (v1, v2) = filament_rhs(&FilamentPair::from_array(y)?, &params)?;
        Ok(0.5 * (v1.im + v2.im))
    })?;
    Ok(total / period)
}

/// `∫_0^t √(2p₁₁(s)) ds` along a perturbed trajectory.
pub fn phase_integral(traj: &Trajectory, t: f64) -> Result<f64> {
    require_physical(traj)?;
    traj.integrate_along(0.0, t, |_, y| Ok((2.0 * y[0]).sqrt()))
}

/// `ω = 2π / ∫₀^T √(2p₁₁) dτ`.
pub fn frequency_omega(traj: &Trajectory, period: f64) -> Result<f64> {
    Ok(2.0 * PI / phase_integral(traj, period)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(eps: f64, kappa: f64, lambda: f64) -> PhysicalParams {
        PhysicalParams::new(eps, kappa, lambda).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PhysicalParams::new(0.5, 0.4, 1.0).is_err());
        assert!(PhysicalParams::new(0.05, -1.0, 1.0).is_err());
        let p = params(0.05, 0.4, 1.0);
        assert_abs_diff_eq!(p.alpha(), 0.3125);
        assert_abs_diff_eq!(p.r_eps(), 0.8f64.powf(0.25) / (-0.05f64.ln()).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn hamiltonian_term_by_term() {
        let p = params(0.05, 0.4, 1.0);
        let pair = initial_pair(&p).unwrap();
        let l = -0.05f64.ln();
        let term = |r: f64| r.sqrt() / (2.0 * 2f64.sqrt()) * (l - 7.0 / 4.0 + 1.25 * 8f64.ln() + 0.75 * r.ln());
        let oracle = eval_g(pair.p1, pair.p2).unwrap() / 2f64.sqrt() + term(pair.p1.rho()) + term(pair.p2.rho());
        assert_abs_diff_eq!(hamiltonian_h(&pair, &p).unwrap(), oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(
            hamiltonian_h(&pair.swapped(), &p).unwrap(),
            hamiltonian_h(&pair, &p).unwrap(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn hamiltonian_z_translation() {
        let p = params(0.05, 0.4, 1.0);
        let a = FilamentPair::from_array(&[0.5, 0.1, 0.3, -0.2]).unwrap();
        let b = FilamentPair::from_array(&[0.5, 1.1, 0.3, 0.8]).unwrap();
        assert_abs_diff_eq!(
            hamiltonian_h(&a, &p).unwrap(),
            hamiltonian_h(&b, &p).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn rhs_is_symplectic_gradient() {
        let p = params(0.05, 0.4, 1.0);
        let states = [
            [0.5, 0.1, 0.3, -0.2],
            [0.42, 0.0, 0.38, 0.05],
            [1.0, 0.3, 0.7, 0.0],
            [0.2, -0.1, 0.25, 0.2],
            [0.6, 0.6, 0.6, 0.4],
        ];
        let h = 1e-6;
        for s in states {
            let pair = FilamentPair::from_array(&s).unwrap();
            let (v1, v2) = filament_rhs(&pair, &p).unwrap();
            let mut grad = [0.0; 4];
            for k in 0..4 {
                let mut a = s;
                let mut b = s;
                a[k] += h;
                b[k] -= h;
                grad[k] = (hamiltonian_h(&FilamentPair::from_array(&a).unwrap(), &p).unwrap()
                    - hamiltonian_h(&FilamentPair::from_array(&b).unwrap(), &p).unwrap())
                    / (2.0 * h);
            }
            let l = p.log_eps();
            // rotate(∇H)/|ln ε| = (−∂_z H, ∂_ϱ H)/|ln ε|
            assert_abs_diff_eq!(v1.re, -grad[1] / l, epsilon = 1e-8);
            assert_abs_diff_eq!(v1.im, grad[0] / l, epsilon = 1e-8);
            assert_abs_diff_eq!(v2.re, -grad[3] / l, epsilon = 1e-8);
            assert_abs_diff_eq!(v2.im, grad[2] / l, epsilon = 1e-8);
            assert_abs_diff_eq!(v1.re + v2.re, 0.0, epsilon = 1e-14);
            let (w1, w2) = filament_rhs(&pair.swapped(), &p).unwrap();
            assert_abs_diff_eq!((w1 - v2).norm(), 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!((w2 - v1).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn limiting_rhs_at_start() {
        let p = params(0.05, 0.4, 1.0);
        let v = reduced_rhs(ScaledState { x1: 1.0, x2: 0.0 }, &p, Model::Limiting).unwrap();
        assert_eq!(v[0], 0.0);
        assert_abs_diff_eq!(v[1], -1.3125, epsilon = 1e-15);
        assert!(reduced_rhs(ScaledState { x1: 0.0, x2: 0.0 }, &p, Model::Limiting).is_err());
    }

    #[test]
    fn perturbation_scales_with_r_squared() {
        let s = ScaledState { x1: 0.7, x2: 0.4 };
        let gap = |eps: f64| {
            let p = params(eps, 0.4, 1.0);
            let a = reduced_rhs(s, &p, Model::Perturbed).unwrap();
            let b = reduced_rhs(s, &p, Model::Limiting).unwrap();
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        };
        // r_ε² ∝ 1/|ln ε|: at ε=1e-6 vs 1e-12 the gap should roughly halve
        let ratio = gap(1e-6) / gap(1e-12);
        assert!((1.5..2.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn scaling_round_trip() {
        let p = params(0.01, 0.4, 1.0);
        let s = ScaledState { x1: 0.37, x2: -1.2 };
        let back = pair_to_scaled(&scaled_to_pair(s, &p, 0.3).unwrap(), &p);
        assert_abs_diff_eq!(back.x1, s.x1, epsilon = 1e-14);
        assert_abs_diff_eq!(back.x2, s.x2, epsilon = 1e-14);
    }

    #[test]
    fn period_small_alpha_and_bounds() {
        assert_abs_diff_eq!(period_t0(1.0, 1e9).unwrap(), 2.0 * PI, epsilon = 1e-6);
        let t = period_t0(1.0, 0.4).unwrap();
        assert!((5.48..7.35).contains(&t));
        let (lo, hi) = period_bounds(1.0, 0.4);
        assert!(lo < t && t < hi);
    }

    #[test]
    fn period_scales_quadratically_at_fixed_alpha() {
        let a = period_t0(0.6, 0.3).unwrap();
        let b = period_t0(1.2, 1.2).unwrap();
        assert_abs_diff_eq!(b / a, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn measured_limiting_period_matches_formula() {
        let p = params(0.05, 0.4, 1.0);
        let m = measure_period(&p, Model::Limiting, 1e-12).unwrap();
        let t0 = period_t0(1.0, 0.4).unwrap();
        assert!(((m.period - t0) / t0).abs() < 1e-6);
    }

    #[test]
    fn limiting_orbit_symmetries() {
        let p = params(0.05, 0.4, 1.0);
        let t0 = period_t0(1.0, 0.4).unwrap();
        let st = InitialState::Scaled(ScaledState { x1: 1.0, x2: 0.0 });
        let traj = integrate_span(&st, &p, Model::Limiting, -1.05 * t0, 1.55 * t0, 1e-12).unwrap();
        let rep = check_symmetries(&traj, t0).unwrap();
        assert!(rep.max() < 1e-8, "{rep:?}");
        assert!(check_symmetries(&traj, 2.0 * t0).is_err());
    }

    #[test]
    fn drift_and_frequency_match_sampled_quadrature() {
        let p = params(0.01, 0.4, 1.0);
        let m = measure_period(&p, Model::Perturbed, 1e-11).unwrap();
        let t = m.period;
        let n = 4000;
        let (mut phase, mut lift) = (0.0, 0.0);
        for k in 0..n {
            let s = t * (k as f64 + 0.5) / n as f64;
            let pair = m.trajectory.pair_at(s).unwrap();
            let (v1, v2) = filament_rhs(&pair, &p).unwrap();
            phase += (2.0 * pair.p1.rho()).sqrt() * t / n as f64;
            lift += 0.5 * (v1.im + v2.im) * t / n as f64;
        }
        assert_abs_diff_eq!(
            frequency_omega(&m.trajectory, t).unwrap(),
            2.0 * PI / phase,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(drift_speed(&m.trajectory, t).unwrap(), lift / t, epsilon = 1e-6);
        // the midpoint height after one period equals the mean speed times T
        let z = |s: f64| {
            let q = m.trajectory.pair_at(s).unwrap();
            0.5 * (q.p1.z() + q.p2.z())
        };
        assert_abs_diff_eq!((z(t) - z(0.0)) / t, lift / t, epsilon = 1e-6);
        assert!(frequency_omega(
            &integrate(
                &InitialState::Scaled(ScaledState { x1: 1.0, x2: 0.0 }),
                &p,
                Model::Limiting,
                1.0,
                1e-10
            )
            .unwrap(),
            1.0
        )
        .is_err());
    }
}
