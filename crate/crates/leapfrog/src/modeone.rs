//! Nested Volterra operators for the first Fourier mode.
//!
//! Everything is discretized on a [`VolterraGrid`]: a set of nodes on
//! `[0, length]` together with a cumulative-integration matrix `C`, so that
//! `(C f)ᵢ ≈ ∫₀^{xᵢ} f`. The operator
//!
//! `𝒯[g](φ) = ϱ₁(φ) ∫₀^φ ϱ₂(τ) ∫₀^τ ϱ₃(s) g(s) ds dτ`
//!
//! then becomes the dense matrix `diag(ϱ₁) C diag(ϱ₂) C diag(ϱ₃)`, and
//! `Id − 𝒯` is inverted with a dense LU factorization.
//!
//! The coefficients are built from the limiting relative orbit
//! `(y₁, y₂)(φ) = x(T₀φ/2π)` through
//!
//! - `α̌ = y₁y₂/ρ⁴`, `ȟ₂ = (y₁² − y₂²)/ρ⁴`, `ρ² = y₁² + y₂²`
//! - `f̌₃(φ) = (T₀/π) ∫₀^φ α̌`
//! - `ϱ₁ = ϱ₃ = e^{−f̌₃}`, `ϱ₂ = T₀² ȟ₂ e^{2f̌₃}/(64π²κ)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{check_open, Error, Result};
use crate::filaments::{self, InitialState, Model, PhysicalParams, ScaledState, Trajectory};

/// Largest accepted condition number of `Id − 𝒯`.
pub const MAX_CONDITION: f64 = 1e12;

/// Node family of a [`VolterraGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Chebyshev–Lobatto nodes with spectral cumulative integration.
    Chebyshev,
    /// Uniform nodes with the composite trapezoid rule.
    Trapezoid,
}

/// Nodes on `[0, length]` and the matching cumulative-integration matrix.
#[derive(Debug, Clone)]
pub struct VolterraGrid {
    kind: GridKind,
    length: f64,
    nodes: Vec<f64>,
    cumulative: DMatrix<f64>,
}

impl VolterraGrid {
    /// `n + 1` Chebyshev–Lobatto nodes `xₖ = (L/2)(1 − cos(kπ/n))`.
    pub fn chebyshev(length: f64, n: usize) -> Result<Self> {
        check_open("length", length, 0.0, f64::INFINITY)?;
        if n < 2 {
            return Err(Error::Invalid(format!("chebyshev grid needs n >= 2, got {n}")));
        }
        let m = n + 1;
        let theta: Vec<f64> = (0..m).map(|k| PI - PI * k as f64 / n as f64).collect();
        let nodes: Vec<f64> = theta.iter().map(|t| 0.5 * length * (1.0 + t.cos())).collect();

        // values -> Chebyshev coefficients cⱼ of f = Σ cⱼ Tⱼ
        let mut to_coef = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            for k in 0..m {
                let edge = if k == 0 || k == n { 0.5 } else { 1.0 };
                to_coef[(j, k)] = 2.0 / n as f64 * edge * (j as f64 * theta[k]).cos();
            }
            if j == 0 || j == n {
                for k in 0..m {
                    to_coef[(j, k)] *= 0.5;
                }
            }
        }
        // coefficients -> antiderivative coefficients b₁..b_{n+1}
        let mut integ = DMatrix::<f64>::zeros(n + 2, m);
        let c = |j: usize| -> Option<usize> { (j < m).then_some(j) };
        for k in 1..n + 2 {
            let scale = 1.0 / (2.0 * k as f64);
            if let Some(j) = c(k - 1) {
                integ[(k, j)] += if k == 1 { 2.0 * scale } else { scale };
            }
            if let Some(j) = c(k + 1) {
                integ[(k, j)] -= scale;
            }
        }
        // evaluate the antiderivative at the nodes, minus its value at t = −1
        let mut eval = DMatrix::<f64>::zeros(m, n + 2);
        for i in 0..m {
            for k in 1..n + 2 {
                let at_left = if k % 2 == 0 { 1.0 } else { -1.0 };
                eval[(i, k)] = (k as f64 * theta[i]).cos() - at_left;
            }
        }
        let cumulative = (eval * integ * to_coef) * (0.5 * length);
        Ok(Self {
            kind: GridKind::Chebyshev,
            length,
            nodes,
            cumulative,
        })
    }

    /// `n + 1` uniform nodes with trapezoid cumulative sums.
    pub fn trapezoid(length: f64, n: usize) -> Result<Self> {
        check_open("length", length, 0.0, f64::INFINITY)?;
        if n < 1 {
            return Err(Error::Invalid("trapezoid grid needs n >= 1".into()));
        }
        let h = length / n as f64;
        let nodes = (0..=n).map(|k| k as f64 * h).collect();
        let mut cumulative = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 1..=n {
            cumulative[(i, 0)] = 0.5 * h;
            for j in 1..i {
                cumulative[(i, j)] = h;
            }
            cumulative[(i, i)] = 0.5 * h;
        }
        Ok(Self {
            kind: GridKind::Trapezoid,
            length,
            nodes,
            cumulative,
        })
    }

    pub fn new(kind: GridKind, length: f64, n: usize) -> Result<Self> {
        match kind {
            GridKind::Chebyshev => Self::chebyshev(length, n),
            GridKind::Trapezoid => Self::trapezoid(length, n),
        }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn cumulative_matrix(&self) -> &DMatrix<f64> {
        &self.cumulative
    }

    /// `x ↦ ∫₀^x f` at every node.
    pub fn cumulate(&self, f: &[f64]) -> Vec<f64> {
        (&self.cumulative * DVector::from_column_slice(f)).data.into()
    }

    /// `∫₀^L f`.
    pub fn total(&self, f: &[f64]) -> f64 {
        let last = self.len() - 1;
        self.cumulative.row(last).iter().zip(f).map(|(w, v)| w * v).sum()
    }

    /// Interpolate node values at `x ∈ [0, L]` (barycentric for Chebyshev,
    /// piecewise linear for the uniform grid).
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let n = self.len() - 1;
        match self.kind {
            GridKind::Chebyshev => {
                let (mut num, mut den) = (0.0, 0.0);
                for (k, (&xk, &fk)) in self.nodes.iter().zip(values).enumerate() {
                    let d = x - xk;
                    if d == 0.0 {
                        return fk;
                    }
                    let mut w = if k % 2 == 0 { 1.0 } else { -1.0 };
                    if k == 0 || k == n {
                        w *= 0.5;
                    }
                    num += w * fk / d;
                    den += w / d;
                }
                num / den
            }
            GridKind::Trapezoid => {
                let h = self.length / n as f64;
                let s = (x / h).clamp(0.0, n as f64);
                let i = (s.floor() as usize).min(n - 1);
                let t = s - i as f64;
                values[i] * (1.0 - t) + values[i + 1] * t
            }
        }
    }
}

/// Even `2π`-periodic function with `g(φ + π) = −g(φ)`, stored by its odd
/// cosine modes: `g = Σₙ aₙ cos((2n+1)φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarEvenFunction {
    coeffs: Vec<f64>,
}

impl StarEvenFunction {
    /// `coeffs[n]` multiplies `cos((2n+1)φ)`.
    pub fn from_odd_cosines(coeffs: &[f64]) -> Self {
        Self {
            coeffs: coeffs.to_vec(),
        }
    }

    /// Project `f` onto `cos φ, cos 3φ, …` (the first `modes` odd modes) by
    /// the trapezoid rule on `samples` points.
    pub fn project<F: Fn(f64) -> f64>(f: F, modes: usize, samples: usize) -> Self {
        let values: Vec<f64> = (0..samples).map(|k| f(2.0 * PI * k as f64 / samples as f64)).collect();
        let coeffs = (0..modes)
            .map(|n| {
                let m = (2 * n + 1) as f64;
                2.0 / samples as f64
                    * values
                        .iter()
                        .enumerate()
                        .map(|(k, v)| v * (m * 2.0 * PI * k as f64 / samples as f64).cos())
                        .sum::<f64>()
            })
            .collect();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * ((2 * n + 1) as f64 * phi).cos())
            .sum()
    }

    pub fn sample(&self, grid: &VolterraGrid) -> Vec<f64> {
        grid.nodes().iter().map(|&x| self.eval(x)).collect()
    }
}

/// The limiting relative orbit through `(λ, 0)`, parametrized by the phase
/// `φ = 2πτ/T₀`. Immutable once built, so it can be shared across threads.
#[derive(Debug, Clone)]
pub struct LimitingOrbit {
    lambda: f64,
    kappa: f64,
    t0: f64,
    traj: Trajectory,
}

impl LimitingOrbit {
    pub fn new(lambda: f64, kappa: f64, tol: f64) -> Result<Self> {
        let t0 = filaments::period_t0(lambda, kappa)?;
        // ε does not enter the limiting system; any admissible value will do
        let params = PhysicalParams::new(0.1, kappa, lambda)?;
        let start = InitialState::Scaled(ScaledState { x1: lambda, x2: 0.0 });
        let traj = filaments::integrate_span(&start, &params, Model::Limiting, -0.01 * t0, 1.01 * t0, tol)?;
        Ok(Self {
            lambda,
            kappa,
            t0,
            traj,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    fn tau(&self, phi: f64) -> f64 {
        self.t0 * phi.rem_euclid(2.0 * PI) / (2.0 * PI)
    }

    /// `(y₁, y₂)(φ)`.
    pub fn y(&self, phi: f64) -> Result<(f64, f64)> {
        let s = self.traj.state_at(self.tau(phi))?;
        Ok((s[0], s[1]))
    }

    /// `α̌(φ) = y₁y₂/ρ⁴`.
    pub fn alpha_check(&self, phi: f64) -> Result<f64> {
        let (a, b) = self.y(phi)?;
        Ok(alpha_of(a, b))
    }

    /// `ȟ₂(φ) = (y₁² − y₂²)/ρ⁴`.
    pub fn h2_check(&self, phi: f64) -> Result<f64> {
        let (a, b) = self.y(phi)?;
        Ok(h2_of(a, b))
    }

    /// `f̌₃` between two phases, as `2∫ x₁x₂/ρ⁴ dτ` along the orbit.
    fn f3_increment(&self, phi_a: f64, phi_b: f64) -> Result<f64> {
        let scale = self.t0 / (2.0 * PI);
        let v = self
            .traj
            .integrate_along(scale * phi_a, scale * phi_b, |_, y| Ok(alpha_of(y[0], y[1])))?;
        Ok(2.0 * v)
    }

    /// `f̌₃(φ)` for `φ ∈ [0, 2π]`.
    pub fn f3_check(&self, phi: f64) -> Result<f64> {
        check_phase(phi)?;
        self.f3_increment(0.0, phi)
    }

    /// `[ϱ₁, ϱ₂, ϱ₃](φ)` for `φ ∈ [0, 2π]`.
    pub fn rho(&self, phi: f64) -> Result<[f64; 3]> {
        let f3 = self.f3_check(phi)?;
        self.rho_from(phi, f3)
    }

    fn rho_from(&self, phi: f64, f3: f64) -> Result<[f64; 3]> {
        let h2 = self.h2_check(phi)?;
        let r1 = (-f3).exp();
        let r2 = self.t0 * self.t0 * h2 * (2.0 * f3).exp() / (64.0 * PI * PI * self.kappa);
        Ok([r1, r2, r1])
    }
}

fn alpha_of(y1: f64, y2: f64) -> f64 {
    let r2 = y1 * y1 + y2 * y2;
    y1 * y2 / (r2 * r2)
}

fn h2_of(y1: f64, y2: f64) -> f64 {
    let r2 = y1 * y1 + y2 * y2;
    (y1 * y1 - y2 * y2) / (r2 * r2)
}

fn check_phase(phi: f64) -> Result<()> {
    if !(-1e-12..=2.0 * PI + 1e-12).contains(&phi) {
        return Err(Error::Domain {
            what: "phase",
            value: phi,
        });
    }
    Ok(())
}

/// The three coefficient functions sampled on a grid.
#[derive(Debug, Clone)]
pub struct CoefficientTriple {
    pub phi: Vec<f64>,
    pub rho1: Vec<f64>,
    pub rho2: Vec<f64>,
    pub rho3: Vec<f64>,
}

impl CoefficientTriple {
    /// Sample the orbit coefficients; `f̌₃` is accumulated node to node along
    /// the dense output, so its accuracy is the integrator's, not the grid's.
    pub fn from_orbit(orbit: &LimitingOrbit, grid: &VolterraGrid) -> Result<Self> {
        if grid.length() > 2.0 * PI + 1e-12 {
            return Err(Error::Domain {
                what: "grid length",
                value: grid.length(),
            });
        }
        let phi = grid.nodes().to_vec();
        let mut f3 = 0.0;
        let mut prev = 0.0;
        let (mut rho1, mut rho2, mut rho3) = (Vec::new(), Vec::new(), Vec::new());
        for &x in &phi {
            f3 += orbit.f3_increment(prev, x)?;
            prev = x;
            let [a, b, c] = orbit.rho_from(x, f3)?;
            rho1.push(a);
            rho2.push(b);
            rho3.push(c);
        }
        Ok(Self { phi, rho1, rho2, rho3 })
    }

    /// Coefficients given pointwise.
    pub fn from_fn<F: Fn(f64) -> [f64; 3]>(grid: &VolterraGrid, f: F) -> Self {
        let phi = grid.nodes().to_vec();
        let vals: Vec<[f64; 3]> = phi.iter().map(|&x| f(x)).collect();
        Self {
            rho1: vals.iter().map(|v| v[0]).collect(),
            rho2: vals.iter().map(|v| v[1]).collect(),
            rho3: vals.iter().map(|v| v[2]).collect(),
            phi,
        }
    }

    /// Multiply `ϱ₂` by `s`.
    pub fn with_rho2_scale(mut self, s: f64) -> Self {
        self.rho2.iter_mut().for_each(|v| *v *= s);
        self
    }

    /// `max ‖ϱⱼ^{±1}‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        let mut m: f64 = 0.0;
        for v in self.rho1.iter().chain(&self.rho3) {
            m = m.max(v.abs()).max(1.0 / v.abs());
        }
        for v in &self.rho2 {
            m = m.max(v.abs());
        }
        m
    }

    fn check(&self, grid: &VolterraGrid) -> Result<()> {
        let n = grid.len();
        if self.rho1.len() != n || self.rho2.len() != n || self.rho3.len() != n {
            return Err(Error::Shape(format!(
                "coefficients sampled on {} nodes, grid has {n}",
                self.rho1.len()
            )));
        }
        Ok(())
    }
}

/// `C(ϱ₂ ⊙ C(ϱ₃ ⊙ g))`, i.e. `𝒯[g]` without the outer `ϱ₁`.
fn inner_double(g: &[f64], c: &CoefficientTriple, grid: &VolterraGrid) -> Vec<f64> {
    let f: Vec<f64> = g.iter().zip(&c.rho3).map(|(a, b)| a * b).collect();
    let inner = grid.cumulate(&f);
    let w: Vec<f64> = inner.iter().zip(&c.rho2).map(|(a, b)| a * b).collect();
    grid.cumulate(&w)
}

/// `𝒯[g]` at the grid nodes.
pub fn apply_t(g: &[f64], coeffs: &CoefficientTriple, grid: &VolterraGrid) -> Result<Vec<f64>> {
    coeffs.check(grid)?;
    if g.len() != grid.len() {
        return Err(Error::Shape(format!(
            "{} samples on a {}-node grid",
            g.len(),
            grid.len()
        )));
    }
    let w = inner_double(g, coeffs, grid);
    Ok(w.iter().zip(&coeffs.rho1).map(|(a, b)| a * b).collect())
}

/// `𝒫[g] = ϱ₁ (b + ∫₀^φ ϱ₂ ∫₀^τ ϱ₃ g)` with the admissibility constant
/// `b = −½ ∫₀^π ϱ₂ ∫₀^τ ϱ₃ g`, which makes the output anti-invariant under
/// `φ ↦ φ + π` when `g` is. The grid must cover `[0, π]`.
pub fn apply_p(g: &[f64], coeffs: &CoefficientTriple, grid: &VolterraGrid) -> Result<(Vec<f64>, f64)> {
    coeffs.check(grid)?;
    if grid.length() < PI - 1e-12 {
        return Err(Error::Domain {
            what: "grid length",
            value: grid.length(),
        });
    }
    let w = inner_double(g, coeffs, grid);
    let b = -0.5 * grid.interpolate(&w, PI);
    let out = w.iter().zip(&coeffs.rho1).map(|(a, r)| r * (b + a)).collect();
    Ok((out, b))
}

/// Dense matrix of `𝒯` on the grid.
pub fn t_matrix(coeffs: &CoefficientTriple, grid: &VolterraGrid) -> Result<DMatrix<f64>> {
    coeffs.check(grid)?;
    let c = grid.cumulative_matrix();
    let n = grid.len();
    let mut right = c.clone();
    for j in 0..n {
        right.column_mut(j).scale_mut(coeffs.rho3[j]);
    }
    let mut left = c.clone();
    for i in 0..n {
        left.row_mut(i).scale_mut(coeffs.rho1[i]);
    }
    for j in 0..n {
        left.column_mut(j).scale_mut(coeffs.rho2[j]);
    }
    Ok(left * right)
}

/// Solution of `(Id − 𝒯)u = rhs` and its diagnostics.
#[derive(Debug, Clone)]
pub struct Inversion {
    pub u: Vec<f64>,
    /// `‖u − 𝒯u − rhs‖_∞`
    pub residual: f64,
    /// 2-norm condition number of the discretized `Id − 𝒯`
    pub condition: f64,
}

pub fn invert_i_minus_t(rhs: &[f64], coeffs: &CoefficientTriple, grid: &VolterraGrid) -> Result<Inversion> {
    if rhs.len() != grid.len() {
        return Err(Error::Shape(format!(
            "{} samples on a {}-node grid",
            rhs.len(),
            grid.len()
        )));
    }
    let n = grid.len();
    let a = DMatrix::<f64>::identity(n, n) - t_matrix(coeffs, grid)?;
    let sv = a.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Solver(format!("Id - T condition number {condition:.3e}")));
    }
    let b = DVector::from_column_slice(rhs);
    let u = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Solver("Id - T is singular".into()))?;
    let residual = (&a * &u - &b).amax();
    Ok(Inversion {
        u: u.data.into(),
        residual,
        condition,
    })
}

/// Partial sums `Σ_{k≤K} 𝒯^k rhs` for `K = 0..=k_max`.
pub fn neumann_partial_sums(
    rhs: &[f64],
    coeffs: &CoefficientTriple,
    grid: &VolterraGrid,
    k_max: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut term = rhs.to_vec();
    let mut sum = rhs.to_vec();
    let mut out = vec![sum.clone()];
    for _ in 0..k_max {
        term = apply_t(&term, coeffs, grid)?;
        sum.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
        out.push(sum.clone());
    }
    Ok(out)
}

/// Spectral radius of the discretized `𝒯`.
pub fn spectral_radius(coeffs: &CoefficientTriple, grid: &VolterraGrid) -> Result<f64> {
    let t = t_matrix(coeffs, grid)?;
    Ok(t.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// How `(Id − 𝒯)^{−1}[ϱ₁]` enters the non-resonance functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerSolve {
    /// Dense LU of the Nyström matrix.
    Direct,
    /// Truncated Neumann series with the given number of terms.
    Neumann(usize),
}

/// Discretization and modelling knobs for `𝒫(λ, κ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOneOptions {
    pub grid: GridKind,
    /// Chebyshev degree or number of trapezoid intervals on `[0, π]`.
    pub grid_points: usize,
    /// Factor applied to `ϱ₂` (1 reproduces the plain definition).
    pub rho2_scale: f64,
    pub ode_tol: f64,
    pub solve: InnerSolve,
}

impl Default for ModeOneOptions {
    fn default() -> Self {
        Self {
            grid: GridKind::Chebyshev,
            grid_points: 128,
            rho2_scale: 1.0,
            ode_tol: 1e-12,
            solve: InnerSolve::Direct,
        }
    }
}

/// `1 + ∫₀^π ϱ₂(τ) ∫₀^τ ϱ₃(s) (Id − 𝒯)^{−1}[ϱ₁](s) ds dτ` for sampled
/// coefficients on a grid of length `π`.
pub fn p_functional(coeffs: &CoefficientTriple, grid: &VolterraGrid, solve: InnerSolve) -> Result<f64> {
    coeffs.check(grid)?;
    if (grid.length() - PI).abs() > 1e-12 {
        return Err(Error::Domain {
            what: "grid length",
            value: grid.length(),
        });
    }
    let u = match solve {
        InnerSolve::Direct => invert_i_minus_t(&coeffs.rho1, coeffs, grid)?.u,
        InnerSolve::Neumann(k) => neumann_partial_sums(&coeffs.rho1, coeffs, grid, k)?
            .pop()
            .expect("k_max + 1 partial sums"),
    };
    let w = inner_double(&u, coeffs, grid);
    Ok(1.0 + w[w.len() - 1])
}

/// `𝒫(λ, κ)` from the limiting orbit.
pub fn nonresonance_p(lambda: f64, kappa: f64, opts: &ModeOneOptions) -> Result<f64> {
    let orbit = LimitingOrbit::new(lambda, kappa, opts.ode_tol)?;
    nonresonance_p_on(&orbit, opts)
}

/// `𝒫` for an already integrated orbit.
pub fn nonresonance_p_on(orbit: &LimitingOrbit, opts: &ModeOneOptions) -> Result<f64> {
    let grid = VolterraGrid::new(opts.grid, PI, opts.grid_points)?;
    let coeffs = CoefficientTriple::from_orbit(orbit, &grid)?.with_rho2_scale(opts.rho2_scale);
    p_functional(&coeffs, &grid, opts.solve)
}

/// Coefficients of the limiting orbit on `grid`.
pub fn build_coefficients(lambda: f64, kappa: f64, grid: &VolterraGrid, tol: f64) -> Result<CoefficientTriple> {
    let orbit = LimitingOrbit::new(lambda, kappa, tol)?;
    CoefficientTriple::from_orbit(&orbit, grid)
}

/// `π² e^{9π e^{λ²/(16κ)}} λ²/(16κ)`; at most `½` guarantees a contraction.
pub fn smallness_quantity(lambda: f64, kappa: f64) -> f64 {
    let a = lambda * lambda / (16.0 * kappa);
    PI * PI * (9.0 * PI * a.exp()).exp() * a
}

/// Bound `e^{2π e^{λ²/(16κ)}}` on `|ϱ₁^{±1}|`.
pub fn rho_bound(lambda: f64, kappa: f64) -> f64 {
    (2.0 * PI * (lambda * lambda / (16.0 * kappa)).exp()).exp()
}

/// Bound `π² e^{9π e^{λ²/(16κ)}} λ²/(8κ)` on `|𝒫 − 1|`.
pub fn p_deviation_bound(lambda: f64, kappa: f64) -> f64 {
    2.0 * smallness_quantity(lambda, kappa)
}

/// A sign change of the scanned function, refined by bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChange {
    pub lo: f64,
    pub hi: f64,
    pub root: f64,
}

/// Samples and sign changes of a scalar function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroScan {
    pub samples: Vec<(f64, f64)>,
    pub brackets: Vec<SignChange>,
}

/// Sample `f` at `n_points` uniform points of `range` (in parallel) and
/// bisect every sign change until the bracket is shorter than `tol`.
pub fn scan_sign_changes<F>(f: F, range: (f64, f64), n_points: usize, tol: f64) -> Result<ZeroScan>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let (a, b) = range;
    if !(a < b) || n_points < 2 {
        return Err(Error::Invalid(format!("scan range [{a}, {b}] with {n_points} points")));
    }
    let xs: Vec<f64> = (0..n_points)
        .map(|k| a + (b - a) * k as f64 / (n_points - 1) as f64)
        .collect();
    let ys = xs.par_iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let mut brackets = Vec::new();
    for k in 0..n_points - 1 {
        let (mut lo, mut hi) = (xs[k], xs[k + 1]);
        let (mut flo, fhi) = (ys[k], ys[k + 1]);
        if flo == 0.0 {
            brackets.push(SignChange { lo, hi: lo, root: lo });
            continue;
        }
        if flo.signum() == fhi.signum() || fhi == 0.0 {
            continue;
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let fm = f(mid)?;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        brackets.push(SignChange {
            lo,
            hi,
            root: 0.5 * (lo + hi),
        });
    }
    Ok(ZeroScan {
        samples: xs.into_iter().zip(ys).collect(),
        brackets,
    })
}

/// Sign changes of `λ ↦ 𝒫(λ, κ)` on `lambda_range`.
pub fn scan_zeros(kappa: f64, lambda_range: (f64, f64), n_points: usize, opts: &ModeOneOptions) -> Result<ZeroScan> {
    scan_sign_changes(|l| nonresonance_p(l, kappa, opts), lambda_range, n_points, 1e-6)
}
