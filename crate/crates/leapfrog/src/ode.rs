//! Dormand–Prince 5(4) integrator with continuous (dense) output.

use crate::{Error, Result};

/// A first-order system y' = f(t, y).
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its interpolation polynomial.
#[derive(Debug, Clone)]
pub struct Step {
    pub t0: f64,
    pub h: f64,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    cont: [Vec<f64>; 4],
}

impl Step {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Fourth-order continuous extension at `t` within the step.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        (0..self.y0.len())
            .map(|i| {
                self.y0[i]
                    + s * (self.cont[0][i] + s1 * (self.cont[1][i] + s * (self.cont[2][i] + s1 * self.cont[3][i])))
            })
            .collect()
    }

    fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h > 0.0 {
            (self.t0, self.t1())
        } else {
            (self.t1(), self.t0)
        };
        t >= lo && t <= hi
    }
}

/// Integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Tolerance {
    pub fn new(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

/// Stepper state for incremental integration.
pub struct Integrator<'a, S: OdeSystem> {
    sys: &'a S,
    tol: Tolerance,
    t: f64,
    y: Vec<f64>,
    k1: Vec<f64>,
    h: f64,
    dir: f64,
    steps: usize,
}

impl<'a, S: OdeSystem> Integrator<'a, S> {
    /// `dir` is +1 for forward and −1 for backward integration.
    pub fn new(sys: &'a S, t0: f64, y0: &[f64], dir: f64, tol: Tolerance) -> Result<Self> {
        if y0.len() != sys.dim() {
            return Err(Error::Invalid(format!(
                "state has {} components, system expects {}",
                y0.len(),
                sys.dim()
            )));
        }
        let mut k1 = vec![0.0; y0.len()];
        sys.rhs(t0, y0, &mut k1)?;
        let h = initial_step(sys, t0, y0, &k1, dir, &tol)?;
        Ok(Self {
            sys,
            tol,
            t: t0,
            y: y0.to_vec(),
            k1,
            h,
            dir,
            steps: 0,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::Integration {
            t: self.t,
            state: self.y.clone(),
            reason: reason.into(),
        }
    }

    /// Advance by one accepted step, never passing `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<Step> {
        let n = self.y.len();
        let mut k = vec![vec![0.0; n]; 7];
        let mut ytmp = vec![0.0; n];
        let mut y1 = vec![0.0; n];
        loop {
            self.steps += 1;
            if self.steps > self.tol.max_steps {
                return Err(self.fail("step budget exhausted"));
            }
            let mut h = self.h.abs().min(self.tol.h_max) * self.dir;
            let remaining = t_stop - self.t;
            let last = remaining * self.dir <= h.abs() * (1.0 + 1e-12);
            if last {
                h = remaining;
            }
            if h.abs() < 1e-14 * self.t.abs().max(1.0) {
                return Err(self.fail("step size underflow"));
            }
            let t = self.t;
            let y = &self.y;
            k[0].copy_from_slice(&self.k1);
            let stages: [(f64, &[f64]); 5] = [
                (C2, &[A21]),
                (C3, &[A31, A32]),
                (C4, &[A41, A42, A43]),
                (C5, &[A51, A52, A53, A54]),
                (1.0, &[A61, A62, A63, A64, A65]),
            ];
            let mut ok = true;
            for (s, (c, a)) in stages.iter().enumerate() {
                for i in 0..n {
                    let acc: f64 = a.iter().enumerate().map(|(j, aj)| aj * k[j][i]).sum();
                    ytmp[i] = y[i] + h * acc;
                }
                if self.sys.rhs(t + c * h, &ytmp, &mut k[s + 1]).is_err() {
                    ok = false;
                    break;
                }
            }
            if ok {
                for i in 0..n {
                    y1[i] = y[i] + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
                }
                ok = self.sys.rhs(t + h, &y1, &mut k[6]).is_ok();
            }
            let err = if ok {
                let mut e2 = 0.0;
                for i in 0..n {
                    let e =
                        h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                    let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(y1[i].abs());
                    e2 += (e / sc).powi(2);
                }
                (e2 / n as f64).sqrt()
            } else {
                f64::INFINITY
            };
            if err.is_finite() && err <= 1.0 {
                let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
                let ydiff: Vec<f64> = (0..n).map(|i| y1[i] - y[i]).collect();
                let bspl: Vec<f64> = (0..n).map(|i| h * k[0][i] - ydiff[i]).collect();
                let c3: Vec<f64> = (0..n).map(|i| ydiff[i] - h * k[6][i] - bspl[i]).collect();
                let c4: Vec<f64> = (0..n)
                    .map(|i| {
                        h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i])
                    })
                    .collect();
                let step = Step {
                    t0: t,
                    h,
                    y0: y.clone(),
                    y1: y1.clone(),
                    cont: [ydiff, bspl, c3, c4],
                };
                self.t = if last { t_stop } else { t + h };
                self.y.copy_from_slice(&y1);
                self.k1.copy_from_slice(&k[6]);
                if !last {
                    self.h = h.abs() * fac;
                }
                return Ok(step);
            }
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.25
            };
            self.h = h.abs() * fac;
        }
    }
}

fn initial_step<S: OdeSystem>(sys: &S, t0: f64, y0: &[f64], f0: &[f64], dir: f64, tol: &Tolerance) -> Result<f64> {
    let n = y0.len();
    let sc: Vec<f64> = y0.iter().map(|y| tol.atol + tol.rtol * y.abs()).collect();
    let d0 = (y0.iter().zip(&sc).map(|(y, s)| (y / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d1 = (f0.iter().zip(&sc).map(|(f, s)| (f / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<f64> = (0..n).map(|i| y0[i] + dir * h0 * f0[i]).collect();
    let mut f1 = vec![0.0; n];
    sys.rhs(t0 + dir * h0, &y1, &mut f1)?;
    let d2 = ((0..n).map(|i| ((f1[i] - f0[i]) / sc[i]).powi(2)).sum::<f64>() / n as f64).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(tol.h_max))
}

/// A dense solution: consecutive accepted steps covering [t_min, t_max].
#[derive(Debug, Clone, Default)]
pub struct DenseSolution {
    /// Steps sorted by increasing time (backward steps are stored reversed in order).
    pub steps: Vec<Step>,
}

impl DenseSolution {
    pub fn t_min(&self) -> f64 {
        self.steps.first().map(|s| s.t0.min(s.t1())).unwrap_or(f64::NAN)
    }

    pub fn t_max(&self) -> f64 {
        self.steps.last().map(|s| s.t0.max(s.t1())).unwrap_or(f64::NAN)
    }

    /// Interpolated state at `t`, or `None` outside the covered span.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        let idx = self
            .steps
            .partition_point(|s| s.t0.max(s.t1()) < t)
            .min(self.steps.len().saturating_sub(1));
        let s = self.steps.get(idx)?;
        if s.contains(t) {
            Some(s.eval(t))
        } else {
            None
        }
    }

    /// Append a backward-integrated solution (steps in decreasing time).
    pub fn prepend_backward(&mut self, mut back: Vec<Step>) {
        back.reverse();
        back.append(&mut self.steps);
        self.steps = back;
    }
}

/// Integrate from `t0` to `t_end` (either direction), recording every step.
pub fn solve<S: OdeSystem>(sys: &S, t0: f64, y0: &[f64], t_end: f64, tol: Tolerance) -> Result<Vec<Step>> {
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut integ = Integrator::new(sys, t0, y0, dir, tol)?;
    let mut steps = Vec::new();
    while (t_end - integ.t()) * dir > 0.0 {
        steps.push(integ.step(t_end)?);
    }
    Ok(steps)
}

/// Locate a root of `g` on one step by bisection on the dense output.
pub fn bisect_on_step<G: Fn(&[f64]) -> f64>(step: &Step, g: G, t_tol: f64) -> f64 {
    let (mut a, mut b) = (step.t0, step.t1());
    let mut ga = g(&step.y0);
    for _ in 0..200 {
        if (b - a).abs() <= t_tol {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(&step.eval(m));
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    // Secant refinement inside the final bracket.
    let (fa, fb) = (g(&step.eval(a)), g(&step.eval(b)));
    if fa != fb {
        let t = a - fa * (b - a) / (fb - fa);
        if (t - a) * (t - b) <= 0.0 {
            return t;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = y[1];
            dy[1] = -y[0];
            Ok(())
        }
    }

    #[test]
    fn harmonic_oscillator_endpoint_and_dense() {
        let steps = solve(&Oscillator, 0.0, &[1.0, 0.0], 10.0, Tolerance::new(1e-12)).unwrap();
        let sol = DenseSolution { steps };
        let y = sol.eval(10.0).unwrap();
        assert_abs_diff_eq!(y[0], 10f64.cos(), epsilon = 1e-9);
        for t in [0.3, 2.7, 7.77] {
            let y = sol.eval(t).unwrap();
            assert_abs_diff_eq!(y[0], t.cos(), epsilon = 1e-9);
            assert_abs_diff_eq!(y[1], -t.sin(), epsilon = 1e-9);
        }
        assert!(sol.eval(10.5).is_none());
    }

    #[test]
    fn backward_integration() {
        let back = solve(&Oscillator, 0.0, &[1.0, 0.0], -3.0, Tolerance::new(1e-12)).unwrap();
        let mut sol = DenseSolution::default();
        sol.prepend_backward(back);
        let y = sol.eval(-2.0).unwrap();
        assert_abs_diff_eq!(y[1], 2f64.sin(), epsilon = 1e-9);
    }

    #[test]
    fn bisection_finds_zero_of_cosine() {
        let steps = solve(&Oscillator, 0.0, &[1.0, 0.0], 3.0, Tolerance::new(1e-12)).unwrap();
        let st = steps.iter().find(|s| s.y0[0] > 0.0 && s.y1[0] <= 0.0).unwrap();
        let t = bisect_on_step(st, |y| y[0], 1e-14);
        assert_abs_diff_eq!(t, std::f64::consts::FRAC_PI_2, epsilon = 1e-10);
    }
}
