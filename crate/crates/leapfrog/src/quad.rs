//! Quadrature building blocks: Gauss–Legendre rules, composite and
//! geometrically graded panels, adaptive Gauss–Kronrod, and a Duffy-type
//! rule for rectangles with a logarithmic corner singularity.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n starting from the Chebyshev-like guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, w * h))
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const CACHE_MAX: usize = 128;
static RULES: [OnceLock<GaussLegendre>; CACHE_MAX + 1] = [const { OnceLock::new() }; CACHE_MAX + 1];

/// Shared Gauss–Legendre rule (cached for n ≤ 128).
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    assert!((1..=CACHE_MAX).contains(&n), "rule size {n} not cached");
    RULES[n].get_or_init(|| GaussLegendre::new(n))
}

/// Composite Gauss–Legendre with `panels` equal panels of `n` nodes.
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, n: usize, mut f: F) -> f64 {
    let rule = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + h * k as f64;
            rule.integrate(lo, lo + h, &mut f)
        })
        .sum()
}

/// Breakpoints of a geometric mesh on [a, b] refined toward `a`:
/// a, a + (b−a)σ^levels, …, a + (b−a)σ, b.
pub fn geometric_breaks(a: f64, b: f64, sigma: f64, levels: usize) -> Vec<f64> {
    let mut pts = Vec::with_capacity(levels + 2);
    pts.push(a);
    for k in (1..=levels).rev() {
        pts.push(a + (b - a) * sigma.powi(k as i32));
    }
    pts.push(b);
    pts
}

/// Gauss–Legendre on a geometric mesh graded toward `a`; suited to
/// integrable endpoint singularities such as `ln(x − a)`.
pub fn graded<F: FnMut(f64) -> f64>(a: f64, b: f64, sigma: f64, levels: usize, n: usize, mut f: F) -> f64 {
    let rule = gauss_legendre(n);
    geometric_breaks(a, b, sigma, levels)
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .sum()
}

/// Nodes and weights of the graded rule, for tensor constructions.
pub fn graded_nodes(a: f64, b: f64, sigma: f64, levels: usize, n: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(n);
    geometric_breaks(a, b, sigma, levels)
        .windows(2)
        .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
        .collect()
}

// Gauss–Kronrod 7–15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(a: f64, b: f64, f: &mut F) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod 7–15 by recursive bisection.
///
/// Returns an error if the interval budget is exhausted before the
/// accumulated error estimate falls below `abs_tol + rel_tol·|I|`.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, abs_tol: f64, rel_tol: f64, mut f: F) -> crate::Result<f64> {
    let mut stack = vec![(a, b, gk15(a, b, &mut f))];
    let mut total = 0.0;
    let mut err_total = 0.0;
    let mut evals = 0usize;
    // Split until each subinterval meets its proportional share of the tolerance.
    while let Some((lo, hi, (val, err))) = stack.pop() {
        evals += 1;
        let width_share = (hi - lo) / (b - a);
        let tol = abs_tol.max(rel_tol * val.abs()) * width_share.max(1e-3);
        if err <= tol || (hi - lo) < 1e-14 * (b - a).abs() || evals > 20_000 {
            total += val;
            err_total += err;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, gk15(lo, mid, &mut f)));
        stack.push((mid, hi, gk15(mid, hi, &mut f)));
    }
    if err_total > 10.0 * abs_tol.max(rel_tol * total.abs()) {
        return Err(crate::Error::Quadrature {
            what: "adaptive Gauss-Kronrod",
            change: err_total,
        });
    }
    Ok(total)
}

/// Resolution of the Duffy corner rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerRule {
    /// Geometric grading ratio for the radial Duffy variable.
    pub sigma: f64,
    /// Number of geometric levels toward the singular corner.
    pub levels: usize,
    /// Gauss points per radial panel.
    pub radial_points: usize,
    /// Gauss points in the angular Duffy variable.
    pub angular_points: usize,
}

impl Default for CornerRule {
    fn default() -> Self {
        Self {
            sigma: 0.2,
            levels: 12,
            radial_points: 12,
            angular_points: 24,
        }
    }
}

impl CornerRule {
    pub fn refined(self) -> Self {
        Self {
            sigma: self.sigma,
            levels: self.levels + 6,
            radial_points: self.radial_points + 6,
            angular_points: 2 * self.angular_points,
        }
    }

    /// Tensor nodes `(x, y, w)` for a rectangle whose corner `(xc, yc)`
    /// carries an integrable singularity; `(xo, yo)` is the opposite corner.
    ///
    /// The square is split along its diagonal and each triangle is mapped
    /// to the unit square with the collapsed vertex at the corner, which
    /// removes the `1/r` area factor; the radial variable is graded.
    pub fn nodes(&self, xc: f64, yc: f64, xo: f64, yo: f64) -> Vec<(f64, f64, f64)> {
        let jac = ((xo - xc) * (yo - yc)).abs();
        let radial = graded_nodes(0.0, 1.0, self.sigma, self.levels, self.radial_points);
        let angular = gauss_legendre(self.angular_points);
        let mut out = Vec::with_capacity(2 * radial.len() * angular.len());
        for &(u, wu) in &radial {
            for (v, wv) in angular.mapped(0.0, 1.0) {
                let w = jac * wu * wv * u;
                // Triangle below the diagonal: X = u, Y = u v.
                out.push((xc + (xo - xc) * u, yc + (yo - yc) * u * v, w));
                // Triangle above: X = u v, Y = u.
                out.push((xc + (xo - xc) * u * v, yc + (yo - yc) * u, w));
            }
        }
        out
    }

    pub fn integrate<F: FnMut(f64, f64) -> f64>(&self, xc: f64, yc: f64, xo: f64, yo: f64, mut f: F) -> f64 {
        self.nodes(xc, yc, xo, yo)
            .into_iter()
            .map(|(x, y, w)| w * f(x, y))
            .sum()
    }
}

/// Periodic trapezoid nodes θ_k = 2πk/n.
pub fn periodic_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}
