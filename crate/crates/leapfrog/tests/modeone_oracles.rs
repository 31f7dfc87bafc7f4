use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use leapfrog::filaments::period_t0;
use leapfrog::modeone::*;

/// `𝒫` through the equivalent initial-value problem: with `u = ϱ₁v`, the
/// resolvent equation becomes `v′ = ϱ₂F`, `F′ = ϱ₁ϱ₃v`, `v(0) = 1`,
/// `F(0) = 0`, and `𝒫 = v(π)`. The orbit and `f̌₃` are integrated alongside
/// by classical RK4 in the phase variable, independently of the library.
fn p_by_shooting(lambda: f64, kappa: f64, rho2_scale: f64, steps: usize) -> f64 {
    let t0 = period_t0(lambda, kappa).unwrap();
    let c = t0 / (2.0 * PI);
    // state: y₁, y₂, f̌₃, v, F
    let rhs = |s: &[f64; 5]| -> [f64; 5] {
        let (y1, y2) = (s[0], s[1]);
        let r2 = y1 * y1 + y2 * y2;
        let dy1 = y2 / r2;
        let dy2 = -y1 / r2 - y1 / (8.0 * kappa);
        let alpha = y1 * y2 / (r2 * r2);
        let h2 = (y1 * y1 - y2 * y2) / (r2 * r2);
        let rho13 = (-2.0 * s[2]).exp();
        let rho2 = rho2_scale * t0 * t0 * h2 * (2.0 * s[2]).exp() / (64.0 * PI * PI * kappa);
        [c * dy1, c * dy2, t0 / PI * alpha, rho2 * s[4], rho13 * s[3]]
    };
    let h = PI / steps as f64;
    let mut s = [lambda, 0.0, 0.0, 1.0, 0.0];
    let add = |a: &[f64; 5], k: &[f64; 5], f: f64| -> [f64; 5] { std::array::from_fn(|i| a[i] + f * k[i]) };
    for _ in 0..steps {
        let k1 = rhs(&s);
        let k2 = rhs(&add(&s, &k1, 0.5 * h));
        let k3 = rhs(&add(&s, &k2, 0.5 * h));
        let k4 = rhs(&add(&s, &k3, h));
        s = std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    s[3]
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn constant_coefficients(grid: &VolterraGrid, sigma: f64) -> CoefficientTriple {
    CoefficientTriple::from_fn(grid, |_| [1.0, -sigma, 1.0])
}

#[test]
fn constant_coefficients_double_primitive() {
    let grid = VolterraGrid::chebyshev(2.0 * PI, 48).unwrap();
    let c = constant_coefficients(&grid, -1.0);
    let g: Vec<f64> = grid.nodes().iter().map(|x| x.cos()).collect();
    let t = apply_t(&g, &c, &grid).unwrap();
    for (x, v) in grid.nodes().iter().zip(&t) {
        assert_abs_diff_eq!(*v, 1.0 - x.cos(), epsilon = 1e-8);
    }
    // the uniform grid converges to the same values at second order
    let err = |n: usize| {
        let grid = VolterraGrid::trapezoid(2.0 * PI, n).unwrap();
        let c = constant_coefficients(&grid, -1.0);
        let g: Vec<f64> = grid.nodes().iter().map(|x| x.cos()).collect();
        let t = apply_t(&g, &c, &grid).unwrap();
        grid.nodes()
            .iter()
            .zip(&t)
            .map(|(x, v)| (v - 1.0 + x.cos()).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(512), err(1024));
    assert!(e2 < 1e-4 && (e1 / e2 - 4.0).abs() < 0.2, "{e1} {e2}");
}

#[test]
fn orbit_coefficients_are_even_and_pi_periodic() {
    let orbit = LimitingOrbit::new(1.0, 0.4, 1e-12).unwrap();
    for k in 0..12 {
        let phi = 0.05 + k as f64 * 0.26;
        let a = orbit.rho(phi).unwrap();
        let b = orbit.rho(phi + PI).unwrap();
        let m = orbit.rho(2.0 * PI - phi).unwrap();
        for j in 0..3 {
            assert_abs_diff_eq!(a[j], b[j], epsilon = 1e-8);
            assert_abs_diff_eq!(a[j], m[j], epsilon = 1e-8);
        }
        assert_eq!(a[0], a[2]);
    }
    // α̌ is odd and π-periodic
    assert_abs_diff_eq!(
        orbit.alpha_check(0.9).unwrap(),
        -orbit.alpha_check(2.0 * PI - 0.9).unwrap(),
        epsilon = 1e-8
    );
    assert_abs_diff_eq!(
        orbit.alpha_check(0.9).unwrap(),
        orbit.alpha_check(0.9 + PI).unwrap(),
        epsilon = 1e-8
    );
}

#[test]
fn orbit_coefficients_respect_sup_bound() {
    let grid = VolterraGrid::chebyshev(2.0 * PI, 128).unwrap();
    let c = build_coefficients(1.0, 0.4, &grid, 1e-12).unwrap();
    let bound = rho_bound(1.0, 0.4);
    assert!(c.sup_norm() <= bound, "{} > {bound}", c.sup_norm());
}

#[test]
fn small_amplitude_coefficients() {
    // near-circular orbit: f̌₃ ≈ (cos 2φ − 1)/2, ϱ₂ ≈ λ² cos 2φ e^{cos 2φ − 1}/(16κ)
    let (l, k) = (0.02, 1.0);
    let orbit = LimitingOrbit::new(l, k, 1e-13).unwrap();
    for phi in [0.3, 1.1, 2.5] {
        let [r1, r2, _] = orbit.rho(phi).unwrap();
        let c2 = (2.0 * phi).cos();
        assert_abs_diff_eq!(r1, ((1.0 - c2) / 2.0).exp(), epsilon = 1e-3);
        assert_abs_diff_eq!(r2 * 16.0 * k / (l * l), c2 * (c2 - 1.0).exp(), epsilon = 1e-3);
    }
}

#[test]
fn p_operator_star_compatibility() {
    let grid = VolterraGrid::chebyshev(2.0 * PI, 160).unwrap();
    let orbit = LimitingOrbit::new(1.2, 0.4, 1e-12).unwrap();
    let c = CoefficientTriple::from_orbit(&orbit, &grid).unwrap();
    let g = StarEvenFunction::from_odd_cosines(&[1.0, 0.3, -0.1]);
    let (p, b) = apply_p(&g.sample(&grid), &c, &grid).unwrap();
    assert!(b.abs() > 1e-6);
    for phi in [0.2, 0.9, 1.7, 2.8] {
        let here = grid.interpolate(&p, phi);
        assert_abs_diff_eq!(grid.interpolate(&p, phi + PI), -here, epsilon = 1e-9);
        assert_abs_diff_eq!(grid.interpolate(&p, 2.0 * PI - phi), here, epsilon = 1e-9);
    }
    // without the constant the shift relation fails
    let t = apply_t(&g.sample(&grid), &c, &grid).unwrap();
    let d = grid.interpolate(&t, 0.9 + PI) + grid.interpolate(&t, 0.9);
    assert!(d.abs() > 1e-6);
}

#[test]
fn resolvent_residual_and_neumann_series() {
    for lambda in [0.1, 1.0, 2.0, 3.0] {
        let grid = VolterraGrid::chebyshev(PI, 128).unwrap();
        let c = build_coefficients(lambda, 0.4, &grid, 1e-12).unwrap();
        let inv = invert_i_minus_t(&c.rho1, &c, &grid).unwrap();
        assert!(inv.residual < 1e-10, "residual {}", inv.residual);
        let sums = neumann_partial_sums(&c.rho1, &c, &grid, 20).unwrap();
        // ‖𝒯ᵏ r‖ ≤ ‖r‖ (Mπ)^{2k}/(2k)! with M the coefficient sup norm
        let m = c.sup_norm().powi(3);
        let r0 = c.rho1.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut fact = 1.0;
        for k in 1..sums.len() {
            fact *= (2 * k - 1) as f64 * (2 * k) as f64;
            let term = sums[k]
                .iter()
                .zip(&sums[k - 1])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(
                term <= 1.000001 * r0 * (m * PI * PI).powi(k as i32) / fact + 1e-300,
                "k={k}"
            );
        }
        let last = sums.last().unwrap();
        let diff = last.iter().zip(&inv.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "lambda {lambda}: {diff}");
    }
}

#[test]
fn p_matches_shooting_oracle() {
    let opts = ModeOneOptions::default();
    for lambda in [0.3, 1.0, 2.0, 3.0] {
        let p = nonresonance_p(lambda, 0.4, &opts).unwrap();
        let q = p_by_shooting(lambda, 0.4, 1.0, 8000);
        assert_abs_diff_eq!(p, q, epsilon = 1e-8);
    }
}

#[test]
fn neumann_and_direct_agree_at_small_amplitude() {
    for lambda in [0.05, 0.2, 0.5] {
        let direct = nonresonance_p(lambda, 0.4, &ModeOneOptions::default()).unwrap();
        let series = nonresonance_p(
            lambda,
            0.4,
            &ModeOneOptions {
                solve: InnerSolve::Neumann(20),
                ..Default::default()
            },
        )
        .unwrap();
        assert_abs_diff_eq!(direct, series, epsilon = 1e-8);
    }
}

#[test]
fn small_amplitude_deviation_bound() {
    let p = nonresonance_p(0.1, 1.0, &ModeOneOptions::default()).unwrap();
    assert!((p - 1.0).abs() <= p_deviation_bound(0.1, 1.0));
    assert!(p > 0.0);
    for lambda in [0.05, 0.1, 0.2] {
        let p = nonresonance_p(lambda, 0.4, &ModeOneOptions::default()).unwrap();
        assert!((p - 1.0).abs() <= p_deviation_bound(lambda, 0.4));
    }
}

#[test]
fn contraction_under_smallness_condition() {
    let (lambda, kappa) = (5e-7, 1.0);
    assert!(smallness_quantity(lambda, kappa) <= 0.5);
    let grid = VolterraGrid::chebyshev(PI, 64).unwrap();
    let c = build_coefficients(lambda, kappa, &grid, 1e-12).unwrap();
    assert!(spectral_radius(&c, &grid).unwrap() < 1.0);
}

#[test]
fn vanishing_middle_coefficient() {
    let grid = VolterraGrid::chebyshev(PI, 64).unwrap();
    let c = build_coefficients(0.8, 0.4, &grid, 1e-12).unwrap().with_rho2_scale(0.0);
    assert_eq!(p_functional(&c, &grid, InnerSolve::Direct).unwrap(), 1.0);
    let inv = invert_i_minus_t(&c.rho1, &c, &grid).unwrap();
    assert_eq!(inv.u, c.rho1);
}

#[test]
fn p_is_continuous_in_lambda() {
    let coarse = ModeOneOptions {
        grid_points: 64,
        ..Default::default()
    };
    let fine = ModeOneOptions::default();
    let lambdas: Vec<f64> = (0..40).map(|k| 0.05 + 0.05 * k as f64).collect();
    let mut prev: Option<f64> = None;
    for &l in &lambdas {
        let a = nonresonance_p(l, 0.4, &coarse).unwrap();
        let b = nonresonance_p(l, 0.4, &fine).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        if let Some(p) = prev {
            assert!((b - p).abs() < 0.05, "jump at {l}: {p} -> {b}");
        }
        prev = Some(b);
    }
}

#[test]
fn no_zero_at_small_amplitude() {
    let opts = ModeOneOptions::default();
    let a = scan_zeros(0.4, (0.05, 0.5), 10, &opts).unwrap();
    let b = scan_zeros(0.4, (0.05, 0.5), 20, &opts).unwrap();
    assert!(a.brackets.is_empty() && b.brackets.is_empty());
    assert!(a.samples.iter().all(|(_, p)| *p > 0.0));
}

#[test]
fn constructed_zero_is_recovered() {
    // ϱ₁ = ϱ₃ = 1, ϱ₂ = −σ: the resolvent is cos(√σ φ) and 𝒫 = cos(√σ π)
    let grid = VolterraGrid::chebyshev(PI, 64).unwrap();
    let p = |sigma: f64| p_functional(&constant_coefficients(&grid, sigma), &grid, InnerSolve::Direct);
    for sigma in [0.1, 0.5, 2.0] {
        assert_abs_diff_eq!(p(sigma).unwrap(), (sigma.sqrt() * PI).cos(), epsilon = 1e-12);
    }
    let scan = scan_sign_changes(p, (0.05, 1.0), 12, 1e-8).unwrap();
    assert_eq!(scan.brackets.len(), 1);
    assert_abs_diff_eq!(scan.brackets[0].root, 0.25, epsilon = 1e-6);
    let doubled = scan_sign_changes(p, (0.05, 1.0), 24, 1e-8).unwrap();
    assert_abs_diff_eq!(doubled.brackets[0].root, scan.brackets[0].root, epsilon = 1e-7);
}

#[test]
fn scaled_orbit_coefficients_zero() {
    // the physical ϱ₂ amplified until 𝒫 crosses zero, located both ways
    let orbit = LimitingOrbit::new(1.0, 0.4, 1e-12).unwrap();
    let p = |s: f64| {
        nonresonance_p_on(
            &orbit,
            &ModeOneOptions {
                rho2_scale: s,
                ..Default::default()
            },
        )
    };
    let scan = scan_sign_changes(p, (1.0, 40.0), 40, 1e-8).unwrap();
    assert!(!scan.brackets.is_empty());
    let s0 = scan.brackets[0].root;
    let oracle = bisect(
        |s| p_by_shooting(1.0, 0.4, s, 8000),
        scan.brackets[0].lo - 0.5,
        scan.brackets[0].hi + 0.5,
        1e-9,
    );
    assert_abs_diff_eq!(s0, oracle, epsilon = 1e-6);
}

#[test]
fn physical_zero_matches_shooting() {
    let opts = ModeOneOptions::default();
    let scan = scan_zeros(0.4, (3.0, 4.0), 6, &opts).unwrap();
    assert_eq!(scan.brackets.len(), 1);
    let oracle = bisect(|l| p_by_shooting(l, 0.4, 1.0, 8000), 3.0, 4.0, 1e-9);
    assert_abs_diff_eq!(scan.brackets[0].root, oracle, epsilon = 1e-6);
}
