//! Scenario runners. Each returns the files it wrote and the checks that
//! failed; numerical errors abort the scenario.

use std::f64::consts::PI;
use std::io;
use std::path::{Path, PathBuf};

use leapfrog::contour::{self, Ring, RingOrbit, RingShape, SpeedShift};
use leapfrog::filaments::{self, InitialState, LogEntry, Model, PhysicalParams, States};
use leapfrog::kernel::{self, Which};
use leapfrog::modeone::{self, LimitingOrbit, ModeOneOptions, VolterraGrid};
use leapfrog::spectral::{self, DiophantineParams, FourierSeries};
use leapfrog::{specfun, HalfPlanePoint, Planar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{RunConfig, Scenario};
use crate::output::{self, num, Aspect, Curve, Failure, FailureKind};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Numerical(#[from] leapfrog::Error),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failures: Vec<Failure>,
    /// Human-readable summary lines.
    pub notes: Vec<String>,
}

impl Outcome {
    /// Record a bound check `value` in `[lo, hi]`; returns whether it held.
    fn check(&mut self, scenario: Scenario, name: &str, value: f64, lo: f64, hi: f64) -> bool {
        let ok = value >= lo && value <= hi;
        if !ok {
            // the bound that was crossed (NaN crosses the upper one)
            let threshold = if value < lo { lo } else { hi };
            self.failures.push(Failure {
                scenario: scenario.name().into(),
                check: name.into(),
                kind: FailureKind::Check,
                message: format!("{} outside [{}, {}]", num(value), num(lo), num(hi)),
                value: Some(value),
                threshold: Some(threshold),
            });
        }
        ok
    }
}

/// Table of named checks, written as CSV.
struct CheckTable {
    rows: Vec<Vec<String>>,
}

impl CheckTable {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn add(&mut self, out: &mut Outcome, scenario: Scenario, name: &str, value: f64, lo: f64, hi: f64) {
        let ok = out.check(scenario, name, value, lo, hi);
        self.rows.push(vec![
            name.to_string(),
            num(value),
            num(lo),
            num(hi),
            u8::from(ok).to_string(),
        ]);
    }

    fn write(self, path: &Path) -> io::Result<PathBuf> {
        output::write_csv(path, &["check", "value", "lower", "upper", "pass"], &self.rows)
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, RunError> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    match cfg.scenario {
        Scenario::Filaments => filaments_run(cfg),
        Scenario::PeriodTable => period_table(cfg),
        Scenario::Rings => rings(cfg),
        Scenario::KernelCheck => kernel_check(cfg),
        Scenario::SpectralCheck => spectral_check(cfg),
        Scenario::ModeoneScan => modeone_scan(cfg),
        Scenario::DivisorScan => divisor_scan(cfg),
    }
}

fn params(cfg: &RunConfig) -> leapfrog::Result<PhysicalParams> {
    PhysicalParams::new(cfg.epsilon, cfg.kappa, cfg.lambda)
}

fn filaments_run(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let sc = Scenario::Filaments;
    let mut out = Outcome::default();
    let p = params(cfg)?;
    let m = filaments::measure_period(&p, Model::Perturbed, cfg.tol)?;
    let t = m.period;
    let horizon = cfg.n_periods as f64 * t;
    let traj = filaments::integrate(
        &InitialState::Physical(filaments::initial_pair(&p)?),
        &p,
        Model::Perturbed,
        horizon,
        cfg.tol,
    )?;
    let drift = filaments::drift_speed(&m.trajectory, t)?;

    let States::Physical(pairs) = &traj.states else {
        unreachable!("perturbed model stores physical states")
    };
    let mut rows = Vec::with_capacity(pairs.len());
    let (mut sum_dev, mut h_dev, mut h0) = (0.0f64, 0.0f64, None);
    for ((tau, pair), log) in traj.times.iter().zip(pairs).zip(&traj.logs) {
        let (h, s) = match *log {
            LogEntry::Physical { hamiltonian, sum_rho } => (hamiltonian, sum_rho),
            LogEntry::Scaled { .. } => unreachable!("perturbed model logs physical invariants"),
        };
        let h0 = *h0.get_or_insert(h);
        sum_dev = sum_dev.max((s - 2.0 * cfg.kappa).abs());
        h_dev = h_dev.max(((h - h0) / h0).abs());
        rows.push(vec![
            num(*tau),
            num(pair.p1.rho()),
            num(pair.p1.z()),
            num(pair.p2.rho()),
            num(pair.p2.z()),
            num(h),
            num(s),
        ]);
    }
    out.files.push(output::write_csv(
        &cfg.output_dir.join("trajectory.csv"),
        &["t", "p11", "p12", "p21", "p22", "H", "sum_rho"],
        &rows,
    )?);

    // one period of the limiting system in scaled variables
    let lim = filaments::measure_period(&p, Model::Limiting, cfg.tol)?;
    let States::Scaled(xs) = &lim.trajectory.states else {
        unreachable!("limiting model stores scaled states")
    };
    let mut scaled_rows = Vec::with_capacity(xs.len());
    for ((tau, x), log) in lim.trajectory.times.iter().zip(xs).zip(&lim.trajectory.logs) {
        let LogEntry::Scaled { levelset_residual } = *log else {
            unreachable!("limiting model logs the level set")
        };
        scaled_rows.push(vec![num(*tau), num(x.x1), num(x.x2), num(levelset_residual)]);
    }
    out.files.push(output::write_csv(
        &cfg.output_dir.join("trajectory_scaled.csv"),
        &["t", "x1", "x2", "levelset_residual"],
        &scaled_rows,
    )?);

    let (a, b) = (traj.pair_at(0.0)?, traj.pair_at(horizon)?);
    let shift = cfg.n_periods as f64 * drift * t;
    let closure = [
        b.p1.rho() - a.p1.rho(),
        b.p2.rho() - a.p2.rho(),
        b.p1.z() - a.p1.z() - shift,
        b.p2.z() - a.p2.z() - shift,
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs()));
    out.check(sc, "sum of radii drift", sum_dev, 0.0, 1e-10);
    out.check(sc, "relative hamiltonian drift", h_dev, 0.0, 1e-8);
    out.check(sc, "translating-frame closure", closure, 0.0, 1e-4);
    out.notes.push(format!(
        "period {} drift speed {} |Σϱ−2κ| {:.2e} ΔH/H {:.2e} closure {:.2e}",
        num(t),
        num(drift),
        sum_dev,
        h_dev,
        closure
    ));

    if cfg.svg {
        let n = 400 * cfg.n_periods;
        let mut lab = [Vec::with_capacity(n + 1), Vec::with_capacity(n + 1)];
        let mut moving = lab.clone();
        for k in 0..=n {
            let tau = horizon * k as f64 / n as f64;
            let pair = traj.pair_at(tau)?;
            for (i, q) in [pair.p1, pair.p2].into_iter().enumerate() {
                lab[i].push((q.z(), q.rho()));
                moving[i].push((q.z() - drift * tau, q.rho()));
            }
        }
        let [l1, l2] = lab;
        let [m1, m2] = moving;
        out.files.push(output::write_svg(
            &cfg.output_dir.join("filaments_lab.svg"),
            "filament positions, lab frame",
            ("z", "rho = r^2/2"),
            &[Curve::line(l1, "#1f77b4"), Curve::line(l2, "#d62728")],
            Aspect::Free,
        )?);
        out.files.push(output::write_svg(
            &cfg.output_dir.join("filaments_translating.svg"),
            "filament positions, frame translating with the mean drift",
            ("z - U tau", "rho = r^2/2"),
            &[Curve::line(m1, "#1f77b4"), Curve::line(m2, "#d62728")],
            Aspect::Equal,
        )?);
    }
    Ok(out)
}

fn period_table(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let sc = Scenario::PeriodTable;
    let mut out = Outcome::default();
    let cells: Vec<(f64, f64)> = cfg
        .lambda_range
        .values()
        .into_iter()
        .flat_map(|l| cfg.kappa_range.values().into_iter().map(move |k| (l, k)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(lambda, kappa)| -> leapfrog::Result<[f64; 8]> {
            let p = PhysicalParams::new(cfg.epsilon, kappa, lambda)?;
            let measured = filaments::measure_period(&p, Model::Limiting, cfg.tol)?.period;
            let t0 = filaments::period_t0(lambda, kappa)?;
            let (lo, hi) = filaments::period_bounds(lambda, kappa);
            let h = 1e-5 * lambda;
            let slope =
                (filaments::period_t0(lambda + h, kappa)? - filaments::period_t0(lambda - h, kappa)?) / (2.0 * h);
            Ok([lambda, kappa, t0, measured, (measured - t0).abs() / t0, lo, hi, slope])
        })
        .collect::<leapfrog::Result<Vec<_>>>()?;
    for r in &rows {
        let tag = format!("lambda={} kappa={}", num(r[0]), num(r[1]));
        out.check(sc, &format!("period formula vs measurement ({tag})"), r[4], 0.0, 1e-6);
        out.check(
            sc,
            &format!("lower period bound margin ({tag})"),
            r[2] - r[5],
            f64::MIN_POSITIVE,
            f64::INFINITY,
        );
        out.check(
            sc,
            &format!("upper period bound margin ({tag})"),
            r[6] - r[2],
            f64::MIN_POSITIVE,
            f64::INFINITY,
        );
        out.check(
            sc,
            &format!("dT0/dlambda ({tag})"),
            r[7],
            f64::MIN_POSITIVE,
            f64::INFINITY,
        );
    }
    let worst = rows.iter().map(|r| r[4]).fold(0.0f64, f64::max);
    out.notes.push(format!(
        "{} cells, worst relative period error {:.2e}",
        rows.len(),
        worst
    ));
    let table: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&x| num(x)).collect()).collect();
    out.files.push(output::write_csv(
        &cfg.output_dir.join("period_table.csv"),
        &[
            "lambda",
            "kappa",
            "t0",
            "t_measured",
            "rel_err",
            "lower",
            "upper",
            "dt0_dlambda",
        ],
        &table,
    )?);
    Ok(out)
}

fn polygon_area(pts: &[Planar]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|k| {
            let (a, b) = (pts[k], pts[(k + 1) % n]);
            0.5 * (a.re * b.im - b.re * a.im)
        })
        .sum::<f64>()
        .abs()
}

fn rings(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let sc = Scenario::Rings;
    let mut out = Outcome::default();
    let p = params(cfg)?;
    let orbit = RingOrbit::new(&p, cfg.tol.max(1e-11))?;
    let lim = LimitingOrbit::new(cfg.lambda, cfg.kappa, cfg.tol)?;
    let shape = RingShape::new(cfg.epsilon, contour::approx_profile_h0(&orbit, &lim, 32)?);
    let speed = SpeedShift::default();
    let t = orbit.period();
    let n = cfg.theta_points;
    let thetas: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let area_exact = PI * cfg.epsilon * cfg.epsilon;
    // the polygon through n boundary points loses a relative O(n⁻²) area
    let area_tol = 2.0 * (2.0 * PI / n as f64).powi(2);
    let mut rows = Vec::new();
    let mut worst_area = 0.0f64;
    for k in 0..cfg.snapshots {
        let tau = t * k as f64 / cfg.snapshots as f64;
        let pair = orbit.pair_at_tau(tau)?;
        let mut curves = Vec::new();
        for (ring, id, color) in [(Ring::One, 1, "#1f77b4"), (Ring::Two, 2, "#d62728")] {
            let pts = thetas
                .iter()
                .map(|&th| contour::boundary_gamma_tau(&orbit, &speed, &shape, ring, tau, th))
                .collect::<leapfrog::Result<Vec<Planar>>>()?;
            let dev = (polygon_area(&pts) / area_exact - 1.0).abs();
            worst_area = worst_area.max(dev);
            out.check(sc, &format!("ring {id} area at tau={}", num(tau)), dev, 0.0, area_tol);
            for (th, g) in thetas.iter().zip(&pts) {
                rows.push(vec![
                    num(tau),
                    num(*th),
                    num(g.im),
                    num((2.0 * g.re).sqrt()),
                    id.to_string(),
                ]);
            }
            curves.push(Curve::closed(
                pts.iter().map(|g| (g.im, (2.0 * g.re).sqrt())).collect(),
                color,
            ));
        }
        curves.push(Curve::dots(
            [pair.p1, pair.p2]
                .iter()
                .map(|q| (q.z(), (2.0 * q.rho()).sqrt()))
                .collect(),
            "black",
        ));
        if cfg.svg {
            out.files.push(output::write_svg(
                &cfg.output_dir.join(format!("rings_{k}.svg")),
                &format!("ring cross-sections at tau = {}", num(tau)),
                ("z", "r"),
                &curves,
                Aspect::Equal,
            )?);
        }
    }
    out.notes.push(format!(
        "period {} {} snapshots, worst relative area defect {:.2e}",
        num(t),
        cfg.snapshots,
        worst_area
    ));
    out.files.push(output::write_csv(
        &cfg.output_dir.join("rings.csv"),
        &["tau", "theta", "x", "y", "ring_id"],
        &rows,
    )?);
    Ok(out)
}

fn pt(rho: f64, z: f64) -> leapfrog::Result<HalfPlanePoint> {
    HalfPlanePoint::new(rho, z)
}

fn kernel_check(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let sc = Scenario::KernelCheck;
    let mut out = Outcome::default();
    let mut table = CheckTable::new();

    let z = pt(0.4, 0.1)?;
    let (x, y) = (Planar::new(0.3, -0.2), Planar::new(-0.1, 0.5));
    let (xs, ys) = (
        kernel::anisotropic_shift(z.rho(), x),
        kernel::anisotropic_shift(z.rho(), y),
    );
    let at = |e: f64, v: Planar| HalfPlanePoint::from_planar(z.as_planar() + e * v);
    let epss = [1e-2, 5e-3, 2.5e-3];
    let mut errs = [[0.0; 3]; 3];
    for (i, &e) in epss.iter().enumerate() {
        errs[0][i] = (kernel::eval_g(at(e, x)?, at(e, y)?)? - kernel::expand_g_plain(z, x, y, e)?).abs();
        errs[1][i] = (kernel::eval_g(at(e, xs)?, at(e, ys)?)? - kernel::expand_g_anisotropic(z, x, y, e)?).abs();
        errs[2][i] = (kernel::grad_g(at(e, xs)?, at(e, ys)?, Which::First)?
            - kernel::expand_grad_g(z, x, y, e, Which::First)?)
        .norm();
    }
    for (name, e, lo, hi) in [
        ("plain expansion", errs[0], 6.0, 10.0),
        ("anisotropic expansion", errs[1], 6.0, 10.0),
        ("gradient expansion", errs[2], 3.4, 5.0),
    ] {
        table.add(
            &mut out,
            sc,
            &format!("{name} halving ratio 1e-2/5e-3"),
            e[0] / e[1],
            lo,
            hi,
        );
        table.add(
            &mut out,
            sc,
            &format!("{name} halving ratio 5e-3/2.5e-3"),
            e[1] / e[2],
            lo,
            hi,
        );
    }
    let mut harm = 0.0f64;
    for (a, b) in [
        ((0.5, 0.0), (0.3, 0.4)),
        ((1.2, 0.3), (0.9, -0.5)),
        ((0.2, 1.0), (0.25, 0.2)),
        ((2.0, 0.0), (0.1, 0.0)),
    ] {
        harm = harm.max(kernel::check_harmonic(pt(a.0, a.1)?, pt(b.0, b.1)?, 1e-4)?);
    }
    table.add(&mut out, sc, "harmonicity residual", harm, 0.0, 1e-5);

    let mut c = 0.0f64;
    for k in 0..=16 {
        let s = 10f64.powf(-4.0 + 2.0 * k as f64 / 16.0);
        let err = (specfun::eval_j(s)? - specfun::eval_j_series(s, 2)?).abs();
        c = c.max(err / (s.powi(3) * s.ln().abs()));
    }
    table.add(&mut out, sc, "J series remainder constant", c, 0.0, 1e-2);
    table.add(
        &mut out,
        sc,
        "J series at s=1 without log terms",
        specfun::eval_j_series(1.0, 0)? - (8f64.ln() - 2.0),
        0.0,
        0.0,
    );
    let mut ode = 0.0f64;
    for k in 0..=40 {
        let s = 0.1 * 100f64.powf(k as f64 / 40.0);
        ode = ode.max(specfun::check_j_ode(s, specfun::default_ode_step(s))?);
    }
    table.add(&mut out, sc, "J ODE residual on [0.1, 10]", ode, 0.0, 1e-5);
    out.files.push(table.write(&cfg.output_dir.join("kernel_checks.csv"))?);
    out.notes.push(format!("{} checks failed", out.failures.len()));
    Ok(out)
}

fn random_series(rng: &mut ChaCha8Rng, modes: usize) -> FourierSeries {
    let cos: Vec<f64> = (0..modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sin: Vec<f64> = (0..modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
    FourierSeries::from_cos_sin(&cos, &sin)
}

fn spectral_check(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let sc = Scenario::SpectralCheck;
    let mut out = Outcome::default();
    let mut table = CheckTable::new();
    for j in 2..=10i64 {
        let jf = j as f64;
        // I₂,ⱼ = −1/(4(j²−1)j)
        let exact = -1.0 / (4.0 * (jf * jf - 1.0) * jf);
        table.add(
            &mut out,
            sc,
            &format!("Lambda_2 eigenvalue j={j}"),
            (spectral::inm(2, j) - exact).abs(),
            0.0,
            1e-10,
        );
    }
    for row in spectral::integral_identities() {
        table.add(
            &mut out,
            sc,
            &format!("disc integral {}", row.name),
            row.deviation,
            0.0,
            1e-6,
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut square, mut skew) = (0.0f64, 0.0f64);
    for _ in 0..16 {
        let (u, v) = (random_series(&mut rng, 12), random_series(&mut rng, 12));
        let hh = spectral::hilbert(&spectral::hilbert(&u)).add(&u);
        square = square.max(hh.l2_norm());
        skew = skew.max((spectral::hilbert(&u).inner(&v) + u.inner(&spectral::hilbert(&v))).norm());
    }
    table.add(&mut out, sc, "Hilbert square plus identity", square, 0.0, 1e-14);
    table.add(&mut out, sc, "Hilbert skewness", skew, 0.0, 1e-14);
    let dio = DiophantineParams::new(0.1, 2.0, 4)?;
    let mut h = FourierSeries::complex();
    h.set((0, 1), num_one());
    let (_, rep) = spectral::transport_invert(&h, 0.01, 1.0, -0.5, &dio);
    table.add(&mut out, sc, "single-mode transport residual", rep.residual, 0.0, 1e-15);
    out.files
        .push(table.write(&cfg.output_dir.join("spectral_checks.csv"))?);
    out.notes.push(format!("{} checks failed", out.failures.len()));
    Ok(out)
}

fn num_one() -> num_complex::Complex64 {
    num_complex::Complex64::new(1.0, 0.0)
}

fn modeone_scan(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let sc = Scenario::ModeoneScan;
    let mut out = Outcome::default();
    let opts = ModeOneOptions {
        ode_tol: cfg.tol,
        ..ModeOneOptions::default()
    };
    let grid = VolterraGrid::new(opts.grid, PI, opts.grid_points)?;
    let lambdas = cfg.lambda_range.values();
    let rows = lambdas
        .par_iter()
        .map(|&lambda| -> leapfrog::Result<[f64; 5]> {
            let c = modeone::build_coefficients(lambda, cfg.kappa, &grid, opts.ode_tol)?;
            let inv = modeone::invert_i_minus_t(&c.rho1, &c, &grid)?;
            let p = modeone::p_functional(&c, &grid, opts.solve)?;
            Ok([
                lambda,
                p,
                inv.residual,
                inv.condition,
                modeone::smallness_quantity(lambda, cfg.kappa),
            ])
        })
        .collect::<leapfrog::Result<Vec<_>>>()?;
    for r in &rows {
        out.check(
            sc,
            &format!("resolvent residual at lambda={}", num(r[0])),
            r[2],
            0.0,
            1e-10,
        );
    }
    // bracket = 1 when P changes sign between this λ and the next one
    let table: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let bracket = rows.get(i + 1).is_some_and(|n| (r[1] < 0.0) != (n[1] < 0.0));
            vec![
                num(r[0]),
                num(cfg.kappa),
                num(r[1]),
                u8::from(bracket).to_string(),
                num(r[2]),
                num(r[3]),
                num(r[4]),
            ]
        })
        .collect();
    out.files.push(output::write_csv(
        &cfg.output_dir.join("modeone.csv"),
        &[
            "lambda",
            "kappa",
            "P_value",
            "bracket",
            "inversion_residual",
            "condition",
            "smallness",
        ],
        &table,
    )?);
    let scan = modeone::scan_zeros(
        cfg.kappa,
        (cfg.lambda_range.min, cfg.lambda_range.max),
        cfg.lambda_range.points.max(2),
        &opts,
    )?;
    let zeros: Vec<Vec<String>> = scan
        .brackets
        .iter()
        .map(|b| vec![num(b.lo), num(b.hi), num(b.root)])
        .collect();
    out.notes.push(format!(
        "{} sign changes of P(lambda, {}) on [{}, {}]{}",
        zeros.len(),
        num(cfg.kappa),
        num(cfg.lambda_range.min),
        num(cfg.lambda_range.max),
        scan.brackets
            .iter()
            .map(|b| format!(" root {}", num(b.root)))
            .collect::<String>()
    ));
    out.files.push(output::write_csv(
        &cfg.output_dir.join("modeone_zeros.csv"),
        &["lo", "hi", "root"],
        &zeros,
    )?);
    if cfg.svg {
        out.files.push(output::write_svg(
            &cfg.output_dir.join("modeone.svg"),
            &format!("non-resonance function at kappa = {}", num(cfg.kappa)),
            ("lambda", "P"),
            &[
                Curve::line(rows.iter().map(|r| (r[0], r[1])).collect(), "#1f77b4"),
                Curve::line(
                    vec![(cfg.lambda_range.min, 0.0), (cfg.lambda_range.max, 0.0)],
                    "#999999",
                ),
            ],
            Aspect::Free,
        )?);
    }
    Ok(out)
}

fn divisor_scan(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let mut out = Outcome::default();
    let eps = cfg.epsilon;
    let l = -eps.ln();
    let dio = DiophantineParams::for_eps(eps)?;
    let kappa = cfg.kappa;
    let scan = spectral::divisor_scan(
        eps * eps * l,
        |lam| Ok(2.0 * PI / ((2.0 * kappa).sqrt() * filaments::period_t0(lam, kappa)?)),
        |_| Ok(-0.5),
        &cfg.lambda_range.values(),
        &dio,
    )?;
    let rows: Vec<Vec<String>> = scan
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.lambda),
                u8::from(r.admissible).to_string(),
                num(r.worst_divisor),
                r.worst_l.to_string(),
                r.worst_j.to_string(),
            ]
        })
        .collect();
    out.files.push(output::write_csv(
        &cfg.output_dir.join("divisors.csv"),
        &["lambda", "admissible", "worst_divisor", "worst_mode_l", "worst_mode_j"],
        &rows,
    )?);
    out.notes.push(format!(
        "nu = {} tau = {} N = {}: excluded fraction {}",
        num(dio.nu()),
        num(dio.tau()),
        dio.n_cut(),
        num(scan.excluded_fraction)
    ));
    Ok(out)
}
