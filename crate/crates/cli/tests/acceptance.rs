//! Acceptance suite. Prints one PASS/FAIL line per criterion. Failures are
//! reported, not fatal, unless `ACCEPTANCE_STRICT` is set, in which case any
//! FAIL exits non-zero. Positional arguments select criteria by number; by
//! default all ten run.

use std::io::Write;
use std::time::{Duration, Instant};

use polecond::experiment::{build_mesh, run_with};
use polecond::{run, sweep_convergence_space, sweep_nxi, ExperimentConfig};
use polecond_core::assembly::{
    assemble_global, direct_stiffness, local_exterior, schur_eliminate_auxiliary, Boundary,
};
use polecond_core::hardy::{hardy_pairing, p_matrix, t_minus_matrix, t_plus_matrix, HardyCoefficients, HardyOperatorSet};
use polecond_core::linalg::DenseMatrix;
use polecond_core::mesh::ExteriorElementGeometry;
use polecond_core::system::{
    build_semidiscrete, discrete_energy, exact_driftdiffusion, exact_schrodinger, Integrator, ProblemKind,
    ProblemSpec, RadauSolve, SemiDiscrete, WaveStepper,
};
use polecond_core::{c64, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Write straight to the process stderr so the lines survive output capture.
fn say(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_rates(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2}")).collect();
    format!("[{}]", parts.join(", "))
}

// ---------------------------------------------------------------- 1

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn poly_deriv(a: &[i64]) -> Vec<i64> {
    if a.len() <= 1 {
        return vec![0];
    }
    (1..a.len()).map(|i| i as i64 * a[i]).collect()
}

fn truncate(mut p: Vec<i64>, len: usize) -> Vec<i64> {
    p.resize(len, 0);
    p
}

fn column(m: &DenseMatrix<i64>, j: usize) -> Vec<i64> {
    (0..m.rows()).map(|i| m[(i, j)]).collect()
}

fn hardy_operator_oracle() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0;
    for n in 1..=8 {
        let (tp, tm, p) = (t_plus_matrix(n).unwrap(), t_minus_matrix(n).unwrap(), p_matrix(n).unwrap());
        for j in 0..=n {
            let mut e = vec![0i64; n + 1];
            e[j] = 1;
            // 2𝒯±(f0, F) = f0 + (z ± 1)F(z),  2𝒫G = (z − 1)²G' + (z − 1)G
            let two_tp = poly_add(&[e[0]], &poly_mul(&[1, 1], &e[1..]));
            let two_tm = poly_add(&[e[0]], &poly_mul(&[-1, 1], &e[1..]));
            let two_p = poly_add(&poly_mul(&[1, -2, 1], &poly_deriv(&e)), &poly_mul(&[-1, 1], &e));
            mismatches += usize::from(column(&tp, j) != truncate(two_tp, n + 1));
            mismatches += usize::from(column(&tm, j) != truncate(two_tm, n + 1));
            mismatches += usize::from(column(&p, j) != truncate(two_p, n + 1));
        }
    }
    let took = start.elapsed();
    outcome(
        mismatches == 0 && took < Duration::from_secs(1),
        format!("{mismatches} column mismatches for Nξ ≤ 8, {took:.2?}"),
    )
}

// ---------------------------------------------------------------- 2

fn poly_eval(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(c64(0.0, 0.0), |acc, &x| acc * z + x)
}

/// `−2 s0 · (1/2π) ∮ (ML f)(z̄)(ML g)(z) |dz|` on `points` equispaced nodes.
fn pairing_quadrature(f: &HardyCoefficients, g: &HardyCoefficients, s0: C64, points: usize) -> C64 {
    let ml = |h: &HardyCoefficients, z: C64| (h.f0 + (z - 1.0) * poly_eval(&h.f, z)) / (2.0 * s0);
    let mut sum = c64(0.0, 0.0);
    for k in 0..points {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
        let z = c64(theta.cos(), theta.sin());
        sum += ml(f, z.conj()) * ml(g, z);
    }
    -2.0 * s0 * sum / points as f64
}

fn pairing_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=12);
        let s0 = c64(rng.gen_range(-5.0..-0.5), rng.gen_range(-2.0..2.0));
        let mut draw = || c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let f = HardyCoefficients::new(draw(), (0..n).map(|_| draw()).collect()).unwrap();
        let g = HardyCoefficients::new(draw(), (0..n).map(|_| draw()).collect()).unwrap();
        let closed = hardy_pairing(&f, &g, s0).unwrap();
        let quad = pairing_quadrature(&f, &g, s0, 4096);
        worst = worst.max((closed - quad).norm());
    }
    // e^{−ξ} at s0 = −1 is the constant Hardy function with f0 = 1
    let e = HardyCoefficients::new(c64(1.0, 0.0), vec![c64(0.0, 0.0); 5]).unwrap();
    let half = hardy_pairing(&e, &e, c64(-1.0, 0.0)).unwrap();
    let took = start.elapsed();
    let pass = worst <= 1e-12 && (half - c64(0.5, 0.0)).norm() <= 1e-12 && took < Duration::from_secs(5);
    outcome(pass, format!("max |Δ| = {worst:.2e}, ∫e^(-2ξ) = {:.15}, {took:.2?}", half.re))
}

// ---------------------------------------------------------------- 3

fn schur_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let len = rng.gen_range(0.2..2.0);
        let (a0, a1): (f64, f64) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        let rays = [[-a0.sin(), -a0.cos()], [a1.sin(), -a1.cos()]];
        let geom = ExteriorElementGeometry::from_edge(0, [0, 1], [[0.0, 0.0], [len, 0.0]], rays, 1.0).unwrap();
        let n_xi = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=4);
        let s0 = c64(rng.gen_range(-5.0..-0.5), rng.gen_range(-2.0..2.0));
        let hardy = HardyOperatorSet::new(n_xi).unwrap();
        let loc = local_exterior(&geom, &hardy, k, [0.0, 0.0]);
        let schur = schur_eliminate_auxiliary(&loc, s0).unwrap();
        let direct = direct_stiffness(&geom, &hardy, k, s0).unwrap();
        worst = worst.max(schur.max_abs_diff(&direct));
    }
    let took = start.elapsed();
    outcome(worst <= 1e-10 && took < Duration::from_secs(10), format!("max |Δ| = {worst:.2e} over 50 draws, {took:.2?}"))
}

// ---------------------------------------------------------------- 4, 5

/// Max relative error per step size, and the final FE state of each run for
/// a self-convergence diagnostic.
fn time_series(base: &ExperimentConfig, dts: &[f64]) -> (Vec<f64>, Vec<Vec<C64>>) {
    let mut errors = Vec::new();
    let mut finals = Vec::new();
    for &dt in dts {
        let cfg = ExperimentConfig { dt, ..base.clone() };
        let mut last = Vec::new();
        let r = run_with(&cfg, |_, u, dofs| last = dofs.fe_nodes().map(|(i, _)| u[i]).collect()).unwrap();
        errors.push(r.max_error.unwrap());
        finals.push(last);
    }
    (errors, finals)
}

fn rates(errors: &[f64], factor: f64) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).ln() / factor.ln()).collect()
}

/// Order from the final-state differences of three runs with halved steps.
fn self_convergence(finals: &[Vec<C64>]) -> f64 {
    let diff = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    (diff(&finals[0], &finals[1]) / diff(&finals[1], &finals[2])).log2()
}

fn schrodinger_base() -> ExperimentConfig {
    ExperimentConfig { n_xi: 20, t_end: 2.0, ..ExperimentConfig::defaults(ProblemKind::Schrodinger) }
}

fn driftdiffusion_base() -> ExperimentConfig {
    ExperimentConfig {
        n_xi: 30,
        t_end: 5.0,
        integrator: Integrator::Radau5(RadauSolve::Block),
        ..ExperimentConfig::defaults(ProblemKind::DriftDiffusion)
    }
}

fn temporal_schrodinger() -> Outcome {
    let base = ExperimentConfig { fe_order: 3, refinements: 3, ..schrodinger_base() };
    let (errors, finals) = time_series(&base, &[1.0 / 400.0, 1.0 / 800.0, 1.0 / 1600.0]);
    let r = rates(&errors, 2.0);
    let pass = r.iter().all(|&x| (1.7..=2.3).contains(&x));
    outcome(
        pass,
        format!(
            "max errors {} rates {} (self-convergence of final states: {:.2})",
            fmt_list(&errors),
            fmt_rates(&r),
            self_convergence(&finals)
        ),
    )
}

fn temporal_driftdiffusion() -> Outcome {
    let base = ExperimentConfig { fe_order: 4, refinements: 2, ..driftdiffusion_base() };
    let (errors, finals) = time_series(&base, &[1.0 / 10.0, 1.0 / 20.0, 1.0 / 40.0]);
    let r = rates(&errors, 2.0);
    let finest = r[r.len() - 1];
    outcome(
        finest >= 4.5,
        format!(
            "max errors {} rates {} (self-convergence of final states: {:.2})",
            fmt_list(&errors),
            fmt_rates(&r),
            self_convergence(&finals)
        ),
    )
}

// ---------------------------------------------------------------- 6

fn spatial_convergence() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    let cases = [
        ("schrodinger", ExperimentConfig { dt: 1.0 / 1600.0, ..schrodinger_base() }),
        ("driftdiffusion", ExperimentConfig { dt: 1.0 / 40.0, ..driftdiffusion_base() }),
    ];
    for (name, base) in cases {
        let rows = sweep_convergence_space(&base, &[1, 2, 3, 4], &[1, 2, 3]).unwrap();
        for order in 1..=4 {
            let r: Vec<f64> = rows.iter().filter(|r| r.order == order).filter_map(|r| r.rate).collect();
            let ok = r.iter().all(|&x| x >= order as f64 - 0.3);
            pass &= ok;
            detail.push(format!("{name} p{order} {}{}", fmt_rates(&r), if ok { "" } else { "!" }));
        }
    }
    outcome(pass, detail.join("; "))
}

// ---------------------------------------------------------------- 7

/// Indices before the error comes within a factor 2 of its minimum.
fn before_saturation(errors: &[f64]) -> usize {
    let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
    errors.iter().position(|&e| e <= 2.0 * min).unwrap_or(errors.len())
}

fn nxi_decay() -> Outcome {
    let schr = ExperimentConfig { fe_order: 4, refinements: 3, dt: 1.0 / 1600.0, ..schrodinger_base() };
    let s_list = [2, 4, 6, 8, 10, 12, 14, 16, 18, 20];
    let s: Vec<f64> = sweep_nxi(&schr, &s_list).unwrap().iter().map(|r| r.max_error).collect();
    let ratio_s = s[s.len() - 1] / s[0];
    // up to and including the first saturated point
    let m = (before_saturation(&s) + 1).min(s.len());
    let logs: Vec<f64> = s[..m].iter().map(|e| e.log10()).collect();
    let decreasing = logs.windows(2).all(|w| w[1] < w[0]);
    let convex = logs.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] >= 0.0);

    let dd = ExperimentConfig { fe_order: 4, refinements: 3, dt: 1.0 / 40.0, ..driftdiffusion_base() };
    let d_list = [1, 2, 3, 5, 7, 10, 15, 20, 25, 30];
    let d: Vec<f64> = sweep_nxi(&dd, &d_list).unwrap().iter().map(|r| r.max_error).collect();
    let e5 = d[d_list.iter().position(|&n| n == 5).unwrap()];
    let ratio_d = d[d.len() - 1] / e5;
    let from10 = d_list.iter().position(|&n| n == 10).unwrap();
    let sat = before_saturation(&d).max(from10);
    let dd_monotone = d[from10..=sat.min(d.len() - 1)].windows(2).all(|w| w[1] < w[0]);

    let pass = ratio_s <= 1e-2 && decreasing && convex && ratio_d <= 1e-2 && dd_monotone;
    outcome(
        pass,
        format!(
            "schrodinger Nξ {s_list:?} → {} (ratio {ratio_s:.2e}, decreasing {decreasing}, convex {convex}); \
             driftdiffusion Nξ {d_list:?} → {} (ratio e30/e5 {ratio_d:.2e}, decreasing from Nξ=10 {dd_monotone})",
            fmt_list(&s),
            fmt_list(&d)
        ),
    )
}

// ---------------------------------------------------------------- 8

fn energies(cfg: &ExperimentConfig) -> Vec<f64> {
    run(cfg).unwrap().samples.iter().map(|s| s.energy.unwrap()).collect()
}

fn wave_behaviour() -> Outcome {
    let base = ExperimentConfig { n_xi: 10, t_end: 20.0, ..ExperimentConfig::defaults(ProblemKind::Wave) };
    let mut stable = true;
    let mut detail = Vec::new();
    for refinements in 0..=3 {
        let e = energies(&ExperimentConfig { fe_order: 1, refinements, ..base.clone() });
        let ratio = e.iter().copied().fold(0.0, f64::max) / e[0];
        stable &= ratio <= 10.0;
        detail.push(format!("p1 ref{refinements} max/initial {ratio:.3}"));
    }
    // Growth sets in late on desk meshes; lengthen the run until it shows.
    let mut unstable = false;
    for t_end in [30.0, 45.0, 60.0, 75.0] {
        let e = energies(&ExperimentConfig { fe_order: 3, refinements: 3, n_xi: 15, t_end, ..base.clone() });
        let tail = &e[e.len() - e.len() / 3..];
        let monotone = tail.windows(2).all(|w| w[1] >= w[0]);
        let growth = tail[tail.len() - 1] / tail[0];
        unstable = monotone && growth >= 10.0;
        detail.push(format!(
            "p3 ref3 Nξ15 T{t_end}: last-third growth ×{growth:.3e}, monotone {monotone}, final/min {:.3e}",
            e[e.len() - 1] / e.iter().copied().fold(f64::INFINITY, f64::min)
        ));
        if unstable {
            break;
        }
    }
    outcome(stable && unstable, detail.join("; "))
}

// ---------------------------------------------------------------- 9

fn interior_conservation() -> Outcome {
    let start = Instant::now();
    let mesh = build_mesh(1).unwrap();
    let spec = ProblemSpec::new(ProblemKind::Wave, 1.0, [0.0, 0.0], 0.0, None).unwrap();
    let sys = assemble_global(&mesh, 2, Boundary::Dirichlet, spec.params()).unwrap();
    let SemiDiscrete::SecondOrder(ops) = build_semidiscrete(&sys, &spec).unwrap() else {
        return outcome(false, "second-order operators expected".into());
    };
    let mut prev = vec![c64(0.0, 0.0); sys.n_dofs()];
    for (i, p) in sys.dof_map.fe_nodes() {
        prev[i] = c64((-2.0 * (p[0] * p[0] + p[1] * p[1])).exp(), 0.0);
    }
    let h = 1.0 / 20.0;
    let stepper = WaveStepper::new(&ops, h).unwrap();
    let mut cur = stepper.bootstrap(&prev).unwrap();
    let e0 = discrete_energy(&ops, &cur, &prev, h);
    let mut drift: f64 = 0.0;
    for step in 2..=101 {
        let next = stepper.step(&cur, &prev, step).unwrap();
        prev = std::mem::replace(&mut cur, next);
        drift = drift.max((discrete_energy(&ops, &cur, &prev, h) - e0).abs() / e0);
    }
    let took = start.elapsed();
    outcome(drift <= 1e-10 && took < Duration::from_secs(10), format!("relative drift {drift:.2e} over 100 steps, {took:.2?}"))
}

// ---------------------------------------------------------------- 10

fn residual_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let h = 1e-4;
    let i = c64(0.0, 1.0);
    let mut worst_s: f64 = 0.0;
    for _ in 0..10 {
        let (x, y, t) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(0.0..2.0));
        let u = exact_schrodinger;
        let ut = (u(x, y, t + h) - u(x, y, t - h)) / (2.0 * h);
        let lap = (u(x + h, y, t) + u(x - h, y, t) + u(x, y + h, t) + u(x, y - h, t) - 4.0 * u(x, y, t)) / (h * h);
        worst_s = worst_s.max((i * ut - lap).norm());
    }
    let (c, d) = (0.5, [1.5, 1.5]);
    let mut worst_d: f64 = 0.0;
    for _ in 0..10 {
        let (x, y, t) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), rng.gen_range(0.2..5.0));
        let u = |x, y, t| exact_driftdiffusion(x, y, t, c, d).unwrap();
        let ut = (u(x, y, t + h) - u(x, y, t - h)) / (2.0 * h);
        let ux = (u(x + h, y, t) - u(x - h, y, t)) / (2.0 * h);
        let uy = (u(x, y + h, t) - u(x, y - h, t)) / (2.0 * h);
        let lap = (u(x + h, y, t) + u(x - h, y, t) + u(x, y + h, t) + u(x, y - h, t) - 4.0 * u(x, y, t)) / (h * h);
        worst_d = worst_d.max((ut + d[0] * ux + d[1] * uy - c * c * lap).abs());
    }
    let took = start.elapsed();
    outcome(
        worst_s <= 1e-5 && worst_d <= 1e-5 && took < Duration::from_secs(1),
        format!("schrodinger |i u_t − Δu| ≤ {worst_s:.2e}, driftdiffusion residual ≤ {worst_d:.2e}, {took:.2?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Hardy operator oracle", hardy_operator_oracle),
        ("pairing identity", pairing_identity),
        ("Schur-complement equivalence", schur_equivalence),
        ("temporal convergence, Schrödinger", temporal_schrodinger),
        ("temporal convergence, drift-diffusion", temporal_driftdiffusion),
        ("spatial convergence", spatial_convergence),
        ("Nξ decay", nxi_decay),
        ("wave energy behaviour", wave_behaviour),
        ("interior-only conservation", interior_conservation),
        ("exact-solution residuals", residual_oracles),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (n, (name, check)) in criteria.iter().enumerate().map(|(i, c)| (i + 1, c)) {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        say(&format!("{verdict} criterion {n} ({name}): {} [{:.1?}]", o.detail, start.elapsed()));
        if !o.pass {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        say(&format!("acceptance: failed criteria {failed:?}"));
        if std::env::var_os("ACCEPTANCE_STRICT").is_some() {
            std::process::exit(1);
        }
    }
}
