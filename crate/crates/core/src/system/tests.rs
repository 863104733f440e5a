use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::assembly::{assemble_global, Boundary};
use crate::linalg::{dense_solve, norm2, DenseMatrix, SparseLu};
use crate::mesh::{build_base_mesh, Mesh};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn coarse_mesh() -> Mesh {
    build_base_mesh(4.0, 0.5, 2.0).unwrap()
}

fn scalar(v: C64) -> CsrMatrix {
    CsrMatrix::from_triplets(1, 1, &[(0, 0, v)])
}

#[test]
fn spec_validation() {
    use ProblemKind::*;
    assert!(ProblemSpec::new(Schrodinger, 1.0, [0.0, 0.0], 0.0, None).is_ok());
    assert_eq!(
        ProblemSpec::new(Heat, 1.0, [1.0, 0.0], 0.0, None),
        Err(SystemError::InvalidParameters("drift must vanish for this equation"))
    );
    assert!(ProblemSpec::new(Wave, 1.0, [0.0, 0.0], 1.0, None).is_err());
    assert!(ProblemSpec::new(KleinGordon, 1.0, [0.0, 0.0], 1.0, None).is_ok());
    assert_eq!(
        ProblemSpec::new(Wave, 1.0, [0.0, 0.0], 0.0, Some(S0::Value(re(-1.0)))),
        Err(SystemError::S0Mismatch)
    );
    assert_eq!(ProblemSpec::new(Heat, 1.0, [0.0, 0.0], 0.0, Some(S0::IOmega)), Err(SystemError::S0Mismatch));
    assert!(ProblemSpec::new(DriftDiffusion, f64::NAN, [0.0, 0.0], 0.0, None).is_err());
    assert_eq!(s0_default(Schrodinger), S0::Value(C64::new(-1.0, -1.0)));
    assert_eq!(s0_default(DriftDiffusion), S0::Value(re(-5.0)));
    assert_eq!(s0_default(KleinGordon), S0::IOmega);
    for k in [Schrodinger, DriftDiffusion, Heat, Wave, KleinGordon] {
        assert_eq!(ProblemKind::from_name(k.name()), Some(k));
    }
}

#[test]
fn stability_function_matches_tableau() {
    let (a, _) = radau5_tableau();
    let b = a[2];
    for &z in &[re(-0.3), re(-50.0), C64::new(-1.0, 2.0), C64::new(0.2, -0.7), C64::new(0.0, 3.0)] {
        let m = DenseMatrix::from_fn(3, 3, |i, j| re(if i == j { 1.0 } else { 0.0 }) - z * a[i][j]);
        let x = dense_solve(&m, &[re(1.0); 3]).unwrap();
        let r: C64 = re(1.0) + z * (0..3).map(|i| x[i] * b[i]).sum::<C64>();
        assert!((r - radau5_stability(z)).norm() <= 1e-14 * r.norm().max(1.0), "{z}");
    }
    // L-stable
    assert!(radau5_stability(re(-1e8)).norm() < 1e-7);
}

#[test]
fn scalar_amplification() {
    let lambda = C64::new(-2.0, 5.0);
    let h = 0.1;
    let z = lambda * h;
    let (m, a) = (scalar(re(1.0)), scalar(lambda));
    let trap = TrapezoidalStepper::new(&m, &a, h).unwrap().step(&[re(1.0)], 1).unwrap()[0];
    assert!((trap - (1.0 + z / 2.0) / (1.0 - z / 2.0)).norm() < 1e-15);
    for mode in [RadauSolve::Block, RadauSolve::Decoupled] {
        let g = Radau5Stepper::new(&m, &a, h, mode).unwrap().step(&[re(1.0)], 1).unwrap()[0];
        assert!((g - radau5_stability(z)).norm() < 1e-14, "{mode:?} {g}");
    }
    assert_eq!(TrapezoidalStepper::new(&m, &a, 0.0).err(), Some(SystemError::InvalidTimeStep));
}

fn oscillator_error(h: f64, t_end: f64) -> f64 {
    // u' = [[0,1],[-1,0]] u with a non-trivial mass matrix
    let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, re(2.0)), (0, 1, re(0.5)), (1, 0, re(0.5)), (1, 1, re(1.0))]);
    let k = CsrMatrix::from_triplets(2, 2, &[(0, 1, re(1.0)), (1, 0, re(-1.0))]);
    let a = CsrMatrix::from_dense(&m.to_dense().matmul(&k.to_dense()));
    let s = Radau5Stepper::new(&m, &a, h, RadauSolve::Block).unwrap();
    let n = libm::round(t_end / h) as usize;
    let mut u = vec![re(1.0), re(0.0)];
    for i in 1..=n {
        u = s.step(&u, i).unwrap();
    }
    let exact = [libm::cos(t_end), -libm::sin(t_end)];
    libm::sqrt((u[0].re - exact[0]).powi(2) + (u[1].re - exact[1]).powi(2))
}

#[test]
fn radau_order_five() {
    let e1 = oscillator_error(0.4, 4.0);
    let e2 = oscillator_error(0.2, 4.0);
    let e3 = oscillator_error(0.1, 4.0);
    let r1 = libm::log2(e1 / e2);
    let r2 = libm::log2(e2 / e3);
    assert!(r1 >= 4.8 && r2 >= 4.8, "{e1} {e2} {e3}");
}

#[test]
fn trapezoidal_richardson() {
    let m = scalar(re(1.0));
    let a = scalar(C64::new(-1.0, 3.0));
    let run = |n: usize| {
        let s = TrapezoidalStepper::new(&m, &a, 1.0 / n as f64).unwrap();
        let mut u = vec![re(1.0)];
        for i in 1..=n {
            u = s.step(&u, i).unwrap();
        }
        (u[0] - C64::new(-1.0, 3.0).exp()).norm()
    };
    let rate = libm::log2(run(40) / run(80));
    assert!((rate - 2.0).abs() < 0.02, "{rate}");
}

fn transparent_system(kind: ProblemKind, n_xi: usize, s0: Option<S0>) -> (GlobalSystem, ProblemSpec) {
    let (c, d) = match kind {
        ProblemKind::DriftDiffusion => (0.5, [1.5, 1.5]),
        _ => (1.0, [0.0, 0.0]),
    };
    let spec = ProblemSpec::new(kind, c, d, 0.0, s0).unwrap();
    let sys = assemble_global(&coarse_mesh(), 1, Boundary::Transparent { n_xi }, spec.params()).unwrap();
    (sys, spec)
}

#[test]
fn block_and_decoupled_radau_agree() {
    for kind in [ProblemKind::Schrodinger, ProblemKind::DriftDiffusion] {
        let (sys, spec) = transparent_system(kind, 5, None);
        let SemiDiscrete::FirstOrder(ops) = build_semidiscrete(&sys, &spec).unwrap() else { panic!() };
        let n = sys.n_dofs();
        let u0: Vec<C64> = (0..n).map(|i| C64::new(libm::sin(i as f64), libm::cos(0.3 * i as f64))).collect();
        let a = Radau5Stepper::new(&ops.m, &ops.a, 0.05, RadauSolve::Block).unwrap().step(&u0, 1).unwrap();
        let b = Radau5Stepper::new(&ops.m, &ops.a, 0.05, RadauSolve::Decoupled).unwrap().step(&u0, 1).unwrap();
        let diff: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        assert!(norm2(&diff) <= 1e-10 * norm2(&a), "{kind:?}");
    }
}

#[test]
fn pencil_nonsingular_for_all_truncations() {
    for n_xi in 1..=20 {
        let (sys, spec) = transparent_system(ProblemKind::DriftDiffusion, n_xi, Some(S0::Value(re(-5.0))));
        let SemiDiscrete::FirstOrder(ops) = build_semidiscrete(&sys, &spec).unwrap() else { panic!() };
        assert!(TrapezoidalStepper::new(&ops.m, &ops.a, 1.0 / 40.0).is_ok(), "n_xi = {n_xi}");
    }
}

#[test]
fn heat_amplification_matches_spectrum() {
    // Dirichlet heat: the trapezoidal amplification has spectral radius
    // max |(1 + hμ/2)/(1 − hμ/2)| over the eigenvalues μ of M⁻¹A.
    let spec = ProblemSpec::new(ProblemKind::Heat, 1.0, [0.0, 0.0], 0.0, None).unwrap();
    let sys = assemble_global(&coarse_mesh(), 2, Boundary::Dirichlet, spec.params()).unwrap();
    let SemiDiscrete::FirstOrder(ops) = build_semidiscrete(&sys, &spec).unwrap() else { panic!() };
    let n = sys.n_dofs();
    let to_na = |a: &CsrMatrix| {
        let d = a.to_dense();
        nalgebra::DMatrix::from_fn(n, n, |i, j| d[(i, j)].re)
    };
    let m = to_na(&ops.m);
    let a = to_na(&ops.a);
    let chol = nalgebra::Cholesky::new(m).unwrap();
    let linv = chol.l().try_inverse().unwrap();
    let sym = &linv * a * linv.transpose();
    let mus = nalgebra::SymmetricEigen::new((&sym + sym.transpose()) * 0.5).eigenvalues;
    let h = 0.5;
    let rho = mus.iter().map(|&mu| ((1.0 + h * mu / 2.0) / (1.0 - h * mu / 2.0)).abs()).fold(0.0, f64::max);
    assert!(mus.iter().all(|&mu| mu < 0.0));

    let s = TrapezoidalStepper::new(&ops.m, &ops.a, h).unwrap();
    let mut u: Vec<C64> = vec![re(1.0); n];
    let mut est = 0.0;
    for i in 1..=3000 {
        let v = s.step(&u, i).unwrap();
        est = norm2(&v) / norm2(&u);
        u = v;
        let nu = norm2(&u);
        u.iter_mut().for_each(|x| *x /= nu);
    }
    assert!((est - rho).abs() < 1e-6, "{est} {rho}");
}

fn dirichlet_wave(k: f64) -> (WaveOperators, Vec<C64>) {
    let kind = if k == 0.0 { ProblemKind::Wave } else { ProblemKind::KleinGordon };
    let spec = ProblemSpec::new(kind, 1.3, [0.0, 0.0], k, None).unwrap();
    let sys = assemble_global(&coarse_mesh(), 2, Boundary::Dirichlet, spec.params()).unwrap();
    let SemiDiscrete::SecondOrder(ops) = build_semidiscrete(&sys, &spec).unwrap() else { panic!() };
    let mut u0 = vec![re(0.0); sys.n_dofs()];
    for (i, p) in sys.dof_map.fe_nodes() {
        u0[i] = re(libm::exp(-2.0 * (p[0] * p[0] + p[1] * p[1])));
    }
    (ops, u0)
}


#[test]
fn dirichlet_energy_conserved_and_reversible() {
    for k in [0.0, 1.0] {
        let (ops, u0) = dirichlet_wave(k);
        let h = 0.05;
        let s = WaveStepper::new(&ops, h).unwrap();
        let mut prev = u0.clone();
        let mut cur = s.bootstrap(&u0).unwrap();
        let e0 = discrete_energy(&ops, &cur, &prev, h);
        let mut states = vec![prev.clone(), cur.clone()];
        for i in 2..=200 {
            let next = s.step(&cur, &prev, i).unwrap();
            prev = core::mem::replace(&mut cur, next);
            states.push(cur.clone());
            let e = discrete_energy(&ops, &cur, &prev, h);
            assert!((e - e0).abs() <= 1e-10 * e0, "k={k} step {i}: {e} vs {e0}");
        }
        // run backwards: swapping the two last levels retraces the path
        let (mut a, mut b) = (cur.clone(), prev.clone());
        for i in (0..states.len() - 2).rev() {
            let back = s.step(&b, &a, i).unwrap();
            let diff: Vec<C64> = back.iter().zip(&states[i]).map(|(x, y)| x - y).collect();
            assert!(norm2(&diff) <= 1e-8 * norm2(&states[i]), "k={k} level {i}");
            a = core::mem::replace(&mut b, back);
        }
    }
}

#[test]
fn wave_bootstrap_is_second_order() {
    // one bootstrap step from a Dirichlet eigenmode-like start: u1 ≈ u0 + h²/2 u''(0)
    let (ops, u0) = dirichlet_wave(0.0);
    let n = u0.len();
    let lu = SparseLu::new(&ops.m0).unwrap();
    let lu0 = ops.l0.matvec(&u0).unwrap();
    let acc = lu.solve(&lu0.iter().map(|v| v * (1.3 * 1.3)).collect::<Vec<_>>()).unwrap();
    let mut errs = Vec::new();
    for h in [0.02, 0.01] {
        let u1 = WaveStepper::new(&ops, h).unwrap().bootstrap(&u0).unwrap();
        let diff: Vec<C64> = (0..n).map(|i| u1[i] - u0[i] - acc[i] * (h * h / 2.0)).collect();
        errs.push(norm2(&diff));
    }
    // local error O(h⁴)
    assert!(libm::log2(errs[0] / errs[1]) > 3.5, "{errs:?}");
}

#[test]
fn output_step_indices() {
    assert_eq!(output_steps(10, 3), vec![0, 5, 10]);
    assert_eq!(output_steps(3, 5), vec![0, 1, 2, 3]);
    assert_eq!(output_steps(7, 1), vec![7]);
}

#[test]
fn schrodinger_short_run_tracks_reference() {
    let spec = ProblemSpec::new(ProblemKind::Schrodinger, 1.0, [0.0, 0.0], 0.0, None).unwrap();
    let mesh = crate::mesh::refine_uniform(&crate::mesh::refine_uniform(&coarse_mesh()).unwrap()).unwrap();
    let cfg = SimulationConfig {
        fe_order: 3,
        boundary: Boundary::Transparent { n_xi: 10 },
        dt: 0.01,
        t_start: 0.0,
        t_end: 0.3,
        n_outputs: 4,
        integrator: Integrator::Trapezoidal,
        track_error: true,
    };
    let mut calls = 0;
    let out = simulate(&mesh, &spec, &cfg, None, |_, _, _| calls += 1).unwrap();
    assert_eq!(calls, 4);
    assert_eq!(out[0].rel_error.map(|e| e < 1e-14), Some(true));
    let last = out.last().unwrap();
    assert!((last.t - 0.3).abs() < 1e-12);
    assert!(last.rel_error.unwrap() < 0.02, "{:?}", out);
}

#[test]
fn radau_exact_for_quintic_in_time() {
    // Nilpotent chain u0' = u1, …, u4' = u5, u5' = 0 gives u0 = t⁵ exactly,
    // here with a non-diagonal mass matrix M and right side M·N.
    let n = 6;
    let mut shift = DenseMatrix::zeros(n, n);
    for i in 0..n - 1 {
        shift[(i, i + 1)] = re(1.0);
    }
    let m = DenseMatrix::from_fn(n, n, |i, j| re(if i == j { 3.0 } else if i.abs_diff(j) == 1 { 1.0 } else { 0.0 }));
    let a = CsrMatrix::from_dense(&m.matmul(&shift));
    let m = CsrMatrix::from_dense(&m);
    let exact = |t: f64| -> Vec<f64> {
        vec![t.powi(5), 5.0 * t.powi(4), 20.0 * t.powi(3), 60.0 * t * t, 120.0 * t, 120.0]
    };
    for mode in [RadauSolve::Block, RadauSolve::Decoupled] {
        let h = 0.25;
        let s = Radau5Stepper::new(&m, &a, h, mode).unwrap();
        let mut u: Vec<C64> = exact(0.0).into_iter().map(re).collect();
        for i in 1..=8 {
            u = s.step(&u, i).unwrap();
        }
        let e = exact(2.0);
        for (x, y) in u.iter().zip(&e) {
            assert!((x - re(*y)).norm() <= 1e-12 * y.abs().max(1.0), "{mode:?} {x} {y}");
        }
    }
}

#[test]
fn trapezoidal_half_steps() {
    // two half steps vs one full step differ by O(h³)
    let m = scalar(re(1.0));
    let a = scalar(C64::new(-1.5, 2.0));
    let gap = |h: f64| {
        let full = TrapezoidalStepper::new(&m, &a, h).unwrap().step(&[re(1.0)], 1).unwrap()[0];
        let half = TrapezoidalStepper::new(&m, &a, h / 2.0).unwrap();
        let two = half.step(&half.step(&[re(1.0)], 1).unwrap(), 2).unwrap()[0];
        (full - two).norm()
    };
    let rate = libm::log2(gap(0.02) / gap(0.01));
    assert!((rate - 3.0).abs() < 0.05, "{rate}");
    // no dynamics
    let z = TrapezoidalStepper::new(&m, &scalar(re(0.0)), 0.1).unwrap();
    assert_eq!(z.step(&[C64::new(0.3, -0.2)], 1).unwrap()[0], C64::new(0.3, -0.2));
}

#[test]
fn error_and_energy_identities() {
    let (ops, u0) = dirichlet_wave(0.0);
    let spec = ProblemSpec::new(ProblemKind::Wave, 1.3, [0.0, 0.0], 0.0, None).unwrap();
    let sys = assemble_global(&coarse_mesh(), 2, Boundary::Dirichlet, spec.params()).unwrap();
    let dofs = &sys.dof_map;
    let exact = |p: crate::mesh::Point| Ok(re(libm::exp(-2.0 * (p[0] * p[0] + p[1] * p[1]))));
    assert_eq!(relative_l2_error(&u0, dofs, exact).unwrap(), 0.0);
    let twice: Vec<C64> = u0.iter().map(|v| v * 2.0).collect();
    assert!((relative_l2_error(&twice, dofs, exact).unwrap() - 1.0).abs() < 1e-15);
    let (i0, p0) = dofs.fe_nodes().next().unwrap();
    let mut bumped = u0.clone();
    bumped[i0] += 0.01;
    let norm: f64 = libm::sqrt(dofs.fe_nodes().map(|(_, p)| exact(p).unwrap().norm_sqr()).sum::<f64>());
    assert!((relative_l2_error(&bumped, dofs, exact).unwrap() - 0.01 / norm).abs() < 1e-15, "{p0:?}");
    assert!(relative_l2_error(&u0, dofs, |_| Ok(re(0.0))).is_err());

    let h = 0.1;
    let zero = vec![re(0.0); u0.len()];
    assert_eq!(discrete_energy(&ops, &zero, &zero, h), 0.0);
    let s = WaveStepper::new(&ops, h).unwrap();
    assert!(s.step(&zero, &zero, 1).unwrap().iter().all(|v| *v == re(0.0)));
    let u1 = s.bootstrap(&u0).unwrap();
    let u1x2: Vec<C64> = u1.iter().map(|v| v * 2.0).collect();
    let e = discrete_energy(&ops, &u1, &u0, h);
    assert!((discrete_energy(&ops, &u1x2, &twice, h) - 4.0 * e).abs() <= 1e-14 * e);
}
