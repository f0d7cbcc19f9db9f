//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with diagnostics.
//!
//! The golden matrices below are the closed-form reduced systems of the two
//! worked example frames (planar three-beam star; symmetric four-beam tower),
//! derived by hand from the joint conditions: endpoint conditions are imposed
//! through reduced solution bases and the remaining conditions are expressed
//! in the coordinates of a reference edge. The programmatic assemblies must
//! reproduce them entry-by-entry up to a documented row permutation, per-row
//! scaling and (for the complex rotating sector) fixed column phases.

use std::time::Instant;

use framespec_core::conditions::greens_identity_residual;
use framespec_core::fem::{assemble_fem, count_eigenvalues_below, solve_fem};
use framespec_core::geometry::{Frame, JointKind, MaterialParams};
use framespec_core::kinematics::{matrix_exp, rodrigues, skew};
use framespec_core::models;
use framespec_core::planar::{detect_planar, reduced_assemblies, PlanarCheck};
use framespec_core::secular::{AssemblyOptions, ModeShape, Root, SecularAssembly};
use framespec_core::symmetry::{
    isotypic_projector, quotient_assembly, FrameSymmetry, IrrepSpec, SampledField,
};
use nalgebra::{ComplexField, DMatrix, Vector3};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C64 = Complex<f64>;

fn sp(x: f64) -> f64 {
    x.sinh() + x.sin()
}
fn sm(x: f64) -> f64 {
    x.sinh() - x.sin()
}
fn cp(x: f64) -> f64 {
    x.cosh() + x.cos()
}
fn cm(x: f64) -> f64 {
    x.cosh() - x.cos()
}

/// 9x9 out-of-plane system of the T-shaped star (unit bending/torsion
/// stiffness, angles `a1` from beam 2 to beam 1 and `a2` from beam 1 to
/// beam 3). Columns are edge-major `(A1 B1 C1 | A2 B2 C2 | A3 B3 C3)` with
/// `v_i = A_i (sinh - sin) + B_i (cosh - cos)`, `eta_i = C_i sin`.
fn star_9x9(lambda: f64, l: [f64; 3], a1: f64, a2: f64) -> DMatrix<f64> {
    let mu = lambda.powf(0.25);
    let beta = lambda.sqrt();
    let (g1, g2, g3) = (mu * l[0], mu * l[1], mu * l[2]);
    let (b1, b2, b3) = (beta * l[0], beta * l[1], beta * l[2]);
    let (sa1, ca1) = a1.sin_cos();
    let (sa2, ca2) = a2.sin_cos();
    let s = f64::sin;
    let c = f64::cos;
    DMatrix::from_row_slice(
        9,
        9,
        &[
            // 1: displacement continuity v1 - v2
            sm(g1),
            cm(g1),
            0.0,
            -sm(g2),
            -cm(g2),
            0.0,
            0.0,
            0.0,
            0.0,
            // 2: displacement continuity v1 - v3
            sm(g1),
            cm(g1),
            0.0,
            0.0,
            0.0,
            0.0,
            -sm(g3),
            -cm(g3),
            0.0,
            // 3: shear balance, divided by mu^2
            mu * cp(g1),
            mu * sm(g1),
            0.0,
            mu * cp(g2),
            mu * sm(g2),
            0.0,
            mu * cp(g3),
            mu * sm(g3),
            0.0,
            // 4: rotation continuity (1 vs 2) along i1
            0.0,
            0.0,
            s(b1),
            sa1 * mu * cm(g2),
            sa1 * mu * sp(g2),
            -ca1 * s(b2),
            0.0,
            0.0,
            0.0,
            // 5: rotation continuity (1 vs 3) along i1
            0.0,
            0.0,
            s(b1),
            0.0,
            0.0,
            0.0,
            -sa2 * mu * cm(g3),
            -sa2 * mu * sp(g3),
            -ca2 * s(b3),
            // 6: rotation continuity (1 vs 2) along j1
            -mu * cm(g1),
            -mu * sp(g1),
            0.0,
            ca1 * mu * cm(g2),
            ca1 * mu * sp(g2),
            sa1 * s(b2),
            0.0,
            0.0,
            0.0,
            // 7: rotation continuity (1 vs 3) along j1
            -mu * cm(g1),
            -mu * sp(g1),
            0.0,
            0.0,
            0.0,
            0.0,
            ca2 * mu * cm(g3),
            ca2 * mu * sp(g3),
            -sa2 * s(b3),
            // 8: moment balance along -j1 (torsion terms carry cos(beta l))
            mu * mu * sp(g1),
            mu * mu * cp(g1),
            0.0,
            ca1 * mu * mu * sp(g2),
            ca1 * mu * mu * cp(g2),
            sa1 * beta * c(b2),
            ca2 * mu * mu * sp(g3),
            ca2 * mu * mu * cp(g3),
            -sa2 * beta * c(b3),
            // 9: moment balance along i1 (bending terms of beam 2 enter with -sin(a1))
            0.0,
            0.0,
            beta * c(b1),
            -sa1 * mu * mu * sp(g2),
            -sa1 * mu * mu * cp(g2),
            ca1 * beta * c(b2),
            sa2 * mu * mu * sp(g3),
            sa2 * mu * mu * cp(g3),
            ca2 * beta * c(b3),
        ],
    )
}

/// 4x4 axially-symmetric (breathing) sector of the tower: legs carry
/// `v = A(sinh-sin) + B(cosh-cos)` and `u = C sin`, the vertical beam
/// `u0 = D cos`. Rows: tip rotation, axial continuity, lateral continuity,
/// force balance.
fn tower_trv(lambda: f64, l: f64, l0: f64, alpha: f64, a: f64, c: f64, c0: f64) -> DMatrix<f64> {
    let mu = (lambda / a).powf(0.25);
    let bc = (lambda / c).sqrt();
    let b0 = (lambda / c0).sqrt();
    let (sa, ca) = alpha.sin_cos();
    DMatrix::from_row_slice(
        4,
        4,
        &[
            cm(mu * l),
            sp(mu * l),
            0.0,
            0.0,
            0.0,
            0.0,
            (bc * l).sin(),
            sa * (b0 * l0).cos(),
            sm(mu * l),
            cm(mu * l),
            0.0,
            ca * (b0 * l0).cos(),
            // balance of forces along the legs' axis combination; the axial
            // terms enter with the opposite sign of the shear term
            3.0 * a * mu.powi(3) * ca * cp(mu * l),
            3.0 * a * mu.powi(3) * ca * sm(mu * l),
            -3.0 * c * bc * sa * (bc * l).cos(),
            -c0 * b0 * (b0 * l0).sin(),
        ],
    )
}

/// 4x4 alternating (twisting) sector of the tower: legs carry
/// `w = A(sinh-sin) + B(cosh-cos)` and `eta = C sin`, the vertical beam
/// `eta0 = D cos`.
fn tower_alt(lambda: f64, l: f64, l0: f64, alpha: f64, b: f64, d: f64, d0: f64) -> DMatrix<f64> {
    let mu = (lambda / b).powf(0.25);
    let bd = (lambda / d).sqrt();
    let b0 = (lambda / d0).sqrt();
    let (sa, ca) = alpha.sin_cos();
    DMatrix::from_row_slice(
        4,
        4,
        &[
            sm(mu * l),
            cm(mu * l),
            0.0,
            0.0,
            0.0,
            0.0,
            (bd * l).sin(),
            sa * (b0 * l0).cos(),
            mu * cm(mu * l),
            mu * sp(mu * l),
            0.0,
            ca * (b0 * l0).cos(),
            // balance of moments; torsion terms enter with the opposite sign
            // of the bending-moment term
            3.0 * b * mu * mu * ca * sp(mu * l),
            3.0 * b * mu * mu * ca * cp(mu * l),
            3.0 * d * bd * sa * (bd * l).cos(),
            d0 * b0 * (b0 * l0).sin(),
        ],
    )
}

/// 8x8 rotating-wobble sector of the tower for unit materials. Unknowns
/// `(A B C D E F A0 B0)` with `v = A(sinh-sin)+B(cosh-cos)`,
/// `i w = C(sinh-sin)+D(cosh-cos)`, `u = E sin`, `i eta = F sin`,
/// `v0 = A0(sinh+sin)+B0(cosh+cos)`.
fn tower_omega(lambda: f64, l: f64, l0: f64, alpha: f64) -> DMatrix<f64> {
    let mu = lambda.powf(0.25);
    let beta = lambda.sqrt();
    let (sa, ca) = alpha.sin_cos();
    let (g, g0) = (mu * l, mu * l0);
    let sb = (beta * l).sin();
    let cb = (beta * l).cos();
    let th = 1.5;
    DMatrix::from_row_slice(
        8,
        8,
        &[
            // 1: slope continuity v' - v0' (second entry is sinh+sin)
            cm(g),
            sp(g),
            0.0,
            0.0,
            0.0,
            0.0,
            -cp(g0),
            -sm(g0),
            // 2: lateral continuity i w + v0
            0.0,
            0.0,
            sm(g),
            cm(g),
            0.0,
            0.0,
            sp(g0),
            cp(g0),
            // 3: axial continuity u - cos(alpha) v0
            0.0,
            0.0,
            0.0,
            0.0,
            sb,
            0.0,
            -ca * sp(g0),
            -ca * cp(g0),
            // 4: torsion continuity i eta + cos(alpha) v0'
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            sb,
            mu * ca * cp(g0),
            mu * ca * sm(g0),
            // 5: lateral continuity v + sin(alpha) v0
            sm(g),
            cm(g),
            0.0,
            0.0,
            0.0,
            0.0,
            sa * sp(g0),
            sa * cp(g0),
            // 6: slope continuity i w' - sin(alpha) v0', divided by mu
            0.0,
            0.0,
            cm(g),
            sp(g),
            0.0,
            0.0,
            -sa * cp(g0),
            -sa * sm(g0),
            // 7: force balance, divided by mu^2
            th * mu * sa * cp(g),
            th * mu * sa * sm(g),
            th * mu * cp(g),
            th * mu * sm(g),
            th * ca * cb,
            0.0,
            -mu * cm(g0),
            -mu * sp(g0),
            // 8: moment balance, divided by mu^2
            -th * sp(g),
            -th * cp(g),
            -th * sa * sp(g),
            -th * sa * cp(g),
            0.0,
            th * ca * cb,
            -sm(g0),
            -cm(g0),
        ],
    )
}

/// Check `golden[perm[i]][j] = scale[i] * mine[i][j] * col_phase[j]` and
/// return the largest relative entry error.
fn golden_match(
    mine: &DMatrix<C64>,
    golden: &DMatrix<f64>,
    perm: &[usize],
    scales: &[C64],
    col_phases: &[C64],
) -> f64 {
    assert_eq!(mine.nrows(), golden.nrows());
    let scale_ref = golden.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut worst = 0.0f64;
    for i in 0..mine.nrows() {
        for j in 0..mine.ncols() {
            let got = scales[i] * mine[(i, j)] * col_phases[j];
            let want = golden[(perm[i], j)];
            worst = worst.max((got - C64::new(want, 0.0)).norm() / scale_ref);
        }
    }
    worst
}

fn star_frame(lengths: [f64; 3]) -> Frame<f64> {
    models::planar_star(
        lengths,
        std::f64::consts::PI,
        std::f64::consts::FRAC_PI_2,
        [MaterialParams::unit(); 3],
    )
}

fn tower_frame() -> Frame<f64> {
    models::antenna_tower(
        std::f64::consts::FRAC_PI_6,
        [1.0; 4],
        MaterialParams::unit(),
    )
}

fn tower_irreps(
    sym: &FrameSymmetry<f64>,
) -> (
    IrrepSpec<f64>,
    IrrepSpec<f64>,
    IrrepSpec<f64>,
    IrrepSpec<f64>,
) {
    let one = C64::new(1.0, 0.0);
    let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let trv = IrrepSpec::from_generators(sym, "trivial", &[("R".into(), one), ("F".into(), one)])
        .unwrap();
    let alt =
        IrrepSpec::from_generators(sym, "alternating", &[("R".into(), one), ("F".into(), -one)])
            .unwrap();
    let om = IrrepSpec::from_generators(sym, "omega", &[("R".into(), omega)]).unwrap();
    let omb = om.conjugate("omegabar");
    (trv, alt, om, omb)
}

fn lambdas(roots: &[Root<f64>]) -> Vec<f64> {
    let mut out = Vec::new();
    for r in roots {
        for _ in 0..r.nullity {
            out.push(r.lambda);
        }
    }
    out
}

/// Criterion 1: golden matrices, entry-by-entry at seeded random lambdas.
#[test]
fn acceptance_1_golden_matrices() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let lams: Vec<f64> = (0..3).map(|_| rng.random_range(0.5..12.0)).collect();
    let mut worst = 0.0f64;

    // (a) planar star, unit stiffness, distinct lengths
    let lengths = [1.0, 0.8, 1.3];
    let frame = star_frame(lengths);
    let PlanarCheck::Planar(split) = detect_planar(&frame, 1e-10) else {
        panic!("star not planar")
    };
    let (h1, _) = reduced_assemblies(&frame, &split, AssemblyOptions::default());
    for &lam in &lams {
        let mine = h1.assemble(lam).unwrap().map(|x| C64::new(x, 0.0));
        let gold = star_9x9(
            lam,
            lengths,
            std::f64::consts::PI,
            std::f64::consts::FRAC_PI_2,
        );
        let perm = [0, 3, 5, 1, 4, 6, 2, 8, 7];
        let mu2 = lam.sqrt();
        let scales: Vec<C64> = [-1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0 / mu2, 1.0, -1.0]
            .iter()
            .map(|&s| C64::new(s, 0.0))
            .collect();
        let phases = vec![C64::new(1.0, 0.0); 9];
        let err = golden_match(&mine, &gold, &perm, &scales, &phases);
        println!("  star 9x9 at lambda {lam:.4}: {err:.2e}");
        worst = worst.max(err);
    }

    // (b) tower breathing/twisting sectors with non-unit materials
    let leg_m = MaterialParams::new(1.3, 0.9, 0.7, 1.1);
    let top_m = MaterialParams::new(0.8, 0.8, 1.5, 0.6);
    let alpha = std::f64::consts::FRAC_PI_6;
    let (l, l0) = (1.1, 0.9);
    let tower = models::antenna_tower_with(alpha, [l0, l], leg_m, top_m);
    let sym = FrameSymmetry::build(&tower, &models::tower_symmetry_generators(), 1e-9).unwrap();
    let (trv, alt, _, _) = tower_irreps(&sym);
    let q_trv = quotient_assembly(&sym, &trv, AssemblyOptions::default()).unwrap();
    let q_alt = quotient_assembly(&sym, &alt, AssemblyOptions::default()).unwrap();
    let sa = alpha.sin();
    for &lam in &lams {
        let mine = q_trv.assemble(lam).unwrap();
        let gold = tower_trv(lam, l, l0, alpha, leg_m.a, leg_m.c, top_m.c);
        let mu_a = (lam / leg_m.a).powf(0.25);
        let scales: Vec<C64> = [-1.0, -1.0, 1.0 / mu_a, 1.0 / sa]
            .iter()
            .map(|&s| C64::new(s, 0.0))
            .collect();
        let err = golden_match(
            &mine,
            &gold,
            &[1, 2, 0, 3],
            &scales,
            &[C64::new(1.0, 0.0); 4],
        );
        println!("  tower trv at lambda {lam:.4}: {err:.2e}");
        worst = worst.max(err);

        let mine = q_alt.assemble(lam).unwrap();
        let gold = tower_alt(lam, l, l0, alpha, leg_m.b, leg_m.d, top_m.d);
        let scales: Vec<C64> = [-1.0, -1.0, -1.0, -1.0 / sa]
            .iter()
            .map(|&s| C64::new(s, 0.0))
            .collect();
        let err = golden_match(
            &mine,
            &gold,
            &[0, 1, 2, 3],
            &scales,
            &[C64::new(1.0, 0.0); 4],
        );
        println!("  tower alt at lambda {lam:.4}: {err:.2e}");
        worst = worst.max(err);
    }

    // (c) rotating sector with unit materials, distinct lengths
    let (l, l0) = (1.2, 0.7);
    let tower = models::antenna_tower_with(
        alpha,
        [l0, l],
        MaterialParams::unit(),
        MaterialParams::unit(),
    );
    let sym = FrameSymmetry::build(&tower, &models::tower_symmetry_generators(), 1e-9).unwrap();
    let (_, _, om, _) = tower_irreps(&sym);
    let q_om = quotient_assembly(&sym, &om, AssemblyOptions::default()).unwrap();
    let i = C64::new(0.0, 1.0);
    let ca = alpha.cos();
    for &lam in &lams {
        let mine = q_om.assemble(lam).unwrap();
        let gold = tower_omega(lam, l, l0, alpha);
        let mu = lam.powf(0.25);
        let mu2 = lam.sqrt();
        let perm = [2, 1, 4, 3, 0, 5, 6, 7];
        let scales = [
            -C64::new(1.0, 0.0),
            i,
            -C64::new(1.0, 0.0),
            i,
            C64::new(1.0 / mu, 0.0),
            i / mu,
            -C64::new(1.0 / (mu2 * ca), 0.0),
            i / (mu2 * ca),
        ];
        // lateral/torsion columns of the legs carry the phase i (the golden
        // unknowns are the coefficients of i*w and i*eta)
        let phases = [
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            i,
            i,
            C64::new(1.0, 0.0),
            i,
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        ];
        let err = golden_match(&mine, &gold, &perm, &scales, &phases);
        println!("  tower omega at lambda {lam:.4}: {err:.2e}");
        worst = worst.max(err);
    }

    let elapsed = start.elapsed();
    let ok = worst <= 1e-12 && elapsed.as_secs_f64() < 1.0;
    println!(
        "ACCEPTANCE 1 golden matrices: {} (max relative entry error {:.2e}, {:.0} ms)",
        if ok { "PASS" } else { "FAIL" },
        worst,
        elapsed.as_secs_f64() * 1e3
    );
    assert!(ok, "max entry error {worst:.3e}, elapsed {elapsed:?}");
}

/// Independent scalar root of `1 + cos x cosh x = 0`.
fn clamped_free_mu(n: usize) -> f64 {
    let f = |x: f64| 1.0 + x.cos() * x.cosh();
    let mut roots = Vec::new();
    let mut a = 1.0;
    let mut fa = f(a);
    let mut x = a;
    while roots.len() < n {
        x += 0.01;
        let fx = f(x);
        if fa * fx < 0.0 {
            let (mut lo, mut hi) = (a, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = x;
        fa = fx;
    }
    roots[n - 1]
}

/// Criterion 2: analytic single-beam oracles.
#[test]
fn acceptance_2_single_beam_oracles() {
    let start = Instant::now();
    let frame = Frame::<f64>::builder()
        .vertex(0, Vector3::zeros(), JointKind::Clamped)
        .vertex(1, Vector3::new(1.0, 0.0, 0.0), JointKind::FreeRigid)
        .edge(0, 0, 1, MaterialParams::unit())
        .build()
        .unwrap();

    let mu1 = clamped_free_mu(1);
    let mu2 = clamped_free_mu(2);
    assert!((mu1 - 1.875104069).abs() < 1e-8);
    assert!((mu2 - 4.694091133).abs() < 1e-8);
    let bend = [mu1.powi(4), mu2.powi(4)];
    let tors = [
        (std::f64::consts::FRAC_PI_2).powi(2),
        (3.0 * std::f64::consts::FRAC_PI_2).powi(2),
    ];

    let asm = SecularAssembly::new(frame.clone());
    let roots = asm.eigenvalues(0.5, 600.0, 6000).unwrap();
    let closest = |x: f64| {
        roots
            .iter()
            .map(|r| r.lambda)
            .min_by(|a, b| (a - x).abs().partial_cmp(&(b - x).abs()).unwrap())
            .unwrap()
    };
    let mut ok = true;
    for &l in bend.iter().chain(&tors) {
        let got = closest(l);
        let rel = (got - l).abs() / l;
        let sub = rel <= 1e-10;
        ok &= sub;
        println!(
            "  secular vs oracle {l:.9}: got {got:.12} rel {rel:.2e} {}",
            if sub { "ok" } else { "FAIL" }
        );
    }

    let sys = assemble_fem(&frame, 64);
    let pairs = solve_fem(&sys, 24).unwrap();
    let fem_closest = |x: f64| {
        pairs
            .iter()
            .map(|p| p.lambda)
            .min_by(|a, b| (a - x).abs().partial_cmp(&(b - x).abs()).unwrap())
            .unwrap()
    };
    for &l in bend.iter().chain(&tors) {
        let got = fem_closest(l);
        let rel = (got - l).abs() / l;
        let sub = rel <= 1e-6;
        ok &= sub;
        println!(
            "  fem(n=64) vs oracle {l:.9}: got {got:.9} rel {rel:.2e} {}",
            if sub {
                "ok"
            } else {
                "FAIL (linear rod elements: dispersion floor (beta*h)^2/12)"
            }
        );
    }

    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 5.0;
    println!(
        "ACCEPTANCE 2 single-beam oracles: {} ({:.1} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok);
}

/// Criterion 3: secular-FEM equivalence on both fixtures.
#[test]
fn acceptance_3_secular_fem_equivalence() {
    let start = Instant::now();
    let mut ok = true;
    for (name, frame, lmin, lmax) in [
        ("planar star", star_frame([1.0; 3]), 0.5, 26.0),
        ("antenna tower", tower_frame(), 0.05, 9.8),
    ] {
        let asm = SecularAssembly::new(frame.clone());
        let roots = asm.eigenvalues(lmin, lmax, 4000).unwrap();
        let sec = lambdas(&roots);
        assert!(
            sec.len() >= 8,
            "{name}: expected at least 8 eigenvalues, got {}",
            sec.len()
        );
        let sec8 = &sec[..8];
        for (n, tol) in [(20usize, 1e-4f64), (80, 1e-6)] {
            let sys = assemble_fem(&frame, n);
            let pairs = solve_fem(&sys, 12).unwrap();
            let mut worst = 0.0f64;
            for (i, &ls) in sec8.iter().enumerate() {
                let lf = pairs[i].lambda;
                let rel = (ls - lf).abs() / ls;
                worst = worst.max(rel);
                if rel > tol {
                    println!(
                        "  {name} n={n}: eigenvalue {i} secular {ls:.9} fem {lf:.9} rel {rel:.2e} > {tol:.0e} FAIL"
                    );
                    ok = false;
                }
            }
            println!("  {name} n={n}: worst relative deviation {worst:.2e} (tol {tol:.0e})");
            let count = count_eigenvalues_below(&sys, lmax).unwrap();
            let sub = count == sec.len();
            if !sub {
                println!("  {name} n={n}: count {count} vs secular {}", sec.len());
            }
            ok &= sub;
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 60.0;
    println!(
        "ACCEPTANCE 3 secular-FEM equivalence: {} ({:.1} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok);
}

/// Criterion 4: symmetry decomposition of the tower spectrum.
#[test]
fn acceptance_4_symmetry_decomposition() {
    let start = Instant::now();
    let frame = tower_frame();
    let sym = FrameSymmetry::build(&frame, &models::tower_symmetry_generators(), 1e-9).unwrap();
    let (trv, alt, om, _) = tower_irreps(&sym);
    let opts = AssemblyOptions::default();
    let mut ok = true;

    let full = SecularAssembly::with_options(frame.clone(), opts);
    let full_roots = full.eigenvalues(0.05, 30.0, 6000).unwrap();
    let mut union: Vec<(f64, &str)> = Vec::new();
    for (label, irrep, weight) in [("trv", &trv, 1usize), ("alt", &alt, 1), ("omega", &om, 2)] {
        let q = quotient_assembly(&sym, irrep, opts).unwrap();
        for r in q.eigenvalues(0.05, 30.0, 6000).unwrap() {
            for _ in 0..(r.nullity * weight) {
                union.push((r.lambda, label));
            }
        }
    }
    union.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let full_list = lambdas(&full_roots);
    let sub = union.len() == full_list.len();
    if !sub {
        println!("  union size {} vs full {}", union.len(), full_list.len());
    }
    ok &= sub;
    let mut worst = 0.0f64;
    for (u, f) in union.iter().zip(&full_list) {
        let rel = (u.0 - f).abs() / f;
        worst = worst.max(rel);
    }
    println!(
        "  union vs full spectrum: worst relative deviation {worst:.2e} over {} eigenvalues",
        full_list.len()
    );
    ok &= worst <= 1e-6;

    // multiplicity-2 pair at the paper-scale FEM resolution
    let sys = assemble_fem(&frame, 20);
    let pairs = solve_fem(&sys, 6).unwrap();
    // the third and fourth discrete eigenvalues form the first wobble pair
    let split = (pairs[3].lambda - pairs[2].lambda).abs() / pairs[2].lambda;
    println!("  fem(n=20) multiplicity-2 split {split:.2e}");
    ok &= split <= 1e-6;

    // zero patterns of lifted modes
    let q_trv = quotient_assembly(&sym, &trv, opts).unwrap();
    let r = q_trv.eigenvalues(1.0, 4.0, 500).unwrap();
    let mode = q_trv.mode_shape(r[0].lambda).unwrap();
    let mut pattern = 0.0f64;
    for (ei, edge) in frame.edges().iter().enumerate() {
        for k in 0..=8 {
            let x = edge.length * k as f64 / 8.0;
            let (re, im) = mode.eval(ei, x).unwrap();
            if ei == 0 {
                // vertical beam: v0 = w0 = eta0 = 0
                pattern = pattern
                    .max(re.v[0].hypot(im.v[0]))
                    .max(re.w[0].hypot(im.w[0]))
                    .max(re.eta[0].hypot(im.eta[0]));
            } else {
                // legs: w = eta = 0
                pattern = pattern
                    .max(re.w[0].hypot(im.w[0]))
                    .max(re.eta[0].hypot(im.eta[0]));
            }
        }
    }
    // legs carry identical fields
    for k in 0..=8 {
        let x = frame.edges()[1].length * k as f64 / 8.0;
        let (r1, _) = mode.eval(1, x).unwrap();
        let (r2, _) = mode.eval(2, x).unwrap();
        let (r3, _) = mode.eval(3, x).unwrap();
        pattern = pattern
            .max((r1.v[0] - r2.v[0]).abs())
            .max((r1.v[0] - r3.v[0]).abs())
            .max((r1.u[0] - r2.u[0]).abs());
    }
    let q_alt = quotient_assembly(&sym, &alt, opts).unwrap();
    let r = q_alt.eigenvalues(1.0, 4.0, 500).unwrap();
    let mode = q_alt.mode_shape(r[0].lambda).unwrap();
    for (ei, edge) in frame.edges().iter().enumerate() {
        for k in 0..=8 {
            let x = edge.length * k as f64 / 8.0;
            let (re, im) = mode.eval(ei, x).unwrap();
            if ei == 0 {
                // vertical beam: v0 = w0 = u0 = 0
                pattern = pattern
                    .max(re.v[0].hypot(im.v[0]))
                    .max(re.w[0].hypot(im.w[0]))
                    .max(re.u[0].hypot(im.u[0]));
            } else {
                // legs: u = v = 0
                pattern = pattern
                    .max(re.u[0].hypot(im.u[0]))
                    .max(re.v[0].hypot(im.v[0]));
            }
        }
    }
    println!("  lifted trv/alt zero-pattern deviation {pattern:.2e}");
    ok &= pattern <= 1e-10;

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 4 symmetry decomposition: {} ({:.1} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok);
}

/// Criterion 5: structural invariances (dummy vertex, edge flip, planar sum).
#[test]
fn acceptance_5_structural_properties() {
    let start = Instant::now();
    let mut ok = true;
    let frame = star_frame([1.0; 3]);
    let asm = SecularAssembly::new(frame.clone());
    let base = lambdas(&asm.eigenvalues(0.5, 40.0, 3000).unwrap());

    for (name, variant) in [
        ("dummy vertex", frame.split_edge(2, 0.5, 10, 10).unwrap()),
        ("edge flip", frame.flip_edge(2).unwrap()),
    ] {
        let v = SecularAssembly::new(variant);
        let got = lambdas(&v.eigenvalues(0.5, 40.0, 3000).unwrap());
        let sub = got.len() == base.len();
        let mut worst = 0.0f64;
        for (a, b) in base.iter().zip(&got) {
            worst = worst.max((a - b).abs() / a);
        }
        println!(
            "  {name}: {} eigenvalues, worst relative change {worst:.2e}",
            got.len()
        );
        ok &= sub && worst <= 1e-8;
    }

    // planar direct sum partitions the spectrum
    let PlanarCheck::Planar(split) = detect_planar(&frame, 1e-10) else {
        panic!()
    };
    let (h1, h2) = reduced_assemblies(&frame, &split, AssemblyOptions::default());
    let mut union = lambdas(&h1.eigenvalues(0.5, 40.0, 3000).unwrap());
    union.extend(lambdas(&h2.eigenvalues(0.5, 40.0, 3000).unwrap()));
    union.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sub = union.len() == base.len();
    let mut worst = 0.0f64;
    for (a, b) in base.iter().zip(&union) {
        worst = worst.max((a - b).abs() / a);
    }
    println!(
        "  planar direct sum: full {} vs union {} eigenvalues, worst deviation {worst:.2e}",
        base.len(),
        union.len()
    );
    ok &= sub && worst <= 1e-9;

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 5 structural properties: {} ({:.1} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok);
}

/// Criterion 6: operator-theoretic checks.
#[test]
fn acceptance_6_operator_checks() {
    let start = Instant::now();
    let mut ok = true;

    // Green's identity on pairs of computed modes
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    for frame in [star_frame([1.0; 3]), tower_frame()] {
        let asm = SecularAssembly::new(frame.clone());
        let roots = asm.eigenvalues(0.5, 30.0, 3000).unwrap();
        let modes: Vec<ModeShape<f64>> = roots
            .iter()
            .map(|r| asm.mode_shape(r.lambda).unwrap())
            .collect();
        for _ in 0..10 {
            let i = rng.random_range(0..modes.len());
            let j = rng.random_range(0..modes.len());
            let res =
                greens_identity_residual(&frame, &modes[i].real_view(), &modes[j].real_view(), 64)
                    .unwrap();
            worst = worst.max(res);
        }
    }
    println!("  Green's identity residual over 20 mode pairs: worst {worst:.2e}");
    ok &= worst < 1e-8;

    // stiffness symmetry
    for frame in [star_frame([1.0; 3]), tower_frame()] {
        let sys = assemble_fem(&frame, 12);
        let asym = (&sys.k - sys.k.transpose()).norm() / sys.k.norm();
        ok &= asym <= 1e-12;
        println!("  FEM stiffness asymmetry {asym:.2e}");
    }

    // projector algebra on 100 random fields
    let frame = tower_frame();
    let sym = FrameSymmetry::build(&frame, &models::tower_symmetry_generators(), 1e-9).unwrap();
    let (trv, alt, om, omb) = tower_irreps(&sym);
    let irr = [trv, alt, om, omb];
    let mut alg = 0.0f64;
    for _ in 0..100 {
        let field = SampledField::from_fn(&frame, 4, |_, _, _| {
            C64::new(rng.random_range(-1.0..1.0), 0.0)
        });
        let projections: Vec<SampledField<f64>> = irr
            .iter()
            .map(|i| isotypic_projector(&sym, i, &field))
            .collect();
        for (i, p) in irr.iter().zip(&projections) {
            let twice = isotypic_projector(&sym, i, p);
            let mut diff = twice;
            diff.axpy(C64::new(-1.0, 0.0), p);
            alg = alg.max(diff.norm(&frame));
        }
        for (i, pi) in irr.iter().enumerate() {
            for (j, pj) in projections.iter().enumerate() {
                if i != j {
                    alg = alg.max(isotypic_projector(&sym, pi, pj).norm(&frame));
                }
            }
        }
        let mut sum = SampledField::zeros(&frame, field.panels);
        for p in &projections {
            sum.axpy(C64::new(1.0, 0.0), p);
        }
        sum.axpy(C64::new(-1.0, 0.0), &field);
        alg = alg.max(sum.norm(&frame));
    }
    println!("  projector algebra worst deviation {alg:.2e} over 100 fields");
    ok &= alg <= 1e-12;

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 6 operator checks: {} ({:.1} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok);
}

/// Criterion 7: kinematics oracles.
#[test]
fn acceptance_7_kinematics() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let axis = loop {
            let v = Vector3::new(
                rng.random_range(-1.0..1.0f64),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if v.norm() > 1e-3 {
                break v / v.norm();
            }
        };
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let r = rodrigues(&axis, angle).unwrap();
        let e = matrix_exp(&(skew(&axis) * angle));
        worst = worst.max((r - e).norm());
    }
    println!("  axis-angle vs series exponential: worst {worst:.2e} over 1000 rotations");
    let mut ok = worst <= 1e-12;

    // tangent-plane equivalence in both directions on randomized traces
    let frame = models::planar_star([1.0, 1.3, 0.8], 2.3, 1.1, [MaterialParams::unit(); 3]);
    let vi = frame.vertex_idx(0).unwrap();
    let incident: Vec<usize> = frame.incident(vi).iter().map(|&(e, _)| e).collect();
    let triad = |e: usize| &frame.edges()[e].triad;
    let j1i2 = triad(incident[0]).j.dot(&triad(incident[1]).i);
    assert!(j1i2.abs() > 1e-8);
    let mut fwd = 0.0f64;
    let mut bwd = 0.0f64;
    for _ in 0..200 {
        // forward: common in-plane rotation vector
        let omega = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            0.0,
        );
        let traces: Vec<(f64, f64)> = incident
            .iter()
            .map(|&e| (-omega.dot(&triad(e).j), omega.dot(&triad(e).i)))
            .collect();
        let framespec_core::kinematics::TangentPlaneCheck::Residuals(res) =
            framespec_core::kinematics::tangent_plane_residuals(&frame, 0, &traces).unwrap()
        else {
            panic!()
        };
        for r in res {
            fwd = fwd.max(r.in_plane.abs()).max(r.rotation.abs());
        }
        // converse: solve the identities, check the rotation vectors agree
        let (vp1, vp2) = (
            rng.random_range(-1.0..1.0f64),
            rng.random_range(-1.0..1.0f64),
        );
        let omegas: Vec<Vector3<f64>> = incident
            .iter()
            .map(|&e| {
                let (t1, t2, te) = (triad(incident[0]), triad(incident[1]), triad(e));
                let vpe = -(t2.j.dot(&te.i) * vp1 + te.j.dot(&t1.i) * vp2) / j1i2;
                let etae = -(t2.j.dot(&te.j) * vp1 - te.j.dot(&t1.j) * vp2) / j1i2;
                te.i * etae - te.j * vpe
            })
            .collect();
        for o in &omegas[1..] {
            bwd = bwd.max((o - omegas[0]).norm());
        }
    }
    println!("  tangent-plane equivalence: forward {fwd:.2e}, converse {bwd:.2e}");
    ok &= fwd <= 1e-10 && bwd <= 1e-10;

    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 7 kinematics: {} ({:.1} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok);
}
