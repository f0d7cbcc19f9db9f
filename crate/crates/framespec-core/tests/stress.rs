//! Stress checks on frames away from the worked examples: mixed joint kinds,
//! non-unit materials, bent interior joints. Tolerances follow the FEM
//! discretization error of each mesh.

use framespec_core::fem::{assemble_fem, solve_fem};
use framespec_core::geometry::{Frame, JointKind, MaterialParams};
use framespec_core::kinematics::rodrigues;
use framespec_core::models;
use framespec_core::planar::{detect_planar, reduced_assemblies, PlanarCheck};
use framespec_core::secular::{AssemblyOptions, SecularAssembly};
use framespec_core::symmetry::{spectrum_union_check, FrameSymmetry, IrrepSpec};
use nalgebra::Vector3;
use num_complex::Complex;

#[test]
fn stress_planar_mixed_joints() {
    // planar 4-beam frame: pinned, guided, clamped, free ends; non-unit materials
    let m1 = MaterialParams::new(1.3, 0.8, 2.0, 0.6);
    let m2 = MaterialParams::new(0.7, 1.1, 1.4, 1.9);
    let frame = Frame::<f64>::builder()
        .vertex(0, Vector3::zeros(), JointKind::FreeRigid)
        .vertex(1, Vector3::new(1.2, 0.0, 0.0), JointKind::Pinned)
        .vertex(2, Vector3::new(-0.3, 0.9, 0.0), JointKind::Guided)
        .vertex(3, Vector3::new(-0.8, -0.7, 0.0), JointKind::Clamped)
        .vertex(4, Vector3::new(0.4, -1.1, 0.0), JointKind::FreeRigid)
        .edge(0, 1, 0, m1)
        .edge(1, 2, 0, m2)
        .edge(2, 3, 0, m1)
        .edge(3, 4, 0, m2)
        .build()
        .unwrap();
    let full = SecularAssembly::new(frame.clone());
    let fr = full.eigenvalues(0.05, 20.0, 4000).unwrap();
    let full_list: Vec<f64> = fr
        .iter()
        .flat_map(|r| std::iter::repeat(r.lambda).take(r.nullity))
        .collect();
    println!("full: {:?}", full_list);

    let PlanarCheck::Planar(split) = detect_planar(&frame, 1e-10) else {
        panic!()
    };
    let (h1, h2) = reduced_assemblies(&frame, &split, AssemblyOptions::default());
    let mut union: Vec<f64> = Vec::new();
    for asm in [h1, h2] {
        for r in asm.eigenvalues(0.05, 20.0, 4000).unwrap() {
            for _ in 0..r.nullity {
                union.push(r.lambda);
            }
        }
    }
    union.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("unio: {:?}", union);
    assert_eq!(full_list.len(), union.len());
    for (a, b) in full_list.iter().zip(&union) {
        assert!((a - b).abs() < 1e-8 * a.max(1.0), "{a} vs {b}");
    }
    // FEM cross-check
    let sys = assemble_fem(&frame, 24);
    let pairs = solve_fem(&sys, full_list.len().min(10)).unwrap();
    for (i, p) in pairs.iter().enumerate().take(6) {
        let rel = (p.lambda - full_list[i]).abs() / full_list[i];
        println!(
            "fem {i}: {:.6} vs {:.6} rel {rel:.2e}",
            p.lambda, full_list[i]
        );
        assert!(rel < 5e-3, "eigenvalue {i}");
    }

    // flipping an edge moves its pinned/guided end to the terminus, which
    // disables the analytic endpoint reduction; the spectrum must not move
    for edge in [0u32, 1] {
        let flipped = SecularAssembly::new(frame.flip_edge(edge).unwrap());
        let got: Vec<f64> = flipped
            .eigenvalues(0.05, 20.0, 4000)
            .unwrap()
            .iter()
            .flat_map(|r| std::iter::repeat(r.lambda).take(r.nullity))
            .collect();
        assert_eq!(got.len(), full_list.len());
        for (a, b) in full_list.iter().zip(&got) {
            assert!((a - b).abs() < 1e-8 * a.max(1.0), "flip {edge}: {a} vs {b}");
        }
    }
}

#[test]
fn stress_bent_elbow_interior_vertex() {
    // non-colinear interior degree-2 joint (a real elbow, not a dummy vertex)
    let frame = Frame::<f64>::builder()
        .vertex(0, Vector3::zeros(), JointKind::Clamped)
        .vertex(1, Vector3::new(1.0, 0.0, 0.0), JointKind::FreeRigid)
        .vertex(2, Vector3::new(1.0, 0.8, 0.5), JointKind::FreeRigid)
        .edge(0, 0, 1, MaterialParams::new(1.0, 1.3, 1.8, 0.7))
        .edge(1, 1, 2, MaterialParams::new(0.9, 1.1, 1.2, 1.5))
        .build()
        .unwrap();
    let asm = SecularAssembly::new(frame.clone());
    let roots = asm.eigenvalues(0.05, 30.0, 5000).unwrap();
    let sec: Vec<f64> = roots
        .iter()
        .flat_map(|r| std::iter::repeat(r.lambda).take(r.nullity))
        .collect();
    println!("secular: {:?}", sec);
    assert!(sec.len() >= 4);
    let sys = assemble_fem(&frame, 32);
    let pairs = solve_fem(&sys, 8).unwrap();
    for (i, p) in pairs.iter().enumerate().take(4) {
        let rel = (p.lambda - sec[i]).abs() / sec[i];
        println!("fem {i}: {:.6} vs {:.6} rel {rel:.2e}", p.lambda, sec[i]);
        assert!(rel < 5e-3, "eigenvalue {i}");
    }
}

#[test]
fn stress_tower_nonunit_materials_union() {
    let leg_m = MaterialParams::new(1.3, 0.9, 0.7, 1.1);
    let top_m = MaterialParams::new(0.8, 0.8, 1.5, 0.6);
    let frame = models::antenna_tower_with(std::f64::consts::FRAC_PI_6, [0.9, 1.1], leg_m, top_m);
    let sym = FrameSymmetry::build(&frame, &models::tower_symmetry_generators(), 1e-9).unwrap();
    let one = Complex::new(1.0, 0.0);
    let omega = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let irr = vec![
        IrrepSpec::from_generators(&sym, "trivial", &[("R".into(), one), ("F".into(), one)])
            .unwrap(),
        IrrepSpec::from_generators(
            &sym,
            "alternating",
            &[("R".into(), one), ("F".into(), -one)],
        )
        .unwrap(),
        IrrepSpec::from_generators(&sym, "omega", &[("R".into(), omega)]).unwrap(),
        IrrepSpec::from_generators(&sym, "omega", &[("R".into(), omega)])
            .unwrap()
            .conjugate("omegabar"),
    ];
    let report = spectrum_union_check(
        &sym,
        &irr,
        0.05,
        15.0,
        3000,
        AssemblyOptions::default(),
        1e-6,
    )
    .unwrap();
    println!("full: {:?}", report.full);
    for (l, r) in &report.quotients {
        println!("{l}: {:?}", r);
    }
    assert!(
        report.consistent,
        "unmatched {:?}",
        report.unmatched_quotient
    );
    assert!(report.max_rel_deviation < 1e-9);
}

#[test]
fn stress_spring_center_star() {
    // spring at the interior joint of the planar star
    let star = models::planar_star_default::<f64>();
    let mut vertices = star.vertices().to_vec();
    vertices[0].joint = JointKind::Spring {
        alpha: 0.6,
        beta: 0.4,
    };
    let frame = Frame::from_parts(vertices, star.edges().to_vec());
    let asm = SecularAssembly::new(frame.clone());
    let roots = asm.eigenvalues(0.5, 30.0, 3000).unwrap();
    let sec: Vec<f64> = roots
        .iter()
        .flat_map(|r| std::iter::repeat(r.lambda).take(r.nullity))
        .collect();
    let sys = assemble_fem(&frame, 24);
    let pairs = solve_fem(&sys, 8).unwrap();
    for (i, p) in pairs.iter().enumerate().take(5) {
        let rel = (p.lambda - sec[i]).abs() / sec[i];
        println!("fem {i}: {:.6} vs {:.6} rel {rel:.2e}", p.lambda, sec[i]);
        assert!(rel < 5e-3, "eigenvalue {i}");
    }
}

fn prism() -> Frame<f64> {
    let r = |s: u32| {
        let th = 2.0 * std::f64::consts::PI * s as f64 / 3.0;
        Vector3::new(th.cos(), th.sin(), 0.0)
    };
    let mut b = Frame::<f64>::builder();
    for s in 0..3u32 {
        b = b.vertex(s, r(s), JointKind::Clamped).vertex(
            s + 3,
            r(s) + Vector3::new(0.0, 0.0, 1.2),
            JointKind::FreeRigid,
        );
    }
    // verticals 0..3, bottom triangle 3..6, top triangle 6..9
    for s in 0..3u32 {
        b = b.edge(s, s, s + 3, MaterialParams::unit());
    }
    for s in 0..3u32 {
        b = b.edge(3 + s, s, (s + 1) % 3, MaterialParams::unit());
    }
    for s in 0..3u32 {
        b = b.edge(6 + s, 3 + s, 3 + (s + 1) % 3, MaterialParams::unit());
    }
    b.build().unwrap()
}

#[test]
fn prism_c3_quotients_partition_the_spectrum() {
    let frame = prism();
    assert!(framespec_core::geometry::validate_frame(&frame, 1e-12).is_valid());
    let rot = rodrigues(&Vector3::z(), 2.0 * std::f64::consts::PI / 3.0).unwrap();
    let perm = vec![1, 2, 0, 4, 5, 3, 7, 8, 6];
    let sym = FrameSymmetry::build(&frame, &[("R".to_string(), rot, perm)], 1e-9).unwrap();
    println!("group order {}", sym.order());
    let one = Complex::new(1.0, 0.0);
    let omega = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let irr = vec![
        IrrepSpec::from_generators(&sym, "c3-trivial", &[("R".into(), one)]).unwrap(),
        IrrepSpec::from_generators(&sym, "omega", &[("R".into(), omega)]).unwrap(),
        IrrepSpec::from_generators(&sym, "omega", &[("R".into(), omega)])
            .unwrap()
            .conjugate("omegabar"),
    ];
    let full = SecularAssembly::new(frame.clone());
    println!("full size {}x{}", full.row_count(), full.unknowns());
    let report =
        spectrum_union_check(&sym, &irr, 0.2, 5.0, 1000, AssemblyOptions::default(), 1e-6).unwrap();
    println!("full: {:?}", report.full);
    for (l, r) in &report.quotients {
        println!("{l}: {:?}", r);
    }
    println!(
        "max dev {:.2e} consistent {}",
        report.max_rel_deviation, report.consistent
    );
    assert!(
        report.consistent,
        "unmatched {:?}",
        report.unmatched_quotient
    );
    assert!(report.max_rel_deviation < 1e-8);
}

#[test]
fn rotating_section_with_unequal_bending_stiffness_is_rejected() {
    // verticals whose section bases rotate under the group need a == b;
    // otherwise the energy is not invariant and the build must say so
    use framespec_core::error::Error;
    let r = |s: u32| {
        let th = 2.0 * std::f64::consts::PI * s as f64 / 3.0;
        Vector3::new(th.cos(), th.sin(), 0.0)
    };
    let mut b = Frame::<f64>::builder();
    for s in 0..3u32 {
        b = b.vertex(s, r(s), JointKind::Clamped).vertex(
            s + 3,
            r(s) + Vector3::new(0.0, 0.0, 1.2),
            JointKind::FreeRigid,
        );
    }
    let aniso = MaterialParams::new(1.0, 2.0, 1.0, 1.0);
    for s in 0..3u32 {
        b = b.edge(s, s, s + 3, aniso);
    }
    for s in 0..3u32 {
        b = b.edge(3 + s, s, (s + 1) % 3, MaterialParams::unit());
    }
    for s in 0..3u32 {
        b = b.edge(6 + s, 3 + s, 3 + (s + 1) % 3, MaterialParams::unit());
    }
    let frame = b.build().unwrap();
    let rot = rodrigues(&Vector3::z(), 2.0 * std::f64::consts::PI / 3.0).unwrap();
    let perm = vec![1, 2, 0, 4, 5, 3, 7, 8, 6];
    let result = FrameSymmetry::build(&frame, &[("R".to_string(), rot, perm)], 1e-9);
    assert!(matches!(result, Err(Error::BadSymmetry { .. })));
}

#[test]
fn tower_needs_equal_vertical_bending_stiffnesses() {
    use framespec_core::error::Error;
    let top = MaterialParams::new(0.8, 0.9, 1.0, 1.0); // a0 != b0
    let frame = models::antenna_tower_with(
        std::f64::consts::FRAC_PI_6,
        [1.0, 1.0],
        MaterialParams::unit(),
        top,
    );
    let result = FrameSymmetry::build(&frame, &models::tower_symmetry_generators(), 1e-9);
    assert!(matches!(result, Err(Error::BadSymmetry { .. })));
}
