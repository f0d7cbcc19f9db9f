//! Joint condition rows: linear functionals on the endpoint traces of the
//! edges incident to a vertex.
//!
//! Two families of rows exist. Continuity rows state that all incident beams
//! share one displacement vector and one rotation vector at the joint;
//! balance rows state that the forces and moments the beams exert on the
//! joint cancel (possibly against a vertex spring). Dirichlet rows pin the
//! displacement or rotation to zero for clamped/pinned/guided kinds. All
//! vector equations are emitted per projection axis, by default the global
//! coordinate axes.

use nalgebra::{ComplexField, DMatrix, Vector3};

use crate::error::{Error, Result};
use crate::fields::EdgeField;
use crate::geometry::{spring_coefficient, Endpoint, Frame, JointKind, SpringCoefficient, Triad};
use crate::quadrature;
use crate::scalar::{lit, Real};

/// Indices into the 12-component endpoint trace.
pub mod trace {
    pub const V: usize = 0;
    pub const VP: usize = 1;
    pub const VPP: usize = 2;
    pub const VPPP: usize = 3;
    pub const W: usize = 4;
    pub const WP: usize = 5;
    pub const WPP: usize = 6;
    pub const WPPP: usize = 7;
    pub const U: usize = 8;
    pub const UP: usize = 9;
    pub const ETA: usize = 10;
    pub const ETAP: usize = 11;
}

/// One coefficient of a condition row.
#[derive(Debug, Clone, Copy)]
pub struct RowTerm<T: Real> {
    pub edge: usize,
    pub end: Endpoint,
    pub comp: usize,
    pub coeff: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    DisplacementContinuity,
    RotationContinuity,
    ForceBalance,
    MomentBalance,
    DisplacementDirichlet,
    RotationDirichlet,
}

/// A single scalar condition on the traces at one vertex.
#[derive(Debug, Clone)]
pub struct ConditionRow<T: Real> {
    pub vertex: usize,
    pub kind: RowKind,
    /// Index of the projection axis the vector equation was projected onto.
    pub axis: usize,
    /// For continuity rows, `(edge, reference edge)` indices.
    pub pair: Option<(usize, usize)>,
    pub terms: Vec<RowTerm<T>>,
}

impl<T: Real> ConditionRow<T> {
    /// Apply the row to per-edge trace vectors (12 components per endpoint).
    pub fn apply<F: Fn(usize, Endpoint, usize) -> T>(&self, trace: F) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| {
            acc + t.coeff * trace(t.edge, t.end, t.comp)
        })
    }
}

/// Projection axes for the two vector-equation families.
#[derive(Debug, Clone)]
pub struct RowPlan<T: Real> {
    pub disp_axes: Vec<Vector3<T>>,
    pub rot_axes: Vec<Vector3<T>>,
}

impl<T: Real> RowPlan<T> {
    /// Global coordinate axes for both families (the default 3D assembly).
    pub fn global() -> Self {
        let axes = vec![Vector3::x(), Vector3::y(), Vector3::z()];
        RowPlan {
            disp_axes: axes.clone(),
            rot_axes: axes,
        }
    }

    /// Axes of a local triad (used by symmetry quotients, where conditions are
    /// expressed in the representative edge's coordinates).
    pub fn local(triad: &Triad<T>) -> Self {
        let axes = vec![triad.i, triad.j, triad.k];
        RowPlan {
            disp_axes: axes.clone(),
            rot_axes: axes,
        }
    }

    /// Out-of-plane block of a planar frame with normal `k`: displacement
    /// equations along `k`, rotation equations in the plane.
    pub fn out_of_plane(normal: Vector3<T>, p1: Vector3<T>, p2: Vector3<T>) -> Self {
        RowPlan {
            disp_axes: vec![normal],
            rot_axes: vec![p1, p2],
        }
    }

    /// In-plane block: displacement equations in the plane, rotation along `k`.
    pub fn in_plane(normal: Vector3<T>, p1: Vector3<T>, p2: Vector3<T>) -> Self {
        RowPlan {
            disp_axes: vec![p1, p2],
            rot_axes: vec![normal],
        }
    }
}

fn push_displacement_terms<T: Real>(
    terms: &mut Vec<RowTerm<T>>,
    edge: usize,
    end: Endpoint,
    triad: &Triad<T>,
    axis: &Vector3<T>,
    sign: T,
) {
    for (comp, dir) in [
        (trace::U, triad.i),
        (trace::W, triad.j),
        (trace::V, triad.k),
    ] {
        let coeff = dir.dot(axis) * sign;
        if coeff != T::zero() {
            terms.push(RowTerm {
                edge,
                end,
                comp,
                coeff,
            });
        }
    }
}

fn push_rotation_terms<T: Real>(
    terms: &mut Vec<RowTerm<T>>,
    edge: usize,
    end: Endpoint,
    triad: &Triad<T>,
    axis: &Vector3<T>,
    sign: T,
) {
    for (comp, dir, s) in [
        (trace::ETA, triad.i, T::one()),
        (trace::VP, triad.j, -T::one()),
        (trace::WP, triad.k, T::one()),
    ] {
        let coeff = dir.dot(axis) * s * sign;
        if coeff != T::zero() {
            terms.push(RowTerm {
                edge,
                end,
                comp,
                coeff,
            });
        }
    }
}

/// Continuity rows for explicit `(edge, reference)` pairs incident at a vertex:
/// the displacement and rotation vectors of `edge` minus those of `reference`,
/// projected on the plan's axes.
pub fn continuity_rows<T: Real>(
    frame: &Frame<T>,
    vertex_idx: usize,
    pairs: &[(usize, usize)],
    plan: &RowPlan<T>,
) -> Vec<ConditionRow<T>> {
    let end_of = |edge: usize| {
        frame
            .incident(vertex_idx)
            .iter()
            .find(|(e, _)| *e == edge)
            .map(|&(_, end)| end)
            .expect("edge incident to vertex")
    };
    let mut rows = Vec::new();
    for &(e, r) in pairs {
        let (te, tr) = (&frame.edges()[e].triad, &frame.edges()[r].triad);
        let (ee, er) = (end_of(e), end_of(r));
        for (axis_idx, axis) in plan.disp_axes.iter().enumerate() {
            let mut terms = Vec::new();
            push_displacement_terms(&mut terms, e, ee, te, axis, T::one());
            push_displacement_terms(&mut terms, r, er, tr, axis, -T::one());
            rows.push(ConditionRow {
                vertex: vertex_idx,
                kind: RowKind::DisplacementContinuity,
                axis: axis_idx,
                pair: Some((e, r)),
                terms,
            });
        }
        for (axis_idx, axis) in plan.rot_axes.iter().enumerate() {
            let mut terms = Vec::new();
            push_rotation_terms(&mut terms, e, ee, te, axis, T::one());
            push_rotation_terms(&mut terms, r, er, tr, axis, -T::one());
            rows.push(ConditionRow {
                vertex: vertex_idx,
                kind: RowKind::RotationContinuity,
                axis: axis_idx,
                pair: Some((e, r)),
                terms,
            });
        }
    }
    rows
}

/// Standard continuity pairing: every incident edge against the lowest-index
/// incident edge.
pub fn standard_pairs<T: Real>(frame: &Frame<T>, vertex_idx: usize) -> Vec<(usize, usize)> {
    let inc = frame.incident(vertex_idx);
    if inc.is_empty() {
        return Vec::new();
    }
    let reference = inc[0].0;
    inc[1..].iter().map(|&(e, _)| (e, reference)).collect()
}

/// Force- and moment-balance rows at a vertex. For `Spring` joints the rows
/// carry the vertex-energy weights (stored as tangents; `pi/2` switches to the
/// Dirichlet branch). `spring_tol` decides when an angle counts as `pi/2`.
pub fn balance_rows<T: Real>(
    frame: &Frame<T>,
    vertex_idx: usize,
    plan: &RowPlan<T>,
    spring_tol: T,
) -> Vec<ConditionRow<T>> {
    let (alpha, beta) = match frame.vertices()[vertex_idx].joint {
        JointKind::Spring { alpha, beta } => (
            spring_coefficient(alpha, spring_tol),
            spring_coefficient(beta, spring_tol),
        ),
        _ => (
            SpringCoefficient::Finite { tan: T::zero() },
            SpringCoefficient::Finite { tan: T::zero() },
        ),
    };
    let mut rows = Vec::new();
    rows.extend(force_rows(frame, vertex_idx, plan, alpha));
    rows.extend(moment_rows(frame, vertex_idx, plan, beta));
    rows
}

fn force_rows<T: Real>(
    frame: &Frame<T>,
    vertex_idx: usize,
    plan: &RowPlan<T>,
    spring: SpringCoefficient<T>,
) -> Vec<ConditionRow<T>> {
    let inc = frame.incident(vertex_idx);
    let reference = inc[0];
    let mut rows = Vec::new();
    for (axis_idx, axis) in plan.disp_axes.iter().enumerate() {
        let mut terms = Vec::new();
        match spring {
            SpringCoefficient::Dirichlet => {
                // fixed displacement: g = 0, taken on the reference edge (the
                // continuity rows transport it to the others)
                let t = &frame.edges()[reference.0].triad;
                push_displacement_terms(&mut terms, reference.0, reference.1, t, axis, T::one());
                rows.push(ConditionRow {
                    vertex: vertex_idx,
                    kind: RowKind::DisplacementDirichlet,
                    axis: axis_idx,
                    pair: None,
                    terms,
                });
                continue;
            }
            SpringCoefficient::Finite { tan } => {
                // natural condition of the vertex energy: the balance sum
                // equals tan(alpha) times the joint displacement
                if tan != T::zero() {
                    let t = &frame.edges()[reference.0].triad;
                    push_displacement_terms(&mut terms, reference.0, reference.1, t, axis, -tan);
                }
            }
        }
        for &(e, end) in inc {
            let edge = &frame.edges()[e];
            let s = lit::<T>(end.incidence_sign() as f64);
            for (comp, dir, weight) in [
                (trace::UP, edge.triad.i, edge.materials.c),
                (trace::WPPP, edge.triad.j, -edge.materials.b),
                (trace::VPPP, edge.triad.k, -edge.materials.a),
            ] {
                let coeff = dir.dot(axis) * weight * s;
                if coeff != T::zero() {
                    terms.push(RowTerm {
                        edge: e,
                        end,
                        comp,
                        coeff,
                    });
                }
            }
        }
        rows.push(ConditionRow {
            vertex: vertex_idx,
            kind: RowKind::ForceBalance,
            axis: axis_idx,
            pair: None,
            terms,
        });
    }
    rows
}

fn moment_rows<T: Real>(
    frame: &Frame<T>,
    vertex_idx: usize,
    plan: &RowPlan<T>,
    spring: SpringCoefficient<T>,
) -> Vec<ConditionRow<T>> {
    let inc = frame.incident(vertex_idx);
    let reference = inc[0];
    let mut rows = Vec::new();
    for (axis_idx, axis) in plan.rot_axes.iter().enumerate() {
        let mut terms = Vec::new();
        match spring {
            SpringCoefficient::Dirichlet => {
                let t = &frame.edges()[reference.0].triad;
                push_rotation_terms(&mut terms, reference.0, reference.1, t, axis, T::one());
                rows.push(ConditionRow {
                    vertex: vertex_idx,
                    kind: RowKind::RotationDirichlet,
                    axis: axis_idx,
                    pair: None,
                    terms,
                });
                continue;
            }
            SpringCoefficient::Finite { tan } => {
                if tan != T::zero() {
                    let t = &frame.edges()[reference.0].triad;
                    push_rotation_terms(&mut terms, reference.0, reference.1, t, axis, -tan);
                }
            }
        }
        for &(e, end) in inc {
            let edge = &frame.edges()[e];
            let s = lit::<T>(end.incidence_sign() as f64);
            for (comp, dir, weight) in [
                (trace::ETAP, edge.triad.i, edge.materials.d),
                (trace::VPP, edge.triad.j, -edge.materials.a),
                (trace::WPP, edge.triad.k, edge.materials.b),
            ] {
                let coeff = dir.dot(axis) * weight * s;
                if coeff != T::zero() {
                    terms.push(RowTerm {
                        edge: e,
                        end,
                        comp,
                        coeff,
                    });
                }
            }
        }
        rows.push(ConditionRow {
            vertex: vertex_idx,
            kind: RowKind::MomentBalance,
            axis: axis_idx,
            pair: None,
            terms,
        });
    }
    rows
}

/// Dirichlet rows pinning displacement and/or rotation of every incident edge.
pub fn dirichlet_rows<T: Real>(
    frame: &Frame<T>,
    vertex_idx: usize,
    plan: &RowPlan<T>,
    displacement: bool,
    rotation: bool,
) -> Vec<ConditionRow<T>> {
    let mut rows = Vec::new();
    for &(e, end) in frame.incident(vertex_idx) {
        let t = &frame.edges()[e].triad;
        if displacement {
            for (axis_idx, axis) in plan.disp_axes.iter().enumerate() {
                let mut terms = Vec::new();
                push_displacement_terms(&mut terms, e, end, t, axis, T::one());
                rows.push(ConditionRow {
                    vertex: vertex_idx,
                    kind: RowKind::DisplacementDirichlet,
                    axis: axis_idx,
                    pair: None,
                    terms,
                });
            }
        }
        if rotation {
            for (axis_idx, axis) in plan.rot_axes.iter().enumerate() {
                let mut terms = Vec::new();
                push_rotation_terms(&mut terms, e, end, t, axis, T::one());
                rows.push(ConditionRow {
                    vertex: vertex_idx,
                    kind: RowKind::RotationDirichlet,
                    axis: axis_idx,
                    pair: None,
                    terms,
                });
            }
        }
    }
    rows
}

/// All condition rows of one vertex under the standard pairing.
pub fn vertex_rows<T: Real>(
    frame: &Frame<T>,
    vertex_idx: usize,
    plan: &RowPlan<T>,
    spring_tol: T,
) -> Vec<ConditionRow<T>> {
    vertex_rows_with_pairs(
        frame,
        vertex_idx,
        &standard_pairs(frame, vertex_idx),
        plan,
        spring_tol,
    )
}

/// Condition rows of one vertex with explicit continuity pairs (symmetry
/// quotients prune redundant pairs before calling this).
pub fn vertex_rows_with_pairs<T: Real>(
    frame: &Frame<T>,
    vertex_idx: usize,
    pairs: &[(usize, usize)],
    plan: &RowPlan<T>,
    spring_tol: T,
) -> Vec<ConditionRow<T>> {
    let mut rows = Vec::new();
    match frame.vertices()[vertex_idx].joint {
        JointKind::FreeRigid | JointKind::Spring { .. } => {
            rows.extend(continuity_rows(frame, vertex_idx, pairs, plan));
            rows.extend(balance_rows(frame, vertex_idx, plan, spring_tol));
        }
        JointKind::Clamped => {
            rows.extend(dirichlet_rows(frame, vertex_idx, plan, true, true));
        }
        JointKind::Pinned => {
            rows.extend(dirichlet_rows(frame, vertex_idx, plan, true, false));
            rows.extend(continuity_rows(
                frame,
                vertex_idx,
                pairs,
                &RowPlan {
                    disp_axes: Vec::new(),
                    rot_axes: plan.rot_axes.clone(),
                },
            ));
            rows.extend(moment_rows(
                frame,
                vertex_idx,
                plan,
                SpringCoefficient::Finite { tan: T::zero() },
            ));
        }
        JointKind::Guided => {
            rows.extend(dirichlet_rows(frame, vertex_idx, plan, false, true));
            rows.extend(continuity_rows(
                frame,
                vertex_idx,
                pairs,
                &RowPlan {
                    disp_axes: plan.disp_axes.clone(),
                    rot_axes: Vec::new(),
                },
            ));
            rows.extend(force_rows(
                frame,
                vertex_idx,
                plan,
                SpringCoefficient::Finite { tan: T::zero() },
            ));
        }
    }
    rows
}

/// Assemble rows against per-edge trace maps into a dense matrix.
///
/// `trace_maps[edge]` holds the `12 x n_e` maps at origin and terminus;
/// `offsets[edge]` is the first column of that edge's coefficient block.
pub fn rows_to_matrix<S, T>(
    rows: &[ConditionRow<T>],
    trace_maps: &[[DMatrix<T>; 2]],
    offsets: &[usize],
    total_cols: usize,
    row_weights: Option<&[S]>,
) -> DMatrix<S>
where
    T: Real,
    S: ComplexField<RealField = T>,
{
    let mut m = DMatrix::<S>::zeros(rows.len(), total_cols);
    for (ri, row) in rows.iter().enumerate() {
        let weight = row_weights.map_or_else(S::one, |w| w[ri].clone());
        for term in &row.terms {
            let tm = &trace_maps[term.edge][match term.end {
                Endpoint::Origin => 0,
                Endpoint::Terminus => 1,
            }];
            let base = offsets[term.edge];
            for c in 0..tm.ncols() {
                let add = S::from_real(term.coeff * tm[(term.comp, c)]) * weight.clone();
                m[(ri, base + c)] += add;
            }
        }
    }
    m
}

/// `|<a, H b> - <H a, b>|` over the frame by composite Gauss quadrature.
///
/// Vanishes (up to quadrature error) exactly when both fields satisfy the
/// joint conditions; fields violating them leave a boundary remainder.
pub fn greens_identity_residual<T: Real>(
    frame: &Frame<T>,
    a: &impl EdgeField<T>,
    b: &impl EdgeField<T>,
    panels: usize,
) -> Result<T> {
    if !a.operator_smooth() || !b.operator_smooth() {
        return Err(Error::NotOperatorSmooth);
    }
    let mut acc = T::zero();
    for (ei, edge) in frame.edges().iter().enumerate() {
        let m = &edge.materials;
        acc += quadrature::integrate(edge.length, panels, |x| {
            let fa = a.eval(ei, x);
            let fb = b.eval(ei, x);
            let h_b = m.a * fa.v[0] * fb.v[4] + m.b * fa.w[0] * fb.w[4]
                - m.c * fa.u[0] * fb.u[2]
                - m.d * fa.eta[0] * fb.eta[2];
            let h_a = m.a * fa.v[4] * fb.v[0] + m.b * fa.w[4] * fb.w[0]
                - m.c * fa.u[2] * fb.u[0]
                - m.d * fa.eta[2] * fb.eta[0];
            h_b - h_a
        });
    }
    Ok(acc.abs())
}
