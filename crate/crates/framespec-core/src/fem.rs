//! Independent finite-element discretization of the frame energy form,
//! used as an oracle for the secular pipeline and for eigenvalue counting.
//!
//! Bending fields use Hermite cubic elements (value + slope nodes, C1 across
//! element boundaries), axial and torsion fields linear elements (C0). Every
//! structural joint carries 6 global degrees of freedom: the displacement
//! vector and the linearized rotation vector in global coordinates. An
//! incident edge's endpoint traces are projections of those vectors onto its
//! material triad, which builds the rigid-joint coupling into the mesh
//! exactly. The Gram matrix is the plain L2 inner product of the four fields
//! with unit weight, so the discrete problem targets the same operator as the
//! secular method (no physical mass weighting).

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::fields::{EdgeField, FieldEval};
use crate::geometry::{spring_coefficient, Frame, JointKind, SpringCoefficient};
use crate::linalg;
use crate::scalar::{lit, to_f64, Real};

/// Global degree-of-freedom table of a frame mesh.
#[derive(Debug, Clone)]
pub struct DofMap {
    /// Base index of the 3 displacement DOFs of each vertex, if present.
    pub joint_disp: Vec<Option<usize>>,
    /// Base index of the 3 rotation DOFs of each vertex, if present.
    pub joint_rot: Vec<Option<usize>>,
    /// Base index of each edge's interior-node block.
    pub interior_base: Vec<usize>,
    /// Elements per edge.
    pub elements: Vec<usize>,
    pub total: usize,
}

/// Interior-node component order: `[v, v', w, w', u, eta]`.
pub const NODE_COMPONENTS: usize = 6;

/// Stiffness and Gram matrices of the discretized frame.
#[derive(Debug, Clone)]
pub struct FemSystem<T: Real> {
    pub k: DMatrix<T>,
    pub g: DMatrix<T>,
    pub dofs: DofMap,
    frame: Frame<T>,
}

/// One generalized eigenpair of the discrete problem.
#[derive(Debug, Clone)]
pub struct FemEigenpair<T: Real> {
    pub lambda: T,
    pub vector: DVector<T>,
}

fn hermite_stiffness<T: Real>(h: T) -> Matrix4<T> {
    let t = |x: f64| lit::<T>(x);
    let h2 = h * h;
    let h3 = h2 * h;
    Matrix4::new(
        t(12.0),
        t(6.0) * h,
        t(-12.0),
        t(6.0) * h,
        t(6.0) * h,
        t(4.0) * h2,
        t(-6.0) * h,
        t(2.0) * h2,
        t(-12.0),
        t(-6.0) * h,
        t(12.0),
        t(-6.0) * h,
        t(6.0) * h,
        t(2.0) * h2,
        t(-6.0) * h,
        t(4.0) * h2,
    ) / h3
}

fn hermite_mass<T: Real>(h: T) -> Matrix4<T> {
    let t = |x: f64| lit::<T>(x);
    let h2 = h * h;
    Matrix4::new(
        t(156.0),
        t(22.0) * h,
        t(54.0),
        t(-13.0) * h,
        t(22.0) * h,
        t(4.0) * h2,
        t(13.0) * h,
        t(-3.0) * h2,
        t(54.0),
        t(13.0) * h,
        t(156.0),
        t(-22.0) * h,
        t(-13.0) * h,
        t(-3.0) * h2,
        t(-22.0) * h,
        t(4.0) * h2,
    ) * (h / t(420.0))
}

fn linear_stiffness<T: Real>(h: T) -> Matrix2<T> {
    Matrix2::new(T::one(), -T::one(), -T::one(), T::one()) / h
}

fn linear_mass<T: Real>(h: T) -> Matrix2<T> {
    let t = |x: f64| lit::<T>(x);
    Matrix2::new(t(2.0), t(1.0), t(1.0), t(2.0)) * (h / t(6.0))
}

fn build_dof_map<T: Real>(frame: &Frame<T>, elements_per_edge: usize, spring_tol: T) -> DofMap {
    let mut joint_disp = Vec::with_capacity(frame.vertices().len());
    let mut joint_rot = Vec::with_capacity(frame.vertices().len());
    let mut total = 0;
    for v in frame.vertices() {
        let (disp, rot) = match v.joint {
            JointKind::FreeRigid => (true, true),
            JointKind::Clamped => (false, false),
            JointKind::Pinned => (false, true),
            JointKind::Guided => (true, false),
            JointKind::Spring { alpha, beta } => (
                !matches!(
                    spring_coefficient(alpha, spring_tol),
                    SpringCoefficient::Dirichlet
                ),
                !matches!(
                    spring_coefficient(beta, spring_tol),
                    SpringCoefficient::Dirichlet
                ),
            ),
        };
        joint_disp.push(disp.then(|| {
            let b = total;
            total += 3;
            b
        }));
        joint_rot.push(rot.then(|| {
            let b = total;
            total += 3;
            b
        }));
    }
    let mut interior_base = Vec::with_capacity(frame.edges().len());
    let mut elements = Vec::with_capacity(frame.edges().len());
    for _ in frame.edges() {
        interior_base.push(total);
        elements.push(elements_per_edge);
        total += (elements_per_edge - 1) * NODE_COMPONENTS;
    }
    DofMap {
        joint_disp,
        joint_rot,
        interior_base,
        elements,
        total,
    }
}

impl<T: Real> FemSystem<T> {
    pub fn frame(&self) -> &Frame<T> {
        &self.frame
    }

    /// Global `(index, weight)` pairs realizing each local component
    /// `[v, v', w, w', u, eta]` at a node of an edge. Endpoint nodes project
    /// the joint's displacement/rotation vectors onto the edge triad; interior
    /// nodes carry their own DOFs.
    pub fn node_map(&self, edge_idx: usize, node: usize) -> [Vec<(usize, T)>; 6] {
        let frame = &self.frame;
        let edge = &frame.edges()[edge_idx];
        let n = self.dofs.elements[edge_idx];
        let mut out: [Vec<(usize, T)>; 6] = Default::default();
        if node > 0 && node < n {
            let base = self.dofs.interior_base[edge_idx] + (node - 1) * NODE_COMPONENTS;
            for (c, slot) in out.iter_mut().enumerate() {
                slot.push((base + c, T::one()));
            }
            return out;
        }
        let vid = if node == 0 {
            edge.origin
        } else {
            edge.terminus
        };
        let vi = frame.vertex_idx(vid).expect("endpoint vertex");
        let t = &edge.triad;
        if let Some(gd) = self.dofs.joint_disp[vi] {
            // v = k.g, w = j.g, u = i.g
            for (comp, dir) in [(0usize, t.k), (2, t.j), (4, t.i)] {
                for ax in 0..3 {
                    if dir[ax] != T::zero() {
                        out[comp].push((gd + ax, dir[ax]));
                    }
                }
            }
        }
        if let Some(gr) = self.dofs.joint_rot[vi] {
            // eta = i.omega, v' = -j.omega, w' = k.omega
            for (comp, dir, sign) in [
                (5usize, t.i, T::one()),
                (1, t.j, -T::one()),
                (3, t.k, T::one()),
            ] {
                for ax in 0..3 {
                    let w = dir[ax] * sign;
                    if w != T::zero() {
                        out[comp].push((gr + ax, w));
                    }
                }
            }
        }
        out
    }
}

/// Assemble stiffness and Gram matrices with `elements_per_edge` elements on
/// every edge.
pub fn assemble_fem<T: Real>(frame: &Frame<T>, elements_per_edge: usize) -> FemSystem<T> {
    assert!(elements_per_edge >= 1, "need at least one element per edge");
    let spring_tol = lit::<T>(1e-12);
    let dofs = build_dof_map(frame, elements_per_edge, spring_tol);
    let mut sys = FemSystem {
        k: DMatrix::zeros(dofs.total, dofs.total),
        g: DMatrix::zeros(dofs.total, dofs.total),
        dofs,
        frame: frame.clone(),
    };

    for (ei, edge) in frame.edges().iter().enumerate() {
        let n = sys.dofs.elements[ei];
        let h = edge.length / lit::<T>(n as f64);
        let ks_b = hermite_stiffness(h);
        let gm_b = hermite_mass(h);
        let ks_r = linear_stiffness(h);
        let gm_r = linear_mass(h);
        for el in 0..n {
            let m0 = sys.node_map(ei, el);
            let m1 = sys.node_map(ei, el + 1);
            // bending blocks: local order [f0, f0', f1, f1']
            for (f_lo, stiff) in [(0usize, edge.materials.a), (2, edge.materials.b)] {
                let locs = [&m0[f_lo], &m0[f_lo + 1], &m1[f_lo], &m1[f_lo + 1]];
                scatter4(&mut sys.k, &locs, &(ks_b * stiff));
                scatter4(&mut sys.g, &locs, &gm_b);
            }
            // rod blocks: local order [f0, f1]
            for (comp, stiff) in [(4usize, edge.materials.c), (5, edge.materials.d)] {
                let locs = [&m0[comp], &m1[comp]];
                scatter2(&mut sys.k, &locs, &(ks_r * stiff));
                scatter2(&mut sys.g, &locs, &gm_r);
            }
        }
    }

    // vertex spring energy: tan(alpha) |g|^2 + tan(beta) |omega|^2 on the
    // joint blocks (the pi/2 branches removed the DOFs instead)
    for (vi, v) in frame.vertices().iter().enumerate() {
        if let JointKind::Spring { alpha, beta } = v.joint {
            if let (SpringCoefficient::Finite { tan }, Some(gd)) = (
                spring_coefficient(alpha, spring_tol),
                sys.dofs.joint_disp[vi],
            ) {
                for ax in 0..3 {
                    sys.k[(gd + ax, gd + ax)] += tan;
                }
            }
            if let (SpringCoefficient::Finite { tan }, Some(gr)) =
                (spring_coefficient(beta, spring_tol), sys.dofs.joint_rot[vi])
            {
                for ax in 0..3 {
                    sys.k[(gr + ax, gr + ax)] += tan;
                }
            }
        }
    }
    sys
}

fn scatter4<T: Real>(m: &mut DMatrix<T>, locs: &[&Vec<(usize, T)>; 4], elem: &Matrix4<T>) {
    for (li, gi) in locs.iter().enumerate() {
        for (lj, gj) in locs.iter().enumerate() {
            for &(r, wr) in gi.iter() {
                for &(c, wc) in gj.iter() {
                    m[(r, c)] += wr * wc * elem[(li, lj)];
                }
            }
        }
    }
}

fn scatter2<T: Real>(m: &mut DMatrix<T>, locs: &[&Vec<(usize, T)>; 2], elem: &Matrix2<T>) {
    for (li, gi) in locs.iter().enumerate() {
        for (lj, gj) in locs.iter().enumerate() {
            for &(r, wr) in gi.iter() {
                for &(c, wc) in gj.iter() {
                    m[(r, c)] += wr * wc * elem[(li, lj)];
                }
            }
        }
    }
}

/// Lowest `count` generalized eigenpairs `K x = lambda G x`, ascending.
pub fn solve_fem<T: Real>(system: &FemSystem<T>, count: usize) -> Result<Vec<FemEigenpair<T>>> {
    let pairs = linalg::sym_generalized_eigen_lowest(&system.k, &system.g, count, lit(3e-9))?;
    Ok(pairs
        .into_iter()
        .map(|(lambda, vector)| FemEigenpair { lambda, vector })
        .collect())
}

/// Number of discrete eigenvalues in `(0, lambda_max]`, for missed-root
/// defense of the secular scan.
pub fn count_eigenvalues_below<T: Real>(system: &FemSystem<T>, lambda_max: T) -> Result<usize> {
    let n = system.k.nrows();
    let mut request = 16.min(n);
    loop {
        let pairs = solve_fem(system, request)?;
        let above = pairs.iter().any(|p| p.lambda > lambda_max);
        if above || request == n {
            let floor = lit::<T>(1e-9);
            return Ok(pairs
                .iter()
                .filter(|p| p.lambda > floor && p.lambda <= lambda_max)
                .count());
        }
        request = (request * 2).min(n);
    }
}

/// Borrowed eigenvector interpreted as an edge field (C1 bending, C0 rods).
pub struct FemField<'a, T: Real> {
    system: &'a FemSystem<T>,
    vector: &'a DVector<T>,
}

impl<'a, T: Real> FemField<'a, T> {
    pub fn new(system: &'a FemSystem<T>, vector: &'a DVector<T>) -> Self {
        FemField { system, vector }
    }
}

impl<T: Real> EdgeField<T> for FemField<'_, T> {
    fn eval(&self, edge_idx: usize, x: T) -> FieldEval<T> {
        self.system
            .evaluate(self.vector, edge_idx, x)
            .expect("in-range evaluation")
    }

    fn operator_smooth(&self) -> bool {
        false
    }
}

impl<T: Real> FemSystem<T> {
    /// Evaluate the fields of a coefficient vector at `x` on an edge.
    /// Derivatives available: order 3 for bending (element-wise), 1 for rods.
    pub fn evaluate(&self, vector: &DVector<T>, edge_idx: usize, x: T) -> Result<FieldEval<T>> {
        let edge = &self.frame.edges()[edge_idx];
        if x < T::zero() || x > edge.length {
            return Err(Error::OutOfRange {
                x: to_f64(x),
                len: to_f64(edge.length),
            });
        }
        let n = self.dofs.elements[edge_idx];
        let h = edge.length / lit::<T>(n as f64);
        let mut el = to_f64(x / h).floor() as usize;
        if el >= n {
            el = n - 1;
        }
        let xi = x / h - lit::<T>(el as f64);
        let value = |map: &Vec<(usize, T)>| -> T {
            map.iter()
                .fold(T::zero(), |acc, &(g, w)| acc + vector[g] * w)
        };
        let m0 = self.node_map(edge_idx, el);
        let m1 = self.node_map(edge_idx, el + 1);

        let t = |v: f64| lit::<T>(v);
        let one = T::one();
        let (x2, x3) = (xi * xi, xi * xi * xi);
        // Hermite shapes and derivatives in xi; x-derivatives divide by h^order
        let shapes = [
            [
                one - t(3.0) * x2 + t(2.0) * x3,
                (xi - t(2.0) * x2 + x3) * h,
                t(3.0) * x2 - t(2.0) * x3,
                (x3 - x2) * h,
            ],
            [
                -t(6.0) * xi + t(6.0) * x2,
                (one - t(4.0) * xi + t(3.0) * x2) * h,
                t(6.0) * xi - t(6.0) * x2,
                (t(3.0) * x2 - t(2.0) * xi) * h,
            ],
            [
                -t(6.0) + t(12.0) * xi,
                (-t(4.0) + t(6.0) * xi) * h,
                t(6.0) - t(12.0) * xi,
                (t(6.0) * xi - t(2.0)) * h,
            ],
            [t(12.0), t(6.0) * h, -t(12.0), t(6.0) * h],
        ];
        let mut out = FieldEval::zero();
        for (field, lo) in [(0usize, 0usize), (1, 2)] {
            let nodal = [
                value(&m0[lo]),
                value(&m0[lo + 1]),
                value(&m1[lo]),
                value(&m1[lo + 1]),
            ];
            for order in 0..4 {
                let mut acc = T::zero();
                for c in 0..4 {
                    acc += shapes[order][c] * nodal[c];
                }
                let scaled = acc / h.powi(order as i32);
                if field == 0 {
                    out.v[order] = scaled;
                } else {
                    out.w[order] = scaled;
                }
            }
        }
        for (field, comp) in [(0usize, 4usize), (1, 5)] {
            let nodal = [value(&m0[comp]), value(&m1[comp])];
            let val = nodal[0] * (one - xi) + nodal[1] * xi;
            let der = (nodal[1] - nodal[0]) / h;
            if field == 0 {
                out.u[0] = val;
                out.u[1] = der;
            } else {
                out.eta[0] = val;
                out.eta[1] = der;
            }
        }
        Ok(out)
    }
}
