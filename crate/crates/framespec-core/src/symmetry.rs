//! Finite-group symmetry reduction.
//!
//! A symmetry of a frame is an orthogonal transformation together with an
//! edge permutation mapping the frame onto itself. The induced action on
//! fields permutes edges, mixes the displacement components `(u, w, v)` by
//! the transformation expressed in the local triads, and transports the
//! torsion `eta` with the determinant sign (rotation vectors are
//! pseudovectors). One-dimensional irreducible representations yield
//! isotypic projectors and quotient assemblies: smaller secular problems over
//! representative-edge coefficients whose spectra partition the full spectrum.

use std::collections::BTreeMap;

use nalgebra::{ComplexField as _, DMatrix, Matrix3};
use num_complex::Complex;

use crate::conditions::{
    rows_to_matrix, vertex_rows, vertex_rows_with_pairs, ConditionRow, RowPlan,
};
use crate::edge_solutions::{trace_map, EdgeBasisSpec, FieldSelection};
use crate::error::{Error, Result};
use crate::fem::{FemSystem, NODE_COMPONENTS};
use crate::geometry::{Endpoint, Frame};
use crate::quadrature;
use crate::scalar::{lit, to_f64, Real};
use crate::secular::{endpoint_reductions, AssemblyOptions, SecularAssembly};

/// One group element: orthogonal matrix plus edge permutation, with derived
/// vertex permutation and per-edge component mixers.
#[derive(Debug, Clone)]
pub struct GroupElement<T: Real> {
    pub name: String,
    pub matrix: Matrix3<T>,
    /// `edge_perm[e]` is the image edge index.
    pub edge_perm: Vec<usize>,
    pub vertex_perm: Vec<usize>,
    /// Determinant sign of the matrix (`+1` rotation, `-1` reflection).
    pub det: T,
    /// Per edge `e`: the matrix of the transformation between the local
    /// triads of `e` and its image, in component order `(u, w, v)`.
    pub mixers: Vec<Matrix3<T>>,
}

impl<T: Real> GroupElement<T> {
    fn is_identity(&self, tol: T) -> bool {
        self.edge_perm.iter().enumerate().all(|(i, &p)| i == p)
            && (self.matrix - Matrix3::identity()).norm() < tol
    }

    fn same_as(&self, other: &Self, tol: T) -> bool {
        self.edge_perm == other.edge_perm && (self.matrix - other.matrix).norm() < tol
    }
}

/// A verified symmetry group of a frame.
#[derive(Debug, Clone)]
pub struct FrameSymmetry<T: Real> {
    frame: Frame<T>,
    elements: Vec<GroupElement<T>>,
    /// `table[g][h]` = index of the composition `g . h`.
    table: Vec<Vec<usize>>,
    generators: BTreeMap<String, usize>,
    /// Invariance violations found during construction (empty when strict).
    verification_errors: Vec<String>,
}

fn derive_element<T: Real>(
    frame: &Frame<T>,
    name: String,
    matrix: Matrix3<T>,
    edge_perm: Vec<usize>,
    errors: &mut Vec<String>,
    tol: T,
) -> Result<GroupElement<T>> {
    let ne = frame.edges().len();
    if edge_perm.len() != ne {
        return Err(Error::BadSymmetry {
            name,
            reason: format!(
                "edge permutation has {} entries, need {ne}",
                edge_perm.len()
            ),
        });
    }
    let mut seen = vec![false; ne];
    for &p in &edge_perm {
        if p >= ne || seen[p] {
            return Err(Error::BadSymmetry {
                name,
                reason: "edge map is not a permutation".into(),
            });
        }
        seen[p] = true;
    }

    // vertex permutation induced by the edge permutation (orientation must be
    // preserved: origins map to origins)
    let nv = frame.vertices().len();
    let mut vertex_perm = vec![usize::MAX; nv];
    for (e, &ei) in edge_perm.iter().enumerate() {
        let (src, dst) = (&frame.edges()[e], &frame.edges()[ei]);
        for (a, b) in [(src.origin, dst.origin), (src.terminus, dst.terminus)] {
            let (ai, bi) = (frame.vertex_idx(a)?, frame.vertex_idx(b)?);
            if vertex_perm[ai] != usize::MAX && vertex_perm[ai] != bi {
                return Err(Error::BadSymmetry {
                    name,
                    reason: format!("edge map induces conflicting images for vertex {a}"),
                });
            }
            vertex_perm[ai] = bi;
        }
    }
    for (vi, v) in vertex_perm.iter_mut().enumerate() {
        if *v == usize::MAX {
            *v = vi; // isolated vertex stays fixed
        }
    }

    let det = matrix.determinant();
    let ortho = (matrix * matrix.transpose() - Matrix3::identity()).norm();
    if ortho > tol {
        errors.push(format!(
            "{name}: matrix is not orthogonal (error {:.3e})",
            to_f64(ortho)
        ));
    }
    if (det.abs() - T::one()).abs() > tol {
        errors.push(format!("{name}: |det| = {} is not 1", to_f64(det)));
    }

    let scale = T::one() + frame.diameter();
    for (vi, v) in frame.vertices().iter().enumerate() {
        let image = &frame.vertices()[vertex_perm[vi]];
        let off = (matrix * v.position - image.position).norm();
        if off > tol * scale {
            errors.push(format!(
                "{name}: vertex {} maps {:.3e} away from vertex {}",
                v.id,
                to_f64(off),
                image.id
            ));
        }
        if std::mem::discriminant(&v.joint) != std::mem::discriminant(&image.joint) {
            errors.push(format!(
                "{name}: vertex {} joint kind differs from image vertex {}",
                v.id, image.id
            ));
        }
    }

    let mut mixers = Vec::with_capacity(ne);
    for (e, &ei) in edge_perm.iter().enumerate() {
        let (src, dst) = (&frame.edges()[e], &frame.edges()[ei]);
        if (src.length - dst.length).abs() > tol * scale {
            errors.push(format!(
                "{name}: edge {} length differs from image edge {}",
                src.id, dst.id
            ));
        }
        let (ms, md) = (&src.materials, &dst.materials);
        if (ms.a - md.a).abs() + (ms.b - md.b).abs() + (ms.c - md.c).abs() + (ms.d - md.d).abs()
            > tol
        {
            errors.push(format!(
                "{name}: edge {} materials differ from image edge {}",
                src.id, dst.id
            ));
        }
        let dirs_src = [src.triad.i, src.triad.j, src.triad.k];
        let dirs_dst = [dst.triad.i, dst.triad.j, dst.triad.k];
        let mut o = Matrix3::<T>::zeros();
        for r in 0..3 {
            for c in 0..3 {
                o[(r, c)] = dirs_dst[r].dot(&(matrix * dirs_src[c]));
            }
        }
        // axis must map to axis, same orientation
        if (o[(0, 0)] - T::one()).abs() > lit::<T>(1e-6) {
            errors.push(format!(
                "{name}: edge {} axis does not map onto the image axis (i'.Qi = {})",
                src.id,
                to_f64(o[(0, 0)])
            ));
        }
        // a section basis that rotates between edge and image couples the two
        // bending planes; the energy is only invariant when their stiffnesses
        // coincide
        let rotates = o[(1, 2)].abs() > lit::<T>(1e-9) || o[(2, 1)].abs() > lit::<T>(1e-9);
        if rotates && (ms.a - ms.b).abs() > tol {
            errors.push(format!(
                "{name}: edge {} section plane rotates onto edge {} but its bending stiffnesses differ (a != b)",
                src.id, dst.id
            ));
        }
        mixers.push(o);
    }

    Ok(GroupElement {
        name,
        matrix,
        edge_perm,
        vertex_perm,
        det: if det > T::zero() { T::one() } else { -T::one() },
        mixers,
    })
}

fn compose<T: Real>(
    frame: &Frame<T>,
    g: &GroupElement<T>,
    h: &GroupElement<T>,
    errors: &mut Vec<String>,
    tol: T,
) -> Result<GroupElement<T>> {
    let edge_perm: Vec<usize> = (0..h.edge_perm.len())
        .map(|e| g.edge_perm[h.edge_perm[e]])
        .collect();
    derive_element(
        frame,
        format!("{}.{}", g.name, h.name),
        g.matrix * h.matrix,
        edge_perm,
        errors,
        tol,
    )
}

impl<T: Real> FrameSymmetry<T> {
    /// Build and verify the group generated by named `(matrix, edge map)`
    /// pairs. Fails on any invariance violation.
    pub fn build(
        frame: &Frame<T>,
        generators: &[(String, Matrix3<T>, Vec<usize>)],
        tol: T,
    ) -> Result<Self> {
        let sym = Self::build_lenient(frame, generators, tol)?;
        if let Some(first) = sym.verification_errors.first() {
            return Err(Error::BadSymmetry {
                name: "group".into(),
                reason: first.clone(),
            });
        }
        Ok(sym)
    }

    /// Build the group structurally but only record invariance violations
    /// (used to demonstrate broken-symmetry behavior downstream).
    pub fn build_lenient(
        frame: &Frame<T>,
        generators: &[(String, Matrix3<T>, Vec<usize>)],
        tol: T,
    ) -> Result<Self> {
        let mut errors = Vec::new();
        let identity = derive_element(
            frame,
            "e".into(),
            Matrix3::identity(),
            (0..frame.edges().len()).collect(),
            &mut errors,
            tol,
        )?;
        let mut elements = vec![identity];
        let mut generator_indices = BTreeMap::new();
        for (name, matrix, perm) in generators {
            let el = derive_element(frame, name.clone(), *matrix, perm.clone(), &mut errors, tol)?;
            let idx = match elements.iter().position(|x| x.same_as(&el, lit(1e-8))) {
                Some(i) => i,
                None => {
                    elements.push(el);
                    elements.len() - 1
                }
            };
            generator_indices.insert(name.clone(), idx);
        }

        // closure
        let mut changed = true;
        while changed {
            changed = false;
            let current = elements.len();
            if current > 128 {
                return Err(Error::BadSymmetry {
                    name: "group".into(),
                    reason: "closure exceeds 128 elements".into(),
                });
            }
            for a in 0..current {
                for &b in generator_indices.values() {
                    let prod = compose(frame, &elements[a], &elements[b], &mut errors, tol)?;
                    if !elements.iter().any(|x| x.same_as(&prod, lit(1e-8))) {
                        let mut prod = prod;
                        if prod.is_identity(lit(1e-8)) {
                            prod.name = "e".into();
                        }
                        elements.push(prod);
                        changed = true;
                    }
                }
            }
        }

        // composition table
        let n = elements.len();
        let mut table = vec![vec![usize::MAX; n]; n];
        for a in 0..n {
            for b in 0..n {
                let prod = compose(frame, &elements[a], &elements[b], &mut Vec::new(), tol)?;
                let idx = elements
                    .iter()
                    .position(|x| x.same_as(&prod, lit(1e-8)))
                    .ok_or_else(|| Error::BadSymmetry {
                        name: "group".into(),
                        reason: "composition left the element set".into(),
                    })?;
                table[a][b] = idx;
            }
        }
        errors.dedup();
        Ok(FrameSymmetry {
            frame: frame.clone(),
            elements,
            table,
            generators: generator_indices,
            verification_errors: errors,
        })
    }

    pub fn frame(&self) -> &Frame<T> {
        &self.frame
    }

    pub fn elements(&self) -> &[GroupElement<T>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn verification_errors(&self) -> &[String] {
        &self.verification_errors
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.get(name).copied()
    }

    pub fn compose_indices(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }
}

/// A one-dimensional irreducible representation of (a subgroup of) the frame
/// symmetry group, given by unit characters on the subgroup elements.
#[derive(Debug, Clone)]
pub struct IrrepSpec<T: Real> {
    pub label: String,
    /// Element indices of the subgroup generated by the named generators.
    pub members: Vec<usize>,
    /// Character per member, aligned with `members`.
    pub chars: Vec<Complex<T>>,
}

impl<T: Real> IrrepSpec<T> {
    /// Extend generator characters to the generated subgroup, verifying the
    /// homomorphism property on the composition table.
    pub fn from_generators(
        sym: &FrameSymmetry<T>,
        label: &str,
        generator_chars: &[(String, Complex<T>)],
    ) -> Result<Self> {
        let tol = lit::<T>(1e-10);
        let mut char_of: BTreeMap<usize, Complex<T>> = BTreeMap::new();
        char_of.insert(0, Complex::new(T::one(), T::zero()));
        let mut gen_pairs = Vec::new();
        for (name, chi) in generator_chars {
            let idx = sym.generator_index(name).ok_or_else(|| Error::BadIrrep {
                label: label.into(),
                reason: format!("unknown generator {name}"),
            })?;
            if (chi.modulus() - T::one()).abs() > tol {
                return Err(Error::BadIrrep {
                    label: label.into(),
                    reason: format!("|chi({name})| differs from 1"),
                });
            }
            gen_pairs.push((idx, *chi));
        }
        let mut frontier = vec![0usize];
        while let Some(g) = frontier.pop() {
            let chi_g = char_of[&g];
            for &(h, chi_h) in &gen_pairs {
                let gh = sym.compose_indices(h, g);
                let chi = chi_h * chi_g;
                match char_of.get(&gh) {
                    Some(existing) => {
                        if (*existing - chi).modulus() > lit::<T>(1e-9) {
                            return Err(Error::BadIrrep {
                                label: label.into(),
                                reason: "characters are not a homomorphism on the group".into(),
                            });
                        }
                    }
                    None => {
                        char_of.insert(gh, chi);
                        frontier.push(gh);
                    }
                }
            }
        }
        let members: Vec<usize> = char_of.keys().copied().collect();
        let chars = members.iter().map(|m| char_of[m]).collect();
        Ok(IrrepSpec {
            label: label.into(),
            members,
            chars,
        })
    }

    /// The complex-conjugate irrep.
    pub fn conjugate(&self, label: &str) -> Self {
        IrrepSpec {
            label: label.into(),
            members: self.members.clone(),
            chars: self.chars.iter().map(|c| c.conj()).collect(),
        }
    }
}

/// Fields sampled on the composite quadrature grid of every edge; the
/// concrete vector representation for group actions and projectors.
#[derive(Debug, Clone)]
pub struct SampledField<T: Real> {
    pub panels: usize,
    /// Per edge: 4 x n matrix, rows `(v, w, u, eta)` at the quadrature nodes.
    pub values: Vec<DMatrix<Complex<T>>>,
}

impl<T: Real> SampledField<T> {
    pub fn zeros(frame: &Frame<T>, panels: usize) -> Self {
        SampledField {
            panels,
            values: frame
                .edges()
                .iter()
                .map(|_| DMatrix::zeros(4, panels * 16))
                .collect(),
        }
    }

    /// Build from a function of `(edge index, field row, node position)`.
    pub fn from_fn(
        frame: &Frame<T>,
        panels: usize,
        mut f: impl FnMut(usize, usize, T) -> Complex<T>,
    ) -> Self {
        let mut out = Self::zeros(frame, panels);
        for (ei, edge) in frame.edges().iter().enumerate() {
            for (q, (x, _)) in quadrature::nodes(edge.length, panels)
                .into_iter()
                .enumerate()
            {
                for row in 0..4 {
                    out.values[ei][(row, q)] = f(ei, row, x);
                }
            }
        }
        out
    }

    /// L2 inner product `<a, b>` over the frame (conjugate-linear in `a`).
    pub fn inner(frame: &Frame<T>, a: &Self, b: &Self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (ei, edge) in frame.edges().iter().enumerate() {
            for (q, (_, w)) in quadrature::nodes(edge.length, a.panels)
                .into_iter()
                .enumerate()
            {
                for row in 0..4 {
                    let p = a.values[ei][(row, q)].conj() * b.values[ei][(row, q)];
                    acc += p * Complex::new(w, T::zero());
                }
            }
        }
        acc
    }

    pub fn norm(&self, frame: &Frame<T>) -> T {
        Self::inner(frame, self, self).re.sqrt()
    }

    pub fn axpy(&mut self, alpha: Complex<T>, other: &Self) {
        for (mine, theirs) in self.values.iter_mut().zip(&other.values) {
            for (m, t) in mine.iter_mut().zip(theirs.iter()) {
                *m += alpha * *t;
            }
        }
    }

    pub fn scale(&mut self, alpha: Complex<T>) {
        for m in self.values.iter_mut() {
            for x in m.iter_mut() {
                *x *= alpha;
            }
        }
    }
}

/// Apply a group element to a sampled field: edges permute, displacement
/// components mix via the element's triad transfer matrices, torsion picks up
/// the determinant sign.
pub fn action_on_fields<T: Real>(
    sym: &FrameSymmetry<T>,
    element: usize,
    field: &SampledField<T>,
) -> SampledField<T> {
    let g = &sym.elements[element];
    let mut out = SampledField::zeros(&sym.frame, field.panels);
    let cx = |r: T| Complex::new(r, T::zero());
    for (e, &ei) in g.edge_perm.iter().enumerate() {
        let o = &g.mixers[e];
        let src = &field.values[e];
        let dst = &mut out.values[ei];
        for q in 0..src.ncols() {
            let (v, w, u, eta) = (src[(0, q)], src[(1, q)], src[(2, q)], src[(3, q)]);
            dst[(0, q)] = cx(o[(2, 0)]) * u + cx(o[(2, 1)]) * w + cx(o[(2, 2)]) * v;
            dst[(1, q)] = cx(o[(1, 0)]) * u + cx(o[(1, 1)]) * w + cx(o[(1, 2)]) * v;
            dst[(2, q)] = cx(o[(0, 0)]) * u + cx(o[(0, 1)]) * w + cx(o[(0, 2)]) * v;
            dst[(3, q)] = cx(g.det) * eta;
        }
    }
    out
}

/// Orthogonal projector onto the isotypic component of a 1-D irrep:
/// `P = (1/|G_rho|) sum conj(chi(g)) g`.
pub fn isotypic_projector<T: Real>(
    sym: &FrameSymmetry<T>,
    irrep: &IrrepSpec<T>,
    field: &SampledField<T>,
) -> SampledField<T> {
    let mut out = SampledField::zeros(&sym.frame, field.panels);
    let weight = T::one() / lit::<T>(irrep.members.len() as f64);
    for (&g, chi) in irrep.members.iter().zip(&irrep.chars) {
        let transformed = action_on_fields(sym, g, field);
        out.axpy(chi.conj() * Complex::new(weight, T::zero()), &transformed);
    }
    out
}

/// Free coefficient structure of one edge orbit under the stabilizer of its
/// representative.
struct OrbitColumns<T: Real> {
    rep: usize,
    edges: Vec<(usize, usize)>, // (edge, transporting element)
    /// Component vectors (v-component, w-component) of the free bending pairs.
    vw: Vec<(Complex<T>, Complex<T>)>,
    u_free: bool,
    eta_free: bool,
}

fn orbit_columns<T: Real>(
    sym: &FrameSymmetry<T>,
    irrep: &IrrepSpec<T>,
    rep: usize,
) -> Result<OrbitColumns<T>> {
    let tol = lit::<T>(1e-9);
    let mut edges = vec![(rep, 0usize)];
    let mut seen = vec![rep];
    // transports: breadth-first over members
    let mut frontier = vec![(rep, 0usize)];
    while let Some((e, _)) = frontier.pop() {
        for (&g, _) in irrep.members.iter().zip(&irrep.chars) {
            let img = sym.elements[g].edge_perm[e];
            if !seen.contains(&img) {
                // transport for img: the element mapping rep directly
                let direct = irrep
                    .members
                    .iter()
                    .find(|&&m| sym.elements[m].edge_perm[rep] == img)
                    .copied()
                    .ok_or_else(|| Error::BadSymmetry {
                        name: "orbit".into(),
                        reason: "orbit not reachable from representative".into(),
                    })?;
                seen.push(img);
                edges.push((img, direct));
                frontier.push((img, direct));
            }
        }
    }
    edges.sort_by_key(|&(e, _)| e);

    // stabilizer constraints on the representative components
    let one = Complex::new(T::one(), T::zero());
    let mut u_free = true;
    let mut eta_free = true;
    let mut vw_rows: Vec<[Complex<T>; 2]> = Vec::new();
    for (&g, chi) in irrep.members.iter().zip(&irrep.chars) {
        let el = &sym.elements[g];
        if el.edge_perm[rep] != rep || g == 0 {
            continue;
        }
        let o = &el.mixers[rep];
        let cbar = chi.conj();
        if (cbar * Complex::new(o[(0, 0)], T::zero()) - one).modulus() > tol {
            u_free = false;
        }
        if (cbar * Complex::new(el.det, T::zero()) - one).modulus() > tol {
            eta_free = false;
        }
        // constraint (cbar * C - I)(v, w) = 0 with C = [[O22, O21],[O12, O11]]
        let c = [
            [
                cbar * Complex::new(o[(2, 2)], T::zero()) - one,
                cbar * Complex::new(o[(2, 1)], T::zero()),
            ],
            [
                cbar * Complex::new(o[(1, 2)], T::zero()),
                cbar * Complex::new(o[(1, 1)], T::zero()) - one,
            ],
        ];
        if c[0][0].modulus() + c[0][1].modulus() > tol {
            vw_rows.push(c[0]);
        }
        if c[1][0].modulus() + c[1][1].modulus() > tol {
            vw_rows.push(c[1]);
        }
    }
    let vw = if vw_rows.is_empty() {
        vec![
            (one, Complex::new(T::zero(), T::zero())),
            (Complex::new(T::zero(), T::zero()), one),
        ]
    } else {
        let m = DMatrix::<Complex<T>>::from_fn(vw_rows.len(), 2, |r, c| vw_rows[r][c]);
        let null = crate::linalg::svd_spectrum(&m, lit(1e-9)).nullspace;
        null.iter()
            .map(|n| {
                // pivot normalization: prefer a unit v-component
                let (nv, nw) = (n[0], n[1]);
                if nv.modulus() >= nw.modulus() {
                    (one, nw / nv)
                } else {
                    (nv / nw, one)
                }
            })
            .collect()
    };
    Ok(OrbitColumns {
        rep,
        edges,
        vw,
        u_free,
        eta_free,
    })
}

/// Build the reduced secular assembly of a 1-D irrep: coefficients constrained
/// to the isotypic component and joint conditions pruned to an independent set
/// expressed in the representative edge's local coordinates.
pub fn quotient_assembly<T: Real>(
    sym: &FrameSymmetry<T>,
    irrep: &IrrepSpec<T>,
    options: AssemblyOptions<T>,
) -> Result<SecularAssembly<Complex<T>>> {
    let frame = &sym.frame;
    let ne = frame.edges().len();
    let (reductions, absorbed) = endpoint_reductions(frame, options.reduce_endpoints);
    let specs: Vec<EdgeBasisSpec> = reductions
        .iter()
        .map(|&r| EdgeBasisSpec {
            origin_reduction: r,
            fields: FieldSelection::ALL,
        })
        .collect();
    let mut offsets = Vec::with_capacity(ne);
    let mut total = 0usize;
    for s in &specs {
        offsets.push(total);
        total += s.column_count();
    }

    // edge orbits under the irrep's subgroup
    let mut orbit_of = vec![usize::MAX; ne];
    let mut orbits: Vec<OrbitColumns<T>> = Vec::new();
    for e in 0..ne {
        if orbit_of[e] != usize::MAX {
            continue;
        }
        let cols = orbit_columns(sym, irrep, e)?;
        for &(member, _) in &cols.edges {
            orbit_of[member] = orbits.len();
            if specs[member].column_count() != specs[e].column_count() {
                return Err(Error::BadSymmetry {
                    name: "quotient".into(),
                    reason: format!(
                        "edges {} and {} of one orbit have different reduced bases",
                        frame.edges()[e].id,
                        frame.edges()[member].id
                    ),
                });
            }
        }
        orbits.push(cols);
    }
    orbits.sort_by_key(|o| (usize::MAX - o.edges.len(), o.rep));

    // constraint matrix Z: reduced coefficients of all edges from the free
    // coefficients of orbit representatives
    let zero = Complex::new(T::zero(), T::zero());
    let mut z_cols: Vec<Vec<Complex<T>>> = Vec::new();
    for orbit in &orbits {
        let spec = &specs[orbit.rep];
        let (nv, nw, nu, neta) = spec.column_counts();
        // both stabilizer-tied pairs and rotating transport mixers couple the
        // two bending planes, which is only representable when mu_a == mu_b
        let needs_mixing = orbit
            .vw
            .iter()
            .any(|(a, b)| a.modulus() > lit(1e-12) && b.modulus() > lit(1e-12))
            || orbit.edges.iter().any(|&(_, g)| {
                let o = &sym.elements[g].mixers[orbit.rep];
                o[(1, 2)].abs() > lit::<T>(1e-9) || o[(2, 1)].abs() > lit::<T>(1e-9)
            });
        for &(edge, transport) in &orbit.edges {
            if needs_mixing {
                let m = &frame.edges()[edge].materials;
                if (m.a - m.b).abs() > lit::<T>(1e-10) || nv != nw {
                    return Err(Error::BadSymmetry {
                        name: "quotient".into(),
                        reason: format!(
                            "edge {} mixes v and w under the stabilizer but a != b",
                            frame.edges()[edge].id
                        ),
                    });
                }
            }
            let _ = transport;
        }
        // bending pairs
        for &(cv, cw) in &orbit.vw {
            for b in 0..nv {
                let mut col = vec![zero; total];
                for &(edge, transport) in &orbit.edges {
                    let el = &sym.elements[transport];
                    let chi = irrep.chars[irrep
                        .members
                        .iter()
                        .position(|&m| m == transport)
                        .expect("transport is a member")];
                    let o = &el.mixers[orbit.rep];
                    let cbar = chi.conj();
                    // (v', w') = cbar * [[O22, O21],[O12, O11]] (v, w)
                    let tv = cbar
                        * (Complex::new(o[(2, 2)], T::zero()) * cv
                            + Complex::new(o[(2, 1)], T::zero()) * cw);
                    let tw = cbar
                        * (Complex::new(o[(1, 2)], T::zero()) * cv
                            + Complex::new(o[(1, 1)], T::zero()) * cw);
                    col[offsets[edge] + b] = tv;
                    if nw > 0 {
                        col[offsets[edge] + nv + b] = tw;
                    }
                }
                z_cols.push(col);
            }
        }
        if orbit.u_free {
            for b in 0..nu {
                let mut col = vec![zero; total];
                for &(edge, transport) in &orbit.edges {
                    let el = &sym.elements[transport];
                    let chi = irrep.chars[irrep
                        .members
                        .iter()
                        .position(|&m| m == transport)
                        .expect("member")];
                    let o = &el.mixers[orbit.rep];
                    col[offsets[edge] + nv + nw + b] =
                        chi.conj() * Complex::new(o[(0, 0)], T::zero());
                }
                z_cols.push(col);
            }
        }
        if orbit.eta_free {
            for b in 0..neta {
                let mut col = vec![zero; total];
                for &(edge, transport) in &orbit.edges {
                    let el = &sym.elements[transport];
                    let chi = irrep.chars[irrep
                        .members
                        .iter()
                        .position(|&m| m == transport)
                        .expect("member")];
                    col[offsets[edge] + nv + nw + nu + b] =
                        chi.conj() * Complex::new(el.det, T::zero());
                }
                z_cols.push(col);
            }
        }
    }
    let zc = z_cols.len();
    if zc == 0 {
        return Err(Error::BadIrrep {
            label: irrep.label.clone(),
            reason: "isotypic component contains no coefficients".into(),
        });
    }
    let z = DMatrix::<Complex<T>>::from_fn(total, zc, |r, c| z_cols[c][r]);

    // candidate condition rows at vertex-orbit representatives, expressed in
    // the local coordinates of a reference incident edge
    let mut vertex_orbit_rep = vec![true; frame.vertices().len()];
    for (&g, _) in irrep.members.iter().zip(&irrep.chars) {
        for v in 0..frame.vertices().len() {
            let img = sym.elements[g].vertex_perm[v];
            if img < v {
                vertex_orbit_rep[v] = false;
            }
        }
    }
    let mut candidates: Vec<ConditionRow<T>> = Vec::new();
    for v in 0..frame.vertices().len() {
        if !vertex_orbit_rep[v] || absorbed[v] {
            continue;
        }
        let stabilizer: Vec<usize> = irrep
            .members
            .iter()
            .copied()
            .filter(|&g| sym.elements[g].vertex_perm[v] == v)
            .collect();
        let incident: Vec<usize> = frame.incident(v).iter().map(|&(e, _)| e).collect();
        // incident-edge orbits under the stabilizer
        let mut eorbit: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &e in &incident {
            let rep = stabilizer
                .iter()
                .map(|&g| sym.elements[g].edge_perm[e])
                .chain([e])
                .filter(|img| incident.contains(img))
                .min()
                .unwrap();
            eorbit.entry(rep).or_default().push(e);
        }
        let mut orbit_list: Vec<(usize, usize)> = eorbit
            .iter()
            .map(|(&rep, members)| {
                let mut m = members.clone();
                m.sort();
                m.dedup();
                (rep, m.len())
            })
            .collect();
        orbit_list.sort_by_key(|&(rep, len)| (usize::MAX - len, rep));
        let reference = orbit_list[0].0;

        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for &(rep, _) in orbit_list.iter().skip(1) {
            pairs.push((rep, reference));
        }
        let mut partners: Vec<usize> = stabilizer
            .iter()
            .map(|&g| sym.elements[g].edge_perm[reference])
            .filter(|&p| p != reference)
            .collect();
        partners.sort();
        partners.dedup();
        for p in partners {
            pairs.push((p, reference));
        }

        let plan = RowPlan::local(&frame.edges()[reference].triad);
        candidates.extend(vertex_rows_with_pairs(
            frame,
            v,
            &pairs,
            &plan,
            options.spring_tol,
        ));
    }

    // greedy independent-row selection on joint signatures at sample lambdas
    let samples = [
        lit::<T>(0.618_033_988_7),
        lit::<T>(2.718_281_828_4),
        lit::<T>(7.389_056_098_9),
    ];
    let mut signatures: Vec<DMatrix<Complex<T>>> = Vec::new();
    for &lambda in &samples {
        let mut maps = Vec::with_capacity(ne);
        for (e, spec) in frame.edges().iter().zip(&specs) {
            maps.push([
                trace_map(e, spec, lambda, Endpoint::Origin)?,
                trace_map(e, spec, lambda, Endpoint::Terminus)?,
            ]);
        }
        let m = rows_to_matrix::<Complex<T>, T>(&candidates, &maps, &offsets, total, None);
        signatures.push(m * &z);
    }
    let sig_of = |row: usize| -> nalgebra::DVector<Complex<T>> {
        let mut v = nalgebra::DVector::<Complex<T>>::zeros(samples.len() * zc);
        for (s, m) in signatures.iter().enumerate() {
            for c in 0..zc {
                v[s * zc + c] = m[(row, c)];
            }
        }
        v
    };
    let mut kept: Vec<usize> = Vec::new();
    let mut basis: Vec<nalgebra::DVector<Complex<T>>> = Vec::new();
    for r in 0..candidates.len() {
        let mut sig = sig_of(r);
        let n0 = sig.norm();
        if n0 < lit::<T>(1e-11) {
            continue;
        }
        sig /= Complex::new(n0, T::zero());
        for b in &basis {
            let proj = b.dotc(&sig);
            sig -= b * proj;
        }
        if sig.norm() > lit::<T>(1e-8) {
            let n = sig.norm();
            basis.push(sig / Complex::new(n, T::zero()));
            kept.push(r);
        }
    }
    let kept_rows: Vec<ConditionRow<T>> = kept.iter().map(|&r| candidates[r].clone()).collect();

    // completeness check against the full standard row set
    let check_lambda = lit::<T>(4.123_456_78);
    let mut maps = Vec::with_capacity(ne);
    for (e, spec) in frame.edges().iter().zip(&specs) {
        maps.push([
            trace_map(e, spec, check_lambda, Endpoint::Origin)?,
            trace_map(e, spec, check_lambda, Endpoint::Terminus)?,
        ]);
    }
    let mut full_rows = Vec::new();
    for v in 0..frame.vertices().len() {
        if absorbed[v] {
            continue;
        }
        full_rows.extend(vertex_rows(
            frame,
            v,
            &RowPlan::global(),
            options.spring_tol,
        ));
    }
    let full = rows_to_matrix::<Complex<T>, T>(&full_rows, &maps, &offsets, total, None) * &z;
    let mine = rows_to_matrix::<Complex<T>, T>(&kept_rows, &maps, &offsets, total, None) * &z;
    let rank_full = crate::linalg::rank(&full, lit(1e-8));
    let rank_mine = crate::linalg::rank(&mine, lit(1e-8));
    let (rows_final, real_det) = if rank_mine == rank_full {
        let real = irrep.chars.iter().all(|c| c.im.abs() < lit::<T>(1e-12));
        (kept_rows, real)
    } else {
        log::warn!(
            "quotient row pruning incomplete for irrep {} (rank {rank_mine} vs {rank_full}); keeping the full row set",
            irrep.label
        );
        (full_rows, false)
    };

    Ok(SecularAssembly::from_parts(
        frame.clone(),
        rows_final,
        specs,
        Some(z),
        options,
        real_det,
    ))
}

/// Per-eigenvalue bookkeeping of the decomposition check.
#[derive(Debug, Clone)]
pub struct UnionMatch<T: Real> {
    pub lambda: T,
    pub multiplicity: usize,
    /// `(irrep label, quotient eigenvalue)` claims.
    pub claimed: Vec<(String, T)>,
}

/// Result of comparing the union of quotient spectra with the full spectrum.
#[derive(Debug, Clone)]
pub struct UnionReport<T: Real> {
    pub full: Vec<(T, usize)>,
    pub quotients: Vec<(String, Vec<(T, usize)>)>,
    pub matches: Vec<UnionMatch<T>>,
    pub unmatched_quotient: Vec<(String, T)>,
    pub symmetry_errors: Vec<String>,
    pub max_rel_deviation: T,
    pub consistent: bool,
}

/// Solve the full frame and all quotient problems on an interval and check
/// that the quotient spectra partition the full spectrum (with multiplicity).
/// Broken symmetry is reported through `consistent = false`, not an error.
pub fn spectrum_union_check<T: Real>(
    sym: &FrameSymmetry<T>,
    irreps: &[IrrepSpec<T>],
    lambda_min: T,
    lambda_max: T,
    steps: usize,
    options: AssemblyOptions<T>,
    match_rel_tol: T,
) -> Result<UnionReport<T>> {
    let full_asm = SecularAssembly::with_options(sym.frame.clone(), options);
    let full_roots = full_asm.eigenvalues(lambda_min, lambda_max, steps)?;
    let full: Vec<(T, usize)> = full_roots.iter().map(|r| (r.lambda, r.nullity)).collect();

    let mut quotients = Vec::new();
    for irrep in irreps {
        let asm = quotient_assembly(sym, irrep, options)?;
        let roots = asm.eigenvalues(lambda_min, lambda_max, steps)?;
        quotients.push((
            irrep.label.clone(),
            roots
                .iter()
                .map(|r| (r.lambda, r.nullity))
                .collect::<Vec<_>>(),
        ));
    }

    let mut matches = Vec::new();
    let mut used = vec![Vec::new(); quotients.len()];
    for (qi, (_, roots)) in quotients.iter().enumerate() {
        used[qi] = vec![false; roots.len()];
    }
    let mut max_dev = T::zero();
    let mut consistent = true;
    for &(lf, mult) in &full {
        let mut claimed = Vec::new();
        let mut claimed_mult = 0;
        for (qi, (label, roots)) in quotients.iter().enumerate() {
            for (ri, &(lq, m)) in roots.iter().enumerate() {
                if (lq - lf).abs() <= match_rel_tol * lf.abs() {
                    used[qi][ri] = true;
                    claimed.push((label.clone(), lq));
                    claimed_mult += m;
                    let dev = (lq - lf).abs() / lf.abs();
                    if dev > max_dev {
                        max_dev = dev;
                    }
                }
            }
        }
        if claimed_mult != mult {
            consistent = false;
        }
        matches.push(UnionMatch {
            lambda: lf,
            multiplicity: mult,
            claimed,
        });
    }
    let mut unmatched = Vec::new();
    for (qi, (label, roots)) in quotients.iter().enumerate() {
        for (ri, &(lq, _)) in roots.iter().enumerate() {
            if !used[qi][ri] {
                unmatched.push((label.clone(), lq));
                consistent = false;
            }
        }
    }
    Ok(UnionReport {
        full,
        quotients,
        matches,
        unmatched_quotient: unmatched,
        symmetry_errors: sym.verification_errors.to_vec(),
        max_rel_deviation: max_dev,
        consistent: consistent && sym.verification_errors.is_empty(),
    })
}

/// The action of a group element on FEM coefficient vectors: joint blocks map
/// by the orthogonal matrix (rotation blocks with the determinant sign),
/// interior nodes permute with their edges and mix like the trace components.
pub fn fem_action_matrix<T: Real>(system: &FemSystem<T>, element: &GroupElement<T>) -> DMatrix<T> {
    let dofs = &system.dofs;
    let n = dofs.total;
    let mut a = DMatrix::<T>::zeros(n, n);
    let frame = system.frame();
    for vi in 0..frame.vertices().len() {
        let wi = element.vertex_perm[vi];
        if let (Some(gd), Some(gd2)) = (dofs.joint_disp[vi], dofs.joint_disp[wi]) {
            for r in 0..3 {
                for c in 0..3 {
                    a[(gd2 + r, gd + c)] = element.matrix[(r, c)];
                }
            }
        }
        if let (Some(gr), Some(gr2)) = (dofs.joint_rot[vi], dofs.joint_rot[wi]) {
            for r in 0..3 {
                for c in 0..3 {
                    a[(gr2 + r, gr + c)] = element.det * element.matrix[(r, c)];
                }
            }
        }
    }
    for (e, &ei) in element.edge_perm.iter().enumerate() {
        let o = &element.mixers[e];
        let det = element.det;
        let nodes = dofs.elements[e] - 1;
        for m in 0..nodes {
            let src = dofs.interior_base[e] + m * NODE_COMPONENTS;
            let dst = dofs.interior_base[ei] + m * NODE_COMPONENTS;
            // values (v, w, u) from (u, w, v) mixing
            // v' row
            a[(dst, src + 4)] = o[(2, 0)];
            a[(dst, src + 2)] = o[(2, 1)];
            a[(dst, src)] = o[(2, 2)];
            // w row
            a[(dst + 2, src + 4)] = o[(1, 0)];
            a[(dst + 2, src + 2)] = o[(1, 1)];
            a[(dst + 2, src)] = o[(1, 2)];
            // u row
            a[(dst + 4, src + 4)] = o[(0, 0)];
            a[(dst + 4, src + 2)] = o[(0, 1)];
            a[(dst + 4, src)] = o[(0, 2)];
            // rotation triple (eta, -v', w')
            a[(dst + 5, src + 5)] = det * o[(0, 0)];
            a[(dst + 5, src + 1)] = -det * o[(0, 1)];
            a[(dst + 5, src + 3)] = det * o[(0, 2)];
            a[(dst + 1, src + 5)] = -det * o[(1, 0)];
            a[(dst + 1, src + 1)] = det * o[(1, 1)];
            a[(dst + 1, src + 3)] = -det * o[(1, 2)];
            a[(dst + 3, src + 5)] = det * o[(2, 0)];
            a[(dst + 3, src + 1)] = -det * o[(2, 1)];
            a[(dst + 3, src + 3)] = det * o[(2, 2)];
        }
    }
    a
}
