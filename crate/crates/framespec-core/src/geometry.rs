//! Frame data model: vertices in 3-space, directed edges carrying orthonormal
//! material triads, per-edge stiffness parameters and per-vertex joint kinds.
//!
//! Vertex positions are authoritative: edge lengths and axial directions are
//! derived at construction time and never stored independently, so the two can
//! not drift apart. Edges are directed; the orientation is analytically
//! irrelevant (see [`Frame::flip_edge`]) but must be fixed for bookkeeping.

use std::collections::BTreeMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Right-handed orthonormal material triad of an edge: `i` along the axis,
/// `j`, `k` across the section, with `i = j x k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triad<T: Real> {
    pub i: Vector3<T>,
    pub j: Vector3<T>,
    pub k: Vector3<T>,
}

/// Stiffness parameters of one beam: bending about `j` (`a`), bending about
/// `k` (`b`), axial (`c`) and angular-displacement (`d`) stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams<T: Real> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> MaterialParams<T> {
    pub fn unit() -> Self {
        MaterialParams {
            a: T::one(),
            b: T::one(),
            c: T::one(),
            d: T::one(),
        }
    }

    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        MaterialParams { a, b, c, d }
    }
}

/// Joint condition attached to a vertex.
///
/// `Spring` carries the vertex-energy angles; the value `pi/2` encodes the
/// Dirichlet limit (fixed displacement and/or rotation). `Spring(0, 0)` is
/// identical to `FreeRigid`, `Spring(pi/2, pi/2)` to `Clamped`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JointKind<T: Real> {
    FreeRigid,
    Clamped,
    Pinned,
    Guided,
    Spring { alpha: T, beta: T },
}

/// How a spring angle enters the balance rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpringCoefficient<T: Real> {
    /// Finite spring: rows `tan(angle) * value + derivative terms = 0`.
    Finite { tan: T },
    /// `angle = pi/2`: Dirichlet row on the value itself.
    Dirichlet,
}

/// Classify a spring angle, mapping `pi/2` (within `tol`) to the Dirichlet branch.
pub fn spring_coefficient<T: Real>(angle: T, tol: T) -> SpringCoefficient<T> {
    let half_pi = T::frac_pi_2();
    if (angle - half_pi).abs() <= tol {
        SpringCoefficient::Dirichlet
    } else {
        SpringCoefficient::Finite { tan: angle.tan() }
    }
}

/// A joint of the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex<T: Real> {
    pub id: u32,
    pub position: Vector3<T>,
    pub joint: JointKind<T>,
}

/// A directed beam between two vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T: Real> {
    pub id: u32,
    pub origin: u32,
    pub terminus: u32,
    pub length: T,
    pub triad: Triad<T>,
    pub materials: MaterialParams<T>,
}

/// Which end of an edge a quantity refers to; `Origin` is `x = 0`,
/// `Terminus` is `x = length`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Origin,
    Terminus,
}

impl Endpoint {
    /// Incidence sign: `+1` at the origin, `-1` at the terminus.
    pub fn incidence_sign(self) -> i8 {
        match self {
            Endpoint::Origin => 1,
            Endpoint::Terminus => -1,
        }
    }
}

/// Immutable frame: construction is single-threaded, afterwards the structure
/// is safe to share across any number of worker threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T: Real> {
    vertices: Vec<Vertex<T>>,
    edges: Vec<Edge<T>>,
    vertex_index: BTreeMap<u32, usize>,
    edge_index: BTreeMap<u32, usize>,
    /// Per vertex: incident `(edge index, endpoint)` pairs in edge-index order.
    incidence: Vec<Vec<(usize, Endpoint)>>,
}

/// One invariant violation found by [`validate_frame`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    BasisNotOrthonormal,
    BasisNotRightHanded,
    AxisMisaligned,
    NonPositiveLength,
    NonPositiveMaterial,
    UnknownVertexRef,
    SpringAngleOutOfRange,
}

/// Result of frame validation: empty `violations` means the frame is valid.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// `(vertex id, degree)` pairs in id order.
    pub vertex_degrees: Vec<(u32, usize)>,
    pub connected_components: usize,
    /// Vertices whose spring angles are negative (negative spring constant);
    /// legal, but flagged because the energy form loses positivity.
    pub negative_spring_vertices: Vec<u32>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Deterministic construction of an edge triad from endpoint positions.
///
/// `i` points from origin to terminus. With a hint, `j` is the hint
/// orthonormalized against `i`; without one, `j = normalize(E3 x i)`, falling
/// back to `j = E2` for near-vertical edges. `k = i x j` completes the
/// right-handed triad.
pub fn auto_basis<T: Real>(
    origin: &Vector3<T>,
    terminus: &Vector3<T>,
    j_hint: Option<&Vector3<T>>,
) -> Result<(Triad<T>, T)> {
    let d = terminus - origin;
    let len = d.norm();
    if len <= lit::<T>(1e-14) {
        return Err(Error::DegenerateEdge {
            id: u32::MAX,
            len: to_f64(len),
        });
    }
    let i = d / len;
    let j = match j_hint {
        Some(h) => {
            // an already-orthonormal hint passes through bit-exactly, so
            // serializing the stored basis round-trips
            if (h.norm() - T::one()).abs() < lit::<T>(1e-13) && i.dot(h).abs() < lit::<T>(1e-13) {
                *h
            } else {
                let perp = h - i * i.dot(h);
                let n = perp.norm();
                if n < lit::<T>(1e-8) {
                    return Err(Error::DegenerateHint { id: u32::MAX });
                }
                perp / n
            }
        }
        None => {
            let e3 = Vector3::new(T::zero(), T::zero(), T::one());
            let cross = e3.cross(&i);
            let n = cross.norm();
            if n < lit::<T>(1e-8) {
                // near-vertical edge: seed with E2, orthogonalized against i
                let e2 = Vector3::new(T::zero(), T::one(), T::zero());
                let perp = e2 - i * i.dot(&e2);
                perp / perp.norm()
            } else {
                cross / n
            }
        }
    };
    let k = i.cross(&j);
    Ok((Triad { i, j, k }, len))
}

/// Incremental frame builder. Vertices and edges are sorted by id, so internal
/// indices follow id order regardless of insertion order.
pub struct FrameBuilder<T: Real> {
    vertices: Vec<Vertex<T>>,
    edges: Vec<(u32, u32, u32, MaterialParams<T>, Option<Vector3<T>>)>,
}

impl<T: Real> Default for FrameBuilder<T> {
    fn default() -> Self {
        FrameBuilder {
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }
}

impl<T: Real> FrameBuilder<T> {
    pub fn vertex(mut self, id: u32, position: Vector3<T>, joint: JointKind<T>) -> Self {
        self.vertices.push(Vertex {
            id,
            position,
            joint,
        });
        self
    }

    pub fn edge(self, id: u32, from: u32, to: u32, materials: MaterialParams<T>) -> Self {
        self.edge_with_hint(id, from, to, materials, None)
    }

    pub fn edge_with_hint(
        mut self,
        id: u32,
        from: u32,
        to: u32,
        materials: MaterialParams<T>,
        j_hint: Option<Vector3<T>>,
    ) -> Self {
        self.edges.push((id, from, to, materials, j_hint));
        self
    }

    pub fn build(mut self) -> Result<Frame<T>> {
        self.vertices.sort_by_key(|v| v.id);
        self.edges.sort_by_key(|e| e.0);

        let mut vertex_index = BTreeMap::new();
        for (idx, v) in self.vertices.iter().enumerate() {
            if vertex_index.insert(v.id, idx).is_some() {
                return Err(Error::DuplicateId(v.id));
            }
        }

        let mut edges = Vec::with_capacity(self.edges.len());
        let mut edge_index = BTreeMap::new();
        for (idx, (id, from, to, materials, hint)) in self.edges.iter().enumerate() {
            if edge_index.insert(*id, idx).is_some() {
                return Err(Error::DuplicateId(*id));
            }
            let &o = vertex_index.get(from).ok_or(Error::UnknownVertex(*from))?;
            let &t = vertex_index.get(to).ok_or(Error::UnknownVertex(*to))?;
            let (triad, length) = auto_basis(
                &self.vertices[o].position,
                &self.vertices[t].position,
                hint.as_ref(),
            )
            .map_err(|e| match e {
                Error::DegenerateEdge { len, .. } => Error::DegenerateEdge { id: *id, len },
                Error::DegenerateHint { .. } => Error::DegenerateHint { id: *id },
                other => other,
            })?;
            edges.push(Edge {
                id: *id,
                origin: *from,
                terminus: *to,
                length,
                triad,
                materials: *materials,
            });
        }

        Ok(Frame::from_parts(self.vertices, edges))
    }
}

impl<T: Real> Frame<T> {
    pub fn builder() -> FrameBuilder<T> {
        FrameBuilder::default()
    }

    /// Assemble a frame from already-constructed parts without re-deriving
    /// triads. Invariants are *not* enforced here; run [`validate_frame`].
    pub fn from_parts(vertices: Vec<Vertex<T>>, edges: Vec<Edge<T>>) -> Self {
        let vertex_index: BTreeMap<u32, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id, i))
            .collect();
        let edge_index: BTreeMap<u32, usize> =
            edges.iter().enumerate().map(|(i, e)| (e.id, i)).collect();
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (ei, e) in edges.iter().enumerate() {
            if let Some(&vi) = vertex_index.get(&e.origin) {
                incidence[vi].push((ei, Endpoint::Origin));
            }
            if let Some(&vi) = vertex_index.get(&e.terminus) {
                incidence[vi].push((ei, Endpoint::Terminus));
            }
        }
        Frame {
            vertices,
            edges,
            vertex_index,
            edge_index,
            incidence,
        }
    }

    pub fn vertices(&self) -> &[Vertex<T>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn vertex_idx(&self, id: u32) -> Result<usize> {
        self.vertex_index
            .get(&id)
            .copied()
            .ok_or(Error::UnknownVertex(id))
    }

    pub fn edge_idx(&self, id: u32) -> Result<usize> {
        self.edge_index
            .get(&id)
            .copied()
            .ok_or(Error::UnknownEdge(id))
    }

    /// Incident `(edge index, endpoint)` pairs of a vertex, in edge-index order.
    pub fn incident(&self, vertex_idx: usize) -> &[(usize, Endpoint)] {
        &self.incidence[vertex_idx]
    }

    pub fn degree(&self, vertex_idx: usize) -> usize {
        self.incidence[vertex_idx].len()
    }

    /// Signed incidence indicator: `+1` if the vertex is the edge origin,
    /// `-1` at the terminus, `0` if not incident.
    pub fn signed_incidence(&self, vertex_id: u32, edge_id: u32) -> i8 {
        let (Ok(_), Ok(ei)) = (self.vertex_idx(vertex_id), self.edge_idx(edge_id)) else {
            return 0;
        };
        let e = &self.edges[ei];
        if e.origin == vertex_id {
            1
        } else if e.terminus == vertex_id {
            -1
        } else {
            0
        }
    }

    /// Largest pairwise vertex distance; scale reference for geometric tolerances.
    pub fn diameter(&self) -> T {
        let mut d = T::zero();
        for a in 0..self.vertices.len() {
            for b in (a + 1)..self.vertices.len() {
                let r = (self.vertices[a].position - self.vertices[b].position).norm();
                if r > d {
                    d = r;
                }
            }
        }
        d
    }

    /// New frame with one edge reversed: origin and terminus swap and the triad
    /// maps `{i, j, k} -> {-i, -j, k}`. The spectrum is unaffected.
    pub fn flip_edge(&self, edge_id: u32) -> Result<Frame<T>> {
        let ei = self.edge_idx(edge_id)?;
        let mut edges = self.edges.clone();
        let e = &mut edges[ei];
        std::mem::swap(&mut e.origin, &mut e.terminus);
        e.triad = Triad {
            i: -e.triad.i,
            j: -e.triad.j,
            k: e.triad.k,
        };
        Ok(Frame::from_parts(self.vertices.clone(), edges))
    }

    /// Split an edge at parameter `t in (0,1)` by inserting a free rigid joint.
    /// Both halves keep the parent triad and materials, so the new vertex is a
    /// "dummy": it must not change the spectrum.
    pub fn split_edge(
        &self,
        edge_id: u32,
        t: T,
        new_vertex_id: u32,
        new_edge_id: u32,
    ) -> Result<Frame<T>> {
        if t <= T::zero() || t >= T::one() {
            return Err(Error::InvalidInput(format!(
                "split parameter {} outside (0,1)",
                to_f64(t)
            )));
        }
        if self.vertex_index.contains_key(&new_vertex_id) {
            return Err(Error::DuplicateId(new_vertex_id));
        }
        if self.edge_index.contains_key(&new_edge_id) {
            return Err(Error::DuplicateId(new_edge_id));
        }
        let ei = self.edge_idx(edge_id)?;
        let parent = self.edges[ei].clone();
        let o_pos = self.vertices[self.vertex_idx(parent.origin)?].position;
        let mid = o_pos + parent.triad.i * (parent.length * t);

        let mut vertices = self.vertices.clone();
        vertices.push(Vertex {
            id: new_vertex_id,
            position: mid,
            joint: JointKind::FreeRigid,
        });

        let mut edges = self.edges.clone();
        edges[ei] = Edge {
            terminus: new_vertex_id,
            length: parent.length * t,
            ..parent.clone()
        };
        edges.push(Edge {
            id: new_edge_id,
            origin: new_vertex_id,
            terminus: parent.terminus,
            length: parent.length * (T::one() - t),
            ..parent
        });
        Ok(Frame::from_parts(vertices, edges))
    }
}

/// Check all frame invariants and report violations together with degree and
/// connectivity information. Never fails; an empty violation list means valid.
pub fn validate_frame<T: Real>(frame: &Frame<T>, tol: T) -> ValidationReport {
    let mut violations = Vec::new();
    let mut negative_spring_vertices = Vec::new();

    for v in frame.vertices() {
        if let JointKind::Spring { alpha, beta } = v.joint {
            let lo = -T::frac_pi_2();
            let hi = T::frac_pi_2();
            if alpha <= lo || alpha > hi || beta <= lo || beta > hi {
                violations.push(Violation {
                    code: ViolationCode::SpringAngleOutOfRange,
                    message: format!("vertex {}: spring angles must lie in (-pi/2, pi/2]", v.id),
                });
            }
            if alpha < T::zero() || beta < T::zero() {
                negative_spring_vertices.push(v.id);
            }
        }
    }

    for e in frame.edges() {
        let (i, j, k) = (&e.triad.i, &e.triad.j, &e.triad.k);
        let one = T::one();
        let unit_err = (i.norm() - one)
            .abs()
            .max((j.norm() - one).abs())
            .max((k.norm() - one).abs());
        let ortho_err = i.dot(j).abs().max(i.dot(k).abs()).max(j.dot(k).abs());
        if unit_err > tol || ortho_err > tol {
            violations.push(Violation {
                code: ViolationCode::BasisNotOrthonormal,
                message: format!(
                    "edge {}: basis not orthonormal (unit error {:.3e}, orthogonality error {:.3e})",
                    e.id,
                    to_f64(unit_err),
                    to_f64(ortho_err)
                ),
            });
        }
        let triple = i.dot(&j.cross(k));
        if (triple - one).abs() > tol {
            violations.push(Violation {
                code: ViolationCode::BasisNotRightHanded,
                message: format!(
                    "edge {}: i . (j x k) = {} is not +1 (not right-handed)",
                    e.id,
                    to_f64(triple)
                ),
            });
        }
        if e.length <= T::zero() {
            violations.push(Violation {
                code: ViolationCode::NonPositiveLength,
                message: format!("edge {}: non-positive length", e.id),
            });
        }
        match (frame.vertex_idx(e.origin), frame.vertex_idx(e.terminus)) {
            (Ok(o), Ok(t)) => {
                let d = frame.vertices()[t].position - frame.vertices()[o].position;
                let derived_len = d.norm();
                if (derived_len - e.length).abs() > tol * (T::one() + derived_len) {
                    violations.push(Violation {
                        code: ViolationCode::AxisMisaligned,
                        message: format!("edge {}: stored length disagrees with positions", e.id),
                    });
                } else if derived_len > T::zero() {
                    let axis = d / derived_len;
                    if (axis - e.triad.i).norm() > tol * lit::<T>(10.0) {
                        violations.push(Violation {
                            code: ViolationCode::AxisMisaligned,
                            message: format!(
                                "edge {}: i is not aligned with terminus - origin",
                                e.id
                            ),
                        });
                    }
                }
            }
            _ => violations.push(Violation {
                code: ViolationCode::UnknownVertexRef,
                message: format!("edge {}: endpoint vertex missing", e.id),
            }),
        }
        let m = &e.materials;
        if m.a <= T::zero() || m.b <= T::zero() || m.c <= T::zero() || m.d <= T::zero() {
            violations.push(Violation {
                code: ViolationCode::NonPositiveMaterial,
                message: format!("edge {}: material parameters must be positive", e.id),
            });
        }
    }

    // Connected components over the vertex set.
    let n = frame.vertices().len();
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(ei, _) in frame.incident(v) {
                let e = &frame.edges()[ei];
                for vid in [e.origin, e.terminus] {
                    if let Ok(vi) = frame.vertex_idx(vid) {
                        if !seen[vi] {
                            seen[vi] = true;
                            stack.push(vi);
                        }
                    }
                }
            }
        }
    }

    ValidationReport {
        violations,
        vertex_degrees: frame
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id, frame.degree(i)))
            .collect(),
        connected_components: components,
        negative_spring_vertices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn planar_star_is_valid_with_center_degree_3() {
        let frame = models::planar_star_default::<f64>();
        let report = validate_frame(&frame, 1e-12);
        assert!(report.is_valid(), "{:?}", report.violations);
        let center = report
            .vertex_degrees
            .iter()
            .find(|(id, _)| *id == 0)
            .unwrap();
        assert_eq!(center.1, 3);
        assert_eq!(report.connected_components, 1);
    }

    #[test]
    fn non_orthonormal_basis_is_reported() {
        let mut frame = models::planar_star_default::<f64>();
        let mut edges = frame.edges().to_vec();
        edges[0].triad.j = edges[0].triad.i;
        frame = Frame::from_parts(frame.vertices().to_vec(), edges);
        let report = validate_frame(&frame, 1e-12);
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::BasisNotOrthonormal));
    }

    #[test]
    fn antenna_tower_bases_match_rotated_leg_basis() {
        let alpha = std::f64::consts::FRAC_PI_6;
        let frame = models::antenna_tower::<f64>(alpha, [1.0; 4], MaterialParams::unit());
        assert!(validate_frame(&frame, 1e-12).is_valid());
        let rot = crate::kinematics::rodrigues(
            &Vector3::new(0.0, 0.0, 1.0),
            2.0 * std::f64::consts::PI / 3.0,
        )
        .unwrap();
        let e1 = &frame.edges()[frame.edge_idx(1).unwrap()];
        let e2 = &frame.edges()[frame.edge_idx(2).unwrap()];
        assert!((rot * e1.triad.i - e2.triad.i).norm() < 1e-12);
        assert!((rot * e1.triad.j - e2.triad.j).norm() < 1e-12);
        assert!((rot * e1.triad.k - e2.triad.k).norm() < 1e-12);
        // leg basis of the worked 3D example
        assert!((e1.triad.i - Vector3::new(alpha.cos(), 0.0, alpha.sin())).norm() < 1e-12);
        assert!((e1.triad.j - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-12);
        assert!((e1.triad.k - Vector3::new(-alpha.sin(), 0.0, alpha.cos())).norm() < 1e-12);
    }

    #[test]
    fn signed_incidence_star() {
        let frame = models::planar_star_default::<f64>();
        // edges run from the fixed ends to the center vertex 0
        assert_eq!(frame.signed_incidence(0, 1), -1);
        assert_eq!(frame.signed_incidence(1, 1), 1);
        assert_eq!(frame.signed_incidence(1, 2), 0);
    }

    #[test]
    fn flip_unknown_edge_is_an_error() {
        let frame = models::planar_star_default::<f64>();
        assert!(matches!(frame.flip_edge(99), Err(Error::UnknownEdge(99))));
    }

    #[test]
    fn flip_edge_is_involutive_and_flips_signs() {
        let frame = models::planar_star_default::<f64>();
        let flipped = frame.flip_edge(2).unwrap();
        assert_eq!(flipped.signed_incidence(0, 2), 1);
        assert_eq!(flipped.signed_incidence(2, 2), -1);
        let back = flipped.flip_edge(2).unwrap();
        assert_eq!(frame, back);
    }

    #[test]
    fn auto_basis_vertical_edge_falls_back_to_e2() {
        let (triad, len) = auto_basis::<f64>(
            &Vector3::new(0.0, 0.0, 0.0),
            &Vector3::new(0.0, 0.0, 2.0),
            None,
        )
        .unwrap();
        assert!((len - 2.0).abs() < 1e-15);
        assert!((triad.j - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((triad.i - triad.j.cross(&triad.k)).norm() < 1e-15);
    }

    #[test]
    fn auto_basis_rejects_coincident_endpoints() {
        let p = Vector3::new(1.0, 2.0, 3.0);
        assert!(auto_basis::<f64>(&p, &p, None).is_err());
    }

    #[test]
    fn auto_basis_rejects_parallel_hint() {
        let r = auto_basis::<f64>(
            &Vector3::new(0.0, 0.0, 0.0),
            &Vector3::new(1.0, 0.0, 0.0),
            Some(&Vector3::new(2.0, 0.0, 0.0)),
        );
        assert!(matches!(r, Err(Error::DegenerateHint { .. })));
    }

    #[test]
    fn split_edge_keeps_geometry() {
        let frame = models::planar_star_default::<f64>();
        let split = frame.split_edge(1, 0.5, 10, 10).unwrap();
        assert!(validate_frame(&split, 1e-12).is_valid());
        assert_eq!(split.edges().len(), 4);
        let d = split.vertex_idx(10).unwrap();
        assert_eq!(split.degree(d), 2);
    }
}
