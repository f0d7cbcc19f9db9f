//! Linearized rotation kinematics: the rotation vector of a deformed beam,
//! the axis-angle rotation matrix, and the tangent-plane diagnostics for
//! rigid joints of planar frames.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::fields::FieldEval;
use crate::geometry::{Frame, Triad};
use crate::scalar::{lit, to_f64, Real};

/// Linearized rotation vector of a beam cross-section, in global coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationVector<T: Real>(pub Vector3<T>);

/// Rotation vector `omega = eta i - v' j + w' k` of a field point expressed in
/// the given material triad.
pub fn rotation_vector<T: Real>(fp: &FieldEval<T>, triad: &Triad<T>) -> RotationVector<T> {
    RotationVector(triad.i * fp.eta[0] - triad.j * fp.v[1] + triad.k * fp.w[1])
}

/// Skew-symmetric matrix `K` with `K a = axis x a`.
pub fn skew<T: Real>(axis: &Vector3<T>) -> Matrix3<T> {
    Matrix3::new(
        T::zero(),
        -axis[2],
        axis[1],
        axis[2],
        T::zero(),
        -axis[0],
        -axis[1],
        axis[0],
        T::zero(),
    )
}

/// Axis-angle rotation matrix `R = I + sin(angle) K + (1 - cos(angle)) K^2`.
///
/// The axis is normalized; deviations from unit norm beyond `1e-8` are logged,
/// a near-zero axis is an error.
pub fn rodrigues<T: Real>(axis: &Vector3<T>, angle: T) -> Result<Matrix3<T>> {
    let n = axis.norm();
    if n < lit::<T>(1e-12) {
        return Err(Error::ZeroAxis(to_f64(n)));
    }
    if (n - T::one()).abs() > lit::<T>(1e-8) {
        log::warn!(
            "rotation axis norm {} deviates from 1; normalizing",
            to_f64(n)
        );
    }
    let k = skew(&(axis / n));
    let k2 = k * k;
    Ok(Matrix3::identity() + k * angle.sin() + k2 * (T::one() - angle.cos()))
}

/// Matrix exponential by scaled-and-squared truncated series (30 terms).
///
/// Kept free of any axis-angle shortcut so it can serve as an independent
/// cross-check of [`rodrigues`].
pub fn matrix_exp<T: Real>(m: &Matrix3<T>) -> Matrix3<T> {
    let mut scale = 0u32;
    let mut norm = T::zero();
    for x in m.iter() {
        norm += x.abs();
    }
    while norm > lit::<T>(0.5) && scale < 60 {
        norm *= lit::<T>(0.5);
        scale += 1;
    }
    let half_pow = lit::<T>(0.5).powi(scale as i32);
    let a = m * half_pow;
    let mut term = Matrix3::identity();
    let mut sum = Matrix3::identity();
    for n in 1..=30 {
        term = term * a / lit::<T>(n as f64);
        sum += term;
    }
    for _ in 0..scale {
        sum = sum * sum;
    }
    sum
}

/// Residuals of the two tangent-plane identities at one edge of a planar
/// rigid joint.
#[derive(Debug, Clone, Copy)]
pub struct TangentPlaneResidual<T: Real> {
    pub edge_id: u32,
    /// Coplanarity of the deformed tangents: vanishes iff the tangent vectors
    /// of all incident beams stay in one plane.
    pub in_plane: T,
    /// Companion identity tying the edge torsion to the two reference slopes.
    pub rotation: T,
}

/// Outcome of the tangent-plane diagnostics.
#[derive(Debug, Clone)]
pub enum TangentPlaneCheck<T: Real> {
    /// Degree below 3: the identities reduce to `0 = 0`.
    Vacuous,
    Residuals(Vec<TangentPlaneResidual<T>>),
}

/// Evaluate the tangent-plane identities at a vertex of a planar frame.
///
/// `traces` holds `(v', eta)` at the vertex for each incident edge, in the
/// frame's incident-edge order. Both residual families vanish exactly when the
/// joint satisfies continuity of rotation restricted to the plane.
pub fn tangent_plane_residuals<T: Real>(
    frame: &Frame<T>,
    vertex_id: u32,
    traces: &[(T, T)],
) -> Result<TangentPlaneCheck<T>> {
    let vi = frame.vertex_idx(vertex_id)?;
    let incident = frame.incident(vi);
    if incident.len() != traces.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} traces at vertex {}, got {}",
            incident.len(),
            vertex_id,
            traces.len()
        )));
    }
    if incident.len() < 3 {
        return Ok(TangentPlaneCheck::Vacuous);
    }
    let triad = |slot: usize| &frame.edges()[incident[slot].0].triad;
    let (i1, j1) = (triad(0).i, triad(0).j);
    let (i2, j2) = (triad(1).i, triad(1).j);
    let (vp1, _) = traces[0];
    let (vp2, _) = traces[1];

    let mut out = Vec::with_capacity(incident.len());
    for (slot, &(ei, _)) in incident.iter().enumerate() {
        let te = &frame.edges()[ei].triad;
        let (vpe, etae) = traces[slot];
        let in_plane = j2.dot(&te.i) * vp1 + te.j.dot(&i1) * vp2 + j1.dot(&i2) * vpe;
        let rotation = j2.dot(&te.j) * vp1 - te.j.dot(&j1) * vp2 + j1.dot(&i2) * etae;
        out.push(TangentPlaneResidual {
            edge_id: frame.edges()[ei].id,
            in_plane,
            rotation,
        });
    }
    Ok(TangentPlaneCheck::Residuals(out))
}
