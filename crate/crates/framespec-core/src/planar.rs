//! Planar decoupling: flat frames with a common cross-section normal split
//! into two independent problems, one coupling out-of-plane displacement to
//! torsion (`v`, `eta`) and one coupling in-plane displacement to compression
//! (`w`, `u`). The union of both reduced spectra is the full spectrum.

use nalgebra::Vector3;

use crate::conditions::RowPlan;
use crate::edge_solutions::FieldSelection;
use crate::geometry::Frame;
use crate::scalar::{lit, to_f64, Real};
use crate::secular::{AssemblyOptions, SecularAssembly};

/// The common normal plus an in-plane orthonormal pair used as projection axes.
#[derive(Debug, Clone, Copy)]
pub struct PlanarSplit<T: Real> {
    pub normal: Vector3<T>,
    pub p1: Vector3<T>,
    pub p2: Vector3<T>,
}

/// Outcome of the planarity test.
#[derive(Debug, Clone)]
pub enum PlanarCheck<T: Real> {
    Planar(PlanarSplit<T>),
    NotPlanar(String),
}

/// A frame is planar when every edge shares one `k` vector and all vertices
/// lie in a plane orthogonal to it. Tolerance is absolute on unit-scale
/// geometry and scales with the frame diameter.
pub fn detect_planar<T: Real>(frame: &Frame<T>, tol: T) -> PlanarCheck<T> {
    let Some(first) = frame.edges().first() else {
        return PlanarCheck::NotPlanar("frame has no edges".into());
    };
    let normal = first.triad.k;
    for e in frame.edges() {
        let dev = (e.triad.k - normal).norm();
        if dev > tol {
            return PlanarCheck::NotPlanar(format!(
                "edge {} has k deviating by {:.3e} from the common normal",
                e.id,
                to_f64(dev)
            ));
        }
    }
    let scale = T::one() + frame.diameter();
    let origin = frame.vertices()[0].position;
    for v in frame.vertices() {
        let off = (v.position - origin).dot(&normal).abs();
        if off > tol * scale {
            return PlanarCheck::NotPlanar(format!(
                "vertex {} lies {:.3e} off the plane",
                v.id,
                to_f64(off)
            ));
        }
    }
    // In-plane axes: the global pair when the normal is E3, otherwise a
    // deterministic orthonormal completion.
    let e3 = Vector3::new(T::zero(), T::zero(), T::one());
    let (p1, p2) = if (normal - e3).norm() < lit::<T>(1e-8) {
        (Vector3::x(), Vector3::y())
    } else {
        let cross = e3.cross(&normal);
        let p1 = if cross.norm() < lit::<T>(1e-8) {
            Vector3::x()
        } else {
            cross / cross.norm()
        };
        (p1, normal.cross(&p1))
    };
    PlanarCheck::Planar(PlanarSplit { normal, p1, p2 })
}

/// The two decoupled assemblies of a planar frame: out-of-plane `(v, eta)`
/// and in-plane `(w, u)`.
pub fn reduced_assemblies<T: Real>(
    frame: &Frame<T>,
    split: &PlanarSplit<T>,
    options: AssemblyOptions<T>,
) -> (SecularAssembly<T>, SecularAssembly<T>) {
    let h1 = SecularAssembly::for_block(
        frame.clone(),
        RowPlan::out_of_plane(split.normal, split.p1, split.p2),
        FieldSelection::OUT_OF_PLANE,
        options,
    );
    let h2 = SecularAssembly::for_block(
        frame.clone(),
        RowPlan::in_plane(split.normal, split.p1, split.p2),
        FieldSelection::IN_PLANE,
        options,
    );
    (h1, h2)
}
