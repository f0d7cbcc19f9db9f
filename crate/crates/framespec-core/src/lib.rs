//! Vibrational analysis of three-dimensional frames of Euler–Bernoulli beams
//! joined at rigid (and related) joints, modelled as metric graphs.
//!
//! Each beam carries four scalar fields: two lateral displacements `v`, `w`
//! (bending), the axial displacement `u` (compression) and the in-axis angular
//! displacement `eta` (torsion). Joints couple the fields of incident beams
//! through continuity of displacement and rotation plus balance of forces and
//! moments. The eigenvalue problem is solved two independent ways:
//!
//! * [`secular`] — closed-form edge solutions at a trial eigenvalue are coupled
//!   through the joint conditions into a parametrized matrix `M(λ)`; eigenvalues
//!   are the values where `M(λ)` becomes singular (dynamic-stiffness method).
//! * [`fem`] — a Hermite-cubic / linear finite-element discretization of the
//!   energy form, used as an oracle to validate the secular pipeline and to
//!   count eigenvalues on an interval.
//!
//! [`planar`] decouples flat frames into out-of-plane and in-plane problems;
//! [`symmetry`] reduces symmetric frames by one-dimensional irreducible
//! representations of their symmetry group.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`]
//! (`f64` for production use; `f32` builds are supported for experimentation).
//! Concrete `f64` aliases are exported at the crate root.
//!
//! ```
//! use framespec_core::models;
//! use framespec_core::secular::SecularAssembly;
//!
//! let frame = models::planar_star_default::<f64>();
//! let assembly = SecularAssembly::new(frame);
//! let roots = assembly.eigenvalues(1.0, 10.0, 600)?;
//! assert!((roots[0].lambda - 4.661107176).abs() < 1e-7);
//! let mode = assembly.mode_shape(roots[0].lambda)?;
//! let (fields, _) = mode.eval(0, 0.5)?;
//! assert!(fields.v[0].is_finite());
//! # Ok::<(), framespec_core::Error>(())
//! ```

pub mod conditions;
pub mod edge_solutions;
pub mod error;
pub mod fem;
pub mod fields;
pub mod geometry;
pub mod io;
pub mod kinematics;
pub mod linalg;
pub mod models;
pub mod planar;
pub mod quadrature;
pub mod scalar;
pub mod secular;
pub mod symmetry;

pub use error::Error;
pub use scalar::Real;

/// 3D frame with `f64` coordinates.
pub type Frame64 = geometry::Frame<f64>;
/// Real secular assembly with `f64` scalars.
pub type SecularAssembly64 = secular::SecularAssembly<f64>;
/// Complex secular assembly (symmetry quotients) over `f64`.
pub type SecularAssemblyC64 = secular::SecularAssembly<num_complex::Complex<f64>>;
/// Mode shape with `f64` coefficients.
pub type ModeShape64 = secular::ModeShape<f64>;
/// Finite-element system with `f64` matrices.
pub type FemSystem64 = fem::FemSystem<f64>;
/// Frame symmetry data over `f64`.
pub type FrameSymmetry64 = symmetry::FrameSymmetry<f64>;
