//! Closed-form fundamental systems of the per-edge eigenvalue equations at a
//! fixed spectral parameter, and the linear maps from solution coefficients to
//! endpoint traces.
//!
//! For `lambda > 0` the bending fields solve `a v'''' = lambda v` with the
//! four-dimensional system `{cosh, sinh, cos, sin}(mu x)`, `mu = (lambda/a)^(1/4)`;
//! the rod fields solve `-c u'' = lambda u` with `{cos, sin}(beta x)`,
//! `beta = (lambda/c)^(1/2)`. `lambda = 0` needs a polynomial system instead and
//! is excluded here; spectral scans start strictly above zero.

use nalgebra::{DMatrix, SVector};

use crate::error::{Error, Result};
use crate::fields::FieldEval;
use crate::geometry::{Edge, Endpoint, MaterialParams};
use crate::scalar::{lit, to_f64, Real};

/// Hyperbolic arguments above this destroy determinant information in double
/// precision; larger frames/frequencies must be rescaled by the caller.
pub const MAX_HYPERBOLIC_ARG: f64 = 300.0;

/// Wavenumbers of one edge at one `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumbers<T: Real> {
    pub mu_a: T,
    pub mu_b: T,
    pub beta_c: T,
    pub beta_d: T,
}

impl<T: Real> Wavenumbers<T> {
    pub fn new(lambda: T, materials: &MaterialParams<T>) -> Result<Self> {
        if lambda <= T::zero() {
            return Err(Error::NonPositiveLambda(to_f64(lambda)));
        }
        let quarter = lit::<T>(0.25);
        Ok(Wavenumbers {
            mu_a: (lambda / materials.a).powf(quarter),
            mu_b: (lambda / materials.b).powf(quarter),
            beta_c: (lambda / materials.c).sqrt(),
            beta_d: (lambda / materials.d).sqrt(),
        })
    }
}

/// Values and derivatives (orders 0..=4) of the bending fundamental system
/// `[cosh, sinh, cos, sin](mu x)` at one point.
#[derive(Debug, Clone, Copy)]
pub struct BendingEval<T: Real> {
    /// `d[order][column]`
    pub d: [[T; 4]; 5],
    pub mu: T,
}

/// Values and derivatives (orders 0..=2) of the rod fundamental system
/// `[cos, sin](beta x)`.
#[derive(Debug, Clone, Copy)]
pub struct RodEval<T: Real> {
    pub d: [[T; 2]; 3],
    pub beta: T,
}

fn check_arg<T: Real>(arg: T) -> Result<()> {
    if to_f64(arg) > MAX_HYPERBOLIC_ARG {
        return Err(Error::ArgumentOverflow {
            arg: to_f64(arg),
            max: MAX_HYPERBOLIC_ARG,
        });
    }
    Ok(())
}

/// Bending system for stiffness `a` at position `x`.
pub fn bending_basis<T: Real>(lambda: T, stiffness: T, x: T) -> Result<BendingEval<T>> {
    if lambda <= T::zero() {
        return Err(Error::NonPositiveLambda(to_f64(lambda)));
    }
    let mu = (lambda / stiffness).powf(lit::<T>(0.25));
    let arg = mu * x;
    check_arg(arg)?;
    let (ch, sh, c, s) = (arg.cosh(), arg.sinh(), arg.cos(), arg.sin());
    // derivative cycle: cosh -> sinh -> cosh ...; cos -> -sin -> -cos -> sin -> cos
    let base = [
        [ch, sh, c, s],
        [sh, ch, -s, c],
        [ch, sh, -c, -s],
        [sh, ch, s, -c],
        [ch, sh, c, s],
    ];
    let mut d = [[T::zero(); 4]; 5];
    let mut scale = T::one();
    for (order, row) in base.iter().enumerate() {
        for col in 0..4 {
            d[order][col] = row[col] * scale;
        }
        scale *= mu;
    }
    Ok(BendingEval { d, mu })
}

/// Rod system for stiffness `c` at position `x`.
pub fn rod_basis<T: Real>(lambda: T, stiffness: T, x: T) -> Result<RodEval<T>> {
    if lambda <= T::zero() {
        return Err(Error::NonPositiveLambda(to_f64(lambda)));
    }
    let beta = (lambda / stiffness).sqrt();
    let arg = beta * x;
    let (c, s) = (arg.cos(), arg.sin());
    let base = [[c, s], [-s, c], [-c, -s]];
    let mut d = [[T::zero(); 2]; 3];
    let mut scale = T::one();
    for (order, row) in base.iter().enumerate() {
        for col in 0..2 {
            d[order][col] = row[col] * scale;
        }
        scale *= beta;
    }
    Ok(RodEval { d, beta })
}

/// Analytic reduction applied at the origin endpoint of an edge whose origin
/// is a degree-one vertex of the given kind: the coefficient basis shrinks to
/// the subspace already satisfying that endpoint's conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndReduction {
    None,
    /// value and slope vanish: bending `{sinh - sin, cosh - cos}`, rods `{sin}`
    /// for the value-type field.
    Clamped,
    /// second and third derivative vanish: `{sinh + sin, cosh + cos}`, `{cos}`.
    Free,
    /// displacement zero, moments free: bending `{sin, sinh}`; `u: {sin}`, `eta: {cos}`.
    Pinned,
    /// rotation zero, forces free: bending `{cos, cosh}`; `u: {cos}`, `eta: {sin}`.
    Guided,
}

impl EndReduction {
    /// Reduced bending columns in `[cosh, sinh, cos, sin]` coordinates.
    pub fn bending_columns<T: Real>(self) -> Vec<SVector<T, 4>> {
        let one = T::one();
        let zero = T::zero();
        match self {
            EndReduction::None => vec![
                SVector::from([one, zero, zero, zero]),
                SVector::from([zero, one, zero, zero]),
                SVector::from([zero, zero, one, zero]),
                SVector::from([zero, zero, zero, one]),
            ],
            EndReduction::Clamped => vec![
                SVector::from([zero, one, zero, -one]),
                SVector::from([one, zero, -one, zero]),
            ],
            EndReduction::Free => vec![
                SVector::from([zero, one, zero, one]),
                SVector::from([one, zero, one, zero]),
            ],
            EndReduction::Pinned => vec![
                SVector::from([zero, zero, zero, one]),
                SVector::from([zero, one, zero, zero]),
            ],
            EndReduction::Guided => vec![
                SVector::from([zero, zero, one, zero]),
                SVector::from([one, zero, zero, zero]),
            ],
        }
    }

    /// Reduced columns for the axial field `u` in `[cos, sin]` coordinates.
    pub fn axial_columns<T: Real>(self) -> Vec<SVector<T, 2>> {
        let one = T::one();
        let zero = T::zero();
        match self {
            EndReduction::None => vec![SVector::from([one, zero]), SVector::from([zero, one])],
            // u(0) = 0 for clamped and pinned ends
            EndReduction::Clamped | EndReduction::Pinned => vec![SVector::from([zero, one])],
            // u'(0) = 0 for free and guided ends
            EndReduction::Free | EndReduction::Guided => vec![SVector::from([one, zero])],
        }
    }

    /// Reduced columns for the torsion field `eta` in `[cos, sin]` coordinates.
    pub fn torsion_columns<T: Real>(self) -> Vec<SVector<T, 2>> {
        let one = T::one();
        let zero = T::zero();
        match self {
            EndReduction::None => vec![SVector::from([one, zero]), SVector::from([zero, one])],
            // eta(0) = 0 for clamped and guided ends
            EndReduction::Clamped | EndReduction::Guided => vec![SVector::from([zero, one])],
            // eta'(0) = 0 for free and pinned ends
            EndReduction::Free | EndReduction::Pinned => vec![SVector::from([one, zero])],
        }
    }
}

/// Which of the four fields participate in an assembly (planar problems use
/// strict subsets).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSelection {
    pub v: bool,
    pub w: bool,
    pub u: bool,
    pub eta: bool,
}

impl FieldSelection {
    pub const ALL: FieldSelection = FieldSelection {
        v: true,
        w: true,
        u: true,
        eta: true,
    };
    /// Out-of-plane block of a planar frame: `(v, eta)`.
    pub const OUT_OF_PLANE: FieldSelection = FieldSelection {
        v: true,
        w: false,
        u: false,
        eta: true,
    };
    /// In-plane block of a planar frame: `(w, u)`.
    pub const IN_PLANE: FieldSelection = FieldSelection {
        v: false,
        w: true,
        u: true,
        eta: false,
    };
}

/// Coefficient basis of one edge inside an assembly.
#[derive(Debug, Clone, Copy)]
pub struct EdgeBasisSpec {
    pub origin_reduction: EndReduction,
    pub fields: FieldSelection,
}

impl EdgeBasisSpec {
    pub fn full() -> Self {
        EdgeBasisSpec {
            origin_reduction: EndReduction::None,
            fields: FieldSelection::ALL,
        }
    }

    pub fn column_counts(&self) -> (usize, usize, usize, usize) {
        let r = self.origin_reduction;
        let nv = if self.fields.v {
            r.bending_columns::<f64>().len()
        } else {
            0
        };
        let nw = if self.fields.w {
            r.bending_columns::<f64>().len()
        } else {
            0
        };
        let nu = if self.fields.u {
            r.axial_columns::<f64>().len()
        } else {
            0
        };
        let ne = if self.fields.eta {
            r.torsion_columns::<f64>().len()
        } else {
            0
        };
        (nv, nw, nu, ne)
    }

    pub fn column_count(&self) -> usize {
        let (a, b, c, d) = self.column_counts();
        a + b + c + d
    }

    /// Matrix taking reduced coefficients to the full 12 standard coefficients
    /// `[v: cosh,sinh,cos,sin | w: ... | u: cos,sin | eta: cos,sin]`.
    pub fn expansion<T: Real>(&self) -> DMatrix<T> {
        let n = self.column_count();
        let mut m = DMatrix::<T>::zeros(12, n);
        let mut col = 0;
        if self.fields.v {
            for c in self.origin_reduction.bending_columns::<T>() {
                for r in 0..4 {
                    m[(r, col)] = c[r];
                }
                col += 1;
            }
        }
        if self.fields.w {
            for c in self.origin_reduction.bending_columns::<T>() {
                for r in 0..4 {
                    m[(4 + r, col)] = c[r];
                }
                col += 1;
            }
        }
        if self.fields.u {
            for c in self.origin_reduction.axial_columns::<T>() {
                for r in 0..2 {
                    m[(8 + r, col)] = c[r];
                }
                col += 1;
            }
        }
        if self.fields.eta {
            for c in self.origin_reduction.torsion_columns::<T>() {
                for r in 0..2 {
                    m[(10 + r, col)] = c[r];
                }
                col += 1;
            }
        }
        m
    }
}

/// Trace of the full 12-column standard basis at an endpoint: a 12x12 matrix
/// whose rows are the trace components `(v, v', v'', v''', w, ..., eta')` and
/// whose columns are the standard coefficients.
pub fn full_trace_matrix<T: Real>(edge: &Edge<T>, lambda: T, end: Endpoint) -> Result<DMatrix<T>> {
    let x = match end {
        Endpoint::Origin => T::zero(),
        Endpoint::Terminus => edge.length,
    };
    // budget check uses the edge length so both endpoints agree on feasibility
    let wn = Wavenumbers::new(lambda, &edge.materials)?;
    check_arg(wn.mu_a * edge.length)?;
    check_arg(wn.mu_b * edge.length)?;

    let bv = bending_basis(lambda, edge.materials.a, x)?;
    let bw = bending_basis(lambda, edge.materials.b, x)?;
    let ru = rod_basis(lambda, edge.materials.c, x)?;
    let re = rod_basis(lambda, edge.materials.d, x)?;

    let mut m = DMatrix::<T>::zeros(12, 12);
    for order in 0..4 {
        for col in 0..4 {
            m[(order, col)] = bv.d[order][col];
            m[(4 + order, 4 + col)] = bw.d[order][col];
        }
    }
    for order in 0..2 {
        for col in 0..2 {
            m[(8 + order, 8 + col)] = ru.d[order][col];
            m[(10 + order, 10 + col)] = re.d[order][col];
        }
    }
    Ok(m)
}

/// Trace map of a (possibly reduced) edge basis: `12 x column_count`.
pub fn trace_map<T: Real>(
    edge: &Edge<T>,
    spec: &EdgeBasisSpec,
    lambda: T,
    end: Endpoint,
) -> Result<DMatrix<T>> {
    Ok(full_trace_matrix(edge, lambda, end)? * spec.expansion::<T>())
}

/// Evaluate the fields encoded by 12 standard coefficients at position `x`.
pub fn eval_edge_fields<T: Real>(
    edge: &Edge<T>,
    lambda: T,
    coeffs: &[T; 12],
    x: T,
) -> Result<FieldEval<T>> {
    if x < T::zero() || x > edge.length {
        return Err(Error::OutOfRange {
            x: to_f64(x),
            len: to_f64(edge.length),
        });
    }
    let bv = bending_basis(lambda, edge.materials.a, x)?;
    let bw = bending_basis(lambda, edge.materials.b, x)?;
    let ru = rod_basis(lambda, edge.materials.c, x)?;
    let re = rod_basis(lambda, edge.materials.d, x)?;
    let mut out = FieldEval::zero();
    for order in 0..5 {
        for col in 0..4 {
            out.v[order] += bv.d[order][col] * coeffs[col];
            out.w[order] += bw.d[order][col] * coeffs[4 + col];
        }
    }
    for order in 0..3 {
        for col in 0..2 {
            out.u[order] += ru.d[order][col] * coeffs[8 + col];
            out.eta[order] += re.d[order][col] * coeffs[10 + col];
        }
    }
    Ok(out)
}
