//! Field values along edges: the four scalar fields `(v, w, u, eta)` of a beam
//! with enough derivatives to evaluate traces and apply the differential
//! operator, plus polynomial test fields.

use nalgebra::SVector;

use crate::scalar::Real;

/// Values and derivatives of the four fields at one point of one edge.
/// Bending fields carry derivatives through order 4, rod fields through
/// order 2; derivatives are taken in the edge direction `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldEval<T: Real> {
    pub v: [T; 5],
    pub w: [T; 5],
    pub u: [T; 3],
    pub eta: [T; 3],
}

impl<T: Real> FieldEval<T> {
    pub fn zero() -> Self {
        FieldEval {
            v: [T::zero(); 5],
            w: [T::zero(); 5],
            u: [T::zero(); 3],
            eta: [T::zero(); 3],
        }
    }

    /// The 12 endpoint quantities `(v, v', v'', v''', w, w', w'', w''', u, u',
    /// eta, eta')` in trace order.
    pub fn trace(&self) -> SVector<T, 12> {
        SVector::<T, 12>::from_row_slice(&[
            self.v[0],
            self.v[1],
            self.v[2],
            self.v[3],
            self.w[0],
            self.w[1],
            self.w[2],
            self.w[3],
            self.u[0],
            self.u[1],
            self.eta[0],
            self.eta[1],
        ])
    }
}

/// A field configuration defined edge-wise on a frame.
pub trait EdgeField<T: Real> {
    fn eval(&self, edge_idx: usize, x: T) -> FieldEval<T>;

    /// Whether the stored representation provides the derivatives needed to
    /// apply the differential operator (order 4 for bending, 2 for rods).
    fn operator_smooth(&self) -> bool {
        true
    }
}

/// Evaluate a polynomial (ascending coefficients) and derivatives at `x`.
pub fn poly_derivs<T: Real, const N: usize>(coeffs: &[T], x: T) -> [T; N] {
    let mut out = [T::zero(); N];
    let mut c: Vec<T> = coeffs.to_vec();
    for slot in out.iter_mut() {
        let mut acc = T::zero();
        for &a in c.iter().rev() {
            acc = acc * x + a;
        }
        *slot = acc;
        c = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &a)| a * T::from_usize(k).unwrap())
            .collect();
    }
    out
}

/// Per-edge polynomial fields; smooth, so valid operator-domain test inputs.
#[derive(Debug, Clone)]
pub struct PolyField<T: Real> {
    pub edges: Vec<PolyEdge<T>>,
}

#[derive(Debug, Clone)]
pub struct PolyEdge<T: Real> {
    pub v: Vec<T>,
    pub w: Vec<T>,
    pub u: Vec<T>,
    pub eta: Vec<T>,
}

impl<T: Real> EdgeField<T> for PolyField<T> {
    fn eval(&self, edge_idx: usize, x: T) -> FieldEval<T> {
        let e = &self.edges[edge_idx];
        FieldEval {
            v: poly_derivs(&e.v, x),
            w: poly_derivs(&e.w, x),
            u: poly_derivs(&e.u, x),
            eta: poly_derivs(&e.eta, x),
        }
    }
}
