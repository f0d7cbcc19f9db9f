//! Dense linear-algebra helpers: SVD-based nullspaces, scaled determinants and
//! symmetric generalized eigensolvers used by the secular and FEM pipelines.

use nalgebra::{ComplexField, DMatrix, DVector, RealField};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Singular values plus an orthonormal basis of the numerical nullspace.
pub struct Spectrum<S: ComplexField> {
    pub sigma_max: S::RealField,
    pub sigma_min: S::RealField,
    /// Right singular vectors whose singular value is below `rel_tol * sigma_max`.
    pub nullspace: Vec<DVector<S>>,
}

/// Full SVD pass over `m` classifying the nullspace at relative tolerance `rel_tol`.
pub fn svd_spectrum<S: ComplexField>(m: &DMatrix<S>, rel_tol: S::RealField) -> Spectrum<S>
where
    S::RealField: Real,
{
    let svd = m.clone().svd(false, true);
    let sv = &svd.singular_values;
    let mut sigma_max = S::RealField::zero();
    for s in sv.iter() {
        if *s > sigma_max {
            sigma_max = s.clone();
        }
    }
    let mut sigma_min = sigma_max.clone();
    for s in sv.iter() {
        if *s < sigma_min {
            sigma_min = s.clone();
        }
    }
    let v_t = svd.v_t.expect("svd requested v_t");
    // Columns may outnumber singular values for wide matrices; those directions
    // are exact nullspace members.
    let mut nullspace = Vec::new();
    let tol = sigma_max.clone() * rel_tol;
    for (i, s) in sv.iter().enumerate() {
        if *s <= tol || sigma_max.is_zero() {
            nullspace.push(v_t.row(i).map(|x| x.conjugate()).transpose());
        }
    }
    for i in sv.len()..v_t.nrows() {
        nullspace.push(v_t.row(i).map(|x| x.conjugate()).transpose());
    }
    if m.ncols() > v_t.nrows() {
        // nalgebra's thin SVD does not return the orthogonal complement; extend
        // by Gram-Schmidt against the rows of v_t when the matrix is wide.
        let mut basis: Vec<DVector<S>> = (0..v_t.nrows())
            .map(|i| v_t.row(i).map(|x| x.conjugate()).transpose())
            .collect();
        for j in 0..m.ncols() {
            let mut cand = DVector::<S>::zeros(m.ncols());
            cand[j] = S::one();
            for b in &basis {
                let proj = b.dotc(&cand);
                cand -= b * proj;
            }
            let n = cand.norm();
            if n > lit::<S::RealField>(1e-8) {
                let cand = cand / S::from_real(n);
                basis.push(cand.clone());
                nullspace.push(cand);
            }
        }
    }
    Spectrum {
        sigma_max,
        sigma_min,
        nullspace,
    }
}

/// Smallest and largest singular values of `m`.
pub fn sigma_range<S: ComplexField>(m: &DMatrix<S>) -> (S::RealField, S::RealField) {
    let sv = m.clone().singular_values();
    let mut lo = S::RealField::max_value().unwrap();
    let mut hi = S::RealField::zero();
    for s in sv.iter() {
        if *s < lo {
            lo = s.clone();
        }
        if *s > hi {
            hi = s.clone();
        }
    }
    if m.nrows() < m.ncols() {
        // Wide matrices always have a kernel.
        lo = S::RealField::zero();
    }
    (lo, hi)
}

/// Numerical rank at relative tolerance `rel_tol`.
pub fn rank<S: ComplexField>(m: &DMatrix<S>, rel_tol: S::RealField) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let mut hi = S::RealField::zero();
    for s in sv.iter() {
        if *s > hi {
            hi = s.clone();
        }
    }
    let tol = hi * rel_tol;
    sv.iter().filter(|s| **s > tol).count()
}

/// Determinant after rescaling every row to unit infinity norm.
///
/// Row scaling by positive factors preserves the zero set and the sign of the
/// determinant while keeping the value in floating-point range even when the
/// entries contain large hyperbolic terms.
pub fn det_row_scaled<S: ComplexField>(m: &DMatrix<S>) -> S
where
    S::RealField: Real,
{
    let mut scaled = m.clone();
    for mut row in scaled.row_iter_mut() {
        let mut norm = S::RealField::zero();
        for x in row.iter() {
            let a = x.clone().abs();
            if a > norm {
                norm = a;
            }
        }
        if norm > S::RealField::zero() {
            let inv = S::from_real(S::RealField::one() / norm);
            for x in row.iter_mut() {
                *x *= inv.clone();
            }
        }
    }
    scaled.lu().determinant()
}

/// All eigenpairs of `K x = lambda G x` with symmetric `K` and positive-definite
/// `G`, ascending. Dense path for moderate problem sizes.
pub fn sym_generalized_eigen_dense<T: Real>(
    k: &DMatrix<T>,
    g: &DMatrix<T>,
) -> Result<(Vec<T>, DMatrix<T>)> {
    let chol = g
        .clone()
        .cholesky()
        .ok_or(Error::Factorization("Gram matrix is not positive definite"))?;
    let l = chol.l();
    // A = L^-1 K L^-T, symmetric.
    let mut a = k.clone();
    l.solve_lower_triangular_mut(&mut a);
    a.transpose_mut();
    l.solve_lower_triangular_mut(&mut a);
    // Symmetrize against rounding.
    let a = (a.clone() + a.transpose()) * lit::<T>(0.5);
    let se = a.symmetric_eigen();
    let n = k.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let mut vals = Vec::with_capacity(n);
    let mut vecs = DMatrix::<T>::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vals.push(se.eigenvalues[i]);
        let y = se.eigenvectors.column(i).into_owned();
        // x = L^-T y
        let mut x = y;
        l.transpose().solve_upper_triangular_mut(&mut x);
        let nrm = (x.dot(&(g * &x))).sqrt();
        vecs.set_column(col, &(x / nrm));
    }
    Ok((vals, vecs))
}

/// Lowest `count` eigenpairs of `K x = lambda G x` by shift-inverted subspace
/// iteration with Rayleigh-Ritz projection; stops when the Ritz values
/// stagnate below `rel_tol`. Shift-inversion keeps the accuracy of the small
/// eigenvalues independent of the large stiffness norm.
pub fn sym_generalized_eigen_lowest<T: Real>(
    k: &DMatrix<T>,
    g: &DMatrix<T>,
    count: usize,
    rel_tol: T,
) -> Result<Vec<(T, DVector<T>)>> {
    let n = k.nrows();
    let count = count.min(n);
    if n <= 24 {
        let (vals, vecs) = sym_generalized_eigen_dense(k, g)?;
        return Ok((0..count)
            .map(|i| (vals[i], vecs.column(i).into_owned()))
            .collect());
    }

    let m = (2 * count + 8).min(n);
    // Shift so the factored matrix is positive definite even when K has a
    // rigid-body kernel.
    let scale = k.trace() / g.trace();
    let mut chol = k.clone().cholesky();
    if chol.is_none() {
        let shift = scale * lit::<T>(1e-8) + lit::<T>(1e-10);
        chol = (k + g * shift).cholesky();
    }
    let chol = chol.ok_or(Error::Factorization("shifted stiffness factorization"))?;

    // Deterministic pseudo-random start block.
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut x = DMatrix::<T>::from_fn(n, m, |_, _| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        lit::<T>(((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5)
    });

    let mut prev: Option<Vec<T>> = None;
    for iter in 0..300 {
        // Power step on (K + shift G)^-1 G.
        let y = chol.solve(&(g * &x));
        // Orthonormalize before projecting to keep the small problem well posed.
        let q = y.qr().q();
        let kr = q.transpose() * k * &q;
        let gr = q.transpose() * g * &q;
        let (vals, vecs) = sym_generalized_eigen_dense(&kr, &gr)?;
        x = &q * &vecs;

        let stagnant = prev.as_ref().is_some_and(|p| {
            (0..count)
                .all(|i| (vals[i] - p[i]).abs() <= rel_tol * vals[i].abs().max(lit::<T>(1e-300)))
        });
        prev = Some(vals[..count].to_vec());
        if stagnant && iter >= 2 {
            return Ok((0..count)
                .map(|i| (vals[i], x.column(i).into_owned()))
                .collect());
        }
    }
    Err(Error::NoConvergence(300))
}
