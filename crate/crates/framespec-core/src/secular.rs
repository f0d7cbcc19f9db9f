//! The secular (dynamic-stiffness) eigenvalue pipeline.
//!
//! At a trial `lambda > 0` every edge carries a closed-form solution basis;
//! the joint conditions couple the coefficients into a square matrix
//! `M(lambda)`. Eigenvalues are the values where `M` develops a kernel,
//! detected by determinant sign changes and by dips of the smallest singular
//! value (the latter also catches even-multiplicity roots, where the
//! determinant does not change sign). Kernel vectors map back to per-edge
//! solution coefficients, i.e. to evaluable mode shapes.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::conditions::{rows_to_matrix, vertex_rows, ConditionRow, RowPlan};
use crate::edge_solutions::{
    eval_edge_fields, trace_map, EdgeBasisSpec, EndReduction, FieldSelection,
};
use crate::error::{Error, Result};
use crate::fields::{EdgeField, FieldEval};
use crate::geometry::{Endpoint, Frame, JointKind};
use crate::quadrature;
use crate::scalar::{lit, to_f64, Real};

/// Tunables of a secular assembly.
#[derive(Debug, Clone, Copy)]
pub struct AssemblyOptions<T: Real> {
    /// Impose degree-one endpoint conditions analytically by shrinking the
    /// edge bases (clamped/free/pinned/guided origins) instead of emitting rows.
    pub reduce_endpoints: bool,
    /// Rescale rows to unit infinity norm before determinant evaluation.
    pub row_scaling: bool,
    /// Singular values below `nullity_rel_tol * sigma_max` count as zero.
    pub nullity_rel_tol: T,
    /// Angles within this distance of `pi/2` take the Dirichlet branch.
    pub spring_tol: T,
    /// Panels of the composite quadrature used for mode normalization.
    pub quadrature_panels: usize,
}

impl<T: Real> Default for AssemblyOptions<T> {
    fn default() -> Self {
        AssemblyOptions {
            reduce_endpoints: true,
            row_scaling: true,
            nullity_rel_tol: lit(1e-8),
            spring_tol: lit(1e-12),
            quadrature_panels: 64,
        }
    }
}

/// Which detector flagged a candidate or root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    DetSignChange,
    SigmaMinDip,
    Both,
}

impl std::fmt::Display for Detector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Detector::DetSignChange => write!(f, "det"),
            Detector::SigmaMinDip => write!(f, "sigma_min"),
            Detector::Both => write!(f, "both"),
        }
    }
}

/// A scan sample: scaled determinant (signed for real assemblies, modulus for
/// complex ones) and smallest singular value.
#[derive(Debug, Clone, Copy)]
pub struct ScanSample<T: Real> {
    pub lambda: T,
    pub det_scaled: T,
    pub sigma_min: T,
}

/// Bracket or dip seed produced by a scan.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<T: Real> {
    pub low: T,
    pub high: T,
    pub seed: T,
    pub detector: Detector,
}

/// Scan output: the raw samples plus detected candidates.
#[derive(Debug, Clone)]
pub struct ScanResult<T: Real> {
    pub samples: Vec<ScanSample<T>>,
    pub candidates: Vec<Candidate<T>>,
}

/// A refined eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct Root<T: Real> {
    pub lambda: T,
    pub nullity: usize,
    pub detector: Detector,
}

/// Default scan resolution: 2000 uniform steps per decade of `lambda`.
pub fn default_steps<T: Real>(lambda_min: T, lambda_max: T) -> usize {
    let decades = to_f64((lambda_max / lambda_min).log10()).max(0.1);
    ((decades * 2000.0).ceil() as usize).max(2)
}

/// Column bookkeeping of an assembly.
#[derive(Debug, Clone)]
pub struct ColumnLayout {
    pub offsets: Vec<usize>,
    pub total: usize,
}

/// The `lambda`-parametrized global matrix of a frame (or of a reduced block
/// or symmetry quotient of one).
///
/// Real assemblies use `S = T`; symmetry quotients with complex characters use
/// `S = Complex<T>`. The assembly is immutable and cheap to share; `lambda`
/// evaluations are independent and run concurrently during scans.
#[derive(Debug, Clone)]
pub struct SecularAssembly<S: ComplexField>
where
    S::RealField: Real,
{
    frame: Frame<S::RealField>,
    rows: Vec<ConditionRow<S::RealField>>,
    edge_specs: Vec<EdgeBasisSpec>,
    layout: ColumnLayout,
    /// Optional coefficient constraint (symmetry quotient): the assembled
    /// matrix is `rows x trace x constraint`.
    constraint: Option<DMatrix<S>>,
    options: AssemblyOptions<S::RealField>,
    /// Whether determinant signs are meaningful (false for complex quotients).
    real_determinant: bool,
}

/// Decide the analytic endpoint reduction for every edge and the set of
/// vertices whose conditions the reductions absorb.
pub fn endpoint_reductions<T: Real>(
    frame: &Frame<T>,
    enabled: bool,
) -> (Vec<EndReduction>, Vec<bool>) {
    let ne = frame.edges().len();
    let mut reductions = vec![EndReduction::None; ne];
    let mut absorbed = vec![false; frame.vertices().len()];
    if !enabled {
        return (reductions, absorbed);
    }
    for (vi, vertex) in frame.vertices().iter().enumerate() {
        if frame.degree(vi) != 1 {
            continue;
        }
        let (ei, end) = frame.incident(vi)[0];
        if end != Endpoint::Origin {
            continue;
        }
        let red = match vertex.joint {
            JointKind::Clamped => EndReduction::Clamped,
            JointKind::FreeRigid => EndReduction::Free,
            JointKind::Pinned => EndReduction::Pinned,
            JointKind::Guided => EndReduction::Guided,
            JointKind::Spring { .. } => continue,
        };
        reductions[ei] = red;
        absorbed[vi] = true;
    }
    (reductions, absorbed)
}

fn layout_of(specs: &[EdgeBasisSpec]) -> ColumnLayout {
    let mut offsets = Vec::with_capacity(specs.len());
    let mut total = 0;
    for s in specs {
        offsets.push(total);
        total += s.column_count();
    }
    ColumnLayout { offsets, total }
}

impl<T: Real> SecularAssembly<T> {
    /// Full three-dimensional assembly of a frame with default options.
    pub fn new(frame: Frame<T>) -> Self {
        Self::with_options(frame, AssemblyOptions::default())
    }

    pub fn with_options(frame: Frame<T>, options: AssemblyOptions<T>) -> Self {
        Self::for_block(frame, RowPlan::global(), FieldSelection::ALL, options)
    }

    /// Assembly over a field subset with a custom projection plan (used for
    /// the planar blocks).
    pub fn for_block(
        frame: Frame<T>,
        plan: RowPlan<T>,
        fields: FieldSelection,
        options: AssemblyOptions<T>,
    ) -> Self {
        let (reductions, absorbed) = endpoint_reductions(&frame, options.reduce_endpoints);
        let specs: Vec<EdgeBasisSpec> = reductions
            .iter()
            .map(|&origin_reduction| EdgeBasisSpec {
                origin_reduction,
                fields,
            })
            .collect();
        let mut rows = Vec::new();
        for vi in 0..frame.vertices().len() {
            if absorbed[vi] {
                continue;
            }
            rows.extend(vertex_rows(&frame, vi, &plan, options.spring_tol));
        }
        let layout = layout_of(&specs);
        SecularAssembly {
            frame,
            rows,
            edge_specs: specs,
            layout,
            constraint: None,
            options,
            real_determinant: true,
        }
    }
}

impl<S: ComplexField> SecularAssembly<S>
where
    S::RealField: Real,
{
    /// Assembly from explicit parts (symmetry quotients).
    pub fn from_parts(
        frame: Frame<S::RealField>,
        rows: Vec<ConditionRow<S::RealField>>,
        edge_specs: Vec<EdgeBasisSpec>,
        constraint: Option<DMatrix<S>>,
        options: AssemblyOptions<S::RealField>,
        real_determinant: bool,
    ) -> Self {
        let layout = layout_of(&edge_specs);
        SecularAssembly {
            frame,
            rows,
            edge_specs,
            layout,
            constraint,
            options,
            real_determinant,
        }
    }

    pub fn frame(&self) -> &Frame<S::RealField> {
        &self.frame
    }

    pub fn rows(&self) -> &[ConditionRow<S::RealField>] {
        &self.rows
    }

    pub fn edge_specs(&self) -> &[EdgeBasisSpec] {
        &self.edge_specs
    }

    pub fn options(&self) -> &AssemblyOptions<S::RealField> {
        &self.options
    }

    /// Number of unknown coefficients (matrix columns).
    pub fn unknowns(&self) -> usize {
        self.constraint
            .as_ref()
            .map_or(self.layout.total, |z| z.ncols())
    }

    /// Number of condition rows.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// The global matrix at `lambda`.
    pub fn assemble(&self, lambda: S::RealField) -> Result<DMatrix<S>> {
        let mut maps = Vec::with_capacity(self.frame.edges().len());
        for (e, spec) in self.frame.edges().iter().zip(&self.edge_specs) {
            maps.push([
                trace_map(e, spec, lambda, Endpoint::Origin)?,
                trace_map(e, spec, lambda, Endpoint::Terminus)?,
            ]);
        }
        let m = rows_to_matrix::<S, S::RealField>(
            &self.rows,
            &maps,
            &self.layout.offsets,
            self.layout.total,
            None,
        );
        Ok(match &self.constraint {
            Some(z) => m * z,
            None => m,
        })
    }

    fn row_scaled(&self, m: &mut DMatrix<S>) {
        for mut row in m.row_iter_mut() {
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
    }

    /// Normalize by the largest entry. Unlike per-row scaling this preserves
    /// kernels that appear through vanishing rows, so it is what the singular
    /// value detector and kernel extraction must use.
    fn globally_scaled(&self, m: &mut DMatrix<S>) {
        let mut norm = S::RealField::zero();
        for x in m.iter() {
            let a = x.clone().abs();
            if a > norm {
                norm = a;
            }
        }
        if norm > S::RealField::zero() {
            let inv = S::from_real(S::RealField::one() / norm);
            for x in m.iter_mut() {
                *x *= inv.clone();
            }
        }
    }

    /// Scaled determinant: signed value for real assemblies, modulus for
    /// complex ones. `None` for non-square assemblies.
    pub fn det_scaled(&self, lambda: S::RealField) -> Result<Option<S::RealField>> {
        let mut m = self.assemble(lambda)?;
        if m.nrows() != m.ncols() {
            return Ok(None);
        }
        if self.options.row_scaling {
            self.row_scaled(&mut m);
        }
        let det = m.lu().determinant();
        Ok(Some(if self.real_determinant {
            det.real()
        } else {
            det.abs()
        }))
    }

    /// Smallest and largest singular value at `lambda`, after global
    /// normalization.
    pub fn sigma_range(&self, lambda: S::RealField) -> Result<(S::RealField, S::RealField)> {
        let mut m = self.assemble(lambda)?;
        self.globally_scaled(&mut m);
        Ok(crate::linalg::sigma_range(&m))
    }

    fn sample(&self, lambda: S::RealField) -> Result<ScanSample<S::RealField>> {
        let det = self.det_scaled(lambda)?.unwrap_or(S::RealField::zero());
        let (smin, _) = self.sigma_range(lambda)?;
        Ok(ScanSample {
            lambda,
            det_scaled: det,
            sigma_min: smin,
        })
    }

    /// Uniform scan of `[lambda_min, lambda_max]` with both detectors.
    pub fn scan(
        &self,
        lambda_min: S::RealField,
        lambda_max: S::RealField,
        steps: usize,
    ) -> Result<ScanResult<S::RealField>>
    where
        S: Sync + Send,
    {
        let t = |x: f64| lit::<S::RealField>(x);
        if lambda_min <= S::RealField::zero() || lambda_max <= lambda_min {
            return Err(Error::InvalidInput(
                "scan interval must satisfy 0 < lambda_min < lambda_max".into(),
            ));
        }
        let steps = steps.max(2);
        let h = (lambda_max - lambda_min) / t((steps - 1) as f64);
        let grid: Vec<S::RealField> = (0..steps).map(|i| lambda_min + h * t(i as f64)).collect();
        let samples: Vec<ScanSample<S::RealField>> = grid
            .par_iter()
            .map(|&l| self.sample(l))
            .collect::<Result<_>>()?;

        let mut candidates = Vec::new();
        let square = self.unknowns() == self.row_count();
        for i in 1..samples.len() {
            let (a, b) = (&samples[i - 1], &samples[i]);
            if square
                && self.real_determinant
                && a.det_scaled != S::RealField::zero()
                && a.det_scaled * b.det_scaled < S::RealField::zero()
            {
                candidates.push(Candidate {
                    low: a.lambda,
                    high: b.lambda,
                    seed: (a.lambda + b.lambda) * t(0.5),
                    detector: Detector::DetSignChange,
                });
            }
        }
        for i in 1..samples.len().saturating_sub(1) {
            let s = &samples[i];
            if s.sigma_min < samples[i - 1].sigma_min && s.sigma_min <= samples[i + 1].sigma_min {
                candidates.push(Candidate {
                    low: samples[i - 1].lambda,
                    high: samples[i + 1].lambda,
                    seed: s.lambda,
                    detector: Detector::SigmaMinDip,
                });
            }
        }
        candidates.sort_by(|a, b| a.seed.partial_cmp(&b.seed).unwrap());
        Ok(ScanResult {
            samples,
            candidates,
        })
    }

    /// Refine one candidate to an eigenvalue: Brent-style bisection on the
    /// scaled determinant for sign changes, golden-section minimization of
    /// sigma_min for dips. Reports the kernel dimension at the root.
    pub fn refine(&self, cand: &Candidate<S::RealField>) -> Result<Root<S::RealField>> {
        let lambda = match cand.detector {
            Detector::DetSignChange | Detector::Both => self.bisect_det(cand.low, cand.high)?,
            Detector::SigmaMinDip => self.minimize_sigma(cand.low, cand.high)?,
        };
        let nullity = self.nullity(lambda)?;
        if nullity == 0 {
            return Err(Error::NotAnEigenvalue {
                lambda: to_f64(lambda),
            });
        }
        Ok(Root {
            lambda,
            nullity,
            detector: cand.detector,
        })
    }

    fn bisect_det(&self, mut a: S::RealField, mut b: S::RealField) -> Result<S::RealField> {
        let t = |x: f64| lit::<S::RealField>(x);
        let mut fa = self
            .det_scaled(a)?
            .ok_or(Error::Factorization("non-square determinant"))?;
        let fb = self
            .det_scaled(b)?
            .ok_or(Error::Factorization("non-square determinant"))?;
        if fa * fb > S::RealField::zero() {
            return Err(Error::InvalidInput("bracket does not change sign".into()));
        }
        let half = t(0.5);
        for _ in 0..200 {
            let mid = (a + b) * half;
            if (b - a) <= mid.abs() * t(1e-13) {
                return Ok(mid);
            }
            let fm = self
                .det_scaled(mid)?
                .ok_or(Error::Factorization("non-square determinant"))?;
            if fm == S::RealField::zero() {
                return Ok(mid);
            }
            if fa * fm < S::RealField::zero() {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        Err(Error::NoConvergence(200))
    }

    fn minimize_sigma(&self, mut a: S::RealField, mut b: S::RealField) -> Result<S::RealField> {
        let t = |x: f64| lit::<S::RealField>(x);
        let phi = t(0.618_033_988_749_894_9);
        let mut x1 = b - (b - a) * phi;
        let mut x2 = a + (b - a) * phi;
        let mut f1 = self.sigma_range(x1)?.0;
        let mut f2 = self.sigma_range(x2)?.0;
        for _ in 0..200 {
            if (b - a) <= ((a + b) * t(0.5)).abs() * t(1e-11) {
                break;
            }
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - (b - a) * phi;
                f1 = self.sigma_range(x1)?.0;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + (b - a) * phi;
                f2 = self.sigma_range(x2)?.0;
            }
        }
        Ok((a + b) * t(0.5))
    }

    /// Kernel dimension at `lambda` under the assembly's nullity tolerance.
    pub fn nullity(&self, lambda: S::RealField) -> Result<usize> {
        let mut m = self.assemble(lambda)?;
        self.globally_scaled(&mut m);
        let spec = crate::linalg::svd_spectrum(&m, self.options.nullity_rel_tol);
        Ok(spec.nullspace.len())
    }

    /// Scan, refine and deduplicate: the eigenvalues on an interval.
    pub fn eigenvalues(
        &self,
        lambda_min: S::RealField,
        lambda_max: S::RealField,
        steps: usize,
    ) -> Result<Vec<Root<S::RealField>>>
    where
        S: Sync + Send,
    {
        let scan = self.scan(lambda_min, lambda_max, steps)?;
        let mut roots: Vec<Root<S::RealField>> = scan
            .candidates
            .par_iter()
            .filter_map(|c| self.refine(c).ok())
            .collect();
        roots.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
        let tol = lit::<S::RealField>(1e-7);
        let mut merged: Vec<Root<S::RealField>> = Vec::new();
        for r in roots {
            match merged.last_mut() {
                Some(last) if (r.lambda - last.lambda).abs() <= tol * last.lambda.abs() => {
                    last.nullity = last.nullity.max(r.nullity);
                    if last.detector != r.detector {
                        last.detector = Detector::Both;
                    }
                }
                _ => merged.push(r),
            }
        }
        Ok(merged)
    }

    /// Kernel vectors at an eigenvalue, mapped to per-edge solution
    /// coefficients and normalized to unit L2 norm over the frame.
    pub fn mode_shape(&self, lambda: S::RealField) -> Result<ModeShape<S::RealField>> {
        let mut m = self.assemble(lambda)?;
        self.globally_scaled(&mut m);
        let spec = crate::linalg::svd_spectrum(&m, self.options.nullity_rel_tol);
        if spec.nullspace.is_empty() {
            return Err(Error::NotAnEigenvalue {
                lambda: to_f64(lambda),
            });
        }
        let nullity = spec.nullspace.len();
        let vec = &spec.nullspace[0];
        self.lift_kernel_vector(lambda, vec, nullity)
    }

    /// Map one kernel vector to a normalized mode shape.
    pub fn lift_kernel_vector(
        &self,
        lambda: S::RealField,
        kernel: &DVector<S>,
        nullity: usize,
    ) -> Result<ModeShape<S::RealField>> {
        let reduced = match &self.constraint {
            Some(z) => z * kernel,
            None => kernel.clone(),
        };
        let mut coeffs = Vec::with_capacity(self.frame.edges().len());
        for (ei, spec) in self.edge_specs.iter().enumerate() {
            let expansion = spec.expansion::<S::RealField>();
            let base = self.layout.offsets[ei];
            let n = spec.column_count();
            let mut full = [Complex::new(S::RealField::zero(), S::RealField::zero()); 12];
            for r in 0..12 {
                for c in 0..n {
                    let s = reduced[base + c].clone();
                    let w = expansion[(r, c)];
                    full[r] += Complex::new(s.clone().real() * w, s.imaginary() * w);
                }
            }
            coeffs.push(full);
        }
        let mut mode = ModeShape {
            frame: self.frame.clone(),
            lambda,
            coeffs,
            nullity,
        };
        let norm = mode.l2_norm(self.options.quadrature_panels)?;
        if norm > S::RealField::zero() {
            for c in mode.coeffs.iter_mut() {
                for x in c.iter_mut() {
                    *x /= Complex::new(norm, S::RealField::zero());
                }
            }
        }
        Ok(mode)
    }
}

/// A computed eigenmode: per-edge solution coefficients (complex in general;
/// real assemblies produce zero imaginary parts) plus the eigenvalue.
#[derive(Debug, Clone)]
pub struct ModeShape<T: Real> {
    frame: Frame<T>,
    pub lambda: T,
    /// Per edge: 12 coefficients `[v: cosh,sinh,cos,sin | w | u | eta]`.
    pub coeffs: Vec<[Complex<T>; 12]>,
    pub nullity: usize,
}

impl<T: Real> ModeShape<T> {
    pub fn frame(&self) -> &Frame<T> {
        &self.frame
    }

    /// Real and imaginary field parts at `x` on an edge.
    pub fn eval(&self, edge_idx: usize, x: T) -> Result<(FieldEval<T>, FieldEval<T>)> {
        let edge = &self.frame.edges()[edge_idx];
        let mut re = [T::zero(); 12];
        let mut im = [T::zero(); 12];
        for (i, c) in self.coeffs[edge_idx].iter().enumerate() {
            re[i] = c.re;
            im[i] = c.im;
        }
        Ok((
            eval_edge_fields(edge, self.lambda, &re, x)?,
            eval_edge_fields(edge, self.lambda, &im, x)?,
        ))
    }

    /// L2 norm over the whole frame by composite quadrature.
    pub fn l2_norm(&self, panels: usize) -> Result<T> {
        let mut acc = T::zero();
        for (ei, edge) in self.frame.edges().iter().enumerate() {
            acc += quadrature::integrate(edge.length, panels, |x| {
                let (re, im) = self.eval(ei, x).expect("in-range evaluation");
                let sq = |a: T, b: T| a * a + b * b;
                sq(re.v[0], im.v[0])
                    + sq(re.w[0], im.w[0])
                    + sq(re.u[0], im.u[0])
                    + sq(re.eta[0], im.eta[0])
            });
        }
        Ok(acc.sqrt())
    }

    /// View of the real part as an edge field.
    pub fn real_view(&self) -> ModeView<'_, T> {
        ModeView {
            mode: self,
            imaginary: false,
        }
    }

    /// View of the imaginary part as an edge field.
    pub fn imag_view(&self) -> ModeView<'_, T> {
        ModeView {
            mode: self,
            imaginary: true,
        }
    }
}

/// Borrowed real or imaginary part of a mode shape.
pub struct ModeView<'a, T: Real> {
    mode: &'a ModeShape<T>,
    imaginary: bool,
}

impl<T: Real> EdgeField<T> for ModeView<'_, T> {
    fn eval(&self, edge_idx: usize, x: T) -> FieldEval<T> {
        let (re, im) = self.mode.eval(edge_idx, x).expect("in-range evaluation");
        if self.imaginary {
            im
        } else {
            re
        }
    }
}
