//! File formats: frame and symmetry description files (JSON, strict schemas)
//! and the serialized outputs of the solver pipelines.
//!
//! Frame files:
//! ```json
//! {
//!   "schema_version": 1,
//!   "vertices": [{"id": 0, "pos": [0,0,0], "joint": {"kind": "free"}}],
//!   "edges": [{"id": 1, "from": 1, "to": 0,
//!              "j_hint": [0,1,0],
//!              "materials": {"a": 1.0, "b": 1.0, "c": 1.0, "d": 1.0}}]
//! }
//! ```
//! Unknown keys are rejected. `j_hint` is optional; without it the section
//! basis follows the deterministic rule of [`crate::geometry::auto_basis`].

use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Frame, JointKind, MaterialParams};
use crate::scalar::{lit, to_f64, Real};
use crate::secular::{Detector, Root, ScanSample};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub schema_version: u32,
    pub vertices: Vec<VertexDto>,
    pub edges: Vec<EdgeDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VertexDto {
    pub id: u32,
    pub pos: [f64; 3],
    pub joint: JointDto,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JointDto {
    Free,
    Clamped,
    Pinned,
    Guided,
    Spring { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeDto {
    pub id: u32,
    pub from: u32,
    pub to: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_hint: Option<[f64; 3]>,
    pub materials: MaterialsDto,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MaterialsDto {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Parse a frame description, returning the frame and the raw file.
pub fn parse_frame<T: Real>(json: &str) -> Result<(Frame<T>, FrameFile)> {
    let file: FrameFile =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("frame file: {e}")))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported schema_version {} (expected {})",
            file.schema_version, SCHEMA_VERSION
        )));
    }
    let mut b = Frame::<T>::builder();
    for v in &file.vertices {
        let joint = match v.joint {
            JointDto::Free => JointKind::FreeRigid,
            JointDto::Clamped => JointKind::Clamped,
            JointDto::Pinned => JointKind::Pinned,
            JointDto::Guided => JointKind::Guided,
            JointDto::Spring { alpha, beta } => JointKind::Spring {
                alpha: lit(alpha),
                beta: lit(beta),
            },
        };
        b = b.vertex(
            v.id,
            Vector3::new(lit(v.pos[0]), lit(v.pos[1]), lit(v.pos[2])),
            joint,
        );
    }
    for e in &file.edges {
        let m = MaterialParams::new(
            lit(e.materials.a),
            lit(e.materials.b),
            lit(e.materials.c),
            lit(e.materials.d),
        );
        let hint = e
            .j_hint
            .map(|h| Vector3::new(lit(h[0]), lit(h[1]), lit(h[2])));
        b = b.edge_with_hint(e.id, e.from, e.to, m, hint);
    }
    Ok((b.build()?, file))
}

/// Canonical serialization of a frame: vertices/edges in id order, `j_hint`
/// pinned to the stored section basis so parsing reproduces the frame exactly.
pub fn frame_to_file<T: Real>(frame: &Frame<T>) -> FrameFile {
    FrameFile {
        schema_version: SCHEMA_VERSION,
        vertices: frame
            .vertices()
            .iter()
            .map(|v| VertexDto {
                id: v.id,
                pos: [
                    to_f64(v.position[0]),
                    to_f64(v.position[1]),
                    to_f64(v.position[2]),
                ],
                joint: match v.joint {
                    JointKind::FreeRigid => JointDto::Free,
                    JointKind::Clamped => JointDto::Clamped,
                    JointKind::Pinned => JointDto::Pinned,
                    JointKind::Guided => JointDto::Guided,
                    JointKind::Spring { alpha, beta } => JointDto::Spring {
                        alpha: to_f64(alpha),
                        beta: to_f64(beta),
                    },
                },
            })
            .collect(),
        edges: frame
            .edges()
            .iter()
            .map(|e| EdgeDto {
                id: e.id,
                from: e.origin,
                to: e.terminus,
                j_hint: Some([
                    to_f64(e.triad.j[0]),
                    to_f64(e.triad.j[1]),
                    to_f64(e.triad.j[2]),
                ]),
                materials: MaterialsDto {
                    a: to_f64(e.materials.a),
                    b: to_f64(e.materials.b),
                    c: to_f64(e.materials.c),
                    d: to_f64(e.materials.d),
                },
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryFile {
    pub schema_version: u32,
    pub generators: Vec<GeneratorDto>,
    pub irreps: Vec<IrrepDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDto {
    pub name: String,
    /// Row-major 3x3 orthogonal matrix.
    pub matrix: [[f64; 3]; 3],
    /// Pairs `[edge id, image edge id]`.
    pub edge_map: Vec<[u32; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrrepDto {
    pub label: String,
    /// Character per generator, `[re, im]`; generators omitted here are not
    /// part of the irrep's subgroup.
    pub characters: Vec<CharacterDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterDto {
    pub generator: String,
    pub value: [f64; 2],
}

pub fn parse_symmetry(json: &str) -> Result<SymmetryFile> {
    let file: SymmetryFile = serde_json::from_str(json)
        .map_err(|e| Error::InvalidInput(format!("symmetry file: {e}")))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported schema_version {} (expected {})",
            file.schema_version, SCHEMA_VERSION
        )));
    }
    Ok(file)
}

impl GeneratorDto {
    pub fn matrix3<T: Real>(&self) -> Matrix3<T> {
        Matrix3::from_fn(|r, c| lit(self.matrix[r][c]))
    }
}

/// Build the verified symmetry group and its irreps from a description file.
/// With `lenient`, invariance violations are recorded on the group instead of
/// failing (broken-symmetry diagnostics).
pub fn symmetry_from_file<T: Real>(
    frame: &Frame<T>,
    file: &SymmetryFile,
    lenient: bool,
) -> Result<(
    crate::symmetry::FrameSymmetry<T>,
    Vec<crate::symmetry::IrrepSpec<T>>,
)> {
    let mut generators = Vec::with_capacity(file.generators.len());
    for g in &file.generators {
        let mut perm = vec![usize::MAX; frame.edges().len()];
        for &[from, to] in &g.edge_map {
            perm[frame.edge_idx(from)?] = frame.edge_idx(to)?;
        }
        if perm.iter().any(|&p| p == usize::MAX) {
            return Err(Error::InvalidInput(format!(
                "generator {}: edge_map does not cover all edges",
                g.name
            )));
        }
        generators.push((g.name.clone(), g.matrix3::<T>(), perm));
    }
    let sym = if lenient {
        crate::symmetry::FrameSymmetry::build_lenient(frame, &generators, lit(1e-9))?
    } else {
        crate::symmetry::FrameSymmetry::build(frame, &generators, lit(1e-9))?
    };
    let mut irreps = Vec::with_capacity(file.irreps.len());
    for irrep in &file.irreps {
        let chars: Vec<(String, num_complex::Complex<T>)> = irrep
            .characters
            .iter()
            .map(|c| {
                (
                    c.generator.clone(),
                    num_complex::Complex::new(lit(c.value[0]), lit(c.value[1])),
                )
            })
            .collect();
        irreps.push(crate::symmetry::IrrepSpec::from_generators(
            &sym,
            &irrep.label,
            &chars,
        )?);
    }
    Ok((sym, irreps))
}

/// Scan CSV: `lambda,det_scaled,sigma_min` with a schema comment line.
pub fn write_scan_csv<T: Real, W: Write>(
    w: &mut W,
    samples: &[ScanSample<T>],
) -> std::io::Result<()> {
    writeln!(w, "# schema_version: {SCHEMA_VERSION}")?;
    writeln!(w, "lambda,det_scaled,sigma_min")?;
    for s in samples {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e}",
            to_f64(s.lambda),
            to_f64(s.det_scaled),
            to_f64(s.sigma_min)
        )?;
    }
    Ok(())
}

/// Eigenvalue table CSV: `index,lambda,nullity,detector[,irrep]`.
pub fn write_eig_csv<T: Real, W: Write>(
    w: &mut W,
    roots: &[(Root<T>, Option<String>)],
) -> std::io::Result<()> {
    writeln!(w, "# schema_version: {SCHEMA_VERSION}")?;
    let labeled = roots.iter().any(|(_, l)| l.is_some());
    if labeled {
        writeln!(w, "index,lambda,nullity,detector,irrep")?;
    } else {
        writeln!(w, "index,lambda,nullity,detector")?;
    }
    for (i, (r, label)) in roots.iter().enumerate() {
        let det = match r.detector {
            Detector::DetSignChange => "det",
            Detector::SigmaMinDip => "sigma_min",
            Detector::Both => "both",
        };
        if labeled {
            writeln!(
                w,
                "{},{:.16e},{},{},{}",
                i,
                to_f64(r.lambda),
                r.nullity,
                det,
                label.as_deref().unwrap_or("")
            )?;
        } else {
            writeln!(w, "{},{:.16e},{},{}", i, to_f64(r.lambda), r.nullity, det)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeJson {
    pub schema_version: u32,
    pub lambda: f64,
    pub nullity: usize,
    pub edges: Vec<ModeEdgeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeEdgeJson {
    pub edge_id: u32,
    /// 12 complex coefficients as `[re, im]` pairs:
    /// `v: cosh,sinh,cos,sin | w: ... | u: cos,sin | eta: cos,sin`.
    pub coefficients: Vec<[f64; 2]>,
    /// Real-part field samples along the edge.
    pub samples: Vec<ModeSampleJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeSampleJson {
    pub x: f64,
    pub v: f64,
    pub w: f64,
    pub u: f64,
    pub eta: f64,
}

/// Serialize a mode shape with `samples_per_edge` sample points.
pub fn mode_to_json<T: Real>(
    mode: &crate::secular::ModeShape<T>,
    samples_per_edge: usize,
) -> Result<ModeJson> {
    let frame = mode.frame();
    let mut edges = Vec::with_capacity(frame.edges().len());
    for (ei, edge) in frame.edges().iter().enumerate() {
        let mut samples = Vec::with_capacity(samples_per_edge);
        for s in 0..samples_per_edge {
            let x = edge.length * lit::<T>(s as f64 / (samples_per_edge - 1).max(1) as f64);
            let (re, _) = mode.eval(ei, x)?;
            samples.push(ModeSampleJson {
                x: to_f64(x),
                v: to_f64(re.v[0]),
                w: to_f64(re.w[0]),
                u: to_f64(re.u[0]),
                eta: to_f64(re.eta[0]),
            });
        }
        edges.push(ModeEdgeJson {
            edge_id: edge.id,
            coefficients: mode.coeffs[ei]
                .iter()
                .map(|c| [to_f64(c.re), to_f64(c.im)])
                .collect(),
            samples,
        });
    }
    Ok(ModeJson {
        schema_version: SCHEMA_VERSION,
        lambda: to_f64(mode.lambda),
        nullity: mode.nullity,
        edges,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidateJson {
    pub schema_version: u32,
    pub valid: bool,
    pub violations: Vec<String>,
    pub vertex_degrees: Vec<(u32, usize)>,
    pub connected_components: usize,
    pub negative_spring_vertices: Vec<u32>,
}

impl ValidateJson {
    pub fn from_report(report: &crate::geometry::ValidationReport) -> Self {
        ValidateJson {
            schema_version: SCHEMA_VERSION,
            valid: report.is_valid(),
            violations: report
                .violations
                .iter()
                .map(|v| v.message.clone())
                .collect(),
            vertex_degrees: report.vertex_degrees.clone(),
            connected_components: report.connected_components,
            negative_spring_vertices: report.negative_spring_vertices.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FemJson {
    pub schema_version: u32,
    pub elements_per_edge: usize,
    pub eigenvalues: Vec<f64>,
    pub modes: Vec<FemModeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FemModeJson {
    pub lambda: f64,
    pub edges: Vec<FemEdgeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FemEdgeJson {
    pub edge_id: u32,
    pub samples: Vec<ModeSampleJson>,
}

/// Serialize FEM eigenpairs with sampled fields.
pub fn fem_to_json<T: Real>(
    system: &crate::fem::FemSystem<T>,
    pairs: &[crate::fem::FemEigenpair<T>],
    samples_per_edge: usize,
) -> Result<FemJson> {
    let frame = system.frame();
    let mut modes = Vec::with_capacity(pairs.len());
    for p in pairs {
        let mut edges = Vec::with_capacity(frame.edges().len());
        for (ei, edge) in frame.edges().iter().enumerate() {
            let mut samples = Vec::with_capacity(samples_per_edge);
            for s in 0..samples_per_edge {
                let x = edge.length * lit::<T>(s as f64 / (samples_per_edge - 1).max(1) as f64);
                let f = system.evaluate(&p.vector, ei, x)?;
                samples.push(ModeSampleJson {
                    x: to_f64(x),
                    v: to_f64(f.v[0]),
                    w: to_f64(f.w[0]),
                    u: to_f64(f.u[0]),
                    eta: to_f64(f.eta[0]),
                });
            }
            edges.push(FemEdgeJson {
                edge_id: edge.id,
                samples,
            });
        }
        modes.push(FemModeJson {
            lambda: to_f64(p.lambda),
            edges,
        });
    }
    Ok(FemJson {
        schema_version: SCHEMA_VERSION,
        elements_per_edge: system.dofs.elements.first().copied().unwrap_or(0),
        eigenvalues: pairs.iter().map(|p| to_f64(p.lambda)).collect(),
        modes,
    })
}
