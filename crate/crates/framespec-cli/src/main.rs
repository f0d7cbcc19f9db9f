//! Command-line front end: parse frame/symmetry files, run the validate /
//! scan / eig / mode / fem / reduce pipelines and emit CSV/JSON artifacts.
//!
//! Exit codes: 0 success, 1 frame invariant violation, 2 parse error,
//! 3 numerical failure. Set `FRAMESPEC_LOG=debug` for verbose logging.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use framespec_core::error::Error as CoreError;
use framespec_core::geometry::validate_frame;
use framespec_core::io;
use framespec_core::planar::{detect_planar, reduced_assemblies, PlanarCheck};
use framespec_core::secular::{default_steps, AssemblyOptions, Root, SecularAssembly};
use framespec_core::symmetry::quotient_assembly;
use framespec_core::Frame64;

#[derive(Parser)]
#[command(
    name = "framespec",
    version,
    about = "Vibrational spectra and mode shapes of 3D beam frames on metric graphs"
)]
struct Cli {
    /// Worker threads for spectral scans (default: logical cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check frame invariants; report vertex degrees and connectivity
    Validate {
        frame: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Sample the scaled determinant and smallest singular value on a grid
    Scan {
        frame: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        lmin: f64,
        #[arg(long, default_value_t = 100.0)]
        lmax: f64,
        /// Grid points (default: 2000 per decade)
        #[arg(long)]
        steps: Option<usize>,
        /// Emit the two decoupled planar blocks instead of the full frame
        /// (writes `<out>.h1.csv` and `<out>.h2.csv`)
        #[arg(long)]
        planar_split: bool,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate eigenvalues on an interval
    Eig {
        frame: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        lmin: f64,
        #[arg(long, default_value_t = 100.0)]
        lmax: f64,
        #[arg(long)]
        steps: Option<usize>,
        /// Relative kernel tolerance override
        #[arg(long)]
        tol: Option<f64>,
        /// Symmetry description file (enables --irrep)
        #[arg(long)]
        symmetry: Option<PathBuf>,
        /// Irrep label from the symmetry file, or "all"
        #[arg(long)]
        irrep: Option<String>,
        /// Solve the two planar blocks and label eigenvalues h1/h2
        #[arg(long)]
        planar_split: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compute one mode shape, selected by index in the eigenvalue table
    Mode {
        frame: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 1e-4)]
        lmin: f64,
        #[arg(long, default_value_t = 100.0)]
        lmax: f64,
        #[arg(long)]
        steps: Option<usize>,
        /// Sample points per edge in the JSON output
        #[arg(long, default_value_t = 65)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-element eigenvalues and sampled modes (oracle pipeline)
    Fem {
        frame: PathBuf,
        #[arg(long, default_value_t = 20)]
        elements: usize,
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[arg(long, default_value_t = 33)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetry-reduced spectra per irreducible representation
    Reduce {
        frame: PathBuf,
        #[arg(long)]
        symmetry: PathBuf,
        /// Irrep label or "all"
        #[arg(long, default_value = "all")]
        irrep: String,
        #[arg(long, default_value_t = 1e-4)]
        lmin: f64,
        #[arg(long, default_value_t = 100.0)]
        lmax: f64,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Error-to-exit-code policy.
enum Failure {
    Parse(String),
    Invariant(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Invariant(_) => 1,
            Failure::Numerical(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Invariant(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_)
            | CoreError::UnknownVertex(_)
            | CoreError::UnknownEdge(_)
            | CoreError::DuplicateId(_) => Failure::Parse(e.to_string()),
            CoreError::DegenerateEdge { .. }
            | CoreError::DegenerateHint { .. }
            | CoreError::NotPlanar(_)
            | CoreError::BadSymmetry { .. }
            | CoreError::BadIrrep { .. } => Failure::Invariant(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Parse(e.to_string())
    }
}

fn load_frame(path: &Path) -> Result<Frame64, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let (frame, _) = io::parse_frame::<f64>(&text)?;
    let report = validate_frame(&frame, 1e-12);
    if !report.is_valid() {
        let mut msg = String::from("frame invariants violated:");
        for v in &report.violations {
            msg.push_str("\n  ");
            msg.push_str(&v.message);
        }
        return Err(Failure::Invariant(msg));
    }
    Ok(frame)
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn steps_for(lmin: f64, lmax: f64, steps: Option<usize>) -> usize {
    steps.unwrap_or_else(|| default_steps(lmin, lmax))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { frame, format } => {
            let text = fs::read_to_string(&frame)
                .map_err(|e| Failure::Parse(format!("{}: {e}", frame.display())))?;
            let (parsed, _) = io::parse_frame::<f64>(&text)?;
            let report = validate_frame(&parsed, 1e-12);
            match format {
                Format::Json => {
                    let json = io::ValidateJson::from_report(&report);
                    println!("{}", serde_json::to_string_pretty(&json).unwrap());
                }
                _ => {
                    if report.is_valid() {
                        println!("frame is valid");
                    } else {
                        println!("frame is INVALID:");
                        for v in &report.violations {
                            println!("  {}", v.message);
                        }
                    }
                    for (id, deg) in &report.vertex_degrees {
                        println!("vertex {id}: degree {deg}");
                    }
                    println!("connected components: {}", report.connected_components);
                    for id in &report.negative_spring_vertices {
                        println!("note: vertex {id} has a negative spring constant");
                    }
                }
            }
            if !report.is_valid() {
                return Err(Failure::Invariant("frame invariants violated".into()));
            }
            Ok(())
        }
        Command::Scan {
            frame,
            lmin,
            lmax,
            steps,
            planar_split,
            out,
        } => {
            let parsed = load_frame(&frame)?;
            let n = steps_for(lmin, lmax, steps);
            if planar_split {
                let split = match detect_planar(&parsed, 1e-10) {
                    PlanarCheck::Planar(s) => s,
                    PlanarCheck::NotPlanar(reason) => {
                        return Err(Failure::Invariant(format!("--planar-split: {reason}")))
                    }
                };
                let (h1, h2) = reduced_assemblies(&parsed, &split, AssemblyOptions::default());
                for (label, asm) in [("h1", h1), ("h2", h2)] {
                    let scan = asm.scan(lmin, lmax, n)?;
                    let mut buf = Vec::new();
                    io::write_scan_csv(&mut buf, &scan.samples)?;
                    let content = String::from_utf8(buf).unwrap();
                    match &out {
                        Some(path) => {
                            let p = path.with_extension(format!("{label}.csv"));
                            fs::write(&p, content)?;
                            eprintln!("wrote {}", p.display());
                        }
                        None => {
                            println!("# block: {label}");
                            print!("{content}");
                        }
                    }
                }
                Ok(())
            } else {
                let asm = SecularAssembly::new(parsed);
                let scan = asm.scan(lmin, lmax, n)?;
                let mut buf = Vec::new();
                io::write_scan_csv(&mut buf, &scan.samples)?;
                write_output(out.as_ref(), &String::from_utf8(buf).unwrap())
            }
        }
        Command::Eig {
            frame,
            lmin,
            lmax,
            steps,
            tol,
            symmetry,
            irrep,
            planar_split,
            out,
            format,
        } => {
            let parsed = load_frame(&frame)?;
            let n = steps_for(lmin, lmax, steps);
            let mut opts = AssemblyOptions::default();
            if let Some(t) = tol {
                opts.nullity_rel_tol = t;
            }
            let mut table: Vec<(Root<f64>, Option<String>)> = Vec::new();
            if let Some(sym_path) = symmetry {
                let text = fs::read_to_string(&sym_path)
                    .map_err(|e| Failure::Parse(format!("{}: {e}", sym_path.display())))?;
                let file = io::parse_symmetry(&text)?;
                let (sym, irreps) = io::symmetry_from_file(&parsed, &file, false)?;
                let wanted = irrep.unwrap_or_else(|| "all".into());
                for spec in &irreps {
                    if wanted != "all" && spec.label != wanted {
                        continue;
                    }
                    let asm = quotient_assembly(&sym, spec, opts)?;
                    for root in asm.eigenvalues(lmin, lmax, n)? {
                        table.push((root, Some(spec.label.clone())));
                    }
                }
                if table.is_empty() && wanted != "all" {
                    return Err(Failure::Parse(format!(
                        "irrep {wanted} not found in {}",
                        sym_path.display()
                    )));
                }
            } else if planar_split {
                let split = match detect_planar(&parsed, 1e-10) {
                    PlanarCheck::Planar(s) => s,
                    PlanarCheck::NotPlanar(reason) => {
                        return Err(Failure::Invariant(format!("--planar-split: {reason}")))
                    }
                };
                let (h1, h2) = reduced_assemblies(&parsed, &split, opts);
                for (label, asm) in [("h1", h1), ("h2", h2)] {
                    for root in asm.eigenvalues(lmin, lmax, n)? {
                        table.push((root, Some(label.to_string())));
                    }
                }
            } else {
                let asm = SecularAssembly::with_options(parsed, opts);
                for root in asm.eigenvalues(lmin, lmax, n)? {
                    table.push((root, None));
                }
            }
            table.sort_by(|a, b| a.0.lambda.partial_cmp(&b.0.lambda).unwrap());
            match format {
                Format::Json => {
                    let rows: Vec<serde_json::Value> = table
                        .iter()
                        .enumerate()
                        .map(|(i, (r, label))| {
                            serde_json::json!({
                                "index": i,
                                "lambda": r.lambda,
                                "nullity": r.nullity,
                                "detector": r.detector.to_string(),
                                "irrep": label,
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "schema_version": io::SCHEMA_VERSION,
                        "eigenvalues": rows,
                    });
                    write_output(
                        out.as_ref(),
                        &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
                    )
                }
                _ => {
                    let mut buf = Vec::new();
                    io::write_eig_csv(&mut buf, &table)?;
                    write_output(out.as_ref(), &String::from_utf8(buf).unwrap())
                }
            }
        }
        Command::Mode {
            frame,
            index,
            lmin,
            lmax,
            steps,
            samples,
            out,
        } => {
            let parsed = load_frame(&frame)?;
            let n = steps_for(lmin, lmax, steps);
            let asm = SecularAssembly::new(parsed);
            let roots = asm.eigenvalues(lmin, lmax, n)?;
            let root = roots.get(index).ok_or_else(|| {
                Failure::Numerical(format!(
                    "mode index {index} out of range: {} eigenvalues on [{lmin}, {lmax}]",
                    roots.len()
                ))
            })?;
            let mode = asm.mode_shape(root.lambda)?;
            let json = io::mode_to_json(&mode, samples)?;
            write_output(
                out.as_ref(),
                &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()),
            )
        }
        Command::Fem {
            frame,
            elements,
            count,
            samples,
            out,
        } => {
            let parsed = load_frame(&frame)?;
            let sys = framespec_core::fem::assemble_fem(&parsed, elements);
            let pairs = framespec_core::fem::solve_fem(&sys, count)?;
            let json = io::fem_to_json(&sys, &pairs, samples)?;
            write_output(
                out.as_ref(),
                &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()),
            )
        }
        Command::Reduce {
            frame,
            symmetry,
            irrep,
            lmin,
            lmax,
            steps,
            out,
            format,
        } => {
            let parsed = load_frame(&frame)?;
            let text = fs::read_to_string(&symmetry)
                .map_err(|e| Failure::Parse(format!("{}: {e}", symmetry.display())))?;
            let file = io::parse_symmetry(&text)?;
            let (sym, irreps) = io::symmetry_from_file(&parsed, &file, false)?;
            let n = steps_for(lmin, lmax, steps);
            let opts = AssemblyOptions::default();
            let mut table: Vec<(Root<f64>, Option<String>)> = Vec::new();
            let mut found = false;
            for spec in &irreps {
                if irrep != "all" && spec.label != irrep {
                    continue;
                }
                found = true;
                let asm = quotient_assembly(&sym, spec, opts)?;
                for root in asm.eigenvalues(lmin, lmax, n)? {
                    table.push((root, Some(spec.label.clone())));
                }
            }
            if !found {
                return Err(Failure::Parse(format!(
                    "irrep {irrep} not found in {}",
                    symmetry.display()
                )));
            }
            table.sort_by(|a, b| a.0.lambda.partial_cmp(&b.0.lambda).unwrap());
            match format {
                Format::Json => {
                    let rows: Vec<serde_json::Value> = table
                        .iter()
                        .enumerate()
                        .map(|(i, (r, label))| {
                            serde_json::json!({
                                "index": i,
                                "lambda": r.lambda,
                                "nullity": r.nullity,
                                "detector": r.detector.to_string(),
                                "irrep": label,
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({
                        "schema_version": io::SCHEMA_VERSION,
                        "eigenvalues": rows,
                    });
                    write_output(
                        out.as_ref(),
                        &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
                    )
                }
                _ => {
                    let mut buf = Vec::new();
                    io::write_eig_csv(&mut buf, &table)?;
                    write_output(out.as_ref(), &String::from_utf8(buf).unwrap())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("FRAMESPEC_LOG")).init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let mut stderr = std::io::stderr();
            let _ = writeln!(stderr, "error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
