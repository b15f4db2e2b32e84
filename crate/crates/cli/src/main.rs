//! `capcurv`: inspect meshes, cap boundaries, extend data and prescribe curvature.
//!
//! Exit status is 0 on success, 1 for invalid input, 2 when the solver fails.
//! Diagnostics go to stderr; data goes to `--out` or stdout as JSON.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use capcurv::capping::{cap_all, cap_coordinates};
use capcurv::fields::{
    default_seed, extend_field_sign_condition, extend_form_gauss_bonnet,
    extend_form_prescribed_integral, ExtensionReport, FaceForm, VertexField,
};
use capcurv::io::{load_off, to_json, write_off, LengthSidecar, OffMesh};
use capcurv::pipeline::{prescribe_form, prescribe_function, PrescriptionResult};
use capcurv::solver::{solve_prescribed_curvature, SolveOptions, SolveTrace};
use capcurv::{gauss_bonnet_check, Error, Mesh, MetricLengths};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "capcurv",
    version,
    about = "Curvature prescription on triangulated surfaces with boundary"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print vertex/edge/face counts, Euler characteristic and boundary loop count.
    Info(MeshArgs),
    /// Evaluate the discrete Gauss-Bonnet identity.
    CheckGb(MeshOut),
    /// Cap every boundary loop; writes OFF plus `.lengths.json` and `.atlas.json` siblings.
    Cap(MeshOut),
    /// Extend a face form over the caps with a prescribed total (default 2*pi*chi).
    ExtendForm {
        #[command(flatten)]
        io: MeshOut,
        #[command(flatten)]
        target: TargetArgs,
        /// Total integral over the capped mesh [default: 2*pi*chi(capped)].
        #[arg(long)]
        total: Option<f64>,
        /// Cap seed value [default: mean over faces along the boundary].
        #[arg(long)]
        seed: Option<f64>,
    },
    /// Extend a vertex function over the caps so it meets the sign condition.
    ExtendFn {
        #[command(flatten)]
        io: MeshOut,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Solve for a conformal metric with prescribed angle defects on a closed mesh.
    Solve(SolveArgs),
    /// Prescribe angle defects at the interior vertices of a mesh with boundary.
    PrescribeFn(SolveArgs),
    /// Prescribe a curvature form (per-face integrals) on a mesh with boundary.
    PrescribeForm(SolveArgs),
}

#[derive(Args, Debug)]
struct MeshArgs {
    /// ASCII OFF mesh.
    #[arg(long)]
    mesh: PathBuf,
    /// JSON edge-length sidecar; lengths come from coordinates when omitted.
    #[arg(long)]
    lengths: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MeshOut {
    #[command(flatten)]
    mesh: MeshArgs,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    /// JSON target: `{"vertex_values": [...]}` or `{"face_values": [...]}`.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Constant target value on every vertex or face.
    #[arg(long = "const", allow_hyphen_values = true)]
    constant: Option<f64>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    io: MeshOut,
    #[command(flatten)]
    target: TargetArgs,
    /// Curvature residual tolerance (radians, infinity norm).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Write the per-iteration trace as JSON lines (next to --out, or to stderr).
    #[arg(long)]
    trace: bool,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Stable name for each library error, used in messages.
fn error_name(e: &Error) -> &'static str {
    match e {
        Error::EmptyMesh => "EmptyMesh",
        Error::InvalidFace { .. } => "InvalidFace",
        Error::NonManifoldEdge(..) => "NonManifoldEdge",
        Error::NonManifoldVertex(_) => "NonManifoldVertex",
        Error::NonOrientable => "NonOrientable",
        Error::Disconnected(_) => "Disconnected",
        Error::DegenerateTriangle { .. } => "DegenerateTriangle",
        Error::NonPositiveLength { .. } => "NonPositiveLength",
        Error::UnknownEdge(..) => "UnknownEdge",
        Error::MissingLength(..) => "MissingLength",
        Error::NotACorner { .. } => "NotACorner",
        Error::BoundaryVertex(_) => "BoundaryVertex",
        Error::InteriorVertex(_) => "InteriorVertex",
        Error::NoBoundary => "NoBoundary",
        Error::NotClosed => "NotClosed",
        Error::NoInteriorVertex => "NoInteriorVertex",
        Error::IndexMismatch { .. } => "IndexMismatch",
        Error::ZeroInteriorMass => "ZeroInteriorMass",
        Error::TargetSumMismatch { .. } => "TargetSumMismatch",
        Error::ConeAngleViolation { .. } => "ConeAngleViolation",
        Error::LineSearchStall { .. } => "LineSearchStall",
        Error::MaxIterExceeded { .. } => "MaxIterExceeded",
        Error::InvalidOptions(_) => "InvalidOptions",
        Error::Parse(_) => "ParseError",
    }
}

struct Loaded {
    off: OffMesh,
    mesh: Mesh,
    lengths: MetricLengths,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn load(args: &MeshArgs) -> Result<Loaded, Failure> {
    let off = read(&args.mesh)?;
    let sidecar = args.lengths.as_deref().map(read).transpose()?;
    let (off, mesh, lengths) = load_off(&off, sidecar.as_deref())?;
    Ok(Loaded { off, mesh, lengths })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_err(path, e)),
        None => write_stdout(text),
    }
}

fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut stdout = std::io::stdout().lock();
    match stdout
        .write_all(text.as_bytes())
        .and_then(|()| stdout.flush())
    {
        // A closed pipe (`| head`) is not an error worth reporting.
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(Failure::Io(format!("stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn parse_target<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Lib(Error::Parse(format!("{}: {e}", path.display()))))
}

fn vertex_target(args: &TargetArgs, mesh: &Mesh) -> Result<VertexField, Failure> {
    let field = match (args.constant, &args.target) {
        (Some(c), _) => VertexField::constant(mesh, c),
        (None, Some(path)) => parse_target(path)?,
        (None, None) => unreachable!("clap requires one target source"),
    };
    field.check(mesh)?;
    Ok(field)
}

fn face_target(args: &TargetArgs, mesh: &Mesh) -> Result<FaceForm, Failure> {
    let form = match (args.constant, &args.target) {
        (Some(c), _) => FaceForm::constant(mesh, c),
        (None, Some(path)) => parse_target(path)?,
        (None, None) => unreachable!("clap requires one target source"),
    };
    form.check(mesh)?;
    Ok(form)
}

fn options(args: &SolveArgs) -> Result<SolveOptions, Failure> {
    let opts = SolveOptions {
        tol: args.tol,
        max_iter: args.max_iter,
        ..SolveOptions::default()
    };
    opts.validate()?;
    Ok(opts)
}

fn write_trace(args: &SolveArgs, trace: &SolveTrace) -> Result<(), Failure> {
    if !args.trace {
        return Ok(());
    }
    match &args.io.out {
        Some(out) => {
            let path = sibling(out, ".trace.jsonl");
            fs::write(&path, trace.to_json_lines()).map_err(|e| io_err(&path, e))
        }
        None => {
            eprint!("{}", trace.to_json_lines());
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ExtendFormOutput<'a> {
    face_values: &'a [f64],
    report: &'a ExtensionReport,
}

#[derive(Serialize)]
struct ExtendFnOutput<'a> {
    vertex_values: &'a [f64],
    chi: i64,
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    u: &'a [f64],
    lengths: Vec<(usize, usize, f64)>,
    iterations: usize,
    final_residual: f64,
}

fn report_prescription(
    args: &SolveArgs,
    mesh: &Mesh,
    result: &PrescriptionResult,
) -> Result<(), Failure> {
    eprintln!(
        "converged in {} iterations, max error {:e} over {} interior vertices",
        result.solve_trace.iterations(),
        result.max_error,
        result.interior_vertices.len()
    );
    write_trace(args, &result.solve_trace)?;
    emit(args.io.out.as_deref(), &to_json(&result.output(mesh)))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Info(args) => {
            let l = load(&args)?;
            let m = &l.mesh;
            write_stdout(&format!(
                "V={} E={} F={} chi={} boundary_loops={}\n",
                m.num_vertices(),
                m.num_edges(),
                m.num_faces(),
                m.euler_characteristic(),
                m.boundary_loops().len()
            ))?;
        }
        Command::CheckGb(args) => {
            let l = load(&args.mesh)?;
            let report = gauss_bonnet_check(&l.mesh, &l.lengths)?;
            eprintln!(
                "total curvature {:.12}  2*pi*chi {:.12}  residual {:e}",
                report.total, report.gb_target, report.gb_residual
            );
            for (i, t) in report.loop_turning.iter().enumerate() {
                eprintln!("boundary loop {i}: turning {t:.12}");
            }
            emit(args.out.as_deref(), &to_json(&report))?;
        }
        Command::Cap(args) => {
            let l = load(&args.mesh)?;
            let (capped, capped_lengths, atlas) = cap_all(&l.mesh, &l.lengths)?;
            let coords = cap_coordinates(&l.off.coords, &atlas);
            let off = write_off(&coords, capped.faces());
            let sidecar = to_json(&LengthSidecar::from_metric(&capped, &capped_lengths));
            let atlas_json = to_json(&atlas);
            match &args.out {
                Some(out) => {
                    fs::write(out, off).map_err(|e| io_err(out, e))?;
                    for (suffix, text) in
                        [(".lengths.json", &sidecar), (".atlas.json", &atlas_json)]
                    {
                        let path = sibling(out, suffix);
                        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
                    }
                }
                None => write_stdout(&off)?,
            }
            eprintln!(
                "capped {} boundary loop(s): V={} E={} F={} chi={}",
                atlas.num_loops(),
                capped.num_vertices(),
                capped.num_edges(),
                capped.num_faces(),
                capped.euler_characteristic()
            );
        }
        Command::ExtendForm {
            io,
            target,
            total,
            seed,
        } => {
            let l = load(&io.mesh)?;
            let form = face_target(&target, &l.mesh)?;
            let (_, _, atlas) = cap_all(&l.mesh, &l.lengths)?;
            let seed = seed.unwrap_or_else(|| default_seed(&l.mesh, &form));
            let (extended, report) = match total {
                Some(a) => extend_form_prescribed_integral(&form, &atlas, a, seed)?,
                None => extend_form_gauss_bonnet(&form, &atlas, seed)?,
            };
            eprintln!(
                "interior scale {:.12}, total {:.12}",
                report.scale, report.achieved_total
            );
            let out = ExtendFormOutput {
                face_values: extended.as_slice(),
                report: &report,
            };
            emit(io.out.as_deref(), &to_json(&out))?;
        }
        Command::ExtendFn { io, target } => {
            let l = load(&io.mesh)?;
            let field = vertex_target(&target, &l.mesh)?;
            let (capped, _, atlas) = cap_all(&l.mesh, &l.lengths)?;
            let extended = extend_field_sign_condition(&field, &atlas)?;
            let out = ExtendFnOutput {
                vertex_values: extended.as_slice(),
                chi: capped.euler_characteristic(),
            };
            emit(io.out.as_deref(), &to_json(&out))?;
        }
        Command::Solve(args) => {
            let l = load(&args.io.mesh)?;
            let target = vertex_target(&args.target, &l.mesh)?;
            let sol = solve_prescribed_curvature(&l.mesh, &l.lengths, &target, &options(&args)?)?;
            eprintln!(
                "converged in {} iterations, residual {:e}",
                sol.trace.iterations(),
                sol.trace.final_residual()
            );
            write_trace(&args, &sol.trace)?;
            let out = SolveOutput {
                u: sol.factors.as_slice(),
                lengths: sol.lengths.to_edge_list(&l.mesh),
                iterations: sol.trace.iterations(),
                final_residual: sol.trace.final_residual(),
            };
            emit(args.io.out.as_deref(), &to_json(&out))?;
        }
        Command::PrescribeFn(args) => {
            let l = load(&args.io.mesh)?;
            let target = vertex_target(&args.target, &l.mesh)?;
            let result = prescribe_function(&l.mesh, &l.lengths, &target, &options(&args)?)?;
            report_prescription(&args, &l.mesh, &result)?;
        }
        Command::PrescribeForm(args) => {
            let l = load(&args.io.mesh)?;
            let form = face_target(&args.target, &l.mesh)?;
            let result = prescribe_form(&l.mesh, &l.lengths, &form, &options(&args)?)?;
            report_prescription(&args, &l.mesh, &result)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: Io: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {}: {e}", error_name(&e));
            ExitCode::from(if e.is_solver_failure() { 2 } else { 1 })
        }
    }
}
