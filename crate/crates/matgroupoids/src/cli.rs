//! Command-line orchestration: `analyze`, `compose`, `solve-iso`, and
//! `fixtures` subcommands over body description files or bundled fixtures.
//!
//! Exit codes: 0 success, 2 input/parse error, 3 unsupported descriptor,
//! 4 internal consistency failure.

use crate::body::{build_material_groupoid, is_discretely_homogeneous, is_uniform, BodyError, BodyGrid, PointData, UniformityVerdict};
use crate::classifier::{analyze_composite_with_tols, ClassifierError};
use crate::fixtures::{body_fixture, body_fixtures, composite_fixture, composite_fixtures};
use crate::groups::{GroupError, GroupKind, MatrixGroup, DEFAULT_EIG_TOL};
use crate::report::{
    composite_verdict_value, digest, emit_body, homogeneity_value, parse_body,
    render_composite_svg, AnalysisReport, ReportError,
};
use crate::solver::{solve_transplant, ConstitutiveModel, SampleSet, SolveOptions, SolverError};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "matg",
    about = "Material groupoid analysis of discretized elastic bodies and binary composites"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Orientation {
    /// Rotational archetypes (SO(n)).
    So,
    /// Full orthogonal archetypes (O(n)).
    O,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Uniformity and homogeneity analysis of a single body.
    Analyze {
        /// Body description file (JSON); omit when using --fixture.
        body: Option<PathBuf>,
        /// Bundled single-body fixture name.
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        output: OutputFormat,
    },
    /// Composite analysis of two constituent bodies on the same grid.
    Compose {
        body_a: Option<PathBuf>,
        body_b: Option<PathBuf>,
        /// Bundled composite fixture name (replaces the body files).
        #[arg(long)]
        fixture: Option<String>,
        /// Stress-free candidate matching tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Relative eigenvalue-multiplicity tolerance for the normalizer
        /// classification.
        #[arg(long, default_value_t = DEFAULT_EIG_TOL)]
        eig_tol: f64,
        /// Archetype orientation: SO keeps rotational archetypes, O widens
        /// them to the full orthogonal group.
        #[arg(long, value_enum, default_value = "so")]
        orientation: Orientation,
        /// Write a three-panel plate diagram to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        output: OutputFormat,
    },
    /// Recover a material isomorphism between two numeric points.
    SolveIso {
        /// Body description file with numeric (stored-energy) points.
        body: PathBuf,
        #[arg(long)]
        point_a: usize,
        #[arg(long)]
        point_b: usize,
        /// Number of training deformation-gradient samples.
        #[arg(long, default_value_t = 48)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Held-out RMS residual threshold for convergence.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        output: OutputFormat,
    },
    /// List the bundled fixtures; --emit writes them as body files.
    Fixtures {
        /// Directory to write the fixture body files into.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct CliFailure {
    code: i32,
    message: String,
}

impl CliFailure {
    fn input(msg: impl Into<String>) -> Self {
        CliFailure {
            code: EXIT_INPUT,
            message: msg.into(),
        }
    }
    fn unsupported(msg: impl Into<String>) -> Self {
        CliFailure {
            code: EXIT_UNSUPPORTED,
            message: msg.into(),
        }
    }
}

impl From<ReportError> for CliFailure {
    fn from(e: ReportError) -> Self {
        match &e {
            ReportError::Unsupported(_) => CliFailure::unsupported(e.to_string()),
            _ => CliFailure::input(e.to_string()),
        }
    }
}

impl From<BodyError> for CliFailure {
    fn from(e: BodyError) -> Self {
        match &e {
            BodyError::NumericMode | BodyError::MixedModes => {
                CliFailure::unsupported(e.to_string())
            }
            BodyError::Group(GroupError::UnsupportedPair(_)) => {
                CliFailure::unsupported(e.to_string())
            }
            _ => CliFailure::input(e.to_string()),
        }
    }
}

impl From<ClassifierError> for CliFailure {
    fn from(e: ClassifierError) -> Self {
        match &e {
            ClassifierError::Internal(_) => CliFailure {
                code: EXIT_INTERNAL,
                message: e.to_string(),
            },
            ClassifierError::Group(GroupError::UnsupportedPair(_)) => {
                CliFailure::unsupported(e.to_string())
            }
            _ => CliFailure::input(e.to_string()),
        }
    }
}

impl From<SolverError> for CliFailure {
    fn from(e: SolverError) -> Self {
        match &e {
            SolverError::UnsupportedDimension => CliFailure::unsupported(e.to_string()),
            _ => CliFailure::input(e.to_string()),
        }
    }
}

/// Entry point: parse argv, run, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success exits
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    configure_threads();
    match execute(cli.command) {
        Ok(output) => {
            print!("{output}");
            EXIT_OK
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("MATG_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliFailure> {
    std::fs::read_to_string(path)
        .map_err(|e| CliFailure::input(format!("cannot read {}: {e}", path.display())))
}

/// Widen SO archetypes to the full orthogonal group (for --orientation O).
fn reorient_group(g: &MatrixGroup) -> Result<MatrixGroup, CliFailure> {
    Ok(match g.kind() {
        GroupKind::SpecialOrthogonal => MatrixGroup::orthogonal(g.dim()),
        GroupKind::Conjugated(base, h) => {
            MatrixGroup::conjugated(reorient_group(base)?, h)
                .map_err(|e| CliFailure::unsupported(e.to_string()))?
        }
        _ => g.clone(),
    })
}

fn reorient_body(body: &BodyGrid, orientation: Orientation) -> Result<BodyGrid, CliFailure> {
    if orientation == Orientation::So {
        return Ok(body.clone());
    }
    let mut out = body.clone();
    for p in &mut out.points {
        if let PointData::Symbolic { group, .. } = &mut p.data {
            *group = reorient_group(group)?;
        }
    }
    Ok(out)
}

fn render(report: &AnalysisReport, output: OutputFormat) -> String {
    match output {
        OutputFormat::Json => format!("{}\n", report.to_json()),
        OutputFormat::Text => {
            // the timestamp lives on its own header line so the report body
            // stays byte-for-byte reproducible
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            format!("# generated at unix time {now}\n{}", report.to_text())
        }
    }
}

fn execute(command: Command) -> Result<String, CliFailure> {
    match command {
        Command::Analyze {
            body,
            fixture,
            output,
        } => cmd_analyze(body, fixture, output),
        Command::Compose {
            body_a,
            body_b,
            fixture,
            tol,
            eig_tol,
            orientation,
            svg,
            output,
        } => cmd_compose(body_a, body_b, fixture, tol, eig_tol, orientation, svg, output),
        Command::SolveIso {
            body,
            point_a,
            point_b,
            samples,
            seed,
            tol,
            output,
        } => cmd_solve_iso(&body, point_a, point_b, samples, seed, tol, output),
        Command::Fixtures { emit } => cmd_fixtures(emit),
    }
}

fn cmd_analyze(
    body_path: Option<PathBuf>,
    fixture: Option<String>,
    output: OutputFormat,
) -> Result<String, CliFailure> {
    let (name, text) = match (&body_path, &fixture) {
        (Some(path), None) => (path.display().to_string(), read_file(path)?),
        (None, Some(fx)) => {
            let f = body_fixture(fx).ok_or_else(|| {
                CliFailure::input(format!("unknown body fixture `{fx}`"))
            })?;
            (format!("fixture:{fx}"), emit_body(&f.body)?)
        }
        _ => {
            return Err(CliFailure::input(
                "provide exactly one of a body file or --fixture",
            ))
        }
    };
    let body = parse_body(&text)?;
    let mg = build_material_groupoid(&body)?;
    let (uniform, components) = match is_uniform(&mg) {
        UniformityVerdict::Uniform => (true, vec![body.points.iter().map(|p| p.id).collect()]),
        UniformityVerdict::NonUniform { components } => (false, components),
    };
    let homogeneous = if uniform {
        Some(is_discretely_homogeneous(&mg)?)
    } else {
        None
    };
    let report = AnalysisReport {
        command: "analyze".into(),
        inputs: vec![digest(&name, &text)],
        settings: json!({ "payload_tol": crate::linalg::PAYLOAD_TOL }),
        verdict: json!({
            "uniform": uniform,
            "components": components
                .iter()
                .map(|c| c.iter().map(|x| x.0).collect::<Vec<usize>>())
                .collect::<Vec<_>>(),
            "homogeneous": homogeneity_value(&homogeneous),
        }),
        warnings: vec![],
    };
    Ok(render(&report, output))
}

#[allow(clippy::too_many_arguments)]
fn cmd_compose(
    body_a: Option<PathBuf>,
    body_b: Option<PathBuf>,
    fixture: Option<String>,
    tol: f64,
    eig_tol: f64,
    orientation: Orientation,
    svg: Option<PathBuf>,
    output: OutputFormat,
) -> Result<String, CliFailure> {
    let (name_a, text_a, name_b, text_b) = match (&body_a, &body_b, &fixture) {
        (Some(pa), Some(pb), None) => (
            pa.display().to_string(),
            read_file(pa)?,
            pb.display().to_string(),
            read_file(pb)?,
        ),
        (None, None, Some(fx)) => {
            let f = composite_fixture(fx).ok_or_else(|| {
                CliFailure::input(format!("unknown composite fixture `{fx}`"))
            })?;
            (
                format!("fixture:{fx}:a"),
                emit_body(&f.body_a)?,
                format!("fixture:{fx}:b"),
                emit_body(&f.body_b)?,
            )
        }
        _ => {
            return Err(CliFailure::input(
                "provide either two body files or --fixture",
            ))
        }
    };
    let grid_a = reorient_body(&parse_body(&text_a)?, orientation)?;
    let grid_b = reorient_body(&parse_body(&text_b)?, orientation)?;
    let a = build_material_groupoid(&grid_a)?;
    let b = build_material_groupoid(&grid_b)?;
    let report = analyze_composite_with_tols(&a, &b, eig_tol, tol)?;
    if let Some(path) = &svg {
        let diagram = render_composite_svg(&grid_a, &grid_b, &report);
        std::fs::write(path, diagram)
            .map_err(|e| CliFailure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    let doc = AnalysisReport {
        command: "compose".into(),
        inputs: vec![digest(&name_a, &text_a), digest(&name_b, &text_b)],
        settings: json!({
            "tol": tol,
            "eig_tol": eig_tol,
            "orientation": match orientation { Orientation::So => "SO", Orientation::O => "O" },
            "payload_tol": crate::linalg::PAYLOAD_TOL,
        }),
        verdict: composite_verdict_value(&report),
        warnings: report.warnings.clone(),
    };
    Ok(render(&doc, output))
}

fn numeric_model(body: &BodyGrid, id: usize) -> Result<ConstitutiveModel, CliFailure> {
    let point = body
        .points
        .get(id)
        .ok_or_else(|| CliFailure::input(format!("point {id} out of range")))?;
    match &point.data {
        PointData::Numeric { model } => Ok(model.clone()),
        PointData::Symbolic { .. } => Err(CliFailure::input(format!(
            "point {id} is symbolic; solve-iso needs numeric points"
        ))),
    }
}

fn cmd_solve_iso(
    body_path: &Path,
    point_a: usize,
    point_b: usize,
    samples: usize,
    seed: u64,
    tol: f64,
    output: OutputFormat,
) -> Result<String, CliFailure> {
    let text = read_file(body_path)?;
    let body = parse_body(&text)?;
    let m_a = numeric_model(&body, point_a)?;
    let m_b = numeric_model(&body, point_b)?;
    let holdout = (samples / 3).max(8);
    let sample_set = SampleSet::generate(body.dim, samples, holdout, seed);
    let opts = SolveOptions {
        tol,
        seed,
        ..SolveOptions::default()
    };
    let solution = solve_transplant(&m_a, &m_b, &sample_set, &opts)?;
    let report = AnalysisReport {
        command: "solve-iso".into(),
        inputs: vec![digest(&body_path.display().to_string(), &text)],
        settings: json!({
            "point_a": point_a,
            "point_b": point_b,
            "samples": samples,
            "holdout": holdout,
            "seed": seed,
            "tol": tol,
            "starts": opts.starts,
            "max_iterations": opts.max_iterations,
        }),
        verdict: json!({
            "isomorphic_at_tol": solution.converged,
            "converged": solution.converged,
            "residual": solution.residual,
            "transplant": solution.p.row_major(),
            "starts_tried": solution.starts_tried,
        }),
        warnings: if solution.converged {
            vec![]
        } else {
            vec!["no start converged: points not isomorphic at this tolerance".into()]
        },
    };
    Ok(render(&report, output))
}

fn cmd_fixtures(emit: Option<PathBuf>) -> Result<String, CliFailure> {
    let mut out = String::new();
    out.push_str("composite fixtures:\n");
    for f in composite_fixtures() {
        out.push_str(&format!("  {:<26} {}\n", f.name, f.description));
        if let Some(dir) = &emit {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliFailure::input(format!("cannot create {}: {e}", dir.display())))?;
            for (suffix, body) in [("a", &f.body_a), ("b", &f.body_b)] {
                let path = dir.join(format!("{}_{suffix}.json", f.name));
                std::fs::write(&path, emit_body(body)?).map_err(|e| {
                    CliFailure::input(format!("cannot write {}: {e}", path.display()))
                })?;
            }
        }
    }
    out.push_str("body fixtures:\n");
    for f in body_fixtures() {
        out.push_str(&format!("  {:<26} {}\n", f.name, f.description));
        if let Some(dir) = &emit {
            let path = dir.join(format!("{}.json", f.name));
            std::fs::write(&path, emit_body(&f.body)?).map_err(|e| {
                CliFailure::input(format!("cannot write {}: {e}", path.display()))
            })?;
        }
    }
    Ok(out)
}
