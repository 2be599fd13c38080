//! Command-line front end: config resolution, study orchestration and
//! on-disk artifacts (`table.csv`, `solution_<level>.vtk`, `manifest.txt`).

mod config;
mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Parser;

pub use config::{parse_config, Command, RunConfig, KNOWN_KEYS};
pub use output::{vtk_string, write_atomic, Manifest};

use crate::estimator::Projection;
use crate::forms::{CiEstimate, FormsError};
use crate::mesh::{audit, generate_structured, read_mesh_file, AuditConfig, AuditReport, TriMesh};
use crate::solver::SolverError;
use crate::study::{
    adaptive_study_from, solve_level, uniform_study_from, AdaptiveOptions, ConvergenceTable,
    LevelOutput, ManufacturedCase, RateKind, StudyError, StudyOptions,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("mesh: {0}")]
    Mesh(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Mesh(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    /// The message on a single line.
    pub fn diagnostic(&self) -> String {
        let text = self.to_string();
        let parts: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        format!("stokes-stab: error: {}", parts.join("; "))
    }
}

impl From<StudyError> for CliError {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Config(m) => CliError::Config(m),
            StudyError::Mesh(m) => CliError::Mesh(m.to_string()),
            StudyError::Solve {
                level,
                source:
                    SolverError::Forms(
                        f @ (FormsError::InadmissibleAlpha { .. } | FormsError::InvalidAlpha(_)),
                    ),
            } => CliError::Config(format!(
                "level {level}: {f} (stabilization admissibility bound)"
            )),
            e @ StudyError::Solve { .. } => CliError::Solver(e.to_string()),
            StudyError::Output(e) => CliError::Io(e.to_string()),
        }
    }
}

/// What a successful run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub manifest: Manifest,
    pub table: Option<ConvergenceTable>,
    pub audit: Option<AuditReport>,
    /// Files written, in order.
    pub files: Vec<PathBuf>,
}

fn load_mesh(
    cfg: &RunConfig,
    case: &ManufacturedCase,
) -> Result<(TriMesh, AuditReport, String), CliError> {
    let (mesh, source) = match &cfg.mesh {
        Some(path) => {
            let mesh = read_mesh_file(path)
                .map_err(|e| CliError::Mesh(format!("{}: {e}", path.display())))?;
            (mesh, path.display().to_string())
        }
        None => {
            let mesh = generate_structured(case.domain, cfg.n, case.boundary)
                .map_err(|e| CliError::Mesh(e.to_string()))?;
            (mesh, format!("structured {} n={}", case.domain, cfg.n))
        }
    };
    let report = audit(
        &mesh,
        &AuditConfig {
            min_angle_deg: cfg.min_angle,
        },
    );
    Ok((mesh, report, source))
}

fn checked_mesh(cfg: &RunConfig, case: &ManufacturedCase) -> Result<(TriMesh, String), CliError> {
    let (mesh, report, source) = load_mesh(cfg, case)?;
    if !report.passed() {
        return Err(CliError::Mesh(format!("{source}: {}", report.summary())));
    }
    Ok((mesh, source))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn base_manifest(cfg: &RunConfig, case: &ManufacturedCase, mesh_source: &str) -> Manifest {
    let mut m = Manifest::default();
    m.push("version", VERSION);
    m.push("command", cfg.command);
    m.push("case", case.name());
    m.push("mesh", mesh_source);
    m.push("pair", cfg.pair);
    m.push("alpha_requested", cfg.alpha);
    m.push("seed", cfg.seed);
    m.push(
        "projection",
        match cfg.projection {
            Projection::Global => "global",
            Projection::Elementwise => "elementwise",
        },
    );
    m.push("min_angle", cfg.min_angle);
    let q = case.problem().quadrature_for(cfg.pair);
    m.push("quadrature_bilinear", q.bilinear);
    m.push("quadrature_load", q.load);
    m.push("quadrature_divergence", q.divergence);
    m.push("quadrature_estimator", q.estimator);
    m.push("quadrature_estimator_edge", q.estimator_edge);
    m.push("quadrature_error", q.error);
    m
}

fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn push_resolved(m: &mut Manifest, alphas: &[f64], cis: &[CiEstimate]) {
    if let (Some(a), Some(c)) = (alphas.first(), cis.first()) {
        m.push("alpha", a);
        m.push("ci_estimate", c);
    }
    m.push("alpha_by_level", join(alphas));
    m.push("ci_by_level", join(cis));
}

/// Runs one command, writing its artifacts under `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let case = ManufacturedCase::new(cfg.case);
    if cfg.command == Command::Audit {
        let (_, report, source) = load_mesh(cfg, &case)?;
        if !report.passed() {
            return Err(CliError::Mesh(format!("{source}: {}", report.summary())));
        }
        let mut manifest = base_manifest(cfg, &case, &source);
        manifest.push("audit", "passed");
        return Ok(RunSummary {
            manifest,
            table: None,
            audit: Some(report),
            files: Vec::new(),
        });
    }

    let (mesh, source) = checked_mesh(cfg, &case)?;
    fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
    let mut files = Vec::new();
    let mut alphas = Vec::new();
    let mut cis = Vec::new();
    let mut on_level = |out: LevelOutput<'_>| -> std::io::Result<()> {
        let path = cfg.out.join(format!("solution_{}.vtk", out.level));
        let title = format!(
            "stokes-stab {} {} {} level {}",
            cfg.command,
            case.name(),
            cfg.pair,
            out.level
        );
        write_atomic(
            &path,
            &vtk_string(out.space, out.solution, out.report, &title),
        )?;
        files.push(path);
        alphas.push(out.solution.alpha);
        cis.push(out.solution.ci);
        Ok(())
    };

    let mut manifest = base_manifest(cfg, &case, &source);
    let table = match cfg.command {
        Command::Solve => {
            let problem = case.problem().with_alpha(cfg.alpha);
            let (space, solution, report, record) =
                solve_level(0, Arc::new(mesh), cfg.pair, &problem, cfg.projection, false)?;
            on_level(LevelOutput {
                level: 0,
                space: &space,
                solution: &solution,
                report: &report,
                record: &record,
            })
            .map_err(StudyError::from)?;
            ConvergenceTable {
                rows: vec![record],
                rate_kind: RateKind::Halving,
                alpha: solution.alpha,
            }
        }
        Command::UniformStudy => {
            manifest.push("levels", cfg.levels);
            let opts = StudyOptions {
                pair: cfg.pair,
                alpha: cfg.alpha,
                levels: cfg.levels,
                initial_n: cfg.n,
                projection: cfg.projection,
                efficiency: false,
            };
            uniform_study_from(&case, mesh, &opts, &mut on_level)?
        }
        Command::AdaptiveStudy => {
            manifest.push("theta", cfg.theta);
            manifest.push("max_iters", cfg.max_iters);
            if let Some(t) = cfg.target_eta {
                manifest.push("target_eta", t);
            }
            let opts = AdaptiveOptions {
                pair: cfg.pair,
                alpha: cfg.alpha,
                theta: cfg.theta,
                max_iters: cfg.max_iters,
                target_eta: cfg.target_eta,
                initial_n: cfg.n,
                projection: cfg.projection,
            };
            adaptive_study_from(&case, mesh, &opts, &mut on_level)?.to_table()
        }
        Command::Audit => unreachable!("handled above"),
    };
    push_resolved(&mut manifest, &alphas, &cis);
    manifest.push(
        "rate",
        match table.rate_kind {
            RateKind::Halving => "log2 ratio of successive errors",
            RateKind::Dofs => "-2 log ratio of errors over log ratio of dofs",
        },
    );
    manifest.push("rows", table.rows.len());

    let csv_path = cfg.out.join("table.csv");
    write_atomic(&csv_path, &table.to_csv()).map_err(io_err(&csv_path))?;
    files.push(csv_path);
    let manifest_path = cfg.out.join("manifest.txt");
    write_atomic(&manifest_path, &manifest.render()).map_err(io_err(&manifest_path))?;
    files.push(manifest_path);
    Ok(RunSummary {
        manifest,
        table: Some(table),
        audit: None,
        files,
    })
}

#[derive(Debug, Parser)]
#[command(
    name = "stokes-stab",
    version,
    about = "Stabilized mixed finite elements for 2D Stokes flow"
)]
struct Args {
    /// One of solve, uniform-study, adaptive-study, audit.
    #[arg(value_parser = ["solve", "uniform-study", "adaptive-study", "audit"])]
    command: String,
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    /// P1P1 or P2P1.
    #[arg(long)]
    pair: Option<String>,
    /// Stabilization parameter or `auto`.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    /// Dörfler parameter.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long)]
    target_eta: Option<String>,
    /// Subdivisions of the structured starting mesh.
    #[arg(long)]
    n: Option<String>,
    /// Mesh file replacing the structured mesh.
    #[arg(long)]
    mesh: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// global or elementwise.
    #[arg(long)]
    projection: Option<String>,
    /// Audit threshold in degrees.
    #[arg(long)]
    min_angle: Option<String>,
}

impl Args {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let command: Command = self.command.parse().map_err(CliError::Config)?;
        let mut pairs = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                parse_config(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => BTreeMap::new(),
        };
        let flags = [
            ("case", self.case),
            ("pair", self.pair),
            ("alpha", self.alpha),
            ("levels", self.levels),
            ("theta", self.theta),
            ("max_iters", self.max_iters),
            ("target_eta", self.target_eta),
            ("n", self.n),
            ("mesh", self.mesh),
            ("out", self.out),
            ("seed", self.seed),
            ("projection", self.projection),
            ("min_angle", self.min_angle),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                pairs.insert(key.to_string(), v);
            }
        }
        RunConfig::from_pairs(command, &pairs).map_err(CliError::Config)
    }
}

/// Parses `args` (program name first) into a config.
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Args::try_parse_from(args).and_then(|a| {
        a.into_config()
            .map_err(|e| clap::Error::raw(clap::error::ErrorKind::ValueValidation, e.diagnostic()))
    })
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match Args::try_parse_from(args) {
        Ok(a) => a.into_config(),
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            Err(CliError::Config(first.to_string()))
        }
    };
    match cfg.and_then(|cfg| run(&cfg)) {
        Ok(summary) => {
            if let Some(report) = &summary.audit {
                print!("{report}");
            }
            if let Some(table) = &summary.table {
                print!("{}", table.to_csv());
            }
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Alpha;
    use crate::study::CaseId;

    fn config(command: Command, out: &Path) -> RunConfig {
        let mut cfg = RunConfig::new(command);
        cfg.out = out.to_path_buf();
        cfg.n = 2;
        cfg
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "case = NONZERO_G\nlevels = 5\n").unwrap();
        let cfg = parse_args([
            "stokes-stab",
            "uniform-study",
            "--config",
            path.to_str().unwrap(),
            "--levels",
            "3",
        ])
        .unwrap();
        assert_eq!(cfg.case, CaseId::NonzeroG);
        assert_eq!(cfg.levels, 3);
        assert_eq!(cfg.command, Command::UniformStudy);
    }

    #[test]
    fn solve_writes_three_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&config(Command::Solve, dir.path())).unwrap();
        let names: Vec<_> = summary
            .files
            .iter()
            .map(|f| f.file_name().unwrap().to_str().unwrap())
            .collect();
        assert_eq!(names, ["solution_0.vtk", "table.csv", "manifest.txt"]);
        assert_eq!(summary.manifest.get("alpha"), Some("0.1"));
        assert_eq!(summary.manifest.get("ci_estimate"), Some("unbounded"));
    }

    #[test]
    fn inadmissible_alpha_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(Command::Solve, dir.path());
        cfg.pair = crate::space::ElementPair::P2P1;
        cfg.alpha = Alpha::Value(0.5);
        let err = run(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.diagnostic().contains("C_I"), "{}", err.diagnostic());
        assert!(!err.diagnostic().contains('\n'));
    }

    #[test]
    fn missing_mesh_file_is_a_mesh_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(Command::Audit, dir.path());
        cfg.mesh = Some(dir.path().join("absent.mesh"));
        assert_eq!(run(&cfg).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn unknown_flag_is_a_config_error() {
        assert_eq!(main_with_args(["stokes-stab", "solve", "--bogus", "1"]), 2);
        assert_eq!(main_with_args(["stokes-stab", "solve", "--theta", "2"]), 2);
    }
}
