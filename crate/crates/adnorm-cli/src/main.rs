//! Command-line front end: norms, duals, norming functionals, majorization,
//! orbit-hull decompositions, polytope duality and the verification suite.
//! stdout carries machine JSON only; human summaries go to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use adnorm::gauge::GaugeSpec;
use adnorm::geometry::{is_self_dual, orbit_polytope, polar_dual, Polytope};
use adnorm::io::{self, MatrixJson, PolytopeJson};
use adnorm::majorization::{
    default_tol, ds_witness, hull_decomposition, in_orbit_hull, majorizes,
};
use adnorm::norms::MatrixNorm;
use adnorm::verify::{birkhoff_distance, run_suite, SuiteConfig};
use adnorm::{OrbitGaugeSpec, SkewHermitian};

/// Exit codes: 0 success, 1 I/O or parse, 2 verification FLAG,
/// 3 invalid configuration, 4 numerical failure.
#[derive(Parser)]
#[command(name = "adnorm", version, about = "Ad-invariant Finsler norms on skew-Hermitian matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GaugeArg {
    /// Gauge description JSON, e.g. '{"kind":"orbit","c":[0.7071,0,-0.7071]}'
    #[arg(long, value_name = "JSON")]
    gauge: Option<String>,
    /// Read the gauge description from a file instead.
    #[arg(long, value_name = "PATH", conflicts_with = "gauge")]
    gauge_file: Option<PathBuf>,
}

#[derive(Args)]
struct OutArg {
    /// Write the JSON result here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Matrix norm of a skew-Hermitian matrix under a gauge.
    Norm {
        #[command(flatten)]
        gauge: GaugeArg,
        #[arg(long, value_name = "PATH")]
        matrix: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Dual norm (support function at the eigenvalue vector).
    Dual {
        #[command(flatten)]
        gauge: GaugeArg,
        #[arg(long, value_name = "PATH")]
        matrix: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Certified norming functional for a nonzero matrix.
    Norming {
        #[command(flatten)]
        gauge: GaugeArg,
        #[arg(long, value_name = "PATH")]
        matrix: PathBuf,
        /// Certification tolerance (default scale-aware 1e-8).
        #[arg(long)]
        cert_tol: Option<f64>,
        /// Eigenvalue clustering tolerance (default 1e-8 * max(1, ||V||_F)).
        #[arg(long)]
        cluster_tol: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Strong majorization test between two spectra (vector or matrix files).
    Majorize {
        /// The majorized side.
        #[arg(long, value_name = "PATH")]
        z: PathBuf,
        /// The majorizing side.
        #[arg(long, value_name = "PATH")]
        w: PathBuf,
        /// Partial-sum tolerance (default scale-aware 1e-9).
        #[arg(long)]
        tol: Option<f64>,
        /// Also emit the doubly stochastic witness.
        #[arg(long)]
        emit_witness: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Orbit-hull membership and constructive decomposition.
    Hull {
        #[arg(long, value_name = "PATH")]
        z: PathBuf,
        #[arg(long, value_name = "PATH")]
        w: PathBuf,
        /// Write the full decomposition (weights + conjugators) here.
        #[arg(long, value_name = "PATH")]
        emit_decomposition: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Permutation polytope of a traceless direction vector.
    Polytope {
        /// Direction entries as JSON, e.g. '[1,0,-1]'.
        #[arg(long, value_name = "JSON")]
        c: String,
        /// Normalize the direction to unit Frobenius norm first.
        #[arg(long)]
        normalize: bool,
        /// Emit slice coordinates as CSV for plotting.
        #[arg(long, value_name = "PATH")]
        emit_csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Polar dual of a polytope within its affine hull.
    Polar {
        #[arg(long, value_name = "PATH")]
        polytope: PathBuf,
        #[arg(long, value_name = "PATH")]
        emit_csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Self-duality detection (homothety + rotation of the polar dual).
    Selfdual {
        #[arg(long, value_name = "PATH")]
        polytope: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Taylor complexification norm of A + iB.
    Taylor {
        #[command(flatten)]
        gauge: GaugeArg,
        #[arg(long, value_name = "PATH")]
        matrix_a: PathBuf,
        #[arg(long, value_name = "PATH")]
        matrix_b: PathBuf,
        /// Grid resolution in t (refined by golden section).
        #[arg(long, default_value_t = 720)]
        grid: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Birkhoff orthogonality: inf_s ||V - s[X,V]|| against ||V||.
    Birkhoff {
        #[command(flatten)]
        gauge: GaugeArg,
        #[arg(long, value_name = "PATH")]
        matrix: PathBuf,
        /// Direction matrix X.
        #[arg(long, value_name = "PATH")]
        direction: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run the randomized theorem-verification suite.
    Verify {
        /// Suite configuration JSON (defaults are used when omitted).
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Seed override (also via the ADNORM_SEED environment variable).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// "Exactly zero" threshold (default 1e-9, scale-aware).
        #[arg(long)]
        tol_zero: Option<f64>,
        /// Inconclusive-band multiplier for two-sided criteria (default 10).
        #[arg(long)]
        hysteresis: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug)]
enum CliError {
    Io(String),
    Config(String),
    Numerical(String),
    Flagged,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Flagged => 2,
            CliError::Config(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        match e {
            io::IoError::Matrix(m) => CliError::Numerical(m.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<adnorm::norms::NormError> for CliError {
    fn from(e: adnorm::norms::NormError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<adnorm::geometry::GeometryError> for CliError {
    fn from(e: adnorm::geometry::GeometryError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<adnorm::verify::VerifyError> for CliError {
    fn from(e: adnorm::verify::VerifyError) -> Self {
        match e {
            adnorm::verify::VerifyError::Config(c) => CliError::Config(c),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Io(msg) => eprintln!("error (io): {msg}"),
                CliError::Config(msg) => eprintln!("error (config): {msg}"),
                CliError::Numerical(msg) => eprintln!("error (numerical): {msg}"),
                CliError::Flagged => eprintln!("verification produced FLAG verdicts"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_gauge(arg: &GaugeArg, n: usize) -> Result<MatrixNorm, CliError> {
    let text = match (&arg.gauge, &arg.gauge_file) {
        (Some(inline), _) => inline.clone(),
        (None, Some(path)) => {
            std::fs::read_to_string(path).map_err(|e| CliError::Io(e.to_string()))?
        }
        (None, None) => return Err(CliError::Config("missing --gauge or --gauge-file".into())),
    };
    let spec: GaugeSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad gauge JSON: {e}")))?;
    let gauge = spec
        .build(n)
        .map_err(|e| CliError::Config(format!("gauge incompatible with n={n}: {e}")))?;
    Ok(MatrixNorm::new(gauge))
}

fn emit(out: &OutArg, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    match &out.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(e.to_string()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn load_matrix(path: &Path) -> Result<SkewHermitian, CliError> {
    Ok(io::load_matrix(path)?)
}

/// A file that holds either a matrix (spectrum is used) or a bare vector.
fn load_spectrum(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(e.to_string()))?;
    if let Ok(mj) = serde_json::from_str::<MatrixJson>(&text) {
        let m = mj.to_skew()?;
        let spec = adnorm::matrix::spectral(&m, None)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        return Ok(spec.eigenvalues().to_vec());
    }
    let vj: io::VectorJson =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("bad vector JSON: {e}")))?;
    Ok(vj.into_vec())
}

fn load_polytope(path: &Path) -> Result<Polytope, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(e.to_string()))?;
    let pj: PolytopeJson =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("bad polytope JSON: {e}")))?;
    Ok(pj.to_polytope()?)
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Norm { gauge, matrix, out } => {
            let m = load_matrix(&matrix)?;
            let norm = load_gauge(&gauge, m.dim())?;
            let value = norm.value(&m)?;
            eprintln!("norm = {value}");
            emit(&out, &json!({ "value": value }))
        }
        Command::Dual { gauge, matrix, out } => {
            let m = load_matrix(&matrix)?;
            let norm = load_gauge(&gauge, m.dim())?;
            let value = norm.dual_value(&m)?;
            eprintln!("dual norm = {value}");
            emit(&out, &json!({ "value": value }))
        }
        Command::Norming {
            gauge,
            matrix,
            cert_tol,
            cluster_tol,
            out,
        } => {
            let m = load_matrix(&matrix)?;
            let norm = load_gauge(&gauge, m.dim())?;
            let tol = cert_tol.unwrap_or(1e-8 * (1.0 + m.frobenius_norm()));
            let nm = norm.norming_full(&m, tol, cluster_tol)?;
            eprintln!(
                "norming functional certified: (N|V) = {}, ||N||' = {}",
                nm.value_at_target(),
                nm.certified_dual_norm()
            );
            emit(
                &out,
                &json!({
                    "value": nm.value_at_target(),
                    "certified_dual_norm": nm.certified_dual_norm(),
                    "residuals": nm.residuals(),
                    "cluster_tol": cluster_tol
                        .unwrap_or_else(|| adnorm::matrix::default_cluster_tol(&m)),
                    "matrix": MatrixJson::from_skew(nm.matrix()),
                }),
            )
        }
        Command::Majorize {
            z,
            w,
            tol,
            emit_witness,
            out,
        } => {
            let zv = load_spectrum(&z)?;
            let wv = load_spectrum(&w)?;
            let tol = tol.unwrap_or_else(|| default_tol(&wv));
            let rep = majorizes(&wv, &zv, tol).map_err(|e| CliError::Config(e.to_string()))?;
            eprintln!("majorization holds: {}", rep.holds);
            let witness = if emit_witness && rep.holds {
                let a = ds_witness(&wv, &zv).map_err(|e| CliError::Numerical(e.to_string()))?;
                let rows: Vec<Vec<f64>> = (0..a.nrows())
                    .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
                    .collect();
                Some(rows)
            } else {
                None
            };
            emit(
                &out,
                &json!({
                    "holds": rep.holds,
                    "partial_gaps": rep.partial_gaps,
                    "trace_gap": rep.trace_gap,
                    "tolerance": rep.tolerance,
                    "witness": witness,
                }),
            )
        }
        Command::Hull {
            z,
            w,
            emit_decomposition,
            out,
        } => {
            let zm = load_matrix(&z)?;
            let wm = load_matrix(&w)?;
            let inside = in_orbit_hull(&zm, &wm, 1e-9)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            eprintln!("in orbit hull: {inside}");
            if !inside {
                return emit(&out, &json!({ "in_hull": false }));
            }
            let d = hull_decomposition(&zm, &wm)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            if let Some(path) = emit_decomposition {
                let conjugators: Vec<serde_json::Value> = d
                    .conjugators
                    .iter()
                    .map(|u| {
                        let n = u.nrows();
                        let re: Vec<Vec<f64>> = (0..n)
                            .map(|i| (0..n).map(|j| u[(i, j)].re).collect())
                            .collect();
                        let im: Vec<Vec<f64>> = (0..n)
                            .map(|i| (0..n).map(|j| u[(i, j)].im).collect())
                            .collect();
                        json!({ "n": n, "re": re, "im": im })
                    })
                    .collect();
                let payload = json!({
                    "weights": d.weights,
                    "conjugators": conjugators,
                    "residual": d.residual,
                });
                std::fs::write(
                    &path,
                    serde_json::to_string_pretty(&payload).map_err(|e| CliError::Io(e.to_string()))?,
                )
                .map_err(|e| CliError::Io(e.to_string()))?;
            }
            emit(
                &out,
                &json!({
                    "in_hull": true,
                    "term_count": d.term_count(),
                    "residual": d.residual,
                    "weights": d.weights,
                }),
            )
        }
        Command::Polytope {
            c,
            normalize,
            emit_csv,
            out,
        } => {
            let entries: Vec<f64> = serde_json::from_str(&c)
                .map_err(|e| CliError::Config(format!("bad direction JSON: {e}")))?;
            let spec = if normalize {
                OrbitGaugeSpec::normalized(&entries)
            } else {
                OrbitGaugeSpec::new(&entries)
            }
            .map_err(|e| CliError::Config(e.to_string()))?;
            let p = orbit_polytope(&spec)?;
            eprintln!("{} vertices, {} facets", p.vertices.len(), p.facets.len());
            if let Some(path) = emit_csv {
                std::fs::write(&path, p.slice_csv()).map_err(|e| CliError::Io(e.to_string()))?;
            }
            emit(
                &out,
                &serde_json::to_value(PolytopeJson::from_polytope(&p))
                    .map_err(|e| CliError::Io(e.to_string()))?,
            )
        }
        Command::Polar {
            polytope,
            emit_csv,
            out,
        } => {
            let p = load_polytope(&polytope)?;
            let d = polar_dual(&p)?;
            eprintln!("dual has {} vertices", d.vertices.len());
            if let Some(path) = emit_csv {
                std::fs::write(&path, d.slice_csv()).map_err(|e| CliError::Io(e.to_string()))?;
            }
            emit(
                &out,
                &serde_json::to_value(PolytopeJson::from_polytope(&d))
                    .map_err(|e| CliError::Io(e.to_string()))?,
            )
        }
        Command::Selfdual { polytope, tol, out } => {
            let p = load_polytope(&polytope)?;
            let (self_dual, transform) = is_self_dual(&p, tol);
            eprintln!("self-dual: {self_dual}");
            emit(
                &out,
                &json!({
                    "self_dual": self_dual,
                    "scale": transform.as_ref().map(|t| t.scale),
                }),
            )
        }
        Command::Taylor {
            gauge,
            matrix_a,
            matrix_b,
            grid,
            out,
        } => {
            let a = load_matrix(&matrix_a)?;
            let b = load_matrix(&matrix_b)?;
            let norm = load_gauge(&gauge, a.dim())?;
            let t = norm.taylor_with_grid(&a, &b, grid)?;
            eprintln!("taylor norm = {} (argmax t = {})", t.value, t.argmax_t);
            emit(
                &out,
                &json!({
                    "value": t.value,
                    "argmax_t": t.argmax_t,
                    "grid_points": t.grid_points,
                }),
            )
        }
        Command::Birkhoff {
            gauge,
            matrix,
            direction,
            out,
        } => {
            let v = load_matrix(&matrix)?;
            let x = load_matrix(&direction)?;
            let norm = load_gauge(&gauge, v.dim())?;
            let (min_value, argmin_s) = birkhoff_distance(&norm, &v, &x)?;
            let norm_v = norm.value(&v)?;
            eprintln!("inf_s ||V - s[X,V]|| = {min_value} at s = {argmin_s}; ||V|| = {norm_v}");
            emit(
                &out,
                &json!({
                    "min_value": min_value,
                    "argmin_s": argmin_s,
                    "norm_v": norm_v,
                }),
            )
        }
        Command::Verify {
            config,
            seed,
            trials,
            tol_zero,
            hysteresis,
            out,
        } => {
            let mut cfg: SuiteConfig = match config {
                Some(path) => {
                    let text =
                        std::fs::read_to_string(&path).map_err(|e| CliError::Io(e.to_string()))?;
                    serde_json::from_str(&text)
                        .map_err(|e| CliError::Config(format!("bad config: {e}")))?
                }
                None => SuiteConfig::default(),
            };
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = tol_zero {
                cfg.tol_zero = t;
            }
            if let Some(h) = hysteresis {
                cfg.hysteresis = h;
            }
            if let Ok(env_seed) = std::env::var("ADNORM_SEED") {
                cfg.seed = env_seed
                    .parse()
                    .map_err(|_| CliError::Config("ADNORM_SEED must be an integer".into()))?;
            }
            let report = run_suite(&cfg)?;
            for r in &report.reports {
                eprintln!(
                    "{}: {} (max violation {:.3e}, tol {:.1e}, {} flags)",
                    r.property_id,
                    if r.passed { "pass" } else { "FAIL" },
                    r.max_violation,
                    r.tolerance,
                    r.flags
                );
            }
            eprintln!(
                "suite: {} reports, {} flags, seed {}",
                report.reports.len(),
                report.flags,
                report.seed
            );
            emit(
                &out,
                &serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?,
            )?;
            if report.flags > 0 {
                return Err(CliError::Flagged);
            }
            Ok(())
        }
    }
}
