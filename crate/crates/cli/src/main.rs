//! `lroof`: pencil spectra, roof values, positivity checks and the graph table
//! from the command line.
//!
//! Results go to stdout as JSON. Exit status is 0 on success, 1 when a
//! computation fails and 2 when the input is rejected.

mod format;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lroof::maps::{is_lorentz_positive, lift_to_lorentz, FailedStage};
use lroof::pencil::{generalized_eigenvalues, psd_interval};
use lroof::roof::{
    concurrence_h2_with_tol, roof_bipartite_with_tol, roof_lorentz_with_tol, roof_rank2_with_tol,
};
use lroof::{
    ConicDecomposition, DecompositionKind, PositivityVerdict, RoofKind, RoofResult,
    SymmetricPencil,
};

use crate::io::{
    GraphJson, HermitianJson, LorentzMapJson, Map, MapJson, OracleOut, PartOut, PencilFile,
    PointJson, RoofOut, SpectrumOut, TableRowOut, VectorJson, VerdictOut,
};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Compute(String),
}

impl From<lroof::Error> for CliError {
    fn from(e: lroof::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Compute(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "lroof", version, about = "Closed-form concurrence and I-fidelity via symmetric pencils")]
struct Cli {
    /// Relative tolerance for cone, rank and PSD decisions.
    #[arg(long, global = true, env = "LROOF_TOL", default_value_t = lroof::DEFAULT_TOL)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Concurrence,
    Fidelity,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Generalized eigenvalues of a pencil file `{"m", "P", "J"}`.
    Pencil { file: PathBuf },
    /// Roof value of a map at an input point.
    Roof {
        map: PathBuf,
        input: PathBuf,
        #[arg(long, value_enum, default_value = "concurrence")]
        kind: KindArg,
        /// Also emit an optimal decomposition.
        #[arg(long)]
        decompose: bool,
    },
    /// Distinct reports over all rank-2 graphs on a grid.
    GraphTable {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: TableFormat,
    },
    /// Brute-force bracket of the roof values by random decompositions.
    Oracle {
        map: PathBuf,
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of pure states per decomposition.
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Local refinement iterations for two-point searches.
        #[arg(long, default_value_t = 64)]
        refine: usize,
    },
    /// Lorentz positivity certificate for a Lorentz map.
    CheckPositive { map: PathBuf },
    /// The Lorentz map `Φ_L` of a Kraus or positive map.
    Lift { map: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Input(msg)) => {
            eprintln!("lroof: input error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("lroof: computation failed: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Input(format!("tolerance must be positive, got {tol}")));
    }
    match &cli.command {
        Command::Pencil { file } => pencil(file),
        Command::Roof {
            map,
            input,
            kind,
            decompose,
        } => roof(map, input, *kind, *decompose, tol),
        Command::GraphTable { rows, cols, format } => graph_table(*rows, *cols, *format),
        Command::Oracle {
            map,
            input,
            samples,
            seed,
            k,
            refine,
        } => oracle(map, input, *samples, *seed, *k, *refine),
        Command::CheckPositive { map } => check_positive(map, tol),
        Command::Lift { map } => lift(map),
    }
}

fn pencil(file: &Path) -> Result<String, CliError> {
    let f: PencilFile = io::read_json(file, "pencil file")?;
    let p = io::real_matrix(&f.p, f.m, f.m, "P")?;
    let j = io::real_matrix(&f.j, f.m, f.m, "J")?;
    let pencil = SymmetricPencil::new(p, j)?;
    let spectrum = generalized_eigenvalues(&pencil)?;
    let interval = psd_interval(&pencil, &spectrum);
    Ok(format::to_json_line(&SpectrumOut {
        eigenvectors: spectrum
            .eigenvectors
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect(),
        eigenvalues: spectrum.eigenvalues,
        psd_interval: [interval.lambda2, interval.lambda1],
        certified: interval.certified,
        max_imag_residual: spectrum.max_imag_residual,
    }))
}

fn load_map(path: &Path) -> Result<Map, CliError> {
    io::read_json::<MapJson>(path, "map file")?.into_map()
}

fn roof_out<T>(r: RoofResult<T>, point: impl Fn(&T) -> PointJson) -> RoofOut {
    let decomposition_kind = r.decomposition.as_ref().map(|d| {
        match d.kind {
            DecompositionKind::Convex => "convex",
            DecompositionKind::Conic => "conic",
        }
        .to_string()
    });
    RoofOut {
        kind: match r.kind {
            RoofKind::Concurrence => "concurrence",
            RoofKind::Fidelity => "fidelity",
        }
        .to_string(),
        value: r.value,
        lambda_used: r.lambda_used,
        eigenvalues: r.spectrum.map(|s| s.eigenvalues),
        decomposition: r.decomposition.map(|d: ConicDecomposition<T>| {
            d.parts
                .iter()
                .map(|(w, p)| PartOut {
                    weight: *w,
                    point: point(p),
                })
                .collect()
        }),
        decomposition_kind,
    }
}

fn roof(map: &Path, input: &Path, kind: KindArg, decompose: bool, tol: f64) -> Result<String, CliError> {
    let map = load_map(map)?;
    let point: PointJson = io::read_json(input, "input file")?;
    let kind = match kind {
        KindArg::Concurrence => RoofKind::Concurrence,
        KindArg::Fidelity => RoofKind::Fidelity,
    };
    let as_herm = |a: &lroof::HermitianMatrix| PointJson::Hermitian(HermitianJson::from_matrix(a));
    let out = match (map, point) {
        (Map::Lorentz(u), PointJson::Vector(v)) => {
            let r = roof_lorentz_with_tol(&u, &v.to_vector()?, kind, decompose, tol)?;
            roof_out(r, |x| PointJson::Vector(VectorJson::from_vector(x)))
        }
        (Map::Positive(phi), PointJson::Hermitian(h)) => {
            let x = h.to_matrix()?;
            let r = if phi.d1() == 2 {
                concurrence_h2_with_tol(&phi, &x, kind, decompose, tol)?
            } else {
                roof_rank2_with_tol(&phi, &x, kind, decompose, tol)?
            };
            roof_out(r, as_herm)
        }
        (Map::Bipartite(shape, variant), PointJson::Hermitian(h)) => {
            let r = roof_bipartite_with_tol(&h.to_matrix()?, shape, kind, variant, decompose, tol)?;
            roof_out(r, as_herm)
        }
        _ => return Err(CliError::Input("input kind does not match the map".into())),
    };
    Ok(format::to_json_line(&out))
}

fn graph_table(rows: usize, cols: usize, fmt: TableFormat) -> Result<String, CliError> {
    let entries = lroof::graphs::distinct_reports(rows, cols)?;
    Ok(match fmt {
        TableFormat::Text => format::text_table(&entries),
        TableFormat::Json => entries
            .iter()
            .map(|e| {
                format::to_json_line(&TableRowOut {
                    eigenvalues: e.report.eigenvalues,
                    q1: e.report.q1,
                    q2: e.report.q2,
                    concurrence: e.report.concurrence,
                    fidelity: e.report.fidelity,
                    graphs: e.graphs,
                    example: GraphJson {
                        rows: e.example.rows(),
                        cols: e.example.cols(),
                        edges: e.example.edges().iter().map(|&(u, v)| [u, v]).collect(),
                    },
                })
            })
            .collect(),
    })
}

fn oracle(
    map: &Path,
    input: &Path,
    samples: usize,
    seed: u64,
    k: usize,
    refine: usize,
) -> Result<String, CliError> {
    let map = load_map(map)?;
    let point: PointJson = io::read_json(input, "input file")?;
    let (min, max) = match (map, point) {
        (Map::Lorentz(u), PointJson::Vector(v)) => {
            let x = v.to_vector()?;
            let j = lroof::lorentz::lorentz_form(u.m());
            let est = lroof::oracle::two_point_search(
                &u.pulled_back_det(),
                &j,
                x.as_dvector(),
                samples,
                seed,
                refine,
            )?;
            (est.lower_kind_value, est.upper_kind_value)
        }
        (Map::Positive(phi), PointJson::Hermitian(h)) => {
            let est = lroof::oracle::pure_state_search(&phi, &h.to_matrix()?, k, samples, seed)?;
            (est.lower_kind_value, est.upper_kind_value)
        }
        (Map::Bipartite(..), _) => {
            return Err(CliError::Input("the oracle does not support bipartite maps".into()))
        }
        _ => return Err(CliError::Input("input kind does not match the map".into())),
    };
    Ok(format::to_json_line(&OracleOut {
        min,
        max,
        samples,
        seed,
    }))
}

fn check_positive(map: &Path, tol: f64) -> Result<String, CliError> {
    let Map::Lorentz(u) = load_map(map)? else {
        return Err(CliError::Input("check-positive expects a Lorentz map".into()));
    };
    let out = match is_lorentz_positive(&u, tol)? {
        PositivityVerdict::Positive { lambda_hat } => VerdictOut {
            verdict: "positive".into(),
            lambda_hat: Some(lambda_hat),
            stage: None,
            witness: None,
        },
        PositivityVerdict::NotPositive { stage, witness } => VerdictOut {
            verdict: "not_positive".into(),
            lambda_hat: None,
            stage: Some(
                match stage {
                    FailedStage::NonRealSpectrum => "non_real_spectrum",
                    FailedStage::NoPsdCertificate => "no_psd_certificate",
                    FailedStage::AnchorOutside => "anchor_outside",
                    FailedStage::BoundaryImage => "boundary_image",
                }
                .into(),
            ),
            witness: witness.as_ref().map(VectorJson::from_vector),
        },
    };
    Ok(format::to_json_line(&out))
}

fn lift(map: &Path) -> Result<String, CliError> {
    let Map::Positive(phi) = load_map(map)? else {
        return Err(CliError::Input("lift expects a Kraus or positive map".into()));
    };
    Ok(format::to_json_line(&LorentzMapJson::from_map(&lift_to_lorentz(&phi))))
}
