//! Command-line entry point: every check, scan, and solver in the library
//! behind one binary with deterministic, machine-readable output.
//!
//! Exit status is 0 when all requested assertions pass, 1 when at least one
//! fails, and 2 on usage errors (including malformed input files). Reports go
//! to stdout unless `--out` names a file; floats are printed with 17
//! significant digits so two runs with the same seed are byte-identical.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wronski::bethe::{FormKind, TensorSpace};
use wronski::config::{RunConfig, DUAL_CONVENTION, DUAL_SHIFT};
use wronski::inverse::{
    axis, example_reality_condition, GroupSpec, InverseProblem, ScanTable,
};
use wronski::linalg;
use wronski::matrices::{
    cm_rank_one, commutator_rank_one, conjugation_check, realize_real_form,
    reality_verdict, spectrum_vs_wronskian, CmMode, CmPair, Kind, RankOneReport,
    RealityVerdict, SpectrumReport,
};
use wronski::poly::{Polynomial, C64};
use wronski::quasiexp::{discrete_derivative, ConfluentFamily, Member, Mode, QuasiExpSpace};
use wronski::quasipoly::{
    calibrate_dual_convention, duality_check, random_unramified_space, DualityReport,
    QuasiPolySpace,
};
use wronski::report;

#[derive(Parser)]
#[command(name = "wronski", version, about = "Wronskian spaces, structured matrices, and spin-chain forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    globals: Globals,
}

#[derive(Args, Clone)]
struct Globals {
    /// Master seed; parallel work items derive their streams from it
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Reality / agreement tolerance for assertions
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Multistart count for the inverse solver
    #[arg(long, global = true, default_value_t = 200)]
    starts: usize,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format; csv applies to scan output only
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Structured-matrix family names as used on the command line.
#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    /// multiplicative family (bases on the diagonal denominator)
    Zd,
    /// exponent family (pure difference denominators)
    Z,
    /// quasi-polynomial family
    Qd,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Kind {
        match k {
            KindArg::Zd => Kind::Multiplicative,
            KindArg::Z => Kind::Exponent,
            KindArg::Qd => Kind::QuasiPolynomial,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Factored Wronskian of a quasi-exponential space read from JSON
    Wronskian {
        /// Space description: {"mode": ..., "members": [{"base"|"exponent", "poly"}]}
        #[arg(long)]
        space: PathBuf,
        /// Step of the discrete Wronskian (exponent mode only; multiplicative is fixed at 1)
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        step: f64,
        /// Differential Wronskian instead of the discrete one (exponent mode)
        #[arg(long)]
        differential: bool,
    },
    /// Solve an inverse problem described by a JSON file
    Inverse {
        /// Problem description: {"mode", "targets": [[re,im],...], "groups": [{"param","degrees"},...]}
        #[arg(long)]
        problem: PathBuf,
    },
    /// Grid scan comparing solver reality verdicts against the closed condition
    Scan {
        /// Worked family: 1 (two bases, one target axis) or 2 (single group, two targets)
        #[arg(long)]
        example: u8,
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Second-coordinate values; defaults to the published slice set for
        /// example 1 and to the min/max/step axis for example 2
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        second: Option<Vec<f64>>,
    },
    /// Structured-matrix checks: spectrum pairing, rank-one commutator, reality
    MatrixCheck {
        /// Family: zd, z, or qd
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Parameter file: {"params": [...], "diag": [...]}
        #[arg(long)]
        params: PathBuf,
    },
    /// Rank-one certificate and real structured form for an abstract matrix pair
    CmCheck {
        /// Pair file: {"mode": "multiplicative"|"additive", "z": [[...]], "q": [[...]]}
        #[arg(long)]
        pair: PathBuf,
    },
    /// Spin-chain identities: residue formula, commutativity, symmetry, positivity
    BetheCheck {
        /// Local space dimension
        #[arg(long = "N")]
        local_dim: usize,
        /// Number of sites
        #[arg(long = "n")]
        sites: usize,
        /// Evaluation points, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Vec<f64>,
        /// Twist diagonal, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Vec<f64>,
        /// Certify the twisted form for this block size instead of the plain one
        #[arg(long)]
        twist: Option<usize>,
    },
    /// Bispectral duality: calibrate, then sweep random spaces or check one file
    DualCheck {
        /// Check this space (JSON) instead of sweeping random ones
        #[arg(long)]
        space: Option<PathBuf>,
        /// Number of random spaces in the sweep
        #[arg(long, default_value_t = 100)]
        count: u64,
    },
    /// Deterministic spot checks across every module
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.globals.jobs {
        // Ignore the error from a pool that is already initialized.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    let g = &cli.globals;
    let cfg = RunConfig { seed: g.seed, tol: g.tol, starts: g.starts, jobs: g.jobs };
    match &cli.command {
        Command::Wronskian { space, step, differential } => {
            require_json(g)?;
            let space: QuasiExpSpace = read_json(space)?;
            let value = if *differential {
                space.wronskian()
            } else {
                space.discrete_wronskian(*step)
            }
            .map_err(|e| e.to_string())?;
            emit(g, &report::json_string(&value).map_err(|e| e.to_string())?)?;
            Ok(true)
        }
        Command::Inverse { problem } => {
            require_json(g)?;
            let spec: ProblemSpec = read_json(problem)?;
            let problem = InverseProblem::new(
                spec.mode,
                spec.targets.iter().map(|t| C64::new(t[0], t[1])).collect(),
                spec.groups,
            )
            .map_err(|e| e.to_string())?;
            let set = problem.solve_inverse(&cfg);
            emit(g, &report::json_string(&set).map_err(|e| e.to_string())?)?;
            Ok(true)
        }
        Command::Scan { example, min, max, step, second } => {
            let a_values = axis(*min, *max, *step);
            let second_values = match (second, example) {
                (Some(list), _) => list.clone(),
                (None, 1) => vec![-3.0, -1.0, -0.25, 0.5, 2.0],
                _ => a_values.clone(),
            };
            let table = wronski::inverse::scan_region(*example, &a_values, &second_values, &cfg)
                .map_err(|e| e.to_string())?;
            let text = match g.format.unwrap_or(Format::Csv) {
                Format::Csv => report::scan_csv(&table).map_err(|e| e.to_string())?,
                Format::Json => report::json_string(&table).map_err(|e| e.to_string())?,
            };
            emit(g, &text)?;
            if g.out.is_some() {
                println!("{}", scan_summary(&table));
            }
            Ok(table.disagreements == 0)
        }
        Command::MatrixCheck { kind, params } => {
            require_json(g)?;
            let spec: ParamsSpec = read_json(params)?;
            let kind = Kind::from(*kind);
            let spectrum = spectrum_vs_wronskian(kind, &spec.params, &spec.diag)
                .map_err(|e| e.to_string())?;
            let rank_one = commutator_rank_one(kind, &spec.params, &spec.diag)
                .map_err(|e| e.to_string())?;
            let reality = reality_verdict(kind, &spec.params, &spec.diag, g.tol)
                .map_err(|e| e.to_string())?;
            let pass = spectrum.max_pair_distance <= g.tol
                && rank_one.max_deviation <= g.tol
                && reality.consistent;
            let out = MatrixReport { kind, spectrum, rank_one, reality, pass };
            emit(g, &report::json_string(&out).map_err(|e| e.to_string())?)?;
            Ok(pass)
        }
        Command::CmCheck { pair } => {
            require_json(g)?;
            let spec: PairSpec = read_json(pair)?;
            let pair = CmPair {
                z: real_matrix(&spec.z)?,
                q: real_matrix(&spec.q)?,
                mode: spec.mode,
            };
            let cert = cm_rank_one(&pair).map_err(|e| e.to_string())?;
            let (real_form, real_form_error) = match realize_real_form(&pair) {
                Ok(f) => (
                    Some(RealFormReport {
                        kind: f.kind,
                        params: f.params,
                        diag: f.diag,
                        max_imag: f.max_imag,
                        structure_residual: f.structure_residual,
                    }),
                    None,
                ),
                Err(e) => (None, Some(e.to_string())),
            };
            let pass = cert.holds;
            let out = CmReport {
                mode: spec.mode,
                holds: cert.holds,
                rank_gap: cert.rank_gap,
                real_form,
                real_form_error,
                pass,
            };
            emit(g, &report::json_string(&out).map_err(|e| e.to_string())?)?;
            Ok(pass)
        }
        Command::BetheCheck { local_dim, sites, z, q, twist } => {
            require_json(g)?;
            let space = TensorSpace::new(*local_dim, *sites, z.clone(), q.clone())
                .map_err(|e| e.to_string())?;
            let res = space.identity_residuals().map_err(|e| e.to_string())?;
            let (residue, commutation, symmetry) = (res.residue, res.commutation, res.symmetry);
            let g_op = match twist {
                Some(s) => space.signed_twist_g(*s).map_err(|e| e.to_string())?,
                None => space.identity_op(),
            };
            let cert = space.certify_form(&g_op).map_err(|e| e.to_string())?;
            let pass = residue <= g.tol
                && commutation <= g.tol
                && symmetry <= g.tol
                && cert.symmetry_defect <= g.tol;
            let out = BetheReport {
                local_dim: *local_dim,
                sites: *sites,
                dim: space.dim(),
                z: z.clone(),
                twist_block: *twist,
                residue_residual: residue,
                commutation_residual: commutation,
                symmetry_residual: symmetry,
                form: cert.kind,
                symmetry_defect: cert.symmetry_defect,
                min_eig: cert.min_eigenvalue,
                positive_definite: cert.positive_definite,
                pass,
            };
            emit(g, &report::json_string(&out).map_err(|e| e.to_string())?)?;
            Ok(pass)
        }
        Command::DualCheck { space, count } => {
            require_json(g)?;
            match space {
                Some(path) => {
                    let space: QuasiPolySpace = read_json(path)?;
                    let rep = duality_check(&space, DUAL_CONVENTION, DUAL_SHIFT)
                        .map_err(|e| e.to_string())?;
                    let pass = rep.wronskian_residual <= g.tol && rep.base_distance <= g.tol;
                    let out = DualSingleReport { report: rep, pass };
                    emit(g, &report::json_string(&out).map_err(|e| e.to_string())?)?;
                    Ok(pass)
                }
                None => {
                    let (conv, shift) =
                        calibrate_dual_convention().map_err(|e| e.to_string())?;
                    let calibrated = conv == DUAL_CONVENTION && shift == DUAL_SHIFT;
                    let mut worst_residual = 0.0f64;
                    let mut worst_base_distance = 0.0f64;
                    let mut failures: Vec<DualFailure> = Vec::new();
                    for k in 0..*count {
                        let seed = g.seed.wrapping_add(k);
                        let space = random_unramified_space(seed);
                        match duality_check(&space, DUAL_CONVENTION, DUAL_SHIFT) {
                            Ok(rep) => {
                                worst_residual = worst_residual.max(rep.wronskian_residual);
                                worst_base_distance =
                                    worst_base_distance.max(rep.base_distance);
                                if rep.wronskian_residual > g.tol || rep.base_distance > g.tol
                                {
                                    failures.push(DualFailure {
                                        seed,
                                        detail: format!(
                                            "residual {} base {}",
                                            report::fmt_f64(rep.wronskian_residual),
                                            report::fmt_f64(rep.base_distance)
                                        ),
                                    });
                                }
                            }
                            Err(e) => failures
                                .push(DualFailure { seed, detail: e.to_string() }),
                        }
                    }
                    let pass = calibrated && failures.is_empty();
                    let out = DualSweepReport {
                        convention: conv,
                        shift,
                        calibrated,
                        count: *count,
                        worst_residual,
                        worst_base_distance,
                        failures,
                        pass,
                    };
                    emit(g, &report::json_string(&out).map_err(|e| e.to_string())?)?;
                    Ok(pass)
                }
            }
        }
        Command::Selftest => {
            let mut lines = Vec::new();
            let mut failed = 0usize;
            for (name, check) in selftest_checks() {
                match check() {
                    Ok(()) => lines.push(format!("ok {name}")),
                    Err(msg) => {
                        failed += 1;
                        lines.push(format!("FAIL {name}: {msg}"));
                    }
                }
            }
            let total = lines.len();
            lines.push(format!("selftest: {} passed, {failed} failed", total - failed));
            let mut text = lines.join("\n");
            text.push('\n');
            emit(g, &text)?;
            Ok(failed == 0)
        }
    }
}

// ---- input specs ----

#[derive(serde::Deserialize)]
struct ProblemSpec {
    mode: Mode,
    targets: Vec<[f64; 2]>,
    groups: Vec<GroupSpec>,
}

#[derive(serde::Deserialize)]
struct ParamsSpec {
    params: Vec<f64>,
    diag: Vec<f64>,
}

#[derive(serde::Deserialize)]
struct PairSpec {
    mode: CmMode,
    z: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
}

// ---- reports ----

#[derive(Serialize)]
struct MatrixReport {
    kind: Kind,
    spectrum: SpectrumReport,
    rank_one: RankOneReport,
    reality: RealityVerdict,
    pass: bool,
}

#[derive(Serialize)]
struct RealFormReport {
    kind: Kind,
    params: Vec<f64>,
    diag: Vec<f64>,
    max_imag: f64,
    structure_residual: f64,
}

#[derive(Serialize)]
struct CmReport {
    mode: CmMode,
    holds: bool,
    rank_gap: f64,
    real_form: Option<RealFormReport>,
    real_form_error: Option<String>,
    pass: bool,
}

#[derive(Serialize)]
struct BetheReport {
    local_dim: usize,
    sites: usize,
    dim: usize,
    z: Vec<f64>,
    twist_block: Option<usize>,
    residue_residual: f64,
    commutation_residual: f64,
    symmetry_residual: f64,
    form: FormKind,
    symmetry_defect: f64,
    min_eig: f64,
    positive_definite: bool,
    pass: bool,
}

#[derive(Serialize)]
struct DualSingleReport {
    report: DualityReport,
    pass: bool,
}

#[derive(Serialize)]
struct DualFailure {
    seed: u64,
    detail: String,
}

#[derive(Serialize)]
struct DualSweepReport {
    convention: wronski::config::DualConvention,
    shift: i64,
    calibrated: bool,
    count: u64,
    worst_residual: f64,
    worst_base_distance: f64,
    failures: Vec<DualFailure>,
    pass: bool,
}

// ---- plumbing ----

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(g: &Globals, text: &str) -> Result<(), String> {
    match &g.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_json(g: &Globals) -> Result<(), String> {
    if g.format == Some(Format::Csv) {
        return Err("csv output applies to scan only".into());
    }
    Ok(())
}

fn scan_summary(table: &ScanTable) -> String {
    format!(
        "scan example={} points={} disagreements={} banded={} pass={}",
        table.example,
        table.rows.len(),
        table.disagreements,
        table.banded,
        table.disagreements == 0
    )
}

fn real_matrix(rows: &[Vec<f64>]) -> Result<nalgebra::DMatrix<C64>, String> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err("matrix must be square and nonempty".into());
    }
    Ok(nalgebra::DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0)))
}

// ---- selftest ----

type Check = Box<dyn Fn() -> Result<(), String>>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn selftest_checks() -> Vec<(&'static str, Check)> {
    vec![
        ("discrete wronskian closed form", Box::new(|| {
            let v = QuasiExpSpace::new(
                Mode::Multiplicative,
                vec![
                    Member { param: C64::new(1.0, 0.0), poly: Polynomial::one() },
                    Member { param: C64::new(3.0, 0.0), poly: Polynomial::one() },
                ],
            )
            .map_err(|e| e.to_string())?;
            let w = v.discrete_wronskian(1.0).map_err(|e| e.to_string())?;
            ensure(w.monic == Polynomial::one(), "monic part should be 1")?;
            ensure((w.kappa - C64::new(2.0, 0.0)).norm() < 1e-14, format!("kappa {}", w.kappa))
        })),
        ("vandermonde conjugation", Box::new(|| {
            let q = [1.0, 2.0, 4.0];
            wronski::matrices::vandermonde_m(&q).map_err(|e| e.to_string())?;
            let r = conjugation_check(&q, &[0.3, -1.1, 0.7]).map_err(|e| e.to_string())?;
            ensure(r <= 1e-10, format!("residual {r}"))
        })),
        ("structured spectrum pairing", Box::new(|| {
            let rep = spectrum_vs_wronskian(Kind::Multiplicative, &[2.0], &[3.0])
                .map_err(|e| e.to_string())?;
            ensure(rep.max_pair_distance <= 1e-12, format!("distance {}", rep.max_pair_distance))
        })),
        ("rank-one commutators", Box::new(|| {
            for (kind, params, diag) in [
                (Kind::Multiplicative, vec![1.0, 3.0], vec![0.5, -0.2]),
                (Kind::Exponent, vec![0.0, 1.5], vec![1.0, 2.0]),
                (Kind::QuasiPolynomial, vec![0.0, 2.5], vec![1.0, -0.5]),
            ] {
                let rep = commutator_rank_one(kind, &params, &diag)
                    .map_err(|e| e.to_string())?;
                ensure(
                    rep.max_deviation <= 1e-12,
                    format!("{kind:?}: deviation {}", rep.max_deviation),
                )?;
            }
            Ok(())
        })),
        ("reality condition tangency points", Box::new(|| {
            let c1 = example_reality_condition(1, 1.0, -1.0).map_err(|e| e.to_string())?;
            ensure(c1 == 0.0, format!("example 1 boundary value {c1}"))?;
            for (a, b) in [
                (1.0, 0.5),
                (0.5, 1.0),
                (-1.0, -0.5),
                (-0.5, -1.0),
                (0.5, -0.5),
                (-0.5, 0.5),
            ] {
                let c2 = example_reality_condition(2, a, b).map_err(|e| e.to_string())?;
                ensure(c2 == 0.0, format!("example 2 at ({a},{b}) gives {c2}"))?;
            }
            Ok(())
        })),
        ("matrix pair realization", Box::new(|| {
            let params = [1.0, 3.0];
            let diag = [0.5, -0.2];
            let z = linalg::complexify(
                &wronski::matrices::build(Kind::Multiplicative, &params, &diag)
                    .map_err(|e| e.to_string())?,
            );
            let q = nalgebra::DMatrix::from_fn(2, 2, |i, j| {
                if i == j {
                    C64::new(params[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let pair = CmPair { z, q, mode: CmMode::Multiplicative };
            let cert = cm_rank_one(&pair).map_err(|e| e.to_string())?;
            ensure(cert.holds, format!("rank gap {}", cert.rank_gap))?;
            let form = realize_real_form(&pair).map_err(|e| e.to_string())?;
            ensure(
                form.structure_residual <= 1e-8 && form.max_imag <= 1e-8,
                format!("residual {} imag {}", form.structure_residual, form.max_imag),
            )
        })),
        ("spin-chain gap-2 certificate", Box::new(|| {
            let space = TensorSpace::new(2, 2, vec![3.0, 1.0], vec![1.0, 1.0])
                .map_err(|e| e.to_string())?;
            let cert =
                space.certify_form(&space.identity_op()).map_err(|e| e.to_string())?;
            ensure(
                (cert.min_eigenvalue - 1.0).abs() <= 1e-10,
                format!("min eigenvalue {}", cert.min_eigenvalue),
            )
        })),
        ("spin-chain residue identity", Box::new(|| {
            let space = TensorSpace::new(2, 2, vec![3.0, 1.0], vec![1.0, 1.0])
                .map_err(|e| e.to_string())?;
            let res = space.identity_residuals().map_err(|e| e.to_string())?;
            ensure(
                res.residue <= 1e-10 && res.commutation <= 1e-10 && res.symmetry <= 1e-10,
                format!("residuals {} {} {}", res.residue, res.commutation, res.symmetry),
            )
        })),
        ("duality calibration", Box::new(|| {
            let (conv, shift) = calibrate_dual_convention().map_err(|e| e.to_string())?;
            ensure(
                conv == DUAL_CONVENTION && shift == DUAL_SHIFT,
                format!("calibrated to {conv:?} shift {shift}"),
            )
        })),
        ("duality random space", Box::new(|| {
            let space = random_unramified_space(7);
            let rep = duality_check(&space, DUAL_CONVENTION, DUAL_SHIFT)
                .map_err(|e| e.to_string())?;
            ensure(
                rep.wronskian_residual <= 1e-6 && rep.base_distance <= 1e-6,
                format!("residual {} base {}", rep.wronskian_residual, rep.base_distance),
            )
        })),
        ("inverse radical pair", Box::new(|| {
            let problem = InverseProblem::new(
                Mode::Multiplicative,
                vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0)],
                vec![
                    GroupSpec { param: 1.0, degrees: vec![1] },
                    GroupSpec { param: 2.0, degrees: vec![1] },
                ],
            )
            .map_err(|e| e.to_string())?;
            let set = problem.solve_inverse(&RunConfig { seed: 7, starts: 64, ..RunConfig::default() });
            ensure(set.solutions.len() == 2, format!("{} solutions", set.solutions.len()))?;
            ensure(set.real_count() == 2, "expected both solutions real")?;
            let s3 = 3.0f64.sqrt();
            let mut firsts: Vec<f64> =
                set.solutions.iter().map(|s| s.coefficients[0].re).collect();
            firsts.sort_by(f64::total_cmp);
            ensure(
                (firsts[0] + s3).abs() <= 1e-8 && (firsts[1] - s3).abs() <= 1e-8,
                format!("roots {firsts:?}"),
            )
        })),
        ("step-limit ratio", Box::new(|| {
            let f = |q: C64| q * q * q;
            let q0 = C64::new(1.3, 0.0);
            let exact = C64::new(6.0 * 1.3, 0.0);
            let e1 = (discrete_derivative(&f, q0, 1e-3, 2) - exact).norm();
            let e2 = (discrete_derivative(&f, q0, 5e-4, 2) - exact).norm();
            let ratio = e1 / e2;
            ensure((1.5..=2.5).contains(&ratio), format!("ratio {ratio}"))
        })),
        ("confluent extrapolation", Box::new(|| {
            let fam = ConfluentFamily::new(
                3,
                vec![
                    Polynomial::from_real(&[0.5, 1.0]),
                    Polynomial::from_real(&[1.0, -0.5]),
                ],
                vec![C64::new(1.2, 0.0)],
                vec![2],
            )
            .map_err(|e| e.to_string())?;
            let limit = fam.confluent_limit().map_err(|e| e.to_string())?;
            let wz = limit.space.discrete_wronskian(1.0).map_err(|e| e.to_string())?;
            let direct = wz.scaled().scale(limit.scalar);
            let h0 = 4e-3;
            let level = |h: f64| fam.confluent_wronskian(&fam.staircase(h));
            let w1 = level(h0).map_err(|e| e.to_string())?;
            let w2 = level(h0 / 2.0).map_err(|e| e.to_string())?;
            let w3 = level(h0 / 4.0).map_err(|e| e.to_string())?;
            let t1 = &w2.scale(C64::new(2.0, 0.0)) - &w1;
            let t2 = &w3.scale(C64::new(2.0, 0.0)) - &w2;
            let extrap = (&t2.scale(C64::new(4.0, 0.0)) - &t1).scale(C64::new(1.0 / 3.0, 0.0));
            let scale = direct.max_coeff_norm().max(1.0);
            let resid = (&extrap - &direct).max_coeff_norm() / scale;
            ensure(resid <= 1e-4, format!("residual {resid}"))
        })),
    ]
}
