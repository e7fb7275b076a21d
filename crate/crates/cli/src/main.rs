//! `ecc-gof`: Euler-characteristic-curve goodness-of-fit tests from the shell.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ecc_gof::distributions::{DistributionSpec, TransformSpec};
use ecc_gof::ecc::{euler_curve, rescale_cloud};
use ecc_gof::experiments::{
    self, cells_to_csv, null_distribution_csv, Method, ModelCache, RunManifest, StudyConfig,
};
use ecc_gof::geometry::{ComplexKind, PointCloud};
use ecc_gof::gof::{
    classical, one_sample_test, prepare_reference_with, two_sample_test_with, KsMultivariateModel, Pipeline,
    PrepareConfig, ReferenceModel, TwoSampleConfig,
};
use ecc_gof::Error;

use output::{emit, read_to_string, CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "ecc-gof", version, about = "Goodness-of-fit tests built on Euler characteristic curves")]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true, env = "ECC_GOF_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Euler characteristic curve of a point cloud.
    Ecc(EccArgs),
    /// Build a one-sample reference model.
    Prepare(PrepareArgs),
    /// One-sample test of a sample against a reference model or a null.
    Test1(Test1Args),
    /// Two-sample test.
    Test2(Test2Args),
    /// Monte-Carlo power of one method for one (null, alternative) pair.
    Power(PowerArgs),
    /// All-to-all power matrix.
    Matrix(MatrixArgs),
    /// Power as a function of sample size.
    #[command(name = "power-vs-n")]
    PowerVsN(PowerVsNArgs),
    /// Calibration statistics at several sample sizes.
    Nulldist(NulldistArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Complex {
    Alpha,
    Rips,
    Cech,
}

#[derive(Args, Debug, Clone)]
struct PipelineArgs {
    /// Filtration; defaults to alpha for d <= 3 and Vietoris-Rips beyond.
    #[arg(long, value_enum)]
    complex: Option<Complex>,
    /// Highest simplex dimension for Vietoris-Rips (default d + 1).
    #[arg(long)]
    maxdim: Option<usize>,
    /// identity | arctan | arctan:G1,G2,.. | copula
    #[arg(long, default_value = "identity")]
    transform: String,
}

impl PipelineArgs {
    fn is_default(&self) -> bool {
        self.complex.is_none() && self.maxdim.is_none() && self.transform.trim() == "identity"
    }

    fn complex(&self, dim: usize) -> ComplexKind {
        match self.complex {
            None => match self.maxdim {
                Some(k) => ComplexKind::Rips { maxdim: k },
                None => ComplexKind::default_for(dim),
            },
            Some(Complex::Alpha) => ComplexKind::Alpha,
            Some(Complex::Cech) => ComplexKind::Cech,
            Some(Complex::Rips) => ComplexKind::Rips { maxdim: self.maxdim.unwrap_or(dim + 1) },
        }
    }

    fn transform(&self, dim: usize, null: Option<&DistributionSpec>) -> CliResult<TransformSpec> {
        let t = self.transform.trim();
        let spec = match t {
            "identity" => TransformSpec::Identity,
            "arctan" => TransformSpec::ArctanRescale { gamma: vec![ecc_gof::distributions::gamma_for_sd(1.0); dim] },
            "copula" => {
                let null = null.ok_or_else(|| CliError::Usage("--transform copula needs --null".into()))?;
                TransformSpec::CopulaPit { marginals: null.marginals()? }
            }
            _ => match t.strip_prefix("arctan:") {
                Some(list) => TransformSpec::ArctanRescale { gamma: parse_list(list, "--transform")? },
                None => return Err(CliError::Usage(format!("unknown transform {t:?}"))),
            },
        };
        spec.validate(dim)?;
        Ok(spec)
    }

    fn pipeline(&self, dim: usize, null: Option<&DistributionSpec>) -> CliResult<Pipeline> {
        Ok(Pipeline { complex: self.complex(dim), transform: self.transform(dim, null)? })
    }
}

#[derive(Args, Debug)]
struct EccArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Null distribution (only needed for the copula transform).
    #[arg(long)]
    null: Option<String>,
    /// Scale coordinates by n^(1/d) first, as the tests do.
    #[arg(long)]
    rescale: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PrepareArgs {
    #[arg(long)]
    null: String,
    #[arg(long)]
    n: usize,
    /// Samples averaged into the mean curve.
    #[arg(long = "M", default_value_t = 1000)]
    mean_samples: usize,
    /// Samples calibrating the threshold.
    #[arg(long = "m", default_value_t = 1000)]
    calibration_samples: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Run manifest path (default: <output>.manifest.json).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Test1Args {
    #[arg(long)]
    input: PathBuf,
    /// Reference model from `prepare` (topotest).
    #[arg(long)]
    model: Option<PathBuf>,
    /// topotest | ks | cvm | ks_multivariate
    #[arg(long, default_value = "topotest")]
    method: String,
    /// Null distribution for ks, cvm and ks_multivariate.
    #[arg(long)]
    null: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Needed by ks_multivariate only.
    #[arg(long)]
    seed: Option<u64>,
    /// Calibration samples for ks_multivariate.
    #[arg(long = "m", default_value_t = 1000)]
    calibration_samples: usize,
    /// Exit with status 2 when H0 is rejected.
    #[arg(long)]
    exit_status: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Test2Args {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    /// topotest2 | ks2
    #[arg(long, default_value = "topotest2")]
    method: String,
    /// Permutations.
    #[arg(long = "K", default_value_t = 1000)]
    permutations: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Use the (c + 1) / (K + 1) p-value.
    #[arg(long)]
    conservative: bool,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Null distribution (only needed for the copula transform).
    #[arg(long)]
    null: Option<String>,
    #[arg(long)]
    exit_status: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct StudyArgs {
    /// Monte-Carlo trials per cell.
    #[arg(long = "K", default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "M", default_value_t = 1000)]
    mean_samples: usize,
    #[arg(long = "m", default_value_t = 1000)]
    calibration_samples: usize,
    /// Permutations per two-sample TopoTest.
    #[arg(long, default_value_t = 500)]
    permutations: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PowerArgs {
    #[arg(long)]
    null: String,
    #[arg(long)]
    alt: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "topotest")]
    method: String,
    #[command(flatten)]
    study: StudyArgs,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// Distribution, repeatable.
    #[arg(long = "spec", required = true)]
    specs: Vec<String>,
    #[arg(long)]
    n: usize,
    /// Comma-separated methods.
    #[arg(long, default_value = "topotest,ks")]
    methods: String,
    /// Directory receiving one heatmap CSV per method (plus topotest-ks).
    #[arg(long)]
    heatmap_dir: Option<PathBuf>,
    #[command(flatten)]
    study: StudyArgs,
}

#[derive(Args, Debug)]
struct PowerVsNArgs {
    #[arg(long)]
    null: String,
    #[arg(long)]
    alt: String,
    /// Comma-separated ascending sample sizes.
    #[arg(long)]
    n_list: String,
    #[arg(long, default_value = "topotest")]
    methods: String,
    #[command(flatten)]
    study: StudyArgs,
}

#[derive(Args, Debug)]
struct NulldistArgs {
    #[arg(long)]
    null: String,
    #[arg(long)]
    n_list: String,
    #[arg(long = "m", default_value_t = 1000)]
    calibration_samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Usage(format!("bad value {t:?} in {flag}"))))
        .collect()
}

fn spec(s: &str) -> CliResult<DistributionSpec> {
    Ok(s.parse()?)
}

fn methods(s: &str) -> CliResult<Vec<Method>> {
    s.split(',').map(|m| Ok(m.parse()?)).collect()
}

fn require_seed(seed: Option<u64>) -> CliResult<u64> {
    seed.ok_or_else(|| CliError::Usage("this command is stochastic; pass --seed".into()))
}

fn read_cloud(path: &Path) -> CliResult<PointCloud> {
    Ok(PointCloud::read_csv(read_to_string(path)?.as_bytes())?)
}

fn write_manifest(
    explicit: Option<&Path>,
    output: Option<&Path>,
    command: &str,
    seed: u64,
    params: serde_json::Value,
) -> CliResult<()> {
    let path = match (explicit, output) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(o)) => {
            let mut s = o.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        }
        (None, None) => return Ok(()),
    };
    let mut m = RunManifest::new(command, seed, params);
    m.outputs = output.map(|o| vec![o.display().to_string()]).unwrap_or_default();
    emit(Some(&path), &serde_json::to_string_pretty(&m)?)
}

impl StudyArgs {
    fn config(&self, dim: usize, null: Option<&DistributionSpec>) -> CliResult<StudyConfig> {
        Ok(StudyConfig {
            mean_samples: self.mean_samples,
            calibration_samples: self.calibration_samples,
            permutations: self.permutations,
            pipeline: if self.pipeline.is_default() { None } else { Some(self.pipeline.pipeline(dim, null)?) },
        })
    }

    fn params(&self, cfg: &StudyConfig) -> serde_json::Value {
        json!({ "K": self.trials, "alpha": self.alpha, "study": cfg })
    }

    fn emit_cells(&self, cells: &[experiments::PowerCell]) -> CliResult<()> {
        let body = match self.format {
            Format::Csv => cells_to_csv(cells)?,
            Format::Json => serde_json::to_string_pretty(cells)?,
        };
        emit(self.output.as_deref(), &body)
    }
}

/// Returns whether H0 was rejected, for test commands.
fn run(cmd: Command) -> CliResult<Option<bool>> {
    match cmd {
        Command::Ecc(a) => {
            let cloud = read_cloud(&a.input)?;
            let null = a.null.as_deref().map(spec).transpose()?;
            let pipe = a.pipeline.pipeline(cloud.dim(), null.as_ref())?;
            let mut cloud = ecc_gof::distributions::apply_transform(&pipe.transform, &cloud)?;
            if a.rescale {
                cloud = rescale_cloud(&cloud);
            }
            let curve = euler_curve(&pipe.complex.build(&cloud)?);
            let body = match a.format {
                Format::Csv => curve.to_csv(),
                Format::Json => serde_json::to_string_pretty(&curve)?,
            };
            emit(a.output.as_deref(), &body)?;
            Ok(None)
        }
        Command::Prepare(a) => {
            let seed = require_seed(a.seed)?;
            let null = spec(&a.null)?;
            let mut cfg = PrepareConfig::new(null.clone(), a.n, a.mean_samples, a.calibration_samples, a.alpha, seed);
            cfg.pipeline = a.pipeline.pipeline(null.dim(), Some(&null))?;
            let model = prepare_reference_with(&cfg)?;
            emit(a.output.as_deref(), &model.to_json()?)?;
            let params = json!({
                "null": (null.to_string()), "n": a.n, "M": a.mean_samples, "m": a.calibration_samples,
                "alpha": a.alpha, "pipeline": cfg.pipeline,
            });
            write_manifest(a.manifest.as_deref(), a.output.as_deref(), "prepare", seed, params)?;
            Ok(None)
        }
        Command::Test1(a) => {
            let x = read_cloud(&a.input)?;
            let method: Method = a.method.parse()?;
            let null = || -> CliResult<DistributionSpec> {
                spec(a.null.as_deref().ok_or_else(|| CliError::Usage(format!("--method {method} needs --null")))?)
            };
            let report = match method {
                Method::TopoTest => {
                    let path = a.model.as_deref().ok_or_else(|| CliError::Usage("topotest needs --model".into()))?;
                    let model = ReferenceModel::from_json(&read_to_string(path)?)?;
                    one_sample_test(&x, &model, a.alpha)?
                }
                Method::Ks | Method::Cvm => {
                    let null = null()?;
                    let cdf = |t: f64| null.cdf(t).unwrap_or(f64::NAN);
                    if null.dim() != 1 {
                        return Err(Error::NotUnivariate.into());
                    }
                    if method == Method::Ks {
                        classical::ks_one_sample_1d(&x, &cdf, a.alpha)?
                    } else {
                        classical::cvm_one_sample_1d(&x, &cdf, a.alpha)?
                    }
                }
                Method::KsMultivariate => {
                    let seed = require_seed(a.seed)?;
                    KsMultivariateModel::prepare(&null()?, x.len(), a.calibration_samples, a.alpha, seed)?
                        .test(&x, a.alpha)?
                }
                _ => return Err(CliError::Usage(format!("{method} is a two-sample method; use test2"))),
            };
            emit(a.output.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            Ok(Some(report.reject))
        }
        Command::Test2(a) => {
            let x = read_cloud(&a.x)?;
            let y = read_cloud(&a.y)?;
            let report = match a.method.parse()? {
                Method::TopoTest2 => {
                    let seed = require_seed(a.seed)?;
                    let null = a.null.as_deref().map(spec).transpose()?;
                    let cfg = TwoSampleConfig {
                        permutations: a.permutations,
                        alpha: a.alpha,
                        seed,
                        conservative: a.conservative,
                        pipeline: Some(a.pipeline.pipeline(x.dim(), null.as_ref())?),
                    };
                    let report = two_sample_test_with(&x, &y, &cfg)?;
                    let params = json!({
                        "x": a.x.display().to_string(), "y": a.y.display().to_string(), "K": a.permutations,
                        "alpha": a.alpha, "conservative": a.conservative, "pipeline": cfg.pipeline,
                    });
                    write_manifest(a.manifest.as_deref(), a.output.as_deref(), "test2", seed, params)?;
                    report
                }
                Method::Ks2 => classical::ks_two_sample_1d(&x, &y, a.alpha)?,
                m => return Err(CliError::Usage(format!("{m} is a one-sample method; use test1"))),
            };
            emit(a.output.as_deref(), &serde_json::to_string_pretty(&report)?)?;
            Ok(Some(report.reject))
        }
        Command::Power(a) => {
            let s = &a.study;
            let seed = require_seed(s.seed)?;
            let (null, alt) = (spec(&a.null)?, spec(&a.alt)?);
            let method: Method = a.method.parse()?;
            let cfg = s.config(null.dim(), Some(&null))?;
            let cell =
                experiments::estimate_power_with(&null, &alt, a.n, s.trials, s.alpha, method, seed, &cfg, &ModelCache::new())?;
            s.emit_cells(std::slice::from_ref(&cell))?;
            let mut params = s.params(&cfg);
            params["null"] = json!(null.to_string());
            params["alt"] = json!(alt.to_string());
            params["n"] = json!(a.n);
            params["method"] = json!(method);
            write_manifest(s.manifest.as_deref(), s.output.as_deref(), "power", seed, params)?;
            Ok(None)
        }
        Command::Matrix(a) => {
            let s = &a.study;
            let seed = require_seed(s.seed)?;
            let specs = a.specs.iter().map(|t| spec(t)).collect::<CliResult<Vec<_>>>()?;
            let methods = methods(&a.methods)?;
            let cfg = s.config(specs[0].dim(), None)?;
            let m = experiments::power_matrix(&specs, a.n, s.trials, s.alpha, &methods, seed, &cfg, &ModelCache::new())?;
            let body = match s.format {
                Format::Csv => m.to_long_csv()?,
                Format::Json => serde_json::to_string_pretty(&m)?,
            };
            emit(s.output.as_deref(), &body)?;
            if let Some(dir) = &a.heatmap_dir {
                std::fs::create_dir_all(dir)?;
                for &method in &methods {
                    emit(Some(&dir.join(format!("{method}.csv"))), &m.to_matrix_csv(method, None)?)?;
                }
                if methods.contains(&Method::TopoTest) && methods.contains(&Method::Ks) {
                    let diff = m.to_matrix_csv(Method::TopoTest, Some(Method::Ks))?;
                    emit(Some(&dir.join("topotest-ks.csv")), &diff)?;
                }
            }
            let mut params = s.params(&cfg);
            params["specs"] = json!(specs.iter().map(|t| t.to_string()).collect::<Vec<_>>());
            params["n"] = json!(a.n);
            params["methods"] = json!(methods);
            write_manifest(s.manifest.as_deref(), s.output.as_deref(), "matrix", seed, params)?;
            Ok(None)
        }
        Command::PowerVsN(a) => {
            let s = &a.study;
            let seed = require_seed(s.seed)?;
            let (null, alt) = (spec(&a.null)?, spec(&a.alt)?);
            let n_list: Vec<usize> = parse_list(&a.n_list, "--n-list")?;
            let methods = methods(&a.methods)?;
            let cfg = s.config(null.dim(), Some(&null))?;
            let cells = experiments::power_vs_n(&null, &alt, &n_list, s.trials, s.alpha, &methods, seed, &cfg)?;
            s.emit_cells(&cells)?;
            let mut params = s.params(&cfg);
            params["null"] = json!(null.to_string());
            params["alt"] = json!(alt.to_string());
            params["n_list"] = json!(n_list);
            params["methods"] = json!(methods);
            write_manifest(s.manifest.as_deref(), s.output.as_deref(), "power-vs-n", seed, params)?;
            Ok(None)
        }
        Command::Nulldist(a) => {
            let seed = require_seed(a.seed)?;
            let null = spec(&a.null)?;
            let n_list: Vec<usize> = parse_list(&a.n_list, "--n-list")?;
            let pipe = if a.pipeline.is_default() { None } else { Some(a.pipeline.pipeline(null.dim(), Some(&null))?) };
            let dists = experiments::null_statistic_distribution(&null, &n_list, a.calibration_samples, seed, pipe.as_ref())?;
            let body = match a.format {
                Format::Csv => null_distribution_csv(&dists)?,
                Format::Json => serde_json::to_string_pretty(&dists)?,
            };
            emit(a.output.as_deref(), &body)?;
            let params = json!({
                "null": (null.to_string()), "n_list": n_list, "m": a.calibration_samples, "pipeline": pipe,
            });
            write_manifest(a.manifest.as_deref(), a.output.as_deref(), "nulldist", seed, params)?;
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", CliError::Usage(first.to_string()));
            return ExitCode::from(1);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("{}", CliError::Usage("--threads must be positive".into()));
            return ExitCode::from(1);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let exit_status = match &cli.command {
        Command::Test1(a) => a.exit_status,
        Command::Test2(a) => a.exit_status,
        _ => false,
    };
    match run(cli.command) {
        Ok(Some(true)) if exit_status => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
