mod config;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use mittag::calculus::{ml_derivative, ml_derivative_n};
use mittag::combinatorics::factorial;
use mittag::error::MlError;
use mittag::gamma::{digamma, gamma_real, log_gamma_real, polygamma, recip_gamma};
use mittag::iab::{iab_eval, iab_quadrature, iab_rep, iab_series, IabParams};
use mittag::identities::{identity_ids, run_all, run_identity};
use mittag::ml::{ml_eval, EvalResult, MLParams, DEFAULT_TOL};
use mittag::prob::{ml_cdf, ml_pdf, ml_quantile, ml_sample, MLDistribution};
use mittag::quadrature::QuadratureConfig;

use config::{ConfigError, Settings};
use output::{emit, Format, Record};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lib(#[from] MlError),
    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} identities failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    /// 0 ok, 1 usage, 2 domain, 3 no convergence or accuracy not reached.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Lib(e) => match e {
                MlError::UnknownIdentity(_) => 1,
                MlError::Domain(_)
                | MlError::PreconditionViolation(_)
                | MlError::RayProximity
                | MlError::Pole(_)
                | MlError::Overflow(_) => 2,
                MlError::NonConvergence(_)
                | MlError::CancellationLoss { .. }
                | MlError::SeriesDivergence(_)
                | MlError::NearZeroDenominator { .. } => 3,
            },
            CliError::ChecksFailed { .. } => 3,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "mittag", version, about = "Mittag-Leffler functions, the I_{a,b} integral and the Mittag-Leffler distribution")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// key = value file overriding default tolerances
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// E_{a,b}(z) at one point
    Eval(EvalArgs),
    /// E_{a,b} along a grid on the real axis
    Table(TableArgs),
    /// Mittag-Leffler distribution queries
    Dist {
        #[command(subcommand)]
        query: DistQuery,
    },
    /// Run the identity catalog
    Check(CheckArgs),
    /// Gamma-family functions of a real argument
    Gamma(GammaArgs),
    /// The integral I_{a,b}(z)
    Iab(IabArgs),
    /// Derivatives of E_{a,b} in z
    Deriv(DerivArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    /// re[,im]
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    z: Complex64,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    z_from: f64,
    #[arg(long, allow_hyphen_values = true)]
    z_to: f64,
    #[arg(long, default_value_t = 11)]
    points: usize,
    /// geometric rather than uniform spacing (ends must share a sign)
    #[arg(long)]
    x_log: bool,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum DistQuery {
    Pdf {
        #[arg(long)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    Cdf {
        #[arg(long)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    Quantile {
        #[arg(long)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
    Sample {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// comma-separated identity ids
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    /// id=tolerance, repeatable
    #[arg(long = "tol", value_parser = parse_override)]
    tols: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GammaFn {
    Gamma,
    LnGamma,
    RecipGamma,
    Digamma,
    Polygamma,
}

#[derive(Debug, Args)]
struct GammaArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long = "fn", value_enum, default_value_t = GammaFn::Gamma)]
    func: GammaFn,
    /// order of the polygamma function
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IabMethod {
    Auto,
    Quadrature,
    Series,
    Rep,
}

#[derive(Debug, Args)]
struct IabArgs {
    #[arg(long)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    z: Complex64,
    #[arg(long, value_enum, default_value_t = IabMethod::Auto)]
    method: IabMethod,
    /// series terms for --method series
    #[arg(long, default_value_t = 60)]
    terms: usize,
}

#[derive(Debug, Args)]
struct DerivArgs {
    #[arg(long)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    z: Complex64,
    #[arg(long, default_value_t = 1)]
    order: usize,
    #[arg(long)]
    tol: Option<f64>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut parts = s.split(',');
    let re = parts.next().unwrap_or("").trim();
    let im = parts.next().map(str::trim);
    if parts.next().is_some() {
        return Err(format!("expected re[,im], got '{s}'"));
    }
    let re: f64 = re.parse().map_err(|_| format!("bad real part in '{s}'"))?;
    let im: f64 = match im {
        Some(v) => v.parse().map_err(|_| format!("bad imaginary part in '{s}'"))?,
        None => 0.0,
    };
    Ok(Complex64::new(re, im))
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (id, v) = s.split_once('=').ok_or_else(|| format!("expected id=tolerance, got '{s}'"))?;
    let v: f64 = v.parse().map_err(|_| format!("bad tolerance in '{s}'"))?;
    Ok((id.to_string(), v))
}

struct Context {
    settings: Settings,
}

impl Context {
    fn tol(&self, flag: Option<f64>) -> f64 {
        flag.or(self.settings.tol).unwrap_or(DEFAULT_TOL)
    }

    fn quad(&self) -> CliResult<QuadratureConfig> {
        let d = QuadratureConfig::default();
        Ok(QuadratureConfig::new(
            self.settings.quad_rel_tol.unwrap_or(d.rel_tol),
            d.abs_tol,
            self.settings.quad_max_subdivisions.unwrap_or(d.max_subdivisions),
        )?)
    }
}

fn eval_record(a: f64, b: f64, z: Complex64, r: &EvalResult) -> Record {
    Record::new()
        .num("a", a)
        .num("b", b)
        .num("z_re", z.re)
        .num("z_im", z.im)
        .num("value_re", r.value.re)
        .num("value_im", r.value.im)
        .num("abs_err_est", r.abs_err_est)
        .text("method", r.method.as_str())
}

fn cmd_eval(ctx: &Context, args: &EvalArgs) -> CliResult<Vec<Record>> {
    let r = ml_eval(MLParams::new(args.a, args.b)?, args.z, ctx.tol(args.tol))?;
    Ok(vec![eval_record(args.a, args.b, args.z, &r)])
}

fn grid(from: f64, to: f64, n: usize, log: bool) -> CliResult<Vec<f64>> {
    if n == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if n == 1 {
        return Ok(vec![from]);
    }
    if log && !(from * to > 0.0) {
        return Err(CliError::Usage("--x-log needs nonzero ends of the same sign".into()));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let s = i as f64 / last;
            if i == n - 1 {
                to
            } else if log {
                from.signum() * (from.abs().ln() * (1.0 - s) + to.abs().ln() * s).exp()
            } else {
                from + (to - from) * s
            }
        })
        .collect())
}

fn cmd_table(ctx: &Context, args: &TableArgs) -> CliResult<Vec<Record>> {
    let p = MLParams::new(args.a, args.b)?;
    let tol = ctx.tol(args.tol);
    grid(args.z_from, args.z_to, args.points, args.x_log)?
        .into_iter()
        .map(|x| {
            let z = Complex64::new(x, 0.0);
            Ok(eval_record(args.a, args.b, z, &ml_eval(p, z, tol)?))
        })
        .collect()
}

fn dist_record(a: f64, key: &'static str, x: f64, value: f64, method: &str) -> Record {
    Record::new()
        .num("a", a)
        .num(key, x)
        .num("value_re", value)
        .num("value_im", 0.0)
        .missing("abs_err_est")
        .text("method", method)
}

fn cmd_dist(query: &DistQuery) -> CliResult<Vec<Record>> {
    Ok(match *query {
        DistQuery::Pdf { a, t } => vec![dist_record(a, "t", t, ml_pdf(MLDistribution::new(a)?, t)?, "pdf")],
        DistQuery::Cdf { a, t } => vec![dist_record(a, "t", t, ml_cdf(MLDistribution::new(a)?, t)?, "cdf")],
        DistQuery::Quantile { a, p } => {
            vec![dist_record(a, "p", p, ml_quantile(MLDistribution::new(a)?, p)?, "quantile")]
        }
        DistQuery::Sample { a, n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            ml_sample(MLDistribution::new(a)?, &mut rng, n)?
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    Record::new()
                        .num("a", a)
                        .int("seed", seed)
                        .int("index", i as u64)
                        .num("value_re", v)
                        .num("value_im", 0.0)
                        .missing("abs_err_est")
                        .text("method", "inverse_cdf")
                })
                .collect()
        }
    })
}

fn cmd_check(ctx: &Context, args: &CheckArgs) -> CliResult<(Vec<Record>, bool)> {
    let cfg = ctx.quad()?;
    let mut overrides: BTreeMap<String, f64> = ctx.settings.check_tols.clone();
    for (id, tol) in &args.tols {
        overrides.insert(id.clone(), *tol);
    }
    let known = identity_ids();
    for id in overrides.keys().chain(args.only.iter()) {
        if !known.contains(&id.as_str()) {
            return Err(MlError::UnknownIdentity(id.clone()).into());
        }
    }
    let reports = if args.only.is_empty() {
        run_all(&overrides, &cfg)
    } else {
        args.only
            .iter()
            .map(|id| {
                let tol = match overrides.get(id) {
                    Some(t) => *t,
                    None => mittag::identities::default_tolerance(id)?,
                };
                run_identity(id, tol, &cfg)
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let all_pass = reports.iter().all(|r| r.pass);
    let records = reports
        .iter()
        .map(|r| {
            Record::new()
                .text("id", r.id.clone())
                .int("grid_size", r.grid_size as u64)
                .num("max_rel_err", r.max_rel_err)
                .num("tolerance", r.tolerance)
                .flag("pass", r.pass)
        })
        .collect();
    for r in reports.iter().filter(|r| r.failure.is_some()) {
        eprintln!("{}: {}", r.id, r.failure.as_deref().unwrap_or_default());
    }
    Ok((records, all_pass))
}

fn cmd_gamma(args: &GammaArgs) -> CliResult<Vec<Record>> {
    let x = args.x;
    let (value, name) = match args.func {
        GammaFn::Gamma => {
            let g = gamma_real(x);
            if g.is_pole {
                return Err(MlError::Pole(format!("Gamma at {x}")).into());
            }
            (g.value, "gamma")
        }
        GammaFn::LnGamma => (log_gamma_real(x)?, "ln_gamma"),
        GammaFn::RecipGamma => (recip_gamma(x), "recip_gamma"),
        GammaFn::Digamma => (digamma(x)?, "digamma"),
        GammaFn::Polygamma => (polygamma(args.n, x)?, "polygamma"),
    };
    Ok(vec![Record::new()
        .num("x", x)
        .num("value_re", value)
        .num("value_im", 0.0)
        .missing("abs_err_est")
        .text("method", name)])
}

fn cmd_iab(ctx: &Context, args: &IabArgs) -> CliResult<Vec<Record>> {
    let p = IabParams::new(args.a, args.b)?;
    let cfg = ctx.quad()?;
    let r = match args.method {
        IabMethod::Auto => iab_eval(p, args.z, cfg)?,
        IabMethod::Quadrature => iab_quadrature(p, args.z, cfg)?,
        IabMethod::Series => iab_series(p, args.z, args.terms)?,
        IabMethod::Rep => iab_rep(p, args.z, cfg)?,
    };
    Ok(vec![eval_record(args.a, args.b, args.z, &r)])
}

fn cmd_deriv(ctx: &Context, args: &DerivArgs) -> CliResult<Vec<Record>> {
    let p = MLParams::new(args.a, args.b)?;
    let tol = ctx.tol(args.tol);
    let (z, j) = (args.z, args.order);
    let value = if j == 0 {
        ml_eval(p, z, tol)?.value
    } else if z.norm() == 0.0 {
        // the j-th Taylor coefficient times j!
        Complex64::new(factorial(j) * recip_gamma(args.b + args.a * j as f64), 0.0)
    } else if j == 1 {
        ml_derivative(p, z, tol)?
    } else {
        ml_derivative_n(p, z, j, tol)?
    };
    Ok(vec![Record::new()
        .num("a", args.a)
        .num("b", args.b)
        .num("z_re", z.re)
        .num("z_im", z.im)
        .int("order", j as u64)
        .num("value_re", value.re)
        .num("value_im", value.im)
        .missing("abs_err_est")
        .text("method", "derivative")])
}

fn run(cli: Cli) -> CliResult<()> {
    let settings = match &cli.config {
        Some(path) => config::load(path)?,
        None => Settings::default(),
    };
    let ctx = Context { settings };
    let records = match &cli.command {
        Command::Eval(a) => cmd_eval(&ctx, a)?,
        Command::Table(a) => cmd_table(&ctx, a)?,
        Command::Dist { query } => cmd_dist(query)?,
        Command::Gamma(a) => cmd_gamma(a)?,
        Command::Iab(a) => cmd_iab(&ctx, a)?,
        Command::Deriv(a) => cmd_deriv(&ctx, a)?,
        Command::Check(a) => {
            let (records, all_pass) = cmd_check(&ctx, a)?;
            emit(&records, cli.format)?;
            if !all_pass {
                let failed = records.len() - records.iter().filter(|r| r.passed()).count();
                return Err(CliError::ChecksFailed { failed, total: records.len() });
            }
            return Ok(());
        }
    };
    emit(&records, cli.format)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
