//! Command-line front end: sequence construction, Diophantine counts,
//! exact moment/cumulant tables, Taylor series of the cumulant generating
//! and rate functions, transfer-operator spectra, and grid simulations.
//!
//! Everything is deterministic given the flags and seed; output starts
//! with a version header line, then CSV (with header row) or JSON.
//! Exit codes: 0 success, 2 invalid arguments, 3 resource limits,
//! 4 internal-consistency failures, 1 anything else.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use lacunary::diophantine::{
    am_polynomial, bridge_count, count_geometric_dp, count_laurent, count_signed_zero_sums,
    WorkBounds,
};
use lacunary::empirical::{ldp_increment, levelset_prob, mgf_grid, mgf_poly_exact, sublacunary_demo};
use lacunary::error::Error;
use lacunary::moments::{cumulant_affine, independent_moment, lambda_taylor, moment, tilde_lambda_taylor};
use lacunary::ratefn::{figure1_csv, figure1_curves, figure1_svg, rate_q, rate_taylor, rate_tilde, RateValue};
use lacunary::sequences::{geometric, interleaved, large_gap, perturbed, LacunarySequence};
use lacunary::spectral::{lambda_spec, lambda_tilde};

#[derive(Parser)]
#[command(name = "lacunary", version, about = "Large-deviation machinery for lacunary trigonometric sums")]
struct Cli {
    /// Worker threads; defaults to the available parallelism. Output is
    /// independent of the thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a sequence and print it as JSON with exact decimal terms.
    Seq(SeqArgs),
    /// Exact solution counts A_m(n) and B_m(n) as CSV.
    Count(CountArgs),
    /// Closed form of A_m(n) as a polynomial in n, as JSON.
    Ampoly(AmpolyArgs),
    /// Exact moments of S_n and of the independent sum, as CSV.
    Moments(MomentsArgs),
    /// Affine cumulant forms kappa_m(S_n) = slope n + intercept, as CSV.
    Cumulants(CumulantsArgs),
    /// Taylor coefficients of Lambda_q (or the independent Lambda~).
    LambdaTaylor(SeriesArgs),
    /// Taylor coefficients of the rate function I_q (or I~).
    RateTaylor(SeriesArgs),
    /// Spectral Lambda_q against Lambda~ on a theta grid, as CSV.
    Lambda(LambdaArgs),
    /// One rate-function evaluation, as CSV.
    Rate(RateArgs),
    /// Sample the four rate curves and render CSV and SVG.
    Figure1(Figure1Args),
    /// Grid integration: mgf, level sets, increments, exact polynomial mgf.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct SeqArgs {
    #[arg(long, value_enum)]
    kind: SeqKind,
    /// Base for geometric sequences.
    #[arg(long)]
    q: Option<u64>,
    /// Number of terms.
    #[arg(long)]
    n: Option<usize>,
    /// Seed for perturbed sequences.
    #[arg(long)]
    seed: Option<u64>,
    /// Block schedule for interleaved sequences, e.g. "2x10,3x8".
    #[arg(long)]
    schedule: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeqKind {
    Geometric,
    LargeGap,
    Perturbed,
    Interleaved,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "dp")]
    engine: CountEngine,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountEngine {
    Dp,
    Laurent,
    Brute,
}

#[derive(Args)]
struct AmpolyArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    m: usize,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    max_order: usize,
}

#[derive(Args)]
struct CumulantsArgs {
    #[arg(long)]
    q: u64,
    #[arg(long, default_value_t = 7)]
    max_order: usize,
}

#[derive(Args)]
struct SeriesArgs {
    /// Geometric base; omit together with --tilde for the independent case.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, default_value_t = 10)]
    order: usize,
    /// Use the independent-case series instead of a geometric base.
    #[arg(long)]
    tilde: bool,
}

#[derive(Args)]
struct LambdaArgs {
    #[arg(long)]
    q: u64,
    /// Theta grid "start:end:step".
    #[arg(long, default_value = "-2:2:0.25", allow_hyphen_values = true)]
    theta_grid: String,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long)]
    tilde: bool,
}

#[derive(Args)]
struct Figure1Args {
    /// SVG output path.
    #[arg(long, default_value = "fig1.svg")]
    out: PathBuf,
    /// CSV output path; the CSV also goes to stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// x grid "start:end:step" inside (-1, 1).
    #[arg(long, default_value = "-0.9:0.9:0.1", allow_hyphen_values = true)]
    grid: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Inline sequence ("geometric:2:20", "large-gap:6", "perturbed:30:7",
    /// "interleaved:2x10,3x8", "arithmetic:24") or a path to sequence JSON.
    #[arg(long, default_value = "geometric:2:16")]
    seq: String,
    #[arg(long, value_enum)]
    mode: SimMode,
    /// Prefix length for mgf/levelset/polyexact.
    #[arg(long)]
    n: Option<usize>,
    /// Largest n for increments/sublacunary.
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Level for levelset mode.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    /// Level for sublacunary mode.
    #[arg(long)]
    z: Option<f64>,
    /// Taylor polynomial degree for polyexact mode.
    #[arg(long)]
    d: Option<usize>,
    /// log2 of the base grid size.
    #[arg(long, default_value_t = 20)]
    grid_log2: u32,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimMode {
    Mgf,
    Levelset,
    Increments,
    Sublacunary,
    Polyexact,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .is_err()
        {
            eprintln!("error: kind=invalid-argument msg=\"could not configure {t} threads\"");
            return ExitCode::from(2);
        }
    }
    match run(&cli.command) {
        Ok((body, dest)) => {
            let text = format!(
                "# lacunary-cli {}\n{}",
                env!("CARGO_PKG_VERSION"),
                body
            );
            match dest {
                None => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Some(path) => match std::fs::write(&path, text) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => {
                        eprintln!("error: kind=io msg=\"{e}\"");
                        ExitCode::from(1)
                    }
                },
            }
        }
        Err(e) => {
            let kind = match &e {
                Error::InvalidArgument(_) => "invalid-argument",
                Error::ResourceLimit { .. } => "resource-limit",
                Error::InternalConsistency(_) => "internal-consistency",
                Error::Numeric(_) => "numeric",
                Error::Range(_) => "range",
                Error::Convergence { .. } => "convergence",
                Error::Accuracy { .. } => "accuracy",
                Error::InvariantViolation(_) => "invariant-violation",
            };
            eprintln!("error: kind={kind} msg=\"{e}\"");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Work bounds, scaled by the LDP_WORKBOUND multiplier when set.
fn bounds() -> Result<WorkBounds, Error> {
    match std::env::var("LDP_WORKBOUND") {
        Err(_) => Ok(WorkBounds::default()),
        Ok(v) => {
            let factor: f64 = v.parse().map_err(|_| {
                Error::InvalidArgument(format!("LDP_WORKBOUND must be a number, got {v:?}"))
            })?;
            if factor.is_nan() || factor <= 0.0 {
                return Err(Error::InvalidArgument(
                    "LDP_WORKBOUND must be positive".into(),
                ));
            }
            Ok(WorkBounds::scaled(factor))
        }
    }
}

/// Returns the output body and an optional file destination (stdout when
/// absent).
fn run(cmd: &Command) -> Result<(String, Option<PathBuf>), Error> {
    let plain = |s: Result<String, Error>| s.map(|body| (body, None));
    match cmd {
        Command::Seq(a) => plain(run_seq(a)),
        Command::Count(a) => plain(run_count(a)),
        Command::Ampoly(a) => plain(run_ampoly(a)),
        Command::Moments(a) => plain(run_moments(a)),
        Command::Cumulants(a) => plain(run_cumulants(a)),
        Command::LambdaTaylor(a) => plain(run_series(a, false)),
        Command::RateTaylor(a) => plain(run_series(a, true)),
        Command::Lambda(a) => plain(run_lambda(a)),
        Command::Rate(a) => plain(run_rate(a)),
        Command::Figure1(a) => plain(run_figure1(a)),
        Command::Simulate(a) => run_simulate(a).map(|body| (body, a.out.clone())),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidArgument(format!("missing required flag --{flag}")))
}

fn parse_schedule(s: &str) -> Result<Vec<(u64, usize)>, Error> {
    s.split(',')
        .map(|blk| {
            let (base, len) = blk.split_once('x').ok_or_else(|| {
                Error::InvalidArgument(format!("bad schedule block {blk:?}, want BASExLEN"))
            })?;
            let base = base.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("bad base in schedule block {blk:?}"))
            })?;
            let len = len.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("bad length in schedule block {blk:?}"))
            })?;
            Ok((base, len))
        })
        .collect()
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "bad grid {s:?}, want start:end:step"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad grid start {:?}", parts[0])))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad grid end {:?}", parts[1])))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad grid step {:?}", parts[2])))?;
    if step.is_nan() || step <= 0.0 || end < start {
        return Err(Error::InvalidArgument(format!("degenerate grid {s:?}")));
    }
    let count = ((end - start) / step).round() as usize + 1;
    Ok((0..count)
        .map(|i| start + i as f64 * step)
        .filter(|x| *x <= end + step * 1e-9)
        .collect())
}

fn parse_sequence(spec: &str) -> Result<LacunarySequence, Error> {
    if spec.ends_with(".json") || std::path::Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {spec:?}: {e}")))?;
        return LacunarySequence::from_json(&text);
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("bad sequence spec {spec:?}")))?;
    let ints = |s: &str| -> Result<Vec<u64>, Error> {
        s.split(':')
            .map(|p| {
                p.parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad number {p:?} in {spec:?}")))
            })
            .collect()
    };
    match kind {
        "geometric" => {
            let v = ints(rest)?;
            if v.len() != 2 {
                return Err(Error::InvalidArgument("geometric wants q:n".into()));
            }
            geometric(v[0], v[1] as usize)
        }
        "large-gap" => {
            let v = ints(rest)?;
            if v.len() != 1 {
                return Err(Error::InvalidArgument("large-gap wants n".into()));
            }
            large_gap(v[0] as usize)
        }
        "perturbed" => {
            let v = ints(rest)?;
            if v.len() != 2 {
                return Err(Error::InvalidArgument("perturbed wants n:seed".into()));
            }
            perturbed(v[0] as usize, v[1])
        }
        "interleaved" => interleaved(&parse_schedule(rest)?),
        "arithmetic" => {
            let v = ints(rest)?;
            if v.len() != 1 || v[0] == 0 {
                return Err(Error::InvalidArgument("arithmetic wants n >= 1".into()));
            }
            LacunarySequence::custom((1..=v[0]).map(Into::into).collect())
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown sequence kind {other:?}"
        ))),
    }
}

fn run_seq(a: &SeqArgs) -> Result<String, Error> {
    let seq = match a.kind {
        SeqKind::Geometric => geometric(need(a.q, "q")?, need(a.n, "n")?)?,
        SeqKind::LargeGap => large_gap(need(a.n, "n")?)?,
        SeqKind::Perturbed => perturbed(need(a.n, "n")?, need(a.seed, "seed")?)?,
        SeqKind::Interleaved => {
            let s = a
                .schedule
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("missing required flag --schedule".into()))?;
            interleaved(&parse_schedule(s)?)?
        }
    };
    Ok(format!("{}\n", seq.to_json()))
}

fn run_count(a: &CountArgs) -> Result<String, Error> {
    let b = bounds()?;
    let am = match a.engine {
        CountEngine::Dp => count_geometric_dp(a.q, a.m, a.n)?,
        CountEngine::Laurent => count_laurent(a.q, a.m, a.n, &b)?,
        CountEngine::Brute => count_signed_zero_sums(&geometric(a.q, a.n)?, a.m, &b)?,
    };
    let bm = bridge_count(a.m, a.n)?;
    Ok(format!(
        "q,m,n,A_m,B_m\n{},{},{},{},{}\n",
        a.q, a.m, a.n, am, bm
    ))
}

fn run_ampoly(a: &AmpolyArgs) -> Result<String, Error> {
    let p = am_polynomial(a.q, a.m)?;
    let coeffs: Vec<String> = p
        .coefficients
        .iter()
        .map(|c| format!("\"{c}\""))
        .collect();
    Ok(format!(
        "{{\"q\":{},\"m\":{},\"valid_from\":{},\"degree\":{},\"coefficients\":[{}]}}\n",
        p.q,
        p.m,
        p.valid_from,
        p.degree(),
        coeffs.join(",")
    ))
}

fn run_moments(a: &MomentsArgs) -> Result<String, Error> {
    let mut out = String::from("m,moment,independent_moment\n");
    for m in 1..=a.max_order {
        let mom = moment(a.q, m, a.n)?;
        let ind = independent_moment(m, a.n)?;
        writeln!(out, "{m},{mom},{ind}").unwrap();
    }
    Ok(out)
}

fn run_cumulants(a: &CumulantsArgs) -> Result<String, Error> {
    let mut out =
        String::from("m,slope,intercept,slope_over_mfact,intercept_over_mfact,valid_from\n");
    let mut fact = BigRational::from_integer(1.into());
    for m in 1..=a.max_order {
        fact *= BigRational::from_integer(m.into());
        let c = cumulant_affine(a.q, m)?;
        writeln!(
            out,
            "{m},{},{},{},{},{}",
            c.slope,
            c.intercept,
            &c.slope / &fact,
            &c.intercept / &fact,
            c.valid_from
        )
        .unwrap();
    }
    Ok(out)
}

fn run_series(a: &SeriesArgs, rate: bool) -> Result<String, Error> {
    let lambda = match (a.tilde, a.q) {
        (true, None) => tilde_lambda_taylor(a.order.max(2))?,
        (false, Some(q)) => lambda_taylor(q, a.order.max(2))?,
        _ => {
            return Err(Error::InvalidArgument(
                "pass exactly one of --q or --tilde".into(),
            ))
        }
    };
    let series = if rate { rate_taylor(&lambda)? } else { lambda };
    let coeffs: Vec<String> = series
        .coeffs()
        .iter()
        .take(a.order + 1)
        .map(|c| format!("\"{c}\""))
        .collect();
    Ok(format!("[{}]\n", coeffs.join(",")))
}

fn run_lambda(a: &LambdaArgs) -> Result<String, Error> {
    let grid = parse_grid(&a.theta_grid)?;
    let mut out = String::from("theta,lambda_q,lambda_tilde,gap\n");
    for theta in grid {
        let lq = lambda_spec(theta, a.q)?;
        let lt = lambda_tilde(theta)?;
        writeln!(out, "{theta},{lq:.12},{lt:.12},{:.12}", lq - lt).unwrap();
    }
    Ok(out)
}

fn run_rate(a: &RateArgs) -> Result<String, Error> {
    let value = match (a.tilde, a.q) {
        (true, None) => rate_tilde(a.x)?,
        (false, Some(q)) => rate_q(q, a.x)?,
        _ => {
            return Err(Error::InvalidArgument(
                "pass exactly one of --q or --tilde".into(),
            ))
        }
    };
    let mut out = String::from("x,value,theta_x,saturated\n");
    match value {
        RateValue::Infinite => writeln!(out, "{},inf,,", a.x).unwrap(),
        RateValue::Finite(r) => {
            writeln!(out, "{},{:.12},{:.9},{}", a.x, r.value, r.theta, r.saturated).unwrap()
        }
    }
    Ok(out)
}

fn run_figure1(a: &Figure1Args) -> Result<String, Error> {
    let grid = parse_grid(&a.grid)?;
    if grid.iter().any(|x| x.abs() >= 1.0) {
        return Err(Error::InvalidArgument(
            "figure grid must lie inside (-1, 1)".into(),
        ));
    }
    let fig = figure1_curves(&grid)?;
    let svg = figure1_svg(&fig);
    std::fs::write(&a.out, svg)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {:?}: {e}", a.out)))?;
    let csv = figure1_csv(&fig);
    if let Some(path) = &a.csv {
        std::fs::write(path, &csv)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {path:?}: {e}")))?;
    }
    Ok(csv)
}

fn run_simulate(a: &SimulateArgs) -> Result<String, Error> {
    match a.mode {
        SimMode::Mgf => {
            let seq = parse_sequence(&a.seq)?;
            let n = need(a.n, "n")?;
            let theta = need(a.theta, "theta")?;
            let g = mgf_grid(&seq, n, theta, a.grid_log2)?;
            Ok(format!(
                "n,theta,grid_log2,value,log_value,doubling_delta,escalated\n\
                 {n},{theta},{},{:.12e},{:.12},{:.3e},{}\n",
                g.grid_log2,
                g.value,
                g.value.ln(),
                g.doubling_delta,
                g.escalated
            ))
        }
        SimMode::Levelset => {
            let seq = parse_sequence(&a.seq)?;
            let n = need(a.n, "n")?;
            let x = need(a.x, "x")?;
            let g = levelset_prob(&seq, n, x, a.grid_log2)?;
            let rate = if g.value > 0.0 {
                -g.value.ln() / n as f64
            } else {
                f64::INFINITY
            };
            Ok(format!(
                "n,x,grid_log2,prob,rate,doubling_delta,escalated\n\
                 {n},{x},{},{:.9e},{rate:.9},{:.3e},{}\n",
                g.grid_log2, g.value, g.doubling_delta, g.escalated
            ))
        }
        SimMode::Increments => {
            let seq = parse_sequence(&a.seq)?;
            let n_max = need(a.n_max, "n-max")?;
            let theta = need(a.theta, "theta")?;
            let inc = ldp_increment(&seq, theta, n_max, a.grid_log2)?;
            let mut out = String::from("n,delta\n");
            for i in inc {
                writeln!(out, "{},{:.12}", i.n, i.delta).unwrap();
            }
            Ok(out)
        }
        SimMode::Sublacunary => {
            let n_max = need(a.n_max, "n-max")?;
            let z = need(a.z, "z")?;
            let vals = sublacunary_demo(n_max, z, a.grid_log2)?;
            let mut out = String::from("n,neg_log_p_over_n\n");
            for (n, v) in vals {
                writeln!(out, "{n},{v:.9}").unwrap();
            }
            Ok(out)
        }
        SimMode::Polyexact => {
            let seq = parse_sequence(&a.seq)?;
            let n = need(a.n, "n")?;
            let theta = need(a.theta, "theta")?;
            let d = need(a.d, "d")?;
            let v = mgf_poly_exact(&seq, n, theta, d, &bounds()?)?;
            Ok(format!(
                "n,theta,d,value_exact,value\n{n},{theta},{d},{v},{:.12e}\n",
                v.to_f64().unwrap_or(f64::NAN)
            ))
        }
    }
}
