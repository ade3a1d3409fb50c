//! Command-line front end: Kummer evaluation, root location, definiteness
//! classification, regime sweeps, radial shooting and identity verification,
//! with CSV/JSON output.
//!
//! Exit codes: 0 on success, 2 on a validation error (bad flags or
//! parameters), 3 on a numerical failure.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ou_liouville_core::fields::{sobolev_exponent, ProblemParams};
use ou_liouville_core::kummer::{self, KummerArgs};
use ou_liouville_core::numerics::OdeSpec;
use ou_liouville_core::regime;
use ou_liouville_core::shooting;
use ou_liouville_core::verify;

mod sweep;

#[derive(Parser)]
#[command(
    name = "ou-liouville",
    about = "Desk-scale numerics for the semilinear Ornstein-Uhlenbeck equation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Kummer function M(a, b, xi)
    #[command(allow_negative_numbers = true)]
    Eval {
        a: f64,
        b: f64,
        xi: f64,
    },
    /// Locate the positive roots of xi -> M(a, b, xi)
    #[command(allow_negative_numbers = true)]
    Roots {
        a: f64,
        b: f64,
        /// Right end of the search window on the xi axis
        #[arg(long = "xi-max", default_value_t = 50.0)]
        xi_max: f64,
    },
    /// Classify the definiteness of the matrix field at (n, p, lambda)
    #[command(allow_negative_numbers = true)]
    Regime {
        n: u32,
        /// Nonlinearity exponent; the literal `pS` selects the Sobolev exponent
        p: String,
        lambda: f64,
        #[command(flatten)]
        scan: ScanOpts,
        /// Also write the sampled field profile as CSV to this path
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Emit a CSV regime map over ranges of n and lambda
    #[command(allow_negative_numbers = true)]
    Sweep {
        /// Dimension or range `start:stop:step`
        #[arg(long)]
        n: String,
        /// Lambda value or range `start:stop:step`
        #[arg(long)]
        lambda: String,
        /// Nonlinearity exponent; `pS` tracks the Sobolev exponent per n
        #[arg(long)]
        p: String,
        #[command(flatten)]
        scan: ScanOpts,
        /// Worker threads (default: available parallelism); the
        /// OU_LIOUVILLE_JOBS environment variable overrides this flag
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the CSV here instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Integrate a radial profile from w(0) = alpha, or bisect a bracket
    #[command(allow_negative_numbers = true)]
    Shoot {
        n: u32,
        p: String,
        lambda: f64,
        /// Initial amplitude for a single shot
        #[arg(long, conflicts_with = "bracket")]
        alpha: Option<f64>,
        /// Two amplitudes bracketing a bounded profile
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        bracket: Option<Vec<f64>>,
        #[arg(long, default_value_t = 15.0)]
        r_end: f64,
        /// Per-step error tolerance of the integrator
        #[arg(long, default_value_t = 1e-10)]
        error_tol: f64,
        /// Write the profile CSV (r, w, w_prime) here
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the volume/boundary identity on a stored profile CSV
    #[command(allow_negative_numbers = true)]
    Verify {
        n: u32,
        p: String,
        lambda: f64,
        /// Profile CSV with header r,w,w_prime (as written by `shoot`)
        #[arg(long)]
        profile: PathBuf,
        /// Field parameter; defaults to max(lambda, 0)
        #[arg(long)]
        mu: Option<f64>,
        /// Ball radius for the identity
        #[arg(long, default_value_t = 12.0)]
        radius: f64,
    },
}

#[derive(Args)]
struct ScanOpts {
    /// Outer radius of the sign scan
    #[arg(long, default_value_t = 30.0)]
    r_max: f64,
    /// Number of scan points
    #[arg(long, default_value_t = 800)]
    grid_points: usize,
}

enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Numerical(e.to_string())
    }
}

/// All floating-point text output carries 17 significant digits so runs
/// reproduce bit-for-bit.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_p(token: &str, n: u32) -> Result<f64, CliError> {
    if token.eq_ignore_ascii_case("ps") {
        let ps = sobolev_exponent(n);
        if !ps.is_finite() {
            return Err(CliError::validation(format!(
                "the Sobolev exponent is infinite for n = {n}; give p explicitly"
            )));
        }
        return Ok(ps);
    }
    token
        .parse::<f64>()
        .map_err(|_| CliError::validation(format!("cannot parse p from {token:?}")))
}

/// Parse `value` or `start:stop:step` into the inclusive list of values.
fn parse_range(token: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = token.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single
            .parse()
            .map_err(|_| CliError::validation(format!("cannot parse {token:?}")))?]),
        [start, stop, step] => {
            let start: f64 = start
                .parse()
                .map_err(|_| CliError::validation(format!("bad range start in {token:?}")))?;
            let stop: f64 = stop
                .parse()
                .map_err(|_| CliError::validation(format!("bad range stop in {token:?}")))?;
            let step: f64 = step
                .parse()
                .map_err(|_| CliError::validation(format!("bad range step in {token:?}")))?;
            if step <= 0.0 || stop < start {
                return Err(CliError::validation(format!(
                    "range {token:?} must have positive step and stop >= start"
                )));
            }
            let mut values = Vec::new();
            let mut k = 0u32;
            loop {
                let v = start + step * k as f64;
                if v > stop + 1e-12 {
                    break;
                }
                values.push(v);
                k += 1;
            }
            Ok(values)
        }
        _ => Err(CliError::validation(format!(
            "expected `value` or `start:stop:step`, got {token:?}"
        ))),
    }
}

fn params_for(n: u32, p: f64, lambda: f64) -> Result<ProblemParams, CliError> {
    ProblemParams::new(n, p, lambda).map_err(|e| CliError::Validation(e.to_string()))
}

fn open_out(path: &PathBuf) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval { a, b, xi } => {
            let value = kummer::kummer_m(KummerArgs::new(a, b, xi))?;
            println!("{}", fmt(value));
        }
        Command::Roots { a, b, xi_max } => {
            if xi_max <= 0.0 {
                return Err(CliError::validation("--xi-max must be positive"));
            }
            let roots = kummer::positive_roots(a, b, xi_max)?;
            println!("{}", serde_json::to_string_pretty(&roots).unwrap());
        }
        Command::Regime {
            n,
            p,
            lambda,
            scan,
            profile_out,
        } => {
            let p = parse_p(&p, n)?;
            let params = params_for(n, p, lambda)?;
            if scan.r_max < 30.0 || scan.grid_points < 500 {
                return Err(CliError::validation(
                    "the scan needs --r-max >= 30 and --grid-points >= 500",
                ));
            }
            let report = regime::classify(&params, scan.r_max, scan.grid_points)?;
            if let Some(path) = profile_out {
                let grid: Vec<f64> = (0..scan.grid_points)
                    .map(|i| {
                        1e-3 + (scan.r_max - 1e-3) * i as f64 / (scan.grid_points - 1) as f64
                    })
                    .collect();
                let profile =
                    ou_liouville_core::fields::FieldProfile::compute(&params, params.mu(), &grid)?;
                profile.write_csv(open_out(&path)?)?;
            }
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
        Command::Sweep {
            n,
            lambda,
            p,
            scan,
            jobs,
            output,
        } => {
            let ns: Vec<u32> = parse_range(&n)?
                .into_iter()
                .map(|v| v.round() as u32)
                .collect();
            let lambdas = parse_range(&lambda)?;
            if scan.r_max < 30.0 || scan.grid_points < 500 {
                return Err(CliError::validation(
                    "the scan needs --r-max >= 30 and --grid-points >= 500",
                ));
            }
            let jobs = match std::env::var("OU_LIOUVILLE_JOBS") {
                Ok(v) => v
                    .parse::<usize>()
                    .map_err(|_| CliError::validation("OU_LIOUVILLE_JOBS must be an integer"))?,
                Err(_) => jobs.unwrap_or_else(|| {
                    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
                }),
            };
            if jobs == 0 {
                return Err(CliError::validation("--jobs must be at least 1"));
            }
            let mut points = Vec::new();
            for &nn in &ns {
                let pv = parse_p(&p, nn)?;
                for &lam in &lambdas {
                    points.push((nn, pv, lam));
                }
            }
            let rows = sweep::run(&points, scan.r_max, scan.grid_points, jobs)?;
            match output {
                Some(path) => sweep::write_csv(&rows, open_out(&path)?)?,
                None => sweep::write_csv(&rows, std::io::stdout().lock())?,
            }
        }
        Command::Shoot {
            n,
            p,
            lambda,
            alpha,
            bracket,
            r_end,
            error_tol,
            output,
        } => {
            let p = parse_p(&p, n)?;
            let params = params_for(n, p, lambda)?;
            if !(0.0 < r_end && r_end <= 40.0) {
                return Err(CliError::validation("--r-end must lie in (0, 40]"));
            }
            let ode = OdeSpec {
                error_tol,
                ..OdeSpec::default()
            };
            let result = match (alpha, bracket) {
                (Some(alpha), None) => shooting::integrate_profile(&params, alpha, r_end, &ode)?,
                (None, Some(b)) => {
                    match shooting::find_bounded_profile(&params, b[0], b[1], r_end, 200, &ode)? {
                        Some(res) => res,
                        None => {
                            return Err(CliError::Numerical(
                                "bisection converged but the boundary profile failed the \
                                 boundedness checks"
                                    .into(),
                            ))
                        }
                    }
                }
                _ => {
                    return Err(CliError::validation(
                        "exactly one of --alpha or --bracket is required",
                    ))
                }
            };
            if let Some(path) = output {
                result.write_csv(open_out(&path)?)?;
            }
            println!("{}", serde_json::to_string_pretty(&result.summary()).unwrap());
        }
        Command::Verify {
            n,
            p,
            lambda,
            profile,
            mu,
            radius,
        } => {
            let p = parse_p(&p, n)?;
            let params = params_for(n, p, lambda)?;
            let mu = mu.unwrap_or_else(|| params.mu());
            let text = std::fs::read_to_string(&profile).map_err(|e| {
                CliError::Validation(format!("cannot read {}: {e}", profile.display()))
            })?;
            let (grid, w, w_prime) = parse_profile_csv(&text)?;
            let shot = shooting::profile_from_arrays(
                &params,
                grid,
                w,
                w_prime,
                shooting::Outcome::BoundedCandidate,
            );
            let res = verify::identity_residual(&shot, &params, mu, radius)?;
            println!("{}", serde_json::to_string_pretty(&res).unwrap());
        }
    }
    Ok(())
}

type ProfileColumns = (Vec<f64>, Vec<f64>, Vec<f64>);

fn parse_profile_csv(text: &str) -> Result<ProfileColumns, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == "r,w,w_prime" => {}
        other => {
            return Err(CliError::validation(format!(
                "expected header `r,w,w_prime`, got {other:?}"
            )))
        }
    }
    let mut grid = Vec::new();
    let mut w = Vec::new();
    let mut w_prime = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(CliError::validation(format!(
                "row {} has {} columns, expected 3",
                k + 2,
                cols.len()
            )));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(format!("bad number {s:?} in row {}", k + 2)))
        };
        grid.push(parse(cols[0])?);
        w.push(parse(cols[1])?);
        w_prime.push(parse(cols[2])?);
    }
    if grid.len() < 2 {
        return Err(CliError::validation("profile needs at least two rows"));
    }
    Ok((grid, w, w_prime))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
