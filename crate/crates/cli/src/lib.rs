//! Command-line front end for `convex-bounds`.
//!
//! [`run`] parses arguments, dispatches to the bound engines and writes a
//! report. The exit code is the worst row status: 0 pass, 1 inequality
//! violated, 2 hypothesis not certified, 3 usage or parse error.

pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convex_bounds::deriv::{self, SplitPoint};
use convex_bounds::hardy::{self, HardyParams};
use convex_bounds::hh::{self, SeriesVariant};
use convex_bounds::convexity::require_convex;
use convex_bounds::{certify, Error, FunctionSpec64, Interval64, Settings64};

pub use report::{Format, ReportRow, Status};
pub use verify::{verify_suite, IdSummary, VerifyReport};

pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "convex-bounds", version, about = "Certified two-sided bounds for convex functions")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Slack below which a row fails
    #[arg(long, env = "CONVEX_BOUNDS_TOL", default_value_t = 1e-8, global = true, allow_hyphen_values = true)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Debug, Args)]
struct Span {
    /// Function of x
    #[arg(short = 'f', long = "function", allow_hyphen_values = true)]
    f: String,
    #[arg(short = 'a', long = "a", allow_hyphen_values = true)]
    a: f64,
    #[arg(short = 'b', long = "b", allow_hyphen_values = true)]
    b: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound an integral, series, moment or mean
    Bound {
        #[command(subcommand)]
        kind: BoundKind,
        #[command(flatten)]
        common: Common,
    },
    /// Norm ratios on [0, inf)
    Hardy {
        #[command(subcommand)]
        kind: HardyKind,
        #[command(flatten)]
        common: Common,
    },
    /// Product bounds for non-negative convex factors
    Product {
        /// Factor of the product; repeat for each factor
        #[arg(short = 'f', long = "function", required = true, allow_hyphen_values = true)]
        fs: Vec<String>,
        #[arg(short = 'a', long = "a", allow_hyphen_values = true)]
        a: f64,
        #[arg(short = 'b', long = "b", allow_hyphen_values = true)]
        b: f64,
        /// Exponent for the two-factor (p, q) bound; q is its conjugate
        #[arg(long)]
        p: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Certify convexity of a derivative level
    Check {
        #[command(subcommand)]
        kind: CheckKind,
        #[command(flatten)]
        common: Common,
    },
    /// Run the randomized verification suite
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IntegralVariant {
    Hh,
    Reflection,
    Riemann,
    Refined,
    Composite,
    Fejer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesChoice {
    Eq29,
    Eq210,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeanVariant {
    Endpoint,
    Midpoint,
}

#[derive(Debug, Subcommand)]
enum BoundKind {
    /// Mean of f on [a, b] between Hermite-Hadamard bounds
    Integral {
        #[command(flatten)]
        span: Span,
        #[arg(long, value_enum, default_value_t = IntegralVariant::Hh)]
        variant: IntegralVariant,
        /// Number of Riemann nodes
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Point for the reflection variant
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        /// Target gap for the composite variant
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
        #[arg(long, default_value_t = 30)]
        max_depth: u32,
        /// Symmetric non-negative weight for the fejer variant
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<String>,
    },
    /// Integral of f over [0, inf) between series bounds
    Series {
        #[arg(short = 'f', long = "function", allow_hyphen_values = true)]
        f: String,
        #[arg(long, value_enum, default_value_t = SeriesChoice::Eq29)]
        variant: SeriesChoice,
    },
    /// First moment about the centre, for convex f'
    Moment {
        #[command(flatten)]
        span: Span,
    },
    /// Trapezoid gap, for convex f''
    TrapezoidGap {
        #[command(flatten)]
        span: Span,
    },
    /// Mean of f, for convex f'
    Mean {
        #[command(flatten)]
        span: Span,
        #[arg(long, value_enum, default_value_t = MeanVariant::Endpoint)]
        variant: MeanVariant,
    },
    /// Endpoint gap for f' concave on [a, c] and convex on [c, b]
    Inflection {
        #[command(flatten)]
        span: Span,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "auto")]
        c: Option<f64>,
        /// Locate c automatically (the default)
        #[arg(long)]
        auto: bool,
    },
    /// Difference of the half-interval integrals, for convex f'
    HalfGap {
        #[command(flatten)]
        span: Span,
    },
    /// Weighted geometric mean against the arithmetic means of a and b
    Logmean {
        #[arg(short = 'a', long = "a", allow_hyphen_values = true)]
        a: f64,
        #[arg(short = 'b', long = "b", allow_hyphen_values = true)]
        b: f64,
    },
}

#[derive(Debug, Subcommand)]
enum HardyKind {
    /// ||x^-alpha int_0^x f||_p / ||x^(1-alpha) f||_p
    Ratio {
        #[arg(short = 'f', long = "function", allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        p: f64,
    },
}

#[derive(Debug, Subcommand)]
enum CheckKind {
    Convexity {
        #[command(flatten)]
        span: Span,
        /// 0 for f, 1 for f', 2 for f''
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
}

#[derive(Debug, Subcommand)]
enum VerifyKind {
    All {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a failed command means for the exit code.
fn severity(e: &Error) -> i32 {
    if e.is_precondition() {
        Status::PreconditionFailed.exit_code()
    } else {
        EXIT_USAGE
    }
}

struct Ctx<'w> {
    out: &'w mut dyn Write,
    err: &'w mut dyn Write,
    settings: Settings64,
}

fn interval(span: &Span) -> Result<(FunctionSpec64, Interval64), Error> {
    let f = FunctionSpec64::on_interval(&span.f, span.a, span.b)?;
    let iv = f.interval().expect("finite interval");
    Ok((f, iv))
}

/// Parses and runs `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let mut ctx = Ctx { out, err, settings: Settings64::default() };
    match execute(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(Failure::Io(e)) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Engine { id, function, interval, error, common }) => {
            let _ = writeln!(ctx.err, "error: {error}");
            let code = severity(&error);
            if code == Status::PreconditionFailed.exit_code() {
                let row = ReportRow::precondition_failed(id, &function, interval);
                let _ = report::write_rows(&[row], common.format, ctx.out);
            }
            code
        }
    }
}

enum Failure {
    Io(std::io::Error),
    Engine { id: &'static str, function: String, interval: (f64, f64), error: Error, common: Common },
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

const HALF_LINE: (f64, f64) = (0.0, f64::INFINITY);

fn emit(rows: &[ReportRow], common: &Common, ctx: &mut Ctx) -> Result<i32, Failure> {
    report::write_rows(rows, common.format, ctx.out)?;
    Ok(rows.iter().map(|r| r.status.exit_code()).max().unwrap_or(0))
}

fn execute(command: Command, ctx: &mut Ctx) -> Result<i32, Failure> {
    match command {
        Command::Bound { kind, common } => bound(kind, common, ctx),
        Command::Hardy { kind: HardyKind::Ratio { f, alpha, p }, common } => {
            let fail = |error| Failure::Engine { id: "3.1", function: f.clone(), interval: HALF_LINE, error, common: Common { ..common } };
            let spec = FunctionSpec64::on_half_line(&f).map_err(fail)?;
            let e = HardyParams::new(alpha, p)
                .and_then(|params| hardy::hardy_ratio(&spec, &params, common.tol, &ctx.settings))
                .map_err(fail)?;
            let row = ReportRow::checked("3.1", &f, HALF_LINE, e.lower, e.value, e.upper, common.tol);
            emit(&[row], &common, ctx)
        }
        Command::Product { fs, a, b, p, common } => {
            let text = fs.join(" ; ");
            let fail = |id, error| Failure::Engine { id, function: text.clone(), interval: (a, b), error, common: Common { ..common } };
            let us = fs
                .iter()
                .map(|s| FunctionSpec64::on_interval(s, a, b))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| fail("3.7", e))?;
            let iv = us[0].interval().expect("finite interval");
            let s = &ctx.settings;
            let mut rows = Vec::new();
            let c = hardy::holder_product_check(&us, &iv, s).map_err(|e| fail("3.6", e))?;
            rows.push(ReportRow::one_sided("3.6", &text, (a, b), c.lhs, c.rhs, common.tol));
            match p {
                Some(p) => {
                    if us.len() != 2 {
                        let e = Error::InvalidArgument("--p needs exactly two factors".into());
                        return Err(fail("Ion", e));
                    }
                    let c = hardy::ion_bound(&us[0], &us[1], p, p / (p - 1.0), &iv, s).map_err(|e| fail("Ion", e))?;
                    rows.push(ReportRow::one_sided("Ion", &text, (a, b), c.lhs, c.rhs, common.tol));
                }
                None if us.len() >= 2 => {
                    let c = hardy::product_bound(&us, &iv, s).map_err(|e| fail("3.7", e))?;
                    rows.push(ReportRow::one_sided("3.7", &text, (a, b), c.lhs, c.rhs, common.tol));
                }
                None => {}
            }
            emit(&rows, &common, ctx)
        }
        Command::Check { kind: CheckKind::Convexity { span, level }, common } => {
            let fail = |error| Failure::Engine { id: "convexity", function: span.f.clone(), interval: (span.a, span.b), error, common: Common { ..common } };
            let (f, iv) = interval(&span).map_err(fail)?;
            let s = &ctx.settings;
            let cert = certify(&f.expression, level, &iv, s.grid, s.certify_tol).map_err(fail)?;
            let verdict = format!("{:?}", cert.verdict);
            match common.format {
                Format::Text => {
                    writeln!(ctx.out, "{} on [{}, {}], level {level}: {verdict}", span.f, span.a, span.b)?;
                    writeln!(
                        ctx.out,
                        "  grid {}  max violation {}  tolerance {}",
                        cert.grid_size,
                        report::format_number(cert.max_violation),
                        report::format_number(cert.tolerance)
                    )?;
                    if let Some((x, y)) = cert.witness {
                        writeln!(ctx.out, "  witness pair x = {}, y = {}", report::format_number(x), report::format_number(y))?;
                    }
                }
                Format::Json => {
                    let value = serde_json::json!({
                        "function": span.f,
                        "a": report::format_number(span.a),
                        "b": report::format_number(span.b),
                        "level": level,
                        "verdict": verdict,
                        "grid_size": cert.grid_size,
                        "max_violation": report::format_number(cert.max_violation),
                        "tolerance": report::format_number(cert.tolerance),
                        "witness": cert.witness.map(|(x, y)| [report::format_number(x), report::format_number(y)]),
                    });
                    writeln!(ctx.out, "{}", serde_json::to_string_pretty(&value).expect("serializable"))?;
                }
                Format::Csv => {
                    writeln!(ctx.out, "function,a,b,level,verdict,grid_size,max_violation,tolerance")?;
                    let mut w = csv::Writer::from_writer(&mut *ctx.out);
                    w.write_record([
                        span.f.clone(),
                        report::format_number(span.a),
                        report::format_number(span.b),
                        level.to_string(),
                        verdict,
                        cert.grid_size.to_string(),
                        report::format_number(cert.max_violation),
                        report::format_number(cert.tolerance),
                    ])
                    .map_err(std::io::Error::from)?;
                    w.flush()?;
                }
            }
            Ok(if cert.verdict.is_convex() { 0 } else { Status::Fail.exit_code() })
        }
        Command::Verify { kind: VerifyKind::All { trials, seed }, common } => {
            if trials == 0 {
                writeln!(ctx.err, "error: --trials must be at least 1")?;
                return Ok(EXIT_USAGE);
            }
            let report = verify_suite(trials, seed, common.tol);
            match common.format {
                Format::Csv => report::write_csv(&report.rows, &mut *ctx.out)?,
                Format::Json => {
                    let summary: Vec<_> = report
                        .summary
                        .iter()
                        .map(|s| {
                            serde_json::json!({
                                "inequality_id": s.inequality_id,
                                "passed": s.passed,
                                "failed": s.failed,
                                "precondition_failed": s.precondition_failed,
                                "max_violation": report::format_number(s.max_violation),
                            })
                        })
                        .collect();
                    let value = serde_json::json!({ "summary": summary, "rows": report.rows });
                    writeln!(ctx.out, "{}", serde_json::to_string_pretty(&value).expect("serializable"))?;
                }
                Format::Text => {
                    writeln!(ctx.out, "{:<14} {:>7} {:>7} {:>13} {:>15}", "inequality", "passed", "failed", "precondition", "max violation")?;
                    for s in &report.summary {
                        writeln!(
                            ctx.out,
                            "{:<14} {:>7} {:>7} {:>13} {:>15}",
                            s.inequality_id,
                            s.passed,
                            s.failed,
                            s.precondition_failed,
                            report::format_number(s.max_violation)
                        )?;
                    }
                    writeln!(ctx.out, "{} rows, {} failures", report.rows.len(), report.failures())?;
                }
            }
            Ok(report.worst().exit_code())
        }
    }
}

fn bound(kind: BoundKind, common: Common, ctx: &mut Ctx) -> Result<i32, Failure> {
    let tol = common.tol;
    let s = ctx.settings;
    let (id, function, span): (&'static str, String, (f64, f64)) = match &kind {
        BoundKind::Integral { span, variant, .. } => {
            let id = match variant {
                IntegralVariant::Hh => "HH",
                IntegralVariant::Reflection => "2.1",
                IntegralVariant::Riemann => "2.2",
                IntegralVariant::Refined => "2.5",
                IntegralVariant::Composite => "HH-composite",
                IntegralVariant::Fejer => "Fejer",
            };
            (id, span.f.clone(), (span.a, span.b))
        }
        BoundKind::Series { f, variant } => {
            (if *variant == SeriesChoice::Eq29 { "2.9" } else { "2.10" }, f.clone(), HALF_LINE)
        }
        BoundKind::Moment { span } => ("5.1", span.f.clone(), (span.a, span.b)),
        BoundKind::TrapezoidGap { span } => ("5.3", span.f.clone(), (span.a, span.b)),
        BoundKind::Mean { span, variant } => {
            (if *variant == MeanVariant::Endpoint { "5.5" } else { "5.6" }, span.f.clone(), (span.a, span.b))
        }
        BoundKind::Inflection { span, .. } => ("4.1", span.f.clone(), (span.a, span.b)),
        BoundKind::HalfGap { span } => ("5.7", span.f.clone(), (span.a, span.b)),
        BoundKind::Logmean { a, b } => ("5.14", "log-mean".into(), (*a, *b)),
    };
    let result = compute(&kind, tol, &s);
    match result {
        Ok((lower, value, upper)) => {
            let row = ReportRow::checked(id, &function, span, lower, value, upper, tol);
            emit(&[row], &common, ctx)
        }
        Err(error) => Err(Failure::Engine { id, function, interval: span, error, common }),
    }
}

/// `(lower, value, upper)` of a bound command.
fn compute(kind: &BoundKind, tol: f64, s: &Settings64) -> Result<(f64, f64, f64), Error> {
    let two = |g: deriv::GapReport<f64>| (g.lower.unwrap_or(g.value), g.value, g.upper);
    Ok(match kind {
        BoundKind::Integral { span, variant, n, x, gap, max_depth, weight } => {
            let (f, iv) = interval(span)?;
            match variant {
                IntegralVariant::Hh => triple(hh::hh(&f, &iv, s)?),
                IntegralVariant::Riemann => triple(hh::riemann_sandwich(&f, &iv, *n, s)?),
                IntegralVariant::Refined => triple(hh::refined_rhh(&f, &iv, s)?),
                IntegralVariant::Composite => triple(hh::composite_hh(&f, &iv, *gap, *max_depth, s)?),
                IntegralVariant::Reflection => {
                    let x = x.ok_or_else(|| Error::InvalidArgument("--x is required".into()))?;
                    require_convex(&f.expression, 0, &iv, s.grid, s.certify_tol)?;
                    let g = hh::reflection_gap(&f, &iv, x)?;
                    let rhs = f.eval(iv.a())? + f.eval(iv.b())?;
                    (rhs - g, rhs - g, rhs)
                }
                IntegralVariant::Fejer => {
                    let w = weight.as_ref().ok_or_else(|| Error::InvalidArgument("--weight is required".into()))?;
                    let g = FunctionSpec64::on_interval(w, iv.a(), iv.b())?;
                    let c = hh::fejer_upper(&f, &g, &iv, tol, s)?;
                    (c.lhs, c.lhs, c.rhs)
                }
            }
        }
        BoundKind::Series { f, variant } => {
            let spec = FunctionSpec64::on_half_line(f)?;
            let v = if *variant == SeriesChoice::Eq29 { SeriesVariant::Hadamard } else { SeriesVariant::Monotone };
            triple(hh::series_sandwich(&spec, v, s)?)
        }
        BoundKind::Moment { span } => {
            let (f, iv) = interval(span)?;
            two(deriv::moment_enclosure(&f, &iv, s)?)
        }
        BoundKind::TrapezoidGap { span } => {
            let (f, iv) = interval(span)?;
            two(deriv::trapezoid_gap_enclosure(&f, &iv, s)?)
        }
        BoundKind::Mean { span, variant } => {
            let (f, iv) = interval(span)?;
            match variant {
                MeanVariant::Endpoint => two(deriv::mean_enclosure_endpoint(&f, &iv, s)?),
                MeanVariant::Midpoint => two(deriv::mean_enclosure_midpoint(&f, &iv, s)?),
            }
        }
        BoundKind::Inflection { span, c, .. } => {
            let (f, iv) = interval(span)?;
            let split = c.map_or(SplitPoint::Auto, SplitPoint::At);
            two(deriv::inflection_hadamard(&f, &iv, split, s)?.report)
        }
        BoundKind::HalfGap { span } => {
            let (f, iv) = interval(span)?;
            two(deriv::half_interval_gap(&f, &iv, s)?)
        }
        BoundKind::Logmean { a, b } => {
            let l = deriv::log_mean_bound(*a, *b)?;
            (l.lhs, l.mid, l.amgm)
        }
    })
}

fn triple(e: convex_bounds::Enclosure64) -> (f64, f64, f64) {
    (e.lower, e.value, e.upper)
}
