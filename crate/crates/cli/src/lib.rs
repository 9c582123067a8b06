//! Command-line front end for `sqfree-core`: argument parsing, experiment
//! dispatch and JSON/CSV report emission.

pub mod parse;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use sqfree_core::bivariate::{
    box_zero_bound, certify_coprime, certify_squarefree, compute_r, count_zeros_box, poonen_substitute,
};
use sqfree_core::ff_poly::{enumerate_primes, prime_count, prime_power, primes_below_degree};
use sqfree_core::interval_z::{
    count_small_square_free, count_squarefree_z, half_log_bound, inclusion_exclusion_count, IntervalLimits,
    IntervalRow, IntervalSpec,
};
use sqfree_core::residue::rho_table;
use sqfree_core::sieve::{
    count_representations, default_r, density_experiment, interval_ladder, short_interval_count, sieve_report,
    SieveParams,
};
use sqfree_core::singular::{c_f_enclosure, singular_sum_partial};
use sqfree_core::{BivarPoly, FieldSpec, FqPoly, Limits};

use parse::{parse_bivar, parse_fq_poly, parse_modulus, ParseError};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;
pub const EXIT_IO: i32 = 6;
/// The report was written but one of its consistency checks failed.
pub const EXIT_CHECK_FAILED: i32 = 7;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("cannot parse {what}: {err}")]
    Parse { what: &'static str, err: ParseError },
    #[error(transparent)]
    Core(#[from] sqfree_core::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Core(sqfree_core::Error::BudgetExceeded { .. }) => EXIT_BUDGET,
            CliError::Core(_) | CliError::Invalid(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "sqfree", version, about = "Square-free values of polynomials over F_q[t]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Field order q = p^e.
    #[arg(short = 'q', long = "field-order", env = "SQFREE_FIELD_ORDER", default_value_t = 3)]
    pub q: u64,
    /// Irreducible modulus for extension fields, a polynomial in `u` over F_p.
    #[arg(long, env = "SQFREE_MODULUS")]
    pub modulus: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Work budget for scans (arguments, residues, box points).
    #[arg(long, env = "SQFREE_BUDGET")]
    pub budget: Option<u128>,
    #[arg(long, env = "SQFREE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, env = "SQFREE_FORMAT", default_value = "json")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, env = "SQFREE_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = "SQFREE_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Monic irreducibles of each degree against Gauss's count.
    Primes {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Largest degree.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Also list the primes of the largest degree.
        #[arg(long)]
        list: bool,
    },
    /// rho(P) and rho(P^2) for every prime of degree <= --degree.
    Rho {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'f', long = "poly", env = "SQFREE_POLY")]
        poly: String,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    /// Rigorous enclosure of the singular series c_f.
    Cfactor {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'f', long = "poly", env = "SQFREE_POLY")]
        poly: String,
        #[arg(long, env = "SQFREE_M0", default_value_t = 4)]
        m0: usize,
    },
    /// Square-free values f(a) over deg a < m, for each m given.
    Count {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'f', long = "poly", env = "SQFREE_POLY")]
        poly: String,
        #[arg(short = 'm', env = "SQFREE_M", value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[arg(long, env = "SQFREE_M0", default_value_t = 3)]
        m0: usize,
    },
    /// Brun sieve decomposition with its consistency checks.
    Brun {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'f', long = "poly", env = "SQFREE_POLY")]
        poly: String,
        #[arg(short = 'm', env = "SQFREE_M")]
        m: usize,
        #[arg(long, env = "SQFREE_M0", default_value_t = 2)]
        m0: usize,
        /// Truncation order; defaults to max(4, ceil(2 v_1)).
        #[arg(short = 'r', env = "SQFREE_R")]
        r: Option<usize>,
    },
    /// Square-free values g(N + a) over deg a < m; several targets give a ladder.
    Interval {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'f', long = "poly", env = "SQFREE_POLY", default_value = "x")]
        poly: String,
        #[arg(short = 'N', long = "target", env = "SQFREE_TARGET", value_delimiter = ',', required = true)]
        target: Vec<String>,
        #[arg(short = 'm', env = "SQFREE_M")]
        m: usize,
        #[arg(long, env = "SQFREE_M0", default_value_t = 2)]
        m0: usize,
        #[arg(short = 'r', env = "SQFREE_R")]
        r: Option<usize>,
        /// Largest prime degree in the translation-invariance check.
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    /// Representations N = x^k + s with s square-free.
    Represent {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'N', long = "target", env = "SQFREE_TARGET")]
        target: String,
        #[arg(short = 'k', env = "SQFREE_K", default_value_t = 2)]
        k: u32,
        #[arg(long, env = "SQFREE_M0", default_value_t = 2)]
        m0: usize,
        #[arg(short = 'r', env = "SQFREE_R")]
        r: Option<usize>,
    },
    /// Square-free integers in [x, x + H).
    Zint {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long = "x")]
        x: BigUint,
        #[arg(long = "H")]
        h: u64,
    },
    /// Checks the p-power substitution F(y), G = dF/dt for square-free f.
    PoonenCheck {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'f', long = "poly", env = "SQFREE_POLY")]
        poly: String,
        /// Random points for the derivative identity.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Coordinates of random points have degree < --degree.
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// Box side exponent m; the zero counts use m_p = ceil(m/p).
        #[arg(short = 'm', env = "SQFREE_M")]
        m: Option<usize>,
    },
}

impl Command {
    pub fn run_args(&self) -> &RunArgs {
        match self {
            Command::Primes { run, .. }
            | Command::Rho { run, .. }
            | Command::Cfactor { run, .. }
            | Command::Count { run, .. }
            | Command::Brun { run, .. }
            | Command::Interval { run, .. }
            | Command::Represent { run, .. }
            | Command::Zint { run, .. }
            | Command::PoonenCheck { run, .. } => run,
        }
    }
}

/// A rendered report and whether all of its checks passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub checks_passed: bool,
}

fn build_field(args: &FieldArgs) -> Result<FieldSpec> {
    let (p, e) = prime_power(args.q).ok_or_else(|| CliError::Invalid(format!("{} is not a prime power", args.q)))?;
    let modulus = match &args.modulus {
        Some(text) => Some(parse_modulus(text, p).map_err(|err| CliError::Parse { what: "modulus", err })?),
        None => None,
    };
    Ok(FieldSpec::new(p, e, modulus)?)
}

fn limits(run: &RunArgs) -> Limits {
    let mut l = Limits {
        seed: run.seed,
        ..Limits::default()
    };
    if let Some(b) = run.budget {
        l.residue_scan = b;
        l.box_points = b;
        l.arguments = b;
    }
    l
}

fn bivar(text: &str, field: &FieldSpec) -> Result<BivarPoly> {
    parse_bivar(text, field).map_err(|err| CliError::Parse { what: "polynomial", err })
}

fn target(text: &str, field: &FieldSpec) -> Result<FqPoly> {
    parse_fq_poly(text, field).map_err(|err| CliError::Parse { what: "target", err })
}

fn check_m0(m0: usize) -> Result<()> {
    if m0 == 0 {
        return Err(CliError::Invalid("m0 must be at least 1".into()));
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

/// Runs the command on a pool of `--workers` threads.
pub fn run(cli: &Cli) -> Result<Output> {
    let run = cli.command.run_args();
    match run.workers {
        Some(0) => Err(CliError::Invalid("--workers must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            pool.install(|| dispatch(&cli.command))
        }
        None => dispatch(&cli.command),
    }
}

/// Parses `args` (program name first) and runs the command without writing output.
pub fn execute<I, T>(args: I) -> Result<Output>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    run(&cli)
}

fn dispatch(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Primes {
            field,
            run,
            degree,
            list,
        } => primes(&build_field(field)?, run, *degree, *list),
        Command::Rho {
            field,
            run,
            poly,
            degree,
        } => {
            let fs = build_field(field)?;
            rho(&bivar(poly, &fs)?, run, *degree)
        }
        Command::Cfactor { field, run, poly, m0 } => {
            let fs = build_field(field)?;
            check_m0(*m0)?;
            cfactor(&bivar(poly, &fs)?, run, *m0)
        }
        Command::Count {
            field,
            run,
            poly,
            m,
            m0,
        } => {
            let fs = build_field(field)?;
            check_m0(*m0)?;
            count(&bivar(poly, &fs)?, run, m, *m0)
        }
        Command::Brun {
            field,
            run,
            poly,
            m,
            m0,
            r,
        } => {
            let fs = build_field(field)?;
            check_m0(*m0)?;
            brun(&bivar(poly, &fs)?, run, *m, *m0, *r)
        }
        Command::Interval {
            field,
            run,
            poly,
            target: targets,
            m,
            m0,
            r,
            degree,
        } => {
            let fs = build_field(field)?;
            check_m0(*m0)?;
            let g = bivar(poly, &fs)?;
            let targets = targets.iter().map(|t| target(t, &fs)).collect::<Result<Vec<_>>>()?;
            interval(&g, &targets, run, *m, *m0, *r, *degree)
        }
        Command::Represent {
            field,
            run,
            target: n,
            k,
            m0,
            r,
        } => {
            let fs = build_field(field)?;
            check_m0(*m0)?;
            represent(&target(n, &fs)?, run, *k, *m0, *r)
        }
        Command::Zint { run, x, h } => zint(run, x, *h),
        Command::PoonenCheck {
            field,
            run,
            poly,
            samples,
            degree,
            m,
        } => {
            let fs = build_field(field)?;
            poonen_check(&bivar(poly, &fs)?, run, *samples, *degree, *m)
        }
    }
}

fn primes(fs: &FieldSpec, run: &RunArgs, degree: usize, list: bool) -> Result<Output> {
    if degree == 0 {
        return Err(CliError::Invalid("--degree must be at least 1".into()));
    }
    let lim = limits(run);
    let q = fs.q() as u128;
    let candidates = q
        .checked_pow(degree as u32)
        .ok_or(sqfree_core::Error::Overflow("candidate count"))?;
    if candidates > lim.arguments {
        return Err(sqfree_core::Error::BudgetExceeded {
            what: format!("monic candidates of degree {degree}"),
            required: candidates,
            budget: lim.arguments,
        }
        .into());
    }
    let mut rows = Vec::new();
    let mut last = Vec::new();
    let mut agree = true;
    for d in 1..=degree {
        let ps = enumerate_primes(fs, d);
        let gauss = prime_count(q as u64, d as u32);
        agree &= ps.len() as u128 == gauss;
        rows.push((d, ps.len() as u128, gauss));
        if d == degree {
            last = ps;
        }
    }
    let text = match run.format {
        Format::Json => {
            let mut result = json!({
                "counts": rows.iter().map(|&(d, c, g)| json!({ "degree": d, "count": report::num(c), "gauss": report::num(g) })).collect::<Vec<_>>(),
                "matches_gauss": agree,
            });
            if list {
                result["primes"] = last.iter().map(|p| Value::String(p.to_string())).collect();
            }
            pretty(&report::envelope("primes", Some(fs), run.seed, json!({ "degree": degree }), result))
        }
        Format::Csv => csv("degree,count,gauss", rows.iter().map(|(d, c, g)| format!("{d},{c},{g}"))),
    };
    Ok(Output {
        text,
        checks_passed: agree,
    })
}

fn rho(f: &BivarPoly, run: &RunArgs, degree: usize) -> Result<Output> {
    let lim = limits(run);
    let r = compute_r(f)?;
    let tables = primes_below_degree(f.field(), degree + 1)
        .iter()
        .map(|p| rho_table(f, p, &r, lim.residue_scan, lim.seed))
        .collect::<sqfree_core::Result<Vec<_>>>()?;
    let text = match run.format {
        Format::Json => pretty(&report::envelope(
            "rho",
            Some(f.field()),
            run.seed,
            json!({ "f": f.to_string(), "degree": degree }),
            json!({ "r": r.to_string(), "tables": tables.iter().map(report::rho_table).collect::<Vec<_>>() }),
        )),
        Format::Csv => csv(report::RHO_CSV_HEADER, tables.iter().map(report::rho_csv)),
    };
    Ok(Output {
        text,
        checks_passed: true,
    })
}

fn cfactor(f: &BivarPoly, run: &RunArgs, m0: usize) -> Result<Output> {
    let e = c_f_enclosure(f, m0, &limits(run))?;
    let text = match run.format {
        Format::Json => pretty(&report::envelope(
            "cfactor",
            Some(f.field()),
            run.seed,
            json!({ "f": f.to_string(), "m0": m0 }),
            report::enclosure(&e),
        )),
        Format::Csv => csv(
            "m0,c_lo,c_hi,c_lo_f64,c_hi_f64,obstruction",
            [format!(
                "{},{},{},{},{},{}",
                e.m0,
                e.c_lo,
                e.c_hi,
                e.c_lo_f64(),
                e.c_hi_f64(),
                e.obstruction.as_ref().map(|p| p.to_string()).unwrap_or_default()
            )],
        ),
    };
    Ok(Output {
        text,
        checks_passed: true,
    })
}

fn count(f: &BivarPoly, run: &RunArgs, ms: &[usize], m0: usize) -> Result<Output> {
    let rows = density_experiment(f, ms, m0, &limits(run))?;
    let text = match run.format {
        Format::Json => pretty(&report::envelope(
            "count",
            Some(f.field()),
            run.seed,
            json!({ "f": f.to_string(), "m": ms, "m0": m0 }),
            json!({ "rows": rows.iter().map(report::density_row).collect::<Vec<_>>() }),
        )),
        Format::Csv => csv(report::DENSITY_CSV_HEADER, rows.iter().map(report::density_csv)),
    };
    Ok(Output {
        text,
        checks_passed: true,
    })
}

fn resolve_r(f: &BivarPoly, m0: usize, r: Option<usize>, lim: &Limits) -> Result<usize> {
    Ok(match r {
        Some(r) => r,
        None => default_r(&singular_sum_partial(f, m0, lim)?.0),
    })
}

fn emit_sieve(rep: &sqfree_core::sieve::SieveReport, run: &RunArgs, input: Value) -> Output {
    let text = match run.format {
        Format::Json => pretty(&report::envelope(
            rep.kind,
            Some(rep.f.field()),
            run.seed,
            input,
            report::sieve_report(rep),
        )),
        Format::Csv => csv(report::SIEVE_CSV_HEADER, report::sieve_csv(rep)),
    };
    Output {
        text,
        checks_passed: rep.all_passed(),
    }
}

fn brun(f: &BivarPoly, run: &RunArgs, m: usize, m0: usize, r: Option<usize>) -> Result<Output> {
    let lim = limits(run);
    let r = resolve_r(f, m0, r, &lim)?;
    let params = SieveParams::new(m, m0, r, f.field().p());
    let mut rep = sieve_report(f, &params, true, &lim)?;
    rep.kind = "brun";
    Ok(emit_sieve(
        &rep,
        run,
        json!({ "f": f.to_string(), "m": m, "m0": m0, "r": r }),
    ))
}

fn interval(
    g: &BivarPoly,
    targets: &[FqPoly],
    run: &RunArgs,
    m: usize,
    m0: usize,
    r: Option<usize>,
    degree: usize,
) -> Result<Output> {
    let lim = limits(run);
    if let [n] = targets {
        let r = resolve_r(g, m0, r, &lim)?;
        let params = SieveParams::new(m, m0, r, g.field().p());
        let rep = short_interval_count(g, n, &params, degree, &lim)?;
        return Ok(emit_sieve(
            &rep,
            run,
            json!({ "g": g.to_string(), "target": n.to_string(), "m": m, "m0": m0, "r": r, "degree": degree }),
        ));
    }
    let rows = interval_ladder(g, targets, m, m0, &lim)?;
    let text = match run.format {
        Format::Json => pretty(&report::envelope(
            "interval",
            Some(g.field()),
            run.seed,
            json!({
                "g": g.to_string(),
                "targets": targets.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
                "m": m,
                "m0": m0,
            }),
            json!({ "rows": rows.iter().map(report::density_row).collect::<Vec<_>>() }),
        )),
        Format::Csv => csv(report::DENSITY_CSV_HEADER, rows.iter().map(report::density_csv)),
    };
    Ok(Output {
        text,
        checks_passed: true,
    })
}

fn represent(n: &FqPoly, run: &RunArgs, k: u32, m0: usize, r: Option<usize>) -> Result<Output> {
    let rep = count_representations(n, k, m0, r, &limits(run))?;
    Ok(emit_sieve(
        &rep,
        run,
        json!({ "target": n.to_string(), "k": k, "m0": m0, "r": rep.params.r }),
    ))
}

fn zint(run: &RunArgs, x: &BigUint, h: u64) -> Result<Output> {
    let mut lim = IntervalLimits::default();
    if let Some(b) = run.budget {
        lim.length = b;
    }
    let mut spec = IntervalSpec::new(x.clone(), h);
    let count = count_squarefree_z(&spec, &lim)?;
    let row = IntervalRow::new(&spec, count);
    let text = match run.format {
        Format::Json => {
            spec.small_bound = half_log_bound(h);
            let small = count_small_square_free(&spec, &lim)?;
            let ie = inclusion_exclusion_count(&spec, spec.small_bound).ok();
            pretty(&report::envelope(
                "zint",
                None,
                run.seed,
                json!({ "x": x.to_string(), "H": h }),
                json!({
                    "count": report::num(count),
                    "expected": row.expected,
                    "rel_err": row.rel_err,
                    "small_prime_bound": spec.small_bound,
                    "small_prime_count": report::num(small),
                    "inclusion_exclusion": ie.map(report::num),
                }),
            ))
        }
        Format::Csv => csv(IntervalRow::CSV_HEADER, [row.to_csv()]),
    };
    Ok(Output {
        text,
        checks_passed: true,
    })
}

fn poonen_check(f: &BivarPoly, run: &RunArgs, samples: usize, degree: usize, m: Option<usize>) -> Result<Output> {
    let lim = limits(run);
    let field = f.field();
    let (big_f, big_g) = poonen_substitute(f)?;
    let squarefree = certify_squarefree(&big_f, run.seed).ok();
    let coprime = certify_coprime(&big_f, &big_g, run.seed).ok();
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mismatches = (0..samples)
        .filter(|_| {
            let y: Vec<FqPoly> = (0..big_f.nvars()).map(|_| FqPoly::random(field, degree, &mut rng)).collect();
            big_g.eval(&y) != big_f.eval(&y).derivative()
        })
        .count();
    let mut boxes = Vec::new();
    let mut box_ok = true;
    if let Some(m) = m {
        let m_p = m.div_ceil(field.p() as usize);
        for (name, h) in [("F", &big_f), ("G", &big_g)] {
            if h.is_zero() {
                continue;
            }
            let zeros = count_zeros_box(h, m_p, lim.box_points)?;
            let bound = box_zero_bound(h, m_p);
            box_ok &= zeros <= bound;
            boxes.push((name, zeros, bound));
        }
    }
    let passed = squarefree.is_some() && coprime.is_some() && mismatches == 0 && box_ok;
    let text = match run.format {
        Format::Json => pretty(&report::envelope(
            "poonen-check",
            Some(field),
            run.seed,
            json!({ "f": f.to_string(), "samples": samples, "degree": degree, "m": m }),
            json!({
                "nvars": big_f.nvars(),
                "terms_f": big_f.num_terms(),
                "terms_g": big_g.num_terms(),
                "squarefree_certificate_attempts": squarefree,
                "coprime_certificate_attempts": coprime,
                "derivative_mismatches": mismatches,
                "boxes": boxes.iter().map(|(n, z, b)| json!({ "poly": n, "zeros": report::num(*z), "bound": report::num(*b) })).collect::<Vec<_>>(),
                "all_passed": passed,
            }),
        )),
        Format::Csv => csv(
            "nvars,squarefree_attempts,coprime_attempts,samples,derivative_mismatches,boxes_within_bound",
            [format!(
                "{},{},{},{},{},{}",
                big_f.nvars(),
                squarefree.map(|a| a.to_string()).unwrap_or_default(),
                coprime.map(|a| a.to_string()).unwrap_or_default(),
                samples,
                mismatches,
                box_ok
            )],
        ),
    };
    Ok(Output {
        text,
        checks_passed: passed,
    })
}
