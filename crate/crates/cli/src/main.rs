//! Command-line front end: wires maps, scaling functions, and horizons into
//! the analysis modules, with machine-readable JSON/CSV output.
//!
//! stdout carries data, stderr diagnostics; exit code 0 on success, 1 on
//! domain errors, 2 on usage errors. Every JSON object echoes the resolved
//! configuration under the `config` key, and runs with identical arguments
//! and seed produce byte-identical output.

use std::io::Write;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use fastlyap::coding::{self, DigitWord};
use fastlyap::construct::{self, DigitRule, DsetMode, SeqSpec, SequencePair};
use fastlyap::dimension;
use fastlyap::exponents;
use fastlyap::maps::{load_map, validate_hypotheses, MapSpec};
use fastlyap::rational::{format_rat, parse_rat, to_f64};
use fastlyap::scaling::{self, ScalingFunction};
use fastlyap::spectra::{self, AlphaClass, Dimension, SpectrumKind, SpectrumQuery};

#[derive(Parser)]
#[command(name = "fastlyap", version, about = "Markov-Renyi interval map toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed echoed into the config for reproducibility bookkeeping.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Map utilities.
    Map {
        #[command(subcommand)]
        action: MapAction,
    },
    /// Exact orbit of a rational point with its symbolic coding.
    Orbit(OrbitArgs),
    /// Symbolic coding only (a comma-separated digit line).
    Code(OrbitArgs),
    /// Cylinder intervals for digit words (CSV rows).
    Cylinder(CylinderArgs),
    /// Lyapunov / fast-Lyapunov exponent trace along an orbit (CSV).
    Exponent(ExponentArgs),
    /// Scaling-function invariants (JSON).
    Scaling(ScalingArgs),
    /// Closed-form spectrum values (JSON).
    Spectrum(SpectrumArgs),
    /// Non-decreasing minorant construction (CSV plus JSON summary).
    Gpsi(GpsiArgs),
    /// Window-constrained digit words and dimension estimates.
    Eset {
        #[command(subcommand)]
        action: EsetAction,
    },
    /// Greedy digits realizing doubly exponential products.
    Dset(DsetArgs),
    /// Exhaustive tuple-count oracle with its combinatorial bound.
    CountOracle(CountArgs),
}

#[derive(Subcommand)]
enum MapAction {
    /// Validate the five structural hypotheses at finite scale.
    Check(MapCheckArgs),
}

#[derive(Args)]
struct MapCheckArgs {
    /// Builtin name (gauss | renyi) or a path to a map-spec JSON document.
    #[arg(long)]
    map: String,
    #[arg(long, default_value_t = 16)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    branches: u64,
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long)]
    map: String,
    /// Exact rational starting point, written as p/q.
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 10)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CylinderArgs {
    #[arg(long)]
    map: String,
    /// Digit word as a comma-separated line; repeat for batches.
    #[arg(long, required = true)]
    word: Vec<String>,
}

#[derive(Args)]
struct ExponentArgs {
    #[arg(long)]
    map: String,
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 30)]
    depth: usize,
    /// Optional scaling function for the fast partials column.
    #[arg(long)]
    psi: Option<String>,
}

#[derive(Args)]
struct ScalingArgs {
    /// Family shorthand (power:2, exp:2, factorial_block, nlogn) or a JSON
    /// document path.
    #[arg(long)]
    psi: String,
    #[arg(long, default_value_t = 1000)]
    horizon: usize,
    /// Tail window; defaults to a quarter of the horizon.
    #[arg(long)]
    window: Option<usize>,
    /// Also estimate xi = limsup psi(n+1)/(psi(1)+...+psi(n)).
    #[arg(long, default_value_t = false)]
    xi: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    map: String,
    #[arg(long)]
    psi: String,
    #[arg(long, value_enum)]
    alpha: AlphaArg,
    #[arg(long, value_enum, default_value_t = WhichArg::Fast)]
    which: WhichArg,
    #[arg(long, default_value_t = 1000)]
    horizon: usize,
    #[arg(long)]
    window: Option<usize>,
    /// Evaluate even when hypothesis validation fails.
    #[arg(long, default_value_t = false)]
    force: bool,
}

#[derive(Args)]
struct GpsiArgs {
    #[arg(long)]
    psi: String,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 1000)]
    horizon: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Simple)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum EsetAction {
    /// Emit the digit word with s_n < a_n <= s_n + t_n (integer lines).
    Digits(EsetDigitsArgs),
    /// Enumerate basic intervals and compare measured data with the
    /// truncated dimension formula (JSON, optional per-level CSV).
    Dim(EsetDimArgs),
}

#[derive(Args)]
struct EsetDigitsArgs {
    /// Sequence shorthand for s (exp:e, exp:2, tower:2:2, const:2, pow:1.5).
    #[arg(long)]
    s: String,
    /// Sequence shorthand for t; defaults to s.
    #[arg(long)]
    t: Option<String>,
    #[arg(long, default_value_t = 5)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::Smallest)]
    rule: RuleArg,
}

#[derive(Args)]
struct EsetDimArgs {
    #[arg(long)]
    map: String,
    #[arg(long)]
    s: String,
    #[arg(long)]
    t: Option<String>,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 200)]
    formula_horizon: usize,
    #[arg(long, default_value_t = 1 << 20)]
    digit_cap: u64,
    /// Also print the per-level CSV (n, m_n, min_gap, max_diam).
    #[arg(long, default_value_t = false)]
    csv: bool,
}

#[derive(Args)]
struct DsetArgs {
    #[arg(long)]
    b: f64,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// "eventually" or "io:2,4" (constraints along a subsequence).
    #[arg(long, default_value = "eventually")]
    mode: String,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlphaArg {
    #[value(name = "0")]
    Zero,
    Finite,
    Inf,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Fast,
    Upper,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Simple,
    Appendix,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Smallest,
    Midpoint,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn load_map_arg(arg: &str) -> Result<MapSpec> {
    match arg {
        "gauss" => Ok(MapSpec::gauss()),
        "renyi" => Ok(MapSpec::renyi()),
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading map document {path}"))?;
            Ok(load_map(&text)?)
        }
    }
}

fn load_psi_arg(arg: &str) -> Result<ScalingFunction> {
    if arg.ends_with(".json") || arg.ends_with(".csv") || std::path::Path::new(arg).exists() {
        let text = std::fs::read_to_string(arg)
            .with_context(|| format!("reading scaling-function document {arg}"))?;
        if arg.ends_with(".csv") {
            let values = scaling::parse_psi_table_csv(&text)?;
            return Ok(ScalingFunction::table(values)?);
        }
        return Ok(scaling::load_psi(&text)?);
    }
    Ok(scaling::parse_psi_shorthand(arg)?)
}

fn print_json(value: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Prints a linear value, falling back to `exp(x)` notation past f64 range.
fn fmt_ln_scale(ln: f64) -> String {
    if ln < 700.0 {
        format!("{}", ln.exp())
    } else {
        format!("exp({ln})")
    }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Map { action } => match action {
            MapAction::Check(args) => {
                let map = load_map_arg(&args.map)?;
                let report = validate_hypotheses(&map, args.samples, args.branches);
                print_json(&json!({
                    "config": {
                        "subcommand": "map check",
                        "map": args.map,
                        "samples": args.samples,
                        "branches": args.branches,
                        "seed": seed,
                    },
                    "gamma": map.gamma,
                    "C": map.distortion,
                    "parabolic": report.parabolic,
                    "all_pass": report.all_pass(),
                    "blocks_spectra": report.blocks_spectra(),
                    "hypotheses": report.checks,
                }))
            }
        },
        Command::Orbit(args) => {
            let map = load_map_arg(&args.map)?;
            let x = parse_rat(&args.x).map_err(|e| anyhow!(e))?;
            let record = coding::encode(&map, &x, args.depth)?;
            match args.format {
                Format::Json => print_json(&json!({
                    "config": {
                        "subcommand": "orbit",
                        "map": args.map, "x": args.x, "depth": args.depth, "seed": seed,
                    },
                    "digits": record.word.to_string(),
                    "orbit": record.orbit.iter().map(format_rat).collect::<Vec<_>>(),
                    "derivative_logs": record.derivative_logs,
                })),
                Format::Csv => {
                    let mut out = std::io::stdout().lock();
                    writeln!(out, "k,point,digit,ln_derivative")?;
                    for (k, point) in record.orbit.iter().enumerate() {
                        writeln!(
                            out,
                            "{},{},{},{}",
                            k,
                            format_rat(point),
                            record.word.digits()[k],
                            record.derivative_logs[k]
                        )?;
                    }
                    Ok(())
                }
            }
        }
        Command::Code(args) => {
            let map = load_map_arg(&args.map)?;
            let x = parse_rat(&args.x).map_err(|e| anyhow!(e))?;
            let record = coding::encode(&map, &x, args.depth)?;
            println!("{}", record.word);
            Ok(())
        }
        Command::Cylinder(args) => {
            let map = load_map_arg(&args.map)?;
            let words: Vec<DigitWord> = args
                .word
                .iter()
                .map(|w| DigitWord::parse(w).map_err(|e| anyhow!(e)))
                .collect::<Result<_>>()?;
            // Batch evaluation in parallel, output strictly in input order.
            let rows: Vec<Result<String>> = words
                .par_iter()
                .map(|word| {
                    let cyl = coding::cylinder(&map, word)?;
                    Ok(format!(
                        "\"{}\",{},{},{},{},{}",
                        cyl.word,
                        format_rat(&cyl.lo),
                        format_rat(&cyl.hi),
                        format_rat(&cyl.diameter),
                        format_rat(&cyl.bound_lo),
                        format_rat(&cyl.bound_hi),
                    ))
                })
                .collect();
            let mut out = std::io::stdout().lock();
            writeln!(out, "word,lo,hi,diameter,bound_lo,bound_hi")?;
            for row in rows {
                writeln!(out, "{}", row?)?;
            }
            Ok(())
        }
        Command::Exponent(args) => {
            let map = load_map_arg(&args.map)?;
            let x = parse_rat(&args.x).map_err(|e| anyhow!(e))?;
            let trace = exponents::trace(&map, &x, args.depth)?;
            let fast = match &args.psi {
                Some(spec) => {
                    let psi = load_psi_arg(spec)?;
                    Some(exponents::fast_exponent_partials(&trace, &psi)?)
                }
                None => None,
            };
            let mut out = std::io::stdout().lock();
            writeln!(
                out,
                "n,log_deriv_sum,digit_log_sum,lyapunov_partial,fast_partial"
            )?;
            for n in 1..=trace.depth() {
                let fast_col = fast
                    .as_ref()
                    .map(|f| f.values[n - 1].to_string())
                    .unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    n,
                    trace.log_deriv_sum[n - 1],
                    trace.digit_log_sum[n - 1],
                    trace.lyapunov_partial(n),
                    fast_col
                )?;
            }
            Ok(())
        }
        Command::Scaling(args) => {
            let psi = load_psi_arg(&args.psi)?;
            let window = args.window.unwrap_or((args.horizon / 4).max(1));
            let mut inv = scaling::invariants(&psi, args.horizon, window)?;
            if args.xi {
                inv.xi = Some(scaling::xi(&psi, args.horizon, window)?);
            }
            print_json(&json!({
                "config": {
                    "subcommand": "scaling",
                    "psi": args.psi, "horizon": args.horizon, "window": window, "seed": seed,
                },
                "invariants": inv,
                "analytic": psi.analytic_invariants().map(|(b, cap, beta)| json!({
                    "b": b, "B": cap, "beta": beta,
                })),
            }))
        }
        Command::Spectrum(args) => {
            let map = load_map_arg(&args.map)?;
            let report = validate_hypotheses(&map, 8, 32);
            if report.blocks_spectra() && !args.force {
                bail!(
                    "hypothesis validation failed for {} (rerun with --force to override)",
                    args.map
                );
            }
            let psi = load_psi_arg(&args.psi)?;
            let window = args.window.unwrap_or((args.horizon / 4).max(1));

            // Closed-form families carry exact limit invariants; tables fall
            // back to horizon-truncated estimates (running extremes for the
            // limsups, tail window for the liminf).
            let (low_b, cap_b, beta, superlinear, provenance) =
                match (psi.analytic_invariants(), psi.analytic_superlinear()) {
                    (Some((b, cap, beta)), Some(sl)) => (b, cap, beta, sl, "analytic"),
                    _ => {
                        let inv = scaling::invariants(&psi, args.horizon, window)?;
                        (
                            inv.low_b.window,
                            inv.cap_b.running,
                            inv.beta.running,
                            inv.superlinear,
                            "estimated",
                        )
                    }
                };
            let equiv = scaling::is_equivalent_increasing(&psi, args.horizon.max(8), 0.01)?.0;
            let query = SpectrumQuery {
                gamma: map.gamma,
                beta,
                cap_b,
                low_b,
                superlinear,
                equiv_increasing: equiv,
            };
            let alpha = match args.alpha {
                AlphaArg::Zero => AlphaClass::Zero,
                AlphaArg::Finite => AlphaClass::Finite,
                AlphaArg::Inf => AlphaClass::Infinite,
            };
            let which = match args.which {
                WhichArg::Fast => SpectrumKind::Fast,
                WhichArg::Upper => SpectrumKind::Upper,
                WhichArg::Lower => SpectrumKind::Lower,
            };
            let value = spectra::upper_lower_spectrum(&query, which, alpha)?;
            let dimension = match value.dimension {
                Dimension::Value(v) => json!(v),
                Dimension::EmptyLevelSet => json!("empty level set"),
            };
            print_json(&json!({
                "config": {
                    "subcommand": "spectrum",
                    "map": args.map, "psi": args.psi,
                    "alpha": match args.alpha {
                        AlphaArg::Zero => "0",
                        AlphaArg::Finite => "finite",
                        AlphaArg::Inf => "inf",
                    },
                    "which": match args.which {
                        WhichArg::Fast => "fast",
                        WhichArg::Upper => "upper",
                        WhichArg::Lower => "lower",
                    },
                    "horizon": args.horizon, "window": window, "seed": seed,
                },
                "dimension": dimension,
                "formula": value.formula,
                "gamma": map.gamma,
                "invariants": {
                    "b": low_b, "B": cap_b, "beta": beta,
                    "superlinear": superlinear,
                    "equiv_increasing": equiv,
                    "provenance": provenance,
                },
                "continuous_at_infinity": spectra::continuous_at_infinity(beta, cap_b, 1e-9),
            }))
        }
        Command::Gpsi(args) => {
            let psi = load_psi_arg(&args.psi)?;
            let result = match args.method {
                MethodArg::Simple => construct::gpsi_simple(&psi, args.epsilon, args.horizon)?,
                MethodArg::Appendix => construct::gpsi_blockwise(&psi, args.epsilon, args.horizon)?,
            };
            let summary = json!({
                "config": {
                    "subcommand": "gpsi",
                    "psi": args.psi, "epsilon": args.epsilon,
                    "horizon": args.horizon,
                    "method": match args.method {
                        MethodArg::Simple => "simple",
                        MethodArg::Appendix => "appendix",
                    },
                    "seed": seed,
                },
                "case": format!("{:?}", result.case),
                "b_hat": result.b_hat,
                "partial": result.partial,
                "contacts": result.contacts,
                "crossovers": result.crossovers,
            });
            match args.format {
                Format::Json => print_json(&summary),
                Format::Csv => {
                    let mut out = std::io::stdout().lock();
                    writeln!(out, "n,psi,g_psi,contact,ratio")?;
                    let contacts: std::collections::HashSet<usize> =
                        result.contacts.iter().copied().collect();
                    for n in 1..=result.horizon() {
                        let ratio = if n < result.horizon() {
                            (result.ln_g(n + 1) - result.ln_g(n)).exp().to_string()
                        } else {
                            String::new()
                        };
                        writeln!(
                            out,
                            "{},{},{},{},{}",
                            n,
                            fmt_ln_scale(psi.ln_value(n)?),
                            fmt_ln_scale(result.ln_g(n)),
                            u8::from(contacts.contains(&n)),
                            ratio
                        )?;
                    }
                    // Summary goes to stderr so stdout stays pure CSV.
                    eprintln!("{summary}");
                    Ok(())
                }
            }
        }
        Command::Eset { action } => match action {
            EsetAction::Digits(args) => {
                let s = SeqSpec::parse(&args.s)?;
                let t = match &args.t {
                    Some(t) => SeqSpec::parse(t)?,
                    None => s.clone(),
                };
                let pair = SequencePair::new(s, t);
                let rule = match args.rule {
                    RuleArg::Smallest => DigitRule::Smallest,
                    RuleArg::Midpoint => DigitRule::Midpoint,
                };
                let word = construct::e_set_digits(&pair, args.depth, rule)?;
                for digit in word.digits() {
                    println!("{digit}");
                }
                Ok(())
            }
            EsetAction::Dim(args) => {
                let map = load_map_arg(&args.map)?;
                let s = SeqSpec::parse(&args.s)?;
                let t = match &args.t {
                    Some(t) => SeqSpec::parse(t)?,
                    None => s.clone(),
                };
                let pair = SequencePair::new(s, t);
                let tree =
                    dimension::enumerate_basic_intervals(&map, &pair, args.depth, args.digit_cap)?;
                let lower = dimension::nested_lower_bound(&tree.ln_m(), &tree.ln_gaps())?;
                let upper = dimension::cover_upper(&tree.ln_counts(), &tree.ln_max_diameters())?;
                let formula =
                    dimension::e_set_dimension_formula(&pair, map.gamma, args.formula_horizon)?;
                if args.csv {
                    let mut out = std::io::stdout().lock();
                    writeln!(out, "n,m_n,min_gap,max_diam")?;
                    for level in &tree.levels {
                        writeln!(
                            out,
                            "{},{},{},{}",
                            level.n,
                            level.m,
                            format_rat(&level.min_gap),
                            format_rat(&level.max_diameter),
                        )?;
                    }
                }
                print_json(&json!({
                    "config": {
                        "subcommand": "eset dim",
                        "map": args.map, "s": args.s, "t": args.t,
                        "depth": args.depth,
                        "formula_horizon": args.formula_horizon,
                        "digit_cap": args.digit_cap, "seed": seed,
                    },
                    "measured": {
                        "levels": tree.levels.iter().map(|l| json!({
                            "n": l.n,
                            "m": l.m,
                            "count": l.count,
                            "min_gap": to_f64(&l.min_gap),
                            "max_diameter": to_f64(&l.max_diameter),
                            "gap_bound": to_f64(&l.gap_bound),
                            "gap_dominates_bound": l.min_gap >= l.gap_bound,
                        })).collect::<Vec<_>>(),
                        "theta": tree.theta,
                        "lower_estimate": lower.final_value,
                        "upper_estimate": upper.final_value,
                    },
                    "formula": {
                        "windowed_min": formula.windowed_min,
                        "running_min": formula.running_min,
                        "final_value": formula.final_value,
                        "horizon": args.formula_horizon,
                    },
                }))
            }
        },
        Command::Dset(args) => {
            let mode = if args.mode == "eventually" {
                DsetMode::Eventually
            } else if let Some(list) = args.mode.strip_prefix("io:") {
                let subseq: Vec<usize> = list
                    .split(',')
                    .map(|v| v.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .context("parsing io: subsequence")?;
                DsetMode::InfinitelyOften(subseq)
            } else {
                bail!("mode must be 'eventually' or 'io:<n1,n2,...>'");
            };
            let word = construct::d_set_digits(args.b, args.c, args.depth, mode)?;
            for digit in word.digits() {
                println!("{digit}");
            }
            Ok(())
        }
        Command::CountOracle(args) => {
            let result = dimension::count_product_tuples(args.n, args.k)?;
            print_json(&json!({
                "config": {
                    "subcommand": "count-oracle",
                    "n": args.n, "k": args.k, "seed": seed,
                },
                "count": result.count.to_string(),
                "bound": result.bound,
                "within_bound": (result.count as f64) <= result.bound,
            }))
        }
    }
}
