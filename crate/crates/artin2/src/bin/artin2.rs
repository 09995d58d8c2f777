// SPDX-License-Identifier: Apache-2.0

//! Command-line surface: exact densities, certified constants, truncated
//! oracles, prime-range counts, and recurrence classification, with
//! machine-readable JSON or aligned text output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use artin2::density::{c_torsionfree, delta_exact, smn_closed};
use artin2::empirics::{count_range, dump_observations, per_q_fraction};
use artin2::error::{Error, Result};
use artin2::oracle::{delta_truncated, smn_truncated, TruncationWindow};
use artin2::rational::{classify_pair, discriminant, NonzeroRational};
use artin2::recurrences::{
    classify, parse_big_rational, prime_divisors_of_sequence, DensityOutcome, PairReduction,
    RecurrenceKind, RecurrenceSpec,
};
use artin2::constants;

#[derive(Parser)]
#[command(
    name = "artin2",
    version,
    about = "Density toolkit for primes p with b mod p in the subgroup generated by a mod p"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for parallel scans; 0 uses all cores. Never
    /// changes output bytes.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Zeta-series evaluation with certified digits.
    Series,
    /// Direct Euler product over primes with an explicit tail bound.
    Product,
}

#[derive(Subcommand)]
enum Command {
    /// Print the universal constant S = prod (1 - p/(p^3-1)).
    Constant {
        /// Decimal digits after the point (certified for the series
        /// method).
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
        digits: u64,
        #[arg(long, value_enum, default_value_t = Method::Series)]
        method: Method,
        /// Prime bound for the product method (default 10^6).
        #[arg(long)]
        prime_bound: Option<u64>,
        /// Also print the classical constant A = prod (1 - 1/(p(p-1))).
        #[arg(long)]
        artin: bool,
    },
    /// Exact density data for a pair of rationals.
    Density {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Exact membership counts over a prime range.
    Count {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 7)]
        min: u64,
        #[arg(long, default_value_t = 500_000)]
        max: u64,
        /// Write per-prime observations as CSV to this path.
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Report the local index statistic at prime q (repeatable).
        #[arg(long = "per-q")]
        per_q: Vec<u64>,
    },
    /// Truncated double sum against the closed form for a pair.
    Oracle {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 300)]
        i_max: u32,
        #[arg(long, default_value_t = 3000)]
        j_max: u32,
    },
    /// Closed form of the lattice sum S_(m,n), optionally cross-checked
    /// by truncation.
    Smn {
        m: u64,
        n: u64,
        /// Truncation window "I J" for the numerical cross-check.
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        truncate: Option<Vec<u32>>,
    },
    /// Classify x_{k+2} = r x_{k+1} - s x_k and reduce it to a pair.
    Recur {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, allow_hyphen_values = true)]
        x1: String,
        /// List primes dividing some term x_n, n <= n-max (default 500
        /// when only --prime-bound is given).
        #[arg(long)]
        n_max: Option<u64>,
        /// Bound for listed divisor primes (default 10000 when only
        /// --n-max is given).
        #[arg(long)]
        prime_bound: Option<u64>,
    },
}

struct Output {
    command: &'static str,
    inputs: Value,
    result: Value,
    text: Vec<String>,
    warnings: Vec<String>,
}

/// Print one line to stdout. A reader that closes the pipe early
/// (`artin2 ... | head`) ends the program quietly instead of panicking.
fn print_line(line: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = writeln!(out, "{line}") {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(1);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // Ignore failure: the global pool can already be set in-process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    let format = cli.format;
    let name = command_name(&cli.command);
    match run(cli.command) {
        Ok(out) => {
            match format {
                Format::Json => {
                    let doc = json!({
                        "command": out.command,
                        "inputs": out.inputs,
                        "result": out.result,
                        "warnings": out.warnings,
                    });
                    print_line(&serde_json::to_string_pretty(&doc).expect("serializable"));
                }
                Format::Text => {
                    for line in &out.text {
                        print_line(line);
                    }
                    for w in &out.warnings {
                        print_line(&format!("warning: {w}"));
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            match format {
                Format::Json => {
                    let doc = json!({
                        "command": name,
                        "error": { "code": error_code(&e), "message": e.to_string() },
                    });
                    print_line(&serde_json::to_string_pretty(&doc).expect("serializable"));
                }
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::FAILURE
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Constant { .. } => "constant",
        Command::Density { .. } => "density",
        Command::Count { .. } => "count",
        Command::Oracle { .. } => "oracle",
        Command::Smn { .. } => "smn",
        Command::Recur { .. } => "recur",
    }
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::FactorizationFailure(_) => "factorization_failure",
        Error::DependentPair => "dependent_pair",
        Error::NotTorsionfree(_) => "not_torsionfree",
        Error::SquareInput => "square_input",
        Error::UnsupportedResidue(_) => "unsupported_residue",
        Error::NotDivisor { .. } => "not_divisor",
        Error::CeilingExceeded { .. } => "ceiling_exceeded",
        Error::BadReduction { .. } => "bad_reduction",
        Error::SinkFailure(_) => "sink_failure",
        Error::DegenerateSystem => "degenerate_system",
        Error::ValueOutOfRange(_) => "value_out_of_range",
        Error::InvalidInput(_) => "invalid_input",
    }
}

fn run(command: Command) -> Result<Output> {
    match command {
        Command::Constant {
            digits,
            method,
            prime_bound,
            artin,
        } => cmd_constant(digits as usize, method, prime_bound, artin),
        Command::Density { a, b } => cmd_density(&a, &b),
        Command::Count {
            a,
            b,
            min,
            max,
            dump,
            per_q,
        } => cmd_count(&a, &b, min, max, dump, &per_q),
        Command::Oracle { a, b, i_max, j_max } => cmd_oracle(&a, &b, i_max, j_max),
        Command::Smn { m, n, truncate } => cmd_smn(m, n, truncate),
        Command::Recur {
            r,
            s,
            x0,
            x1,
            n_max,
            prime_bound,
        } => cmd_recur(&r, &s, &x0, &x1, n_max, prime_bound),
    }
}

fn parse_pair(a: &str, b: &str) -> Result<(NonzeroRational, NonzeroRational)> {
    Ok((a.parse()?, b.parse()?))
}

/// Group fractional digits in blocks of five, the usual table layout for
/// long decimal constants.
fn group_digits(value: &str) -> String {
    match value.split_once('.') {
        None => value.to_string(),
        Some((int, frac)) => {
            let blocks: Vec<String> = frac
                .as_bytes()
                .chunks(5)
                .map(|c| String::from_utf8_lossy(c).into_owned())
                .collect();
            format!("{int}.{}", blocks.join(" "))
        }
    }
}

fn cmd_constant(
    digits: usize,
    method: Method,
    prime_bound: Option<u64>,
    artin: bool,
) -> Result<Output> {
    let mut text = Vec::new();
    let mut result = serde_json::Map::new();
    let mut warnings = Vec::new();
    let method_name = match method {
        Method::Series => "series",
        Method::Product => "product",
    };
    match method {
        Method::Series => {
            if prime_bound.is_some() {
                warnings.push("--prime-bound is ignored by the series method".into());
            }
            let s = constants::s_digits(digits)?;
            text.push(format!("S to {digits} digits (series, all digits certified)"));
            text.push(group_digits(&s));
            result.insert("value".into(), Value::String(s.clone()));
            result.insert("grouped".into(), Value::String(group_digits(&s)));
            result.insert("digits".into(), json!(digits));
        }
        Method::Product => {
            let bound = prime_bound.unwrap_or(1_000_000);
            let dv = constants::s_product(bound)?;
            text.push(format!("S by Euler product over primes <= {bound}"));
            text.push(dv.digits.clone());
            text.push(format!(
                "not certified to {digits} digits: truncation error <= {:.3e}",
                dv.error_bound
            ));
            result.insert("value".into(), Value::String(dv.digits.clone()));
            result.insert("error_bound".into(), json!(format!("{:.3e}", dv.error_bound)));
            result.insert("prime_bound".into(), json!(bound));
        }
    }
    if artin {
        let bound = prime_bound.unwrap_or(1_000_000);
        let a = constants::artin_a(bound)?;
        text.push(format!("A by Euler product over primes <= {bound}"));
        text.push(a.digits.clone());
        text.push(format!("truncation error <= {:.3e}", a.error_bound));
        result.insert(
            "artin_constant".into(),
            json!({
                "value": a.digits,
                "error_bound": format!("{:.3e}", a.error_bound),
                "prime_bound": bound,
            }),
        );
    }
    Ok(Output {
        command: "constant",
        inputs: json!({ "digits": digits, "method": method_name, "prime_bound": prime_bound, "artin": artin }),
        result: Value::Object(result),
        text,
        warnings,
    })
}

fn cmd_density(a_str: &str, b_str: &str) -> Result<Output> {
    let (a, b) = parse_pair(a_str, b_str)?;
    let class = classify_pair(&a, &b)?;
    if !class.independent {
        return Err(Error::DependentPair);
    }
    let da = discriminant(&a)?;
    let db = discriminant(&b)?;
    let dab = discriminant(&a.mul(&b)?)?;
    let torsion = class.torsion_order.expect("independent pairs carry torsion order");
    let mut text = vec![
        format!("a = {a}, b = {b}"),
        "independent: true".to_string(),
        format!("torsion order: {torsion}"),
        format!("disc(a) = {da}, disc(b) = {db}, disc(ab) = {dab}"),
    ];
    let mut result = json!({
        "a": a.to_string(),
        "b": b.to_string(),
        "independent": true,
        "torsion_order": torsion,
        "disc_a": da.to_string(),
        "disc_b": db.to_string(),
        "disc_ab": dab.to_string(),
    });
    if torsion == 1 {
        let c = c_torsionfree(&a, &b)?;
        let value = delta_exact(&a, &b)?.approx();
        text.push(format!("c = {c}"));
        text.push(format!("delta = c * S = {value:.12}"));
        result["coefficient"] = Value::String(c.to_string());
        result["delta"] = Value::String(format!("{value:.12}"));
    } else {
        text.push("density: out of scope (no closed form when the pair has torsion)".into());
        result["marker"] = Value::String("out_of_scope".into());
    }
    Ok(Output {
        command: "density",
        inputs: json!({ "a": a_str, "b": b_str }),
        result,
        text,
        warnings: Vec::new(),
    })
}

fn cmd_count(
    a_str: &str,
    b_str: &str,
    min: u64,
    max: u64,
    dump: Option<PathBuf>,
    per_q: &[u64],
) -> Result<Output> {
    let (a, b) = parse_pair(a_str, b_str)?;
    let report = count_range(&a, &b, min, max)?;
    let mut text = vec![
        format!("pair ({a}, {b}), primes in [{min}, {max}]"),
        format!("primes considered: {}", report.primes_considered),
        format!("members: {}", report.members),
        format!("skipped: {}", report.skipped),
        format!("observed ratio: {:.10}", report.observed_ratio),
    ];
    match (&report.predicted_coefficient, report.predicted_value) {
        (Some(c), Some(v)) => {
            text.push(format!("predicted c: {c}"));
            text.push(format!("predicted value: {v:.10}"));
        }
        _ => text.push("predicted: none (pair is dependent or has torsion)".into()),
    }
    text.push(format!("ratio / S: {:.10}", report.ratio_over_s));
    let mut result = report.to_json();

    if !per_q.is_empty() {
        let mut rows = Vec::new();
        for &q in per_q {
            let f = per_q_fraction(&a, &b, q, min, max)?;
            text.push(format!(
                "per-q {q}: observed {:.6}, generic {:.6} over {} primes",
                f.observed, f.generic, f.primes_considered
            ));
            rows.push(json!({
                "q": q,
                "observed": format!("{:.10}", f.observed),
                "generic": format!("{:.10}", f.generic),
                "primes_considered": f.primes_considered,
            }));
        }
        result["per_q"] = Value::Array(rows);
    }

    if let Some(path) = dump {
        let file = File::create(&path).map_err(Error::from)?;
        let mut sink = BufWriter::new(file);
        let rows = dump_observations(&a, &b, min, max, &mut sink)?;
        text.push(format!("dump: {rows} rows -> {}", path.display()));
        result["dump"] = json!({ "path": path.display().to_string(), "rows": rows });
    }

    Ok(Output {
        command: "count",
        inputs: json!({ "a": a_str, "b": b_str, "min": min, "max": max, "per_q": per_q }),
        result,
        text,
        warnings: Vec::new(),
    })
}

fn cmd_oracle(a_str: &str, b_str: &str, i_max: u32, j_max: u32) -> Result<Output> {
    let (a, b) = parse_pair(a_str, b_str)?;
    let window = TruncationWindow::new(i_max, j_max)?;
    let exact = delta_exact(&a, &b)?;
    let closed_value = exact.approx();
    let trunc = delta_truncated(&a, &b, window)?;
    let discrepancy = (trunc.value - closed_value).abs();
    let text = vec![
        format!("pair ({a}, {b}), window ({i_max}, {j_max})"),
        format!("closed form: ({}) * S = {closed_value:.12}", exact.coefficient),
        format!("truncated:   {:.12}", trunc.value),
        format!("tail bound:  {:.3e}", trunc.tail_bound),
        format!("discrepancy: {:.3e}", discrepancy),
    ];
    let result = json!({
        "coefficient": exact.coefficient.to_string(),
        "closed_value": format!("{closed_value:.12}"),
        "truncated": format!("{:.12}", trunc.value),
        "tail_bound": format!("{:.3e}", trunc.tail_bound),
        "discrepancy": format!("{:.3e}", discrepancy),
        "within_tail": discrepancy <= trunc.tail_bound,
    });
    Ok(Output {
        command: "oracle",
        inputs: json!({ "a": a_str, "b": b_str, "i_max": i_max, "j_max": j_max }),
        result,
        text,
        warnings: Vec::new(),
    })
}

fn cmd_smn(m: u64, n: u64, truncate: Option<Vec<u32>>) -> Result<Output> {
    let closed = smn_closed(m, n)?;
    let value = closed.approx();
    let mut text = vec![format!(
        "S_({m},{n}) = ({}) * S = {value:.12}",
        closed.coefficient
    )];
    let mut result = json!({
        "m": m,
        "n": n,
        "coefficient": closed.coefficient.to_string(),
        "value": format!("{value:.12}"),
    });
    if let Some(tr) = truncate {
        let window = TruncationWindow::new(tr[0], tr[1])?;
        let t = smn_truncated(m, n, window)?;
        let discrepancy = (t.value - value).abs();
        text.push(format!(
            "truncated over ({}, {}): {:.12}",
            tr[0], tr[1], t.value
        ));
        text.push(format!(
            "tail bound: {:.3e}, discrepancy: {:.3e}",
            t.tail_bound, discrepancy
        ));
        result["truncated"] = json!({
            "i_max": tr[0],
            "j_max": tr[1],
            "value": format!("{:.12}", t.value),
            "tail_bound": format!("{:.3e}", t.tail_bound),
            "discrepancy": format!("{:.3e}", discrepancy),
            "within_tail": discrepancy <= t.tail_bound,
        });
    }
    Ok(Output {
        command: "smn",
        inputs: json!({ "m": m, "n": n }),
        result,
        text,
        warnings: Vec::new(),
    })
}

fn kind_name(kind: RecurrenceKind) -> &'static str {
    match kind {
        RecurrenceKind::NoRationalRoots => "no_rational_roots",
        RecurrenceKind::Inseparable => "inseparable",
        RecurrenceKind::FirstOrder => "first_order",
        RecurrenceKind::DependentPair => "dependent_pair",
        RecurrenceKind::IndependentTorsion => "independent_torsion",
        RecurrenceKind::IndependentTorsionfree => "independent_torsionfree",
    }
}

fn reduction_json(red: &PairReduction) -> Value {
    json!({
        "a1": red.a1.to_string(),
        "a2": red.a2.to_string(),
        "b1": red.b1.to_string(),
        "b2": red.b2.to_string(),
        "a": red.a.to_string(),
        "b": red.b.to_string(),
    })
}

fn cmd_recur(
    r_str: &str,
    s_str: &str,
    x0_str: &str,
    x1_str: &str,
    n_max: Option<u64>,
    prime_bound: Option<u64>,
) -> Result<Output> {
    let spec = RecurrenceSpec::new(
        parse_big_rational(r_str)?,
        parse_big_rational(s_str)?,
        parse_big_rational(x0_str)?,
        parse_big_rational(x1_str)?,
    )?;
    let class = classify(&spec)?;
    let mut text = vec![
        format!(
            "x_(k+2) = {} x_(k+1) - {} x_k, x0 = {}, x1 = {}",
            spec.r, spec.s, spec.x0, spec.x1
        ),
        format!("kind: {}", kind_name(class.kind)),
    ];
    let mut result = json!({ "kind": kind_name(class.kind) });
    if let Some((r1, r2)) = &class.roots {
        text.push(format!("roots: {r1}, {r2}"));
        result["roots"] = json!([r1.to_string(), r2.to_string()]);
    }
    if let Some(red) = &class.reduction {
        text.push(format!(
            "pair: a = {}, b = {}   (a1 = {}, a2 = {}, b1 = {}, b2 = {})",
            red.a, red.b, red.a1, red.a2, red.b1, red.b2
        ));
        result["reduction"] = reduction_json(red);
    }
    if let Some(red) = &class.reduction_swapped {
        text.push(format!("swapped order: a = {}, b = {}", red.a, red.b));
        result["reduction_swapped"] = reduction_json(red);
    }
    match &class.density {
        DensityOutcome::One => {
            text.push("density: 1 (every prime divides some term)".into());
            result["density"] = json!({ "kind": "one" });
        }
        DensityOutcome::Multiple(m) => {
            text.push(format!("density: ({}) * S = {:.12}", m.coefficient, m.approx()));
            result["density"] = json!({
                "kind": "multiple_of_S",
                "coefficient": m.coefficient.to_string(),
                "value": format!("{:.12}", m.approx()),
            });
        }
        DensityOutcome::UnconditionalPositiveUnknownValue => {
            text.push("density: positive (unconditionally), value not computed".into());
            result["density"] = json!({ "kind": "unconditional_positive_unknown_value" });
        }
        DensityOutcome::OutOfScope => {
            text.push("density: out of scope".into());
            result["density"] = json!({ "kind": "out_of_scope" });
        }
    }
    if let Some(note) = &class.note {
        text.push(format!("note: {note}"));
        result["note"] = Value::String(note.clone());
    }
    if n_max.is_some() || prime_bound.is_some() {
        let n = n_max.unwrap_or(500);
        let bound = prime_bound.unwrap_or(10_000);
        let divisors = prime_divisors_of_sequence(&spec, n, bound)?;
        let rendered: Vec<String> = divisors.iter().map(|p| p.to_string()).collect();
        text.push(format!(
            "primes <= {bound} dividing some x_n, n <= {n}: {} found",
            divisors.len()
        ));
        text.push(rendered.join(" "));
        result["divisor_primes"] = json!({
            "n_max": n,
            "prime_bound": bound,
            "count": divisors.len(),
            "primes": divisors,
        });
    }
    Ok(Output {
        command: "recur",
        inputs: json!({
            "r": r_str, "s": s_str, "x0": x0_str, "x1": x1_str,
            "n_max": n_max, "prime_bound": prime_bound,
        }),
        result,
        text,
        warnings: Vec::new(),
    })
}
