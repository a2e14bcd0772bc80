//! Command-line front end: counts, descent polynomials, enumeration
//! streams, the published count table, path bijection inspection, the
//! warehouse packing check, and an OEIS lookup with a local cache.

mod oeis;
mod packing;

use clap::{Parser, Subcommand, ValueEnum};
use diamonds::dyck;
use diamonds::enumerate::{self, Budget, EnumerateError};
use diamonds::gfd::{self, FamilyResult, GfdError, Method};
use diamonds::patterns::PatternSet;
use diamonds::poset::SystemShape;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "diamonds",
    version,
    about = "Count and explore pattern-avoiding labelled diamond posets"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Vertex budget for unpruned (no --avoid) searches.
    #[arg(long, global = true, default_value_t = 16)]
    bound: u32,

    /// Worker threads for brute-force counting: 0 = all cores, 1 = sequential.
    #[arg(long, global = true, default_value_t = 0)]
    parallel: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountMethod {
    /// Route to the best known method.
    Auto,
    /// Force the pruned exhaustive search.
    Brute,
    /// Require a closed form or recursion; fail if only brute force applies.
    Formula,
}

#[derive(Subcommand)]
enum Command {
    /// Number of labellings avoiding the given patterns.
    Count {
        /// Vertices per diamond.
        #[arg(long)]
        v: u32,
        /// Number of full diamonds.
        #[arg(long)]
        d: u32,
        /// Size of a trailing partial diamond (1..=v-1).
        #[arg(long)]
        j: Option<u32>,
        /// Colon-separated patterns, e.g. 231:321. Empty = no restriction.
        #[arg(long, default_value = "")]
        avoid: String,
        #[arg(long, value_enum, default_value_t = CountMethod::Auto)]
        method: CountMethod,
    },
    /// Descent generating function of the avoiders.
    Gfd {
        #[arg(long)]
        v: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long, default_value = "")]
        avoid: String,
    },
    /// Stream every avoider, one per line, in lexicographic order.
    Enumerate {
        #[arg(long)]
        v: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        j: Option<u32>,
        #[arg(long, default_value = "")]
        avoid: String,
    },
    /// The count table for a given v: one row per pattern family.
    Table {
        #[arg(long)]
        v: u32,
        /// Columns d = 1..=dmax.
        #[arg(long)]
        dmax: u32,
        /// Emit descent polynomials instead of counts.
        #[arg(long)]
        gfd: bool,
    },
    /// Generalized Dyck paths with their statistics.
    Dyck {
        #[arg(long)]
        v: u32,
        #[arg(long)]
        d: u32,
        /// Also print each path's image permutation under the bijection.
        #[arg(long)]
        map: bool,
        /// Inspect one path given as a step string like ENNNN instead of
        /// enumerating them all.
        #[arg(long)]
        path: Option<String>,
    },
    /// Check a packing schedule for the heavier-on-lighter hazard.
    PackingCheck {
        /// JSON schedule: {"objects":[{"weight":..,"task_times":[..]},..]}
        file: PathBuf,
    },
    /// Look up a sequence in the OEIS (with a persistent local cache).
    Oeis {
        /// Comma-separated terms to search for.
        #[arg(long, conflicts_with = "id")]
        terms: Option<String>,
        /// A sequence id such as A002294.
        #[arg(long)]
        id: Option<String>,
        /// Cache file path.
        #[arg(long, default_value = ".oeis-cache.json")]
        cache: PathBuf,
    },
}

/// Failures are split by exit code: 2 for bad requests, 1 for searches
/// that hit a bound or an I/O problem.
enum Failure {
    Usage(String),
    Runtime(String),
}

fn usage(msg: impl Display) -> Failure {
    Failure::Usage(msg.to_string())
}

fn runtime(msg: impl Display) -> Failure {
    Failure::Runtime(msg.to_string())
}

impl From<GfdError> for Failure {
    fn from(e: GfdError) -> Self {
        match e {
            GfdError::DomainError(_) => usage(e),
            GfdError::Enumerate(_) => runtime(e),
        }
    }
}

impl From<EnumerateError> for Failure {
    fn from(e: EnumerateError) -> Self {
        runtime(e)
    }
}

fn main() -> ExitCode {
    // die quietly when a pipe closes mid-stream (e.g. `enumerate | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch_command(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Runs the selected command, inside a worker pool sized by --parallel
/// when one was requested (every internal search then inherits it).
fn dispatch_command(cli: &Cli) -> Result<(), Failure> {
    #[cfg(feature = "parallel")]
    if cli.parallel != 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.parallel)
            .build()
            .map_err(|e| runtime(format!("cannot build a {}-thread pool: {e}", cli.parallel)))?;
        return pool.install(|| run_command(cli));
    }
    run_command(cli)
}

fn run_command(cli: &Cli) -> Result<(), Failure> {
    let budget = Budget::with_vertex_bound(cli.bound);
    match &cli.command {
        Command::Count {
            v,
            d,
            j,
            avoid,
            method,
        } => cmd_count(cli, budget, *v, *d, *j, avoid, *method),
        Command::Gfd { v, d, j, avoid } => cmd_gfd(cli, budget, *v, *d, *j, avoid),
        Command::Enumerate { v, d, j, avoid } => cmd_enumerate(cli, budget, *v, *d, *j, avoid),
        Command::Table { v, dmax, gfd } => cmd_table(cli, budget, *v, *dmax, *gfd),
        Command::Dyck { v, d, map, path } => cmd_dyck(cli, budget, *v, *d, *map, path.as_deref()),
        Command::PackingCheck { file } => cmd_packing_check(cli, file),
        Command::Oeis { terms, id, cache } => cmd_oeis(cli, terms.as_deref(), id.as_deref(), cache),
    }
}

fn parse_patterns(avoid: &str) -> Result<PatternSet, Failure> {
    avoid
        .parse()
        .map_err(|e| usage(format!("bad --avoid value {avoid:?}: {e}")))
}

fn parse_shape(v: u32, d: u32, j: Option<u32>) -> Result<SystemShape, Failure> {
    SystemShape::new(v, d, j).map_err(usage)
}

/// Routes a full or partial shape through the dispatcher.
fn route(
    v: u32,
    d: u32,
    j: Option<u32>,
    patterns: &PatternSet,
    budget: &Budget,
) -> Result<FamilyResult, GfdError> {
    match j {
        None => gfd::dispatch(v, d, patterns, budget),
        Some(j) => gfd::dispatch_partial(v, d, j, patterns, budget),
    }
}

fn brute_result(
    shape: &SystemShape,
    patterns: &PatternSet,
    budget: &Budget,
    workers: usize,
) -> Result<FamilyResult, Failure> {
    let poly = enumerate::descent_poly(shape, patterns, budget, workers)?;
    Ok(FamilyResult {
        count: poly.eval_one(),
        poly: Some(poly),
        method: Method::BruteForce,
    })
}

fn cmd_count(
    cli: &Cli,
    budget: Budget,
    v: u32,
    d: u32,
    j: Option<u32>,
    avoid: &str,
    method: CountMethod,
) -> Result<(), Failure> {
    let patterns = parse_patterns(avoid)?;
    let shape = parse_shape(v, d, j)?;
    let result = match method {
        CountMethod::Auto => route(v, d, j, &patterns, &budget)?,
        CountMethod::Brute => brute_result(&shape, &patterns, &budget, 0)?,
        CountMethod::Formula => {
            let r = route(v, d, j, &patterns, &budget)?;
            if r.method == Method::BruteForce {
                return Err(runtime(format!(
                    "no closed form or recursion is known for avoiding {patterns}; \
                     use --method auto or brute"
                )));
            }
            r
        }
    };
    match cli.format {
        Format::Text => println!("{} ({})", result.count, result.method),
        Format::Csv => {
            println!("count,method");
            println!("{},{}", result.count, result.method);
        }
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "count": result.count.to_string(),
                "method": result.method.to_string(),
            })
        ),
    }
    Ok(())
}

fn cmd_gfd(
    cli: &Cli,
    budget: Budget,
    v: u32,
    d: u32,
    j: Option<u32>,
    avoid: &str,
) -> Result<(), Failure> {
    let patterns = parse_patterns(avoid)?;
    let shape = parse_shape(v, d, j)?;
    let mut result = route(v, d, j, &patterns, &budget)?;
    if result.poly.is_none() {
        // only the unrestricted family lacks a routed polynomial
        result = brute_result(&shape, &patterns, &budget, 0)?;
    }
    let poly = result.poly.expect("polynomial is present here");
    match cli.format {
        Format::Text => println!("{poly}"),
        Format::Csv => {
            println!("gfd,count,method");
            println!(
                "{},{},{}",
                csv_quote(&poly.to_string()),
                result.count,
                result.method
            );
        }
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "gfd": poly.to_string(),
                "coeffs": poly.coeff_strings(),
                "count": result.count.to_string(),
                "method": result.method.to_string(),
            })
        ),
    }
    Ok(())
}

fn cmd_enumerate(
    cli: &Cli,
    budget: Budget,
    v: u32,
    d: u32,
    j: Option<u32>,
    avoid: &str,
) -> Result<(), Failure> {
    let patterns = parse_patterns(avoid)?;
    let shape = parse_shape(v, d, j)?;
    let format = cli.format;
    enumerate::for_each_avoider(&shape, &patterns, &budget, |system| match format {
        Format::Text => println!("{}", system.associated_permutation()),
        Format::Csv => {
            let parts: Vec<String> = system
                .associated_permutation()
                .values()
                .iter()
                .map(u32::to_string)
                .collect();
            println!("{}", parts.join(","));
        }
        Format::Json => println!("{}", system.to_json()),
    })?;
    Ok(())
}

/// The published row order: singletons, pairs, triples, with
/// reverse-complement twins listed separately.
const TABLE_FAMILIES: &[(&str, &str)] = &[
    ("∅", ""),
    ("123", "123"),
    ("132", "132"),
    ("213", "213"),
    ("231", "231"),
    ("312", "312"),
    ("321", "321"),
    ("132,213", "132:213"),
    ("132,312", "132:312"),
    ("213,231", "213:231"),
    ("132,321", "132:321"),
    ("213,321", "213:321"),
    ("231,312", "231:312"),
    ("231,321", "231:321"),
    ("312,321", "312:321"),
    ("132,213,321", "132:213:321"),
    ("231,312,321", "231:312:321"),
];

/// A table cell: the value, or a bound marker when the entry is out of
/// reach under the current budget.
fn table_cell(
    v: u32,
    d: u32,
    patterns: &PatternSet,
    budget: &Budget,
    want_gfd: bool,
) -> Option<String> {
    match gfd::dispatch(v, d, patterns, budget) {
        Ok(r) => {
            if !want_gfd {
                return Some(r.count.to_string());
            }
            match r.poly {
                Some(p) => Some(p.to_string()),
                None => {
                    // unrestricted family: brute-force the polynomial when
                    // the budget allows
                    let shape = SystemShape::full(v, d).ok()?;
                    enumerate::descent_poly(&shape, patterns, budget, 0)
                        .ok()
                        .map(|p| p.to_string())
                }
            }
        }
        Err(GfdError::Enumerate(_)) => None,
        Err(GfdError::DomainError(_)) => None,
    }
}

fn cmd_table(cli: &Cli, budget: Budget, v: u32, dmax: u32, want_gfd: bool) -> Result<(), Failure> {
    if v < 4 {
        return Err(usage(format!("table needs v >= 4, got {v}")));
    }
    if dmax < 1 {
        return Err(usage("dmax must be at least 1"));
    }
    let mut rows: Vec<(String, Vec<Option<String>>)> = Vec::new();
    for (label, set) in TABLE_FAMILIES {
        let patterns: PatternSet = set.parse().expect("table families parse");
        let cells: Vec<Option<String>> = (1..=dmax)
            .map(|d| table_cell(v, d, &patterns, &budget, want_gfd))
            .collect();
        rows.push((label.to_string(), cells));
    }
    match cli.format {
        Format::Json => {
            let rows_json: Vec<serde_json::Value> = rows
                .iter()
                .map(|(label, cells)| {
                    serde_json::json!({
                        "patterns": label,
                        "values": cells,
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::json!({
                    "v": v,
                    "dmax": dmax,
                    "cells": if want_gfd { "gfd" } else { "counts" },
                    "rows": rows_json,
                })
            );
        }
        Format::Csv | Format::Text => {
            let sep = if cli.format == Format::Csv { "," } else { "\t" };
            let header: Vec<String> = std::iter::once("patterns".to_string())
                .chain((1..=dmax).map(|d| format!("d{d}")))
                .collect();
            println!("{}", header.join(sep));
            for (label, cells) in rows {
                let mut fields = vec![if cli.format == Format::Csv {
                    csv_quote(&label)
                } else {
                    label
                }];
                for cell in cells {
                    let text = cell.unwrap_or_else(|| "-".to_string());
                    fields.push(if cli.format == Format::Csv && want_gfd && text != "-" {
                        csv_quote_always(&text)
                    } else if cli.format == Format::Csv {
                        csv_quote(&text)
                    } else {
                        text
                    });
                }
                println!("{}", fields.join(sep));
            }
        }
    }
    Ok(())
}

fn cmd_dyck(
    cli: &Cli,
    budget: Budget,
    v: u32,
    d: u32,
    map: bool,
    path: Option<&str>,
) -> Result<(), Failure> {
    if v < 1 || d < 1 {
        return Err(usage("dyck needs v >= 1 and d >= 1"));
    }
    let paths = match path {
        Some(steps) => vec![dyck::LatticePath::parse(v, d, steps).map_err(usage)?],
        None => dyck::enumerate_paths(v, d, budget.max_results).map_err(runtime)?,
    };
    let mut json_rows = Vec::new();
    for path in &paths {
        let stats = path.statistics();
        let image = map.then(|| dyck::phi_map(path).associated_permutation());
        match cli.format {
            Format::Text => {
                let mut line = format!(
                    "{} touchpoints={} corners={} height={}",
                    path.step_string(),
                    stats.touchpoints,
                    stats.corners,
                    stats.height
                );
                if let Some(p) = &image {
                    line.push_str(&format!(" -> {p}"));
                }
                println!("{line}");
            }
            Format::Csv => {
                let mut line = format!(
                    "{},{},{},{}",
                    path.step_string(),
                    stats.touchpoints,
                    stats.corners,
                    stats.height
                );
                if let Some(p) = &image {
                    line.push_str(&format!(",{}", csv_quote_always(&p.to_string())));
                }
                println!("{line}");
            }
            Format::Json => {
                let mut row = serde_json::json!({
                    "steps": path.step_string(),
                    "touchpoints": stats.touchpoints,
                    "corners": stats.corners,
                    "height": stats.height,
                });
                if let Some(p) = &image {
                    row["permutation"] = serde_json::json!(p.values());
                }
                json_rows.push(row);
            }
        }
    }
    if cli.format == Format::Json {
        println!("{}", serde_json::Value::Array(json_rows));
    }
    Ok(())
}

fn cmd_packing_check(cli: &Cli, file: &Path) -> Result<(), Failure> {
    let schedule = packing::load(file).map_err(usage)?;
    let system = packing::to_system(&schedule).map_err(usage)?;
    let verdict = packing::check(&system);
    match cli.format {
        Format::Text => match &verdict {
            packing::Verdict::Safe => println!(
                "safe: avoids 231 and 321 (sufficient condition: no heavier \
                 object is ever stacked on a lighter one)"
            ),
            packing::Verdict::Unsafe {
                pattern,
                positions,
                values,
            } => println!(
                "unsafe: contains {pattern} at positions ({}, {}, {}): values ({}, {}, {})",
                positions[0], positions[1], positions[2], values[0], values[1], values[2]
            ),
        },
        Format::Csv => {
            println!("verdict,pattern,positions,values");
            match &verdict {
                packing::Verdict::Safe => println!("safe,,,"),
                packing::Verdict::Unsafe {
                    pattern,
                    positions,
                    values,
                } => println!(
                    "unsafe,{pattern},{} {} {},{} {} {}",
                    positions[0], positions[1], positions[2], values[0], values[1], values[2]
                ),
            }
        }
        Format::Json => {
            let value = match &verdict {
                packing::Verdict::Safe => serde_json::json!({"verdict": "safe"}),
                packing::Verdict::Unsafe {
                    pattern,
                    positions,
                    values,
                } => serde_json::json!({
                    "verdict": "unsafe",
                    "witness": {
                        "pattern": pattern,
                        "positions": positions,
                        "values": values,
                    }
                }),
            };
            println!("{value}");
        }
    }
    Ok(())
}

fn cmd_oeis(
    cli: &Cli,
    terms: Option<&str>,
    id: Option<&str>,
    cache: &Path,
) -> Result<(), Failure> {
    let query = oeis::normalize_query(terms, id).map_err(usage)?;
    let records = oeis::lookup(&query, cache).map_err(|e| match e {
        oeis::OeisError::Network(msg) => runtime(format!("OEIS fetch failed: {msg}")),
        other => runtime(other.to_string()),
    })?;
    match cli.format {
        Format::Text => {
            for r in &records {
                let shown: Vec<String> = r.terms.iter().take(12).map(i64::to_string).collect();
                println!("{}  {}  {}", r.id, shown.join(","), r.name);
            }
        }
        Format::Csv => {
            println!("id,terms,name");
            for r in &records {
                let shown: Vec<String> = r.terms.iter().take(12).map(i64::to_string).collect();
                println!(
                    "{},{},{}",
                    r.id,
                    csv_quote_always(&shown.join(",")),
                    csv_quote(&r.name)
                );
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = records
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "id": r.id,
                        "terms": r.terms,
                        "name": r.name,
                    })
                })
                .collect();
            println!("{}", serde_json::Value::Array(rows));
        }
    }
    Ok(())
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        csv_quote_always(field)
    } else {
        field.to_string()
    }
}

fn csv_quote_always(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}
