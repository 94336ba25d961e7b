//! `gdl`: command-line harness over the Gauss diagram engine.
//!
//! Exit codes: 0 when every check passes, 1 when a property is violated
//! (a replayable witness is printed), 2 on bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gdl_core::harness::{self, SearchOptions, WalkOptions};
use gdl_core::invariant::FonepConfig;
use gdl_core::render::{render_svg, RenderOptions};
use gdl_core::{
    apply_move, build_dl, build_dln, build_du, classify_locality, enumerate_sites, evaluate_bracket, parse_gauss_code,
    parse_pattern, ArrowPattern, Exec, GaussDiagram, Locality, MoveKind,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "gdl", version, about = "Gauss diagram formulas and Reidemeister move experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Run samples on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LocalityArg {
    Single,
    Two,
}

impl From<LocalityArg> for Locality {
    fn from(l: LocalityArg) -> Self {
        match l {
            LocalityArg::Single => Locality::SingleComponent,
            LocalityArg::Two => Locality::TwoComponent,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate <pattern, diagram>.
    Eval {
        #[arg(long, default_value = "builtin:fonep")]
        pattern: String,
        #[arg(long)]
        diagram: String,
    },
    /// Evaluate the invariant λ on a diagram.
    Invariant {
        #[arg(long)]
        diagram: String,
    },
    /// List the sites of a move kind, numbered for `move --site`.
    Sites {
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        kind: String,
    },
    /// Apply a move at the numbered site and print the result.
    Move {
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        site: usize,
    },
    /// Random walk over the allowed moves, checking the value stays put.
    Walk {
        #[arg(long, default_value = "builtin:DL")]
        diagram: String,
        #[arg(long, default_value = "builtin:fonep")]
        pattern: String,
        /// Comma separated kinds; `O1*`, `O2*`, `O3*` and `*` expand.
        #[arg(long, default_value = "O1*,O3*")]
        kind: String,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, env = "GDL_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum)]
        locality: Option<LocalityArg>,
        /// Largest diagram the walk may grow to (default: start + 8 arrows).
        #[arg(long)]
        max_arrows: Option<usize>,
    },
    /// Value differences per move kind and locality over random instances.
    Table1 {
        #[arg(long, default_value = "builtin:fonep")]
        pattern: String,
        #[arg(long, default_value_t = 300)]
        samples: usize,
        #[arg(long, env = "GDL_SEED", default_value_t = 1)]
        seed: u64,
    },
    /// Values on the bigon chain family D_L(1..n).
    Family {
        #[arg(long, default_value = "builtin:fonep")]
        pattern: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Check each Ω3 variant against its Ω2, Ω3, Ω2 decomposition.
    CheckDecomposition {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, env = "GDL_SEED", default_value_t = 1)]
        seed: u64,
    },
    /// Search small pattern configurations for the invariant's constraints.
    SearchConfig {
        #[arg(long, default_value_t = 3)]
        max_arrows: usize,
        #[arg(long, default_value_t = 40)]
        trials: usize,
        #[arg(long, env = "GDL_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        no_lemma_filter: bool,
    },
    /// Draw a diagram as SVG.
    Render {
        #[arg(long)]
        diagram: String,
        #[arg(long, default_value_t = 640)]
        width: u32,
        #[arg(long, default_value_t = 320)]
        height: u32,
        #[arg(long)]
        no_labels: bool,
        /// Comma separated arrow labels to draw in red.
        #[arg(long, value_delimiter = ',')]
        highlight: Vec<u32>,
    },
}

/// Bad input: reported and mapped to exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn read_reference(r: &str) -> Result<Option<String>, InputError> {
    let path = Path::new(r);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| InputError(format!("{r}: {e}")))?;
        return Ok(Some(text.trim().to_string()));
    }
    Ok(None)
}

fn resolve_diagram(r: &str) -> Result<GaussDiagram, InputError> {
    if let Some(name) = r.strip_prefix("builtin:") {
        return match name {
            "DU" => Ok(build_du()),
            "DL" => Ok(build_dl()),
            _ => {
                let n = name
                    .strip_prefix("DL(")
                    .and_then(|s| s.strip_suffix(')'))
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| InputError(format!("unknown builtin diagram `{name}`")))?;
                Ok(build_dln(n))
            }
        };
    }
    let text = read_reference(r)?.unwrap_or_else(|| r.to_string());
    Ok(parse_gauss_code(&text)?)
}

fn resolve_pattern(r: &str) -> Result<ArrowPattern, InputError> {
    if let Some(name) = r.strip_prefix("builtin:") {
        return match name {
            "fonep" => Ok(FonepConfig::fonep().pattern()),
            "fonem" => Ok(FonepConfig::fonem().pattern()),
            _ => Err(InputError(format!("unknown builtin pattern `{name}`"))),
        };
    }
    let text = read_reference(r)?.unwrap_or_else(|| r.to_string());
    Ok(parse_pattern(&text)?)
}

fn parse_kind(s: &str) -> Result<MoveKind, InputError> {
    Ok(s.parse::<MoveKind>()?)
}

/// What a command produced: text, the matching JSON, and whether it passed.
struct Outcome {
    text: String,
    json: serde_json::Value,
    passed: bool,
}

impl Outcome {
    fn ok(text: String, json: serde_json::Value) -> Self {
        Outcome { text, json, passed: true }
    }
}

fn run(command: Command, exec: Exec) -> Result<Outcome, InputError> {
    match command {
        Command::Eval { pattern, diagram } => {
            let v = evaluate_bracket(&resolve_pattern(&pattern)?, &resolve_diagram(&diagram)?)?;
            Ok(Outcome::ok(format!("{v}\n"), json!(v)))
        }
        Command::Invariant { diagram } => {
            let v = evaluate_bracket(&FonepConfig::fonep().pattern(), &resolve_diagram(&diagram)?)?;
            Ok(Outcome::ok(format!("{v}\n"), json!(v)))
        }
        Command::Sites { diagram, kind } => {
            let d = resolve_diagram(&diagram)?;
            let kind = parse_kind(&kind)?;
            let sites = enumerate_sites(&d, kind);
            let mut text = String::new();
            let mut rows = Vec::new();
            for (i, s) in sites.iter().enumerate() {
                let loc = classify_locality(&d, *s);
                text.push_str(&format!("{i}\t{s}\t{loc}\n"));
                rows.push(json!({ "index": i, "site": s, "locality": loc.to_string() }));
            }
            Ok(Outcome::ok(text, json!({ "kind": kind, "sites": rows })))
        }
        Command::Move { diagram, kind, site } => {
            let d = resolve_diagram(&diagram)?;
            let kind = parse_kind(&kind)?;
            let sites = enumerate_sites(&d, kind);
            let s = *sites
                .get(site)
                .ok_or_else(|| InputError(format!("site index {site} out of range: {kind} has {} sites", sites.len())))?;
            let after = apply_move(&d, kind, s)?;
            let loc = classify_locality(&d, s);
            Ok(Outcome::ok(
                format!("{after}\n"),
                json!({ "before": d, "kind": kind, "site": s, "locality": loc.to_string(), "after": after }),
            ))
        }
        Command::Walk { diagram, pattern, kind, steps, seed, locality, max_arrows } => {
            if steps == 0 {
                return Err(InputError("--steps must be at least 1".into()));
            }
            let opts = WalkOptions {
                kinds: MoveKind::parse_list(&kind)?,
                steps,
                seed,
                locality: locality.map(Locality::from),
                max_arrows,
            };
            let report = harness::walk(&resolve_diagram(&diagram)?, &resolve_pattern(&pattern)?, &opts);
            let mut text = format!(
                "start {}\nsteps {}{}\nvalues {}\n",
                report.start,
                report.steps_taken,
                if report.ended_early { " (no applicable move, ended early)" } else { "" },
                summarize_trace(&report.trace)
            );
            if let Some(w) = &report.violation {
                text.push_str(&format!(
                    "VIOLATION at step {}: {} at {} ({}) changed {} -> {}\n  before {}\n  after  {}\n",
                    report.steps_taken, w.instance.kind, w.instance.site, w.instance.locality, w.value_before,
                    w.value_after, w.instance.before, w.instance.after
                ));
            }
            let passed = report.violation.is_none();
            Ok(Outcome { text, json: serde_json::to_value(&report)?, passed })
        }
        Command::Table1 { pattern, samples, seed } => {
            if samples == 0 {
                return Err(InputError("--samples must be at least 1".into()));
            }
            let t = harness::table1(&resolve_pattern(&pattern)?, samples, seed, exec);
            let mut text = format!("{:<6} {:<16} {:>7}  {:<6} differences\n", "kind", "locality", "samples", "claim");
            for r in &t.rows {
                let loc = r.locality.map_or("any".to_string(), |l| l.to_string());
                let diffs: Vec<String> = r.differences.iter().map(|(d, c)| format!("{d:+}x{c}")).collect();
                let claim = if r.expect_zero { "0" } else { "-" };
                let flag = if r.expect_zero && !r.all_zero() { "  FAIL" } else { "" };
                text.push_str(&format!(
                    "{:<6} {:<16} {:>7}  {:<6} {}{flag}\n",
                    r.kind.to_string(),
                    loc,
                    r.samples,
                    claim,
                    diffs.join(" ")
                ));
            }
            let chain: Vec<String> = t.chain.iter().map(|(n, d)| format!("{n}:{d:+}")).collect();
            text.push_str(&format!("chain site differences {}\n", chain.join(" ")));
            text.push_str(&format!(
                "zeros hold: {}\nsingle-component O2 changes: {}\nchain -1 everywhere: {}\n",
                t.zeros_hold, t.single_component_nonzero, t.chain_holds
            ));
            for r in t.rows.iter().filter(|r| r.expect_zero && !r.all_zero()) {
                if let Some(w) = &r.witness {
                    text.push_str(&format!(
                        "witness {} at {}: {} -> {}\n  {}\n",
                        w.instance.kind, w.instance.site, w.value_before, w.value_after, w.instance.before
                    ));
                }
            }
            let passed = t.passed();
            Ok(Outcome { text, json: serde_json::to_value(&t)?, passed })
        }
        Command::Family { pattern, n } => {
            if n == 0 {
                return Err(InputError("--n must be at least 1".into()));
            }
            let f = harness::family(&resolve_pattern(&pattern)?, n);
            let text: String = f.values.iter().map(|(n, v)| format!("{n}\t{v}\n")).collect();
            Ok(Outcome { text, json: serde_json::to_value(&f)?, passed: f.passed })
        }
        Command::CheckDecomposition { samples, seed } => {
            if samples == 0 {
                return Err(InputError("--samples must be at least 1".into()));
            }
            let r = harness::check_decomposition(samples, seed, exec);
            let mut text = format!(
                "{:<8} {:>7} {:>8} {:>8} {:>9} {:>3} {:>8}\n",
                "variant", "samples", "coherent", "forward", "locality", "k", "expected"
            );
            for v in &r.variants {
                text.push_str(&format!(
                    "O3{:<6} {:>7} {:>8} {:>8} {:>9} {:>3} {:>8}\n",
                    v.variant, v.samples, v.coherent, v.forward, v.locality_coherent, v.table_k, v.expected_k
                ));
            }
            for v in &r.variants {
                if let Some(f) = &v.failure {
                    text.push_str(&format!("O3{} fails at {}: {}\n  {}\n", v.variant, f.site, f.error, f.diagram));
                }
            }
            text.push_str(if r.passed { "PASS\n" } else { "FAIL\n" });
            Ok(Outcome { text, json: serde_json::to_value(&r)?, passed: r.passed })
        }
        Command::SearchConfig { max_arrows, trials, seed, no_lemma_filter } => {
            let opts = SearchOptions { max_arrows, trials, seed, lemma_filter: !no_lemma_filter };
            let r = harness::search_valid_configs(&opts, exec);
            let mut text = format!("candidates {}\n", r.candidates);
            for (k, v) in &r.pool {
                text.push_str(&format!("pool {k} {v}\n"));
            }
            for (k, v) in &r.passing_each {
                text.push_str(&format!("passing {k} {v}\n"));
            }
            text.push_str(&format!("valid {}\n", r.valid.len()));
            for c in &r.valid {
                text.push_str(&format!("  {}\n", c.pattern()));
            }
            text.push_str(&format!("default {} included: {}\n", r.default_report.pattern, r.default_included));
            if let Some(w) = &r.default_report.witness {
                text.push_str(&format!(
                    "default fails: {} at {} ({}) {} -> {}\n  {}\n",
                    w.instance.kind, w.instance.site, w.instance.locality, w.value_before, w.value_after,
                    w.instance.before
                ));
            }
            let passed = !r.valid.is_empty() && r.default_included;
            Ok(Outcome { text, json: serde_json::to_value(&r)?, passed })
        }
        Command::Render { diagram, width, height, no_labels, highlight } => {
            let d = resolve_diagram(&diagram)?;
            let mut opts = RenderOptions::new(width, height)?;
            opts.show_labels = !no_labels;
            opts.highlight = highlight.into_iter().collect();
            let svg = render_svg(&d, &opts);
            Ok(Outcome::ok(svg.clone(), json!({ "diagram": d, "svg": svg })))
        }
    }
}

/// Run-length summary, e.g. `-1x1001` or `0x3 1x2`.
fn summarize_trace(trace: &[i64]) -> String {
    let mut runs: Vec<(i64, usize)> = Vec::new();
    for &v in trace {
        match runs.last_mut() {
            Some((last, n)) if *last == v => *n += 1,
            _ => runs.push((v, 1)),
        }
    }
    runs.iter().map(|(v, n)| format!("{v}x{n}")).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.common.sequential { Exec::Sequential } else { Exec::Parallel };
    let outcome = match run(cli.command, exec) {
        Ok(o) => o,
        Err(InputError(msg)) => {
            eprintln!("gdl: {msg}");
            return ExitCode::from(2);
        }
    };
    let body = if cli.common.json {
        let mut s = serde_json::to_string_pretty(&outcome.json).expect("reports serialize");
        s.push('\n');
        s
    } else {
        outcome.text
    };
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = fs::write(path, body) {
                eprintln!("gdl: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
