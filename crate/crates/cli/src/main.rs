use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use miflab::bounds::{eval_bounds, eval_bounds_with_pair};
use miflab::constructions::{bg_family_with_limit, complete_family_with_limit, projective_plane};
use miflab::family::{format, DEFAULT_UNIVERSE_LIMIT, MAX_UNIVERSE};
use miflab::isp::{bollobas_sum, extract_isp, validate_isp, SetPairSystem};
use miflab::mif::{chromatic_class, collapse, is_mif, merge, MifVerdict};
use miflab::search::{enumerate_mifs_with, search_isp, SearchConfig, BUDGET_ENV, DEFAULT_BUDGET};
use miflab::transversal::{tau, transversal_family};
use miflab::verify::{verify_paper, VerifyOptions};
use miflab::{Block, Family, MifError};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "miflab", version, about = "Exact computations on maximal intersecting families")]
struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Text, global = true)]
    format: OutputFormat,
    /// Largest accepted universe size.
    #[arg(long, default_value_t = DEFAULT_UNIVERSE_LIMIT, global = true)]
    universe_limit: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Args)]
struct Input {
    /// Family file (JSON or text records); `-` reads standard input.
    path: Option<PathBuf>,
    /// Inline family, blocks separated by `;`, e.g. "0 1; 0 2; 1 2".
    #[arg(long, conflicts_with = "path")]
    family: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a constructed family.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Decide whether a family is a MIF(k).
    CheckMif(Input),
    /// Transversal number.
    Tau(Input),
    /// All minimum transversals.
    Transversals(Input),
    /// Merge point beta into alpha.
    Merge {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        alpha: usize,
        #[arg(long)]
        beta: usize,
    },
    /// Collapse a MIF onto alpha and extract the set-pair system.
    Collapse {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        alpha: usize,
    },
    /// Chromatic number (2 or 3) of an intersecting uniform family.
    Chromatic(Input),
    /// Validate a set-pair system file.
    IspValidate {
        /// Set-pair system JSON; `-` reads standard input.
        path: PathBuf,
    },
    /// Extract an ISP from a minimal subfamily with the same transversal number.
    IspExtract(Input),
    /// Evaluate the bounds table.
    Bounds {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: Option<usize>,
        /// Same as `--format json`.
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive searches.
    Search {
        #[command(subcommand)]
        what: SearchCommand,
    },
    /// Run the full reproduction checklist.
    VerifyPaper {
        /// Skip a group of checks.
        #[arg(long, value_enum)]
        skip: Vec<SkipGroup>,
        /// Directory with fixture JSON files replacing the built-in copies.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, env = BUDGET_ENV, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand)]
enum SearchCommand {
    /// All MIF(k) on at most the given number of points, up to isomorphism.
    Mif {
        #[arg(long)]
        k: usize,
        /// Defaults to the proven point bound for k.
        #[arg(long)]
        max_points: Option<usize>,
        #[arg(long, env = BUDGET_ENV, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Checkpoint log; resumed when it already exists.
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Largest point count of an ISP(k,t).
    Isp {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, env = BUDGET_ENV, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Accept parameters off the small whitelist.
        #[arg(long)]
        allow_any: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Bg,
    Pg,
    Complete,
    Triangle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SkipGroup {
    Search,
}

/// What a command produced: a report and whether the verdict was positive.
struct Outcome {
    text: String,
    json: serde_json::Value,
    positive: bool,
}

impl Outcome {
    fn ok(text: String, json: serde_json::Value) -> Self {
        Outcome { text, json, positive: true }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(MifError),
}

impl From<MifError> for Failure {
    fn from(e: MifError) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<Outcome, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match &cli.command {
        Command::Bounds { json: true, .. } => OutputFormat::Json,
        _ => cli.format,
    };
    match run(&cli) {
        Ok(out) => {
            match format {
                OutputFormat::Json => {
                    println!("{}", serde_json::to_string_pretty(&out.json).expect("json"))
                }
                OutputFormat::Text => print!("{}", out.text),
            }
            if out.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NEGATIVE)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                MifError::BudgetExceeded { .. } => EXIT_BUDGET,
                MifError::InvariantViolation(_) => EXIT_NEGATIVE,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn read_source(path: &std::path::Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn parse_inline(spec: &str, limit: usize) -> Result<Family, Failure> {
    let mut blocks = Vec::new();
    for (i, part) in spec.split(';').enumerate() {
        let points = part
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| Failure::Usage(format!("block {}: {s:?} is not a point id", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if points.iter().any(|&p| p >= limit.min(MAX_UNIVERSE)) {
            return Err(Failure::Lib(MifError::UniverseOverflow {
                requested: points.iter().max().map_or(0, |m| m + 1),
                limit,
            }));
        }
        blocks.push(Block::from_points(points));
    }
    Ok(Family::from_blocks(blocks))
}

fn load_family(input: &Input, limit: usize) -> Result<Family, Failure> {
    match (&input.path, &input.family) {
        (_, Some(spec)) => parse_inline(spec, limit),
        (Some(path), None) => Ok(format::parse_any_with_limit(&read_source(path)?, limit)?),
        (None, None) => Err(Failure::Usage("give a family file, `-`, or --family".into())),
    }
}

fn family_outcome(f: &Family) -> Outcome {
    Outcome::ok(format::to_text(f), serde_json::to_value(f).expect("family json"))
}

fn need(name: &str, v: Option<usize>) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this construction")))
}

fn run(cli: &Cli) -> CmdResult {
    let limit = cli.universe_limit;
    match &cli.command {
        Command::Gen { kind, k, t, q } => {
            let f = match kind {
                GenKind::Bg => bg_family_with_limit(need("k", *k)?, need("t", *t)?, limit)?.family,
                GenKind::Pg => projective_plane(need("q", *q)?)?,
                GenKind::Complete => complete_family_with_limit(need("k", *k)?, limit)?,
                GenKind::Triangle => Family::from_sets(&[[0, 1], [0, 2], [1, 2]]),
            };
            Ok(family_outcome(&f))
        }
        Command::CheckMif(input) => {
            let f = load_family(input, limit)?;
            let verdict = is_mif(&f)?;
            let text = match &verdict {
                MifVerdict::Mif(c) => format!("MIF({}): tau={}, {} blocks\n", c.k, c.tau, f.len()),
                MifVerdict::NotMif(r) => format!("not a MIF: {r}\n"),
            };
            Ok(Outcome {
                positive: verdict.is_mif(),
                json: serde_json::to_value(&verdict).expect("verdict json"),
                text,
            })
        }
        Command::Tau(input) => {
            let t = tau(&load_family(input, limit)?);
            Ok(Outcome::ok(format!("{t}\n"), json!({ "tau": t })))
        }
        Command::Transversals(input) => {
            let report = transversal_family(&load_family(input, limit)?)?;
            let mut text = format!("tau {}\ncount {}\n", report.tau, report.transversals.len());
            for b in report.transversals.iter() {
                text.push_str(&format!("{b}\n"));
            }
            Ok(Outcome::ok(text, serde_json::to_value(&report).expect("report json")))
        }
        Command::Merge { input, alpha, beta } => {
            let merged = merge(&load_family(input, limit)?, *alpha, *beta)?;
            Ok(family_outcome(&merged))
        }
        Command::Collapse { input, alpha } => {
            let trace = collapse(&load_family(input, limit)?, *alpha)?;
            let betas: Vec<String> = trace.betas.iter().map(|b| b.to_string()).collect();
            let text = format!(
                "alpha {}\nsteps {}\nbetas {}\nisp pairs {}\ntransversal points {}\n",
                trace.alpha,
                trace.steps(),
                betas.join(" "),
                trace.isp.len(),
                trace.g_top_points
            );
            Ok(Outcome::ok(text, serde_json::to_value(&trace).expect("trace json")))
        }
        Command::Chromatic(input) => {
            let c = chromatic_class(&load_family(input, limit)?)?;
            Ok(Outcome::ok(format!("{}\n", c.number()), json!({ "chromatic": c })))
        }
        Command::IspValidate { path } => {
            let isp = SetPairSystem::parse_json(&read_source(path)?)?;
            let verdict = validate_isp(&isp);
            let cert = if verdict.valid { Some(bollobas_sum(&isp)?) } else { None };
            let text = match (&verdict.violation, &cert) {
                (None, Some(c)) => format!(
                    "valid ISP: {} pairs, {} points, Bollobas sum {}\n",
                    verdict.pairs, verdict.points, c.sum
                ),
                (Some(v), _) => format!("invalid: {v}\n"),
                (None, None) => unreachable!("valid systems get a certificate"),
            };
            Ok(Outcome {
                positive: verdict.valid,
                json: json!({ "verdict": verdict, "bollobas": cert }),
                text,
            })
        }
        Command::IspExtract(input) => {
            let isp = extract_isp(&load_family(input, limit)?)?;
            let text = isp
                .pairs
                .iter()
                .map(|p| format!("{} | {}\n", p.a, p.b))
                .collect();
            Ok(Outcome::ok(text, serde_json::to_value(&isp).expect("isp json")))
        }
        Command::Bounds { k, t, .. } => {
            let table = match t {
                Some(t) => eval_bounds_with_pair(*k, *t)?,
                None => eval_bounds(*k)?,
            };
            Ok(Outcome::ok(table.to_text(), serde_json::to_value(&table).expect("table json")))
        }
        Command::Search { what } => run_search(what),
        Command::VerifyPaper { skip, fixtures, workers, budget } => {
            let opts = VerifyOptions {
                skip_search: skip.contains(&SkipGroup::Search),
                fixtures_dir: fixtures.clone(),
                workers: *workers,
                budget: *budget,
                ..VerifyOptions::default()
            };
            let report = verify_paper(&opts);
            Ok(Outcome {
                positive: report.all_passed,
                json: serde_json::to_value(&report).expect("report json"),
                text: report.to_text(),
            })
        }
    }
}

fn run_search(what: &SearchCommand) -> CmdResult {
    match what {
        SearchCommand::Mif { k, max_points, budget, resume, workers } => {
            let p = match max_points {
                Some(p) => *p,
                None => miflab::bounds::search_point_bound(*k)?,
            };
            let config = SearchConfig {
                budget: *budget,
                workers: *workers,
                checkpoint: resume.clone(),
            };
            let r = enumerate_mifs_with(*k, p, &config)?;
            let mut text = format!(
                "k {}\npoint bound {}\nclasses {}\nmax points {}\nnodes {}\n",
                r.k,
                r.universe_bound,
                r.canonical_mifs.len(),
                r.max_points,
                r.nodes
            );
            for (points, count) in &r.counts_by_point_count {
                text.push_str(&format!("  {points} points: {count}\n"));
            }
            Ok(Outcome::ok(text, serde_json::to_value(&r).expect("search json")))
        }
        SearchCommand::Isp { k, t, budget, allow_any } => {
            let r = search_isp(*k, *t, *budget, *allow_any)?;
            let text = format!(
                "n({},{}) = {}\npairs {}\nnodes {}\n",
                r.k,
                r.t,
                r.max_points,
                r.witness.len(),
                r.nodes
            );
            Ok(Outcome::ok(text, serde_json::to_value(&r).expect("search json")))
        }
    }
}
