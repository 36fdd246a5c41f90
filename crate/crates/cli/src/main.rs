mod input;
mod report;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand, ValueEnum};
use ipstar::construct::{self, Certificate, ExpOptions, Verdict};
use ipstar::oracle::{self, StarReport, StarStatus};
use ipstar::partition::{self, SelectionOutcome};
use ipstar::pattern;
use ipstar::search::{self, SearchBudget, SearchOutcome};
use ipstar::{DigitBudget, Error, PosInt, Result};
use serde::Serialize;
use serde_json::{json, Value};

use report::{Report, Status};

/// Generators and searches for finite-sum style patterns, with certificates
/// that can be re-checked later.
#[derive(Parser, Debug)]
#[command(name = "ipstar", version, about)]
struct Cli {
    /// Output style
    #[arg(long, value_enum, default_value_t = Format::Text, env = "IPSTAR_FORMAT", global = true)]
    format: Format,

    /// Search node limit
    #[arg(long, env = "IPSTAR_MAX_NODES", global = true)]
    max_nodes: Option<u64>,

    /// Search wall-clock limit in milliseconds
    #[arg(long, env = "IPSTAR_MAX_MILLIS", global = true)]
    max_millis: Option<u64>,

    /// Largest block value a search may consider
    #[arg(long, env = "IPSTAR_MAX_VALUE", global = true)]
    max_value: Option<String>,

    /// Decimal digits above which towers stay symbolic
    #[arg(long, env = "IPSTAR_DIGIT_BUDGET", global = true)]
    digit_budget: Option<usize>,

    /// Worker threads for parallel evaluation
    #[arg(long, env = "IPSTAR_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Finite sums of a sequence
    Fs {
        #[arg(long)]
        seq: String,
    },
    /// Finite products of a sequence
    Fp {
        #[arg(long)]
        seq: String,
    },
    /// Finite unions of a family of index sets, e.g. [[1],[2,3]]
    Fu {
        #[arg(long)]
        family: String,
    },
    /// Nested towers over nondecreasing index tuples
    Exp1 {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        kmax: usize,
    },
    /// Powers with product exponents over nondecreasing index tuples
    Exp2 {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        kmax: usize,
    },
    /// Exponents m <= bound with base^m in the set
    Log {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        base: String,
        #[arg(long)]
        bound: u64,
    },
    /// Pull a coloring of sums back to index sets along a superincreasing z
    Pullback {
        #[arg(long)]
        coloring: String,
        #[arg(long)]
        z: String,
    },
    /// Greedy max<min chain of a disjoint family
    OrderBlocks {
        #[arg(long)]
        family: String,
    },
    /// Greedy superincreasing subsequence
    Superinc {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        len: usize,
    },
    /// Disjoint sets with monochromatic unions under a subset coloring
    FuSearch {
        #[arg(long)]
        coloring: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ordered: bool,
    },
    /// Monochromatic sum subsystem of a superincreasing sequence
    FsSearch {
        #[arg(long)]
        coloring: String,
        #[arg(long)]
        z: String,
        #[arg(long)]
        k: usize,
        /// List every system by brute force instead (up to 12 terms)
        #[arg(long)]
        brute: bool,
    },
    /// Sum subsystem of a sequence inside a set
    Extract {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        seq: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Weak Schur number for r colors
    WeakSchur {
        #[arg(long)]
        r: u32,
    },
    /// Finite-unions number for r colors and k sets
    Folkman {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: usize,
    },
    /// Search increasing terms in [1..N] whose finite sums avoid the set
    RefuteAip {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Search increasing terms in [2..N] whose finite products avoid the set
    RefuteMip {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// The translate { m : y + m in A }
    Shift {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        y: String,
    },
    /// The quotient { m : y * m in A }
    Quotient {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        y: String,
    },
    /// Sum system whose finite sums lie in two sets at once
    Intersect {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        seq: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Additive refuter on the log pullback next to the multiplicative refuter
    LogCheck {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        base: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
    },
    /// Blocks whose sums have all finite sums and products in the set
    GreedyFsfp {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        seq: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Increasing terms whose tower patterns lie in the set
    GreedyExp {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        ceiling: u64,
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Re-check a certificate file (or a report carrying one)
    Verify {
        #[arg(long)]
        cert: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fs { .. } => "fs",
            Command::Fp { .. } => "fp",
            Command::Fu { .. } => "fu",
            Command::Exp1 { .. } => "exp1",
            Command::Exp2 { .. } => "exp2",
            Command::Log { .. } => "log",
            Command::Pullback { .. } => "pullback",
            Command::OrderBlocks { .. } => "order-blocks",
            Command::Superinc { .. } => "superinc",
            Command::FuSearch { .. } => "fu-search",
            Command::FsSearch { .. } => "fs-search",
            Command::Extract { .. } => "extract",
            Command::WeakSchur { .. } => "weak-schur",
            Command::Folkman { .. } => "folkman",
            Command::RefuteAip { .. } => "refute-aip",
            Command::RefuteMip { .. } => "refute-mip",
            Command::Shift { .. } => "shift",
            Command::Quotient { .. } => "quotient",
            Command::Intersect { .. } => "intersect",
            Command::LogCheck { .. } => "log-check",
            Command::GreedyFsfp { .. } => "greedy-fsfp",
            Command::GreedyExp { .. } => "greedy-exp",
            Command::Verify { .. } => "verify",
        }
    }
}

struct Ctx {
    budget: SearchBudget,
    digits: DigitBudget,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn ok(cmd: &str, result: Value) -> Report {
    Report::new(cmd, Status::Ok, result)
}

/// Wrap a search outcome in a report, keeping its certificate and stats.
fn searched<C: Serialize>(
    cmd: &str,
    out: SearchOutcome<C>,
    summary: impl FnOnce(&C) -> Value,
    wrap: impl FnOnce(C) -> Certificate,
    cert_out: Option<&PathBuf>,
) -> Result<Report> {
    let status = Status::from(out.status());
    let stats = out.stats();
    let diagnostic = out.diagnostic().map(str::to_string);
    let result = match out.certificate() {
        Some(c) => summary(c),
        None => json!({ "diagnostic": diagnostic }),
    };
    let cert = out.into_certificate().map(|c| to_value(&wrap(c)));
    if let (Some(path), Some(c)) = (cert_out, &cert) {
        write_file(path, c)?;
    }
    Ok(Report::new(cmd, status, result).with_certificate(cert).with_stats(stats))
}

fn write_file(path: &PathBuf, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn star(cmd: &str, set: ipstar::oracle::SetSpec, r: StarReport, cert_out: Option<&PathBuf>) -> Result<Report> {
    let status = match r.status {
        StarStatus::Refuted => Status::Refuted,
        StarStatus::ConsistentAtScale => Status::ConsistentAtScale,
        StarStatus::BudgetExceeded => Status::BudgetExceeded,
    };
    let stats = r.stats;
    let result = json!({ "witness": r.witness, "n_bound": r.n_bound.to_string(), "k": r.k });
    let cert = (r.status == StarStatus::Refuted).then(|| to_value(&Certificate::Refutation { set, report: r }));
    if let (Some(path), Some(c)) = (cert_out, &cert) {
        write_file(path, c)?;
    }
    Ok(Report::new(cmd, status, result).with_certificate(cert).with_stats(stats))
}

fn run(cmd: &Command, ctx: &Ctx) -> Result<Report> {
    let name = cmd.name();
    let budget = &ctx.budget;
    match cmd {
        Command::Fs { seq } => Ok(ok(name, json!({ "values": pattern::fs(&input::sequence(seq)?) }))),
        Command::Fp { seq } => Ok(ok(name, json!({ "values": pattern::fp(&input::sequence(seq)?) }))),
        Command::Fu { family } => Ok(ok(name, json!({ "sets": pattern::fu(&input::family(family)?)? }))),
        Command::Exp1 { seq, kmax } => {
            let v = pattern::exp1(&input::sequence(seq)?, *kmax, ctx.digits)?;
            Ok(ok(name, json!({ "values": v })))
        }
        Command::Exp2 { seq, kmax } => {
            let v = pattern::exp2(&input::sequence(seq)?, *kmax, ctx.digits)?;
            Ok(ok(name, json!({ "values": v })))
        }
        Command::Log { oracle, base, bound } => {
            let v = pattern::log_filter(&input::oracle(oracle)?, &input::posint(base)?, *bound, ctx.digits)?;
            let v: Vec<String> = v.iter().map(u64::to_string).collect();
            Ok(ok(name, json!({ "exponents": v })))
        }
        Command::Pullback { coloring, z } => {
            let z = input::sequence(z)?;
            let total = pattern::fs(&z).into_iter().next_back().expect("nonempty");
            let c = input::coloring(coloring)?.on_values(universe_upto(&total)?)?;
            Ok(ok(name, json!({ "coloring": partition::pullback_coloring(&c, &z)? })))
        }
        Command::OrderBlocks { family } => {
            Ok(ok(name, json!({ "blocks": partition::order_blocks(&input::family(family)?)? })))
        }
        Command::Superinc { seq, len } => {
            let out = partition::superincreasing_subseq(&input::sequence(seq)?, *len)?;
            let status = match out {
                SelectionOutcome::Complete(_) => Status::Found,
                SelectionOutcome::Exhausted(_) => Status::Exhausted,
            };
            Ok(Report::new(name, status, to_value(out.selection())))
        }
        Command::FuSearch { coloring, m, k, ordered } => {
            let c = input::coloring(coloring)?.on_subsets(*m)?;
            let out = search::fu_search(&c, *m, *k, *ordered, budget)?;
            searched(
                name,
                out,
                |f| json!({ "sets": f.sets, "color": f.color }),
                |f| Certificate::Fu { coloring: c.clone(), certificate: f },
                None,
            )
        }
        Command::FsSearch { coloring, z, k, brute } => {
            let z = input::sequence(z)?;
            let total = pattern::fs(&z).into_iter().next_back().expect("nonempty");
            let c = input::coloring(coloring)?.on_values(universe_upto(&total)?)?;
            if *brute {
                let all = search::brute_oracle_fs(&c, &z, *k)?;
                let status = if all.is_empty() { Status::Exhausted } else { Status::Found };
                return Ok(Report::new(name, status, json!({ "count": all.len(), "systems": all })));
            }
            let out = search::fs_subsystem_search(&c, &z, *k, budget)?;
            searched(
                name,
                out,
                |f| json!({ "blocks": f.blocks, "chosen": f.chosen, "color": f.color }),
                |f| Certificate::FsSubsystem { coloring: c.clone(), certificate: f },
                None,
            )
        }
        Command::Extract { oracle, seq, k, cert_out } => {
            let out = search::extract_in_star(&input::set_spec(oracle)?, &input::sequence(seq)?, *k, budget)?;
            searched(
                name,
                out,
                |c| json!({ "blocks": c.blocks, "chosen": c.chosen }),
                Certificate::Subsystem,
                cert_out.as_ref(),
            )
        }
        Command::WeakSchur { r } => {
            let res = search::weak_schur_number(*r)?;
            let result = json!({ "number": res.number, "avoiding": res.avoiding, "nodes": res.nodes });
            Ok(ok(name, result).with_certificate(Some(to_value(&Certificate::SumFreeColoring(res)))))
        }
        Command::Folkman { r, k } => {
            let res = search::folkman_union_number(*r, *k)?;
            let result = json!({ "number": res.number, "nodes": res.nodes });
            Ok(ok(name, result).with_certificate(Some(to_value(&Certificate::UnionFreeColoring(res)))))
        }
        Command::RefuteAip { oracle, n, k, cert_out } => {
            let set = input::set_spec(oracle)?;
            let r = oracle::aip_refute(&set, *n, *k, budget)?;
            star(name, set, r, cert_out.as_ref())
        }
        Command::RefuteMip { oracle, n, k, cert_out } => {
            let set = input::set_spec(oracle)?;
            let r = oracle::mip_refute(&set, *n, *k, budget)?;
            star(name, set, r, cert_out.as_ref())
        }
        Command::Shift { oracle, y } => {
            Ok(ok(name, json!({ "oracle": oracle::shift_set(&input::oracle(oracle)?, &input::posint(y)?)? })))
        }
        Command::Quotient { oracle, y } => {
            Ok(ok(name, json!({ "oracle": oracle::quotient_set(&input::oracle(oracle)?, &input::posint(y)?)? })))
        }
        Command::Intersect { a, b, seq, k, cert_out } => {
            let out = oracle::intersection_harness(&input::set_spec(a)?, &input::set_spec(b)?, &input::sequence(seq)?, *k, budget)?;
            searched(
                name,
                out,
                |c| json!({ "blocks": c.blocks, "chosen": c.chosen }),
                Certificate::Intersection,
                cert_out.as_ref(),
            )
        }
        Command::LogCheck { oracle, base, n, k } => {
            let r = oracle::log_star_check(&input::oracle(oracle)?, &input::posint(base)?, *n, *k, budget, ctx.digits)?;
            Ok(ok(name, to_value(&r)))
        }
        Command::GreedyFsfp { oracle, seq, k, cert_out } => {
            let out = construct::greedy_fs_fp(&input::set_spec(oracle)?, &input::sequence(seq)?, *k, budget)?;
            searched(
                name,
                out,
                |c| json!({ "route": c.route, "blocks": c.blocks, "chosen": c.chosen }),
                Certificate::FsFp,
                cert_out.as_ref(),
            )
        }
        Command::GreedyExp { oracle, m, ceiling, cert_out } => {
            let opts = ExpOptions { ceiling: *ceiling, digit_budget: ctx.digits, ..ExpOptions::default() };
            let out = construct::greedy_exp(&input::oracle(oracle)?, *m, budget, &opts)?;
            searched(
                name,
                out,
                |c| json!({ "chosen": c.chosen, "pattern_size": c.pattern.len() }),
                Certificate::Exp,
                cert_out.as_ref(),
            )
        }
        Command::Verify { cert } => {
            let doc: Value = input::document(cert)?;
            let body = match doc.get("certificate") {
                Some(inner) if doc.get("tool").is_some() => inner.clone(),
                _ => doc,
            };
            let c: Certificate = serde_json::from_value(body).map_err(|e| Error::Malformed(format!("certificate: {e}")))?;
            let verdict = construct::verify_certificate(&c)?;
            let status = if verdict == Verdict::Pass { Status::Pass } else { Status::Fail };
            Ok(Report::new(name, status, to_value(&verdict)))
        }
    }
}

/// `1..=total`, for colorings that must cover every finite sum.
fn universe_upto(total: &PosInt) -> Result<impl Iterator<Item = PosInt>> {
    const LIMIT: u64 = 10_000_000;
    let n = total.to_u64().filter(|&n| n <= LIMIT).ok_or_else(|| {
        Error::InvalidArgument(format!("sums reach {total}; colorings are materialized only up to {LIMIT}"))
    })?;
    Ok((1..=n).map(PosInt::lit))
}

fn context(cli: &Cli) -> Result<Ctx> {
    let mut budget = SearchBudget::default();
    if let Some(n) = cli.max_nodes {
        budget = budget.with_nodes(n);
    }
    if let Some(ms) = cli.max_millis {
        budget = budget.with_millis(ms);
    }
    if let Some(v) = &cli.max_value {
        budget = budget.with_max_value(input::posint(v)?);
    }
    let digits = cli.digit_budget.map(DigitBudget).unwrap_or_default();
    if let Some(t) = cli.threads {
        ipstar::set_threads(t)?;
    }
    Ok(Ctx { budget, digits })
}

fn main() {
    let cli = Cli::parse();
    let name = cli.command.name();
    let report = context(&cli).and_then(|ctx| run(&cli.command, &ctx)).unwrap_or_else(|e| Report::error(name, &e));
    let text = match cli.format {
        Format::Machine => report.machine() + "\n",
        Format::Text => report.text(),
    };
    // a closed downstream pipe is ignored
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    process::exit(report.status.exit_code());
}
