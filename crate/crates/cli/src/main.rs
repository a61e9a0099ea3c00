use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ordmatch::clique::{full_report_with, verify_report, CliqueReport};
use ordmatch::extract::{extract_clique, guaranteed_size};
use ordmatch::extremal::build_extremal;
use ordmatch::matching::{random_matching, random_r_partite};
use ordmatch::oracle::{exact_ramsey, random_instances, theorem_sweep, DEFAULT_BUDGET};
use ordmatch::partition::{c_r, chains, lower_bound_value, sharpness_constant, upper_bound};
use ordmatch::pattern::collectable_patterns;
use ordmatch::{BudgetTable, Matching, PartitionChain, Pattern};

#[derive(Parser)]
#[command(name = "ordmatch", version, about = "Pattern cliques in ordered hypergraph matchings")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List all r-patterns with collectability and block partitions.
    Patterns {
        #[arg(long)]
        r: usize,
    },
    /// Evaluate the upper and lower bounds for given clique caps.
    Bounds {
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Build a matching with prescribed clique caps along a partition chain.
    Construct {
        #[arg(long)]
        r: usize,
        /// Chain such as "3>1,2>1,1,1"; defaults to the first chain.
        #[arg(long)]
        chain: Option<String>,
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the exact clique analysis and check every cap.
        #[arg(long)]
        verify: bool,
    },
    /// Exact largest clique for every pattern.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Allow more than 10^4 edges.
        #[arg(long)]
        force: bool,
    },
    /// Polynomial-time clique extraction.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target_m: u64,
        /// Include the recursion trace.
        #[arg(long)]
        trace: bool,
    },
    /// Exact Ramsey value L_r(n) by exhaustive search.
    ExactL {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        /// Maximum number of matchings to enumerate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Where to write the witness matching.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the size bounds on random matchings; emits TSV.
    Sweep {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random matching.
    Random {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Sample an r-partite matching instead.
        #[arg(long)]
        partite: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a clique report against a matching.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Args)]
struct CapArgs {
    /// Cap m_P for one pattern, as P=INT; repeatable.
    #[arg(long = "budget", value_parser = parse_cap)]
    budget: Vec<(Pattern, u64)>,
    /// Same cap for every collectable pattern.
    #[arg(long, conflicts_with = "budget")]
    uniform_budget: Option<u64>,
}

fn parse_cap(s: &str) -> Result<(Pattern, u64), String> {
    let (p, m) = s.split_once('=').ok_or_else(|| format!("expected P=INT, got {s:?}"))?;
    let p: Pattern = p.parse().map_err(|e| format!("{e}"))?;
    let m: u64 = m.trim().parse().map_err(|e| format!("bad cap {m:?}: {e}"))?;
    Ok((p, m))
}

enum Failure {
    Usage(String),
    Assertion(String),
}

impl From<ordmatch::Error> for Failure {
    fn from(e: ordmatch::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn caps_table(r: usize, caps: &CapArgs) -> Result<BudgetTable, Failure> {
    if let Some(m) = caps.uniform_budget {
        return Ok(BudgetTable::uniform(r, m)?);
    }
    if caps.budget.is_empty() {
        return Err(Failure::Usage("one of --budget or --uniform-budget is required".into()));
    }
    Ok(BudgetTable::new(r, caps.budget.iter().cloned().collect())?)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_matching(path: &Path) -> Result<Matching, Failure> {
    Matching::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn matching_output(m: &Matching, json: bool) -> String {
    if json {
        m.to_json() + "\n"
    } else {
        m.to_text()
    }
}

fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    match cli.command {
        Command::Patterns { r } => patterns(r, json),
        Command::Bounds { r, caps } => bounds(r, &caps, json),
        Command::Construct {
            r,
            chain,
            caps,
            out,
            verify,
        } => construct(r, chain.as_deref(), &caps, out.as_deref(), verify, json),
        Command::Analyze { input, force } => {
            let m = read_matching(&input)?;
            let report = full_report_with(&m, force)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report_table(&report));
            }
            Ok(())
        }
        Command::Extract { input, target_m, trace } => {
            let m = read_matching(&input)?;
            let mut res = extract_clique(&m, target_m)?;
            if json {
                if !trace {
                    res.trace.clear();
                }
                println!("{}", res.to_json());
            } else {
                println!("pattern\t{}", res.pattern);
                println!("size\t{}", res.size);
                println!("clique\t{:?}", res.clique);
                println!("guarantee\t{}", guaranteed_size(m.uniformity(), m.len() as u64));
                println!("target_reached\t{}", res.target_reached);
                if trace {
                    for step in &res.trace {
                        println!("trace\t{}", serde_json::to_string(step).expect("serializable"));
                    }
                }
            }
            Ok(())
        }
        Command::ExactL { r, n, budget, out } => {
            let res = exact_ramsey(n, r, budget)?;
            if let Some(path) = &out {
                emit(&res.witness.to_text(), Some(path))?;
            }
            if json {
                println!("{}", serde_json::to_string(&res).expect("serializable"));
            } else {
                println!("L_{r}({n})\t{}", res.value);
                println!("enumerated\t{}", res.count);
                match &out {
                    Some(path) => println!("witness\t{}", path.display()),
                    None => print!("witness\n{}", res.witness.to_text()),
                }
            }
            Ok(())
        }
        Command::Sweep {
            r,
            count,
            n,
            seed,
            out,
        } => {
            let report = theorem_sweep(r, &random_instances(r, n, count, seed)?)?;
            let text = if json {
                serde_json::to_string(&report).expect("serializable") + "\n"
            } else {
                report.to_tsv()
            };
            emit(&text, out.as_deref())?;
            match report.failures() {
                0 => Ok(()),
                k => Err(Failure::Assertion(format!("{k} of {count} instances failed"))),
            }
        }
        Command::Random {
            r,
            n,
            seed,
            partite,
            out,
        } => {
            let m = if partite {
                random_r_partite(n, r, seed)?
            } else {
                random_matching(n, r, seed)?
            };
            emit(&matching_output(&m, json), out.as_deref())
        }
        Command::Verify { input, report } => {
            let m = read_matching(&input)?;
            let claimed = CliqueReport::from_json(&read(&report)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", report.display())))?;
            let problems = verify_report(&m, &claimed);
            if problems.is_empty() {
                println!("ok\t{} patterns verified", claimed.cliques.len());
                Ok(())
            } else {
                for p in &problems {
                    println!("fail\t{p}");
                }
                Err(Failure::Assertion(format!("{} problems in {}", problems.len(), report.display())))
            }
        }
    }
}

fn patterns(r: usize, json: bool) -> Outcome {
    if r == 0 {
        return Err(Failure::Usage("--r must be positive".into()));
    }
    let all = Pattern::all(r);
    if json {
        let rows: Vec<serde_json::Value> = all
            .iter()
            .map(|p| {
                serde_json::json!({
                    "pattern": p.as_str(),
                    "collectable": p.is_collectable(),
                    "partition": p.block_partition().map(|b| b.to_string()),
                    "signs": p.sign_function().map(|s| s.to_string()),
                })
            })
            .collect();
        println!("{}", serde_json::Value::Array(rows));
        return Ok(());
    }
    let mut out = String::new();
    for p in &all {
        match (p.block_partition(), p.sign_function()) {
            (Some(b), Some(s)) => writeln!(out, "{p}\t({b})\t{s}\tcollectable"),
            _ => writeln!(out, "{p}\t-\t-\tnot collectable"),
        }
        .expect("string write");
    }
    let k = collectable_patterns(r).len();
    writeln!(out, "# {} patterns, {k} collectable", all.len()).expect("string write");
    print!("{out}");
    Ok(())
}

fn bounds(r: usize, caps: &CapArgs, json: bool) -> Outcome {
    if r == 0 {
        return Err(Failure::Usage("--r must be positive".into()));
    }
    let table = caps_table(r, caps)?;
    let upper = upper_bound(r, &table)?;
    let (lower, chain) = lower_bound_value(r, &table)?;
    let sharp = sharpness_constant(r);
    if json {
        let v = serde_json::json!({
            "r": r,
            "upper": upper.to_string(),
            "lower": lower.to_string(),
            "chain": chain.to_string(),
            "c_r": c_r(r).to_string(),
            "sharpness": sharp,
        });
        println!("{v}");
    } else {
        println!("upper\t{upper}");
        println!("lower\t{lower}");
        println!("chain\t{chain}");
        println!("C_r\t{}", c_r(r));
        println!("sharpness\t{sharp:.6}");
    }
    Ok(())
}

fn construct(r: usize, chain: Option<&str>, caps: &CapArgs, out: Option<&Path>, verify: bool, json: bool) -> Outcome {
    if r == 0 {
        return Err(Failure::Usage("--r must be positive".into()));
    }
    let chain: PartitionChain = match chain {
        Some(s) => s.parse().map_err(|e| Failure::Usage(format!("--chain: {e}")))?,
        None => chains(r).remove(0),
    };
    if chain.uniformity() != r {
        return Err(Failure::Usage(format!("--chain {chain} is not a chain for r = {r}")));
    }
    let table = caps_table(r, caps)?;
    let m = build_extremal(&chain, &table)?;
    emit(&matching_output(&m, json), out)?;
    if !verify {
        return Ok(());
    }
    let report = full_report_with(&m, true)?;
    let set = chain.pattern_set();
    let mut bad = Vec::new();
    for (p, c) in &report.cliques {
        let cap = if set.contains(p) { table.get(p)? } else { 1 };
        if c.size as u64 > cap {
            bad.push(format!("{p}: clique of size {} exceeds cap {cap}", c.size));
        }
    }
    eprintln!("verified {} edges, L = {} ({})", m.len(), report.overall.size, report.overall.pattern);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Assertion(bad.join("; ")))
    }
}

fn report_table(report: &CliqueReport) -> String {
    let mut out = String::from("pattern\tsize\twitness\n");
    for (p, c) in &report.cliques {
        let w: Vec<String> = c.witness.iter().map(|i| i.to_string()).collect();
        writeln!(out, "{p}\t{}\t{}", c.size, w.join(",")).expect("string write");
    }
    writeln!(out, "# n = {}, r = {}, L = {} ({})", report.n, report.r, report.overall.size, report.overall.pattern)
        .expect("string write");
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Assertion(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(1)
        }
    }
}
