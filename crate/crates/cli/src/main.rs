use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cutwidth::compress::{compress_with_stats, CompressOptions};
use cutwidth::format::{parse_graph, parse_ordering, render_graph, render_ordering};
use cutwidth::obstructions::{read_catalog, search_certified, write_catalog, CatalogRecord};
use cutwidth::ordering::{cut_sequence, make_linked, verify_linked, width};
use cutwidth::reduce::{reduce_step, ReduceOutcome};
use cutwidth::solver::{cutwidth_decide_with_report, cutwidth_exact_with_report, Decision, SolveReport};
use cutwidth::{oracle, Error, MultiGraph, Ordering};

#[derive(Parser)]
#[command(name = "cutwidth", version, about = "Exact cutwidth of multigraphs and obstruction tooling")]
struct Cli {
    /// Emit JSON on stdout instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal ordering, or decide whether width K is achievable.
    Solve {
        file: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Brute-force cutwidth by subset dynamic programming.
    Oracle { file: PathBuf },
    /// Check that an ordering has width at most K.
    Verify {
        file: PathBuf,
        #[arg(long)]
        ordering: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Turn a given ordering into one of width at most K, if possible.
    Compress {
        file: PathBuf,
        #[arg(long)]
        ordering: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// One reduction step for width K.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Search obstructions for cutwidth at most K.
    Obstructions {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        max_mult: u32,
        /// Append to this catalog, resuming from its cursor.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Fewest edge deletions reaching cutwidth at most K.
    Dcw {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Refine an ordering into a linked one and verify it.
    Linked {
        file: PathBuf,
        #[arg(long)]
        ordering: PathBuf,
    },
}

/// Result of a command: exit code 0 for success or a yes answer, 1 for a
/// no answer.
struct Report {
    yes: bool,
    json: Value,
    text: String,
}

fn read_graph(path: &Path) -> Result<MultiGraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_ordering(path: &Path, n: usize) -> Result<Ordering> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_ordering(&text, n).with_context(|| format!("parsing {}", path.display()))
}

fn one_based(sigma: &Ordering) -> Vec<usize> {
    sigma.as_slice().iter().map(|v| v + 1).collect()
}

fn cuts_of(g: &MultiGraph, sigma: &Ordering) -> Result<Vec<usize>> {
    Ok(cut_sequence(g, sigma)?.0)
}

fn ordering_table(g: &MultiGraph, sigma: &Ordering) -> Result<String> {
    let cuts = cuts_of(g, sigma)?;
    let mut s = String::from("pos  vertex  cut after\n");
    for (i, v) in sigma.as_slice().iter().enumerate() {
        let c = cuts.get(i).map(|c| c.to_string()).unwrap_or_else(|| "-".into());
        s.push_str(&format!("{:>3}  {:>6}  {:>9}\n", i + 1, v + 1, c));
    }
    Ok(s)
}

fn report_json(r: &SolveReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

fn solve(g: &MultiGraph, k: Option<usize>) -> Result<Report> {
    let opts = CompressOptions::default();
    match k {
        None => {
            let (cw, sigma, report) = cutwidth_exact_with_report(g, &opts)?;
            Ok(Report {
                yes: true,
                json: json!({
                    "format": 1,
                    "cutwidth": cw,
                    "ordering": one_based(&sigma),
                    "cuts": cuts_of(g, &sigma)?,
                    "report": report_json(&report),
                }),
                text: format!("cutwidth {cw}\n{}", ordering_table(g, &sigma)?),
            })
        }
        Some(k) => {
            let mut report = SolveReport::default();
            match cutwidth_decide_with_report(g, k, &opts, &mut report)? {
                Decision::Fits(sigma) => {
                    let w = width(g, &sigma)?;
                    Ok(Report {
                        yes: true,
                        json: json!({
                            "format": 1,
                            "k": k,
                            "fits": true,
                            "width": w,
                            "ordering": one_based(&sigma),
                            "cuts": cuts_of(g, &sigma)?,
                            "report": report_json(&report),
                        }),
                        text: format!("width {w} <= {k}\n{}", ordering_table(g, &sigma)?),
                    })
                }
                Decision::TooWide => Ok(Report {
                    yes: false,
                    json: json!({"format": 1, "k": k, "fits": false, "report": report_json(&report)}),
                    text: format!("cutwidth exceeds {k}\n"),
                }),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Solve { file, k } => solve(&read_graph(file)?, *k),
        Command::Oracle { file } => {
            let g = read_graph(file)?;
            let (cw, sigma) = oracle::exact_cutwidth(&g)?;
            Ok(Report {
                yes: true,
                json: json!({"format": 1, "cutwidth": cw, "ordering": one_based(&sigma), "cuts": cuts_of(&g, &sigma)?}),
                text: format!("cutwidth {cw}\n{}", ordering_table(&g, &sigma)?),
            })
        }
        Command::Verify { file, ordering, k } => {
            let g = read_graph(file)?;
            let sigma = read_ordering(ordering, g.n())?;
            let w = width(&g, &sigma)?;
            let ok = w <= *k;
            Ok(Report {
                yes: ok,
                json: json!({"format": 1, "width": w, "k": k, "ok": ok, "cuts": cuts_of(&g, &sigma)?}),
                text: format!("width {w} {} {k}\n", if ok { "<=" } else { ">" }),
            })
        }
        Command::Compress { file, ordering, k } => {
            let g = read_graph(file)?;
            let sigma = read_ordering(ordering, g.n())?;
            let (found, stats) = compress_with_stats(&g, &sigma, *k, &CompressOptions::default())?;
            let stats = serde_json::to_value(&stats)?;
            Ok(match found {
                Some(tau) => Report {
                    yes: true,
                    json: json!({
                        "format": 1,
                        "k": k,
                        "fits": true,
                        "ordering": one_based(&tau),
                        "cuts": cuts_of(&g, &tau)?,
                        "stats": stats,
                    }),
                    text: format!("width {} <= {k}\n{}", width(&g, &tau)?, ordering_table(&g, &tau)?),
                },
                None => Report {
                    yes: false,
                    json: json!({"format": 1, "k": k, "fits": false, "stats": stats}),
                    text: format!("no ordering of width {k}\n"),
                },
            })
        }
        Command::Reduce { file, k } => {
            let g = read_graph(file)?;
            Ok(match reduce_step(&g, *k) {
                ReduceOutcome::TooWide(why) => Report {
                    yes: false,
                    json: json!({"format": 1, "outcome": "too_wide", "reason": serde_json::to_value(&why)?}),
                    text: format!("cutwidth exceeds {k}: {why:?}\n"),
                },
                ReduceOutcome::NoProgress => Report {
                    yes: true,
                    json: json!({"format": 1, "outcome": "no_progress"}),
                    text: "no progress\n".into(),
                },
                ReduceOutcome::Reduced { graph, trace, case } => Report {
                    yes: true,
                    json: json!({
                        "format": 1,
                        "outcome": "reduced",
                        "case": serde_json::to_value(case)?,
                        "graph": render_graph(&graph),
                        "trace": serde_json::to_value(&trace)?,
                    }),
                    text: format!(
                        "reduced ({case:?}): {} -> {} edges, {} events\n{}",
                        g.edge_count(),
                        graph.edge_count(),
                        trace.events.len(),
                        render_graph(&graph)
                    ),
                },
            })
        }
        Command::Obstructions { k, max_n, max_mult, out, jobs } => {
            if let Some(j) = jobs {
                rayon::ThreadPoolBuilder::new().num_threads(*j).build_global().context("setting --jobs")?;
            }
            let records: Vec<CatalogRecord> = match out {
                Some(path) => {
                    write_catalog(path, *k, *max_n, *max_mult)?;
                    read_catalog(path)?
                }
                None => search_certified(*k, *max_n, *max_mult)?
                    .iter()
                    .map(|o| CatalogRecord::from_obstruction(o, *k))
                    .collect(),
            };
            let mut text = format!("{} obstructions for cutwidth <= {k}\n", records.len());
            for r in &records {
                text.push_str(&format!("n={} edges={:?}\n", r.n, r.edges));
            }
            Ok(Report {
                yes: true,
                json: json!({"format": 1, "k": k, "count": records.len(), "obstructions": serde_json::to_value(&records)?}),
                text,
            })
        }
        Command::Dcw { file, k } => {
            let g = read_graph(file)?;
            let (d, deleted) = oracle::dcw(&g, *k)?;
            let one: Vec<_> = deleted.iter().map(|&(u, v, m)| (u + 1, v + 1, m)).collect();
            Ok(Report {
                yes: true,
                json: json!({"format": 1, "k": k, "dcw": d, "deleted": one}),
                text: format!("{d} deletions reach cutwidth {k}: {one:?}\n"),
            })
        }
        Command::Linked { file, ordering } => {
            let g = read_graph(file)?;
            let sigma = read_ordering(ordering, g.n())?;
            let before = width(&g, &sigma)?;
            let tau = make_linked(&g, &sigma)?;
            let after = width(&g, &tau)?;
            let linked = verify_linked(&g, &tau);
            Ok(Report {
                yes: linked,
                json: json!({
                    "format": 1,
                    "linked": linked,
                    "width_before": before,
                    "width": after,
                    "ordering": one_based(&tau),
                    "cuts": cuts_of(&g, &tau)?,
                }),
                text: format!("linked: {linked}, width {before} -> {after}\n{}", render_ordering(&tau)),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                println!("{}", r.json);
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(if r.yes { 0 } else { 1 })
        }
        Err(e) => {
            if let Some(Error::StateLimit(limit)) = e.downcast_ref::<Error>() {
                eprintln!("error: state limit of {limit} reached; raise CW_STATE_LIMIT to allow more");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}
