use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use crosscap::census::{knot_detail, run_census, CensusConfig, ObstructionDetail};
use crosscap::lattice::{embed_with_cap, EmbeddingProblem, EmbeddingStatus, DEFAULT_NODE_CAP};
use crosscap::matrix::IntMat;

#[derive(Parser)]
#[command(name = "crosscap", about = "Non-orientable 4-genus census for the bundled knot tables", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Knot table: name,pd_code,signature,arf,determinant,slice,alternating
    #[arg(long)]
    knots: PathBuf,
    /// Known-value table for auxiliary knots: name,gamma4
    #[arg(long)]
    known: PathBuf,
    /// Certificate ledger (JSON)
    #[arg(long)]
    certs: PathBuf,
    /// Worker count for the per-knot stage
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Node cap for each embedding search
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full census and write a JSON report.
    Census {
        #[command(flatten)]
        data: DataArgs,
        /// Expected gamma4 sets to diff against: {"1": [names], "2": [names]}
        #[arg(long)]
        expect: Option<PathBuf>,
        /// Report output path
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the full derivation for one knot.
    Knot {
        /// Knot name; a mirror prefix is accepted ("-10_9" names 10_9)
        #[arg(allow_hyphen_values = true)]
        name: String,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Decide embeddability of a Gram matrix into the definite diagonal
    /// lattice of the given rank.
    Embed {
        /// Plain-text matrix: one row of integers per line
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        target_rank: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: u64,
    },
}

fn config(data: &DataArgs) -> CensusConfig {
    CensusConfig {
        knots_file: data.knots.clone(),
        known_file: data.known.clone(),
        certificates_file: data.certs.clone(),
        expected_file: None,
        parallelism: data.jobs,
        node_cap: data.node_cap,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Census { data, expect, out } => {
            let mut cfg = config(&data);
            cfg.expected_file = expect;
            let report = run_census(&cfg).context("census failed")?;
            let json = serde_json::to_string_pretty(&report)?;
            std::fs::write(&out, json).with_context(|| format!("writing {}", out.display()))?;
            println!("{} knots, counts {:?}", report.total, report.counts);
            if !report.unresolved.is_empty() {
                println!("unresolved: {}", report.unresolved.join(", "));
            }
            for m in &report.expect_mismatches {
                println!("mismatch: {m}");
            }
            if let Some(ok) = report.expect_match {
                println!("expected-values check: {}", if ok { "match" } else { "MISMATCH" });
            }
            println!("report written to {}", out.display());
            Ok(if report.success() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Knot { name, data } => {
            let cfg = config(&data);
            let detail = knot_detail(&name, &cfg).context("knot lookup failed")?;
            let r = &detail.report;
            println!("{}", r.name);
            println!(
                "  signature {}  arf {}  det {}  class {}  {}{}",
                detail.signature,
                detail.arf,
                r.determinant,
                r.class,
                if r.alternating { "alternating" } else { "non-alternating" },
                if detail.slice { "  slice" } else { "" },
            );
            println!(
                "  checkerboard colorings: {} and {} white regions",
                detail.white_regions.0, detail.white_regions.1
            );
            for f in &detail.forms {
                println!(
                    "  Goeritz form (coloring {}{}, deleted index {}): {} definite? {}  det {}",
                    f.coloring,
                    if f.mirror { ", mirror diagram" } else { "" },
                    f.deleted_index,
                    f.definiteness,
                    if f.definiteness == "Indefinite" { "no" } else { "yes" },
                    f.det,
                );
                for row in &f.rows {
                    println!("    {row:?}");
                }
            }
            match &r.obstruction {
                ObstructionDetail::Congruence => println!("  lower bound 2: congruence class 4"),
                ObstructionDetail::Donaldson { mirrored, fired, sweeps } => {
                    println!(
                        "  embedding obstruction{}: {}",
                        if *mirrored { " (on the mirror)" } else { "" },
                        if *fired { "no embedding for any divisor; lower bound 2" } else { "an embedding exists" },
                    );
                    for (si, side) in sweeps.iter().enumerate() {
                        if sweeps.len() > 1 {
                            println!("    form {} of {}:", si + 1, sweeps.len());
                        }
                        for s in side {
                            match &s.witness {
                                Some(w) => {
                                    println!("    l = {}: embeddable ({} nodes), witness:", s.ell, s.nodes);
                                    for row in w {
                                        println!("      {row:?}");
                                    }
                                }
                                None => println!(
                                    "    l = {}: exhausted after {} nodes{}",
                                    s.ell,
                                    s.nodes,
                                    if s.capped { " (node cap hit)" } else { "" },
                                ),
                            }
                        }
                    }
                }
                ObstructionDetail::Moebius { order, q, fired } => println!(
                    "  linking form on Z_{order} ~ {q}/{order}: {}",
                    if *fired { "obstructed; lower bound 2" } else { "passes" },
                ),
                ObstructionDetail::Skipped { reason } => println!("  obstruction skipped: {reason}"),
                ObstructionDetail::None => {}
            }
            for s in &r.derivation {
                println!("  {s}");
            }
            match r.gamma4 {
                Some(v) => println!("  gamma4 = {v}"),
                None => println!("  unresolved: [{}, {:?}]", r.lower, r.upper),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Embed { gram, target_rank, node_cap } => {
            let text = std::fs::read_to_string(&gram)
                .with_context(|| format!("reading {}", gram.display()))?;
            let m = IntMat::parse_text(&text).context("parsing gram matrix")?;
            let problem = EmbeddingProblem::new(m, target_rank)?;
            let result = embed_with_cap(&problem, node_cap);
            match result.status {
                EmbeddingStatus::Embeddable(w) => {
                    println!("embeddable ({} nodes searched)", result.nodes_searched);
                    for row in &w.0 {
                        println!("{row:?}");
                    }
                }
                EmbeddingStatus::NotEmbeddable => {
                    println!("not embeddable; exhausted after {} nodes", result.nodes_searched);
                }
                EmbeddingStatus::ResourceExhausted => {
                    println!("undecided: node cap hit after {} nodes", result.nodes_searched);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
