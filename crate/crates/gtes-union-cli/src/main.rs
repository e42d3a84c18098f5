use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gtes_union::decide_union;
use gtes_union_cli::fuzz::{fuzz_run, FuzzParams};
use gtes_union_cli::report::Report;
use gtes_union_cli::{corpus, parse_problem};

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Decides whether the union of the congruences generated by two ground
/// term equation systems is itself a congruence.
#[derive(Parser)]
#[command(name = "decide", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Problem file to decide.
    file: Option<PathBuf>,

    /// Emit the machine-readable report on stdout.
    #[arg(long)]
    json: bool,

    /// More detailed failure diagnostics.
    #[arg(long)]
    explain: bool,

    /// Cross-check the verdict against the brute-force oracle.
    #[arg(long)]
    oracle_check: bool,

    /// Height bound for the oracle search.
    #[arg(long, default_value_t = 3)]
    max_height: usize,

    /// Print the auxiliary graph as an annotated edge list.
    #[arg(long)]
    dump_aux: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the eight bundled examples and compare against their known
    /// verdicts.
    Corpus {
        #[arg(long)]
        oracle_check: bool,
        #[arg(long, default_value_t = 3)]
        max_height: usize,
    },
    /// Generate random instances and cross-check the decision procedure.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Some(Command::Corpus {
            oracle_check,
            max_height,
        }) => run_corpus(oracle_check, max_height),
        Some(Command::Fuzz { seed, count }) => run_fuzz(seed, count),
        None => match cli.run.file {
            Some(_) => run_file(&cli.run),
            None => {
                eprintln!("error: expected a problem file or a subcommand (see --help)");
                EXIT_INPUT
            }
        },
    };
    ExitCode::from(code)
}

fn run_file(args: &RunArgs) -> u8 {
    let path = args.file.as_ref().expect("checked by caller");
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: cannot read {}: {err}", path.display());
            return EXIT_INPUT;
        }
    };
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(err) => {
            eprintln!("error: {}: {err}", path.display());
            return EXIT_INPUT;
        }
    };
    if problem.duplicates > 0 {
        eprintln!(
            "warning: {} duplicate equation(s) dropped",
            problem.duplicates
        );
    }

    let start = Instant::now();
    let decision = decide_union(&problem.signature, &problem.e, &problem.f);
    let millis = start.elapsed().as_millis() as u64;
    let mut report = Report::from_decision(&decision, millis);

    if args.oracle_check {
        if let Err(err) =
            report.run_oracle_check(&problem.signature, &problem.e, &problem.f, args.max_height)
        {
            eprintln!("error: oracle check failed: {err}");
            return EXIT_INTERNAL;
        }
    }

    if args.dump_aux {
        print!("{}", decision.cad.aux.dump());
    }
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!(
            "{}",
            report.render_text(decision.verdict.case.which_total, args.explain)
        );
    }
    if report.verdict {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

fn run_corpus(oracle_check: bool, max_height: usize) -> u8 {
    match corpus::run_corpus(oracle_check, max_height) {
        Ok(summary) => {
            for r in &summary.results {
                println!(
                    "{}: verdict={} case={} {}",
                    r.name,
                    if r.verdict { "yes" } else { "no" },
                    r.case,
                    if r.matches { "ok" } else { "MISMATCH" }
                );
            }
            println!("{}/8 match", summary.matched);
            if oracle_check {
                println!("{} oracle disagreements", summary.oracle_disagreements);
            }
            if summary.matched == 8 && summary.oracle_disagreements == 0 {
                EXIT_YES
            } else {
                EXIT_NO
            }
        }
        Err(corpus::CorpusError::Parse { name, source }) => {
            eprintln!("error: corpus entry {name}: {source}");
            EXIT_INPUT
        }
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INTERNAL
        }
    }
}

fn run_fuzz(seed: u64, count: usize) -> u8 {
    let summary = fuzz_run(seed, count, &FuzzParams::default());
    for failure in &summary.failures {
        println!(
            "failure: seed={} index={} {}",
            failure.seed, failure.index, failure.reason
        );
    }
    println!(
        "cases: unary={} both-total={} one-total={} neither-total={} (overlap checked {}, yes {})",
        summary.case_counts[0],
        summary.case_counts[1],
        summary.case_counts[2],
        summary.case_counts[3],
        summary.overlap_checked,
        summary.yes_verdicts
    );
    println!("{} ok", summary.ok);
    if summary.failures.is_empty() {
        EXIT_YES
    } else {
        EXIT_NO
    }
}
