use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use degree_nli::config::Config;
use degree_nli::grammar::{parse, preprocess, Lexicon};
use degree_nli::harness::report::{write_reports, ReportOptions};
use degree_nli::harness::{self, evaluate, load_dataset, EvalOptions};
use degree_nli::pipeline::{analyze_with, decide, Label, Problem, Verdict};
use degree_nli::prover::external::ExternalProver;
use degree_nli::prover::tptp_read::read_problem;
use degree_nli::prover::{prove, Outcome};

/// Natural-language inference for comparatives: parse, build degree
/// semantics, and prove entailment or contradiction.
#[derive(Parser)]
#[command(name = "degree-nli", version)]
struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the best derivation of a sentence.
    Parse {
        sentence: String,
        /// Print every derivation found, best first.
        #[arg(long)]
        all: bool,
    },
    /// Print the at-issue and presupposed meanings and the flattened formulas.
    Semantics { sentence: String },
    /// Decide a single problem.
    Prove {
        #[command(flatten)]
        problem: SingleProblem,
        #[command(flatten)]
        checks: Checks,
        #[arg(long)]
        dump_tree: bool,
        #[arg(long)]
        dump_semantics: bool,
        /// Print the refutation found.
        #[arg(long)]
        trace: bool,
    },
    /// Evaluate a JSONL dataset and write reports.
    Eval {
        dataset: PathBuf,
        /// Report directory (defaults to the configured output directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        checks: Checks,
    },
    /// Export TPTP problems for a dataset without proving.
    Tptp {
        dataset: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in prover on a TPTP file and print an SZS status.
    #[command(hide = true)]
    ProveTptp { file: PathBuf },
}

#[derive(Args)]
struct SingleProblem {
    /// Premise sentence (repeatable, in order).
    #[arg(long = "premise", short = 'p', required = true)]
    premises: Vec<String>,
    #[arg(long, short = 'H')]
    hypothesis: String,
    /// Gold label, if known.
    #[arg(long)]
    gold: Option<Label>,
}

#[derive(Args)]
struct Checks {
    /// Write one TPTP file per proof direction here.
    #[arg(long)]
    tptp_out: Option<PathBuf>,
    /// Look for finite countermodels to every proof found.
    #[arg(long)]
    oracle_check: bool,
    /// Re-prove every direction with this command (`{file}` is the problem path).
    #[arg(long)]
    external_prover: Option<String>,
}

impl Checks {
    fn options(&self, config: &Config) -> EvalOptions {
        let external = self.external_prover.clone().or_else(|| config.external_command.clone()).map(|cmd| {
            let mut p = ExternalProver::new(cmd);
            p.theorem_marker = config.external_marker.clone();
            p.timeout = config.external_timeout;
            p
        });
        let tptp_dir = self
            .tptp_out
            .clone()
            .or_else(|| external.as_ref().map(|_| config.output_dir.join("tptp")));
        EvalOptions { oracle_check: self.oracle_check, tptp_dir, external }
    }
}

/// Failures that end the run with a nonzero status.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Fatal> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Parse { sentence, all } => Ok(print_parse(&sentence, all)),
        Command::Semantics { sentence } => Ok(print_semantics(&sentence, &config)),
        Command::Prove { problem, checks, dump_tree, dump_semantics, trace } => {
            let p = Problem {
                id: "cli".into(),
                premises: problem.premises,
                hypothesis: problem.hypothesis,
                gold: problem.gold.unwrap_or(Label::Unknown),
            };
            let v = decide(&p, &config);
            print_verdict(&v, problem.gold.is_some(), dump_tree, dump_semantics, trace);
            let opts = checks.options(&config);
            if opts.oracle_check {
                for (d, s) in harness::oracle_check(&v, &config) {
                    println!("oracle {d:?}: {s:?}");
                }
            }
            if let Some(dir) = &opts.tptp_dir {
                std::fs::create_dir_all(dir).map_err(|e| Fatal(format!("{}: {e}", dir.display())))?;
                for f in harness::write_tptp(&v, dir)? {
                    println!("wrote {}", f.display());
                }
            }
            if opts.external.is_some() {
                let data = harness::Dataset { name: "cli".into(), entries: vec![cli_entry(p)] };
                let e = evaluate(&data, &config, &opts)?;
                for (d, s) in &e.rows[0].external {
                    println!("external {d:?}: {s:?}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { dataset, out, checks } => {
            let data = load_dataset(&dataset)?;
            let opts = checks.options(&config);
            let e = evaluate(&data, &config, &opts)?;
            let dir = out.unwrap_or_else(|| config.output_dir.clone());
            let written = write_reports(&e, &dir, ReportOptions { timings: config.report_timings })?;
            let m = &e.metrics;
            println!("{}: accuracy {:.4} ({}/{}), errors {}", e.dataset, m.accuracy, m.correct, m.total, m.errors);
            let tptp = e.rows.iter().map(|r| r.tptp_files.len()).sum::<usize>();
            if tptp > 0 {
                println!("wrote {tptp} TPTP files");
            }
            for f in written {
                println!("wrote {}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Tptp { dataset, out } => {
            let data = load_dataset(&dataset)?;
            let dir = out.unwrap_or_else(|| config.output_dir.join("tptp"));
            std::fs::create_dir_all(&dir).map_err(|e| Fatal(format!("{}: {e}", dir.display())))?;
            let mut count = 0;
            for entry in &data.entries {
                match degree_nli::pipeline::prepare(&entry.problem, &config) {
                    Ok(prepared) => count += export(&entry.problem.id, &prepared, &dir)?,
                    Err(e) => eprintln!("{}: {e}", entry.problem.id),
                }
            }
            println!("wrote {count} TPTP files to {}", dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::ProveTptp { file } => {
            let text = std::fs::read_to_string(&file).map_err(|e| Fatal(format!("{}: {e}", file.display())))?;
            let problem = read_problem(&text)?;
            let attempt = prove(&problem, &config.budget)?;
            let status = match attempt.outcome {
                Outcome::Proved(_) => "Theorem",
                Outcome::Saturated => "GaveUp",
                Outcome::Exhausted => "ResourceOut",
            };
            println!("% SZS status {status} for {}", file.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cli_entry(problem: Problem) -> harness::Entry {
    harness::Entry { problem, line: 1, metadata: Default::default() }
}

fn export(id: &str, prepared: &degree_nli::pipeline::Prepared, dir: &Path) -> Result<usize, Fatal> {
    use degree_nli::prover::tptp::problem_to_tptp;
    for (name, p) in [("hypothesis", &prepared.hypothesis), ("negation", &prepared.negation)] {
        let path = dir.join(format!("{}.{name}.p", harness::file_stem(id)));
        std::fs::write(&path, problem_to_tptp(&format!("{id} ({name})"), p))
            .map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
    }
    Ok(2)
}

fn print_parse(sentence: &str, all: bool) -> ExitCode {
    let lex = Lexicon::builtin();
    let result = preprocess(sentence, lex).and_then(|tokens| parse(&tokens, lex));
    match result {
        Ok(derivations) if !derivations.is_empty() => {
            for (i, d) in derivations.iter().enumerate().take(if all { usize::MAX } else { 1 }) {
                if all {
                    println!("# derivation {} (cost {})", i + 1, d.cost());
                }
                println!("{d}");
            }
            ExitCode::SUCCESS
        }
        Ok(_) => {
            eprintln!("no derivation for `{sentence}`");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn print_semantics(sentence: &str, config: &Config) -> ExitCode {
    match analyze_with(sentence, Lexicon::builtin(), config.next_k_parses) {
        Ok(a) => {
            println!("at-issue:       {}", a.sem.at_issue);
            println!("presupposition: {}", a.sem.presupposition);
            println!("at-issue formula:       {}", a.at_issue);
            println!("presupposition formula: {}", a.presupposition);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}

fn print_verdict(v: &Verdict, has_gold: bool, dump_tree: bool, dump_semantics: bool, trace: bool) {
    if let Some(p) = &v.prepared {
        for a in &p.analyses {
            if dump_tree || dump_semantics {
                println!("== {}", a.sentence);
            }
            if dump_tree {
                println!("{}", a.derivation);
            }
            if dump_semantics {
                println!("at-issue:       {}", a.at_issue);
                println!("presupposition: {}", a.presupposition);
            }
        }
        if dump_semantics {
            for (name, f) in &p.axioms {
                println!("axiom {name}: {f}");
            }
        }
    }
    match &v.error {
        Some(e) => println!("answer: error ({e})"),
        None => println!("answer: {}", v.predicted()),
    }
    if has_gold {
        println!("gold: {} ({})", v.gold, if v.correct() { "correct" } else { "incorrect" });
    }
    if trace {
        if let Some(t) = v.attempts.as_ref().and_then(|(y, n)| y.trace().or(n.trace())) {
            print!("{t}");
        }
    }
}
