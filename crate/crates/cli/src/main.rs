use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bandkit::finite::{eval_word, free_band, free_band_size, induced_by_word};
use bandkit::{
    associated_permutation, check_scheme, solve_scheme, Budget, Error, FiniteBand, Letter, Scheme,
    Syntax, Variety, Word, WordOperation,
};
use clap::{Args, Parser, Subcommand};

/// Canonical forms, identity checks, free bands and n-schemes for varieties of bands.
#[derive(Parser)]
#[command(name = "bandkit", version)]
struct Cli {
    /// Cap on table cells, closure elements and assignments per check.
    #[arg(long, global = true, env = "BANDKIT_BUDGET")]
    budget: Option<u128>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct VarietyArg {
    /// Variety, e.g. `BAND`, `A3`, `B2~`, `A3+B4~`.
    #[arg(long, default_value = "BAND")]
    variety: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical invariant of a word.
    Canon {
        word: String,
        #[command(flatten)]
        variety: VarietyArg,
    },
    /// Decide whether an identity holds; prints HOLDS or FAILS.
    Check {
        u: String,
        v: String,
        #[command(flatten)]
        variety: VarietyArg,
    },
    /// Build the relatively free band on k generators.
    Freeband {
        #[arg(short = 'k')]
        k: usize,
        #[command(flatten)]
        variety: VarietyArg,
        /// Only print the number of elements.
        #[arg(long, conflicts_with = "table")]
        count_only: bool,
        /// Write the multiplication table as a band file.
        #[arg(long, value_name = "FILE")]
        table: Option<PathBuf>,
    },
    /// Check conditions (D), (C1), (C2), essentiality and the associated permutation.
    SchemeVerify {
        file: PathBuf,
        #[command(flatten)]
        variety: VarietyArg,
    },
    /// Find a word the scheme comes from.
    SchemeSolve {
        file: PathBuf,
        #[command(flatten)]
        variety: VarietyArg,
    },
    /// Operations on finite band files.
    #[command(subcommand)]
    Band(BandCommand),
}

#[derive(Subcommand)]
enum BandCommand {
    /// Validate a band file.
    Check { file: PathBuf },
    /// Evaluate a word under an assignment of letters to elements.
    Eval {
        file: PathBuf,
        #[arg(long)]
        word: String,
        /// Comma-separated `letter=element` pairs, elements by index or name.
        #[arg(long)]
        assign: String,
    },
    /// Find a word inducing the operation in an operation file.
    Induced {
        file: PathBuf,
        #[arg(long, value_name = "FILE")]
        op_file: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Budget(String),
    Negative,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = cli.budget.map(Budget::uniform).unwrap_or_default();
    match run(cli.command, &budget) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command, budget: &Budget) -> Outcome {
    match command {
        Command::Canon { word, variety } => {
            let v = parse_variety(&variety)?;
            let w = parse_word(&word)?;
            println!("{}", v.invariant(&w)?.render(Syntax::detect(&word)));
            Ok(())
        }
        Command::Check { u, v, variety } => {
            let var = parse_variety(&variety)?;
            verdict(var.satisfies(&parse_word(&u)?, &parse_word(&v)?)?)
        }
        Command::Freeband {
            k,
            variety,
            count_only,
            table,
        } => {
            let v = parse_variety(&variety)?;
            if k == 0 {
                return Err(Failure::Usage("k must be at least 1".into()));
            }
            if count_only {
                println!("{}", free_band_size(&v, k, budget)?);
                return Ok(());
            }
            let fb = free_band(&v, k, budget)?;
            println!("{}", fb.band.size());
            match table {
                Some(path) => write_file(&path, &fb.band.to_json()),
                None => {
                    for (i, w) in fb.representatives.iter().enumerate() {
                        println!("{i} {}", w.render(Syntax::Letters));
                    }
                    Ok(())
                }
            }
        }
        Command::SchemeVerify { file, variety } => {
            let v = parse_variety(&variety)?;
            let scheme = Scheme::from_json(&read_file(&file)?)?;
            scheme_verify(&scheme, &v)
        }
        Command::SchemeSolve { file, variety } => {
            let v = parse_variety(&variety)?;
            let scheme = Scheme::from_json(&read_file(&file)?)?;
            match solve_scheme(&scheme, &v) {
                Ok(w) => {
                    println!("{}", w.to_tokens());
                    Ok(())
                }
                Err(Error::NoSolution {
                    i,
                    j,
                    entry,
                    minor,
                    variety,
                }) => {
                    println!("NO-SOLUTION");
                    println!(
                        "witness: ({i},{j}) {} ≈ {} fails in {variety}",
                        entry.to_tokens(),
                        minor.to_tokens()
                    );
                    Err(Failure::Negative)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Band(cmd) => band(cmd, budget),
    }
}

fn band(command: BandCommand, budget: &Budget) -> Outcome {
    match command {
        BandCommand::Check { file } => match FiniteBand::from_json(&read_file(&file)?) {
            Ok(b) => {
                println!("OK: band of size {}", b.size());
                Ok(())
            }
            Err(e @ (Error::NotAssociative { .. } | Error::NotIdempotent { .. })) => {
                println!("NOT-A-BAND: {e}");
                Err(Failure::Negative)
            }
            Err(e) => Err(e.into()),
        },
        BandCommand::Eval { file, word, assign } => {
            let b = load_band(&file)?;
            let w = parse_word(&word)?;
            let assignment = parse_assignment(&b, &assign)?;
            println!("{}", eval_word(&b, &w, &assignment)?);
            Ok(())
        }
        BandCommand::Induced { file, op_file } => {
            let b = load_band(&file)?;
            let f = WordOperation::from_json(&b, &read_file(&op_file)?)?;
            match induced_by_word(&b, &f, budget)? {
                Some(w) => {
                    println!("{}", w.render(Syntax::Letters));
                    Ok(())
                }
                None => {
                    println!("NOT-INDUCED");
                    Err(Failure::Negative)
                }
            }
        }
    }
}

fn scheme_verify(scheme: &Scheme, variety: &Variety) -> Outcome {
    let report = check_scheme(scheme, variety)?;
    let status = |ok: bool| if ok { "pass" } else { "fail" };
    println!("D: {}", status(report.dependency));
    println!("C1: {}", status(report.c1));
    println!("C2: {}", status(report.c2));
    for violation in &report.violations {
        println!("  {violation}");
    }
    let essential = scheme.is_essential();
    println!("essential: {essential}");
    let permutation = associated_permutation(scheme, false);
    match &permutation {
        Ok(p) => println!("permutation: {p}"),
        Err(e) => println!("permutation: none ({})", reason(e)),
    }
    if report.passed() && essential && permutation.is_ok() {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn reason(e: &Error) -> String {
    match e {
        Error::NoPermutation(why) => why.clone(),
        e => e.to_string(),
    }
}

fn verdict(holds: bool) -> Outcome {
    if holds {
        println!("HOLDS");
        Ok(())
    } else {
        println!("FAILS");
        Err(Failure::Negative)
    }
}

fn usage(context: &str, e: impl Display) -> Failure {
    Failure::Usage(format!("{context}: {e}"))
}

fn parse_variety(arg: &VarietyArg) -> Result<Variety, Failure> {
    arg.variety.parse().map_err(|e| usage("variety", e))
}

fn parse_word(text: &str) -> Result<Word, Failure> {
    let w: Word = text.parse().map_err(|e| usage("word", e))?;
    if w.is_empty() {
        return Err(Failure::Usage("word: empty word".into()));
    }
    Ok(w)
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(&path.display().to_string(), e))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| usage(&path.display().to_string(), e))
}

fn load_band(path: &Path) -> Result<FiniteBand, Failure> {
    Ok(FiniteBand::from_json(&read_file(path)?)?)
}

fn parse_assignment(band: &FiniteBand, text: &str) -> Result<BTreeMap<Letter, usize>, Failure> {
    let mut out = BTreeMap::new();
    for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| usage("assignment", format!("{pair:?} is not letter=element")))?;
        let letter = match parse_word(name)?.letters() {
            [l] => *l,
            _ => {
                return Err(usage(
                    "assignment",
                    format!("{name:?} is not a single letter"),
                ))
            }
        };
        let value = value.trim();
        let element = match value.parse::<usize>() {
            Ok(e) if e < band.size() => e,
            _ => band
                .element(value)
                .ok_or_else(|| usage("assignment", format!("no element {value:?}")))?,
        };
        out.insert(letter, element);
    }
    Ok(out)
}
