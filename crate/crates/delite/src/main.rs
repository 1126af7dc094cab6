use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use delite::cli::{self, Format};
use delite::reason::Mode;

#[derive(Parser)]
#[command(name = "delite", version, about = "Defeasible DL-Lite_R reasoner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cautious,
    Brave,
}

#[derive(Subcommand)]
enum Command {
    /// Validate, normalize and classify a knowledge base.
    Check {
        file: PathBuf,
        /// Also print the normalization trace.
        #[arg(long)]
        explain: bool,
    },
    /// Compile a knowledge base to its datalog program.
    Compile {
        file: PathBuf,
        /// Write the program here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Enumerate the answer sets with their exception sets.
    Models {
        file: PathBuf,
        /// Stop after this many answer sets.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Decide entailment of a ground assertion, e.g. "DeptMember(alice)".
    Entail {
        file: PathBuf,
        assertion: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Cautious)]
        mode: ModeArg,
    },
    /// Certain answers of a conjunctive query, e.g.
    /// "?(x) :- DeptMember(x), hasCourse(x,y)."
    Query {
        file: PathBuf,
        query: String,
        /// Skolem-term depth for query matching.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Differential testing: random knowledge bases, oracle vs pipeline.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format: Format = cli.format.into();
    let outcome = match cli.command {
        Command::Check { file, explain } => cli::cmd_check(&file, explain, format),
        Command::Compile { file, out } => cli::cmd_compile(&file, out.as_ref(), format),
        Command::Models { file, limit } => cli::cmd_models(&file, limit, format),
        Command::Entail { file, assertion, mode } => {
            let mode = match mode {
                ModeArg::Cautious => Mode::Cautious,
                ModeArg::Brave => Mode::Brave,
            };
            cli::cmd_entail(&file, &assertion, mode, format)
        }
        Command::Query { file, query, depth } => cli::cmd_query(&file, &query, depth, format),
        Command::Fuzz { seed, count } => cli::cmd_fuzz(seed, count, format),
    };
    print!("{}", outcome.stdout);
    ExitCode::from(outcome.exit_code as u8)
}
