// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

mod commands;
mod input;

use std::io::Write;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use cayley_core::ball::DEFAULT_MEMORY_BUDGET;
use cayley_core::rational::Rational;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "cayley",
    version,
    about = "Exact growth, boundary and Følner computations on Cayley graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Group descriptor: z:<d>, free:<rank>, dinf, heis or lamplighter.
    #[arg(long, global = true)]
    pub group: Option<String>,

    /// Output format. Defaults to json, or text for `suite`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<NonZeroUsize>,

    /// Largest number of elements a ball table may hold.
    #[arg(long, global = true, env = "CAYLEY_MEMORY_BUDGET", default_value_t = DEFAULT_MEMORY_BUDGET)]
    pub memory_budget: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// A finite set: `--omega a..b` (inclusive, `z:1` only) or a file of hex
/// element keys, one per line.
#[derive(Args, Debug, Clone)]
pub struct OmegaArgs {
    #[arg(long, conflicts_with = "omega_file")]
    pub omega: Option<String>,
    #[arg(long)]
    pub omega_file: Option<PathBuf>,
}

fn rational(text: &str) -> Result<Rational, String> {
    cayley_core::rational::parse(text).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ball and sphere sizes and length sums up to a radius.
    Growth {
        #[arg(long)]
        radius: u32,
    },
    /// The least radius whose ball has more than `v` elements.
    Phi {
        #[arg(long, value_parser = rational)]
        v: Rational,
    },
    /// Average word length over the ball of a radius, as an exact fraction.
    AvgLength {
        #[arg(long)]
        radius: u32,
    },
    /// The inner boundary of a set.
    Boundary {
        #[command(flatten)]
        omega: OmegaArgs,
    },
    /// Checks one isoperimetric inequality on a set.
    Check {
        #[arg(long)]
        form: String,
        #[arg(long, value_parser = rational)]
        alpha: Option<Rational>,
        #[arg(long, value_parser = rational)]
        epsilon: Option<Rational>,
        #[command(flatten)]
        omega: OmegaArgs,
    },
    /// Builds a transport ledger for a set and checks lemmas on it.
    Transport {
        #[command(flatten)]
        omega: OmegaArgs,
        /// Ledger radius. Defaults to Φ[(1 + α)|Ω|] when --alpha is given, else 1.
        #[arg(long)]
        radius: Option<u32>,
        /// spheres, balls, transport, counting, ray-lower, conclude, fiber or all.
        #[arg(long, default_value = "all")]
        lemma: String,
        #[arg(long, value_parser = rational)]
        alpha: Option<Rational>,
    },
    /// Følner function values, exact by search or bounded by a family.
    Folner {
        /// A single n.
        #[arg(long, conflicts_with = "n_max")]
        n: Option<u64>,
        /// All n from 1 to this.
        #[arg(long)]
        n_max: Option<u64>,
        /// Largest set size searched.
        #[arg(long, default_value_t = 12)]
        cap: usize,
        /// Skip the search and report only the family bound.
        #[arg(long)]
        family_only: bool,
    },
    /// Converts a lower bound between its boundary-ratio and Følner forms.
    Convert {
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long, value_parser = rational)]
        c: Rational,
        #[arg(long, value_parser = rational, default_value = "0")]
        alpha: Rational,
        #[arg(long, value_parser = rational)]
        rho: Option<Rational>,
        /// Defaults to the size of the generating set of --group.
        #[arg(long)]
        generating_set_size: Option<usize>,
    },
    /// Checks |∂Ω|/|Ω| ≥ c/Φ[(1 + α)|Ω|] on every set of a scope.
    Certify {
        #[arg(long, value_parser = rational)]
        c: Rational,
        #[arg(long, value_parser = rational, default_value = "0")]
        alpha: Rational,
        /// ball-subsets:<radius> or connected:<max size>.
        #[arg(long)]
        scope: String,
    },
    /// Log-ratio estimate of the optimal isoperimetric constant.
    Quotient {
        #[arg(long, default_value_t = 8)]
        horizon: u32,
        /// Search cap for the Følner records.
        #[arg(long, default_value_t = 7)]
        cap: usize,
    },
    /// Runs the acceptance battery.
    Suite,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    CscToFolner,
    FolnerToCsc,
}

/// What a command produced: the report and whether a checked statement
/// was falsified.
pub struct Report {
    pub body: String,
    pub falsified: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.get())
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let report = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &report.body),
        None => std::io::stdout().write_all(report.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(1);
    }
    if report.falsified {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
