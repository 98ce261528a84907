use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dycklab::measures::MeasureKind;

pub const DEFAULT_SEED: u64 = 20261016;

#[derive(Debug, Parser)]
#[command(name = "dycklab", version, about = "Exact counting, measures, holonomies and samplers for the m-Dyck shift")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count admissible, balanced or Dyck words, or print the profile table.
    Count(CountArgs),
    /// Exact cylinder measure of a word.
    Measure(MeasureArgs),
    /// Entropy constants, conditional entropies and block entropies.
    #[command(subcommand)]
    Entropy(EntropyCommand),
    /// Draw sample windows.
    Sample(SampleArgs),
    /// Block swaps, prefix swaps and the surgery map.
    #[command(subcommand)]
    Holonomy(HolonomyCommand),
    /// Run verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Non-synchronization witness for a word.
    Witness(WitnessArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
    pub m: u32,
    #[arg(long, env = "DYCKLAB_N")]
    pub n: usize,
    /// Count balanced words only.
    #[arg(long, conflicts_with_all = ["dyck", "table"])]
    pub balanced: bool,
    /// Count Dyck (minimal balanced) words only.
    #[arg(long, conflicts_with = "table")]
    pub dyck: bool,
    /// Print the table of counts by unmatched opener/closer numbers.
    #[arg(long)]
    pub table: bool,
    /// Also enumerate every word and fail if the counts disagree.
    #[arg(long)]
    pub brute: bool,
    #[arg(long, value_enum, env = "DYCKLAB_FORMAT", default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long, env = "DYCKLAB_MEASURE")]
    pub measure: MeasureKind,
    #[arg(long, env = "DYCKLAB_WORD", allow_hyphen_values = true)]
    pub word: String,
    #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
    pub m: u32,
    /// Also check both marginalization identities at this word.
    #[arg(long)]
    pub consistency: bool,
    #[arg(long, value_enum, env = "DYCKLAB_FORMAT", default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum EntropyCommand {
    /// Entropy of the walk-assembled measure and topological entropy.
    Constants {
        #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
        m: u32,
        #[arg(long, value_enum, env = "DYCKLAB_FORMAT", default_value_t = Format::Text)]
        format: Format,
    },
    /// Conditional entropy of the next symbol given n past symbols.
    Conditional {
        #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
        m: u32,
        #[arg(long, env = "DYCKLAB_N")]
        n: usize,
        /// Condition on this particular past instead of averaging.
        #[arg(long)]
        past: Option<String>,
        /// Emit every n from 1 up to the requested one.
        #[arg(long)]
        curve: bool,
        #[arg(long, value_enum, env = "DYCKLAB_FORMAT", default_value_t = Format::Text)]
        format: Format,
    },
    /// Block entropies H_n and H_n/n for n = 1..max-n.
    Block {
        #[arg(long, env = "DYCKLAB_MEASURE")]
        measure: MeasureKind,
        #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
        m: u32,
        #[arg(long, env = "DYCKLAB_MAX_N")]
        max_n: usize,
        #[arg(long, value_enum, env = "DYCKLAB_FORMAT", default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
    pub m: u32,
    #[arg(long, env = "DYCKLAB_MEASURE")]
    pub measure: MeasureKind,
    /// Two-sided kinds sample coordinates -N..=N, the one-sided kind 0..N.
    #[arg(long, env = "DYCKLAB_WINDOW")]
    pub window: i64,
    #[arg(long, env = "DYCKLAB_COUNT", default_value_t = 1)]
    pub count: u64,
    #[arg(long, env = "DYCKLAB_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Explicit coordinate budget before the tail draws take over.
    #[arg(long, env = "DYCKLAB_BUDGET")]
    pub budget: Option<u64>,
    #[arg(long, value_enum, env = "DYCKLAB_FORMAT", default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum HolonomyCommand {
    /// Check that u·w·v and u·w'·v are admissible together and have equal measures.
    Swap {
        #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
        m: u32,
        #[arg(long, default_value = "")]
        u: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        w_prime: String,
        #[arg(long, default_value = "")]
        v: String,
    },
    /// Exhaustive block-swap invariance over equivalent pairs and contexts.
    Suite {
        #[arg(long, env = "DYCKLAB_MEASURE")]
        measure: MeasureKind,
        #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 5)]
        max_block: usize,
        #[arg(long, default_value_t = 3)]
        max_context: usize,
    },
    /// One-sided prefix swap and its continuation check.
    Prefix {
        #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
        m: u32,
        #[arg(long)]
        u: String,
        #[arg(long)]
        u_prime: String,
        #[arg(long, default_value_t = 6)]
        max_continuation: usize,
    },
    /// Apply the shift-t surgery to a word with no unmatched closers.
    Xi {
        #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
        m: u32,
        #[arg(long)]
        b: String,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        t: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Counting,
    Series,
    Measures,
    Holonomy,
    Entropy,
    Sampling,
    Sync,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] =
        [Suite::Counting, Suite::Series, Suite::Measures, Suite::Holonomy, Suite::Entropy, Suite::Sampling, Suite::Sync];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Counting => "counting",
            Suite::Series => "series",
            Suite::Measures => "measures",
            Suite::Holonomy => "holonomy",
            Suite::Entropy => "entropy",
            Suite::Sampling => "sampling",
            Suite::Sync => "sync",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, env = "DYCKLAB_SUITE", default_value_t = Suite::All)]
    pub suite: Suite,
    /// Restrict to these alphabet sizes (comma separated).
    #[arg(long, env = "DYCKLAB_M", value_delimiter = ',')]
    pub m: Vec<u32>,
    /// Override the word-length bound of the enumeration checks.
    #[arg(long, env = "DYCKLAB_MAX_N")]
    pub max_n: Option<usize>,
    #[arg(long, env = "DYCKLAB_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Override the sample count of the chi-square checks.
    #[arg(long, env = "DYCKLAB_SAMPLES")]
    pub samples: Option<u64>,
    #[arg(long, env = "DYCKLAB_JOBS")]
    pub jobs: Option<usize>,
    /// Read fixtures from this directory instead of the built-in copies.
    #[arg(long, env = "DYCKLAB_FIXTURES")]
    pub fixtures: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, env = "DYCKLAB_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long, env = "DYCKLAB_WORD")]
    pub word: String,
    #[arg(long, env = "DYCKLAB_M", default_value_t = 2)]
    pub m: u32,
    #[arg(long, value_enum, env = "DYCKLAB_FORMAT", default_value_t = Format::Text)]
    pub format: Format,
}
