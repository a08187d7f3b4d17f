use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "arad",
    version,
    about = "A-numerical radius, A-seminorms and a checkable catalog of operator-matrix inequalities"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// First seed of a fuzz campaign.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative rank tolerance for the weight; overrides the file's `tol`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Angular grid points on [0, 2 pi) for every sweep.
    #[arg(long, global = true, default_value_t = 1024)]
    pub grid: usize,
    /// Also write the JSON report (for `range`: the boundary data) here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one quantity for an operator of an instance file.
    Compute {
        file: PathBuf,
        quantity: Quantity,
        /// Operator name; defaults to `T`, or to the only operator.
        #[arg(long = "op")]
        op: Option<String>,
    },
    /// Evaluate catalog relations on an instance file.
    Check {
        file: PathBuf,
        /// Relation ids (R1..R31), or `all`.
        #[arg(default_value = "all")]
        relations: Vec<String>,
        #[command(flatten)]
        reading: ReadingOpts,
        /// Scalar z1 of R13, e.g. `1+0i`.
        #[arg(long, allow_hyphen_values = true)]
        z1: Option<String>,
        /// Scalar z2 of R13, e.g. `-1+0i`.
        #[arg(long, allow_hyphen_values = true)]
        z2: Option<String>,
    },
    /// Run the catalog over generated instances, shrinking any failure.
    Fuzz {
        /// Instance profile.
        #[arg(long, default_value = "default")]
        profile: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Comma-separated relation ids; all by default.
        #[arg(long, value_delimiter = ',')]
        relations: Vec<String>,
        /// Directory receiving witness instance files.
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
        /// Evaluation budget of the shrinker per failure.
        #[arg(long, default_value_t = 500)]
        max_shrink: usize,
        #[command(flatten)]
        reading: ReadingOpts,
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
    /// Export boundary points of the A-numerical range.
    Range {
        file: PathBuf,
        #[arg(long = "op")]
        op: Option<String>,
        #[arg(long, default_value_t = 720)]
        points: usize,
        /// Output format; inferred from the `--out` extension when omitted.
        #[arg(long)]
        format: Option<RangeFormat>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Seminorm,
    Radius,
    Crawford,
    #[value(name = "m_a", alias = "m-a")]
    MA,
    Sharp,
    Member,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Seminorm => "seminorm",
            Quantity::Radius => "radius",
            Quantity::Crawford => "crawford",
            Quantity::MA => "m_a",
            Quantity::Sharp => "sharp",
            Quantity::Member => "member",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormReadingArg {
    ASeminorm,
    Plain,
}

#[derive(Debug, Args)]
pub struct ReadingOpts {
    /// How unsubscripted norms are read in R17 and R18.
    #[arg(long, value_enum, default_value = "a-seminorm")]
    pub norm_reading: NormReadingArg,
    /// Read P in R29 literally as T1#T1 + T2T2#.
    #[arg(long)]
    pub r29_literal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Flip the sign of every slack.
    NegateSlack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RangeFormat {
    Csv,
    Json,
}
