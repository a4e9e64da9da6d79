use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dilation_core::criteria::DEFAULT_RESOLUTION;
use dilation_core::scalar::Mode;

#[derive(Debug, Parser)]
#[command(
    name = "dilation-lab",
    version,
    about = "Diagnostics for power dilation systems {f(z^k)} in Dirichlet-type spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Weight parameter t of D_t (defaults to the input file's t, then 0).
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,

    /// Arithmetic mode; inputs are converted when it differs from the file.
    #[arg(long)]
    pub mode: Option<Mode>,

    /// Output directory for reports and CSV data.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,

    /// Error bounds above this make a vanishing verdict inconclusive.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: f64,

    /// Timestamp recorded in the manifest (seconds since the epoch).
    /// Falls back to SOURCE_DATE_EPOCH, then the current time.
    #[arg(long)]
    pub timestamp: Option<u64>,

    /// Run the data-parallel kernels on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Blaschke,
    Monomial,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a coefficient file for a fixture.
    Gen {
        kind: GenKind,
        /// Blaschke parameter a (real part): integer, decimal, or p/q.
        #[arg(long, default_value = "1/2", allow_negative_numbers = true)]
        a: String,
        /// Imaginary part of a.
        #[arg(long, default_value = "0", allow_negative_numbers = true)]
        a_im: String,
        /// Blaschke truncation: terms up to z^(2^M).
        #[arg(long)]
        m: Option<u32>,
        /// Monomial degree.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Monomial coefficient (real part).
        #[arg(long, default_value = "1", allow_negative_numbers = true)]
        c: String,
        /// Imaginary part of the monomial coefficient.
        #[arg(long, default_value = "0", allow_negative_numbers = true)]
        c_im: String,
        /// Random fixtures: degree cap.
        #[arg(long, default_value_t = 8)]
        degree_cap: usize,
        /// Random fixtures: number of nonzero coefficients.
        #[arg(long, default_value_t = 3)]
        support: usize,
        /// Random fixtures: integer coefficient range in exact mode.
        #[arg(long, default_value_t = 3)]
        range: i64,
        /// Random fixtures: force a_1 != 0.
        #[arg(long)]
        leading: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file name inside --out.
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Gram matrix of {f(z^k)}_{k <= K} with tail bounds (CSV and JSON).
    Gram {
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        k_cap: usize,
        #[arg(long)]
        degree_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Orthogonality test of the dilation system.
    Ortho {
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        k_cap: usize,
        #[arg(long)]
        degree_cap: Option<usize>,
        /// Pair cap of the monomial diagnostic reported for t != 0.
        #[arg(long)]
        pairs_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Constant-modulus test of the Bohr lift B_t f.
    Inner {
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        pairs_cap: usize,
        #[arg(long)]
        degree_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare |F_tau| = const with F_{tau^2} conj(F) = const.
    TauSym {
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        pairs_cap: usize,
        /// `star`, `ones`, or comma-separated radii for the leading primes.
        #[arg(long, default_value = "star")]
        tau: String,
        #[arg(long)]
        degree_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Sampled symbol test for Riesz and unconditional bases.
    RieszProbe {
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = dilation_core::basis::DEFAULT_FLOOR)]
        floor: f64,
        /// Histogram bins for the modulus CSV.
        #[arg(long, default_value_t = 32)]
        bins: usize,
        #[arg(long)]
        degree_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Bessel ratios on monomial probes.
    FrameBounds {
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        k_cap: usize,
        /// Largest probe degree (defaults to the K cap).
        #[arg(long)]
        probes: Option<usize>,
        /// Prime of the z^(p^m) ladder.
        #[arg(long, default_value_t = 2)]
        ladder_prime: u64,
        /// `A,B`: use the smallest prime above (A/2B)^(1/t) instead.
        #[arg(long)]
        ladder_threshold: Option<String>,
        #[arg(long)]
        degree_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve sum_k c_k f(z^k) = g for c_1..c_K.
    OmegaSolve {
        input: PathBuf,
        /// Coefficient file of g.
        #[arg(long)]
        rhs: PathBuf,
        #[arg(long, default_value_t = 8)]
        k_cap: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Moment problem T z^k = lambda_k f(z^k) from an input JSON.
    Moment {
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = dilation_core::basis::DEFAULT_FLOOR)]
        floor: f64,
        /// Override the input's k_cap.
        #[arg(long)]
        k_cap: Option<usize>,
        /// Override the input's degree_cap.
        #[arg(long)]
        degree_cap: Option<usize>,
        /// Accept f with ||f||_t != 1.
        #[arg(long)]
        skip_norm_check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Norms ||f(z^k)||_t for k <= K.
    NormProfile {
        input: PathBuf,
        #[arg(long, default_value_t = 16)]
        k_cap: usize,
        #[arg(long)]
        degree_cap: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Gen { common, .. }
            | Command::Gram { common, .. }
            | Command::Ortho { common, .. }
            | Command::Inner { common, .. }
            | Command::TauSym { common, .. }
            | Command::RieszProbe { common, .. }
            | Command::FrameBounds { common, .. }
            | Command::OmegaSolve { common, .. }
            | Command::Moment { common, .. }
            | Command::NormProfile { common, .. } => common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen { .. } => "gen",
            Command::Gram { .. } => "gram",
            Command::Ortho { .. } => "ortho",
            Command::Inner { .. } => "inner",
            Command::TauSym { .. } => "tau-sym",
            Command::RieszProbe { .. } => "riesz-probe",
            Command::FrameBounds { .. } => "frame-bounds",
            Command::OmegaSolve { .. } => "omega-solve",
            Command::Moment { .. } => "moment",
            Command::NormProfile { .. } => "norm-profile",
        }
    }
}
