mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use robust_matching::rng::DEFAULT_SEED;

use crate::io::{CliError, Format};

/// Robustness, polarity and embedding analyses for two-sided stable-matching
/// markets. Inputs are versioned JSON (`"schema": 1`); outputs are JSON, CSV
/// or text.
#[derive(Debug, Parser)]
#[command(name = "rmatch", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SeedArg {
    /// Base seed; trial k draws from ChaCha8 stream k of this seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Market given either as a file or as a geometric rank-based market.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct MarketSource {
    /// Market JSON (per-side market profiles).
    #[arg(long = "in", value_name = "MARKET")]
    pub input: Option<PathBuf>,
    /// Geometric market with this many agents per side; needs --base.
    #[arg(long, value_name = "N", requires = "base")]
    pub geometric: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Men,
    Women,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deferred acceptance operator Φ: the male- and female-optimal stable
    /// assignments of an ordinal instance.
    Solve {
        /// Instance JSON (men's and women's ordinal profiles).
        #[arg(long = "in", value_name = "INSTANCE")]
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Brute-force oracle: every stable assignment of an ordinal instance,
    /// found by checking all n! bijections for blocking pairs.
    StableSet {
        #[arg(long = "in", value_name = "INSTANCE")]
        input: PathBuf,
        /// Largest n the enumeration accepts.
        #[arg(long, default_value_t = robust_matching::matching::DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Robustness ξ(U): the minimum consecutive utility ratio over profiles,
    /// agents and both sides, cross-checked by bisection on C using the
    /// adversarial witness search.
    Robustness {
        #[command(flatten)]
        market: MarketSource,
        /// Ratio between consecutive rank utilities of the geometric market.
        #[arg(long)]
        base: Option<f64>,
        /// Lower end of the bisection bracket.
        #[arg(long, default_value_t = 1.0)]
        lo: f64,
        /// Upper end of the bisection bracket [default: 2ξ + 1].
        #[arg(long)]
        hi: Option<f64>,
        /// Bisection tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Adversarial witness for C-robustness: a single-entry perturbation with
    /// factor C that moves one side's ordinal profile, plus the opposite-side
    /// profile on which the stable pair changes.
    Witness {
        #[command(flatten)]
        market: MarketSource,
        #[arg(long)]
        base: Option<f64>,
        /// Perturbation level C ≥ 1.
        #[arg(long = "c", value_name = "C")]
        c: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Critical market for the probabilistic-robustness lower bound and a
    /// Monte Carlo estimate of the stable-pair preservation probability
    /// under the spike sampler with mean (1+ε)C.
    AppendixA {
        /// Agents per side.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Target probabilistic robustness level.
        #[arg(long = "c", value_name = "C", default_value_t = 1.5)]
        c: f64,
        /// Slack: the critical ratio uses (1 + ε/2)C, the sampler (1 + ε)C.
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        /// Monte Carlo trials; trial k uses stream k of the seed.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Polarity test of a utility profile: u(a,x') − u(a,x) ≤ −u(a',x) − u(a',x')
    /// for every quadruple (a, a', x, x'). Reports the first violation.
    Polarity {
        /// Utility profile JSON.
        #[arg(long = "in", value_name = "UTILITY")]
        input: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generating metric space of a polarized utility profile (bipartite
    /// agent/alternative construction), or the disjoint union over every
    /// ordinal profile of one side of a market. `--format text` writes DOT.
    Genspace {
        /// Utility profile JSON.
        #[arg(long = "in", value_name = "UTILITY", conflicts_with = "market", required_unless_present = "market")]
        input: Option<PathBuf>,
        /// Market JSON; builds the union over all of R^n for --side.
        #[arg(long, value_name = "MARKET")]
        market: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SideArg::Men)]
        side: SideArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Planarity test of a metric space's support graph and the Euler-formula
    /// genus lower bound; optionally runs the randomized search for a planar
    /// representation of the nine-agent planar-lemma profile.
    Planarity {
        /// Metric space JSON.
        #[arg(long = "in", value_name = "SPACE", required_unless_present = "lemma_search")]
        input: Option<PathBuf>,
        /// Number of random planar candidate spaces to try.
        #[arg(long, value_name = "CANDIDATES")]
        lemma_search: Option<usize>,
        /// Weight hill-climb steps per candidate.
        #[arg(long, default_value_t = 40)]
        climb_steps: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bourgain embedding of a connected metric space into Euclidean space:
    /// coordinates d(v, S)/√k over random subsets of sizes 2^(i-1).
    Embed {
        #[arg(long = "in", value_name = "SPACE")]
        input: PathBuf,
        /// Random subsets per scale: quality · ⌈ln |X|⌉.
        #[arg(long, default_value_t = 2)]
        quality: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distortion of a Euclidean embedding: scale, expansion and contraction
    /// over all vertex pairs. Embeds with Bourgain unless --embedding is given.
    Distortion {
        #[arg(long = "in", value_name = "SPACE")]
        input: PathBuf,
        /// Embedding CSV as written by `embed`.
        #[arg(long, value_name = "CSV")]
        embedding: Option<PathBuf>,
        /// Random subsets per scale: quality · ⌈ln |X|⌉.
        #[arg(long, default_value_t = 2)]
        quality: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Euclidean robustness cap: multistart local search over placements of
    /// three agents and three alternatives realizing the Condorcet cycle,
    /// maximizing the profile's robustness. Reports the best value found.
    BanachSearch {
        /// Euclidean dimension, 1 to 10.
        #[arg(long)]
        dim: usize,
        /// Independent random starts; restart k uses stream k of the seed.
        #[arg(long, default_value_t = 1000)]
        restarts: usize,
        /// Local-search iterations per restart.
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Communication requirement T = D⁻¹(H(n)/ξ) for decay D and hardness H,
    /// or with --sequence a finite-range admissibility trend of H(n)/ξ_n.
    Commreq {
        /// Robustness ξ ≥ 1 (`inf` allowed).
        #[arg(long, required_unless_present = "sequence", requires = "n")]
        xi: Option<f64>,
        /// Agents per side.
        #[arg(long)]
        n: Option<usize>,
        /// CSV with header `n,xi`.
        #[arg(long, value_name = "CSV", conflicts_with = "xi")]
        sequence: Option<PathBuf>,
        /// TOML with [decay] and [hardness] tables.
        #[arg(long, value_name = "TOML")]
        config: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Embedding-derived lower bounds on the deterministic and probabilistic
    /// communication requirements, by space size, genus and number of agents.
    BoundTable {
        /// Agents per side, at least 2.
        #[arg(long)]
        n: usize,
        /// Size |X| of the generating space.
        #[arg(long)]
        size: u64,
        /// Genus g ≥ 1 of the generating space.
        #[arg(long)]
        genus: u64,
        /// TOML with [decay], [hardness] and [constants] tables.
        #[arg(long, value_name = "TOML")]
        config: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let err = CliError::Usage(e.kind().to_string());
            eprintln!("{}", err.diagnostic());
            return ExitCode::from(err.exit_code());
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.diagnostic());
            ExitCode::from(err.exit_code())
        }
    }
}
