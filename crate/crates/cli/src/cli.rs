use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{
    CounterexampleArgs, EntropyBoundArgs, GapArgs, LemmasArgs, SimulateArgs, SpectrumArgs, VanHoveArgs, VerifyAllArgs,
    WeakOptimizerArgs,
};

/// Numerical experiments on the partially thermostated Kac model.
///
/// Every subcommand reads optional `key = value` settings from `--config`;
/// flags override the file. Results go to `<out>/<experiment id>/`.
#[derive(Debug, Parser)]
#[command(name = "kaclab", version)]
pub struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output root.
    #[arg(long, global = true, env = "KACLAB_OUT", default_value = "out")]
    pub out: PathBuf,

    /// Smaller problem sizes.
    #[arg(long, global = true)]
    pub quick: bool,

    /// Settings file (flat key = value).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    Simulate(SimulateArgs),
    Gap(GapArgs),
    Spectrum(SpectrumArgs),
    EntropyBound(EntropyBoundArgs),
    Lemmas(LemmasArgs),
    Counterexample(CounterexampleArgs),
    WeakOptimizer(WeakOptimizerArgs),
    Vanhove(VanHoveArgs),
    VerifyAll(VerifyAllArgs),
}
