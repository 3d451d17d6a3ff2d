//! One experiment per subcommand. Each resolves a typed configuration from
//! the settings, runs, writes its files and reports pass/fail.

mod entropy;
mod simulate;
mod spectral;
mod vanhove;
mod verify;

use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use crate::config::{ConfigResult, Settings};
use crate::manifest::{digest_outputs, experiment_id, write_manifest, ExperimentManifest};
use crate::output::OutputDir;

pub use entropy::{
    CounterexampleArgs, CounterexampleConfig, EntropyBoundArgs, EntropyBoundConfig, EntropyInitial, LemmasArgs, LemmasConfig,
    WeakOptimizerArgs, WeakOptimizerConfig,
};
pub use simulate::{SimulateArgs, SimulateConfig};
pub use spectral::{GapArgs, GapConfig, SpectrumArgs, SpectrumConfig};
pub use vanhove::{VanHoveArgs, VanHoveConfig, VanHoveInitial, VanHoveOutcome};
pub use verify::{VerifyAllArgs, VerifyAllConfig};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Declares a clap argument group whose fields double as config keys.
macro_rules! options {
    ($(#[$meta:meta])* $name:ident { $($(#[doc = $doc:literal])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, clap::Args)]
        pub struct $name {
            $($(#[doc = $doc])* #[arg(long, allow_negative_numbers = true)] pub $field: Option<$ty>,)*
        }

        impl $name {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($field)),*];

            pub fn overrides(&self) -> Vec<(&'static str, Option<String>)> {
                vec![$((stringify!($field), self.$field.as_ref().map(|v| v.to_string()))),*]
            }
        }
    };
}
pub(crate) use options;

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub seed: u64,
    pub quick: bool,
}

pub trait Experiment: Serialize + Sized {
    const NAME: &'static str;

    fn from_settings(settings: &Settings, ctx: &RunContext) -> ConfigResult<Self>;

    /// Runs and writes outputs. Returns whether every assertion held.
    fn run(&self, ctx: &RunContext, out: &mut OutputDir) -> Result<bool>;
}

/// Resolves, runs and records one experiment under `out_root/<experiment id>/`.
pub fn execute<E: Experiment>(settings: &Settings, keys: &[&str], out_root: PathBuf, seed: Option<u64>, quick: bool) -> Result<bool> {
    settings.check_known(keys)?;
    let seed = match seed {
        Some(s) => s,
        None => settings.or("seed", DEFAULT_SEED)?,
    };
    let ctx = RunContext { seed, quick };
    let cfg = E::from_settings(settings, &ctx)?;
    let echo = serde_json::to_value(&cfg)?;
    let id = experiment_id(E::NAME, &echo, seed, quick);
    let mut out = OutputDir::create(out_root.join(&id))?;
    let started = chrono::Utc::now().to_rfc3339();
    let pass = cfg.run(&ctx, &mut out)?;
    let finished = chrono::Utc::now().to_rfc3339();
    let manifest = ExperimentManifest {
        experiment_id: id,
        subcommand: E::NAME.to_string(),
        config: echo,
        seed,
        quick,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished,
        pass,
        outputs: digest_outputs(out.path(), out.written())?,
    };
    write_manifest(out.path(), &manifest)?;
    eprintln!("{}: {} ({})", E::NAME, if pass { "pass" } else { "FAIL" }, out.path().display());
    Ok(pass)
}
