//! Command-line front end: settings, experiment orchestration and result files.

pub mod cli;
pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;
pub mod suite;

use std::ffi::OsString;

use anyhow::Result;
use clap::Parser;

use cli::{Cli, Command};
use commands::{
    execute, CounterexampleArgs, CounterexampleConfig, EntropyBoundArgs, EntropyBoundConfig, GapArgs, GapConfig, LemmasArgs,
    LemmasConfig, SimulateArgs, SimulateConfig, SpectrumArgs, SpectrumConfig, VanHoveArgs, VanHoveConfig, VerifyAllArgs,
    VerifyAllConfig, WeakOptimizerArgs, WeakOptimizerConfig,
};
use config::{ConfigError, Settings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn dispatch(cli: Cli) -> Result<bool> {
    let settings = Settings::load(cli.config.as_deref())?;
    let (seed, quick, out) = (cli.seed, cli.quick, cli.out);
    macro_rules! go {
        ($args:expr, $args_ty:ty, $cfg:ty) => {
            execute::<$cfg>(&settings.overlay($args.overrides()), <$args_ty>::KEYS, out, seed, quick)
        };
    }
    match cli.command {
        Command::Simulate(a) => go!(a, SimulateArgs, SimulateConfig),
        Command::Gap(a) => go!(a, GapArgs, GapConfig),
        Command::Spectrum(a) => go!(a, SpectrumArgs, SpectrumConfig),
        Command::EntropyBound(a) => go!(a, EntropyBoundArgs, EntropyBoundConfig),
        Command::Lemmas(a) => go!(a, LemmasArgs, LemmasConfig),
        Command::Counterexample(a) => go!(a, CounterexampleArgs, CounterexampleConfig),
        Command::WeakOptimizer(a) => go!(a, WeakOptimizerArgs, WeakOptimizerConfig),
        Command::Vanhove(a) => go!(a, VanHoveArgs, VanHoveConfig),
        Command::VerifyAll(a) => go!(a, VerifyAllArgs, VerifyAllConfig),
    }
}

/// Exit code for an error: 2 when the configuration is at fault, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let config_fault = err.chain().any(|e| {
        e.is::<ConfigError>() || matches!(e.downcast_ref::<kaclab::Error>(), Some(kaclab::Error::InvalidParams(_) | kaclab::Error::InvalidInput(_)))
    });
    if config_fault {
        EXIT_CONFIG
    } else {
        EXIT_FAILED
    }
}

/// Parses `argv` (program name first), runs, and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        let cfg: anyhow::Error = ConfigError("missing required key `n`".into()).into();
        assert_eq!(exit_code(&cfg), EXIT_CONFIG);
        let bad: anyhow::Error = kaclab::Error::InvalidParams("λ < 0".into()).into();
        assert_eq!(exit_code(&bad), EXIT_CONFIG);
        let io: anyhow::Error = std::io::Error::other("disk full").into();
        assert_eq!(exit_code(&io), EXIT_FAILED);
    }

    #[test]
    fn usage_errors_are_config_errors() {
        assert_eq!(run(["kaclab", "no-such-command"]), EXIT_CONFIG);
        assert_eq!(run(["kaclab", "gap", "--n", "two"]), EXIT_CONFIG);
        assert_eq!(run(["kaclab", "--help"]), EXIT_OK);
    }
}
