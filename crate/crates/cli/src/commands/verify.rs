use anyhow::Result;
use serde::Serialize;

use super::{options, Experiment, RunContext};
use crate::config::{ConfigResult, Settings};
use crate::output::{OutputDir, Table};
use crate::row;
use crate::suite::{run_suite, SuiteSizes};

options!(
    /// Runs the acceptance criteria and exits nonzero if any fails.
    VerifyAllArgs {}
);

#[derive(Debug, Clone, Serialize)]
pub struct VerifyAllConfig {
    pub sizes: SuiteSizes,
}

impl Experiment for VerifyAllConfig {
    const NAME: &'static str = "verify-all";

    fn from_settings(_: &Settings, ctx: &RunContext) -> ConfigResult<Self> {
        Ok(Self { sizes: SuiteSizes::new(ctx.quick) })
    }

    fn run(&self, ctx: &RunContext, out: &mut OutputDir) -> Result<bool> {
        let outcomes = run_suite(&self.sizes, ctx.seed, out, |o| {
            println!("criterion {:2} {:<26} {}  {}", o.id, o.name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        })?;
        let mut t = Table::new(&["criterion", "name", "pass"]);
        for o in &outcomes {
            t.push(row![o.id, o.name, o.pass]);
        }
        out.write_csv("criteria.csv", &t)?;
        let summary: Vec<_> = outcomes
            .iter()
            .map(|o| serde_json::json!({ "criterion": o.id, "name": o.name, "pass": o.pass, "detail": o.detail, "runtime_s": o.runtime_s }))
            .collect();
        out.write_json("summary.json", &summary)?;
        Ok(outcomes.iter().all(|o| o.pass))
    }
}
