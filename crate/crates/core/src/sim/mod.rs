//! Exact event-driven simulation of the jump process.

mod ensemble;
mod fit;
mod step;

pub use ensemble::{run_ensemble, trajectory_rng, InitialCondition, ObservableSeries, SimConfig};
pub use fit::{fit_exponential_rate, FitOptions, RateFit};
pub use step::{draw_waiting_time, fire_event, run_events, step, EventKind, StepOutcome};
