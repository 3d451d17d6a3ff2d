//! Entropy decay bound, its consistency checks, and numerical checks of the
//! entropy inequalities behind it.

mod counterexample;
mod decay;
mod lemmas;
mod verify;
mod weak_optimizer;

pub use counterexample::{arc_fraction, production_counterexample_ratio, production_ratio_grid, ProductionRatio};
pub use decay::{decay_bound_d, laplace_consistency, DecayBound, LaplaceReport};
pub use lemmas::{
    gamma_mass, indicator_h, lemma_checks, random_lemma_battery, random_mixture_h, LemmaConfig, LemmaEntry, LemmaKind, LemmaReport, LEMMA_TOL,
};
pub use verify::{verify_entropy_decay, DecayRow, DecayVerification};
pub use weak_optimizer::{weak_optimizer_ratio, WeakOptimizer};
