//! Renormalized dynamics on diagonal configurations: birth of a single
//! discrepancy, its walk inside one diagonal, and the induced chain `ξ(n)`
//! observed at successive returns to the diagonal set.

mod chain;
mod direct;
mod walk;

pub use chain::{
    discrepancy_site_law, effective_law, effective_step, effective_trajectory, effective_tunneling_time, flip_rates,
    is_favorable, plus_excursion, run_effective, sample_discrepancy_site, uniform_rate_excursion_prob,
    DiagonalChainState, DiscrepancySiteLaw, EffectiveEvent, FlipRates,
};
pub use direct::{
    direct_excursion, direct_renormalized_step, single_discrepancy_start, DirectExcursion, DirectStep,
    RenormalizedOutcome,
};
pub use walk::{
    expected_absorption, growth_probability, hit_prob, run_discrepancy_walk, walk_params, DiscrepancyState,
    WalkOutcome, WalkParameters,
};
