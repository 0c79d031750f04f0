//! Per-trial seed derivation for sweeps.
//!
//! `trial_seed(base, trial) = splitmix64(base ^ splitmix64(trial))`.
//!
//! The network size is deliberately left out. The generator draws the data
//! center and nodes from one stream, so trial `t` at size `M` is exactly the
//! first `M` nodes of trial `t` at size `M + 1`. Nested scenarios make the
//! growth of the optimal oldest age with `M` hold trial by trial instead of
//! only on average. Each trial's seed depends only on its own index, so
//! adding trials or sizes never changes existing ones.
//!
//! GA runs get `ga_trial_seed(ga_seed, scenario_seed, m)
//! = splitmix64(ga_seed ^ splitmix64(scenario_seed ^ splitmix64(m)))`.

/// One SplitMix64 output step applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(trial as u64))
}

/// GA seed for one sweep solve.
pub fn ga_trial_seed(ga_seed: u64, scenario_seed: u64, m: usize) -> u64 {
    splitmix64(ga_seed ^ splitmix64(scenario_seed ^ splitmix64(m as u64)))
}
