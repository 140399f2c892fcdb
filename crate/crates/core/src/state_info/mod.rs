//! Causal side information: Shannon strategies for the intrinsic state and
//! for state-dependent channels, the ended-kernel uselessness test, the
//! degraded-observation sweep and the counterexample checks.

mod model;
mod paper;
mod strategy;

pub use model::{
    capacity_with_causal_si, capacity_with_causal_si_with, causal_encoder_si_useless, degraded_observations,
    find_common_ends, is_ended, preset, preset_paper_fig5, shannon_strategy_channel, si_sweep, StateChannelModel,
    SweepPoint, UselessnessVerdict, DEFAULT_SI_STRATEGY_LIMIT,
};
pub use paper::{
    mixture_counterexample, run_paper_checks, verify_paper_examples, CheckOutcome, PaperCheckOptions, PaperReport,
};
pub use strategy::{
    augmented_channel, c11, c_f, c_f_with, strategy_channel, strategy_channel_with, CfOptions, Flag, StrategyChannel,
    StrategyLimits,
};
