//! End-to-end verification of the growth-bound chain: Plancherel identity,
//! resolvent-to-Cesàro conversion, the dyadic Cesàro bound
//! `‖T_t‖ ≤ 2 C t^α / √⌊log₂ t⌋`, its `α > 1` variant, strip-restricted
//! Kreiss constants, and growth-model fits.

mod checks;
mod demo;
mod fit;
mod report;

pub use checks::{
    BOUND_SLACK, CESARO_SLACK,
    dyadic_count, dyadic_windows, plancherel_check, remark_alpha_check,
    resolvent_to_cesaro_check, strip_kreiss_check, theorem_bound_check, BoundOutcome,
    StripOutcome,
};
pub use demo::{EXPONENT_GATE, WAVE_SHIFT, wave_proposition_demo, DemoGrids, DirectionRun, WaveDemo};
pub use fit::{growth_fit, GrowthFitResult, GrowthModel};
pub use report::{CheckEntry, VerificationReport};
