//! Exact total-variation mixing by powering roofed chains, sweeps over `n`
//! with trend fits, `rho`-bound and cutoff diagnostics, and numeric
//! spectra of specialized relations.

mod augmented;
mod spectrum;
mod sweep;
mod tv;

pub use augmented::{augmented_chain, projection_commutes, AugmentedChain, AugmentedState};
pub use spectrum::{adjacency_relation, cluster, eigenvalues_at, laplacian_relation, spectrum_sweep, SpectrumAt, SpectrumReport, CLUSTER_TOL};
pub use sweep::{
    classify_trend, cutoff_diagnostic, cutoff_from_profiles, mixing_sweep, one_step_distance, profiles, rho_bound_check, rho_bound_from,
    sweep_from_profiles, CutoffDiagnostic, MixingSweep, RhoBound, Trend, TrendFit, WindowTrend, DEFAULT_T_MAX,
};
pub use tv::{default_epsilons, period, tv_full_state, tv_profile, tv_profile_with, Epsilon, MixingProfile, EXACT_HEAD};
