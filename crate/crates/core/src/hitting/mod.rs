//! Roofed orbit chains, hitting-time moments and Green's functions, each
//! with an oracle on the full graph.

mod chain;
mod greens;
mod oracle;
mod solve;

pub use chain::{build_roofed_chain, default_sweep, roofed_counts, roofed_snapshot, RoofedOrbitChain};
pub use greens::{greens_matrix_at, greens_oracle, greens_symbolic, GreensNormalization, GreensTable, GreensResidual};
pub use oracle::{hitting_oracle, moments_oracle, simulate_moments, stabilizer_blocks, PatternRows};
pub use solve::{central_from_raw, cumulants_from_raw, hitting_symbolic, moments_symbolic, HittingTable, MomentTable};
