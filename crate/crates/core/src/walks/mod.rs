//! Walk models as transition relations, stationary distributions,
//! reversibility and the flow ratio `rho(n)`.

mod models;
mod relation;
mod stationary;

pub use models::{check_connected, custom_walk, lazy_from, lazy_walk, parse_walk, simple_walk, weighted_walk};
pub use relation::{sample_ns, TransitionRelation, VirtualRelation, WalkKind};
pub use stationary::{check_reversible, rho, stationary, verify_stationary_full, Reversibility, RhoProfile, StationaryDist};
