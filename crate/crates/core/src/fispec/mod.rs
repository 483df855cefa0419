//! Orbit-level family specs, instantiation at a given `n`, and
//! classification of vertices and vertex pairs into stable orbits.

mod families;
mod group;
mod instantiate;
mod orbits;
mod pattern;
mod roofed;
mod spec;

pub use families::{builtin_family, default_families, parse_selector, FAMILY_NAMES};
pub use group::{cyclic_generators, symmetric_generators, Perm, PermGroup};
pub use instantiate::{instantiate, instantiate_vertices, orbit_tuples, ConcreteGraph};
pub use orbits::{
    base_tuple, count_partners, count_vertices, orbit_size, pair_orbit_size_exact, partner_count_exact_poly, partner_count_poly,
    pattern_class_size, roofed_size_exact, roofed_size_poly, vertex_count_exact, vertex_count_poly, Orbit,
};
pub use pattern::{raw_matching, Matching, PairPattern, StableOrbitId, Tuple, Vertex};
pub use roofed::RoofedCounts;
pub use spec::{EdgeDoc, EdgeOrbit, FiGraphSpec, OrbitDoc, SpecDoc, VertexOrbitSpec, WalkDoc, WalkEntry};

/// Stable orbit of the pair `(u, v)`.
pub fn classify_pair(spec: &FiGraphSpec, u: &Vertex, v: &Vertex) -> StableOrbitId {
    spec.classify(u, v)
}
