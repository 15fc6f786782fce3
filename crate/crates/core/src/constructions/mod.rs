//! Generators of blocking sets: random unions of subspaces, the tetrahedron,
//! and unions of lines along the edges of a graph.

mod graph;
mod random;

pub use graph::{
    check_main_const_hypothesis, graph_lines_construction, line_points, tetrahedron, vertex_integrity, Graph,
    GraphConstruction, Integrity, IntegrityMode, BNB_LIMIT, EXHAUSTIVE_LIMIT, GRAPH_LIMIT,
};
pub use random::{
    point_count, random_full_rank, random_subspace_blocking, random_vector, stream_rng, subspace_count,
    theorem_bound, uniform_subspace, ConstructionResult, Strategy, MAX_ATTEMPTS,
};
