//! Crystal lattices as `Z^d`-voltage covers of finite graphs, and their
//! periodic realizations in `R^d`.

mod cover;
mod graph;
mod realization;

pub use cover::{is_maximal_abelian, maximal_abelian_cover, CrystalLattice};
pub use graph::{betti, BaseGraph, Edge, EdgeId, SpanningTree, VertexId};
pub use realization::{
    JumpWitness, LatticePoint, PeriodicRealization, Violation, DEFAULT_MAX_PATH_LEN, DEFAULT_TOL,
};
