//! Cube vertices and edges, hyperplanes, and the exact crossing predicates.

mod config;
mod construction;
mod plane;
mod vertex;

pub use config::Configuration;
pub use construction::{construction, construction_by_name, middle_layer_thresholds, ConstructionKind};
pub use plane::{
    crossing_necessary, edge_crosses, make_hyperplane, offsets_cross, CrossingMode, Hyperplane, Plane,
    FLOAT_ZERO_FACTOR,
};
pub use vertex::{edge_endpoints, Edge, EdgeRecord, Vertex};
