//! Tournaments, homogeneous structure, galaxy orderings, transitive
//! subtournaments and Erdős–Hajnal coefficient bounds.

pub mod bits;
pub mod bounds;
pub mod density;
pub mod orderings;
pub mod pipeline;
pub mod scalar;
pub mod star_free;
pub mod structure;
pub mod tournament;
pub mod transitive;

pub use bits::Bits;
pub use bounds::{
    bound_report, certify_upper, compose_lower_bound, iterate_substitution, lower_bound_formula,
    upper_bound_formula, BoundRecord, BoundsError, CertifyConfig, LowerFamily, LowerSource,
    ReportConfig, UpperCertificate, UpperMode, UpperSource,
};
pub use density::{density, Density};
pub use orderings::{
    backward_graph, build_galaxy, classify_ordering, find_galaxy_ordering, find_star_ordering,
    BackwardGraph, GalaxyDecomposition, GalaxySpec, Ordering, OrderingError, Side, Star,
};
pub use pipeline::{
    color_tournament, find_transitive, params_for, Coloring, FindConfig, FindResult, Outcome,
    PipelineError, PipelineParams,
};
pub use scalar::Real;
pub use structure::{
    analyze_homogeneous, enumerate_quotients, find_embedding, gen_h_free, is_h_far,
    is_homogeneous, Embedding, HomoStructure, Quotient, StructureError,
};
pub use tournament::{
    gen_c5, gen_random, gen_transitive, substitute, CoreError, Tournament, VertexSet,
};
pub use transitive::{
    greedy_transitive, is_transitive, max_transitive_exact, star_free_transitive, Method,
    StarFreeConfig, StarFreeError, StarShape, TransitiveError, TransitiveWitness,
};

pub type PipelineParams64 = PipelineParams<f64>;
pub type PipelineParams32 = PipelineParams<f32>;
pub type BoundRecord64 = BoundRecord<f64>;
pub type BoundRecord32 = BoundRecord<f32>;
pub type UpperCertificate64 = UpperCertificate<f64>;
pub type Coloring64 = Coloring<f64>;
