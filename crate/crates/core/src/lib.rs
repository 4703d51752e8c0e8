//! Switch-walk-switch random walks on wreath products `Z_2 wr G` over
//! fractal-like graphs: graph families, walk simulation, exact kernels,
//! covering paths, lamp distances, resistance and Green-function tools, and
//! the experiment drivers that fit scaling exponents and LIL bands.

pub mod error;
pub mod experiments;
pub mod fit;
pub mod generators;
pub mod graph;
pub mod lamplighter;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod topology;
pub mod walk;

pub use error::{LabError, Result};
pub use fit::FitResult;
pub use graph::{build_graph, Edge, GraphMeta, WeightedGraph};
pub use topology::{LatticeBox, WalkGraph};
