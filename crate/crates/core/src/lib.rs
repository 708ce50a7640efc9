//! Set functions, their Lovász extensions, ratio solvers and graph problem catalogs.

pub mod eigen;
pub mod error;
pub mod fracprog;
pub mod graph;
pub mod graphcat;
pub mod lovasz;
pub mod oracle;
pub mod polytope;
pub mod setfn;

pub use error::{Error, Result};
pub use graph::{read_graph, read_graph_file, Edge, Graph, GraphFormat};
pub use oracle::{OracleResult, Sense};
pub use lovasz::{ExtensionKind, FeasibleDomain, PLValue, TableEntry};
pub use setfn::{DomainKind, GroundSet, SetArg, SetFunction, SetPair, SubsetId};
pub use graphcat::{bundled_graph, ContinuousForm, ProblemInstance, BUNDLED_GRAPHS};
