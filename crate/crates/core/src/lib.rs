//! Finite-truncation engine for topological Ramsey spaces: axiom checks,
//! mixing and separation of front colorings, and canonical forms.

pub mod axioms;
pub mod canonize;
pub mod catalog;
pub mod cli;
pub mod colorings;
pub mod error;
pub mod fronts;
pub mod fusion;
pub mod instance;
pub mod mixing;
pub mod model;
pub mod report;
pub mod spaces;

pub use catalog::{Catalog, Id, Space};
pub use error::{Error, Result};
pub use model::{
    compat, depth, extensions, leq_fin, restrict, Approximation, Atom, Block, DepthValue, GroundSpace, InstanceKind,
    Level, LevelInterval, Reduct, Selector, SpaceModel,
};
