//! Counting and optimising [sigma, rho]-dominating sets over tree decompositions, with
//! transform-based join operations.

pub mod algebra;
pub mod dp;
pub mod error;
pub mod graph;
pub mod joins;
pub mod modring;
pub mod oracle;
pub mod posets;
pub mod problem;
pub mod scaling;
pub mod solver;
pub mod table;
pub mod transforms;

pub use algebra::{Algebra, Answer, CountMod, CountOptimum, Exists, Optimum, Variant};
pub use error::{Error, Result};
pub use graph::{Graph, NiceTreeDecomposition, TreeDecomposition};
pub use joins::{FastContext, JoinStrategy};
pub use modring::PrimeField;
pub use problem::{IntSet, Label, Preset, Side, SigmaRhoSpec};
pub use solver::{solve, SolveOptions, SolveReport};
pub use table::MemoTable;
