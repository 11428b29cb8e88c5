//! Exact-computation toolkit for label sums along random walks on regular
//! expander graphs.
//!
//! The crate builds the graphs and two-state "sticky" chains that drive the
//! walks ([`graph`]), computes the exact distribution of the label sum by
//! transfer-matrix dynamic programming ([`walk`]), and offers the usual
//! operations on finitely supported integer distributions ([`dist`]).  On top
//! of that sit the asymptotic-variance machinery ([`variance`]), the
//! sticky-walk discrete normal family with its axiom checker ([`normal`]) and
//! the theorem verifiers ([`verify`]).  [`cli`] wires everything into the
//! `walklab` binary.
//!
//! Transition matrices are column-stochastic: `w[(j, i)]` is the probability
//! of moving from state `i` to state `j`.

pub mod cli;
pub mod dist;
pub mod error;
pub mod graph;
pub mod normal;
pub mod variance;
pub mod verify;
pub mod walk;

pub use dist::IntegerDistribution;
pub use error::{Error, Result};
pub use graph::{LabeledChain, Matrix};
pub use normal::StickyFamily;
pub use walk::GraphSequence;
