//! HyLL: hybrid linear logic with a proof kernel, focused proof search,
//! pluggable world domains and a stochastic pi-calculus front-end.

pub mod corpus;
pub mod focusing;
pub mod gen;
pub mod kernel;
pub mod rng;
pub mod simulator;
pub mod spi;
pub mod syntax;
pub mod text;
pub mod worlds;
