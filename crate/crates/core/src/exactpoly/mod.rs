//! Exact polynomial arithmetic over arbitrary-precision integers, plus an
//! exact rational linear solver.

mod bipoly;
mod rational;
mod unipoly;

pub use bipoly::{BiPoly, Exponents};
pub use rational::{solve_rational, LinearSolution, RatMatrix};
pub use unipoly::UniPoly;
