//! Lucas polynomials, Lucas atoms and their arithmetic.
//!
//! The Lucas polynomials `U_n(s, t)` (`U_0 = 0`, `U_1 = 1`,
//! `U_n = s U_{n-1} + t U_{n-2}`) factor over the integers as
//! `U_n = prod_{d | n} P_d`, where the atom `P_n` is the homogenized
//! cyclotomic polynomial `Phi_n(alpha, beta)` rewritten in `s = alpha + beta`,
//! `t = -alpha beta`. This crate builds atoms exactly, decides when ratios of
//! Lucas polynomials are polynomials, computes p-adic valuations of atoms in
//! closed form, and probes the sequence of atom values for polynomial
//! recurrences.

pub mod atoms;
pub mod cli;
pub mod error;
pub mod exactpoly;
pub mod holonomy;
pub mod lucasfam;
pub mod numtheory;
pub mod valuations;

pub use error::{Error, Result};
