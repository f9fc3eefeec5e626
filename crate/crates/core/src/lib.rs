//! Exact combinatorics of Q-data: adapted reduced words, convex orders,
//! Kostant partition posets, inverse quantum Cartan matrices and l-weight
//! lattices.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod kostant;
pub mod linalg;
pub mod lweight;
pub mod matrix;
pub mod qcartan;
pub mod qdatum;
pub mod rootsys;
pub mod verify;

pub use error::{Error, Result};
