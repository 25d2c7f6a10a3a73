//! Exact computations on hermitian matrices over GF(q^2) and the graph of
//! invertible hermitian matrices under the rank-one adjacency relation.

pub mod cliques;
pub mod constructive;
pub mod error;
pub mod gf;
pub mod graphs;
pub mod hermat;
pub mod homsearch;
pub mod varpolar;
pub mod verify;

pub use error::{Error, Result};
pub use gf::{Fe, Field};
pub use hermat::{HermMatrix, Matrix};
