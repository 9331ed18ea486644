//! Computational toolkit for degree-3 cohomology of higher local fields, Milnor
//! K-theory symbols, central simple algebras with involution and Witt-vector lifts.

pub mod algebras;
pub mod arith;
pub mod error;
pub mod fields;
pub mod forms;
pub mod invariants;
pub mod ktheory;
pub mod linalg;
pub mod wittvec;

pub use error::{Error, Result};
pub use fields::{parse_field, Elem, FieldTower};
