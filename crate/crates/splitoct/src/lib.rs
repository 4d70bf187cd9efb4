//! Split octonions over exact fields, the exceptional group G2 acting on them
//! through its generators, canonical forms of single octonions and of pairs
//! under that action, evaluable G2-invariants, and a brute-force orbit oracle
//! over small finite fields.

pub mod canon;
pub mod error;
pub mod invariants;
pub mod field;
pub mod g2;
pub mod identities;
pub mod linalg;
pub mod octonion;

pub use error::{Error, Result};
pub use field::{Field, FieldDescriptor, FieldElement, QuadraticRoots};
pub use g2::{G2Element, Generator};
pub use octonion::{Octonion, Vector3};
