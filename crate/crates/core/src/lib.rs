//! Exact computations on finite set families: transversals, maximal
//! intersecting families (MIFs), intersecting set-pair systems and the
//! closed-form bounds relating them, plus isomorph-free exhaustive search
//! for small MIFs and set-pair systems.
//!
//! Families are sets of [`Block`]s (fixed-width bitmasks) over a bounded
//! universe. All operations are pure and deterministic.

pub mod bounds;
pub mod canon;
pub mod constructions;
pub mod error;
pub mod family;
pub mod fixtures;
pub mod isp;
pub mod mif;
pub mod search;
pub mod transversal;
pub mod verify;

pub use canon::{canonicalize, CanonicalForm};
pub use error::{MifError, Result};
pub use family::{Block, Family, PointId};
