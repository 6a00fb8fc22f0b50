//! Dynamic k-center coresets.
//!
//! [`gonzalez`] is the static farthest-first reference with a pluggable
//! approximate furthest-point oracle. [`restriction`] maintains a Gonzalez
//! coreset for one coordinate restriction under insertions and deletions,
//! with the furthest-point search supplied by a [`FurthestIndex`] backend.
//! [`kcenter`] unions the restrictions over a coordinate family.

pub mod gonzalez;
pub mod index;
pub mod kcenter;
pub mod restriction;

pub use gonzalez::{static_gonzalez, ExactOracle, FurthestOracle};
pub use index::{
    default_index_registry, ExactIndex, FurthestIndex, IndexFactory, ProjectionIndex,
    ProjectionSet,
};
pub use kcenter::{DynKCenterCoreset, KCenterConfig, Update};
pub use restriction::DynGonzalezRestriction;
