//! Coresets for (k, z)-clustering of points with missing coordinates.
//!
//! Distances between a point and a center use only the point's available
//! coordinates. The construction samples points in proportion to importance
//! scores obtained by repeatedly peeling k-center coresets, which are kept up
//! to date by a dynamic Gonzalez structure over random coordinate
//! restrictions and random one-dimensional projections.

pub mod bench;
pub mod coreset;
pub mod distance;
pub mod dyngonz;
pub mod error;
pub mod family;
pub mod io;
pub mod lloyd;
pub mod ordered1d;
pub mod point;
pub mod registry;
pub mod rng;
pub mod sensitivity;

pub use error::{Error, Result};
pub use point::{CenterSet, ClusteringParams, Coord, CoresetEntry, Dataset, MissingPoint, WeightedCoreset};
