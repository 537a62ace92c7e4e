//! Representative cohomology generators of binary image objects, computed on
//! an irregular dual graph pyramid.
//!
//! The usual flow is [`Pyramid::build`], then [`build_homology_level`] and
//! [`cocycle_basis`] per object, then [`down_project_to_base`] per hole. The
//! [`oracle`] module re-checks results with plain GF(2) linear algebra.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod downproject;
pub mod error;
pub mod gf2;
pub mod grid;
pub mod homology;
pub mod image;
pub mod map;
pub mod oracle;
pub mod order;
pub mod pyramid;

pub use downproject::{down_project_all, down_project_level, down_project_to_base, Cocycle, ProjectionStats};
pub use error::{Error, Result};
pub use gf2::{Gf2Matrix, Gf2Vector};
pub use grid::{build_base, Crack, PixelMap};
pub use homology::{build_homology_level, cocycle_basis, HomologyLevel, LoopKind, TopCocycle};
pub use image::{hole_count_oracle, object_components, BinaryImage, Object, ObjectComplement, Pixel, Side};
pub use map::{CornerId, EdgeId, LevelPair, VertexId};
pub use order::{anchor_vertex, distance_field, edge_compare, edge_key, stable_tree, DistanceField, EdgeOrder, EdgeOrderKey};
pub use pyramid::{build_pyramid, ContractionKernel, LevelLog, Mode, Op, Pyramid, PyramidConfig};
