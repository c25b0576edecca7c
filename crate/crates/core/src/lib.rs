//! Cylindrical slicing of closed triangle meshes for additive-lathe
//! printing.
//!
//! The pipeline reads an STL ([`stl`]), welds and validates it ([`mesh`]),
//! moves the chosen bore axis onto the x-axis ([`orientation`]), cuts the
//! mesh with concentric cylinders about that axis ([`slicing`], accelerated
//! by [`active`]), and stitches each layer into closed contours that are
//! classified and unrolled onto the plane ([`contour`]). [`pipeline`] wires
//! the stages together and [`export`] writes the results.

pub mod active;
pub mod contour;
pub mod error;
pub mod export;
pub mod geometry;
pub mod mesh;
pub mod oracle;
pub mod orientation;
pub mod pipeline;
pub mod slicing;
pub mod stl;

pub use contour::{ContourKind, LayerContours};
pub use error::{Result, SlicylError};
pub use geometry::{Point, Vector};
pub use mesh::{weld_and_index, RawFacet, TriangleMesh};
pub use pipeline::{slice_mesh, SliceOutput, SliceParams};
