use thiserror::Error;

use crate::mesh::ManifoldReport;

pub type Result<T> = std::result::Result<T, SlicylError>;

#[derive(Debug, Error)]
pub enum SlicylError {
    #[error("input file is empty")]
    EmptyFile,

    #[error("binary STL is truncated: expected {expected} bytes for {count} facets, found {found}")]
    Truncated {
        count: u32,
        expected: u64,
        found: u64,
    },

    #[error("malformed ASCII STL: {0}")]
    Parse(String),

    #[error("mesh is not a closed 2-manifold ({} offending edges)", .0.offending.len())]
    NonManifold(ManifoldReport),

    #[error("skewer axis has zero length (A = B)")]
    ZeroAxis,

    #[error("could not separate radius {radius} from vertex distances after {attempts} nudges")]
    DecollideFail { radius: f64, attempts: usize },

    #[error("model lies within the first layer shell (r_BC = {bounding_radius}, r_m + delta = {first_radius})")]
    NoLayers {
        bounding_radius: f64,
        first_radius: f64,
    },

    #[error("facet {facet} crosses the x-axis; the model needs an axial void")]
    AxisCrossingFacet { facet: usize },

    #[error("segment in facet {facet} fails the arc-inside-facet check (min barycentric {min_barycentric:e})")]
    ArcOracle { facet: usize, min_barycentric: f64 },

    #[error("plane contains the x-axis")]
    DegeneratePlane,

    #[error("intersection point {point} has degree {degree} (facets {facets:?})")]
    Degree {
        point: String,
        degree: usize,
        facets: Vec<usize>,
    },

    #[error("contour traversal from {start} ran out of neighbours before closing")]
    OpenChain { start: String },

    #[error("contour winding is ambiguous: {0}")]
    AmbiguousWinding(String),

    #[error("layer {layer} has an odd number ({count}) of type II contours")]
    OddTypeII { layer: usize, count: usize },

    #[error("{count} facets pass through slicyl {layer} without edge crossings")]
    InteriorPass { layer: usize, count: usize },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SlicylError {
    /// Stable machine-readable code for error records.
    pub fn code(&self) -> &'static str {
        match self {
            SlicylError::EmptyFile => "E_EMPTY_FILE",
            SlicylError::Truncated { .. } => "E_TRUNCATED",
            SlicylError::Parse(_) => "E_PARSE",
            SlicylError::NonManifold(_) => "E_NON_MANIFOLD",
            SlicylError::ZeroAxis => "E_ZERO_AXIS",
            SlicylError::DecollideFail { .. } => "E_DECOLLIDE_FAIL",
            SlicylError::NoLayers { .. } => "E_NO_LAYERS",
            SlicylError::AxisCrossingFacet { .. } => "E_AXIS_CROSSING_FACET",
            SlicylError::ArcOracle { .. } => "E_ARC_ORACLE",
            SlicylError::DegeneratePlane => "E_DEGENERATE_PLANE",
            SlicylError::Degree { .. } => "E_DEGREE",
            SlicylError::OpenChain { .. } => "E_OPEN_CHAIN",
            SlicylError::AmbiguousWinding(_) => "E_AMBIGUOUS_WINDING",
            SlicylError::OddTypeII { .. } => "E_ODD_TYPE_II",
            SlicylError::InteriorPass { .. } => "E_INTERIOR_PASS",
            SlicylError::Param(_) => "E_PARAM",
            SlicylError::Io(_) => "E_IO",
        }
    }
}
