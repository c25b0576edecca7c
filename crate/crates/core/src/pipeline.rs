//! End-to-end slicing of an already oriented mesh.

use rayon::prelude::*;

use crate::active::{build_active_table, ActiveTable};
use crate::contour::{build_layer_contours, ContourOptions, LayerContours};
use crate::error::Result;
use crate::mesh::{require_manifold, TriangleMesh};
use crate::slicing::{bounding_cylinder, build_slicyl_set, slice_facets, BoundingCylinder, LayerSlice, SlicylSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceParams {
    pub mandrel_radius: f64,
    pub layer_thickness: f64,
    /// Decollision band; defaults to a millionth of the layer thickness.
    pub epsilon: Option<f64>,
    pub contour: ContourOptions,
    /// Slice even if the mesh fails the manifold check.
    pub force: bool,
}

impl SliceParams {
    pub fn new(mandrel_radius: f64, layer_thickness: f64) -> Self {
        SliceParams {
            mandrel_radius,
            layer_thickness,
            epsilon: None,
            contour: ContourOptions::default(),
            force: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SliceOutput {
    pub bounding: BoundingCylinder,
    pub slicyls: SlicylSet,
    pub active: ActiveTable,
    /// One entry per slicyl, innermost first.
    pub layers: Vec<LayerSlice>,
    pub contours: Vec<LayerContours>,
}

impl SliceOutput {
    /// `(layer index, facet)` for every facet the cylinder passed through
    /// without meeting an edge.
    pub fn interior_passes(&self) -> Vec<(usize, usize)> {
        self.layers
            .iter()
            .flat_map(|l| l.interior_pass.iter().map(move |&f| (l.index, f)))
            .collect()
    }
}

/// Slices one layer using the precomputed active list.
pub fn slice_layer(mesh: &TriangleMesh, active: &ActiveTable, slicyls: &SlicylSet, pos: usize) -> Result<LayerSlice> {
    slice_facets(
        mesh,
        active.facets(pos).iter().copied(),
        slicyls.index_of(pos),
        slicyls.radii[pos],
    )
}

/// Slices a mesh whose bore axis is already the x-axis. Layers are
/// processed in parallel; the output order is by radius regardless.
pub fn slice_mesh(mesh: &TriangleMesh, params: &SliceParams) -> Result<SliceOutput> {
    if params.force {
        if let Err(e) = require_manifold(mesh) {
            log::warn!("slicing despite manifold check failure: {e}");
        }
    } else {
        require_manifold(mesh)?;
    }
    let bounding = bounding_cylinder(mesh);
    let slicyls = build_slicyl_set(
        mesh,
        params.mandrel_radius,
        params.layer_thickness,
        params.epsilon,
        &bounding,
    )?;
    let active = build_active_table(mesh, &slicyls)?;
    log::info!(
        "{} slicyls, {} active facet entries over {} facets",
        slicyls.count(),
        active.total_entries(),
        mesh.facets().len()
    );

    let per_layer: Vec<(LayerSlice, LayerContours)> = (0..slicyls.count())
        .into_par_iter()
        .map(|pos| {
            let layer = slice_layer(mesh, &active, &slicyls, pos)?;
            let contours = build_layer_contours(mesh, &layer, &params.contour)?;
            Ok((layer, contours))
        })
        .collect::<Result<_>>()?;
    let (layers, contours): (Vec<_>, Vec<_>) = per_layer.into_iter().unzip();

    for layer in &layers {
        if !layer.interior_pass.is_empty() {
            log::warn!(
                "layer {} passes through {} facet interior(s) without crossing an edge",
                layer.index,
                layer.interior_pass.len()
            );
        }
    }

    Ok(SliceOutput {
        bounding,
        slicyls,
        active,
        layers,
        contours,
    })
}
