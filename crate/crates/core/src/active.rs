//! Per-slicyl lists of facets that can meet the slicyl.
//!
//! A facet's distance from the axis ranges over `[d_pmin, d_vmax]`, where
//! `d_pmin` is the closest approach of any of its edges and `d_vmax` its
//! farthest vertex. It is active for radius `r` iff `d_pmin < r < d_vmax`.
//! Closest approach over edges equals closest approach over the whole facet
//! only because facets never cross the axis, which is checked.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{axis_distance, Point};
use crate::mesh::TriangleMesh;
use crate::slicing::{check_axis_clear, SlicylSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMinimum {
    pub t: f64,
    pub point: Point,
    pub distance: f64,
}

/// Closest approach of segment `p0 -> p1` to the x-axis. The stationary
/// point of `d(t)` is used when it falls strictly inside the segment,
/// otherwise the nearer endpoint.
pub fn edge_min_distance(p0: &Point, p1: &Point) -> EdgeMinimum {
    let v = p1.y - p0.y;
    let w = p1.z - p0.z;
    let a = v * v + w * w;
    if a == 0.0 {
        return EdgeMinimum {
            t: 0.0,
            point: *p0,
            distance: axis_distance(p0),
        };
    }
    let t = -(v * p0.y + w * p0.z) / a;
    if t > 0.0 && t < 1.0 {
        let point = Point::new(p0.x + t * (p1.x - p0.x), p0.y + t * v, p0.z + t * w);
        return EdgeMinimum {
            t,
            point,
            distance: axis_distance(&point),
        };
    }
    let (d0, d1) = (axis_distance(p0), axis_distance(p1));
    if d0 <= d1 {
        EdgeMinimum {
            t: 0.0,
            point: *p0,
            distance: d0,
        }
    } else {
        EdgeMinimum {
            t: 1.0,
            point: *p1,
            distance: d1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FacetRadialRange {
    pub facet: usize,
    pub d_pmin: f64,
    pub d_vmax: f64,
}

impl FacetRadialRange {
    pub fn is_active_for(&self, radius: f64) -> bool {
        self.d_pmin < radius && radius < self.d_vmax
    }
}

pub fn facet_radial_range(mesh: &TriangleMesh, facet: usize) -> Result<FacetRadialRange> {
    check_axis_clear(mesh, facet)?;
    let [a, b, c] = mesh.facet_points(facet);
    let d_pmin = [(a, b), (b, c), (c, a)]
        .iter()
        .map(|(p, q)| edge_min_distance(p, q).distance)
        .fold(f64::INFINITY, f64::min);
    let d_vmax = [a, b, c]
        .iter()
        .map(|p| axis_distance(p))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(FacetRadialRange {
        facet,
        d_pmin,
        d_vmax,
    })
}

/// Slicyl-major table: `lists[pos]` holds the facets active for
/// `radii[pos]`, in increasing facet id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActiveTable {
    lists: Vec<Vec<usize>>,
}

impl ActiveTable {
    /// Active facets of the slicyl at position `pos` (zero-based).
    pub fn facets(&self, pos: usize) -> &[usize] {
        self.lists.get(pos).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn total_entries(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }
}

/// Positions in the sorted `radii` lying strictly inside `(lo, hi)`.
pub fn radius_span(radii: &[f64], lo: f64, hi: f64) -> std::ops::Range<usize> {
    let start = radii.partition_point(|&r| r <= lo);
    let end = radii.partition_point(|&r| r < hi);
    start..end.max(start)
}

pub fn build_active_table(mesh: &TriangleMesh, slicyls: &SlicylSet) -> Result<ActiveTable> {
    let ranges: Vec<FacetRadialRange> = (0..mesh.facets().len())
        .into_par_iter()
        .map(|f| facet_radial_range(mesh, f))
        .collect::<Result<_>>()?;
    let mut lists = vec![Vec::new(); slicyls.count()];
    for range in &ranges {
        for pos in radius_span(&slicyls.radii, range.d_pmin, range.d_vmax) {
            lists[pos].push(range.facet);
        }
    }
    Ok(ActiveTable { lists })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::SlicylError;
    use crate::mesh::{weld_and_index, RawFacet};
    use approx::assert_relative_eq;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    #[test]
    fn interior_minimum() {
        let m = edge_min_distance(&p(0.0, -2.0, 1.0), &p(0.0, 2.0, 1.0));
        assert_eq!(m.t, 0.5);
        assert_eq!(m.point, p(0.0, 0.0, 1.0));
        assert_eq!(m.distance, 1.0);
    }

    #[test]
    fn minimum_clamped_to_endpoint() {
        let m = edge_min_distance(&p(0.0, 1.0, 0.0), &p(1.0, 2.0, 0.0));
        assert_eq!(m.distance, 1.0);
        assert_eq!(m.point, p(0.0, 1.0, 0.0));
    }

    #[test]
    fn constant_distance_edge() {
        let m = edge_min_distance(&p(0.0, 0.5, 0.0), &p(5.0, 0.5, 0.0));
        assert_eq!(m.distance, 0.5);
        assert_eq!(m.t, 0.0);
    }

    fn single(v: [[f64; 3]; 3]) -> TriangleMesh {
        weld_and_index(&[RawFacet::new(v[0], v[1], v[2])]).0
    }

    #[test]
    fn worked_facet_range() {
        let mesh = single([[0.0, 0.5, 0.0], [2.0, 0.5, 0.0], [1.0, 0.5, 2.0]]);
        let r = facet_radial_range(&mesh, 0).unwrap();
        assert_eq!(r.d_pmin, 0.5);
        assert_relative_eq!(r.d_vmax, 4.25f64.sqrt());
    }

    #[test]
    fn vertex_first_facet_range() {
        let mesh = single([[0.0, 3.0, 0.0], [1.0, 3.0, 0.0], [0.5, 3.0, 1.0]]);
        let r = facet_radial_range(&mesh, 0).unwrap();
        assert_eq!(r.d_pmin, 3.0);
        assert_relative_eq!(r.d_vmax, 10f64.sqrt());
    }

    #[test]
    fn range_endpoints_are_excluded() {
        let r = FacetRadialRange {
            facet: 0,
            d_pmin: 2.0,
            d_vmax: 3.0,
        };
        assert!(!r.is_active_for(2.0));
        assert!(r.is_active_for(2.5));
        assert!(!r.is_active_for(3.0));
    }

    #[test]
    fn chord_between_equidistant_vertices_dips_inside() {
        let mesh = single([[0.0, 3.0, 0.0], [1.0, 3.0, 0.0], [1.0, 0.0, 3.0]]);
        let r = facet_radial_range(&mesh, 0).unwrap();
        assert_relative_eq!(r.d_pmin, 4.5f64.sqrt(), epsilon = 1e-12);
        assert_eq!(r.d_vmax, 3.0);
    }

    #[test]
    fn axis_crossing_range_fails() {
        let mesh = single([[0.0, -1.0, -1.0], [0.0, 1.0, -1.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(
            facet_radial_range(&mesh, 0),
            Err(SlicylError::AxisCrossingFacet { .. })
        ));
    }

    #[test]
    fn strict_span() {
        let radii = [0.4, 1.0, 2.1];
        assert_eq!(radius_span(&radii, 0.5, 4.25f64.sqrt()), 1..2);
        assert_eq!(radius_span(&radii, 1.0, 2.1), 2..2);
        assert_eq!(radius_span(&radii, 0.1, 0.3), 0..0);
    }

    #[test]
    fn table_for_worked_facet() {
        let mesh = single([[0.0, 0.5, 0.0], [2.0, 0.5, 0.0], [1.0, 0.5, 2.0]]);
        let set = SlicylSet {
            mandrel_radius: 0.0,
            layer_thickness: 0.6,
            epsilon: 1e-6,
            radii: vec![0.4, 1.0, 2.1],
            nominal_radii: vec![0.4, 1.0, 2.1],
        };
        let table = build_active_table(&mesh, &set).unwrap();
        assert!(table.facets(0).is_empty());
        assert_eq!(table.facets(1), &[0]);
        assert!(table.facets(2).is_empty());
    }

    #[test]
    fn empty_mesh_empty_table() {
        let set = SlicylSet {
            mandrel_radius: 0.0,
            layer_thickness: 1.0,
            epsilon: 1e-6,
            radii: vec![1.0, 2.0],
            nominal_radii: vec![1.0, 2.0],
        };
        let table = build_active_table(&TriangleMesh::empty(), &set).unwrap();
        assert_eq!(table.total_entries(), 0);
    }
}
