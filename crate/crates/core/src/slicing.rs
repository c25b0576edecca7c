//! Cutting a mesh with concentric cylinders about the x-axis.
//!
//! Each cylinder ("slicyl") is `y^2 + z^2 = r^2`. Crossings are computed
//! once per canonical edge per layer and shared by both adjacent facets, so
//! the two facets always agree on ids and coordinates. Within a facet, the
//! crossings are paired by walking the facet perimeter: a stretch of the
//! perimeter lying outside the cylinder is bounded by two crossings, and the
//! cylinder curve joining those crossings runs through the facet.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Result, SlicylError};
use crate::geometry::{arc_point, axis_distance, barycentric, Plane, Point};
use crate::mesh::TriangleMesh;
use crate::orientation::decollide_radii;

/// Relative discriminant below which a root pair counts as a tangency.
pub const TANGENT_DISC_REL: f64 = 1e-12;

/// Barycentric slack allowed for the arc-inside-facet check.
pub const ARC_INSIDE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundingCylinder {
    pub radius: f64,
    pub length: f64,
    pub x_min: f64,
    pub x_max: f64,
}

pub fn bounding_cylinder(mesh: &TriangleMesh) -> BoundingCylinder {
    let mut bc = BoundingCylinder {
        radius: 0.0,
        length: 0.0,
        x_min: f64::INFINITY,
        x_max: f64::NEG_INFINITY,
    };
    for v in mesh.vertices() {
        bc.radius = bc.radius.max(axis_distance(v));
        bc.x_min = bc.x_min.min(v.x);
        bc.x_max = bc.x_max.max(v.x);
    }
    if mesh.vertices().is_empty() {
        bc.x_min = 0.0;
        bc.x_max = 0.0;
    }
    bc.length = bc.x_max - bc.x_min;
    bc
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlicylSet {
    pub mandrel_radius: f64,
    pub layer_thickness: f64,
    pub epsilon: f64,
    /// Radii after decollision; `radii[i - 1]` is slicyl `i`.
    pub radii: Vec<f64>,
    pub nominal_radii: Vec<f64>,
}

impl SlicylSet {
    pub fn count(&self) -> usize {
        self.radii.len()
    }

    /// One-based slicyl index of `radii[pos]`.
    pub fn index_of(&self, pos: usize) -> usize {
        pos + 1
    }
}

/// Default decollision band: a millionth of the layer thickness.
pub fn default_epsilon(layer_thickness: f64) -> f64 {
    1e-6 * layer_thickness
}

/// `k = floor((r_BC - r_m) / delta)` radii at `r_m + i * delta`, then
/// nudged clear of vertex distances.
pub fn build_slicyl_set(
    mesh: &TriangleMesh,
    mandrel_radius: f64,
    layer_thickness: f64,
    epsilon: Option<f64>,
    bounding: &BoundingCylinder,
) -> Result<SlicylSet> {
    if !(mandrel_radius >= 0.0) || !mandrel_radius.is_finite() {
        return Err(SlicylError::Param(format!(
            "mandrel radius must be non-negative, got {mandrel_radius}"
        )));
    }
    if !(layer_thickness > 0.0) || !layer_thickness.is_finite() {
        return Err(SlicylError::Param(format!(
            "layer thickness must be positive, got {layer_thickness}"
        )));
    }
    let first = mandrel_radius + layer_thickness;
    if bounding.radius <= first {
        return Err(SlicylError::NoLayers {
            bounding_radius: bounding.radius,
            first_radius: first,
        });
    }
    let k = ((bounding.radius - mandrel_radius) / layer_thickness).floor() as usize;
    let nominal: Vec<f64> = (1..=k)
        .map(|i| mandrel_radius + i as f64 * layer_thickness)
        .collect();
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(layer_thickness));
    let radii = decollide_radii(mesh, &nominal, epsilon)?;
    Ok(SlicylSet {
        mandrel_radius,
        layer_thickness,
        epsilon,
        radii,
        nominal_radii: nominal,
    })
}

/// A crossing is named by its canonical edge and its rank (by parameter)
/// among that edge's crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PointId {
    pub edge: usize,
    pub root: u8,
}

impl std::fmt::Display for PointId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}r{}", self.edge, self.root)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntersectionPoint {
    pub id: PointId,
    pub position: Point,
    /// Parameter along the canonical edge direction, strictly in (0, 1).
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Segment {
    pub facet: usize,
    pub endpoints: [PointId; 2],
}

/// Up to two crossings of one edge, sorted by parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCrossings {
    len: u8,
    t: [f64; 2],
    points: [Point; 2],
}

impl EdgeCrossings {
    const NONE: EdgeCrossings = EdgeCrossings {
        len: 0,
        t: [0.0; 2],
        points: [Point::new(0.0, 0.0, 0.0); 2],
    };

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (f64, Point)> + ExactSizeIterator + '_ {
        (0..self.len()).map(|i| (self.t[i], self.points[i]))
    }

    pub fn get(&self, root: usize) -> (f64, Point) {
        (self.t[root], self.points[root])
    }
}

/// Transversal crossings of segment `p0 -> p1` with the slicyl of radius
/// `radius`. Tangencies and edges parallel to the axis yield nothing.
pub fn edge_cylinder_intersections(p0: &Point, p1: &Point, radius: f64) -> EdgeCrossings {
    let v = p1.y - p0.y;
    let w = p1.z - p0.z;
    let a = v * v + w * w;
    if a == 0.0 {
        return EdgeCrossings::NONE;
    }
    let b = 2.0 * (p0.y * v + p0.z * w);
    let c = p0.y * p0.y + p0.z * p0.z - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 || disc < TANGENT_DISC_REL * b * b {
        return EdgeCrossings::NONE;
    }
    // numerically stable pair
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (mut r0, mut r1) = (q / a, c / q);
    if r0 > r1 {
        std::mem::swap(&mut r0, &mut r1);
    }
    let mut out = EdgeCrossings::NONE;
    for t in [r0, r1] {
        if t > 0.0 && t < 1.0 {
            let i = out.len as usize;
            out.t[i] = t;
            out.points[i] = Point::new(
                p0.x + t * (p1.x - p0.x),
                p0.y + t * v,
                p0.z + t * w,
            );
            out.len += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerimeterNode {
    Vertex(usize),
    Crossing(PointId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerimeterEntry {
    pub node: PerimeterNode,
    pub position: Point,
}

/// Cyclic list `V0, (V0V1 crossings), V1, (V1V2 crossings), V2, (V2V0
/// crossings)`, each edge's crossings ordered along the facet's own
/// traversal direction.
pub fn facet_perimeter_list<'a>(
    mesh: &TriangleMesh,
    facet: usize,
    crossings: impl Fn(usize) -> &'a EdgeCrossings,
) -> Vec<PerimeterEntry> {
    let f = &mesh.facets()[facet];
    let edges = mesh.facet_edges(facet);
    let mut out = Vec::with_capacity(9);
    for k in 0..3 {
        let vid = f.vertices[k];
        out.push(PerimeterEntry {
            node: PerimeterNode::Vertex(vid),
            position: mesh.vertices()[vid],
        });
        let eid = edges[k];
        let cx = crossings(eid);
        if cx.is_empty() {
            continue;
        }
        let forward = mesh.edges()[eid].endpoints[0] == vid;
        let entry = |(root, (_, p)): (usize, (f64, Point))| PerimeterEntry {
            node: PerimeterNode::Crossing(PointId {
                edge: eid,
                root: root as u8,
            }),
            position: p,
        };
        if forward {
            out.extend(cx.iter().enumerate().map(entry));
        } else {
            out.extend(cx.iter().enumerate().rev().map(entry));
        }
    }
    out
}

/// Walks the perimeter list and pairs the crossings that bound stretches
/// lying on or outside the cylinder. Every emitted pair is checked against
/// the arc-inside-facet criterion.
pub fn facet_relevant_segments(
    mesh: &TriangleMesh,
    facet: usize,
    perimeter: &[PerimeterEntry],
    radius: f64,
) -> Result<Vec<Segment>> {
    let n = perimeter.len();
    let Some(start) = perimeter
        .iter()
        .position(|e| matches!(e.node, PerimeterNode::Crossing(_)))
    else {
        return Ok(Vec::new());
    };

    let mut segments = Vec::new();
    let mut last: Option<(PointId, Point)> = None;
    for j in 0..n {
        let cur = &perimeter[(start + j) % n];
        let next = &perimeter[(start + j + 1) % n];
        let mid = Point::from((cur.position.coords + next.position.coords) * 0.5);
        if axis_distance(&mid) < radius {
            // the cylinder runs outside the facet along this stretch
            continue;
        }
        if let (PerimeterNode::Crossing(id), None) = (cur.node, last) {
            last = Some((id, cur.position));
        }
        if let (PerimeterNode::Crossing(id), Some((first, _))) = (next.node, last) {
            segments.push(Segment {
                facet,
                endpoints: [first, id],
            });
            last = None;
        }
    }

    if !segments.is_empty() {
        let lookup = |id: PointId| {
            perimeter
                .iter()
                .find(|e| e.node == PerimeterNode::Crossing(id))
                .map(|e| e.position)
                .expect("segment endpoint comes from the perimeter")
        };
        for s in &segments {
            let min = arc_midpoint_barycentric(mesh, facet, radius, &lookup(s.endpoints[0]), &lookup(s.endpoints[1]))?;
            if min < -ARC_INSIDE_TOL {
                return Err(SlicylError::ArcOracle {
                    facet,
                    min_barycentric: min,
                });
            }
        }
    }
    Ok(segments)
}

/// Smallest barycentric coordinate of the cylinder-curve point halfway
/// between `a` and `b`, relative to `facet`.
pub fn arc_midpoint_barycentric(
    mesh: &TriangleMesh,
    facet: usize,
    radius: f64,
    a: &Point,
    b: &Point,
) -> Result<f64> {
    let tri = mesh.facet_points(facet);
    let plane = Plane::through_triangle(tri[0], tri[1], tri[2]).ok_or(SlicylError::DegeneratePlane)?;
    let mid = arc_point(&plane, radius, a, b, 0.5)?;
    Ok(barycentric(&mid, tri).into_iter().fold(f64::INFINITY, f64::min))
}

/// Fails if the facet's yz-projection contains the origin, i.e. the facet
/// touches or crosses the x-axis.
pub fn check_axis_clear(mesh: &TriangleMesh, facet: usize) -> Result<()> {
    let [a, b, c] = mesh.facet_points(facet);
    let orient = |p: &Point, q: &Point| p.y * q.z - p.z * q.y;
    // orientation of (p, q, origin) = cross(q - p, -p) = cross(p, q)
    let d = [orient(a, b), orient(b, c), orient(c, a)];
    let has_neg = d.iter().any(|&v| v < 0.0);
    let has_pos = d.iter().any(|&v| v > 0.0);
    if has_neg && has_pos {
        return Ok(());
    }
    let contains = if d.iter().all(|&v| v == 0.0) {
        // projection is a segment on a line through the origin
        let ys = [a.y, b.y, c.y];
        let zs = [a.z, b.z, c.z];
        let span = |v: [f64; 3]| {
            v.iter().cloned().fold(f64::INFINITY, f64::min) <= 0.0
                && v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) >= 0.0
        };
        span(ys) && span(zs)
    } else {
        true
    };
    if contains {
        Err(SlicylError::AxisCrossingFacet { facet })
    } else {
        Ok(())
    }
}

/// Segments and crossings of one slicyl.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerSlice {
    /// One-based slicyl index.
    pub index: usize,
    pub radius: f64,
    pub segments: Vec<Segment>,
    pub points: BTreeMap<PointId, IntersectionPoint>,
    /// Facets considered for this layer that produced no crossings.
    pub interior_pass: Vec<usize>,
}

impl LayerSlice {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn position(&self, id: PointId) -> Point {
        self.points[&id].position
    }
}

/// Slices the given facets with one slicyl. `facets` is either the active
/// list for this slicyl or, for the brute-force reference, every facet.
pub fn slice_facets(
    mesh: &TriangleMesh,
    facets: impl IntoIterator<Item = usize>,
    index: usize,
    radius: f64,
) -> Result<LayerSlice> {
    let mut memo: HashMap<usize, EdgeCrossings> = HashMap::new();
    let mut segments = Vec::new();
    let mut points = BTreeMap::new();
    let mut interior_pass = Vec::new();

    for fid in facets {
        check_axis_clear(mesh, fid)?;
        let mut any = false;
        for eid in mesh.facet_edges(fid) {
            let cx = memo.entry(eid).or_insert_with(|| {
                let [lo, hi] = mesh.edges()[eid].endpoints;
                edge_cylinder_intersections(&mesh.vertices()[lo], &mesh.vertices()[hi], radius)
            });
            for (root, (t, position)) in cx.iter().enumerate() {
                any = true;
                let id = PointId {
                    edge: eid,
                    root: root as u8,
                };
                points.entry(id).or_insert(IntersectionPoint { id, position, t });
            }
        }
        if !any {
            if facet_straddles(mesh, fid, radius) {
                interior_pass.push(fid);
            }
            continue;
        }
        let perimeter = facet_perimeter_list(mesh, fid, |e| &memo[&e]);
        segments.extend(facet_relevant_segments(mesh, fid, &perimeter, radius)?);
    }

    Ok(LayerSlice {
        index,
        radius,
        segments,
        points,
        interior_pass,
    })
}

/// True when some facet vertex lies beyond `radius` while the facet still
/// comes closer than `radius` to the axis; with no edge crossings that
/// means the cylinder passes through the facet interior undetected.
fn facet_straddles(mesh: &TriangleMesh, facet: usize, radius: f64) -> bool {
    let [a, b, c] = mesh.facet_points(facet);
    let far = [a, b, c].iter().any(|p| axis_distance(p) > radius);
    if !far {
        return false;
    }
    let near = [(a, b), (b, c), (c, a)]
        .iter()
        .any(|(p, q)| crate::active::edge_min_distance(p, q).distance < radius);
    near
}
