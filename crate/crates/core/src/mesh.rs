//! Welded triangle meshes with edge adjacency and manifold validation.

use std::cmp::Ordering;
use std::collections::HashMap;

use log::warn;
use serde::Serialize;

use crate::error::{Result, SlicylError};
use crate::geometry::{triangle_cross, Point, Vector};

/// A facet as it comes out of a file: a stored normal and three corners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawFacet {
    pub normal: [f64; 3],
    pub vertices: [[f64; 3]; 3],
}

impl RawFacet {
    pub fn new(v0: [f64; 3], v1: [f64; 3], v2: [f64; 3]) -> Self {
        let n = triangle_cross(&v0.into(), &v1.into(), &v2.into());
        let len = n.norm();
        let normal = if len > 0.0 { n / len } else { n };
        RawFacet {
            normal: normal.into(),
            vertices: [v0, v1, v2],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub vertices: [usize; 3],
    /// Unit outward normal, derived from the vertex winding.
    pub normal: Vector,
}

/// An undirected edge. `endpoints[0]` is the lexicographically smaller
/// vertex position, which fixes the parameter direction used for every
/// intersection computed on this edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub endpoints: [usize; 2],
    pub facets: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeldReport {
    pub degenerate_facets: usize,
    pub normal_overrides: usize,
}

/// Immutable welded mesh. Built through [`weld_and_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    edges: Vec<Edge>,
    facet_edges: Vec<[usize; 3]>,
}

pub(crate) fn lex_cmp(a: &Point, b: &Point) -> Ordering {
    a.x.total_cmp(&b.x)
        .then(a.y.total_cmp(&b.y))
        .then(a.z.total_cmp(&b.z))
}

impl TriangleMesh {
    pub fn empty() -> Self {
        TriangleMesh {
            vertices: Vec::new(),
            facets: Vec::new(),
            edges: Vec::new(),
            facet_edges: Vec::new(),
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids of a facet, in traversal order `V0V1, V1V2, V2V0`.
    pub fn facet_edges(&self, facet: usize) -> [usize; 3] {
        self.facet_edges[facet]
    }

    pub fn facet_points(&self, facet: usize) -> [&Point; 3] {
        let [a, b, c] = self.facets[facet].vertices;
        [&self.vertices[a], &self.vertices[b], &self.vertices[c]]
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// Axis-aligned bounds `(min, max)`, or `None` for an empty mesh.
    pub fn bounds(&self) -> Option<(Point, Point)> {
        let first = self.vertices.first()?;
        let mut lo = *first;
        let mut hi = *first;
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        Some((lo, hi))
    }

    pub fn to_raw_facets(&self) -> Vec<RawFacet> {
        self.facets
            .iter()
            .map(|f| RawFacet {
                normal: f.normal.into(),
                vertices: f.vertices.map(|v| self.vertices[v].into()),
            })
            .collect()
    }

    /// Rebuilds the mesh with every vertex replaced by `map(vertex)` and
    /// every normal by `map_normal(normal)`, keeping ids and adjacency.
    /// Edge endpoints are re-canonicalised for the new positions.
    pub(crate) fn map_geometry(
        &self,
        map: impl Fn(&Point) -> Point,
        map_normal: impl Fn(&Vector) -> Vector,
    ) -> TriangleMesh {
        let vertices: Vec<Point> = self.vertices.iter().map(map).collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet {
                vertices: f.vertices,
                normal: map_normal(&f.normal),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let [a, b] = e.endpoints;
                let endpoints = if lex_cmp(&vertices[a], &vertices[b]) == Ordering::Greater {
                    [b, a]
                } else {
                    [a, b]
                };
                Edge {
                    endpoints,
                    facets: e.facets.clone(),
                }
            })
            .collect();
        TriangleMesh {
            vertices,
            facets,
            edges,
            facet_edges: self.facet_edges.clone(),
        }
    }
}

fn coord_key(p: &[f64; 3]) -> [u64; 3] {
    // -0.0 and 0.0 name the same position
    p.map(|c| if c == 0.0 { 0u64 } else { c.to_bits() })
}

/// Merges bitwise-identical vertices, drops zero-area facets, builds the
/// canonical edge table and re-derives facet normals from the winding.
pub fn weld_and_index(raw: &[RawFacet]) -> (TriangleMesh, WeldReport) {
    let mut report = WeldReport::default();
    let mut index: HashMap<[u64; 3], usize> = HashMap::with_capacity(raw.len() / 2 + 3);
    let mut vertices: Vec<Point> = Vec::with_capacity(raw.len() / 2 + 3);
    let mut facets = Vec::with_capacity(raw.len());

    for rf in raw {
        if rf.vertices.iter().flatten().any(|c| !c.is_finite()) {
            report.degenerate_facets += 1;
            continue;
        }
        let pts = rf.vertices.map(Point::from);
        let cross = triangle_cross(&pts[0], &pts[1], &pts[2]);
        let len = cross.norm();
        let scale = (pts[1] - pts[0]).norm() * (pts[2] - pts[0]).norm();
        if len <= 1e-12 * scale || len == 0.0 {
            report.degenerate_facets += 1;
            continue;
        }
        let ids = rf.vertices.map(|v| {
            *index.entry(coord_key(&v)).or_insert_with(|| {
                vertices.push(Point::from(v));
                vertices.len() - 1
            })
        });
        if ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2] {
            report.degenerate_facets += 1;
            continue;
        }
        let normal = cross / len;
        let stored = Vector::from(rf.normal);
        let stored_len = stored.norm();
        if stored_len > 0.0 && normal.dot(&stored) / stored_len < 1.0 - 1e-6 {
            report.normal_overrides += 1;
        }
        facets.push(Facet {
            vertices: ids,
            normal,
        });
    }

    if report.degenerate_facets > 0 {
        warn!("dropped {} degenerate facets", report.degenerate_facets);
    }
    if report.normal_overrides > 0 {
        warn!(
            "{} stored normals disagree with the vertex winding; winding used",
            report.normal_overrides
        );
    }

    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::with_capacity(facets.len() * 3 / 2);
    let mut edges: Vec<Edge> = Vec::with_capacity(facets.len() * 3 / 2);
    let mut facet_edges = Vec::with_capacity(facets.len());
    for (fid, f) in facets.iter().enumerate() {
        let mut ids = [0usize; 3];
        for k in 0..3 {
            let a = f.vertices[k];
            let b = f.vertices[(k + 1) % 3];
            let key = (a.min(b), a.max(b));
            let eid = *edge_index.entry(key).or_insert_with(|| {
                let endpoints = if lex_cmp(&vertices[a], &vertices[b]) == Ordering::Greater {
                    [b, a]
                } else {
                    [a, b]
                };
                edges.push(Edge {
                    endpoints,
                    facets: Vec::with_capacity(2),
                });
                edges.len() - 1
            });
            edges[eid].facets.push(fid);
            ids[k] = eid;
        }
        facet_edges.push(ids);
    }

    (
        TriangleMesh {
            vertices,
            facets,
            edges,
            facet_edges,
        },
        report,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeDefectKind {
    /// Fewer than two adjacent facets.
    Boundary,
    /// More than two adjacent facets.
    Overshared,
    /// Two facets traversing the edge in the same direction.
    Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeDefect {
    pub edge: usize,
    pub endpoints: [usize; 2],
    pub facets: Vec<usize>,
    pub kind: EdgeDefectKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ManifoldReport {
    pub offending: Vec<EdgeDefect>,
}

impl ManifoldReport {
    pub fn is_manifold(&self) -> bool {
        self.offending.is_empty()
    }

    pub fn count(&self, kind: EdgeDefectKind) -> usize {
        self.offending.iter().filter(|d| d.kind == kind).count()
    }
}

/// Whether `facet` walks `edge` from `endpoints[0]` to `endpoints[1]`.
pub fn traverses_forward(mesh: &TriangleMesh, facet: usize, edge: usize) -> bool {
    let f = &mesh.facets[facet];
    let [lo, hi] = mesh.edges[edge].endpoints;
    (0..3).any(|k| f.vertices[k] == lo && f.vertices[(k + 1) % 3] == hi)
}

pub fn validate_manifold(mesh: &TriangleMesh) -> ManifoldReport {
    let mut offending = Vec::new();
    for (eid, e) in mesh.edges.iter().enumerate() {
        let kind = match e.facets.len() {
            0 | 1 => Some(EdgeDefectKind::Boundary),
            2 => {
                let a = traverses_forward(mesh, e.facets[0], eid);
                let b = traverses_forward(mesh, e.facets[1], eid);
                (a == b).then_some(EdgeDefectKind::Orientation)
            }
            _ => Some(EdgeDefectKind::Overshared),
        };
        if let Some(kind) = kind {
            offending.push(EdgeDefect {
                edge: eid,
                endpoints: e.endpoints,
                facets: e.facets.clone(),
                kind,
            });
        }
    }
    ManifoldReport { offending }
}

/// Validates and fails with `NonManifold` carrying the full report.
pub fn require_manifold(mesh: &TriangleMesh) -> Result<()> {
    let report = validate_manifold(mesh);
    if report.is_manifold() {
        Ok(())
    } else {
        Err(SlicylError::NonManifold(report))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::RawFacet;

    pub fn tetrahedron() -> Vec<RawFacet> {
        let a = [0.0, 0.0, 0.0];
        let b = [1.0, 0.0, 0.0];
        let c = [0.0, 1.0, 0.0];
        let d = [0.0, 0.0, 1.0];
        vec![
            RawFacet::new(a, c, b),
            RawFacet::new(a, b, d),
            RawFacet::new(a, d, c),
            RawFacet::new(b, c, d),
        ]
    }
}
