//! Stitching a layer's segments into closed contours, classifying them by
//! winding about the axis, and unrolling them onto the plane.
//!
//! A type I contour sits on the slicyl without encircling it (winding 0); a
//! type II contour goes once around it (winding +-2pi).

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SlicylError};
use crate::geometry::{arc_point, polar_angle, wrap_angle, Plane, Point};
use crate::mesh::TriangleMesh;
use crate::slicing::{LayerSlice, PointId, Segment};

/// Largest single-step angle that can still be wrapped unambiguously.
pub const MAX_STEP_ANGLE: f64 = PI - 1e-6;
pub const WINDING_QUANTUM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContourKind {
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
}

/// Neighbour of a crossing, with the facet owning the joining segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub point: PointId,
    pub facet: usize,
}

/// Crossing -> its (exactly two) neighbours.
#[derive(Debug, Clone, Default)]
pub struct AdjacencyTable {
    links: HashMap<PointId, Vec<Link>>,
}

impl AdjacencyTable {
    pub fn neighbours(&self, id: PointId) -> &[Link] {
        self.links.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &PointId> {
        self.links.keys()
    }
}

/// Builds the table from segments. `points` lists every crossing of the
/// layer so that crossings no segment reached show up with degree 0.
pub fn build_adjacency(
    segments: &[Segment],
    points: impl IntoIterator<Item = PointId>,
) -> Result<AdjacencyTable> {
    let mut links: HashMap<PointId, Vec<Link>> = HashMap::new();
    for id in points {
        links.entry(id).or_default();
    }
    for s in segments {
        let [p, q] = s.endpoints;
        let dup = links
            .get(&p)
            .is_some_and(|l| l.contains(&Link { point: q, facet: s.facet }));
        if dup {
            continue;
        }
        links.entry(p).or_default().push(Link { point: q, facet: s.facet });
        links.entry(q).or_default().push(Link { point: p, facet: s.facet });
    }
    let mut bad: Vec<(&PointId, &Vec<Link>)> = links.iter().filter(|(_, l)| l.len() != 2).collect();
    if !bad.is_empty() {
        bad.sort_by_key(|(id, _)| **id);
        let (id, l) = bad[0];
        let mut facets: Vec<usize> = l.iter().map(|k| k.facet).collect();
        facets.sort_unstable();
        facets.dedup();
        return Err(SlicylError::Degree {
            point: id.to_string(),
            degree: l.len(),
            facets,
        });
    }
    Ok(AdjacencyTable { links })
}

impl AdjacencyTable {
    pub fn from_layer(layer: &LayerSlice) -> Result<AdjacencyTable> {
        build_adjacency(&layer.segments, layer.points.keys().copied())
    }
}

/// A closed loop of crossings before geometry is attached. `facets[i]`
/// owns the segment from `points[i]` to `points[i + 1]` (cyclically).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedLoop {
    pub points: Vec<PointId>,
    pub facets: Vec<usize>,
}

/// Consumes the table, extracting every closed loop. Each loop starts at
/// the smallest remaining point id; its first neighbour is followed and
/// the second is the closing point.
pub fn close_contours(table: AdjacencyTable) -> Result<Vec<ClosedLoop>> {
    let mut links = table.links;
    let mut keys: Vec<PointId> = links.keys().copied().collect();
    keys.sort_unstable();

    let mut loops = Vec::new();
    for start in keys {
        let Some(first) = links.remove(&start) else {
            continue;
        };
        let open = || SlicylError::OpenChain {
            start: start.to_string(),
        };
        let [next, closing] = <[Link; 2]>::try_from(first).map_err(|_| open())?;
        let mut points = vec![start];
        let mut facets = vec![next.facet];
        let mut prev = Link {
            point: start,
            facet: next.facet,
        };
        let mut cur = next.point;
        loop {
            let vals = links.remove(&cur).ok_or_else(open)?;
            points.push(cur);
            let back = vals.iter().position(|l| *l == prev).ok_or_else(open)?;
            let step = vals[1 - back];
            if step.point == start {
                if step.facet != closing.facet || closing.point != cur {
                    return Err(open());
                }
                facets.push(step.facet);
                break;
            }
            facets.push(step.facet);
            prev = Link {
                point: cur,
                facet: step.facet,
            };
            cur = step.point;
        }
        loops.push(ClosedLoop { points, facets });
    }
    Ok(loops)
}

/// Sum of wrapped polar-angle steps around the closed polyline, and the
/// resulting kind. A two-point loop (an edge dipping inside the slicyl and
/// crossed twice) is fine: its two steps cancel unless one spans a half
/// turn, which the step check rejects.
pub fn classify_winding(positions: &[Point]) -> Result<(ContourKind, f64)> {
    if positions.len() < 2 {
        return Err(SlicylError::AmbiguousWinding(format!(
            "contour has {} points",
            positions.len()
        )));
    }
    let angles: Vec<f64> = positions.iter().map(polar_angle).collect();
    let mut winding = 0.0;
    for i in 0..angles.len() {
        let step = wrap_angle(angles[(i + 1) % angles.len()] - angles[i]);
        if step.abs() > MAX_STEP_ANGLE {
            return Err(SlicylError::AmbiguousWinding(format!(
                "step {i} spans {step:.9} rad"
            )));
        }
        winding += step;
    }
    let turns = (winding / TAU).round();
    if (winding - turns * TAU).abs() > WINDING_QUANTUM_TOL {
        return Err(SlicylError::AmbiguousWinding(format!(
            "winding {winding} is not a whole number of turns"
        )));
    }
    match turns as i64 {
        0 => Ok((ContourKind::TypeI, winding)),
        1 | -1 => Ok((ContourKind::TypeII, winding)),
        n => Err(SlicylError::AmbiguousWinding(format!("contour winds {n} times"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnrolledContour {
    /// `(x, u)` with `u = radius * unwrapped angle`.
    pub points: Vec<[f64; 2]>,
    /// How far `u` advances going once around the loop: 0 for type I,
    /// `+-2pi * radius` for type II.
    pub closure_offset: f64,
}

/// Maps each point to `(x, radius * alpha)` with alpha unwrapped step by
/// step from the first point.
pub fn unroll(positions: &[Point], radius: f64) -> UnrolledContour {
    let mut points = Vec::with_capacity(positions.len());
    let Some(first) = positions.first() else {
        return UnrolledContour {
            points,
            closure_offset: 0.0,
        };
    };
    let mut alpha = polar_angle(first);
    let mut total = 0.0;
    points.push([first.x, radius * alpha]);
    for w in positions.windows(2) {
        let step = wrap_angle(polar_angle(&w[1]) - polar_angle(&w[0]));
        alpha += step;
        total += step;
        points.push([w[1].x, radius * alpha]);
    }
    total += wrap_angle(polar_angle(first) - polar_angle(positions.last().unwrap()));
    UnrolledContour {
        points,
        closure_offset: radius * total,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourPoint {
    /// `None` for points inserted by arc subdivision.
    pub id: Option<PointId>,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contour {
    pub layer_index: usize,
    pub radius: f64,
    pub points: Vec<ContourPoint>,
    /// Facet owning the step from `points[i]` to the next point.
    pub facets: Vec<usize>,
    pub kind: ContourKind,
    pub winding: f64,
    pub unrolled: UnrolledContour,
}

impl Contour {
    pub fn positions(&self) -> Vec<Point> {
        self.points.iter().map(|p| p.position).collect()
    }

    pub fn mean_x(&self) -> f64 {
        self.points.iter().map(|p| p.position.x).sum::<f64>() / self.points.len() as f64
    }

    pub fn crossing_ids(&self) -> impl Iterator<Item = PointId> + '_ {
        self.points.iter().filter_map(|p| p.id)
    }
}

/// Sorts type II contours by mean x and pairs neighbours. Returned pairs
/// index into `contours`.
pub fn pair_type_ii(layer_index: usize, contours: &[Contour]) -> Result<Vec<[usize; 2]>> {
    let mut rings: Vec<(f64, usize)> = contours
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == ContourKind::TypeII)
        .map(|(i, c)| (c.mean_x(), i))
        .collect();
    if rings.len() % 2 == 1 {
        return Err(SlicylError::OddTypeII {
            layer: layer_index,
            count: rings.len(),
        });
    }
    rings.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(rings.chunks_exact(2).map(|p| [p[0].1, p[1].1]).collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ContourOptions {
    /// Split steps whose arc on the slicyl is longer than this.
    pub max_arc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerContours {
    pub index: usize,
    pub radius: f64,
    pub contours: Vec<Contour>,
    pub type_ii_pairs: Vec<[usize; 2]>,
}

impl LayerContours {
    pub fn count(&self, kind: ContourKind) -> usize {
        self.contours.iter().filter(|c| c.kind == kind).count()
    }
}

fn subdivide(
    mesh: &TriangleMesh,
    radius: f64,
    max_arc: f64,
    points: Vec<ContourPoint>,
    facets: Vec<usize>,
) -> Result<(Vec<ContourPoint>, Vec<usize>)> {
    let n = points.len();
    let mut out_p = Vec::with_capacity(n);
    let mut out_f = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        let facet = facets[i];
        out_p.push(a);
        out_f.push(facet);
        let span = wrap_angle(polar_angle(&b.position) - polar_angle(&a.position)).abs();
        let pieces = (radius * span / max_arc).ceil() as usize;
        if pieces < 2 {
            continue;
        }
        let [v0, v1, v2] = mesh.facet_points(facet);
        let plane = Plane::through_triangle(v0, v1, v2).ok_or(SlicylError::DegeneratePlane)?;
        for k in 1..pieces {
            let position = arc_point(&plane, radius, &a.position, &b.position, k as f64 / pieces as f64)?;
            out_p.push(ContourPoint { id: None, position });
            out_f.push(facet);
        }
    }
    Ok((out_p, out_f))
}

/// Full contour construction for one layer.
pub fn build_layer_contours(
    mesh: &TriangleMesh,
    layer: &LayerSlice,
    options: &ContourOptions,
) -> Result<LayerContours> {
    let table = AdjacencyTable::from_layer(layer)?;
    let loops = close_contours(table)?;
    let mut contours = Vec::with_capacity(loops.len());
    for lp in loops {
        let mut points: Vec<ContourPoint> = lp
            .points
            .iter()
            .map(|&id| ContourPoint {
                id: Some(id),
                position: layer.position(id),
            })
            .collect();
        let mut facets = lp.facets;
        if let Some(max_arc) = options.max_arc {
            (points, facets) = subdivide(mesh, layer.radius, max_arc, points, facets)?;
        }
        let positions: Vec<Point> = points.iter().map(|p| p.position).collect();
        let (kind, winding) = classify_winding(&positions)?;
        let unrolled = unroll(&positions, layer.radius);
        contours.push(Contour {
            layer_index: layer.index,
            radius: layer.radius,
            points,
            facets,
            kind,
            winding,
            unrolled,
        });
    }
    let type_ii_pairs = pair_type_ii(layer.index, &contours)?;
    Ok(LayerContours {
        index: layer.index,
        radius: layer.radius,
        contours,
        type_ii_pairs,
    })
}

/// Canonical form of a cyclic id sequence, invariant under rotation and
/// reversal: starts at the smallest id, heading towards the smaller of its
/// two neighbours.
pub fn canonical_cycle(ids: &[PointId]) -> Vec<PointId> {
    let n = ids.len();
    if n == 0 {
        return Vec::new();
    }
    let (start, _) = ids.iter().enumerate().min_by_key(|(_, id)| **id).unwrap();
    let fwd: Vec<PointId> = (0..n).map(|k| ids[(start + k) % n]).collect();
    let bwd: Vec<PointId> = (0..n).map(|k| ids[(start + n - k) % n]).collect();
    fwd.min(bwd)
}
