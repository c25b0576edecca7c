//! Small geometric helpers shared across the slicing pipeline.
//!
//! Everything here measures against the x-axis, which is the common axis of
//! every slicing cylinder once a mesh has been oriented.

use std::f64::consts::PI;

use nalgebra::{Point3, Vector3};

use crate::error::{Result, SlicylError};

pub type Point = Point3<f64>;
pub type Vector = Vector3<f64>;

/// Below this |n_x| the curve is parameterised by x rather than by polar angle.
const STEEP_PLANE_NX: f64 = 1e-3;

/// Distance of a point from the x-axis, `sqrt(y^2 + z^2)`.
#[inline]
pub fn axis_distance(p: &Point) -> f64 {
    (p.y * p.y + p.z * p.z).sqrt()
}

/// Polar angle about the x-axis, `atan2(z, y)`.
#[inline]
pub fn polar_angle(p: &Point) -> f64 {
    p.z.atan2(p.y)
}

/// Wraps an angle difference into `(-pi, pi]`.
#[inline]
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    } else if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

/// Right-hand-rule normal of a triangle, not normalised.
#[inline]
pub fn triangle_cross(v0: &Point, v1: &Point, v2: &Point) -> Vector {
    (v1 - v0).cross(&(v2 - v0))
}

/// Barycentric coordinates of `p` (projected onto the triangle's plane).
pub fn barycentric(p: &Point, tri: [&Point; 3]) -> [f64; 3] {
    let [a, b, c] = tri;
    let n = triangle_cross(a, b, c);
    let nn = n.norm_squared();
    let l0 = n.dot(&(c - b).cross(&(p - b))) / nn;
    let l1 = n.dot(&(a - c).cross(&(p - c))) / nn;
    let l2 = n.dot(&(b - a).cross(&(p - a))) / nn;
    [l0, l1, l2]
}

/// An oriented plane `normal . p = offset` with a unit normal.
#[derive(Debug, Clone, Copy)]
pub struct Plane {
    pub normal: Vector,
    pub offset: f64,
}

impl Plane {
    pub fn through_triangle(v0: &Point, v1: &Point, v2: &Point) -> Option<Plane> {
        let n = triangle_cross(v0, v1, v2);
        let len = n.norm();
        if len == 0.0 || !len.is_finite() {
            return None;
        }
        let normal = n / len;
        Some(Plane {
            normal,
            offset: normal.dot(&v0.coords),
        })
    }

    pub fn residual(&self, p: &Point) -> f64 {
        self.normal.dot(&p.coords) - self.offset
    }
}

/// Point on the curve where `plane` meets the cylinder of radius `radius`
/// about the x-axis, a given fraction of the way from `start` to `end`.
///
/// Both endpoints must lie on the plane and on the cylinder. The branch
/// taken is the one spanning less than half a turn, which is the only one
/// a facet clear of the axis can contain. The curve is parameterised by
/// polar angle, except for planes nearly parallel to the axis (where the
/// curve degenerates towards straight lines) which are parameterised by x.
pub fn arc_point(plane: &Plane, radius: f64, start: &Point, end: &Point, fraction: f64) -> Result<Point> {
    let n = plane.normal;
    let scale = start.coords.norm().max(end.coords.norm()).max(1.0);
    if n.x.abs() <= 1e-12 && plane.offset.abs() <= 1e-12 * scale {
        return Err(SlicylError::DegeneratePlane);
    }
    if fraction == 0.0 {
        return Ok(*start);
    }
    if fraction == 1.0 {
        return Ok(*end);
    }

    let a0 = polar_angle(start);
    let a1 = polar_angle(end);
    let span = wrap_angle(a1 - a0);

    if n.x.abs() <= STEEP_PLANE_NX {
        // n_y y + n_z z = m r cos(alpha - beta)
        let m = (n.y * n.y + n.z * n.z).sqrt();
        let beta = n.z.atan2(n.y);
        let side0 = wrap_angle(a0 - beta);
        let side1 = wrap_angle(a1 - beta);
        if side0.signum() == side1.signum() {
            let x = start.x + fraction * (end.x - start.x);
            let k = plane.offset - n.x * x;
            let c = (k / (m * radius)).clamp(-1.0, 1.0);
            let alpha = beta + side0.signum() * c.acos();
            return Ok(Point::new(x, radius * alpha.cos(), radius * alpha.sin()));
        }
    }

    let alpha = a0 + fraction * span;
    let (y, z) = (radius * alpha.cos(), radius * alpha.sin());
    let x = (plane.offset - n.y * y - n.z * z) / n.x;
    Ok(Point::new(x, y, z))
}
