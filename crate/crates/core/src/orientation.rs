//! Moving a mesh so its bore axis lies on the positive x-axis, and keeping
//! slicing radii clear of vertex distances.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix3;

use crate::error::{Result, SlicylError};
use crate::geometry::{axis_distance, Point, Vector};
use crate::mesh::TriangleMesh;

/// Maximum number of outward nudges tried per radius.
pub const MAX_NUDGES: usize = 8;

/// User-picked axis through the model's void, from `a` (one opening) to `b`
/// (the opposite opening).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewerAxis {
    pub a: Point,
    pub b: Point,
}

impl SkewerAxis {
    pub fn new(a: Point, b: Point) -> Self {
        SkewerAxis { a, b }
    }
}

/// Rotation about z by `phi` followed by rotation about y by `theta`,
/// applied after translating by `translation`. `x_offset` is an optional
/// final shift along the axis for positioning on the mandrel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector,
    pub phi: f64,
    pub theta: f64,
    pub x_offset: f64,
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform {
            rotation: Matrix3::identity(),
            translation: Vector::zeros(),
            phi: 0.0,
            theta: 0.0,
            x_offset: 0.0,
        }
    }

    pub fn with_x_offset(mut self, x_offset: f64) -> Self {
        self.x_offset = x_offset;
        self
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        let mut q = Point::from(self.rotation * (p.coords + self.translation));
        q.x += self.x_offset;
        q
    }

    pub fn apply_normal(&self, n: &Vector) -> Vector {
        self.rotation * n
    }
}

fn rot_z(phi: f64) -> Matrix3<f64> {
    let (s, c) = phi.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_y(theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Transform taking `axis.a` to the origin and `axis.b` onto the positive
/// x-axis at distance `|b - a|`.
pub fn compute_skewer_transform(axis: &SkewerAxis) -> Result<RigidTransform> {
    let v = axis.b - axis.a;
    let len = v.norm();
    if len == 0.0 || !len.is_finite() {
        return Err(SlicylError::ZeroAxis);
    }
    let phi = if v.x == 0.0 && v.y == 0.0 {
        0.0
    } else {
        -v.y.atan2(v.x)
    };
    let theta = FRAC_PI_2 - (v.z / len).clamp(-1.0, 1.0).acos();
    Ok(RigidTransform {
        rotation: rot_y(theta) * rot_z(phi),
        translation: -axis.a.coords,
        phi,
        theta,
        x_offset: 0.0,
    })
}

/// Moves every vertex and rotates every normal; ids and adjacency carry over.
pub fn apply_transform(mesh: &TriangleMesh, transform: &RigidTransform) -> TriangleMesh {
    mesh.map_geometry(|p| transform.apply_point(p), |n| transform.apply_normal(n))
}

/// Rotation of the whole mesh about the x-axis by `angle`.
pub fn roll_about_x(mesh: &TriangleMesh, angle: f64) -> TriangleMesh {
    let (s, c) = angle.sin_cos();
    let r = Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c);
    mesh.map_geometry(|p| Point::from(r * p.coords), |n| r * n)
}

/// Nudges each radius outward by `2 * epsilon` until no vertex distance
/// lies within `epsilon` of it. Radii must be strictly increasing and stay
/// so. The mesh is left untouched.
pub fn decollide_radii(mesh: &TriangleMesh, radii: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    if !(epsilon > 0.0) {
        return Err(SlicylError::Param(format!("epsilon must be positive, got {epsilon}")));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(SlicylError::Param("radii must be strictly increasing".into()));
    }
    let mut distances: Vec<f64> = mesh.vertices().iter().map(axis_distance).collect();
    distances.sort_by(f64::total_cmp);

    let collides = |r: f64| {
        let start = distances.partition_point(|&d| d <= r - epsilon);
        distances.get(start).is_some_and(|&d| d < r + epsilon)
    };

    let mut out = Vec::with_capacity(radii.len());
    for &nominal in radii {
        let mut r = nominal;
        let mut nudges = 0;
        while collides(r) {
            if nudges == MAX_NUDGES {
                return Err(SlicylError::DecollideFail {
                    radius: nominal,
                    attempts: nudges,
                });
            }
            r += 2.0 * epsilon;
            nudges += 1;
        }
        if let Some(&prev) = out.last() {
            if !(prev < r) {
                return Err(SlicylError::DecollideFail {
                    radius: nominal,
                    attempts: nudges,
                });
            }
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{fixtures::tetrahedron, weld_and_index, RawFacet};
    use crate::geometry::triangle_cross;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    #[test]
    fn pure_z_axis() {
        let t = compute_skewer_transform(&SkewerAxis::new(p(0.0, 0.0, 0.0), p(0.0, 0.0, 2.0))).unwrap();
        assert_eq!(t.phi, 0.0);
        assert_relative_eq!(t.theta, FRAC_PI_2);
        let b = t.apply_point(&p(0.0, 0.0, 2.0));
        assert_relative_eq!(b, p(2.0, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn already_aligned() {
        let t = compute_skewer_transform(&SkewerAxis::new(p(1.0, 1.0, 1.0), p(4.0, 1.0, 1.0))).unwrap();
        assert_eq!(t.rotation, Matrix3::identity());
        assert_eq!(t.translation, Vector::new(-1.0, -1.0, -1.0));
        assert_eq!(t.apply_point(&p(4.0, 1.0, 1.0)), p(3.0, 0.0, 0.0));
    }

    #[test]
    fn diagonal_in_xy() {
        let t = compute_skewer_transform(&SkewerAxis::new(p(0.0, 0.0, 0.0), p(1.0, 1.0, 0.0))).unwrap();
        assert_relative_eq!(t.phi, -FRAC_PI_4);
        assert_relative_eq!(t.theta, 0.0);
        // hand product of R_y(0) R_z(-pi/4) applied to (1, 1, 0)
        let c = FRAC_PI_4.cos();
        let s = -FRAC_PI_4.sin();
        let by_hand = p(c * 1.0 - s * 1.0, s * 1.0 + c * 1.0, 0.0);
        let b = t.apply_point(&p(1.0, 1.0, 0.0));
        assert_relative_eq!(b, by_hand, epsilon = 1e-15);
        assert_relative_eq!(b, p(2f64.sqrt(), 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn zero_axis_rejected() {
        let a = p(1.0, 2.0, 3.0);
        assert!(matches!(
            compute_skewer_transform(&SkewerAxis::new(a, a)),
            Err(SlicylError::ZeroAxis)
        ));
    }

    #[test]
    fn rotation_is_proper() {
        let t = compute_skewer_transform(&SkewerAxis::new(p(0.3, -2.0, 1.0), p(-1.0, 0.5, -4.0))).unwrap();
        let r = t.rotation;
        assert_relative_eq!(r * r.transpose(), Matrix3::identity(), epsilon = 1e-12);
        assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_transform_keeps_mesh() {
        let (mesh, _) = weld_and_index(&tetrahedron());
        assert_eq!(apply_transform(&mesh, &RigidTransform::identity()), mesh);
    }

    #[test]
    fn rotated_normals_match_rederived() {
        let (mesh, _) = weld_and_index(&tetrahedron());
        let t = compute_skewer_transform(&SkewerAxis::new(p(0.0, 0.0, 0.0), p(0.0, 0.0, 2.0))).unwrap();
        let moved = apply_transform(&mesh, &t);
        for (fid, f) in moved.facets().iter().enumerate() {
            assert_relative_eq!(f.normal, t.rotation * mesh.facets()[fid].normal, epsilon = 1e-12);
            let [a, b, c] = moved.facet_points(fid);
            let n = triangle_cross(a, b, c).normalize();
            assert_relative_eq!(f.normal, n, epsilon = 1e-9);
        }
        assert_eq!(moved.edges().len(), mesh.edges().len());
        for (e0, e1) in mesh.edges().iter().zip(moved.edges()) {
            assert_eq!(e0.facets, e1.facets);
        }
    }

    fn ring_mesh(distances: &[f64]) -> TriangleMesh {
        // one facet per distance, all three vertices at that distance
        let raw: Vec<RawFacet> = distances
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let x = 10.0 * i as f64;
                RawFacet::new([x, d, 0.0], [x + 1.0, d, 0.0], [x, 0.0, d])
            })
            .collect();
        weld_and_index(&raw).0
    }

    #[test]
    fn clear_radii_unchanged() {
        let mesh = ring_mesh(&[1.0, 5.0]);
        assert_eq!(decollide_radii(&mesh, &[2.0, 3.0], 1e-6).unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn single_collision_nudged_once() {
        let mesh = ring_mesh(&[3.0]);
        assert_eq!(decollide_radii(&mesh, &[3.0], 1e-6).unwrap(), vec![3.0 + 2e-6]);
    }

    #[test]
    fn repeated_nudges() {
        let mesh = ring_mesh(&[3.0, 3.000002]);
        let out = decollide_radii(&mesh, &[3.0], 1e-6).unwrap();
        // 3.0 -> 3.000002 (hits second vertex) -> 3.000004
        assert_eq!(out, vec![3.0 + 2e-6 + 2e-6]);
        assert!(out[0] - 3.000002 >= 1e-6);
    }

    #[test]
    fn dense_vertices_fail() {
        let ds: Vec<f64> = (0..40).map(|i| 3.0 + i as f64 * 1e-6).collect();
        let mesh = ring_mesh(&ds);
        assert!(matches!(
            decollide_radii(&mesh, &[3.0], 1e-6),
            Err(SlicylError::DecollideFail { .. })
        ));
    }

    #[test]
    fn roll_preserves_axis_distance() {
        let (mesh, _) = weld_and_index(&tetrahedron());
        let rolled = roll_about_x(&mesh, PI / 3.0);
        for (a, b) in mesh.vertices().iter().zip(rolled.vertices()) {
            assert_relative_eq!(axis_distance(a), axis_distance(b), epsilon = 1e-12);
            assert_eq!(a.x, b.x);
        }
    }
}
