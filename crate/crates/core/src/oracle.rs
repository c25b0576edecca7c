//! Procedural test meshes and brute-force references.
//!
//! Nothing here sits on the slicing path; the acceptance suite and the
//! `gen`/`bench` commands use it to produce inputs with known answers.

use std::f64::consts::{FRAC_PI_4, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SlicylError};
use crate::mesh::{weld_and_index, RawFacet, TriangleMesh};
use crate::slicing::{slice_facets, LayerSlice};

pub use crate::geometry::arc_point;

#[derive(Debug, Clone)]
pub struct GeneratedMesh {
    pub mesh: TriangleMesh,
    /// Generator name and parameters, enough to regenerate the mesh.
    pub descriptor: String,
}

#[derive(Default)]
struct Builder {
    vertices: Vec<[f64; 3]>,
    tris: Vec<[usize; 3]>,
}

impl Builder {
    fn vertex(&mut self, p: [f64; 3]) -> usize {
        self.vertices.push(p);
        self.vertices.len() - 1
    }

    fn tri(&mut self, a: usize, b: usize, c: usize) {
        self.tris.push([a, b, c]);
    }

    /// Quad `a b c d` in counter-clockwise order seen from outside.
    fn quad(&mut self, a: usize, b: usize, c: usize, d: usize) {
        self.tri(a, b, c);
        self.tri(a, c, d);
    }

    fn raw(&self) -> Vec<RawFacet> {
        self.tris
            .iter()
            .map(|t| RawFacet::new(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]))
            .collect()
    }
}

fn ring_angle(i: usize, n: usize) -> f64 {
    TAU * i as f64 / n as f64
}

/// Axis-aligned cube spanning `x in [0, side]` with a square `side x side`
/// cross-section centred on the x-axis, bored along x by a prism of
/// `bore_segments` sides inscribed in a circle of `bore_radius`.
pub fn gen_cube_with_bore(side: f64, bore_radius: f64, bore_segments: usize) -> Result<GeneratedMesh> {
    if !(side > 0.0) || !(bore_radius > 0.0) || !(2.0 * bore_radius < side) {
        return Err(SlicylError::Param(format!(
            "cube needs 0 < 2 * bore_radius < side (side {side}, bore_radius {bore_radius})"
        )));
    }
    if bore_segments < 8 {
        return Err(SlicylError::Param(format!(
            "bore needs at least 8 segments, got {bore_segments}"
        )));
    }
    let n = bore_segments;
    let h = side / 2.0;

    // Outer square boundary in angular order. Ray i hits the square at
    // o_i; corners falling strictly between rays are inserted, and a ray
    // aimed exactly at a corner (8i = N(2k+1)) uses the exact corner.
    let is_corner_ray = |i: usize| (8 * i) % n == 0 && ((8 * i) / n) % 2 == 1;
    let corner = |k: usize| {
        let a = FRAC_PI_4 + k as f64 * TAU / 4.0;
        [h * a.cos().signum(), h * a.sin().signum()]
    };
    // outer[i] = (point at ray i, corners strictly after ray i and before ray i+1)
    let mut outer: Vec<([f64; 2], Option<[f64; 2]>)> = Vec::with_capacity(n);
    for i in 0..n {
        let a = ring_angle(i, n);
        let ray = if is_corner_ray(i) {
            corner((8 * i / n - 1) / 2)
        } else {
            let (s, c) = a.sin_cos();
            let m = c.abs().max(s.abs());
            if c.abs() >= s.abs() {
                [h * c.signum(), h * s / m]
            } else {
                [h * c / m, h * s.signum()]
            }
        };
        // corner k sits at angle (2k+1) pi / 4, strictly between rays i and i+1
        // iff 8i < N(2k+1) < 8(i+1)
        let between = (0..4).find(|&k| {
            let v = n * (2 * k + 1);
            8 * i < v && v < 8 * (i + 1)
        });
        outer.push((ray, between.map(corner)));
    }

    let mut b = Builder::default();
    let xs = [0.0, side];
    let bore: Vec<[usize; 2]> = (0..n)
        .map(|i| {
            let (s, c) = ring_angle(i, n).sin_cos();
            xs.map(|x| b.vertex([x, bore_radius * c, bore_radius * s]))
        })
        .collect();
    let ray: Vec<[usize; 2]> = outer
        .iter()
        .map(|(p, _)| xs.map(|x| b.vertex([x, p[0], p[1]])))
        .collect();
    let corners: Vec<Option<[usize; 2]>> = outer
        .iter()
        .map(|(_, c)| c.map(|p| xs.map(|x| b.vertex([x, p[0], p[1]]))))
        .collect();

    for i in 0..n {
        let j = (i + 1) % n;
        // bore wall faces the axis
        b.quad(bore[i][0], bore[i][1], bore[j][1], bore[j][0]);

        // outer side walls, split at any corner in this sector
        let mut chain = vec![ray[i]];
        chain.extend(corners[i]);
        chain.push(ray[j]);
        for w in chain.windows(2) {
            b.quad(w[0][0], w[1][0], w[1][1], w[0][1]);
        }

        // annular end faces: x = side faces +x, x = 0 faces -x
        let fan: Vec<[usize; 2]> = chain;
        for k in 0..fan.len() - 1 {
            b.tri(bore[i][1], fan[k][1], fan[k + 1][1]);
            b.tri(bore[i][0], fan[k + 1][0], fan[k][0]);
        }
        b.tri(bore[i][1], ray[j][1], bore[j][1]);
        b.tri(bore[i][0], bore[j][0], ray[j][0]);
    }

    let (mesh, _) = weld_and_index(&b.raw());
    Ok(GeneratedMesh {
        mesh,
        descriptor: format!("cube_with_bore(side={side}, bore_radius={bore_radius}, bore_segments={bore_segments})"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeOptions {
    /// Wall subdivisions along x.
    pub axial_divisions: usize,
    /// Ring subdivisions across each annular end.
    pub radial_divisions: usize,
    /// Uniform random vertex displacement bound, per coordinate.
    pub perturbation: f64,
    pub seed: u64,
}

impl Default for TubeOptions {
    fn default() -> Self {
        TubeOptions {
            axial_divisions: 1,
            radial_divisions: 1,
            perturbation: 0.0,
            seed: 0,
        }
    }
}

impl TubeOptions {
    /// Facet count of a tube built with these options.
    pub fn facet_count(&self, segments: usize) -> usize {
        4 * segments * (self.axial_divisions + self.radial_divisions)
    }
}

pub fn gen_tube(length: f64, inner_r: f64, outer_r: f64, segments: usize) -> Result<GeneratedMesh> {
    gen_tube_with(length, inner_r, outer_r, segments, &TubeOptions::default())
}

/// Annular cylinder along `x in [0, length]` with prism walls of
/// `segments` sides at `inner_r` and `outer_r`.
pub fn gen_tube_with(
    length: f64,
    inner_r: f64,
    outer_r: f64,
    segments: usize,
    opts: &TubeOptions,
) -> Result<GeneratedMesh> {
    if !(length > 0.0) || !(inner_r > 0.0) || !(inner_r < outer_r) {
        return Err(SlicylError::Param(format!(
            "tube needs length > 0 and 0 < inner_r < outer_r (got {length}, {inner_r}, {outer_r})"
        )));
    }
    if segments < 3 || opts.axial_divisions == 0 || opts.radial_divisions == 0 {
        return Err(SlicylError::Param("tube needs >= 3 segments and >= 1 division".into()));
    }
    if !(opts.perturbation >= 0.0) {
        return Err(SlicylError::Param("perturbation must be non-negative".into()));
    }
    let n = segments;
    let (na, nr) = (opts.axial_divisions, opts.radial_divisions);
    let mut b = Builder::default();

    let x_at = |k: usize| length * k as f64 / na as f64;
    let r_at = |j: usize| inner_r + (outer_r - inner_r) * j as f64 / nr as f64;
    let point = |x: f64, r: f64, i: usize| {
        let (s, c) = ring_angle(i, n).sin_cos();
        [x, r * c, r * s]
    };

    // wall grids [k][i]
    let inner: Vec<Vec<usize>> = (0..=na)
        .map(|k| (0..n).map(|i| b.vertex(point(x_at(k), inner_r, i))).collect())
        .collect();
    let outer: Vec<Vec<usize>> = (0..=na)
        .map(|k| (0..n).map(|i| b.vertex(point(x_at(k), outer_r, i))).collect())
        .collect();
    // end-cap rings [end][j][i], sharing the wall vertices at j = 0 and j = nr
    let caps: Vec<Vec<Vec<usize>>> = [0usize, na]
        .iter()
        .map(|&k| {
            (0..=nr)
                .map(|j| {
                    if j == 0 {
                        inner[k].clone()
                    } else if j == nr {
                        outer[k].clone()
                    } else {
                        (0..n).map(|i| b.vertex(point(x_at(k), r_at(j), i))).collect()
                    }
                })
                .collect()
        })
        .collect();

    for i in 0..n {
        let i1 = (i + 1) % n;
        for k in 0..na {
            b.quad(inner[k][i], inner[k + 1][i], inner[k + 1][i1], inner[k][i1]);
            b.quad(outer[k][i], outer[k][i1], outer[k + 1][i1], outer[k + 1][i]);
        }
        for j in 0..nr {
            let (front, back) = (&caps[0], &caps[1]);
            b.quad(back[j][i], back[j + 1][i], back[j + 1][i1], back[j][i1]);
            b.quad(front[j][i], front[j][i1], front[j + 1][i1], front[j + 1][i]);
        }
    }

    if opts.perturbation > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let a = opts.perturbation;
        for v in &mut b.vertices {
            for c in v.iter_mut() {
                *c += rng.gen_range(-a..=a);
            }
        }
    }

    let (mesh, _) = weld_and_index(&b.raw());
    Ok(GeneratedMesh {
        mesh,
        descriptor: format!(
            "tube(length={length}, inner_r={inner_r}, outer_r={outer_r}, segments={segments}, axial_divisions={na}, radial_divisions={nr}, perturbation={}, seed={})",
            opts.perturbation, opts.seed
        ),
    })
}

/// Reference slicer: same per-edge and per-facet code as the active path,
/// applied to every facet.
pub fn naive_slice_layer(mesh: &TriangleMesh, index: usize, radius: f64) -> Result<LayerSlice> {
    slice_facets(mesh, 0..mesh.facets().len(), index, radius)
}
