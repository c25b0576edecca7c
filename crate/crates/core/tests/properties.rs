//! Randomised checks of the pipeline invariants against independent
//! recomputation.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use slicyl::active::{build_active_table, facet_radial_range};
use slicyl::contour::{
    build_layer_contours, canonical_cycle, classify_winding, close_contours, unroll, AdjacencyTable,
    ContourKind, ContourOptions,
};
use slicyl::geometry::{axis_distance, polar_angle, wrap_angle, Point};
use slicyl::mesh::{validate_manifold, weld_and_index, RawFacet};
use slicyl::oracle::{gen_cube_with_bore, gen_tube_with, TubeOptions};
use slicyl::orientation::{compute_skewer_transform, decollide_radii, roll_about_x, SkewerAxis, MAX_NUDGES};
use slicyl::pipeline::{slice_layer, slice_mesh, SliceParams};
use slicyl::slicing::{bounding_cylinder, build_slicyl_set, edge_cylinder_intersections, slice_facets, PointId};

fn point() -> impl Strategy<Value = Point> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| Point::new(x, y, z))
}

fn perturbed_tube(seed: u64, segments: usize) -> slicyl::TriangleMesh {
    let opts = TubeOptions {
        axial_divisions: 6,
        radial_divisions: 3,
        perturbation: 0.08,
        seed,
    };
    gen_tube_with(6.0, 2.0, 4.0, segments, &opts).unwrap().mesh
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crossings_lie_on_cylinder_and_inside_edge(p0 in point(), p1 in point(), r in 0.1..12.0f64) {
        let cx = edge_cylinder_intersections(&p0, &p1, r);
        let mut last = 0.0;
        for (t, p) in cx.iter() {
            prop_assert!(t > last && t < 1.0);
            last = t;
            prop_assert!((axis_distance(&p) - r).abs() <= 1e-9 * r);
            let on_line = p0 + (p1 - p0) * t;
            prop_assert!((on_line - p).norm() <= 1e-9 * (1.0 + p.coords.norm()));
        }
        // endpoints on opposite sides force an odd number of crossings
        let (d0, d1) = (axis_distance(&p0) - r, axis_distance(&p1) - r);
        if d0 * d1 < 0.0 && d0.abs().min(d1.abs()) > 1e-6 {
            prop_assert_eq!(cx.len(), 1);
        }
    }

    #[test]
    fn facets_with_crossings_are_active(a in point(), b in point(), c in point(), r in 0.1..12.0f64) {
        let (mesh, _) = weld_and_index(&[RawFacet::new(a.into(), b.into(), c.into())]);
        prop_assume!(!mesh.is_empty());
        let Ok(range) = facet_radial_range(&mesh, 0) else { return Ok(()); };
        let crossed = mesh.facet_edges(0).iter().any(|&e| {
            let [lo, hi] = mesh.edges()[e].endpoints;
            !edge_cylinder_intersections(&mesh.vertices()[lo], &mesh.vertices()[hi], r).is_empty()
        });
        if crossed {
            prop_assert!(range.is_active_for(r));
        }
        // sampled facet points never beat the range
        for (u, v) in [(0.2, 0.3), (0.5, 0.25), (0.1, 0.8), (1.0 / 3.0, 1.0 / 3.0)] {
            let [p, q, s] = mesh.facet_points(0);
            let x = p.coords * (1.0 - u - v) + q.coords * u + s.coords * v;
            let d = axis_distance(&Point::from(x));
            prop_assert!(d >= range.d_pmin - 1e-9 && d <= range.d_vmax + 1e-9);
        }
    }

    #[test]
    fn decollided_radii_clear_all_vertices(
        distances in prop::collection::vec(1.0..5.0f64, 1..60),
        start in 1.0..2.0f64,
        step in 0.05..0.5f64,
    ) {
        let raw: Vec<RawFacet> = distances
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let x = 3.0 * i as f64;
                RawFacet::new([x, d, 0.0], [x + 1.0, d, 0.0], [x, 0.0, d])
            })
            .collect();
        let (mesh, _) = weld_and_index(&raw);
        let radii: Vec<f64> = (0..8).map(|i| start + i as f64 * step).collect();
        let eps = 1e-6 * step;
        if let Ok(out) = decollide_radii(&mesh, &radii, eps) {
            for (r, nominal) in out.iter().zip(&radii) {
                prop_assert!(*r >= *nominal);
                prop_assert!(*r - *nominal <= 2.0 * eps * MAX_NUDGES as f64 + 1e-15);
                for v in mesh.vertices() {
                    prop_assert!((axis_distance(v) - r).abs() >= eps);
                }
            }
            prop_assert!(out.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn skewer_maps_b_onto_positive_x(a in point(), b in point()) {
        prop_assume!((b - a).norm() > 1e-6);
        let t = compute_skewer_transform(&SkewerAxis::new(a, b)).unwrap();
        let len = (b - a).norm();
        let ta = t.apply_point(&a);
        let tb = t.apply_point(&b);
        prop_assert!(ta.coords.norm() <= 1e-12 * (1.0 + a.coords.norm()));
        prop_assert!((tb.x - len).abs() <= 1e-9 * len);
        prop_assert!(tb.y.abs() <= 1e-9 * len && tb.z.abs() <= 1e-9 * len);
    }

    #[test]
    fn ring_polygons_are_type_ii(
        n in 3usize..40,
        jitter in prop::collection::vec(0.0..0.9f64, 40),
        radius in 0.5..10.0f64,
        reverse in any::<bool>(),
    ) {
        // strictly increasing angles, each step below half a turn
        let mut angles: Vec<f64> = (0..n).map(|i| (i as f64 + jitter[i] * 0.5) * TAU / n as f64).collect();
        if reverse {
            angles.reverse();
        }
        let pts: Vec<Point> = angles
            .iter()
            .enumerate()
            .map(|(i, a)| Point::new(i as f64 * 0.1, radius * a.cos(), radius * a.sin()))
            .collect();
        let (kind, w) = classify_winding(&pts).unwrap();
        prop_assert_eq!(kind, ContourKind::TypeII);
        prop_assert!((w.abs() - TAU).abs() < 1e-9);
        prop_assert_eq!(w > 0.0, !reverse);

        let un = unroll(&pts, radius);
        prop_assert!((un.closure_offset - radius * w).abs() <= 1e-9 * radius);
        for k in 0..n - 1 {
            let da = wrap_angle(polar_angle(&pts[k + 1]) - polar_angle(&pts[k]));
            let want = ((pts[k + 1].x - pts[k].x).powi(2) + (radius * da).powi(2)).sqrt();
            let got = ((un.points[k + 1][0] - un.points[k][0]).powi(2) + (un.points[k + 1][1] - un.points[k][1]).powi(2)).sqrt();
            prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want));
        }
    }

    #[test]
    fn patch_polygons_are_type_i(
        centre in -PI..PI,
        offsets in prop::collection::vec((-1.4..1.4f64, -3.0..3.0f64), 3..20),
        radius in 0.5..10.0f64,
    ) {
        let pts: Vec<Point> = offsets
            .iter()
            .map(|&(da, x)| {
                let a = centre + da;
                Point::new(x, radius * a.cos(), radius * a.sin())
            })
            .collect();
        let (kind, w) = classify_winding(&pts).unwrap();
        prop_assert_eq!(kind, ContourKind::TypeI);
        prop_assert!(w.abs() < 1e-9);
        prop_assert!(unroll(&pts, radius).closure_offset.abs() <= 1e-9 * radius);
    }

    #[test]
    fn generated_cubes_are_closed_and_sliced_consistently(
        side in 8.0..30.0f64,
        bore_frac in 0.05..0.4f64,
        segments in 8usize..40,
        roll in 0.0..TAU,
    ) {
        let bore = bore_frac * side;
        let g = gen_cube_with_bore(side, bore, segments).unwrap();
        prop_assert!(validate_manifold(&g.mesh).is_manifold());
        let delta = side / 20.0;
        let params = SliceParams::new(bore, delta);
        let out = slice_mesh(&g.mesh, &params).unwrap();
        let rolled = slice_mesh(&roll_about_x(&g.mesh, roll), &params).unwrap();
        let h = side / 2.0;
        for (lc, rc) in out.contours.iter().zip(&rolled.contours) {
            let counts = (lc.count(ContourKind::TypeI), lc.count(ContourKind::TypeII));
            prop_assert_eq!(counts, (rc.count(ContourKind::TypeI), rc.count(ContourKind::TypeII)));
            if lc.radius < h * 0.999 {
                prop_assert_eq!(counts, (0, 2));
            } else if lc.radius > h * 1.001 && lc.radius < h * std::f64::consts::SQRT_2 * 0.999 {
                prop_assert_eq!(counts, (4, 0));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn contours_do_not_depend_on_start_key(seed in any::<u64>(), segments in 12usize..40) {
        let mesh = perturbed_tube(seed, segments);
        let out = slice_mesh(&mesh, &SliceParams::new(1.85, 0.1)).unwrap();
        for (layer, lc) in out.layers.iter().zip(&out.contours) {
            let table = AdjacencyTable::from_layer(layer).unwrap();
            let produced: BTreeSet<Vec<PointId>> = lc
                .contours
                .iter()
                .map(|c| canonical_cycle(&c.crossing_ids().collect::<Vec<_>>()))
                .collect();
            // independent walk from every key, in the opposite direction
            // to the one the builder would take
            for &start in table.keys() {
                let mut cycle = vec![start];
                let mut prev = start;
                let mut cur = table.neighbours(start)[1].point;
                while cur != start {
                    cycle.push(cur);
                    let links = table.neighbours(cur);
                    let next = if links[0].point == prev && links[1].point != prev { links[1].point } else { links[0].point };
                    prev = cur;
                    cur = next;
                    prop_assert!(cycle.len() <= table.len());
                }
                prop_assert!(produced.contains(&canonical_cycle(&cycle)));
            }
            let loops = close_contours(table).unwrap();
            prop_assert_eq!(loops.len(), lc.contours.len());
        }
    }

    #[test]
    fn layer_order_does_not_matter(seed in any::<u64>(), segments in 12usize..40) {
        let mesh = perturbed_tube(seed, segments);
        let out = slice_mesh(&mesh, &SliceParams::new(1.85, 0.1)).unwrap();
        let bc = bounding_cylinder(&mesh);
        let set = build_slicyl_set(&mesh, 1.85, 0.1, None, &bc).unwrap();
        let table = build_active_table(&mesh, &set).unwrap();
        for pos in (0..set.count()).rev() {
            let layer = slice_layer(&mesh, &table, &set, pos).unwrap();
            prop_assert_eq!(&layer, &out.layers[pos]);
            let lc = build_layer_contours(&mesh, &layer, &ContourOptions::default()).unwrap();
            prop_assert_eq!(&lc, &out.contours[pos]);
        }
        let again = slice_mesh(&mesh, &SliceParams::new(1.85, 0.1)).unwrap();
        prop_assert_eq!(again.contours, out.contours);
    }

    #[test]
    fn active_and_naive_agree_on_perturbed_tubes(seed in any::<u64>(), segments in 12usize..40) {
        let mesh = perturbed_tube(seed, segments);
        let out = slice_mesh(&mesh, &SliceParams::new(1.85, 0.1)).unwrap();
        for layer in &out.layers {
            let naive = slice_facets(&mesh, 0..mesh.facets().len(), layer.index, layer.radius).unwrap();
            prop_assert_eq!(&naive, layer);
        }
    }

    #[test]
    fn subdivision_keeps_points_on_cylinder_and_kinds(seed in any::<u64>(), max_arc in 0.05..0.5f64) {
        let mesh = perturbed_tube(seed, 16);
        let plain = slice_mesh(&mesh, &SliceParams::new(1.85, 0.1)).unwrap();
        let mut params = SliceParams::new(1.85, 0.1);
        params.contour.max_arc = Some(max_arc);
        let fine = slice_mesh(&mesh, &params).unwrap();
        for (a, b) in plain.contours.iter().zip(&fine.contours) {
            let kinds = |lc: &slicyl::LayerContours| lc.contours.iter().map(|c| c.kind).collect::<Vec<_>>();
            prop_assert_eq!(kinds(a), kinds(b));
            for c in &b.contours {
                for p in &c.points {
                    prop_assert!((axis_distance(&p.position) - b.radius).abs() <= 1e-9 * b.radius);
                }
            }
        }
    }
}
