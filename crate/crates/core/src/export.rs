//! Layer JSON (canonical output) and per-layer SVG drawings of the
//! unrolled contours.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::contour::{ContourKind, LayerContours};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDocument {
    pub version: u32,
    pub mandrel_radius: f64,
    pub layer_thickness: f64,
    pub layers: Vec<LayerRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerRecord {
    pub index: usize,
    pub radius: f64,
    pub contours: Vec<ContourRecord>,
    #[serde(rename = "type_II_pairs")]
    pub type_ii_pairs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourRecord {
    pub kind: ContourKind,
    pub winding: f64,
    pub points: Vec<[f64; 3]>,
    /// `[x, u]` per point, `u` being arc length along the slicyl.
    pub unrolled: Vec<[f64; 2]>,
}

impl LayerDocument {
    pub fn new(mandrel_radius: f64, layer_thickness: f64, layers: &[LayerContours]) -> Self {
        LayerDocument {
            version: SCHEMA_VERSION,
            mandrel_radius,
            layer_thickness,
            layers: layers.iter().map(LayerRecord::from).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layer document is always serialisable")
    }
}

impl From<&LayerContours> for LayerRecord {
    fn from(lc: &LayerContours) -> Self {
        LayerRecord {
            index: lc.index,
            radius: lc.radius,
            contours: lc
                .contours
                .iter()
                .map(|c| ContourRecord {
                    kind: c.kind,
                    winding: c.winding,
                    points: c.points.iter().map(|p| [p.position.x, p.position.y, p.position.z]).collect(),
                    unrolled: c.unrolled.points.clone(),
                })
                .collect(),
            type_ii_pairs: lc.type_ii_pairs.clone(),
        }
    }
}

const MARGIN: f64 = 2.0;

/// Drawing of one layer: `u` runs horizontally over `[0, 2 pi r)`, `x`
/// vertically over `[x_min, x_max]`. The seam sits at `u = 0` (and its
/// copy at `u = 2 pi r`).
pub fn layer_svg(layer: &LayerContours, x_min: f64, x_max: f64) -> String {
    let width = std::f64::consts::TAU * layer.radius;
    let height = (x_max - x_min).max(0.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}" width="{:.3}mm" height="{:.3}mm">"#,
        -MARGIN,
        -MARGIN,
        width + 2.0 * MARGIN,
        height + 2.0 * MARGIN,
        width + 2.0 * MARGIN,
        height + 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<title>layer {} r={:.6} (u = 0 at seam)</title>"#,
        layer.index, layer.radius
    );
    for u in [0.0, width] {
        let _ = writeln!(
            s,
            r#"<line class="seam" x1="{u:.6}" y1="{:.6}" x2="{u:.6}" y2="{:.6}" stroke="grey" stroke-width="0.05" stroke-dasharray="0.5,0.5"/>"#,
            -MARGIN,
            height + MARGIN
        );
    }
    let y = |x: f64| x - x_min;
    for (ci, c) in layer.contours.iter().enumerate() {
        let pts = &c.unrolled.points;
        if pts.is_empty() {
            continue;
        }
        let shift = (pts[0][1] / width).floor() * width;
        match c.kind {
            ContourKind::TypeI => {
                let mut d = String::new();
                for (k, p) in pts.iter().enumerate() {
                    let _ = write!(d, "{}{:.6},{:.6} ", if k == 0 { "M" } else { "L" }, p[1] - shift, y(p[0]));
                }
                d.push('Z');
                let _ = writeln!(
                    s,
                    r#"<path class="type-I" data-contour="{ci}" d="{d}" fill="none" stroke="black" stroke-width="0.05"/>"#
                );
            }
            ContourKind::TypeII => {
                // The closing step continues past the last point by the
                // remaining turn, so the open path spans the full width.
                let mut chain: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1] - shift]).collect();
                chain.push([pts[0][0], pts[0][1] - shift + c.unrolled.closure_offset]);
                for (piece, seams) in split_at_seams(&chain, width) {
                    let mut d = String::new();
                    for (k, p) in piece.iter().enumerate() {
                        let _ = write!(d, "{}{:.6},{:.6} ", if k == 0 { "M" } else { "L" }, p[1], y(p[0]));
                    }
                    let _ = writeln!(
                        s,
                        r#"<path class="type-II" data-contour="{ci}" d="{}" fill="none" stroke="blue" stroke-width="0.05"/>"#,
                        d.trim_end()
                    );
                    for m in seams {
                        let _ = writeln!(
                            s,
                            r#"<circle class="seam-marker" cx="{:.6}" cy="{:.6}" r="0.2" fill="red"/>"#,
                            m[1],
                            y(m[0])
                        );
                    }
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Cuts a polyline in `[x, u]` wherever `u` crosses a multiple of `width`,
/// folding each piece back into `[0, width]`. Returns the pieces and the
/// seam crossing points of each piece.
fn split_at_seams(chain: &[[f64; 2]], width: f64) -> Vec<(Vec<[f64; 2]>, Vec<[f64; 2]>)> {
    let mut out = Vec::new();
    if chain.is_empty() || !(width > 0.0) {
        return out;
    }
    let sheet = |u: f64| (u / width).floor();
    let mut k = sheet(chain[0][1]);
    let mut piece = vec![[chain[0][0], chain[0][1] - k * width]];
    let mut markers = Vec::new();
    for w in chain.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut kb = sheet(b[1]);
        // a point landing exactly on the far seam stays on this sheet
        if kb > k && b[1] == (k + 1.0) * width {
            kb = k;
        }
        while kb != k {
            let up = kb > k;
            let seam = if up { (k + 1.0) * width } else { k * width };
            let t = (seam - a[1]) / (b[1] - a[1]);
            let x = a[0] + t * (b[0] - a[0]);
            let local = if up { width } else { 0.0 };
            piece.push([x, local]);
            markers.push([x, local]);
            out.push((std::mem::take(&mut piece), std::mem::take(&mut markers)));
            k += if up { 1.0 } else { -1.0 };
            let entry = if up { 0.0 } else { width };
            piece.push([x, entry]);
            markers.push([x, entry]);
        }
        piece.push([b[0], b[1] - k * width]);
    }
    if piece.len() > 1 {
        out.push((piece, markers));
    }
    out
}
