//! STL reading and writing.
//!
//! Binary layout: 80-byte header, little-endian `u32` facet count, then per
//! facet twelve little-endian `f32` (normal, v0, v1, v2) and a 2-byte
//! attribute that is read and discarded.

use std::io::Write;

use crate::error::{Result, SlicylError};
use crate::mesh::RawFacet;

const HEADER_LEN: usize = 80;
const RECORD_LEN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StlFormat {
    Binary,
    Ascii,
}

/// ASCII iff the file starts with `solid` and parses as ASCII STL. Many
/// binary exporters also write `solid` into the header, so the prefix on
/// its own decides nothing.
pub fn detect_format(bytes: &[u8]) -> Result<StlFormat> {
    if bytes.is_empty() {
        return Err(SlicylError::EmptyFile);
    }
    if bytes.starts_with(b"solid") && parse_ascii(bytes).is_ok() {
        Ok(StlFormat::Ascii)
    } else {
        Ok(StlFormat::Binary)
    }
}

pub fn parse_stl(bytes: &[u8]) -> Result<Vec<RawFacet>> {
    if bytes.is_empty() {
        return Err(SlicylError::EmptyFile);
    }
    if bytes.starts_with(b"solid") {
        if let Ok(facets) = parse_ascii(bytes) {
            return Ok(facets);
        }
    }
    parse_binary(bytes)
}

pub fn parse_binary(bytes: &[u8]) -> Result<Vec<RawFacet>> {
    if bytes.len() < HEADER_LEN + 4 {
        return Err(SlicylError::Truncated {
            count: 0,
            expected: (HEADER_LEN + 4) as u64,
            found: bytes.len() as u64,
        });
    }
    let count = u32::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 4].try_into().unwrap());
    let expected = (HEADER_LEN + 4) as u64 + RECORD_LEN as u64 * count as u64;
    if bytes.len() as u64 != expected {
        return Err(SlicylError::Truncated {
            count,
            expected,
            found: bytes.len() as u64,
        });
    }
    let facets = bytes[HEADER_LEN + 4..]
        .chunks_exact(RECORD_LEN)
        .map(|rec| {
            let f = |i: usize| {
                let o = 4 * i;
                f32::from_le_bytes(rec[o..o + 4].try_into().unwrap()) as f64
            };
            RawFacet {
                normal: [f(0), f(1), f(2)],
                vertices: [[f(3), f(4), f(5)], [f(6), f(7), f(8)], [f(9), f(10), f(11)]],
            }
        })
        .collect();
    Ok(facets)
}

struct Tokens<'a> {
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.iter
            .next()
            .ok_or_else(|| SlicylError::Parse("unexpected end of file".into()))
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        let tok = self.next()?;
        if tok == word {
            Ok(())
        } else {
            Err(SlicylError::Parse(format!("expected `{word}`, found `{tok}`")))
        }
    }

    fn triple(&mut self) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for c in &mut out {
            let tok = self.next()?;
            let v: f32 = tok
                .parse()
                .map_err(|_| SlicylError::Parse(format!("bad number `{tok}`")))?;
            *c = v as f64;
        }
        Ok(out)
    }
}

/// Parses `solid` / `facet normal` / `outer loop` / `vertex`x3 / `endloop` /
/// `endfacet` / `endsolid`. Values are read as `f32`, the precision STL
/// stores, so ASCII and binary encodings of a facet agree exactly.
pub fn parse_ascii(bytes: &[u8]) -> Result<Vec<RawFacet>> {
    let text = std::str::from_utf8(bytes).map_err(|_| SlicylError::Parse("not UTF-8".into()))?;
    let first_line_end = text.find('\n').unwrap_or(text.len());
    let (first, rest) = text.split_at(first_line_end);
    if first.split_whitespace().next() != Some("solid") {
        return Err(SlicylError::Parse("missing `solid`".into()));
    }
    let mut toks = Tokens {
        iter: rest.split_whitespace(),
    };
    let mut facets = Vec::new();
    loop {
        match toks.next()? {
            "facet" => {
                toks.expect("normal")?;
                let normal = toks.triple()?;
                toks.expect("outer")?;
                toks.expect("loop")?;
                let mut vertices = [[0.0; 3]; 3];
                for v in &mut vertices {
                    toks.expect("vertex")?;
                    *v = toks.triple()?;
                }
                toks.expect("endloop")?;
                toks.expect("endfacet")?;
                facets.push(RawFacet { normal, vertices });
            }
            "endsolid" => return Ok(facets),
            other => return Err(SlicylError::Parse(format!("unexpected token `{other}`"))),
        }
    }
}

pub fn write_binary<W: Write>(out: &mut W, facets: &[RawFacet]) -> Result<()> {
    let mut header = [0u8; HEADER_LEN];
    let tag = b"binary STL written by slicyl";
    header[..tag.len()].copy_from_slice(tag);
    out.write_all(&header)?;
    out.write_all(&(facets.len() as u32).to_le_bytes())?;
    let mut rec = [0u8; RECORD_LEN];
    for f in facets {
        let values = f.normal.iter().chain(f.vertices.iter().flatten());
        for (i, v) in values.enumerate() {
            rec[4 * i..4 * i + 4].copy_from_slice(&(*v as f32).to_le_bytes());
        }
        out.write_all(&rec)?;
    }
    Ok(())
}

pub fn write_ascii<W: Write>(out: &mut W, name: &str, facets: &[RawFacet]) -> Result<()> {
    writeln!(out, "solid {name}")?;
    for f in facets {
        let [nx, ny, nz] = f.normal.map(|c| c as f32);
        writeln!(out, "  facet normal {nx:e} {ny:e} {nz:e}")?;
        writeln!(out, "    outer loop")?;
        for v in &f.vertices {
            let [x, y, z] = v.map(|c| c as f32);
            writeln!(out, "      vertex {x:e} {y:e} {z:e}")?;
        }
        writeln!(out, "    endloop")?;
        writeln!(out, "  endfacet")?;
    }
    writeln!(out, "endsolid {name}")?;
    Ok(())
}

pub fn to_binary_bytes(facets: &[RawFacet]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 4 + RECORD_LEN * facets.len());
    write_binary(&mut buf, facets).expect("writing to a Vec cannot fail");
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one_facet() -> RawFacet {
        RawFacet {
            normal: [0.0, 0.0, 1.0],
            vertices: [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        }
    }

    #[test]
    fn minimal_binary_is_binary() {
        let bytes = vec![0u8; 84];
        assert_eq!(detect_format(&bytes).unwrap(), StlFormat::Binary);
        assert!(parse_stl(&bytes).unwrap().is_empty());
    }

    #[test]
    fn empty_ascii_solid() {
        let bytes = b"solid t\nendsolid t\n";
        assert_eq!(detect_format(bytes).unwrap(), StlFormat::Ascii);
        assert!(parse_stl(bytes).unwrap().is_empty());
    }

    #[test]
    fn empty_file_rejected() {
        assert!(matches!(detect_format(b""), Err(SlicylError::EmptyFile)));
        assert!(matches!(parse_stl(b""), Err(SlicylError::EmptyFile)));
    }

    #[test]
    fn binary_with_solid_header_is_binary() {
        let mut bytes = to_binary_bytes(&[one_facet()]);
        bytes[..10].copy_from_slice(b"solid cube");
        assert_eq!(bytes.len(), 84 + 50);
        assert_eq!(detect_format(&bytes).unwrap(), StlFormat::Binary);
        assert_eq!(parse_stl(&bytes).unwrap(), vec![one_facet()]);
    }

    #[test]
    fn hand_assembled_binary_record() {
        let mut bytes = vec![0u8; 80];
        bytes.extend(1u32.to_le_bytes());
        for v in [0.0f32, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0] {
            bytes.extend(v.to_le_bytes());
        }
        bytes.extend([0xab, 0xcd]);
        assert_eq!(parse_stl(&bytes).unwrap(), vec![one_facet()]);
    }

    #[test]
    fn ascii_matches_binary() {
        let text = "solid t\n facet normal 0 0 1\n  outer loop\n   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n  endloop\n endfacet\nendsolid t\n";
        assert_eq!(parse_stl(text.as_bytes()).unwrap(), vec![one_facet()]);
        let mut written = Vec::new();
        write_ascii(&mut written, "t", &[one_facet()]).unwrap();
        assert_eq!(detect_format(&written).unwrap(), StlFormat::Ascii);
        assert_eq!(parse_stl(&written).unwrap(), vec![one_facet()]);
    }

    #[test]
    fn declared_count_exceeds_records() {
        let mut bytes = to_binary_bytes(&[one_facet()]);
        bytes[80..84].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(
            parse_stl(&bytes),
            Err(SlicylError::Truncated { count: 2, expected: 184, found: 134 })
        ));
    }

    #[test]
    fn malformed_ascii() {
        let text = b"solid t\n facet normal 0 0 1\n  outer loop\n   vertex 0 0\n";
        assert!(matches!(parse_ascii(text), Err(SlicylError::Parse(_))));
        // falls through to the binary reader, which finds no valid layout
        assert!(matches!(parse_stl(text), Err(SlicylError::Truncated { .. })));
    }

    proptest! {
        #[test]
        fn binary_round_trip_is_bitwise(coords in prop::collection::vec(-1e6f32..1e6f32, 12 * 3)) {
            let facets: Vec<RawFacet> = coords
                .chunks_exact(12)
                .map(|c| {
                    let c: Vec<f64> = c.iter().map(|&v| v as f64).collect();
                    RawFacet {
                        normal: [c[0], c[1], c[2]],
                        vertices: [[c[3], c[4], c[5]], [c[6], c[7], c[8]], [c[9], c[10], c[11]]],
                    }
                })
                .collect();
            let back = parse_stl(&to_binary_bytes(&facets)).unwrap();
            for (a, b) in facets.iter().zip(&back) {
                let bits = |f: &RawFacet| -> Vec<u64> {
                    f.normal.iter().chain(f.vertices.iter().flatten()).map(|v| v.to_bits()).collect()
                };
                prop_assert_eq!(bits(a), bits(b));
            }
        }
    }
}
