//! ASCII OFF text: header `OFF`, counts `V F E`, one vertex per line, one
//! `3 i j k` face per line. `#` starts a comment.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::TriMesh;
use crate::error::{Error, Result};
use crate::vec3::Vec3;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses OFF text. Errors carry the 1-based line number.
pub fn parse_off(text: &str) -> Result<TriMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or_else(|| parse_error(1, "empty file"))?;
    let rest_of_header = header
        .strip_prefix("OFF")
        .ok_or_else(|| parse_error(line, format!("expected header \"OFF\", found \"{header}\"")))?
        .trim();
    let (count_line, counts) = if rest_of_header.is_empty() {
        lines
            .next()
            .ok_or_else(|| parse_error(line + 1, "missing counts line"))?
    } else {
        (line, rest_of_header)
    };
    let counts: Vec<&str> = counts.split_whitespace().collect();
    if counts.len() != 3 {
        return Err(parse_error(count_line, "counts line must read \"V F E\""));
    }
    let parse_count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_error(count_line, format!("invalid count \"{s}\"")))
    };
    let (nv, nf) = (parse_count(counts[0])?, parse_count(counts[1])?);
    parse_count(counts[2])?;

    let mut vertices = Vec::with_capacity(nv);
    for k in 0..nv {
        let (line, l) = lines.next().ok_or_else(|| {
            parse_error(count_line, format!("file ends after {k} of {nv} vertices"))
        })?;
        let coords: Vec<&str> = l.split_whitespace().collect();
        if coords.len() < 3 {
            return Err(parse_error(line, "vertex needs three coordinates"));
        }
        let mut xyz = [0.0; 3];
        for (c, s) in xyz.iter_mut().zip(&coords) {
            *c = s
                .parse::<f64>()
                .map_err(|_| parse_error(line, format!("invalid coordinate \"{s}\"")))?;
        }
        vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
    }

    let mut triangles = Vec::with_capacity(nf);
    for k in 0..nf {
        let (line, l) = lines
            .next()
            .ok_or_else(|| parse_error(count_line, format!("file ends after {k} of {nf} faces")))?;
        let fields: Vec<&str> = l.split_whitespace().collect();
        let arity = fields
            .first()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| parse_error(line, "face must start with its vertex count"))?;
        if arity != 3 {
            return Err(parse_error(line, "non-triangular face"));
        }
        if fields.len() < 4 {
            return Err(parse_error(line, "face lists fewer than 3 indices"));
        }
        let mut tri = [0usize; 3];
        for (t, s) in tri.iter_mut().zip(&fields[1..4]) {
            *t = s
                .parse::<usize>()
                .map_err(|_| parse_error(line, format!("invalid vertex index \"{s}\"")))?;
            if *t >= nv {
                return Err(parse_error(
                    line,
                    format!("vertex index {t} out of range (mesh has {nv} vertices)"),
                ));
            }
        }
        triangles.push(tri);
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_error(line, "unexpected data after the last face"));
    }
    TriMesh::new(vertices, triangles)
}

/// Writes OFF text with coordinates at 17 significant digits.
pub fn format_off(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let nv = mesh.vertices().len();
    let nf = mesh.num_panels();
    let edges = 3 * nf / 2;
    let _ = writeln!(out, "OFF\n{nv} {nf} {edges}");
    for v in mesh.vertices() {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
    }
    for [a, b, c] in mesh.triangles() {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_ellipsoid_mesh;

    #[test]
    fn round_trip_is_bit_exact() {
        let m = make_ellipsoid_mesh(2.0, 1.0, 0.7, 2).unwrap();
        let back = parse_off(&format_off(&m)).unwrap();
        assert_eq!(back.triangles(), m.triangles());
        for (a, b) in back.vertices().iter().zip(m.vertices()) {
            assert_eq!(
                a.to_array().map(f64::to_bits),
                b.to_array().map(f64::to_bits)
            );
        }
    }

    #[test]
    fn errors_name_the_line() {
        let quad = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        match parse_off(quad) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 7);
                assert!(message.contains("non-triangular face"));
            }
            other => panic!("{other:?}"),
        }
        let range = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n";
        assert!(matches!(
            parse_off(range),
            Err(Error::Parse { line: 6, .. })
        ));
        assert!(matches!(
            parse_off("PLY\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_off("OFF\n3 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_off("OFF\n3 1 0\n0 0 0\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn comments_and_inline_counts() {
        let t = "# tetra\nOFF 4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 1 2 3 # last\n";
        let m = parse_off(t).unwrap();
        assert_eq!(m.num_panels(), 4);
        assert!(m.validate().is_valid());
    }
}
