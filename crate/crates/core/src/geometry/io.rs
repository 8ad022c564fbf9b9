//! OBJ and STL reading and writing.
//!
//! OBJ faces with more than three corners are fan-triangulated. STL files
//! store every triangle with its own corners, so coincident corners are
//! welded back together with a tolerance of `1e-9` times the bounding-box
//! diagonal before the watertightness check.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::Vector3;

use super::mesh::{bounding_box, MeshError, SurfaceMesh};

/// Relative tolerance used to weld STL corners.
pub const WELD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    StlAscii,
    StlBinary,
}

impl FromStr for MeshFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "obj" => Ok(Self::Obj),
            "stl-ascii" => Ok(Self::StlAscii),
            "stl-binary" => Ok(Self::StlBinary),
            other => Err(format!("unknown mesh format `{other}`")),
        }
    }
}

/// Reads and validates a mesh file.
pub fn load_mesh(path: impl AsRef<Path>, format: MeshFormat) -> Result<SurfaceMesh, MeshError> {
    let file = fs::File::open(path)?;
    match format {
        MeshFormat::Obj => read_obj(BufReader::new(file)),
        MeshFormat::StlAscii => read_stl_ascii(BufReader::new(file)),
        MeshFormat::StlBinary => read_stl_binary(BufReader::new(file)),
    }
}

/// Tells binary from ASCII STL: a binary file's size is fixed by its
/// triangle count.
pub fn detect_stl_format(bytes: &[u8]) -> MeshFormat {
    if bytes.len() >= 84 {
        let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
        if bytes.len() == 84 + 50 * count {
            return MeshFormat::StlBinary;
        }
    }
    MeshFormat::StlAscii
}

fn parse_f64(token: Option<&str>, line: usize) -> Result<f64, MeshError> {
    let token = token.ok_or_else(|| MeshError::Parse {
        line,
        message: "missing coordinate".into(),
    })?;
    let value: f64 = token.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("invalid number `{token}`"),
    })?;
    if !value.is_finite() {
        return Err(MeshError::Parse {
            line,
            message: format!("non-finite number `{token}`"),
        });
    }
    Ok(value)
}

/// Parses `v` and `f` records of a Wavefront OBJ stream. Other records are
/// ignored. Negative (relative) face indices are accepted.
pub fn read_obj(reader: impl BufRead) -> Result<SurfaceMesh, MeshError> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let x = parse_f64(tokens.next(), lineno)?;
                let y = parse_f64(tokens.next(), lineno)?;
                let z = parse_f64(tokens.next(), lineno)?;
                vertices.push(Vector3::new(x, y, z));
            }
            Some("f") => {
                let corners = tokens
                    .map(|tok| obj_index(tok, vertices.len(), lineno))
                    .collect::<Result<Vec<_>, _>>()?;
                if corners.len() < 3 {
                    return Err(MeshError::Parse {
                        line: lineno,
                        message: "face with fewer than three corners".into(),
                    });
                }
                for k in 1..corners.len() - 1 {
                    triangles.push([corners[0], corners[k], corners[k + 1]]);
                }
            }
            _ => {}
        }
    }
    SurfaceMesh::new(vertices, triangles)
}

fn obj_index(token: &str, num_vertices: usize, line: usize) -> Result<usize, MeshError> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("invalid face index `{token}`"),
    })?;
    let resolved = match raw {
        0 => None,
        r if r > 0 => Some(r as usize - 1),
        r => (num_vertices as i64 + r).try_into().ok(),
    };
    resolved.ok_or_else(|| MeshError::Parse {
        line,
        message: format!("face index `{token}` out of range"),
    })
}

/// Parses an ASCII STL stream (`solid` / `facet` / `vertex` records).
pub fn read_stl_ascii(reader: impl BufRead) -> Result<SurfaceMesh, MeshError> {
    let mut corners = Vec::new();
    let mut in_loop = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("vertex") => {
                let x = parse_f64(tokens.next(), lineno)?;
                let y = parse_f64(tokens.next(), lineno)?;
                let z = parse_f64(tokens.next(), lineno)?;
                corners.push(Vector3::new(x, y, z));
                in_loop += 1;
            }
            Some("endloop") => {
                if in_loop != 3 {
                    return Err(MeshError::Parse {
                        line: lineno,
                        message: format!("facet with {in_loop} vertices"),
                    });
                }
                in_loop = 0;
            }
            _ => {}
        }
    }
    if corners.len() % 3 != 0 {
        return Err(MeshError::Parse {
            line: 0,
            message: "truncated facet at end of file".into(),
        });
    }
    weld(corners)
}

/// Parses a binary STL stream: 80-byte header, little-endian `u32` triangle
/// count, then 50 bytes per triangle (normal, three corners, attribute).
pub fn read_stl_binary(mut reader: impl Read) -> Result<SurfaceMesh, MeshError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() < 84 {
        return Err(MeshError::BinaryStl(format!(
            "{} bytes is shorter than the 84-byte header",
            bytes.len()
        )));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    if bytes.len() != 84 + 50 * count {
        return Err(MeshError::BinaryStl(format!(
            "header announces {count} triangles ({} bytes) but file has {} bytes",
            84 + 50 * count,
            bytes.len()
        )));
    }
    let float = |at: usize| f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as f64;
    let mut corners = Vec::with_capacity(3 * count);
    for t in 0..count {
        let base = 84 + 50 * t + 12;
        for k in 0..3 {
            let at = base + 12 * k;
            let p = Vector3::new(float(at), float(at + 4), float(at + 8));
            if !p.iter().all(|x| x.is_finite()) {
                return Err(MeshError::BinaryStl(format!(
                    "non-finite coordinate in triangle {t}"
                )));
            }
            corners.push(p);
        }
    }
    weld(corners)
}

/// Merges corners closer than the weld tolerance and builds the mesh.
fn weld(corners: Vec<Vector3<f64>>) -> Result<SurfaceMesh, MeshError> {
    if corners.is_empty() {
        return Err(MeshError::Empty);
    }
    let (lo, hi) = bounding_box(&corners);
    let tol = WELD_TOLERANCE * (hi - lo).norm();
    let cell = |p: &Vector3<f64>| -> [i64; 3] {
        if tol > 0.0 {
            [0, 1, 2].map(|k| ((p[k] - lo[k]) / tol).floor() as i64)
        } else {
            [0; 3]
        }
    };

    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut index = Vec::with_capacity(corners.len());
    for p in &corners {
        let c = cell(p);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        if let Some(&id) = ids.iter().find(|&&id| (vertices[id] - p).norm() <= tol) {
                            found = Some(id);
                            break 'search;
                        }
                    }
                }
            }
        }
        let id = found.unwrap_or_else(|| {
            vertices.push(*p);
            grid.entry(c).or_default().push(vertices.len() - 1);
            vertices.len() - 1
        });
        index.push(id);
    }
    let triangles = index.chunks_exact(3).map(|t| [t[0], t[1], t[2]]).collect();
    SurfaceMesh::new(vertices, triangles)
}

/// Writes `v`/`f` records with 1-based indices. Coordinates use the shortest
/// representation that parses back to the same `f64`.
pub fn write_obj(mesh: &SurfaceMesh, mut out: impl Write) -> io::Result<()> {
    for v in mesh.vertices() {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for [a, b, c] in mesh.triangles() {
        writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1)?;
    }
    out.flush()
}

/// Writes a binary STL. Coordinates are stored as `f32`.
pub fn write_stl_binary(mesh: &SurfaceMesh, mut out: impl Write) -> io::Result<()> {
    let mut header = [0u8; 80];
    let tag = b"capvar binary STL";
    header[..tag.len()].copy_from_slice(tag);
    out.write_all(&header)?;
    let count = u32::try_from(mesh.num_triangles())
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "too many triangles for STL"))?;
    out.write_all(&count.to_le_bytes())?;
    for i in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle(i);
        let normal = (b - a).cross(&(c - a)).normalize();
        for p in [normal, a, b, c] {
            for x in p.iter() {
                out.write_all(&(*x as f32).to_le_bytes())?;
            }
        }
        out.write_all(&[0, 0])?;
    }
    out.flush()
}

/// Writes an ASCII STL.
pub fn write_stl_ascii(mesh: &SurfaceMesh, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "solid capvar")?;
    for i in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle(i);
        let n = (b - a).cross(&(c - a)).normalize();
        writeln!(out, "  facet normal {} {} {}", n.x, n.y, n.z)?;
        writeln!(out, "    outer loop")?;
        for p in [a, b, c] {
            writeln!(out, "      vertex {} {} {}", p.x, p.y, p.z)?;
        }
        writeln!(out, "    endloop")?;
        writeln!(out, "  endfacet")?;
    }
    writeln!(out, "endsolid capvar")?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_panels, make_cube, make_icosphere};

    const UNIT_CUBE_OBJ: &str = "\
# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3
f 1 3 2
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
";

    #[test]
    fn obj_unit_cube() {
        let mesh = read_obj(UNIT_CUBE_OBJ.as_bytes()).unwrap();
        assert_eq!(mesh.num_vertices(), 8);
        assert_eq!(mesh.num_triangles(), 12);
        assert!((build_panels(&mesh).total_area() - 6.0).abs() < 1e-15);
        assert!(mesh.is_orientation_consistent());
    }

    #[test]
    fn obj_quads_are_fan_triangulated() {
        let quads = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
                     f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2/1 3/1 7/1 6/1\nf 3 4 8 7\nf -8 -4 -1 -5\n";
        let mesh = read_obj(quads.as_bytes()).unwrap();
        assert_eq!(mesh.num_triangles(), 12);
        assert!((build_panels(&mesh).total_area() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn obj_parse_errors_name_the_line() {
        let err = read_obj("v 0 0 0\nv 1 x 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 2, .. }), "{err:?}");
        let err = read_obj("v 0 0 0\nf 1 2 3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, MeshError::IndexOutOfRange { .. }), "{err:?}");
    }

    #[test]
    fn stl_open_fan_is_rejected() {
        let stl = "solid fan
facet normal 0 0 1
outer loop
vertex 0 0 0
vertex 1 0 0
vertex 0 1 0
endloop
endfacet
facet normal 0 0 1
outer loop
vertex 0 0 0
vertex 0 1 0
vertex -1 0 0
endloop
endfacet
endsolid fan
";
        match read_stl_ascii(stl.as_bytes()).unwrap_err() {
            MeshError::NotWatertight { boundary_edges, .. } => {
                assert_eq!(boundary_edges.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ascii_stl_round_trip_is_exact() {
        let mesh = make_cube(2.0, 3).unwrap();
        let mut buf = Vec::new();
        write_stl_ascii(&mesh, &mut buf).unwrap();
        assert_eq!(detect_stl_format(&buf), MeshFormat::StlAscii);
        let back = read_stl_ascii(buf.as_slice()).unwrap();
        assert_eq!(back.num_vertices(), mesh.num_vertices());
        assert_eq!(build_panels(&back).areas(), build_panels(&mesh).areas());
    }

    #[test]
    fn binary_stl_round_trip_matches_single_precision_mesh() {
        let mesh = make_icosphere(1.0, 2).unwrap();
        let mut buf = Vec::new();
        write_stl_binary(&mesh, &mut buf).unwrap();
        assert_eq!(buf.len(), 84 + 50 * 320);
        assert_eq!(detect_stl_format(&buf), MeshFormat::StlBinary);
        let back = read_stl_binary(buf.as_slice()).unwrap();
        assert_eq!(back.num_vertices(), mesh.num_vertices());
        let expected = build_panels(&mesh.rounded_to_f32()).areas();
        for (a, b) in build_panels(&back).areas().iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn truncated_binary_stl() {
        let mesh = make_icosphere(1.0, 0).unwrap();
        let mut buf = Vec::new();
        write_stl_binary(&mesh, &mut buf).unwrap();
        buf.truncate(buf.len() - 7);
        assert!(matches!(
            read_stl_binary(buf.as_slice()),
            Err(MeshError::BinaryStl(_))
        ));
    }

    #[test]
    fn obj_round_trip_is_bitwise() {
        let mesh = make_icosphere(1.3, 2).unwrap();
        let mut buf = Vec::new();
        write_obj(&mesh, &mut buf).unwrap();
        assert_eq!(read_obj(buf.as_slice()).unwrap(), mesh);
    }
}
