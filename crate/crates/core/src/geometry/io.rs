use std::fmt::Write as _;
use std::path::Path;

use super::TriangleMesh;
use crate::{Error, Result, Vec3};

/// Loads an OBJ or ASCII PLY mesh, chosen by file extension.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mesh = match ext.as_str() {
        "obj" => parse_obj(&text, path)?,
        "ply" => parse_ply(&text, path)?,
        other => return Err(Error::UnsupportedFormat(format!("mesh extension {other:?}"))),
    };
    if let Some(bb) = mesh.bounding_box() {
        let e = bb.extent();
        log::info!(
            "{}: {} vertices, {} triangles, extent {:.3} x {:.3} x {:.3}",
            path.display(),
            mesh.vertices().len(),
            mesh.triangles().len(),
            e.x,
            e.y,
            e.z
        );
    }
    Ok(mesh)
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_coords<'a>(mut it: impl Iterator<Item = &'a str>, path: &Path, line: usize) -> Result<Vec3> {
    let mut v = Vec3::zeros();
    for i in 0..3 {
        let tok = it.next().ok_or_else(|| parse_err(path, line, "expected three coordinates"))?;
        v[i] = tok.parse().map_err(|_| parse_err(path, line, format!("bad coordinate {tok:?}")))?;
    }
    Ok(v)
}

/// Wavefront OBJ: `v` and `f` records; faces may use `v/vt/vn` syntax and
/// negative (relative) indices. Polygons are fan-triangulated.
pub fn parse_obj(text: &str, path: &Path) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut it = content.split_whitespace();
        match it.next() {
            Some("v") => vertices.push(parse_coords(it, path, line)?),
            Some("f") => {
                let idx = it
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or("");
                        let i: i64 = first
                            .parse()
                            .map_err(|_| parse_err(path, line, format!("bad face index {tok:?}")))?;
                        let resolved = match i {
                            0 => None,
                            i if i > 0 => Some(i - 1),
                            i => Some(vertices.len() as i64 + i),
                        };
                        match resolved {
                            Some(r) if r >= 0 && (r as usize) < vertices.len() => Ok(r as usize),
                            _ => Err(parse_err(path, line, format!("face index {i} out of range"))),
                        }
                    })
                    .collect::<Result<Vec<usize>>>()?;
                if idx.len() < 3 {
                    return Err(parse_err(path, line, "face needs at least three vertices"));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, triangles)
}

/// ASCII PLY with a `vertex` element carrying `x y z` properties and a `face`
/// element with one list property. Other elements are skipped.
pub fn parse_ply(text: &str, path: &Path) -> Result<TriangleMesh> {
    struct Element {
        name: String,
        count: usize,
        props: Vec<String>,
        list: bool,
    }
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(parse_err(path, 1, "missing 'ply' magic")),
    }
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let (line, l) = lines.next().ok_or_else(|| parse_err(path, 0, "unterminated header"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["end_header"] => break,
            ["format", fmt, ..] => {
                if *fmt != "ascii" {
                    return Err(Error::UnsupportedFormat(format!("PLY format {fmt}")));
                }
            }
            ["element", name, count] => elements.push(Element {
                name: name.to_string(),
                count: count
                    .parse()
                    .map_err(|_| parse_err(path, line, format!("bad element count {count:?}")))?,
                props: Vec::new(),
                list: false,
            }),
            ["property", "list", _, _, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(path, line, "property before element"))?;
                el.props.push(name.to_string());
                el.list = true;
            }
            ["property", _, name] => elements
                .last_mut()
                .ok_or_else(|| parse_err(path, line, "property before element"))?
                .props
                .push(name.to_string()),
            _ => {}
        }
    }
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for el in &elements {
        for _ in 0..el.count {
            let (line, l) = lines
                .next()
                .ok_or_else(|| parse_err(path, 0, format!("missing {} records", el.name)))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            match el.name.as_str() {
                "vertex" => {
                    let mut v = Vec3::zeros();
                    for (axis, key) in ["x", "y", "z"].iter().enumerate() {
                        let at = el
                            .props
                            .iter()
                            .position(|p| p == key)
                            .ok_or_else(|| parse_err(path, line, format!("vertex lacks property {key}")))?;
                        let tok = toks.get(at).ok_or_else(|| parse_err(path, line, "short vertex record"))?;
                        v[axis] = tok.parse().map_err(|_| parse_err(path, line, format!("bad coordinate {tok:?}")))?;
                    }
                    vertices.push(v);
                }
                "face" if el.list => {
                    let nums = toks
                        .iter()
                        .map(|t| {
                            t.parse::<usize>()
                                .map_err(|_| parse_err(path, line, format!("bad face token {t:?}")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let count = *nums.first().ok_or_else(|| parse_err(path, line, "empty face record"))?;
                    let idx = nums.get(1..=count).ok_or_else(|| parse_err(path, line, "short face record"))?;
                    if count < 3 {
                        return Err(parse_err(path, line, "face needs at least three vertices"));
                    }
                    if let Some(bad) = idx.iter().find(|&&i| i >= el_count(&elements, "vertex")) {
                        return Err(parse_err(path, line, format!("face index {bad} out of range")));
                    }
                    for k in 1..count - 1 {
                        triangles.push([idx[0], idx[k], idx[k + 1]]);
                    }
                }
                _ => {}
            }
        }
    }
    fn el_count(elements: &[Element], name: &str) -> usize {
        elements.iter().find(|e| e.name == name).map_or(0, |e| e.count)
    }
    TriangleMesh::new(vertices, triangles)
}

/// Writes `v`/`f` records with 1-based indices.
pub fn write_obj(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(48 * (mesh.vertices().len() + mesh.triangles().len()));
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::tests::box_mesh;

    const TRIANGLE: &str = "# one triangle\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";

    #[test]
    fn single_triangle_obj() {
        let m = parse_obj(TRIANGLE, Path::new("t.obj")).unwrap();
        assert_eq!((m.vertices().len(), m.triangles().len()), (3, 1));
    }

    #[test]
    fn obj_slash_negative_and_polygons() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\nf -4 -3 -2\n";
        let m = parse_obj(text, Path::new("q.obj")).unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 2], [0, 2, 3], [0, 1, 2]]);
    }

    #[test]
    fn obj_errors_carry_line_numbers() {
        let err = parse_obj("v 0 0 0\nv 1 0 x\n", Path::new("bad.obj")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_obj("v 0 0 0\nf 1 2 3\n", Path::new("bad.obj")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn cube_round_trip_through_obj() {
        let cube = box_mesh(Vec3::new(-1.5, -0.5, -0.5), Vec3::new(1.5, 0.5, 0.5));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cube.obj");
        write_obj(&cube, &path).unwrap();
        let back = load_mesh(&path).unwrap();
        assert_eq!(back.vertices().len(), 8);
        assert_eq!(back.triangles().len(), 12);
        let bb = back.bounding_box().unwrap();
        assert_eq!(bb.extent(), Vec3::new(3.0, 1.0, 1.0));
    }

    #[test]
    fn ascii_ply() {
        let text = "ply\nformat ascii 1.0\ncomment x\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nelement face 2\nproperty list uchar int vertex_indices\nend_header\n0 0 0 255\n1 0 0 255\n1 1 0 0\n0 1 0 0\n3 0 1 2\n4 0 1 2 3\n";
        let m = parse_ply(text, Path::new("q.ply")).unwrap();
        assert_eq!(m.vertices().len(), 4);
        assert_eq!(m.triangles().len(), 3);
        let binary = "ply\nformat binary_little_endian 1.0\nend_header\n";
        assert!(matches!(parse_ply(binary, Path::new("b.ply")), Err(Error::UnsupportedFormat(_))));
        let short = "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n0 0 0\n";
        assert!(parse_ply(short, Path::new("s.ply")).is_err());
    }

    #[test]
    fn unsupported_extension() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mesh.stl");
        std::fs::write(&path, "solid").unwrap();
        assert!(matches!(load_mesh(&path), Err(Error::UnsupportedFormat(_))));
    }
}
