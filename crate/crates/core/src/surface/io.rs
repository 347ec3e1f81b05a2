//! OBJ and ASCII PLY export (and the matching readers).

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::SurfaceMesh;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            other => Err(Error::Input(format!(
                "unknown mesh format {other:?} (expected obj or ply)"
            ))),
        }
    }
}

impl MeshFormat {
    /// Format implied by a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

/// Shortest decimal that round-trips to the same double.
fn num(x: f64) -> String {
    let s = format!("{x:?}");
    s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
}

fn to_obj(mesh: &SurfaceMesh) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", num(v[0]), num(v[1]), num(v[2]));
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

fn to_ply(mesh: &SurfaceMesh) -> String {
    let mut s = String::new();
    s.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(s, "element vertex {}", mesh.vertices.len());
    s.push_str("property double x\nproperty double y\nproperty double z\n");
    let _ = writeln!(s, "element face {}", mesh.faces.len());
    s.push_str("property list uchar int vertex_indices\nend_header\n");
    for v in &mesh.vertices {
        let _ = writeln!(s, "{} {} {}", num(v[0]), num(v[1]), num(v[2]));
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}

/// Writes the mesh with full double precision.
pub fn export_mesh(mesh: &SurfaceMesh, path: &Path, format: MeshFormat) -> Result<()> {
    if mesh.vertices.is_empty() || mesh.faces.is_empty() {
        return Err(Error::Input("refusing to export an empty mesh".into()));
    }
    let text = match format {
        MeshFormat::Obj => to_obj(mesh),
        MeshFormat::Ply => to_ply(mesh),
    };
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

type RawMesh = (Vec<[f64; 3]>, Vec<[usize; 3]>);

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn bad(path: &Path, line: &str) -> Error {
    Error::Input(format!("{}: malformed line {line:?}", path.display()))
}

fn parse3<T: FromStr>(it: &mut dyn Iterator<Item = &str>) -> Option<[T; 3]> {
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    let c = it.next()?.parse().ok()?;
    Some([a, b, c])
}

/// Reads the vertices and triangles of an OBJ file.
pub fn read_obj(path: &Path) -> Result<RawMesh> {
    let text = read(path)?;
    let (mut v, mut f) = (Vec::new(), Vec::new());
    for line in text.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => v.push(parse3::<f64>(&mut it).ok_or_else(|| bad(path, line))?),
            Some("f") => {
                let idx = parse3::<usize>(&mut it)
                    .filter(|i| i.iter().all(|&k| k >= 1))
                    .ok_or_else(|| bad(path, line))?;
                f.push(idx.map(|k| k - 1));
            }
            _ => {}
        }
    }
    Ok((v, f))
}

/// Reads the vertices and triangles of an ASCII PLY file as written by
/// [`export_mesh`].
pub fn read_ply(path: &Path) -> Result<RawMesh> {
    let text = read(path)?;
    let mut lines = text.lines();
    let (mut nv, mut nf) = (0usize, 0usize);
    loop {
        let line = lines
            .next()
            .ok_or_else(|| Error::Input(format!("{}: missing end_header", path.display())))?;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["end_header"] => break,
            ["element", "vertex", n] => nv = n.parse().map_err(|_| bad(path, line))?,
            ["element", "face", n] => nf = n.parse().map_err(|_| bad(path, line))?,
            _ => {}
        }
    }
    let mut v = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines
            .next()
            .ok_or_else(|| Error::Input(format!("{}: truncated vertex list", path.display())))?;
        v.push(parse3::<f64>(&mut line.split_whitespace()).ok_or_else(|| bad(path, line))?);
    }
    let mut f = Vec::with_capacity(nf);
    for _ in 0..nf {
        let line = lines
            .next()
            .ok_or_else(|| Error::Input(format!("{}: truncated face list", path.display())))?;
        let mut it = line.split_whitespace();
        if it.next() != Some("3") {
            return Err(bad(path, line));
        }
        f.push(parse3::<usize>(&mut it).ok_or_else(|| bad(path, line))?);
    }
    Ok((v, f))
}
