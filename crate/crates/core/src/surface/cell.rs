//! Box geometry of a hexagon and its extension to a translational cell.

use serde::Serialize;
use std::collections::{HashMap, HashSet};

use super::{edge_face_counts, EdgeLabel, SurfaceMesh};
use crate::error::{Error, Result};

/// Tolerance (in height units) for the top and bottom segments to sit on
/// the box centre lines.
pub const CENTRE_TOL: f64 = 1e-6;

/// Welding and lattice-identification threshold, in height units.
const MERGE_TOL: f64 = 1e-6;

/// Bounding box of a `θ = 0` hexagon.
///
/// The hexagon fills the box `[x₁₂, x₅₆] × [y₂₃, y₄₅] × [z_bottom, z_top]`;
/// `A`, `B` are the box width and depth in units of its height. When the
/// period problem is solved the top segment lies over the centre line
/// `x = (x₁₂ + x₅₆)/2` and the bottom segment under `y = (y₂₃ + y₄₅)/2`, and
/// eight hexagons tile a cell of the lattice spanned by `(2A, 0, 0)`,
/// `(0, 2B, 0)`, `(A, B, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxReport {
    pub x12: f64,
    pub x56: f64,
    pub y23: f64,
    pub y45: f64,
    pub z_top: f64,
    pub z_bottom: f64,
    /// `x` of the top segment (image of `v₃v₄`).
    pub x_top: f64,
    /// `y` of the bottom segment (image of `v₆v₁`).
    pub y_bottom: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// Normalized box height (always 1).
    pub height: f64,
    /// Box height in model units; divide model coordinates by it to get
    /// height units.
    pub scale: f64,
    /// Lattice generators in height units.
    pub lattice: [[f64; 3]; 3],
    /// Offsets `(dx, dy)` of the top and bottom segments from the centre
    /// lines, in height units.
    pub off_centre: (f64, f64),
    pub centered: bool,
}

fn mean(mesh: &SurfaceMesh, label: EdgeLabel, coord: usize) -> f64 {
    let idx = mesh.arc(label);
    idx.iter().map(|&i| mesh.vertices[i][coord]).sum::<f64>() / idx.len() as f64
}

impl BoxReport {
    pub fn from_mesh(mesh: &SurfaceMesh) -> Result<Self> {
        if mesh.corners.len() != 6 || mesh.copies != 1 {
            return Err(Error::domain("box report needs a single hexagon mesh"));
        }
        let x12 = mean(mesh, EdgeLabel::V1V2, 0);
        let x56 = mean(mesh, EdgeLabel::V5V6, 0);
        let y23 = mean(mesh, EdgeLabel::V2V3, 1);
        let y45 = mean(mesh, EdgeLabel::V4V5, 1);
        let z_top = mean(mesh, EdgeLabel::V3V4, 2);
        let z_bottom = mean(mesh, EdgeLabel::V6V1, 2);
        let x_top = mean(mesh, EdgeLabel::V3V4, 0);
        let y_bottom = mean(mesh, EdgeLabel::V6V1, 1);
        let h = (z_top - z_bottom).abs();
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Input(format!("degenerate box height {h}")));
        }
        let (a, b) = ((x56 - x12).abs() / h, (y45 - y23).abs() / h);
        let dx = (x_top - 0.5 * (x12 + x56)) / h;
        let dy = (y_bottom - 0.5 * (y23 + y45)) / h;
        Ok(BoxReport {
            x12,
            x56,
            y23,
            y45,
            z_top,
            z_bottom,
            x_top,
            y_bottom,
            a,
            b,
            height: 1.0,
            scale: h,
            lattice: [[2.0 * a, 0.0, 0.0], [0.0, 2.0 * b, 0.0], [a, b, 2.0]],
            off_centre: (dx, dy),
            centered: dx.abs() <= CENTRE_TOL && dy.abs() <= CENTRE_TOL,
        })
    }

    /// Lattice generators in model units.
    pub fn lattice_model(&self) -> [[f64; 3]; 3] {
        self.lattice.map(|v| v.map(|c| c * self.scale))
    }
}

/// Eight hexagons forming a translational cell, with the closure checks of
/// the quotient surface.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeCell {
    /// Welded eight-hexagon mesh in model units.
    pub mesh: SurfaceMesh,
    pub report: BoxReport,
    /// Largest distance between welded vertices, in height units.
    pub weld_residual: f64,
    /// Euler characteristic of the cell with lattice-equivalent boundary
    /// vertices identified (−4 for genus 3).
    pub euler_characteristic: i64,
    /// Every edge of the quotient has exactly two faces and every face is
    /// non-degenerate.
    pub closed: bool,
}

impl LatticeCell {
    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic) / 2
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }
    fn union(&mut self, i: usize, j: usize) {
        let (a, b) = (self.find(i), self.find(j));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

fn dist(p: [f64; 3], q: [f64; 3]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

/// Extends a solved `θ = 0` hexagon to a translational cell by the
/// reflections in the lateral planes `x = x₅₆`, `y = y₄₅` and the half-turn
/// about the bottom segment.
pub fn extend_to_lattice_cell(hex: &SurfaceMesh) -> Result<LatticeCell> {
    if hex.theta != 0.0 {
        return Err(Error::domain("lattice cell needs the Bonnet angle θ = 0"));
    }
    let report = BoxReport::from_mesh(hex)?;
    if !report.centered {
        let (dx, dy) = report.off_centre;
        return Err(Error::OffCentre { dx, dy });
    }
    let h = report.scale;
    let (x56, y45, yb, zb) = (report.x56, report.y45, report.y_bottom, report.z_bottom);
    let mx = move |p: [f64; 3]| [2.0 * x56 - p[0], p[1], p[2]];
    let my = move |p: [f64; 3]| [p[0], 2.0 * y45 - p[1], p[2]];
    let rb = move |p: [f64; 3]| [p[0], 2.0 * yb - p[1], 2.0 * zb - p[2]];

    // Every generator reverses the surface orientation.
    let nv = hex.vertices.len();
    let mut vertices = Vec::with_capacity(8 * nv);
    let mut faces = Vec::with_capacity(8 * hex.faces.len());
    let mut tags = Vec::with_capacity(8 * nv);
    for (ix, iy, ib) in (0..8).map(|c| (c & 1 == 1, c & 2 == 2, c & 4 == 4)) {
        let off = vertices.len();
        for &p in &hex.vertices {
            let mut q = p;
            if ib {
                q = rb(q);
            }
            if ix {
                q = mx(q);
            }
            if iy {
                q = my(q);
            }
            vertices.push(q);
        }
        tags.extend(hex.boundary_tags.iter().copied());
        let flip = (ix as u8 + iy as u8 + ib as u8) % 2 == 1;
        faces.extend(hex.faces.iter().map(|f| {
            if flip {
                [f[0] + off, f[2] + off, f[1] + off]
            } else {
                f.map(|i| i + off)
            }
        }));
    }

    // Weld coincident boundary vertices.
    let boundary: Vec<usize> = (0..vertices.len()).filter(|&i| tags[i].is_some()).collect();
    let mut uf = UnionFind::new(vertices.len());
    let mut weld_residual: f64 = 0.0;
    for (n, &i) in boundary.iter().enumerate() {
        for &j in &boundary[n + 1..] {
            let d = dist(vertices[i], vertices[j]);
            if d <= MERGE_TOL * h {
                uf.union(i, j);
                weld_residual = weld_residual.max(d / h);
            }
        }
    }
    let mut new_index = vec![usize::MAX; vertices.len()];
    let mut welded = Vec::new();
    let mut welded_tags = Vec::new();
    for i in 0..vertices.len() {
        let r = uf.find(i);
        if new_index[r] == usize::MAX {
            new_index[r] = welded.len();
            welded.push(vertices[r]);
            welded_tags.push(tags[r]);
        }
        new_index[i] = new_index[r];
    }
    let faces: Vec<[usize; 3]> = faces.into_iter().map(|f| f.map(|i| new_index[i])).collect();
    let mesh = SurfaceMesh {
        vertices: welded,
        faces,
        boundary_tags: welded_tags,
        corners: Vec::new(),
        params: hex.params,
        theta: 0.0,
        copies: 8,
    };
    let (euler_characteristic, closed) = quotient_topology(&mesh, &report.lattice_model(), h);
    Ok(LatticeCell {
        mesh,
        report,
        weld_residual,
        euler_characteristic,
        closed,
    })
}

/// Euler characteristic and closedness of the mesh modulo the lattice.
fn quotient_topology(mesh: &SurfaceMesh, lattice: &[[f64; 3]; 3], h: f64) -> (i64, bool) {
    let counts = edge_face_counts(&mesh.faces);
    let mut open: HashSet<usize> = HashSet::new();
    for (&(a, b), &c) in &counts {
        if c == 1 {
            open.insert(a);
            open.insert(b);
        }
    }
    let open: Vec<usize> = {
        let mut v: Vec<usize> = open.into_iter().collect();
        v.sort_unstable();
        v
    };
    let [l1, l2, l3] = *lattice;
    let mut uf = UnionFind::new(mesh.vertices.len());
    for (n, &i) in open.iter().enumerate() {
        for &j in &open[n + 1..] {
            let p = mesh.vertices[i];
            let q = mesh.vertices[j];
            let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
            let n3 = (d[2] / l3[2]).round();
            let n2 = ((d[1] - n3 * l3[1]) / l2[1]).round();
            let n1 = ((d[0] - n3 * l3[0]) / l1[0]).round();
            if n1 == 0.0 && n2 == 0.0 && n3 == 0.0 {
                continue;
            }
            let shift: Vec<f64> = (0..3)
                .map(|c| n1 * l1[c] + n2 * l2[c] + n3 * l3[c])
                .collect();
            let r =
                ((d[0] - shift[0]).powi(2) + (d[1] - shift[1]).powi(2) + (d[2] - shift[2]).powi(2))
                    .sqrt();
            if r <= MERGE_TOL * h {
                uf.union(i, j);
            }
        }
    }
    let class: Vec<usize> = (0..mesh.vertices.len()).map(|i| uf.find(i)).collect();
    let nv = class.iter().collect::<HashSet<_>>().len();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let mut degenerate = false;
    for f in &mesh.faces {
        let c = f.map(|i| class[i]);
        if c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
            degenerate = true;
        }
        for k in 0..3 {
            let (a, b) = (c[k], c[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let closed = !degenerate && edges.values().all(|&c| c == 2);
    (
        nv as i64 - edges.len() as i64 + mesh.faces.len() as i64,
        closed,
    )
}
