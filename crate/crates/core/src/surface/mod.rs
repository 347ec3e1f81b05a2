//! Meshes of the fundamental hexagon from the Weierstrass representation
//!
//! ```text
//! X(z) = Re[e^{iθ} ∫_0^z (ω₁, ω₂, ω₃)]
//! ```
//!
//! The base point is `z = 0`, the midpoint of the edge `v₃v₄`, so the image
//! of that edge runs through the origin. Every point is reached along the
//! imaginary axis up to the hub `i√t` and from there along a straight
//! segment, so paths never run near a branch point except at their end.
//!
//! The upper half-plane is meshed through the Cayley chart
//! `z = i√t (1 + w)/(1 − w)` of the unit disk, which puts the hub at the
//! centre and all six `v_k` (and `∞`) on the unit circle.

mod cell;
mod io;

pub use cell::{extend_to_lattice_cell, BoxReport, LatticeCell};
pub use io::{export_mesh, read_obj, read_ply, MeshFormat};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::periods::{FamilyParams, WeierstrassData};
use crate::quad::{self, Tail, C3, MESH_TOL};

/// Boundary arcs of the hexagon, labelled by the parameter interval they
/// come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeLabel {
    V1V2,
    V2V3,
    V3V4,
    V4V5,
    V5V6,
    V6V1,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 6] = [
        EdgeLabel::V1V2,
        EdgeLabel::V2V3,
        EdgeLabel::V3V4,
        EdgeLabel::V4V5,
        EdgeLabel::V5V6,
        EdgeLabel::V6V1,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Edge label of each boundary vertex (`None` for interior vertices). A
    /// hexagon corner `V_k` carries the label of the edge starting there.
    pub boundary_tags: Vec<Option<EdgeLabel>>,
    /// Vertex indices of the corner images `V₁ … V₆` (hexagon meshes only).
    pub corners: Vec<usize>,
    pub params: FamilyParams,
    /// Bonnet angle.
    pub theta: f64,
    /// Number of hexagon copies in the mesh.
    pub copies: usize,
}

impl SurfaceMesh {
    /// Axis-aligned bounding box diagonal.
    pub fn diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for c in 0..3 {
                lo[c] = lo[c].min(v[c]);
                hi[c] = hi[c].max(v[c]);
            }
        }
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt()
    }

    /// Indices of the vertices on one boundary arc, corners at both ends
    /// included.
    pub fn arc(&self, label: EdgeLabel) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.vertices.len())
            .filter(|&i| self.boundary_tags[i] == Some(label))
            .collect();
        if self.corners.len() == 6 {
            let end = self.corners[(label.index() + 1) % 6];
            out.push(end);
        }
        out
    }

    /// `V − E + F` of the mesh as a simplicial complex.
    pub fn euler_characteristic(&self) -> i64 {
        let edges = edge_face_counts(&self.faces);
        self.vertices.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }
}

/// Number of faces incident to each undirected edge.
pub(crate) fn edge_face_counts(
    faces: &[[usize; 3]],
) -> std::collections::HashMap<(usize, usize), usize> {
    let mut m = std::collections::HashMap::new();
    for f in faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            *m.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    m
}

/// A point of the closed upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Param {
    Finite(Complex64),
    Infinity,
}

fn scale(v: C3, c: Complex64) -> C3 {
    C3(v.0.map(|x| x * c))
}

/// `∫_{za}^{zb} ω` along the straight segment. The differences `z − v_j`
/// are formed from the nearer endpoint, so a segment may end exactly on a
/// branch point.
fn segment(data: &WeierstrassData, za: Complex64, zb: Complex64, tol: f64) -> Result<C3> {
    let delta = zb - za;
    let v = data.params.vertices();
    let da = v.map(|vj| za - vj);
    let db = v.map(|vj| zb - vj);
    let w: C3 = quad::integrate(0.0, 1.0, tol, |at| {
        let d: [Complex64; 6] = if at.from_left <= at.from_right {
            std::array::from_fn(|j| da[j] + delta * at.from_left)
        } else {
            std::array::from_fn(|j| db[j] - delta * at.from_right)
        };
        C3(data.omega_from_diffs(&d))
    })?;
    Ok(scale(w, delta))
}

fn hub(data: &WeierstrassData) -> Complex64 {
    Complex64::new(0.0, data.params.t.sqrt())
}

/// `∫` from the hub up the imaginary axis to `∞`.
fn tail_to_infinity(data: &WeierstrassData, tol: f64) -> Result<C3> {
    let h = hub(data);
    let base = data.params.vertices().map(|vj| h - vj);
    let i = Complex64::new(0.0, 1.0);
    let w: C3 = quad::integrate_improper_tail(h.im, Tail::Up, tol, |d| {
        let diffs = base.map(|b| b + i * d);
        C3(data.omega_from_diffs(&diffs))
    })?;
    Ok(scale(w, i))
}

/// `∫_0^{hub} ω`.
fn hub_integral(data: &WeierstrassData, tol: f64) -> Result<C3> {
    segment(data, Complex64::new(0.0, 0.0), hub(data), tol)
}

fn integral_to(data: &WeierstrassData, hub_int: C3, p: Param, tol: f64) -> Result<C3> {
    match p {
        Param::Finite(z) if z == hub(data) => Ok(hub_int),
        Param::Finite(z) => Ok(hub_int + segment(data, hub(data), z, tol)?),
        Param::Infinity => Ok(hub_int + tail_to_infinity(data, tol)?),
    }
}

fn real_part(w: C3, theta: f64) -> [f64; 3] {
    let r = Complex64::from_polar(1.0, theta);
    w.0.map(|x| (r * x).re)
}

/// Image of `z` (closed upper half-plane) under the Weierstrass
/// representation with Bonnet angle `θ`.
pub fn weierstrass_point(data: &WeierstrassData, z: Complex64, theta: f64) -> Result<[f64; 3]> {
    weierstrass_point_tol(data, z, theta, MESH_TOL)
}

pub fn weierstrass_point_tol(
    data: &WeierstrassData,
    z: Complex64,
    theta: f64,
    tol: f64,
) -> Result<[f64; 3]> {
    if !(z.re.is_finite() && z.im.is_finite() && z.im >= 0.0) {
        return Err(Error::domain(format!(
            "z = {z} is not in the closed upper half-plane"
        )));
    }
    let hub_int = hub_integral(data, tol)?;
    Ok(real_part(
        integral_to(data, hub_int, Param::Finite(z), tol)?,
        theta,
    ))
}

/// Image of `z = ∞`.
pub fn weierstrass_point_at_infinity(data: &WeierstrassData, theta: f64) -> Result<[f64; 3]> {
    let hub_int = hub_integral(data, MESH_TOL)?;
    Ok(real_part(
        integral_to(data, hub_int, Param::Infinity, MESH_TOL)?,
        theta,
    ))
}

/// `∫_{v_k}^{v_{k+1}} ω` along the real axis for the 0-based edge `k`; edge 5
/// (`v₆v₁`) passes through `∞`.
pub fn edge_integral(data: &WeierstrassData, k: usize, tol: f64) -> Result<[Complex64; 3]> {
    let v = data.params.vertices();
    let w = if k < 5 {
        segment(
            data,
            Complex64::new(v[k], 0.0),
            Complex64::new(v[k + 1], 0.0),
            tol,
        )
        .map_err(|e| e.on_edge(k + 1))?
    } else if k == 5 {
        let t = data.params.t;
        let right: C3 = quad::integrate_improper_tail(t, Tail::Up, tol, |d| {
            let diffs = v.map(|vj| Complex64::new((t - vj) + d, 0.0));
            C3(data.omega_from_diffs(&diffs))
        })
        .map_err(|e| e.on_edge(6))?;
        let left: C3 = quad::integrate_improper_tail(-t, Tail::Down, tol, |d| {
            let diffs = v.map(|vj| Complex64::new((-t - vj) - d, 0.0));
            C3(data.omega_from_diffs(&diffs))
        })
        .map_err(|e| e.on_edge(6))?;
        right + left
    } else {
        return Err(Error::domain(format!("edge index {k} out of range")));
    };
    Ok(w.0)
}

/// Boundary parameter for chart angle `φ ∈ [0, 2π]`: `x = −√t·cot(φ/2)`.
fn boundary_param(t: f64, phi: f64) -> Param {
    let half = 0.5 * phi;
    if half.sin() == 0.0 || phi <= 0.0 || phi >= 2.0 * PI {
        Param::Infinity
    } else {
        Param::Finite(Complex64::new(-t.sqrt() * half.cos() / half.sin(), 0.0))
    }
}

/// Chart angle of the real parameter `x`.
fn chart_angle(t: f64, x: f64) -> f64 {
    2.0 * t.sqrt().atan2(-x)
}

fn disk_param(t: f64, w: Complex64) -> Param {
    let one = Complex64::new(1.0, 0.0);
    Param::Finite(Complex64::new(0.0, t.sqrt()) * (one + w) / (one - w))
}

/// Mesh of the fundamental hexagon with Bonnet angle 0.
pub fn fundamental_hexagon(params: &FamilyParams, resolution: usize) -> Result<SurfaceMesh> {
    fundamental_hexagon_at(params, resolution, 0.0, MESH_TOL)
}

/// Mesh of the image of the upper half-plane.
///
/// Each boundary arc gets `resolution` segments (cosine-clustered towards the
/// corners); the disk chart gets `resolution` rings with the same angular
/// nodes, refined quadratically towards the boundary.
pub fn fundamental_hexagon_at(
    params: &FamilyParams,
    resolution: usize,
    theta: f64,
    tol: f64,
) -> Result<SurfaceMesh> {
    if resolution < 4 {
        return Err(Error::domain(format!(
            "mesh resolution must be at least 4, got {resolution}"
        )));
    }
    if !theta.is_finite() {
        return Err(Error::domain("Bonnet angle must be finite"));
    }
    let data = WeierstrassData::new(*params);
    let t = params.t;
    let v = params.vertices();
    let n = resolution;
    let mut corner_phi: Vec<f64> = v.iter().map(|&x| chart_angle(t, x)).collect();
    corner_phi.push(corner_phi[0] + 2.0 * PI);

    // Boundary nodes: arc k contributes its starting corner and n − 1 interior nodes.
    let mut phis = Vec::with_capacity(6 * n);
    let mut bparams = Vec::with_capacity(6 * n);
    let mut tags = Vec::with_capacity(6 * n);
    for k in 0..6 {
        let (p0, p1) = (corner_phi[k], corner_phi[k + 1]);
        for j in 0..n {
            let s = 0.5 * (1.0 - (PI * j as f64 / n as f64).cos());
            let phi = p0 + (p1 - p0) * s;
            phis.push(phi);
            tags.push(EdgeLabel::ALL[k]);
            bparams.push(if j == 0 {
                Param::Finite(Complex64::new(v[k], 0.0))
            } else {
                boundary_param(t, phi.rem_euclid(2.0 * PI))
            });
        }
    }
    let m = phis.len();
    let rings = n;
    let mut points = vec![Param::Finite(hub(&data))];
    for i in 1..rings {
        let s = 1.0 - i as f64 / rings as f64;
        let r = 1.0 - s * s;
        for &phi in &phis {
            points.push(disk_param(t, Complex64::from_polar(r, phi)));
        }
    }
    let boundary_start = points.len();
    points.extend(bparams.iter().copied());

    let hub_int = hub_integral(&data, tol)?;
    let vertices = points
        .par_iter()
        .map(|&p| integral_to(&data, hub_int, p, tol).map(|w| real_part(w, theta)))
        .collect::<Result<Vec<_>>>()?;

    let ring = |i: usize, j: usize| -> usize { 1 + (i - 1) * m + (j % m) };
    let mut faces = Vec::with_capacity(2 * m * rings);
    for j in 0..m {
        faces.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..rings {
        for j in 0..m {
            let (a, b, c, d) = (
                ring(i, j),
                ring(i, j + 1),
                ring(i + 1, j + 1),
                ring(i + 1, j),
            );
            faces.push([a, d, c]);
            faces.push([a, c, b]);
        }
    }
    let mut boundary_tags = vec![None; vertices.len()];
    for (j, tag) in tags.into_iter().enumerate() {
        boundary_tags[boundary_start + j] = Some(tag);
    }
    let corners = (0..6).map(|k| boundary_start + k * n).collect();
    Ok(SurfaceMesh {
        vertices,
        faces,
        boundary_tags,
        corners,
        params: *params,
        theta,
        copies: 1,
    })
}

/// Geometric residuals of the six boundary arcs of a `θ = 0` hexagon,
/// relative to the mesh diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryResiduals {
    /// Spread of `x` on `v₁v₂`, `y` on `v₂v₃`, `y` on `v₄v₅`, `x` on `v₅v₆`.
    pub planes: [f64; 4],
    /// Spread of `(y, z)` on `v₆v₁` and of `(x, z)` on `v₃v₄`.
    pub lines: [f64; 2],
    pub diameter: f64,
}

impl BoundaryResiduals {
    pub fn worst(&self) -> f64 {
        self.planes
            .iter()
            .chain(self.lines.iter())
            .copied()
            .fold(0.0, f64::max)
    }
}

fn spread(mesh: &SurfaceMesh, label: EdgeLabel, coord: usize) -> (f64, f64) {
    let idx = mesh.arc(label);
    let vals: Vec<f64> = idx.iter().map(|&i| mesh.vertices[i][coord]).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    (
        mean,
        vals.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max),
    )
}

pub fn boundary_residuals(mesh: &SurfaceMesh) -> Result<BoundaryResiduals> {
    if mesh.corners.len() != 6 {
        return Err(Error::domain(
            "boundary residuals need a single hexagon mesh",
        ));
    }
    let d = mesh.diameter();
    let planes = [
        spread(mesh, EdgeLabel::V1V2, 0).1,
        spread(mesh, EdgeLabel::V2V3, 1).1,
        spread(mesh, EdgeLabel::V4V5, 1).1,
        spread(mesh, EdgeLabel::V5V6, 0).1,
    ]
    .map(|s| s / d);
    let bottom = spread(mesh, EdgeLabel::V6V1, 1)
        .1
        .max(spread(mesh, EdgeLabel::V6V1, 2).1);
    let top = spread(mesh, EdgeLabel::V3V4, 0)
        .1
        .max(spread(mesh, EdgeLabel::V3V4, 2).1);
    Ok(BoundaryResiduals {
        planes,
        lines: [bottom / d, top / d],
        diameter: d,
    })
}

/// Unit-cell proportions of the conjugate surface on the tetragonal locus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellRatio {
    /// Side of the square base.
    pub e: f64,
    /// Height.
    pub f: f64,
    pub ratio: f64,
    /// Conjugate edge vectors `−Im ∫ ω` over `v₁v₂`, `v₂v₃`, `v₃v₄`.
    pub edge_vectors: [[f64; 3]; 3],
}

/// `(a, b, t)` of the cubic point: the branch values form a cube and the
/// conjugate cell is cubic.
pub const CUBIC_POINT: (f64, f64, f64) = (1.732_050_807_568_877_2, 1.732_050_807_568_877_2, 3.0);

/// Tolerance of the cubic anchor gate.
pub const ANCHOR_TOL: f64 = 1e-8;

/// Conjugate-surface cell ratio `E/F` without the anchor gate.
///
/// The conjugate hexagon has straight edges on `v₁v₂`, `v₂v₃` (and their
/// mirror images) spanning a quarter of a horizontal square of side
/// `s = |e₁| + |e₂|`, and `e₃` spans half the vertical period. Rotations
/// about the straight edges generate the lattice `(s, ±s, 0)`, `(0, 0, 2h)`,
/// whose tetragonal cell has `E = √2·s` and `F = 2h`.
pub fn conjugate_cell_ratio_ungated(params: &FamilyParams) -> Result<CellRatio> {
    if !(params.a == params.b && (params.a * params.a - params.t).abs() <= 1e-12 * params.t) {
        return Err(Error::domain(format!(
            "conjugate cell ratio needs a = b = √t, got a = {}, b = {}, t = {}",
            params.a, params.b, params.t
        )));
    }
    let data = WeierstrassData::new(params.with_rho(1.0)?);
    let mut edge_vectors = [[0.0; 3]; 3];
    for (k, e) in edge_vectors.iter_mut().enumerate() {
        *e = edge_integral(&data, k, 1e-13)?.map(|w| -w.im);
    }
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let s = norm(edge_vectors[0]) + norm(edge_vectors[1]);
    let h = edge_vectors[2][2].abs();
    let (e, f) = (SQRT_2 * s, 2.0 * h);
    Ok(CellRatio {
        e,
        f,
        ratio: e / f,
        edge_vectors,
    })
}

/// Conjugate cell ratio `E/F`, gated on the cubic anchor `E/F = 1`.
pub fn conjugate_cell_ratio(params: &FamilyParams) -> Result<CellRatio> {
    let (a, b, t) = CUBIC_POINT;
    let anchor = conjugate_cell_ratio_ungated(&FamilyParams::new(a, b, t)?)?;
    if (anchor.ratio - 1.0).abs() > ANCHOR_TOL {
        return Err(Error::Gate(format!(
            "cubic anchor gives E/F = {} (expected 1)",
            anchor.ratio
        )));
    }
    conjugate_cell_ratio_ungated(params)
}
