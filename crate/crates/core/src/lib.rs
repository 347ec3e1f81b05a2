//! Numerical toolkit for the genus-3 triply periodic minimal surfaces that
//! deform Schwarz' D surface: the classical orthorhombic `oD` family and the
//! non-Meeks `oΔ` family, together with their tetragonal subfamilies.
//!
//! Surfaces are parameterized by the real preimages of the six hexagon
//! vertices, normalized to `-t < -a < -1 < 1 < b < t`, plus the López-Ros
//! factor `ρ`. The crate computes
//!
//! * complete elliptic integrals ([`specfun`]),
//! * endpoint-singular quadrature ([`quad`]),
//! * the edge periods and the period quotient `Q` ([`periods`]),
//! * branched values of the Gauss map ([`gauss`]),
//! * solutions of the period problem and the special constants ([`solver`]),
//! * meshes of the fundamental hexagon and the translational cell ([`surface`]),
//! * the self-check suites exposed by the command line ([`verify`]).

// NaN-rejecting `!(x > 0.0)` checks and index loops over small fixed arrays
// are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod gauss;
pub mod periods;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod surface;
pub mod verify;

pub use error::{Error, Result, Warning};
pub use gauss::{
    antipodality_test, branch_values, AntipodalityReport, BranchValueSet, Classification,
};
pub use periods::{
    closed_form_periods_diagonal, diagonal_derivatives, dq_db_diagonal, edge_periods, q_value,
    solve_rho, DiagonalDerivatives, EdgePeriods, FamilyParams, WeierstrassData,
};
pub use solver::{
    boundary_curve, count_roots, solve_odelta, solve_tdelta, solve_tstar, BoundaryPoint, RootCount,
    SolveReport,
};
pub use specfun::{ellip_e, ellip_e_bar, ellip_k, ellip_k_bar, moduli_from_at, ModuliPair};
pub use surface::{
    boundary_residuals, conjugate_cell_ratio, export_mesh, extend_to_lattice_cell,
    fundamental_hexagon, weierstrass_point, BoundaryResiduals, BoxReport, CellRatio, EdgeLabel,
    LatticeCell, MeshFormat, SurfaceMesh,
};
