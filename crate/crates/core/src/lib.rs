//! Direct discontinuous Galerkin (DDG) solvers for
//! `∂u/∂t = ∇·(A(u)∇u) + S` on uniform triangulations of a square.
//!
//! The numerical gradient on each edge is paired with the direction vector
//! `ξ = A({u})ᵀn`, which lets a single code path cover nonsymmetric and
//! nonlinear diffusion matrices. Four interface treatments are available
//! through [`ddg::Variant`].
//!
//! Everything is generic over the floating-point type; the aliases at the
//! bottom of this file fix it to `f64` or `f32`.

pub mod basis;
pub mod ddg;
pub mod error;
pub mod harness;
pub mod limiter;
pub mod linalg;
pub mod mesh;
pub mod models;
pub mod quadrature;
pub mod real;
pub mod timestep;

pub use error::{Error, Result};
pub use real::Real;

pub type Mesh64 = mesh::Mesh<f64>;
pub type Mesh32 = mesh::Mesh<f32>;
pub type Field64 = ddg::DgField<f64>;
pub type Field32 = ddg::DgField<f32>;
pub type Model64 = models::DiffusionModel<f64>;
pub type Model32 = models::DiffusionModel<f32>;
pub type Discretization64 = ddg::Discretization<f64>;
pub type Discretization32 = ddg::Discretization<f32>;
pub type Scheme64 = ddg::SchemeConfig<f64>;
pub type Scheme32 = ddg::SchemeConfig<f32>;
