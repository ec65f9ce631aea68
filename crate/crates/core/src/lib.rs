//! Divergence-free webs in adapted coordinates.
//!
//! A web is described by a [`WebChart`]: a block partition of the coordinates
//! (one block per foliation) and a positive density `h`, so that the volume
//! form is `h dx₁∧…∧dx_m`. The modules compute the nonuniformity tensor and
//! its triviality verdict ([`web`]), leaf-bounded volumes and reflection
//! holonomy ([`measure`]), reconstruction of `h` and normal forms
//! ([`normalform`]) and the webs of 3+1 split spacetimes ([`relativity`]).

mod error;
pub mod expr;
pub mod measure;
pub mod normalform;
pub mod quadrature;
pub mod region;
pub mod relativity;
pub mod roots;
pub mod web;

pub use error::{Error, Result};
pub use expr::{parse_expr, Expr, ExprError, ZeroVerdict};
pub use quadrature::{Estimate, QuadratureSpec};
pub use region::Region;
pub use web::{SymTensorField, WebChart};
