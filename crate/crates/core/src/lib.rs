//! Matrix representations of generalized Heisenberg algebras and generalized
//! sl(2) algebras, and the Jordan-Schwinger-type map relating them.
//!
//! * [`charfun`]: polynomial characteristic functions, iteration and
//!   fixed-point analysis.
//! * [`gha`]: truncated Fock representations of `H, A, A+`.
//! * [`gsl2`]: highest-weight representations of `J0, J+, J-` and the
//!   closure (cut / periodic) conditions.
//! * [`jsmap`]: the two-oscillator realization and its equality with the
//!   direct representation.
//! * [`orbit`]: cobweb plot data.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfun;
pub mod error;
pub mod gha;
pub mod gsl2;
pub mod jsmap;
pub mod matrix;
pub mod orbit;
pub mod report;
pub mod roots;

pub use charfun::{CharFn, FixedPointInfo, OneSidedBehavior, Orientation, RegionLabel, Stability};
pub use error::{Error, Result};
pub use gha::{build_gha, verify_gha_relations, GhaRep};
pub use gsl2::{build_gsl2, cut_condition_solve, verify_gsl2_relations, Gsl2Rep, RepKind};
pub use jsmap::{build_jsmap, verify_jsmap_relations, verify_map_equals_gsl2, JsMapRep, SpaceMode};
pub use matrix::OperatorMatrix;
pub use orbit::{cobweb, figure_bundle, Figure, OrbitReport};
pub use report::{Coverage, ResidualReport};
