//! Bipartite entanglement measures, their convex- and concave-roof extensions
//! to mixed states, and LOCC protocol trees.
//!
//! All numerical code is generic over a [`Real`] scalar (`f32` or `f64`).
//! The aliases at the crate root fix the scalar to `f64`, which is what the
//! command-line tool and the tolerances in the test suites assume.
//!
//! ```
//! use entroof::{measures, State};
//!
//! let bell = State::maximally_entangled(2).unwrap();
//! let e = measures::entanglement_number_pure(&bell);
//! assert!((e - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
//! ```

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod locc;
pub mod measures;
pub mod random;
pub mod roof;
pub mod scalar;

pub use error::{Error, Result};
pub use linalg::{BipartiteDims, ComplexMatrix, DensityOperator, PureState, SchmidtDecomposition, Side};
pub use measures::{LogBase, MeasureSpec};
pub use roof::{Direction, Ensemble, PureObjective, RoofOptions, RoofProblem, RoofResult};
pub use scalar::Real;

pub use num_complex::Complex;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;
/// Double-precision dense matrix.
pub type Matrix = ComplexMatrix<f64>;
/// Single-precision dense matrix.
pub type Matrix32 = ComplexMatrix<f32>;
/// Double-precision pure state.
pub type State = PureState<f64>;
/// Single-precision pure state.
pub type State32 = PureState<f32>;
/// Double-precision density operator.
pub type Density = DensityOperator<f64>;
/// Single-precision density operator.
pub type Density32 = DensityOperator<f32>;
/// Double-precision LOCC tree.
pub type Tree = locc::LoccNode<f64>;
