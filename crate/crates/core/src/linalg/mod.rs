//! Dense complex linear algebra for bipartite systems.

mod bipartite;
mod eigen;
mod matrix;
mod state;

pub use bipartite::{lift_local, partial_trace, partial_transpose, BipartiteDims, Side};
pub use eigen::{eigh, eigvalsh, psd_sqrt, trace_norm_hermitian, Eigh};
pub use matrix::ComplexMatrix;
pub use state::{
    reshape_to_coefficient_matrix, schmidt, DensityOperator, PureState, SchmidtDecomposition, RANK_THRESHOLD,
};

pub(crate) use eigen::{eigh_unchecked, top_eigen_projector};
pub(crate) use state::{hermitian_part, schmidt_weights, threshold_spectrum, vec_norm};
