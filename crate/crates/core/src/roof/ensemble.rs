use crate::error::{Error, Result};
use crate::linalg::{
    trace_norm_hermitian, vec_norm, BipartiteDims, ComplexMatrix, DensityOperator, PureState, RANK_THRESHOLD,
};
use crate::scalar::Real;

/// Rows of an isometry whose unnormalized state has squared norm below this
/// are dropped from the ensemble.
pub const DROP_WEIGHT: f64 = 1e-14;

/// Pure-state decomposition `{λ_i, ψ_i}` of a density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble<R> {
    weights: Vec<R>,
    states: Vec<PureState<R>>,
}

impl<R: Real> Ensemble<R> {
    /// Weights must be nonnegative and sum to one within 1e-10.
    pub fn new(weights: Vec<R>, states: Vec<PureState<R>>) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch(format!("{} weights for {} states", weights.len(), states.len())));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= R::zero())) {
            return Err(Error::Invariant { invariant: "nonnegative weights", residual: w.as_f64() });
        }
        let total: R = weights.iter().copied().sum();
        if (total - R::one()).abs() > R::tol(1e-10) {
            return Err(Error::Invariant { invariant: "weights sum to one", residual: (total - R::one()).as_f64() });
        }
        let dims = states[0].dims();
        if states.iter().any(|s| s.dims() != dims) {
            return Err(Error::DimensionMismatch("ensemble members with different dims".into()));
        }
        Ok(Self { weights, states })
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState<R>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dims(&self) -> BipartiteDims {
        self.states[0].dims()
    }

    /// `Σ λ_i |ψ_i⟩⟨ψ_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix<R> {
        let n = self.dims().total();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (w, s) in self.weights.iter().zip(&self.states) {
            let a = s.amplitudes();
            for i in 0..n {
                for j in 0..n {
                    acc[(i, j)] = acc[(i, j)] + a[i] * a[j].conj() * *w;
                }
            }
        }
        acc
    }

    /// Trace-norm distance between the reconstruction and `rho`.
    pub fn reconstruction_residual(&self, rho: &DensityOperator<R>) -> Result<R> {
        if rho.dims() != self.dims() {
            return Err(Error::DimensionMismatch("ensemble and density dims differ".into()));
        }
        trace_norm_hermitian(&(&self.reconstruct() - rho.matrix()))
    }
}

/// Eigen-ensemble data shared by every isometry: `b_j = √p_j |e_j⟩` for the
/// `r = rank(ρ)` retained eigenpairs.
#[derive(Clone, Debug)]
pub(crate) struct EigenBasis<R> {
    /// `r × D` matrix whose rows are `b_j`.
    pub scaled: ComplexMatrix<R>,
    pub dims: BipartiteDims,
}

impl<R: Real> EigenBasis<R> {
    pub fn new(rho: &DensityOperator<R>) -> Self {
        let e = rho.eigh();
        let r = e.rank(R::lit(RANK_THRESHOLD)).max(1);
        let n = rho.dims().total();
        let scaled = ComplexMatrix::from_fn(r, n, |j, k| e.vectors[(k, j)] * e.values[j].max(R::zero()).sqrt());
        Self { scaled, dims: rho.dims() }
    }

    pub fn rank(&self) -> usize {
        self.scaled.rows()
    }

    /// Rows `χ_i = Σ_j V[i][j] b_j`.
    pub fn mix(&self, v: &ComplexMatrix<R>) -> ComplexMatrix<R> {
        v.mul_unchecked(&self.scaled)
    }

    pub fn ensemble(&self, v: &ComplexMatrix<R>) -> Result<Ensemble<R>> {
        let chi = self.mix(v);
        let mut weights = Vec::with_capacity(v.rows());
        let mut states = Vec::with_capacity(v.rows());
        for i in 0..chi.rows() {
            let row = chi.row(i);
            let n2 = row.iter().map(|z| z.norm_sqr()).sum::<R>();
            if n2 < R::lit(DROP_WEIGHT) {
                continue;
            }
            let norm = vec_norm(row);
            weights.push(n2);
            states.push(PureState::normalized(row.iter().map(|z| z / norm).collect(), self.dims)?);
        }
        let total: R = weights.iter().copied().sum();
        for w in weights.iter_mut() {
            *w = *w / total;
        }
        Ensemble::new(weights, states)
    }
}

/// Maps an `m × r` isometry `V` (with `r = rank ρ`) to the decomposition with
/// unnormalized members `χ_i = Σ_j V[i][j] √p_j |e_j⟩`.
pub fn ensemble_from_isometry<R: Real>(rho: &DensityOperator<R>, v: &ComplexMatrix<R>) -> Result<Ensemble<R>> {
    let basis = EigenBasis::new(rho);
    let r = basis.rank();
    if v.cols() != r {
        return Err(Error::DimensionMismatch(format!("isometry has {} columns but rank(rho) = {r}", v.cols())));
    }
    if v.rows() < r {
        return Err(Error::InvalidParameter(format!("ensemble size {} below rank {r}", v.rows())));
    }
    let dev = (&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(r));
    if dev > R::tol(1e-10) {
        return Err(Error::NotIsometry(dev.as_f64()));
    }
    basis.ensemble(v)
}
