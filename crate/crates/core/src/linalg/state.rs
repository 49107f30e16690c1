use num_complex::Complex;
use num_traits::Zero;

use super::bipartite::{partial_trace, partial_transpose, BipartiteDims, Side};
use super::eigen::{eigh, eigh_unchecked, Eigh};
use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative cutoff below which singular values and eigenvalues count as zero.
pub const RANK_THRESHOLD: f64 = 1e-12;

/// Normalized bipartite pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<R> {
    amplitudes: Vec<Complex<R>>,
    dims: BipartiteDims,
}

impl<R: Real> PureState<R> {
    /// Accepts amplitudes whose Euclidean norm is one within 1e-12.
    pub fn new(amplitudes: Vec<Complex<R>>, dims: BipartiteDims) -> Result<Self> {
        check_length(&amplitudes, dims)?;
        let norm = vec_norm(&amplitudes);
        let residual = (norm - R::one()).abs();
        if !(residual <= R::tol(1e-12)) {
            return Err(Error::Invariant { invariant: "unit norm", residual: residual.as_f64() });
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex<R>>, dims: BipartiteDims) -> Result<Self> {
        check_length(&amplitudes, dims)?;
        let norm = vec_norm(&amplitudes);
        if !(norm > R::epsilon()) || !norm.is_finite() {
            return Err(Error::Invariant { invariant: "nonzero finite vector", residual: norm.as_f64() });
        }
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(), dims })
    }

    /// `|a⟩ ⊗ |b⟩` of two normalized local vectors.
    pub fn product(a: &[Complex<R>], b: &[Complex<R>]) -> Result<Self> {
        let dims = BipartiteDims::new(a.len(), b.len())?;
        let amps = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Self::normalized(amps, dims)
    }

    /// Computational basis state `|i⟩|j⟩`.
    pub fn basis(i: usize, j: usize, dims: BipartiteDims) -> Result<Self> {
        if i >= dims.dim_a() || j >= dims.dim_b() {
            return Err(Error::DimensionMismatch(format!("basis index ({i}, {j}) outside {dims:?}")));
        }
        let mut amps = vec![Complex::zero(); dims.total()];
        amps[i * dims.dim_b() + j] = Complex::new(R::one(), R::zero());
        Ok(Self { amplitudes: amps, dims })
    }

    /// `Σ_i |ii⟩ / √d` on a `d×d` system.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        let dims = BipartiteDims::new(d, d)?;
        let mut amps = vec![Complex::zero(); d * d];
        for i in 0..d {
            amps[i * d + i] = Complex::new(R::one(), R::zero());
        }
        Self::normalized(amps, dims)
    }

    /// State whose coefficient matrix is `c` (rows A, columns B), normalized.
    pub fn from_coefficients(c: &ComplexMatrix<R>) -> Result<Self> {
        let dims = BipartiteDims::new(c.rows(), c.cols())?;
        Self::normalized(c.as_slice().to_vec(), dims)
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<R>] {
        &self.amplitudes
    }

    #[inline]
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    /// `C[i][j]` = amplitude of `|x_i⟩|y_j⟩`; flattening row-major gives the
    /// amplitude vector back.
    pub fn coefficient_matrix(&self) -> ComplexMatrix<R> {
        ComplexMatrix::from_raw(self.dims.dim_a(), self.dims.dim_b(), self.amplitudes.clone())
    }

    pub fn projector(&self) -> ComplexMatrix<R> {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityOperator<R> {
        DensityOperator { matrix: self.projector(), dims: self.dims }
    }

    /// Reduced state on the factor that survives tracing out `side`.
    pub fn reduced(&self, side: Side) -> ComplexMatrix<R> {
        let c = self.coefficient_matrix();
        match side {
            // Tr_A |ψ⟩⟨ψ| = Cᵀ C̄
            Side::A => c.transpose().mul_unchecked(&c.conj()),
            // Tr_B |ψ⟩⟨ψ| = C C†
            Side::B => c.mul_unchecked(&c.adjoint()),
        }
    }

    /// `(U ⊗ V)|ψ⟩` for local operators `u` on A and `v` on B.
    pub fn apply_local(&self, u: &ComplexMatrix<R>, v: &ComplexMatrix<R>) -> Result<Self> {
        let c = self.coefficient_matrix();
        let out = u.matmul(&c)?.matmul(&v.transpose())?;
        Self::from_coefficients(&out)
    }

    pub fn inner(&self, other: &Self) -> Complex<R> {
        self.amplitudes.iter().zip(&other.amplitudes).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn schmidt(&self) -> SchmidtDecomposition<R> {
        schmidt(self)
    }

    /// Schmidt weights `λ_i` (descending, thresholded, not padded).
    pub fn schmidt_weights(&self) -> Vec<R> {
        schmidt_weights(&self.amplitudes, self.dims)
    }
}

fn check_length<R>(amps: &[Complex<R>], dims: BipartiteDims) -> Result<()> {
    if amps.len() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "{} amplitudes for dims ({}, {})",
            amps.len(),
            dims.dim_a(),
            dims.dim_b()
        )));
    }
    Ok(())
}

pub(crate) fn vec_norm<R: Real>(v: &[Complex<R>]) -> R {
    v.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
}

/// Reshapes a pure state into its `dim_a × dim_b` coefficient matrix.
pub fn reshape_to_coefficient_matrix<R: Real>(psi: &PureState<R>) -> ComplexMatrix<R> {
    psi.coefficient_matrix()
}

/// Schmidt decomposition `Σ s_i |α_i⟩ ⊗ |β_i⟩`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition<R> {
    pub singular_values: Vec<R>,
    pub lambdas: Vec<R>,
    pub left: Vec<Vec<Complex<R>>>,
    pub right: Vec<Vec<Complex<R>>>,
}

impl<R: Real> SchmidtDecomposition<R> {
    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    /// Amplitudes of `Σ s_i α_i ⊗ β_i`.
    pub fn reconstruct(&self) -> Vec<Complex<R>> {
        let (da, db) = (self.left.first().map_or(0, Vec::len), self.right.first().map_or(0, Vec::len));
        let mut out = vec![Complex::zero(); da * db];
        for ((s, a), b) in self.singular_values.iter().zip(&self.left).zip(&self.right) {
            for i in 0..da {
                for j in 0..db {
                    out[i * db + j] = out[i * db + j] + a[i] * b[j] * *s;
                }
            }
        }
        out
    }
}

/// Computes the Schmidt decomposition from the Gram matrix of the smaller side.
pub fn schmidt<R: Real>(psi: &PureState<R>) -> SchmidtDecomposition<R> {
    let dims = psi.dims();
    let c = psi.coefficient_matrix();
    let use_left = dims.dim_a() <= dims.dim_b();
    let gram = if use_left { c.mul_unchecked(&c.adjoint()) } else { c.adjoint().mul_unchecked(&c) };
    let e = eigh_unchecked(&gram);
    let lambdas = threshold_spectrum(&e.values);
    let total: R = lambdas.iter().copied().sum();

    let mut out = SchmidtDecomposition {
        singular_values: Vec::with_capacity(lambdas.len()),
        lambdas: Vec::with_capacity(lambdas.len()),
        left: Vec::new(),
        right: Vec::new(),
    };
    for (k, &lam) in lambdas.iter().enumerate() {
        let lam = lam / total;
        let s = lam.sqrt();
        let w = e.vector(k);
        let (alpha, beta) = if use_left {
            // β_k[j] = Σ_i conj(α_k[i]) C_ij / s_k
            let beta: Vec<Complex<R>> = (0..dims.dim_b())
                .map(|j| (0..dims.dim_a()).fold(Complex::zero(), |acc, i| acc + w[i].conj() * c[(i, j)]) / s)
                .collect();
            (w, beta)
        } else {
            let alpha: Vec<Complex<R>> = c.apply(&w).expect("shape").into_iter().map(|z| z / s).collect();
            (alpha, w.into_iter().map(|z| z.conj()).collect())
        };
        out.singular_values.push(s);
        out.lambdas.push(lam);
        out.left.push(alpha);
        out.right.push(beta);
    }
    out
}

/// Drops eigenvalues at or below `RANK_THRESHOLD` times the largest one and
/// clamps the rest to be nonnegative. Output is descending.
pub(crate) fn threshold_spectrum<R: Real>(values: &[R]) -> Vec<R> {
    let top = values.iter().copied().fold(R::zero(), R::max);
    if top <= R::zero() {
        return Vec::new();
    }
    let cut = R::lit(RANK_THRESHOLD) * top;
    values.iter().copied().filter(|&w| w > cut).collect()
}

/// Schmidt weights of raw amplitudes, renormalized to sum to one.
/// Determinant of the 2×2 Gram matrix of the smaller side, `Σ |minor|²`.
fn gram_determinant_2<R: Real>(amps: &[Complex<R>], da: usize, db: usize) -> R {
    let c = |i: usize, j: usize| amps[i * db + j];
    let mut det = R::zero();
    if da == 2 {
        for j in 0..db {
            for k in j + 1..db {
                det = det + (c(0, j) * c(1, k) - c(0, k) * c(1, j)).norm_sqr();
            }
        }
    } else {
        for i in 0..da {
            for k in i + 1..da {
                det = det + (c(i, 0) * c(k, 1) - c(k, 0) * c(i, 1)).norm_sqr();
            }
        }
    }
    det
}

pub(crate) fn schmidt_weights<R: Real>(amps: &[Complex<R>], dims: BipartiteDims) -> Vec<R> {
    let (da, db) = (dims.dim_a(), dims.dim_b());
    let small = da.min(db);
    let mut gram = ComplexMatrix::<R>::zeros(small, small);
    for p in 0..small {
        for q in p..small {
            let mut acc = Complex::zero();
            if da <= db {
                for j in 0..db {
                    acc = acc + amps[p * db + j] * amps[q * db + j].conj();
                }
            } else {
                for i in 0..da {
                    acc = acc + amps[i * db + p].conj() * amps[i * db + q];
                }
            }
            gram[(p, q)] = acc;
            gram[(q, p)] = acc.conj();
        }
    }
    let values = match small {
        1 => vec![gram[(0, 0)].re],
        2 => {
            let (a, c, b) = (gram[(0, 0)].re, gram[(1, 1)].re, gram[(0, 1)].norm());
            let half = R::lit(0.5);
            let top = (a + c) * half + ((a - c) * half).hypot(b);
            // The smaller root as det / top, with the Gram determinant summed
            // over 2×2 minors so it keeps full relative precision.
            let det = gram_determinant_2(amps, da, db);
            vec![top, if top > R::zero() { det / top } else { R::zero() }]
        }
        _ => eigh_unchecked(&gram).values,
    };
    let mut lambdas = threshold_spectrum(&values);
    let total: R = lambdas.iter().copied().sum();
    if total > R::zero() {
        for l in lambdas.iter_mut() {
            *l = *l / total;
        }
    }
    lambdas
}

/// Hermitian, positive semidefinite, unit-trace operator on a bipartite space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<R> {
    matrix: ComplexMatrix<R>,
    dims: BipartiteDims,
}

impl<R: Real> DensityOperator<R> {
    /// Validates Hermiticity (1e-12), positivity (eigenvalues ≥ -1e-10) and
    /// unit trace (1e-10). The stored matrix is the exact Hermitian part.
    pub fn new(matrix: ComplexMatrix<R>, dims: BipartiteDims) -> Result<Self> {
        dims.check_square(&matrix)?;
        let dev = matrix.hermitian_deviation().unwrap_or(R::zero());
        if dev > R::tol(1e-12) {
            return Err(Error::Invariant { invariant: "Hermitian", residual: dev.as_f64() });
        }
        let herm = hermitian_part(&matrix);
        let tr = herm.trace().re;
        if (tr - R::one()).abs() > R::tol(1e-10) {
            return Err(Error::Invariant { invariant: "unit trace", residual: (tr - R::one()).abs().as_f64() });
        }
        let min = eigh_unchecked(&herm).values.last().copied().unwrap_or(R::zero());
        if min < -R::tol(1e-10) {
            return Err(Error::Invariant { invariant: "positive semidefinite", residual: min.as_f64() });
        }
        Ok(Self { matrix: herm, dims })
    }

    /// Divides a nonzero PSD operator by its trace.
    pub fn from_unnormalized(matrix: &ComplexMatrix<R>, dims: BipartiteDims) -> Result<Self> {
        dims.check_square(matrix)?;
        let tr = matrix.trace().re;
        if !(tr > R::zero()) {
            return Err(Error::Invariant { invariant: "positive trace", residual: tr.as_f64() });
        }
        Self::new(hermitian_part(matrix).scale(R::one() / tr), dims)
    }

    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let n = dims.total();
        let w = R::one() / R::from_usize(n).unwrap();
        Self { matrix: ComplexMatrix::identity(n).scale(w), dims }
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|` with weights renormalized to sum to one.
    pub fn mixture(weights: &[R], states: &[PureState<R>]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch("mixture needs one weight per state".into()));
        }
        if weights.iter().any(|&w| w < R::zero()) {
            return Err(Error::InvalidParameter("negative mixture weight".into()));
        }
        let dims = states[0].dims();
        let mut acc = ComplexMatrix::zeros(dims.total(), dims.total());
        for (w, s) in weights.iter().zip(states) {
            if s.dims() != dims {
                return Err(Error::DimensionMismatch("mixture of states with different dims".into()));
            }
            acc = &acc + &s.projector().scale(*w);
        }
        Self::from_unnormalized(&acc, dims)
    }

    /// Convex combination `t·self + (1-t)·other`.
    pub fn blend(&self, other: &Self, t: R) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch("blend of operators with different dims".into()));
        }
        Self::new(&self.matrix.scale(t) + &other.matrix.scale(R::one() - t), self.dims)
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<R> {
        &self.matrix
    }

    #[inline]
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn eigh(&self) -> Eigh<R> {
        eigh_unchecked(&self.matrix)
    }

    /// Eigenvalues with finite-precision negatives clamped to zero.
    pub fn spectrum(&self) -> Vec<R> {
        self.eigh().values.into_iter().map(|w| w.max(R::zero())).collect()
    }

    pub fn rank(&self) -> usize {
        self.eigh().rank(R::lit(RANK_THRESHOLD))
    }

    pub fn purity(&self) -> R {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// The underlying pure state when the operator has rank one.
    pub fn as_pure(&self) -> Option<PureState<R>> {
        let e = self.eigh();
        if e.rank(R::lit(RANK_THRESHOLD)) != 1 {
            return None;
        }
        PureState::normalized(e.vector(0), self.dims).ok()
    }

    pub fn partial_trace(&self, side: Side) -> ComplexMatrix<R> {
        partial_trace(&self.matrix, self.dims, side).expect("dims validated at construction")
    }

    pub fn partial_transpose(&self, side: Side) -> ComplexMatrix<R> {
        partial_transpose(&self.matrix, self.dims, side).expect("dims validated at construction")
    }

    /// Smallest eigenvalue of the partial transpose; negative certifies entanglement.
    pub fn min_partial_transpose_eigenvalue(&self) -> R {
        eigh(&self.partial_transpose(Side::B))
            .map(|e| e.values.last().copied().unwrap_or(R::zero()))
            .unwrap_or(R::zero())
    }
}

pub(crate) fn hermitian_part<R: Real>(m: &ComplexMatrix<R>) -> ComplexMatrix<R> {
    let half = R::lit(0.5);
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn bell_coefficients() {
        let bell = PureState::<f64>::maximally_entangled(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = ComplexMatrix::new(2, 2, vec![c(s), c(0.0), c(0.0), c(s)]).unwrap();
        assert!(reshape_to_coefficient_matrix(&bell).max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn product_coefficients() {
        let psi = PureState::<f64>::basis(0, 1, BipartiteDims::qubits()).unwrap();
        let expect = ComplexMatrix::new(2, 2, vec![c(0.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(psi.coefficient_matrix(), expect);
    }

    #[test]
    fn random_reshape_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi: PureState<f64> = random::pure_state(BipartiteDims::new(3, 4).unwrap(), &mut rng);
        let c = psi.coefficient_matrix();
        assert_eq!((c.rows(), c.cols()), (3, 4));
        assert_eq!(c.as_slice(), psi.amplitudes());
    }

    #[test]
    fn rejects_unnormalized() {
        let r = PureState::<f64>::new(vec![c(1.0), c(1.0), c(0.0), c(0.0)], BipartiteDims::qubits());
        assert!(matches!(r, Err(Error::Invariant { invariant: "unit norm", .. })));
    }

    #[test]
    fn schmidt_of_known_states() {
        let bell = PureState::<f64>::maximally_entangled(2).unwrap().schmidt();
        assert_eq!(bell.rank(), 2);
        assert!(bell.lambdas.iter().all(|l| (l - 0.5).abs() < 1e-15));

        let prod = PureState::<f64>::basis(1, 0, BipartiteDims::qubits()).unwrap().schmidt();
        assert_eq!(prod.lambdas, vec![1.0]);

        let coeff = ComplexMatrix::new(2, 2, vec![c(0.8), c(0.0), c(0.0), c(0.6)]).unwrap();
        let s = PureState::from_coefficients(&coeff).unwrap().schmidt();
        assert!((s.lambdas[0] - 0.64).abs() < 1e-15);
        assert!((s.lambdas[1] - 0.36).abs() < 1e-15);
    }

    #[test]
    fn schmidt_reconstructs_in_both_orientations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (da, db) in [(2, 3), (3, 2), (4, 4), (1, 3)] {
            let psi: PureState<f64> = random::pure_state(BipartiteDims::new(da, db).unwrap(), &mut rng);
            let s = psi.schmidt();
            let back = s.reconstruct();
            let err = vec_norm(&back.iter().zip(psi.amplitudes()).map(|(a, b)| a - b).collect::<Vec<_>>());
            assert!(err < 1e-10, "({da},{db}) err {err}");
            assert!((s.lambdas.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn density_invariants_enforced() {
        let d = BipartiteDims::qubits();
        let mut m = ComplexMatrix::<f64>::identity(4).scale(0.25);
        m[(0, 1)] = c(0.1);
        assert!(matches!(DensityOperator::new(m, d), Err(Error::Invariant { invariant: "Hermitian", .. })));
        let m = ComplexMatrix::<f64>::identity(4).scale(0.3);
        assert!(matches!(DensityOperator::new(m, d), Err(Error::Invariant { invariant: "unit trace", .. })));
        let m = ComplexMatrix::from_real_diagonal(&[0.6, 0.6, -0.1, -0.1]);
        assert!(matches!(DensityOperator::new(m, d), Err(Error::Invariant { invariant: "positive semidefinite", .. })));
        let m = ComplexMatrix::<f64>::identity(3).scale(1.0 / 3.0);
        assert!(matches!(DensityOperator::new(m, d), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn as_pure_recovers_state_up_to_phase() {
        let psi = PureState::<f64>::maximally_entangled(2).unwrap();
        let back = psi.to_density().as_pure().unwrap();
        assert!((psi.inner(&back).norm() - 1.0).abs() < 1e-12);
        assert!(DensityOperator::<f64>::maximally_mixed(BipartiteDims::qubits()).as_pure().is_none());
    }

    #[test]
    fn bell_partial_transpose_has_negative_half() {
        let rho = PureState::<f64>::maximally_entangled(2).unwrap().to_density();
        assert!((rho.min_partial_transpose_eigenvalue() + 0.5).abs() < 1e-14);
    }
}
