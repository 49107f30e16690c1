//! Pure-state entanglement measures.
//!
//! Every measure is a function of the Schmidt weights `λ_i` (squared Schmidt
//! coefficients). Several measures also have a second route that never forms
//! the Schmidt decomposition; those are exported for cross-validation.

use num_complex::Complex;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh_unchecked, partial_transpose, threshold_spectrum, top_eigen_projector, trace_norm_hermitian, BipartiteDims,
    ComplexMatrix, PureState, Side,
};
use crate::random;
use crate::scalar::Real;

/// Logarithm base for entropies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    fn ln_base<R: Real>(self) -> R {
        match self {
            LogBase::Two => R::LN_2(),
            LogBase::E => R::one(),
        }
    }
}

/// Selects a pure-state measure and carries its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    EntanglementNumber,
    PNumber { p: f64 },
    EntanglementEntropy { base: LogBase },
    Negativity,
    Concurrence { k: usize },
    GeometricMeasure { ranks: Vec<usize> },
}

/// Restarts used by the alternating maximization of the geometric measure.
pub const GEOMETRIC_RESTARTS: usize = 16;
const GEOMETRIC_MAX_SWEEPS: usize = 1000;
const GEOMETRIC_SEED: u64 = 0x6765_6f6d;

impl MeasureSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MeasureSpec::EntanglementNumber => "entanglement-number",
            MeasureSpec::PNumber { .. } => "p-number",
            MeasureSpec::EntanglementEntropy { .. } => "entropy",
            MeasureSpec::Negativity => "negativity",
            MeasureSpec::Concurrence { .. } => "concurrence",
            MeasureSpec::GeometricMeasure { .. } => "geometric",
        }
    }

    /// Checks parameter ranges against the system dimensions.
    pub fn validate(&self, dims: BipartiteDims) -> Result<()> {
        match self {
            MeasureSpec::PNumber { p } => check_p(*p),
            MeasureSpec::Negativity if dims.min_dim() < 2 => {
                Err(Error::DegenerateDimension("negativity needs min(dim_a, dim_b) >= 2".into()))
            }
            MeasureSpec::Concurrence { k } if *k == 0 || *k > dims.min_dim() => {
                Err(Error::InvalidParameter(format!("concurrence order k = {k} outside [1, {}]", dims.min_dim())))
            }
            MeasureSpec::GeometricMeasure { ranks } => check_ranks(ranks, dims).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// `true` for measures that cannot decrease under LOCC (the geometric
    /// measure); these are extended by the concave roof.
    pub fn is_increasing(&self) -> bool {
        matches!(self, MeasureSpec::GeometricMeasure { .. })
    }

    /// `sup_ψ μ(ψ)` over pure states of the given dimensions.
    pub fn supremum<R: Real>(&self, dims: BipartiteDims) -> R {
        let d = R::from_usize(dims.min_dim()).unwrap();
        match self {
            MeasureSpec::EntanglementNumber => (R::one() - R::one() / d).sqrt(),
            MeasureSpec::PNumber { p } => {
                let p = R::lit(*p);
                (R::one() - d.powf(R::one() - p)).max(R::zero()).powf(R::one() / p)
            }
            MeasureSpec::EntanglementEntropy { base } => d.ln() / base.ln_base::<R>(),
            MeasureSpec::Negativity | MeasureSpec::Concurrence { .. } | MeasureSpec::GeometricMeasure { .. } => {
                R::one()
            }
        }
    }

    /// Evaluates the measure on a pure state. The geometric measure uses
    /// alternating maximization; all others use Schmidt weights.
    pub fn evaluate<R: Real>(&self, psi: &PureState<R>) -> Result<R> {
        self.validate(psi.dims())?;
        match self {
            MeasureSpec::GeometricMeasure { ranks } => geometric_measure_pure(psi, ranks),
            _ => Ok(self.from_weights(&psi.schmidt_weights(), psi.dims())),
        }
    }

    /// Evaluates from normalized, thresholded, descending Schmidt weights.
    /// Parameters must already have been validated.
    pub fn from_weights<R: Real>(&self, lambdas: &[R], dims: BipartiteDims) -> R {
        match self {
            // 1 − Σλ² = 2 e₂(λ) for normalized weights, without cancellation.
            MeasureSpec::EntanglementNumber => (R::lit(2.0) * elementary_symmetric(lambdas, 2)).max(R::zero()).sqrt(),
            MeasureSpec::PNumber { p } => {
                let p = R::lit(*p);
                power_deficit_weights(lambdas, p).max(R::zero()).powf(R::one() / p)
            }
            MeasureSpec::EntanglementEntropy { base } => shannon(lambdas, *base),
            MeasureSpec::Negativity => {
                let d = R::from_usize(dims.min_dim()).unwrap();
                let root_sum: R = lambdas.iter().map(|l| l.sqrt()).sum();
                ((root_sum * root_sum - R::one()) / (d - R::one())).max(R::zero())
            }
            MeasureSpec::Concurrence { k } => concurrence_weights(lambdas, *k, dims.min_dim()),
            MeasureSpec::GeometricMeasure { ranks } => {
                let k = ranks[0].min(ranks[1]);
                lambdas.iter().take(k).copied().sum::<R>().min(R::one())
            }
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p = {p} must satisfy 1 < p < inf")));
    }
    Ok(())
}

fn check_ranks(ranks: &[usize], dims: BipartiteDims) -> Result<(usize, usize)> {
    if ranks.len() != 2 {
        return Err(Error::InvalidParameter(format!("expected 2 projector ranks, got {}", ranks.len())));
    }
    for (k, side) in ranks.iter().zip([Side::A, Side::B]) {
        if *k == 0 || *k > dims.dim(side) {
            return Err(Error::InvalidParameter(format!(
                "rank {k} outside [1, {}] for factor {side:?}",
                dims.dim(side)
            )));
        }
    }
    Ok((ranks[0], ranks[1]))
}

fn shannon<R: Real>(lambdas: &[R], base: LogBase) -> R {
    let h: R = lambdas.iter().filter(|&&l| l > R::zero()).map(|&l| -l * l.ln()).sum();
    h.max(R::zero()) / base.ln_base::<R>()
}

fn power_deficit_weights<R: Real>(lambdas: &[R], p: R) -> R {
    R::one() - lambdas.iter().filter(|&&l| l > R::zero()).map(|&l| l.powf(p)).sum::<R>()
}

/// `k`-th elementary symmetric polynomial.
pub fn elementary_symmetric<R: Real>(xs: &[R], k: usize) -> R {
    if k > xs.len() {
        return R::zero();
    }
    let mut e = vec![R::zero(); k + 1];
    e[0] = R::one();
    for &x in xs {
        for j in (1..=k).rev() {
            e[j] = e[j] + x * e[j - 1];
        }
    }
    e[k]
}

fn concurrence_weights<R: Real>(lambdas: &[R], k: usize, d: usize) -> R {
    let mut padded = lambdas.to_vec();
    padded.resize(d, R::zero());
    let uniform = vec![R::one() / R::from_usize(d).unwrap(); d];
    let ratio = elementary_symmetric(&padded, k) / elementary_symmetric(&uniform, k);
    ratio.max(R::zero()).min(R::one()).powf(R::one() / R::from_usize(k).unwrap())
}

/// `Tr(|C|⁴) = Tr((C†C)²)` for a coefficient matrix.
pub fn trace_abs_fourth<R: Real>(c: &ComplexMatrix<R>) -> R {
    let g = c.adjoint().mul_unchecked(c);
    g.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// `Σ_{r,s} |⟨c_r, c_s⟩|²` over the columns of `c`.
pub fn column_overlap_sum<R: Real>(c: &ComplexMatrix<R>) -> R {
    let cols: Vec<Vec<Complex<R>>> = (0..c.cols()).map(|j| c.column_vec(j)).collect();
    let mut total = R::zero();
    for r in &cols {
        for s in &cols {
            let ip = r.iter().zip(s).fold(Complex::zero(), |acc: Complex<R>, (a, b)| acc + a.conj() * b);
            total = total + ip.norm_sqr();
        }
    }
    total
}

/// `‖C‖_F⁴ − Tr|C|⁴`, computed as twice the sum of squared 2×2 minors of
/// `C` so that it carries no cancellation error near zero.
pub fn fourth_power_deficit<R: Real>(c: &ComplexMatrix<R>) -> R {
    let mut total = R::zero();
    for i in 0..c.rows() {
        for j in i + 1..c.rows() {
            for r in 0..c.cols() {
                for s in r + 1..c.cols() {
                    total = total + (c[(i, r)] * c[(j, s)] - c[(i, s)] * c[(j, r)]).norm_sqr();
                }
            }
        }
    }
    R::lit(2.0) * total
}

/// Entanglement number `√(1 − Tr|C|⁴)` from the coefficient matrix.
pub fn entanglement_number_pure<R: Real>(psi: &PureState<R>) -> R {
    fourth_power_deficit(&psi.coefficient_matrix()).sqrt()
}

/// Entanglement number `√(1 − Σλ²)` from Schmidt weights.
pub fn entanglement_number_schmidt<R: Real>(psi: &PureState<R>) -> R {
    MeasureSpec::EntanglementNumber.from_weights(&psi.schmidt().lambdas, psi.dims())
}

/// `√(1 − Tr ρ²)` for a density matrix, with `(Tr ρ)² − Tr ρ²` summed over
/// 2×2 principal minors.
pub fn linear_entropy_root<R: Real>(rho: &ComplexMatrix<R>) -> R {
    let n = rho.rows();
    let mut total = R::zero();
    for i in 0..n {
        for j in i + 1..n {
            total = total + rho[(i, i)].re * rho[(j, j)].re - rho[(i, j)].norm_sqr();
        }
    }
    (R::lit(2.0) * total).max(R::zero()).sqrt()
}

/// Entanglement number through the smaller reduced state.
pub fn entanglement_number_reduced<R: Real>(psi: &PureState<R>) -> R {
    let d = psi.dims();
    let traced = if d.dim_a() >= d.dim_b() { Side::A } else { Side::B };
    linear_entropy_root(&psi.reduced(traced))
}

/// `μ_p(ψ) = (1 − Σλ^p)^{1/p}` for `p > 1`.
pub fn p_number_pure<R: Real>(psi: &PureState<R>, p: f64) -> Result<R> {
    check_p(p)?;
    Ok(MeasureSpec::PNumber { p }.from_weights(&psi.schmidt_weights(), psi.dims()))
}

/// `ν_p(ψ) = 1 − Σλ^p` for `p > 1`; equals `μ_p^p`.
pub fn cirone_nu_pure<R: Real>(psi: &PureState<R>, p: f64) -> Result<R> {
    check_p(p)?;
    Ok(power_deficit(psi, p))
}

/// `1 − Σλ^p` for any `p > 0`, the analytic continuation of `μ_p^p` through
/// `p = 1` (where it vanishes).
pub fn power_deficit<R: Real>(psi: &PureState<R>, p: f64) -> R {
    power_deficit_weights(&psi.schmidt_weights(), R::lit(p))
}

/// `S(ψ) = −Σ λ log λ`.
pub fn entanglement_entropy_pure<R: Real>(psi: &PureState<R>, base: LogBase) -> R {
    shannon(&psi.schmidt_weights(), base)
}

/// Negativity `((Σ√λ)² − 1)/(d − 1)`; needs `d ≥ 2`.
pub fn negativity_pure<R: Real>(psi: &PureState<R>) -> Result<R> {
    MeasureSpec::Negativity.evaluate(psi)
}

/// Negativity from the trace norm of the partially transposed projector.
pub fn negativity_pure_via_transpose<R: Real>(psi: &PureState<R>) -> Result<R> {
    MeasureSpec::Negativity.validate(psi.dims())?;
    let pt = partial_transpose(&psi.projector(), psi.dims(), Side::B)?;
    let d = R::from_usize(psi.dims().min_dim()).unwrap();
    Ok((trace_norm_hermitian(&pt)? - R::one()) / (d - R::one()))
}

/// Concurrence monotone `C_k`, `1 ≤ k ≤ d`.
pub fn concurrence_pure<R: Real>(psi: &PureState<R>, k: usize) -> Result<R> {
    MeasureSpec::Concurrence { k }.evaluate(psi)
}

/// Closed form of the bipartite geometric measure: the sum of the largest
/// `min(k₁, k₂)` Schmidt weights.
pub fn geometric_measure_schmidt<R: Real>(psi: &PureState<R>, ranks: &[usize]) -> Result<R> {
    check_ranks(ranks, psi.dims())?;
    Ok(MeasureSpec::GeometricMeasure { ranks: ranks.to_vec() }.from_weights(&psi.schmidt_weights(), psi.dims()))
}

/// `sup ‖(P ⊗ Q)ψ‖²` over rank-`k₁` and rank-`k₂` orthogonal projectors, by
/// alternating maximization from several seeded random starts. The value is
/// attained by explicit projectors, so it never exceeds the true supremum.
pub fn geometric_measure_pure<R: Real>(psi: &PureState<R>, ranks: &[usize]) -> Result<R> {
    let (k1, k2) = check_ranks(ranks, psi.dims())?;
    let c = psi.coefficient_matrix();
    let c_adj = c.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(GEOMETRIC_SEED);
    let mut best = R::zero();
    for _ in 0..GEOMETRIC_RESTARTS {
        let w: ComplexMatrix<R> = random::isometry(c.cols(), k2, &mut rng);
        // Q̄ = conj(W W†); the objective is ‖P C Q̄‖²_F.
        let mut q_bar = w.mul_unchecked(&w.adjoint()).conj();
        let mut prev = R::neg_infinity();
        let mut value = R::zero();
        for _ in 0..GEOMETRIC_MAX_SWEEPS {
            let p = top_eigen_projector(&c.mul_unchecked(&q_bar).mul_unchecked(&c_adj), k1);
            q_bar = top_eigen_projector(&c_adj.mul_unchecked(&p).mul_unchecked(&c), k2);
            let projected = p.mul_unchecked(&c).mul_unchecked(&q_bar);
            value = projected.as_slice().iter().map(|z| z.norm_sqr()).sum();
            if value - prev <= R::tol(1e-15) {
                break;
            }
            prev = value;
        }
        best = best.max(value);
    }
    Ok(best.min(R::one()))
}

/// Von Neumann entropy `−Tr σ log σ` of a density matrix.
pub fn von_neumann_entropy<R: Real>(sigma: &ComplexMatrix<R>, base: LogBase) -> Result<R> {
    let values = crate::linalg::eigvalsh(sigma)?;
    Ok(shannon(&threshold_spectrum(&values), base))
}

pub(crate) fn von_neumann_entropy_unchecked<R: Real>(sigma: &ComplexMatrix<R>, base: LogBase) -> R {
    shannon(&threshold_spectrum(&eigh_unchecked(sigma).values), base)
}
