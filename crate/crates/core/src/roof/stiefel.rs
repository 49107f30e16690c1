//! Descent on the complex Stiefel manifold `{V ∈ ℂ^{m×r} : V†V = I}`.
//!
//! Riemannian conjugate gradient (Polak-Ribière+) with the embedded metric
//! `Re Tr(A†B)`, tangent projection `Z − V herm(V†Z)`, QR retraction and
//! Armijo backtracking. The objective is a sum over rows of `V`, so a central
//! difference in one entry only re-evaluates that row's term.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;

use super::ensemble::{EigenBasis, DROP_WEIGHT};
use super::PureObjective;
use crate::linalg::ComplexMatrix;
use crate::random;
use crate::scalar::Real;

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
const STALL_PERTURBATION: f64 = 1e-10;
const PROGRESS_WINDOW: usize = 20;

pub(crate) struct Landscape<'a, R: Real> {
    pub basis: &'a EigenBasis<R>,
    pub objective: &'a PureObjective<R>,
    /// `1` to minimize, `-1` to maximize.
    pub sign: R,
    pub fd_step: R,
    /// Use `‖χ‖² μ(χ/‖χ‖)²` per member, a smooth surrogate for measures
    /// with a cusp at product states.
    pub squared: bool,
}

pub(crate) struct Descent<R> {
    pub point: ComplexMatrix<R>,
    /// Objective values in the caller's sign convention, one per accepted iterate.
    pub trace: Vec<R>,
    pub converged: bool,
    pub perturbations: usize,
}

impl<'a, R: Real> Landscape<'a, R> {
    /// `‖χ‖² μ(χ/‖χ‖)` with the drop rule for vanishing rows.
    fn term(&self, chi: &[Complex<R>]) -> R {
        let n2: R = chi.iter().map(|z| z.norm_sqr()).sum();
        if n2 < R::lit(DROP_WEIGHT) {
            return R::zero();
        }
        let f = self.objective.eval_raw(chi, self.basis.dims);
        if self.squared {
            n2 * f * f
        } else {
            n2 * f
        }
    }

    /// Signed objective (always minimized).
    pub fn value(&self, v: &ComplexMatrix<R>) -> R {
        let chi = self.basis.mix(v);
        let total: R = (0..chi.rows()).map(|i| self.term(chi.row(i))).sum();
        self.sign * total
    }

    /// Euclidean gradient `∂/∂Re + i ∂/∂Im` of the signed objective.
    fn euclidean_gradient(&self, v: &ComplexMatrix<R>) -> ComplexMatrix<R> {
        let chi = self.basis.mix(v);
        let (m, r) = (v.rows(), v.cols());
        let h = self.fd_step;
        let scale = self.sign / (h + h);
        let mut grad = ComplexMatrix::zeros(m, r);
        let mut work = vec![Complex::zero(); chi.cols()];
        for i in 0..m {
            let row = chi.row(i);
            for j in 0..r {
                let b = self.basis.scaled.row(j);
                let mut partial = |delta: Complex<R>| {
                    for ((w, x), y) in work.iter_mut().zip(row).zip(b) {
                        *w = x + y * delta;
                    }
                    self.term(&work)
                };
                let re = partial(Complex::new(h, R::zero())) - partial(Complex::new(-h, R::zero()));
                let im = partial(Complex::new(R::zero(), h)) - partial(Complex::new(R::zero(), -h));
                grad[(i, j)] = Complex::new(re * scale, im * scale);
            }
        }
        grad
    }

    pub fn descend<G: Rng + ?Sized>(
        &self,
        start: ComplexMatrix<R>,
        max_iters: usize,
        tol: R,
        rng: &mut G,
    ) -> Descent<R> {
        let mut v = start;
        let mut f = self.value(&v);
        let mut trace = vec![self.sign * f];
        let mut grad = project(&v, &self.euclidean_gradient(&v));
        let mut dir = grad.scale(-R::one());
        let mut step = R::one();
        let mut perturbations = 0;
        let mut stalls = 0;
        let mut converged = false;

        for _ in 0..max_iters {
            let gnorm2 = inner(&grad, &grad);
            if gnorm2.sqrt() <= R::epsilon() {
                converged = true;
                break;
            }
            let mut slope = inner(&grad, &dir);
            if !(slope < R::zero()) {
                dir = grad.scale(-R::one());
                slope = -gnorm2;
            }

            let mut t = step;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let candidate = retract(&v, &dir, t);
                if let Some(candidate) = candidate {
                    let fc = self.value(&candidate);
                    if fc <= f + R::lit(ARMIJO) * t * slope {
                        accepted = Some((candidate, fc));
                        break;
                    }
                }
                t = t * R::lit(0.5);
            }

            match accepted {
                Some((next, fn_)) => {
                    stalls = 0;
                    step = (t * R::lit(2.0)).min(R::lit(1e3));
                    let new_grad = project(&next, &self.euclidean_gradient(&next));
                    let moved = project(&next, &grad);
                    let beta = (inner(&new_grad, &(&new_grad - &moved)) / gnorm2).max(R::zero());
                    let carried = project(&next, &dir);
                    dir = &new_grad.scale(-R::one()) + &carried.scale(beta);
                    v = next;
                    f = fn_;
                    grad = new_grad;
                }
                None => {
                    stalls += 1;
                    perturbations += 1;
                    let noise = project(&v, &random::ginibre::<R, _>(v.rows(), v.cols(), rng));
                    if let Some(p) = retract(&v, &noise, R::lit(STALL_PERTURBATION)) {
                        let fp = self.value(&p);
                        if fp <= f {
                            v = p;
                            f = fp;
                        }
                    }
                    grad = project(&v, &self.euclidean_gradient(&v));
                    dir = grad.scale(-R::one());
                    step = R::one();
                    if stalls >= 2 {
                        converged = true;
                        trace.push(self.sign * f);
                        break;
                    }
                }
            }
            trace.push(self.sign * f);
            let k = trace.len() - 1;
            if k >= PROGRESS_WINDOW {
                let gain = self.sign * (trace[k - PROGRESS_WINDOW] - trace[k]);
                if gain < tol {
                    converged = true;
                    break;
                }
            }
        }
        Descent { point: v, trace, converged, perturbations }
    }
}

/// Real inner product `Re Tr(A†B)`.
fn inner<R: Real>(a: &ComplexMatrix<R>, b: &ComplexMatrix<R>) -> R {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Tangent projection `Z − V herm(V†Z)`.
fn project<R: Real>(v: &ComplexMatrix<R>, z: &ComplexMatrix<R>) -> ComplexMatrix<R> {
    let vz = v.adjoint().mul_unchecked(z);
    let herm = (&vz + &vz.adjoint()).scale(R::lit(0.5));
    z - &v.mul_unchecked(&herm)
}

/// QR retraction of `V + tZ`.
fn retract<R: Real>(v: &ComplexMatrix<R>, z: &ComplexMatrix<R>, t: R) -> Option<ComplexMatrix<R>> {
    (v + &z.scale(t)).orthonormalize_columns().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{BipartiteDims, DensityOperator};
    use crate::measures::MeasureSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projected_gradient_is_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: ComplexMatrix<f64> = random::isometry(6, 3, &mut rng);
        let z = random::ginibre(6, 3, &mut rng);
        let t = project(&v, &z);
        let vt = v.adjoint().mul_unchecked(&t);
        // V†T must be skew-Hermitian.
        assert!((&vt + &vt.adjoint()).max_abs() < 1e-12);
    }

    #[test]
    fn finite_difference_gradient_matches_directional_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho: DensityOperator<f64> = random::density(BipartiteDims::qubits(), 4, &mut rng);
        let basis = EigenBasis::new(&rho);
        let objective = PureObjective::Measure(MeasureSpec::EntanglementNumber);
        let land = Landscape { basis: &basis, objective: &objective, sign: 1.0, fd_step: 1e-6, squared: false };
        let v = random::isometry(8, 4, &mut rng);
        let g = land.euclidean_gradient(&v);
        let dz: ComplexMatrix<f64> = random::ginibre(8, 4, &mut rng);
        let h = 1e-6;
        let fd = (land.value(&(&v + &dz.scale(h))) - land.value(&(&v - &dz.scale(h)))) / (2.0 * h);
        assert!((fd - inner(&g, &dz)).abs() < 1e-6, "{fd} vs {}", inner(&g, &dz));
    }

    #[test]
    fn descent_trace_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho: DensityOperator<f64> = random::density(BipartiteDims::qubits(), 4, &mut rng);
        let basis = EigenBasis::new(&rho);
        let objective = PureObjective::Measure(MeasureSpec::EntanglementNumber);
        for sign in [1.0, -1.0] {
            let land = Landscape { basis: &basis, objective: &objective, sign, fd_step: 1e-6, squared: false };
            let start = random::isometry(16, 4, &mut rng);
            let out = land.descend(start, 300, 1e-12, &mut rng);
            for w in out.trace.windows(2) {
                assert!(sign * (w[1] - w[0]) <= 0.0);
            }
        }
    }
}
