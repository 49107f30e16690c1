//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigh<R> {
    pub values: Vec<R>,
    pub vectors: ComplexMatrix<R>,
}

impl<R: Real> Eigh<R> {
    pub fn vector(&self, i: usize) -> Vec<Complex<R>> {
        self.vectors.column_vec(i)
    }

    /// Reassembles `Σ w_i v_i v_i†`.
    pub fn reconstruct(&self) -> ComplexMatrix<R> {
        let n = self.values.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + self.vectors[(i, k)] * self.vectors[(j, k)].conj() * self.values[k]
            })
        })
    }

    /// Number of eigenvalues above `rel` times the largest one.
    pub fn rank(&self, rel: R) -> usize {
        let top = self.values.first().copied().unwrap_or(R::zero()).max(R::zero());
        if top <= R::zero() {
            return 0;
        }
        self.values.iter().filter(|&&w| w > rel * top).count()
    }
}

/// Decomposes a Hermitian matrix. Input must be Hermitian within 1e-10
/// (relative to its largest entry when that exceeds one).
pub fn eigh<R: Real>(m: &ComplexMatrix<R>) -> Result<Eigh<R>> {
    let dev = m
        .hermitian_deviation()
        .ok_or_else(|| Error::DimensionMismatch(format!("eigh of non-square {}x{}", m.rows(), m.cols())))?;
    let scale = m.max_abs().max(R::one());
    if dev > R::tol(1e-10) * scale {
        return Err(Error::NotHermitian(dev.as_f64()));
    }
    Ok(eigh_unchecked(m))
}

pub(crate) fn eigh_unchecked<R: Real>(m: &ComplexMatrix<R>) -> Eigh<R> {
    let n = m.rows();
    // Hermitian part; the strict lower triangle is mirrored from the upper one.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(m[(i, i)].re, R::zero())
        } else if i < j {
            (m[(i, j)] + m[(j, i)].conj()) * R::lit(0.5)
        } else {
            (m[(j, i)] + m[(i, j)].conj()).conj() * R::lit(0.5)
        }
    });
    let mut v = ComplexMatrix::<R>::identity(n);

    let total: R = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let stop = total * R::epsilon() * R::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut off = R::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off <= stop || off == R::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<(R, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    // Stable sort keeps routine order among ties.
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let values = pairs.iter().map(|&(w, _)| w).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, pairs[k].1)]);
    Eigh { values, vectors }
}

fn rotate<R: Real>(a: &mut ComplexMatrix<R>, v: &mut ComplexMatrix<R>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == R::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;

    let theta = (aqq - app) / (R::lit(2.0) * mag);
    let t = if theta >= R::zero() {
        R::one() / (theta + (theta * theta + R::one()).sqrt())
    } else {
        -R::one() / (-theta + (theta * theta + R::one()).sqrt())
    };
    let c = R::one() / (t * t + R::one()).sqrt();
    let s = t * c;

    // U = diag(1, conj(phase)) · [[c, s], [-s, c]]
    let u_pp = Complex::new(c, R::zero());
    let u_pq = Complex::new(s, R::zero());
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, R::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, R::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Eigenvalues only, descending.
pub fn eigvalsh<R: Real>(m: &ComplexMatrix<R>) -> Result<Vec<R>> {
    eigh(m).map(|e| e.values)
}

/// Trace norm `Σ|w_i|` of a Hermitian matrix.
pub fn trace_norm_hermitian<R: Real>(m: &ComplexMatrix<R>) -> Result<R> {
    Ok(eigvalsh(m)?.into_iter().map(R::abs).sum())
}

/// Projector onto the span of the top-`k` eigenvectors.
pub(crate) fn top_eigen_projector<R: Real>(m: &ComplexMatrix<R>, k: usize) -> ComplexMatrix<R> {
    let e = eigh_unchecked(m);
    let n = m.rows();
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..k).fold(Complex::zero(), |acc, c| acc + e.vectors[(i, c)] * e.vectors[(j, c)].conj())
    })
}

/// Positive square root of a positive semidefinite Hermitian matrix; tiny
/// negative eigenvalues are clamped to zero.
pub fn psd_sqrt<R: Real>(m: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    let e = eigh(m)?;
    let roots: Vec<R> = e.values.iter().map(|w| w.max(R::zero()).sqrt()).collect();
    Ok(Eigh { values: roots, vectors: e.vectors }.reconstruct())
}

impl<R: Real> ComplexMatrix<R> {
    pub fn eigh(&self) -> Result<Eigh<R>> {
        eigh(self)
    }

    pub fn is_identity(&self, tol: R) -> bool {
        self.is_square() && self.max_abs_diff(&Self::identity(self.rows())) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix<f64> {
        let g = ComplexMatrix::from_fn(n, n, |_, _| Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        &g + &g.adjoint()
    }

    #[test]
    fn identity_spectrum() {
        let e = eigh(&ComplexMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_sorted_descending() {
        let e = eigh(&ComplexMatrix::from_real_diagonal(&[0.3, 0.7])).unwrap();
        assert_eq!(e.values, vec![0.7, 0.3]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::<f64>::identity(2);
        m[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian(_))));
        assert!(eigh(&ComplexMatrix::<f64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn random_hermitian_reconstructs_and_satisfies_eigen_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            let h = random_hermitian(n, &mut rng);
            let e = eigh(&h).unwrap();
            assert!(e.reconstruct().max_abs_diff(&h) < 1e-9);
            for i in 0..n {
                let v = e.vector(i);
                let hv = h.apply(&v).unwrap();
                for (a, b) in hv.iter().zip(&v) {
                    assert!((a - b * e.values[i]).norm() < 1e-9);
                }
            }
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!(gram.is_identity(1e-12));
        }
    }

    #[test]
    fn f32_decomposition_is_usable() {
        let m = ComplexMatrix::<f32>::new(
            2,
            2,
            vec![Complex::new(2.0, 0.0), Complex::new(0.0, 1.0), Complex::new(0.0, -1.0), Complex::new(2.0, 0.0)],
        )
        .unwrap();
        let e = eigh(&m).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-5);
        assert!((e.values[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn square_root_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_hermitian(4, &mut rng);
        let psd = &g * &g.adjoint();
        let root = psd_sqrt(&psd).unwrap();
        assert!((&root * &root).max_abs_diff(&psd) < 1e-10);
    }
}
