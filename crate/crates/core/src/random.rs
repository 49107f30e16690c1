//! Random sampling of states, unitaries and isometries.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{BipartiteDims, ComplexMatrix, DensityOperator, PureState};
use crate::locc::{LoccNode, Party};
use crate::scalar::Real;

/// Complex Gaussian with unit variance per real component.
pub fn complex_normal<R: Real, G: Rng + ?Sized>(rng: &mut G) -> Complex<R> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(R::lit(re), R::lit(im))
}

pub fn ginibre<R: Real, G: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut G) -> ComplexMatrix<R> {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-random unit vector of length `n`.
pub fn unit_vector<R: Real, G: Rng + ?Sized>(n: usize, rng: &mut G) -> Vec<Complex<R>> {
    loop {
        let v: Vec<Complex<R>> = (0..n).map(|_| complex_normal(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt();
        if norm > R::lit(1e-6) {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn pure_state<R: Real, G: Rng + ?Sized>(dims: BipartiteDims, rng: &mut G) -> PureState<R> {
    PureState::normalized(unit_vector(dims.total(), rng), dims).expect("unit vector")
}

pub fn product_state<R: Real, G: Rng + ?Sized>(dims: BipartiteDims, rng: &mut G) -> PureState<R> {
    let a = unit_vector::<R, _>(dims.dim_a(), rng);
    let b = unit_vector::<R, _>(dims.dim_b(), rng);
    PureState::product(&a, &b).expect("product of unit vectors")
}

/// `m × r` matrix with orthonormal columns (Haar on the Stiefel manifold).
pub fn isometry<R: Real, G: Rng + ?Sized>(m: usize, r: usize, rng: &mut G) -> ComplexMatrix<R> {
    loop {
        if let Ok(q) = ginibre::<R, _>(m, r, rng).orthonormalize_columns() {
            return q;
        }
    }
}

pub fn unitary<R: Real, G: Rng + ?Sized>(n: usize, rng: &mut G) -> ComplexMatrix<R> {
    isometry(n, n, rng)
}

/// Density operator `G G† / Tr(G G†)` with a `total × rank` Ginibre factor;
/// `rank = total` samples the Hilbert-Schmidt ensemble.
pub fn density<R: Real, G: Rng + ?Sized>(dims: BipartiteDims, rank: usize, rng: &mut G) -> DensityOperator<R> {
    let g = ginibre::<R, _>(dims.total(), rank.max(1), rng);
    DensityOperator::from_unnormalized(&(&g * &g.adjoint()), dims).expect("Ginibre product is PSD")
}

/// Mixture of `count` random product states with random weights.
pub fn separable_mixture<R: Real, G: Rng + ?Sized>(
    dims: BipartiteDims,
    count: usize,
    rng: &mut G,
) -> DensityOperator<R> {
    let states: Vec<PureState<R>> = (0..count).map(|_| product_state(dims, rng)).collect();
    let weights: Vec<R> = (0..count).map(|_| R::lit(rng.gen_range(0.05..1.0))).collect();
    DensityOperator::mixture(&weights, &states).expect("valid mixture")
}

/// Complete Kraus set `{K_y}` of `outcomes` operators `d_out × d_in`, cut
/// from the row blocks of a random isometry.
pub fn instrument<R: Real, G: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    outcomes: usize,
    rng: &mut G,
) -> Vec<ComplexMatrix<R>> {
    let v = isometry::<R, _>(outcomes * d_out, d_in, rng);
    (0..outcomes).map(|y| ComplexMatrix::from_fn(d_out, d_in, |i, j| v[(y * d_out + i, j)])).collect()
}

/// Valid LOCC tree with exactly `rounds` instrument levels on every branch.
/// Each node picks a random party and 1 to `max_outcomes` outcomes; local
/// dimensions are preserved.
pub fn locc_tree<R: Real, G: Rng + ?Sized>(
    dims: BipartiteDims,
    rounds: usize,
    max_outcomes: usize,
    rng: &mut G,
) -> LoccNode<R> {
    if rounds == 0 {
        return LoccNode::leaf();
    }
    let party = if rng.gen_bool(0.5) { Party::Alice } else { Party::Bob };
    let d = dims.dim(party.side());
    let outcomes = rng.gen_range(1..=max_outcomes.max(1));
    let kraus = instrument(d, d, outcomes, rng);
    let children = (0..outcomes).map(|_| locc_tree(dims, rounds - 1, max_outcomes, rng)).collect();
    LoccNode::with_children(party, kraus, children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_satisfy_their_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u: ComplexMatrix<f64> = unitary(4, &mut rng);
        assert!((&u.adjoint() * &u).is_identity(1e-12));
        let v: ComplexMatrix<f64> = isometry(6, 2, &mut rng);
        assert!((&v.adjoint() * &v).is_identity(1e-12));
        let rho: DensityOperator<f64> = density(BipartiteDims::new(2, 3).unwrap(), 6, &mut rng);
        assert_eq!(rho.rank(), 6);
        let sep: DensityOperator<f64> = separable_mixture(BipartiteDims::qubits(), 4, &mut rng);
        assert!(sep.min_partial_transpose_eigenvalue() > -1e-12);
        let tree: LoccNode<f64> = locc_tree(BipartiteDims::qubits(), 2, 3, &mut rng);
        assert_eq!(tree.depth(), 2);
        assert!(crate::locc::validate_tree(&tree, BipartiteDims::qubits()).is_valid());
    }
}
