//! Independent two-qubit oracles built on nalgebra's eigensolver.
#![allow(dead_code)]

use entroof::{Density, State};
use nalgebra::{Complex, DMatrix};

pub type NMat = DMatrix<Complex<f64>>;

pub fn to_nalgebra(rho: &Density) -> NMat {
    let m = rho.matrix();
    NMat::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m[(i, j)];
        Complex::new(z.re, z.im)
    })
}

/// Square roots of the eigenvalues of `ρ ρ̃`, descending, where
/// `ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`. They are computed as the singular
/// values of `τ = Xᵀ (σ_y ⊗ σ_y) X` with `ρ = X X†`, which avoids square
/// roots of eigenvalues that are zero up to rounding.
pub fn spin_flip_roots(rho: &Density) -> [f64; 4] {
    let eig = to_nalgebra(rho).symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..4).filter(|&i| eig.eigenvalues[i] > 1e-14 * top).collect();
    let x = NMat::from_fn(4, keep.len(), |r, c| {
        eig.eigenvectors[(r, keep[c])] * Complex::new(eig.eigenvalues[keep[c]].sqrt(), 0.0)
    });
    let i = Complex::new(0.0, 1.0);
    let z = Complex::new(0.0, 0.0);
    let sy = NMat::from_row_slice(2, 2, &[z, -i, i, z]);
    let yy = sy.kronecker(&sy);
    let tau = x.transpose() * yy * &x;
    let mut w: Vec<f64> = tau.svd(false, false).singular_values.iter().cloned().collect();
    w.resize(4, 0.0);
    w.sort_by(|a, b| b.partial_cmp(a).unwrap());
    [w[0], w[1], w[2], w[3]]
}

/// Two-qubit concurrence `max(0, r₁ − r₂ − r₃ − r₄)`.
pub fn concurrence(rho: &Density) -> f64 {
    let r = spin_flip_roots(rho);
    (r[0] - r[1] - r[2] - r[3]).max(0.0)
}

/// Concurrence of assistance `Σ r_i`, the largest average concurrence over decompositions.
pub fn concurrence_of_assistance(rho: &Density) -> f64 {
    spin_flip_roots(rho).iter().sum()
}

fn binary_entropy(x: f64) -> f64 {
    let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    h(x) + h(1.0 - x)
}

/// Entanglement of formation in bits.
pub fn entanglement_of_formation(rho: &Density) -> f64 {
    let c = concurrence(rho).min(1.0);
    binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0)
}

pub fn pure_entropy_via_oracle(psi: &State) -> f64 {
    entanglement_of_formation(&psi.to_density())
}
