//! Bipartite index bookkeeping: partial trace, partial transpose and local lifts.
//!
//! Basis ordering is `|i⟩_A ⊗ |j⟩_B ↦ i·dim_b + j` throughout, so the
//! coefficient matrix of a pure state has rows indexed by A and columns by B.

use num_complex::Complex;
use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Local dimensions of a two-party system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteDims {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::DimensionMismatch(format!("local dimensions must be positive, got ({dim_a}, {dim_b})")));
        }
        Ok(Self { dim_a, dim_b })
    }

    pub const fn qubits() -> Self {
        Self { dim_a: 2, dim_b: 2 }
    }

    #[inline]
    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    #[inline]
    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    #[inline]
    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Schmidt-rank bound `min(dim_a, dim_b)`.
    #[inline]
    pub fn min_dim(&self) -> usize {
        self.dim_a.min(self.dim_b)
    }

    pub fn dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.dim_a,
            Side::B => self.dim_b,
        }
    }

    pub(crate) fn check_square<R>(&self, m: &ComplexMatrix<R>) -> Result<()> {
        if m.rows() != self.total() || m.cols() != self.total() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix does not factor as ({})x({})",
                m.rows(),
                m.cols(),
                self.dim_a,
                self.dim_b
            )));
        }
        Ok(())
    }
}

/// One tensor factor of a bipartite system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Traces out `side`, leaving an operator on the other factor.
pub fn partial_trace<R: Real>(m: &ComplexMatrix<R>, dims: BipartiteDims, side: Side) -> Result<ComplexMatrix<R>> {
    dims.check_square(m)?;
    let (da, db) = (dims.dim_a, dims.dim_b);
    Ok(match side {
        Side::A => ComplexMatrix::from_fn(db, db, |j, l| {
            (0..da).fold(Complex::zero(), |acc, i| acc + m[(i * db + j, i * db + l)])
        }),
        Side::B => ComplexMatrix::from_fn(da, da, |i, k| {
            (0..db).fold(Complex::zero(), |acc, j| acc + m[(i * db + j, k * db + j)])
        }),
    })
}

/// Transposes the `side` factor only.
pub fn partial_transpose<R: Real>(m: &ComplexMatrix<R>, dims: BipartiteDims, side: Side) -> Result<ComplexMatrix<R>> {
    dims.check_square(m)?;
    let db = dims.dim_b;
    let n = dims.total();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        match side {
            Side::A => m[(k * db + j, i * db + l)],
            Side::B => m[(i * db + l, k * db + j)],
        }
    }))
}

/// Lifts a local operator to the full space: `K ⊗ I` for A, `I ⊗ K` for B.
pub fn lift_local<R: Real>(op: &ComplexMatrix<R>, dims: BipartiteDims, side: Side) -> Result<ComplexMatrix<R>> {
    let expected = dims.dim(side);
    if op.cols() != expected {
        return Err(Error::DimensionMismatch(format!(
            "local operator with {} columns acting on {:?} of dimension {expected}",
            op.cols(),
            side
        )));
    }
    Ok(match side {
        Side::A => op.kron(&ComplexMatrix::identity(dims.dim_b)),
        Side::B => ComplexMatrix::identity(dims.dim_a).kron(op),
    })
}
