//! Dense complex linear algebra: kets, operators, tensor products,
//! expectations and spectral decompositions.
//!
//! Composite spaces are always ordered object ⊗ probe, with the probe index
//! varying fastest in the flattened representation.

mod eigen;
mod ket;
mod operator;

pub use eigen::{
    eigenspaces, eigh, exp_i_hermitian, spectral, EigenSpace, HermitianEigen,
    SpectralDecomposition, DEGENERACY_TOL,
};
pub use ket::{Ket, NORMALIZATION_TOL};
pub use operator::{ComplexOperator, Structure, STRUCTURE_TOL};

use crate::error::Result;
use crate::scalar::{Real, C};

/// Imaginary residue tolerated in the expectation of a hermitian operator.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// Kronecker product between two values of the same kind.
///
/// Only operator ⊗ operator and ket ⊗ ket are implemented, so mixing kinds
/// is rejected at compile time.
pub trait Tensor {
    fn tensor(&self, rhs: &Self) -> Self;
}

impl<T: Real> Tensor for ComplexOperator<T> {
    fn tensor(&self, rhs: &Self) -> Self {
        self.kron(rhs)
    }
}

impl<T: Real> Tensor for Ket<T> {
    fn tensor(&self, rhs: &Self) -> Self {
        self.kron(rhs)
    }
}

pub fn tensor<X: Tensor>(a: &X, b: &X) -> X {
    a.tensor(b)
}

/// `⟨u|X|v⟩` without any structural requirement.
pub fn braket<T: Real>(u: &Ket<T>, x: &ComplexOperator<T>, v: &Ket<T>) -> Result<C<T>> {
    let xv = x.apply(v)?;
    u.inner(&xv)
}

/// `⟨v|X|v⟩` for hermitian `X` and normalized `v`.
pub fn expectation<T: Real>(x: &ComplexOperator<T>, v: &Ket<T>) -> Result<T> {
    x.require_hermitian("observable")?;
    v.check_dim(x.dim(), "expectation")?;
    v.require_normalized("state")?;
    let z = braket(v, x, v)?;
    debug_assert!(
        z.im.abs() < T::tol(EXPECTATION_IMAG_TOL) * (T::one() + x.frobenius_norm()),
        "imaginary residue {:?} in hermitian expectation",
        z.im
    );
    Ok(z.re)
}

/// `(ΔX)² = ⟨X²⟩ − ⟨X⟩²`, evaluated as `‖(X − ⟨X⟩)v‖²` so it is never negative.
pub fn variance<T: Real>(x: &ComplexOperator<T>, v: &Ket<T>) -> Result<T> {
    let mean = expectation(x, v)?;
    let xv = x.apply(v)?;
    let shifted = xv.add_scaled(C::new(-mean, T::zero()), v)?;
    Ok(shifted.norm_sqr().max(T::zero()))
}

/// `[X, Y] = XY − YX`.
pub fn commutator<T: Real>(
    x: &ComplexOperator<T>,
    y: &ComplexOperator<T>,
) -> Result<ComplexOperator<T>> {
    y.check_dim(x.dim(), "commutator")?;
    Ok(&x.matmul(y) - &y.matmul(x))
}

/// Frobenius norm of a commutator.
pub fn commutator_norm<T: Real>(x: &ComplexOperator<T>, y: &ComplexOperator<T>) -> Result<T> {
    Ok(commutator(x, y)?.frobenius_norm())
}

/// `X ⊗ I_probe`.
pub fn on_object<T: Real>(x: &ComplexOperator<T>, probe_dim: usize) -> ComplexOperator<T> {
    x.kron(&ComplexOperator::identity(probe_dim))
}

/// `I_object ⊗ Y`.
pub fn on_probe<T: Real>(object_dim: usize, y: &ComplexOperator<T>) -> ComplexOperator<T> {
    ComplexOperator::identity(object_dim).kron(y)
}
