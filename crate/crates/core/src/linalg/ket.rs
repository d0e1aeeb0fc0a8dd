use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Tolerance on `|‖v‖² − 1|` for a ket to carry the normalized tag.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A vector in a finite-dimensional Hilbert space.
///
/// Kets carry a normalized/unnormalized tag. Physical states (object input,
/// probe preparation) are normalized; intermediate vectors such as the
/// branches of a partially specified interaction are not.
#[derive(Clone, PartialEq)]
pub struct Ket<T: Real = f64> {
    amps: Vec<C<T>>,
    normalized: bool,
}

impl<T: Real> Ket<T> {
    /// Builds a normalized ket, rejecting amplitudes whose norm is not 1.
    pub fn new(amps: Vec<C<T>>) -> Result<Self> {
        let ket = Self::unnormalized(amps)?;
        let n2 = ket.norm_sqr();
        if (n2 - T::one()).abs() > T::tol(NORMALIZATION_TOL) {
            return Err(Error::NotNormalized {
                what: "ket".into(),
                norm: n2.sqrt().to_f64_lossy(),
            });
        }
        Ok(Ket {
            normalized: true,
            ..ket
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalize(amps: Vec<C<T>>) -> Result<Self> {
        let ket = Self::unnormalized(amps)?;
        let n = ket.norm();
        if n <= T::min_positive_value() {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        let inv = n.recip();
        Ok(Ket {
            amps: ket.amps.into_iter().map(|a| a * inv).collect(),
            normalized: true,
        })
    }

    pub fn unnormalized(amps: Vec<C<T>>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Shape("ket".into()));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("ket".into()));
        }
        Ok(Ket {
            amps,
            normalized: false,
        })
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dim {dim}");
        let mut amps = vec![C::zero(); dim];
        amps[k] = C::one();
        Ket {
            amps,
            normalized: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Ket {
            amps: vec![C::zero(); dim],
            normalized: false,
        }
    }

    pub(crate) fn from_raw(amps: Vec<C<T>>, normalized: bool) -> Self {
        Ket { amps, normalized }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Ket<T>) -> Result<C<T>> {
        self.check_dim(other.dim(), "inner product")?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(C::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Multiplies by a complex factor; the normalized tag survives only
    /// unit-modulus factors.
    pub fn scale(&self, z: C<T>) -> Ket<T> {
        let keeps = self.normalized && (z.norm() - T::one()).abs() <= T::tol(NORMALIZATION_TOL);
        Ket {
            amps: self.amps.iter().map(|a| a * z).collect(),
            normalized: keeps,
        }
    }

    /// Global phase `e^{iφ}`; physically the same state.
    pub fn with_phase(&self, phi: T) -> Ket<T> {
        self.scale(C::from_polar(T::one(), phi))
    }

    /// Unnormalized linear combination `self + z·other`.
    pub fn add_scaled(&self, z: C<T>, other: &Ket<T>) -> Result<Ket<T>> {
        self.check_dim(other.dim(), "ket sum")?;
        Ok(Ket {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + z * b)
                .collect(),
            normalized: false,
        })
    }

    /// Kronecker product; the first factor's index varies slowest.
    pub fn kron(&self, other: &Ket<T>) -> Ket<T> {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket {
            amps,
            normalized: self.normalized && other.normalized,
        }
    }

    pub(crate) fn check_dim(&self, expected: usize, context: &'static str) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                context,
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn require_normalized(&self, what: &str) -> Result<()> {
        if !self.normalized {
            return Err(Error::NotNormalized {
                what: what.into(),
                norm: self.norm().to_f64_lossy(),
            });
        }
        Ok(())
    }
}

impl<T: Real> fmt::Debug for Ket<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ket")
            .field("normalized", &self.normalized)
            .field("amps", &self.amps)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_input() {
        let err = Ket::<f64>::new(vec![C::new(1.0, 0.0), C::new(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn normalize_and_phase_keep_tag() {
        let k = Ket::<f64>::normalize(vec![C::new(3.0, 0.0), C::new(0.0, 4.0)]).unwrap();
        assert!(k.is_normalized());
        assert!((k.norm() - 1.0).abs() < 1e-15);
        assert!(k.with_phase(0.7).is_normalized());
        assert!(!k.scale(C::new(2.0, 0.0)).is_normalized());
    }

    #[test]
    fn zero_vector_cannot_be_normalized() {
        assert!(Ket::<f64>::normalize(vec![C::zero(); 3]).is_err());
    }

    #[test]
    fn kron_index_convention_first_factor_slowest() {
        let a = Ket::<f64>::basis(2, 1);
        let b = Ket::<f64>::basis(3, 2);
        let ab = a.kron(&b);
        assert_eq!(ab.dim(), 6);
        assert_eq!(ab.amps()[5], C::new(1.0, 0.0));
    }
}
