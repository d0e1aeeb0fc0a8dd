use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::ket::Ket;
use crate::scalar::{Real, C};

/// Frobenius tolerance behind the hermitian, unitary and projection tags.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Declared structure of an operator. A tag is only set after the
/// corresponding residual has been checked, or when it follows exactly
/// from how the operator was built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Structure {
    pub hermitian: bool,
    pub unitary: bool,
    pub projection: bool,
}

impl Structure {
    pub const NONE: Structure = Structure {
        hermitian: false,
        unitary: false,
        projection: false,
    };
    pub const HERMITIAN: Structure = Structure {
        hermitian: true,
        unitary: false,
        projection: false,
    };
    pub const UNITARY: Structure = Structure {
        hermitian: false,
        unitary: true,
        projection: false,
    };
    pub const PROJECTION: Structure = Structure {
        hermitian: true,
        unitary: false,
        projection: true,
    };
}

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexOperator<T: Real = f64> {
    dim: usize,
    data: Vec<C<T>>,
    structure: Structure,
}

impl<T: Real> ComplexOperator<T> {
    /// Untagged operator from row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::Shape("operator".into()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator".into()));
        }
        Ok(ComplexOperator {
            dim,
            data,
            structure: Structure::NONE,
        })
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("operator rows".into()));
        }
        Self::from_row_major(dim, rows.into_iter().flatten().collect())
    }

    /// Real-valued entries, convenient for small literal matrices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C::new(T::of(x), T::zero())).collect())
                .collect(),
        )
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<C<T>>, structure: Structure) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        ComplexOperator {
            dim,
            data,
            structure,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_raw(dim, vec![C::zero(); dim * dim], Structure::PROJECTION)
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = C::one();
        }
        op.structure = Structure {
            hermitian: true,
            unitary: true,
            projection: true,
        };
        op
    }

    /// Hermitian diagonal operator.
    pub fn diagonal(values: &[T]) -> Self {
        let dim = values.len();
        let mut op = Self::zeros(dim);
        for (i, &v) in values.iter().enumerate() {
            op.data[i * dim + i] = C::new(v, T::zero());
        }
        op.structure = Structure::HERMITIAN;
        op
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &Ket<T>, b: &Ket<T>) -> Result<Self> {
        a.check_dim(b.dim(), "outer product")?;
        let dim = a.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for x in a.amps() {
            for y in b.amps() {
                data.push(x * y.conj());
            }
        }
        Ok(Self::from_raw(dim, data, Structure::NONE))
    }

    /// `|v⟩⟨v|` for a normalized `v`, tagged as a projection.
    pub fn projector(v: &Ket<T>) -> Result<Self> {
        v.require_normalized("projector vector")?;
        let mut p = Self::outer(v, v)?;
        p.structure = Structure::PROJECTION;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C<T> {
        self.data[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C<T>]> {
        self.data.chunks(self.dim)
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn is_hermitian(&self) -> bool {
        self.structure.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.structure.unitary
    }

    pub fn is_projection(&self) -> bool {
        self.structure.projection
    }

    pub fn hermitian_residual(&self) -> T {
        let n = self.dim;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn unitary_residual(&self) -> T {
        let prod = self.adjoint().matmul(self);
        (&prod - &Self::identity(self.dim)).frobenius_norm()
    }

    pub fn projection_residual(&self) -> T {
        let sq = self.matmul(self);
        (&sq - self).frobenius_norm()
    }

    /// Checks hermiticity and sets the tag. `what` names the operator in errors.
    pub fn into_hermitian(mut self, what: &str) -> Result<Self> {
        let r = self.hermitian_residual();
        if !(r < T::tol(STRUCTURE_TOL)) {
            return Err(Error::NotHermitian {
                what: what.into(),
                residual: r.to_f64_lossy(),
            });
        }
        self.structure.hermitian = true;
        Ok(self)
    }

    pub fn into_unitary(mut self, what: &str) -> Result<Self> {
        let r = self.unitary_residual();
        if !(r < T::tol(STRUCTURE_TOL)) {
            return Err(Error::NotUnitary {
                what: what.into(),
                residual: r.to_f64_lossy(),
            });
        }
        self.structure.unitary = true;
        Ok(self)
    }

    pub fn into_projection(self, what: &str) -> Result<Self> {
        let mut op = self.into_hermitian(what)?;
        let r = op.projection_residual();
        if !(r < T::tol(STRUCTURE_TOL)) {
            return Err(Error::NotProjection {
                what: what.into(),
                residual: r.to_f64_lossy(),
            });
        }
        op.structure.projection = true;
        Ok(op)
    }

    pub(crate) fn with_structure(mut self, s: Structure) -> Self {
        self.structure = s;
        self
    }

    pub(crate) fn require_hermitian(&self, what: &str) -> Result<()> {
        if !self.structure.hermitian {
            return Err(Error::NotHermitian {
                what: what.into(),
                residual: self.hermitian_residual().to_f64_lossy(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_dim(&self, expected: usize, context: &'static str) -> Result<()> {
        if self.dim != expected {
            return Err(Error::DimensionMismatch {
                context,
                expected,
                found: self.dim,
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.get(j, i).conj());
            }
        }
        let s = self.structure;
        Self::from_raw(n, data, s)
    }

    /// Matrix product. Dimensions must agree; use [`ComplexOperator::try_matmul`]
    /// for a checked variant.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch in product");
        let n = self.dim;
        let mut data = vec![C::zero(); n * n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out = &mut data[i * n..(i + 1) * n];
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let rrow = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out.iter_mut().zip(rrow) {
                    *o = *o + a * b;
                }
            }
        }
        let unitary = self.structure.unitary && rhs.structure.unitary;
        Self::from_raw(
            n,
            data,
            Structure {
                unitary,
                ..Structure::NONE
            },
        )
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self> {
        rhs.check_dim(self.dim, "operator product")?;
        Ok(self.matmul(rhs))
    }

    /// `X²`; hermitian input gives a hermitian result.
    pub fn square(&self) -> Self {
        let h = self.structure.hermitian;
        let p = self.structure.projection;
        let mut sq = self.matmul(self);
        sq.structure.hermitian = h;
        sq.structure.projection = p;
        sq
    }

    /// `U† X U`, keeping the hermitian and projection tags of `self`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.check_dim(self.dim, "conjugation")?;
        let mut out = u.adjoint().matmul(&self.matmul(u));
        out.structure = Structure {
            hermitian: self.structure.hermitian,
            projection: self.structure.projection,
            unitary: self.structure.unitary && u.structure.unitary,
        };
        Ok(out)
    }

    /// Complex scalar multiple.
    pub fn scale(&self, z: C<T>) -> Self {
        let data = self.data.iter().map(|a| a * z).collect();
        let real = z.im.is_zero();
        let unit = (z.norm() - T::one()).abs() <= T::epsilon();
        Self::from_raw(
            self.dim,
            data,
            Structure {
                hermitian: self.structure.hermitian && real,
                unitary: self.structure.unitary && unit,
                projection: false,
            },
        )
    }

    pub fn scale_real(&self, x: T) -> Self {
        self.scale(C::new(x, T::zero()))
    }

    pub fn apply(&self, v: &Ket<T>) -> Result<Ket<T>> {
        v.check_dim(self.dim, "operator application")?;
        let n = self.dim;
        let amps = (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v.amps())
                    .fold(C::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect();
        Ok(Ket::from_raw(
            amps,
            self.structure.unitary && v.is_normalized(),
        ))
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Hilbert–Schmidt inner product `Tr(self† rhs)`.
    pub fn hs_inner(&self, rhs: &Self) -> C<T> {
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Kronecker product; the left factor's index varies slowest.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let dim = n * m;
        let mut data = vec![C::zero(); dim * dim];
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        data[(i * m + k) * dim + j * m + l] = a * rhs.get(k, l);
                    }
                }
            }
        }
        let s = Structure {
            hermitian: self.structure.hermitian && rhs.structure.hermitian,
            unitary: self.structure.unitary && rhs.structure.unitary,
            projection: self.structure.projection && rhs.structure.projection,
        };
        Self::from_raw(dim, data, s)
    }

    /// Sandwiches the right tensor factor with a probe vector:
    /// `(I ⊗ ⟨ξ|) X (I ⊗ |ξ⟩)` on the left factor of dimension
    /// `dim / ξ.dim()`.
    pub fn partial_expectation_right(&self, xi: &Ket<T>) -> Result<Self> {
        let p = xi.dim();
        if self.dim % p != 0 {
            return Err(Error::DimensionMismatch {
                context: "partial expectation",
                expected: p,
                found: self.dim,
            });
        }
        let o = self.dim / p;
        let x = xi.amps();
        let mut data = vec![C::zero(); o * o];
        for i in 0..o {
            for j in 0..o {
                let mut acc = C::zero();
                for a in 0..p {
                    let xa = x[a].conj();
                    let row = (i * p + a) * self.dim;
                    let inner = (0..p).fold(C::zero(), |s, b| s + self.data[row + j * p + b] * x[b]);
                    acc = acc + xa * inner;
                }
                data[i * o + j] = acc;
            }
        }
        let s = Structure {
            hermitian: self.structure.hermitian,
            ..Structure::NONE
        };
        Ok(Self::from_raw(o, data, s))
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Self::from_raw(
            self.dim,
            data,
            Structure {
                hermitian: self.structure.hermitian && rhs.structure.hermitian,
                ..Structure::NONE
            },
        )
    }
}

impl<T: Real> Add for &ComplexOperator<T> {
    type Output = ComplexOperator<T>;
    fn add(self, rhs: Self) -> ComplexOperator<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &ComplexOperator<T> {
    type Output = ComplexOperator<T>;
    fn sub(self, rhs: Self) -> ComplexOperator<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Real> Mul for &ComplexOperator<T> {
    type Output = ComplexOperator<T>;
    fn mul(self, rhs: Self) -> ComplexOperator<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &ComplexOperator<T> {
    type Output = ComplexOperator<T>;
    fn neg(self) -> ComplexOperator<T> {
        self.scale_real(-T::one())
    }
}

impl<T: Real> fmt::Debug for ComplexOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexOperator(dim={}, {:?})", self.dim, self.structure)?;
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
