use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{eigenspaces, eigh, exp_i_hermitian, ComplexOperator, Ket, Structure};
use crate::scalar::{Real, C};

/// Shape of one generator inside an eigenspace block of `L_tot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `|v_j⟩⟨v_j|`
    Diagonal(usize),
    /// `(|v_j⟩⟨v_k| + |v_k⟩⟨v_j|)/√2`
    Symmetric(usize, usize),
    /// `i(|v_j⟩⟨v_k| − |v_k⟩⟨v_j|)/√2`
    Antisymmetric(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Generator {
    pub block: usize,
    pub kind: GeneratorKind,
}

/// Frobenius-orthonormal hermitian basis of the operators commuting with a
/// hermitian `L_tot`, organized by the eigenspaces of `L_tot`.
///
/// An eigenspace of dimension `d` contributes `d²` generators.
#[derive(Clone, Debug)]
pub struct CommutantBasis<T: Real = f64> {
    dim: usize,
    values: Vec<T>,
    blocks: Vec<Vec<Ket<T>>>,
    generators: Vec<Generator>,
}

impl<T: Real> CommutantBasis<T> {
    pub fn new(l_tot: &ComplexOperator<T>) -> Result<Self> {
        let spaces = eigenspaces(eigh(l_tot)?);
        let mut generators = Vec::new();
        for (b, s) in spaces.iter().enumerate() {
            let d = s.multiplicity();
            for j in 0..d {
                generators.push(Generator {
                    block: b,
                    kind: GeneratorKind::Diagonal(j),
                });
            }
            for j in 0..d {
                for k in (j + 1)..d {
                    generators.push(Generator {
                        block: b,
                        kind: GeneratorKind::Symmetric(j, k),
                    });
                    generators.push(Generator {
                        block: b,
                        kind: GeneratorKind::Antisymmetric(j, k),
                    });
                }
            }
        }
        Ok(CommutantBasis {
            dim: l_tot.dim(),
            values: spaces.iter().map(|s| s.value).collect(),
            blocks: spaces.into_iter().map(|s| s.basis).collect(),
            generators,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Eigenvalues of `L_tot`, one per block.
    pub fn block_values(&self) -> &[T] {
        &self.values
    }

    /// Orthonormal basis of each eigenspace.
    pub fn blocks(&self) -> &[Vec<Ket<T>>] {
        &self.blocks
    }

    /// The `k`-th generator as a full operator.
    pub fn operator(&self, k: usize) -> ComplexOperator<T> {
        let g = self.generators[k];
        let basis = &self.blocks[g.block];
        let r = T::of(0.5).sqrt();
        let outer = |a: &Ket<T>, b: &Ket<T>| ComplexOperator::outer(a, b).expect("same dim");
        let op = match g.kind {
            GeneratorKind::Diagonal(j) => outer(&basis[j], &basis[j]),
            GeneratorKind::Symmetric(j, k) => {
                (&outer(&basis[j], &basis[k]) + &outer(&basis[k], &basis[j])).scale_real(r)
            }
            GeneratorKind::Antisymmetric(j, k) => (&outer(&basis[j], &basis[k])
                - &outer(&basis[k], &basis[j]))
                .scale(C::new(T::zero(), r)),
        };
        op.with_structure(Structure::HERMITIAN)
    }

    pub fn operators(&self) -> Vec<ComplexOperator<T>> {
        (0..self.len()).map(|k| self.operator(k)).collect()
    }

    /// Hermitian `Σ θ_k G_k` restricted to each block, in block coordinates.
    fn block_hamiltonians(&self, theta: &[T]) -> Vec<ComplexOperator<T>> {
        let mut hs: Vec<Vec<C<T>>> = self
            .blocks
            .iter()
            .map(|b| vec![C::zero(); b.len() * b.len()])
            .collect();
        let r = T::of(0.5).sqrt();
        for (g, &t) in self.generators.iter().zip(theta) {
            let d = self.blocks[g.block].len();
            let h = &mut hs[g.block];
            match g.kind {
                GeneratorKind::Diagonal(j) => h[j * d + j].re = h[j * d + j].re + t,
                GeneratorKind::Symmetric(j, k) => {
                    h[j * d + k].re = h[j * d + k].re + t * r;
                    h[k * d + j].re = h[k * d + j].re + t * r;
                }
                GeneratorKind::Antisymmetric(j, k) => {
                    h[j * d + k].im = h[j * d + k].im + t * r;
                    h[k * d + j].im = h[k * d + j].im - t * r;
                }
            }
        }
        hs.into_iter()
            .zip(&self.blocks)
            .map(|(h, b)| {
                ComplexOperator::from_row_major(b.len(), h)
                    .expect("square block")
                    .with_structure(Structure::HERMITIAN)
            })
            .collect()
    }

    /// `Σ θ_k G_k` as a full operator.
    pub fn hamiltonian(&self, theta: &[T]) -> Result<ComplexOperator<T>> {
        self.check_len(theta)?;
        let mut acc = ComplexOperator::zeros(self.dim);
        for (k, &t) in theta.iter().enumerate() {
            if !t.is_zero() {
                acc = &acc + &self.operator(k).scale_real(t);
            }
        }
        Ok(acc)
    }

    /// `U = exp(i Σ θ_k G_k)`, assembled block by block so that it commutes
    /// with `L_tot` to rounding.
    pub fn conservative_unitary(&self, theta: &[T]) -> Result<ComplexOperator<T>> {
        self.check_len(theta)?;
        let n = self.dim;
        let mut data = vec![C::zero(); n * n];
        for (h, basis) in self.block_hamiltonians(theta).iter().zip(&self.blocks) {
            let e = exp_i_hermitian(h)?;
            let d = basis.len();
            // W E W† with W the n×d matrix of basis columns
            let mut we = vec![C::<T>::zero(); n * d];
            for i in 0..n {
                for s in 0..d {
                    let mut acc = C::<T>::zero();
                    for r in 0..d {
                        acc = acc + basis[r].amps()[i] * e.get(r, s);
                    }
                    we[i * d + s] = acc;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let mut acc = C::<T>::zero();
                    for s in 0..d {
                        acc = acc + we[i * d + s] * basis[s].amps()[j].conj();
                    }
                    data[i * n + j] = data[i * n + j] + acc;
                }
            }
        }
        Ok(ComplexOperator::from_row_major(n, data)?.with_structure(Structure::UNITARY))
    }

    fn check_len(&self, theta: &[T]) -> Result<()> {
        if theta.len() != self.len() {
            return Err(Error::DimensionMismatch {
                context: "generator coefficients",
                expected: self.len(),
                found: theta.len(),
            });
        }
        Ok(())
    }
}

/// Convenience wrapper over [`CommutantBasis::new`].
pub fn commutant_basis<T: Real>(l_tot: &ComplexOperator<T>) -> Result<CommutantBasis<T>> {
    CommutantBasis::new(l_tot)
}

/// Convenience wrapper over [`CommutantBasis::conservative_unitary`].
pub fn conservative_unitary<T: Real>(
    basis: &CommutantBasis<T>,
    theta: &[T],
) -> Result<ComplexOperator<T>> {
    basis.conservative_unitary(theta)
}

/// Coefficients that turn the exchange generator of every two-dimensional
/// block into a swap of its two basis vectors, up to a phase. For two qubits
/// with `L_tot` the total `Ŝ_z` this yields `SWAP` up to a phase on the
/// `m = 0` sector.
pub fn exchange_theta<T: Real>(basis: &CommutantBasis<T>) -> Vec<T> {
    // exp(iθ X/√2) = i X at θ = π/√2
    let angle = T::of(std::f64::consts::PI / std::f64::consts::SQRT_2);
    basis
        .generators()
        .iter()
        .map(|g| match g.kind {
            GeneratorKind::Symmetric(0, 1) if basis.blocks()[g.block].len() == 2 => angle,
            _ => T::zero(),
        })
        .collect()
}
