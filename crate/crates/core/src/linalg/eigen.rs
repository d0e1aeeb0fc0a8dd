//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, and the
//! spectral (projector-valued) form built on top of it.

use num_traits::{One, Zero};

use crate::error::Result;
use crate::linalg::ket::Ket;
use crate::linalg::operator::{ComplexOperator, Structure};
use crate::scalar::{Real, C};

const MAX_SWEEPS: usize = 80;

/// Eigenvalues closer than this are merged into one spectral value.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Eigenvalues in ascending order with orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real = f64> {
    pub values: Vec<T>,
    pub vectors: Vec<Ket<T>>,
}

/// Hermitian eigendecomposition. Fails for operators without the hermitian tag.
pub fn eigh<T: Real>(x: &ComplexOperator<T>) -> Result<HermitianEigen<T>> {
    x.require_hermitian("spectral operand")?;
    let n = x.dim();
    let idx = |i: usize, j: usize| i * n + j;

    // work on the exactly hermitian part
    let mut a: Vec<C<T>> = vec![C::zero(); n * n];
    let half = T::of(0.5);
    for i in 0..n {
        for j in 0..n {
            a[idx(i, j)] = (x.get(i, j) + x.get(j, i).conj()) * half;
        }
    }
    let mut v: Vec<C<T>> = vec![C::zero(); n * n];
    for i in 0..n {
        v[idx(i, i)] = C::one();
    }

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let eps = T::epsilon();
    if scale > T::zero() {
        for _ in 0..MAX_SWEEPS {
            let mut off = T::zero();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off = off + a[idx(i, j)].norm_sqr();
                    }
                }
            }
            if off.sqrt() <= eps * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[idx(p, q)];
                    let mag = apq.norm();
                    if mag <= eps * eps * scale {
                        continue;
                    }
                    let phase = apq / mag;
                    let app = a[idx(p, p)].re;
                    let aqq = a[idx(q, q)].re;
                    let theta = (aqq - app) / (mag + mag);
                    let t = if theta >= T::zero() {
                        (theta + (theta * theta + T::one()).sqrt()).recip()
                    } else {
                        -((-theta) + (theta * theta + T::one()).sqrt()).recip()
                    };
                    let cth = (t * t + T::one()).sqrt().recip();
                    let s = t * cth;
                    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                    let gpp = C::new(cth, T::zero());
                    let gpq = C::new(s, T::zero());
                    let gqp = phase.conj() * (-s);
                    let gqq = phase.conj() * cth;
                    for k in 0..n {
                        let (akp, akq) = (a[idx(k, p)], a[idx(k, q)]);
                        a[idx(k, p)] = akp * gpp + akq * gqp;
                        a[idx(k, q)] = akp * gpq + akq * gqq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[idx(p, k)], a[idx(q, k)]);
                        a[idx(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                        a[idx(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                    }
                    a[idx(p, q)] = C::zero();
                    a[idx(q, p)] = C::zero();
                    a[idx(p, p)].im = T::zero();
                    a[idx(q, q)].im = T::zero();
                    for k in 0..n {
                        let (vkp, vkq) = (v[idx(k, p)], v[idx(k, q)]);
                        v[idx(k, p)] = vkp * gpp + vkq * gqp;
                        v[idx(k, q)] = vkp * gpq + vkq * gqq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[idx(i, i)].re.partial_cmp(&a[idx(j, j)].re).unwrap());
    let values = order.iter().map(|&k| a[idx(k, k)].re).collect();
    let vectors = order
        .iter()
        .map(|&k| Ket::from_raw((0..n).map(|i| v[idx(i, k)]).collect(), true))
        .collect();
    Ok(HermitianEigen { values, vectors })
}

/// One spectral value with an orthonormal basis of its eigenspace.
#[derive(Clone, Debug)]
pub struct EigenSpace<T: Real = f64> {
    pub value: T,
    pub basis: Vec<Ket<T>>,
}

impl<T: Real> EigenSpace<T> {
    pub fn multiplicity(&self) -> usize {
        self.basis.len()
    }
}

/// `X = Σ λ_k P_k` with distinct ascending `λ_k` and orthogonal projectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real = f64> {
    pub eigenvalues: Vec<T>,
    pub projectors: Vec<ComplexOperator<T>>,
    pub spaces: Vec<EigenSpace<T>>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Σ λ_k P_k`.
    pub fn reconstruct(&self) -> ComplexOperator<T> {
        let dim = self.projectors[0].dim();
        let mut acc = ComplexOperator::zeros(dim);
        for (l, p) in self.eigenvalues.iter().zip(&self.projectors) {
            acc = &acc + &p.scale_real(*l);
        }
        acc
    }

    /// Index of the spectral value within `tol` of `x`.
    pub fn find(&self, x: T, tol: T) -> Option<usize> {
        self.eigenvalues.iter().position(|l| (*l - x).abs() <= tol)
    }
}

/// Groups eigenvalues whose consecutive gaps are below [`DEGENERACY_TOL`].
pub fn eigenspaces<T: Real>(eig: HermitianEigen<T>) -> Vec<EigenSpace<T>> {
    let tol = T::tol(DEGENERACY_TOL);
    let mut spaces: Vec<EigenSpace<T>> = Vec::new();
    let mut last: Option<T> = None;
    let mut sums: Vec<(T, usize)> = Vec::new();
    for (val, vec) in eig.values.into_iter().zip(eig.vectors) {
        match last {
            Some(prev) if val - prev < tol => {
                let s = spaces.last_mut().unwrap();
                s.basis.push(vec);
                let acc = sums.last_mut().unwrap();
                acc.0 = acc.0 + val;
                acc.1 += 1;
            }
            _ => {
                spaces.push(EigenSpace {
                    value: val,
                    basis: vec![vec],
                });
                sums.push((val, 1));
            }
        }
        last = Some(val);
    }
    for (s, (sum, count)) in spaces.iter_mut().zip(sums) {
        s.value = sum / T::of(count as f64);
    }
    spaces
}

/// Spectral decomposition with degenerate eigenvalues merged.
pub fn spectral<T: Real>(x: &ComplexOperator<T>) -> Result<SpectralDecomposition<T>> {
    let spaces = eigenspaces(eigh(x)?);
    let dim = x.dim();
    let projectors = spaces
        .iter()
        .map(|s| {
            let mut p = ComplexOperator::zeros(dim);
            for b in &s.basis {
                p = &p + &ComplexOperator::outer(b, b).expect("matching dims");
            }
            p.with_structure(Structure::PROJECTION)
        })
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues: spaces.iter().map(|s| s.value).collect(),
        projectors,
        spaces,
    })
}

/// `exp(iH)` for hermitian `H`, via its eigendecomposition.
pub fn exp_i_hermitian<T: Real>(h: &ComplexOperator<T>) -> Result<ComplexOperator<T>> {
    let eig = eigh(h)?;
    let n = h.dim();
    let mut data = vec![C::zero(); n * n];
    for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
        let phase = C::from_polar(T::one(), *lambda);
        let amps = v.amps();
        for i in 0..n {
            let ai = amps[i] * phase;
            for j in 0..n {
                data[i * n + j] = data[i * n + j] + ai * amps[j].conj();
            }
        }
    }
    Ok(ComplexOperator::from_raw(n, data, Structure::UNITARY))
}
