//! Seeded random states, observables and conservation-respecting models.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bounds::ConservationPair;
use crate::error::Result;
use crate::linalg::{ComplexOperator, Ket, Structure};
use crate::measurement::MeasurementModel;
use crate::optimizer::CommutantBasis;
use crate::scalar::{Real, C};
use crate::spin::{spin_operators, YWModel};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C::new(T::of(re), T::of(im))
}

fn gaussian_vec<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C<T>> {
    (0..dim).map(|_| gaussian(rng)).collect()
}

/// Uniformly distributed pure state.
pub fn random_ket<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Ket<T> {
    Ket::normalize(gaussian_vec(rng, dim)).expect("gaussian vector is nonzero")
}

/// Gaussian hermitian matrix `(G + G†)/2`.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexOperator<T> {
    let g = ComplexOperator::from_row_major(dim, gaussian_vec(rng, dim * dim)).expect("square");
    (&g + &g.adjoint())
        .scale_real(T::of(0.5))
        .with_structure(Structure::HERMITIAN)
}

/// Haar-distributed unitary from Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexOperator<T> {
    let cols = orthonormal_columns::<T, R>(rng, dim, dim);
    let mut data = vec![C::zero(); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            data[i * dim + j] = *z;
        }
    }
    ComplexOperator::from_row_major(dim, data)
        .expect("square")
        .with_structure(Structure::UNITARY)
}

fn orthonormal_columns<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    count: usize,
) -> Vec<Vec<C<T>>> {
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(count);
    while cols.len() < count {
        let mut v = gaussian_vec::<T, R>(rng, dim);
        for _ in 0..2 {
            for c in &cols {
                let ov = c
                    .iter()
                    .zip(&v)
                    .fold(C::<T>::zero(), |acc, (a, b)| acc + a.conj() * *b);
                for (x, y) in v.iter_mut().zip(c) {
                    *x = *x - ov * *y;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if n > T::of(1e-6) {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    cols
}

/// `V diag(λ) V†` with Haar `V`.
pub fn rotated_diagonal<T: Real, R: Rng + ?Sized>(rng: &mut R, values: &[T]) -> ComplexOperator<T> {
    let v = random_unitary::<T, R>(rng, values.len());
    ComplexOperator::diagonal(values)
        .conjugate_by(&v.adjoint())
        .expect("same dim")
        .with_structure(Structure::HERMITIAN)
}

/// Observable with integer eigenvalues in `[-max_abs, max_abs]` in a random
/// basis, so that sums with another such observable are degenerate.
pub fn random_integer_observable<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    max_abs: i32,
) -> ComplexOperator<T> {
    let values: Vec<T> = (0..dim)
        .map(|_| T::of(rng.random_range(-max_abs..=max_abs) as f64))
        .collect();
    rotated_diagonal(rng, &values)
}

/// Random hermitian element of the commutant of `x`.
pub fn random_commuting_hermitian<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    x: &ComplexOperator<T>,
) -> Result<ComplexOperator<T>> {
    let basis = CommutantBasis::new(x)?;
    let theta = random_angles(rng, basis.len());
    basis.hamiltonian(&theta)
}

fn random_angles<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    (0..n)
        .map(|_| T::of(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
        .collect()
}

/// Kind of model produced by the samplers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    /// Random `A`, integer-spectrum `L1`, `L2`.
    Generic,
    /// Spin-½ object with `A = Ŝ_x`, `L1 = Ŝ_z`.
    Spin,
    /// Noiseless exchange of identical object and probe.
    Exchange,
}

#[derive(Clone, Debug)]
pub struct ConservativeSample<T: Real = f64> {
    pub kind: SampleKind,
    pub model: MeasurementModel<T>,
    pub pair: ConservationPair<T>,
}

fn conservative_u<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    pair: &ConservationPair<T>,
) -> Result<ComplexOperator<T>> {
    let basis = CommutantBasis::new(&pair.total())?;
    basis.conservative_unitary(&random_angles(rng, basis.len()))
}

fn probe_observable<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    l2: &ComplexOperator<T>,
    yanase: bool,
) -> Result<ComplexOperator<T>> {
    if yanase {
        random_commuting_hermitian(rng, l2)
    } else {
        Ok(random_hermitian(rng, l2.dim()))
    }
}

/// Random model conserving `L1⊗I + I⊗L2`; `yanase` selects whether `M`
/// commutes with `L2`.
pub fn random_conservative_model<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    object_dim: usize,
    probe_dim: usize,
    yanase: bool,
) -> Result<ConservativeSample<T>> {
    let l1 = random_integer_observable(rng, object_dim, 2);
    let l2 = random_integer_observable(rng, probe_dim, 2);
    let pair = ConservationPair::new(l1, l2)?;
    let a = random_hermitian(rng, object_dim);
    let m = probe_observable(rng, pair.l2(), yanase)?;
    let u = conservative_u(rng, &pair)?;
    let xi = random_ket(rng, probe_dim);
    Ok(ConservativeSample {
        kind: SampleKind::Generic,
        model: MeasurementModel::new(a, m, u, xi)?,
        pair,
    })
}

/// Spin-½ readout of `Ŝ_x` conserving `Ŝ_z + L2`, with `L2` of integer
/// spectrum.
pub fn random_spin_model<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    probe_dim: usize,
    yanase: bool,
) -> Result<ConservativeSample<T>> {
    let s = spin_operators::<T>();
    let l2 = random_integer_observable(rng, probe_dim, 2);
    let pair = ConservationPair::new(s.sz, l2)?;
    let m = probe_observable(rng, pair.l2(), yanase)?;
    let u = conservative_u(rng, &pair)?;
    let xi = random_ket(rng, probe_dim);
    Ok(ConservativeSample {
        kind: SampleKind::Spin,
        model: MeasurementModel::new(s.sx, m, u, xi)?,
        pair,
    })
}

/// Exchange of two identical systems with `L1 = L2 = L` and `M = A`
/// commuting with `L`: conservative, Yanase-compliant and noiseless.
pub fn random_exchange_model<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> Result<ConservativeSample<T>> {
    let l = random_integer_observable(rng, dim, 2);
    let a = random_commuting_hermitian(rng, &l)?;
    let mut data = vec![C::zero(); dim * dim * dim * dim];
    let n = dim * dim;
    for i in 0..dim {
        for j in 0..dim {
            // |i, j⟩ → |j, i⟩
            data[(j * dim + i) * n + i * dim + j] = C::new(T::one(), T::zero());
        }
    }
    let u = ComplexOperator::from_row_major(n, data)?.with_structure(Structure::UNITARY);
    let xi = random_ket(rng, dim);
    let pair = ConservationPair::new(l.clone(), l)?;
    Ok(ConservativeSample {
        kind: SampleKind::Exchange,
        model: MeasurementModel::new(a.clone(), a, u, xi)?,
        pair,
    })
}

/// Deterministic mixed corpus of Yanase-compliant conservative models:
/// object dimensions 2–4, probe dimensions 2–8, one exchange model in ten,
/// and a spin-½ readout for half of the two-level objects.
pub fn benchmark_corpus<T: Real>(seed: u64, count: usize) -> Result<Vec<ConservativeSample<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            if i % 10 == 9 {
                let dim = rng.random_range(2..=4);
                return random_exchange_model(&mut rng, dim);
            }
            let object_dim = rng.random_range(2..=4);
            let probe_dim = rng.random_range(2..=8);
            if object_dim == 2 && rng.random_bool(0.5) {
                random_spin_model(&mut rng, probe_dim, true)
            } else {
                random_conservative_model(&mut rng, object_dim, probe_dim, true)
            }
        })
        .collect()
}

/// Random valid partial interaction on a probe of dimension `probe_dim ≥ 2`.
///
/// `M` has `+½` and `−½` eigenspaces of random sizes and the remaining
/// eigenvalues uniform in `(−½, ½)`; `ξ⁺` and `ξ⁻` are drawn inside the
/// matching eigenspaces and the second branch is orthogonalized against the
/// first within its allowed subspace.
pub fn random_yw_model<T: Real, R: Rng + ?Sized>(rng: &mut R, probe_dim: usize) -> Result<YWModel<T>> {
    assert!(probe_dim >= 2, "YW probe needs at least two levels");
    let p = probe_dim;
    let n_plus = rng.random_range(1..p);
    let n_minus = rng.random_range(1..=(p - n_plus));
    let values: Vec<T> = (0..p)
        .map(|k| {
            if k < n_plus {
                T::of(0.5)
            } else if k < n_plus + n_minus {
                T::of(-0.5)
            } else {
                T::of(rng.random_range(-0.5..0.5))
            }
        })
        .collect();
    let v = random_unitary::<T, R>(rng, p);
    let m = ComplexOperator::diagonal(&values)
        .conjugate_by(&v.adjoint())?
        .with_structure(Structure::HERMITIAN);
    let column = |k: usize| -> Vec<C<T>> { (0..p).map(|i| v.get(i, k)).collect() };
    let span = |rng: &mut R, range: std::ops::Range<usize>| -> Vec<C<T>> {
        let mut out = vec![C::zero(); p];
        for k in range {
            let w = gaussian::<T, R>(rng);
            for (o, c) in out.iter_mut().zip(column(k)) {
                *o = *o + w * c;
            }
        }
        out
    };
    let plus = 0..n_plus;
    let minus = n_plus..n_plus + n_minus;
    let eta_weight = T::of(rng.random_range(0.0..1.0));

    // first image: (ξ⁺, η⁺) in the (α_x, β_x) blocks
    let mut c1: Vec<C<T>> = span(rng, plus.clone());
    c1.extend(gaussian_vec::<T, R>(rng, p).into_iter().map(|z| z * eta_weight));
    let n1 = c1.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    c1.iter_mut().for_each(|z| *z = *z / n1);

    // second image: (η⁻, ξ⁻) with ξ⁻ in the −½ eigenspace
    let mut c2: Vec<C<T>> = gaussian_vec::<T, R>(rng, p)
        .into_iter()
        .map(|z| z * eta_weight)
        .collect();
    c2.extend(span(rng, minus.clone()));
    // the part of c1 visible inside c2's subspace
    let proj_minus = |x: &[C<T>]| -> Vec<C<T>> {
        let mut out = vec![C::zero(); p];
        for k in minus.clone() {
            let col = column(k);
            let ov = col
                .iter()
                .zip(x)
                .fold(C::<T>::zero(), |acc, (a, b)| acc + a.conj() * *b);
            for (o, c) in out.iter_mut().zip(&col) {
                *o = *o + ov * *c;
            }
        }
        out
    };
    let mut c1_vis: Vec<C<T>> = c1[..p].to_vec();
    c1_vis.extend(proj_minus(&c1[p..]));
    let vis2 = c1_vis.iter().map(|z| z.norm_sqr()).sum::<T>();
    if vis2 > T::zero() {
        let ov = c1_vis
            .iter()
            .zip(&c2)
            .fold(C::<T>::zero(), |acc, (a, b)| acc + a.conj() * *b)
            / vis2;
        for (x, y) in c2.iter_mut().zip(&c1_vis) {
            *x = *x - ov * *y;
        }
    }
    let n2 = c2.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    c2.iter_mut().for_each(|z| *z = *z / n2);

    let ket = |x: &[C<T>]| Ket::unnormalized(x.to_vec());
    YWModel::new(
        random_ket(rng, p),
        ket(&c1[..p])?,
        ket(&c2[p..])?,
        ket(&c1[p..])?,
        ket(&c2[..p])?,
        m,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{acl_residual, yanase_residual};
    use crate::linalg::commutator_norm;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..8 {
            assert!(random_unitary::<f64, _>(&mut rng, d).unitary_residual() < 1e-12);
        }
    }

    #[test]
    fn commuting_hermitian_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = random_integer_observable::<f64, _>(&mut rng, 6, 1);
        let m = random_commuting_hermitian(&mut rng, &l).unwrap();
        assert!(m.hermitian_residual() < 1e-12);
        assert!(commutator_norm(&m, &l).unwrap() < 1e-10);
    }

    #[test]
    fn corpus_models_conserve_and_obey_yanase() {
        let corpus = benchmark_corpus::<f64>(3, 40).unwrap();
        let mut kinds = [0usize; 3];
        for s in &corpus {
            assert!(acl_residual(&s.model, &s.pair).unwrap() < 1e-10);
            assert!(yanase_residual(s.model.m(), s.pair.l2()).unwrap() < 1e-9);
            kinds[s.kind as usize] += 1;
            if s.kind == SampleKind::Exchange {
                assert!(s.model.sup_noise() < 1e-10);
            }
        }
        assert!(kinds.iter().all(|&k| k > 0), "{kinds:?}");
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = benchmark_corpus::<f64>(9, 5).unwrap();
        let b = benchmark_corpus::<f64>(9, 5).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.model.u().entries(), y.model.u().entries());
        }
    }

    #[test]
    fn non_yanase_models_still_conserve() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_conservative_model::<f64, _>(&mut rng, 3, 4, false).unwrap();
        assert!(acl_residual(&s.model, &s.pair).unwrap() < 1e-10);
        assert!(yanase_residual(s.model.m(), s.pair.l2()).unwrap() > 1e-3);
    }

    #[test]
    fn yw_models_are_valid_for_all_probe_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in 2..=8 {
            for _ in 0..10 {
                let yw = random_yw_model::<f64, _>(&mut rng, p).unwrap();
                assert_eq!(yw.probe_dim(), p);
                let e = yw.eps_y_sq();
                assert!((0.0..=2.0).contains(&e));
            }
        }
    }
}
