//! Indirect measurement models: a probe prepared in `ξ`, an interaction `U`
//! on object ⊗ probe, and a probe observable `M` read out afterwards, judged
//! against the object observable `A` it is meant to measure.

use std::sync::OnceLock;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, on_object, on_probe, spectral, ComplexOperator, Ket, SpectralDecomposition,
    DEGENERACY_TOL,
};
use crate::scalar::{Real, C};

/// Slack allowed on probabilities before clamping to `[0, 1]`.
pub const PROBABILITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct MeasurementModel<T: Real = f64> {
    object_dim: usize,
    probe_dim: usize,
    xi: Ket<T>,
    u: ComplexOperator<T>,
    m: ComplexOperator<T>,
    a: ComplexOperator<T>,
    cache: ModelCache<T>,
}

#[derive(Clone, Debug)]
struct ModelCache<T: Real> {
    heisenberg: OnceLock<ComplexOperator<T>>,
    noise: OnceLock<ComplexOperator<T>>,
    probe_spectrum: OnceLock<SpectralDecomposition<T>>,
}

impl<T: Real> MeasurementModel<T> {
    /// Validates and assembles a model. Operators that are not already tagged
    /// are checked here; errors name the offending field (`A`, `M`, `U`, `xi`).
    pub fn new(
        a: ComplexOperator<T>,
        m: ComplexOperator<T>,
        u: ComplexOperator<T>,
        xi: Ket<T>,
    ) -> Result<Self> {
        let object_dim = a.dim();
        let probe_dim = m.dim();
        let a = if a.is_hermitian() { a } else { a.into_hermitian("A")? };
        let m = if m.is_hermitian() { m } else { m.into_hermitian("M")? };
        if u.dim() != object_dim * probe_dim {
            return Err(Error::DimensionMismatch {
                context: "U (object_dim * probe_dim)",
                expected: object_dim * probe_dim,
                found: u.dim(),
            });
        }
        let u = if u.is_unitary() { u } else { u.into_unitary("U")? };
        xi.check_dim(probe_dim, "xi")?;
        if !xi.is_normalized() {
            return Err(Error::NotNormalized {
                what: "xi".into(),
                norm: xi.norm().to_f64_lossy(),
            });
        }
        Ok(Self::assemble(a, m, u, xi))
    }

    /// Skips the structural checks; callers guarantee the tags.
    pub(crate) fn assemble(
        a: ComplexOperator<T>,
        m: ComplexOperator<T>,
        u: ComplexOperator<T>,
        xi: Ket<T>,
    ) -> Self {
        debug_assert!(a.is_hermitian() && m.is_hermitian() && u.is_unitary());
        MeasurementModel {
            object_dim: a.dim(),
            probe_dim: m.dim(),
            xi,
            u,
            m,
            a,
            cache: ModelCache {
                heisenberg: OnceLock::new(),
                noise: OnceLock::new(),
                probe_spectrum: OnceLock::new(),
            },
        }
    }

    pub fn object_dim(&self) -> usize {
        self.object_dim
    }
    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }
    pub fn composite_dim(&self) -> usize {
        self.object_dim * self.probe_dim
    }
    pub fn xi(&self) -> &Ket<T> {
        &self.xi
    }
    pub fn u(&self) -> &ComplexOperator<T> {
        &self.u
    }
    pub fn m(&self) -> &ComplexOperator<T> {
        &self.m
    }
    pub fn a(&self) -> &ComplexOperator<T> {
        &self.a
    }

    /// `ψ ⊗ ξ`.
    pub fn input(&self, psi: &Ket<T>) -> Result<Ket<T>> {
        psi.check_dim(self.object_dim, "psi")?;
        psi.require_normalized("psi")?;
        Ok(psi.kron(&self.xi))
    }

    /// `M(t+Δt) = U†(I ⊗ M)U`.
    pub fn heisenberg_probe(&self) -> &ComplexOperator<T> {
        self.cache.heisenberg.get_or_init(|| {
            on_probe(self.object_dim, &self.m)
                .conjugate_by(&self.u)
                .expect("dims validated at construction")
        })
    }

    /// `N = M(t+Δt) − A ⊗ I`.
    pub fn noise_operator(&self) -> &ComplexOperator<T> {
        self.cache.noise.get_or_init(|| {
            self.heisenberg_probe() - &on_object(&self.a, self.probe_dim)
        })
    }

    fn probe_spectrum(&self) -> &SpectralDecomposition<T> {
        self.cache
            .probe_spectrum
            .get_or_init(|| spectral(&self.m).expect("M is hermitian"))
    }

    /// Probability of each spectral value of the probe observable after the
    /// interaction, for input `ψ`.
    ///
    /// Uses `E^{U†(I⊗M)U}({m}) = U†(I ⊗ E^M({m}))U`, so only the probe
    /// observable has to be diagonalized.
    pub fn outcome_distribution(&self, psi: &Ket<T>) -> Result<OutcomeDistribution<T>> {
        let out = self.u.apply(&self.input(psi)?)?;
        let p = self.probe_dim;
        let amps = out.amps();
        let spec = self.probe_spectrum();
        let outcomes = spec
            .spaces
            .iter()
            .map(|space| {
                let mut prob = T::zero();
                for block in amps.chunks(p) {
                    for b in &space.basis {
                        let ov = b
                            .amps()
                            .iter()
                            .zip(block)
                            .fold(C::zero(), |acc, (x, y)| acc + x.conj() * y);
                        prob = prob + ov.norm_sqr();
                    }
                }
                Outcome {
                    value: space.value,
                    probability: clamp_probability(prob),
                }
            })
            .collect();
        Ok(OutcomeDistribution { outcomes })
    }

    /// Largest discrepancy between the outcome statistics and the Born
    /// statistics of `A` in `ψ`. Outcome values outside the spectrum of `A`
    /// count with their full probability.
    pub fn bsf_deviation(&self, psi: &Ket<T>) -> Result<T> {
        let dist = self.outcome_distribution(psi)?;
        let born = born_distribution(&self.a, psi)?;
        Ok(distribution_deviation(&dist, &born))
    }

    /// `ε(ψ)² = ⟨ψ⊗ξ|N²|ψ⊗ξ⟩ = ‖N(ψ⊗ξ)‖²`.
    pub fn noise_sq(&self, psi: &Ket<T>) -> Result<T> {
        let v = self.input(psi)?;
        Ok(self.noise_operator().apply(&v)?.norm_sqr())
    }

    /// Root-mean-square error `ε(ψ)`.
    pub fn noise(&self, psi: &Ket<T>) -> Result<T> {
        Ok(self.noise_sq(psi)?.sqrt())
    }

    /// `(ΔN)²` in `ψ ⊗ ξ`.
    pub fn noise_variance(&self, psi: &Ket<T>) -> Result<T> {
        let v = self.input(psi)?;
        crate::linalg::variance(self.noise_operator(), &v)
    }

    /// `(I ⊗ ⟨ξ|) N² (I ⊗ |ξ⟩)`, whose expectation in `ψ` is `ε(ψ)²`.
    pub fn noise_partial_expectation(&self) -> ComplexOperator<T> {
        self.noise_operator()
            .square()
            .partial_expectation_right(&self.xi)
            .expect("dims validated at construction")
    }

    /// Worst-case noise `ε = sup_ψ ε(ψ)`, the square root of the largest
    /// eigenvalue of the partial expectation of `N²`.
    pub fn sup_noise(&self) -> T {
        self.sup_noise_sq().sqrt()
    }

    pub fn sup_noise_sq(&self) -> T {
        let b = self.noise_partial_expectation();
        let eig = eigh(&b).expect("hermitian partial expectation");
        eig.values.last().copied().unwrap_or_else(T::zero).max(T::zero())
    }

    /// `P_e(ψ) = ε(ψ)²` (ℏ = 1) for a spin-½ observable with spectrum `{−½, ½}`.
    pub fn error_probability(&self, psi: &Ket<T>) -> Result<T> {
        require_spin_half_spectrum(&self.a)?;
        self.noise_sq(psi)
    }
}

fn clamp_probability<T: Real>(p: T) -> T {
    debug_assert!(p >= -T::tol(PROBABILITY_TOL) && p <= T::one() + T::tol(PROBABILITY_TOL));
    p.max(T::zero()).min(T::one())
}

pub(crate) fn require_spin_half_spectrum<T: Real>(a: &ComplexOperator<T>) -> Result<()> {
    let tol = T::tol(DEGENERACY_TOL);
    let ok = a.dim() == 2 && {
        let spec = spectral(a)?;
        spec.len() == 2
            && (spec.eigenvalues[0] + T::of(0.5)).abs() <= tol
            && (spec.eigenvalues[1] - T::of(0.5)).abs() <= tol
    };
    if !ok {
        return Err(Error::Precondition(
            "error probability needs a two-level observable with spectrum {-1/2, +1/2}".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome<T: Real = f64> {
    pub value: T,
    pub probability: T,
}

/// Outcome values (distinct, ascending) with their probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution<T: Real = f64> {
    pub outcomes: Vec<Outcome<T>>,
}

impl<T: Real> OutcomeDistribution<T> {
    pub fn total(&self) -> T {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// `Pr{x ∈ [lo, hi]}`: the mass on spectral values inside the interval.
    pub fn probability_in(&self, lo: T, hi: T) -> T {
        self.outcomes
            .iter()
            .filter(|o| o.value >= lo && o.value <= hi)
            .map(|o| o.probability)
            .sum()
    }

    pub fn probability_of(&self, value: T) -> T {
        let tol = T::tol(DEGENERACY_TOL);
        self.probability_in(value - tol, value + tol)
    }
}

/// `‖E^A({a})ψ‖²` for each spectral value `a` of `A`.
pub fn born_distribution<T: Real>(
    a: &ComplexOperator<T>,
    psi: &Ket<T>,
) -> Result<OutcomeDistribution<T>> {
    psi.check_dim(a.dim(), "psi")?;
    psi.require_normalized("psi")?;
    let spec = spectral(a)?;
    let outcomes = spec
        .spaces
        .iter()
        .map(|space| {
            let prob = space
                .basis
                .iter()
                .map(|b| b.inner(psi).map(|z| z.norm_sqr()))
                .sum::<Result<T>>()?;
            Ok(Outcome {
                value: space.value,
                probability: clamp_probability(prob),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OutcomeDistribution { outcomes })
}

/// Max over values of the absolute probability difference, matching values
/// within [`DEGENERACY_TOL`]. Values present in only one distribution count
/// with their full probability.
pub fn distribution_deviation<T: Real>(
    observed: &OutcomeDistribution<T>,
    reference: &OutcomeDistribution<T>,
) -> T {
    let tol = T::tol(DEGENERACY_TOL);
    let mut worst = T::zero();
    for r in &reference.outcomes {
        let p: T = observed
            .outcomes
            .iter()
            .filter(|o| (o.value - r.value).abs() <= tol)
            .map(|o| o.probability)
            .sum();
        worst = worst.max((p - r.probability).abs());
    }
    for o in &observed.outcomes {
        let matched = reference
            .outcomes
            .iter()
            .any(|r| (o.value - r.value).abs() <= tol);
        if !matched {
            worst = worst.max(o.probability);
        }
    }
    worst
}
