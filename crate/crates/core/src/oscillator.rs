//! Two-mode truncated Fock space for a harmonic-oscillator probe carrying
//! `z` angular momentum, `m̂_z = i(a_x a_y† − a_x† a_y)`.
//!
//! The third oscillator mode does not enter `m̂_z` and is left out.

use num_traits::Zero;

use crate::bounds::optimal_spin_bound;
use crate::error::{Error, Result};
use crate::linalg::{ComplexOperator, Ket, Structure};
use crate::scalar::{Real, C};

/// Largest Poisson tail mass a truncated coherent state may drop.
pub const TRUNCATION_TAIL_TOL: f64 = 1e-8;

/// Two modes, each cut off above `n_max` quanta. Basis index `n_x·(n_max+1) + n_y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be positive".into()));
        }
        Ok(FockSpace { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn mode_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        self.mode_dim() * self.mode_dim()
    }

    /// Smallest cutoff at which coherent states with these mean occupations
    /// pass both the `|α|²+|β|² ≤ n_max/4` guard and the tail check.
    pub fn required_for(alpha_sq: f64, beta_sq: f64) -> FockSpace {
        let mut n_max = ((4.0 * (alpha_sq + beta_sq)).ceil() as usize).max(1);
        while poisson_tail(alpha_sq, n_max) >= TRUNCATION_TAIL_TOL
            || poisson_tail(beta_sq, n_max) >= TRUNCATION_TAIL_TOL
        {
            n_max += 1;
        }
        FockSpace { n_max }
    }
}

/// `P(n > n_max)` for a Poisson law with mean `mean`.
fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    let mut term = (-mean).exp();
    let mut head = term;
    for n in 1..=n_max {
        term *= mean / n as f64;
        head += term;
    }
    (1.0 - head).max(0.0)
}

/// `occupation > n_max/4`, up to rounding in the occupation.
fn exceeds_guard(occupation: f64, n_max: usize) -> bool {
    occupation > n_max as f64 / 4.0 * (1.0 + 1e-12)
}

/// Single-mode annihilation operator on `{|0⟩, …, |n_max⟩}`.
pub fn annihilation<T: Real>(n_max: usize) -> ComplexOperator<T> {
    let d = n_max + 1;
    let mut data = vec![C::zero(); d * d];
    for n in 1..d {
        data[(n - 1) * d + n] = C::new(T::of(n as f64).sqrt(), T::zero());
    }
    ComplexOperator::from_row_major(d, data).expect("square")
}

/// Single-mode number operator.
pub fn number<T: Real>(n_max: usize) -> ComplexOperator<T> {
    let vals: Vec<T> = (0..=n_max).map(|n| T::of(n as f64)).collect();
    ComplexOperator::diagonal(&vals)
}

/// Truncated coherent state `e^{−|a|²/2} Σ aⁿ/√n! |n⟩`, renormalized.
pub fn coherent_state<T: Real>(amp: C<T>, n_max: usize) -> Result<Ket<T>> {
    let mean = amp.norm_sqr().to_f64_lossy();
    if exceeds_guard(mean, n_max) {
        return Err(Error::InvalidArgument(format!(
            "cutoff n_max = {n_max} too small for |amp|^2 = {mean} (need |amp|^2 <= n_max/4)"
        )));
    }
    let tail = poisson_tail(mean, n_max);
    if tail >= TRUNCATION_TAIL_TOL {
        return Err(Error::InvalidArgument(format!(
            "cutoff n_max = {n_max} drops tail mass {tail:.3e} for |amp|^2 = {mean}"
        )));
    }
    let mut amps = Vec::with_capacity(n_max + 1);
    let mut c = C::new((-amp.norm_sqr() * T::of(0.5)).exp(), T::zero());
    amps.push(c);
    for n in 1..=n_max {
        c = c * amp / T::of(n as f64).sqrt();
        amps.push(c);
    }
    Ket::normalize(amps)
}

/// Coherent amplitudes of the two modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentAmplitudes<T: Real = f64> {
    alpha: C<T>,
    beta: C<T>,
}

impl<T: Real> CoherentAmplitudes<T> {
    /// Amplitudes usable on `space`: `|α|² + |β|² ≤ n_max/4`.
    pub fn new(alpha: C<T>, beta: C<T>, space: FockSpace) -> Result<Self> {
        let total = (alpha.norm_sqr() + beta.norm_sqr()).to_f64_lossy();
        if exceeds_guard(total, space.n_max()) {
            return Err(Error::InvalidArgument(format!(
                "|alpha|^2 + |beta|^2 = {total} exceeds n_max/4 = {}",
                space.n_max() as f64 / 4.0
            )));
        }
        Ok(CoherentAmplitudes { alpha, beta })
    }

    /// Amplitudes without a cutoff, for closed-form use only.
    pub fn unbounded(alpha: C<T>, beta: C<T>) -> Self {
        CoherentAmplitudes { alpha, beta }
    }

    pub fn alpha(&self) -> C<T> {
        self.alpha
    }

    pub fn beta(&self) -> C<T> {
        self.beta
    }

    /// `|α|² + |β|²`, the predicted `Δ²m̂_z`.
    pub fn total_occupation(&self) -> T {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    /// `|α⟩ ⊗ |β⟩` on `space`.
    pub fn state(&self, space: FockSpace) -> Result<Ket<T>> {
        let a = coherent_state(self.alpha, space.n_max())?;
        let b = coherent_state(self.beta, space.n_max())?;
        Ok(a.kron(&b))
    }
}

/// Dense `m̂_z` on the truncated two-mode space. Quadratic in `space.dim()`;
/// use [`apply_m_z`] for large cutoffs.
pub fn m_z_operator<T: Real>(space: FockSpace) -> ComplexOperator<T> {
    let dim = space.dim();
    let mut data = vec![C::zero(); dim * dim];
    for_each_m_z_entry::<T>(space, |row, col, z| data[row * dim + col] = data[row * dim + col] + z);
    ComplexOperator::from_row_major(dim, data)
        .expect("square")
        .with_structure(Structure::HERMITIAN)
}

/// `m̂_z v` without forming the matrix.
pub fn apply_m_z<T: Real>(space: FockSpace, v: &Ket<T>) -> Result<Ket<T>> {
    v.check_dim(space.dim(), "two-mode state")?;
    let src = v.amps();
    let mut out = vec![C::zero(); space.dim()];
    for_each_m_z_entry::<T>(space, |row, col, z| out[row] = out[row] + z * src[col]);
    Ket::unnormalized(out)
}

/// Visits the nonzero entries `(row, col, value)` of `m̂_z`.
///
/// `a_x a_y†|n_x, n_y⟩ = √(n_x (n_y+1)) |n_x−1, n_y+1⟩`, and `a_x† a_y` is
/// its adjoint; the coefficient of the first is `+i`, of the second `−i`.
fn for_each_m_z_entry<T: Real>(space: FockSpace, mut visit: impl FnMut(usize, usize, C<T>)) {
    let d = space.mode_dim();
    let idx = |nx: usize, ny: usize| nx * d + ny;
    for nx in 1..d {
        for ny in 0..(d - 1) {
            let w = T::of((nx * (ny + 1)) as f64).sqrt();
            let from = idx(nx, ny);
            let to = idx(nx - 1, ny + 1);
            visit(to, from, C::new(T::zero(), w));
            visit(from, to, C::new(T::zero(), -w));
        }
    }
}

/// `(⟨m̂_z⟩, Δ²m̂_z)` in a normalized two-mode state.
pub fn m_z_moments<T: Real>(space: FockSpace, v: &Ket<T>) -> Result<(T, T)> {
    v.require_normalized("two-mode state")?;
    let mv = apply_m_z(space, v)?;
    let mean = v.inner(&mv)?.re;
    let centered = mv.add_scaled(C::new(-mean, T::zero()), v)?;
    Ok((mean, centered.norm_sqr()))
}

/// Total number operator `n_x + n_y` (diagonal) on the two-mode space.
pub fn total_number<T: Real>(space: FockSpace) -> ComplexOperator<T> {
    let d = space.mode_dim();
    let vals: Vec<T> = (0..space.dim())
        .map(|k| T::of((k / d + k % d) as f64))
        .collect();
    ComplexOperator::diagonal(&vals)
}

/// `1/(4 + 16(|α|² + |β|²))`.
pub fn oscillator_bound<T: Real>(amp: &CoherentAmplitudes<T>) -> T {
    optimal_spin_bound(amp.total_occupation()).expect("occupation is nonnegative")
}
