//! Additive conservation laws, Yanase's condition, the uncertainty-relation
//! chain behind the noise bounds, and the bounds themselves.
//!
//! All quantities are evaluated in the product state `ψ ⊗ ξ`, with ℏ = 1.


use crate::error::{Error, Result};
use crate::linalg::{braket, commutator, commutator_norm, on_object, on_probe, variance,
    ComplexOperator, Ket};
use crate::measurement::MeasurementModel;
use crate::scalar::Real;
use crate::spin::spin_operators;

/// Residual below which the conservation law counts as satisfied.
pub const ACL_TOL: f64 = 1e-10;
/// Residual below which derived identities and Yanase's condition are assumed.
pub const PRECONDITION_TOL: f64 = 1e-9;
/// Slack on every inequality check.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Numerators and denominators below this count as zero.
pub const DEGENERATE_TOL: f64 = 1e-14;

/// Conserved quantities `L1` on the object and `L2` on the probe.
#[derive(Clone, Debug)]
pub struct ConservationPair<T: Real = f64> {
    l1: ComplexOperator<T>,
    l2: ComplexOperator<T>,
}

impl<T: Real> ConservationPair<T> {
    pub fn new(l1: ComplexOperator<T>, l2: ComplexOperator<T>) -> Result<Self> {
        let l1 = if l1.is_hermitian() { l1 } else { l1.into_hermitian("L1")? };
        let l2 = if l2.is_hermitian() { l2 } else { l2.into_hermitian("L2")? };
        Ok(ConservationPair { l1, l2 })
    }

    pub fn l1(&self) -> &ComplexOperator<T> {
        &self.l1
    }

    pub fn l2(&self) -> &ComplexOperator<T> {
        &self.l2
    }

    /// `L1 ⊗ I + I ⊗ L2`.
    pub fn total(&self) -> ComplexOperator<T> {
        &on_object(&self.l1, self.l2.dim()) + &on_probe(self.l1.dim(), &self.l2)
    }

    fn check_model(&self, model: &MeasurementModel<T>) -> Result<()> {
        self.l1.check_dim(model.object_dim(), "L1")?;
        self.l2.check_dim(model.probe_dim(), "L2")
    }
}

/// `‖[U, L1⊗I + I⊗L2]‖_F`.
pub fn acl_residual<T: Real>(model: &MeasurementModel<T>, pair: &ConservationPair<T>) -> Result<T> {
    pair.check_model(model)?;
    commutator_norm(model.u(), &pair.total())
}

/// `‖U†(L1⊗I + I⊗L2)U − (L1⊗I + I⊗L2)‖_F`.
pub fn invariance_residual<T: Real>(
    model: &MeasurementModel<T>,
    pair: &ConservationPair<T>,
) -> Result<T> {
    pair.check_model(model)?;
    let total = pair.total();
    Ok((&total.conjugate_by(model.u())? - &total).frobenius_norm())
}

/// `‖[M, L2]‖_F`.
pub fn yanase_residual<T: Real>(m: &ComplexOperator<T>, l2: &ComplexOperator<T>) -> Result<T> {
    commutator_norm(m, l2)
}

/// Operators shared by every state-dependent quantity of one model and
/// conservation pair.
#[derive(Clone, Debug)]
pub struct BoundEvaluator<'a, T: Real = f64> {
    model: &'a MeasurementModel<T>,
    pair: &'a ConservationPair<T>,
    l1_obj: ComplexOperator<T>,
    l2_probe: ComplexOperator<T>,
    total: ComplexOperator<T>,
    /// `U†[I⊗M, I⊗L2]U`
    probe_term: ComplexOperator<T>,
    /// `[A⊗I, L1⊗I]`
    object_term: ComplexOperator<T>,
    /// `[N, L1⊗I + I⊗L2]`
    noise_commutator: ComplexOperator<T>,
    acl_residual: T,
    yanase_residual: T,
}

impl<'a, T: Real> BoundEvaluator<'a, T> {
    pub fn new(model: &'a MeasurementModel<T>, pair: &'a ConservationPair<T>) -> Result<Self> {
        pair.check_model(model)?;
        let (od, pd) = (model.object_dim(), model.probe_dim());
        let l1_obj = on_object(pair.l1(), pd);
        let l2_probe = on_probe(od, pair.l2());
        let total = &l1_obj + &l2_probe;
        let probe_term =
            commutator(&on_probe(od, model.m()), &l2_probe)?.conjugate_by(model.u())?;
        let object_term = commutator(&on_object(model.a(), pd), &l1_obj)?;
        let noise_commutator = commutator(model.noise_operator(), &total)?;
        let acl_residual = commutator_norm(model.u(), &total)?;
        let yanase_residual = yanase_residual(model.m(), pair.l2())?;
        Ok(BoundEvaluator {
            model,
            pair,
            l1_obj,
            l2_probe,
            total,
            probe_term,
            object_term,
            noise_commutator,
            acl_residual,
            yanase_residual,
        })
    }

    pub fn acl_residual(&self) -> T {
        self.acl_residual
    }

    pub fn yanase_residual(&self) -> T {
        self.yanase_residual
    }

    pub fn acl_holds(&self) -> bool {
        self.acl_residual < T::tol(ACL_TOL)
    }

    pub fn yanase_holds(&self) -> bool {
        self.yanase_residual < T::tol(PRECONDITION_TOL)
    }

    /// `‖[N, L_tot] − (U†[I⊗M, I⊗L2]U − [A⊗I, L1⊗I])‖_F`; only defined under
    /// the conservation law.
    pub fn commutator_identity_residual(&self) -> Result<T> {
        if !(self.acl_residual < T::tol(PRECONDITION_TOL)) {
            return Err(Error::Precondition(format!(
                "commutator identity needs the conservation law (residual {})",
                self.acl_residual
            )));
        }
        let rhs = &self.probe_term - &self.object_term;
        Ok((&self.noise_commutator - &rhs).frobenius_norm())
    }

    /// `((ΔN)²(ΔL_tot)², ¼|⟨[N, L_tot]⟩|²)`.
    pub fn uncertainty_pair(&self, psi: &Ket<T>) -> Result<(T, T)> {
        let v = self.model.input(psi)?;
        let dn = variance(self.model.noise_operator(), &v)?;
        let dl = variance(&self.total, &v)?;
        let c = braket(&v, &self.noise_commutator, &v)?;
        Ok((dn * dl, T::of(0.25) * c.norm_sqr()))
    }

    /// `4Δ²L1 + 4Δ²L2` in `ψ ⊗ ξ`.
    fn denominator(&self, v: &Ket<T>) -> Result<T> {
        let four = T::of(4.0);
        Ok(four * variance(&self.l1_obj, v)? + four * variance(&self.l2_probe, v)?)
    }

    /// `|⟨U†[I⊗M, I⊗L2]U − [A⊗I, L1⊗I]⟩|² / (4Δ²L1 + 4Δ²L2)`.
    pub fn fundamental_bound(&self, psi: &Ket<T>) -> Result<T> {
        let v = self.model.input(psi)?;
        let num = (braket(&v, &self.probe_term, &v)? - braket(&v, &self.object_term, &v)?)
            .norm_sqr();
        Ok(ratio_bound(num, self.denominator(&v)?))
    }

    /// `|⟨[A⊗I, L1⊗I]⟩|² / (4Δ²L1 + 4Δ²L2)`, valid under Yanase's condition.
    pub fn yanase_bound(&self, psi: &Ket<T>) -> Result<T> {
        if !self.yanase_holds() {
            return Err(Error::Precondition(format!(
                "Yanase's condition [M, L2] = 0 fails (residual {})",
                self.yanase_residual
            )));
        }
        let v = self.model.input(psi)?;
        let num = braket(&v, &self.object_term, &v)?.norm_sqr();
        Ok(ratio_bound(num, self.denominator(&v)?))
    }

    /// `⟨Ŝ_y⟩² / (4Δ²Ŝ_z + 4Δ²L2)` in the spin-½ scenario `A = Ŝ_x`, `L1 = Ŝ_z`.
    pub fn spin_bound(&self, psi: &Ket<T>) -> Result<T> {
        spin_bound(self.model, self.pair, psi)
    }

    /// Every quantity at once. Quantities whose precondition fails are `None`.
    pub fn report(&self, psi: &Ket<T>) -> Result<BoundReport<T>> {
        let (uncertainty_lhs, uncertainty_rhs) = self.uncertainty_pair(psi)?;
        Ok(BoundReport {
            eps_sq: self.model.noise_sq(psi)?,
            noise_variance: self.model.noise_variance(psi)?,
            fundamental_bound: self.fundamental_bound(psi)?,
            yanase_bound: self.yanase_bound(psi).ok(),
            spin_bound: self.spin_bound(psi).ok(),
            acl_residual: self.acl_residual,
            invariance_residual: invariance_residual(self.model, self.pair)?,
            yanase_residual: self.yanase_residual,
            commutator_identity_residual: self.commutator_identity_residual().ok(),
            variance_additivity_residual: variance_additivity_residual(
                self.pair,
                psi,
                self.model.xi(),
            )?,
            uncertainty_lhs,
            uncertainty_rhs,
        })
    }
}

/// Zero when both parts vanish, `+∞` when only the denominator does.
fn ratio_bound<T: Real>(num: T, den: T) -> T {
    let tiny = T::of(DEGENERATE_TOL);
    if den < tiny {
        if num < tiny {
            T::zero()
        } else {
            T::infinity()
        }
    } else {
        num / den
    }
}

pub fn commutator_identity_residual<T: Real>(
    model: &MeasurementModel<T>,
    pair: &ConservationPair<T>,
) -> Result<T> {
    BoundEvaluator::new(model, pair)?.commutator_identity_residual()
}

pub fn uncertainty_pair<T: Real>(
    model: &MeasurementModel<T>,
    pair: &ConservationPair<T>,
    psi: &Ket<T>,
) -> Result<(T, T)> {
    BoundEvaluator::new(model, pair)?.uncertainty_pair(psi)
}

/// `|Δ²(L1⊗I + I⊗L2) − Δ²(L1⊗I) − Δ²(I⊗L2)|` in `ψ ⊗ ξ`.
pub fn variance_additivity_residual<T: Real>(
    pair: &ConservationPair<T>,
    psi: &Ket<T>,
    xi: &Ket<T>,
) -> Result<T> {
    psi.check_dim(pair.l1().dim(), "psi")?;
    xi.check_dim(pair.l2().dim(), "xi")?;
    let v = psi.kron(xi);
    let l1 = on_object(pair.l1(), xi.dim());
    let l2 = on_probe(psi.dim(), pair.l2());
    let total = &l1 + &l2;
    Ok((variance(&total, &v)? - variance(&l1, &v)? - variance(&l2, &v)?).abs())
}

pub fn fundamental_bound<T: Real>(
    model: &MeasurementModel<T>,
    pair: &ConservationPair<T>,
    psi: &Ket<T>,
) -> Result<T> {
    BoundEvaluator::new(model, pair)?.fundamental_bound(psi)
}

pub fn yanase_bound<T: Real>(
    model: &MeasurementModel<T>,
    pair: &ConservationPair<T>,
    psi: &Ket<T>,
) -> Result<T> {
    BoundEvaluator::new(model, pair)?.yanase_bound(psi)
}

/// Bound for measuring `Ŝ_x` under conservation of total `z` angular
/// momentum: `⟨Ŝ_y⟩² / (4Δ²Ŝ_z + 4Δ²L2)`, with `ψ` on the object and `ξ`
/// on the probe.
pub fn spin_bound<T: Real>(
    model: &MeasurementModel<T>,
    pair: &ConservationPair<T>,
    psi: &Ket<T>,
) -> Result<T> {
    pair.check_model(model)?;
    let s = spin_operators::<T>();
    let tol = T::tol(PRECONDITION_TOL);
    if model.object_dim() != 2
        || (model.a() - &s.sx).frobenius_norm() > tol
        || (pair.l1() - &s.sz).frobenius_norm() > tol
    {
        return Err(Error::Precondition(
            "spin bound needs a spin-½ object with A = Sx and L1 = Sz".into(),
        ));
    }
    let yr = yanase_residual(model.m(), pair.l2())?;
    if !(yr < tol) {
        return Err(Error::Precondition(format!(
            "Yanase's condition [M, L2] = 0 fails (residual {yr})"
        )));
    }
    psi.check_dim(2, "psi")?;
    let sy = crate::linalg::expectation(&s.sy, psi)?;
    let den = T::of(4.0) * variance(&s.sz, psi)? + T::of(4.0) * variance(pair.l2(), model.xi())?;
    Ok(ratio_bound(sy * sy, den))
}

fn require_variance<T: Real>(v: T, what: &str) -> Result<()> {
    if !(v >= T::zero()) {
        return Err(Error::InvalidArgument(format!("{what} must be nonnegative, got {v}")));
    }
    Ok(())
}

/// `1/(4 + 16·Δ²m̂_z)`: the lower bound on `ε(α_y)²` and on the maximal
/// error probability for a spin-½ readout with probe variance `Δ²m̂_z`.
pub fn optimal_spin_bound<T: Real>(delta_mz_sq: T) -> Result<T> {
    require_variance(delta_mz_sq, "probe variance")?;
    Ok((T::of(4.0) + T::of(16.0) * delta_mz_sq).recip())
}

/// `1/(2 + 8·Δ²m̂_z)`, the lower bound on the unsuccessful-probability sum.
pub fn improved_yw_bound<T: Real>(delta_mz_sq: T) -> Result<T> {
    require_variance(delta_mz_sq, "probe variance")?;
    Ok((T::of(2.0) + T::of(8.0) * delta_mz_sq).recip())
}

/// The older large-apparatus bound `1/(8⟨m̂_z²⟩)` next to the improved
/// `1/(2 + 8Δ²m̂_z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundComparison<T: Real = f64> {
    /// `+∞` when `⟨m̂_z²⟩ = 0`.
    pub old: T,
    pub new: T,
}

pub fn bound_comparison<T: Real>(delta_mz_sq: T, mean_mz: T) -> Result<BoundComparison<T>> {
    require_variance(delta_mz_sq, "probe variance")?;
    let second_moment = delta_mz_sq + mean_mz * mean_mz;
    let old = if second_moment > T::zero() {
        (T::of(8.0) * second_moment).recip()
    } else {
        T::infinity()
    };
    Ok(BoundComparison {
        old,
        new: improved_yw_bound(delta_mz_sq)?,
    })
}

/// Everything evaluated for one model, conservation pair and input state.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T: Real = f64> {
    pub eps_sq: T,
    /// `(ΔN)²`
    pub noise_variance: T,
    pub fundamental_bound: T,
    pub yanase_bound: Option<T>,
    pub spin_bound: Option<T>,
    pub acl_residual: T,
    pub invariance_residual: T,
    pub yanase_residual: T,
    pub commutator_identity_residual: Option<T>,
    pub variance_additivity_residual: T,
    pub uncertainty_lhs: T,
    pub uncertainty_rhs: T,
}

/// One inequality of the report, `lhs ≥ rhs − tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityCheck<T: Real = f64> {
    pub name: &'static str,
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

impl<T: Real> BoundReport<T> {
    pub fn acl_holds(&self) -> bool {
        self.acl_residual < T::tol(ACL_TOL)
    }

    /// The inequalities that apply to this report. The bounds are only
    /// claimed under the conservation law.
    pub fn checks(&self) -> Vec<InequalityCheck<T>> {
        let tol = T::tol(INEQUALITY_TOL);
        let check = |name, lhs: T, rhs: T| InequalityCheck {
            name,
            lhs,
            rhs,
            holds: lhs >= rhs - tol,
        };
        let mut out = vec![
            check("eps_sq >= noise_variance", self.eps_sq, self.noise_variance),
            check("uncertainty", self.uncertainty_lhs, self.uncertainty_rhs),
        ];
        if self.acl_holds() {
            out.push(check("eps_sq >= fundamental_bound", self.eps_sq, self.fundamental_bound));
            if let Some(b) = self.yanase_bound {
                out.push(check("eps_sq >= yanase_bound", self.eps_sq, b));
            }
            if let Some(b) = self.spin_bound {
                out.push(check("eps_sq >= spin_bound", self.eps_sq, b));
            }
        }
        out
    }

    pub fn all_hold(&self) -> bool {
        self.checks().iter().all(|c| c.holds)
    }
}
