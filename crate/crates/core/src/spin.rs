//! Spin-½ operators and bases, the built-in demonstration models, and the
//! partially specified two-branch interaction with its unsuccessful
//! probabilities.

use num_traits::{One, Zero};

use crate::bounds::ConservationPair;
use crate::error::{Error, Result};
use crate::linalg::{spectral, ComplexOperator, Ket};
use crate::measurement::MeasurementModel;
use crate::scalar::{cr, Real, C};

/// `Ŝ_x, Ŝ_y, Ŝ_z` in the z basis with ℏ = 1.
#[derive(Clone, Debug)]
pub struct SpinOperators<T: Real = f64> {
    pub sx: ComplexOperator<T>,
    pub sy: ComplexOperator<T>,
    pub sz: ComplexOperator<T>,
}

pub fn spin_operators<T: Real>() -> SpinOperators<T> {
    let h = T::of(0.5);
    let z = C::zero();
    let mk = |rows: [[C<T>; 2]; 2]| {
        ComplexOperator::from_rows(rows.iter().map(|r| r.to_vec()).collect())
            .and_then(|op| op.into_hermitian("spin operator"))
            .expect("spin operators are hermitian")
    };
    SpinOperators {
        sx: mk([[z, C::new(h, T::zero())], [C::new(h, T::zero()), z]]),
        sy: mk([[z, C::new(T::zero(), -h)], [C::new(T::zero(), h), z]]),
        sz: mk([[C::new(h, T::zero()), z], [z, C::new(-h, T::zero())]]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `α_axis = |Ŝ_axis = +½⟩` and `β_axis = |Ŝ_axis = −½⟩`.
#[derive(Clone, Debug)]
pub struct SpinBasis<T: Real = f64> {
    pub axis: Axis,
    pub up: Ket<T>,
    pub down: Ket<T>,
}

pub fn spin_basis<T: Real>(axis: Axis) -> SpinBasis<T> {
    let r = T::of(0.5).sqrt();
    let re = |x: T| C::new(x, T::zero());
    let (up, down) = match axis {
        Axis::X => ([re(r), re(r)], [re(r), re(-r)]),
        Axis::Y => (
            [re(r), C::new(T::zero(), r)],
            [re(r), C::new(T::zero(), -r)],
        ),
        Axis::Z => ([C::one(), C::zero()], [C::zero(), C::one()]),
    };
    SpinBasis {
        axis,
        up: Ket::new(up.to_vec()).expect("unit spinor"),
        down: Ket::new(down.to_vec()).expect("unit spinor"),
    }
}

/// Named spin-½ state: `alpha_x`, `beta_y`, ...
pub fn named_spin_state<T: Real>(name: &str) -> Option<Ket<T>> {
    let (kind, axis) = name.split_once('_')?;
    let axis = match axis {
        "x" => Axis::X,
        "y" => Axis::Y,
        "z" => Axis::Z,
        _ => return None,
    };
    let basis = spin_basis::<T>(axis);
    match kind {
        "alpha" => Some(basis.up),
        "beta" => Some(basis.down),
        _ => None,
    }
}

/// Two-qubit exchange gate.
pub fn swap_gate<T: Real>() -> ComplexOperator<T> {
    ComplexOperator::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
    .and_then(|u| u.into_unitary("SWAP"))
    .expect("permutation matrix")
}

/// Controlled flip: object (first factor) in `β_z` flips the probe.
pub fn cnot_gate<T: Real>() -> ComplexOperator<T> {
    ComplexOperator::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .and_then(|u| u.into_unitary("CNOT"))
    .expect("permutation matrix")
}

/// Exchange interaction reading `Ŝ_x` off a probe prepared in `α_x`.
///
/// Conserves total `Ŝ_z` and is noiseless, but its probe observable does
/// not commute with the probe's conserved quantity.
pub fn swap_demo_model<T: Real>() -> (MeasurementModel<T>, ConservationPair<T>) {
    let s = spin_operators::<T>();
    let model = MeasurementModel::new(
        s.sx.clone(),
        s.sx.clone(),
        swap_gate(),
        spin_basis(Axis::X).up,
    )
    .expect("valid demo model");
    let pair = ConservationPair::new(s.sz.clone(), s.sz).expect("hermitian pair");
    (model, pair)
}

/// No interaction and a null probe observable: every input reads 0.
pub fn trivial_demo_model<T: Real>() -> (MeasurementModel<T>, ConservationPair<T>) {
    let s = spin_operators::<T>();
    let model = MeasurementModel::new(
        s.sx.clone(),
        ComplexOperator::zeros(2),
        ComplexOperator::identity(4),
        spin_basis(Axis::Z).up,
    )
    .expect("valid demo model");
    let pair = ConservationPair::new(s.sz.clone(), s.sz).expect("hermitian pair");
    (model, pair)
}

/// Controlled-flip readout of `Ŝ_z`. Precise, but the flip does not
/// conserve total `Ŝ_z`.
pub fn cnot_demo_model<T: Real>() -> (MeasurementModel<T>, ConservationPair<T>) {
    let s = spin_operators::<T>();
    let model = MeasurementModel::new(
        s.sz.clone(),
        s.sz.clone(),
        cnot_gate(),
        spin_basis(Axis::Z).up,
    )
    .expect("valid demo model");
    let pair = ConservationPair::new(s.sz.clone(), s.sz).expect("hermitian pair");
    (model, pair)
}

/// Tolerance for the isometry, orthogonality and eigenvector conditions.
pub const YW_TOL: f64 = 1e-10;

/// Interaction specified only on `α_x ⊗ ξ` and `β_x ⊗ ξ`:
///
/// ```text
/// U(α_x ⊗ ξ) = α_x ⊗ ξ⁺ + β_x ⊗ η⁺
/// U(β_x ⊗ ξ) = β_x ⊗ ξ⁻ + α_x ⊗ η⁻
/// ```
///
/// with `M ξ± = ±½ ξ±` and the spectrum of `M` inside `[−½, ½]`.
#[derive(Clone, Debug)]
pub struct YWModel<T: Real = f64> {
    xi: Ket<T>,
    xi_plus: Ket<T>,
    xi_minus: Ket<T>,
    eta_plus: Ket<T>,
    eta_minus: Ket<T>,
    m: ComplexOperator<T>,
}

impl<T: Real> YWModel<T> {
    pub fn new(
        xi: Ket<T>,
        xi_plus: Ket<T>,
        xi_minus: Ket<T>,
        eta_plus: Ket<T>,
        eta_minus: Ket<T>,
        m: ComplexOperator<T>,
    ) -> Result<Self> {
        let p = xi.dim();
        xi.require_normalized("xi")?;
        for v in [&xi_plus, &xi_minus, &eta_plus, &eta_minus] {
            v.check_dim(p, "YW branch vector")?;
        }
        m.check_dim(p, "YW probe observable")?;
        let m = if m.is_hermitian() { m } else { m.into_hermitian("M")? };
        let tol = T::tol(YW_TOL);

        for (name, a, b) in [("+", &xi_plus, &eta_plus), ("-", &xi_minus, &eta_minus)] {
            let total = a.norm_sqr() + b.norm_sqr();
            if (total - T::one()).abs() > tol {
                return Err(Error::Precondition(format!(
                    "branch {name} is not an isometric image: ‖ξ‖² + ‖η‖² = {total}"
                )));
            }
        }
        let overlap = xi_plus.inner(&eta_minus)? + eta_plus.inner(&xi_minus)?;
        if overlap.norm() > tol {
            return Err(Error::Precondition(format!(
                "images of α_x⊗ξ and β_x⊗ξ are not orthogonal (overlap {})",
                overlap.norm()
            )));
        }
        let half = T::of(0.5);
        for (name, v, lambda) in [("xi_plus", &xi_plus, half), ("xi_minus", &xi_minus, -half)] {
            let mv = m.apply(v)?;
            let r = mv.add_scaled(C::new(-lambda, T::zero()), v)?.norm();
            if r > tol {
                return Err(Error::Precondition(format!(
                    "{name} is not an eigenvector of M with eigenvalue {lambda} (residual {r})"
                )));
            }
        }
        let spec = spectral(&m)?;
        let lo = spec.eigenvalues[0];
        let hi = *spec.eigenvalues.last().unwrap();
        if lo < -half - tol || hi > half + tol {
            return Err(Error::Precondition(format!(
                "spectrum of M must lie in [-1/2, 1/2], found [{lo}, {hi}]"
            )));
        }
        Ok(YWModel {
            xi,
            xi_plus,
            xi_minus,
            eta_plus,
            eta_minus,
            m,
        })
    }

    /// Hand-built sample on a three-level probe with `ε_Y² = 0.1`.
    ///
    /// `M = diag(½, −½, 0)`; the successful branches land on the `±½`
    /// levels and both unsuccessful branches on the null level.
    pub fn sample() -> Self {
        let e = |k: usize, w: f64| {
            let mut amps = vec![C::<T>::zero(); 3];
            amps[k] = cr(w.sqrt());
            Ket::unnormalized(amps).unwrap()
        };
        let m = ComplexOperator::diagonal(&[T::of(0.5), T::of(-0.5), T::zero()]);
        YWModel::new(
            Ket::basis(3, 2),
            e(0, 0.95),
            e(1, 0.95),
            e(2, 0.05),
            e(2, 0.05),
            m,
        )
        .expect("sample satisfies the invariants")
    }

    pub fn probe_dim(&self) -> usize {
        self.xi.dim()
    }
    pub fn xi(&self) -> &Ket<T> {
        &self.xi
    }
    pub fn xi_plus(&self) -> &Ket<T> {
        &self.xi_plus
    }
    pub fn xi_minus(&self) -> &Ket<T> {
        &self.xi_minus
    }
    pub fn eta_plus(&self) -> &Ket<T> {
        &self.eta_plus
    }
    pub fn eta_minus(&self) -> &Ket<T> {
        &self.eta_minus
    }
    pub fn m(&self) -> &ComplexOperator<T> {
        &self.m
    }

    /// `ε_Y² = ‖η⁺‖² + ‖η⁻‖²`.
    pub fn eps_y_sq(&self) -> T {
        self.eta_plus.norm_sqr() + self.eta_minus.norm_sqr()
    }

    /// `ε(α_y)² = ½‖(M − ½)η⁺‖² + ½‖(M + ½)η⁻‖²`, i.e. `P_e(α_y)` with ℏ = 1.
    pub fn error_at_alpha_y(&self) -> T {
        let half = T::of(0.5);
        let shifted = |v: &Ket<T>, lambda: T| {
            let mv = self.m.apply(v).expect("dims checked");
            mv.add_scaled(C::new(-lambda, T::zero()), v)
                .expect("dims checked")
                .norm_sqr()
        };
        half * shifted(&self.eta_plus, half) + half * shifted(&self.eta_minus, -half)
    }

    /// Compares `ε_Y²` with `1/(2 + 8·Δ²m̂_z)`; the probe variance is supplied
    /// by the caller.
    pub fn check_bound(&self, delta_mz_sq: T) -> Result<YWBoundCheck<T>> {
        let rhs = crate::bounds::improved_yw_bound(delta_mz_sq)?;
        let eps_y_sq = self.eps_y_sq();
        Ok(YWBoundCheck {
            eps_y_sq,
            rhs,
            pass: eps_y_sq >= rhs - T::tol(1e-9),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YWBoundCheck<T: Real = f64> {
    pub eps_y_sq: T,
    pub rhs: T,
    pub pass: bool,
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{acl_residual, yanase_residual};
    use crate::linalg::{commutator, eigh};

    fn op_close(a: &ComplexOperator<f64>, b: &ComplexOperator<f64>, tol: f64) {
        let d = (a - b).frobenius_norm();
        assert!(d < tol, "distance {d}");
    }

    /// ε(α_y)² from the partial action alone: `‖(I⊗M)Uv − U(A⊗I)v‖²`.
    fn direct_error_at_alpha_y(yw: &YWModel<f64>) -> f64 {
        // α_y = a α_x + b β_x and A α_y = ½a α_x − ½b β_x, in the x basis
        let a = C::new(0.5, 0.5);
        let b = C::new(0.5, -0.5);
        let image = |ca: C<f64>, cb: C<f64>| -> (Vec<C<f64>>, Vec<C<f64>>) {
            // coefficients of α_x ⊗ · and β_x ⊗ ·
            let up = yw
                .xi_plus()
                .amps()
                .iter()
                .zip(yw.eta_minus().amps())
                .map(|(p, e)| ca * p + cb * e)
                .collect();
            let down = yw
                .eta_plus()
                .amps()
                .iter()
                .zip(yw.xi_minus().amps())
                .map(|(e, m)| ca * e + cb * m)
                .collect();
            (up, down)
        };
        let (u_up, u_down) = image(a, b);
        let (r_up, r_down) = image(a * 0.5, b * -0.5);
        let m = yw.m();
        let apply = |v: &[C<f64>]| m.apply(&Ket::unnormalized(v.to_vec()).unwrap()).unwrap();
        let mut total = 0.0;
        for (uv, rv) in [(u_up, r_up), (u_down, r_down)] {
            let muv = apply(&uv);
            total += muv.amps().iter().zip(&rv).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>();
        }
        total
    }

    #[test]
    fn spin_operator_algebra() {
        let s = spin_operators::<f64>();
        let i = C::new(0.0, 1.0);
        op_close(&commutator(&s.sx, &s.sz).unwrap(), &s.sy.scale(-i), 1e-15);
        op_close(&commutator(&s.sx, &s.sy).unwrap(), &s.sz.scale(i), 1e-15);
        op_close(&commutator(&s.sy, &s.sz).unwrap(), &s.sx.scale(i), 1e-15);
        op_close(&commutator(&s.sz, &s.sx).unwrap(), &s.sy.scale(i), 1e-15);
        let quarter = ComplexOperator::identity(2).scale_real(0.25);
        for x in [&s.sx, &s.sy, &s.sz] {
            op_close(&x.matmul(x), &quarter, 1e-15);
            let e = eigh(x).unwrap();
            assert!((e.values[0] + 0.5).abs() < 1e-15 && (e.values[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn bases_are_eigenvectors() {
        let s = spin_operators::<f64>();
        for (axis, op) in [(Axis::X, &s.sx), (Axis::Y, &s.sy), (Axis::Z, &s.sz)] {
            let b = spin_basis::<f64>(axis);
            let up = op.apply(&b.up).unwrap();
            let down = op.apply(&b.down).unwrap();
            for k in 0..2 {
                assert!((up.amps()[k] - b.up.amps()[k] * 0.5).norm() < 1e-15);
                assert!((down.amps()[k] + b.down.amps()[k] * 0.5).norm() < 1e-15);
            }
            assert!(b.up.inner(&b.down).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn alpha_y_in_x_basis() {
        let x = spin_basis::<f64>(Axis::X);
        let y = spin_basis::<f64>(Axis::Y);
        let rhs = x
            .up
            .scale(C::new(1.0, 1.0))
            .add_scaled(C::new(1.0, -1.0), &x.down)
            .unwrap();
        for k in 0..2 {
            assert!((y.up.amps()[k] * 2.0 - rhs.amps()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn named_states() {
        let a = named_spin_state::<f64>("alpha_y").unwrap();
        assert_eq!(a.amps(), spin_basis::<f64>(Axis::Y).up.amps());
        assert!(named_spin_state::<f64>("beta_z").is_some());
        assert!(named_spin_state::<f64>("gamma_x").is_none());
        assert!(named_spin_state::<f64>("alpha_w").is_none());
    }

    #[test]
    fn swap_witness() {
        let (model, pair) = swap_demo_model::<f64>();
        assert!(acl_residual(&model, &pair).unwrap() < 1e-12);
        assert!(model.sup_noise() < 1e-12);
        let y = yanase_residual(model.m(), pair.l2()).unwrap();
        assert!((y - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn yw_sample() {
        let yw = YWModel::<f64>::sample();
        assert!((yw.eps_y_sq() - 0.1).abs() < 1e-15);
        // the null level is off by ½ from both records
        assert!((yw.error_at_alpha_y() - 0.0125).abs() < 1e-15);
        assert!((direct_error_at_alpha_y(&yw) - yw.error_at_alpha_y()).abs() < 1e-15);
        assert!(2.0 * yw.error_at_alpha_y() <= yw.eps_y_sq());
    }

    #[test]
    fn perfect_yw_model_has_no_errors() {
        let m = ComplexOperator::<f64>::diagonal(&[0.5, -0.5]);
        let yw = YWModel::new(
            Ket::basis(2, 0),
            Ket::basis(2, 0),
            Ket::basis(2, 1),
            Ket::zeros(2),
            Ket::zeros(2),
            m,
        )
        .unwrap();
        assert_eq!(yw.eps_y_sq(), 0.0);
        assert_eq!(yw.error_at_alpha_y(), 0.0);
    }

    #[test]
    fn recorded_errors_can_be_noise_free() {
        // η⁺ on the +½ level and η⁻ on the −½ level: unsuccessful branches
        // that still record the right value
        let m = ComplexOperator::<f64>::diagonal(&[0.5, 0.5, -0.5, -0.5]);
        let w = |k: usize, x: f64| {
            let mut v = vec![C::new(0.0, 0.0); 4];
            v[k] = C::new(x.sqrt(), 0.0);
            Ket::unnormalized(v).unwrap()
        };
        let yw = YWModel::new(Ket::basis(4, 0), w(0, 0.8), w(2, 0.7), w(1, 0.2), w(3, 0.3), m)
            .unwrap();
        assert!((yw.eps_y_sq() - 0.5).abs() < 1e-15);
        assert!(yw.error_at_alpha_y().abs() < 1e-15);
        assert!(direct_error_at_alpha_y(&yw).abs() < 1e-15);
    }

    #[test]
    fn yw_rejects_invalid_data() {
        let m = ComplexOperator::<f64>::diagonal(&[0.5, -0.5, 0.0]);
        let e = |k| Ket::<f64>::basis(3, k);
        // not isometric
        assert!(YWModel::new(e(2), e(0), e(1), e(2), Ket::zeros(3), m.clone()).is_err());
        // ξ⁺ not a +½ eigenvector
        assert!(YWModel::new(e(2), e(1), e(1), Ket::zeros(3), Ket::zeros(3), m.clone()).is_err());
        // spectrum outside [−½, ½]
        let wide = ComplexOperator::<f64>::diagonal(&[0.5, -0.5, 0.9]);
        assert!(YWModel::new(e(2), e(0), e(1), Ket::zeros(3), Ket::zeros(3), wide).is_err());
        // images not orthogonal
        let h = 0.5f64.sqrt();
        let half = |k| e(k).scale(C::new(h, 0.0));
        assert!(YWModel::new(e(2), half(0), half(1), half(2), half(0), m).is_err());
    }

    #[test]
    fn yw_bound_check_rhs() {
        let yw = YWModel::<f64>::sample();
        let c = yw.check_bound(0.0).unwrap();
        assert_eq!(c.rhs, 0.5);
        assert!(!c.pass);
        let c = yw.check_bound(1.0).unwrap();
        assert!((c.rhs - 0.1).abs() < 1e-15);
        assert!(c.pass);
        assert!(yw.check_bound(-1.0).is_err());
    }

    #[test]
    fn single_precision_spin_algebra() {
        let s = spin_operators::<f32>();
        let c = commutator(&s.sx, &s.sz).unwrap();
        let expected = s.sy.scale(C::new(0.0, -1.0));
        assert!((&c - &expected).frobenius_norm() < 1e-6);
    }
}
