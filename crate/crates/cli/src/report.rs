//! Bound reports as JSON and CSV.

use serde::{Deserialize, Serialize};

use waylimit_core::bounds::{ACL_TOL, DEGENERATE_TOL, INEQUALITY_TOL, PRECONDITION_TOL};
use waylimit_core::linalg::{DEGENERACY_TOL, NORMALIZATION_TOL, STRUCTURE_TOL};
use waylimit_core::Report64;

use crate::schema::JsonNumber;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub acl: f64,
    pub precondition: f64,
    pub inequality: f64,
    pub degenerate_denominator: f64,
    pub degeneracy_merge: f64,
    pub structure: f64,
    pub normalization: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            acl: ACL_TOL,
            precondition: PRECONDITION_TOL,
            inequality: INEQUALITY_TOL,
            degenerate_denominator: DEGENERATE_TOL,
            degeneracy_merge: DEGENERACY_TOL,
            structure: STRUCTURE_TOL,
            normalization: NORMALIZATION_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub tool_version: String,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
}

impl Environment {
    pub fn new(seed: Option<u64>) -> Self {
        Environment {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub lhs: JsonNumber,
    pub rhs: JsonNumber,
    pub holds: bool,
}

/// A bound report plus the inequalities it was checked against.
/// Inapplicable quantities are `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub model: String,
    pub state: String,
    pub eps_sq: JsonNumber,
    pub noise_variance: JsonNumber,
    pub fundamental_bound: JsonNumber,
    pub yanase_bound: Option<JsonNumber>,
    pub spin_bound: Option<JsonNumber>,
    pub acl_residual: JsonNumber,
    pub invariance_residual: JsonNumber,
    pub yanase_residual: JsonNumber,
    pub commutator_identity_residual: Option<JsonNumber>,
    pub variance_additivity_residual: JsonNumber,
    pub uncertainty_lhs: JsonNumber,
    pub uncertainty_rhs: JsonNumber,
    pub checks: Vec<CheckEntry>,
    pub all_hold: bool,
    pub environment: Environment,
}

impl ReportFile {
    pub fn new(model: &str, state: &str, r: &Report64, env: Environment) -> Self {
        let n = JsonNumber::from;
        ReportFile {
            model: model.into(),
            state: state.into(),
            eps_sq: n(r.eps_sq),
            noise_variance: n(r.noise_variance),
            fundamental_bound: n(r.fundamental_bound),
            yanase_bound: r.yanase_bound.map(n),
            spin_bound: r.spin_bound.map(n),
            acl_residual: n(r.acl_residual),
            invariance_residual: n(r.invariance_residual),
            yanase_residual: n(r.yanase_residual),
            commutator_identity_residual: r.commutator_identity_residual.map(n),
            variance_additivity_residual: n(r.variance_additivity_residual),
            uncertainty_lhs: n(r.uncertainty_lhs),
            uncertainty_rhs: n(r.uncertainty_rhs),
            checks: r
                .checks()
                .into_iter()
                .map(|c| CheckEntry {
                    name: c.name.into(),
                    lhs: n(c.lhs),
                    rhs: n(c.rhs),
                    holds: c.holds,
                })
                .collect(),
            all_hold: r.all_hold(),
            environment: env,
        }
    }
}

/// 17 significant digits, `.` as separator, `inf`/`-inf`/`nan` sentinels.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        // adding zero folds -0 into 0
        format!("{:.16e}", x + 0.0)
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub const REPORT_CSV_HEADER: [&str; 13] = [
    "eps_sq",
    "noise_variance",
    "fundamental_bound",
    "yanase_bound",
    "spin_bound",
    "acl_residual",
    "invariance_residual",
    "yanase_residual",
    "commutator_identity_residual",
    "variance_additivity_residual",
    "uncertainty_lhs",
    "uncertainty_rhs",
    "all_hold",
];

pub fn report_csv_row(r: &Report64) -> Vec<String> {
    vec![
        fmt_num(r.eps_sq),
        fmt_num(r.noise_variance),
        fmt_num(r.fundamental_bound),
        fmt_opt(r.yanase_bound),
        fmt_opt(r.spin_bound),
        fmt_num(r.acl_residual),
        fmt_num(r.invariance_residual),
        fmt_num(r.yanase_residual),
        fmt_opt(r.commutator_identity_residual),
        fmt_num(r.variance_additivity_residual),
        fmt_num(r.uncertainty_lhs),
        fmt_num(r.uncertainty_rhs),
        r.all_hold().to_string(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.125), "1.2500000000000000e-1");
        assert_eq!(fmt_num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_opt(None), "");
    }
}
