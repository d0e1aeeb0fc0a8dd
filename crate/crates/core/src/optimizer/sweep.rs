//! Probe-size sweeps: how close the best conservative interaction found gets
//! to `1/(4 + 16 v)` as the probe's conserved-quantity variance `v` grows.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{optimal_spin_bound, ConservationPair};
use crate::error::{Error, Result};
use crate::linalg::{ComplexOperator, Ket};
use crate::optimizer::search::{optimize_noise, NoiseProblem, OptimizerConfig};
use crate::oscillator::{m_z_moments, CoherentAmplitudes, FockSpace};
use crate::scalar::{Real, C};
use crate::spin::{spin_basis, spin_operators, Axis};

/// Largest per-mode cutoff the oscillator sweep will build.
pub const MAX_SWEEP_CUTOFF: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeFamily {
    /// Spin-`j` probe of dimension `2j + 1`, `L2 = J_z`.
    SpinLadder,
    /// Two-mode coherent probe; the size is `|α|² + |β|²`.
    Oscillator,
}

impl fmt::Display for ProbeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeFamily::SpinLadder => "spin_ladder",
            ProbeFamily::Oscillator => "oscillator",
        })
    }
}

impl FromStr for ProbeFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin_ladder" => Ok(ProbeFamily::SpinLadder),
            "oscillator" => Ok(ProbeFamily::Oscillator),
            other => Err(Error::InvalidArgument(format!(
                "unknown probe family {other:?} (expected spin_ladder or oscillator)"
            ))),
        }
    }
}

/// Probe pieces of the spin-ladder family at dimension `dim = 2j + 1`.
#[derive(Clone, Debug)]
pub struct SpinLadderProbe<T: Real = f64> {
    /// `J_z = diag(j, j−1, …, −j)`
    pub jz: ComplexOperator<T>,
    /// Record observable `±½` alternating along the ladder; commutes with `J_z`.
    pub m: ComplexOperator<T>,
    /// `(|j⟩ + |−j⟩)/√2`, maximizing `Δ²J_z = j²`.
    pub xi: Ket<T>,
}

pub fn spin_ladder_probe<T: Real>(dim: usize) -> Result<SpinLadderProbe<T>> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "spin ladder needs dimension >= 2, got {dim}"
        )));
    }
    let j = (dim as f64 - 1.0) / 2.0;
    let jz: Vec<T> = (0..dim).map(|k| T::of(j - k as f64)).collect();
    let parity: Vec<T> = (0..dim)
        .map(|k| T::of(if k % 2 == 0 { 0.5 } else { -0.5 }))
        .collect();
    let r = T::of(0.5).sqrt();
    let mut amps = vec![C::new(T::zero(), T::zero()); dim];
    amps[0] = C::new(r, T::zero());
    amps[dim - 1] = C::new(r, T::zero());
    Ok(SpinLadderProbe {
        jz: ComplexOperator::diagonal(&jz),
        m: ComplexOperator::diagonal(&parity),
        xi: Ket::new(amps)?,
    })
}

/// Spin-½ object measured along `x` at `ψ = α_y`, conserving `Ŝ_z + J_z`.
pub fn spin_ladder_problem<T: Real>(dim: usize) -> Result<NoiseProblem<T>> {
    let probe = spin_ladder_probe::<T>(dim)?;
    let s = spin_operators::<T>();
    let pair = ConservationPair::new(s.sz, probe.jz)?;
    NoiseProblem::new(s.sx, pair, probe.m, probe.xi, spin_basis(Axis::Y).up)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub family: ProbeFamily,
    pub size: f64,
    /// `Δ²m̂_z` of the probe preparation.
    pub var_mz: Option<f64>,
    /// `1/(4 + 16 v)`.
    pub bound: Option<f64>,
    /// Best `P_e(α_y)` found.
    pub achieved: Option<f64>,
    /// `achieved / bound`.
    pub gap_ratio: Option<f64>,
    pub seed: u64,
    /// Why a column is missing, if any.
    pub note: Option<String>,
}

impl SweepRow {
    fn empty(family: ProbeFamily, size: f64, seed: u64) -> Self {
        SweepRow {
            family,
            size,
            var_mz: None,
            bound: None,
            achieved: None,
            gap_ratio: None,
            seed,
            note: None,
        }
    }
}

/// One row per size. A failing size is recorded in its row and the sweep
/// carries on.
pub fn sweep_probe_size(family: ProbeFamily, sizes: &[f64], config: &OptimizerConfig) -> Vec<SweepRow> {
    sizes
        .iter()
        .map(|&size| {
            let mut row = SweepRow::empty(family, size, config.seed);
            let res = match family {
                ProbeFamily::SpinLadder => fill_spin_ladder(&mut row, config),
                ProbeFamily::Oscillator => fill_oscillator(&mut row),
            };
            if let Err(e) = res {
                row.note = Some(e.to_string());
            }
            row
        })
        .collect()
}

fn fill_spin_ladder(row: &mut SweepRow, config: &OptimizerConfig) -> Result<()> {
    let size = row.size;
    if size.fract() != 0.0 || size < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "spin ladder size must be an integer >= 2, got {size}"
        )));
    }
    let dim = size as usize;
    let j = (dim as f64 - 1.0) / 2.0;
    let var = j * j;
    let bound = optimal_spin_bound(var)?;
    row.var_mz = Some(var);
    row.bound = Some(bound);
    let problem = spin_ladder_problem::<f64>(dim)?;
    let run = optimize_noise(&problem, config)?;
    row.achieved = Some(run.final_objective);
    row.gap_ratio = Some(run.final_objective / bound);
    if run.violations() > 0 {
        row.note = Some(format!("{} iterates below the bound", run.violations()));
    }
    Ok(())
}

fn fill_oscillator(row: &mut SweepRow) -> Result<()> {
    let total = row.size;
    if !(total >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "oscillator size |alpha|^2 + |beta|^2 must be >= 0, got {total}"
        )));
    }
    let half = total / 2.0;
    let amp = C::new(half.sqrt(), 0.0);
    row.bound = Some(optimal_spin_bound(total)?);
    let space = FockSpace::required_for(half, half);
    if space.n_max() > MAX_SWEEP_CUTOFF {
        return Err(Error::InvalidArgument(format!(
            "variance not evaluated: cutoff {} exceeds {MAX_SWEEP_CUTOFF}",
            space.n_max()
        )));
    }
    let amps = CoherentAmplitudes::new(amp, amp, space)?;
    let (_, var) = m_z_moments(space, &amps.state(space)?)?;
    row.var_mz = Some(var);
    row.note = Some("no interaction search on oscillator probes".into());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator_norm, variance};

    #[test]
    fn family_names_round_trip() {
        for f in [ProbeFamily::SpinLadder, ProbeFamily::Oscillator] {
            assert_eq!(f.to_string().parse::<ProbeFamily>().unwrap(), f);
        }
        assert!("ladder".parse::<ProbeFamily>().is_err());
    }

    #[test]
    fn ladder_probe_shape() {
        for dim in 2..=6 {
            let p = spin_ladder_probe::<f64>(dim).unwrap();
            let j = (dim as f64 - 1.0) / 2.0;
            assert!((variance(&p.jz, &p.xi).unwrap() - j * j).abs() < 1e-12);
            assert_eq!(commutator_norm(&p.m, &p.jz).unwrap(), 0.0);
        }
        assert!(spin_ladder_probe::<f64>(1).is_err());
    }

    #[test]
    fn qubit_row() {
        let config = OptimizerConfig {
            restarts: 2,
            max_iters: 30,
            ..OptimizerConfig::default()
        };
        let rows = sweep_probe_size(ProbeFamily::SpinLadder, &[2.0], &config);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].bound, Some(0.125));
        assert!(rows[0].achieved.unwrap() >= 0.125 - 1e-9);
    }

    #[test]
    fn oscillator_rows() {
        let rows = sweep_probe_size(
            ProbeFamily::Oscillator,
            &[0.0, 1.0, 10.0],
            &OptimizerConfig::default(),
        );
        let bounds: Vec<f64> = rows.iter().map(|r| r.bound.unwrap()).collect();
        assert_eq!(bounds[0], 0.25);
        assert!((bounds[1] - 0.05).abs() < 1e-16);
        assert!((bounds[2] - 1.0 / 164.0).abs() < 1e-16);
        for r in &rows {
            assert!(r.var_mz.is_some(), "{:?}", r.note);
            assert!((r.var_mz.unwrap() - r.size).abs() < 1e-6);
            assert!(r.achieved.is_none());
        }
    }

    #[test]
    fn bad_sizes_are_recorded_in_row() {
        let rows = sweep_probe_size(
            ProbeFamily::SpinLadder,
            &[1.5, 2.0],
            &OptimizerConfig {
                restarts: 1,
                max_iters: 0,
                ..OptimizerConfig::default()
            },
        );
        assert!(rows[0].note.is_some() && rows[0].bound.is_none());
        assert_eq!(rows[1].bound, Some(0.125));
        let rows = sweep_probe_size(ProbeFamily::Oscillator, &[-1.0], &OptimizerConfig::default());
        assert!(rows[0].note.is_some());
    }
}
