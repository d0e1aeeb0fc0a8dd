use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bounds::{yanase_bound, yanase_residual, ConservationPair, INEQUALITY_TOL, PRECONDITION_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ComplexOperator, Ket};
use crate::measurement::MeasurementModel;
use crate::optimizer::commutant::CommutantBasis;
use crate::scalar::{Real, C};

/// Quantity minimized over interactions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// `ε(ψ)²` at the target state.
    State,
    /// `ε²`, the worst case over input states.
    Sup,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Central-difference step for the gradient.
    pub grad_step: f64,
    /// Stop once the gradient norm or the per-step decrease drops below this.
    pub tol: f64,
    pub seed: u64,
    pub objective: Objective,
    /// Also optimize the probe preparation over the unit sphere.
    pub optimize_xi: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 16,
            max_iters: 200,
            grad_step: 1e-5,
            tol: 1e-12,
            seed: 0,
            objective: Objective::State,
            optimize_xi: false,
        }
    }
}

/// Search space: interactions generated by the commutant of
/// `L1⊗I + I⊗L2`, a fixed record observable `M` obeying Yanase's condition,
/// and optionally the probe preparation.
#[derive(Clone, Debug)]
pub struct NoiseProblem<T: Real = f64> {
    a: ComplexOperator<T>,
    m: ComplexOperator<T>,
    pair: ConservationPair<T>,
    xi0: Ket<T>,
    psi: Ket<T>,
    basis: CommutantBasis<T>,
    theta0: Option<Vec<T>>,
}

impl<T: Real> NoiseProblem<T> {
    pub fn new(
        a: ComplexOperator<T>,
        pair: ConservationPair<T>,
        m: ComplexOperator<T>,
        xi0: Ket<T>,
        psi: Ket<T>,
    ) -> Result<Self> {
        let a = if a.is_hermitian() { a } else { a.into_hermitian("A")? };
        let m = if m.is_hermitian() { m } else { m.into_hermitian("M")? };
        pair.l1().check_dim(a.dim(), "L1")?;
        pair.l2().check_dim(m.dim(), "L2")?;
        xi0.check_dim(m.dim(), "xi")?;
        xi0.require_normalized("xi")?;
        psi.check_dim(a.dim(), "psi")?;
        psi.require_normalized("psi")?;
        let yr = yanase_residual(&m, pair.l2())?;
        if !(yr < T::tol(PRECONDITION_TOL)) {
            return Err(Error::Precondition(format!(
                "probe observable must commute with L2 (residual {yr})"
            )));
        }
        let basis = CommutantBasis::new(&pair.total())?;
        Ok(NoiseProblem {
            a,
            m,
            pair,
            xi0,
            psi,
            basis,
            theta0: None,
        })
    }

    /// Starting coefficients for the first restart (default: `U = I`).
    pub fn with_initial_theta(mut self, theta: Vec<T>) -> Result<Self> {
        if theta.len() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                context: "initial theta",
                expected: self.basis.len(),
                found: theta.len(),
            });
        }
        self.theta0 = Some(theta);
        Ok(self)
    }

    pub fn basis(&self) -> &CommutantBasis<T> {
        &self.basis
    }

    pub fn pair(&self) -> &ConservationPair<T> {
        &self.pair
    }

    pub fn psi(&self) -> &Ket<T> {
        &self.psi
    }

    pub fn xi0(&self) -> &Ket<T> {
        &self.xi0
    }

    /// Number of real parameters under `config`.
    pub fn n_params(&self, optimize_xi: bool) -> usize {
        self.basis.len() + if optimize_xi { 2 * self.m.dim() } else { 0 }
    }

    fn split(&self, x: &[T], optimize_xi: bool) -> Result<(Vec<T>, Ket<T>)> {
        let k = self.basis.len();
        let theta = x[..k].to_vec();
        let xi = if optimize_xi {
            let amps = x[k..].chunks(2).map(|c| C::new(c[0], c[1])).collect();
            Ket::normalize(amps)?
        } else {
            self.xi0.clone()
        };
        Ok((theta, xi))
    }

    /// Model realized by parameter vector `x`.
    pub fn model_at(&self, x: &[T], optimize_xi: bool) -> Result<MeasurementModel<T>> {
        if x.len() != self.n_params(optimize_xi) {
            return Err(Error::DimensionMismatch {
                context: "parameter vector",
                expected: self.n_params(optimize_xi),
                found: x.len(),
            });
        }
        let (theta, xi) = self.split(x, optimize_xi)?;
        let u = self.basis.conservative_unitary(&theta)?;
        Ok(MeasurementModel::assemble(self.a.clone(), self.m.clone(), u, xi))
    }

    fn value(&self, model: &MeasurementModel<T>, objective: Objective) -> Result<T> {
        match objective {
            Objective::State => model.noise_sq(&self.psi),
            Objective::Sup => Ok(model.sup_noise_sq()),
        }
    }

    pub fn objective(&self, x: &[T], config: &OptimizerConfig) -> Result<T> {
        let model = self.model_at(x, config.optimize_xi)?;
        self.value(&model, config.objective)
    }

    /// Central-difference gradient with step `h`.
    pub fn objective_gradient(&self, x: &[T], h: T, config: &OptimizerConfig) -> Result<Vec<T>> {
        let mut probe = x.to_vec();
        let two_h = h + h;
        (0..x.len())
            .map(|i| {
                probe[i] = x[i] + h;
                let up = self.objective(&probe, config)?;
                probe[i] = x[i] - h;
                let down = self.objective(&probe, config)?;
                probe[i] = x[i];
                Ok((up - down) / two_h)
            })
            .collect()
    }

    fn initial_point(&self, restart: usize, seed: u64, config: &OptimizerConfig) -> Vec<T> {
        let k = self.basis.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x: Vec<T> = if restart == 0 {
            self.theta0.clone().unwrap_or_else(|| vec![T::zero(); k])
        } else {
            (0..k)
                .map(|_| T::of(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)))
                .collect()
        };
        if config.optimize_xi {
            if restart == 0 {
                for a in self.xi0.amps() {
                    x.push(a.re);
                    x.push(a.im);
                }
            } else {
                for _ in 0..2 * self.m.dim() {
                    let g: f64 = rng.sample(StandardNormal);
                    x.push(T::of(g));
                }
            }
        }
        x
    }

    fn run_restart(&self, restart: usize, config: &OptimizerConfig) -> Result<RestartResult<T>> {
        let seed = restart_seed(config.seed, restart);
        let mut x = self.initial_point(restart, seed, config);
        let h = T::of(config.grad_step);
        let tol = T::of(config.tol);
        let armijo = T::of(1e-4);
        let bound_slack = T::tol(INEQUALITY_TOL);

        let mut model = self.model_at(&x, config.optimize_xi)?;
        let mut f = self.value(&model, config.objective)?;
        let mut trace = vec![f];
        let mut violations = 0;
        let mut check = |model: &MeasurementModel<T>, f: T| -> Result<()> {
            let bound = yanase_bound(model, &self.pair, &self.psi)?;
            if f < bound - bound_slack {
                violations += 1;
            }
            Ok(())
        };
        check(&model, f)?;

        let mut step = T::one();
        let mut converged = false;
        let mut iterations = 0;
        'outer: for _ in 0..config.max_iters {
            iterations += 1;
            let g = self.objective_gradient(&x, h, config)?;
            let g2: T = g.iter().map(|v| *v * *v).sum();
            if g2.sqrt() < tol {
                converged = true;
                break;
            }
            loop {
                let cand: Vec<T> = x.iter().zip(&g).map(|(xi, gi)| *xi - step * *gi).collect();
                let cand_model = self.model_at(&cand, config.optimize_xi)?;
                let fc = self.value(&cand_model, config.objective)?;
                if fc <= f - armijo * step * g2 {
                    let decrease = f - fc;
                    x = cand;
                    f = fc;
                    model = cand_model;
                    trace.push(f);
                    check(&model, f)?;
                    step = (step + step).min(T::of(1e3));
                    if decrease < tol {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
                step = step * T::of(0.5);
                if step < T::of(1e-14) {
                    converged = true;
                    break 'outer;
                }
            }
        }
        let (theta, xi) = self.split(&x, config.optimize_xi)?;
        Ok(RestartResult {
            summary: RestartSummary {
                restart,
                seed,
                initial_objective: trace[0],
                final_objective: f,
                iterations,
                converged,
                violations,
            },
            theta,
            xi,
            trace,
            model,
        })
    }
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

struct RestartResult<T: Real> {
    summary: RestartSummary<T>,
    theta: Vec<T>,
    xi: Ket<T>,
    trace: Vec<T>,
    model: MeasurementModel<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartSummary<T: Real = f64> {
    pub restart: usize,
    pub seed: u64,
    pub initial_objective: T,
    pub final_objective: T,
    pub iterations: usize,
    pub converged: bool,
    /// Accepted iterates that fell below the Yanase bound.
    pub violations: usize,
}

/// Outcome of [`optimize_noise`]: the best restart in full plus a summary
/// of every restart.
#[derive(Clone, Debug)]
pub struct OptimizationRun<T: Real = f64> {
    pub seed: u64,
    pub best_restart: usize,
    pub theta: Vec<T>,
    pub xi: Ket<T>,
    pub objective_trace: Vec<T>,
    pub final_objective: T,
    pub result_model: MeasurementModel<T>,
    /// Yanase bound at the result, for the target state.
    pub bound_value: T,
    pub converged: bool,
    pub restarts: Vec<RestartSummary<T>>,
}

impl<T: Real> OptimizationRun<T> {
    /// Accepted iterates below the bound, over all restarts.
    pub fn violations(&self) -> usize {
        self.restarts.iter().map(|r| r.violations).sum()
    }
}

/// Gradient descent with backtracking and random restarts over
/// conservation-respecting interactions. Restart 0 starts from the problem's
/// initial coefficients; the rest from seeded random points. Restarts run in
/// parallel and are reduced in index order, so results depend only on the
/// seed and the configuration.
pub fn optimize_noise<T: Real>(
    problem: &NoiseProblem<T>,
    config: &OptimizerConfig,
) -> Result<OptimizationRun<T>> {
    let n = config.restarts.max(1);
    let results: Vec<RestartResult<T>> = (0..n)
        .into_par_iter()
        .map(|r| problem.run_restart(r, config))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.summary.final_objective < results[best].summary.final_objective {
            best = i;
        }
    }
    let summaries = results.iter().map(|r| r.summary.clone()).collect();
    let winner = results.into_iter().nth(best).expect("at least one restart");
    let bound_value = yanase_bound(&winner.model, &problem.pair, &problem.psi)?;
    Ok(OptimizationRun {
        seed: config.seed,
        best_restart: best,
        theta: winner.theta,
        xi: winner.xi,
        objective_trace: winner.trace,
        final_objective: winner.summary.final_objective,
        result_model: winner.model,
        bound_value,
        converged: winner.summary.converged,
        restarts: summaries,
    })
}
