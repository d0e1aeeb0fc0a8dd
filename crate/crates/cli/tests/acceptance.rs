//! Acceptance suite. Each test prints one PASS/FAIL line; run with
//! `cargo test -p waylimit --test acceptance -- --nocapture` to see them.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use waylimit_core::bounds::{bound_comparison, BoundEvaluator, ConservationPair};
use waylimit_core::linalg::{on_object, on_probe, variance, Ket};
use waylimit_core::optimizer::{
    optimize_noise, spin_ladder_probe, NoiseProblem, Objective, OptimizerConfig,
};
use waylimit_core::oscillator::{m_z_moments, oscillator_bound, CoherentAmplitudes, FockSpace};
use waylimit_core::sampling::{
    benchmark_corpus, random_conservative_model, random_ket, random_yw_model, ConservativeSample,
    SampleKind,
};
use waylimit_core::spin::{spin_basis, spin_operators, swap_demo_model, Axis};
use waylimit_core::Complex64;

const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 1000;

fn verdict(id: &str, title: &str, ok: bool, detail: String) {
    println!(
        "criterion {id:>2} {:<4} {title}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} failed: {detail}");
}

fn corpus() -> Vec<ConservativeSample> {
    benchmark_corpus(CORPUS_SEED, CORPUS_SIZE).expect("corpus")
}

/// `‖(I⊗M)U(ψ⊗ξ) − U(A⊗I)(ψ⊗ξ)‖²` straight from the model pieces.
fn direct_noise_sq(s: &ConservativeSample, psi: &Ket<f64>) -> f64 {
    let m = &s.model;
    let input = psi.kron(m.xi());
    let probe_m = on_probe(m.object_dim(), m.m());
    let object_a = on_object(m.a(), m.probe_dim());
    let left = probe_m.apply(&m.u().apply(&input).unwrap()).unwrap();
    let right = m.u().apply(&object_a.apply(&input).unwrap()).unwrap();
    left.amps()
        .iter()
        .zip(right.amps())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum()
}

#[test]
fn c01_master_bound_suite() {
    let start = Instant::now();
    let models = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut checked, mut worst, mut failures, mut oracle_gap) = (0usize, f64::INFINITY, 0usize, 0.0f64);
    for s in &models {
        let eval = BoundEvaluator::new(&s.model, &s.pair).unwrap();
        assert!(eval.acl_holds() && eval.yanase_holds());
        for _ in 0..20 {
            let psi = random_ket(&mut rng, s.model.object_dim());
            let eps_sq = s.model.noise_sq(&psi).unwrap();
            oracle_gap = oracle_gap.max((eps_sq - direct_noise_sq(s, &psi)).abs());
            let fundamental = eval.fundamental_bound(&psi).unwrap();
            let yanase = eval.yanase_bound(&psi).unwrap();
            let margin = (eps_sq - fundamental).min(eps_sq - yanase);
            worst = worst.min(margin);
            if margin < -1e-9 {
                failures += 1;
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = models.len() >= 1000
        && failures == 0
        && oracle_gap < 1e-10
        && elapsed <= Duration::from_secs(60);
    verdict(
        "1",
        "master bound suite",
        ok,
        format!(
            "{} models, {checked} states, {failures} violations, worst margin {worst:.3e}, \
             noise oracle gap {oracle_gap:.1e}, {:.1} s",
            models.len(),
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c02_spin_optimal_bound() {
    let models = corpus();
    let alpha_y = spin_basis::<f64>(Axis::Y).up;
    let (mut checked, mut failures, mut worst) = (0usize, 0usize, f64::INFINITY);
    for s in models.iter().filter(|s| s.kind == SampleKind::Spin) {
        // for a spin-½ object the error probability is ε²/ℏ²
        let pe = direct_noise_sq(s, &alpha_y);
        let v = variance(s.pair.l2(), s.model.xi()).unwrap();
        let margin = pe - 1.0 / (4.0 + 16.0 * v);
        worst = worst.min(margin);
        if margin < -1e-9 {
            failures += 1;
        }
        checked += 1;
    }
    verdict(
        "2",
        "spin optimal bound",
        checked > 0 && failures == 0,
        format!("{checked} spin models, {failures} violations, worst margin {worst:.3e}"),
    );
}

#[test]
fn c03_qubit_probe_floor() {
    let start = Instant::now();
    let probe = spin_ladder_probe::<f64>(2).unwrap();
    let s = spin_operators::<f64>();
    // the two-level ladder has M = L2 = Ŝ_z
    assert_eq!(probe.m, s.sz);
    assert_eq!(probe.jz, s.sz);
    let pair = ConservationPair::new(s.sz.clone(), probe.jz).unwrap();
    let problem =
        NoiseProblem::new(s.sx, pair, probe.m, probe.xi, spin_basis(Axis::Y).up).unwrap();
    let config = OptimizerConfig {
        restarts: 16,
        max_iters: 200,
        seed: 3,
        objective: Objective::State,
        optimize_xi: true,
        ..OptimizerConfig::default()
    };
    let run = optimize_noise(&problem, &config).unwrap();
    let lowest = run
        .restarts
        .iter()
        .map(|r| r.final_objective)
        .fold(f64::INFINITY, f64::min);
    let trace_min = run.objective_trace.iter().copied().fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let ok = run.restarts.len() == 16
        && lowest >= 0.125 - 1e-9
        && trace_min >= 0.125 - 1e-9
        && run.violations() == 0
        && lowest <= 0.50
        && elapsed <= Duration::from_secs(120);
    verdict(
        "3",
        "qubit-probe floor",
        ok,
        format!(
            "16 restarts, best P_e {lowest:.12}, {} iterates below bound, {:.1} s",
            run.violations(),
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c04_swap_witness() {
    let (model, pair) = swap_demo_model::<f64>();
    let eval = BoundEvaluator::new(&model, &pair).unwrap();
    let (acl, sup, yanase) = (eval.acl_residual(), model.sup_noise(), eval.yanase_residual());
    verdict(
        "4",
        "SWAP witness",
        acl < 1e-12 && sup < 1e-12 && yanase > 0.1,
        format!("acl residual {acl:.1e}, sup noise {sup:.1e}, yanase residual {yanase:.4}"),
    );
}

#[test]
fn c05_derivation_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut additivity, mut commutator, mut uncertainty) = (0.0f64, 0.0f64, f64::INFINITY);
    for k in 0..200 {
        let od = 2 + k % 3;
        let pd = 2 + k % 7;
        let s = random_conservative_model::<f64, _>(&mut rng, od, pd, k % 2 == 0).unwrap();
        let eval = BoundEvaluator::new(&s.model, &s.pair).unwrap();
        let psi = random_ket(&mut rng, od);
        let r = eval.report(&psi).unwrap();
        additivity = additivity.max(r.variance_additivity_residual);
        commutator = commutator.max(r.commutator_identity_residual.expect("conservative"));
        uncertainty = uncertainty.min(r.uncertainty_lhs - r.uncertainty_rhs);
    }
    verdict(
        "5",
        "derivation-chain identities",
        additivity < 1e-10 && commutator < 1e-9 && uncertainty >= -1e-9,
        format!(
            "200 models, additivity {additivity:.1e}, commutator identity {commutator:.1e}, \
             uncertainty margin {uncertainty:.3e}"
        ),
    );
}

#[test]
fn c06_yw_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut failures, mut worst) = (0usize, f64::INFINITY);
    for k in 0..500 {
        let yw = random_yw_model::<f64, _>(&mut rng, 2 + k % 7).unwrap();
        let eig = waylimit_core::linalg::spectral(yw.m()).unwrap();
        assert!(eig.eigenvalues.iter().all(|v| v.abs() <= 0.5 + 1e-12));
        let margin = yw.eps_y_sq() + 1e-10 - 2.0 * yw.error_at_alpha_y();
        worst = worst.min(margin - 1e-10);
        if margin < 0.0 {
            failures += 1;
        }
    }
    verdict(
        "6",
        "YW relation",
        failures == 0,
        format!("500 models, {failures} violations, worst eps_Y^2 - 2 eps^2 = {worst:.3e}"),
    );
}

#[test]
fn c07_improved_vs_old_bound() {
    let big = bound_comparison(100.0f64, 0.0).unwrap();
    let rel = (big.new - big.old).abs() / big.old;
    let zero = bound_comparison(0.0f64, 0.0).unwrap();
    verdict(
        "7",
        "improved vs old bound",
        rel < 3e-3 && zero.new == 0.5 && zero.old == f64::INFINITY,
        format!(
            "at 100: new {:.6e}, old {:.6e}, relative gap {rel:.3e}; at 0: new {}, old {}",
            big.new, big.old, zero.new, zero.old
        ),
    );
}

#[test]
fn c08_coherent_variance_law() {
    let start = Instant::now();
    let space = FockSpace::new(40).unwrap();
    let grid = [0.0, 0.5, 1.0, 2.0];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for &ra in &grid {
        for &rb in &grid {
            let alpha = Complex64::from_polar(ra, rng.random_range(0.0..std::f64::consts::TAU));
            let beta = Complex64::from_polar(rb, rng.random_range(0.0..std::f64::consts::TAU));
            let amps = CoherentAmplitudes::new(alpha, beta, space).unwrap();
            let (_, var) = m_z_moments(space, &amps.state(space).unwrap()).unwrap();
            worst = worst.max((var - (ra * ra + rb * rb)).abs());
        }
    }
    let large = oscillator_bound(&CoherentAmplitudes::unbounded(
        Complex64::new(100.0, 0.0),
        Complex64::new(0.0, 100.0),
    ));
    let elapsed = start.elapsed();
    verdict(
        "8",
        "coherent-probe variance law",
        worst < 1e-6 && large < 4e-6 && elapsed <= Duration::from_secs(60),
        format!(
            "16 grid points, worst law error {worst:.1e}, bound at 1e4 + 1e4 = {large:.4e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn c09_noiseless_is_precise() {
    let models = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut noiseless, mut worst) = (0usize, 0.0f64);
    for s in models.iter().filter(|s| s.model.sup_noise() < 1e-10) {
        noiseless += 1;
        for _ in 0..200 {
            let psi = random_ket(&mut rng, s.model.object_dim());
            worst = worst.max(s.model.bsf_deviation(&psi).unwrap());
        }
    }
    verdict(
        "9",
        "noiseless implies precise",
        noiseless > 0 && worst < 1e-8,
        format!("{noiseless} noiseless models, worst BSF deviation {worst:.1e}"),
    );
}

fn run_cli(args: &[&str], threads: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_waylimit"))
        .args(args)
        .env("WAYLIMIT_THREADS", threads)
        .output()
        .expect("spawn waylimit")
}

fn output_bytes(dir: &Path, name: &str, args: &[&str], threads: &str) -> Vec<u8> {
    let out = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap();
    full.extend(["--out", out_str]);
    let res = run_cli(&full, threads);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn c10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"restarts": 4, "max_iters": 60, "seed": 11, "size": 3, "optimize_xi": true}"#,
    )
    .unwrap();
    let config = config.to_str().unwrap();
    let sweep = [
        "sweep", "--family", "spin_ladder", "--sizes", "2,3", "--seed", "7", "--restarts", "4",
        "--max-iters", "60",
    ];
    let s1 = output_bytes(dir.path(), "s1.csv", &sweep, "1");
    let s2 = output_bytes(dir.path(), "s2.csv", &sweep, "4");
    let o1 = output_bytes(dir.path(), "o1.json", &["optimize", config], "1");
    let o2 = output_bytes(dir.path(), "o2.json", &["optimize", config], "4");
    verdict(
        "10",
        "determinism",
        !s1.is_empty() && s1 == s2 && !o1.is_empty() && o1 == o2,
        format!(
            "sweep {} bytes identical: {}, optimize {} bytes identical: {} (1 vs 4 threads)",
            s1.len(),
            s1 == s2,
            o1.len(),
            o1 == o2
        ),
    );
}

#[test]
fn direct_noise_oracle_matches_known_models() {
    let (model, pair) = swap_demo_model::<f64>();
    let s = ConservativeSample {
        kind: SampleKind::Generic,
        model,
        pair,
    };
    let psi = spin_basis::<f64>(Axis::Y).up;
    assert!(direct_noise_sq(&s, &psi) < 1e-28);
}
