use finitemix_core::builders::{base_graph, exponential, ring, Family};
use finitemix_core::dsgd::{
    dsgd_run, make_problem, topology_sweep, DsgdConfig, ProblemSpec, QuadraticProblem, Simulation,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spec(n: usize, d: usize, zeta: f64, sigma: f64, seed: u64) -> ProblemSpec {
    ProblemSpec {
        n,
        d,
        zeta_scale: zeta,
        sigma,
        mu: 0.5,
        l_smooth: 2.0,
        seed,
        shared_curvature: false,
    }
}

/// `(1/n) sum (A_i x - b_i)` straight from the stored matrices.
fn oracle_grad(p: &QuadraticProblem, x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let mut g = vec![0.0; d];
    for (a, b) in p.curvatures.iter().zip(&p.offsets) {
        for r in 0..d {
            let ax: f64 = (0..d).map(|c| a[r * d + c] * x[c]).sum();
            g[r] += (ax - b[r]) / p.n() as f64;
        }
    }
    g
}

#[test]
fn mean_evolution_identity() {
    for seed in [1u64, 2, 3] {
        let p = make_problem(&spec(16, 4, 1.0, 0.3, seed)).unwrap();
        for seq in [
            ring(16).unwrap(),
            base_graph(16, 1).unwrap(),
            exponential(16).unwrap(),
        ] {
            let cfg = DsgdConfig {
                eta: 0.1,
                rounds: 20,
                momentum: 0.0,
                seed: seed + 100,
            };
            let mut sim = Simulation::new(&p, &seq, cfg).unwrap();
            for _ in 0..cfg.rounds {
                let before = sim.params().mean();
                let rec = sim.step().unwrap();
                let after = sim.params().mean();
                let gbar = rec.gradients.mean();
                for t in 0..4 {
                    let expected = before[t] - cfg.eta * gbar[t];
                    assert!(
                        (after[t] - expected).abs() < 1e-10,
                        "{} seed={seed}",
                        seq.builder_tag()
                    );
                }
                // mixing preserves the average of the pre-mix iterates
                let pre = rec.pre_mix.mean();
                assert!(pre.iter().zip(&after).all(|(a, b)| (a - b).abs() < 1e-10));
            }
        }
    }
}

#[test]
fn homogeneous_run_tracks_gradient_descent() {
    let p = make_problem(&ProblemSpec {
        shared_curvature: true,
        ..spec(8, 5, 0.0, 0.0, 7)
    })
    .unwrap();
    let seq = base_graph(8, 1).unwrap();
    let cfg = DsgdConfig {
        eta: 1.0 / (2.0 * p.spec.l_smooth),
        rounds: 500,
        momentum: 0.0,
        seed: 0,
    };
    let mut sim = Simulation::new(&p, &seq, cfg).unwrap();
    let mut x = vec![0.0; 5];
    for _ in 0..cfg.rounds {
        sim.step().unwrap();
        let g = oracle_grad(&p, &x);
        x.iter_mut()
            .zip(&g)
            .for_each(|(xi, gi)| *xi -= cfg.eta * gi);
        let xbar = sim.params().mean();
        assert!(xbar.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-8));
    }
    let trace = dsgd_run(&p, &seq, &cfg).unwrap();
    assert_eq!(trace.grad_norm_sq.len(), 501);
    assert!(*trace.grad_norm_sq.last().unwrap() < 1e-10);
    assert!(trace.suboptimality.last().unwrap().abs() < 1e-10);
}

#[test]
fn gradients_match_finite_differences() {
    let p = make_problem(&spec(3, 4, 1.5, 0.0, 21)).unwrap();
    let h = 1e-5;
    for i in 0..3 {
        for s in 0..5 {
            let x: Vec<f64> = (0..4)
                .map(|t| ((s * 4 + t) as f64 * 0.37).sin() * 2.0)
                .collect();
            let g = p.local_grad(i, &x);
            for t in 0..4 {
                let mut hi = x.clone();
                let mut lo = x.clone();
                hi[t] += h;
                lo[t] -= h;
                let fd = (p.local_objective(i, &hi) - p.local_objective(i, &lo)) / (2.0 * h);
                assert!(
                    (fd - g[t]).abs() <= 1e-6 * g[t].abs().max(1.0),
                    "node {i} coord {t}: {fd} vs {}",
                    g[t]
                );
            }
        }
    }
}

#[test]
fn noise_is_calibrated() {
    let sigma = 0.7;
    let p = make_problem(&spec(2, 3, 0.5, sigma, 4)).unwrap();
    let x = [0.2, -0.4, 1.0];
    let exact = p.local_grad(0, &x);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let samples = 10_000;
    let mut sum = [0.0; 3];
    let mut sum_sq = [0.0; 3];
    for _ in 0..samples {
        let g = p.stochastic_grad(0, &x, &mut rng);
        for t in 0..3 {
            let e = g[t] - exact[t];
            sum[t] += e;
            sum_sq[t] += e * e;
        }
    }
    for t in 0..3 {
        let mean = sum[t] / samples as f64;
        let var = sum_sq[t] / samples as f64 - mean * mean;
        assert!(
            (var / (sigma * sigma) - 1.0).abs() < 0.05,
            "coord {t}: {var}"
        );
    }
}

#[test]
fn runs_are_reproducible() {
    let p = make_problem(&spec(12, 3, 1.0, 0.2, 5)).unwrap();
    let again = make_problem(&spec(12, 3, 1.0, 0.2, 5)).unwrap();
    assert_eq!(p, again);
    let seq = base_graph(12, 2).unwrap();
    let cfg = DsgdConfig {
        eta: 0.05,
        rounds: 50,
        momentum: 0.9,
        seed: 8,
    };
    let a = dsgd_run(&p, &seq, &cfg).unwrap();
    let b = dsgd_run(&again, &seq, &cfg).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.heterogeneity, b.heterogeneity);
}

#[test]
fn sweep_examples() {
    let fams: Vec<Family> = ["ring", "base:k=1"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let cfg = DsgdConfig {
        eta: 0.05,
        rounds: 300,
        momentum: 0.0,
        seed: 3,
    };

    let homo = make_problem(&spec(25, 4, 0.0, 0.1, 17)).unwrap();
    let rows = topology_sweep(&homo, &fams, &cfg);
    let (a, b) = (rows[0].final_grad_norm_sq, rows[1].final_grad_norm_sq);
    assert!(a.max(b) <= 2.0 * a.min(b), "{a} vs {b}");

    let hetero = make_problem(&spec(25, 4, 5.0, 0.1, 17)).unwrap();
    let rows = topology_sweep(&hetero, &fams, &cfg);
    assert!(rows[1].mean_consensus_error < rows[0].mean_consensus_error);
    // 2 messages per undirected edge per round, ring has 25 edges
    assert_eq!(rows[0].comm_cost, 300 * 25 * 2);

    let wide: Vec<Family> = ["base:k=1", "base:k=4"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let p27 = make_problem(&spec(27, 2, 1.0, 0.0, 1)).unwrap();
    let rows = topology_sweep(&p27, &wide, &cfg);
    assert!(rows[1].length < rows[0].length);

    let bad: Vec<Family> = vec!["1peer-hypercube".parse().unwrap()];
    let rows = topology_sweep(&hetero, &bad, &cfg);
    assert!(rows[0]
        .error
        .as_deref()
        .unwrap()
        .starts_with("NonPowerOfTwo"));
    assert_eq!(rows[0].to_csv_line(), "1peer-hypercube,,,,");
}
