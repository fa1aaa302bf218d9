use bpdn_testgen::certgen::{construct, Instance, MethodChoice};
use bpdn_testgen::ensembles::{EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
use bpdn_testgen::solvers::{self, SolveStatus, SolverConfig, SolverKind, SolverMethod};

fn dct(seed: u64, lambda: f64) -> Instance {
    construct(
        &EnsembleSpec::new(EnsembleKind::PartialDct, 1000, 200, seed),
        &SolutionSpec::new(20, MagnitudeLaw::Gaussian, seed),
        lambda,
        MethodChoice::Auto,
    )
    .unwrap()
}

fn iterations(inst: &Instance, kind: SolverKind) -> (usize, SolveStatus) {
    let (_, t) = solvers::solve(inst, &SolverConfig::default_for(kind)).unwrap();
    (t.iterations(), t.status)
}

/// Counts for the instance written by `gen --ensemble dct --n 1000 --k 200
/// --sparsity 20 --lambda 0.1 --seed 42`. Any change to a solver or to the
/// instance construction shows up here.
#[test]
fn dct_iteration_counts_are_locked() {
    let inst = dct(42, 0.1);
    let got: Vec<_> = SolverKind::ALL.iter().map(|&k| iterations(&inst, k)).collect();
    let expected = [102, 117, 16, 104];
    for ((n, status), want) in got.iter().zip(expected) {
        assert_eq!(*status, SolveStatus::Converged);
        assert_eq!(*n, want, "counts {got:?}");
    }
}

#[test]
fn fista_no_slower_than_ista_on_most_dct_draws() {
    let wins = (1..=10)
        .filter(|&seed| {
            let inst = dct(seed, 0.01);
            iterations(&inst, SolverKind::Fista).0 <= iterations(&inst, SolverKind::Ista).0
        })
        .count();
    assert!(wins >= 9, "FISTA no slower on only {wins}/10 draws");
}

#[test]
fn smaller_lambda_is_slower_for_each_solver() {
    let seed = 5;
    let big = dct(seed, 1e-1);
    let small = dct(seed, 1e-3);
    for kind in SolverKind::ALL {
        let a = iterations(&big, kind).0;
        let b = iterations(&small, kind).0;
        assert!(b >= a, "{kind}: {b} < {a}");
    }
}

#[test]
fn ista_continuation_still_reaches_target() {
    let inst = dct(8, 1e-3);
    let cfg = SolverConfig::new(SolverMethod::Ista { continuation: Some(0.3) }, 1e-6, 50_000);
    let (x, trace) = solvers::solve(&inst, &cfg).unwrap();
    assert_eq!(trace.status, SolveStatus::Converged);
    let err: f64 = x.iter().zip(&inst.x_star).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        / inst.x_star.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(err <= 1e-6);
}

#[test]
fn admm_split_residual_vanishes() {
    let inst = construct(
        &EnsembleSpec::new(EnsembleKind::ThreeBasesUnion, 300, 100, 4),
        &SolutionSpec::new(6, MagnitudeLaw::Gaussian, 4),
        0.1,
        MethodChoice::Auto,
    )
    .unwrap();
    let (_, t) = solvers::solve(&inst, &SolverConfig::new(SolverMethod::Admm { rho: 1.0 }, 1e-10, 50_000)).unwrap();
    assert_eq!(t.status, SolveStatus::Converged);
    assert!(t.splitting_residual.unwrap() < 1e-8);
}

#[test]
fn objective_never_drops_below_certified_optimum() {
    let inst = construct(
        &EnsembleSpec::new(EnsembleKind::BandedCoherent { bandwidth: 5 }, 120, 120, 2),
        &SolutionSpec::new(10, MagnitudeLaw::Unit, 2),
        0.1,
        MethodChoice::Auto,
    )
    .unwrap();
    let f_star = solvers::objective(&inst, &inst.x_star);
    for kind in SolverKind::ALL {
        let (_, t) = solvers::solve(&inst, &SolverConfig::default_for(kind)).unwrap();
        for r in &t.records {
            assert!(r.objective >= f_star - 1e-12, "{kind} iter {}: {} < {f_star}", r.iter, r.objective);
        }
    }
}
