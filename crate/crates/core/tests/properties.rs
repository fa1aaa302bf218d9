use bpdn_testgen::certgen::{self, MethodChoice, SignPattern};
use bpdn_testgen::cli::InstanceFile;
use bpdn_testgen::ensembles::{self, EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};
use bpdn_testgen::linalg::{dot, op_norm, qr_range_projector, DenseMatrix};
use bpdn_testgen::solvers::{self, soft_threshold};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = DenseMatrix> {
    (1usize..7, 1usize..9).prop_flat_map(|(r, c)| {
        prop::collection::vec(-2.0f64..2.0, r * c).prop_map(move |d| DenseMatrix::new(r, c, d).unwrap())
    })
}

fn matrix_and_vectors() -> impl Strategy<Value = (DenseMatrix, Vec<f64>, Vec<f64>)> {
    matrix().prop_flat_map(|a| {
        let n = a.cols();
        (
            Just(a),
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projector_is_idempotent_and_symmetric((a, u, v) in matrix_and_vectors()) {
        let p = qr_range_projector(&a);
        let pu = p.project(&u);
        let ppu = p.project(&pu);
        for (x, y) in pu.iter().zip(&ppu) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
        let pv = p.project(&v);
        let lhs = dot(&pu, &v);
        let rhs = dot(&u, &pv);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())) * 10.0);
    }

    #[test]
    fn projection_residual_is_orthogonal_to_rows((a, u, _) in matrix_and_vectors()) {
        let p = qr_range_projector(&a);
        let pu = p.project(&u);
        let r: Vec<f64> = u.iter().zip(&pu).map(|(x, y)| x - y).collect();
        let ar = a.matvec(&r);
        for v in ar {
            prop_assert!(v.abs() <= 1e-11 * 10.0);
        }
    }

    #[test]
    fn op_norm_is_absolutely_homogeneous(a in matrix(), c in -4.0f64..4.0) {
        prop_assume!(a.max_abs() > 1e-3);
        let base = op_norm(&a, 1e-12).unwrap();
        let scaled = op_norm(&a.scaled(c), 1e-12);
        if c == 0.0 {
            prop_assert!(scaled.is_err() || scaled.unwrap() == 0.0);
        } else {
            let s = scaled.unwrap();
            prop_assert!((s - c.abs() * base).abs() <= 1e-6 * c.abs() * base);
        }
    }

    #[test]
    fn soft_threshold_is_the_l1_prox(x in prop::collection::vec(-3.0f64..3.0, 1..12), t in 0.0f64..2.0) {
        let p = soft_threshold(&x, t);
        for (xi, pi) in x.iter().zip(&p) {
            // optimality of ½(p − x)² + t|p|
            let g = xi - pi;
            if *pi != 0.0 {
                prop_assert!((g - t * pi.signum()).abs() <= 1e-12);
            } else {
                prop_assert!(g.abs() <= t + 1e-12);
            }
        }
    }

    #[test]
    fn sign_projection_complies(signs in prop::collection::vec(-1i8..=1, 1..20), v in prop::collection::vec(-3.0f64..3.0, 20)) {
        prop_assume!(signs.iter().any(|&s| s != 0));
        let pattern = SignPattern::from_signs(&signs).unwrap();
        let mut out = vec![0.0; signs.len()];
        pattern.project(&v[..signs.len()], &mut out);
        prop_assert_eq!(pattern.violation(&out), 0.0);
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => prop_assert_eq!(out[i], 1.0),
                -1 => prop_assert_eq!(out[i], -1.0),
                _ => prop_assert_eq!(out[i], v[i].clamp(-1.0, 1.0)),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certified_instances_satisfy_optimality(seed in 0u64..10_000, s in 1usize..6, lambda in 0.01f64..1.0) {
        let ens = EnsembleSpec::new(EnsembleKind::PartialDct, 96, 48, seed);
        let sol = SolutionSpec::new(s, MagnitudeLaw::Gaussian, seed);
        let inst = certgen::construct(&ens, &sol, lambda, MethodChoice::PocsThenQuadProg).unwrap();
        let cert = &inst.certificate;
        prop_assert_eq!(inst.pattern.violation(&cert.w), 0.0);
        for &i in inst.pattern.plus() { prop_assert_eq!(cert.w[i], 1.0); }
        for &i in inst.pattern.minus() { prop_assert_eq!(cert.w[i], -1.0); }
        prop_assert!(cert.range_residual <= 1e-10);
        let scale = 1.0 + inst.a.t_matvec(&inst.b).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(inst.optimality_residual <= 1e-10 * scale);
        // local probes around x*
        let f_star = solvers::objective(&inst, &inst.x_star);
        for i in (0..inst.n()).step_by(7) {
            for delta in [1e-3, -1e-3] {
                let mut x = inst.x_star.clone();
                x[i] += delta;
                prop_assert!(solvers::objective(&inst, &x) >= f_star - 1e-12);
            }
        }
    }

    #[test]
    fn instance_file_json_round_trip(seed in 0u64..10_000, lambda in 1e-4f64..10.0) {
        let ens = EnsembleSpec::new(EnsembleKind::Bernoulli, 40, 20, seed);
        let sol = SolutionSpec::new(3, MagnitudeLaw::LogUniformDynamicRange { theta: 1e4 }, seed);
        let inst = certgen::construct(&ens, &sol, lambda, MethodChoice::Auto).unwrap();
        let file = InstanceFile::from_instance(&inst, ensembles::coherence(&inst.a).ok());
        let text = serde_json::to_string(&file).unwrap();
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back.matrix), bits(&file.matrix));
        prop_assert_eq!(bits(&back.b), bits(&file.b));
        prop_assert_eq!(bits(&back.x_star), bits(&file.x_star));
        prop_assert_eq!(bits(&back.y), bits(&file.y));
        prop_assert_eq!(bits(&back.w), bits(&file.w));
        prop_assert_eq!(back.lambda.to_bits(), file.lambda.to_bits());
        prop_assert_eq!(&back, &file);
        let rebuilt = back.to_instance().unwrap();
        prop_assert_eq!(rebuilt.optimality_residual, inst.optimality_residual);
    }
}
