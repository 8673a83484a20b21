mod common;

use common::{mat_t_vec, rel_err, SineAffine};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssgm_core::stepsize::{build_structured_vector, compute_stepsize};
use ssgm_core::vecops::{dot, norm2, sub};
use ssgm_core::{SafeguardStrategy, StepPair, StepsizeRule};

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    use rand::Rng;
    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `2gₖ − rₖ − rₖ₋₁` against `Jₖᵀ(Fₖ − Fₖ₋₁) + (Jₖ − Jₖ₋₁)ᵀ Fₖ` built from
    /// explicit Jacobians.
    #[test]
    fn structured_vector_matches_explicit_form(seed in any::<u64>(), n in 1usize..8, extra in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = SineAffine::random(&mut rng, n + extra, n, true);
        let x_prev = random_point(&mut rng, n);
        let x = random_point(&mut rng, n);
        let problem = model.problem(x.clone());
        let mut ev = problem.evaluator();

        let f_prev = ev.residual(&x_prev).unwrap();
        let f = ev.residual(&x).unwrap();
        let g = ev.jtv(&x, &f).unwrap();
        let r_k = ev.jtv(&x, &f_prev).unwrap();
        let r_km1 = ev.jtv(&x_prev, &f).unwrap();
        let z = build_structured_vector(&g, &r_k, &r_km1);

        let (m, j, j_prev) = (model.m, model.jacobian(&x), model.jacobian(&x_prev));
        let j_diff: Vec<f64> = j.iter().zip(&j_prev).map(|(a, b)| a - b).collect();
        let first = mat_t_vec(&j, m, n, &sub(&f, &f_prev));
        let second = mat_t_vec(&j_diff, m, n, &f);
        let expected: Vec<f64> = first.iter().zip(&second).map(|(a, b)| a + b).collect();
        let err = norm2(&sub(&z, &expected));
        prop_assert!(err <= 1e-12 * (1.0 + norm2(&z)), "err {err}");
    }

    /// For affine residuals `z = AᵀA s` and the SSGM quotients are inverse and
    /// plain Rayleigh-type quotients of `AᵀA`.
    #[test]
    fn affine_residuals_recover_normal_matrix(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, n) = (5, 3);
        let model = SineAffine::random(&mut rng, m, n, false);
        let x_prev = random_point(&mut rng, n);
        let x = random_point(&mut rng, n);
        let s = sub(&x, &x_prev);
        let problem = model.problem(x.clone());
        let mut ev = problem.evaluator();
        let f_prev = ev.residual(&x_prev).unwrap();
        let f = ev.residual(&x).unwrap();
        let z = build_structured_vector(
            &ev.jtv(&x, &f).unwrap(),
            &ev.jtv(&x, &f_prev).unwrap(),
            &ev.jtv(&x_prev, &f).unwrap(),
        );

        let mut ata = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                ata[i * n + k] = (0..m).map(|r| model.a[r * n + i] * model.a[r * n + k]).sum();
            }
        }
        let ata_s = mat_t_vec(&ata, n, n, &s);
        prop_assert!(rel_err(&z, &ata_s) <= 1e-12);

        let pair = StepPair::new(s.clone(), z);
        let rq = dot(&s, &ata_s);
        let expected = [dot(&s, &s) / rq, rq / dot(&ata_s, &ata_s)];
        for (rule, want) in [StepsizeRule::Ssgm1, StepsizeRule::Ssgm2].into_iter().zip(expected) {
            let got = compute_stepsize(rule, SafeguardStrategy::tau(), &pair, 1.0).unwrap();
            prop_assert!(!got.safeguard_fired);
            prop_assert!((got.alpha - want).abs() <= 1e-12 * want.abs());
        }
    }

    /// `J(x)ᵀ v` is linear in `v` for every suite problem.
    #[test]
    fn jtv_is_linear(seed in any::<u64>(), idx in 0usize..21, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        use rand::Rng;
        let spec = &ssgm_core::suite::list()[idx];
        let problem = spec.instantiate(spec.small_n()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..problem.m()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..problem.m()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let combo: Vec<f64> = u.iter().zip(&v).map(|(p, q)| a * p + b * q).collect();
        let x = problem.x0().to_vec();
        let mut ev = problem.evaluator();
        let ju = ev.jtv(&x, &u).unwrap();
        let jv = ev.jtv(&x, &v).unwrap();
        let jc = ev.jtv(&x, &combo).unwrap();
        let lin: Vec<f64> = ju.iter().zip(&jv).map(|(p, q)| a * p + b * q).collect();
        let scale = 1.0 + norm2(&ju).max(norm2(&jv)) * (a.abs() + b.abs());
        prop_assert!(norm2(&sub(&jc, &lin)) <= 1e-10 * scale);
    }
}

#[test]
fn structured_vector_for_linear_residual_is_exact_in_small_integers() {
    // A = [[1, 2], [0, 1], [1, 0]], b = 0, x₋ = 0, x = (1, 1): s = (1, 1),
    // AᵀA = [[2, 2], [2, 5]], so z = (4, 7).
    let model = SineAffine {
        m: 3,
        n: 2,
        a: vec![1.0, 2.0, 0.0, 1.0, 1.0, 0.0],
        b: vec![0.0; 3],
        c: vec![0.0; 3],
        bm: vec![0.0; 6],
    };
    let problem = model.problem(vec![1.0, 1.0]);
    let mut ev = problem.evaluator();
    let (x0, x1) = ([0.0, 0.0], [1.0, 1.0]);
    let f0 = ev.residual(&x0).unwrap();
    let f1 = ev.residual(&x1).unwrap();
    let z = build_structured_vector(
        &ev.jtv(&x1, &f1).unwrap(),
        &ev.jtv(&x1, &f0).unwrap(),
        &ev.jtv(&x0, &f1).unwrap(),
    );
    assert_eq!(z, vec![4.0, 7.0]);
}
