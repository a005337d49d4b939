//! Property suites for the structural invariants that hold across the whole
//! input space, not just at the solved examples.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_atlas::frequency::{self, torus_norm};
use spectral_atlas::log_potential::{jensen, GdEvaluator, Method};
use spectral_atlas::operators::weyl_certify;
use spectral_atlas::oracles::OracleCase;
use spectral_atlas::potential::{Potential, TrigPoly1D, TAU};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    // p_n q_{n-1} − p_{n-1} q_n = ±1 for every expansion, in exact integers.
    #[test]
    fn convergent_determinants(alpha in 1e-6f64..0.999999) {
        let cf = frequency::expand(alpha, 30, 1 << 40).unwrap();
        for n in 1..cf.convergents.len() {
            let (p_n, q_n) = cf.convergents[n];
            let (p_m, q_m) = cf.convergents[n - 1];
            let det = p_n as i128 * q_m as i128 - p_m as i128 * q_n as i128;
            prop_assert_eq!(det.abs(), 1);
        }
    }

    // ‖q_n α‖ ≤ 1/q_{n+1} along the whole expansion.
    #[test]
    fn convergents_are_good_approximations(alpha in 1e-6f64..0.999999) {
        let cf = frequency::expand(alpha, 30, 1 << 40).unwrap();
        let qs = cf.denominators();
        for n in 0..qs.len().saturating_sub(1) {
            let lhs = torus_norm(qs[n], alpha);
            let rhs = 1.0 / qs[n + 1] as f64;
            prop_assert!(lhs <= rhs * (1.0 + 1e-9) + 1e-14,
                "n={}: {} > {}", n, lhs, rhs);
        }
    }

    // gcd(p_n, q_n) = 1: consecutive convergents are reduced fractions.
    #[test]
    fn convergents_are_reduced(alpha in 1e-3f64..0.999) {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        let cf = frequency::expand(alpha, 25, 1 << 35).unwrap();
        for &(p, q) in cf.convergents.iter().skip(1) {
            prop_assert_eq!(gcd(p, q), 1);
        }
    }

    // Real-valued trig potentials produce exactly real samples.
    #[test]
    fn real_potentials_sample_real(a in -2.0f64..2.0, b in -2.0f64..2.0, theta in 0.0f64..1.0) {
        let tp = TrigPoly1D::new(-1, vec![c(a, b), c(0.3, 0.0), c(a, -b)]).unwrap();
        let v = Potential::trig(tp);
        prop_assume!(v.is_real());
        prop_assert_eq!(v.eval1(theta).im, 0.0);
    }

    // dist_to_range never increases under grid doubling (nested grids).
    #[test]
    fn dist_to_range_monotone(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let v = Potential::trig(TrigPoly1D::second_order());
        let z = c(x, y);
        let coarse = v.dist_to_range(z, 64).unwrap();
        let fine = v.dist_to_range(z, 128).unwrap();
        prop_assert!(fine <= coarse + 1e-15);
    }
}

#[test]
fn weyl_log_magnitudes_consistent_forward_and_backward() {
    // Recompute log|ψ_n| by summing the factors in reverse order; the two
    // accumulations must agree to 1e-10 over |n| ≤ 10⁴.
    let alpha = frequency::golden_mean();
    let theta = 0.2613;
    let z = c(0.4, 0.2);
    let lambda = 1.0f64;
    let v = Potential::trig(TrigPoly1D::single_mode());
    let n_max = 10_000i64;

    let term = |j: i64| {
        let th = (theta + j as f64 * alpha).rem_euclid(1.0);
        (z - v.eval1(th)).norm().ln()
    };
    let mut forward = Vec::with_capacity(n_max as usize + 1);
    let mut acc = 0.0f64;
    for j in 1..=n_max {
        acc += lambda.ln() - term(j);
        forward.push(acc);
    }
    let mut backward = vec![0.0f64; n_max as usize];
    let mut acc_b = forward[n_max as usize - 1];
    backward[n_max as usize - 1] = acc_b;
    for j in (1..n_max).rev() {
        acc_b -= lambda.ln() - term(j + 1);
        backward[j as usize - 1] = acc_b;
    }
    for j in 0..n_max as usize {
        assert!(
            (forward[j] - backward[j]).abs() <= 1e-10,
            "log magnitudes disagree at n = {}: {} vs {}",
            j + 1,
            forward[j],
            backward[j]
        );
    }

    // The report built on these magnitudes is finite and sane.
    let rep = weyl_certify(&v, lambda, z, &[theta], &[alpha], n_max).unwrap();
    assert!(rep.min_residual.is_finite());
}

#[test]
fn oracle_boundaries_satisfy_the_level_equation() {
    // Boundary parametrizations of level-curve-type spectra sit on
    // {G = log λ} to within the evaluator's tolerance.
    let g = c(1.0, 0.0);
    let tp = TrigPoly1D::asymmetric_hopping(g);
    for lambda in [1.0f64.exp(), (2.0f64).exp(), 5.0] {
        let case = OracleCase::hopping_1d(g, lambda);
        if lambda < 1.0f64.exp() * (1.0 - 1e-12) {
            continue;
        }
        for z in case.boundary_points(64).unwrap() {
            let gval = jensen(&tp, z).unwrap();
            assert!(
                (gval - lambda.ln()).abs() <= 1e-9,
                "boundary point {z} off the level set: G = {gval}, log λ = {}",
                lambda.ln()
            );
        }
    }

    let case = OracleCase::monomial(2.0);
    let tp = TrigPoly1D::single_mode();
    for z in case.boundary_points(64).unwrap() {
        assert!((jensen(&tp, z).unwrap() - 2.0f64.ln()).abs() <= 1e-9);
    }
}

#[test]
fn classification_consumes_only_the_coupling_modulus() {
    // The API takes |λ| by construction; spectra of rotated couplings are
    // therefore structurally identical. Exercise it through the spectrum
    // set builder at two "phases" of the same modulus.
    use spectral_atlas::contour::Box2;
    use spectral_atlas::spectrum::Classifier;
    let ev = GdEvaluator::new(
        Potential::trig(TrigPoly1D::single_mode()),
        Method::Jensen,
        1e-8,
    )
    .unwrap();
    let cl = Classifier::new(ev).unwrap();
    let modulus = Complex64::from_polar(1.7, 2.1).norm();
    let a = cl
        .rasterize(modulus, Box2::new(-2.5, -2.5, 2.5, 2.5), 41, 41)
        .unwrap();
    let b = cl
        .rasterize(1.7, Box2::new(-2.5, -2.5, 2.5, 2.5), 41, 41)
        .unwrap();
    assert_eq!(a.labels, b.labels);
}

#[test]
fn iterated_and_full_2d_quadrature_agree() {
    // Two independent routes to G for a separable 2-D potential: the exact
    // inner-Jensen iteration and the raw tensor-panel quadrature.
    use spectral_atlas::log_potential::{iterated, quadrature};
    let g = Complex64::new(1.0, 0.0);
    let v = Potential::separable(vec![
        Potential::trig(TrigPoly1D::cosine()),
        Potential::trig(TrigPoly1D::asymmetric_hopping(g)),
    ])
    .unwrap();
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(3.0, 1.0),
        Complex64::new(-2.0, -2.5),
        Complex64::new(7.0, 0.0),
    ] {
        let a = iterated(&v, z, 1e-8).unwrap();
        let b = quadrature(&v, z, 1e-5).unwrap();
        assert!(
            (a - b.value).abs() <= 1e-4 + b.total_bound(),
            "z = {z}: iterated {a} vs 2-D quadrature {}",
            b.value
        );
    }
}

#[test]
fn gradient_nonzero_on_the_outer_annulus() {
    // For the 2-D hopping symbol, ∇G must not vanish beyond 2‖V‖∞; checked
    // on a sampled annulus (not a proof, a numerical sweep).
    let g = Complex64::new(1.0, 0.0);
    let potential = Potential::separable(vec![
        Potential::trig(TrigPoly1D::cosine()),
        Potential::trig(TrigPoly1D::asymmetric_hopping(g)),
    ])
    .unwrap();
    let r0 = 2.0 * potential.sup_norm();
    let ev = GdEvaluator::new(potential, Method::Iterated, 1e-8).unwrap();
    for k in 0..12 {
        let theta = TAU * k as f64 / 12.0;
        for r in [r0 * 1.05, r0 * 1.3] {
            let z = Complex64::from_polar(r, theta);
            let (gx, gy) = ev.gradient(z, 1e-4).unwrap();
            assert!(
                gx.hypot(gy) > 1e-3,
                "∇G vanished at {z} (|z| = {r}, bound {r0})"
            );
        }
    }
}

#[test]
fn jensen_agrees_with_quadrature_on_random_instances() {
    // Lighter randomized twin of the acceptance cross-validation, kept here
    // so plain `cargo test` exercises the pairing too.
    let mut rng = ChaCha8Rng::seed_from_u64(20_26);
    for _ in 0..3 {
        let l = rng.gen_range(-2i64..=0);
        let m = rng.gen_range(1i64..=2);
        let coeffs: Vec<Complex64> = (l..=m)
            .map(|_| Complex64::from_polar(rng.gen_range(0.3..1.0), TAU * rng.gen_range(0.0..1.0)))
            .collect();
        let Ok(tp) = TrigPoly1D::new(l, coeffs) else { continue };
        if tp.is_constant() {
            continue;
        }
        let v = Potential::trig(tp.clone());
        let quad_ev = GdEvaluator::new(v.clone(), Method::Quadrature, 1e-8).unwrap();
        let scale = v.sup_norm() + 1.0;
        let mut tested = 0;
        while tested < 15 {
            let z = c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
            if v.dist_to_range(z, 2048).unwrap() < 0.05 {
                continue;
            }
            tested += 1;
            let a = jensen(&tp, z).unwrap();
            let b = quad_ev.eval(z).unwrap();
            assert!((a - b).abs() <= 1e-6, "window {:?} z {z}: {a} vs {b}", tp.window());
        }
    }
}
