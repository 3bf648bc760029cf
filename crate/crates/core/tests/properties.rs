use std::sync::Arc;

use hballs::calculus::{
    jacobian_real, lambda_bounds_wirtinger, wirtinger_fd, FnMapping, RealJacobian, WirtingerData,
};
use hballs::extension::{boundary_from_spec, h_extend, BoundaryFunction};
use hballs::geometry::{hyperbolic_distance, mobius, mobius_identity_residual, norm, BallPoint, SpherePoint};
use hballs::kernel::{poisson_h, poisson_h_wirtinger};
use hballs::norms::{weighted_lipschitz, weighted_lipschitz_sup, PairConfig, PairSet};
use hballs::quadrature::{circle_rule, sphere_rule_mc};
use hballs::theorems::{check_lemma22, check_lemma_b, landau_constants};
use hballs::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Points of the ball of radius `rmax` in C^n, by direction and radius.
fn ball(n: usize, rmax: f64) -> impl Strategy<Value = Vec<Complex64>> {
    (prop::collection::vec(-1.0f64..1.0, 2 * n), 0.0..rmax).prop_filter_map("zero direction", |(v, r)| {
        let z: Vec<Complex64> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
        let s = norm(&z);
        (s > 1e-6).then(|| z.iter().map(|x| x * (r / s)).collect())
    })
}

fn sphere(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * n).prop_filter_map("zero vector", |v| {
        let z: Vec<Complex64> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
        let s = norm(&z);
        (s > 1e-3).then(|| z.iter().map(|x| x / s).collect())
    })
}

fn pair(rmax: f64) -> impl Strategy<Value = (usize, Vec<Complex64>, Vec<Complex64>)> {
    (1usize..=3).prop_flat_map(move |n| (Just(n), ball(n, rmax), ball(n, rmax)))
}

fn cmat(n: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec(-2.0f64..2.0, 2 * n * n)
        .prop_map(move |v| DMatrix::from_iterator(n, n, v.chunks(2).map(|p| c(p[0], p[1]))))
}

/// Maximum of `sign·g` over the unit sphere of C^n: dense sampling, then a
/// shrinking random-step hill climb from the best sample.
fn sphere_extreme(n: usize, g: &dyn Fn(&[Complex64]) -> f64, sign: f64) -> f64 {
    let start = if n == 1 { circle_rule(2048).unwrap() } else { sphere_rule_mc(n, 20_000, 5).unwrap() };
    let (mut best, mut val) = (start.node(0).to_vec(), sign * g(start.node(0)));
    for t in start.nodes() {
        if sign * g(t) > val {
            val = sign * g(t);
            best = t.to_vec();
        }
    }
    let steps = sphere_rule_mc(n, 4000, 9).unwrap();
    let mut s = 0.05;
    let mut stale = 0;
    for i in 0..40_000 {
        let dir = steps.node(i % steps.len());
        let cand: Vec<Complex64> = best.iter().zip(dir).map(|(b, d)| b + d * s).collect();
        let r = norm(&cand);
        let cand: Vec<Complex64> = cand.iter().map(|x| x / r).collect();
        let v = sign * g(&cand);
        if v > val {
            val = v;
            best = cand;
            stale = 0;
        } else {
            stale += 1;
            if stale == 100 {
                s /= 2.0;
                stale = 0;
            }
        }
    }
    sign * val
}

proptest! {
    #[test]
    fn mobius_stays_in_ball_and_satisfies_identity((_n, a, z) in pair(0.99)) {
        let a = BallPoint::new(a).unwrap();
        let z = BallPoint::new(z).unwrap();
        let w = mobius(&a, &z).unwrap();
        prop_assert!(w.norm() < 1.0);
        prop_assert!(mobius_identity_residual(&a, &z).unwrap() <= 1e-12);
    }

    #[test]
    fn mobius_is_an_involution((_n, a, z) in pair(0.9)) {
        let a = BallPoint::new(a).unwrap();
        let z = BallPoint::new(z).unwrap();
        let back = mobius(&a, &mobius(&a, &z).unwrap()).unwrap();
        let d: Vec<Complex64> = back.coords().iter().zip(z.coords()).map(|(x, y)| x - y).collect();
        prop_assert!(norm(&d) < 1e-10);
    }

    #[test]
    fn mobius_distance_chain((_n, a, z) in pair(0.99)) {
        let d: Vec<Complex64> = z.iter().zip(&a).map(|(x, y)| x - y).collect();
        let bound = norm(&d) / (1.0 - norm(&a));
        let a = BallPoint::new(a).unwrap();
        let z = BallPoint::new(z).unwrap();
        prop_assert!(mobius(&a, &z).unwrap().norm() <= bound * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn hyperbolic_triangle_inequality(x in ball(1, 0.95), y in ball(1, 0.95), z in ball(1, 0.95)) {
        let (x, y, z) = (BallPoint::new(x).unwrap(), BallPoint::new(y).unwrap(), BallPoint::new(z).unwrap());
        let xz = hyperbolic_distance(&x, &z).unwrap();
        let xy = hyperbolic_distance(&x, &y).unwrap();
        let yz = hyperbolic_distance(&y, &z).unwrap();
        prop_assert!(xz <= xy + yz + 1e-12);
    }

    #[test]
    fn sphere_points_are_normalized(v in prop::collection::vec(-3.0f64..3.0, 2..=8)) {
        let z: Vec<Complex64> = v.chunks(2).map(|p| c(p[0], p.get(1).copied().unwrap_or(0.0))).collect();
        prop_assume!(norm(&z) > 1e-6);
        let s = SpherePoint::new(z).unwrap();
        prop_assert!((norm(s.coords()) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn poisson_kernel_bounds((n, z) in (1usize..=3).prop_flat_map(|n| (Just(n), ball(n, 0.95))), seed in any::<u64>()) {
        let zeta = sphere_rule_mc(n, 100, seed).unwrap().node(0).to_vec();
        let r = norm(&z);
        let e = 2 * n as i32 - 1;
        let p = poisson_h(&BallPoint::new(z).unwrap(), &SpherePoint::new(zeta).unwrap()).unwrap();
        prop_assert!(p >= ((1.0 - r) / (1.0 + r)).powi(e) * (1.0 - 1e-12));
        prop_assert!(p <= ((1.0 + r) / (1.0 - r)).powi(e) * (1.0 + 1e-12));
    }

    /// Closed-form Wirtinger derivatives against central differences of the kernel value.
    #[test]
    fn poisson_wirtinger_matches_differences((n, z, zeta) in (1usize..=2).prop_flat_map(|n| (Just(n), ball(n, 0.6), sphere(n)))) {
        let zeta = SpherePoint::new(zeta).unwrap();
        let p = |w: &[Complex64]| poisson_h(&BallPoint::new(w.to_vec()).unwrap(), &zeta).unwrap();
        let h = 1e-6;
        for k in 0..n {
            let shift = |d: Complex64| {
                let mut w = z.clone();
                w[k] += d;
                w
            };
            let px = (p(&shift(c(h, 0.0))) - p(&shift(c(-h, 0.0)))) / (2.0 * h);
            let py = (p(&shift(c(0.0, h))) - p(&shift(c(0.0, -h)))) / (2.0 * h);
            let (dz, dzb) = poisson_h_wirtinger(&BallPoint::new(z.clone()).unwrap(), &zeta, k + 1).unwrap();
            let scale = 1.0 + px.abs() + py.abs();
            prop_assert!((dz - c(px, -py) * 0.5).norm() < 1e-6 * scale);
            prop_assert!((dzb - c(px, py) * 0.5).norm() < 1e-6 * scale);
            // P is real, so the two closed forms are conjugate
            prop_assert!((dzb - dz.conj()).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn lemma22_holds_for_random_polynomials(k in prop::collection::vec(-1.0f64..1.0, 8), z in ball(2, 0.9)) {
        let a = [c(k[0], k[1]), c(k[2], k[3]), c(k[4], k[5]), c(k[6], k[7])];
        let f = FnMapping::new("poly", 2, 1, move |w: &[Complex64]| {
            vec![a[0] * w[0] + a[1] * w[1].conj() + a[2] * w[0] * w[1].conj() + a[3] * w[0] * w[0]]
        });
        let rep = check_lemma22(&f, &BallPoint::new(z).unwrap()).unwrap();
        prop_assert!(rep.lhs <= rep.rhs + 1e-9, "{} > {}", rep.lhs, rep.rhs);
    }

    #[test]
    fn determinant_survives_wirtinger_round_trip(v in prop::collection::vec(-2.0f64..2.0, 16)) {
        let j = RealJacobian::new(DMatrix::from_row_slice(4, 4, &v)).unwrap();
        let back = j.to_wirtinger().to_real_jacobian();
        let (d0, d1) = (j.determinant().unwrap(), back.determinant().unwrap());
        prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0.abs()));
    }

    #[test]
    fn lemma_b_on_random_matrices(a in (2usize..=4).prop_flat_map(cmat)) {
        prop_assert!(check_lemma_b(&a).unwrap().pass);
    }

    #[test]
    fn landau_invariants(n in 1usize..=6, alpha in 0.01f64..10.0, m in 1.0f64..50.0) {
        let k = landau_constants(n, alpha, m).unwrap();
        prop_assert!(k.rho > 0.0 && k.rho < 1.0 && k.r_lower > 0.0);
        prop_assert!(k.half_rho == k.rho / 2.0);
        let bigger = landau_constants(n, alpha, m * 1.01).unwrap();
        prop_assert!(bigger.rho < k.rho);
        prop_assert!(landau_constants(n + 1, alpha, m).unwrap().rho < k.rho);
    }

    #[test]
    fn mc_rule_weights(n in 1usize..=4, count in 100usize..3000, seed in any::<u64>()) {
        let rule = sphere_rule_mc(n, count, seed).unwrap();
        prop_assert_eq!(rule.len(), count);
        prop_assert!(rule.weights().iter().all(|&w| w > 0.0));
        prop_assert!((rule.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for node in rule.nodes() {
            prop_assert!((norm(node) - 1.0).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extension_is_linear(alpha in -3.0f64..3.0, z in ball(1, 0.8), n2 in ball(2, 0.7)) {
        for (n, z) in [(1usize, z), (2, n2)] {
            let rule = Arc::new(if n == 1 { circle_rule(1024).unwrap() } else { sphere_rule_mc(2, 4000, 11).unwrap() });
            let p1 = boundary_from_spec("bump", n).unwrap();
            let p2 = boundary_from_spec("coord:1", n).unwrap();
            let (q1, q2) = (p1.clone(), p2.clone());
            let combo = BoundaryFunction::new("combo", n, 1, move |w| {
                vec![q1.eval(w)[0] * alpha + q2.eval(w)[0]]
            }).unwrap();
            let f = h_extend(&combo, rule.clone()).unwrap().eval_components(&z).unwrap().0[0];
            let f1 = h_extend(&p1, rule.clone()).unwrap().eval_components(&z).unwrap().0[0];
            let f2 = h_extend(&p2, rule).unwrap().eval_components(&z).unwrap().0[0];
            let expect = f1 * alpha + f2;
            prop_assert!((f - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
        }
    }

    /// Wirtinger derivatives by differences agree with the real Jacobian route.
    #[test]
    fn wirtinger_routes_agree(z in ball(2, 0.8)) {
        let f = FnMapping::new("m", 2, 2, |w: &[Complex64]| {
            vec![w[0] * w[1].conj() + w[0] * w[0], w[1].conj() * 0.5 + w[0]]
        });
        let h = 1e-4 * (1.0 - norm(&z));
        let direct = wirtinger_fd(&f, &z, h).unwrap().data;
        let via = jacobian_real(&f, &z, h).unwrap().to_wirtinger();
        prop_assert!((&direct.fz - &via.fz).norm() < 1e-8);
        prop_assert!((&direct.fzbar - &via.fzbar).norm() < 1e-8);
    }

    /// Λ, λ from the SVD against brute-force sampling of `|f_z θ + f_z̄ θ̄|` over the sphere.
    #[test]
    fn lambda_svd_matches_sphere_sampling(n in 1usize..=2, a in cmat(2), b in cmat(2)) {
        let fz = a.view((0, 0), (n, n)).into_owned();
        let fzb = b.view((0, 0), (n, n)).into_owned();
        let w = WirtingerData::new(fz.clone(), fzb.clone()).unwrap();
        let (big, small) = lambda_bounds_wirtinger(&w).unwrap();
        let eval = |theta: &[Complex64]| -> f64 {
            let mut s2 = 0.0;
            for j in 0..n {
                let mut v = Complex64::default();
                for k in 0..n {
                    v += fz[(j, k)] * theta[k] + fzb[(j, k)] * theta[k].conj();
                }
                s2 += v.norm_sqr();
            }
            s2.sqrt()
        };
        let hi = sphere_extreme(n, &eval, 1.0);
        let lo = -sphere_extreme(n, &|t: &[Complex64]| -eval(t), 1.0);
        let tol = 1e-3 * (1.0 + big);
        prop_assert!(hi <= big + 1e-9 && big - hi < tol, "Λ {big} vs {hi}");
        prop_assert!(lo >= small - 1e-9 && lo - small < tol, "λ {small} vs {lo}");
    }

    #[test]
    fn sup_witness_recomputes(seed in any::<u64>(), k in prop::collection::vec(-1.0f64..1.0, 4)) {
        let a = c(k[0], k[1]);
        let b = c(k[2], k[3]);
        let f = FnMapping::new("q", 1, 1, move |w: &[Complex64]| vec![a * w[0] * w[0] + b * w[0].conj()]);
        let cfg = PairConfig { seed, random_pairs: 50, directions: 8, offset_directions: 4, ..PairConfig::default() };
        let pairs = PairSet::build(1, &cfg).unwrap();
        let s = weighted_lipschitz_sup(&f, &pairs).unwrap();
        let z = BallPoint::new(s.witness[0].clone()).unwrap();
        let w = BallPoint::new(s.witness[1].clone()).unwrap();
        prop_assert!((weighted_lipschitz(&f, &z, &w).unwrap() - s.value).abs() <= 1e-12);
        let again = weighted_lipschitz_sup(&f, &PairSet::build(1, &cfg).unwrap()).unwrap();
        prop_assert_eq!(again, s);
    }
}
