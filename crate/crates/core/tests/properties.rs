//! Property-based invariants.

use num_complex::Complex64 as C;
use opaz::gram::{optimal_approximant, optimal_approximants, orthogonality_defects};
use opaz::jacobi::JacobiTruncation;
use opaz::jentzsch::zero_stats;
use opaz::roots::{roots_of, RootSet};
use opaz::series::{
    cayley_section, cayley_witness, shift, theta, weighted_inner, CoeffSeries,
};
use opaz::Weights;
use proptest::prelude::*;

fn weights() -> impl Strategy<Value = Weights> {
    prop_oneof![
        Just(Weights::hardy()),
        (-3.0f64..3.0).prop_map(Weights::dirichlet),
        (-0.9f64..4.0).prop_map(|b| Weights::bergman(b).unwrap()),
    ]
}

fn nondecreasing_weights() -> impl Strategy<Value = Weights> {
    prop_oneof![
        Just(Weights::hardy()),
        Just(Weights::dirichlet(0.0)),
        Just(Weights::dirichlet(1.0)),
        Just(Weights::dirichlet(2.0)),
        (0.0f64..3.0).prop_map(Weights::dirichlet),
    ]
}

fn complex() -> impl Strategy<Value = C> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C::new(a, b))
}

/// Polynomial with |f(0)| ≥ 0.2.
fn poly(max_len: usize) -> impl Strategy<Value = CoeffSeries<f64>> {
    (complex().prop_filter("f(0) away from 0", |c| c.norm() > 0.2), prop::collection::vec(complex(), 0..max_len))
        .prop_map(|(c0, rest)| {
            let mut v = vec![c0];
            v.extend(rest);
            CoeffSeries::polynomial(v)
        })
}

fn real_vec(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
        .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

fn as_series(a: &[f64]) -> CoeffSeries<f64> {
    CoeffSeries::real_polynomial(a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_scale_invariant(a in real_vec(2..12), t in prop_oneof![-5.0f64..-0.01, 0.01f64..5.0], w in weights()) {
        let scaled: Vec<f64> = a.iter().map(|x| x * t).collect();
        let (x, y) = (theta(&a, &w).unwrap(), theta(&scaled, &w).unwrap());
        prop_assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn theta_moduli_dominate(a in real_vec(2..12), w in weights()) {
        let abs: Vec<f64> = a.iter().map(|x| x.abs()).collect();
        prop_assert!(theta(&abs, &w).unwrap() >= theta(&a, &w).unwrap() - 1e-14);
    }

    #[test]
    fn theta_is_inner_product_quotient(a in real_vec(2..12), w in weights()) {
        let f = as_series(&a);
        let zf = shift(&f, 1);
        let q = weighted_inner(&f, &zf, &w).re / weighted_inner(&zf, &zf, &w).re;
        prop_assert!((theta(&a, &w).unwrap() - q).abs() < 1e-12);
    }

    #[test]
    fn theta_bounded_by_half_norm(a in real_vec(2..30), w in weights()) {
        let half = JacobiTruncation::new(&w, a.len()).largest_eigenvalue() / 2.0;
        prop_assert!(theta(&a, &w).unwrap() <= half + 1e-12);
    }

    #[test]
    fn inner_product_hermitian_positive(f in poly(8), g in poly(8), w in weights()) {
        let fg = weighted_inner(&f, &g, &w);
        let gf = weighted_inner(&g, &f, &w);
        prop_assert!((fg - gf.conj()).norm() < 1e-12);
        let ff = weighted_inner(&f, &f, &w);
        prop_assert!(ff.re > 0.0 && ff.im.abs() < 1e-12);
    }

    #[test]
    fn projection_optimality(f in poly(5), w in weights(), n in 0usize..6, q in prop::collection::vec(complex(), 6)) {
        let p = optimal_approximant(&f, &w, n).unwrap();
        let mut qf = vec![C::new(0.0, 0.0); f.len() + n];
        for (i, a) in q.iter().take(n + 1).enumerate() {
            for (j, b) in f.coeffs().iter().enumerate() {
                qf[i + j] += a * b;
            }
        }
        qf[0] -= C::new(1.0, 0.0);
        let other = CoeffSeries::polynomial(qf).norm_sq(&w).sqrt();
        prop_assert!(other >= p.residual_norm - 1e-10);
        prop_assert!((p.residual_norm - p.direct_residual).abs() < 1e-7);
    }

    #[test]
    fn normal_equations_hold(f in poly(5), w in weights(), n in 0usize..8) {
        let p = optimal_approximant(&f, &w, n).unwrap();
        for d in orthogonality_defects(&f, &w, &p.coeffs) {
            prop_assert!(d.norm() < 1e-10);
        }
    }

    #[test]
    fn residuals_nonincreasing(f in poly(5), w in weights()) {
        let mut last = w.weight(0).sqrt() + 1e-12;
        for p in optimal_approximants(&f, &w, 10).unwrap() {
            let p = p.unwrap();
            prop_assert!(p.residual_norm <= last + 1e-9);
            last = p.residual_norm;
        }
    }

    #[test]
    fn nondecreasing_weights_keep_zeros_outside(f in poly(5), w in nondecreasing_weights(), n in 1usize..16) {
        let p = optimal_approximant(&f, &w, n).unwrap();
        if p.is_constant() {
            return Ok(());
        }
        let p = p.with_roots(1e-12).unwrap();
        let roots = p.roots.unwrap();
        prop_assert!(roots.min_modulus().unwrap() > 1.0 - 1e-9, "min modulus {:?}", roots.min_modulus());
    }

    #[test]
    fn cayley_witness_closed_form(k in 0usize..6, n in 1usize..8, w in weights()) {
        let f = shift(&cayley_section(n), k);
        prop_assert_eq!(&f, &cayley_witness(k, n));
        let a: Vec<f64> = f.coeffs().iter().map(|c| c.re).collect();
        let s: f64 = (1..=n).map(|t| w.weight(t + k + 1)).sum();
        let expect = 1.0 + (w.weight(k + 1) - 4.0 * w.weight(n + k + 1)) / (w.weight(k + 1) + 4.0 * s);
        prop_assert!((theta(&a, &w).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn truncation_spectrum_symmetric(w in weights(), n in 1usize..40) {
        let ev = JacobiTruncation::new(&w, n).eigenvalues();
        for (a, b) in ev.iter().zip(ev.iter().rev()) {
            prop_assert!((a + b).abs() < 1e-12 * (1.0 + a.abs()));
        }
        if n % 2 == 1 {
            prop_assert!(ev[n / 2].abs() < 1e-12);
        }
    }

    #[test]
    fn roots_recover_known_factors(zs in prop::collection::vec((0.2f64..3.0, 0.0f64..std::f64::consts::TAU), 1..12)) {
        let targets: Vec<C> = zs.iter().map(|&(r, t)| C::from_polar(r, t)).collect();
        let mut coeffs = vec![C::new(1.0, 0.0)];
        for z in &targets {
            let mut next = vec![C::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * z;
            }
            coeffs = next;
        }
        let found = roots_of(&coeffs, 1e-12).unwrap();
        prop_assert_eq!(found.len(), targets.len());
        prop_assert!(found.max_residual <= 1e-12);
        for z in &found.roots {
            let c = &coeffs;
            let scale: f64 = c.iter().enumerate().map(|(k, a)| a.norm() * z.norm().max(1.0).powi(k as i32)).sum();
            let val = c.iter().rev().fold(C::new(0.0, 0.0), |acc, a| acc * z + a);
            prop_assert!(val.norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn real_roots_closed_under_conjugation(c in prop::collection::vec(-1.0f64..1.0, 2..20)) {
        prop_assume!(c.last().unwrap().abs() > 1e-3 && c[0].abs() > 1e-3);
        let cs: Vec<C> = c.iter().map(|&x| C::new(x, 0.0)).collect();
        let found = roots_of(&cs, 1e-12).unwrap();
        prop_assert_eq!(found.len(), c.len() - 1);
        for z in &found.roots {
            let best = found.roots.iter().map(|y| (y - z.conj()).norm()).fold(f64::MAX, f64::min);
            prop_assert!(best < 1e-11);
        }
    }

    #[test]
    fn geo_mean_scales(zs in prop::collection::vec((0.2f64..3.0, 0.0f64..std::f64::consts::TAU), 1..10), s in 0.1f64..5.0) {
        let roots: Vec<C> = zs.iter().map(|&(r, t)| C::from_polar(r, t)).collect();
        let set = |v: Vec<C>| RootSet { roots: v, max_residual: 0.0, degree_deflated: zs.len(), sweeps: 0 };
        let n = zs.len();
        let base = zero_stats(&set(roots.clone()), n, 0.1).unwrap().geo_mean_modulus;
        let scaled = zero_stats(&set(roots.iter().map(|z| z * s).collect()), n, 0.1).unwrap().geo_mean_modulus;
        let mut rev = roots.clone();
        rev.reverse();
        let perm = zero_stats(&set(rev), n, 0.1).unwrap().geo_mean_modulus;
        prop_assert!((scaled - s * base).abs() < 1e-12 * scaled.max(1.0));
        prop_assert!((perm - base).abs() < 1e-12 * base.max(1.0));
    }
}
