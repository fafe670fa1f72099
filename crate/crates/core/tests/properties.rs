mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use walkzeta::io::fmt_f64;
use walkzeta::laurent::LaurentPolynomial;
use walkzeta::quadrature::QuadratureSpec;
use walkzeta::ronkin::{p_qw, p_rw, ronkin_eval};
use walkzeta::simulator::{evolve, measure, Domain, WalkState};
use walkzeta::walk::{build_momentum_matrix, char_det, qw_coin, CoinMatrix, ShiftType, TorusSpec};
use walkzeta::zeta::{c_r_finite, c_r_limit, finite_zeta};

fn quad() -> QuadratureSpec {
    QuadratureSpec::new(16, 1e-12).unwrap()
}

fn coin_strategy() -> impl Strategy<Value = CoinMatrix> {
    (1usize..=2, any::<u64>(), any::<bool>()).prop_map(|(d, seed, quantum)| {
        let mut rng = common::rng(seed);
        if quantum {
            common::random_qw_coin(d, &mut rng)
        } else {
            common::random_crw_coin(d, &mut rng)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn char_det_is_eigenvalue_product(coin in coin_strategy(), k1 in -3.2f64..3.2, k2 in -3.2f64..3.2, u in -0.99f64..0.99) {
        let k: Vec<f64> = [k1, k2][..coin.d()].to_vec();
        let m = build_momentum_matrix(&coin, &k).unwrap();
        let eig = common::to_na(&m.matrix).schur().eigenvalues().unwrap();
        let prod: Complex64 = eig.iter().map(|l| Complex64::new(1.0, 0.0) - l * u).product();
        let det = char_det(&coin, &k, u).unwrap();
        prop_assert!((prod - det).norm() < 1e-12);
    }

    #[test]
    fn trapezoid_is_exact_on_fine_grids(coin in coin_strategy(), r in 1usize..6) {
        let n = 2 * r + 2;
        let lim = c_r_limit(&coin, r, &QuadratureSpec::new(n, 1.0).unwrap()).unwrap();
        let fin = c_r_finite(&coin, &TorusSpec::new(coin.d(), n).unwrap(), r).unwrap();
        prop_assert!((lim - fin).norm() < 1e-12);
    }

    #[test]
    fn zeta_at_zero_is_one(coin in coin_strategy(), n in 1usize..5) {
        let z = finite_zeta(&coin, &TorusSpec::new(coin.d(), n).unwrap(), 0.0).unwrap();
        prop_assert_eq!(z.value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn measure_is_conserved(coin in coin_strategy(), steps in 0usize..12, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let p = walkzeta::simulator::default_norm_power(coin.class());
        let psi0: Vec<Complex64> = (0..2 * coin.d())
            .map(|_| if p == 1 { Complex64::new(rng.gen_range(0.0..1.0), 0.0) } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .collect();
        let mut s = WalkState::delta(Domain::Lattice { d: coin.d(), radius: 0 }, &psi0).unwrap();
        let t0: f64 = measure(&s, p).unwrap().iter().sum();
        for _ in 0..steps {
            s = evolve(&s, &coin).unwrap();
        }
        let t1: f64 = measure(&s, p).unwrap().iter().sum();
        prop_assert!((t1 - t0).abs() <= 1e-12 * t0.max(1.0));
    }

    /// `R_{P(e^s z)}(x) = R_P(x + s)`.
    #[test]
    fn ronkin_translation(u in 0.1f64..0.95, x1 in -2.0f64..2.0, x2 in -2.0f64..2.0, s1 in -1.0f64..1.0, s2 in -1.0f64..1.0) {
        let p = p_rw(2, u).unwrap();
        let scaled = p.rescale(&[s1, s2]);
        let a = ronkin_eval(&scaled, &[x1, x2], &quad()).unwrap().value;
        let b = ronkin_eval(&p, &[x1 + s1, x2 + s2], &quad()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    /// `R_{c z^a P}(x) = log|c| + a·x + R_P(x)`.
    #[test]
    fn ronkin_monomial_factor(xi in 0.1f64..1.4, u in -0.9f64..-0.05, x in -2.0f64..2.0, a in -3i32..3, c in 0.1f64..5.0) {
        let p = p_qw(xi, u, ShiftType::F);
        let shifted = LaurentPolynomial::from_terms(
            1,
            p.terms().map(|(e, co)| (vec![e[0] + a], co.value * c)),
        ).unwrap();
        let lhs = ronkin_eval(&shifted, &[x], &quad()).unwrap().value;
        let rhs = c.ln() + a as f64 * x + ronkin_eval(&p, &[x], &quad()).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let back: f64 = fmt_f64(v).parse().unwrap();
        prop_assert_eq!(back, if v == 0.0 { 0.0 } else { v });
    }

    #[test]
    fn coin_json_round_trip(coin in coin_strategy()) {
        let back = CoinMatrix::from_json(&coin.to_json()).unwrap();
        prop_assert_eq!(back.entries(), coin.entries());
        prop_assert_eq!(back.class(), coin.class());
        prop_assert_eq!(back.shift(), coin.shift());
    }

    #[test]
    fn laurent_json_round_trip(xi in 0.1f64..1.4, u in -0.9f64..0.0) {
        let p = p_qw(xi, u, ShiftType::M);
        prop_assert_eq!(LaurentPolynomial::from_json(&p.to_json()).unwrap(), p);
    }
}

#[test]
fn flip_flop_changes_only_row_order() {
    let m = qw_coin(0.6, ShiftType::M);
    let f = walkzeta::walk::to_flip_flop(&m).unwrap();
    assert_eq!(f.entries().row(0), m.entries().row(1));
    assert_eq!(f.entries().row(1), m.entries().row(0));
}
