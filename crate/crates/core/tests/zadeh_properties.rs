mod common;

use common::{shape, upper_shape, w, Shape};
use nswiener_core::algebra::{add, wiener_norm};
use nswiener_core::dense_oracle::{min_eig_lower_bound, render};
use nswiener_core::factorization::positivity_certificate;
use nswiener_core::random::factor_sample;
use nswiener_core::zadeh::{
    lambda_conjugation_check, radial_limit_bound, zadeh_eval, zadeh_multiplicativity_check,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn upper_multiplicativity(s in upper_shape(3, 12, 5), seed in any::<u64>(), z in disk_point()) {
        let u1 = s.build();
        let u2 = s.sibling(0, 4, seed);
        prop_assert!(zadeh_multiplicativity_check(&u1, &u2, z).unwrap() <= 1e-12);
    }

    #[test]
    fn bilateral_multiplicativity_on_circle(s in shape(3, 12, 5), seed in any::<u64>(), t in -4.0f64..4.0) {
        let f = s.build();
        let g = s.sibling(-2, 5, seed);
        let z = Complex64::from_polar(1.0, t);
        prop_assert!(zadeh_multiplicativity_check(&f, &g, z).unwrap() <= 1e-12);
    }

    #[test]
    fn lambda_conjugation(s in shape(3, 12, 5), t in -4.0f64..4.0) {
        prop_assert!(lambda_conjugation_check(&s.build(), t).unwrap() <= 1e-12);
    }

    #[test]
    fn linear_and_norm_bounded(s in upper_shape(3, 12, 5), seed in any::<u64>(), z in disk_point(), a in -2.0f64..2.0) {
        let f = s.build();
        let g = s.sibling(0, 3, seed);
        let c = Complex64::new(a, 0.5);
        let combo = add(&f, &g.scale(c)).unwrap();
        let lhs = zadeh_eval(&combo, z).unwrap().result;
        let rhs = add(
            &zadeh_eval(&f, z).unwrap().result,
            &zadeh_eval(&g, z).unwrap().result.scale(c),
        )
        .unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        let fz = zadeh_eval(&f, z).unwrap();
        prop_assert_eq!(fz.result.support(), f.support());
        prop_assert!(wiener_norm(&fz.result) <= wiener_norm(&f));
    }

    #[test]
    fn radial_bound_holds(s in upper_shape(2, 10, 5), t in -3.0f64..3.0) {
        let u = s.build();
        let mut last = f64::INFINITY;
        for r in [0.9, 0.99, 0.999] {
            let rb = radial_limit_bound(&u, r, t).unwrap();
            prop_assert!(rb.holds(), "{:?}", rb);
            prop_assert!(rb.actual <= last);
            last = rb.actual;
        }
        prop_assert!(last <= 1e-2 * wiener_norm(&u));
    }
}

#[test]
fn positivity_transports_to_the_circle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (m, b) in [(1, 1), (2, 1), (1, 2)] {
        let sample = factor_sample(&mut rng, m, b, w(0, 29), 0.4);
        let wop = sample.gram;
        let cert = positivity_certificate(&wop, wop.window()).unwrap();
        assert!(cert > 0.0);
        for t in [0.0, 1.0, 2.5] {
            let wt = zadeh_eval(&wop, Complex64::from_polar(1.0, t))
                .unwrap()
                .result;
            let section = render(&wt.compress(wop.window()), wop.window()).unwrap();
            assert!(section.data().hermitian_deviation() <= 1e-12);
            let lb = min_eig_lower_bound(&section, 1e-10).unwrap();
            assert!(lb >= 0.5 * cert, "t = {t}: {lb} vs {cert}");
        }
    }
}

#[test]
fn identity_is_fixed_by_evaluation() {
    let s = Shape {
        m: 2,
        lo: -2,
        len: 5,
        nmin: 0,
        width: 1,
        seed: 0,
    };
    let id = nswiener_core::NSOperator::identity(s.m, s.window()).unwrap();
    for z in [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, -0.4),
        Complex64::new(1.0, 0.0),
    ] {
        assert_eq!(zadeh_eval(&id, z).unwrap().result, id);
        assert_eq!(zadeh_multiplicativity_check(&id, &id, z).unwrap(), 0.0);
    }
}
