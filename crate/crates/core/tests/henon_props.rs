mod common;

use common::c;
use henon_core::function::EntireFunction;
use henon_core::henon_like::{certify_monomial_dominated, degree_line_sweep, Bidisk, HenonMap};
use num_complex::Complex64;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Complex64> {
    (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(a, b)| c(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jacobian_determinant_is_delta(z in point(), w in point(), d in point(), n in 1u32..20) {
        prop_assume!(d.norm() > 1e-3);
        let map = HenonMap::rescaled(&EntireFunction::exp(), d, n).unwrap();
        let j = map.jacobian([z, w]).unwrap();
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        prop_assert!((det - d).norm() <= 1e-12 * d.norm());
    }

    #[test]
    fn inverse_undoes_apply(z in point(), w in point(), d in point()) {
        prop_assume!(d.norm() > 0.05);
        let map = HenonMap::new(EntireFunction::real_poly(&[0.3, 0.0, 1.0]), d).unwrap();
        let p = [z, w];
        let back = map.inverse(map.apply(p).unwrap()).unwrap();
        prop_assert!((back[0] - z).norm() < 1e-10 && (back[1] - w).norm() < 1e-10);
    }

    #[test]
    fn degree_is_line_independent(d in 2usize..6, delta in 0.05..0.6f64) {
        let mut coeffs = vec![0.0; d + 1];
        coeffs[d] = 1.0;
        let map = HenonMap::new(EntireFunction::real_poly(&coeffs), c(delta, 0.0)).unwrap();
        let sweep = degree_line_sweep(&map, &Bidisk::centered(2.0, 2.0).unwrap(), 6).unwrap();
        prop_assert!(sweep.constant);
        prop_assert_eq!(sweep.degrees[0], d as i64);
    }
}

#[test]
fn monomial_certificate_fails_when_too_small() {
    // |z^2| = 0.25 on |z| = 0.5 is below (|δ| + 1) r
    let f = EntireFunction::monomial(2);
    let res = certify_monomial_dominated(&f, c(0.5, 0.0), 0.5, 1024);
    match res {
        Ok(cert) => assert_eq!(cert.degree, 0),
        Err(e) => assert!(e.is_honest_failure(), "{e}"),
    }
}

#[test]
fn zero_delta_is_rejected() {
    assert!(HenonMap::new(EntireFunction::exp(), c(0.0, 0.0)).is_err());
}
