use ergo_core::decompose::{apply_tensor, decompose, max_noise_level, noise_inverse, noise_matrix};
use ergo_core::measures::{decode, encode, kl, pinsker_bound, tv};
use ergo_core::{Exact, LocalRule, Marginal, Neighbourhood, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

/// Row-stochastic rational rows with strictly positive entries, denominator `den`.
fn positive_rows(sigma: usize, rows: usize, den: u32) -> impl Strategy<Value = Vec<Vec<Exact>>> {
    prop::collection::vec(prop::collection::vec(1u32..=den, sigma), rows).prop_map(|raw| {
        raw.into_iter()
            .map(|r| {
                let total: u32 = r.iter().sum();
                r.into_iter().map(|x| Exact::ratio(x as i64, total as i64)).collect()
            })
            .collect()
    })
}

fn simplex(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, len).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

proptest! {
    #[test]
    fn decomposition_is_exact(rows in positive_rows(2, 4, 9), qw in 1i64..9) {
        let phi = LocalRule::new(2, Neighbourhood::line(&[0, 1]).unwrap(), rows).unwrap();
        let q = Marginal::new(vec![Exact::ratio(qw, 10), Exact::ratio(10 - qw, 10)]).unwrap();
        let kappa = max_noise_level(&phi, &q).unwrap();
        prop_assert!(kappa > Exact::zero());
        if kappa < Exact::ratio(1, 1) {
            let dec = decompose(&phi, &q, &kappa).unwrap();
            prop_assert!(dec.max_residual(&phi).is_zero());
            prop_assert!(dec.psi.rows().iter().flatten().any(|x| x.is_zero()));
        }
    }

    #[test]
    fn theta_fixes_q_and_inverts(kn in 0i64..10, qw in 1i64..10) {
        let kappa = Exact::ratio(kn, 10);
        let q = Marginal::new(vec![Exact::ratio(qw, 10), Exact::ratio(10 - qw, 10)]).unwrap();
        let theta = noise_matrix(&kappa, &q).unwrap();
        prop_assert_eq!(theta.left_apply(q.weights()), q.weights().to_vec());
        let inv = noise_inverse(&kappa, &q).unwrap();
        prop_assert_eq!(theta.mul(&inv).unwrap(), ergo_core::Matrix::identity(2));
    }

    #[test]
    fn tensor_inverse_recovers(p in simplex(8), kappa in 0.0f64..0.95, qw in 0.05f64..0.95) {
        let q = Marginal::new(vec![qw, 1.0 - qw]).unwrap();
        let moved = apply_tensor(&noise_matrix(&kappa, &q).unwrap(), &p, 3);
        let back = apply_tensor(&noise_inverse(&kappa, &q).unwrap(), &moved, 3);
        for (a, b) in back.iter().zip(&p) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn pinsker_and_gibbs(p in simplex(6), r in simplex(6)) {
        let d = kl(&p, &r);
        prop_assert!(d >= -1e-15);
        prop_assert!(tv(&p, &r) <= pinsker_bound(d) + 1e-12);
    }

    #[test]
    fn pattern_codes_round_trip(index in 0usize..243) {
        let w = decode(index, 5, 3);
        prop_assert_eq!(encode(&w, 3), index);
    }

    #[test]
    fn rational_literals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let x = Exact::ratio(n, d);
        prop_assert_eq!(Exact::parse_literal(&x.to_literal()), Some(x));
    }
}
