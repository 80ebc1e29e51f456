use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use hecke_core::arith::{divisors, euler_phi, mobius, phi1};
use hecke_core::atkin_lehner::phi_n_ell;
use hecke_core::characters::{enumerate_characters, DirichletCharacter};
use hecke_core::cyclotomic::CyclotomicNumber;
use hecke_core::gamma0::{b_n_chi, c_n_chi, phi_n_chi, trace_m_plus_s, trace_s, TraceQuery};
use hecke_core::gamma1::{psi_n, trace_gamma1_s, Gamma1Query};
use hecke_core::class_numbers::{h0, hurwitz_h};

fn character() -> impl Strategy<Value = DirichletCharacter> {
    (1u64..=24).prop_flat_map(|n| {
        let count = euler_phi(n) as usize;
        (0..count).prop_map(move |i| DirichletCharacter::by_index(n, i).unwrap())
    })
}

fn valid_ut(level: u64) -> impl Strategy<Value = (u64, i64, u64)> {
    let us = divisors(level);
    (proptest::sample::select(us), -10i64..=10, 1u64..=12)
        .prop_filter("u^2 | t^2 - 4n", |&(u, t, n)| (t * t - 4 * n as i64) % (u * u) as i64 == 0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn multiplicative_functions(m in 1u64..100_000, n in 1u64..100_000) {
        let mut n = n;
        while m.gcd(&n) > 1 {
            n /= m.gcd(&n);
        }
        prop_assert_eq!(phi1(m * n), phi1(m) * phi1(n));
        prop_assert_eq!(euler_phi(m * n), euler_phi(m) * euler_phi(n));
        prop_assert_eq!(mobius(m * n), mobius(m) * mobius(n));
    }

    #[test]
    fn phi_symmetric(chi in character(), a in 1u64..=40, d in 1u64..=40) {
        prop_assert_eq!(phi_n_chi(a, d, &chi).unwrap(), phi_n_chi(d, a, &chi).unwrap());
    }

    #[test]
    fn phi_ell_symmetric(level in 1u64..=60, a in 1u64..=40, d in 1u64..=40) {
        for ell in divisors(level).into_iter().filter(|l| l.gcd(&(level / l)) == 1) {
            prop_assert_eq!(phi_n_ell(a, d, level, ell), phi_n_ell(d, a, level, ell));
        }
    }

    #[test]
    fn psi_symmetric(level in 1u64..=60, a in -40i64..=40, d in -40i64..=40) {
        prop_assume!(a != 0 && d != 0);
        prop_assert_eq!(psi_n(a, d, level), psi_n(d, a, level));
    }

    #[test]
    fn reflection((chi, (u, t, n)) in character().prop_flat_map(|c| {
        let m = c.modulus();
        (Just(c), valid_ut(m))
    })) {
        let sign = BigRational::from_integer(chi.parity().into());
        prop_assert_eq!(b_n_chi(u, -t, n, &chi).unwrap(), b_n_chi(u, t, n, &chi).unwrap().scale(&sign));
    }

    #[test]
    fn moebius_round_trip((chi, (u, t, n)) in character().prop_flat_map(|c| {
        let m = c.modulus();
        (Just(c), valid_ut(m))
    })) {
        let sum: CyclotomicNumber = divisors(u).into_iter().map(|d| c_n_chi(d, t, n, &chi).unwrap()).sum();
        prop_assert_eq!(sum, b_n_chi(u, t, n, &chi).unwrap());
    }

    #[test]
    fn b_and_c_multiplicative(
        (n1, n2) in (2u64..=9, 2u64..=9).prop_filter("coprime", |(a, b)| a.gcd(b) == 1),
        i1 in 0usize..8, i2 in 0usize..8, t in -8i64..=8, n in 1u64..=10,
    ) {
        let c1 = &enumerate_characters(n1, None).unwrap()[i1 % euler_phi(n1) as usize];
        let c2 = &enumerate_characters(n2, None).unwrap()[i2 % euler_phi(n2) as usize];
        let big = n1 * n2;
        let chi = c1.induce(big).unwrap().mul(&c2.induce(big).unwrap()).unwrap();
        for u1 in divisors(n1) {
            for u2 in divisors(n2) {
                let u = u1 * u2;
                if (t * t - 4 * n as i64) % (u * u) as i64 != 0 {
                    continue;
                }
                prop_assert_eq!(
                    b_n_chi(u, t, n, &chi).unwrap(),
                    b_n_chi(u1, t, n, c1).unwrap() * b_n_chi(u2, t, n, c2).unwrap()
                );
                prop_assert_eq!(
                    c_n_chi(u, t, n, &chi).unwrap(),
                    c_n_chi(u1, t, n, c1).unwrap() * c_n_chi(u2, t, n, c2).unwrap()
                );
            }
        }
    }

    #[test]
    fn traces_integral(level in 1u64..=24, k in 2u32..=12, n in 1u64..=30) {
        let v = trace_s(&TraceQuery::trivial(level, k, n).unwrap()).unwrap().value;
        prop_assert!(v.to_rational().is_some_and(|r| r.is_integer()), "{}", v);
        if k <= 8 {
            let v = trace_gamma1_s(&Gamma1Query::new(level, k, n).unwrap()).unwrap().value;
            prop_assert!(v.to_rational().is_some_and(|r| r.is_integer()), "{}", v);
        }
    }

    #[test]
    fn wrong_parity_vanishes(chi in character(), n in 1u64..=30) {
        let k = if chi.parity() == 1 { 3 } else { 2 };
        let q = TraceQuery::new(chi.modulus(), k, chi, n).unwrap();
        prop_assert!(trace_m_plus_s(&q).unwrap().value.is_zero());
        prop_assert!(trace_s(&q).unwrap().value.is_zero());
    }

    #[test]
    fn class_number_inversion(d in 1i64..=20_000) {
        let sq: Vec<i64> = (1..).take_while(|f| f * f <= d).filter(|f| d % (f * f) == 0).collect();
        let rhs: BigRational = sq.iter().map(|f| h0(-d / (f * f))).sum();
        prop_assert_eq!(hurwitz_h(d), rhs);
    }
}
