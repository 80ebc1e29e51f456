//! Traces of `T_n o W_l` on `S_k(Gamma0(N))` for exact divisors `l || N`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::{
    divisors, eps4, euler_phi, factor, gegenbauer_i64, isqrt, isqrt_exact, kronecker, mobius, phi1,
    sigma1_coprime, valuation_u64,
};
use crate::class_numbers::hurwitz_h;
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::gamma0::{ensure_integral_rational, s_n, TraceResult};

fn ceil_half(i: u32) -> u32 {
    i.div_ceil(2)
}

/// `C_{p^a}(p^i, D)`, the local factor of `C_N(u, D)`.
///
/// The table is the tabulated one with a single amendment: for `p = 2`,
/// `i = a` and `D / 4^a = 2, 3 mod 4`, the value is `-2^{ceil(a/2)-1}`
/// rather than `2^{ceil(a/2)}`. Those `D/u^2` are not discriminants, so the
/// amendment never changes a trace, but it keeps `C_N(u,t,n) = |S_N(t,n)| C_N(u,D)` exact.
fn local_c(p: u64, a: u32, i: u32, d: i64) -> i64 {
    let pw = |e: u32| p.pow(e) as i64;
    if i == 0 {
        return 1;
    }
    if i == a {
        if p == 2 && d != 0 {
            let q = d / 4i64.pow(a);
            if matches!(q.rem_euclid(4), 2 | 3) {
                return -pw(ceil_half(a) - 1);
            }
        }
        return pw(ceil_half(a));
    }
    // b = infinity for D = 0: larger than any bound compared against.
    let (b, core) = if d == 0 {
        (u32::MAX / 2, 0i64)
    } else {
        let b = valuation_u64(p, d.unsigned_abs());
        (b, d / p.pow(b) as i64)
    };
    let same_parity = (i + a).is_multiple_of(2);
    let (b, a_i, i_i) = (b as i64, a as i64, i as i64);
    if p != 2 {
        if 1 <= i_i && i_i <= b - a_i && same_parity {
            pw(ceil_half(i)) - pw(ceil_half(i) - 1)
        } else if i_i == b - a_i + 1 && same_parity {
            -pw(ceil_half(i) - 1)
        } else if i_i == b - a_i + 1 {
            pw(i / 2) * kronecker(core, p) as i64
        } else {
            0
        }
    } else if 1 <= i_i && i_i <= b - a_i - 2 && same_parity {
        pw(ceil_half(i) - 1)
    } else if i_i == b - a_i - 1 && same_parity {
        -pw(ceil_half(i) - 1)
    } else if i_i == b - a_i && same_parity {
        pw(ceil_half(i) - 1) * eps4(core) as i64
    } else if i_i == b - a_i + 1 && !same_parity && core.rem_euclid(4) == 1 {
        pw(i / 2) * kronecker(core, 2) as i64
    } else {
        0
    }
}

/// Memo of local factors keyed by `(p, a, i, D)`.
#[derive(Debug, Default)]
pub struct CnTable {
    memo: RwLock<HashMap<(u64, u32, u32, i64), i64>>,
}

impl CnTable {
    pub fn global() -> &'static CnTable {
        static TABLE: OnceLock<CnTable> = OnceLock::new();
        TABLE.get_or_init(CnTable::default)
    }

    pub fn local(&self, p: u64, a: u32, i: u32, d: i64) -> i64 {
        let key = (p, a, i, d);
        if let Some(&v) = self.memo.read().unwrap().get(&key) {
            return v;
        }
        let v = local_c(p, a, i, d);
        self.memo.write().unwrap().insert(key, v);
        v
    }

    pub fn len(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `C_N(u, D) = prod_{p | N} C_{p^a}(p^{v_p(u)}, D)`.
pub fn c_n_of_d(u: u64, d: i64, level: u64) -> Result<i64> {
    if u == 0 || !level.is_multiple_of(u) || d % (u * u) as i64 != 0 {
        return Err(Error::Precondition(format!(
            "need u | N and u^2 | D (u={u}, D={d}, N={level})"
        )));
    }
    let table = CnTable::global();
    Ok(factor(level)?
        .into_iter()
        .map(|(p, a)| table.local(p, a, valuation_u64(p, u), d))
        .product())
}

/// `|S_N(t,n)|`, the number of units `alpha` mod `N` with `alpha^2 - t alpha + n = 0 mod N`.
pub fn s_count(t: i64, n: u64, level: u64) -> Result<u64> {
    Ok(s_n(1, t, n, level)?.solutions.len() as u64)
}

/// `Phi_{N,l}(a,d)`; zero unless `l | a + d`.
pub fn phi_n_ell(a: u64, d: u64, level: u64, ell: u64) -> BigRational {
    if !(a + d).is_multiple_of(ell) {
        return BigRational::zero();
    }
    let ell_p = level / ell;
    let diff = a.abs_diff(d);
    let total: u64 = divisors(ell_p)
        .into_iter()
        .filter_map(|r| {
            let s = ell_p / r;
            let g = r.gcd(&s);
            (diff.is_multiple_of(g) && r.gcd(&a) == 1 && s.gcd(&d) == 1).then(|| euler_phi(g))
        })
        .sum();
    BigRational::new(BigInt::from(euler_phi(ell) * total), BigInt::from(ell))
}

/// Parameters for `tr(T_n o W_l, S_k(N))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ALQuery {
    pub level: u64,
    pub ell: u64,
    pub weight: u32,
    pub n: u64,
}

impl ALQuery {
    pub fn new(level: u64, ell: u64, weight: u32, n: u64) -> Result<Self> {
        if level == 0 || n == 0 || weight < 2 {
            return Err(Error::Precondition(format!(
                "need N >= 1, k >= 2, n >= 1 (N={level}, k={weight}, n={n})"
            )));
        }
        if !weight.is_multiple_of(2) {
            return Err(Error::Precondition(format!(
                "Atkin-Lehner traces are defined here for even weight only (k={weight})"
            )));
        }
        if ell == 0 || !level.is_multiple_of(ell) || ell.gcd(&(level / ell)) != 1 {
            return Err(Error::Precondition(format!(
                "{ell} is not an exact divisor of {level}"
            )));
        }
        if n > 1 << 36 || ell > 1 << 20 {
            return Err(Error::Precondition("arguments too large".into()));
        }
        Ok(ALQuery {
            level,
            ell,
            weight,
            n,
        })
    }
}

fn rational(x: BigRational) -> CyclotomicNumber {
    CyclotomicNumber::from_rational(x)
}

/// `tr(T_n o W_l, S_k(N))`.
pub fn trace_tn_wl(q: &ALQuery) -> Result<TraceResult> {
    let ALQuery {
        level,
        ell,
        weight,
        n,
    } = *q;
    let ell_p = level / ell;
    let w = weight - 2;
    let m = ell * n;
    let ell_pow = BigInt::from(ell).pow(w / 2);
    let bound = isqrt(4 * m) as i64;
    let root = isqrt_exact(m).map(|s| 2 * s as i64);
    let ell_i = ell as i64;
    let ts: Vec<i64> = (-bound / ell_i..=bound / ell_i)
        .map(|j| j * ell_i)
        .filter(|&t| Some(t.abs()) != root)
        .collect();
    let terms: Vec<BigRational> = ts
        .into_par_iter()
        .map(|t| -> Result<BigRational> {
            let disc = 4 * m as i64 - t * t;
            let count = s_count(t, m, ell_p)? as i64;
            if count == 0 {
                return Ok(BigRational::zero());
            }
            let mut h_sum = BigRational::zero();
            for u in divisors(ell) {
                let mu = mobius(u);
                if mu == 0 {
                    continue;
                }
                for up in divisors(ell_p) {
                    let sq = ((u * up) * (u * up)) as i64;
                    if disc % sq != 0 {
                        continue;
                    }
                    let h = hurwitz_h(disc / sq);
                    if h.is_zero() {
                        continue;
                    }
                    let c = count * c_n_of_d(up, -disc, ell_p)? * mu;
                    h_sum += h * BigRational::from_integer(c.into());
                }
            }
            Ok(h_sum * BigRational::from_integer(gegenbauer_i64(w, t, m as i64)))
        })
        .collect::<Result<_>>()?;
    let mut elliptic: BigRational = terms.into_iter().sum();
    elliptic /= BigRational::from_integer(-2 * ell_pow.clone());
    if ell == 1 && root.is_some() && n.gcd(&level) == 1 {
        let s = isqrt_exact(n).unwrap();
        elliptic += BigRational::new(
            BigInt::from(phi1(level)) * BigInt::from(weight - 1) * BigInt::from(s).pow(w),
            BigInt::from(12),
        );
    }
    let mut hyperbolic = BigRational::zero();
    for a in divisors(m) {
        let d = m / a;
        if (a + d) % ell != 0 {
            continue;
        }
        let weight_term = BigRational::from_integer(BigInt::from(a.min(d)).pow(weight - 1));
        hyperbolic += weight_term * phi_n_ell(a, d, level, ell);
    }
    hyperbolic /= BigRational::from_integer(-2 * ell_pow);
    let delta = if weight == 2 {
        BigRational::from_integer(sigma1_coprime(n, level).into())
    } else {
        BigRational::zero()
    };
    let value = &elliptic + &hyperbolic + &delta;
    ensure_integral_rational(&value, || {
        format!("tr T_{n} o W_{ell} on S_{weight}(Gamma0({level}))")
    })?;
    Ok(TraceResult {
        value: rational(value),
        elliptic: rational(elliptic),
        hyperbolic: rational(hyperbolic),
        delta: rational(delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::DirichletCharacter;
    use crate::gamma0::{c_n_chi, trace_s, TraceQuery};

    fn al(level: u64, ell: u64, k: u32, n: u64) -> BigRational {
        trace_tn_wl(&ALQuery::new(level, ell, k, n).unwrap())
            .unwrap()
            .value
            .to_rational()
            .unwrap()
    }

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn c_n_of_d_examples() {
        for level in [1u64, 6, 8, 12, 27] {
            assert_eq!(c_n_of_d(1, 17, level).unwrap(), 1);
        }
        for level in [6u64, 15, 30, 35] {
            for u in divisors(level) {
                for d in [-3i64, -4, -7, 0, 5, 12] {
                    let d = d * (u * u) as i64;
                    if d.rem_euclid(4) > 1 && d != 0 {
                        continue;
                    }
                    assert_eq!(c_n_of_d(u, d, level).unwrap(), u as i64);
                }
            }
        }
        assert_eq!(c_n_of_d(8, -64 * 3, 8).unwrap(), 4);
        assert_eq!(c_n_of_d(27, -27 * 27 * 4, 27).unwrap(), 9);
        assert!(c_n_of_d(2, 3, 4).is_err());
    }

    #[test]
    fn factorization_through_s_count() {
        for level in (1..=200u64).filter(|l| l % 7 == 0 || *l <= 40 || l % 16 == 0) {
            let chi = DirichletCharacter::trivial(level).unwrap();
            for t in -9i64..=9 {
                for n in 1..=15u64 {
                    let disc = t * t - 4 * n as i64;
                    let count = s_count(t, n, level).unwrap() as i64;
                    for u in divisors(level) {
                        if disc % (u * u) as i64 != 0 {
                            continue;
                        }
                        let direct = c_n_chi(u, t, n, &chi).unwrap();
                        let factored = count * c_n_of_d(u, disc, level).unwrap();
                        assert_eq!(
                            direct,
                            CyclotomicNumber::from_integer(factored),
                            "N={level} u={u} t={t} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn s_count_examples() {
        assert_eq!(s_count(0, 1, 1).unwrap(), 1);
        assert_eq!(s_count(0, 1, 5).unwrap(), 2);
    }

    #[test]
    fn phi_n_ell_examples() {
        use crate::gamma0::phi_n_chi;
        for level in [1u64, 4, 6, 12, 18] {
            let chi = DirichletCharacter::trivial(level).unwrap();
            for a in 1..15 {
                for d in 1..15 {
                    let lhs = CyclotomicNumber::from_rational(phi_n_ell(a, d, level, 1));
                    assert_eq!(lhs, phi_n_chi(a, d, &chi).unwrap(), "N={level} a={a} d={d}");
                }
            }
        }
        assert_eq!(phi_n_ell(3, 4, 7, 7), BigRational::new(6.into(), 7.into()));
        assert_eq!(phi_n_ell(3, 5, 7, 7), BigRational::zero());
        for (level, ell) in [(12u64, 4u64), (12, 3), (30, 5), (18, 2)] {
            for a in 1..25 {
                for d in 1..25 {
                    assert_eq!(phi_n_ell(a, d, level, ell), phi_n_ell(d, a, level, ell));
                }
            }
        }
    }

    #[test]
    fn ell_one_matches_gamma0() {
        for level in 1..=30u64 {
            for k in [2u32, 4, 6] {
                for n in 1..=20u64 {
                    let g0 = trace_s(&TraceQuery::trivial(level, k, n).unwrap())
                        .unwrap()
                        .value
                        .to_rational()
                        .unwrap();
                    assert_eq!(al(level, 1, k, n), g0, "N={level} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn fricke_on_x0_11() {
        assert_eq!(al(11, 11, 2, 1), int(-1));
    }

    #[test]
    fn involution_bounds() {
        for level in 2..=50u64 {
            let genus = trace_s(&TraceQuery::trivial(level, 2, 1).unwrap())
                .unwrap()
                .value
                .to_rational()
                .unwrap()
                .to_integer();
            for ell in divisors(level) {
                if ell.gcd(&(level / ell)) != 1 {
                    continue;
                }
                let tr = al(level, ell, 2, 1).to_integer();
                assert!(tr.magnitude() <= genus.magnitude(), "N={level} l={ell}");
                assert!(((&genus - &tr) % 2i32).is_zero(), "N={level} l={ell}");
            }
        }
    }

    #[test]
    fn rejects_bad_queries() {
        assert!(ALQuery::new(12, 2, 2, 1).is_err());
        assert!(ALQuery::new(12, 4, 3, 1).is_err());
        assert!(ALQuery::new(12, 5, 2, 1).is_err());
        assert!(ALQuery::new(12, 4, 2, 1).is_ok());
    }
}
