//! Explicit trace formulas at level 4, trace forms, and the `H(4D)` relations.
//!
//! Sums over `s` and `t` run over every integer in range. Congruence
//! conditions that the formulas leave implicit are not used to skip terms;
//! the corresponding class numbers vanish on their own, and the odd-weight
//! formula raises an error if they do not.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, gegenbauer_i64, isqrt, sigma};
use crate::characters::DirichletCharacter;
use crate::class_numbers::{hurwitz_h, hurwitz_h_of_quotient, show};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::gamma0::{trace_s, TraceQuery};
use crate::gamma1::{trace_gamma1_s, Gamma1Query};
use crate::qexp::QExpansion;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn to_integer(x: BigRational, what: impl FnOnce() -> String) -> Result<BigInt> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(Error::NonIntegral {
            context: what(),
            value: show(&x),
        })
    }
}

fn chi4(a: i64) -> i64 {
    match a.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

fn pow_min(a: u64, d: u64, e: u32) -> BigInt {
    BigInt::from(a.min(d)).pow(e)
}

/// `tr(T_n, S_k(Gamma0(4)))` for `k` even and `n` odd.
pub fn trace4_even_weight_odd_n(k: u32, n: u64) -> Result<BigInt> {
    if k < 2 || !k.is_multiple_of(2) || n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("need k even >= 2 and n odd (k={k}, n={n})")));
    }
    let ni = n as i64;
    let r = isqrt(n) as i64;
    let mut elliptic = BigRational::zero();
    for s in -r..=r {
        let p = gegenbauer_i64(k - 2, 2 * s, ni);
        elliptic += BigRational::from_integer(p) * hurwitz_h(ni - s * s);
    }
    let hyperbolic: BigInt = divisors(n).into_iter().map(|a| pow_min(a, n / a, k - 1)).sum();
    let mut total = elliptic * rat(-3, 1) - BigRational::from_integer(hyperbolic) * rat(3, 2);
    if k == 2 {
        total += BigRational::from_integer(sigma(n, 1));
    }
    to_integer(total, || format!("level 4, k={k}, n={n}"))
}

/// `tr(T_n, S_k(4, chi_4))` for `k` odd and `n` odd.
pub fn trace4_odd_weight_odd_n(k: u32, n: u64) -> Result<BigInt> {
    if k < 3 || k.is_multiple_of(2) || n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("need k odd >= 3 and n odd (k={k}, n={n})")));
    }
    let ni = n as i64;
    let r = isqrt(n) as i64;
    let mut elliptic = BigRational::zero();
    for s in -r..=r {
        if s % 2 == 0 {
            continue;
        }
        let m = ni - s * s;
        let h = hurwitz_h(m) + hurwitz_h_of_quotient(m, 4) * rat(2, 1);
        let e = 2 * s - ni - 1;
        if e % 4 != 0 {
            if !h.is_zero() {
                return Err(Error::Domain(format!(
                    "class number factor {} nonzero at s={s}, n={n} where 4 does not divide 2s-n-1",
                    show(&h)
                )));
            }
            continue;
        }
        let sign = if (e / 4).rem_euclid(2) == 0 { 1 } else { -1 };
        let p = gegenbauer_i64(k - 2, 2 * s, ni) * sign;
        elliptic += BigRational::from_integer(p) * h;
    }
    let mut hyperbolic = BigInt::zero();
    for a in divisors(n) {
        let d = n / a;
        if (a as i64 - d as i64) % 4 == 0 {
            hyperbolic += pow_min(a, d, k - 1) * chi4(a as i64);
        }
    }
    let total = -elliptic - BigRational::from_integer(hyperbolic);
    to_integer(total, || format!("level 4 with chi_4, k={k}, n={n}"))
}

/// `tr(T_n, S_k(4, chi))` for `n` even, where `chi` is the character mod 4
/// with `chi(-1) = (-1)^k`.
pub fn trace4_even_n(k: u32, n: u64) -> Result<BigInt> {
    if k < 2 || n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("need k >= 2 and n even >= 2 (k={k}, n={n})")));
    }
    let ni = n as i64;
    let r = isqrt(4 * n) as i64;
    let mut elliptic = BigRational::zero();
    for t in -r..=r {
        if (t - ni - 1).rem_euclid(4) != 0 {
            continue;
        }
        let p = gegenbauer_i64(k - 2, t, ni);
        elliptic += BigRational::from_integer(p) * hurwitz_h(4 * ni - t * t);
    }
    let chi = |a: u64| if k.is_multiple_of(2) { 1 } else { chi4(a as i64) };
    let mut hyperbolic = BigInt::zero();
    let mut correction = BigInt::zero();
    for a in divisors(n) {
        if a % 2 == 0 {
            continue;
        }
        let d = n / a;
        hyperbolic += pow_min(a, d, k - 1) * chi(a);
        correction += d;
    }
    let mut total = -elliptic - BigRational::from_integer(hyperbolic);
    if k == 2 {
        total += BigRational::from_integer(correction);
    }
    to_integer(total, || format!("level 4, k={k}, n={n} even"))
}

/// Level-4 trace by whichever explicit formula covers `(k, n)`.
///
/// The space is `S_k(4)` for even `k` and `S_k(4, chi_4)` for odd `k`.
pub fn trace4(k: u32, n: u64) -> Result<BigInt> {
    match (n % 2, k % 2) {
        (0, _) => trace4_even_n(k, n),
        (_, 0) => trace4_even_weight_odd_n(k, n),
        _ => trace4_odd_weight_odd_n(k, n),
    }
}

/// The space whose trace form is requested.
#[derive(Debug, Clone)]
pub enum GroupSpec {
    Gamma0 { level: u64, character: DirichletCharacter },
    Gamma1 { level: u64 },
}

impl GroupSpec {
    fn label(&self, k: u32) -> String {
        match self {
            GroupSpec::Gamma0 { level, character } if character.is_trivial() => {
                format!("S_{k}(Gamma0({level}))")
            }
            GroupSpec::Gamma0 { level, character } => {
                format!("S_{k}(Gamma0({level}), chi{:?})", character.exponents())
            }
            GroupSpec::Gamma1 { level } => format!("S_{k}(Gamma1({level}))"),
        }
    }

    fn trace(&self, k: u32, n: u64) -> Result<CyclotomicNumber> {
        match self {
            GroupSpec::Gamma0 { level, character } => {
                Ok(trace_s(&TraceQuery::new(*level, k, character.clone(), n)?)?.value)
            }
            GroupSpec::Gamma1 { level } => Ok(trace_gamma1_s(&Gamma1Query::new(*level, k, n)?)?.value),
        }
    }
}

/// Which indices of the trace form to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityFilter {
    #[default]
    All,
    Odd,
    Even,
}

impl ParityFilter {
    fn keeps(self, n: usize) -> bool {
        match self {
            ParityFilter::All => true,
            ParityFilter::Odd => n % 2 == 1,
            ParityFilter::Even => n.is_multiple_of(2),
        }
    }
}

impl std::str::FromStr for ParityFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(ParityFilter::All),
            "odd" => Ok(ParityFilter::Odd),
            "even" => Ok(ParityFilter::Even),
            _ => Err(Error::Precondition(format!("unknown parity filter {s:?}"))),
        }
    }
}

/// `sum_{n=1}^P tr(T_n) q^n` on the given space, with `a_0 = 0`.
///
/// Coefficients are `+tr(T_n)`. The filtered-out indices are zero.
pub fn trace_form(group: &GroupSpec, k: u32, precision: usize, filter: ParityFilter) -> Result<QExpansion> {
    if precision == 0 {
        return Err(Error::Precondition("precision must be at least 1".into()));
    }
    let tail: Vec<CyclotomicNumber> = (1..=precision)
        .into_par_iter()
        .map(|n| {
            if filter.keeps(n) {
                group.trace(k, n as u64)
            } else {
                Ok(CyclotomicNumber::zero_in(1))
            }
        })
        .collect::<Result<_>>()?;
    let mut coeffs = Vec::with_capacity(precision + 1);
    coeffs.push(CyclotomicNumber::zero_in(1));
    coeffs.extend(tail);
    let label = match filter {
        ParityFilter::All => format!("trace form of {}", group.label(k)),
        ParityFilter::Odd => format!("odd part of the trace form of {}", group.label(k)),
        ParityFilter::Even => format!("even part of the trace form of {}", group.label(k)),
    };
    QExpansion::new(coeffs, label)
}

/// Which `H(4D)` relation applies to `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelationClass {
    /// `D = 3 mod 8`: `H(4D) = 4 H(D)`.
    ThreeMod8,
    /// `D = 7 mod 8`: `H(4D) = 2 H(D)`.
    SevenMod8,
    /// `D = 0 mod 4`: `H(4D) = 3 H(D) - 2 H(D/4)`.
    ZeroMod4,
}

impl RelationClass {
    pub fn of(d: i64) -> Option<Self> {
        match d.rem_euclid(8) {
            3 => Some(RelationClass::ThreeMod8),
            7 => Some(RelationClass::SevenMod8),
            0 | 4 => Some(RelationClass::ZeroMod4),
            _ => None,
        }
    }

    fn predicted(self, d: i64) -> BigRational {
        match self {
            RelationClass::ThreeMod8 => hurwitz_h(d) * rat(4, 1),
            RelationClass::SevenMod8 => hurwitz_h(d) * rat(2, 1),
            RelationClass::ZeroMod4 => hurwitz_h(d) * rat(3, 1) - hurwitz_h(d / 4) * rat(2, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationFailure {
    pub d: i64,
    pub class: RelationClass,
    pub h_4d: String,
    pub predicted: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RelationReport {
    pub d_max: i64,
    pub checked: usize,
    pub first_failure: Option<RelationFailure>,
}

impl RelationReport {
    pub fn ok(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Check the `H(4D)` relations for `0 <= D <= d_max`.
pub fn relation_table_check(d_max: i64) -> Result<RelationReport> {
    if d_max < 1 {
        return Err(Error::Precondition("d_max must be at least 1".into()));
    }
    let mut report = RelationReport {
        d_max,
        ..Default::default()
    };
    for d in 0..=d_max {
        let Some(class) = RelationClass::of(d) else { continue };
        report.checked += 1;
        let lhs = hurwitz_h(4 * d);
        let rhs = class.predicted(d);
        if lhs != rhs {
            report.first_failure = Some(RelationFailure {
                d,
                class,
                h_4d: show(&lhs),
                predicted: show(&rhs),
            });
            break;
        }
    }
    Ok(report)
}

/// `-tr(T_n, S_k(4))` for even `n`, the coefficient in the even-index cusp
/// form written with a leading minus on the traces.
pub fn displayed_even_coefficient(k: u32, n: u64) -> Result<BigInt> {
    if !k.is_multiple_of(2) || !n.is_multiple_of(2) || n == 0 {
        return Err(Error::Precondition(format!("need k even and n even >= 2 (k={k}, n={n})")));
    }
    let ni = n as i64;
    let r = isqrt(4 * n) as i64;
    let mut total = BigRational::zero();
    for t in -r..=r {
        if (t - ni - 1).rem_euclid(4) == 0 {
            total += BigRational::from_integer(gegenbauer_i64(k - 2, t, ni)) * hurwitz_h(4 * ni - t * t);
        }
    }
    for a in divisors(n).into_iter().filter(|a| a % 2 == 1) {
        let d = n / a;
        total += BigRational::from_integer(pow_min(a, d, k - 1));
        if k == 2 {
            total -= BigRational::from_integer(BigInt::from(d));
        }
    }
    to_integer(total, || format!("displayed coefficient, k={k}, n={n}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::DirichletCharacter;

    fn engine(k: u32, n: u64) -> BigInt {
        let chi = if k.is_multiple_of(2) {
            DirichletCharacter::trivial(4).unwrap()
        } else {
            DirichletCharacter::by_index(4, 1).unwrap()
        };
        let v = trace_s(&TraceQuery::new(4, k, chi, n).unwrap()).unwrap().value;
        v.to_rational().unwrap().to_integer()
    }

    #[test]
    fn matches_engine() {
        for k in 2..=8 {
            for n in 1..=40 {
                assert_eq!(trace4(k, n).unwrap(), engine(k, n), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn trivial_spaces() {
        for n in 1..=200 {
            assert!(trace4(2, n).unwrap().is_zero(), "k=2 n={n}");
            assert!(trace4(3, n).unwrap().is_zero(), "k=3 n={n}");
        }
        for k in [5, 7, 9] {
            for n in (3..100).step_by(4) {
                assert!(trace4_odd_weight_odd_n(k, n).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn parity_errors() {
        assert!(trace4_even_weight_odd_n(3, 5).is_err());
        assert!(trace4_even_weight_odd_n(4, 4).is_err());
        assert!(trace4_odd_weight_odd_n(4, 5).is_err());
        assert!(trace4_even_n(4, 5).is_err());
    }

    #[test]
    fn displayed_form_is_negated_trace() {
        for k in [4, 6, 8, 10] {
            for n in (2..=40).step_by(2) {
                assert_eq!(displayed_even_coefficient(k, n).unwrap(), -trace4_even_n(k, n).unwrap());
            }
        }
    }

    #[test]
    fn relations() {
        assert_eq!(hurwitz_h(12), rat(4, 3));
        assert_eq!(hurwitz_h(28), rat(2, 1));
        assert_eq!(hurwitz_h(16), rat(3, 2));
        let r = relation_table_check(600).unwrap();
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn trace_form_level_one() {
        let spec = GroupSpec::Gamma0 {
            level: 1,
            character: DirichletCharacter::trivial(1).unwrap(),
        };
        let f = trace_form(&spec, 12, 6, ParityFilter::All).unwrap();
        let want: Vec<BigInt> = [0, 1, -24, 252, -1472, 4830, -6048].iter().map(|&x| x.into()).collect();
        assert_eq!(f.integer_coeffs().unwrap(), want);
        let odd = trace_form(&spec, 12, 6, ParityFilter::Odd).unwrap();
        assert!(odd.coeffs[2].is_zero() && odd.coeffs[3] == f.coeffs[3]);
    }
}
