//! Extended Kronecker-Hurwitz class numbers `H(D)`, primitive class numbers
//! `h(D)`, and the extension `h0(D)`.
//!
//! Two routes are kept apart on purpose:
//!
//! * [`hurwitz_h`] never touches quadratic forms. It writes `-D = d0 f^2`
//!   with `d0` fundamental, evaluates `h(d0) / (w(d0)/2)` with Dirichlet's
//!   class number formula, and sums the conductor formula over `g | f`.
//! * [`class_number_h`] and [`h0`] count reduced forms directly.
//!
//! The inversion identities between `H` and `h0` therefore compare two
//! independent computations.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{self, factor, isqrt_exact, isqrt_exact_i64, kronecker, mobius};
use crate::error::{Error, Result};

pub type Rational = BigRational;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A positive-definite form `a x^2 + b xy + c y^2`.
pub type Form = (i64, i64, i64);

fn check_negative_discriminant(d: i64) -> Result<()> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::Precondition(format!(
            "{d} is not a negative discriminant"
        )));
    }
    Ok(())
}

/// All reduced positive-definite forms of discriminant `d < 0`, primitive or not,
/// ordered by `(a, b)`.
pub fn reduced_forms(d: i64) -> Result<Vec<Form>> {
    check_negative_discriminant(d)?;
    let abs_d = -d;
    let mut forms = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= abs_d {
        let start = if (a - d).rem_euclid(2) == 0 { -a + 2 } else { -a + 1 };
        let mut b = start;
        while b <= a {
            let num = b * b - d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a && !((b.abs() == a || a == c) && b < 0) {
                    forms.push((a, b, c));
                }
            }
            b += 2;
        }
        a += 1;
    }
    Ok(forms)
}

/// Number of primitive reduced forms of discriminant `d < 0`.
pub fn class_number_h(d: i64) -> Result<u64> {
    Ok(reduced_forms(d)?
        .into_iter()
        .filter(|&(a, b, c)| a.gcd(&b).gcd(&c) == 1)
        .count() as u64)
}

/// Number of units of the order of discriminant `d < 0`.
pub fn units_w(d: i64) -> Result<u64> {
    check_negative_discriminant(d)?;
    Ok(match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    })
}

/// Sign convention for `H` at negative squares. Only [`NegSquareSign::Negative`]
/// is correct; the other exists so the self-check can prove it notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegSquareSign {
    #[default]
    Negative,
    Positive,
}

/// Memo of `H(D)` values. Entries are filled idempotently, so concurrent
/// readers always see the value a fresh computation would produce.
#[derive(Debug, Default)]
pub struct HurwitzTable {
    hurwitz: RwLock<HashMap<i64, Rational>>,
    fundamental_h0: RwLock<HashMap<i64, Rational>>,
}

impl HurwitzTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static HurwitzTable {
        static TABLE: OnceLock<HurwitzTable> = OnceLock::new();
        TABLE.get_or_init(HurwitzTable::new)
    }

    pub fn len(&self) -> usize {
        self.hurwitz.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, d: i64) -> Rational {
        if let Some(v) = self.hurwitz.read().unwrap().get(&d) {
            return v.clone();
        }
        let v = self.compute(d);
        self.hurwitz.write().unwrap().insert(d, v.clone());
        v
    }

    fn compute(&self, d: i64) -> Rational {
        match d {
            0 => rat(-1, 12),
            d if d < 0 => match isqrt_exact((-d) as u64) {
                Some(u) => rat(-(u as i64), 2),
                None => Rational::zero(),
            },
            d if !matches!(d % 4, 0 | 3) => Rational::zero(),
            d => self.positive(d),
        }
    }

    /// `H(D)` for `D > 0` with `-D` a discriminant.
    fn positive(&self, d: i64) -> Rational {
        let (fund, conductor) = fundamental_part(-d);
        let base = self.fundamental_h0(fund);
        // H(D) = sum over g | f of h0(fund g^2), and
        // h0(fund g^2) = h0(fund) * g * prod_{p | g} (1 - (fund/p)/p).
        let mut total = Rational::zero();
        for g in arith::divisors(conductor) {
            let mut scale = rat(g as i64, 1);
            for p in factor(g).unwrap().primes() {
                scale *= rat(p as i64 - kronecker(fund, p) as i64, p as i64);
            }
            total += &base * scale;
        }
        total
    }

    fn fundamental_h0(&self, fund: i64) -> Rational {
        if let Some(v) = self.fundamental_h0.read().unwrap().get(&fund) {
            return v.clone();
        }
        // Dirichlet: 2h/w = -(1/|d|) sum_{a=1}^{|d|-1} (d/a) a.
        let m = -fund;
        let s: i64 = (1..m).map(|a| kronecker(fund, a as u64) as i64 * a).sum();
        let v = rat(-s, m);
        self.fundamental_h0.write().unwrap().insert(fund, v.clone());
        v
    }
}

/// Split a negative discriminant as `fund * f^2` with `fund` fundamental.
pub fn fundamental_part(disc: i64) -> (i64, u64) {
    debug_assert!(disc < 0 && matches!(disc.rem_euclid(4), 0 | 1));
    let mut core = 1u64;
    let mut f = 1u64;
    for (p, e) in factor((-disc) as u64).unwrap() {
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
    }
    let core = -(core as i64);
    if core.rem_euclid(4) == 1 {
        (core, f)
    } else {
        (4 * core, f / 2)
    }
}

/// Extended Hurwitz class number `H(D)` for any integer `D`:
/// weighted class count for `D > 0`, `-1/12` at 0, `-u/2` at `-u^2`, else 0.
pub fn hurwitz_h(d: i64) -> Rational {
    HurwitzTable::global().get(d)
}

/// [`hurwitz_h`] with a selectable sign at negative squares.
pub fn hurwitz_h_signed(d: i64, sign: NegSquareSign) -> Rational {
    let v = hurwitz_h(d);
    if sign == NegSquareSign::Positive && d < 0 {
        -v
    } else {
        v
    }
}

/// `2h(D)/w(D)` for negative discriminants, extended by `h0(0) = -1/12`,
/// `h0(u^2) = -phi(u)/2`, and 0 elsewhere.
pub fn h0(d: i64) -> Rational {
    static MEMO: OnceLock<RwLock<HashMap<i64, Rational>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(v) = memo.read().unwrap().get(&d) {
        return v.clone();
    }
    let v = if d == 0 {
        rat(-1, 12)
    } else if d > 0 {
        match isqrt_exact(d as u64) {
            Some(u) => rat(-(arith::euler_phi(u) as i64), 2),
            None => Rational::zero(),
        }
    } else if matches!(d.rem_euclid(4), 0 | 1) {
        let h = class_number_h(d).unwrap() as i64;
        let w = units_w(d).unwrap() as i64;
        rat(2 * h, w)
    } else {
        Rational::zero()
    };
    memo.write().unwrap().insert(d, v.clone());
    v
}

/// First failure of the `H`/`h0` inversion identities.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionFailure {
    pub d: i64,
    pub identity: &'static str,
    pub lhs: Rational,
    pub rhs: Rational,
}

fn square_divisors(d: i64) -> Vec<i64> {
    if d == 0 {
        return vec![1];
    }
    let mut out = vec![1i64];
    for (p, e) in factor(d.unsigned_abs()).unwrap() {
        let len = out.len();
        let mut pk = 1i64;
        for _ in 0..e / 2 {
            pk *= p as i64;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Check `H(-D) = sum_{d^2 | D} h0(D/d^2)` and
/// `h0(-D) = sum_{d^2 | D} H(D/d^2) mu(d)` for all `|D| <= d_max`.
pub fn check_inversion(d_max: i64) -> std::result::Result<(), Box<InversionFailure>> {
    for d in -d_max..=d_max {
        let sq = square_divisors(d);
        let rhs: Rational = sq.iter().map(|&f| h0(d / (f * f))).sum();
        let lhs = hurwitz_h(-d);
        if lhs != rhs {
            return Err(Box::new(InversionFailure {
                d,
                identity: "H(-D) = sum h0(D/d^2)",
                lhs,
                rhs,
            }));
        }
        let rhs: Rational = sq
            .iter()
            .map(|&f| hurwitz_h(d / (f * f)) * rat(mobius(f as u64), 1))
            .sum();
        let lhs = h0(-d);
        if lhs != rhs {
            return Err(Box::new(InversionFailure {
                d,
                identity: "h0(-D) = sum H(D/d^2) mu(d)",
                lhs,
                rhs,
            }));
        }
    }
    Ok(())
}

/// All `t` at which `H(4n - t^2)` may be nonzero.
pub fn hurwitz_support(n: u64) -> Vec<i64> {
    let bound = arith::isqrt(4 * n) as i64;
    let mut ts: Vec<i64> = (-bound..=bound).collect();
    ts.extend(arith::square_defect_traces(n));
    ts.sort_unstable();
    ts
}

/// Both sides of the Kronecker-Hurwitz relation `sum_t H(4n - t^2) = sigma_1(n)`,
/// with `H` supplied by the caller.
pub fn kronecker_hurwitz_sides(n: u64, h: impl Fn(i64) -> Rational) -> (Rational, Rational) {
    let lhs: Rational = hurwitz_support(n)
        .into_iter()
        .map(|t| h(4 * n as i64 - t * t))
        .sum();
    let rhs = Rational::from_integer(arith::sigma(n, 1));
    (lhs, rhs)
}

pub fn kronecker_hurwitz_check(n: u64) -> bool {
    let (lhs, rhs) = kronecker_hurwitz_sides(n, hurwitz_h);
    lhs == rhs
}

/// Whether `12 x` is an integer.
pub fn twelfths_integral(x: &Rational) -> bool {
    (x * rat(12, 1)).is_integer()
}

/// Render a value for error messages.
pub(crate) fn show(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `H(x)` where `x` is a rational that is only meaningful when integral;
/// arithmetic functions vanish on non-integers.
pub fn hurwitz_h_of_quotient(num: i64, den: i64) -> Rational {
    if den == 0 || num % den != 0 {
        Rational::zero()
    } else {
        hurwitz_h(num / den)
    }
}

pub fn is_negative_square(d: i64) -> bool {
    d < 0 && isqrt_exact_i64(-d).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    /// Weighted reduced-form count: the forms-side oracle for `H`.
    fn weighted(d: i64) -> Rational {
        reduced_forms(-d)
            .unwrap()
            .into_iter()
            .map(|(a, b, c)| {
                if a == b && b == c {
                    rat(1, 3)
                } else if b == 0 && a == c {
                    rat(1, 2)
                } else {
                    rat(1, 1)
                }
            })
            .sum()
    }

    #[test]
    fn reduced_form_examples() {
        assert_eq!(reduced_forms(-3).unwrap(), vec![(1, 1, 1)]);
        assert_eq!(reduced_forms(-4).unwrap(), vec![(1, 0, 1)]);
        assert_eq!(reduced_forms(-12).unwrap(), vec![(1, 0, 3), (2, 2, 2)]);
        assert_eq!(
            reduced_forms(-23).unwrap(),
            vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]
        );
        assert!(reduced_forms(0).is_err());
        assert!(reduced_forms(5).is_err());
        assert!(reduced_forms(-6).is_err());
        assert!(reduced_forms(-5).is_err());
    }

    #[test]
    fn reduced_forms_match_exhaustive_scan() {
        // Independent scan over a box, keeping only reduced forms.
        for d in (3..400i64).filter(|d| matches!(d % 4, 0 | 3)) {
            let mut scan = Vec::new();
            for a in 1..=d {
                for b in -a..=a {
                    let num = b * b + d;
                    if num % (4 * a) != 0 {
                        continue;
                    }
                    let c = num / (4 * a);
                    let reduced = b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c));
                    if reduced {
                        scan.push((a, b, c));
                    }
                }
            }
            assert_eq!(reduced_forms(-d).unwrap(), scan, "D={}", -d);
        }
    }

    #[test]
    fn h_and_w_examples() {
        assert_eq!((class_number_h(-3).unwrap(), units_w(-3).unwrap()), (1, 6));
        assert_eq!((class_number_h(-4).unwrap(), units_w(-4).unwrap()), (1, 4));
        assert_eq!((class_number_h(-23).unwrap(), units_w(-23).unwrap()), (3, 2));
        assert_eq!(class_number_h(-12).unwrap(), 1);
    }

    #[test]
    fn hurwitz_examples() {
        assert_eq!(hurwitz_h(0), rat(-1, 12));
        assert_eq!(hurwitz_h(3), rat(1, 3));
        assert_eq!(hurwitz_h(4), rat(1, 2));
        assert_eq!(hurwitz_h(-9), rat(-3, 2));
        assert_eq!(hurwitz_h(5), rat(0, 1));
        assert_eq!(hurwitz_h(-5), rat(0, 1));
        assert_eq!(hurwitz_h(12), rat(4, 3));
        assert_eq!(hurwitz_h(16), rat(3, 2));
        assert_eq!(hurwitz_h(44), rat(4, 1));
    }

    #[test]
    fn h0_examples() {
        assert_eq!(h0(4), rat(-1, 2));
        assert_eq!(h0(-3), rat(1, 3));
        assert_eq!(h0(-7), rat(1, 1));
        assert_eq!(h0(0), rat(-1, 12));
        assert_eq!(h0(-12), rat(1, 1));
        assert_eq!(h0(5), rat(0, 1));
    }

    #[test]
    fn hurwitz_matches_forms_oracle() {
        for d in (1..3000i64).filter(|d| matches!(d % 4, 0 | 3)) {
            let v = hurwitz_h(d);
            assert_eq!(v, weighted(d), "D={d}");
            assert!(twelfths_integral(&v));
            assert!(!v.is_negative());
        }
    }

    #[test]
    fn inversion_small() {
        assert_eq!(check_inversion(500), Ok(()));
        // D = 12 term by term: H(12) = h0(-12) + h0(-3)
        assert_eq!(hurwitz_h(12), h0(-12) + h0(-3));
        // D = -16: H(16) = h0(-16) + h0(-4)
        assert_eq!(hurwitz_h(16), h0(-16) + h0(-4));
    }

    #[test]
    fn kronecker_hurwitz_small() {
        // n = 1: 1/2 + 2/3 - 2/12 = 1
        let (lhs, rhs) = kronecker_hurwitz_sides(1, hurwitz_h);
        assert_eq!(lhs, rat(1, 1));
        assert_eq!(rhs, rat(1, 1));
        // n = 2 uses H(-1) at t = +-3
        assert_eq!(hurwitz_support(2), vec![-3, -2, -1, 0, 1, 2, 3]);
        assert!(kronecker_hurwitz_check(2));
        for n in 1..=100 {
            assert!(kronecker_hurwitz_check(n), "n={n}");
        }
    }

    #[test]
    fn flipped_sign_breaks_kronecker_hurwitz() {
        let (lhs, rhs) =
            kronecker_hurwitz_sides(2, |d| hurwitz_h_signed(d, NegSquareSign::Positive));
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn fundamental_decomposition() {
        assert_eq!(fundamental_part(-3), (-3, 1));
        assert_eq!(fundamental_part(-12), (-3, 2));
        assert_eq!(fundamental_part(-16), (-4, 2));
        assert_eq!(fundamental_part(-20), (-20, 1));
        assert_eq!(fundamental_part(-27), (-3, 3));
        assert_eq!(fundamental_part(-32), (-8, 2));
    }

    #[test]
    fn memo_is_consistent() {
        let table = HurwitzTable::new();
        let first: Vec<_> = (0..200).map(|d| table.get(d)).collect();
        let again: Vec<_> = (0..200).map(|d| table.get(d)).collect();
        assert_eq!(first, again);
        assert_eq!(first, (0..200).map(hurwitz_h).collect::<Vec<_>>());
    }
}
