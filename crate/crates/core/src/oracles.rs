//! Independent reference values and the cross-formula self-check.
//!
//! The q-expansion and genus oracles use only integer arithmetic and
//! factorization. The consistency suites compare the engines with each other
//! and with those oracles.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, factor, kronecker, sigma};
use crate::atkin_lehner::{trace_tn_wl, ALQuery};
use crate::characters::enumerate_characters;
use crate::class_numbers::{check_inversion, hurwitz_h_signed, kronecker_hurwitz_sides, show, NegSquareSign};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::gamma0::{trace_s_with, Conventions, CuspCharConvention, TraceQuery};
use crate::gamma1::{gamma1_ms_closed_form, gamma1_s_closed_form, limit_check, trace_gamma1_ms, trace_gamma1_s, Gamma1Query};
use crate::level4::{relation_table_check, trace4};
use crate::qexp::QExpansion;

/// `B_0 .. B_m` with `B_1 = -1/2`.
pub fn bernoulli_numbers(m: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(m + 1);
    b.push(BigRational::one());
    for j in 1..=m {
        // sum_{i<=j} C(j+1, i) B_i = 0
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (i, bi) in b.iter().enumerate() {
            acc += bi * BigRational::from_integer(binom.clone());
            binom = binom * (j + 1 - i) / (i + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(j + 1)));
    }
    b
}

pub fn bernoulli(m: usize) -> BigRational {
    bernoulli_numbers(m).pop().unwrap()
}

/// `q prod_{m>=1} (1 - q^m)^24` up to `q^P`.
pub fn delta_qexp(precision: usize) -> Result<QExpansion> {
    if precision == 0 {
        return Err(Error::Precondition("precision must be at least 1".into()));
    }
    // prod (1 - q^m)^24 up to q^{P-1}
    let len = precision;
    let mut prod = vec![BigInt::zero(); len];
    prod[0] = BigInt::one();
    for m in 1..len {
        for _ in 0..24 {
            for i in (m..len).rev() {
                let sub = prod[i - m].clone();
                prod[i] -= sub;
            }
        }
    }
    let mut coeffs = vec![BigInt::zero()];
    coeffs.extend(prod);
    QExpansion::from_integers(coeffs, "Delta")
}

/// Normalized `E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n` for even `k >= 4`.
pub fn eisenstein(k: u32, precision: usize) -> Result<QExpansion> {
    if k < 4 || !k.is_multiple_of(2) {
        return Err(Error::Precondition(format!("E_k needs k even >= 4 (k={k})")));
    }
    let factor = -BigRational::from_integer(BigInt::from(2 * k)) / bernoulli(k as usize);
    let mut coeffs = vec![BigRational::one()];
    for n in 1..=precision as u64 {
        coeffs.push(&factor * BigRational::from_integer(sigma(n, k - 1)));
    }
    QExpansion::from_rationals(coeffs, format!("E{k}"))
}

/// The normalized eigenform spanning `S_k(SL_2(Z))` for the one-dimensional
/// weights, whose coefficients are the traces of `T_n`.
pub fn level1_eigen_traces(k: u32, precision: usize) -> Result<QExpansion> {
    let (e4, e6) = match k {
        12 => (0, 0),
        16 => (1, 0),
        18 => (0, 1),
        20 => (2, 0),
        22 => (1, 1),
        26 => (2, 1),
        _ => {
            return Err(Error::Precondition(format!(
                "level-1 eigen oracle covers k in 12, 16, 18, 20, 22, 26 (k={k})"
            )))
        }
    };
    let mut f = delta_qexp(precision)?;
    for _ in 0..e4 {
        f = f.mul(&eisenstein(4, precision)?);
    }
    for _ in 0..e6 {
        f = f.mul(&eisenstein(6, precision)?);
    }
    f.label = format!("weight {k} level 1 eigenform");
    Ok(f)
}

/// Genus of `X_0(N)` from the counts of elliptic points and cusps.
pub fn genus_x0(level: u64) -> Result<u64> {
    if level == 0 {
        return Err(Error::Precondition("level must be positive".into()));
    }
    let fac = factor(level)?;
    let mut index = 1u64;
    let mut nu2: i64 = if level.is_multiple_of(4) { 0 } else { 1 };
    let mut nu3: i64 = if level.is_multiple_of(9) { 0 } else { 1 };
    for &(p, e) in fac.pairs() {
        index *= p.pow(e - 1) * (p + 1);
        nu2 *= 1 + kronecker(-4, p) as i64;
        nu3 *= 1 + kronecker(-3, p) as i64;
    }
    let cusps: u64 = divisors(level)
        .into_iter()
        .map(|d| {
            let g = d.gcd(&(level / d));
            (1..=g).filter(|&x| x.gcd(&g) == 1).count() as u64
        })
        .sum();
    let twelve_g = 12 + index as i64 - 3 * nu2 - 4 * nu3 - 6 * cusps as i64;
    if twelve_g < 0 || twelve_g % 12 != 0 {
        return Err(Error::Domain(format!("genus formula gave 12g = {twelve_g} for N = {level}")));
    }
    Ok(twelve_g as u64 / 12)
}

/// A deliberate bug to seed, so that the self-check can be shown to notice it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    /// `H(-u^2) = +u/2`.
    FlipNegSquare,
    /// Evaluate the cusp-sum character without regard to its conductor.
    IgnoreConductor,
}

impl Mutation {
    pub fn conventions(self) -> Conventions {
        let mut c = Conventions::default();
        match self {
            Mutation::None => {}
            Mutation::FlipNegSquare => c.neg_square = NegSquareSign::Positive,
            Mutation::IgnoreConductor => c.cusp_char = CuspCharConvention::IgnoreConductor,
        }
        c
    }
}

/// The seven consistency suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    AtkinLehner,
    CharacterSum,
    ClosedForms,
    Level4,
    Genus,
    LevelOne,
    ClassNumbers,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::AtkinLehner,
        Suite::CharacterSum,
        Suite::ClosedForms,
        Suite::Level4,
        Suite::Genus,
        Suite::LevelOne,
        Suite::ClassNumbers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::AtkinLehner => "atkin-lehner",
            Suite::CharacterSum => "character-sum",
            Suite::ClosedForms => "closed-forms",
            Suite::Level4 => "level4",
            Suite::Genus => "genus",
            Suite::LevelOne => "level-one",
            Suite::ClassNumbers => "class-numbers",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(i) = s.parse::<usize>() {
            if (1..=7).contains(&i) {
                return Ok(Suite::ALL[i - 1]);
            }
        }
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown suite {s:?}")))
    }
}

/// Ranges for the self-check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Level bound for the character-sum comparison.
    pub level_max: u64,
    pub weight_max: u32,
    pub index_max: u64,
    pub al_level_max: u64,
    pub al_index_max: u64,
    pub involution_level_max: u64,
    pub genus_level_max: u64,
    pub closed_form_level_max: u64,
    pub closed_form_index_max: u64,
    pub level4_index_max: u64,
    pub level4_zero_max: u64,
    pub level_one_precision: usize,
    pub kronecker_hurwitz_max: u64,
    pub inversion_max: i64,
    pub relation_max: i64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            level_max: 16,
            weight_max: 8,
            index_max: 12,
            al_level_max: 16,
            al_index_max: 12,
            involution_level_max: 30,
            genus_level_max: 60,
            closed_form_level_max: 40,
            closed_form_index_max: 6,
            level4_index_max: 40,
            level4_zero_max: 200,
            level_one_precision: 30,
            kronecker_hurwitz_max: 300,
            inversion_max: 2000,
            relation_max: 2000,
        }
    }
}

impl Bounds {
    /// The ranges of the acceptance criteria.
    pub fn full() -> Self {
        Bounds {
            level_max: 16,
            weight_max: 6,
            index_max: 12,
            al_level_max: 30,
            al_index_max: 20,
            involution_level_max: 50,
            genus_level_max: 100,
            closed_form_level_max: 60,
            closed_form_index_max: 8,
            level4_index_max: 100,
            level4_zero_max: 500,
            level_one_precision: 50,
            kronecker_hurwitz_max: 500,
            inversion_max: 10_000,
            relation_max: 2000,
        }
    }

    /// Shrink everything for a fast run.
    pub fn quick() -> Self {
        Bounds {
            level_max: 8,
            weight_max: 4,
            index_max: 6,
            al_level_max: 8,
            al_index_max: 6,
            involution_level_max: 12,
            genus_level_max: 20,
            closed_form_level_max: 20,
            closed_form_index_max: 4,
            level4_index_max: 12,
            level4_zero_max: 40,
            level_one_precision: 10,
            kronecker_hurwitz_max: 50,
            inversion_max: 200,
            relation_max: 200,
        }
    }
}

impl FromStr for Bounds {
    type Err = Error;

    /// `desk`, `full`, `quick`, or a preset followed by `key=value` overrides,
    /// e.g. `N=10,k=4,n=8` or `full,n=20`.
    fn from_str(s: &str) -> Result<Self> {
        let mut b = Bounds::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "desk" | "default" => b = Bounds::default(),
                "full" => b = Bounds::full(),
                "quick" => b = Bounds::quick(),
                _ => {
                    let (key, value) = part
                        .split_once('=')
                        .ok_or_else(|| Error::Precondition(format!("bad bounds item {part:?}")))?;
                    let bad = || Error::Precondition(format!("bad value in {part:?}"));
                    let v: u64 = value.trim().parse().map_err(|_| bad())?;
                    match key.trim() {
                        "N" => b.level_max = v,
                        "k" => b.weight_max = u32::try_from(v).map_err(|_| bad())?,
                        "n" => b.index_max = v,
                        "al" => b.al_level_max = v,
                        "genus" => b.genus_level_max = v,
                        "c1" => b.closed_form_level_max = v,
                        "level4" => b.level4_index_max = v,
                        "kh" => b.kronecker_hurwitz_max = v,
                        "D" => b.inversion_max = v as i64,
                        _ => return Err(Error::Precondition(format!("unknown bounds key {key:?}"))),
                    }
                }
            }
        }
        Ok(b)
    }
}

/// One failed comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleFailure {
    pub case: String,
    pub expected: String,
    pub got: String,
}

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<OracleFailure>,
}

impl OracleReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

type Case = Box<dyn Fn() -> Option<OracleFailure> + Send + Sync>;

fn run(suite: Suite, cases: Vec<Case>) -> OracleReport {
    let failures: Vec<OracleFailure> = cases.par_iter().filter_map(|c| c()).collect();
    OracleReport {
        suite: suite.name().to_string(),
        cases: cases.len(),
        failures,
    }
}

fn fail(case: String, expected: impl fmt::Display, got: impl fmt::Display) -> Option<OracleFailure> {
    Some(OracleFailure {
        case,
        expected: expected.to_string(),
        got: got.to_string(),
    })
}

fn compare<T: PartialEq + fmt::Display>(case: String, expected: Result<T>, got: Result<T>) -> Option<OracleFailure> {
    match (expected, got) {
        (Ok(e), Ok(g)) if e == g => None,
        (Ok(e), Ok(g)) => fail(case, e, g),
        (Err(e), _) => fail(case, format!("error: {e}"), "-"),
        (_, Err(g)) => fail(case, "-", format!("error: {g}")),
    }
}

fn gamma0(level: u64, k: u32, n: u64, conv: Conventions) -> Result<CyclotomicNumber> {
    Ok(trace_s_with(&TraceQuery::trivial(level, k, n)?, &conv)?.value)
}

fn integer(x: impl Into<BigInt>) -> CyclotomicNumber {
    CyclotomicNumber::from_integer(x)
}

fn rational(x: BigRational) -> CyclotomicNumber {
    CyclotomicNumber::from_rational(x)
}

fn atkin_lehner_cases(b: &Bounds, conv: Conventions) -> Vec<Case> {
    let mut cases: Vec<Case> = Vec::new();
    for level in 1..=b.al_level_max {
        for k in (2..=b.weight_max.min(6)).step_by(2) {
            for n in 1..=b.al_index_max {
                cases.push(Box::new(move || {
                    compare(
                        format!("W_1 vs Gamma0: N={level} k={k} n={n}"),
                        gamma0(level, k, n, conv),
                        ALQuery::new(level, 1, k, n)
                            .and_then(|q| trace_tn_wl(&q))
                            .map(|r| r.value),
                    )
                }));
            }
        }
    }
    for level in 1..=b.involution_level_max {
        for ell in divisors(level) {
            if ell.gcd(&(level / ell)) != 1 {
                continue;
            }
            cases.push(Box::new(move || {
                let case = format!("involution: N={level} l={ell}");
                let g = match genus_x0(level) {
                    Ok(g) => BigInt::from(g),
                    Err(e) => return fail(case, format!("error: {e}"), "-"),
                };
                let tr = match ALQuery::new(level, ell, 2, 1).and_then(|q| trace_tn_wl(&q)) {
                    Ok(r) => r.value,
                    Err(e) => return fail(case, "-", format!("error: {e}")),
                };
                let Some(t) = tr.to_rational().filter(|t| t.is_integer()).map(|t| t.to_integer()) else {
                    return fail(case, "integer", tr);
                };
                let bounded = num_traits::Signed::abs(&t) <= g;
                let parity = (&g - &t).is_even();
                if bounded && parity {
                    None
                } else {
                    fail(case, format!("|tr| <= {g}, tr = {g} mod 2"), t)
                }
            }));
        }
    }
    cases
}

fn character_sum_cases(b: &Bounds, conv: Conventions) -> Vec<Case> {
    let mut cases: Vec<Case> = Vec::new();
    for level in 1..=b.level_max {
        for k in 2..=b.weight_max {
            for n in 1..=b.index_max {
                cases.push(Box::new(move || {
                    let case = format!("sum over chi vs Gamma1: N={level} k={k} n={n}");
                    let chars = match enumerate_characters(level, None) {
                        Ok(c) => c,
                        Err(e) => return fail(case, format!("error: {e}"), "-"),
                    };
                    let mut sum = CyclotomicNumber::zero_in(1);
                    for chi in chars {
                        let q = match TraceQuery::new(level, k, chi, n) {
                            Ok(q) => q,
                            Err(e) => return fail(case, format!("error: {e}"), "-"),
                        };
                        let v = match trace_s_with(&q, &conv) {
                            Ok(r) => r.value,
                            Err(e) => return fail(case, "-", format!("error: {e}")),
                        };
                        if !q.parity_ok() && !v.is_zero() {
                            return fail(format!("{case} (wrong-parity chi {:?})", q.character.exponents()), 0, v);
                        }
                        sum += v;
                    }
                    compare(
                        case,
                        Gamma1Query::new(level, k, n).and_then(|q| trace_gamma1_s(&q)).map(|r| r.value),
                        Ok(sum.shrink()),
                    )
                }));
            }
        }
    }
    cases
}

fn closed_form_cases(b: &Bounds) -> Vec<Case> {
    let mut cases: Vec<Case> = Vec::new();
    for n in 2..=b.closed_form_index_max {
        for k in [2u32, 3, 4, 6] {
            for level in (2 * n + 3)..=b.closed_form_level_max {
                cases.push(Box::new(move || {
                    let q = match Gamma1Query::new(level, k, n) {
                        Ok(q) => q,
                        Err(e) => return fail(format!("N={level} k={k} n={n}"), format!("error: {e}"), "-"),
                    };
                    let ms = trace_gamma1_ms(&q).map(|r| r.value);
                    let s = trace_gamma1_s(&q).map(|r| r.value);
                    compare(
                        format!("closed form M+S: N={level} k={k} n={n}"),
                        ms,
                        gamma1_ms_closed_form(&q).map(rational),
                    )
                    .or_else(|| {
                        compare(
                            format!("closed form S: N={level} k={k} n={n}"),
                            s,
                            gamma1_s_closed_form(&q).map(rational),
                        )
                    })
                }));
            }
            if k > 2 {
                let max = b.closed_form_level_max;
                cases.push(Box::new(move || {
                    let case = format!("tr/phi(N) = -1/2: k={k} n={n}");
                    match limit_check(n, k, 1..=max) {
                        Ok(rows) => rows
                            .into_iter()
                            .find(|r| !r.ok)
                            .and_then(|r| fail(format!("{case} N={}", r.level), r.expected, r.ratio)),
                        Err(e) => fail(case, "-", format!("error: {e}")),
                    }
                }));
            }
        }
    }
    cases
}

fn level4_cases(b: &Bounds, conv: Conventions) -> Vec<Case> {
    let mut cases: Vec<Case> = Vec::new();
    for k in 2..=b.weight_max.max(3) {
        for n in 1..=b.level4_index_max {
            cases.push(Box::new(move || {
                let case = format!("level 4 formula vs engines: k={k} n={n}");
                let chi_index = if k % 2 == 0 { 0 } else { 1 };
                let explicit = trace4(k, n).map(integer);
                let engine = crate::characters::DirichletCharacter::by_index(4, chi_index)
                    .and_then(|chi| TraceQuery::new(4, k, chi, n))
                    .and_then(|q| trace_s_with(&q, &conv))
                    .map(|r| r.value);
                let gamma1 = Gamma1Query::new(4, k, n).and_then(|q| trace_gamma1_s(&q)).map(|r| r.value);
                compare(case.clone(), engine, explicit.clone())
                    .or_else(|| compare(format!("{case} (Gamma1)"), gamma1, explicit))
            }));
        }
    }
    let zero_max = b.level4_zero_max;
    cases.push(Box::new(move || {
        for n in 1..=zero_max {
            for k in [2, 3] {
                match trace4(k, n) {
                    Ok(v) if v.is_zero() => {}
                    Ok(v) => return fail(format!("trivial space: k={k} n={n}"), 0, v),
                    Err(e) => return fail(format!("trivial space: k={k} n={n}"), 0, format!("error: {e}")),
                }
            }
        }
        None
    }));
    let k_max = b.weight_max.max(3);
    cases.push(Box::new(move || {
        for k in (3..=k_max).step_by(2) {
            for n in (3..=zero_max).step_by(4) {
                match trace4(k, n) {
                    Ok(v) if v.is_zero() => {}
                    Ok(v) => return fail(format!("n = 3 mod 4: k={k} n={n}"), 0, v),
                    Err(e) => return fail(format!("n = 3 mod 4: k={k} n={n}"), 0, format!("error: {e}")),
                }
            }
        }
        None
    }));
    cases
}

fn genus_cases(b: &Bounds, conv: Conventions) -> Vec<Case> {
    (1..=b.genus_level_max)
        .map(|level| -> Case {
            Box::new(move || {
                compare(
                    format!("tr T_1 on S_2(Gamma0(N)) vs genus: N={level}"),
                    genus_x0(level).map(integer),
                    gamma0(level, 2, 1, conv),
                )
            })
        })
        .collect()
}

fn level_one_cases(b: &Bounds, conv: Conventions) -> Vec<Case> {
    let p = b.level_one_precision;
    let mut cases: Vec<Case> = Vec::new();
    for k in [12u32, 16, 18, 20, 22, 26] {
        let oracle = match level1_eigen_traces(k, p) {
            Ok(f) => f,
            Err(e) => {
                let msg = e.to_string();
                cases.push(Box::new(move || fail(format!("eigen oracle k={k}"), "-", msg.clone())));
                continue;
            }
        };
        for n in 1..=p {
            let expected = oracle.coeffs[n].clone();
            cases.push(Box::new(move || {
                compare(
                    format!("level 1 vs eigenform: k={k} n={n}"),
                    Ok(expected.clone()),
                    gamma0(1, k, n as u64, conv),
                )
            }));
        }
    }
    cases
}

fn class_number_cases(b: &Bounds, conv: Conventions) -> Vec<Case> {
    let mut cases: Vec<Case> = Vec::new();
    let sign = conv.neg_square;
    for n in 1..=b.kronecker_hurwitz_max {
        cases.push(Box::new(move || {
            let (lhs, rhs) = kronecker_hurwitz_sides(n, |d| hurwitz_h_signed(d, sign));
            if lhs == rhs {
                None
            } else {
                fail(format!("Kronecker-Hurwitz: n={n}"), show(&rhs), show(&lhs))
            }
        }));
    }
    let d_max = b.inversion_max;
    cases.push(Box::new(move || match check_inversion(d_max) {
        Ok(()) => None,
        Err(f) => fail(format!("{} at D={}", f.identity, f.d), show(&f.lhs), show(&f.rhs)),
    }));
    let r_max = b.relation_max;
    cases.push(Box::new(move || match relation_table_check(r_max) {
        Ok(r) => r
            .first_failure
            .and_then(|f| fail(format!("H(4D) relation {:?} at D={}", f.class, f.d), f.predicted, f.h_4d)),
        Err(e) => fail("H(4D) relations".into(), "-", format!("error: {e}")),
    }));
    cases
}

/// Run one suite.
pub fn run_suite(suite: Suite, bounds: &Bounds, mutation: Mutation) -> OracleReport {
    let conv = mutation.conventions();
    let cases = match suite {
        Suite::AtkinLehner => atkin_lehner_cases(bounds, conv),
        Suite::CharacterSum => character_sum_cases(bounds, conv),
        Suite::ClosedForms => closed_form_cases(bounds),
        Suite::Level4 => level4_cases(bounds, conv),
        Suite::Genus => genus_cases(bounds, conv),
        Suite::LevelOne => level_one_cases(bounds, conv),
        Suite::ClassNumbers => class_number_cases(bounds, conv),
    };
    run(suite, cases)
}

/// Run all seven suites in order.
pub fn consistency_suite(bounds: &Bounds, mutation: Mutation) -> Vec<OracleReport> {
    Suite::ALL.into_iter().map(|s| run_suite(s, bounds, mutation)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(f: &QExpansion) -> Vec<i64> {
        f.integer_coeffs().unwrap().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], BigRational::new((-1).into(), 2.into()));
        assert_eq!(b[2], BigRational::new(1.into(), 6.into()));
        assert_eq!(b[3], BigRational::zero());
        assert_eq!(b[12], BigRational::new((-691).into(), 2730.into()));
        assert_eq!(bernoulli(26), BigRational::new(8553103.into(), 6.into()));
    }

    #[test]
    fn delta_coefficients() {
        let d = delta_qexp(6).unwrap();
        assert_eq!(ints(&d), vec![0, 1, -24, 252, -1472, 4830, -6048]);
    }

    #[test]
    fn eisenstein_normalization() {
        assert_eq!(ints(&eisenstein(4, 3).unwrap()), vec![1, 240, 2160, 6720]);
        assert_eq!(ints(&eisenstein(6, 2).unwrap()), vec![1, -504, -16632]);
    }

    #[test]
    fn eigenforms() {
        assert_eq!(level1_eigen_traces(12, 5).unwrap().coeffs, delta_qexp(5).unwrap().coeffs);
        assert_eq!(ints(&level1_eigen_traces(16, 2).unwrap())[2], 216);
        assert_eq!(ints(&level1_eigen_traces(18, 2).unwrap())[2], -528);
        assert!(level1_eigen_traces(14, 5).is_err());
    }

    #[test]
    fn eigenforms_are_multiplicative() {
        for k in [12, 16, 18, 20, 22, 26] {
            let a = ints(&level1_eigen_traces(k, 12).unwrap());
            assert_eq!(a[6], a[2] * a[3]);
            assert_eq!(a[10], a[2] * a[5]);
            assert_eq!(a[12], a[3] * a[4]);
        }
    }

    #[test]
    fn genus_values() {
        let known = [(1, 0), (11, 1), (23, 2), (37, 2), (22, 2), (36, 1), (64, 3), (100, 7)];
        for (n, g) in known {
            assert_eq!(genus_x0(n).unwrap(), g, "N={n}");
        }
    }

    #[test]
    fn quick_suites_pass() {
        for r in consistency_suite(&Bounds::quick(), Mutation::None) {
            assert!(r.ok(), "{}: {:?}", r.suite, &r.failures[..r.failures.len().min(3)]);
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn mutations_are_caught() {
        let b = Bounds::quick();
        let r = run_suite(Suite::ClassNumbers, &b, Mutation::FlipNegSquare);
        assert!(r.failures.iter().any(|f| f.case == "Kronecker-Hurwitz: n=2"));
        let r = run_suite(Suite::CharacterSum, &b, Mutation::IgnoreConductor);
        assert!(!r.ok());
    }

    #[test]
    fn bounds_parse() {
        let b: Bounds = "full,n=20".parse().unwrap();
        assert_eq!(b.index_max, 20);
        assert_eq!(b.genus_level_max, 100);
        assert!("x=1".parse::<Bounds>().is_err());
        assert_eq!("3".parse::<Suite>().unwrap(), Suite::ClosedForms);
    }
}
