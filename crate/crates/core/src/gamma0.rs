//! Traces of Hecke operators on `S_k(Gamma0(N), chi)` and `M_k + S_k`.
//!
//! Character sums are accumulated as exponent counts over `zeta_ord` where
//! `ord` is the order of `chi`, and reduced to a [`CyclotomicNumber`] once.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{
    crt_solve, divisors, euler_phi, factor, gegenbauer_i64, isqrt, isqrt_exact, mobius, phi1,
    sigma1_coprime,
};
use crate::characters::DirichletCharacter;
use crate::class_numbers::{hurwitz_h_signed, show, NegSquareSign};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};

/// How the `t^2 = 4n` terms of the cuspidal formula are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryRoute {
    /// The closed value `phi1(N)/12 (k-1) n^{k/2-1} chi(sqrt n)`.
    #[default]
    Explicit,
    /// `-1/2 sum_{t = +-2 sqrt n} p(t,n) H(0) sum_{u | N} C(u,t,n)`.
    Literal,
}

/// How `chi(alpha)` is read in the cusp sum `Phi_{N,chi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CuspCharConvention {
    /// Restrict to `(r,s) | N/c(chi)` and evaluate the induced character mod `N/(r,s)`.
    #[default]
    InducedModDivisor,
    /// Drop the conductor restriction and read the CRT representative as a residue mod `N`.
    IgnoreConductor,
}

/// Evaluation conventions. The defaults are the correct ones; the others exist
/// for cross-checks and for proving that the self-check notices mistakes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Conventions {
    pub boundary: BoundaryRoute,
    pub neg_square: NegSquareSign,
    pub cusp_char: CuspCharConvention,
}

/// `sum_j c_j zeta_m^j` with integer counts, unreduced.
pub(crate) type Counts = Vec<i64>;

fn counts_to_cyc(order: u64, counts: &Counts) -> CyclotomicNumber {
    CyclotomicNumber::from_power_counts(
        order,
        counts.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
    )
}

/// Accumulator for rational multiples of exponent counts.
pub(crate) struct Accumulator {
    order: u64,
    counts: Vec<BigRational>,
}

impl Accumulator {
    pub(crate) fn new(order: u64) -> Self {
        Accumulator {
            order,
            counts: vec![BigRational::zero(); order as usize],
        }
    }

    pub(crate) fn add(&mut self, weight: &BigRational, c: &Counts) {
        if weight.is_zero() {
            return;
        }
        for (slot, &x) in self.counts.iter_mut().zip(c) {
            if x != 0 {
                *slot += weight * BigRational::from_integer(x.into());
            }
        }
    }

    pub(crate) fn merge(&mut self, other: Accumulator) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
    }

    pub(crate) fn finish(self) -> CyclotomicNumber {
        CyclotomicNumber::from_power_counts(self.order, self.counts)
    }
}

/// `S_N(u,t,n)`: units `alpha` mod `N` with `alpha^2 - t alpha + n = 0 mod N u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SNSolutionSet {
    pub modulus: u64,
    pub u: u64,
    pub t: i64,
    pub n: u64,
    pub solutions: Vec<u64>,
}

fn check_un(u: u64, t: i64, n: u64, level: u64) -> Result<()> {
    let disc = t as i128 * t as i128 - 4 * n as i128;
    if u == 0 || !level.is_multiple_of(u) || disc % (u as i128 * u as i128) != 0 {
        return Err(Error::Precondition(format!(
            "need u | N and u^2 | t^2 - 4n (u={u}, t={t}, n={n}, N={level})"
        )));
    }
    Ok(())
}

/// Units mod `p^e` whose lifts satisfy `x^2 - t x + n = 0 mod p^{e+f}`.
fn local_roots(p: u64, e: u32, f: u32, t: i64, n: u64) -> Vec<u64> {
    type Key = (u64, u32, u32, u64, u64);
    static MEMO: OnceLock<RwLock<HashMap<Key, Vec<u64>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    let big = p.pow(e + f) as i128;
    let tr = (t as i128).rem_euclid(big);
    let nr = (n as i128).rem_euclid(big);
    let key = (p, e, f, tr as u64, nr as u64);
    if let Some(v) = memo.read().unwrap().get(&key) {
        return v.clone();
    }
    let poly = |x: i128, m: i128| (x * x - tr * x + nr).rem_euclid(m);
    // Roots mod p, then lift level by level; every root mod p^{j+1}
    // reduces to a root mod p^j, so the tree is complete.
    let pi = p as i128;
    let mut roots: Vec<i128> = (0..pi).filter(|&x| x % pi != 0 && poly(x, pi) == 0).collect();
    let mut modulus = pi;
    while modulus < big {
        let next = modulus * pi;
        roots = roots
            .into_iter()
            .flat_map(|r| (0..pi).map(move |i| r + i * modulus))
            .filter(|&x| poly(x, next) == 0)
            .collect();
        modulus = next;
    }
    let q = p.pow(e) as i128;
    let mut out: Vec<u64> = roots.into_iter().map(|r| (r % q) as u64).collect();
    out.sort_unstable();
    out.dedup();
    memo.write().unwrap().insert(key, out.clone());
    out
}

/// Per prime power of `N`: the local solutions lifted to be `1` elsewhere.
fn local_solution_lifts(u: u64, t: i64, n: u64, level: u64) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for (p, e) in factor(level)? {
        let q = p.pow(e);
        let f = crate::arith::valuation_u64(p, u);
        let roots = local_roots(p, e, f, t, n);
        out.push(
            roots
                .into_iter()
                .map(|r| crt_solve(&[(r as i64, q), (1, level / q)]).map(|x| x.0))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(out)
}

pub fn s_n(u: u64, t: i64, n: u64, level: u64) -> Result<SNSolutionSet> {
    check_un(u, t, n, level)?;
    let mut solutions = vec![1 % level];
    for lifts in local_solution_lifts(u, t, n, level)? {
        solutions = solutions
            .iter()
            .flat_map(|&a| lifts.iter().map(move |&b| (a as u128 * b as u128 % level as u128) as u64))
            .collect();
    }
    solutions.sort_unstable();
    Ok(SNSolutionSet {
        modulus: level,
        u,
        t,
        n,
        solutions,
    })
}

/// `sum_{alpha in S_N(u,t,n)} chi(alpha)` as exponent counts; multiplicative
/// over the prime powers of `N`.
fn char_sum_counts(chi: &DirichletCharacter, u: u64, t: i64, n: u64) -> Result<Counts> {
    let order = chi.order() as usize;
    let mut acc = vec![0i64; order];
    acc[0] = 1;
    for lifts in local_solution_lifts(u, t, n, chi.modulus())? {
        let mut next = vec![0i64; order];
        for &b in &lifts {
            let e = chi.log_value(b as i64).expect("local solutions are units") as usize;
            for (j, &c) in acc.iter().enumerate() {
                if c != 0 {
                    next[(j + e) % order] += c;
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

fn b_counts(chi: &DirichletCharacter, u: u64, t: i64, n: u64) -> Result<Counts> {
    let level = chi.modulus();
    check_un(u, t, n, level)?;
    let scale = (phi1(level) / phi1(level / u)) as i64;
    Ok(char_sum_counts(chi, u, t, n)?.into_iter().map(|c| c * scale).collect())
}

fn c_counts(chi: &DirichletCharacter, u: u64, t: i64, n: u64) -> Result<Counts> {
    check_un(u, t, n, chi.modulus())?;
    let mut acc = vec![0i64; chi.order() as usize];
    for d in divisors(u) {
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        for (a, b) in acc.iter_mut().zip(b_counts(chi, u / d, t, n)?) {
            *a += mu * b;
        }
    }
    Ok(acc)
}

/// `B_{N,chi}(u,t,n) = phi1(N)/phi1(N/u) sum_{alpha in S_N(u,t,n)} chi(alpha)`.
pub fn b_n_chi(u: u64, t: i64, n: u64, chi: &DirichletCharacter) -> Result<CyclotomicNumber> {
    Ok(counts_to_cyc(chi.order(), &b_counts(chi, u, t, n)?))
}

/// `C_{N,chi}(u,t,n) = sum_{d | u} mu(d) B_{N,chi}(u/d,t,n)`.
pub fn c_n_chi(u: u64, t: i64, n: u64, chi: &DirichletCharacter) -> Result<CyclotomicNumber> {
    Ok(counts_to_cyc(chi.order(), &c_counts(chi, u, t, n)?))
}

fn phi_counts(a: u64, d: u64, chi: &DirichletCharacter, conv: CuspCharConvention) -> Result<Counts> {
    let level = chi.modulus();
    let mut acc = vec![0i64; chi.order() as usize];
    let diff = a.abs_diff(d);
    for r in divisors(level) {
        let s = level / r;
        let g = r.gcd(&s);
        if !diff.is_multiple_of(g) {
            continue;
        }
        if conv == CuspCharConvention::InducedModDivisor && !(level / chi.conductor()).is_multiple_of(g) {
            continue;
        }
        let (alpha, m) = crt_solve(&[(a as i64, r), (d as i64, s)])?;
        let e = match conv {
            CuspCharConvention::InducedModDivisor => chi.log_value_mod_divisor(alpha as i64, m)?,
            CuspCharConvention::IgnoreConductor => chi.log_value(alpha as i64),
        };
        if let Some(e) = e {
            acc[e as usize] += euler_phi(g) as i64;
        }
    }
    Ok(acc)
}

/// `Phi_{N,chi}(a,d)`: sum over `N = rs` with `(r,s) | (N/c(chi), a-d)` of
/// `phi((r,s)) chi(alpha)`, `alpha = a mod r`, `alpha = d mod s`, read mod `N/(r,s)`.
pub fn phi_n_chi(a: u64, d: u64, chi: &DirichletCharacter) -> Result<CyclotomicNumber> {
    Ok(counts_to_cyc(
        chi.order(),
        &phi_counts(a, d, chi, CuspCharConvention::InducedModDivisor)?,
    ))
}

/// Contribution of `t^2 = 4n`: `phi1(N)/12 (k-1) n^{k/2-1} chi(sqrt n)` when `n` is a square.
pub fn square_term(chi: &DirichletCharacter, k: u32, n: u64) -> CyclotomicNumber {
    let Some(s) = isqrt_exact(n) else {
        return CyclotomicNumber::zero_in(chi.order());
    };
    let coeff = BigRational::new(
        BigInt::from(phi1(chi.modulus())) * BigInt::from(k - 1) * BigInt::from(s).pow(k - 2),
        BigInt::from(12),
    );
    chi.eval(s as i64).scale(&coeff)
}

/// Parameters of a trace computation on `Gamma0(N)` with character.
#[derive(Debug, Clone)]
pub struct TraceQuery {
    pub level: u64,
    pub weight: u32,
    pub character: DirichletCharacter,
    pub n: u64,
}

impl TraceQuery {
    pub fn new(level: u64, weight: u32, character: DirichletCharacter, n: u64) -> Result<Self> {
        let q = TraceQuery {
            level,
            weight,
            character,
            n,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn trivial(level: u64, weight: u32, n: u64) -> Result<Self> {
        Self::new(level, weight, DirichletCharacter::trivial(level)?, n)
    }

    fn validate(&self) -> Result<()> {
        if self.level == 0 || self.n == 0 || self.weight < 2 {
            return Err(Error::Precondition(format!(
                "need N >= 1, k >= 2, n >= 1 (N={}, k={}, n={})",
                self.level, self.weight, self.n
            )));
        }
        if self.character.modulus() != self.level {
            return Err(Error::Precondition(format!(
                "character modulus {} differs from level {}",
                self.character.modulus(),
                self.level
            )));
        }
        if self.n > 1 << 40 {
            return Err(Error::Precondition("Hecke index too large".into()));
        }
        Ok(())
    }

    /// Whether `chi(-1) = (-1)^k`, i.e. whether the spaces can be nonzero.
    pub fn parity_ok(&self) -> bool {
        let sign = if self.weight.is_multiple_of(2) { 1 } else { -1 };
        self.character.parity() == sign
    }
}

/// A trace with its three summands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceResult {
    pub value: CyclotomicNumber,
    pub elliptic: CyclotomicNumber,
    pub hyperbolic: CyclotomicNumber,
    pub delta: CyclotomicNumber,
}

impl TraceResult {
    fn zero(order: u64) -> Self {
        let z = CyclotomicNumber::zero_in(order);
        TraceResult {
            value: z.clone(),
            elliptic: z.clone(),
            hyperbolic: z.clone(),
            delta: z,
        }
    }

    fn assemble(elliptic: CyclotomicNumber, hyperbolic: CyclotomicNumber, delta: CyclotomicNumber) -> Self {
        let value = &(&elliptic + &hyperbolic) + &delta;
        TraceResult {
            value,
            elliptic,
            hyperbolic,
            delta,
        }
    }
}

pub(crate) fn ensure_integral(value: &CyclotomicNumber, context: impl FnOnce() -> String) -> Result<()> {
    if value.is_integral() {
        Ok(())
    } else {
        Err(Error::NonIntegral {
            context: context(),
            value: value.to_string(),
        })
    }
}

pub(crate) fn ensure_integral_rational(value: &BigRational, context: impl FnOnce() -> String) -> Result<()> {
    if value.is_integer() {
        Ok(())
    } else {
        Err(Error::NonIntegral {
            context: context(),
            value: show(value),
        })
    }
}

fn delta_term(q: &TraceQuery) -> CyclotomicNumber {
    if q.weight == 2 && q.character.is_trivial() {
        CyclotomicNumber::from_integer(sigma1_coprime(q.n, q.level))
    } else {
        CyclotomicNumber::zero_in(q.character.order())
    }
}

/// `sum_{u | N, u^2 | t^2 - 4n} H((4n - t^2)/u^2) C(u,t,n)` scaled by `weight`, into `acc`.
fn add_class_number_terms(
    acc: &mut Accumulator,
    q: &TraceQuery,
    t: i64,
    weight: &BigRational,
    conv: &Conventions,
) -> Result<()> {
    let disc = 4 * q.n as i64 - t * t;
    for u in divisors(q.level) {
        let u2 = (u * u) as i64;
        if disc % u2 != 0 {
            continue;
        }
        let h = hurwitz_h_signed(disc / u2, conv.neg_square);
        if h.is_zero() {
            continue;
        }
        acc.add(&(weight * h), &c_counts(&q.character, u, t, q.n)?);
    }
    Ok(())
}

fn cusp_sum(q: &TraceQuery, conv: &Conventions) -> Result<CyclotomicNumber> {
    let mut acc = Accumulator::new(q.character.order());
    for a in divisors(q.n) {
        let d = q.n / a;
        let w = BigRational::from_integer(BigInt::from(a.min(d)).pow(q.weight - 1));
        acc.add(&w, &phi_counts(a, d, &q.character, conv.cusp_char)?);
    }
    let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    Ok(acc.finish().scale(&half))
}

/// `tr(T_n, S_k(N, chi))`.
pub fn trace_s(q: &TraceQuery) -> Result<TraceResult> {
    trace_s_with(q, &Conventions::default())
}

pub fn trace_s_with(q: &TraceQuery, conv: &Conventions) -> Result<TraceResult> {
    q.validate()?;
    let order = q.character.order();
    if !q.parity_ok() {
        return Ok(TraceResult::zero(order));
    }
    let w = q.weight - 2;
    let n = q.n;
    let bound = isqrt(4 * n) as i64;
    let root = isqrt_exact(n).map(|s| 2 * s as i64);
    let neg_half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    let partials: Vec<Accumulator> = (-bound..=bound)
        .into_par_iter()
        .filter(|&t| Some(t.abs()) != root)
        .map(|t| {
            let mut acc = Accumulator::new(order);
            let p = BigRational::from_integer(gegenbauer_i64(w, t, n as i64));
            add_class_number_terms(&mut acc, q, t, &(&neg_half * p), conv)?;
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut elliptic = Accumulator::new(order);
    for p in partials {
        elliptic.merge(p);
    }
    let mut elliptic = elliptic.finish();
    if let Some(two_s) = root {
        elliptic += match conv.boundary {
            BoundaryRoute::Explicit => square_term(&q.character, q.weight, n),
            BoundaryRoute::Literal => {
                let mut acc = Accumulator::new(order);
                for t in [-two_s, two_s] {
                    let p = BigRational::from_integer(gegenbauer_i64(w, t, n as i64));
                    add_class_number_terms(&mut acc, q, t, &(&neg_half * p), conv)?;
                }
                acc.finish()
            }
        };
    }
    let hyperbolic = cusp_sum(q, conv)?;
    let result = TraceResult::assemble(elliptic, hyperbolic, delta_term(q));
    ensure_integral(&result.value, || {
        format!("tr T_{} on S_{}(Gamma0({}), chi)", n, q.weight, q.level)
    })?;
    Ok(result)
}

/// `tr(T_n, M_k(N, chi) + S_k(N, chi))`, summed over all `t` in `Z`.
/// Wrong-parity characters are not special-cased; the sum vanishes by itself.
pub fn trace_m_plus_s(q: &TraceQuery) -> Result<TraceResult> {
    trace_m_plus_s_with(q, &Conventions::default())
}

pub fn trace_m_plus_s_with(q: &TraceQuery, conv: &Conventions) -> Result<TraceResult> {
    q.validate()?;
    let order = q.character.order();
    let w = q.weight - 2;
    let n = q.n;
    let minus_one = -BigRational::one();
    let partials: Vec<Accumulator> = crate::class_numbers::hurwitz_support(n)
        .into_par_iter()
        .map(|t| {
            let mut acc = Accumulator::new(order);
            let p = BigRational::from_integer(gegenbauer_i64(w, t, n as i64));
            add_class_number_terms(&mut acc, q, t, &(&minus_one * p), conv)?;
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut elliptic = Accumulator::new(order);
    for p in partials {
        elliptic.merge(p);
    }
    let result = TraceResult::assemble(
        elliptic.finish(),
        CyclotomicNumber::zero_in(order),
        delta_term(q),
    );
    ensure_integral(&result.value, || {
        format!("tr T_{} on M_{} + S_{}(Gamma0({}), chi)", n, q.weight, q.weight, q.level)
    })?;
    Ok(result)
}

/// Exhaustive residue scan for `S_N(u,t,n)`; an oracle for the lifting code.
pub fn scan_s_n(u: u64, t: i64, n: u64, level: u64) -> Vec<u64> {
    let m = (level * u) as i128;
    (0..level)
        .filter(|&a| a.gcd(&level) == 1)
        .filter(|&a| {
            let a = a as i128;
            (a * a - t as i128 * a + n as i128).rem_euclid(m) == 0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::enumerate_characters;

    fn int(v: i64) -> CyclotomicNumber {
        CyclotomicNumber::from_integer(v)
    }

    fn rat(n: i64, d: i64) -> CyclotomicNumber {
        CyclotomicNumber::from_rational(BigRational::new(n.into(), d.into()))
    }

    fn triv(n: u64) -> DirichletCharacter {
        DirichletCharacter::trivial(n).unwrap()
    }

    fn chi4() -> DirichletCharacter {
        DirichletCharacter::by_index(4, 1).unwrap()
    }

    #[test]
    fn s_n_examples() {
        assert_eq!(s_n(1, 0, 1, 1).unwrap().solutions, vec![0]);
        assert_eq!(s_n(1, 0, 1, 5).unwrap().solutions, vec![2, 3]);
        assert_eq!(s_n(2, 2, 1, 4).unwrap().solutions, scan_s_n(2, 2, 1, 4));
        assert_eq!(s_n(2, 2, 1, 4).unwrap().solutions, vec![1]);
        assert!(s_n(3, 0, 1, 4).is_err());
        assert!(s_n(2, 1, 1, 4).is_err());
    }

    #[test]
    fn s_n_matches_scan() {
        for level in 1..=72u64 {
            for n in 1..=12u64 {
                for t in -8i64..=8 {
                    for u in divisors(level) {
                        if check_un(u, t, n, level).is_err() {
                            continue;
                        }
                        assert_eq!(
                            s_n(u, t, n, level).unwrap().solutions,
                            scan_s_n(u, t, n, level),
                            "N={level} u={u} t={t} n={n}"
                        );
                    }
                }
            }
        }
        for (level, u, t, n) in [(1024u64, 32u64, 2i64, 1u64), (729, 27, 6, 9), (2000, 20, 0, 100)] {
            assert_eq!(s_n(u, t, n, level).unwrap().solutions, scan_s_n(u, t, n, level));
        }
    }

    #[test]
    fn b_and_c_examples() {
        assert_eq!(b_n_chi(1, 3, 2, &triv(1)).unwrap(), int(1));
        assert_eq!(b_n_chi(1, 0, 1, &triv(5)).unwrap(), int(2));
        assert_eq!(b_n_chi(1, 1, 1, &chi4()).unwrap(), int(0));
        // C = |S_N(t,n)| u for squarefree N, trivial chi
        for level in [6u64, 10, 15, 30] {
            for t in -4i64..=4 {
                for n in 1..8u64 {
                    for u in divisors(level) {
                        let disc = t * t - 4 * n as i64;
                        if check_un(u, t, n, level).is_err()
                            || !matches!((disc / (u * u) as i64).rem_euclid(4), 0 | 1)
                        {
                            continue;
                        }
                        let base = s_n(1, t, n, level).unwrap().solutions.len() as i64;
                        let got = c_n_chi(u, t, n, &triv(level)).unwrap();
                        assert_eq!(got, int(base * u as i64), "N={level} u={u} t={t} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn mobius_round_trip_and_reflection() {
        for level in [8u64, 9, 12, 20, 24] {
            for chi in enumerate_characters(level, None).unwrap() {
                for t in -5i64..=5 {
                    for n in 1..7u64 {
                        for u in divisors(level) {
                            if check_un(u, t, n, level).is_err() {
                                continue;
                            }
                            let total: CyclotomicNumber = divisors(u)
                                .into_iter()
                                .map(|d| c_n_chi(d, t, n, &chi).unwrap())
                                .sum();
                            assert_eq!(total, b_n_chi(u, t, n, &chi).unwrap());
                            let flipped = b_n_chi(u, -t, n, &chi).unwrap();
                            let expect = b_n_chi(u, t, n, &chi).unwrap().scale(
                                &BigRational::from_integer(chi.parity().into()),
                            );
                            assert_eq!(flipped, expect);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_n_chi(3, 5, &triv(1)).unwrap(), int(1));
        assert_eq!(phi_n_chi(1, 1, &triv(4)).unwrap(), int(3));
        for level in [4u64, 12, 18] {
            for chi in enumerate_characters(level, None).unwrap() {
                for a in 1..20 {
                    for d in 1..20 {
                        assert_eq!(phi_n_chi(a, d, &chi).unwrap(), phi_n_chi(d, a, &chi).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn square_term_examples() {
        assert_eq!(square_term(&triv(1), 12, 2), int(0));
        assert_eq!(square_term(&triv(1), 12, 1), rat(11, 12));
        for chi in enumerate_characters(4, None).unwrap() {
            assert_eq!(square_term(&chi, 3, 4), int(0));
        }
    }

    #[test]
    fn level_one_traces() {
        let t = |k, n| trace_s(&TraceQuery::trivial(1, k, n).unwrap()).unwrap().value;
        assert_eq!(t(12, 1), int(1));
        assert_eq!(t(12, 2), int(-24));
        assert_eq!(t(12, 3), int(252));
        assert_eq!(t(12, 4), int(-1472));
        assert_eq!(t(4, 1), int(0));
        assert_eq!(t(24, 1), int(2));
        let r = trace_s(&TraceQuery::trivial(1, 12, 1).unwrap()).unwrap();
        assert_eq!(r.elliptic, rat(3, 2));
        assert_eq!(r.hyperbolic, rat(-1, 2));
    }

    #[test]
    fn weight_two_genus() {
        let t = |level, n| trace_s(&TraceQuery::trivial(level, 2, n).unwrap()).unwrap().value;
        assert_eq!(t(11, 1), int(1));
        assert_eq!(t(11, 2), int(-2));
        assert_eq!(t(11, 3), int(-1));
        assert_eq!(t(1, 1), int(0));
        assert_eq!(t(23, 1), int(2));
        assert_eq!(t(37, 1), int(2));
    }

    #[test]
    fn m_plus_s_examples() {
        let t = |level, k, n| trace_m_plus_s(&TraceQuery::trivial(level, k, n).unwrap()).unwrap().value;
        assert_eq!(t(1, 4, 1), int(1));
        for k in [4u32, 6, 8, 10, 12, 14] {
            let ms = t(1, k, 1);
            let s = trace_s(&TraceQuery::trivial(1, k, 1).unwrap()).unwrap().value;
            // (M + S) - 2S is the Eisenstein part, one-dimensional at level 1.
            assert_eq!(&ms - &(&s + &s), int(1), "k={k}");
        }
        // M_4 + S_4 at level 1, n = 2: Eisenstein eigenvalue sigma_3(2) = 9
        assert_eq!(t(1, 4, 2), int(9));
    }

    #[test]
    fn wrong_parity_vanishes() {
        for level in [3u64, 4, 5, 7, 12] {
            for chi in enumerate_characters(level, None).unwrap() {
                for k in 2..=5u32 {
                    let q = TraceQuery::new(level, k, chi.clone(), 6).unwrap();
                    if q.parity_ok() {
                        continue;
                    }
                    assert!(trace_m_plus_s(&q).unwrap().value.is_zero());
                    assert!(trace_s(&q).unwrap().value.is_zero());
                }
            }
        }
    }

    #[test]
    fn boundary_routes_agree() {
        let literal = Conventions {
            boundary: BoundaryRoute::Literal,
            ..Default::default()
        };
        for level in 1..=12u64 {
            for chi in enumerate_characters(level, None).unwrap() {
                for k in 2..=5u32 {
                    for n in [1u64, 4, 9] {
                        let q = TraceQuery::new(level, k, chi.clone(), n).unwrap();
                        assert_eq!(
                            trace_s(&q).unwrap().value,
                            trace_s_with(&q, &literal).unwrap().value,
                            "N={level} k={k} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn level_four_odd_weight() {
        // S_3(4, chi4) = 0 and S_5(4, chi4) has dimension 1.
        for n in 1..=20u64 {
            let q = TraceQuery::new(4, 3, chi4(), n).unwrap();
            assert!(trace_s(&q).unwrap().value.is_zero(), "n={n}");
        }
        let q = TraceQuery::new(4, 5, chi4(), 1).unwrap();
        assert_eq!(trace_s(&q).unwrap().value, int(1));
    }

    #[test]
    fn bad_queries() {
        assert!(TraceQuery::trivial(0, 2, 1).is_err());
        assert!(TraceQuery::trivial(1, 1, 1).is_err());
        assert!(TraceQuery::trivial(1, 2, 0).is_err());
        assert!(TraceQuery::new(5, 2, triv(4), 1).is_err());
    }
}
