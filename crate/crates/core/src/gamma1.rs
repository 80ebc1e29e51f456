//! Traces of Hecke operators on `S_k(Gamma1(N))` and `M_k + S_k`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{divisors, euler_phi, gegenbauer_i64, isqrt, isqrt_exact, mobius, phi1, sigma1_coprime};
use crate::class_numbers::{hurwitz_h, hurwitz_support};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::gamma0::{ensure_integral_rational, BoundaryRoute, TraceResult};

fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
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

fn b_value(u: u64, t: i64, n: u64, level: u64) -> i64 {
    let m = (level * u) as i128;
    if (t as i128 - n as i128 - 1).rem_euclid(m) == 0 {
        (phi1(level) / phi1(level / u)) as i64
    } else {
        0
    }
}

fn d_value(u: u64, t: i64, n: u64, level: u64) -> i64 {
    divisors(u)
        .into_iter()
        .map(|d| mobius(d) * b_value(u / d, t, n, level))
        .sum()
}

/// `B_N(u,t,n) = phi1(N)/phi1(N/u)` if `N u | t - n - 1`, else 0.
pub fn b_n(u: u64, t: i64, n: u64, level: u64) -> Result<BigRational> {
    check_un(u, t, n, level)?;
    Ok(BigRational::from_integer(b_value(u, t, n, level).into()))
}

/// Moebius inverse of [`b_n`] in `u`.
pub fn d_n(u: u64, t: i64, n: u64, level: u64) -> Result<BigRational> {
    check_un(u, t, n, level)?;
    Ok(BigRational::from_integer(d_value(u, t, n, level).into()))
}

/// `Psi_N(a,d) = sum_{N = rs, r | a-1, s | d-1} phi((r,s)) phi(N/(r,s))`.
pub fn psi_n(a: i64, d: i64, level: u64) -> u64 {
    divisors(level)
        .into_iter()
        .filter(|&r| {
            let s = level / r;
            (a - 1).rem_euclid(r as i64) == 0 && (d - 1).rem_euclid(s as i64) == 0
        })
        .map(|r| {
            let g = r.gcd(&(level / r));
            euler_phi(g) * euler_phi(level / g)
        })
        .sum()
}

/// Parameters for traces on `Gamma1(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Gamma1Query {
    pub level: u64,
    pub weight: u32,
    pub n: u64,
}

impl Gamma1Query {
    pub fn new(level: u64, weight: u32, n: u64) -> Result<Self> {
        if level == 0 || n == 0 || weight < 2 {
            return Err(Error::Precondition(format!(
                "need N >= 1, k >= 2, n >= 1 (N={level}, k={weight}, n={n})"
            )));
        }
        if n > 1 << 40 {
            return Err(Error::Precondition("Hecke index too large".into()));
        }
        Ok(Gamma1Query { level, weight, n })
    }
}

fn delta(q: &Gamma1Query) -> BigRational {
    if q.weight == 2 {
        BigRational::from_integer(sigma1_coprime(q.n, q.level).into())
    } else {
        BigRational::zero()
    }
}

/// `sum_{u | N} H((4n - t^2)/u^2) D_N(u,t,n)`.
fn class_number_sum(t: i64, q: &Gamma1Query) -> BigRational {
    let disc = 4 * q.n as i64 - t * t;
    let mut total = BigRational::zero();
    for u in divisors(q.level) {
        let u2 = (u * u) as i64;
        if disc % u2 != 0 {
            continue;
        }
        let d = d_value(u, t, q.n, q.level);
        if d != 0 {
            total += hurwitz_h(disc / u2) * BigRational::from_integer(d.into());
        }
    }
    total
}

fn on_residue_class(t: i64, q: &Gamma1Query) -> bool {
    (t - q.n as i64 - 1).rem_euclid(q.level as i64) == 0
}

fn rational_result(elliptic: BigRational, hyperbolic: BigRational, delta: BigRational, what: impl FnOnce() -> String) -> Result<TraceResult> {
    let value = &elliptic + &hyperbolic + &delta;
    ensure_integral_rational(&value, what)?;
    let c = CyclotomicNumber::from_rational;
    Ok(TraceResult {
        value: c(value),
        elliptic: c(elliptic),
        hyperbolic: c(hyperbolic),
        delta: c(delta),
    })
}

/// `tr(T_n, M_k(Gamma1(N)) + S_k(Gamma1(N)))`.
pub fn trace_gamma1_ms(q: &Gamma1Query) -> Result<TraceResult> {
    let w = q.weight - 2;
    let mut sum = BigRational::zero();
    for t in hurwitz_support(q.n) {
        if !on_residue_class(t, q) {
            continue;
        }
        let inner = class_number_sum(t, q);
        if !inner.is_zero() {
            sum += inner * BigRational::from_integer(gegenbauer_i64(w, t, q.n as i64));
        }
    }
    let elliptic = -sum * BigRational::from_integer(euler_phi(q.level).into());
    rational_result(elliptic, BigRational::zero(), delta(q), || {
        format!("tr T_{} on M_{k} + S_{k}(Gamma1({}))", q.n, q.level, k = q.weight)
    })
}

/// `sum_{chi(-1) = (-1)^k} phi1(N)/12 (k-1) n^{k/2-1} chi(sqrt n)`, computed
/// from `sum_{chi(-1)=e} chi(s) = phi(N)/2 ([s = 1] + e [s = -1])`.
fn boundary_explicit(q: &Gamma1Query) -> BigRational {
    let Some(s) = isqrt_exact(q.n) else {
        return BigRational::zero();
    };
    let level = q.level as i64;
    let s_i = s as i64;
    let sign: i64 = if q.weight.is_multiple_of(2) { 1 } else { -1 };
    let hits = i64::from((s_i - 1).rem_euclid(level) == 0) + sign * i64::from((s_i + 1).rem_euclid(level) == 0);
    let char_sum = rat(euler_phi(q.level) as i64 * hits, 2);
    rat(
        BigInt::from(phi1(q.level)) * BigInt::from(q.weight - 1) * BigInt::from(s).pow(q.weight - 2),
        12,
    ) * char_sum
}

/// `tr(T_n, S_k(Gamma1(N)))`.
pub fn trace_gamma1_s(q: &Gamma1Query) -> Result<TraceResult> {
    trace_gamma1_s_with(q, BoundaryRoute::Explicit)
}

pub fn trace_gamma1_s_with(q: &Gamma1Query, boundary: BoundaryRoute) -> Result<TraceResult> {
    let w = q.weight - 2;
    let n = q.n;
    let bound = isqrt(4 * n) as i64;
    let root = isqrt_exact(n).map(|s| 2 * s as i64);
    let phi = BigRational::from_integer(euler_phi(q.level).into());
    let mut sum = BigRational::zero();
    for t in -bound..=bound {
        let is_boundary = Some(t.abs()) == root;
        if !on_residue_class(t, q) || (is_boundary && boundary == BoundaryRoute::Explicit) {
            continue;
        }
        let inner = class_number_sum(t, q);
        if !inner.is_zero() {
            sum += inner * BigRational::from_integer(gegenbauer_i64(w, t, n as i64));
        }
    }
    let mut elliptic = -sum * &phi / BigRational::from_integer(2.into());
    if boundary == BoundaryRoute::Explicit {
        elliptic += boundary_explicit(q);
    }
    let sign: i64 = if q.weight.is_multiple_of(2) { 1 } else { -1 };
    let mut hyperbolic = BigRational::zero();
    for a in divisors(n) {
        let d = n / a;
        let psi = psi_n(a as i64, d as i64, q.level) as i64
            + sign * psi_n(-(a as i64), -(d as i64), q.level) as i64;
        if psi != 0 {
            hyperbolic += BigRational::from_integer(BigInt::from(a.min(d)).pow(q.weight - 1) * psi);
        }
    }
    hyperbolic = -hyperbolic / BigRational::from_integer(4.into());
    rational_result(elliptic, hyperbolic, delta(q), || {
        format!("tr T_{} on S_{}(Gamma1({}))", n, q.weight, q.level)
    })
}

fn require_large_level(q: &Gamma1Query) -> Result<()> {
    if q.n < 2 || q.level <= 2 * q.n + 2 {
        return Err(Error::Precondition(format!(
            "closed forms need n > 1 and N > 2n + 2 (N={}, n={})",
            q.level, q.n
        )));
    }
    Ok(())
}

fn ms_closed_form_with(q: &Gamma1Query, weight_of: impl Fn(u64, u64) -> u64) -> Result<BigRational> {
    require_large_level(q)?;
    let n = q.n;
    let geometric = (BigInt::from(n).pow(q.weight - 1) - 1u32) / BigInt::from(n - 1);
    let mut total = BigRational::zero();
    for u in divisors(n - 1) {
        let g = u.gcd(&q.level);
        total += rat(weight_of(u, n - 1) * phi1(q.level), phi1(q.level / g));
    }
    Ok(delta(q) + rat(euler_phi(q.level), 2) * BigRational::from_integer(geometric) * total)
}

/// Closed form of [`trace_gamma1_ms`] for `N > 2n + 2`:
/// `delta + phi(N)/2 (n^{k-1}-1)/(n-1) sum_{u | n-1} phi((n-1)/u) phi1(N)/phi1(N/(u,N))`.
///
/// Only `t = n + 1` survives, where `H(-(n-1)^2/u^2) = -(n-1)/(2u)`; Moebius
/// inversion of `D_N` then puts `phi((n-1)/u)` on each `u`.
pub fn gamma1_ms_closed_form(q: &Gamma1Query) -> Result<BigRational> {
    ms_closed_form_with(q, |u, m| euler_phi(m / u))
}

/// The variant weighting each `u` by `phi(u)`. It agrees with
/// [`gamma1_ms_closed_form`] when `gcd(N, n-1) = 1` and differs otherwise.
pub fn gamma1_ms_closed_form_phi_u(q: &Gamma1Query) -> Result<BigRational> {
    ms_closed_form_with(q, |u, _| euler_phi(u))
}

/// Closed form of [`trace_gamma1_s`] for `N > 2n + 2`.
pub fn gamma1_s_closed_form(q: &Gamma1Query) -> Result<BigRational> {
    require_large_level(q)?;
    let g = q.level.gcd(&(q.n - 1));
    let total: u64 = divisors(g)
        .into_iter()
        .map(|u| {
            let h = u.gcd(&(q.level / u));
            euler_phi(h) * euler_phi(q.level / h)
        })
        .sum();
    Ok(delta(q) - rat(total, 2))
}

/// One row of [`limit_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRow {
    pub level: u64,
    pub ratio: String,
    pub expected: String,
    pub ok: bool,
}

/// For each `N` in range with `N > 2n + 2` and `gcd(N, n-1) = 1`, compare
/// `tr(T_n, S_k(Gamma1(N))) / phi(N)` with `-1/2` (plus the weight-2 term).
pub fn limit_check(n: u64, k: u32, levels: impl IntoIterator<Item = u64>) -> Result<Vec<LimitRow>> {
    if n < 2 {
        return Err(Error::Precondition("limit check needs n > 1".into()));
    }
    let mut rows = Vec::new();
    for level in levels {
        if level <= 2 * n + 2 || level.gcd(&(n - 1)) != 1 {
            continue;
        }
        let q = Gamma1Query::new(level, k, n)?;
        let value = trace_gamma1_s(&q)?.value.to_rational().expect("rational trace");
        let phi = BigRational::from_integer(euler_phi(level).into());
        let ratio = value / &phi;
        let expected = rat(-1, 2) + delta(&q) / phi;
        rows.push(LimitRow {
            level,
            ok: ratio == expected,
            ratio: crate::class_numbers::show(&ratio),
            expected: crate::class_numbers::show(&expected),
        });
    }
    Ok(rows)
}

impl TraceResult {
    /// The value as a rational, when it is one.
    pub fn rational_value(&self) -> Option<BigRational> {
        self.value.to_rational()
    }
}
