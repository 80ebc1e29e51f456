//! Integer and multiplicative-function substrate.
//!
//! Everything here works on machine integers except [`gegenbauer`], which
//! grows like `n^{w/2}` and is carried in [`BigInt`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of `p^e`; the factored integer.
    pub fn value(&self) -> u64 {
        self.0.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.0 {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    pub fn valuation(&self, p: u64) -> u32 {
        self.0
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }
}

impl IntoIterator for Factorization {
    type Item = (u64, u32);
    type IntoIter = std::vec::IntoIter<(u64, u32)>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// Cofactors at or below this bound are finished by trial division;
/// larger ones go to Pollard rho.
const TRIAL_LIMIT: u64 = 1 << 31;

/// Exact prime factorization of `1 <= n <= 2^63`.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    if n > 1 << 63 {
        return Err(Error::Domain(format!("{n} exceeds 2^63")));
    }
    let mut primes = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5] {
        while m.is_multiple_of(p) {
            primes.push(p);
            m /= p;
        }
    }
    // 2-3-5 wheel over the small range.
    const GAPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut gi = 0;
    while d * d <= m && (m <= TRIAL_LIMIT || d < 1 << 12) {
        while m.is_multiple_of(d) {
            primes.push(d);
            m /= d;
        }
        d += GAPS[gi];
        gi = (gi + 1) % GAPS.len();
    }
    if m > 1 {
        if d * d > m {
            primes.push(m);
        } else {
            rho_split(m, &mut primes);
        }
    }
    primes.sort_unstable();
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match pairs.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => pairs.push((p, 1)),
        }
    }
    Ok(Factorization(pairs))
}

fn rho_split(m: u64, out: &mut Vec<u64>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    let mut c = 1u64;
    loop {
        if let Some(d) = pollard_brent(m, c) {
            rho_split(d, out);
            rho_split(m / d, out);
            return;
        }
        c += 1;
    }
}

fn pollard_brent(n: u64, c: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
    let mut q = 1u64;
    let mut r = 1u64;
    let mut ys = 2u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..(128.min(r - k)) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += 128;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn factor_unchecked(n: u64) -> Factorization {
    factor(n).expect("argument must be positive")
}

pub fn divisors(n: u64) -> Vec<u64> {
    factor_unchecked(n).divisors()
}

pub fn mobius(n: u64) -> i64 {
    let f = factor_unchecked(n);
    if f.pairs().iter().any(|&(_, e)| e > 1) {
        0
    } else if f.pairs().len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factor_unchecked(n)
        .pairs()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Index of Gamma0(N) in SL2(Z): `N * prod_{p | N} (1 + 1/p)`.
pub fn phi1(n: u64) -> u64 {
    factor_unchecked(n)
        .pairs()
        .iter()
        .map(|&(p, e)| (p + 1) * p.pow(e - 1))
        .product()
}

/// `sum_{d | n, gcd(d, N) = 1} n / d`.
pub fn sigma1_coprime(n: u64, level: u64) -> u64 {
    divisors(n)
        .into_iter()
        .filter(|d| d.gcd(&level) == 1)
        .map(|d| n / d)
        .sum()
}

pub fn sigma(n: u64, power: u32) -> BigInt {
    divisors(n)
        .into_iter()
        .map(|d| BigInt::from(d).pow(power))
        .sum()
}

/// `p_w(t, n)`, the coefficient of `x^w` in `1 / (1 - t x + n x^2)`.
pub fn gegenbauer(w: u32, t: &BigInt, n: &BigInt) -> BigInt {
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    for _ in 0..w {
        let next = t * &cur - n * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

pub fn gegenbauer_i64(w: u32, t: i64, n: i64) -> BigInt {
    gegenbauer(w, &BigInt::from(t), &BigInt::from(n))
}

/// Solve a system `x = r_i (mod m_i)`; returns `(x, lcm)` with `0 <= x < lcm`.
///
/// Moduli need not be coprime. A modulus of 0 is rejected.
pub fn crt_solve(system: &[(i64, u64)]) -> Result<(u64, u64)> {
    let mut x: i128 = 0;
    let mut m: i128 = 1;
    for &(r, mi) in system {
        if mi == 0 {
            return Err(Error::Domain("CRT modulus must be positive".into()));
        }
        let mi = mi as i128;
        let r = (r as i128).rem_euclid(mi);
        let g = m.gcd(&mi);
        if (r - x).rem_euclid(g) != 0 {
            return Err(Error::CrtConflict(system.to_vec()));
        }
        // x + m*j = r (mod mi)  =>  (m/g) j = (r-x)/g (mod mi/g)
        let mg = m / g;
        let mig = mi / g;
        let j = if mig == 1 {
            0
        } else {
            let inv = mod_inverse_i128(mg.rem_euclid(mig), mig).expect("coprime after division");
            (((r - x) / g).rem_euclid(mig) * inv).rem_euclid(mig)
        };
        x += m * j;
        m *= mig;
        x = x.rem_euclid(m);
        if m > u64::MAX as i128 {
            return Err(Error::Domain("CRT modulus overflow".into()));
        }
    }
    Ok((x as u64, m as u64))
}

fn mod_inverse_i128(a: i128, m: i128) -> Option<i128> {
    let e = a.extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    mod_inverse_i128(a as i128, m as i128).map(|x| x as u64)
}

/// Kronecker symbol `(a / n)` for `n >= 1`. Coincides with the Legendre
/// symbol when `n` is an odd prime.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let tz = n.trailing_zeros();
    let mut n = n >> tz;
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol for the odd part.
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Legendre symbol `(a / p)`; at `p = 2` the Kronecker convention applies.
pub fn kronecker_symbol(a: i64, p: u64) -> i32 {
    kronecker(a, p)
}

/// The nontrivial character mod 4.
pub fn eps4(a: i64) -> i32 {
    match a.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    let sq = |x: u64| x as u128 * x as u128;
    while sq(r) > n as u128 {
        r -= 1;
    }
    while sq(r + 1) <= n as u128 {
        r += 1;
    }
    r
}

/// `Some(sqrt(n))` when `n` is a perfect square.
pub fn isqrt_exact(n: u64) -> Option<u64> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

pub fn isqrt_exact_i64(n: i64) -> Option<u64> {
    if n < 0 {
        None
    } else {
        isqrt_exact(n as u64)
    }
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(p: u64, n: &BigInt) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn valuation_u64(p: u64, mut n: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// All `t` (both signs) with `t^2 - 4n` a nonzero perfect square.
///
/// These are exactly the traces with `t^2 > 4n` at which an extended class
/// number `H(4n - t^2)` can be nonzero, enumerated from factor pairs
/// `(t - v)(t + v) = 4n`.
pub fn square_defect_traces(n: u64) -> Vec<i64> {
    let four_n = 4 * n;
    let mut ts = Vec::new();
    for e in divisors(four_n) {
        let f = four_n / e;
        if e >= f || !(f - e).is_multiple_of(2) {
            continue;
        }
        let t = ((e + f) / 2) as i64;
        ts.push(t);
        ts.push(-t);
    }
    ts.sort_unstable();
    ts
}
