//! Exact arithmetic in cyclotomic fields `Q(zeta_m)`.
//!
//! Elements are stored on the power basis `1, zeta, ..., zeta^{phi(m)-1}`
//! reduced modulo `Phi_m`. The field index is kept normalized with
//! `m != 2 mod 4` (since `Q(zeta_{2m'}) = Q(zeta_{m'})` for odd `m'`), which
//! makes the representation of each value in a given field unique.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, euler_phi, mobius};
use crate::error::{Error, Result};

type Poly = Vec<BigInt>;

fn poly_mul_xd_minus_1(p: &Poly, d: usize) -> Poly {
    let mut out = vec![BigInt::zero(); p.len() + d];
    for (i, c) in p.iter().enumerate() {
        out[i + d] += c;
        out[i] -= c;
    }
    out
}

fn poly_div_xd_minus_1(p: &Poly, d: usize) -> Poly {
    // p = q (x^d - 1) exactly; peel from the top.
    let mut rem = p.clone();
    let mut q = vec![BigInt::zero(); p.len() - d];
    for i in (d..p.len()).rev() {
        let c = rem[i].clone();
        if !c.is_zero() {
            q[i - d] = c.clone();
            rem[i - d] += &c;
            rem[i] = BigInt::zero();
        }
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    q
}

/// Coefficients of the `m`-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_poly(m: u64) -> Arc<Poly> {
    static MEMO: OnceLock<RwLock<HashMap<u64, Arc<Poly>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(p) = memo.read().unwrap().get(&m) {
        return p.clone();
    }
    let mut p: Poly = vec![BigInt::one()];
    let divs = divisors(m);
    for &d in &divs {
        if mobius(m / d) == 1 {
            p = poly_mul_xd_minus_1(&p, d as usize);
        }
    }
    for &d in &divs {
        if mobius(m / d) == -1 {
            p = poly_div_xd_minus_1(&p, d as usize);
        }
    }
    // The product over mu = -1 terms carries the sign (-1)^{#}; normalize to monic.
    if p.last().is_some_and(|c| c.is_negative()) {
        for c in &mut p {
            *c = -&*c;
        }
    }
    let p = Arc::new(p);
    memo.write().unwrap().insert(m, p.clone());
    p
}

/// The canonical index for `Q(zeta_m)`: halves `m` when `m = 2 mod 4`.
pub fn normalize_field(m: u64) -> u64 {
    if m % 4 == 2 {
        m / 2
    } else {
        m
    }
}

/// An exact element of `Q(zeta_m)`.
#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    m: u64,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero_in(m: u64) -> Self {
        let m = normalize_field(m.max(1));
        CyclotomicNumber {
            m,
            coeffs: vec![BigRational::zero(); euler_phi(m) as usize],
        }
    }

    pub fn from_rational(x: BigRational) -> Self {
        CyclotomicNumber { m: 1, coeffs: vec![x] }
    }

    pub fn from_integer(x: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::from_integer(x.into()))
    }

    /// `zeta_m^j` for any integer `j`.
    pub fn root_of_unity(m: u64, j: i64) -> Self {
        let mut counts = vec![BigRational::zero(); m.max(1) as usize];
        counts[j.rem_euclid(m.max(1) as i64) as usize] = BigRational::one();
        Self::from_power_counts(m, counts)
    }

    /// `sum_j counts[j] zeta_m^j`, for a vector of any length (indices are read mod `m`).
    pub fn from_power_counts(m: u64, counts: Vec<BigRational>) -> Self {
        let m = m.max(1);
        let mut full = vec![BigRational::zero(); m as usize];
        for (j, c) in counts.into_iter().enumerate() {
            if !c.is_zero() {
                full[j % m as usize] += c;
            }
        }
        if m % 4 == 2 {
            // zeta_m^j = (-1)^j zeta_{m/2}^{j (m/2 + 1) / 2}
            let h = m / 2;
            let step = h.div_ceil(2);
            let mut half = vec![BigRational::zero(); h as usize];
            for (j, c) in full.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let idx = ((j as u64 * step) % h) as usize;
                if j % 2 == 0 {
                    half[idx] += c;
                } else {
                    half[idx] -= c;
                }
            }
            return Self::reduce(h, half);
        }
        Self::reduce(m, full)
    }

    fn reduce(m: u64, mut v: Vec<BigRational>) -> Self {
        let phi = cyclotomic_poly(m);
        let deg = phi.len() - 1;
        for i in (deg..v.len()).rev() {
            if v[i].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut v[i], BigRational::zero());
            for (j, pj) in phi.iter().enumerate().take(deg) {
                if !pj.is_zero() {
                    v[i - deg + j] -= &c * BigRational::from_integer(pj.clone());
                }
            }
        }
        v.resize(deg, BigRational::zero());
        CyclotomicNumber { m, coeffs: v }
    }

    /// The (normalized) field index.
    pub fn field(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// The same value viewed in `Q(zeta_target)`. Requires `m | target`.
    pub fn embed(&self, target: u64) -> Result<Self> {
        if target == 0 || !target.is_multiple_of(self.m) {
            return Err(Error::Embedding {
                from: self.m,
                to: target,
            });
        }
        let target = normalize_field(target);
        if target == self.m {
            return Ok(self.clone());
        }
        let step = (target / self.m) as usize;
        let mut counts = vec![BigRational::zero(); target as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            counts[j * step] = c.clone();
        }
        Ok(Self::reduce(target, counts))
    }

    fn lift_pair(&self, other: &Self) -> (Self, Self) {
        if self.m == other.m {
            return (self.clone(), other.clone());
        }
        let l = self.m.lcm(&other.m);
        (self.embed(l).unwrap(), other.embed(l).unwrap())
    }

    /// Whether the value lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    /// The rational value, if the number is rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| self.coeffs.first().cloned().unwrap_or_else(BigRational::zero))
    }

    /// Whether the value is an algebraic integer. The power basis is an
    /// integral basis of `Z[zeta_m]`, so this is a coefficient test.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_integer)
    }

    /// The same value in the smallest `Q(zeta_d)` containing it, `d | m`.
    pub fn shrink(&self) -> Self {
        if let Some(r) = self.to_rational() {
            return Self::from_rational(r);
        }
        let mut divs = divisors(self.m);
        divs.retain(|&d| d > 1 && d < self.m && normalize_field(d) == d);
        for d in divs {
            if let Some(c) = self.coordinates_in(d) {
                return c;
            }
        }
        self.clone()
    }

    /// Solve for coordinates on the `zeta_d` power basis, if the value lies there.
    fn coordinates_in(&self, d: u64) -> Option<Self> {
        let phi_d = euler_phi(d) as usize;
        let rows = self.coeffs.len();
        let step = self.m / d;
        // Columns are the images of zeta_d^j; the last column is self.
        let mut a: Vec<Vec<BigRational>> = vec![Vec::with_capacity(phi_d + 1); rows];
        for j in 0..phi_d {
            let img = Self::root_of_unity(self.m, (j as u64 * step) as i64);
            for (r, v) in img.coeffs.into_iter().enumerate() {
                a[r].push(v);
            }
        }
        for (r, v) in self.coeffs.iter().enumerate() {
            a[r].push(v.clone());
        }
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..phi_d {
            let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            let inv = a[row][col].recip();
            for x in a[row].iter_mut() {
                *x *= &inv;
            }
            for r in 0..rows {
                if r != row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    let pivot_row = a[row].clone();
                    for (x, y) in a[r].iter_mut().zip(pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if a[row..].iter().any(|r| !r[phi_d].is_zero()) {
            return None;
        }
        let mut coeffs = vec![BigRational::zero(); phi_d];
        for (r, &col) in pivots.iter().enumerate() {
            coeffs[col] = a[r][phi_d].clone();
        }
        Some(CyclotomicNumber { m: d, coeffs })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        CyclotomicNumber {
            m: self.m,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Complex value for display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let x = c.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * j as f64 / self.m as f64;
            re += x * ang.cos();
            im += x * ang.sin();
        }
        (re, im)
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.lift_pair(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CyclotomicNumber {}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        let (mut a, b) = self.lift_pair(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Add for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
        &self + &rhs
    }
}

impl AddAssign<&CyclotomicNumber> for CyclotomicNumber {
    fn add_assign(&mut self, rhs: &CyclotomicNumber) {
        *self = &*self + rhs;
    }
}

impl AddAssign for CyclotomicNumber {
    fn add_assign(&mut self, rhs: CyclotomicNumber) {
        *self = &*self + &rhs;
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            m: self.m,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }
}

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self + &(-rhs)
    }
}

impl Sub for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
        &self - &rhs
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        let (a, b) = self.lift_pair(rhs);
        if a.m == 1 {
            return CyclotomicNumber::from_rational(&a.coeffs[0] * &b.coeffs[0]);
        }
        let mut prod = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        CyclotomicNumber::reduce(a.m, prod)
    }
}

impl Mul for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
        &self * &rhs
    }
}

impl Zero for CyclotomicNumber {
    fn zero() -> Self {
        Self::zero_in(1)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for CyclotomicNumber {
    fn one() -> Self {
        Self::from_integer(1)
    }
}

impl std::iter::Sum for CyclotomicNumber {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl From<BigRational> for CyclotomicNumber {
    fn from(x: BigRational) -> Self {
        Self::from_rational(x)
    }
}

fn show_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then_some(())?;
            Some(BigRational::new(n.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.trim().parse().ok()?)),
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let small = self.shrink();
        if let Some(r) = small.to_rational() {
            return write!(f, "{}", show_rational(&r));
        }
        let mut first = true;
        for (j, c) in small.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (j, a.is_one()) {
                (0, _) => write!(f, "{}", show_rational(&a))?,
                (_, true) => write!(f, "z{}^{}", small.m, j)?,
                (_, false) => write!(f, "{}*z{}^{}", show_rational(&a), small.m, j)?,
            }
        }
        Ok(())
    }
}

/// Integers that fit in `i64` become JSON numbers, larger ones decimal strings.
pub fn integer_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => v.into(),
        None => x.to_string().into(),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CyclotomicJson {
    Int { int: serde_json::Value },
    Rat { rat: String },
    Full { m: u64, coeffs: Vec<String> },
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let small = self.shrink();
        let json = match small.to_rational() {
            Some(r) if r.is_integer() => CyclotomicJson::Int {
                int: integer_json(&r.to_integer()),
            },
            Some(r) => CyclotomicJson::Rat {
                rat: show_rational(&r),
            },
            None => CyclotomicJson::Full {
                m: small.m,
                coeffs: small.coeffs.iter().map(show_rational).collect(),
            },
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match CyclotomicJson::deserialize(d)? {
            CyclotomicJson::Int { int } => {
                let text = match &int {
                    serde_json::Value::Number(n) => n.to_string(),
                    serde_json::Value::String(s) => s.clone(),
                    _ => return Err(D::Error::custom("int must be a number")),
                };
                text.parse::<BigInt>()
                    .map(Self::from_integer)
                    .map_err(|_| D::Error::custom(format!("bad integer {text}")))
            }
            CyclotomicJson::Rat { rat } => parse_rational(&rat)
                .map(Self::from_rational)
                .ok_or_else(|| D::Error::custom(format!("bad rational {rat:?}"))),
            CyclotomicJson::Full { m, coeffs } => {
                let m_norm = normalize_field(m.max(1));
                let parsed: Option<Vec<_>> = coeffs.iter().map(|c| parse_rational(c)).collect();
                let parsed = parsed.ok_or_else(|| D::Error::custom("bad coefficient"))?;
                if m != m_norm || parsed.len() != euler_phi(m_norm) as usize {
                    return Err(D::Error::custom("coefficient vector does not match field"));
                }
                Ok(Self::reduce(m_norm, parsed))
            }
        }
    }
}
