//! Dirichlet characters modulo `N` with exact cyclotomic values.
//!
//! Generator convention: `(Z/NZ)^x` is split by CRT into prime-power parts,
//! ordered by prime. An odd part `p^a` contributes the smallest primitive root
//! mod `p^a`; `4` contributes `-1`; `2^a` with `a >= 3` contributes `-1` and `5`.
//! Each generator is lifted to be `1` modulo the other prime-power parts.
//! Characters are listed lexicographically by exponent vector, so index 0 is
//! always the trivial character.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{crt_solve, euler_phi, factor, pow_mod};
use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};

const NON_UNIT: u32 = u32::MAX;

#[derive(Debug)]
struct LocalUnits {
    p: u64,
    q: u64,
    /// Indices of this part's generators in the global list.
    first_gen: usize,
    gen_count: usize,
    /// Local exponents per residue mod `q`, `NON_UNIT` for non-units.
    dlog: Vec<[u32; 2]>,
}

/// `(Z/NZ)^x` as a product of cyclic groups, with discrete logs.
#[derive(Debug)]
pub struct UnitGroupStructure {
    modulus: u64,
    gens: Vec<(u64, u64)>,
    parts: Vec<LocalUnits>,
    exponent: u64,
}

fn smallest_primitive_root(p: u64, q: u64) -> u64 {
    let phi = euler_phi(q);
    let primes: Vec<u64> = factor(phi).map(|f| f.primes().collect()).unwrap_or_default();
    (2..q)
        .find(|&g| g % p != 0 && primes.iter().all(|&r| pow_mod(g, phi / r, q) != 1))
        .expect("odd prime powers have primitive roots")
}

impl UnitGroupStructure {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("modulus must be positive".into()));
        }
        let mut gens = Vec::new();
        let mut parts = Vec::new();
        for (p, a) in factor(n)? {
            let q = p.pow(a);
            let rest = n / q;
            let lift = |g: u64| crt_solve(&[(g as i64, q), (1, rest)]).unwrap().0;
            let mut dlog = vec![[NON_UNIT; 2]; q as usize];
            let first_gen = gens.len();
            if p == 2 {
                match a {
                    1 => dlog[1] = [0, 0],
                    2 => {
                        dlog[1] = [0, 0];
                        dlog[3] = [1, 0];
                        gens.push((lift(3), 2));
                    }
                    _ => {
                        let half = q / 4;
                        let mut x = 1u64;
                        for e in 0..half {
                            dlog[x as usize] = [0, e as u32];
                            dlog[(q - x) as usize] = [1, e as u32];
                            x = x * 5 % q;
                        }
                        gens.push((lift(q - 1), 2));
                        gens.push((lift(5), half));
                    }
                }
            } else {
                let g = smallest_primitive_root(p, q);
                let ord = euler_phi(q);
                let mut x = 1u64;
                for e in 0..ord {
                    dlog[x as usize] = [e as u32, 0];
                    x = x * g % q;
                }
                gens.push((lift(g), ord));
            }
            parts.push(LocalUnits {
                p,
                q,
                first_gen,
                gen_count: gens.len() - first_gen,
                dlog,
            });
        }
        let exponent = gens.iter().fold(1u64, |acc, &(_, o)| acc.lcm(&o));
        Ok(UnitGroupStructure {
            modulus: n,
            gens,
            parts,
            exponent,
        })
    }

    /// Shared, memoized structure for `n`.
    pub fn get(n: u64) -> Result<Arc<Self>> {
        static MEMO: OnceLock<RwLock<HashMap<u64, Arc<UnitGroupStructure>>>> = OnceLock::new();
        let memo = MEMO.get_or_init(Default::default);
        if let Some(g) = memo.read().unwrap().get(&n) {
            return Ok(g.clone());
        }
        let g = Arc::new(Self::new(n)?);
        memo.write().unwrap().insert(n, g.clone());
        Ok(g)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `(generator, order)` pairs.
    pub fn generators(&self) -> &[(u64, u64)] {
        &self.gens
    }

    pub fn orders(&self) -> Vec<u64> {
        self.gens.iter().map(|&(_, o)| o).collect()
    }

    /// Least common multiple of the generator orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Exponent vector of `a`, or `None` when `gcd(a, N) > 1`.
    pub fn dlog(&self, a: i64) -> Option<Vec<u64>> {
        let mut out = vec![0u64; self.gens.len()];
        for part in &self.parts {
            let r = a.rem_euclid(part.q as i64) as usize;
            let local = part.dlog[r];
            if local[0] == NON_UNIT {
                return None;
            }
            for i in 0..part.gen_count {
                out[part.first_gen + i] = local[i] as u64;
            }
        }
        Some(out)
    }
}

/// A Dirichlet character mod `N`: `chi(g_i) = zeta_{ord_i}^{k_i}`.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroupStructure>,
    exponents: Vec<u64>,
    order: u64,
    conductor: u64,
    parity: i32,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.modulus == other.group.modulus && self.exponents == other.exponents
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    pub fn new(n: u64, exponents: Vec<u64>) -> Result<Self> {
        let group = UnitGroupStructure::get(n)?;
        if exponents.len() != group.gens.len()
            || exponents.iter().zip(&group.gens).any(|(&k, &(_, o))| k >= o)
        {
            return Err(Error::Precondition(format!(
                "exponents {exponents:?} do not fit orders {:?}",
                group.orders()
            )));
        }
        let order = exponents
            .iter()
            .zip(&group.gens)
            .fold(1u64, |acc, (&k, &(_, o))| acc.lcm(&(o / k.gcd(&o))));
        let conductor = local_conductor(&group, &exponents);
        let mut chi = DirichletCharacter {
            group,
            exponents,
            order,
            conductor,
            parity: 1,
        };
        chi.parity = match chi.log_value(-1) {
            Some(0) => 1,
            _ => -1,
        };
        Ok(chi)
    }

    pub fn trivial(n: u64) -> Result<Self> {
        let len = UnitGroupStructure::get(n)?.gens.len();
        Self::new(n, vec![0; len])
    }

    /// The character whose value at each unit `a` is `zeta_den^num` from
    /// `angle(a) = (num, den)`, provided `angle` is a character.
    pub fn from_angles(n: u64, angle: impl Fn(u64) -> (u64, u64)) -> Result<Self> {
        let group = UnitGroupStructure::get(n)?;
        let exponents = group
            .gens
            .iter()
            .map(|&(g, o)| {
                let (num, den) = angle(g);
                // zeta_den^num = zeta_o^k needs den | num * o
                if (num * o) % den != 0 {
                    return Err(Error::Precondition(format!(
                        "value zeta_{den}^{num} at generator {g} has order not dividing {o}"
                    )));
                }
                Ok((num * o / den) % o)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, exponents)
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// `chi(-1)`.
    pub fn parity(&self) -> i32 {
        self.parity
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn group(&self) -> &UnitGroupStructure {
        &self.group
    }

    /// `e` with `chi(a) = zeta_order^e`, or `None` for non-units.
    pub fn log_value(&self, a: i64) -> Option<u64> {
        let logs = self.group.dlog(a)?;
        let mut e = 0u64;
        for ((&k, &(_, o)), l) in self.exponents.iter().zip(&self.group.gens).zip(logs) {
            // zeta_o^k = zeta_order^{k order / o}, an integer exponent since
            // o / gcd(k, o) divides order.
            if k == 0 {
                continue;
            }
            let g = k.gcd(&o);
            let step = (k / g) as u128 * (self.order / (o / g)) as u128;
            e = ((e as u128 + step * l as u128) % self.order as u128) as u64;
        }
        Some(e)
    }

    /// `chi(a)` for any integer `a`; zero when `gcd(a, N) > 1`.
    pub fn eval(&self, a: i64) -> CyclotomicNumber {
        match self.log_value(a) {
            Some(e) => CyclotomicNumber::root_of_unity(self.order, e as i64),
            None => CyclotomicNumber::zero_in(self.order),
        }
    }

    /// Exponent of `chi*(a)` for the character mod `m` induced by the primitive
    /// character underlying `chi`; `None` when `gcd(a, m) > 1`.
    pub fn log_value_mod_divisor(&self, a: i64, m: u64) -> Result<Option<u64>> {
        let n = self.group.modulus;
        if m == 0 || !n.is_multiple_of(m) || !m.is_multiple_of(self.conductor) {
            return Err(Error::ConductorMismatch {
                conductor: self.conductor,
                modulus: m,
            });
        }
        let r = a.rem_euclid(m as i64);
        if r.gcd(&(m as i64)) != 1 {
            return Ok(None);
        }
        // Lift to a unit mod N: keep r on the primes of m, use 1 elsewhere.
        let mut rest = n;
        for p in factor(m)?.primes() {
            while rest.is_multiple_of(p) {
                rest /= p;
            }
        }
        let lifted = crt_solve(&[(r, n / rest), (1, rest)])?.0;
        Ok(self.log_value(lifted as i64))
    }

    pub fn eval_mod_divisor(&self, a: i64, m: u64) -> Result<CyclotomicNumber> {
        Ok(match self.log_value_mod_divisor(a, m)? {
            Some(e) => CyclotomicNumber::root_of_unity(self.order, e as i64),
            None => CyclotomicNumber::zero_in(self.order),
        })
    }

    /// Pointwise product of two characters of the same modulus.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.modulus() != other.modulus() {
            return Err(Error::Precondition("moduli differ".into()));
        }
        let exps = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .zip(&self.group.gens)
            .map(|((&a, &b), &(_, o))| (a + b) % o)
            .collect();
        Self::new(self.modulus(), exps)
    }

    /// `chi` composed with reduction from a multiple of its modulus.
    pub fn induce(&self, big: u64) -> Result<Self> {
        if !big.is_multiple_of(self.modulus()) {
            return Err(Error::Precondition(format!(
                "{big} is not a multiple of {}",
                self.modulus()
            )));
        }
        let n = self.modulus();
        Self::from_angles(big, |g| {
            (self.log_value((g % n) as i64).unwrap_or(0), self.order)
        })
    }

    /// The `i`-th character mod `n` in enumeration order.
    pub fn by_index(n: u64, index: usize) -> Result<Self> {
        enumerate_characters(n, None)?
            .into_iter()
            .nth(index)
            .ok_or_else(|| Error::Precondition(format!("no character {index} mod {n}")))
    }
}

fn local_conductor(group: &UnitGroupStructure, exps: &[u64]) -> u64 {
    let mut c = 1u64;
    for part in &group.parts {
        let local = &exps[part.first_gen..part.first_gen + part.gen_count];
        let ords = &group.gens[part.first_gen..part.first_gen + part.gen_count];
        let order_of = |i: usize| ords[i].1 / local[i].gcd(&ords[i].1);
        if part.p == 2 {
            match part.gen_count {
                0 => {}
                1 => {
                    if local[0] != 0 {
                        c *= 4;
                    }
                }
                _ => {
                    let o5 = order_of(1);
                    if o5 > 1 {
                        c *= 4 * o5;
                    } else if local[0] != 0 {
                        c *= 4;
                    }
                }
            }
        } else {
            let mut o = order_of(0);
            if o > 1 {
                let mut f = part.p;
                while o % part.p == 0 {
                    o /= part.p;
                    f *= part.p;
                }
                c *= f;
            }
        }
    }
    c
}

/// All characters mod `n` in the documented order, optionally filtered by `chi(-1)`.
pub fn enumerate_characters(n: u64, parity: Option<i32>) -> Result<Vec<DirichletCharacter>> {
    let group = UnitGroupStructure::get(n)?;
    let orders = group.orders();
    let mut out = Vec::with_capacity(euler_phi(n) as usize);
    let mut exps = vec![0u64; orders.len()];
    loop {
        let chi = DirichletCharacter::new(n, exps.clone())?;
        if parity.is_none_or(|p| chi.parity == p) {
            out.push(chi);
        }
        // Lexicographic increment, last coordinate fastest.
        let mut i = orders.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CharacterJson {
    modulus: u64,
    exponents: Vec<u64>,
    conductor: u64,
    parity: i32,
}

impl Serialize for DirichletCharacter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharacterJson {
            modulus: self.modulus(),
            exponents: self.exponents.clone(),
            conductor: self.conductor,
            parity: self.parity,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirichletCharacter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = CharacterJson::deserialize(d)?;
        let chi = DirichletCharacter::new(j.modulus, j.exponents).map_err(D::Error::custom)?;
        if chi.conductor != j.conductor || chi.parity != j.parity {
            return Err(D::Error::custom("conductor or parity disagrees with exponents"));
        }
        Ok(chi)
    }
}
