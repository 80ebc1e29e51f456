//! Truncated q-expansions with exact coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};

/// `a_0 + a_1 q + ... + a_P q^P + O(q^{P+1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QExpansion {
    pub precision: usize,
    pub coeffs: Vec<CyclotomicNumber>,
    pub label: String,
}

impl QExpansion {
    /// Build from `a_0..a_P`; the precision is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<CyclotomicNumber>, label: impl Into<String>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("q-expansion needs at least a_0".into()));
        }
        Ok(QExpansion {
            precision: coeffs.len() - 1,
            coeffs,
            label: label.into(),
        })
    }

    pub fn from_integers(coeffs: Vec<BigInt>, label: impl Into<String>) -> Result<Self> {
        Self::new(coeffs.into_iter().map(CyclotomicNumber::from_integer).collect(), label)
    }

    pub fn from_rationals(coeffs: Vec<BigRational>, label: impl Into<String>) -> Result<Self> {
        Self::new(coeffs.into_iter().map(CyclotomicNumber::from_rational).collect(), label)
    }

    pub fn zero(precision: usize, label: impl Into<String>) -> Self {
        QExpansion {
            precision,
            coeffs: vec![CyclotomicNumber::zero_in(1); precision + 1],
            label: label.into(),
        }
    }

    /// `a_n`, or `None` beyond the precision.
    pub fn coeff(&self, n: usize) -> Option<&CyclotomicNumber> {
        self.coeffs.get(n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Drop terms past `precision`.
    pub fn truncate(&self, precision: usize) -> Self {
        let p = precision.min(self.precision);
        QExpansion {
            precision: p,
            coeffs: self.coeffs[..=p].to_vec(),
            label: self.label.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.precision.min(other.precision);
        QExpansion {
            precision: p,
            coeffs: (0..=p).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
            label: format!("({}) + ({})", self.label, other.label),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QExpansion {
            precision: self.precision,
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
            label: format!("{} * ({})", c, self.label),
        }
    }

    /// Product, truncated at the smaller precision.
    pub fn mul(&self, other: &Self) -> Self {
        let p = self.precision.min(other.precision);
        let mut coeffs = vec![CyclotomicNumber::zero_in(1); p + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(p + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(p + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        QExpansion {
            precision: p,
            coeffs,
            label: format!("({}) * ({})", self.label, other.label),
        }
    }

    /// Integer coefficients, if every coefficient is one.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.to_rational().filter(|r| r.is_integer()).map(|r| r.to_integer()))
            .collect()
    }

    pub fn rational_coeffs(&self) -> Option<Vec<BigRational>> {
        self.coeffs.iter().map(CyclotomicNumber::to_rational).collect()
    }
}

impl fmt::Display for QExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let body = c.to_string();
            let body = if body.contains(' ') { format!("({body})") } else { body };
            match i {
                0 => write!(f, "{body}")?,
                1 => write!(f, "{body}*q")?,
                _ => write!(f, "{body}*q^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.precision + 1)
    }
}
