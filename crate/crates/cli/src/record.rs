//! The JSON record printed for every computed value.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use hecke_core::cyclotomic::CyclotomicNumber;
use hecke_core::gamma0::TraceResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub query: Value,
    pub result: CyclotomicNumber,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub breakdown: Option<Breakdown>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub approx: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub elliptic: CyclotomicNumber,
    pub hyperbolic: CyclotomicNumber,
    pub delta: CyclotomicNumber,
}

impl From<&TraceResult> for Breakdown {
    fn from(r: &TraceResult) -> Self {
        Breakdown {
            elliptic: r.elliptic.clone(),
            hyperbolic: r.hyperbolic.clone(),
            delta: r.delta.clone(),
        }
    }
}

impl OutputRecord {
    pub fn new(query: Value, result: CyclotomicNumber) -> Self {
        OutputRecord {
            query,
            result,
            breakdown: None,
            approx: None,
            wall_time_ms: None,
        }
    }

    pub fn from_trace(query: Value, r: &TraceResult, breakdown: bool) -> Self {
        let mut rec = Self::new(query, r.value.clone());
        if breakdown {
            rec.breakdown = Some(r.into());
        }
        rec
    }

    pub fn with_approx(mut self, digits: Option<usize>) -> Self {
        self.approx = digits.map(|d| approximate(&self.result, d));
        self
    }
}

/// Decimal rendering with `digits` places after the point. Rationals are
/// rounded exactly; other cyclotomic values go through `f64`.
pub fn approximate(x: &CyclotomicNumber, digits: usize) -> String {
    match x.to_rational() {
        Some(r) => decimal(&r, digits),
        None => {
            let (re, im) = x.to_complex();
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("{re:.digits$} {sign} {:.digits$}i", im.abs())
        }
    }
}

fn decimal(r: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r.abs() * BigRational::from_integer(scale.clone());
    // round half away from zero
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let q = if rem * 2 >= *scaled.denom() { q + 1 } else { q };
    let (int, frac) = q.div_rem(&scale);
    let sign = if r.is_negative() && !(int.is_zero() && frac.is_zero()) { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> CyclotomicNumber {
        CyclotomicNumber::from_rational(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn decimals() {
        assert_eq!(approximate(&q(-1, 12), 5), "-0.08333");
        assert_eq!(approximate(&q(2, 3), 3), "0.667");
        assert_eq!(approximate(&q(-24, 1), 2), "-24.00");
        assert_eq!(approximate(&q(-1, 3), 0), "0");
        assert_eq!(approximate(&CyclotomicNumber::root_of_unity(4, 1), 3), "0.000 + 1.000i");
    }

    #[test]
    fn round_trip() {
        let mut rec = OutputRecord::new(serde_json::json!({"kind": "x"}), CyclotomicNumber::root_of_unity(12, 5));
        rec.breakdown = Some(Breakdown {
            elliptic: q(3, 2),
            hyperbolic: q(-1, 1),
            delta: q(0, 1),
        });
        rec = rec.with_approx(Some(2));
        let text = serde_json::to_string(&rec).unwrap();
        let back: OutputRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
