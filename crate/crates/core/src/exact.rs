//! Exact real and cyclotomic quantities scaled by half-integer powers of `q`.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;

use crate::algebra::CycloElem;
use crate::{Error, Result};

/// `num / den · q^{qpow/2}` with `num ∈ Z[ζ_p]`.
///
/// Kept canonical: `den > 0`, `gcd(num coords, den) = 1`, `qpow ∈ {-1, 0}`
/// (even powers are absorbed into `num`/`den`), and zero is `0/1·q^0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactValue {
    num: CycloElem,
    den: i128,
    qpow: i32,
    q: u64,
}

impl ExactValue {
    pub fn new(num: CycloElem, den: i128, qpow: i32, q: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameters("zero denominator".into()));
        }
        let mut num = num;
        let mut den = den;
        let mut qpow = qpow;
        let q128 = q as i128;
        while qpow > 0 {
            num = num.scale(q128);
            qpow -= 2;
        }
        while qpow < -1 {
            den *= q128;
            qpow += 2;
        }
        if num.is_zero() {
            return Ok(ExactValue { num, den: 1, qpow: 0, q });
        }
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = num.coords().iter().fold(den, |g, &c| g.gcd(&c));
        Ok(ExactValue { num: num.div_exact(g)?, den: den / g, qpow, q })
    }

    pub fn from_ratio(p: u32, q: u64, value: Ratio<i128>, qpow: i32) -> Self {
        Self::new(CycloElem::from_int(p, *value.numer()), *value.denom(), qpow, q).expect("nonzero denominator")
    }

    pub fn num(&self) -> &CycloElem {
        &self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn qpow(&self) -> i32 {
        self.qpow
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Real when the numerator is fixed by complex conjugation.
    pub fn is_real(&self) -> bool {
        self.num.conj() == self.num
    }

    pub fn to_complex(&self) -> Complex64 {
        self.num.embed_complex() / self.den as f64 * (self.q as f64).powf(self.qpow as f64 / 2.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_complex().re
    }

    /// `(rational part, qpow)` when the numerator is an integer.
    pub fn rational(&self) -> Option<(Ratio<i128>, i32)> {
        self.num.as_integer().map(|n| (Ratio::new(n, self.den), self.qpow))
    }

    /// Single-field text form, e.g. `num=[-1,0];den=1;qpow=-1`.
    pub fn to_field(&self) -> String {
        format!("num={};den={};qpow={}", self.num, self.den, self.qpow)
    }

    pub fn parse_field(s: &str, p: u32, q: u64) -> Result<Self> {
        let bad = || Error::InvalidParameters(format!("malformed exact value {s:?}"));
        let mut num = None;
        let mut den = None;
        let mut qpow = None;
        for part in s.split(';') {
            let (key, value) = part.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "num" => {
                    let inner = value.trim().strip_prefix('[').and_then(|v| v.strip_suffix(']')).ok_or_else(bad)?;
                    let coords = inner
                        .split(',')
                        .map(|c| c.trim().parse::<i128>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?;
                    num = Some(CycloElem::from_coords(p, coords)?);
                }
                "den" => den = Some(value.trim().parse::<i128>().map_err(|_| bad())?),
                "qpow" => qpow = Some(value.trim().parse::<i32>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        Self::new(num.ok_or_else(bad)?, den.ok_or_else(bad)?, qpow.ok_or_else(bad)?, q)
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_field())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let m = ExactValue::new(CycloElem::from_int(3, -54), 18, -3, 3).unwrap();
        assert_eq!(m.to_field(), "num=[-1,0];den=1;qpow=-1");
        assert!((m.to_f64() + 3f64.powf(-0.5)).abs() < 1e-15);
        let same = ExactValue::new(CycloElem::from_int(3, -1), 1, -1, 3).unwrap();
        assert_eq!(m, same);
        let z = ExactValue::new(CycloElem::zero(3), 7, -5, 3).unwrap();
        assert_eq!(z.to_field(), "num=[0,0];den=1;qpow=0");
    }

    #[test]
    fn field_round_trip() {
        let v = ExactValue::new(CycloElem::from_coords(5, vec![3, -2, 0, 7]).unwrap(), 6, 3, 5).unwrap();
        assert_eq!(ExactValue::parse_field(&v.to_field(), 5, 5).unwrap(), v);
        assert!(!v.is_real());
        assert!(ExactValue::parse_field("num=[1];den=x", 2, 2).is_err());
    }
}
