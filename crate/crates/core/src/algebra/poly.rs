use std::fmt;

use super::fq::Fq;
use super::tower::{FieldTower, FqElem, Level};
use crate::{Error, Result};

/// Polynomial over `F_q`, coefficients low degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyFq {
    coeffs: Vec<u32>,
}

impl PolyFq {
    pub fn new(mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFq { coeffs }
    }

    pub fn zero() -> Self {
        PolyFq { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyFq { coeffs: vec![1] }
    }

    /// `c·x^k`.
    pub fn monomial(c: u32, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self, f: &Fq) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Self, f: &Fq) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, c: u32, f: &Fq) -> Self {
        Self::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Self, f: &Fq) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(out)
    }

    /// Product reduced modulo `x^k`.
    pub fn mul_trunc(&self, other: &Self, k: usize, f: &Fq) -> Self {
        let mut out = vec![0; k];
        for (i, &a) in self.coeffs.iter().enumerate().take(k) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(k - i) {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(out)
    }

    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.coeffs.iter().take(k).copied().collect())
    }

    /// Quotient and remainder; the divisor must be nonzero.
    pub fn div_rem(&self, divisor: &Self, f: &Fq) -> Result<(Self, Self)> {
        let db = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead_inv = f.inv(divisor.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![0; rem.len() - db];
        for k in (db..rem.len()).rev() {
            let c = f.mul(rem[k], lead_inv);
            if c == 0 {
                continue;
            }
            quot[k - db] = c;
            for (i, &b) in divisor.coeffs.iter().enumerate() {
                rem[k - db + i] = f.sub(rem[k - db + i], f.mul(c, b));
            }
        }
        rem.truncate(db);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn rem(&self, divisor: &Self, f: &Fq) -> Result<Self> {
        Ok(self.div_rem(divisor, f)?.1)
    }

    pub fn gcd(&self, other: &Self, f: &Fq) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic(f)
    }

    pub fn make_monic(&self, f: &Fq) -> Self {
        match f.inv(self.leading()) {
            Some(inv) => self.scale(inv, f),
            None => self.clone(),
        }
    }

    /// `h*(x) = x^{deg h} h(1/x)`.
    pub fn reciprocal(&self) -> Self {
        Self::new(self.coeffs.iter().rev().copied().collect())
    }

    /// `g(x^k)`.
    pub fn compose_xpow(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![0; (self.coeffs.len() - 1) * k + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * k] = c;
        }
        Self::new(v)
    }

    /// Formal derivative.
    pub fn derivative(&self, f: &Fq) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| f.scale(c, i as i64)).collect())
    }

    pub fn eval(&self, x: u32, f: &Fq) -> u32 {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Horner evaluation at a top-level element, coefficients lifted into `F_{q^r}`.
    pub fn eval_top(&self, alpha: &FqElem, tower: &FieldTower) -> Result<FqElem> {
        if alpha.level() != Level::Top {
            return Err(Error::LevelMismatch { expected: Level::Top, got: alpha.level() });
        }
        let mut acc = vec![0; tower.r() as usize];
        for &c in self.coeffs.iter().rev() {
            acc = tower.top_mul(&acc, alpha.coeffs());
            acc[0] = tower.fq().add(acc[0], c);
        }
        Ok(tower.top_from_coeffs(&acc))
    }

    /// Comma-separated coefficient indices, constant term first.
    pub fn to_coeff_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse(s: &str, f: &Fq) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                let v: u32 =
                    t.trim().parse().map_err(|_| Error::InvalidParameters(format!("bad coefficient {t:?}")))?;
                if v >= f.q() {
                    return Err(Error::InvalidParameters(format!("coefficient {v} is not an element of F_{}", f.q())));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }
}

impl fmt::Display for PolyFq {
    fn fmt(&self, fmt: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(fmt, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(fmt, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(fmt, "{c}")?,
                (1, 1) => write!(fmt, "x")?,
                (1, _) => write!(fmt, "{c}x")?,
                (_, 1) => write!(fmt, "x^{i}")?,
                _ => write!(fmt, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}
