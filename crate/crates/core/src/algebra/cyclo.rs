use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Element of `Z[ζ_p]` in the basis `1, ζ, …, ζ^{p-2}`.
///
/// Coordinates are always reduced with `ζ^{p-1} = -(1 + ζ + … + ζ^{p-2})`, so
/// structural equality is equality of algebraic integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycloElem {
    p: u32,
    coords: Vec<i128>,
}

impl CycloElem {
    pub fn zero(p: u32) -> Self {
        CycloElem { p, coords: vec![0; (p as usize - 1).max(1)] }
    }

    pub fn from_int(p: u32, v: i128) -> Self {
        let mut z = Self::zero(p);
        z.coords[0] = v;
        z
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(p: u32, k: i64) -> Self {
        let mut counts = vec![0i64; p as usize];
        counts[k.rem_euclid(p as i64) as usize] = 1;
        Self::from_counts(&counts)
    }

    /// `Σ_v counts[v] ζ^v` for a length-`p` vector of multiplicities.
    pub fn from_counts(counts: &[i64]) -> Self {
        let p = counts.len();
        let last = counts[p - 1] as i128;
        if p == 2 {
            return CycloElem { p: 2, coords: vec![counts[0] as i128 - last] };
        }
        CycloElem { p: p as u32, coords: counts[..p - 1].iter().map(|&c| c as i128 - last).collect() }
    }

    pub fn from_coords(p: u32, coords: Vec<i128>) -> Result<Self> {
        if coords.len() != (p as usize - 1).max(1) {
            return Err(Error::InvalidParameters(format!(
                "Z[zeta_{p}] needs {} coordinates, got {}",
                (p as usize - 1).max(1),
                coords.len()
            )));
        }
        Ok(CycloElem { p, coords })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coords(&self) -> &[i128] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// The value as an integer when it lies in `Z`.
    pub fn as_integer(&self) -> Option<i128> {
        self.coords[1..].iter().all(|&c| c == 0).then_some(self.coords[0])
    }

    fn group_ring(&self) -> Vec<i128> {
        let mut v = self.coords.clone();
        if self.p > 2 {
            v.push(0);
        } else {
            v = vec![v[0], 0];
        }
        v
    }

    fn from_group_ring(p: u32, v: &[i128]) -> Self {
        let last = v[p as usize - 1];
        if p == 2 {
            return CycloElem { p, coords: vec![v[0] - last] };
        }
        CycloElem { p, coords: v[..p as usize - 1].iter().map(|&c| c - last).collect() }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CycloElem { p: self.p, coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.p as usize;
        let a = self.group_ring();
        let b = other.group_ring();
        let mut out = vec![0i128; p];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[(i + j) % p] += x * y;
            }
        }
        Ok(Self::from_group_ring(self.p, &out))
    }

    pub fn scale(&self, k: i128) -> Self {
        CycloElem { p: self.p, coords: self.coords.iter().map(|&c| c * k).collect() }
    }

    /// Division by a nonzero integer that must divide every coordinate.
    pub fn div_exact(&self, k: i128) -> Result<Self> {
        if k == 0 || self.coords.iter().any(|&c| c % k != 0) {
            return Err(Error::NonIntegral(format!("{self} / {k}")));
        }
        Ok(CycloElem { p: self.p, coords: self.coords.iter().map(|&c| c / k).collect() })
    }

    /// The automorphism `ζ ↦ ζ^a` for `p ∤ a`.
    pub fn galois(&self, a: u32) -> Self {
        let p = self.p as usize;
        let v = self.group_ring();
        let mut out = vec![0i128; p];
        for (k, &c) in v.iter().enumerate() {
            out[(k * a as usize) % p] += c;
        }
        Self::from_group_ring(self.p, &out)
    }

    /// Complex conjugation, `ζ ↦ ζ^{p-1}`.
    pub fn conj(&self) -> Self {
        self.galois(self.p - 1)
    }

    /// Image under `ζ = exp(2πi/p)`.
    pub fn embed_complex(&self) -> Complex64 {
        let step = 2.0 * std::f64::consts::PI / self.p as f64;
        if self.p == 2 {
            return Complex64::new(self.coords[0] as f64, 0.0);
        }
        self.coords.iter().enumerate().map(|(k, &c)| Complex64::from_polar(c as f64, step * k as f64)).sum()
    }
}

/// `ψ_a(x) = ζ^{ax}` for `a` a unit mod `p`.
pub fn additive_character(p: u32, a: u32, x: u32) -> Result<CycloElem> {
    if a % p == 0 {
        return Err(Error::TrivialCharacter);
    }
    Ok(CycloElem::zeta_pow(p, a as i64 * x as i64))
}

macro_rules! binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&CycloElem> for &CycloElem {
            type Output = CycloElem;
            fn $method(self, rhs: &CycloElem) -> CycloElem {
                self.$try(rhs).expect("cyclotomic operands over the same prime")
            }
        }
        impl $tr for CycloElem {
            type Output = CycloElem;
            fn $method(self, rhs: CycloElem) -> CycloElem {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        self.scale(-1)
    }
}

impl Neg for CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        self.scale(-1)
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn character_examples() {
        assert_eq!(additive_character(3, 1, 0).unwrap(), CycloElem::one(3));
        assert_eq!(additive_character(3, 1, 2).unwrap(), CycloElem::zeta_pow(3, 2));
        assert_eq!(additive_character(3, 2, 2).unwrap(), CycloElem::zeta_pow(3, 1));
        assert_eq!(additive_character(3, 3, 1).unwrap_err(), Error::TrivialCharacter);
    }

    #[test]
    fn ring_identities() {
        let one = CycloElem::one(3);
        let z = CycloElem::zeta_pow(3, 1);
        let z2 = CycloElem::zeta_pow(3, 2);
        assert_eq!((&one + &z) * (&one + &z2), one);
        for p in [2, 3, 5, 7] {
            let s = (0..p).fold(CycloElem::zero(p), |acc, x| acc + CycloElem::zeta_pow(p, x as i64));
            assert!(s.is_zero());
        }
        assert_eq!(CycloElem::zeta_pow(5, 1).conj(), CycloElem::zeta_pow(5, 4));
        assert_eq!(CycloElem::zeta_pow(2, 1), CycloElem::from_int(2, -1));
        assert_eq!(one.try_add(&CycloElem::one(5)).unwrap_err(), Error::PrimeMismatch(3, 5));
        assert!(CycloElem::from_int(3, 3).div_exact(2).is_err());
    }

    fn elem(p: u32) -> impl Strategy<Value = CycloElem> {
        proptest::collection::vec(-50i128..50, (p as usize - 1).max(1))
            .prop_map(move |c| CycloElem::from_coords(p, c).unwrap())
    }

    fn pair() -> impl Strategy<Value = (CycloElem, CycloElem)> {
        prop_oneof![Just(2u32), Just(3u32), Just(5u32), Just(7u32)].prop_flat_map(|p| (elem(p), elem(p)))
    }

    proptest! {
        #[test]
        fn embedding_is_a_ring_homomorphism((a, b) in pair()) {
            let sum = (&a + &b).embed_complex() - (a.embed_complex() + b.embed_complex());
            let prod = (&a * &b).embed_complex() - a.embed_complex() * b.embed_complex();
            let scale = 1.0 + a.embed_complex().norm() * b.embed_complex().norm();
            prop_assert!(sum.norm() <= 1e-12 * scale);
            prop_assert!(prod.norm() <= 1e-12 * scale);
            prop_assert!((a.conj().embed_complex() - a.embed_complex().conj()).norm() <= 1e-12 * scale);
        }

        #[test]
        fn character_is_additive(p in prop_oneof![Just(2u32), Just(3u32), Just(5u32), Just(7u32)],
                                 a in 1u32..7, x in 0u32..7, y in 0u32..7) {
            let a = 1 + a % (p - 1).max(1);
            let (x, y) = (x % p, y % p);
            let lhs = additive_character(p, a, (x + y) % p).unwrap();
            let rhs = additive_character(p, a, x).unwrap() * additive_character(p, a, y).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
