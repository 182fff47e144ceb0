//! The families `F_d` (full), `O_d` (odd) and `G_d` (all monic), with
//! deterministic enumeration and the reduction of an arbitrary degree-`d`
//! polynomial into `F_d`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::arith::gcd;
use crate::algebra::{Fq, PolyFq};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// `a_0 = 0`, `a_i = 0` for `p | i`, `a_d ≠ 0`.
    Full,
    /// Full, and additionally `a_i = 0` for even `i`.
    Odd,
    /// Every monic polynomial of degree `d`.
    MonicAll,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Full => "full",
            FamilyKind::Odd => "odd",
            FamilyKind::MonicAll => "monic",
        })
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(FamilyKind::Full),
            "odd" => Ok(FamilyKind::Odd),
            "monic" | "monic_all" => Ok(FamilyKind::MonicAll),
            _ => Err(Error::InvalidParameters(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub p: u32,
    pub n: u32,
    pub d: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, p: u32, n: u32, d: usize) -> Result<Self> {
        let spec = FamilySpec { kind, p, n, d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn full(p: u32, n: u32, d: usize) -> Result<Self> {
        Self::new(FamilyKind::Full, p, n, d)
    }

    pub fn odd(p: u32, n: u32, d: usize) -> Result<Self> {
        Self::new(FamilyKind::Odd, p, n, d)
    }

    pub fn monic(p: u32, n: u32, d: usize) -> Result<Self> {
        Self::new(FamilyKind::MonicAll, p, n, d)
    }

    fn validate(&self) -> Result<()> {
        if !crate::algebra::arith::is_prime(self.p as u64) {
            return Err(Error::NotPrime(self.p as u64));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameters("n must be >= 1".into()));
        }
        match self.kind {
            FamilyKind::Full | FamilyKind::Odd => {
                if self.d == 0 || gcd(self.d as u64, self.p as u64) != 1 {
                    return Err(Error::InvalidParameters(format!(
                        "family requires gcd(d, p) = 1 (d = {}, p = {})",
                        self.d, self.p
                    )));
                }
                if self.kind == FamilyKind::Odd && (self.d % 2 == 0 || self.p == 2) {
                    return Err(Error::InvalidParameters("odd family requires d odd and p > 2".into()));
                }
            }
            FamilyKind::MonicAll => {}
        }
        Ok(())
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }

    /// Indices whose coefficient varies over the family, ascending. For the
    /// full and odd families the last one is `d`, which ranges over `F_q^*`.
    pub fn free_indices(&self) -> Vec<usize> {
        let p = self.p as usize;
        match self.kind {
            FamilyKind::Full => (1..=self.d).filter(|i| i % p != 0).collect(),
            FamilyKind::Odd => (1..=self.d).filter(|i| i % p != 0 && i % 2 == 1).collect(),
            FamilyKind::MonicAll => (0..self.d).collect(),
        }
    }

    pub fn size(&self) -> u128 {
        let q = self.q() as u128;
        let m = self.free_indices().len() as u32;
        match self.kind {
            FamilyKind::MonicAll => q.pow(m),
            _ => (q - 1) * q.pow(m - 1),
        }
    }

    pub fn contains(&self, f: &PolyFq) -> bool {
        if f.degree() != Some(self.d) {
            return false;
        }
        let free = self.free_indices();
        match self.kind {
            FamilyKind::MonicAll => f.is_monic(),
            _ => (0..self.d).all(|i| f.coeff(i) == 0 || free.contains(&i)),
        }
    }

    /// The `k`-th member in enumeration order: mixed radix over the free
    /// coefficients, highest index most significant.
    pub fn member(&self, k: u128) -> PolyFq {
        let q = self.q() as u128;
        let free = self.free_indices();
        let mut coeffs = vec![0u32; self.d + 1];
        let mut k = k;
        match self.kind {
            FamilyKind::MonicAll => {
                for &i in &free {
                    coeffs[i] = (k % q) as u32;
                    k /= q;
                }
                coeffs[self.d] = 1;
            }
            _ => {
                for &i in &free[..free.len() - 1] {
                    coeffs[i] = (k % q) as u32;
                    k /= q;
                }
                coeffs[self.d] = 1 + k as u32;
            }
        }
        PolyFq::new(coeffs)
    }

    /// Inverse of [`member`](Self::member).
    pub fn index_of(&self, f: &PolyFq) -> Option<u128> {
        if !self.contains(f) {
            return None;
        }
        let q = self.q() as u128;
        let free = self.free_indices();
        let (lead, low) = match self.kind {
            FamilyKind::MonicAll => (0, &free[..]),
            _ => (f.coeff(self.d) as u128 - 1, &free[..free.len() - 1]),
        };
        Some(low.iter().rev().fold(lead, |acc, &i| acc * q + f.coeff(i) as u128))
    }

    /// Every member, in order; refuses families above `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<impl Iterator<Item = PolyFq> + '_> {
        Ok(self.cursor(cap)?.map(move |k| self.member(k)))
    }

    pub fn cursor(&self, cap: u64) -> Result<FamilyCursor> {
        let size = self.size();
        if size > cap as u128 {
            return Err(Error::CapExceeded { size, cap });
        }
        Ok(FamilyCursor { range: 0..size })
    }

    /// A uniformly random member, determined by `seed`.
    pub fn sample(&self, seed: u64) -> PolyFq {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng)
    }

    pub fn sample_with<R: Rng>(&self, rng: &mut R) -> PolyFq {
        self.member(rng.random_range(0..self.size()))
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(p={},n={},d={})", self.kind, self.p, self.n, self.d)
    }
}

/// A contiguous range of member indices; split to partition work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCursor {
    pub range: Range<u128>,
}

impl FamilyCursor {
    /// Splits into at most `parts` contiguous, disjoint, covering ranges.
    pub fn split(&self, parts: usize) -> Vec<FamilyCursor> {
        let len = self.range.end - self.range.start;
        let parts = (parts.max(1) as u128).min(len.max(1));
        (0..parts)
            .map(|i| FamilyCursor {
                range: self.range.start + len * i / parts..self.range.start + len * (i + 1) / parts,
            })
            .collect()
    }
}

impl Iterator for FamilyCursor {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        self.range.next()
    }
}

/// Lexicographically least element of `F_q` with `Tr_{q/p}(c) = 1`.
pub fn distinguished_element(fq: &Fq) -> u32 {
    fq.elements().find(|&c| fq.trace(c) == 1).expect("the trace is onto")
}

/// Folds a degree-`d` polynomial (`p ∤ d`) into `F_d`.
///
/// Returns `(g, w)` with `w = Tr_{q/p}(a_0)` and `g` collecting every
/// coefficient at an index `i p^j` onto index `i` (`p ∤ i`) after the
/// Frobenius twist `a ↦ a^{p^{-j}}`, so that `Tr f(α) = Tr g(α) + r·w` on
/// `F_{q^r}`: adding `w·c` to `g` reproduces `f` up to trace.
pub fn reduce_to_family(f: &PolyFq, fq: &Fq) -> Result<(PolyFq, u32)> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    let p = fq.p() as usize;
    if d == 0 || d % p == 0 {
        return Err(Error::InvalidParameters(format!("reduction needs p ∤ d (d = {d}, p = {p})")));
    }
    let mut g = vec![0u32; d + 1];
    for (idx, &a) in f.coeffs().iter().enumerate().skip(1) {
        if a == 0 {
            continue;
        }
        let mut i = idx;
        let mut twisted = a;
        while i % p == 0 {
            i /= p;
            twisted = fq.frobenius_inv(twisted);
        }
        g[i] = fq.add(g[i], twisted);
    }
    Ok((PolyFq::new(g), fq.trace(f.coeff(0))))
}
