use std::sync::OnceLock;

use super::arith::factorize;
use super::fq::Fq;
use crate::{Error, Result, DEFAULT_CAP};

/// Largest top field for which exp/log/trace tables are materialised.
pub const TABLE_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Prime,
    Middle,
    Top,
}

/// An element of one level of the tower, written over the next lower field.
///
/// `Prime` holds one coordinate below `p`; `Middle` holds the `n` coordinates
/// over `F_p`; `Top` holds the `r` coordinates over `F_q` (each an [`Fq`] index).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqElem {
    level: Level,
    coeffs: Vec<u32>,
}

impl FqElem {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Lookup tables for the top field, keyed by packed index `Σ x_i q^i`.
#[derive(Debug)]
pub struct TopTables {
    pub order: u64,
    pub exp: Vec<u32>,
    /// `log[0]` is `u32::MAX`.
    pub log: Vec<u32>,
    /// `Tr_{q^r/p}` by element index.
    pub trace: Vec<u8>,
    /// `Tr_{q^r/p}(g^k)` by exponent `k`.
    pub trace_exp: Vec<u8>,
}

/// `F_p ⊂ F_q ⊂ F_{q^r}`, the top field built as `F_q[X]/(m_r(X))`.
#[derive(Debug)]
pub struct FieldTower {
    fq: Fq,
    r: u32,
    modulus_r: Vec<u32>,
    size: u64,
    tau: OnceLock<Vec<u32>>,
    tables: OnceLock<Option<TopTables>>,
}

pub fn build_tower(p: u32, n: u32, r: u32) -> Result<FieldTower> {
    FieldTower::new(p, n, r, DEFAULT_CAP)
}

impl FieldTower {
    pub fn new(p: u32, n: u32, r: u32, cap: u64) -> Result<Self> {
        let fq = Fq::new(p, n)?;
        Self::over(fq, r, cap)
    }

    /// Builds the degree-`r` extension of an existing `F_q`.
    pub fn over(fq: Fq, r: u32, cap: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameters("top degree r must be >= 1".into()));
        }
        let size = (fq.q() as u64)
            .checked_pow(r)
            .filter(|&s| s <= cap && s <= u32::MAX as u64)
            .ok_or(Error::CapExceeded { size: (fq.q() as u128).saturating_pow(r), cap })?;
        let modulus_r = if r == 1 { vec![0, 1] } else { least_irreducible_over(&fq, r) };
        Ok(FieldTower { fq, r, modulus_r, size, tau: OnceLock::new(), tables: OnceLock::new() })
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    pub fn p(&self) -> u32 {
        self.fq.p()
    }

    pub fn n(&self) -> u32 {
        self.fq.n()
    }

    pub fn q(&self) -> u32 {
        self.fq.q()
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Number of elements of the top field.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus_q(&self) -> Option<&[u32]> {
        self.fq.modulus()
    }

    pub fn modulus_r(&self) -> Option<&[u32]> {
        (self.r > 1).then_some(&self.modulus_r[..])
    }

    pub fn prime(&self, a: u32) -> FqElem {
        FqElem { level: Level::Prime, coeffs: vec![a % self.p()] }
    }

    pub fn middle(&self, a: u32) -> FqElem {
        FqElem { level: Level::Middle, coeffs: self.fq.digits(a) }
    }

    pub fn top(&self, index: u64) -> FqElem {
        FqElem { level: Level::Top, coeffs: self.unpack(index) }
    }

    pub fn top_from_coeffs(&self, coeffs: &[u32]) -> FqElem {
        let mut c = vec![0; self.r as usize];
        for (dst, &src) in c.iter_mut().zip(coeffs) {
            *dst = src;
        }
        FqElem { level: Level::Top, coeffs: c }
    }

    /// Packed index of an element within its level.
    pub fn index(&self, x: &FqElem) -> u64 {
        match x.level {
            Level::Prime => x.coeffs[0] as u64,
            Level::Middle => self.fq.from_digits(&x.coeffs) as u64,
            Level::Top => self.pack(&x.coeffs),
        }
    }

    pub fn top_elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.size).map(move |i| self.top(i))
    }

    pub fn pack(&self, coeffs: &[u32]) -> u64 {
        let q = self.q() as u64;
        coeffs.iter().rev().fold(0, |acc, &c| acc * q + c as u64)
    }

    pub fn unpack(&self, mut index: u64) -> Vec<u32> {
        let q = self.q() as u64;
        (0..self.r)
            .map(|_| {
                let c = (index % q) as u32;
                index /= q;
                c
            })
            .collect()
    }

    /// Embeds `x` into a higher level.
    pub fn lift(&self, x: &FqElem, to: Level) -> Result<FqElem> {
        let rank = |l: Level| match l {
            Level::Prime => 0,
            Level::Middle => 1,
            Level::Top => 2,
        };
        if rank(to) < rank(x.level) {
            return Err(Error::LevelMismatch { expected: to, got: x.level });
        }
        let as_fq = match x.level {
            Level::Prime => x.coeffs[0],
            Level::Middle => self.fq.from_digits(&x.coeffs),
            Level::Top => return Ok(x.clone()),
        };
        Ok(match to {
            Level::Prime => x.clone(),
            Level::Middle => self.middle(as_fq),
            Level::Top => self.top_from_coeffs(&[as_fq]),
        })
    }

    fn same_level(&self, a: &FqElem, b: &FqElem) -> Result<Level> {
        if a.level != b.level {
            return Err(Error::LevelMismatch { expected: a.level, got: b.level });
        }
        Ok(a.level)
    }

    fn wrap(&self, level: Level, v: Vec<u32>) -> FqElem {
        FqElem { level, coeffs: v }
    }

    fn to_fq(&self, x: &FqElem) -> u32 {
        match x.level {
            Level::Prime => x.coeffs[0],
            _ => self.fq.from_digits(&x.coeffs),
        }
    }

    fn at_level(&self, level: Level, a: u32) -> FqElem {
        match level {
            Level::Prime => self.prime(a),
            _ => self.middle(a),
        }
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> Result<FqElem> {
        let level = self.same_level(a, b)?;
        Ok(match level {
            Level::Top => self.wrap(level, self.top_add(&a.coeffs, &b.coeffs)),
            _ => self.at_level(level, self.fq.add(self.to_fq(a), self.to_fq(b))),
        })
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        match a.level {
            Level::Top => self.wrap(Level::Top, a.coeffs.iter().map(|&c| self.fq.neg(c)).collect()),
            level => self.at_level(level, self.fq.neg(self.to_fq(a))),
        }
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> Result<FqElem> {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> Result<FqElem> {
        let level = self.same_level(a, b)?;
        Ok(match level {
            Level::Top => self.wrap(level, self.top_mul(&a.coeffs, &b.coeffs)),
            _ => self.at_level(level, self.fq.mul(self.to_fq(a), self.to_fq(b))),
        })
    }

    pub fn pow(&self, a: &FqElem, e: u64) -> FqElem {
        match a.level {
            Level::Top => self.wrap(Level::Top, self.top_pow(&a.coeffs, e)),
            level => self.at_level(level, self.fq.pow(self.to_fq(a), e)),
        }
    }

    pub fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if a.is_zero() {
            return None;
        }
        let order = match a.level {
            Level::Prime => self.p() as u64 - 1,
            Level::Middle => self.q() as u64 - 1,
            Level::Top => self.size - 1,
        };
        Some(self.pow(a, order - 1))
    }

    /// `x ↦ x^p`.
    pub fn frobenius(&self, a: &FqElem) -> FqElem {
        self.pow(a, self.p() as u64)
    }

    /// `Tr_{q^r/p}(x)` as the sum of all `nr` conjugates `x^{p^k}`.
    pub fn trace_to_prime(&self, x: &FqElem) -> Result<FqElem> {
        if x.level != Level::Top {
            return Err(Error::LevelMismatch { expected: Level::Top, got: x.level });
        }
        let mut acc = vec![0; self.r as usize];
        let mut y = x.coeffs.clone();
        for _ in 0..self.n() * self.r {
            acc = self.top_add(&acc, &y);
            y = self.top_pow(&y, self.p() as u64);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0) && acc[0] < self.p());
        Ok(self.prime(acc[0]))
    }

    /// Same value as [`trace_to_prime`](Self::trace_to_prime) through the
    /// `F_q`-linear map `x ↦ Σ x_i Tr_{q^r/q}(X^i)` followed by `Tr_{q/p}`.
    pub fn trace_linear(&self, coeffs: &[u32]) -> u32 {
        let tau = self.relative_trace_basis();
        let s = coeffs.iter().zip(tau).fold(0, |acc, (&x, &t)| self.fq.add(acc, self.fq.mul(x, t)));
        self.fq.trace(s)
    }

    /// `Tr_{q^r/q}(X^i)` for `i < r`, each an element of `F_q`.
    fn relative_trace_basis(&self) -> &[u32] {
        self.tau.get_or_init(|| {
            (0..self.r as usize)
                .map(|i| {
                    let mut xi = vec![0; self.r as usize];
                    if self.r == 1 {
                        xi[0] = 1;
                    } else {
                        xi[i] = 1;
                    }
                    let mut acc = vec![0; self.r as usize];
                    let mut y = xi;
                    for _ in 0..self.r {
                        acc = self.top_add(&acc, &y);
                        y = self.top_pow(&y, self.q() as u64);
                    }
                    debug_assert!(acc[1..].iter().all(|&c| c == 0));
                    acc[0]
                })
                .collect()
        })
    }

    pub fn top_add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().zip(b).map(|(&x, &y)| self.fq.add(x, y)).collect()
    }

    pub fn top_mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let r = self.r as usize;
        if r == 1 {
            return vec![self.fq.mul(a[0], b[0])];
        }
        let f = &self.fq;
        let mut prod = vec![0u32; 2 * r - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
        for k in (r..2 * r - 1).rev() {
            let c = prod[k];
            if c != 0 {
                for i in 0..r {
                    let m = self.modulus_r[i];
                    if m != 0 {
                        prod[k - r + i] = f.sub(prod[k - r + i], f.mul(c, m));
                    }
                }
            }
        }
        prod.truncate(r);
        prod
    }

    pub fn top_pow(&self, a: &[u32], mut e: u64) -> Vec<u32> {
        let mut acc = vec![0; self.r as usize];
        acc[0] = 1;
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.top_mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.top_mul(&base, &base);
            }
        }
        acc
    }

    /// Exp/log/trace tables for the top field, built on first use; `None`
    /// above [`TABLE_CAP`].
    pub fn tables(&self) -> Option<&TopTables> {
        self.tables.get_or_init(|| (self.size <= TABLE_CAP).then(|| self.build_tables())).as_ref()
    }

    fn build_tables(&self) -> TopTables {
        let size = self.size;
        let order = size - 1;
        let r = self.r as usize;
        let factors: Vec<u64> = factorize(order).into_iter().map(|(l, _)| l).collect();
        let is_generator = |g: &[u32]| {
            g.iter().any(|&c| c != 0)
                && factors.iter().all(|&l| {
                    let y = self.top_pow(g, order / l);
                    !(y[0] == 1 && y[1..].iter().all(|&c| c == 0))
                })
        };
        // X + c when it works: multiplying by a linear element is O(r).
        let linear =
            (r > 1).then(|| (0..self.q()).find(|&c| is_generator(&self.top_from_coeffs(&[c, 1]).coeffs))).flatten();
        let gen = match linear {
            Some(c) => self.top_from_coeffs(&[c, 1]).coeffs,
            None => (1..size)
                .map(|i| self.unpack(i))
                .find(|g| is_generator(g) || size == 2)
                .expect("multiplicative group is cyclic"),
        };
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; size as usize];
        let mut x = vec![0u32; r];
        x[0] = 1;
        let f = &self.fq;
        for k in 0..order {
            let idx = self.pack(&x);
            exp.push(idx as u32);
            log[idx as usize] = k as u32;
            match linear {
                Some(c) => {
                    let top = x[r - 1];
                    for i in (1..r).rev() {
                        x[i] = f.add(x[i - 1], f.mul(c, x[i]));
                    }
                    x[0] = f.mul(c, x[0]);
                    if top != 0 {
                        for (xi, &m) in x.iter_mut().zip(&self.modulus_r) {
                            *xi = f.sub(*xi, f.mul(top, m));
                        }
                    }
                }
                None => x = self.top_mul(&x, &gen),
            }
        }
        let tau = self.relative_trace_basis().to_vec();
        let trace: Vec<u8> = (0..size)
            .map(|i| {
                let mut i = i;
                let mut s = 0;
                for &t in &tau {
                    let c = (i % self.q() as u64) as u32;
                    i /= self.q() as u64;
                    s = f.add(s, f.mul(c, t));
                }
                f.trace(s) as u8
            })
            .collect();
        let trace_exp = exp.iter().map(|&e| trace[e as usize]).collect();
        TopTables { order, exp, log, trace, trace_exp }
    }
}

/// Lexicographically least monic irreducible of degree `r` over `F_q`
/// (high-degree coefficients most significant).
fn least_irreducible_over(fq: &Fq, r: u32) -> Vec<u32> {
    let q = fq.q() as u64;
    let total = q.pow(r);
    (0..total)
        .map(|k| {
            let mut coeffs: Vec<u32> = Vec::with_capacity(r as usize + 1);
            let mut t = k;
            for _ in 0..r {
                coeffs.push((t % q) as u32);
                t /= q;
            }
            coeffs.push(1);
            coeffs
        })
        .find(|c| super::irreducible::is_irreducible_coeffs(fq, c))
        .expect("irreducible polynomials exist in every degree")
}
