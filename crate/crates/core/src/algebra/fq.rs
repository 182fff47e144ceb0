use super::arith::{factorize, is_prime};
use crate::{Error, Result};

const ADD_TABLE_MAX_Q: u32 = 1024;
const MAX_Q: u64 = 1 << 20;

/// The field `F_q = F_p[y]/(m(y))` with `m` the lexicographically least monic
/// irreducible of degree `n`.
///
/// Elements are `u32` indices: the base-`p` digits of an index are the
/// coefficients of `1, y, …, y^{n-1}`. `F_p` sits inside as the indices `0..p`.
#[derive(Debug, Clone)]
pub struct Fq {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_tab: Vec<u32>,
    trace: Vec<u32>,
}

impl Fq {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if n == 0 {
            return Err(Error::InvalidParameters("extension degree n must be >= 1".into()));
        }
        let q = (p as u64)
            .checked_pow(n)
            .filter(|&q| q <= MAX_Q)
            .ok_or(Error::CapExceeded { size: (p as u128).saturating_pow(n), cap: MAX_Q })?;
        let modulus = if n == 1 { vec![0, 1] } else { least_irreducible_over_prime(p, n) };
        let mut field =
            Fq { p, n, q: q as u32, modulus, exp: Vec::new(), log: Vec::new(), add_tab: Vec::new(), trace: Vec::new() };
        field.build_tables();
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Defining modulus over `F_p` (low degree first), `None` for a prime field.
    pub fn modulus(&self) -> Option<&[u32]> {
        (self.n > 1).then_some(&self.modulus[..])
    }

    pub fn digits(&self, z: u32) -> Vec<u32> {
        let mut z = z;
        (0..self.n)
            .map(|_| {
                let d = z % self.p;
                z /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.n == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if !self.add_tab.is_empty() {
            self.add_tab[(a * self.q + b) as usize]
        } else {
            self.add_digits(a, b)
        }
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.n == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let d: Vec<u32> = self.digits(a).into_iter().map(|x| (self.p - x) % self.p).collect();
            self.from_digits(&d)
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.n == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % (self.q as u64 - 1)) as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let l = self.log[a as usize];
        Some(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % (self.q as u64 - 1))) % (self.q as u64 - 1)) as usize]
    }

    /// Discrete log to the stored generator; `None` at zero.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn exp(&self, k: u64) -> u32 {
        self.exp[(k % (self.q as u64 - 1)) as usize]
    }

    pub fn generator(&self) -> u32 {
        self.exp[if self.q == 2 { 0 } else { 1 }]
    }

    /// `Tr_{q/p}`, returned as an element of `F_p` (an index below `p`).
    #[inline]
    pub fn trace(&self, a: u32) -> u32 {
        self.trace[a as usize]
    }

    /// Multiplication by an integer in characteristic `p`.
    pub fn scale(&self, a: u32, k: i64) -> u32 {
        let k = k.rem_euclid(self.p as i64) as u32;
        self.mul(a, k)
    }

    /// Inverse Frobenius `z ↦ z^{1/p} = z^{q/p}`.
    pub fn frobenius_inv(&self, a: u32) -> u32 {
        self.pow(a, (self.q / self.p) as u64)
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.q
    }

    fn build_tables(&mut self) {
        let q = self.q;
        if self.n > 1 && q <= ADD_TABLE_MAX_Q {
            let mut tab = vec![0; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    tab[(a * q + b) as usize] = self.add_digits(a, b);
                }
            }
            self.add_tab = tab;
        }
        let order = (q - 1) as u64;
        let prime_factors: Vec<u64> = factorize(order).into_iter().map(|(l, _)| l).collect();
        let gen = (1..q)
            .find(|&g| prime_factors.iter().all(|&l| self.slow_pow(g, order / l) != 1) || q == 2)
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut x = 1;
        for k in 0..order {
            exp.push(x);
            log[x as usize] = k as u32;
            x = self.slow_mul(x, gen);
        }
        self.exp = exp;
        self.log = log;
        self.trace = (0..q)
            .map(|z| {
                let mut acc = 0;
                let mut y = z;
                for _ in 0..self.n {
                    acc = self.add(acc, y);
                    y = self.pow(y, self.p as u64);
                }
                debug_assert!(acc < self.p);
                acc
            })
            .collect();
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let n = self.n as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * n];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for k in (n..2 * n).rev() {
            let c = prod[k];
            if c != 0 {
                for (i, &m) in self.modulus.iter().enumerate().take(n) {
                    prod[k - n + i] = (prod[k - n + i] + (p - c) * m as u64) % p;
                }
                prod[k] = 0;
            }
        }
        let d: Vec<u32> = prod[..n].iter().map(|&v| v as u32).collect();
        self.from_digits(&d)
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Lexicographically least monic irreducible of degree `n` over `F_p`,
/// coefficient tuples compared from the high-degree end.
fn least_irreducible_over_prime(p: u32, n: u32) -> Vec<u32> {
    let p64 = p as u64;
    let total = p64.pow(n);
    for k in 0..total {
        let mut coeffs = Vec::with_capacity(n as usize + 1);
        let mut t = k;
        for _ in 0..n {
            coeffs.push((t % p64) as u32);
            t /= p64;
        }
        coeffs.push(1);
        if prime_poly_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Trial division over `F_p` by every monic polynomial of degree `1..=deg/2`.
fn prime_poly_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    let p64 = p as u64;
    for e in 1..=deg / 2 {
        for k in 0..p64.pow(e as u32) {
            let mut g = Vec::with_capacity(e + 1);
            let mut t = k;
            for _ in 0..e {
                g.push((t % p64) as u32);
                t /= p64;
            }
            g.push(1);
            if prime_poly_rem_zero(f, &g, p) {
                return false;
            }
        }
    }
    true
}

fn prime_poly_rem_zero(f: &[u32], g: &[u32], p: u32) -> bool {
    let p = p as u64;
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    for k in (dg..r.len()).rev() {
        let c = r[k];
        if c != 0 {
            for i in 0..=dg {
                r[k - dg + i] = (r[k - dg + i] + (p - c) * g[i] as u64) % p;
            }
        }
    }
    r[..dg].iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_modulus_is_x2_x_1() {
        let f = Fq::new(2, 2).unwrap();
        assert_eq!(f.modulus(), Some(&[1, 1, 1][..]));
        assert!(Fq::new(2, 1).unwrap().modulus().is_none());
    }

    #[test]
    fn field_axioms_f9_f8() {
        for (p, n) in [(3, 2), (2, 3), (5, 1), (3, 3)] {
            let f = Fq::new(p, n).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                assert_eq!(f.frobenius_inv(f.pow(a, p as u64)), a);
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.slow_mul(a, b));
                    for c in [0, 1, f.q() - 1] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_additive_and_onto() {
        let f = Fq::new(3, 2).unwrap();
        let mut counts = [0; 3];
        for a in f.elements() {
            counts[f.trace(a) as usize] += 1;
            for b in f.elements() {
                assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % 3);
            }
        }
        assert_eq!(counts, [3, 3, 3]);
    }

    #[test]
    fn rejects_composite() {
        assert_eq!(Fq::new(4, 1).unwrap_err(), Error::NotPrime(4));
    }
}
