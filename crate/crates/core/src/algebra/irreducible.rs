use rayon::prelude::*;

use super::arith::{divisors, mobius as int_mobius};
use super::fq::Fq;
use super::poly::PolyFq;
use super::tower::{FieldTower, FqElem, Level};
use crate::{Error, Result, DEFAULT_CAP};

/// Monic irreducibles over `F_q`, enumerated degree by degree on demand.
///
/// Degree-`e` candidates are certified by trial division against the cached
/// irreducibles of degree at most `e/2`.
#[derive(Debug, Clone)]
pub struct IrreducibleCache {
    fq: Fq,
    cap: u64,
    by_degree: Vec<Option<Vec<PolyFq>>>,
}

impl IrreducibleCache {
    pub fn new(fq: Fq) -> Self {
        Self::with_cap(fq, DEFAULT_CAP)
    }

    pub fn with_cap(fq: Fq, cap: u64) -> Self {
        IrreducibleCache { fq, cap, by_degree: vec![Some(Vec::new())] }
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    /// All monic irreducibles of degree `e`, in lexicographic order.
    pub fn degree(&mut self, e: usize) -> Result<&[PolyFq]> {
        if self.by_degree.len() <= e {
            self.by_degree.resize(e + 1, None);
        }
        if self.by_degree[e].is_none() {
            for k in 1..=e / 2 {
                self.degree(k)?;
            }
            let q = self.fq.q() as u64;
            let total = q
                .checked_pow(e as u32)
                .filter(|&t| t <= self.cap)
                .ok_or(Error::CapExceeded { size: (q as u128).saturating_pow(e as u32), cap: self.cap })?;
            let divisors: Vec<&PolyFq> =
                self.by_degree[1..=e / 2].iter().flat_map(|v| v.as_ref().expect("filled above").iter()).collect();
            let fq = &self.fq;
            let found: Vec<PolyFq> = (0..total)
                .into_par_iter()
                .filter_map(|k| {
                    let cand = monic_from_index(k, e, q);
                    divisors.iter().all(|g| !cand.rem(g, fq).expect("monic divisor").is_zero()).then_some(cand)
                })
                .collect();
            self.by_degree[e] = Some(found);
        }
        Ok(self.by_degree[e].as_deref().expect("filled above"))
    }

    pub fn is_irreducible(&mut self, poly: &PolyFq) -> Result<bool> {
        let deg = poly.degree().ok_or(Error::ZeroPolynomial)?;
        if deg == 0 {
            return Ok(false);
        }
        if deg == 1 {
            return Ok(true);
        }
        for k in 1..=deg / 2 {
            for g in self.degree(k)?.to_vec() {
                if poly.rem(&g, &self.fq)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Factorisation into monic irreducibles with multiplicities; the leading
    /// constant is dropped.
    pub fn factor(&mut self, poly: &PolyFq) -> Result<Vec<(PolyFq, u32)>> {
        poly.degree().ok_or(Error::ZeroPolynomial)?;
        let fq = self.fq.clone();
        let mut rest = poly.make_monic(&fq);
        let mut out = Vec::new();
        let mut k = 1;
        while rest.degree().unwrap_or(0) >= 2 * k {
            for g in self.degree(k)?.to_vec() {
                let mut e = 0;
                loop {
                    let (quot, rem) = rest.div_rem(&g, &fq)?;
                    if !rem.is_zero() {
                        break;
                    }
                    rest = quot;
                    e += 1;
                }
                if e > 0 {
                    out.push((g, e));
                }
            }
            k += 1;
        }
        if rest.degree().unwrap_or(0) > 0 {
            out.push((rest, 1));
        }
        out.sort();
        Ok(out)
    }

    /// Möbius function on `F_q[x]`.
    pub fn mobius(&mut self, poly: &PolyFq) -> Result<i32> {
        let factors = self.factor(poly)?;
        if factors.iter().any(|&(_, e)| e > 1) {
            Ok(0)
        } else if factors.len() % 2 == 0 {
            Ok(1)
        } else {
            Ok(-1)
        }
    }
}

fn monic_from_index(mut k: u64, e: usize, q: u64) -> PolyFq {
    let mut coeffs = Vec::with_capacity(e + 1);
    for _ in 0..e {
        coeffs.push((k % q) as u32);
        k /= q;
    }
    coeffs.push(1);
    PolyFq::new(coeffs)
}

/// `π(e) = (1/e) Σ_{m|e} μ(m) q^{e/m}`.
pub fn count_irreducibles(e: u32, q: u64) -> u128 {
    if e == 0 {
        return 0;
    }
    let total: i128 =
        divisors(e as u64).into_iter().map(|m| int_mobius(m) as i128 * (q as i128).pow(e / m as u32)).sum();
    (total / e as i128) as u128
}

pub fn enumerate_irreducibles(e: usize, fq: &Fq) -> Result<Vec<PolyFq>> {
    Ok(IrreducibleCache::new(fq.clone()).degree(e)?.to_vec())
}

pub fn is_irreducible(poly: &PolyFq, fq: &Fq) -> Result<bool> {
    IrreducibleCache::new(fq.clone()).is_irreducible(poly)
}

pub fn factor(poly: &PolyFq, fq: &Fq) -> Result<Vec<(PolyFq, u32)>> {
    IrreducibleCache::new(fq.clone()).factor(poly)
}

pub fn mobius(poly: &PolyFq, fq: &Fq) -> Result<i32> {
    IrreducibleCache::new(fq.clone()).mobius(poly)
}

/// Irreducibility of a monic coefficient vector by trial division against
/// every monic polynomial of degree `1..=deg/2`; used while a tower is being
/// built, before any cache exists.
pub(crate) fn is_irreducible_coeffs(fq: &Fq, coeffs: &[u32]) -> bool {
    let poly = PolyFq::new(coeffs.to_vec());
    let deg = coeffs.len() - 1;
    let q = fq.q() as u64;
    (1..=deg / 2)
        .all(|k| (0..q.pow(k as u32)).all(|i| !poly.rem(&monic_from_index(i, k, q), fq).expect("monic").is_zero()))
}

/// Minimal polynomial over `F_q` of a top-level element: the product of
/// `X − α^{q^k}` over its distinct conjugates.
pub fn minimal_poly(alpha: &FqElem, tower: &FieldTower) -> Result<PolyFq> {
    if alpha.level() != Level::Top {
        return Err(Error::LevelMismatch { expected: Level::Top, got: alpha.level() });
    }
    let q = tower.q() as u64;
    let mut conjugates = vec![alpha.coeffs().to_vec()];
    loop {
        let next = tower.top_pow(conjugates.last().expect("nonempty"), q);
        if next == conjugates[0] {
            break;
        }
        conjugates.push(next);
    }
    let r = tower.r() as usize;
    let fq = tower.fq();
    let mut one = vec![0; r];
    one[0] = 1;
    // coefficients in F_{q^r}, low degree first
    let mut prod: Vec<Vec<u32>> = vec![one];
    for c in &conjugates {
        let neg_c: Vec<u32> = c.iter().map(|&x| fq.neg(x)).collect();
        let mut next = vec![vec![0; r]; prod.len() + 1];
        for (i, a) in prod.iter().enumerate() {
            next[i + 1] = tower.top_add(&next[i + 1], a);
            next[i] = tower.top_add(&next[i], &tower.top_mul(a, &neg_c));
        }
        prod = next;
    }
    let coeffs = prod
        .iter()
        .map(|c| {
            if c[1..].iter().any(|&x| x != 0) {
                Err(Error::NonIntegral("minimal polynomial coefficient outside F_q".into()))
            } else {
                Ok(c[0])
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyFq::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_tower;

    #[test]
    fn counts_match_enumeration() {
        for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let fq = Fq::new(p, n).unwrap();
            let q = fq.q() as u64;
            let mut cache = IrreducibleCache::new(fq);
            let max_e = if q == 5 { 6 } else { 8 };
            for e in 1..=max_e {
                assert_eq!(cache.degree(e).unwrap().len() as u128, count_irreducibles(e as u32, q));
            }
        }
        assert_eq!(count_irreducibles(1, 7), 7);
        assert_eq!(count_irreducibles(2, 2), 1);
        assert_eq!(count_irreducibles(4, 2), 3);
    }

    #[test]
    fn mobius_examples() {
        let f2 = Fq::new(2, 1).unwrap();
        assert_eq!(mobius(&PolyFq::new(vec![0, 0, 1]), &f2).unwrap(), 0);
        assert_eq!(mobius(&PolyFq::new(vec![0, 1, 1]), &f2).unwrap(), 1);
        assert_eq!(mobius(&PolyFq::new(vec![1, 1, 1]), &f2).unwrap(), -1);
        assert_eq!(mobius(&PolyFq::zero(), &f2).unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn factor_recomposes() {
        let fq = Fq::new(3, 1).unwrap();
        let mut cache = IrreducibleCache::new(fq.clone());
        for k in 0..729u64 {
            let p = monic_from_index(k, 6, 3).scale(2, &fq);
            let factors = cache.factor(&p).unwrap();
            let mut back = PolyFq::one();
            let mut deg = 0;
            for (g, e) in &factors {
                assert!(cache.is_irreducible(g).unwrap());
                for _ in 0..*e {
                    back = back.mul(g, &fq);
                }
                deg += g.degree().unwrap() * *e as usize;
            }
            assert_eq!(deg, 6);
            assert_eq!(back, p.make_monic(&fq));
        }
    }

    #[test]
    fn minimal_polynomials() {
        let t = build_tower(2, 1, 2).unwrap();
        assert_eq!(minimal_poly(&t.top(2), &t).unwrap(), PolyFq::new(vec![1, 1, 1]));
        let t = build_tower(3, 1, 4).unwrap();
        let fq = t.fq().clone();
        for i in 0..t.size() {
            let a = t.top(i);
            let m = minimal_poly(&a, &t).unwrap();
            assert!(m.is_monic());
            assert_eq!(4 % m.degree().unwrap(), 0);
            assert!(m.eval_top(&a, &t).unwrap().is_zero());
            assert!(is_irreducible(&m, &fq).unwrap());
        }
    }
}
