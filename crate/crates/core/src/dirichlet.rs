//! Characters `χ_f` modulo `x^{d+1}`, their L-functions, and the subgroup
//! bookkeeping behind the exact average formula for a family of characters,
//! including the odd family.

use num_rational::Ratio;

use crate::algebra::arith::divisors;
use crate::algebra::{CycloElem, Fq, IrreducibleCache, PolyFq};
use crate::exact::ExactValue;
use crate::families::FamilySpec;
use crate::lfunction::l_polynomial;
use crate::{Error, Result};

/// `χ_f` for `f` of degree at most `d` with `f(0) = 0`, modulo `x^{d+1}`.
#[derive(Debug, Clone)]
pub struct DirichletChar {
    fq: Fq,
    d: usize,
    f: PolyFq,
    a: u32,
}

impl DirichletChar {
    pub fn new(fq: Fq, d: usize, f: PolyFq, a: u32) -> Result<Self> {
        let p = fq.p();
        if a % p == 0 {
            return Err(Error::TrivialCharacter);
        }
        if f.degree().is_some_and(|e| e > d) {
            return Err(Error::InvalidParameters(format!("deg f exceeds d = {d}")));
        }
        if f.coeff(0) != 0 {
            return Err(Error::InvalidParameters("the defining polynomial must vanish at 0".into()));
        }
        Ok(DirichletChar { fq, d, f, a })
    }

    /// The character of a family member.
    pub fn of_member(spec: &FamilySpec, f: PolyFq, a: u32) -> Result<Self> {
        Self::new(Fq::new(spec.p, spec.n)?, spec.d, f, a)
    }

    pub fn fq(&self) -> &Fq {
        &self.fq
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn f(&self) -> &PolyFq {
        &self.f
    }

    pub fn psi_index(&self) -> u32 {
        self.a
    }

    /// `Σ_i f(α_i)` for `g = g(0) Π (1 - α_i x)`, with `g(0) ≠ 0`.
    fn root_image(&self, g: &PolyFq) -> u32 {
        let fq = &self.fq;
        let t = inverse_root_power_sums(g, self.d, fq);
        (1..=self.d).fold(0, |acc, j| fq.add(acc, fq.mul(self.f.coeff(j), t[j])))
    }

    /// `χ_f(g)`, `0` when `x | g`.
    pub fn eval(&self, g: &PolyFq) -> CycloElem {
        let p = self.fq.p();
        if g.coeff(0) == 0 {
            return CycloElem::zero(p);
        }
        let tr = self.fq.trace(self.root_image(g));
        CycloElem::zeta_pow(p, self.a as i64 * tr as i64)
    }

    /// `Tr(Σ f(α_i)) ∈ F_p` as the exponent of `ζ^a`, `None` when `x | g`.
    pub fn exponent(&self, g: &PolyFq) -> Option<u32> {
        (g.coeff(0) != 0).then(|| self.fq.trace(self.root_image(g)))
    }
}

/// Power sums `t_j = Σ α_i^j`, `0 ≤ j ≤ m`, of the inverse roots of `g`,
/// from `u · Σ t_j x^j = -x u'` with `u = g/g(0)`.
fn inverse_root_power_sums(g: &PolyFq, m: usize, fq: &Fq) -> Vec<u32> {
    let b0 = fq.inv(g.coeff(0)).expect("g(0) is a unit");
    let u: Vec<u32> = (0..=m).map(|i| fq.mul(g.coeff(i), b0)).collect();
    let mut t = vec![0u32; m + 1];
    for j in 1..=m {
        let mut acc = fq.neg(fq.scale(u[j], j as i64));
        for i in 1..j {
            acc = fq.sub(acc, fq.mul(u[i], t[j - i]));
        }
        t[j] = acc;
    }
    t
}

/// `χ_f(g)` as a free function.
pub fn chi_eval(chi: &DirichletChar, g: &PolyFq) -> CycloElem {
    chi.eval(g)
}

/// Monic polynomials of degree exactly `k` over `F_q`, in lexicographic order
/// of `(c_{k-1}, …, c_0)`.
fn monic_of_degree(k: usize, fq: &Fq) -> impl Iterator<Item = PolyFq> + '_ {
    let q = fq.q() as u64;
    let total = q.pow(k as u32);
    (0..total).map(move |mut idx| {
        let mut c = vec![0u32; k + 1];
        for slot in c.iter_mut().take(k) {
            *slot = (idx % q) as u32;
            idx /= q;
        }
        c[k] = 1;
        PolyFq::new(c)
    })
}

/// `L_χ(z) = Σ_{g monic, deg g ≤ d} χ(g) z^{deg g}`; higher coefficients vanish.
pub fn l_chi(chi: &DirichletChar, cap: u64) -> Result<Vec<CycloElem>> {
    let q = chi.fq.q() as u128;
    let total: u128 = (0..=chi.d as u32).map(|k| q.pow(k)).sum();
    if total > cap as u128 {
        return Err(Error::CapExceeded { size: total, cap });
    }
    Ok((0..=chi.d).map(|k| coefficient(chi, k)).collect())
}

fn coefficient(chi: &DirichletChar, k: usize) -> CycloElem {
    let p = chi.fq.p() as usize;
    let mut counts = vec![0i64; p];
    for g in monic_of_degree(k, &chi.fq) {
        if let Some(e) = chi.exponent(&g) {
            counts[(chi.a as usize * e as usize) % p] += 1;
        }
    }
    CycloElem::from_counts(&counts)
}

/// `Σ_{g monic, deg g = k} χ(g)`, exposed for checking that the L-series
/// stops at degree `d`.
pub fn l_chi_coefficient(chi: &DirichletChar, k: usize) -> CycloElem {
    coefficient(chi, k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationCheck {
    pub l_chi: Vec<CycloElem>,
    /// Coefficients of `(1 - z) L_{f,ψ}(z)`.
    pub expected: Vec<CycloElem>,
    pub diff: Vec<CycloElem>,
    pub holds: bool,
}

/// Compares `L_{χ_f}` with `(1 - z) L_{f,ψ_a}` coefficientwise in `Z[ζ_p]`.
pub fn verify_factorization(spec: &FamilySpec, f: &PolyFq, a: u32, cap: u64) -> Result<FactorizationCheck> {
    let chi = DirichletChar::of_member(spec, f.clone(), a)?;
    let lc = l_chi(&chi, cap)?;
    let lf = l_polynomial(f, spec.p, spec.n, a, cap)?;
    let p = spec.p;
    let c = lf.coeffs();
    let expected: Vec<CycloElem> = (0..=c.len())
        .map(|k| {
            let hi = c.get(k).cloned().unwrap_or_else(|| CycloElem::zero(p));
            let lo = if k > 0 { c[k - 1].clone() } else { CycloElem::zero(p) };
            hi - lo
        })
        .collect();
    let len = lc.len().max(expected.len());
    let at = |v: &[CycloElem], k: usize| v.get(k).cloned().unwrap_or_else(|| CycloElem::zero(p));
    let diff: Vec<CycloElem> = (0..len).map(|k| at(&lc, k) - at(&expected, k)).collect();
    let holds = diff.iter().all(CycloElem::is_zero);
    Ok(FactorizationCheck { l_chi: lc, expected, diff, holds })
}

/// Which residues the lifting may absorb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Absorb {
    /// `g_1(x^p) g_2(x^2)`: levels that are even or divisible by `p`.
    PowerTimesEven,
    /// `g_1(x^p)` only: levels divisible by `p`.
    PowerOnly,
}

/// Outcome of the filtration lifting of `h` modulo `x^D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionWitness {
    /// `h ≡ g1(x^p) g2(x^2) (mod x^D)`.
    Success { g1: PolyFq, g2: PolyFq },
    /// The residual had coefficient `coefficient` at an odd level not divisible by `p`.
    Failure { level: usize, coefficient: u32 },
}

impl DecompositionWitness {
    pub fn is_success(&self) -> bool {
        matches!(self, DecompositionWitness::Success { .. })
    }

    /// Multiplies the witness back out and compares with `h` modulo `x^D`.
    pub fn verify(&self, h: &PolyFq, modulus_degree: usize, fq: &Fq) -> bool {
        match self {
            DecompositionWitness::Success { g1, g2 } => {
                let prod = g1.compose_xpow(fq.p() as usize).mul_trunc(&g2.compose_xpow(2), modulus_degree, fq);
                prod == h.truncate(modulus_degree)
            }
            DecompositionWitness::Failure { .. } => false,
        }
    }
}

/// Greedy lifting through the unit filtration `1 + x^j F_q[[x]]`.
pub fn k_membership(h: &PolyFq, modulus_degree: usize, fq: &Fq) -> Result<DecompositionWitness> {
    lift(h, modulus_degree, fq, Absorb::PowerTimesEven)
}

pub fn lift(h: &PolyFq, modulus_degree: usize, fq: &Fq, absorb: Absorb) -> Result<DecompositionWitness> {
    let h0 = h.coeff(0);
    if h0 == 0 {
        return Err(Error::InvalidParameters("h must be prime to x".into()));
    }
    let dd = modulus_degree;
    let p = fq.p() as usize;
    let inv0 = fq.inv(h0).expect("nonzero");
    let mut residual = h.truncate(dd).scale(inv0, fq);
    let mut g1 = PolyFq::new(vec![h0]);
    let mut g2 = PolyFq::one();
    for j in 1..dd {
        let c = residual.coeff(j);
        if c == 0 {
            continue;
        }
        let factor = if j % 2 == 0 && absorb == Absorb::PowerTimesEven {
            g2 = g2.mul(&PolyFq::new(unit_plus(c, j / 2)), fq);
            true
        } else if j % p == 0 {
            g1 = g1.mul(&PolyFq::new(unit_plus(c, j / p)), fq);
            true
        } else {
            false
        };
        if !factor {
            return Ok(DecompositionWitness::Failure { level: j, coefficient: c });
        }
        residual = residual.mul_trunc(&inverse_unit_plus(c, j, dd, fq), dd, fq);
    }
    Ok(DecompositionWitness::Success { g1, g2 })
}

fn unit_plus(c: u32, k: usize) -> Vec<u32> {
    let mut v = vec![0u32; k + 1];
    v[0] = 1;
    v[k] = c;
    v
}

/// `(1 + c x^j)^{-1} mod x^D`.
fn inverse_unit_plus(c: u32, j: usize, dd: usize, fq: &Fq) -> PolyFq {
    let mut v = vec![0u32; dd];
    let minus_c = fq.neg(c);
    let mut term = 1;
    let mut k = 0;
    while k < dd {
        v[k] = term;
        term = fq.mul(term, minus_c);
        k += j;
    }
    PolyFq::new(v)
}

/// Which group of characters modulo `x^{d+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    /// All characters of order dividing `p`; the primitive ones are the `χ_f`, `f ∈ F_d`.
    PTorsionAll,
    /// `χ_f` for odd `f` of degree at most `d`; the primitive ones come from `O_d`.
    OddF,
}

impl std::str::FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p_torsion_all" | "full" => Ok(Selector::PTorsionAll),
            "odd_f" | "odd" => Ok(Selector::OddF),
            _ => Err(Error::InvalidParameters(format!("unknown subgroup {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubgroupSpec {
    pub selector: Selector,
    pub p: u32,
    pub n: u32,
    pub d: usize,
}

impl SubgroupSpec {
    pub fn new(selector: Selector, p: u32, n: u32, d: usize) -> Result<Self> {
        match selector {
            Selector::PTorsionAll => FamilySpec::full(p, n, d)?,
            Selector::OddF => FamilySpec::odd(p, n, d)?,
        };
        Ok(SubgroupSpec { selector, p, n, d })
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }

    /// The family whose characters are the primitive elements of `H`.
    pub fn family(&self) -> FamilySpec {
        match self.selector {
            Selector::PTorsionAll => FamilySpec::full(self.p, self.n, self.d),
            Selector::OddF => FamilySpec::odd(self.p, self.n, self.d),
        }
        .expect("validated on construction")
    }

    fn absorb(&self) -> Absorb {
        match self.selector {
            Selector::PTorsionAll => Absorb::PowerOnly,
            Selector::OddF => Absorb::PowerTimesEven,
        }
    }

    /// `log_q #H` for the group of period `x^{D}`, `D ∈ {d, d+1}`.
    pub fn log_size(&self, modulus_degree: usize) -> u32 {
        let top = modulus_degree - 1;
        let p = self.p as usize;
        let free = (1..=top).filter(|i| i % p != 0);
        match self.selector {
            Selector::PTorsionAll => free.count() as u32,
            Selector::OddF => free.filter(|i| i % 2 == 1).count() as u32,
        }
    }

    /// `#H / #H'` and `#H_{Q_1} / #H'` as exact rationals.
    pub fn size_ratios(&self) -> (Ratio<i128>, Ratio<i128>) {
        let q = self.q() as i128;
        let full = q.pow(self.log_size(self.d + 1));
        let q1 = q.pow(self.log_size(self.d));
        let prim = full - q1;
        (Ratio::new(full, prim), Ratio::new(q1, prim))
    }

    /// Whether the residue of `h` modulo `x^D` lies in `(H_{x^D}^k)^⊥`.
    pub fn orthogonal(&self, h: &PolyFq, modulus_degree: usize, power: usize, fq: &Fq) -> Result<bool> {
        if h.coeff(0) == 0 {
            return Ok(false);
        }
        if power % self.p as usize == 0 {
            return Ok(true);
        }
        Ok(lift(h, modulus_degree, fq, self.absorb())?.is_success())
    }
}

/// `η(H_{x^D}, s)`: monic irreducibles of degree `s` in the orthogonal group.
pub fn eta_subgroup(spec: &SubgroupSpec, s: usize, modulus_degree: usize, cache: &mut IrreducibleCache) -> Result<u64> {
    eta_power(spec, s, modulus_degree, 1, cache)
}

fn eta_power(
    spec: &SubgroupSpec,
    s: usize,
    modulus_degree: usize,
    power: usize,
    cache: &mut IrreducibleCache,
) -> Result<u64> {
    let fq = cache.fq().clone();
    let mut count = 0;
    for h in cache.degree(s)? {
        if spec.orthogonal(h, modulus_degree, power, &fq)? {
            count += 1;
        }
    }
    Ok(count)
}

/// `⟨T^r_χ⟩` over the primitive characters of `H`:
/// `-q^{-r/2} - q^{-r/2}/#H' Σ_{Q'} μ(Q/Q') #H_{Q'} Σ_{s|r} s η(H_{Q'}^{r/s}, s)`
/// with `Q' ∈ {x^{d+1}, x^d}`.
pub fn dirprop_average(spec: &SubgroupSpec, r: usize, cache: &mut IrreducibleCache) -> Result<ExactValue> {
    let d = spec.d;
    let (big, small) = spec.size_ratios();
    let mut top = 0i128;
    let mut bottom = 0i128;
    for s in divisors(r as u64) {
        let s = s as usize;
        let k = r / s;
        top += s as i128 * eta_power(spec, s, d + 1, k, cache)? as i128;
        bottom += s as i128 * eta_power(spec, s, d, k, cache)? as i128;
    }
    let bracket = Ratio::from_integer(1) + big * top - small * bottom;
    Ok(ExactValue::from_ratio(spec.p, spec.q(), -bracket, -(r as i32)))
}

/// Irreducible `h ≠ x` of degree `≤ r_max` that decompose as `g_1(x^p) g_2(x^2)`
/// modulo `x^d` yet are not even polynomials.
pub fn niceconj_probe(fq: &Fq, d: usize, r_max: usize, cache: &mut IrreducibleCache) -> Result<Vec<PolyFq>> {
    if 4 * r_max >= d {
        return Err(Error::InvalidParameters(format!("r_max = {r_max} must be below d/4")));
    }
    let mut found = Vec::new();
    for r in 1..=r_max {
        for h in cache.degree(r)? {
            if h.coeff(0) == 0 {
                continue;
            }
            let odd_support = h.coeffs().iter().enumerate().any(|(i, &c)| i % 2 == 1 && c != 0);
            if odd_support && k_membership(h, d, fq)?.is_success() {
                found.push(h.clone());
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Fq {
        Fq::new(3, 1).unwrap()
    }

    #[test]
    fn chi_examples() {
        let fq = f3();
        let f = PolyFq::new(vec![0, 1, 2, 0, 1]);
        let chi = DirichletChar::new(fq.clone(), 4, f.clone(), 1).unwrap();
        assert_eq!(chi.eval(&PolyFq::new(vec![2])), CycloElem::one(3));
        assert!(chi.eval(&PolyFq::new(vec![0, 1, 1])).is_zero());
        for c in 0..3 {
            // χ(1 - c x^d) = ψ(Tr(c d a_d))
            let g = PolyFq::new(vec![1, 0, 0, 0, fq.neg(c)]);
            let v = fq.mul(fq.scale(c, 4), f.coeff(4));
            assert_eq!(chi.eval(&g), CycloElem::zeta_pow(3, fq.trace(v) as i64));
        }
        assert!(DirichletChar::new(fq.clone(), 4, PolyFq::new(vec![1, 1]), 1).is_err());
        assert_eq!(DirichletChar::new(fq, 4, f, 3).unwrap_err(), Error::TrivialCharacter);
    }

    #[test]
    fn power_sums_match_roots() {
        // g = (1 - x)(1 - 2x) over F_5: t_j = 1 + 2^j
        let fq = Fq::new(5, 1).unwrap();
        let g = PolyFq::new(vec![1, 2, 2]);
        let t = inverse_root_power_sums(&g, 6, &fq);
        for (j, &tj) in t.iter().enumerate().skip(1) {
            assert_eq!(tj, (1 + 2u32.pow(j as u32)) % 5);
        }
    }

    #[test]
    fn lifting_examples() {
        let fq = f3();
        let w = k_membership(&PolyFq::new(vec![1, 0, 1]), 7, &fq).unwrap();
        assert_eq!(w, DecompositionWitness::Success { g1: PolyFq::one(), g2: PolyFq::new(vec![1, 1]) });
        let w = k_membership(&PolyFq::new(vec![1, 1]), 4, &fq).unwrap();
        assert_eq!(w, DecompositionWitness::Failure { level: 1, coefficient: 1 });
        let h = PolyFq::new(vec![1, 1]).mul(&PolyFq::new(vec![1, 1]), &fq).mul(&PolyFq::new(vec![1, 1]), &fq);
        let h = h.mul(&PolyFq::new(vec![1, 0, 1]), &fq);
        let w = k_membership(&h, 8, &fq).unwrap();
        assert_eq!(w, DecompositionWitness::Success { g1: PolyFq::new(vec![1, 1]), g2: PolyFq::new(vec![1, 1]) });
        assert!(w.verify(&h, 8, &fq));
        assert!(k_membership(&PolyFq::new(vec![0, 1]), 4, &fq).is_err());
    }

    #[test]
    fn odd_subgroup_sizes() {
        let s = SubgroupSpec::new(Selector::OddF, 3, 1, 7).unwrap();
        let (big, small) = s.size_ratios();
        assert_eq!(big, Ratio::new(3, 2));
        assert_eq!(small, Ratio::new(1, 2));
        assert_eq!(s.family().size(), 18);
        let t = SubgroupSpec::new(Selector::PTorsionAll, 3, 1, 4).unwrap();
        assert_eq!(t.size_ratios(), (Ratio::new(3, 2), Ratio::new(1, 2)));
    }
}
