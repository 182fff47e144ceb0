//! Character sums `S_r(f, ψ)`, L-polynomials and their normalised zeros.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{CycloElem, FieldTower, PolyFq};
use crate::exact::ExactValue;
use crate::families::FamilySpec;
use crate::{Error, Result};

/// Largest signature space `p^m` for the family transform; bigger families
/// fall back to one table-driven sum per member.
const TRANSFORM_CAP: u64 = 1 << 22;

/// `counts[v] = #{α ∈ F_{q^r} : Tr f(α) = v}` by Horner evaluation and the
/// definition of the trace as a sum of conjugates.
pub fn trace_counts_naive(f: &PolyFq, tower: &FieldTower) -> Vec<i64> {
    let mut counts = vec![0i64; tower.p() as usize];
    for alpha in tower.top_elements() {
        let y = f.eval_top(&alpha, tower).expect("top-level element");
        counts[tower.trace_to_prime(&y).expect("top-level element").coeffs()[0] as usize] += 1;
    }
    counts
}

/// Same counts, through the discrete-log and trace tables: for `α = g^k`,
/// `Tr f(α) = Σ_i Tr(g^{log a_i + ik})`.
pub fn trace_counts(f: &PolyFq, tower: &FieldTower) -> Vec<i64> {
    let p = tower.p() as usize;
    let Some(tabs) = tower.tables() else {
        let mut counts = vec![0i64; p];
        for i in 0..tower.size() {
            let alpha = tower.top(i);
            let y = f.eval_top(&alpha, tower).expect("top-level element");
            counts[tower.trace_linear(y.coeffs()) as usize] += 1;
        }
        return counts;
    };
    let order = tabs.order;
    let terms: Vec<(u64, u64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|&(_, &a)| a != 0)
        .map(|(i, &a)| (tabs.log[a as usize] as u64, i as u64 % order))
        .collect();
    let mut counts = vec![0i64; p];
    counts[tabs.trace[f.coeff(0) as usize] as usize] += 1;
    let mut exps: Vec<u64> = terms.iter().map(|&(l, _)| l).collect();
    for _ in 0..order {
        let mut v = 0usize;
        for (e, &(_, step)) in exps.iter_mut().zip(&terms) {
            v += tabs.trace_exp[*e as usize] as usize;
            *e += step;
            if *e >= order {
                *e -= order;
            }
        }
        counts[v % p] += 1;
    }
    counts
}

fn to_sum(counts: &[i64], a: u32) -> CycloElem {
    let s = CycloElem::from_counts(counts);
    if a == 1 {
        s
    } else {
        s.galois(a)
    }
}

fn check_psi(p: u32, a: u32) -> Result<()> {
    if a % p == 0 {
        return Err(Error::TrivialCharacter);
    }
    Ok(())
}

/// `S_r(f, ψ_a) = Σ_{α ∈ F_{q^r}} ζ^{a Tr f(α)}` with `r` the tower's top degree.
pub fn char_sum(f: &PolyFq, a: u32, tower: &FieldTower) -> Result<CycloElem> {
    check_psi(tower.p(), a)?;
    Ok(to_sum(&trace_counts(f, tower), a))
}

/// [`char_sum`] through Horner evaluation and the conjugate-sum trace.
pub fn char_sum_naive(f: &PolyFq, a: u32, tower: &FieldTower) -> Result<CycloElem> {
    check_psi(tower.p(), a)?;
    Ok(to_sum(&trace_counts_naive(f, tower), a))
}

/// `S_r(f, ψ_1)` for every member of a family, in enumeration order.
///
/// For `α ∈ F_{q^r}` the signature `σ(α) = (Tr(y^j α^i))_{i,j}` over the
/// varying indices `i` and the basis `y^j` of `F_q/F_p` determines
/// `Tr f(α) = ⟨c(f), σ(α)⟩`, where `c(f)` lists the `F_p`-coordinates of the
/// coefficients. The histogram of signatures is transformed one coordinate
/// at a time in the group ring `Z[C_p]`, giving every sum at once.
pub fn family_char_sums(spec: &FamilySpec, tower: &FieldTower, cap: u64) -> Result<Vec<CycloElem>> {
    let cursor = spec.cursor(cap)?;
    if tower.q() as u64 != spec.q() {
        return Err(Error::InvalidParameters("tower and family disagree on q".into()));
    }
    let mut slots = spec.free_indices();
    if !slots.contains(&spec.d) {
        slots.push(spec.d);
    }
    let p = tower.p() as u64;
    let n = tower.n() as usize;
    let m = (slots.len() * n) as u32;
    let bins = p.checked_pow(m).filter(|&b| b.saturating_mul(p) <= TRANSFORM_CAP);
    let (Some(bins), Some(tabs)) = (bins, tower.tables()) else {
        return Ok(cursor
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|k| char_sum(&spec.member(k), 1, tower).expect("psi_1 is nontrivial"))
            .collect());
    };
    let order = tabs.order;
    // (log of y^j, i) per signature coordinate, coordinate t = slot * n + j
    let coords: Vec<(u64, u64, u32)> = slots
        .iter()
        .flat_map(|&i| {
            (0..n).map(move |j| {
                let yj = p.pow(j as u32) as usize;
                (tabs.log[yj] as u64, i as u64 % order, tabs.trace[yj] as u32 * u32::from(i == 0))
            })
        })
        .collect();
    let weights: Vec<u64> = (0..m).map(|t| p.pow(t)).collect();
    let chunk = 1u64 << 14;
    let hist = (0..order.div_ceil(chunk))
        .into_par_iter()
        .fold(
            || vec![0i64; bins as usize],
            |mut h, c| {
                let start = c * chunk;
                let end = (start + chunk).min(order);
                for k in start..end {
                    let mut code = 0u64;
                    for (&(l, i, _), &w) in coords.iter().zip(&weights) {
                        let e = (l + i * (k % order)) % order;
                        code += tabs.trace_exp[e as usize] as u64 * w;
                    }
                    h[code as usize] += 1;
                }
                h
            },
        )
        .reduce(
            || vec![0i64; bins as usize],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut hist = hist;
    // α = 0 contributes Tr(y^j) on the constant slot only
    let zero_code: u64 = coords.iter().zip(&weights).map(|(&(_, _, t0), &w)| t0 as u64 * w).sum();
    hist[zero_code as usize] += 1;

    let transformed = group_ring_transform(&hist, p as usize, m as usize);
    let fq = tower.fq();
    let sums = cursor
        .map(|k| {
            let f = spec.member(k);
            let mut code = 0usize;
            for (t, &i) in slots.iter().enumerate() {
                for (j, digit) in fq.digits(f.coeff(i)).into_iter().enumerate() {
                    code += digit as usize * weights[t * n + j] as usize;
                }
            }
            CycloElem::from_counts(&transformed[code * p as usize..(code + 1) * p as usize])
        })
        .collect();
    Ok(sums)
}

/// For `H` on `F_p^m`, returns `F(c) = Σ_σ H(σ) [⟨c, σ⟩]` in `Z[C_p]`, flattened
/// with `p` multiplicities per `c`.
fn group_ring_transform(hist: &[i64], p: usize, m: usize) -> Vec<i64> {
    let bins = hist.len();
    let mut a = vec![0i64; bins * p];
    for (s, &h) in hist.iter().enumerate() {
        a[s * p] = h;
    }
    let mut stride = 1usize;
    let mut buf = vec![0i64; p * p];
    for _ in 0..m {
        for base in 0..bins {
            if (base / stride) % p != 0 {
                continue;
            }
            buf.iter_mut().for_each(|x| *x = 0);
            for c in 0..p {
                for s in 0..p {
                    let src = (base + s * stride) * p;
                    let shift = (c * s) % p;
                    for u in 0..p {
                        buf[c * p + (u + shift) % p] += a[src + u];
                    }
                }
            }
            for c in 0..p {
                let dst = (base + c * stride) * p;
                a[dst..dst + p].copy_from_slice(&buf[c * p..(c + 1) * p]);
            }
        }
        stride *= p;
    }
    a
}

/// `L(z) = Σ c_k z^k` with coefficients in `Z[ζ_p]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPoly {
    pub p: u32,
    pub q: u64,
    pub d: usize,
    coeffs: Vec<CycloElem>,
}

impl LPoly {
    /// Builds `L` from `S_1, …, S_{d-1}` through `k c_k = Σ_{j≤k} S_j c_{k-j}`,
    /// every division checked for integrality.
    pub fn from_sums(sums: &[CycloElem], p: u32, q: u64, d: usize) -> Result<Self> {
        if sums.len() + 1 < d {
            return Err(Error::InvalidParameters(format!("need {} sums, got {}", d - 1, sums.len())));
        }
        let mut coeffs = vec![CycloElem::one(p)];
        for k in 1..d {
            let mut acc = CycloElem::zero(p);
            for j in 1..=k {
                acc = acc.try_add(&sums[j - 1].try_mul(&coeffs[k - j])?)?;
            }
            coeffs.push(acc.div_exact(k as i128)?);
        }
        let got = coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        if got + 1 != d.max(1) {
            return Err(Error::DegreeShortfall { expected: d.saturating_sub(1), got });
        }
        Ok(LPoly { p, q, d, coeffs })
    }

    pub fn coeffs(&self) -> &[CycloElem] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.embed_complex()).collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.complex_coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `S_1, …, S_{k_max}` recovered exactly from the coefficients (Newton's
    /// identities with `c_k = 0` past the degree).
    pub fn power_sums(&self, k_max: usize) -> Result<Vec<CycloElem>> {
        let p = self.p;
        let c = |k: usize| self.coeffs.get(k).cloned().unwrap_or_else(|| CycloElem::zero(p));
        let mut s: Vec<CycloElem> = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let mut acc = c(k).scale(k as i128);
            for j in 1..k {
                acc = acc.try_sub(&s[j - 1].try_mul(&c(k - j))?)?;
            }
            s.push(acc);
        }
        Ok(s)
    }

    /// Coefficientwise conjugate (the L-polynomial of `ψ̄`).
    pub fn conj(&self) -> Self {
        LPoly { coeffs: self.coeffs.iter().map(|c| c.conj()).collect(), ..self.clone() }
    }
}

/// L-polynomial of `f` for `ψ_a`, from direct character sums over
/// `F_{q^r}`, `r < deg f`.
pub fn l_polynomial(f: &PolyFq, p: u32, n: u32, a: u32, cap: u64) -> Result<LPoly> {
    check_psi(p, a)?;
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    if d % p as usize == 0 {
        return Err(Error::InvalidParameters(format!("p = {p} divides deg f = {d}")));
    }
    let sums = (1..d as u32).map(|r| char_sum(f, a, &FieldTower::new(p, n, r, cap)?)).collect::<Result<Vec<_>>>()?;
    LPoly::from_sums(&sums, p, (p as u64).pow(n), d)
}

/// `T^r = -q^{-r/2} S_r` as an exact value.
pub fn trace_power_exact(s_r: &CycloElem, r: i32, q: u64) -> ExactValue {
    ExactValue::new(-s_r, 1, -r, q).expect("unit denominator")
}

/// Zeros of an L-polynomial with their normalised forms.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    /// `z_i` with `L(z_i) = 0`, ordered by angle.
    pub zeros: Vec<Complex64>,
    /// `ρ_i = (q^{1/2} z_i)^{-1}`.
    pub rho: Vec<Complex64>,
    /// `arg ρ_i ∈ [0, 2π)`, ascending.
    pub theta: Vec<f64>,
    /// Every `| |ρ_i| - 1 | ≤ 1e-8`.
    pub rh_ok: bool,
    /// `max |L(z_i)| / max |c_k|`.
    pub residual: f64,
}

impl ZeroSet {
    /// `T^r = Σ ρ_i^r` for any integer `r`.
    pub fn trace_power(&self, r: i64) -> Complex64 {
        self.rho.iter().map(|z| z.powi(r as i32)).sum()
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

pub const RH_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Roots from the complex Schur form of the companion matrix of the reversed
/// (monic) polynomial, then Newton steps kept only while they reduce `|P|`.
pub fn zeros(l: &LPoly) -> Result<ZeroSet> {
    let c = l.complex_coeffs();
    zeros_of(&c, l.q)
}

/// [`zeros`] for arbitrary complex coefficients with `c_0 = 1`.
/// Aberth-Ehrlich simultaneous iteration for the roots of the monic
/// polynomial with coefficients `monic` (highest degree first).
fn aberth(monic: &[Complex64], mut w: Vec<Complex64>) -> Vec<Complex64> {
    let eval = |b: Complex64| {
        let mut val = Complex64::new(1.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        for &a in &monic[1..] {
            der = der * b + val;
            val = val * b + a;
        }
        (val, der)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..w.len() {
            let (v, dv) = eval(w[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..w.len()).filter(|&j| j != i).map(|j| (w[i] - w[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            w[i] -= step;
            moved = moved.max(step.norm() / w[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    w
}

/// A root of multiplicity `m` comes out as `m` points scattered by about
/// `ε^{1/m}` around it; their centroid is accurate to `O(ε)` and is polished
/// further by Newton on `P^{(m-1)}`, where the root is simple.
fn merge_clusters(monic: &[Complex64], betas: &[Complex64]) -> Vec<Complex64> {
    const CLUSTER_TOL: f64 = 1e-4;
    let n = betas.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (betas[i] - betas[j]).norm() <= CLUSTER_TOL * betas[i].norm().max(1.0) {
                let (old, new) = (label[i], label[j]);
                label.iter_mut().filter(|l| **l == old).for_each(|l| *l = new);
            }
        }
    }
    let mut out = betas.to_vec();
    for root in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| label[i] == root).collect();
        let m = members.len();
        if m < 2 {
            continue;
        }
        let mut b: Complex64 = members.iter().map(|&i| betas[i]).sum::<Complex64>() / m as f64;
        // coefficients of P^{(m-1)}, highest degree first
        let deg = monic.len() - 1;
        let mut d: Vec<Complex64> = monic.to_vec();
        for k in 0..m - 1 {
            let cur = deg - k;
            d = d[..cur].iter().enumerate().map(|(i, &a)| a * (cur - i) as f64).collect();
        }
        let eval = |x: Complex64| {
            let mut val = Complex64::new(0.0, 0.0);
            let mut der = Complex64::new(0.0, 0.0);
            for &a in &d {
                der = der * x + val;
                val = val * x + a;
            }
            (val, der)
        };
        let start = b;
        for _ in 0..8 {
            let (v, dv) = eval(b);
            if dv.norm() == 0.0 || v.norm() == 0.0 {
                break;
            }
            b -= v / dv;
        }
        if (b - start).norm() > CLUSTER_TOL * start.norm().max(1.0) {
            b = start;
        }
        for &i in &members {
            out[i] = b;
        }
    }
    out
}

pub fn zeros_of(c: &[Complex64], q: u64) -> Result<ZeroSet> {
    let deg = c.iter().rposition(|z| z.norm() != 0.0).unwrap_or(0);
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sq = (q as f64).sqrt();
    if deg == 0 {
        return Ok(ZeroSet { zeros: vec![], rho: vec![], theta: vec![], rh_ok: true, residual: 0.0 });
    }
    // P(β) = β^deg + c_1 β^{deg-1} + … + c_deg, its roots are the 1/z_i
    let lead = c[0];
    let monic: Vec<Complex64> = c[..=deg].iter().map(|&x| x / lead).collect();
    let mut comp = DMatrix::<Complex64>::zeros(deg, deg);
    for k in 0..deg {
        comp[(0, k)] = -monic[k + 1];
        if k + 1 < deg {
            comp[(k + 1, k)] = Complex64::new(1.0, 0.0);
        }
    }
    let schur = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 10_000);
    let eval_p = |b: Complex64| {
        let mut val = Complex64::new(1.0, 0.0);
        let mut der = Complex64::new(0.0, 0.0);
        for &a in &monic[1..] {
            der = der * b + val;
            val = val * b + a;
        }
        (val, der)
    };
    let polish = |b: Complex64| {
        let mut b = b;
        let mut cur = eval_p(b).0.norm();
        for _ in 0..4 {
            let (v, dv) = eval_p(b);
            if dv.norm() == 0.0 {
                break;
            }
            let nb = b - v / dv;
            let nv = eval_p(nb).0.norm();
            if nv < cur {
                b = nb;
                cur = nv;
            } else {
                break;
            }
        }
        b
    };
    let residual_of = |betas: &[Complex64]| {
        betas
            .iter()
            .map(|b| b.inv())
            .map(|z| c[..=deg].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a).norm())
            .fold(0.0, f64::max)
            / scale
    };
    let mut betas: Vec<Complex64> = match schur {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..deg).map(|i| polish(t[(i, i)])).collect()
        }
        None => vec![],
    };
    // QR can stall on near-cyclic companion matrices such as that of β^n + c
    if betas.is_empty() || !residual_of(&betas).is_finite() || residual_of(&betas) > RESIDUAL_TOL {
        let start: Vec<Complex64> = (0..deg)
            .map(|k| Complex64::from_polar(sq, 2.0 * std::f64::consts::PI * (k as f64 + 0.4) / deg as f64))
            .collect();
        betas = aberth(&monic, start).into_iter().map(polish).collect();
    }
    let merged = merge_clusters(&monic, &betas);
    if residual_of(&merged) <= residual_of(&betas).max(RESIDUAL_TOL) {
        betas = merged;
    }
    let angle = |b: &Complex64| b.arg().rem_euclid(2.0 * std::f64::consts::PI);
    betas.sort_by(|x, y| angle(x).total_cmp(&angle(y)));
    let zeros: Vec<Complex64> = betas.iter().map(|b| b.inv()).collect();
    let residual = residual_of(&betas);
    if residual.is_nan() || residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence(deg));
    }
    let rho: Vec<Complex64> = betas.iter().map(|b| b / sq).collect();
    let theta: Vec<f64> = betas.iter().map(angle).collect();
    let rh_ok = rho.iter().all(|z| (z.norm() - 1.0).abs() <= RH_TOL);
    Ok(ZeroSet { zeros, rho, theta, rh_ok, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_tower;

    fn poly(c: &[u32]) -> PolyFq {
        PolyFq::new(c.to_vec())
    }

    #[test]
    fn small_sums() {
        let t = build_tower(3, 1, 1).unwrap();
        assert!(char_sum(&poly(&[0, 1]), 1, &t).unwrap().is_zero());
        let f = poly(&[0, 1, 0, 1]);
        let t1 = build_tower(2, 1, 1).unwrap();
        let t2 = build_tower(2, 1, 2).unwrap();
        assert_eq!(char_sum(&f, 1, &t1).unwrap(), CycloElem::from_int(2, 2));
        assert!(char_sum(&f, 1, &t2).unwrap().is_zero());
        assert_eq!(char_sum(&f, 2, &t1).unwrap_err(), Error::TrivialCharacter);
    }

    #[test]
    fn lpoly_examples() {
        let f = poly(&[0, 1, 0, 1]);
        let l = l_polynomial(&f, 2, 1, 1, 1 << 20).unwrap();
        let c: Vec<Option<i128>> = l.coeffs().iter().map(|c| c.as_integer()).collect();
        assert_eq!(c, vec![Some(1), Some(2), Some(2)]);
        let z = zeros(&l).unwrap();
        assert!(z.rh_ok);
        // z = (-1 ± i)/2, so ρ = (-1 ∓ i)/√2
        let eighth = std::f64::consts::FRAC_PI_4;
        assert!((z.theta[0] - 3.0 * eighth).abs() < 1e-12 && (z.theta[1] - 5.0 * eighth).abs() < 1e-12);
        assert!((z.trace_power(1).re + 2f64.sqrt()).abs() < 1e-12);

        let one = l_polynomial(&poly(&[0, 1]), 2, 1, 1, 16).unwrap();
        assert_eq!(one.degree(), 0);
        assert!(zeros(&one).unwrap().is_empty());
    }

    #[test]
    fn double_root_is_reported_twice() {
        let s = 3f64.sqrt();
        let c = [Complex64::new(1.0, 0.0), Complex64::new(-2.0 * s, 0.0), Complex64::new(3.0, 0.0)];
        let z = zeros_of(&c, 3).unwrap();
        assert_eq!(z.len(), 2);
        for w in &z.zeros {
            assert!((w - Complex64::new(1.0 / s, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn newton_power_sums_match_direct_sums() {
        let f = poly(&[0, 2, 1, 0, 1]);
        let l = l_polynomial(&f, 3, 1, 1, 1 << 20).unwrap();
        let s = l.power_sums(7).unwrap();
        for r in 1..=7u32 {
            let t = build_tower(3, 1, r).unwrap();
            assert_eq!(s[r as usize - 1], char_sum(&f, 1, &t).unwrap(), "r = {r}");
        }
        let conj = l_polynomial(&f, 3, 1, 2, 1 << 20).unwrap();
        assert_eq!(conj, l.conj());
    }

    #[test]
    fn transform_matches_per_member_sums() {
        for (spec, r) in [
            (FamilySpec::full(3, 1, 4).unwrap(), 2),
            (FamilySpec::full(3, 2, 4).unwrap(), 2),
            (FamilySpec::full(2, 1, 5).unwrap(), 3),
            (FamilySpec::odd(5, 1, 3).unwrap(), 1),
            (FamilySpec::monic(2, 1, 3).unwrap(), 2),
        ] {
            let t = FieldTower::new(spec.p, spec.n, r, 1 << 20).unwrap();
            let bulk = family_char_sums(&spec, &t, 1 << 20).unwrap();
            for (k, f) in spec.enumerate(1 << 20).unwrap().enumerate() {
                assert_eq!(bulk[k], char_sum(&f, 1, &t).unwrap());
                assert_eq!(bulk[k], char_sum_naive(&f, 1, &t).unwrap());
            }
        }
    }
}
