//! Family averages of Frobenius traces and their products, with closed-form
//! oracles, and the one- and two-level window statistics.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::algebra::arith::{divisors, e_pr, gcd};
use crate::algebra::{count_irreducibles, CycloElem, FieldTower, Fq, IrreducibleCache};
use crate::exact::ExactValue;
use crate::families::{FamilyKind, FamilySpec};
use crate::lfunction::{family_char_sums, zeros, LPoly, ZeroSet};
use crate::{Error, Result};

/// Every `S_r(f, ψ_1)`, `1 ≤ r ≤ r_max`, for every member of a family.
#[derive(Debug, Clone)]
pub struct FamilyData {
    pub spec: FamilySpec,
    sums: Vec<Vec<CycloElem>>,
}

impl FamilyData {
    /// Direct character sums over `F_{q^r}` for each `r ≤ r_max`.
    pub fn compute(spec: FamilySpec, r_max: usize, cap: u64) -> Result<Self> {
        let fq = Fq::new(spec.p, spec.n)?;
        let mut sums = Vec::with_capacity(r_max);
        for r in 1..=r_max {
            let tower = FieldTower::over(fq.clone(), r as u32, cap)?;
            sums.push(family_char_sums(&spec, &tower, cap)?);
        }
        Ok(FamilyData { spec, sums })
    }

    /// Sums up to `d - 1`, enough for every L-polynomial.
    pub fn for_lpolys(spec: FamilySpec, cap: u64) -> Result<Self> {
        Self::compute(spec, spec.d.saturating_sub(1), cap)
    }

    pub fn r_max(&self) -> usize {
        self.sums.len()
    }

    pub fn len(&self) -> usize {
        self.sums.first().map_or_else(|| self.spec.size() as usize, |s| s.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn q(&self) -> u64 {
        self.spec.q()
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    /// `S_r(f_k, ψ_a)`.
    pub fn sum(&self, r: usize, k: usize, a: u32) -> CycloElem {
        let s = &self.sums[r - 1][k];
        if a == 1 {
            s.clone()
        } else {
            s.galois(a)
        }
    }

    pub fn lpoly(&self, k: usize, a: u32) -> Result<LPoly> {
        let d = self.spec.d;
        if self.r_max() + 1 < d {
            return Err(Error::InvalidParameters(format!("L-polynomials need sums up to r = {}", d - 1)));
        }
        let s: Vec<CycloElem> = (1..d).map(|r| self.sum(r, k, a)).collect();
        LPoly::from_sums(&s, self.p(), self.q(), d)
    }

    /// Appends `S_r` for `r_max < r ≤ target` recovered exactly from each
    /// L-polynomial.
    pub fn extend_newton(&mut self, target: usize) -> Result<()> {
        if target <= self.r_max() {
            return Ok(());
        }
        let per_f = (0..self.len())
            .into_par_iter()
            .map(|k| self.lpoly(k, 1)?.power_sums(target))
            .collect::<Result<Vec<_>>>()?;
        for r in self.r_max() + 1..=target {
            self.sums.push(per_f.iter().map(|s| s[r - 1].clone()).collect());
        }
        Ok(())
    }

    pub fn zero_sets(&self, a: u32) -> Result<Vec<ZeroSet>> {
        (0..self.len()).into_par_iter().map(|k| zeros(&self.lpoly(k, a)?)).collect()
    }

    /// `Σ_f S_r(f, ψ_a)`.
    pub fn total(&self, r: usize, a: u32) -> CycloElem {
        let t = self.sums[r - 1].iter().fold(CycloElem::zero(self.p()), |acc, s| acc + s.clone());
        if a == 1 {
            t
        } else {
            t.galois(a)
        }
    }
}

/// Which product a pair moment averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairSign {
    /// `T^r T^s`
    Plus,
    /// `T^r T̄^s = T^r T^{-s}`
    Minus,
}

impl std::str::FromStr for PairSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(PairSign::Plus),
            "-" | "minus" => Ok(PairSign::Minus),
            _ => Err(Error::InvalidParameters(format!("pair sign must be + or -, got {s:?}"))),
        }
    }
}

impl std::fmt::Display for PairSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PairSign::Plus => "+",
            PairSign::Minus => "-",
        })
    }
}

/// A family average with its closed-form prediction.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub r: i64,
    pub s: Option<(i64, PairSign)>,
    /// `Σ_f` of the unnormalised sum (`S_r` or `S_r S_s^{(±)}`).
    pub total: CycloElem,
    pub exact: ExactValue,
    pub value: f64,
    pub oracle: Option<ExactValue>,
}

impl MomentReport {
    pub fn oracle_value(&self) -> Option<f64> {
        self.oracle.as_ref().map(|o| o.to_f64())
    }

    pub fn abs_error(&self) -> Option<f64> {
        self.oracle_value().map(|o| (o - self.value).abs())
    }

    /// Exact agreement with the oracle, when there is one.
    pub fn matches_oracle(&self) -> Option<bool> {
        self.oracle.as_ref().map(|o| *o == self.exact)
    }
}

/// `#F_d (e q^{r/p} - e + 1)`, the exact value of `Σ_f S_r(f)` for `r < d`.
pub fn corollary_total(spec: &FamilySpec, r: usize) -> i128 {
    let e = e_pr(spec.p as u64, r as u64) as i128;
    let q_rp = if e == 1 { (spec.q() as i128).pow((r / spec.p as usize) as u32) } else { 0 };
    spec.size() as i128 * (e * q_rp - e + 1)
}

/// `M^r = ⟨T^r⟩ = -q^{-r/2} ⟨S_r⟩` over the family, with the η-count oracle for
/// the full family.
pub fn avg_trace(data: &FamilyData, a: u32, r: usize, cache: &mut IrreducibleCache) -> Result<MomentReport> {
    if r == 0 || r > data.r_max() {
        return Err(Error::InvalidParameters(format!("r = {r} outside 1..={}", data.r_max())));
    }
    let total = data.total(r, a);
    let exact = ExactValue::new(-total.clone(), data.len() as i128, -(r as i32), data.q())?;
    let oracle = match data.spec.kind {
        FamilyKind::Full => Some(prop_irr_oracle(data.spec.d, r, cache)?),
        _ => None,
    };
    Ok(MomentReport { r: r as i64, s: None, total, value: exact.to_f64(), exact, oracle })
}

/// Numbers of monic irreducibles of degree `s` whose coefficients
/// `c_{s-k}` vanish for `1 ≤ k < d`, `p ∤ k` (`η_d(s)`), and additionally
/// `c_{s-d} = 0` (`η⁰_d(s)`, set to 0 when `s = d`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtaCounts {
    pub d: usize,
    pub s: usize,
    pub eta: u64,
    pub eta0: u64,
}

pub fn eta_counts(d: usize, s: usize, cache: &mut IrreducibleCache) -> Result<EtaCounts> {
    let p = cache.fq().p() as usize;
    let constrained: Vec<usize> = (1..d).filter(|k| k % p != 0 && *k <= s).map(|k| s - k).collect();
    let mut eta = 0;
    let mut eta0 = 0;
    for h in cache.degree(s)? {
        if constrained.iter().all(|&i| h.coeff(i) == 0) {
            eta += 1;
            if s > d && h.coeff(s - d) == 0 {
                eta0 += 1;
            }
        }
    }
    Ok(EtaCounts { d, s, eta, eta0 })
}

/// `q^{-r/2} [ q/(q-1) Σ_{s|r, p∤r/s, s≥d} s(η_d(s)/q - η⁰_d(s)) - e q^{r/p} + e - 1 ]`,
/// the exact average of `T^r` over the full family for any `r ≥ 1`.
pub fn prop_irr_oracle(d: usize, r: usize, cache: &mut IrreducibleCache) -> Result<ExactValue> {
    let fq = cache.fq().clone();
    let (p, q) = (fq.p() as u64, fq.q() as i128);
    let e = e_pr(p, r as u64) as i128;
    let mut inner = Ratio::from_integer(0i128);
    for s in divisors(r as u64) {
        let s = s as usize;
        if s < d || (r / s) as u64 % p == 0 {
            continue;
        }
        let c = eta_counts(d, s, cache)?;
        inner += Ratio::new(s as i128 * (c.eta as i128 - q * c.eta0 as i128), q - 1);
    }
    let q_rp = if e == 1 { q.pow((r as u64 / p) as u32) } else { 0 };
    let bracket = inner - Ratio::from_integer(e * q_rp - e + 1);
    Ok(ExactValue::from_ratio(fq.p(), q as u64, bracket, -(r as i32)))
}

/// `⟨T^r T^{±s}⟩` over the family from exact sums, with the closed-form
/// oracle when `r + s < d` and the family is full.
pub fn avg_pair(data: &FamilyData, a: u32, r: usize, s: usize, sign: PairSign) -> Result<MomentReport> {
    if r == 0 || s == 0 || r.max(s) > data.r_max() {
        return Err(Error::InvalidParameters(format!("r, s must lie in 1..={}", data.r_max())));
    }
    let total = (0..data.len())
        .map(|k| {
            let sr = data.sum(r, k, a);
            let ss = data.sum(s, k, a);
            match sign {
                PairSign::Plus => sr * ss,
                PairSign::Minus => sr * ss.conj(),
            }
        })
        .fold(CycloElem::zero(data.p()), |acc, x| acc + x);
    let exact = ExactValue::new(total.clone(), data.len() as i128, -((r + s) as i32), data.q())?;
    let oracle = (data.spec.kind == FamilyKind::Full && r + s < data.spec.d)
        .then(|| pair_oracle(data.spec.p, data.q(), r, s, sign));
    Ok(MomentReport { r: r as i64, s: Some((s as i64, sign)), total, value: exact.to_f64(), exact, oracle })
}

/// `q^{-(r+s)/2}` times
/// `Σ_{m | gcd(r,s), mp | r∓s, mp ∤ r} π*(m) m² + e_r e_s q^{(r+s)/p}
///  + (1-e_r) e_s q^{s/p} + (1-e_s) e_r q^{r/p} + (1-e_r)(1-e_s)`,
/// valid for `r + s < d`. `π*(m)` counts monic irreducibles of degree `m`
/// other than `x`: the pair `α = β = 0` belongs to the last term only.
pub fn pair_oracle(p: u32, q: u64, r: usize, s: usize, sign: PairSign) -> ExactValue {
    let p64 = p as u64;
    let diff: i64 = match sign {
        PairSign::Minus => r as i64 - s as i64,
        PairSign::Plus => (r + s) as i64,
    };
    let mut bracket: i128 = divisors(gcd(r as u64, s as u64))
        .into_iter()
        .filter(|&m| diff % (m * p64) as i64 == 0 && r as u64 % (m * p64) != 0)
        .map(|m| (count_irreducibles(m as u32, q) as i128 - (m == 1) as i128) * (m * m) as i128)
        .sum();
    let er = e_pr(p64, r as u64) as i128;
    let es = e_pr(p64, s as u64) as i128;
    let qi = q as i128;
    let qp = |k: usize| if k as u64 % p64 == 0 { qi.pow((k as u64 / p64) as u32) } else { 0 };
    bracket += er * es * qp(r + s) + (1 - er) * es * qp(s) + (1 - es) * er * qp(r) + (1 - er) * (1 - es);
    ExactValue::from_ratio(p, q, Ratio::from_integer(bracket), -((r + s) as i32))
}

/// The Fejér window `V(t) = (sin(at)/(at))²`.
pub fn fejer_window(a: f64, t: f64) -> f64 {
    let x = a * t;
    if x.abs() < 1e-8 {
        1.0 - x * x / 3.0
    } else {
        (x.sin() / x).powi(2)
    }
}

/// `V̂(s) = (1/2π)∫V(t)e^{-ist}dt = (1/2a) max(0, 1 - |s|/2a)`.
pub fn fejer_hat(a: f64, s: f64) -> f64 {
    (1.0 - s.abs() / (2.0 * a)).max(0.0) / (2.0 * a)
}

/// A Fejér window with its shift and scaling parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub a: f64,
    pub theta: f64,
    pub scale: usize,
}

impl WindowSpec {
    pub fn new(a: f64, theta: f64, scale: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameters(format!("window parameter a must be positive, got {a}")));
        }
        if scale == 0 {
            return Err(Error::InvalidParameters("window scale must be >= 1".into()));
        }
        Ok(WindowSpec { a, theta, scale })
    }

    pub fn hat(&self, s: f64) -> f64 {
        fejer_hat(self.a, s)
    }

    /// Fourier coefficient of the periodised window at frequency `r`,
    /// `V̂(r/N)/N`.
    pub fn coefficient(&self, r: i64) -> f64 {
        self.hat(r as f64 / self.scale as f64) / self.scale as f64
    }

    /// Largest `r` with a nonzero coefficient.
    pub fn max_frequency(&self) -> usize {
        let bound = 2.0 * self.a * self.scale as f64;
        let r = bound.ceil() as usize;
        if r as f64 >= bound {
            r.saturating_sub(1)
        } else {
            r
        }
    }

    /// `v_N(t) = Σ_n V(N(t + 2πn))`, by closed form when `2aN` is an integer
    /// and otherwise by its finite Fourier series.
    pub fn periodized(&self, t: f64) -> f64 {
        let n = self.scale as f64;
        let m = 2.0 * self.a * n;
        if (m - m.round()).abs() < 1e-12 {
            let half = (t / 2.0).sin();
            if half.abs() < 1e-9 {
                let tt = t - (2.0 * PI) * (t / (2.0 * PI)).round();
                return fejer_window(self.a * n, tt);
            }
            let num = (self.a * n * t).sin();
            return (num * num) / (m * m * half * half);
        }
        let mut acc = self.coefficient(0);
        for r in 1..=self.max_frequency() as i64 {
            acc += 2.0 * self.coefficient(r) * (r as f64 * t).cos();
        }
        acc
    }
}

fn check_one_level_support(w: &WindowSpec, p: u32) -> Result<()> {
    let limit = 2.0 - 2.0 / p as f64;
    if 2.0 * w.a >= limit {
        return Err(Error::SupportViolation(format!("2a = {} must be below 2 - 2/p = {limit}", 2.0 * w.a)));
    }
    Ok(())
}

/// One-level statistic over a family.
#[derive(Debug, Clone)]
pub struct WindowReport {
    /// `Σ_j v_{d,θ}(θ_j)` from the zeros, per member.
    pub zero_side: Vec<f64>,
    /// The same from the trace expansion with exact `T^r`, per member.
    pub fourier_side: Vec<f64>,
    pub mean_zero_side: f64,
    /// The family average from the exact `M^r`.
    pub mean_exact: f64,
    /// As `mean_exact` but with constant term `V̂(0)` in place of `(d-1)V̂(0)/d`.
    pub mean_exact_leading: f64,
    pub max_route_diff: f64,
    pub target: f64,
}

/// `T^r` for `r ≥ 1` as a complex number from an exact sum.
fn trace_from_sum(s: &CycloElem, r: usize, q: u64) -> Complex64 {
    -s.embed_complex() * (q as f64).powf(-(r as f64) / 2.0)
}

pub fn window_stat(data: &mut FamilyData, a: u32, window: &WindowSpec) -> Result<WindowReport> {
    check_one_level_support(window, data.p())?;
    let d = data.spec.d;
    let q = data.q();
    let r_top = window.max_frequency();
    data.extend_newton(r_top.max(d.saturating_sub(1)))?;
    let zsets = data.zero_sets(a)?;
    let theta = window.theta;
    let coef = |r: i64| window.coefficient(r);
    let c0 = coef(0) * (d as f64 - 1.0);
    let zero_side: Vec<f64> =
        zsets.iter().map(|z| z.theta.iter().map(|&t| window.periodized(t - theta)).sum()).collect();
    let fourier_side: Vec<f64> = (0..data.len())
        .into_par_iter()
        .map(|k| {
            let mut acc = c0;
            for r in 1..=r_top {
                let t = trace_from_sum(&data.sum(r, k, a), r, q);
                let phase = Complex64::from_polar(1.0, -(r as f64) * theta);
                acc += coef(r as i64) * (phase * t).re + coef(-(r as i64)) * (phase.conj() * t.conj()).re;
            }
            acc
        })
        .collect();
    let n = data.len() as f64;
    let mean_zero_side = zero_side.iter().sum::<f64>() / n;
    let mut oscill = 0.0;
    for r in 1..=r_top {
        let m = ExactValue::new(-data.total(r, a), data.len() as i128, -(r as i32), q)?.to_complex();
        let phase = Complex64::from_polar(1.0, -(r as f64) * theta);
        oscill += coef(r as i64) * (phase * m).re + coef(-(r as i64)) * (phase.conj() * m.conj()).re;
    }
    let max_route_diff = zero_side.iter().zip(&fourier_side).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(WindowReport {
        zero_side,
        fourier_side,
        mean_zero_side,
        mean_exact: c0 + oscill,
        mean_exact_leading: window.hat(0.0) + oscill,
        max_route_diff,
        target: window.hat(0.0),
    })
}

/// A product window `V(t,u) = V_1(t) V_2(u)` of two Fejér windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairWindow {
    pub first: WindowSpec,
    pub second: WindowSpec,
}

impl PairWindow {
    pub fn new(a1: f64, a2: f64, theta: f64, scale: usize) -> Result<Self> {
        Ok(PairWindow { first: WindowSpec::new(a1, theta, scale)?, second: WindowSpec::new(a2, theta, scale)? })
    }

    fn check_support(&self) -> Result<()> {
        if self.first.a + self.second.a > 0.5 + 1e-15 {
            return Err(Error::SupportViolation(format!("a1 + a2 = {} exceeds 1/2", self.first.a + self.second.a)));
        }
        Ok(())
    }

    /// `Σ_{j≠k} v(θ_j - θ, θ_k - θ)` directly from angles.
    pub fn pair_statistic(&self, angles: &[f64]) -> f64 {
        let theta = self.first.theta;
        let v1: Vec<f64> = angles.iter().map(|&t| self.first.periodized(t - theta)).collect();
        let v2: Vec<f64> = angles.iter().map(|&t| self.second.periodized(t - theta)).collect();
        let s1: f64 = v1.iter().sum();
        let s2: f64 = v2.iter().sum();
        s1 * s2 - v1.iter().zip(&v2).map(|(x, y)| x * y).sum::<f64>()
    }

    /// The same statistic from traces: `T(r)` must return `T^r` for
    /// `|r| ≤ 2R`, with `T(0) = N`.
    pub fn pair_statistic_from_traces(&self, trace: impl Fn(i64) -> Complex64) -> f64 {
        let big_r = self.first.max_frequency().max(self.second.max_frequency()) as i64;
        let theta = self.first.theta;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in -big_r..=big_r {
            for s in -big_r..=big_r {
                let c = self.first.coefficient(r) * self.second.coefficient(s);
                if c == 0.0 {
                    continue;
                }
                let phase = Complex64::from_polar(1.0, -((r + s) as f64) * theta);
                acc += c * phase * (trace(r) * trace(s) - trace(r + s));
            }
        }
        acc.re
    }

    /// `V̂(0,0) - ∫ V̂(σ,-σ) K(σ) dσ` with `K(σ) = max(1 - |σ|, 0)`,
    /// integrated piecewise by Simpson's rule (exact on the polynomial pieces).
    pub fn sine_kernel_prediction(&self) -> f64 {
        let (a1, a2) = (self.first.a, self.second.a);
        let f = |s: f64| fejer_hat(a1, s) * fejer_hat(a2, -s) * (1.0 - s.abs()).max(0.0);
        let mut breaks = vec![0.0, 2.0 * a1, 2.0 * a2, 1.0];
        breaks.retain(|&b| b <= (2.0 * a1).min(2.0 * a2).min(1.0) + 1e-15);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut integral = 0.0;
        for w in breaks.windows(2) {
            integral += 2.0 * simpson(&f, w[0], w[1], 64);
        }
        fejer_hat(a1, 0.0) * fejer_hat(a2, 0.0) - integral
    }

    /// `(1/4π²) ∬ V_1(t) V_2(u) (sin((t-u)/2)/((t-u)/2))² dt du` on the lattice
    /// `hZ²`, `|t|,|u| ≤ extent`. The integrand is band-limited, so the
    /// lattice sum is exact apart from the (cubically small) truncation.
    pub fn sine_kernel_lattice(&self, h: f64, extent: f64) -> f64 {
        let (a1, a2) = (self.first.a, self.second.a);
        let n = (extent / h).ceil() as i64;
        let v1: Vec<f64> = (-n..=n).map(|i| fejer_window(a1, i as f64 * h)).collect();
        let v2: Vec<f64> = (-n..=n).map(|i| fejer_window(a2, i as f64 * h)).collect();
        let len = v1.len();
        let kernel = |k: i64| {
            let x = k as f64 * h / 2.0;
            if k == 0 {
                1.0
            } else {
                (x.sin() / x).powi(2)
            }
        };
        let mut total = 0.0;
        for k in -(len as i64 - 1)..=(len as i64 - 1) {
            let mut corr = 0.0;
            for (i, &x) in v1.iter().enumerate() {
                let j = i as i64 - k;
                if j >= 0 && (j as usize) < len {
                    corr += x * v2[j as usize];
                }
            }
            total += kernel(k) * corr;
        }
        let one = lattice_mass(a1, h) * lattice_mass(a2, h);
        (one - total) * h * h / (4.0 * PI * PI)
    }
}

/// `Σ_{i∈Z} V(ih)`: a long sum plus the `Σ_{i>n} 1/(2(ahi)²)` tail, which is
/// the mean of `sin²`; the oscillating remainder is `O(n^{-2})`.
fn lattice_mass(a: f64, h: f64) -> f64 {
    let n = 2_000_000u64;
    let body: f64 = (1..=n).map(|i| fejer_window(a, i as f64 * h)).sum();
    let nf = n as f64;
    let tail = (1.0 / nf - 1.0 / (2.0 * nf * nf)) / (2.0 * (a * h).powi(2));
    1.0 + 2.0 * (body + tail)
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Two-level statistic over a family.
#[derive(Debug, Clone)]
pub struct TwoLevelReport {
    pub per_f: Vec<f64>,
    pub empirical: f64,
    /// The average from exact `M^{r,s}` and `M^{r+s}`.
    pub fourier_exact: f64,
    pub max_route_diff: f64,
    pub prediction: f64,
    pub prediction_lattice: f64,
}

pub fn two_level_stat(data: &mut FamilyData, a: u32, window: &PairWindow) -> Result<TwoLevelReport> {
    window.check_support()?;
    let d = data.spec.d;
    let n_zeros = d.saturating_sub(1);
    if window.first.scale != n_zeros || window.second.scale != n_zeros {
        return Err(Error::InvalidParameters("two-level windows use scaling parameter d - 1".into()));
    }
    let q = data.q();
    let big_r = window.first.max_frequency().max(window.second.max_frequency());
    data.extend_newton((2 * big_r).max(n_zeros))?;
    let zsets = data.zero_sets(a)?;
    let per_f: Vec<f64> = zsets.iter().map(|z| window.pair_statistic(&z.theta)).collect();
    let fourier: Vec<f64> = (0..data.len())
        .into_par_iter()
        .map(|k| {
            let t = |r: i64| match r {
                0 => Complex64::new(n_zeros as f64, 0.0),
                r if r > 0 => trace_from_sum(&data.sum(r as usize, k, a), r as usize, q),
                r => trace_from_sum(&data.sum((-r) as usize, k, a), (-r) as usize, q).conj(),
            };
            window.pair_statistic_from_traces(t)
        })
        .collect();
    let size = data.len() as f64;
    let empirical = per_f.iter().sum::<f64>() / size;
    let max_route_diff = per_f.iter().zip(&fourier).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    // exact family moments ⟨T^r T^s⟩ and ⟨T^r⟩
    let signed = |r: i64, k: usize| {
        if r > 0 {
            data.sum(r as usize, k, a)
        } else {
            data.sum((-r) as usize, k, a).conj()
        }
    };
    let big_r = big_r as i64;
    let mut m1 = std::collections::HashMap::new();
    for r in 1..=2 * big_r {
        let v = ExactValue::new(-data.total(r as usize, a), data.len() as i128, -(r as i32), q)?.to_complex();
        m1.insert(r, v);
        m1.insert(-r, v.conj());
    }
    m1.insert(0, Complex64::new(n_zeros as f64, 0.0));
    let mut m2 = std::collections::HashMap::new();
    for r in -big_r..=big_r {
        for s in -big_r..=big_r {
            let v = match (r, s) {
                (0, 0) => Complex64::new((n_zeros * n_zeros) as f64, 0.0),
                (0, s) => m1[&s] * n_zeros as f64,
                (r, 0) => m1[&r] * n_zeros as f64,
                (r, s) => {
                    let total = (0..data.len())
                        .map(|k| signed(r, k) * signed(s, k))
                        .fold(CycloElem::zero(data.p()), |acc, x| acc + x);
                    ExactValue::new(total, data.len() as i128, -((r.abs() + s.abs()) as i32), q)?.to_complex()
                }
            };
            m2.insert((r, s), v);
        }
    }
    let theta = window.first.theta;
    let mut fourier_exact = Complex64::new(0.0, 0.0);
    for r in -big_r..=big_r {
        for s in -big_r..=big_r {
            let c = window.first.coefficient(r) * window.second.coefficient(s);
            let phase = Complex64::from_polar(1.0, -((r + s) as f64) * theta);
            fourier_exact += c * phase * (m2[&(r, s)] - m1[&(r + s)]);
        }
    }
    Ok(TwoLevelReport {
        per_f,
        empirical,
        fourier_exact: fourier_exact.re,
        max_route_diff,
        prediction: window.sine_kernel_prediction(),
        prediction_lattice: window.sine_kernel_lattice(2.0, 4000.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fejer_transform_matches_quadrature() {
        for a in [0.5, 0.25, 0.8] {
            // (1/2π)∫V(t)cos(st)dt by the band-limited lattice rule, step 1;
            // the truncated tail is below 1/(2π a² n)
            let quad = |s: f64| {
                let n = 4_000_000;
                let mut acc = fejer_window(a, 0.0);
                for i in 1..=n {
                    let t = i as f64;
                    acc += 2.0 * fejer_window(a, t) * (s * t).cos();
                }
                acc / (2.0 * PI)
            };
            for s in [0.0, 0.3 * a, a, 1.7 * a, 2.5 * a] {
                assert!((quad(s) - fejer_hat(a, s)).abs() < 1e-6, "a={a} s={s}");
            }
        }
        assert_eq!(fejer_hat(0.5, 0.0), 1.0);
        assert_eq!(fejer_hat(0.5, 1.0), 0.0);
    }

    #[test]
    fn periodization_routes_agree() {
        for (a, n) in [(0.5, 8usize), (0.25, 10), (0.3, 7)] {
            let w = WindowSpec::new(a, 0.0, n).unwrap();
            for t in [0.0, 0.1, 1.0, 2.5, -3.0, 6.0] {
                let direct: f64 =
                    (-20000i64..=20000).map(|m| fejer_window(a, n as f64 * (t + 2.0 * PI * m as f64))).sum();
                let mut series = w.coefficient(0);
                for r in 1..=w.max_frequency() as i64 {
                    series += 2.0 * w.coefficient(r) * (r as f64 * t).cos();
                }
                assert!((w.periodized(t) - series).abs() < 1e-12);
                assert!((w.periodized(t) - direct).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn sine_kernel_prediction_quarter_windows() {
        let w = PairWindow::new(0.25, 0.25, 0.0, 10).unwrap();
        assert!((w.sine_kernel_prediction() - 17.0 / 6.0).abs() < 1e-12);
        let lattice = w.sine_kernel_lattice(2.0, 4000.0);
        assert!((lattice - 17.0 / 6.0).abs() < 1e-6, "{lattice}");
    }

    #[test]
    fn pair_oracle_examples() {
        assert_eq!(pair_oracle(3, 3, 1, 1, PairSign::Minus).to_f64(), 1.0);
        let v = pair_oracle(3, 3, 2, 1, PairSign::Minus);
        assert!((v.to_f64() - 3f64.powf(-1.5)).abs() < 1e-15);
        let v = pair_oracle(3, 3, 1, 1, PairSign::Plus);
        assert!((v.to_f64() - 1.0 / 3.0).abs() < 1e-15);
    }
}
