//! The number of trace zeros `N(f) = #{α ∈ F_{q^r} : Tr f(α) = 0}` as `f`
//! runs over all monic polynomials of degree `d`, against its exact model and
//! its Poisson and Gaussian limits.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Normal, Poisson};

use crate::algebra::arith::{checked_pow, divisors, gcd, is_prime};
use crate::algebra::count_irreducibles;
use crate::lfunction::trace_counts;
use crate::rmt::sample_rng;
use crate::{Error, FieldTower, PolyFq, Result};

/// Families up to this size are scanned exhaustively instead of sampled.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointParams {
    pub p: u32,
    pub n: u32,
    pub d: usize,
    pub r: u32,
}

impl PointParams {
    pub fn new(p: u32, n: u32, d: usize, r: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if n == 0 || d == 0 || r == 0 {
            return Err(Error::InvalidParameters("n, d and r must be positive".into()));
        }
        if checked_pow(p as u64, n).is_none() {
            return Err(Error::InvalidParameters(format!("q = {p}^{n} is too large")));
        }
        Ok(PointParams { p, n, d, r })
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.n)
    }

    /// `q^r`, if it fits.
    pub fn qr(&self) -> Option<u64> {
        checked_pow(self.q(), self.r)
    }

    /// `q^d`, if it fits.
    pub fn family_size(&self) -> Option<u64> {
        checked_pow(self.q(), self.d as u32)
    }

    /// The exact model describes `N(f)` only for `d ≥ q^r`.
    pub fn model_applicable(&self) -> bool {
        self.qr().is_some_and(|qr| self.d as u64 >= qr)
    }

    /// The tower `F_p ⊂ F_q ⊂ F_{q^r}` the counts live in.
    pub fn tower(&self, cap: u64) -> Result<FieldTower> {
        FieldTower::new(self.p, self.n, self.r, cap)
    }
}

impl fmt::Display for PointParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={},n={},d={},r={}", self.p, self.n, self.d, self.r)
    }
}

pub fn count_trace_zeros(f: &PolyFq, tower: &FieldTower) -> u64 {
    trace_counts(f, tower)[0] as u64
}

/// `|p·N + 1 - (q^r + 1)| ≤ 2g·q^{r/2}` with `g = (p-1)(d-1)/2`, squared to
/// stay in integers. `None` when `gcd(d, p) > 1`, where the genus formula
/// does not apply.
pub fn weil_check(params: &PointParams, count: u64) -> Option<bool> {
    if gcd(params.d as u64, params.p as u64) != 1 {
        return None;
    }
    let qr = params.qr()? as i128;
    let dev = params.p as i128 * count as i128 - qr;
    let two_g = (params.p as i128 - 1) * (params.d as i128 - 1);
    Some(dev * dev <= two_g * two_g * qr)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistMode {
    Exhaustive,
    Sampled { seed: u64 },
}

impl fmt::Display for HistMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HistMode::Exhaustive => write!(f, "exhaustive"),
            HistMode::Sampled { seed } => write!(f, "sampled({seed})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountHistogram {
    pub params: PointParams,
    pub counts: BTreeMap<u64, u64>,
    pub total: u64,
    pub mode: HistMode,
    /// Members violating the Weil bound; `None` when it does not apply.
    pub weil_violations: Option<u64>,
}

impl CountHistogram {
    pub fn frequency(&self, v: u64) -> u64 {
        self.counts.get(&v).copied().unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        self.counts.iter().map(|(&v, &c)| v as f64 * c as f64).sum::<f64>() / self.total as f64
    }
}

#[derive(Default)]
struct Tally {
    counts: BTreeMap<u64, u64>,
    violations: u64,
}

impl Tally {
    fn add(mut self, params: &PointParams, count: u64) -> Self {
        *self.counts.entry(count).or_insert(0) += 1;
        if weil_check(params, count) == Some(false) {
            self.violations += 1;
        }
        self
    }

    fn merge(mut self, other: Tally) -> Self {
        for (v, c) in other.counts {
            *self.counts.entry(v).or_insert(0) += c;
        }
        self.violations += other.violations;
        self
    }
}

fn finish(params: PointParams, tally: Tally, total: u64, mode: HistMode) -> CountHistogram {
    let weil_violations = (gcd(params.d as u64, params.p as u64) == 1).then_some(tally.violations);
    CountHistogram { params, counts: tally.counts, total, mode, weil_violations }
}

/// Monic `f` whose lower coefficients are the base-`q` digits of `k`.
fn monic_from_index(mut k: u64, q: u64, d: usize) -> PolyFq {
    let mut c = Vec::with_capacity(d + 1);
    for _ in 0..d {
        c.push((k % q) as u32);
        k /= q;
    }
    c.push(1);
    PolyFq::new(c)
}

pub fn random_monic<R: Rng>(q: u64, d: usize, rng: &mut R) -> PolyFq {
    let mut c: Vec<u32> = (0..d).map(|_| rng.random_range(0..q) as u32).collect();
    c.push(1);
    PolyFq::new(c)
}

/// The histogram over every monic `f` of degree `d`.
pub fn exact_distribution(params: PointParams, cap: u64) -> Result<CountHistogram> {
    let size = params
        .family_size()
        .filter(|&s| s <= cap)
        .ok_or_else(|| Error::CapExceeded { size: (params.q() as u128).saturating_pow(params.d as u32), cap })?;
    let tower = params.tower(cap)?;
    let q = params.q();
    let tally = (0..size)
        .into_par_iter()
        .fold(Tally::default, |t, k| t.add(&params, count_trace_zeros(&monic_from_index(k, q, params.d), &tower)))
        .reduce(Tally::default, Tally::merge);
    Ok(finish(params, tally, size, HistMode::Exhaustive))
}

/// `samples` uniform monic `f`, sample `i` drawn from its own stream.
pub fn sampled_distribution(params: PointParams, samples: u64, seed: u64, cap: u64) -> Result<CountHistogram> {
    if samples == 0 {
        return Err(Error::InvalidParameters("samples must be positive".into()));
    }
    let tower = params.tower(cap)?;
    let q = params.q();
    let tally = (0..samples)
        .into_par_iter()
        .fold(Tally::default, |t, i| {
            let f = random_monic(q, params.d, &mut sample_rng(seed, i));
            t.add(&params, count_trace_zeros(&f, &tower))
        })
        .reduce(Tally::default, Tally::merge);
    Ok(finish(params, tally, samples, HistMode::Sampled { seed }))
}

/// Exact law of `shift + Σ_e e·Binomial(π(e), 1/p)`, the sum over `e | r`
/// with `gcd(r/e, p) = 1` and `shift = q^{r/p}` when `p | r`. Stored as
/// integer weights over a common denominator `p^{Σ π(e)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDistribution {
    pub p: u32,
    pub n: u32,
    pub r: u32,
    pub shift: u64,
    /// `weights[k]` is the numerator of `P(N = shift + k)`.
    weights: Vec<BigUint>,
    denominator: BigUint,
}

impl ModelDistribution {
    pub fn probability(&self, v: u64) -> BigRational {
        let w = v.checked_sub(self.shift).and_then(|k| self.weights.get(k as usize)).cloned().unwrap_or_default();
        BigRational::new(BigInt::from(w), BigInt::from(self.denominator.clone()))
    }

    pub fn probability_f64(&self, v: u64) -> f64 {
        self.probability(v).to_f64().unwrap_or(0.0)
    }

    /// Values of positive probability, ascending.
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.weights.iter().enumerate().filter(|(_, w)| !w.is_zero()).map(move |(k, _)| self.shift + k as u64)
    }

    pub fn total_mass(&self) -> BigRational {
        let sum: BigUint = self.weights.iter().sum();
        BigRational::new(sum.into(), self.denominator.clone().into())
    }

    fn raw_moment(&self, k: u32) -> BigRational {
        let sum: BigUint =
            self.weights.iter().enumerate().map(|(i, w)| w * BigUint::from(self.shift + i as u64).pow(k)).sum();
        BigRational::new(sum.into(), self.denominator.clone().into())
    }

    pub fn mean(&self) -> BigRational {
        self.raw_moment(1)
    }

    pub fn variance(&self) -> BigRational {
        let m = self.mean();
        self.raw_moment(2) - &m * &m
    }

    /// `E[g(N)]` in floating point.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.support().map(|v| self.probability_f64(v) * g(v as f64)).sum()
    }
}

/// The divisors `e | r` entering the model, with `π(e)`.
fn model_blocks(p: u32, q: u64, r: u32) -> Vec<(u64, u64)> {
    divisors(r as u64)
        .into_iter()
        .filter(|&e| gcd(r as u64 / e, p as u64) == 1)
        .map(|e| (e, count_irreducibles(e as u32, q) as u64))
        .collect()
}

pub fn model_distribution(p: u32, n: u32, r: u32, cap: u64) -> Result<ModelDistribution> {
    let params = PointParams::new(p, n, 1, r)?;
    let q = params.q();
    let qr =
        params.qr().filter(|&x| x <= cap).ok_or(Error::CapExceeded { size: (q as u128).saturating_pow(r), cap })?;
    let shift = if r % p == 0 { checked_pow(q, r / p).expect("below q^r") } else { 0 };
    let mut weights = vec![BigUint::one()];
    let mut denominator = BigUint::one();
    let pm1 = BigUint::from(p - 1);
    for (e, m) in model_blocks(p, q, r) {
        // C(m, k) (p-1)^{m-k}, k = 0..=m, placed at value e·k
        let mut binom = Vec::with_capacity(m as usize + 1);
        let mut c = BigUint::one();
        for k in 0..=m {
            binom.push(&c * pm1.pow((m - k) as u32));
            c = c * BigUint::from(m - k) / BigUint::from(k + 1);
        }
        let mut next = vec![BigUint::zero(); weights.len() + (e * m) as usize];
        for (i, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for (k, b) in binom.iter().enumerate() {
                next[i + e as usize * k] += w * b;
            }
        }
        weights = next;
        denominator *= BigUint::from(p).pow(m as u32);
    }
    debug_assert!(weights.len() as u64 <= qr + 1);
    Ok(ModelDistribution { p, n, r, shift, weights, denominator })
}

/// `q^r/p + (1 - 1/p) q^{r/p}` when `p | r`, else `q^r/p`.
pub fn model_mean(p: u32, n: u32, r: u32) -> BigRational {
    let q = BigInt::from(p).pow(n);
    let pr = BigInt::from(p);
    let mut m = BigRational::new(q.pow(r), pr.clone());
    if r % p == 0 {
        m += BigRational::new(pr.clone() - 1, pr) * BigRational::from(q.pow(r / p));
    }
    m
}

/// `Σ_e e² π(e) (p-1)/p²` over the same divisors.
pub fn model_variance(p: u32, n: u32, r: u32) -> BigRational {
    let q = (p as u64).pow(n);
    let sum: BigInt = model_blocks(p, q, r).into_iter().map(|(e, m)| BigInt::from(e * e) * BigInt::from(m)).sum();
    BigRational::new(sum * BigInt::from(p - 1), BigInt::from(p as u64 * p as u64))
}

/// Exact equality of an exhaustive histogram with the model.
pub fn histogram_matches_model(hist: &CountHistogram, model: &ModelDistribution) -> bool {
    if hist.mode != HistMode::Exhaustive {
        return false;
    }
    let total = BigRational::from(BigInt::from(hist.total));
    let values: std::collections::BTreeSet<u64> = hist.counts.keys().copied().chain(model.support()).collect();
    values.into_iter().all(|v| BigRational::from(BigInt::from(hist.frequency(v))) == model.probability(v) * &total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `n = r = 1`, `p, d → ∞`: `N(f)` tends to Poisson(1).
    Poisson,
    /// `p` fixed, `n, d → ∞`: Gaussian after centering and scaling.
    GaussianFixedP,
    /// `p, d → ∞` with `n > 1` or `r > 1`: Gaussian.
    GaussianGrowingP,
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" | "t2" => Ok(Regime::Poisson),
            "gaussian_fixed_p" | "t3" => Ok(Regime::GaussianFixedP),
            "gaussian_growing_p" | "t4" => Ok(Regime::GaussianGrowingP),
            _ => Err(Error::InvalidParameters(format!("unknown regime {s:?}"))),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Poisson => "poisson",
            Regime::GaussianFixedP => "gaussian_fixed_p",
            Regime::GaussianGrowingP => "gaussian_growing_p",
        })
    }
}

/// `X = scale·(N - center)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardization {
    pub center: f64,
    pub scale: f64,
}

impl Standardization {
    pub fn apply(&self, count: f64) -> f64 {
        self.scale * (count - self.center)
    }
}

pub fn standardization(regime: Regime, params: &PointParams) -> Result<Standardization> {
    let q = params.q() as f64;
    let (p, r) = (params.p as f64, params.r as f64);
    let qr = q.powf(r);
    match regime {
        Regime::Poisson => {
            if params.n != 1 || params.r != 1 {
                return Err(Error::InvalidParameters("the Poisson regime needs n = r = 1".into()));
            }
            Ok(Standardization { center: 0.0, scale: 1.0 })
        }
        Regime::GaussianFixedP if params.p == 2 && params.r % 2 == 0 => {
            // centered at the exact mean q^r/2 + q^{r/2}/2
            Ok(Standardization { center: qr / 2.0 + q.powf(r / 2.0) / 2.0, scale: 2.0 / (r * qr).sqrt() })
        }
        Regime::GaussianFixedP => {
            Ok(Standardization { center: qr / p, scale: (p / ((1.0 - 1.0 / p) * r * qr)).sqrt() })
        }
        Regime::GaussianGrowingP => {
            if params.n == 1 && params.r == 1 {
                return Err(Error::InvalidParameters("the growing-p Gaussian regime needs n > 1 or r > 1".into()));
            }
            Ok(Standardization { center: qr / p, scale: (p / (r * qr)).sqrt() })
        }
    }
}

/// `E[X^k]` against its limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentLine {
    pub order: u32,
    pub value: f64,
    /// Zero for an exhaustive histogram.
    pub stderr: f64,
    pub target: f64,
    /// The same moment under the exact model, when it applies.
    pub model: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiBin {
    /// Inclusive range of `N` values.
    pub lo: u64,
    pub hi: u64,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    pub bins: Vec<ChiBin>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub regime: Regime,
    pub histogram: CountHistogram,
    pub standardization: Standardization,
    pub moments: Vec<MomentLine>,
    pub chi_square: ChiSquareFit,
    pub model_applicable: bool,
}

/// Moments of the limit law: Poisson(1) has `E X^k = 1, 2, 5`.
fn target_moment(regime: Regime, k: u32) -> f64 {
    match (regime, k) {
        (Regime::Poisson, 1) => 1.0,
        (Regime::Poisson, 2) => 2.0,
        (Regime::Poisson, 3) => 5.0,
        (_, 2) => 1.0,
        _ => 0.0,
    }
}

/// Probability the limit law gives to the `N` values `lo..=hi` (`hi = u64::MAX`
/// for an open tail). Gaussian bins use half-integer edges in `N`.
fn limit_mass(regime: Regime, st: &Standardization, lo: u64, hi: u64) -> f64 {
    match regime {
        Regime::Poisson => {
            let pois = Poisson::new(1.0).expect("valid rate");
            let below: f64 = (0..lo).map(|k| pois.pmf(k)).sum();
            if hi == u64::MAX {
                1.0 - below
            } else {
                (lo..=hi).map(|k| pois.pmf(k)).sum()
            }
        }
        _ => {
            let norm = Normal::standard();
            let lower = if lo == 0 { 0.0 } else { norm.cdf(st.apply(lo as f64 - 0.5)) };
            let upper = if hi == u64::MAX { 1.0 } else { norm.cdf(st.apply(hi as f64 + 0.5)) };
            upper - lower
        }
    }
}

fn merge_small_bins(mut bins: Vec<ChiBin>) -> Vec<ChiBin> {
    while bins.len() > 1 {
        let Some(i) = (0..bins.len())
            .filter(|&i| bins[i].expected < 5.0)
            .min_by(|&a, &b| bins[a].expected.total_cmp(&bins[b].expected))
        else {
            break;
        };
        let j = if i == 0 {
            1
        } else if i + 1 == bins.len() || bins[i - 1].expected <= bins[i + 1].expected {
            i - 1
        } else {
            i + 1
        };
        let (a, b) = (i.min(j), i.max(j));
        let right = bins.remove(b);
        let left = &mut bins[a];
        left.hi = right.hi;
        left.observed += right.observed;
        left.expected += right.expected;
    }
    bins
}

/// Goodness of fit of the histogram against the limit law. Poisson bins are
/// single values; Gaussian bins follow Sturges' rule over the observed range.
/// Bins expecting fewer than five counts are merged into a neighbour.
pub fn chi_square(hist: &CountHistogram, regime: Regime, st: &Standardization) -> ChiSquareFit {
    let total = hist.total as f64;
    let (&min, &max) = (hist.counts.keys().next().unwrap_or(&0), hist.counts.keys().next_back().unwrap_or(&0));
    let mut edges: Vec<(u64, u64)> = Vec::new();
    match regime {
        Regime::Poisson => {
            edges.extend((0..=max).map(|k| (k, k)));
        }
        _ => {
            let k = (total.log2().ceil() as u64 + 1).max(1);
            let width = (((max - min + 1) as f64 / k as f64).ceil() as u64).max(1);
            let mut lo = min;
            while lo <= max {
                edges.push((lo, (lo + width - 1).min(max)));
                lo += width;
            }
            edges[0].0 = 0;
        }
    }
    edges.last_mut().expect("at least one bin").1 = u64::MAX;
    let bins = edges
        .into_iter()
        .map(|(lo, hi)| ChiBin {
            lo,
            hi,
            observed: hist.counts.range(lo..=hi).map(|(_, &c)| c).sum(),
            expected: total * limit_mass(regime, st, lo, hi),
        })
        .collect();
    let bins = merge_small_bins(bins);
    let statistic: f64 = bins
        .iter()
        .map(|b| {
            let diff = b.observed as f64 - b.expected;
            diff * diff / b.expected
        })
        .sum();
    let dof = bins.len().saturating_sub(1) as u64;
    let p_value = if dof == 0 { 1.0 } else { ChiSquared::new(dof as f64).expect("positive dof").sf(statistic) };
    ChiSquareFit { statistic, dof, p_value, bins }
}

/// Moments of `X` from a histogram, with Monte-Carlo errors for sampled ones.
pub fn histogram_moments(hist: &CountHistogram, st: &Standardization, regime: Regime) -> Vec<MomentLine> {
    let total = hist.total as f64;
    (1..=3)
        .map(|k| {
            let mut m = 0.0;
            let mut m2 = 0.0;
            for (&v, &c) in &hist.counts {
                let x = st.apply(v as f64).powi(k as i32);
                m += c as f64 * x;
                m2 += c as f64 * x * x;
            }
            m /= total;
            m2 /= total;
            let stderr = match hist.mode {
                HistMode::Exhaustive => 0.0,
                HistMode::Sampled { .. } if hist.total > 1 => {
                    ((m2 - m * m).max(0.0) * total / (total - 1.0) / total).sqrt()
                }
                HistMode::Sampled { .. } => f64::INFINITY,
            };
            MomentLine { order: k, value: m, stderr, target: target_moment(regime, k), model: None }
        })
        .collect()
}

/// Largest `q^r` for which the model is built alongside the diagnostics.
const MODEL_REFERENCE_LIMIT: u64 = 1 << 14;

/// Finite-size diagnostics for one regime: the histogram (exhaustive when the
/// family has at most `EXHAUSTIVE_LIMIT` members, otherwise `samples` draws),
/// the first three moments of the standardized count, and a chi-square fit.
pub fn convergence_diagnostics(
    regime: Regime,
    params: PointParams,
    samples: u64,
    seed: u64,
    cap: u64,
) -> Result<DiagnosticsReport> {
    let st = standardization(regime, &params)?;
    let histogram = match params.family_size() {
        Some(size) if size <= EXHAUSTIVE_LIMIT.min(cap) => exact_distribution(params, cap)?,
        _ => sampled_distribution(params, samples, seed, cap)?,
    };
    let model_applicable = params.model_applicable();
    let mut moments = histogram_moments(&histogram, &st, regime);
    if model_applicable && params.qr().is_some_and(|qr| qr <= MODEL_REFERENCE_LIMIT.min(cap)) {
        let model = model_distribution(params.p, params.n, params.r, cap)?;
        for line in &mut moments {
            line.model = Some(model.expect(|v| st.apply(v).powi(line.order as i32)));
        }
    }
    let chi_square = chi_square(&histogram, regime, &st);
    Ok(DiagnosticsReport { regime, histogram, standardization: st, moments, chi_square, model_applicable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_CAP;

    #[test]
    fn trace_zero_examples() {
        let t2 = FieldTower::new(2, 1, 1, DEFAULT_CAP).unwrap();
        assert_eq!(count_trace_zeros(&PolyFq::new(vec![0, 1, 1]), &t2), 2);
        assert_eq!(count_trace_zeros(&PolyFq::new(vec![1, 1, 1]), &t2), 0);
        let t3 = FieldTower::new(3, 1, 1, DEFAULT_CAP).unwrap();
        assert_eq!(count_trace_zeros(&PolyFq::new(vec![0, 1]), &t3), 1);
    }

    #[test]
    fn quadratics_over_f2() {
        let h = exact_distribution(PointParams::new(2, 1, 2, 1).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(h.counts, BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        assert_eq!(h.total, 4);
        // d = 2 is even, so the genus formula is out of range
        assert_eq!(h.weil_violations, None);
    }

    #[test]
    fn model_examples() {
        let m = model_distribution(2, 1, 1, DEFAULT_CAP).unwrap();
        let quarter = BigRational::new(1.into(), 4.into());
        assert_eq!(m.probability(0), quarter);
        assert_eq!(m.probability(1), quarter.clone() * BigRational::from(BigInt::from(2)));
        assert_eq!(m.probability(2), quarter);
        let m = model_distribution(2, 1, 2, DEFAULT_CAP).unwrap();
        assert_eq!(m.mean(), BigRational::from(BigInt::from(3)));
        assert_eq!(m.mean(), model_mean(2, 1, 2));
    }

    #[test]
    fn model_means_and_variances() {
        for (p, n, r) in [(2, 1, 1), (2, 1, 2), (2, 2, 3), (3, 1, 3), (3, 2, 2), (5, 1, 5), (2, 1, 4)] {
            let m = model_distribution(p, n, r, DEFAULT_CAP).unwrap();
            assert!(m.total_mass().is_one());
            assert_eq!(m.mean(), model_mean(p, n, r), "p={p} n={n} r={r}");
            assert_eq!(m.variance(), model_variance(p, n, r), "p={p} n={n} r={r}");
        }
    }

    #[test]
    fn regimes_reject_mismatched_parameters() {
        assert!(standardization(Regime::Poisson, &PointParams::new(5, 2, 10, 1).unwrap()).is_err());
        assert!(standardization(Regime::GaussianGrowingP, &PointParams::new(5, 1, 10, 1).unwrap()).is_err());
        assert!("t5".parse::<Regime>().is_err());
    }

    #[test]
    fn bin_merging_keeps_totals() {
        let bins: Vec<ChiBin> = [1.0, 9.0, 2.0, 30.0, 0.5, 0.2]
            .iter()
            .enumerate()
            .map(|(i, &e)| ChiBin { lo: i as u64, hi: i as u64, observed: i as u64, expected: e })
            .collect();
        let merged = merge_small_bins(bins);
        assert!(merged.iter().all(|b| b.expected >= 5.0));
        assert_eq!(merged.iter().map(|b| b.observed).sum::<u64>(), 15);
        assert!((merged.iter().map(|b| b.expected).sum::<f64>() - 42.7).abs() < 1e-12);
        assert!(merged.windows(2).all(|w| w[0].hi + 1 == w[1].lo));
    }
}
