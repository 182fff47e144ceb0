//! Haar-random matrices from `U(N)` and `USp(2m)` as baselines for the family
//! statistics.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::algebra::arith::e_pr;
use crate::ensemble::{PairSign, PairWindow};
use crate::lfunction::zeros_of;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ensemble {
    Unitary(usize),
    /// `USp(2m)`, stored by its matrix size `2m`.
    Symplectic(usize),
}

impl Ensemble {
    pub fn unitary(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameters("matrix size must be positive".into()));
        }
        Ok(Ensemble::Unitary(n))
    }

    pub fn symplectic(size: usize) -> Result<Self> {
        if size == 0 || size % 2 == 1 {
            return Err(Error::InvalidParameters(format!("USp needs an even positive size, got {size}")));
        }
        Ok(Ensemble::Symplectic(size))
    }

    pub fn size(&self) -> usize {
        match *self {
            Ensemble::Unitary(n) | Ensemble::Symplectic(n) => n,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Ensemble::Unitary(_) => "unitary",
            Ensemble::Symplectic(_) => "usp",
        }
    }

    /// `⟨tr U^r⟩`: `0` for `U(N)`; `-e_{2,r}` for `r ≤ N` and `0` beyond for `USp(N)`.
    pub fn trace_mean(&self, r: usize) -> f64 {
        match *self {
            Ensemble::Unitary(_) => 0.0,
            Ensemble::Symplectic(n) => {
                if r <= n {
                    -(e_pr(2, r as u64) as f64)
                } else {
                    0.0
                }
            }
        }
    }

    /// `⟨tr U^r tr U^{∓s}⟩` for `U(N)`: `δ_{r,s} min(r, N)` and `0`.
    pub fn unitary_pair_mean(n: usize, r: usize, s: usize, sign: PairSign) -> f64 {
        match sign {
            PairSign::Minus if r == s => r.min(n) as f64,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixSample {
    pub ensemble: Ensemble,
    pub matrix: DMatrix<Complex64>,
}

impl MatrixSample {
    /// `max |U*U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let g = self.matrix.adjoint() * &self.matrix;
        (&g - DMatrix::<Complex64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |UᵀJU - J|`.
    pub fn symplectic_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let j = standard_form(n);
        let g = self.matrix.transpose() * &j * &self.matrix;
        (&g - &j).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `tr U^r`, `1 ≤ r ≤ r_max`.
    pub fn power_traces(&self, r_max: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(r_max);
        let mut pw = self.matrix.clone();
        for r in 1..=r_max {
            if r > 1 {
                pw = &pw * &self.matrix;
            }
            out.push(pw.trace());
        }
        out
    }

    /// Eigenvalues as the roots of the characteristic polynomial, whose
    /// coefficients come from the power traces by Newton's identities.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.matrix.nrows();
        let t = self.power_traces(n);
        // det(1 - zU) = Σ c_k z^k with k c_k = -Σ_{i=1}^k t_i c_{k-i}
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[0] = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 1..=k {
                acc += t[i - 1] * c[k - i];
            }
            c[k] = -acc / k as f64;
        }
        let z = zeros_of(&c, 1)?;
        Ok(z.rho)
    }
}

/// `J = [[0, I], [-I, 0]]`.
pub fn standard_form(n: usize) -> DMatrix<Complex64> {
    let m = n / 2;
    let mut j = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..m {
        j[(i, m + i)] = Complex64::new(1.0, 0.0);
        j[(m + i, i)] = Complex64::new(-1.0, 0.0);
    }
    j
}

/// The RNG for sample `index`: one ChaCha stream per index.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) / std::f64::consts::SQRT_2
        })
        .collect()
}

fn orthonormalize(mut v: Vec<Complex64>, basis: &[Vec<Complex64>]) -> Vec<Complex64> {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let proj: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= proj * bi;
            }
        }
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

/// A Haar-distributed sample. Gram-Schmidt on Gaussian columns is QR with
/// positive diagonal, which is the phase correction making the law Haar; for
/// `USp` each column `a` is paired with `-J ā`.
pub fn sample_haar(ensemble: Ensemble, rng: &mut ChaCha8Rng) -> MatrixSample {
    let n = ensemble.size();
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    match ensemble {
        Ensemble::Unitary(_) => {
            for _ in 0..n {
                let v = orthonormalize(gaussian_vector(n, rng), &cols);
                cols.push(v);
            }
        }
        Ensemble::Symplectic(_) => {
            let m = n / 2;
            let mut firsts = Vec::with_capacity(m);
            let mut seconds = Vec::with_capacity(m);
            for _ in 0..m {
                let a = orthonormalize(gaussian_vector(n, rng), &cols);
                // -J ā = (-ā_lower, ā_upper)
                let b: Vec<Complex64> =
                    (0..n).map(|i| if i < m { -a[m + i].conj() } else { a[i - m].conj() }).collect();
                cols.push(a.clone());
                cols.push(b.clone());
                firsts.push(a);
                seconds.push(b);
            }
            cols = firsts.into_iter().chain(seconds).collect();
        }
    }
    let matrix = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
    MatrixSample { ensemble, matrix }
}

/// Mean, standard error and count of a Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: u64,
    pub seed: u64,
    /// Closed form, where one is known.
    pub prediction: Option<f64>,
}

impl MomentEstimate {
    /// `|mean - prediction| / stderr`.
    pub fn z_score(&self) -> Option<f64> {
        let diff = (self.mean - self.prediction?).abs();
        Some(if self.stderr == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.stderr
        })
    }
}

/// Welford accumulator, merged in index order so results do not depend on
/// the thread schedule.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Power traces of every sample, in sample order.
fn sample_traces(ensemble: Ensemble, r_max: usize, samples: u64, seed: u64) -> Vec<Vec<Complex64>> {
    (0..samples).into_par_iter().map(|i| sample_haar(ensemble, &mut sample_rng(seed, i)).power_traces(r_max)).collect()
}

fn estimate(values: impl Iterator<Item = f64>, seed: u64, prediction: Option<f64>) -> MomentEstimate {
    let mut w = Welford::default();
    for v in values {
        w.push(v);
    }
    MomentEstimate { mean: w.mean(), stderr: w.stderr(), count: w.count(), seed, prediction }
}

/// Which moment to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMoment {
    /// `Re tr U^r`
    Single(usize),
    /// `Re tr U^r tr U^{∓s}`
    Pair(usize, usize, PairSign),
}

impl TraceMoment {
    fn max_power(&self) -> usize {
        match *self {
            TraceMoment::Single(r) => r,
            TraceMoment::Pair(r, s, _) => r.max(s),
        }
    }

    fn value(&self, t: &[Complex64]) -> f64 {
        match *self {
            TraceMoment::Single(r) => t[r - 1].re,
            TraceMoment::Pair(r, s, PairSign::Minus) => (t[r - 1] * t[s - 1].conj()).re,
            TraceMoment::Pair(r, s, PairSign::Plus) => (t[r - 1] * t[s - 1]).re,
        }
    }

    fn prediction(&self, ensemble: Ensemble) -> Option<f64> {
        match (*self, ensemble) {
            (TraceMoment::Single(r), e) => Some(e.trace_mean(r)),
            (TraceMoment::Pair(r, s, sign), Ensemble::Unitary(n)) => Some(Ensemble::unitary_pair_mean(n, r, s, sign)),
            _ => None,
        }
    }
}

pub fn trace_moment(ensemble: Ensemble, moment: TraceMoment, samples: u64, seed: u64) -> Result<MomentEstimate> {
    Ok(trace_moments(ensemble, &[moment], samples, seed)?.remove(0))
}

/// Several moments from one set of samples.
pub fn trace_moments(
    ensemble: Ensemble,
    moments: &[TraceMoment],
    samples: u64,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    if samples < 100 {
        return Err(Error::InvalidParameters(format!("at least 100 samples are needed, got {samples}")));
    }
    if moments.iter().any(|m| m.max_power() == 0 || matches!(m, TraceMoment::Pair(_, 0, _))) {
        return Err(Error::InvalidParameters("powers must be positive".into()));
    }
    let r_max = moments.iter().map(TraceMoment::max_power).max().unwrap_or(1);
    let traces = sample_traces(ensemble, r_max, samples, seed);
    Ok(moments.iter().map(|m| estimate(traces.iter().map(|t| m.value(t)), seed, m.prediction(ensemble))).collect())
}

/// Monte-Carlo two-level statistic over `U(N)` with the exact finite-`N`
/// value and the large-`N` sine-kernel limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryTwoLevel {
    pub estimate: MomentEstimate,
    pub exact_finite_n: f64,
    pub limit: f64,
}

pub fn two_level_unitary(n: usize, window: &PairWindow, samples: u64, seed: u64) -> Result<UnitaryTwoLevel> {
    if window.first.scale != n || window.second.scale != n {
        return Err(Error::InvalidParameters("window scale must equal the matrix size".into()));
    }
    if samples < 100 {
        return Err(Error::InvalidParameters(format!("at least 100 samples are needed, got {samples}")));
    }
    let ensemble = Ensemble::unitary(n)?;
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = sample_haar(ensemble, &mut sample_rng(seed, i));
            let angles: Vec<f64> = u
                .eigenvalues()
                .expect("unitary eigenvalues")
                .iter()
                .map(|z| z.arg().rem_euclid(2.0 * std::f64::consts::PI))
                .collect();
            window.pair_statistic(&angles)
        })
        .collect();
    let exact = unitary_two_level_exact(n, window);
    Ok(UnitaryTwoLevel {
        estimate: estimate(values.into_iter(), seed, Some(exact)),
        exact_finite_n: exact,
        limit: window.sine_kernel_prediction(),
    })
}

/// `⟨S²⟩` over `U(N)` from `⟨T^r T^s⟩ = δ_{r+s,0} min(|r|, N)` (`T^0 = N`):
/// `c_0²(N² - N) + Σ_{r≠0} c_r c_{-r} (min(|r|, N) - N)` with `c_r = V̂(r/N)/N`.
/// It does not depend on `θ`.
pub fn unitary_two_level_exact(n: usize, window: &PairWindow) -> f64 {
    let big_r = window.first.max_frequency().max(window.second.max_frequency()) as i64;
    let nf = n as f64;
    let mut acc = window.first.coefficient(0) * window.second.coefficient(0) * (nf * nf - nf);
    for r in (-big_r..=big_r).filter(|&r| r != 0) {
        acc += window.first.coefficient(r) * window.second.coefficient(-r) * ((r.unsigned_abs() as f64).min(nf) - nf);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_in_the_group() {
        for ens in [Ensemble::Unitary(5), Ensemble::Symplectic(6), Ensemble::Unitary(1), Ensemble::Symplectic(2)] {
            for i in 0..20 {
                let u = sample_haar(ens, &mut sample_rng(7, i));
                assert!(u.unitarity_defect() < 1e-10);
                if let Ensemble::Symplectic(_) = ens {
                    assert!(u.symplectic_defect() < 1e-10);
                }
                let ev = u.eigenvalues().unwrap();
                assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() < 1e-8));
                if let Ensemble::Symplectic(_) = ens {
                    for z in &ev {
                        assert!(ev.iter().any(|w| (w - z.conj()).norm() < 1e-6));
                    }
                }
            }
        }
    }

    #[test]
    fn welford_merge_matches_sequential() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut all = Welford::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = Welford::default();
        let mut b = Welford::default();
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean() - all.mean()).abs() < 1e-14);
        assert!((a.variance() - all.variance()).abs() < 1e-13);
    }

    #[test]
    fn exact_unitary_two_level() {
        let w = PairWindow::new(0.25, 0.25, 0.0, 10).unwrap();
        let exact = unitary_two_level_exact(10, &w);
        // c_0 = 2/10, so c_0² · 90 = 3.6; the r ≠ 0 terms give -0.8
        assert!((exact - 2.8).abs() < 1e-12, "{exact}");
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = trace_moment(Ensemble::Unitary(4), TraceMoment::Pair(2, 2, PairSign::Minus), 200, 11).unwrap();
        let b = trace_moment(Ensemble::Unitary(4), TraceMoment::Pair(2, 2, PairSign::Minus), 200, 11).unwrap();
        assert_eq!(a, b);
    }
}
