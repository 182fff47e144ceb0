//! One function per subcommand. Each returns a CSV table, a JSON summary and,
//! with `--check`, whether the exact identities held.

use asz::algebra::arith::checked_pow;
use asz::algebra::{Fq, IrreducibleCache};
use asz::dirichlet::{
    dirprop_average, lift, niceconj_probe, verify_factorization, Absorb, DecompositionWitness, Selector, SubgroupSpec,
};
use asz::ensemble::{
    avg_pair, avg_trace, corollary_total, two_level_stat, window_stat, FamilyData, MomentReport, PairSign, PairWindow,
    WindowSpec,
};
use asz::lfunction::{l_polynomial, zeros, RH_TOL};
use asz::pointcount::{
    convergence_diagnostics, exact_distribution, histogram_matches_model, model_distribution, model_mean,
    sampled_distribution, CountHistogram, PointParams, Regime, EXHAUSTIVE_LIMIT,
};
use asz::rmt::{trace_moments, two_level_unitary, Ensemble, TraceMoment};
use asz::{CycloElem, ExactValue, FamilyKind, FamilySpec, PolyFq, ZeroSet};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{parse_powers, parse_window, Command, RunConfig};
use crate::output::{float, opt_float, Table};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub summary: Value,
    /// `Some` when `--check` was passed.
    pub check: Option<bool>,
}

impl Outcome {
    fn new(table: Table, summary: Value, holds: bool, cfg: &RunConfig) -> Self {
        Outcome { table, summary, check: cfg.opts.check.then_some(holds) }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::AvgTrace => avg_trace_cmd(cfg),
        Command::PairTrace => pair_trace_cmd(cfg),
        Command::Zeros => zeros_cmd(cfg),
        Command::WindowStat => window_stat_cmd(cfg),
        Command::TwoLevel => two_level_cmd(cfg),
        Command::RmtBaseline => rmt_cmd(cfg),
        Command::DirichletVerify => dirichlet_verify_cmd(cfg),
        Command::OddFamily => odd_family_cmd(cfg),
        Command::Decompose => decompose_cmd(cfg),
        Command::ConjectureProbe => conjecture_cmd(cfg),
        Command::PointDist => point_dist_cmd(cfg),
    }
}

fn req<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

fn field(cfg: &RunConfig) -> Result<Fq, CliError> {
    Ok(Fq::new(req(&cfg.opts.p, "p")?, cfg.opts.n.unwrap_or(1))?)
}

fn family(cfg: &RunConfig, allowed: &[FamilyKind]) -> Result<FamilySpec, CliError> {
    let kind: FamilyKind = cfg.opts.family.as_deref().unwrap_or("full").parse()?;
    if !allowed.contains(&kind) {
        return Err(CliError::Usage(format!("--family {kind} is not supported here")));
    }
    Ok(FamilySpec::new(kind, req(&cfg.opts.p, "p")?, cfg.opts.n.unwrap_or(1), req(&cfg.opts.d, "d")?)?)
}

/// The requested character, or all of them.
fn characters(cfg: &RunConfig, p: u32) -> Result<Vec<u32>, CliError> {
    match cfg.opts.psi {
        Some(a) if a % p == 0 => Err(asz::Error::TrivialCharacter.into()),
        Some(a) => Ok(vec![a % p]),
        None => Ok((1..p).collect()),
    }
}

fn powers(flag: &str, value: &Option<String>) -> Result<Vec<usize>, CliError> {
    parse_powers(&req(value, flag)?)
}

/// Sums up to `r_max`, enumerating `F_{q^r}` directly while it fits under the
/// cap and continuing through the L-polynomials beyond.
fn family_data(spec: FamilySpec, r_max: usize, cap: u64) -> Result<(FamilyData, &'static str), CliError> {
    if checked_pow(spec.q(), r_max as u32).is_some_and(|s| s <= cap) {
        return Ok((FamilyData::compute(spec, r_max, cap)?, "direct"));
    }
    let mut data = FamilyData::compute(spec, r_max.min(spec.d - 1).max(1), cap)?;
    data.extend_newton(r_max)?;
    Ok((data, "newton"))
}

fn sign_list(cfg: &RunConfig) -> Result<Vec<PairSign>, CliError> {
    match cfg.opts.sign.as_deref() {
        None | Some("both") => Ok(vec![PairSign::Plus, PairSign::Minus]),
        Some(s) => Ok(vec![s.parse()?]),
    }
}

fn moment_row(spec: &FamilySpec, a: u32, m: &MomentReport) -> Vec<String> {
    vec![
        spec.p.to_string(),
        spec.n.to_string(),
        spec.d.to_string(),
        spec.kind.to_string(),
        a.to_string(),
        m.r.to_string(),
        m.s.map(|(s, _)| s.to_string()).unwrap_or_default(),
        m.s.map(|(_, sign)| sign.to_string()).unwrap_or_default(),
        m.total.to_string(),
        m.exact.to_field(),
        float(m.value),
        m.oracle.as_ref().map(ExactValue::to_field).unwrap_or_default(),
        opt_float(m.oracle_value()),
        opt_float(m.abs_error()),
        m.matches_oracle().map(|b| b.to_string()).unwrap_or_default(),
    ]
}

pub const MOMENT_HEADERS: [&str; 15] = [
    "p",
    "n",
    "d",
    "family",
    "psi",
    "r",
    "s",
    "sign",
    "total",
    "exact",
    "float_value",
    "oracle",
    "oracle_value",
    "abs_error",
    "match",
];

fn avg_trace_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = family(cfg, &[FamilyKind::Full, FamilyKind::Odd])?;
    let rs = powers("r", &cfg.opts.r)?;
    let psis = characters(cfg, spec.p)?;
    let (data, route) = family_data(spec, *rs.iter().max().expect("nonempty"), cfg.cap)?;
    let fq = Fq::new(spec.p, spec.n)?;
    let mut cache = IrreducibleCache::with_cap(fq, cfg.cap);
    let mut table = Table::new(&MOMENT_HEADERS);
    let mut holds = true;
    let mut identities = 0;
    for &a in &psis {
        for &r in &rs {
            let mut m = avg_trace(&data, a, r, &mut cache)?;
            if spec.kind == FamilyKind::Odd {
                let sub = SubgroupSpec::new(Selector::OddF, spec.p, spec.n, spec.d)?;
                m.oracle = Some(dirprop_average(&sub, r, &mut cache)?);
            }
            if m.matches_oracle() == Some(false) {
                holds = false;
            }
            if spec.kind == FamilyKind::Full && r < spec.d {
                identities += 1;
                if m.total.as_integer() != Some(corollary_total(&spec, r)) {
                    holds = false;
                }
            }
            table.push(moment_row(&spec, a, &m));
        }
    }
    let summary = json!({ "family_size": data.len(), "route": route, "corollary_identities": identities, "identities_hold": holds });
    Ok(Outcome::new(table, summary, holds, cfg))
}

fn pair_trace_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = family(cfg, &[FamilyKind::Full, FamilyKind::Odd])?;
    let rs = powers("r", &cfg.opts.r)?;
    let ss = powers("s", &cfg.opts.s)?;
    let signs = sign_list(cfg)?;
    let psis = characters(cfg, spec.p)?;
    let r_max = rs.iter().chain(&ss).copied().max().expect("nonempty");
    let (data, route) = family_data(spec, r_max, cfg.cap)?;
    let mut table = Table::new(&MOMENT_HEADERS);
    let mut holds = true;
    for &a in &psis {
        for &r in &rs {
            for &s in &ss {
                for &sign in &signs {
                    let m = avg_pair(&data, a, r, s, sign)?;
                    if m.matches_oracle() == Some(false) {
                        holds = false;
                    }
                    table.push(moment_row(&spec, a, &m));
                }
            }
        }
    }
    let summary = json!({ "family_size": data.len(), "route": route, "identities_hold": holds });
    Ok(Outcome::new(table, summary, holds, cfg))
}

pub const ZEROS_HEADERS: [&str; 9] = ["index", "f", "psi", "k", "re", "im", "theta", "abs_dev", "rh_ok"];

/// Writes one row per zero and returns the largest `| |z| - q^{-1/2} |`.
fn zero_rows(table: &mut Table, index: String, f: &PolyFq, a: u32, z: &ZeroSet, q: u64) -> f64 {
    let target = (q as f64).powf(-0.5);
    let mut worst = 0.0f64;
    for (k, (rho, zero)) in z.rho.iter().zip(&z.zeros).enumerate() {
        let dev = (zero.norm() - target).abs();
        worst = worst.max(dev);
        table.push(vec![
            index.clone(),
            f.to_coeff_string(),
            a.to_string(),
            k.to_string(),
            float(rho.re),
            float(rho.im),
            float(z.theta[k]),
            float(dev),
            (dev <= RH_TOL).to_string(),
        ]);
    }
    worst
}

fn zeros_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut table = Table::new(&ZEROS_HEADERS);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    if let Some(text) = &cfg.opts.f {
        let fq = field(cfg)?;
        let f = PolyFq::parse(text, &fq)?;
        for a in characters(cfg, fq.p())? {
            let z = zeros(&l_polynomial(&f, fq.p(), fq.n(), a, cfg.cap)?)?;
            count += z.len();
            worst = worst.max(zero_rows(&mut table, String::new(), &f, a, &z, fq.q() as u64));
        }
    } else {
        let spec = family(cfg, &[FamilyKind::Full, FamilyKind::Odd])?;
        let data = FamilyData::for_lpolys(spec, cfg.cap)?;
        for a in characters(cfg, spec.p)? {
            for (k, z) in data.zero_sets(a)?.iter().enumerate() {
                count += z.len();
                worst = worst.max(zero_rows(&mut table, k.to_string(), &spec.member(k as u128), a, z, spec.q()));
            }
        }
    }
    let holds = worst <= RH_TOL;
    let summary = json!({ "zeros": count, "max_abs_dev": worst, "tolerance": RH_TOL, "rh_holds": holds });
    Ok(Outcome::new(table, summary, holds, cfg))
}

/// Route agreement tolerance for the window statistics.
pub const ROUTE_TOL: f64 = 1e-9;

fn window_stat_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = family(cfg, &[FamilyKind::Full])?;
    let (a, _) = parse_window(&req(&cfg.opts.window, "window")?)?;
    let theta = cfg.opts.theta.unwrap_or(0.0);
    let psi = cfg.opts.psi.unwrap_or(1);
    let window = WindowSpec::new(a, theta, spec.d)?;
    let mut data = FamilyData::for_lpolys(spec, cfg.cap)?;
    let rep = window_stat(&mut data, psi, &window)?;
    let mut table = Table::new(&["index", "f", "zero_side", "fourier_side", "abs_diff"]);
    for (k, (z, f)) in rep.zero_side.iter().zip(&rep.fourier_side).enumerate() {
        table.push(vec![
            k.to_string(),
            spec.member(k as u128).to_coeff_string(),
            float(*z),
            float(*f),
            float((z - f).abs()),
        ]);
    }
    let holds = rep.max_route_diff <= ROUTE_TOL && (rep.mean_zero_side - rep.mean_exact).abs() <= ROUTE_TOL;
    let deviation = (rep.mean_exact_leading - rep.target).abs();
    let summary = json!({
        "a": a,
        "theta": theta,
        "psi": psi,
        "mean_zero_side": rep.mean_zero_side,
        "mean_exact": rep.mean_exact,
        "mean_exact_leading": rep.mean_exact_leading,
        "target": rep.target,
        "abs_deviation": deviation,
        "abs_deviation_times_d": deviation * spec.d as f64,
        "max_route_diff": rep.max_route_diff,
        "routes_agree": holds,
    });
    Ok(Outcome::new(table, summary, holds, cfg))
}

fn two_level_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = family(cfg, &[FamilyKind::Full])?;
    let (a1, a2) = parse_window(&req(&cfg.opts.window, "window")?)?;
    let theta = cfg.opts.theta.unwrap_or(0.0);
    let psi = cfg.opts.psi.unwrap_or(1);
    let window = PairWindow::new(a1, a2, theta, spec.d - 1)?;
    let mut data = FamilyData::for_lpolys(spec, cfg.cap)?;
    let rep = two_level_stat(&mut data, psi, &window)?;
    let mut table = Table::new(&["index", "f", "value"]);
    for (k, v) in rep.per_f.iter().enumerate() {
        table.push(vec![k.to_string(), spec.member(k as u128).to_coeff_string(), float(*v)]);
    }
    let holds = rep.max_route_diff <= ROUTE_TOL && (rep.prediction - rep.prediction_lattice).abs() <= 1e-6;
    let summary = json!({
        "a1": a1,
        "a2": a2,
        "theta": theta,
        "psi": psi,
        "empirical": rep.empirical,
        "fourier_exact": rep.fourier_exact,
        "prediction": rep.prediction,
        "prediction_lattice": rep.prediction_lattice,
        "abs_deviation": (rep.empirical - rep.prediction).abs(),
        "max_route_diff": rep.max_route_diff,
        "routes_agree": holds,
    });
    Ok(Outcome::new(table, summary, holds, cfg))
}

pub const RMT_HEADERS: [&str; 12] =
    ["ensemble", "N", "statistic", "r", "s", "sign", "mean", "stderr", "samples", "seed", "prediction", "limit"];

fn rmt_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let size = req(&cfg.opts.size, "size")?;
    let ensemble = match cfg.opts.ensemble.as_deref().unwrap_or("unitary") {
        "unitary" | "u" => Ensemble::unitary(size)?,
        "usp" | "symplectic" => Ensemble::symplectic(size)?,
        other => return Err(CliError::Usage(format!("unknown ensemble {other:?}"))),
    };
    let samples = cfg.opts.samples.unwrap_or(4000);
    let seed = cfg.opts.seed.unwrap_or(0);
    let mut table = Table::new(&RMT_HEADERS);
    let mut worst_z = 0.0f64;
    let common = |stat: &str| vec![ensemble.name().to_string(), size.to_string(), stat.to_string()];
    if let Some(w) = &cfg.opts.window {
        if !matches!(ensemble, Ensemble::Unitary(_)) {
            return Err(CliError::Usage("the two-level baseline is for the unitary ensemble".into()));
        }
        let (a1, a2) = parse_window(w)?;
        let window = PairWindow::new(a1, a2, cfg.opts.theta.unwrap_or(0.0), size)?;
        let rep = two_level_unitary(size, &window, samples, seed)?;
        worst_z = worst_z.max(rep.estimate.z_score().unwrap_or(0.0));
        let mut row = common("two_level");
        row.extend([String::new(), String::new(), String::new()]);
        row.extend([
            float(rep.estimate.mean),
            float(rep.estimate.stderr),
            samples.to_string(),
            seed.to_string(),
            float(rep.exact_finite_n),
            float(rep.limit),
        ]);
        table.push(row);
    } else {
        let rs = powers("r", &cfg.opts.r)?;
        let moments: Vec<TraceMoment> = match &cfg.opts.s {
            None => rs.iter().map(|&r| TraceMoment::Single(r)).collect(),
            Some(s) => {
                let ss = parse_powers(s)?;
                let signs = match cfg.opts.sign.as_deref() {
                    None => vec![PairSign::Minus],
                    Some(_) => sign_list(cfg)?,
                };
                let mut out = Vec::new();
                for &r in &rs {
                    for &s in &ss {
                        out.extend(signs.iter().map(|&sign| TraceMoment::Pair(r, s, sign)));
                    }
                }
                out
            }
        };
        for (m, est) in moments.iter().zip(trace_moments(ensemble, &moments, samples, seed)?) {
            worst_z = worst_z.max(est.z_score().unwrap_or(0.0));
            let (stat, r, s, sign) = match *m {
                TraceMoment::Single(r) => ("trace", r, String::new(), String::new()),
                TraceMoment::Pair(r, s, sign) => ("pair", r, s.to_string(), sign.to_string()),
            };
            let mut row = common(stat);
            row.extend([
                r.to_string(),
                s,
                sign,
                float(est.mean),
                float(est.stderr),
                samples.to_string(),
                seed.to_string(),
                opt_float(est.prediction),
                String::new(),
            ]);
            table.push(row);
        }
    }
    let holds = worst_z <= 5.0;
    let summary = json!({ "max_z_score": worst_z, "within_5_stderr": holds });
    Ok(Outcome::new(table, summary, holds, cfg))
}

fn coeff_list(c: &[CycloElem]) -> String {
    c.iter().map(CycloElem::to_string).collect::<Vec<_>>().join(";")
}

fn dirichlet_verify_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = family(cfg, &[FamilyKind::Full, FamilyKind::Odd])?;
    let psis = characters(cfg, spec.p)?;
    let members: Vec<(usize, PolyFq)> = spec.enumerate(cfg.cap)?.enumerate().collect();
    let cap = cfg.cap;
    let checks = members
        .par_iter()
        .map(|(k, f)| {
            psis.iter()
                .map(|&a| verify_factorization(&spec, f, a, cap).map(|c| (*k, f.clone(), a, c)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["index", "f", "psi", "holds", "l_chi"]);
    let mut holds = true;
    for (k, f, a, c) in checks.into_iter().flatten() {
        holds &= c.holds;
        table.push(vec![k.to_string(), f.to_coeff_string(), a.to_string(), c.holds.to_string(), coeff_list(&c.l_chi)]);
    }
    let summary = json!({ "members": members.len(), "characters": psis.len(), "factorization_holds": holds });
    Ok(Outcome::new(table, summary, holds, cfg))
}

fn odd_family_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let selector = match cfg.opts.family.as_deref().unwrap_or("odd") {
        "odd" => Selector::OddF,
        "full" => Selector::PTorsionAll,
        other => return Err(CliError::Usage(format!("odd-family takes --family odd or full, got {other:?}"))),
    };
    let sub = SubgroupSpec::new(selector, req(&cfg.opts.p, "p")?, cfg.opts.n.unwrap_or(1), req(&cfg.opts.d, "d")?)?;
    let spec = sub.family();
    let rs = powers("r", &cfg.opts.r)?;
    let (data, route) = family_data(spec, *rs.iter().max().expect("nonempty"), cfg.cap)?;
    let mut cache = IrreducibleCache::with_cap(Fq::new(spec.p, spec.n)?, cfg.cap);
    let mut table =
        Table::new(&["p", "n", "d", "family", "r", "brute", "brute_value", "formula", "formula_value", "match"]);
    let mut holds = true;
    for &r in &rs {
        let brute = ExactValue::new(-data.total(r, 1), data.len() as i128, -(r as i32), spec.q())?;
        let formula = dirprop_average(&sub, r, &mut cache)?;
        let ok = brute == formula;
        holds &= ok;
        table.push(vec![
            spec.p.to_string(),
            spec.n.to_string(),
            spec.d.to_string(),
            spec.kind.to_string(),
            r.to_string(),
            brute.to_field(),
            float(brute.to_f64()),
            formula.to_field(),
            float(formula.to_f64()),
            ok.to_string(),
        ]);
    }
    let summary = json!({ "family_size": data.len(), "route": route, "identities_hold": holds });
    Ok(Outcome::new(table, summary, holds, cfg))
}

fn decompose_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fq = field(cfg)?;
    let h = PolyFq::parse(&req(&cfg.opts.h, "h")?, &fq)?;
    let modulus = req(&cfg.opts.modulus, "D")?;
    let absorb = if cfg.opts.power_only { Absorb::PowerOnly } else { Absorb::PowerTimesEven };
    let w = lift(&h, modulus, &fq, absorb)?;
    let verified = w.verify(&h, modulus, &fq);
    let mode = if cfg.opts.power_only { "power_only" } else { "power_times_even" };
    let mut table = Table::new(&["h", "D", "mode", "status", "level", "coefficient", "g1", "g2"]);
    let mut row = vec![h.to_coeff_string(), modulus.to_string(), mode.to_string()];
    let summary = match &w {
        DecompositionWitness::Success { g1, g2 } => {
            row.extend(["success".into(), String::new(), String::new(), g1.to_coeff_string(), g2.to_coeff_string()]);
            json!({ "status": "success", "g1": g1.to_string(), "g2": g2.to_string(), "verified": verified })
        }
        DecompositionWitness::Failure { level, coefficient } => {
            row.extend(["failure".into(), level.to_string(), coefficient.to_string(), String::new(), String::new()]);
            json!({ "status": "failure", "level": level, "coefficient": coefficient })
        }
    };
    table.push(row);
    Ok(Outcome::new(table, summary, verified || !w.is_success(), cfg))
}

fn conjecture_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fq = field(cfg)?;
    let d = req(&cfg.opts.d, "d")?;
    let r_max = *powers("r", &cfg.opts.r)?.iter().max().expect("nonempty");
    let mut cache = IrreducibleCache::with_cap(fq.clone(), cfg.cap);
    let found = niceconj_probe(&fq, d, r_max, &mut cache)?;
    let mut table = Table::new(&["h", "degree"]);
    for h in &found {
        table.push(vec![h.to_coeff_string(), h.degree().unwrap_or(0).to_string()]);
    }
    let holds = found.is_empty();
    let summary = json!({ "d": d, "r_max": r_max, "counterexamples": found.len() });
    Ok(Outcome::new(table, summary, holds, cfg))
}

/// Histogram for `point-dist`: exhaustive for small families, sampled otherwise.
pub fn point_histogram(params: PointParams, samples: u64, seed: u64, cap: u64) -> Result<CountHistogram, CliError> {
    Ok(match params.family_size() {
        Some(size) if size <= EXHAUSTIVE_LIMIT.min(cap) => exact_distribution(params, cap)?,
        _ => sampled_distribution(params, samples, seed, cap)?,
    })
}

fn point_dist_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rs = powers("r", &cfg.opts.r)?;
    let [r] = rs[..] else {
        return Err(CliError::Usage("point-dist takes a single --r".into()));
    };
    let params = PointParams::new(req(&cfg.opts.p, "p")?, cfg.opts.n.unwrap_or(1), req(&cfg.opts.d, "d")?, r as u32)?;
    let samples = cfg.opts.samples.unwrap_or(10_000);
    let seed = cfg.opts.seed.unwrap_or(0);
    let mut summary = json!({});
    let hist = match &cfg.opts.regime {
        Some(regime) => {
            let regime: Regime = regime.parse()?;
            let rep = convergence_diagnostics(regime, params, samples, seed, cfg.cap)?;
            summary["regime"] = json!(regime.to_string());
            summary["center"] = json!(rep.standardization.center);
            summary["scale"] = json!(rep.standardization.scale);
            summary["moments"] = rep
                .moments
                .iter()
                .map(|m| json!({ "order": m.order, "value": m.value, "stderr": m.stderr, "target": m.target, "model": m.model }))
                .collect();
            summary["chi_square"] = json!({
                "statistic": rep.chi_square.statistic,
                "dof": rep.chi_square.dof,
                "p_value": rep.chi_square.p_value,
                "bins": rep.chi_square.bins.len(),
            });
            rep.histogram
        }
        None => point_histogram(params, samples, seed, cfg.cap)?,
    };
    let applicable = params.model_applicable();
    let model = match params.qr() {
        Some(qr) if applicable && qr <= cfg.cap => Some(model_distribution(params.p, params.n, params.r, cfg.cap)?),
        _ => None,
    };
    let mut values: Vec<u64> = hist.counts.keys().copied().collect();
    if let Some(m) = &model {
        values.extend(m.support());
        values.sort_unstable();
        values.dedup();
    }
    let mut table = Table::new(&["value", "frequency", "model_probability"]);
    for v in values {
        table.push(vec![
            v.to_string(),
            hist.frequency(v).to_string(),
            model.as_ref().map(|m| float(m.probability_f64(v))).unwrap_or_default(),
        ]);
    }
    let matches = model
        .as_ref()
        .filter(|_| hist.total == params.family_size().unwrap_or(0))
        .map(|m| histogram_matches_model(&hist, m));
    let holds = hist.weil_violations.unwrap_or(0) == 0 && matches != Some(false);
    summary["mode"] = json!(hist.mode.to_string());
    summary["total"] = json!(hist.total);
    summary["mean"] = json!(hist.mean());
    summary["weil_violations"] = json!(hist.weil_violations);
    summary["model_applicable"] = json!(applicable);
    summary["model_mean"] = json!(applicable.then(|| model_mean(params.p, params.n, params.r).to_string()));
    summary["model_matches_exactly"] = json!(matches);
    Ok(Outcome::new(table, summary, holds, cfg))
}
