use std::collections::HashSet;

use asz::algebra::{Fq, IrreducibleCache, PolyFq};
use asz::dirichlet::*;
use asz::ensemble::{prop_irr_oracle, FamilyData};
use asz::{CycloElem, ExactValue, FamilySpec, DEFAULT_CAP};
use proptest::prelude::*;

#[test]
fn factorization_small_families() {
    for (p, n, d) in [(3, 1, 2), (3, 1, 4), (2, 1, 3), (3, 2, 2), (5, 1, 3)] {
        let spec = FamilySpec::full(p, n, d).unwrap();
        for f in spec.enumerate(DEFAULT_CAP).unwrap() {
            for a in 1..p {
                let check = verify_factorization(&spec, &f, a, DEFAULT_CAP).unwrap();
                assert!(check.holds, "p={p} n={n} f={f} a={a}: {:?}", check.diff);
            }
        }
    }
    // f = x over F_2: L_χ = 1 - z, L_{f,ψ} = 1
    let spec = FamilySpec::full(2, 1, 1).unwrap();
    let check = verify_factorization(&spec, &PolyFq::new(vec![0, 1]), 1, DEFAULT_CAP).unwrap();
    assert!(check.holds);
    assert_eq!(check.l_chi, vec![CycloElem::one(2), CycloElem::from_int(2, -1)]);
}

#[test]
fn l_series_stops_at_d() {
    let spec = FamilySpec::full(3, 1, 4).unwrap();
    for f in spec.enumerate(DEFAULT_CAP).unwrap() {
        let chi = DirichletChar::of_member(&spec, f, 1).unwrap();
        assert!(l_chi_coefficient(&chi, 5).is_zero());
        assert!(l_chi_coefficient(&chi, 6).is_zero());
        assert_eq!(l_chi(&chi, DEFAULT_CAP).unwrap()[0], CycloElem::one(3));
    }
}

#[test]
fn characters_are_distinct_on_probes() {
    let fq = Fq::new(3, 1).unwrap();
    let spec = FamilySpec::full(3, 1, 2).unwrap();
    let members: Vec<PolyFq> = spec.enumerate(DEFAULT_CAP).unwrap().collect();
    let probes: Vec<PolyFq> = (1..=2)
        .flat_map(|e| (0..3).map(move |c| (e, c)))
        .map(|(e, c)| {
            let mut v = vec![0; e + 1];
            v[0] = 1;
            v[e] = fq.neg(c);
            PolyFq::new(v)
        })
        .collect();
    let mut signatures = HashSet::new();
    for f in &members {
        let chi = DirichletChar::of_member(&spec, f.clone(), 1).unwrap();
        let sig: Vec<CycloElem> = probes.iter().map(|g| chi.eval(g)).collect();
        assert!(signatures.insert(sig));
        // primitive: nontrivial on 1 - c x^d for some c
        assert!((0..3).any(|c| chi.eval(&PolyFq::new(vec![1, 0, fq.neg(c)])) != CycloElem::one(3)));
    }
    assert_eq!(signatures.len(), 6);
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = PolyFq> {
    proptest::collection::vec(0u32..9, 1..=max_deg + 1).prop_map(PolyFq::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn chi_is_multiplicative(g1 in poly_strategy(7), g2 in poly_strategy(7), k in 0u128..1458) {
        let fq = Fq::new(3, 2).unwrap();
        let spec = FamilySpec::full(3, 2, 4).unwrap();
        let f = spec.member(k % spec.size());
        let chi = DirichletChar::of_member(&spec, f, 2).unwrap();
        let prod = g1.mul(&g2, &fq);
        prop_assert_eq!(chi.eval(&prod), chi.eval(&g1) * chi.eval(&g2));
        // order p and even
        let c = g1.coeff(0);
        if c != 0 {
            prop_assert_eq!(chi.eval(&g1.scale(c, &fq)), chi.eval(&g1));
        }
    }
}

/// All units `g_1(x^p) g_2(x^2) mod x^D` by brute force.
fn subgroup_brute(fq: &Fq, dd: usize, even: bool) -> HashSet<Vec<u32>> {
    let q = fq.q();
    let p = fq.p() as usize;
    let gen = |step: usize| -> Vec<PolyFq> {
        let slots: Vec<usize> = (1..dd).filter(|i| i % step == 0).collect();
        let mut out = vec![];
        for idx in 0..(q as usize).pow(slots.len() as u32) {
            let mut v = vec![0u32; dd];
            v[0] = 1;
            let mut t = idx;
            for &s in &slots {
                v[s] = (t % q as usize) as u32;
                t /= q as usize;
            }
            out.push(PolyFq::new(v));
        }
        out
    };
    let ones = gen(p);
    let twos = if even { gen(2) } else { vec![PolyFq::one()] };
    let mut set = HashSet::new();
    for a in &ones {
        for b in &twos {
            let prod = a.mul_trunc(b, dd, fq);
            for c in 1..q {
                let mut v = prod.scale(c, fq).coeffs().to_vec();
                v.resize(dd, 0);
                set.insert(v);
            }
        }
    }
    set
}

#[test]
fn lifting_matches_subgroup_enumeration() {
    let fq = Fq::new(3, 1).unwrap();
    let dd = 5;
    for (absorb, even) in [(Absorb::PowerTimesEven, true), (Absorb::PowerOnly, false)] {
        let members = subgroup_brute(&fq, dd, even);
        let mut units = 0;
        for idx in 1..3u32.pow(dd as u32) {
            let mut v = vec![0u32; dd];
            let mut t = idx;
            for slot in v.iter_mut() {
                *slot = t % 3;
                t /= 3;
            }
            let h = PolyFq::new(v.clone());
            if v[0] == 0 {
                assert!(lift(&h, dd, &fq, absorb).is_err());
                continue;
            }
            units += 1;
            let w = lift(&h, dd, &fq, absorb).unwrap();
            assert_eq!(w.is_success(), members.contains(&v), "{h}");
            if w.is_success() {
                assert!(w.verify(&h, dd, &fq));
            }
        }
        assert_eq!(units, 162);
    }
}

#[test]
fn eta_subgroup_by_enumeration() {
    let fq = Fq::new(3, 1).unwrap();
    let mut cache = IrreducibleCache::new(fq.clone());
    let spec = SubgroupSpec::new(Selector::OddF, 3, 1, 5).unwrap();
    let members = subgroup_brute(&fq, 6, true);
    let brute = cache
        .degree(4)
        .unwrap()
        .iter()
        .filter(|h| {
            let mut v = h.truncate(6).coeffs().to_vec();
            v.resize(6, 0);
            members.contains(&v)
        })
        .count() as u64;
    assert_eq!(eta_subgroup(&spec, 4, 6, &mut cache).unwrap(), brute);
    assert_eq!(eta_subgroup(&spec, 1, 6, &mut cache).unwrap(), 0);
    // every irreducible g(x^2) is counted
    for h in cache.degree(4).unwrap().to_vec() {
        if h.coeffs().iter().enumerate().all(|(i, &c)| i % 2 == 0 || c == 0) {
            assert!(spec.orthogonal(&h, 6, 1, &fq).unwrap());
        }
    }
}

#[test]
fn dirichlet_average_equals_irreducible_oracle_for_full_family() {
    let fq = Fq::new(3, 1).unwrap();
    let mut cache = IrreducibleCache::new(fq);
    let spec = SubgroupSpec::new(Selector::PTorsionAll, 3, 1, 4).unwrap();
    for r in 1..=7 {
        assert_eq!(dirprop_average(&spec, r, &mut cache).unwrap(), prop_irr_oracle(4, r, &mut cache).unwrap(), "r={r}");
    }
    let spec = SubgroupSpec::new(Selector::PTorsionAll, 5, 1, 3).unwrap();
    let mut cache = IrreducibleCache::new(Fq::new(5, 1).unwrap());
    for r in 1..=5 {
        assert_eq!(dirprop_average(&spec, r, &mut cache).unwrap(), prop_irr_oracle(3, r, &mut cache).unwrap(), "r={r}");
    }
}

fn brute_average(spec: FamilySpec, r: usize) -> ExactValue {
    let data = FamilyData::compute(spec, r, DEFAULT_CAP).unwrap();
    ExactValue::new(-data.total(r, 1), data.len() as i128, -(r as i32), spec.q()).unwrap()
}

#[test]
fn dirprop_matches_odd_family() {
    let mut cache = IrreducibleCache::new(Fq::new(3, 1).unwrap());
    for d in [5, 7] {
        let spec = SubgroupSpec::new(Selector::OddF, 3, 1, d).unwrap();
        for r in 1..=4 {
            assert_eq!(dirprop_average(&spec, r, &mut cache).unwrap(), brute_average(spec.family(), r), "d={d} r={r}");
        }
    }
    let spec = SubgroupSpec::new(Selector::PTorsionAll, 3, 1, 5).unwrap();
    for r in 1..=6 {
        assert_eq!(dirprop_average(&spec, r, &mut cache).unwrap(), brute_average(spec.family(), r), "r={r}");
    }
}

#[test]
fn conjecture_probe_small() {
    let fq = Fq::new(3, 1).unwrap();
    let mut cache = IrreducibleCache::new(fq.clone());
    assert!(niceconj_probe(&fq, 24, 5, &mut cache).unwrap().is_empty());
    assert!(niceconj_probe(&fq, 8, 2, &mut cache).is_err());
    let fq5 = Fq::new(5, 1).unwrap();
    let mut cache5 = IrreducibleCache::new(fq5.clone());
    assert!(niceconj_probe(&fq5, 20, 4, &mut cache5).unwrap().is_empty());
}
