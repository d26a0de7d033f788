mod common;

use common::{d, desk_spec, random_cellwise};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selectorkit::selector::json::chain_from_str;
use selectorkit::selector::{cauchy_report, extract, regular_mesh, EvalResult, SelectorChain, Undefined};
use selectorkit::setalg::{countable_reduction, BasicSet, GeneralizedSet, Pairing, SetSequence};
use selectorkit::svf::{build_cellwise, build_sampled, CellwiseSpec, GridCell, Net, SampledSpec};
use selectorkit::{Dyadic, Error, Scalar};

/// Squared distance from `r` to the closure of a box, by clamping.
fn box_dist2(b: &BasicSet<Dyadic>, r: &[Dyadic]) -> Dyadic {
    let (lo, hi) = (b.lo().unwrap(), b.hi().unwrap());
    let mut s = Dyadic::from_int(0);
    for k in 0..r.len() {
        let g = if r[k] < lo[k] {
            lo[k].clone() - r[k].clone()
        } else if r[k] > hi[k] {
            r[k].clone() - hi[k].clone()
        } else {
            Dyadic::from_int(0)
        };
        s = s + g.clone() * g;
    }
    s
}

fn set_dist2(s: &GeneralizedSet<Dyadic>, r: &[Dyadic]) -> Dyadic {
    s.parts().iter().map(|b| box_dist2(b, r)).min_by(|a, b| a.partial_cmp(b).unwrap()).unwrap()
}

fn vec_dist2(a: &[Dyadic], b: &[Dyadic]) -> Dyadic {
    a.iter().zip(b).fold(Dyadic::from_int(0), |s, (x, y)| {
        let t = x.clone() - y.clone();
        s + t.clone() * t
    })
}

fn same_set(a: &GeneralizedSet<Dyadic>, b: &GeneralizedSet<Dyadic>) -> bool {
    a.is_subset_of(b) && b.is_subset_of(a)
}

/// Literal construction: every mesh point against every cell, `C ∩ D`,
/// then the countable reduction of the whole family in mesh order.
/// Values are scaled into normalized coordinates by `scale`.
fn brute_force(spec: &CellwiseSpec<Dyadic>, n: u32) -> Vec<Vec<(Vec<Dyadic>, GeneralizedSet<Dyadic>)>> {
    let dim = spec.domain.dim();
    let beta = spec.range.dim();
    let values: Vec<GeneralizedSet<Dyadic>> =
        spec.cells.iter().map(|(_, v)| v.map(|t| t.clone() * spec.scale.clone())).collect();
    let whole = GeneralizedSet::new(dim, spec.cells.iter().map(|(c, _)| c.clone()).collect()).unwrap();
    let mut levels = vec![vec![(vec![Dyadic::from_int(0); beta], whole)]];
    for k in 2..=n {
        let prev = levels.last().unwrap().clone();
        let bound = Dyadic::pow2(-(k as i64));
        let step = Dyadic::pow2(-(k as i64) + 1);
        let mut family = Vec::new();
        let mut centers = Vec::new();
        for r in regular_mesh::<Dyadic>(k, beta) {
            let c_parts: Vec<BasicSet<Dyadic>> = spec
                .cells
                .iter()
                .zip(&values)
                .filter(|(_, v)| set_dist2(v, &r) < bound.clone() * bound.clone())
                .map(|((cell, _), _)| cell.clone())
                .collect();
            let c_set = GeneralizedSet::new(dim, c_parts).unwrap();
            let d_parts: Vec<BasicSet<Dyadic>> = prev
                .iter()
                .filter(|(v, _)| vec_dist2(v, &r) < step.clone() * step.clone())
                .flat_map(|(_, q)| q.parts().to_vec())
                .collect();
            let d_set = GeneralizedSet::new(dim, d_parts).unwrap();
            family.push(c_set.intersect(&d_set).unwrap());
            centers.push(r);
        }
        let reduced = countable_reduction(&SetSequence::new(dim, family, Pairing::RowMajor).unwrap());
        let pieces = centers
            .into_iter()
            .zip(reduced.items().iter().cloned())
            .filter(|(_, q)| q.parts().iter().any(|p| !p.is_empty()))
            .collect();
        levels.push(pieces);
    }
    levels
}

fn compare_with_oracle(spec: CellwiseSpec<Dyadic>, n: u32) -> std::result::Result<(), TestCaseError> {
    let oracle = brute_force(&spec, n);
    let f = build_cellwise(spec).unwrap();
    let chain = match extract(&f, n, &Dyadic::pow2(-6)) {
        Ok(c) => c,
        // the literal construction must then leave some cell uncovered
        Err(Error::MeshGuarantee { level, .. }) => {
            let lvl = &oracle[level as usize - 1];
            let covered = GeneralizedSet::new(f.dim(), lvl.iter().flat_map(|(_, q)| q.parts().to_vec()).collect()).unwrap();
            prop_assert!(!GeneralizedSet::from_part(f.domain().clone()).is_subset_of(&covered));
            return Ok(());
        }
        Err(e) => panic!("{e}"),
    };
    for k in 1..=n {
        let ours = chain.pieces(k);
        let theirs = &oracle[k as usize - 1];
        prop_assert_eq!(ours.pieces().len(), theirs.len(), "level {}", k);
        for (p, (v, q)) in ours.pieces().iter().zip(theirs) {
            prop_assert_eq!(&p.value, v);
            prop_assert!(same_set(&p.set, q), "level {} value {:?}", k, v);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn matches_brute_force_oracle(seed in any::<u64>(), dim in 1usize..=2, beta in 1usize..=2, n in 2u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = random_cellwise(&mut rng, dim, beta, if dim == 1 { 3 } else { 1 }, false);
        // keep every value inside the ball B(0, 1/2) the first step needs
        spec.scale = d("1/4");
        prop_assert!(spec.cells.len() <= 4);
        compare_with_oracle(spec, n)?;
    }

    #[test]
    fn chain_contracts_and_cauchy(seed in any::<u64>(), dim in 1usize..=2, beta in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = random_cellwise(&mut rng, dim, beta, 3, false);
        spec.scale = d("1/4");
        let f = build_cellwise(spec).unwrap();
        let chain = extract(&f, 6, &Dyadic::pow2(-8)).unwrap();
        for k in 2..=6u32 {
            let (prev, cur) = (chain.step(k - 1), chain.step(k));
            for c in 0..f.cell_count() {
                let v: Vec<Dyadic> = cur.value(c).unwrap();
                let e = f.values(c).unwrap().dist2(&v).unwrap();
                prop_assert!(e < Dyadic::pow2(-2 * k as i64));
                let p: Vec<Dyadic> = prev.value(c).unwrap();
                prop_assert!(vec_dist2(&v, &p) < Dyadic::pow2(-2 * (k as i64 - 1)));
            }
            prop_assert!(cur.certificate().dom_monotone);
        }
        for entry in cauchy_report(&chain) {
            prop_assert!(entry.passes, "{:?}", entry);
        }
    }
}

/// True desk map, `F(x) = {1/4}` on `[0, 1/2]` and `{1/4, 3/4}` above.
fn desk_truth(x: f64, r: f64) -> f64 {
    if x <= 0.5 {
        (r - 0.25).abs()
    } else {
        (r - 0.25).abs().min((r - 0.75).abs())
    }
}

#[test]
fn desk_chains_meet_their_bounds() {
    let f = build_cellwise(desk_spec()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let probes: Vec<Dyadic> = (0..10_000).map(|_| Dyadic::from_f64(rng.gen::<f64>()).unwrap()).collect();
    for n in 2..=6u32 {
        let eps = Dyadic::pow2(-10);
        let chain = extract(&f, n, &eps).unwrap();
        let ev = chain.evaluator(&eps).unwrap();
        let mut sup: f64 = 0.0;
        let mut defined = 0;
        for x in &probes {
            if let EvalResult::Value(v) = ev.eval(std::slice::from_ref(x)) {
                defined += 1;
                sup = sup.max(desk_truth(x.as_f64(), v[0].as_f64()));
                for k in 2..=n {
                    let a = chain.value_at(k, std::slice::from_ref(x)).unwrap();
                    let b = chain.value_at(k - 1, std::slice::from_ref(x)).unwrap();
                    assert!((a[0].as_f64() - b[0].as_f64()).abs() < 0.5f64.powi(k as i32 - 1));
                }
            }
        }
        assert!(defined > 9_900, "{defined}");
        assert!(sup < 0.5f64.powi(n as i32), "n = {n}: {sup}");
    }
}

#[test]
fn desk_eval_examples() {
    let f = build_cellwise(desk_spec()).unwrap();
    let chain = extract(&f, 2, &d("1/64")).unwrap();
    let ev = chain.evaluator(&d("1/64")).unwrap();
    let x = Dyadic::from_f64(0.3).unwrap();
    assert_eq!(ev.eval(&[x]), EvalResult::Value(vec![d("1/8")]));
    assert_eq!(ev.eval(&[d("1")]), EvalResult::Undefined(Undefined::InsideWitness));
    assert_eq!(ev.eval(&[d("-1/4")]), EvalResult::Undefined(Undefined::OutsideDomain));
}

fn constant_spec(c: &str) -> CellwiseSpec<Dyadic> {
    let unit = BasicSet::closed_box(&[d("0"), d("0")], &[d("1"), d("1")]).unwrap();
    CellwiseSpec {
        domain: unit.clone(),
        range: BasicSet::closed_box(&[d("0")], &[d("1")]).unwrap(),
        scale: d("1/2"),
        cells: vec![(unit, GeneralizedSet::from_part(BasicSet::singleton(&[d(c)])))],
    }
}

#[test]
fn constant_maps() {
    let zero = extract(&build_cellwise(constant_spec("0")).unwrap(), 8, &d("1/8")).unwrap();
    for k in 1..=8 {
        assert_eq!(zero.step(k).value::<Dyadic>(0), Some(vec![d("0")]));
    }
    // 0.6 in original units is 0.3 after scaling by 1/2
    let c = Dyadic::from_f64(0.6).unwrap();
    let spec = CellwiseSpec {
        cells: vec![(constant_spec("0").cells[0].0.clone(), GeneralizedSet::from_part(BasicSet::singleton(&[c])))],
        ..constant_spec("0")
    };
    let chain = extract(&build_cellwise(spec).unwrap(), 10, &d("1/8")).unwrap();
    for k in 2..=10u32 {
        let v: Vec<f64> = chain.step(k).value::<Dyadic>(0).unwrap().iter().map(Scalar::as_f64).collect();
        assert!((v[0] - 0.3).abs() < 0.5f64.powi(k as i32));
        assert_eq!(chain.step(k).certificate().pieces, 1);
    }
}

#[test]
fn base_step_needs_the_half_ball() {
    let mut spec = constant_spec("1");
    spec.scale = d("1");
    let err = extract(&build_cellwise(spec).unwrap(), 3, &d("1/8")).unwrap_err();
    assert!(matches!(err, Error::MeshGuarantee { level: 1, .. }));
}

fn smooth(x: &[f64]) -> f64 {
    0.5 + 0.3 * (2.0 * x[0] + x[1]).sin()
}

#[test]
fn sampled_chain_meets_its_bounds() {
    let step = 1.0 / 128.0;
    let spec = SampledSpec {
        domain: BasicSet::closed_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap(),
        step,
        range: Some(BasicSet::closed_box(&[0.0], &[1.0]).unwrap()),
        scale: 0.5,
    };
    let radius = 0.3 * 5f64.sqrt() * step * 2f64.sqrt() / 2.0;
    let f = build_sampled(spec, |c: &GridCell<f64>| {
        Some(Net {
            points: vec![vec![smooth(&c.center)]],
            radius,
        })
    })
    .unwrap();
    let n = 4;
    let chain = extract(&f, n, &(1.0 / 64.0)).unwrap();
    let tau = *f.slack();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10_000 {
        let x = [rng.gen::<f64>(), rng.gen::<f64>()];
        let v = chain.value_at(n, &x).unwrap();
        // distance in normalized units to the true value
        let truth = (v[0] - 0.5 * smooth(&x)).abs();
        assert!(truth < 0.5f64.powi(n as i32) + 2.0 * tau);
    }
    let err = extract(&f, 10, &(1.0 / 64.0)).unwrap_err();
    assert!(matches!(err, Error::PrecisionUnattainable { .. }));
}

fn run_with_threads(threads: usize) -> SelectorChain<Dyadic> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut spec = random_cellwise(&mut rng, 2, 2, 8, false);
    spec.scale = d("1/4");
    let f = build_cellwise(spec).unwrap();
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| extract(&f, 7, &d("1/32")).unwrap())
}

#[test]
fn extraction_is_deterministic() {
    let a = run_with_threads(1);
    let b = run_with_threads(4);
    let (ta, tb) = (serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(ta == tb && a == b, "parallel runs differ");
    let back: SelectorChain<Dyadic> = chain_from_str(&ta).unwrap();
    assert_eq!(back, a);
}
