mod common;

use common::{d, desk_spec, random_cellwise};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selectorkit::domain::BudgetRule;
use selectorkit::setalg::BasicSet;
use selectorkit::svf::{
    build_cellwise, build_sampled, filippov_regularize, sublevel_domains, FilippovSpec, GridCell, Net,
    SampledSpec, ValueSet,
};
use selectorkit::{Dyadic, Error, Scalar};

/// Minimum distance to a dense sample of the value set at spacing `res`.
fn brute_distance(values: &ValueSet<Dyadic>, r: &[f64], res: f64) -> f64 {
    let ValueSet::Exact(set) = values else { unreachable!() };
    let mut best = f64::INFINITY;
    for part in set.parts() {
        let lo: Vec<f64> = part.lo().unwrap().iter().map(Scalar::as_f64).collect();
        let hi: Vec<f64> = part.hi().unwrap().iter().map(Scalar::as_f64).collect();
        let counts: Vec<usize> = lo.iter().zip(&hi).map(|(a, b)| ((b - a) / res).ceil() as usize).collect();
        let total: usize = counts.iter().map(|c| c + 1).product();
        for mut f in 0..total {
            let mut s = 0.0;
            for k in 0..lo.len() {
                let i = f % (counts[k] + 1);
                f /= counts[k] + 1;
                let v = if counts[k] == 0 {
                    lo[k]
                } else {
                    lo[k] + (hi[k] - lo[k]) * i as f64 / counts[k] as f64
                };
                s += (v - r[k]) * (v - r[k]);
            }
            best = best.min(s.sqrt());
        }
    }
    best
}

fn random_point(rng: &mut impl Rng, n: usize) -> Vec<Dyadic> {
    (0..n).map(|_| Dyadic::from_f64(rng.gen::<f64>()).unwrap()).collect()
}

#[test]
fn cellwise_distance_matches_dense_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (dim, beta, small) in [(1, 1, false), (2, 1, false), (1, 2, true)] {
        for _ in 0..8 {
            let f = build_cellwise(random_cellwise(&mut rng, dim, beta, 3, small)).unwrap();
            for _ in 0..40 {
                let x = random_point(&mut rng, dim);
                let r = random_point(&mut rng, beta);
                let exact = f.distance(&r, &x).unwrap();
                let cell = f.locate(&x).unwrap();
                let rf: Vec<f64> = r.iter().map(Scalar::as_f64).collect();
                let brute = brute_distance(f.values(cell).unwrap(), &rf, 1e-4);
                assert!((exact - brute).abs() <= 1e-4, "{exact} vs {brute}");
            }
        }
    }
}

#[test]
fn desk_distances() {
    let f = build_cellwise(desk_spec()).unwrap();
    assert_eq!(f.distance(&[d("1/4")], &[d("1/8")]).unwrap(), 0.0);
    assert_eq!(f.distance(&[d("3/8")], &[d("1/8")]).unwrap(), 0.125);
    let r = Dyadic::from_f64(0.7).unwrap();
    assert!((f.distance(&[r], &[d("13/16")]).unwrap() - 0.05).abs() < 1e-15);
    assert!(matches!(f.distance(&[d("0")], &[d("-1/2")]), Err(Error::InvalidSet(_))));
}

fn smooth(x: &[f64]) -> f64 {
    0.5 + 0.3 * (2.0 * x[0] + x[1]).sin()
}

fn sampled_smooth(step: f64) -> selectorkit::svf::RepresentableSvf<f64> {
    let lip = 0.3 * 5f64.sqrt();
    let spec = SampledSpec {
        domain: BasicSet::closed_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap(),
        step,
        range: Some(BasicSet::closed_box(&[0.0], &[1.0]).unwrap()),
        scale: 1.0,
    };
    build_sampled(spec, |c: &GridCell<f64>| {
        Some(Net {
            points: vec![vec![smooth(&c.center)]],
            radius: lip * step * 2f64.sqrt() / 2.0,
        })
    })
    .unwrap()
}

#[test]
fn sampled_sublevels_are_sound() {
    let f = sampled_smooth(1.0 / 32.0);
    let tau = *f.slack();
    let delta = 0.125;
    let centers = vec![vec![0.0], vec![1.0], vec![0.5]];
    let fam = sublevel_domains(&f, &centers, &delta).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut accepted, mut rejected) = (0, 0);
    for _ in 0..1000 {
        let x = [rng.gen::<f64>(), rng.gen::<f64>()];
        let cell = f.locate(&x).unwrap();
        let mut any = false;
        for (i, r) in centers.iter().enumerate() {
            let truth = (smooth(&x) - r[0]).abs();
            if fam.members(i).contains(&cell) {
                any = true;
                accepted += 1;
                assert!(f.distance(r, &x).unwrap() <= delta + tau + 1e-12);
                assert!(truth <= delta + 2.0 * tau + 1e-12);
            } else {
                assert!(f.distance(r, &x).unwrap() > delta - tau);
                assert!(truth > delta - 1e-12);
            }
        }
        rejected += usize::from(!any);
    }
    assert!(accepted > 0 && rejected > 0);
}

#[test]
fn sampled_sublevels_refuse_coarse_nets() {
    let f = sampled_smooth(0.5);
    let err = sublevel_domains(&f, &[vec![0.5]], &(f.slack() / 2.0)).unwrap_err();
    assert!(matches!(err, Error::PrecisionUnattainable { .. }));
}

#[test]
fn saturated_and_empty_sublevels() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = build_cellwise(random_cellwise(&mut rng, 2, 1, 3, false)).unwrap();
    let all = sublevel_domains(&f, &[vec![d("1/2")]], &d("2")).unwrap();
    assert_eq!(all.members(0).len(), f.cell_count());
    let spec = desk_spec();
    let g = build_cellwise(spec).unwrap();
    let none = sublevel_domains(&g, &[vec![d("1")], vec![d("1/2")]], &d("1/16")).unwrap();
    assert!(none.members(0).is_empty() && none.members(1).is_empty());
    assert!(none.union_domain(&g, BudgetRule::Geometric).unwrap().witness_set(&d("1/4")).unwrap().is_empty());
}

#[test]
fn filippov_sign_field() {
    let spec = FilippovSpec {
        domain: BasicSet::closed_box(&[-1.0], &[1.0]).unwrap(),
        step: 1.0 / 8.0,
        range: Some(BasicSet::closed_box(&[-1.0], &[1.0]).unwrap()),
        scale: 1.0,
        hull_steps: 9,
    };
    let f = filippov_regularize(spec, |_| vec![1.0], |_| vec![-1.0], |x| x[0]).unwrap();
    let at = |x: f64| -> Vec<f64> {
        let v = f.values(f.locate(&[x]).unwrap()).unwrap();
        v.points().iter().map(|p| f.range().denormalize(p)[0]).collect()
    };
    assert_eq!(at(1.0), vec![-1.0]);
    let hull = at(0.0);
    assert_eq!(hull.len(), 9);
    assert_eq!(hull.first(), Some(&1.0));
    assert_eq!(hull.last(), Some(&-1.0));
    // every point of [-1, 1] is within the declared radius of the net
    let tau = f.slack() / f.range().max_stretch();
    for k in 0..=200 {
        let y = -1.0 + k as f64 / 100.0;
        let gap = hull.iter().map(|h| (h - y).abs()).fold(f64::INFINITY, f64::min);
        assert!(gap <= tau + 1e-12);
    }
}

fn mesh(beta: usize) -> Vec<Vec<Dyadic>> {
    let mut out = vec![vec![]];
    for _ in 0..beta {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Dyadic>| {
                (0..=8).map(move |k| {
                    let mut q = p.clone();
                    q.push(Dyadic::new(k, -3));
                    q
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cellwise_sublevel_union_is_representable(seed in any::<u64>(), dim in 1usize..=2, beta in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = build_cellwise(random_cellwise(&mut rng, dim, beta, 2, false)).unwrap();
        let fam = sublevel_domains(&f, &mesh(beta), &d("1/8")).unwrap();
        for rule in [BudgetRule::Geometric, BudgetRule::Equal] {
            let dom = fam.union_domain(&f, rule).unwrap();
            for eps in ["1/4", "1/256"] {
                let rep = dom.verify(&d(eps)).unwrap();
                prop_assert!(rep.passes(), "{rep:?}");
                prop_assert!(rep.margin.unwrap() > 0.0);
            }
        }
        // each member cell really is within δ
        for (i, r) in fam.centers().iter().enumerate() {
            for &c in fam.members(i) {
                let dist2 = f.values(c).unwrap().dist2(r).unwrap();
                prop_assert!(dist2 <= d("1/64"));
            }
        }
    }
}
