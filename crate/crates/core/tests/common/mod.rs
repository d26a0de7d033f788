#![allow(dead_code)]

use rand::Rng;
use selectorkit::setalg::{BasicSet, GeneralizedSet};
use selectorkit::svf::CellwiseSpec;
use selectorkit::Dyadic;

pub fn d(s: &str) -> Dyadic {
    s.parse().unwrap()
}

/// Dyadic `k / 2^bits`.
pub fn frac(k: i64, bits: i64) -> Dyadic {
    Dyadic::new(k, -bits)
}

/// Sorted interior breakpoints of `[0,1]` on the `1/16` lattice.
fn breaks(rng: &mut impl Rng, max: usize) -> Vec<i64> {
    let mut b: Vec<i64> = (0..rng.gen_range(0..=max)).map(|_| rng.gen_range(1..16)).collect();
    b.sort_unstable();
    b.dedup();
    b
}

/// Axis intervals tiling `[0,1]`, each breakpoint closed on a random side.
fn axis_tiles(rng: &mut impl Rng, max: usize) -> Vec<(Dyadic, Dyadic, bool, bool)> {
    let b = breaks(rng, max);
    let mut pts = vec![0];
    pts.extend(&b);
    pts.push(16);
    let owner: Vec<bool> = (0..pts.len()).map(|_| rng.gen()).collect();
    (0..pts.len() - 1)
        .map(|i| {
            let cl = i == 0 || !owner[i];
            let ch = i + 2 == pts.len() || owner[i + 1];
            (frac(pts[i], 4), frac(pts[i + 1], 4), cl, ch)
        })
        .collect()
}

/// Closed value set in `[0,1]^beta` on the `1/64` lattice.
fn value_set(rng: &mut impl Rng, beta: usize, small: bool) -> GeneralizedSet<Dyadic> {
    let parts = (0..rng.gen_range(1..=3))
        .map(|_| {
            if rng.gen_bool(0.5) {
                let p: Vec<Dyadic> = (0..beta).map(|_| frac(rng.gen_range(0..=64), 6)).collect();
                BasicSet::singleton(&p)
            } else {
                let span = if small { 1 } else { 16 };
                let lo: Vec<i64> = (0..beta).map(|_| rng.gen_range(0..=64 - span)).collect();
                let hi: Vec<i64> = lo.iter().map(|l| l + rng.gen_range(1..=span)).collect();
                let lo: Vec<Dyadic> = lo.iter().map(|&v| frac(v, 6)).collect();
                let hi: Vec<Dyadic> = hi.iter().map(|&v| frac(v, 6)).collect();
                BasicSet::closed_box(&lo, &hi).unwrap()
            }
        })
        .collect();
    GeneralizedSet::new(beta, parts).unwrap()
}

/// Random cellwise map on `[0,1]^dim` with values in `[0,1]^beta`.
/// With `small` set, value boxes have sides of at most `1/64`.
pub fn random_cellwise(rng: &mut impl Rng, dim: usize, beta: usize, max_breaks: usize, small: bool) -> CellwiseSpec<Dyadic> {
    let tiles: Vec<_> = (0..dim).map(|_| axis_tiles(rng, max_breaks)).collect();
    let mut cells = vec![(vec![], vec![], vec![], vec![])];
    for t in &tiles {
        cells = cells
            .into_iter()
            .flat_map(|(lo, hi, cl, ch)| {
                t.iter().map(move |(a, b, l, h)| {
                    let (mut lo, mut hi, mut cl, mut ch): (Vec<Dyadic>, Vec<Dyadic>, Vec<bool>, Vec<bool>) =
                        (lo.clone(), hi.clone(), cl.clone(), ch.clone());
                    lo.push(a.clone());
                    hi.push(b.clone());
                    cl.push(*l);
                    ch.push(*h);
                    (lo, hi, cl, ch)
                })
            })
            .collect();
    }
    let unit = |n: usize| BasicSet::closed_box(&vec![d("0"); n], &vec![d("1"); n]).unwrap();
    CellwiseSpec {
        domain: unit(dim),
        range: unit(beta),
        scale: d("1"),
        cells: cells
            .into_iter()
            .map(|(lo, hi, cl, ch)| (BasicSet::with_flags(&lo, &hi, &cl, &ch).unwrap(), value_set(rng, beta, small)))
            .collect(),
    }
}

pub fn desk_spec() -> CellwiseSpec<Dyadic> {
    let iv = |lo: &str, hi: &str, cl: bool, ch: bool| BasicSet::with_flags(&[d(lo)], &[d(hi)], &[cl], &[ch]).unwrap();
    let pts = |v: &[&str]| GeneralizedSet::new(1, v.iter().map(|s| BasicSet::singleton(&[d(s)])).collect()).unwrap();
    CellwiseSpec {
        domain: iv("0", "1", true, true),
        range: iv("0", "1", true, true),
        scale: d("1"),
        cells: vec![
            (iv("0", "1/2", true, true), pts(&["1/4"])),
            (iv("1/2", "1", false, true), pts(&["1/4", "3/4"])),
        ],
    }
}
