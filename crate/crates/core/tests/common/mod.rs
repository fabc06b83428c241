#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rapnc::model::{Family, NestedInstance, ObjectiveSpec};

pub const FAMILIES: [Family; 5] = [Family::Linear, Family::Quadratic, Family::F, Family::Crash, Family::Fuel];

pub fn objective<R: Rng>(family: Family, n: usize, rng: &mut R) -> ObjectiveSpec {
    let mut draw = |lo: f64, hi: f64| -> Vec<f64> { (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect() };
    match family {
        Family::Linear => ObjectiveSpec::Linear { p: draw(-5.0, 5.0).into_iter().map(f64::round).collect() },
        Family::Quadratic => {
            let w = draw(0.0, 3.0);
            let t = draw(-2.0, 6.0);
            ObjectiveSpec::Quadratic { w, t }
        }
        Family::F => ObjectiveSpec::F { p: draw(-30.0, 30.0) },
        Family::Crash => {
            let k = draw(0.0, 2.0);
            let p = draw(0.1, 5.0);
            ObjectiveSpec::Crash { k, p }
        }
        Family::Fuel => {
            let p = draw(0.1, 3.0);
            let c = draw(0.5, 4.0);
            ObjectiveSpec::Fuel { p, c }
        }
        Family::Custom => unreachable!(),
    }
}

/// Small feasible integer instance: n <= max_n, m <= max_m, total <= max_total.
pub fn small_integer(family: Family, seed: u64, max_n: usize, max_m: usize, max_total: i64) -> NestedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=n.min(max_m));
    let mut cuts: Vec<usize> = (1..n).collect();
    for i in 0..cuts.len() {
        let j = rng.random_range(i..cuts.len());
        cuts.swap(i, j);
    }
    let mut sigma: Vec<usize> = cuts[..m - 1].to_vec();
    sigma.sort_unstable();
    sigma.push(n);
    let floor = if matches!(family, Family::Crash | Family::Fuel) { 1 } else { 0 };
    let (c, d, x) = loop {
        let c: Vec<i64> = (0..n).map(|_| floor + rng.random_range(0..=2)).collect();
        let d: Vec<i64> = c.iter().map(|&c| c + rng.random_range(0..=4)).collect();
        let x: Vec<i64> = c.iter().zip(&d).map(|(&c, &d)| rng.random_range(c..=d)).collect();
        if x.iter().sum::<i64>() <= max_total {
            break (c, d, x);
        }
    };
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for (j, &s) in sigma.iter().enumerate() {
        let p: i64 = x[..s].iter().sum();
        if j + 1 == m {
            a.push(p as f64);
            b.push(p as f64);
        } else {
            a.push((p - rng.random_range(0..=3)) as f64);
            b.push((p + rng.random_range(0..=3)) as f64);
        }
    }
    let f = |v: Vec<i64>| v.into_iter().map(|x| x as f64).collect::<Vec<_>>();
    let obj = objective(family, n, &mut rng);
    NestedInstance::new(sigma, a, b, f(c), f(d), obj)
}

pub fn same_objective(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0)
}
