//! Compares the decomposition solver with the dynamic-programming oracle on
//! random small integer instances.
//!
//! cargo run --example oracle_crosscheck -- [count]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rapnc::mda::solve_integer;
use rapnc::model::{NestedInstance, ObjectiveSpec};
use rapnc::oracle::dp_solve;

fn random_instance(rng: &mut ChaCha8Rng) -> NestedInstance {
    let n = rng.random_range(2..=8);
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(1..=4) as f64).collect();
    let x: Vec<f64> = d.iter().map(|&d| rng.random_range(0..=d as i64) as f64).collect();
    let mut prefix = 0.0;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, xi) in x.iter().enumerate() {
        prefix += xi;
        let last = i + 1 == n;
        a.push(if last { prefix } else { (prefix - rng.random_range(0..=2) as f64).max(0.0) });
        b.push(if last { prefix } else { prefix + rng.random_range(0..=2) as f64 });
    }
    let p: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
    NestedInstance::full_nesting(a, b, vec![0.0; n], d, ObjectiveSpec::F { p })
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let count: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1_000);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let inst = random_instance(&mut rng);
        let got = solve_integer(&inst)?.objective_value;
        let want = dp_solve(&inst)?.objective_value;
        worst = worst.max((got - want).abs() / want.abs().max(1.0));
    }
    println!("{count} instances, largest relative gap {worst:.2e}");
    Ok(())
}
