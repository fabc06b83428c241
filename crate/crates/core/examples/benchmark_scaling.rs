//! Times generated instances at growing sizes and fits a power law per family.
//!
//! cargo run --release --example benchmark_scaling -- [max_n] [families...]

use std::time::Duration;

use rapnc::bench::{run_benchmark, BenchConfig, Constraints};
use rapnc::model::Family;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let max_n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100_000);
    let families: Vec<Family> = args.map(|s| s.parse()).collect::<Result<_, _>>()?;
    let families = if families.is_empty() { vec![Family::Linear, Family::F] } else { families };

    let sizes: Vec<usize> = [1_000, 10_000, 100_000, 1_000_000].into_iter().filter(|&n| n <= max_n).collect();
    let cfg = BenchConfig { sizes, families, repeats: 1, constraints: Constraints::EqualToN, min_time: Duration::from_millis(200), ..BenchConfig::default() };
    let report = run_benchmark(&cfg, |r| {
        println!("{:>8} {:>8} {:<9} {:>10.4}s  solves={} shortcuts={}", r.n, r.m, r.family, r.time_seconds, r.rap_solves, r.shortcut_hits)
    })?;
    for fit in &report.fits {
        println!("{}: t ~ {:.3e} * n^{:.3}", fit.family, fit.alpha, fit.beta);
    }
    Ok(())
}
