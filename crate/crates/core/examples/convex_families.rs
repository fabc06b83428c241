//! One generated instance per objective family, solved on the integer grid
//! and approximately in continuous mode.
//!
//! cargo run --example convex_families -- [n]

use rapnc::bench::{gen_instance, GenSpec};
use rapnc::mda::{solve_continuous, solve_scaled};
use rapnc::model::{check_feasibility, Family, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2_000);
    for family in Family::PARAMETRIC {
        let inst = gen_instance(GenSpec { n, m: n / 4, seed: 42, family })?;
        let grid = solve_scaled(&inst, 1e6, &SolverConfig::default())?;
        let cont = solve_continuous(&inst, 1e-6)?;
        let worst = check_feasibility(&inst, &cont.x, 0.0).worst();
        println!(
            "{family:<9} scaled {:>14.6}  continuous {:>14.6}  residual {worst:.1e}  solves {}",
            grid.objective_value, cont.objective_value, cont.stats.rap_solves
        );
    }
    Ok(())
}
