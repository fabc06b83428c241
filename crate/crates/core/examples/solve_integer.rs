//! Integer allocation under nested prefix bounds.
//!
//! cargo run --example solve_integer

use rapnc::mda::{rap_solve_bound, solve_integer};
use rapnc::model::{check_feasibility, NestedInstance, ObjectiveSpec};

fn main() -> rapnc::Result<()> {
    // Five jobs, cumulative budgets after jobs 2, 4 and 5. The first two jobs
    // together may use between 3 and 6 units, the first four between 8 and 10,
    // and all five exactly 12.
    let inst = NestedInstance::new(
        vec![2, 4, 5],
        vec![3.0, 8.0, 12.0],
        vec![6.0, 10.0, 12.0],
        vec![0.0; 5],
        vec![5.0, 5.0, 4.0, 4.0, 6.0],
        ObjectiveSpec::Quadratic { w: vec![1.0, 2.0, 1.0, 0.5, 3.0], t: vec![4.0, 1.0, 3.0, 5.0, 2.0] },
    );
    let alloc = solve_integer(&inst)?;
    println!("x = {:?}", alloc.x);
    println!("cost = {}", alloc.objective_value);
    println!("feasibility: {:?}", check_feasibility(&inst, &alloc.x, 0.0));
    println!("single-constraint solves: {} (bound {})", alloc.stats.rap_solves, rap_solve_bound(inst.m()));
    Ok(())
}
