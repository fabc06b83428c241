//! Weighted projection onto a nested box-and-budget set, solved exactly in
//! floating point, and the same instance on an integer grid.
//!
//! cargo run --example continuous_quadratic

use rapnc::mda::{solve_continuous, solve_integer};
use rapnc::model::{evaluate, NestedInstance, ObjectiveSpec};

fn main() -> rapnc::Result<()> {
    let t = vec![0.7, 2.9, 1.4, 0.2, 2.2, 1.1];
    let w = vec![1.0, 0.5, 2.0, 1.0, 1.5, 1.0];
    let inst = NestedInstance::full_nesting(
        vec![0.0, 1.0, 2.0, 3.0, 5.0, 7.0],
        vec![2.0, 4.0, 5.0, 6.0, 7.0, 7.0],
        vec![0.0; 6],
        vec![3.0; 6],
        ObjectiveSpec::Quadratic { w, t },
    );
    let real = solve_continuous(&inst, 1e-9)?;
    println!("continuous x = {:.6?}", real.x);
    println!("continuous cost = {:.9}", real.objective_value);

    let int = solve_integer(&inst)?;
    println!("integer x    = {:?}", int.x);
    println!("integer cost = {:.9}", evaluate(&inst.objective, &int.x)?);
    Ok(())
}
