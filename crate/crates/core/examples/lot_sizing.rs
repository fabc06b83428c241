//! Production planning with inventory caps, solved as a nested allocation.
//!
//! cargo run --example lot_sizing

use rapnc::mda::solve_integer;
use rapnc::model::ObjectiveSpec;
use rapnc::reductions::{lot_sizing_to_rapnc, LotSizingInstance};

fn main() -> rapnc::Result<()> {
    // Production gets more expensive in later periods; holding stock costs 1
    // per unit and period, and the warehouse holds at most 4 units.
    let ls = LotSizingInstance {
        demand: vec![3.0, 2.0, 4.0, 1.0, 5.0],
        initial_inventory: 1.0,
        inventory_cap: vec![4.0; 5],
        production_cap: vec![6.0, 6.0, 3.0, 6.0, 3.0],
        production_cost: ObjectiveSpec::Quadratic { w: vec![0.5, 0.6, 0.8, 1.0, 1.2], t: vec![0.0; 5] },
        holding_cost: vec![1.0; 5],
    };
    let red = lot_sizing_to_rapnc(&ls)?;
    let alloc = solve_integer(&red.instance)?;
    let plan = &alloc.x[..ls.periods()];
    println!("production = {plan:?}");
    println!("inventory  = {:?}", ls.inventories(plan));
    println!("cost = {} (solver {} + offset {})", ls.cost(plan), alloc.objective_value, red.offset);
    Ok(())
}
