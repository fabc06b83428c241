//! Vessel speeds along a route with arrival windows. Fuel per leg is the
//! distance times a cubic in speed; below the cheapest speed the cost is
//! flattened so slack time can be spent waiting.
//!
//! cargo run --example speed_optimization

use rapnc::mda::solve_continuous;
use rapnc::reductions::{speed_opt_to_rapnc, FuelCurve, SpeedOptInstance};

fn main() -> rapnc::Result<()> {
    let so = SpeedOptInstance {
        legs: vec![120.0, 300.0, 80.0, 210.0],
        windows: vec![(0.0, 0.0), (8.0, 12.0), (30.0, 34.0), (34.0, 40.0), (52.0, 60.0)],
        v_min: 8.0,
        v_max: 22.0,
        fuel: vec![
            FuelCurve::Power { k: 0.002, exponent: 3.0 },
            FuelCurve::Hotel { k: 0.002, h: 4.0 },
            FuelCurve::Power { k: 0.002, exponent: 3.0 },
            FuelCurve::Hotel { k: 0.002, h: 4.0 },
        ],
    };
    let inst = speed_opt_to_rapnc(&so)?;
    let alloc = solve_continuous(&inst, 1e-7)?;
    for (leg, (v, t)) in so.speeds(&alloc.x).iter().zip(so.arrivals(&alloc.x).iter().skip(1)).enumerate() {
        println!("leg {}: {v:6.2} knots, arrive at {t:6.2} h", leg + 1);
    }
    println!("fuel = {:.4}", alloc.objective_value);
    Ok(())
}
