//! Builds dual multipliers that certify a continuous solution, then shows a
//! perturbed point being rejected.
//!
//! cargo run --example kkt_certificate

use rapnc::mda::{solve_continuous_with, verify_kkt, KktVerdict};
use rapnc::model::{ContinuousMethod, NestedInstance, ObjectiveSpec, SolverConfig};

fn main() -> rapnc::Result<()> {
    let inst = NestedInstance::new(
        vec![2, 3, 5],
        vec![1.0, 2.0, 4.0],
        vec![1.5, 3.0, 4.0],
        vec![0.1; 5],
        vec![2.0; 5],
        ObjectiveSpec::Crash { k: vec![0.0; 5], p: vec![1.0, 4.0, 2.0, 0.5, 3.0] },
    );
    let cfg = SolverConfig { continuous_method: ContinuousMethod::DirectBisection, ..SolverConfig::default() };
    let x = solve_continuous_with(&inst, &cfg)?.x;
    println!("x = {x:.6?}");
    match verify_kkt(&inst, &x, 1e-9, None) {
        KktVerdict::Certified(cert) => {
            println!("marginal value per variable: {:.6?}", cert.phi);
            println!("lower-bound multipliers: {:.6?}", cert.kappa);
            println!("upper-bound multipliers: {:.6?}", cert.lambda);
        }
        KktVerdict::Violated(v) => println!("not certified: {v:?}"),
    }

    let mut moved = x.clone();
    moved[3] += 0.05;
    moved[4] -= 0.05;
    println!("perturbed point: {:?}", verify_kkt(&inst, &moved, 1e-9, None));
    Ok(())
}
