//! Ordinal regression on a synthetic five-class problem. Each working-set
//! step is a projection onto a nested constraint set.
//!
//! cargo run --example svorex_ordinal -- [n_ws]

use rapnc::svorex::{predict, synthetic, train, OrdinalDataset, SvorexConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_ws: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(6);
    // One draw shares a single latent direction; hold out the last 400 rows.
    let all = synthetic(600, 4, 5, 0.3, 2024)?;
    let ds = OrdinalDataset::new(all.features[..200].to_vec(), all.labels[..200].to_vec())?;
    let test = OrdinalDataset::new(all.features[200..].to_vec(), all.labels[200..].to_vec())?;
    let report = train(&ds, &SvorexConfig { n_ws, width: 0.05, c: 100.0, ..SvorexConfig::default() })?;
    let model = &report.model;
    let last = report.trace.last().map_or(0.0, |e| e.objective);
    println!("{} selections in {:.2}s, dual objective {last:.6}", model.selections, report.seconds);
    println!("thresholds = {:.4?}", model.thresholds);
    let support = model.weights().iter().filter(|b| **b != 0.0).count();
    println!("support vectors: {support} of {}", ds.len());

    let errors = |set: &OrdinalDataset| set.features.iter().zip(&set.labels).filter(|(x, &l)| predict(model, &ds, x) != l).count();
    println!("training errors: {} / {}", errors(&ds), ds.len());
    println!("test errors: {} / {}", errors(&test), test.len());
    Ok(())
}
