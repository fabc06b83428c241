//! Random instance generator and timing harness.
//!
//! Instances follow the classic protocol: boxes c ~ U[0.1, 0.5] and
//! d ~ U[0.5, 0.9], two random prefix-sum walks with steps in [c_i, d_i], and
//! nested bounds spanning the two walks. Both walks are feasible trajectories,
//! so every generated instance is feasible.
//!
//! Randomness comes from ChaCha8 seeded by `seed_from_u64(seed)`. Uniforms are
//! (next_u64 >> 11) · 2^-53. Per variable the draws are, in order: c, d, the
//! two walk steps, p, k. Breakpoint subsampling happens after all variables.

use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mda::{solve_continuous_with, solve_scaled};
use crate::model::{Allocation, Family, NestedInstance, ObjectiveSpec, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub family: Family,
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    lo + (hi - lo) * u
}

/// Deterministic random instance.
///
/// The total is pinned to the end of the higher walk. That walk is feasible
/// and the pin keeps both bound sequences nondecreasing. Quadratic instances use w = p and targets at the box
/// centres; Fuel instances use the lower box bound as their length parameter.
pub fn gen_instance(spec: GenSpec) -> Result<NestedInstance> {
    let GenSpec { n, m, seed, family } = spec;
    if n == 0 || m == 0 || m > n {
        return Err(Error::Malformed(format!("need 1 <= m <= n, got n={n}, m={m}")));
    }
    if family == Family::Custom {
        return Err(Error::Unsupported("the generator draws parametric families only".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut c, mut d, mut p, mut k) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut lo, mut hi) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut v, mut w) = (0.0, 0.0);
    for _ in 0..n {
        let ci = uniform(&mut rng, 0.1, 0.5);
        let di = uniform(&mut rng, 0.5, 0.9);
        v += uniform(&mut rng, ci, di);
        w += uniform(&mut rng, ci, di);
        p.push(uniform(&mut rng, 0.0, 1.0));
        k.push(uniform(&mut rng, 0.0, 1.0));
        c.push(ci);
        d.push(di);
        lo.push(f64::min(v, w));
        hi.push(f64::max(v, w));
    }
    lo[n - 1] = hi[n - 1];

    let sigma: Vec<usize> = if m == n {
        (1..=n).collect()
    } else {
        let mut cuts: Vec<usize> = rand::seq::index::sample(&mut rng, n - 1, m - 1).into_iter().map(|i| i + 1).collect();
        cuts.sort_unstable();
        cuts.push(n);
        cuts
    };
    let a = sigma.iter().map(|&s| lo[s - 1]).collect();
    let b = sigma.iter().map(|&s| hi[s - 1]).collect();

    let objective = match family {
        Family::Linear => ObjectiveSpec::Linear { p },
        Family::Quadratic => ObjectiveSpec::Quadratic { t: c.iter().zip(&d).map(|(c, d)| 0.5 * (c + d)).collect(), w: p },
        Family::F => ObjectiveSpec::F { p },
        Family::Crash => ObjectiveSpec::Crash { k, p },
        Family::Fuel => ObjectiveSpec::Fuel { p, c: c.clone() },
        Family::Custom => unreachable!(),
    };
    Ok(NestedInstance::new(sigma, a, b, c, d, objective))
}

/// How generated real-valued instances are solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchMode {
    /// Integer solve after multiplying every bound by `scale`.
    Scaled { scale: f64 },
    /// epsilon-approximate continuous solve.
    Continuous { epsilon: f64 },
}

impl Default for BenchMode {
    fn default() -> Self {
        BenchMode::Scaled { scale: 1e6 }
    }
}

impl BenchMode {
    pub fn label(&self) -> String {
        match self {
            BenchMode::Scaled { scale } => format!("scaled:{scale:e}"),
            BenchMode::Continuous { epsilon } => format!("continuous:{epsilon:e}"),
        }
    }

    pub fn solve(&self, inst: &NestedInstance) -> Result<Allocation> {
        match *self {
            BenchMode::Scaled { scale } => solve_scaled(inst, scale, &SolverConfig::default()),
            BenchMode::Continuous { epsilon } => solve_continuous_with(inst, &SolverConfig { epsilon, ..SolverConfig::default() }),
        }
    }
}

/// Number of nested constraints per size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraints {
    EqualToN,
    /// min(m, n) constraints.
    Fixed(usize),
}

impl Constraints {
    pub fn for_size(&self, n: usize) -> usize {
        match *self {
            Constraints::EqualToN => n,
            Constraints::Fixed(m) => m.min(n),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub families: Vec<Family>,
    /// Instances per (family, size); seeds are base_seed, base_seed + 1, ...
    pub repeats: usize,
    pub constraints: Constraints,
    pub mode: BenchMode,
    pub base_seed: u64,
    /// Solves faster than this are repeated in a loop and averaged.
    pub min_time: Duration,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![1_000, 10_000, 100_000],
            families: vec![Family::Linear],
            repeats: 3,
            constraints: Constraints::EqualToN,
            mode: BenchMode::default(),
            base_seed: 1,
            min_time: Duration::from_secs(1),
        }
    }
}

/// One timed solve; the CSV columns follow the field order.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchRecord {
    pub n: usize,
    pub m: usize,
    pub family: String,
    pub seed: u64,
    pub mode: String,
    pub time_seconds: f64,
    pub objective: f64,
    pub rap_solves: u64,
    pub shortcut_hits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub family: String,
    pub n: usize,
    pub median_seconds: f64,
    pub mean_seconds: f64,
}

/// Least-squares fit t = alpha · n^beta on log-log axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLaw {
    pub family: String,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summaries: Vec<SizeSummary>,
    pub fits: Vec<PowerLaw>,
}

/// Wall time of one solve, averaged over a loop when the solve is fast.
///
/// Generation and I/O are outside the timed region.
pub fn time_solve(inst: &NestedInstance, mode: BenchMode, min_time: Duration) -> Result<(Allocation, f64)> {
    let start = Instant::now();
    let alloc = mode.solve(inst)?;
    let mut elapsed = start.elapsed();
    let mut runs = 1u32;
    while elapsed < min_time {
        mode.solve(inst)?;
        runs += 1;
        elapsed = start.elapsed();
    }
    Ok((alloc, (elapsed.as_secs_f64() / runs as f64).max(f64::MIN_POSITIVE)))
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Slope and intercept of log t against log n, ignoring n < 100.
pub fn power_law_fit(points: &[(usize, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(n, t)| *n >= 100 && *t > 0.0).map(|&(n, t)| ((n as f64).ln(), t.ln())).collect();
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let beta = sxy / sxx;
    Some(((my - beta * mx).exp(), beta))
}

/// (ln n, ln t) pairs per family, for plotting.
pub fn log_log_points(report: &BenchReport) -> Vec<(String, f64, f64)> {
    report.summaries.iter().map(|s| (s.family.clone(), (s.n as f64).ln(), s.mean_seconds.ln())).collect()
}

/// Times every (family, size, seed) combination sequentially.
///
/// `on_record` sees each record as soon as it is produced.
pub fn run_benchmark(cfg: &BenchConfig, mut on_record: impl FnMut(&BenchRecord)) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    if cfg.repeats == 0 {
        return Ok(report);
    }
    for &family in &cfg.families {
        let mut points = Vec::new();
        for &n in &cfg.sizes {
            let m = cfg.constraints.for_size(n);
            let mut times = Vec::with_capacity(cfg.repeats);
            for r in 0..cfg.repeats {
                let seed = cfg.base_seed + r as u64;
                let inst = gen_instance(GenSpec { n, m, seed, family })?;
                let (alloc, t) = time_solve(&inst, cfg.mode, cfg.min_time)?;
                let rec = BenchRecord {
                    n,
                    m,
                    family: family.name().to_string(),
                    seed,
                    mode: cfg.mode.label(),
                    time_seconds: t,
                    objective: alloc.objective_value,
                    rap_solves: alloc.stats.rap_solves,
                    shortcut_hits: alloc.stats.shortcut_hits,
                };
                on_record(&rec);
                report.records.push(rec);
                times.push(t);
            }
            let mean = times.iter().sum::<f64>() / times.len() as f64;
            points.push((n, mean));
            report.summaries.push(SizeSummary { family: family.name().to_string(), n, median_seconds: median(&mut times), mean_seconds: mean });
        }
        if let Some((alpha, beta)) = power_law_fit(&points) {
            report.fits.push(PowerLaw { family: family.name().to_string(), alpha, beta });
        }
    }
    Ok(report)
}

/// Writes records as CSV with a header row.
pub fn write_csv<W: std::io::Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(|e| Error::Internal(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::Internal(format!("csv: {e}")))
}
