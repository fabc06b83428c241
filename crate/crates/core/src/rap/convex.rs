use super::cost::Scaled;
use super::num::{float_key, float_mid};
use super::quadratic::polish_sum;
use crate::error::{Error, Result};

/// Smallest x in [lo, hi] with g(x+1) - g(x) >= lambda, or hi if none.
#[inline]
fn units_at(g: &Scaled<'_>, i: usize, lo: i64, hi: i64, lambda: f64) -> i64 {
    if lo >= hi || g.delta(i, lo) >= lambda {
        return lo;
    }
    if g.delta(i, hi - 1) < lambda {
        return hi;
    }
    // Answer lies in [l, r] with delta(r) >= lambda and delta(l - 1) < lambda.
    // The forward difference at x tracks g'(x + 1/2), so the closed-form
    // inverse lands within a step or two.
    let (mut l, mut r) = (lo + 1, hi - 1);
    let y = g.inverse(i, lambda);
    if y.is_finite() {
        let mut x = ((y - 0.5).ceil() as i64).clamp(l, r);
        for _ in 0..4 {
            if l >= r {
                return l;
            }
            if g.delta(i, x) >= lambda {
                r = x;
                x = (x - 1).max(l);
            } else {
                l = x + 1;
                x = (x + 1).min(r);
            }
        }
    }
    while l < r {
        let mid = l + (r - l) / 2;
        if g.delta(i, mid) >= lambda {
            r = mid;
        } else {
            l = mid + 1;
        }
    }
    l
}

fn fill_units(g: &Scaled<'_>, start: usize, lo: &[i64], hi: &[i64], lambda: f64, out: &mut [i64]) -> i64 {
    let mut total = 0;
    for j in 0..lo.len() {
        out[j] = units_at(g, start + j, lo[j], hi[j], lambda);
        total += out[j];
    }
    total
}

/// Rejects callbacks whose forward differences decrease at sampled points.
pub(crate) fn check_convex_samples(g: &Scaled<'_>, start: usize, lo: &[i64], hi: &[i64]) -> Result<()> {
    for j in 0..lo.len() {
        if hi[j] - lo[j] < 2 {
            continue;
        }
        let pts = [lo[j], lo[j] + (hi[j] - lo[j]) / 2 - 1, hi[j] - 2];
        let ds: Vec<f64> = pts.iter().map(|&x| g.delta(start + j, x)).collect();
        if ds.windows(2).any(|w| w[1] < w[0] - 1e-12 * w[0].abs().max(1.0)) {
            return Err(Error::NonConvexDetected { index: start + j });
        }
    }
    Ok(())
}

/// Chooses multiplier probes by regula falsi with the Illinois correction:
/// when the same end of the bracket is kept twice, its residual is halved.
/// A probe that fails to halve the float-key width of the bracket twice in a
/// row is followed by a bisection, so the float-key halving bound still holds
/// within a small factor.
struct Probe {
    f_lo: f64,
    f_hi: f64,
    last_low: Option<bool>,
    slow: u32,
    width: u64,
}

impl Probe {
    fn new(lam_lo: f64, s_lo: f64, lam_hi: f64, s_hi: f64, target: f64) -> Self {
        Probe { f_lo: s_lo - target, f_hi: s_hi - target, last_low: None, slow: 0, width: key_width(lam_lo, lam_hi) }
    }

    fn next(&self, lam_lo: f64, lam_hi: f64) -> Option<f64> {
        let mid = float_mid(lam_lo, lam_hi)?;
        if self.slow >= 2 || !(self.f_hi > self.f_lo) {
            return Some(mid);
        }
        let guess = lam_lo + (-self.f_lo) / (self.f_hi - self.f_lo) * (lam_hi - lam_lo);
        Some(if guess > lam_lo && guess < lam_hi { guess } else { mid })
    }

    fn moved(&mut self, low: bool, residual: f64, lam_lo: f64, lam_hi: f64) {
        if low {
            self.f_lo = residual;
            if self.last_low == Some(true) {
                self.f_hi *= 0.5;
            }
        } else {
            self.f_hi = residual;
            if self.last_low == Some(false) {
                self.f_lo *= 0.5;
            }
        }
        self.last_low = Some(low);
        let width = key_width(lam_lo, lam_hi);
        self.slow = if width > self.width / 2 { self.slow + 1 } else { 0 };
        if self.slow > 2 {
            self.slow = 0;
        }
        self.width = width;
    }
}

fn key_width(lo: f64, hi: f64) -> u64 {
    (float_key(hi) as i128 - float_key(lo) as i128).clamp(0, u64::MAX as i128) as u64
}

/// Integer RAP by bisection on the multiplier of the sum constraint.
///
/// The allocation x(lambda) is a nondecreasing step function of lambda. The
/// search stops when its sum equals the target or the bracket closes to
/// adjacent floats; the leftover units then go to variables that change
/// between the two bracket ends, lowest index first.
pub(crate) fn solve_int(
    g: Scaled<'_>,
    start: usize,
    lo: &[i64],
    hi: &[i64],
    target: i64,
    out: &mut [i64],
    spare: &mut Vec<i64>,
) {
    let k = lo.len();
    let mut lam_lo = f64::INFINITY;
    let mut lam_hi = f64::NEG_INFINITY;
    for j in 0..k {
        if hi[j] > lo[j] {
            lam_lo = lam_lo.min(g.delta(start + j, lo[j]));
            lam_hi = lam_hi.max(g.delta(start + j, hi[j] - 1));
        }
    }
    if lam_lo > lam_hi {
        out.copy_from_slice(lo);
        return;
    }
    lam_hi = lam_hi.next_up();
    // x(lambda) is componentwise monotone, so the allocation reached does not
    // depend on the probe sequence; interpolation only saves probes. Probing
    // stops once the bracket holds at most `k` units, which keeps the probe
    // count from growing with the subproblem size.
    let (mut s_lo, mut s_hi) = (lo.iter().sum::<i64>(), hi.iter().sum::<i64>());
    let mut probe = Probe::new(lam_lo, s_lo as f64, lam_hi, s_hi as f64, target as f64);
    let enough = (k as i64).max(16);
    while s_hi - s_lo > enough {
        let Some(mid) = probe.next(lam_lo, lam_hi) else { break };
        let s = fill_units(&g, start, lo, hi, mid, out);
        if s == target {
            return;
        }
        if s < target {
            (lam_lo, s_lo) = (mid, s);
        } else {
            (lam_hi, s_hi) = (mid, s);
        }
        probe.moved(s < target, (s - target) as f64, lam_lo, lam_hi);
    }
    let mut placed = fill_units(&g, start, lo, hi, lam_lo, out);
    spare.clear();
    spare.resize(k, 0);
    fill_units(&g, start, lo, hi, lam_hi, spare);
    let need = target - placed;
    if need <= 0 {
        return;
    }
    // Units between the bracket ends have forward differences in [lam_lo, lam_hi);
    // the cheapest `need` of them complete an optimum.
    let room: i64 = (0..k).map(|j| spare[j] - out[j]).sum();
    if room <= 4 * enough {
        let mut units: Vec<(f64, usize, i64)> = Vec::with_capacity(room as usize);
        for j in 0..k {
            for x in out[j]..spare[j] {
                units.push((g.delta(start + j, x), j, x));
            }
        }
        let cmp = |a: &(f64, usize, i64), b: &(f64, usize, i64)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2));
        let need = (need as usize).min(units.len());
        if need < units.len() {
            units.select_nth_unstable_by(need, cmp);
        }
        for &(_, j, _) in &units[..need] {
            out[j] += 1;
        }
        return;
    }
    // Only reached when the bracket closed to adjacent floats: the remaining
    // differences tie, so lowest index first is optimal.
    for j in 0..k {
        if placed >= target {
            break;
        }
        let take = (spare[j] - out[j]).min(target - placed);
        if take > 0 {
            out[j] += take;
            placed += take;
        }
    }
}

/// x with g'(x) = lambda clamped to [lo, hi]; bisection on g' when no closed form exists.
#[inline]
fn point_at(g: &Scaled<'_>, i: usize, lo: f64, hi: f64, lambda: f64) -> f64 {
    if lo >= hi {
        return lo;
    }
    let y = g.inverse(i, lambda);
    if !y.is_nan() {
        return y.clamp(lo, hi);
    }
    if g.derivative(i, lo) >= lambda {
        return lo;
    }
    if g.derivative(i, hi) <= lambda {
        return hi;
    }
    let (mut l, mut r) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (l + r);
        if m <= l || m >= r {
            break;
        }
        if g.derivative(i, m) < lambda {
            l = m;
        } else {
            r = m;
        }
    }
    0.5 * (l + r)
}

fn fill_points(g: &Scaled<'_>, start: usize, lo: &[f64], hi: &[f64], lambda: f64, out: &mut [f64]) -> f64 {
    let mut total = 0.0;
    for j in 0..lo.len() {
        out[j] = point_at(g, start + j, lo[j], hi[j], lambda);
        total += out[j];
    }
    total
}

/// Continuous RAP by bisection on the multiplier, finishing with linear
/// interpolation between the two bracket allocations.
pub(crate) fn solve_real(
    g: Scaled<'_>,
    start: usize,
    lo: &[f64],
    hi: &[f64],
    target: f64,
    out: &mut [f64],
    spare: &mut Vec<f64>,
) {
    let k = lo.len();
    let mut lam_lo = f64::INFINITY;
    let mut lam_hi = f64::NEG_INFINITY;
    for j in 0..k {
        if hi[j] > lo[j] {
            lam_lo = lam_lo.min(g.derivative(start + j, lo[j]));
            lam_hi = lam_hi.max(g.derivative(start + j, hi[j]));
        }
    }
    if lam_lo > lam_hi {
        out.copy_from_slice(lo);
        polish_sum(lo, hi, target, out);
        return;
    }
    let tol = 1e-14 * target.abs().max(1.0);
    let (mut s_lo, mut s_hi) = (lo.iter().sum::<f64>(), hi.iter().sum::<f64>());
    while let Some(mid) = float_mid(lam_lo, lam_hi) {
        let s = fill_points(&g, start, lo, hi, mid, out);
        if (s - target).abs() <= tol {
            polish_sum(lo, hi, target, out);
            return;
        }
        if s < target {
            lam_lo = mid;
            s_lo = s;
        } else {
            lam_hi = mid;
            s_hi = s;
        }
    }
    spare.clear();
    spare.resize(k, 0.0);
    fill_points(&g, start, lo, hi, lam_lo, out);
    fill_points(&g, start, lo, hi, lam_hi, spare);
    let theta = if s_hi > s_lo { ((target - s_lo) / (s_hi - s_lo)).clamp(0.0, 1.0) } else { 0.0 };
    for j in 0..k {
        out[j] += theta * (spare[j] - out[j]);
    }
    polish_sum(lo, hi, target, out);
}
