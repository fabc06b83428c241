use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::cost::Scaled;
use super::num::sum;

/// Continuous min Σ w_i (x_i - t_i)^2 on [lo, hi] with Σx = target.
///
/// Each variable follows x_i(mu) = clamp(t_i + mu / 2w_i, lo_i, hi_i); zero
/// weights jump from lo to hi at mu = 0. The multiplier is bracketed between
/// consecutive breakpoints by repeated median selection, then found by linear
/// interpolation inside that segment. Variables whose breakpoints leave the
/// bracket are folded into running sums, so the expected work is linear.
pub(crate) fn solve_real(w: &[f64], t: &[f64], lo: &[f64], hi: &[f64], target: f64, out: &mut [f64], bp: &mut Vec<f64>) {
    let k = lo.len();
    let at = |i: usize, mu: f64, upper_side: bool| -> f64 {
        if hi[i] <= lo[i] {
            lo[i]
        } else if w[i] > 0.0 {
            (t[i] + mu / (2.0 * w[i])).clamp(lo[i], hi[i])
        } else if mu > 0.0 || (mu == 0.0 && upper_side) {
            hi[i]
        } else {
            lo[i]
        }
    };
    let total = |mu: f64, upper_side: bool| -> f64 { (0..k).map(|i| at(i, mu, upper_side)).sum() };
    let lower_bp = |i: usize| 2.0 * w[i] * (lo[i] - t[i]);
    let upper_bp = |i: usize| 2.0 * w[i] * (hi[i] - t[i]);

    // Invariant: every breakpoint strictly inside (left, right) belongs to an
    // active variable or is the flat jump at 0; the left-limit sum is at most
    // the target at `left` and above it at `right`.
    let mut active: Vec<usize> = Vec::with_capacity(k);
    let (mut fixed, mut flat_lo, mut flat_hi) = (0.0, 0.0, 0.0);
    let mut any_flat = false;
    for i in 0..k {
        if hi[i] <= lo[i] {
            fixed += lo[i];
        } else if w[i] > 0.0 {
            active.push(i);
        } else {
            any_flat = true;
            flat_lo += lo[i];
            flat_hi += hi[i];
        }
    }
    if active.is_empty() && !any_flat {
        out.copy_from_slice(lo);
        return;
    }
    let (mut lin_t, mut lin_c) = (0.0, 0.0);
    let (mut left, mut right) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut smallest = f64::INFINITY;
    loop {
        bp.clear();
        for &i in &active {
            for b in [lower_bp(i), upper_bp(i)] {
                if b > left && b < right {
                    bp.push(b);
                }
            }
        }
        if any_flat && 0.0 > left && 0.0 < right {
            bp.push(0.0);
        }
        if bp.is_empty() {
            break;
        }
        if smallest == f64::INFINITY {
            smallest = bp.iter().copied().fold(f64::INFINITY, f64::min);
        }
        let mid = bp.len() / 2;
        let (_, &mut mu, _) = bp.select_nth_unstable_by(mid, f64::total_cmp);
        let mut s = fixed + lin_t + mu * lin_c + if mu > 0.0 { flat_hi } else { flat_lo };
        for &i in &active {
            s += at(i, mu, false);
        }
        if s <= target {
            left = mu;
        } else {
            right = mu;
        }
        active.retain(|&i| {
            let (bl, bh) = (lower_bp(i), upper_bp(i));
            if bh <= left {
                fixed += hi[i];
            } else if bl >= right {
                fixed += lo[i];
            } else if bl <= left && bh >= right {
                lin_t += t[i];
                lin_c += 1.0 / (2.0 * w[i]);
            } else {
                return true;
            }
            false
        });
    }
    // No breakpoint met the target from below; fall back to the smallest one.
    let mu0 = if left == f64::NEG_INFINITY { smallest } else { left };
    let below = total(mu0, false);
    let above = total(mu0, true);
    if above >= target || right == f64::INFINITY {
        for (i, o) in out.iter_mut().enumerate() {
            *o = at(i, mu0, false);
        }
        // Flat variables absorb the jump at mu = 0, lowest index first.
        let mut rem = target - below;
        if mu0 == 0.0 {
            for i in 0..k {
                if rem <= 0.0 {
                    break;
                }
                if w[i] <= 0.0 && hi[i] > lo[i] {
                    let take = (hi[i] - lo[i]).min(rem);
                    out[i] += take;
                    rem -= take;
                }
            }
        }
    } else {
        let mu1 = right;
        let next = total(mu1, false);
        let frac = if next > above { (target - above) / (next - above) } else { 0.0 };
        let mu = mu0 + frac.clamp(0.0, 1.0) * (mu1 - mu0);
        for (i, o) in out.iter_mut().enumerate() {
            *o = at(i, mu, false);
        }
    }
    polish_sum(lo, hi, target, out);
}

/// Pushes the rounding residual of Σout onto variables with room, lowest index first.
pub(crate) fn polish_sum(lo: &[f64], hi: &[f64], target: f64, out: &mut [f64]) {
    for _ in 0..2 {
        let mut r = target - sum(out);
        if r == 0.0 {
            return;
        }
        for i in 0..out.len() {
            if r > 0.0 {
                let take = (hi[i] - out[i]).min(r);
                if take > 0.0 {
                    out[i] += take;
                    r -= take;
                }
            } else if r < 0.0 {
                let take = (out[i] - lo[i]).min(-r);
                if take > 0.0 {
                    out[i] -= take;
                    r += take;
                }
            } else {
                break;
            }
        }
    }
}

#[derive(PartialEq)]
struct Marginal(f64, usize);
impl Eq for Marginal {}
impl PartialOrd for Marginal {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Marginal {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&o.0).then(self.1.cmp(&o.1))
    }
}

/// Integer quadratic: continuous relaxation, floor one unit below it, then
/// place the remaining units greedily by smallest forward difference.
pub(crate) fn solve_int(
    g: Scaled<'_>,
    w: &[f64],
    t: &[f64],
    start: usize,
    lo: &[i64],
    hi: &[i64],
    target: i64,
    out: &mut [i64],
    scratch: &mut Vec<f64>,
    cont: &mut Vec<f64>,
) {
    let k = lo.len();
    let s = g.s;
    let lo_r: Vec<f64> = lo.iter().map(|&v| v as f64 / s).collect();
    let hi_r: Vec<f64> = hi.iter().map(|&v| v as f64 / s).collect();
    cont.clear();
    cont.resize(k, 0.0);
    solve_real(w, t, &lo_r, &hi_r, target as f64 / s, cont, scratch);
    for i in 0..k {
        out[i] = if w[i] > 0.0 {
            ((cont[i] * s).floor() as i64 - 1).clamp(lo[i], hi[i])
        } else {
            lo[i]
        };
    }
    let mut placed: i64 = out.iter().sum();
    if placed > target {
        // Only reachable through rounding noise; walk back the most expensive units.
        let mut heap: BinaryHeap<Marginal> =
            (0..k).filter(|&i| out[i] > lo[i]).map(|i| Marginal(g.delta(start + i, out[i] - 1), i)).collect();
        while placed > target {
            let Some(Marginal(_, i)) = heap.pop() else { break };
            out[i] -= 1;
            placed -= 1;
            if out[i] > lo[i] {
                heap.push(Marginal(g.delta(start + i, out[i] - 1), i));
            }
        }
    }
    if placed < target && place_from_window(&g, start, hi, target - placed, out) {
        return;
    }
    let mut heap: BinaryHeap<Reverse<Marginal>> =
        (0..k).filter(|&i| out[i] < hi[i]).map(|i| Reverse(Marginal(g.delta(start + i, out[i]), i))).collect();
    while placed < target {
        let Some(Reverse(Marginal(_, i))) = heap.pop() else { break };
        out[i] += 1;
        placed += 1;
        if out[i] < hi[i] {
            heap.push(Reverse(Marginal(g.delta(start + i, out[i]), i)));
        }
    }
}

/// Units each variable may gain above its rounded-down start in the fast path.
const WINDOW: i64 = 4;

/// Adds the `need` cheapest units, each variable limited to `WINDOW` more.
///
/// Agrees with the greedy order (forward difference, then index). Fails
/// without touching `out` when some variable used its whole window while its
/// next unit would still have been chosen.
fn place_from_window(g: &Scaled<'_>, start: usize, hi: &[i64], need: i64, out: &mut [i64]) -> bool {
    let mut units: Vec<(f64, usize)> = Vec::with_capacity(out.len() * WINDOW as usize);
    for (i, (&x, &h)) in out.iter().zip(hi).enumerate() {
        for u in x..h.min(x + WINDOW) {
            units.push((g.delta(start + i, u), i));
        }
    }
    let need = need as usize;
    if need > units.len() {
        return false;
    }
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    units.select_nth_unstable_by(need - 1, cmp);
    let last = units[need - 1];
    let mut gained = vec![0i64; out.len()];
    for &(_, i) in &units[..need] {
        gained[i] += 1;
    }
    for i in 0..out.len() {
        let next = out[i] + gained[i];
        if gained[i] == WINDOW && next < hi[i] && cmp(&(g.delta(start + i, next), i), &last).is_lt() {
            return false;
        }
    }
    for (o, d) in out.iter_mut().zip(gained) {
        *o += d;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ObjectiveSpec;

    fn real(w: &[f64], t: &[f64], lo: &[f64], hi: &[f64], target: f64) -> Vec<f64> {
        let mut out = vec![0.0; w.len()];
        solve_real(w, t, lo, hi, target, &mut out, &mut Vec::new());
        out
    }

    #[test]
    fn shift_both_targets() {
        let x = real(&[1.0, 1.0], &[1.0, 3.0], &[0.0, 0.0], &[4.0, 4.0], 2.0);
        assert!((x[0] - 0.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12, "{x:?}");
    }

    #[test]
    fn target_sum_already_met() {
        let x = real(&[1.0, 1.0], &[1.0, 3.0], &[0.0, 0.0], &[4.0, 4.0], 4.0);
        assert_eq!(x, vec![1.0, 3.0]);
    }

    #[test]
    fn interior_gradients_equal() {
        let w = [0.5, 2.0, 1.0, 3.0];
        let t = [0.3, -0.2, 1.1, 0.4];
        let x = real(&w, &t, &[-1.0; 4], &[1.0; 4], 1.3);
        assert!((x.iter().sum::<f64>() - 1.3).abs() < 1e-12);
        let grads: Vec<f64> =
            (0..4).filter(|&i| x[i] > -1.0 && x[i] < 1.0).map(|i| 2.0 * w[i] * (x[i] - t[i])).collect();
        for g in &grads {
            assert!((g - grads[0]).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_weights_fill_in_index_order() {
        let x = real(&[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0], &[0.0; 3], &[1.0; 3], 1.5);
        assert_eq!(x, vec![1.0, 0.5, 0.0]);
    }

    #[test]
    fn integer_box_forces_split() {
        let obj = ObjectiveSpec::Quadratic { w: vec![1.0, 1.0], t: vec![0.0, 0.0] };
        let ObjectiveSpec::Quadratic { w, t } = &obj else { unreachable!() };
        let mut out = vec![0; 2];
        solve_int(Scaled::new(&obj, 1.0), w, t, 0, &[0, 0], &[1, 4], 4, &mut out, &mut Vec::new(), &mut Vec::new());
        assert_eq!(out, vec![1, 3]);
    }

    /// Independent reference: plain bisection on the multiplier.
    fn by_bisection(w: &[f64], t: &[f64], lo: &[f64], hi: &[f64], target: f64) -> Vec<f64> {
        let x = |mu: f64| -> Vec<f64> { (0..w.len()).map(|i| (t[i] + mu / (2.0 * w[i])).clamp(lo[i], hi[i])).collect() };
        let (mut a, mut b) = (-1e6, 1e6);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if x(m).iter().sum::<f64>() < target {
                a = m;
            } else {
                b = m;
            }
        }
        x(0.5 * (a + b))
    }

    #[test]
    fn selection_search_matches_bisection() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = rng.random_range(1..60);
            let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..3.0)).collect();
            let t: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
            let lo: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..0.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.0..2.0)).collect();
            let (sl, sh) = (lo.iter().sum::<f64>(), hi.iter().sum::<f64>());
            let target = sl + rng.random::<f64>() * (sh - sl);
            let got = real(&w, &t, &lo, &hi, target);
            let want = by_bisection(&w, &t, &lo, &hi, target);
            for (g, r) in got.iter().zip(&want) {
                assert!((g - r).abs() < 1e-7, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn integer_matches_unit_greedy() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let k = rng.random_range(1..40);
            let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..3.0)).collect();
            let t: Vec<f64> = (0..k).map(|_| rng.random_range(-5.0..15.0)).collect();
            let obj = ObjectiveSpec::Quadratic { w: w.clone(), t: t.clone() };
            let lo: Vec<i64> = (0..k).map(|_| rng.random_range(0..5)).collect();
            let hi: Vec<i64> = lo.iter().map(|l| l + rng.random_range(0..12)).collect();
            let target = rng.random_range(lo.iter().sum::<i64>()..=hi.iter().sum::<i64>());
            let mut out = vec![0; k];
            solve_int(Scaled::new(&obj, 1.0), &w, &t, 0, &lo, &hi, target, &mut out, &mut Vec::new(), &mut Vec::new());
            // One unit at a time to the cheapest forward difference.
            let mut greedy = lo.clone();
            for _ in 0..target - lo.iter().sum::<i64>() {
                let delta = |i: usize, x: i64| obj.value(i, (x + 1) as f64) - obj.value(i, x as f64);
                let i = (0..k).filter(|&i| greedy[i] < hi[i]).min_by(|&a, &b| delta(a, greedy[a]).total_cmp(&delta(b, greedy[b]))).unwrap();
                greedy[i] += 1;
            }
            let cost = |x: &[i64]| x.iter().enumerate().map(|(i, &v)| obj.value(i, v as f64)).sum::<f64>();
            assert_eq!(out.iter().sum::<i64>(), target);
            assert!((cost(&out) - cost(&greedy)).abs() <= 1e-9 * cost(&greedy).abs().max(1.0), "{out:?} vs {greedy:?}");
        }
    }
}
