use crate::error::{Error, Result};
use crate::model::{NestedInstance, Neumaier};

/// Largest magnitude allowed on the integer grid; leaves headroom for sums.
const GRID_LIMIT: f64 = 4.611686018427388e18; // 2^62

fn snap(v: f64) -> Option<f64> {
    let r = v.round();
    ((v - r).abs() <= 1e-9 * v.abs().max(1.0)).then_some(r)
}

fn up(v: f64) -> f64 {
    snap(v).unwrap_or_else(|| v.ceil())
}

fn down(v: f64) -> f64 {
    snap(v).unwrap_or_else(|| v.floor())
}

/// Lower and upper bounds mapped onto the grid of step 1/s.
///
/// Lower bounds round up and upper bounds down, so every grid point stays
/// feasible for the original instance. Equal pairs and pairs that would cross
/// round to the nearest grid point instead.
fn scale_pair(lo: f64, hi: f64, s: f64) -> Result<(i64, i64)> {
    let (l, h) = (lo * s, hi * s);
    if !(l.abs() < GRID_LIMIT && h.abs() < GRID_LIMIT) {
        return Err(Error::ScaleOverflow { scale: s });
    }
    let (mut sl, mut sh) = (up(l), down(h));
    if lo == hi || sl > sh {
        sl = l.round();
        sh = if lo == hi { sl } else { h.round().max(sl) };
    }
    Ok((sl as i64, sh as i64))
}

pub(crate) struct GridBounds {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
    pub d: Vec<i64>,
}

pub(crate) fn scale_bounds(inst: &NestedInstance, s: f64) -> Result<GridBounds> {
    let mut g = GridBounds { a: vec![], b: vec![], c: vec![], d: vec![] };
    for (&lo, &hi) in inst.a.iter().zip(&inst.b) {
        let (l, h) = scale_pair(lo, hi, s)?;
        g.a.push(l);
        g.b.push(h);
    }
    let (mut cs, mut ds) = (0.0f64, 0.0f64);
    for (&lo, &hi) in inst.c.iter().zip(&inst.d) {
        let (l, h) = scale_pair(lo, hi, s)?;
        cs += (l as f64).abs();
        ds += (h as f64).abs();
        g.c.push(l);
        g.d.push(h);
    }
    if cs >= GRID_LIMIT || ds >= GRID_LIMIT {
        return Err(Error::ScaleOverflow { scale: s });
    }
    Ok(g)
}

/// Same forward interval test as `validate`, on grid bounds.
pub(crate) fn grid_feasible(sigma: &[usize], g: &GridBounds) -> bool {
    let (mut lo, mut hi) = (0i64, 0i64);
    let mut start = 0;
    for (j, &end) in sigma.iter().enumerate() {
        lo += g.c[start..end].iter().sum::<i64>();
        hi += g.d[start..end].iter().sum::<i64>();
        lo = lo.max(g.a[j]);
        hi = hi.min(g.b[j]);
        if lo > hi {
            return false;
        }
        start = end;
    }
    true
}

/// Removes the rounding residue a grid or floating-point solve leaves on
/// equality constraints.
///
/// Each block's target prefix sum is the current one clamped into [a_j, b_j]
/// (B for the last); the difference is moved onto variables of that block with
/// room, lowest index first, spilling into earlier blocks when the block is
/// saturated. Changes are of the order of the grid step.
pub(crate) fn polish(inst: &NestedInstance, x: &mut [f64]) {
    for (i, xi) in x.iter_mut().enumerate() {
        *xi = xi.clamp(inst.c[i], inst.d[i]);
    }
    let m = inst.m();
    let block_sum = |x: &[f64], j: usize| {
        let mut acc = Neumaier::default();
        for &v in &x[inst.block_start(j)..inst.sigma[j]] {
            acc.add(v);
        }
        acc.value()
    };
    // Achieved prefix sum after each block.
    let mut prefix = vec![0.0; m];
    let mut prev = 0.0;
    for j in 0..m {
        let sum = block_sum(x, j);
        let have = prev + sum;
        let want = if j + 1 == m { inst.total() } else { have.clamp(inst.a[j], inst.b[j]) };
        let mut delta = shift_block(inst, x, j, (want - prev) - sum);
        // Whatever the block cannot absorb moves into earlier blocks, as long
        // as every constraint in between keeps its slack.
        let mut k = j;
        let mut room = f64::INFINITY;
        while delta != 0.0 && k > 0 {
            k -= 1;
            room = room.min(if delta > 0.0 { inst.b[k] - prefix[k] } else { prefix[k] - inst.a[k] });
            if room <= 0.0 {
                break;
            }
            let want = delta.signum() * delta.abs().min(room);
            let left = shift_block(inst, x, k, want);
            let moved = want - left;
            for p in &mut prefix[k..j] {
                *p += moved;
            }
            room -= moved.abs();
            delta -= moved;
        }
        prefix[j] = if j == 0 { 0.0 } else { prefix[j - 1] } + block_sum(x, j);
        prev = prefix[j];
    }
}

/// Moves up to `delta` onto block j within the boxes, lowest index first; returns the rest.
fn shift_block(inst: &NestedInstance, x: &mut [f64], j: usize, mut delta: f64) -> f64 {
    for i in inst.block_start(j)..inst.sigma[j] {
        if delta > 0.0 {
            let take = (inst.d[i] - x[i]).min(delta);
            if take > 0.0 {
                x[i] += take;
                delta -= take;
            }
        } else if delta < 0.0 {
            let take = (x[i] - inst.c[i]).min(-delta);
            if take > 0.0 {
                x[i] -= take;
                delta += take;
            }
        } else {
            break;
        }
    }
    delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ObjectiveSpec;

    #[test]
    fn rounding_directions() {
        assert_eq!(scale_pair(0.15, 0.95, 10.0).unwrap(), (2, 9));
        assert_eq!(scale_pair(0.3, 0.7, 10.0).unwrap(), (3, 7));
        assert_eq!(scale_pair(0.25, 0.25, 10.0).unwrap(), (3, 3));
        assert_eq!(scale_pair(0.21, 0.29, 10.0).unwrap(), (2, 3));
        assert!(matches!(scale_pair(1.0, 2.0, 1e19), Err(Error::ScaleOverflow { .. })));
    }

    #[test]
    fn polish_restores_total() {
        let inst = NestedInstance::new(
            vec![1, 2],
            vec![0.1, 1.234567],
            vec![0.9, 1.234567],
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            ObjectiveSpec::Linear { p: vec![0.0; 2] },
        );
        let mut x = vec![0.5, 0.7345];
        polish(&inst, &mut x);
        assert!(crate::model::check_feasibility(&inst, &x, 1e-12).all_zero(), "{x:?}");
    }

    #[test]
    fn polish_spills_into_earlier_blocks() {
        // The last variable is pinned, so the shortfall must land on the first.
        let inst = NestedInstance::new(
            vec![1, 2],
            vec![0.1, 1.3],
            vec![0.9, 1.3],
            vec![0.0, 0.5],
            vec![1.0, 0.5],
            ObjectiveSpec::Linear { p: vec![0.0; 2] },
        );
        let mut x = vec![0.7999996, 0.5];
        polish(&inst, &mut x);
        assert!(crate::model::check_feasibility(&inst, &x, 1e-12).all_zero(), "{x:?}");
        assert_eq!(x[1], 0.5);
    }
}
