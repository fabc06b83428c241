use std::fmt::Debug;
use std::ops::{Add, AddAssign, Sub, SubAssign};

/// Scalar type of a solve: `i64` grid units or `f64` reals.
///
/// `NEG_INF` and `POS_INF` mark unbounded effective bounds; arithmetic is
/// never performed on them.
pub(crate) trait Num:
    Copy
    + PartialOrd
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + AddAssign
    + SubAssign
{
    const ZERO: Self;
    const NEG_INF: Self;
    const POS_INF: Self;
    const INTEGRAL: bool;

    fn to_f64(self) -> f64;

    fn is_unbounded(self) -> bool {
        self == Self::NEG_INF || self == Self::POS_INF
    }

    /// Lowers `x` by `amount` in total without going below `floor`.
    ///
    /// Unbounded floors share the amount evenly; otherwise integers are taken
    /// lowest index first and reals proportionally to the room left.
    fn spread_down(x: &mut [Self], floor: &[Self], amount: Self);

    /// Mirror of `spread_down`.
    fn spread_up(x: &mut [Self], ceil: &[Self], amount: Self);
}

#[inline]
pub(crate) fn clamp<T: Num>(v: T, lo: T, hi: T) -> T {
    if v < lo {
        lo
    } else if v > hi {
        hi
    } else {
        v
    }
}

#[inline]
pub(crate) fn min<T: Num>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

pub(crate) fn sum<T: Num>(v: &[T]) -> T {
    let mut s = T::ZERO;
    for &x in v {
        s += x;
    }
    s
}

impl Num for i64 {
    const ZERO: Self = 0;
    const NEG_INF: Self = i64::MIN;
    const POS_INF: Self = i64::MAX;
    const INTEGRAL: bool = true;

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn spread_down(x: &mut [i64], floor: &[i64], amount: i64) {
        let open = floor.iter().filter(|f| f.is_unbounded()).count() as i64;
        if open > 0 {
            let (base, mut extra) = (amount / open, amount % open);
            for (xi, fi) in x.iter_mut().zip(floor) {
                if fi.is_unbounded() {
                    *xi -= base + i64::from(extra > 0);
                    extra -= 1;
                }
            }
        } else {
            let mut rem = amount;
            for (xi, &fi) in x.iter_mut().zip(floor) {
                if rem == 0 {
                    break;
                }
                let take = (*xi - fi).min(rem);
                *xi -= take;
                rem -= take;
            }
        }
    }

    fn spread_up(x: &mut [i64], ceil: &[i64], amount: i64) {
        let open = ceil.iter().filter(|f| f.is_unbounded()).count() as i64;
        if open > 0 {
            let (base, mut extra) = (amount / open, amount % open);
            for (xi, ci) in x.iter_mut().zip(ceil) {
                if ci.is_unbounded() {
                    *xi += base + i64::from(extra > 0);
                    extra -= 1;
                }
            }
        } else {
            let mut rem = amount;
            for (xi, &ci) in x.iter_mut().zip(ceil) {
                if rem == 0 {
                    break;
                }
                let take = (ci - *xi).min(rem);
                *xi += take;
                rem -= take;
            }
        }
    }
}

impl Num for f64 {
    const ZERO: Self = 0.0;
    const NEG_INF: Self = f64::NEG_INFINITY;
    const POS_INF: Self = f64::INFINITY;
    const INTEGRAL: bool = false;

    fn to_f64(self) -> f64 {
        self
    }

    fn spread_down(x: &mut [f64], floor: &[f64], amount: f64) {
        let open = floor.iter().filter(|f| f.is_infinite()).count();
        if open > 0 {
            let step = amount / open as f64;
            for (xi, fi) in x.iter_mut().zip(floor) {
                if fi.is_infinite() {
                    *xi -= step;
                }
            }
        } else {
            let room: f64 = x.iter().zip(floor).map(|(x, f)| x - f).sum();
            let ratio = if room > 0.0 { (amount / room).min(1.0) } else { 0.0 };
            for (xi, &fi) in x.iter_mut().zip(floor) {
                *xi = (*xi - ratio * (*xi - fi)).max(fi);
            }
        }
    }

    fn spread_up(x: &mut [f64], ceil: &[f64], amount: f64) {
        let open = ceil.iter().filter(|f| f.is_infinite()).count();
        if open > 0 {
            let step = amount / open as f64;
            for (xi, ci) in x.iter_mut().zip(ceil) {
                if ci.is_infinite() {
                    *xi += step;
                }
            }
        } else {
            let room: f64 = x.iter().zip(ceil).map(|(x, c)| c - x).sum();
            let ratio = if room > 0.0 { (amount / room).min(1.0) } else { 0.0 };
            for (xi, &ci) in x.iter_mut().zip(ceil) {
                *xi = (*xi + ratio * (ci - *xi)).min(ci);
            }
        }
    }
}

/// Order-preserving map from finite floats to integers, so bisection on the
/// key halves the number of representable values left.
#[inline]
pub(crate) fn float_key(f: f64) -> i64 {
    let b = f.to_bits() as i64;
    if b < 0 {
        b ^ i64::MAX
    } else {
        b
    }
}

#[inline]
pub(crate) fn key_float(k: i64) -> f64 {
    let b = if k < 0 { k ^ i64::MAX } else { k };
    f64::from_bits(b as u64)
}

/// A float strictly between `lo` and `hi` splitting the representable values
/// in half, or `None` once they are adjacent.
pub(crate) fn float_mid(lo: f64, hi: f64) -> Option<f64> {
    let (kl, kh) = (float_key(lo), float_key(hi));
    let mid = ((kl as i128 + kh as i128) >> 1) as i64;
    (mid != kl && mid != kh).then(|| key_float(mid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_is_monotone() {
        let vals = [-1e300, -2.0, -1.0, -1e-300, -0.0, 0.0, 1e-300, 1.0, 2.0, 1e300];
        for w in vals.windows(2) {
            assert!(float_key(w[0]) < float_key(w[1]));
            assert_eq!(key_float(float_key(w[0])), w[0]);
        }
    }

    #[test]
    fn mid_terminates_quickly() {
        let (mut lo, hi) = (-1e300, 1e300);
        let mut steps = 0;
        while let Some(m) = float_mid(lo, hi) {
            lo = m;
            steps += 1;
        }
        assert!(steps <= 64);
        assert_eq!(lo.next_up(), hi);
    }

    #[test]
    fn integer_spread_lowest_index_first() {
        let mut x = vec![3i64, 3, 3];
        i64::spread_down(&mut x, &[1, 2, 0], 3);
        assert_eq!(x, vec![1, 2, 3]);
        let mut x = vec![0i64, 0, 0];
        i64::spread_up(&mut x, &[i64::MAX, 5, i64::MAX], 5);
        assert_eq!(x, vec![3, 0, 2]);
    }

    #[test]
    fn real_spread_proportional() {
        let mut x = vec![2.0, 2.0];
        f64::spread_down(&mut x, &[1.0, 0.0], 1.0);
        assert!((x[0] - 5.0 / 3.0).abs() < 1e-15 && (x[1] - 4.0 / 3.0).abs() < 1e-15);
    }
}
