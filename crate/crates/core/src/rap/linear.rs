use super::num::{min, sum, Num};

/// Greedy fill from `lo` in increasing (key, index) order until the sum hits
/// `target`, located by weighted-median selection in expected linear time.
///
/// Requires sum(lo) <= target <= sum(hi). Returns the units left unplaced,
/// zero whenever the requirement holds.
pub(crate) fn greedy_by_key<T: Num>(
    key: impl Fn(usize) -> f64,
    lo: &[T],
    hi: &[T],
    target: T,
    out: &mut [T],
    idx: &mut Vec<usize>,
) -> T {
    out.copy_from_slice(lo);
    let mut rem = target - sum(lo);
    if !(rem > T::ZERO) {
        return T::ZERO;
    }
    idx.clear();
    idx.extend((0..lo.len()).filter(|&j| hi[j] > lo[j]));
    let cmp = |a: &usize, b: &usize| key(*a).total_cmp(&key(*b)).then(a.cmp(b));
    let (mut l, mut r) = (0, idx.len());
    while r > l {
        if r - l <= 24 {
            idx[l..r].sort_unstable_by(cmp);
            for &j in &idx[l..r] {
                let take = min(hi[j] - lo[j], rem);
                out[j] += take;
                rem -= take;
                if !(rem > T::ZERO) {
                    return T::ZERO;
                }
            }
            return rem;
        }
        let mid = l + (r - l) / 2;
        idx[l..r].select_nth_unstable_by(mid - l, cmp);
        let mut weight = T::ZERO;
        for &j in &idx[l..mid] {
            weight += hi[j] - lo[j];
        }
        if weight >= rem {
            r = mid;
        } else {
            for &j in &idx[l..mid] {
                out[j] = hi[j];
            }
            rem -= weight;
            l = mid;
        }
    }
    rem
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(p: &[f64], lo: &[i64], hi: &[i64], target: i64) -> Vec<i64> {
        let mut out = vec![0; p.len()];
        let left = greedy_by_key(|j| p[j], lo, hi, target, &mut out, &mut Vec::new());
        assert_eq!(left, 0);
        out
    }

    #[test]
    fn cheapest_first() {
        assert_eq!(run(&[3.0, 1.0, 2.0], &[0; 3], &[2; 3], 4), vec![0, 2, 2]);
    }

    #[test]
    fn tie_goes_to_lowest_index() {
        assert_eq!(run(&[1.0, 1.0], &[0; 2], &[1; 2], 1), vec![1, 0]);
    }

    #[test]
    fn large_input_matches_sort() {
        let n = 1000;
        let p: Vec<f64> = (0..n).map(|i| ((i * 7919) % 101) as f64).collect();
        let lo = vec![1i64; n];
        let hi: Vec<i64> = (0..n).map(|i| 1 + (i % 5) as i64).collect();
        let target = 1700;
        let got = run(&p, &lo, &hi, target);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
        let mut want = lo.clone();
        let mut rem = target - n as i64;
        for j in order {
            let take = (hi[j] - lo[j]).min(rem);
            want[j] += take;
            rem -= take;
        }
        assert_eq!(got, want);
    }

    #[test]
    fn real_amounts() {
        let mut out = vec![0.0; 2];
        greedy_by_key(|j| [2.0, 1.0][j], &[0.0, 0.0], &[1.5, 1.5], 2.0, &mut out, &mut Vec::new());
        assert_eq!(out, vec![0.5, 1.5]);
    }
}
