use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::model::SolveStats;
use crate::rap::num::{sum, Num};
use crate::rap::Engine;

/// Below this many variables a node never forks.
const FORK_MIN: usize = 4096;

/// Pools the excess of `x` above `up` and hands it back, in traversal order,
/// to entries still below `up`. Keeps Σx. Returns whether anything moved.
///
/// Requires Σx <= Σup over the slice; the caller treats a violation as an
/// internal failure.
pub(crate) fn adjust_in_place<T: Num>(x: &mut [T], up: &[T], reverse: bool) -> Result<bool> {
    let mut pool = T::ZERO;
    for (xi, &ui) in x.iter_mut().zip(up) {
        if *xi > ui {
            pool += *xi - ui;
            *xi = ui;
        }
    }
    if !(pool > T::ZERO) {
        return Ok(false);
    }
    let mut give = |xi: &mut T, ui: T| {
        if pool > T::ZERO && *xi < ui {
            let room = ui - *xi;
            let take = if room < pool { room } else { pool };
            *xi += take;
            pool -= take;
        }
    };
    if reverse {
        for (xi, &ui) in x.iter_mut().zip(up).rev() {
            give(xi, ui);
        }
    } else {
        for (xi, &ui) in x.iter_mut().zip(up) {
            give(xi, ui);
        }
    }
    let slack = if T::INTEGRAL { 0.0 } else { 1e-9 * sum(up).to_f64().abs().max(1.0) };
    if pool.to_f64() > slack {
        return Err(Error::Internal(format!(
            "adjust precondition violated: {} units left after redistribution",
            pool.to_f64()
        )));
    }
    Ok(true)
}

#[derive(Default)]
pub(crate) struct Counters {
    rap_solves: AtomicU64,
    shortcut_hits: AtomicU64,
    adjust_repairs: AtomicU64,
}

impl Counters {
    pub(crate) fn snapshot(&self) -> SolveStats {
        SolveStats {
            rap_solves: self.rap_solves.load(Ordering::Relaxed),
            shortcut_hits: self.shortcut_hits.load(Ordering::Relaxed),
            adjust_repairs: self.adjust_repairs.load(Ordering::Relaxed),
        }
    }
}

type Lanes<'x, T> = [&'x mut [T]; 4];

/// Lanes with equal bound pairs see identical inputs all the way down, so the
/// later one copies the earlier result. Returns whether lane `k` was filled.
fn copy_twin<T: Num>(out: &mut Lanes<'_, T>, k: usize, ls: [T; 2], rs: [T; 2]) -> bool {
    let key = (ls[k / 2], rs[k % 2]);
    let Some(j) = (0..k).find(|&j| (ls[j / 2], rs[j % 2]) == key) else {
        return false;
    };
    let (done, rest) = out.split_at_mut(k);
    rest[0].copy_from_slice(done[j]);
    true
}

/// Recursion over nested-constraint ranges.
///
/// For a range of constraints v..=w (0-based) the four solutions use the
/// left bound L in {a[v-1], b[v-1]} (zero for v = 0) and the right bound R in
/// {a[w], b[w]}; lane k holds the pair (L index k / 2, R index k % 2).
pub(crate) struct Decomposition<'a, E: Engine> {
    pub engine: &'a E,
    pub sigma: &'a [usize],
    pub a: Vec<E::T>,
    pub b: Vec<E::T>,
    pub parallel: bool,
    pub counters: Counters,
}

impl<'a, E: Engine> Decomposition<'a, E> {
    pub fn new(engine: &'a E, sigma: &'a [usize], a: Vec<E::T>, b: Vec<E::T>, parallel: bool) -> Self {
        Self { engine, sigma, a, b, parallel, counters: Counters::default() }
    }

    fn start(&self, v: usize) -> usize {
        if v == 0 {
            0
        } else {
            self.sigma[v - 1]
        }
    }

    fn lefts(&self, v: usize) -> [E::T; 2] {
        if v == 0 {
            [E::T::ZERO; 2]
        } else {
            [self.a[v - 1], self.b[v - 1]]
        }
    }

    /// All four solutions for constraints v..=w, written into `out`.
    pub fn solve_range(&self, v: usize, w: usize, out: Lanes<'_, E::T>) -> Result<()> {
        let len = self.sigma[w] - self.start(v);
        let mut tmp = vec![E::T::ZERO; 6 * len];
        let (t, rest) = tmp.split_at_mut(4 * len);
        let (cb, db) = rest.split_at_mut(len);
        let (t0, t) = t.split_at_mut(len);
        let (t1, t) = t.split_at_mut(len);
        let (t2, t3) = t.split_at_mut(len);
        self.rec(v, w, out, [t0, t1, t2, t3], cb, db)
    }

    fn node(&self, v: usize, w: usize, start: usize, cb: &mut [E::T], db: &mut [E::T], target: E::T, out: &mut [E::T], lr: (E::T, E::T)) -> Result<()> {
        let hit = self.engine.solve_node(start, cb, db, target, out).map_err(|e| match e {
            Error::InfeasibleSubproblem { .. } => Error::InfeasibleSubproblem {
                v: v + 1,
                w: w + 1,
                left: lr.0.to_f64(),
                right: lr.1.to_f64(),
            },
            other => other,
        })?;
        self.counters.rap_solves.fetch_add(1, Ordering::Relaxed);
        if hit {
            self.counters.shortcut_hits.fetch_add(1, Ordering::Relaxed);
        }
        Ok(())
    }

    fn rec(
        &self,
        v: usize,
        w: usize,
        out: Lanes<'_, E::T>,
        tmp: Lanes<'_, E::T>,
        cb: &mut [E::T],
        db: &mut [E::T],
    ) -> Result<()> {
        let start = self.start(v);
        let ls = self.lefts(v);
        let rs = [self.a[w], self.b[w]];
        if v == w {
            let mut out = out;
            for k in 0..4 {
                if copy_twin(&mut out, k, ls, rs) {
                    continue;
                }
                let (l, r) = (ls[k / 2], rs[k % 2]);
                cb.fill(E::T::NEG_INF);
                db.fill(E::T::POS_INF);
                self.node(v, w, start, cb, db, r - l, &mut *out[k], (l, r))?;
            }
            return Ok(());
        }

        let u = (v + w) / 2;
        let mid = self.sigma[u] - start;
        let [o0, o1, o2, o3] = out;
        let [t0, t1, t2, t3] = tmp;
        {
            let (o0l, o0r) = o0.split_at_mut(mid);
            let (o1l, o1r) = o1.split_at_mut(mid);
            let (o2l, o2r) = o2.split_at_mut(mid);
            let (o3l, o3r) = o3.split_at_mut(mid);
            let (t0l, t0r) = t0.split_at_mut(mid);
            let (t1l, t1r) = t1.split_at_mut(mid);
            let (t2l, t2r) = t2.split_at_mut(mid);
            let (t3l, t3r) = t3.split_at_mut(mid);
            let (cbl, cbr) = cb.split_at_mut(mid);
            let (dbl, dbr) = db.split_at_mut(mid);
            // Children write into the parent's scratch lanes and use its output lanes as scratch.
            let mut left = move || self.rec(v, u, [t0l, t1l, t2l, t3l], [o0l, o1l, o2l, o3l], cbl, dbl);
            let mut right = move || self.rec(u + 1, w, [t0r, t1r, t2r, t3r], [o0r, o1r, o2r, o3r], cbr, dbr);
            if self.parallel && self.sigma[w] - start >= FORK_MIN {
                let (l, r) = rayon::join(left, right);
                l?;
                r?;
            } else {
                left()?;
                right()?;
            }
        }

        // Left half: order x(L, a_u) below x(L, b_u). Right half: x(b_u, R) below
        // x(a_u, R), traversed from the last variable backwards.
        let repair = |x: &mut [E::T], up: &[E::T], reverse: bool| -> Result<()> {
            if adjust_in_place(x, up, reverse)? {
                self.counters.adjust_repairs.fetch_add(1, Ordering::Relaxed);
            }
            Ok(())
        };
        repair(&mut t0[..mid], &t1[..mid], false)?;
        repair(&mut t2[..mid], &t3[..mid], false)?;
        repair(&mut t2[mid..], &t0[mid..], true)?;
        repair(&mut t3[mid..], &t1[mid..], true)?;

        let lanes = [&*t0, &*t1, &*t2, &*t3];
        let mut out = [o0, o1, o2, o3];
        for k in 0..4 {
            if copy_twin(&mut out, k, ls, rs) {
                continue;
            }
            let lane = &mut *out[k];
            let (li, ri) = (k / 2, k % 2);
            cb[..mid].copy_from_slice(&lanes[2 * li][..mid]);
            db[..mid].copy_from_slice(&lanes[2 * li + 1][..mid]);
            cb[mid..].copy_from_slice(&lanes[2 + ri][mid..]);
            db[mid..].copy_from_slice(&lanes[ri][mid..]);
            let (l, r) = (ls[li], rs[ri]);
            self.node(v, w, start, cb, db, r - l, lane, (l, r))?;
        }
        Ok(())
    }
}
