//! The A-sequence (`A_1 = 1, A_2 = A_3 = 2, A_k = A_{k-2} + A_{k-3}`), the
//! marker-leaving Blast/Unblast recursions and the optimal-depth schedule
//! built from them.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::pebble::{replay, Move, Schedule, TimeStep, Variant};
use crate::weights::WeightProfile;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ASeqError {
    #[error("span {0} is not A_k - 1 for any k")]
    SpanNotASequence(usize),
    #[error("{what}: argument {value} outside its range")]
    OutOfRange { what: &'static str, value: usize },
}

/// `A_k` as an arbitrary-precision integer (`k >= 1`).
pub fn a_seq(k: usize) -> BigUint {
    assert!(k >= 1, "A-sequence is indexed from 1");
    let mut v: Vec<BigUint> = vec![BigUint::zero(), 1u32.into(), 2u32.into(), 2u32.into()];
    for j in 4..=k {
        let next = &v[j - 2] + &v[j - 3];
        v.push(next);
    }
    v.swap_remove(k)
}

/// `[0, A_1, A_2, ...]` up to the first value above `limit` (inclusive of it).
pub fn a_values_upto(limit: u64) -> Vec<u64> {
    let mut v = vec![0u64, 1, 2, 2];
    while *v.last().unwrap() <= limit {
        let k = v.len();
        v.push(v[k - 2] + v[k - 3]);
    }
    v
}

/// `A_k` for small k; `None` once it overflows.
pub fn a_u64(k: usize) -> Option<u64> {
    assert!(k >= 1, "A-sequence is indexed from 1");
    let mut v = vec![0u64, 1, 2, 2];
    for j in 4..=k {
        v.push(v[j - 2].checked_add(v[j - 3])?);
    }
    Some(v[k])
}

/// Largest `j` with `A_j <= n`.
pub fn a_inv(n: u64) -> usize {
    assert!(n >= 1, "a_inv needs n >= 1");
    let v = a_values_upto(n);
    (1..v.len()).rev().find(|&j| v[j] <= n).unwrap()
}

/// Smallest `k` with `A_k >= l`.
pub fn min_index_covering(l: u64) -> usize {
    let v = a_values_upto(l);
    (1..v.len()).find(|&j| v[j] >= l).unwrap()
}

/// The `k` with `span = A_k - 1`, taking `k = 2` for span 1 and `k = 1` for span 0.
fn span_index(span: usize) -> Result<usize, ASeqError> {
    let v = a_values_upto(span as u64 + 1);
    (1..v.len()).find(|&j| v[j] == span as u64 + 1).ok_or(ASeqError::SpanNotASequence(span))
}

const A_SMALL: [usize; 90] = {
    let mut v = [0usize; 90];
    v[1] = 1;
    v[2] = 2;
    v[3] = 2;
    let mut j = 4;
    while j < 90 {
        v[j] = v[j - 2] + v[j - 3];
        j += 1;
    }
    v
};

fn a(k: usize) -> usize {
    if k < A_SMALL.len() {
        A_SMALL[k]
    } else {
        a_u64(k).expect("A_k fits in u64") as usize
    }
}

/// Forward sweep over `(start, end]` leaving marker pebbles; `A_k - 1` steps.
pub fn blast(start: usize, end: usize) -> Result<Vec<TimeStep>, ASeqError> {
    let k = span_index(end - start)?;
    let mut out = Vec::with_capacity(end - start);
    blast_into(start, end, k, &mut out);
    Ok(out)
}

fn blast_into(start: usize, end: usize, k: usize, out: &mut Vec<TimeStep>) {
    if end == start {
        return;
    }
    if end - start == 1 {
        out.push(TimeStep::single(Move::pebble(end)));
        return;
    }
    let jump = a(k - 3);
    out.push(TimeStep::single(Move::pebble(start + 1)));
    for j in start + 2..=start + jump {
        out.push(TimeStep::with_ghosts(vec![Move::pebble(j)], vec![j - 1]));
    }
    blast_into(start + jump, end, k - 2, out);
}

/// Cleans up after [`blast`] over the same segment; `A_k - 1` steps.
pub fn unblast(start: usize, end: usize) -> Result<Vec<TimeStep>, ASeqError> {
    let k = span_index(end - start)?;
    let mut out = Vec::with_capacity(end - start);
    unblast_into(start, end, k, &mut out);
    Ok(out)
}

fn unblast_into(start: usize, end: usize, k: usize, out: &mut Vec<TimeStep>) {
    if end == start {
        return;
    }
    if end - start == 1 {
        out.push(TimeStep::single(Move::unpebble(end)));
        return;
    }
    let jump = a(k - 3);
    let mid = start + jump;
    unblast_into(mid, end, k - 2, out);
    // the last A_{k-3} - 1 steps of that sub-unblast run alongside a refill blast
    let mut refill = Vec::with_capacity(jump - 1);
    blast_into(start, mid - 1, k - 3, &mut refill);
    let from = out.len() - refill.len();
    for (slot, extra) in out[from..].iter_mut().zip(refill) {
        merge_into(slot, extra);
    }
    out.push(TimeStep::single(Move::unpebble(mid)));
    unblast_into(start, mid - 1, k - 3, out);
}

/// Adds `b`'s moves and ghosts to `a`; panics if active sets meet.
fn merge_into(a: &mut TimeStep, b: TimeStep) {
    for mb in &b.moves {
        let (lo, hi) = mb.active_set();
        for ma in &a.moves {
            let (alo, ahi) = ma.active_set();
            assert!(hi < alo || ahi < lo, "interleaved moves {ma:?} and {mb:?} overlap");
        }
    }
    a.moves.extend(b.moves);
    a.ghosts.extend(b.ghosts);
    a.moves.sort();
    a.ghosts.sort_unstable();
}

/// A schedule together with its per-step space usage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub schedule: Schedule,
    pub per_step_space: Vec<usize>,
}

impl ConstructionTrace {
    pub fn space(&self) -> usize {
        self.per_step_space.iter().copied().max().unwrap_or(0)
    }
}

/// Optimal-depth schedule for the full game of length `A_k`.
fn full_game(l: usize, variant: Variant) -> Vec<TimeStep> {
    let mut steps = blast(0, l - 1).expect("l is an A-sequence value");
    steps.push(TimeStep::single(Move::pebble(l)));
    if variant == Variant::Plain {
        steps.push(TimeStep::single(Move::unpebble(l)));
    }
    steps.extend(unblast(0, l - 1).expect("l is an A-sequence value"));
    steps
}

/// Depth `2l` (plain) or `2l - 1` (measured target) schedule for any `l >= 1`.
///
/// Runs the full game for the smallest `A_k >= l` and shifts every index down
/// by `A_k - l`, dropping moves and ghosts that land below site 1.
pub fn construct(length: usize, variant: Variant) -> ConstructionTrace {
    assert!(length >= 1, "length must be at least 1");
    let k = min_index_covering(length as u64);
    let big = a(k);
    let shift = big - length;
    let mut steps: Vec<TimeStep> = Vec::with_capacity(2 * length);
    for mut st in full_game(big, variant) {
        if shift > 0 {
            st.moves.retain(|m| m.index > shift);
            st.moves.iter_mut().for_each(|m| m.index -= shift);
            st.ghosts.retain(|&g| g > shift);
            st.ghosts.iter_mut().for_each(|g| *g -= shift);
        }
        if st.moves.is_empty() {
            if let Some(prev) = steps.last_mut() {
                prev.ghosts.extend(st.ghosts);
                prev.ghosts.sort_unstable();
            }
            continue;
        }
        steps.push(st);
    }
    let schedule = Schedule { length, variant, steps };
    let per_step_space = replay(&schedule, &WeightProfile::unit())
        .expect("construction replays cleanly")
        .into_iter()
        .map(|m| m.space)
        .collect();
    ConstructionTrace { schedule, per_step_space }
}

/// `b_k(t) = ceil((k - a_inv(A_k - t + 1)) / 2) + 1` for `k >= 2`, `t in [1, A_k - 1]`.
pub fn b_formula(k: usize, t: usize) -> Result<usize, ASeqError> {
    if k < 2 {
        return Err(ASeqError::OutOfRange { what: "k", value: k });
    }
    let ak = a(k);
    if t < 1 || t > ak - 1 {
        return Err(ASeqError::OutOfRange { what: "t", value: t });
    }
    let num = k as i64 - a_inv((ak - t + 1) as u64) as i64;
    Ok((num.div_euclid(2) + i64::from(num.rem_euclid(2) != 0) + 1) as usize)
}

/// Piecewise upper bound on the unblast space at step `t`, for `k >= 6`.
pub fn u_bound(k: usize, t: usize) -> Result<usize, ASeqError> {
    if k < 6 {
        return Err(ASeqError::OutOfRange { what: "k", value: k });
    }
    let ak = a(k);
    if t < 1 || t > ak - 1 {
        return Err(ASeqError::OutOfRange { what: "t", value: t });
    }
    let upto = |j: usize| ak - a(j) + 1;
    let bound = if t <= upto(k - 1) {
        k - 3
    } else if t <= upto(k - 2) {
        k - 4
    } else if t <= upto(k - 3) {
        k - 5
    } else if t <= upto(k - 5) {
        k - 6
    } else {
        (3..=(k - 3) / 2)
            .find(|&r| t >= ak - a(k - 2 * r + 1) + 2 && t <= upto(k - 2 * r - 1))
            .map(|r| k - r - 5)
            .ok_or(ASeqError::OutOfRange { what: "t", value: t })?
    };
    Ok(bound)
}

/// `u_k` from the unblast recurrence: hand-derived bases for `k <= 4`,
/// the recurrence in terms of `b_{k-3}`, `u_{k-2}`, `u_{k-3}` above.
pub fn u_recurrence(k: usize) -> Result<Vec<usize>, ASeqError> {
    if k < 2 {
        return Err(ASeqError::OutOfRange { what: "k", value: k });
    }
    let mut u: Vec<Vec<usize>> = vec![vec![], vec![], vec![1], vec![1], vec![2, 1]];
    for j in 5..=k {
        let (a2, a3) = (a(j - 2), a(j - 3));
        let row = (1..a(j))
            .map(|t| {
                if t <= a2 - a3 {
                    1 + u[j - 2][t - 1]
                } else if t < a2 {
                    b_formula(j - 3, t - (a2 - a3)).unwrap() + 1 + u[j - 2][t - 1]
                } else if t == a2 {
                    (j - 1) / 2
                } else {
                    u[j - 3][t - a2 - 1]
                }
            })
            .collect();
        u.push(row);
    }
    Ok(u.swap_remove(k))
}

/// Rational `(lo, hi)` with `lo < alpha < hi`, where `alpha^3 = alpha + 1`,
/// after `iterations` bisection steps from `[1, 2]`.
pub fn alpha_bracket(iterations: usize) -> (BigRational, BigRational) {
    let f = |x: &BigRational| x * x * x - x - BigRational::one();
    let mut lo = BigRational::one();
    let mut hi = BigRational::from_integer(BigInt::from(2));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for _ in 0..iterations {
        let mid = (&lo + &hi) * &half;
        if f(&mid) > BigRational::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pebble::{GameState, SiteState};

    #[test]
    fn first_values() {
        let v: Vec<u64> = (1..=8).map(|k| a_u64(k).unwrap()).collect();
        assert_eq!(v, vec![1, 2, 2, 3, 4, 5, 7, 9]);
        assert_eq!(a_seq(16), BigUint::from(86u32));
    }

    #[test]
    fn inverse() {
        assert_eq!(a_inv(2), 3);
        assert_eq!(a_inv(1), 1);
        assert_eq!(a_inv(86), 16);
        assert_eq!(a_inv(85), 15);
        assert_eq!(min_index_covering(79), 16);
    }

    #[test]
    fn blast_markers() {
        let steps = blast(0, 4).unwrap();
        assert_eq!(steps.len(), 4);
        let mut s = GameState::initial(4);
        for st in &steps {
            s = crate::pebble::apply_time_step(&s, st).unwrap();
        }
        let markers: Vec<usize> = (0..=4).filter(|&i| s.site(i) == SiteState::Pebble).collect();
        assert_eq!(markers, vec![0, 2, 3, 4]);
        assert_eq!(blast(3, 4).unwrap(), vec![TimeStep::single(Move::pebble(4))]);
        assert_eq!(blast(0, 5), Err(ASeqError::SpanNotASequence(5)));
    }

    #[test]
    fn unblast_base() {
        assert_eq!(unblast(0, 1).unwrap(), vec![TimeStep::single(Move::unpebble(1))]);
    }

    #[test]
    fn small_constructions() {
        let t = construct(1, Variant::Plain);
        assert_eq!((t.schedule.depth(), t.space()), (2, 1));
        let t = construct(7, Variant::Plain);
        assert_eq!((t.schedule.depth(), t.space()), (14, 4));
        let t = construct(79, Variant::MeasuredTarget);
        assert_eq!(t.schedule.depth(), 157);
        assert!(t.space() <= 13);
    }

    #[test]
    fn b_small() {
        assert_eq!(b_formula(4, 1).unwrap(), 1);
        assert_eq!(b_formula(4, 2).unwrap(), 2);
        for k in 2..20 {
            assert_eq!(b_formula(k, 1).unwrap(), 1);
        }
        assert!(b_formula(4, 3).is_err());
    }

    #[test]
    fn u_bound_small() {
        let b6: Vec<usize> = (1..5).map(|t| u_bound(6, t).unwrap()).collect();
        assert_eq!(b6, vec![3, 3, 2, 1]);
        let b7: Vec<usize> = (1..7).map(|t| u_bound(7, t).unwrap()).collect();
        assert_eq!(b7, vec![4, 4, 4, 3, 2, 1]);
        assert!(u_bound(5, 1).is_err());
    }

    #[test]
    fn recurrence_vectors() {
        assert_eq!(u_recurrence(5).unwrap(), vec![3, 2, 1]);
        assert_eq!(u_recurrence(6).unwrap(), vec![3, 3, 2, 1]);
        assert_eq!(u_recurrence(7).unwrap(), vec![4, 4, 4, 3, 2, 1]);
        assert_eq!(u_recurrence(8).unwrap(), vec![4, 5, 5, 4, 3, 3, 2, 1]);
    }

    #[test]
    fn alpha_is_bracketed() {
        let (lo, hi) = alpha_bracket(40);
        let lo_f =
            lo.numer().to_string().parse::<f64>().unwrap() / lo.denom().to_string().parse::<f64>().unwrap();
        assert!((lo_f - 1.324_717_957_244_746).abs() < 1e-9);
        assert!(lo < hi);
    }
}
