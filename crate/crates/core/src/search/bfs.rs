//! Breadth-first search over full game states, without any of the
//! reductions used by the A* engines. Small instances only.

use std::collections::HashMap;

use num_rational::Rational64;

use super::{Budget, Engine, OptResult, SearchError, StepBits, TieBreak};
use crate::pebble::{Schedule, Variant};
use crate::weights::WeightProfile;

pub const BFS_MAX_LENGTH: usize = 10;
pub const BFS_MAX_PEBBLES: usize = 6;

const EMPTY: u32 = 0;
const PEBBLE: u32 = 1;
const GHOST: u32 = 2;
const REACHED: u32 = 1 << 31;

fn get(s: u32, i: usize) -> u32 {
    if i == 0 {
        PEBBLE
    } else {
        s >> (2 * (i - 1)) & 3
    }
}

fn set(s: u32, i: usize, v: u32) -> u32 {
    let sh = 2 * (i - 1);
    (s & !(3 << sh)) | v << sh
}

struct Ctx<'a> {
    len: usize,
    variant: Variant,
    budget: &'a Budget,
}

impl Ctx<'_> {
    fn pebbles(&self, s: u32) -> u32 {
        (1..=self.len).filter(|&i| get(s, i) == PEBBLE).count() as u32
    }

    /// Every legal step from `s`, as (next state, step).
    fn successors(&self, s: u32) -> Vec<(u32, StepBits)> {
        let mut phase1 = Vec::new();
        self.moves(s, 1, StepBits::default(), self.pebbles(s), 0, &mut phase1);
        let mut out = Vec::new();
        for (mid, step) in phase1 {
            let peb: Vec<usize> = (1..=self.len).filter(|&i| get(mid, i) == PEBBLE).collect();
            for mask in 0u32..1 << peb.len() {
                let mut next = mid;
                let mut st = step;
                for (b, &i) in peb.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        next = set(next, i, GHOST);
                        st.ghost |= 1 << i;
                    }
                }
                if next & REACHED == 0 && st.pebble >> self.len & 1 == 1 {
                    next |= REACHED;
                    if self.variant == Variant::MeasuredTarget && get(next, self.len) == PEBBLE {
                        next = set(next, self.len, EMPTY);
                    }
                }
                out.push((next, st));
            }
        }
        out
    }

    fn moves(&self, s: u32, i: usize, step: StepBits, count: u32, tau: i64, out: &mut Vec<(u32, StepBits)>) {
        if i > self.len {
            if step.pebble | step.unpebble != 0 {
                let mut mid = s;
                for j in 1..=self.len {
                    if step.pebble >> j & 1 == 1 {
                        mid = set(mid, j, PEBBLE);
                    } else if step.unpebble >> j & 1 == 1 {
                        mid = set(mid, j, EMPTY);
                    }
                }
                out.push((mid, step));
            }
            return;
        }
        self.moves(s, i + 1, step, count, tau, out);
        if get(s, i - 1) != PEBBLE {
            return;
        }
        let t = tau + self.budget.tau[i];
        let mut st = step;
        let c = if get(s, i) == PEBBLE {
            st.unpebble |= 1 << i;
            count
        } else {
            st.pebble |= 1 << i;
            count + 1
        };
        if self.budget.fits(c, t) {
            // the next move may start at i + 2 at the earliest
            self.moves(s, i + 2, st, c, t, out);
        }
    }
}

/// Optimal depth by exhaustive search, with fewest calls among optimal-depth
/// schedules. Guarded to `length <= 10` and `pebbles <= 6`.
pub fn bfs_oracle(
    length: usize,
    pebbles: usize,
    weights: &WeightProfile,
    space_cap: Option<Rational64>,
    variant: Variant,
) -> Result<OptResult, SearchError> {
    if length == 0 || pebbles == 0 {
        return Err(SearchError::InvalidInput("length and pebbles must be at least 1".into()));
    }
    if length > BFS_MAX_LENGTH || pebbles > BFS_MAX_PEBBLES {
        return Err(SearchError::LimitExceeded);
    }
    let cap = space_cap.unwrap_or_else(|| Rational64::from_integer(pebbles as i64));
    let budget = Budget::new(length, pebbles, weights, cap);
    let ctx = Ctx { len: length, variant, budget: &budget };

    // state -> (cost, parent, step)
    let mut seen: HashMap<u32, (u32, u32, StepBits)> = HashMap::new();
    seen.insert(0, (0, u32::MAX, StepBits::default()));
    let mut layer = vec![0u32];
    let mut depth = 0;
    let mut expanded = 0u64;
    while !layer.is_empty() {
        let mut next: HashMap<u32, (u32, u32, StepBits)> = HashMap::new();
        for &s in &layer {
            expanded += 1;
            let base = seen[&s].0;
            for (t, step) in ctx.successors(s) {
                if seen.contains_key(&t) {
                    continue;
                }
                let c = base + step.cost();
                let e = next.entry(t).or_insert((u32::MAX, s, step));
                if c < e.0 {
                    *e = (c, s, step);
                }
            }
        }
        depth += 1;
        let goal = next.iter().filter(|(&t, _)| t == REACHED).map(|(_, v)| v.0).min();
        let mut keys: Vec<u32> = next.keys().copied().collect();
        keys.sort_unstable();
        seen.extend(next);
        if let Some(cost) = goal {
            let mut steps = Vec::new();
            let mut cur = REACHED;
            while cur != 0 {
                let (_, p, st) = seen[&cur];
                steps.push(st.to_step());
                cur = p;
            }
            steps.reverse();
            return Ok(OptResult {
                optimal_depth: depth,
                total_ops: cost as usize,
                schedule: Schedule { length, variant, steps },
                expanded_nodes: expanded,
                stored_nodes: seen.len() as u64,
                max_expanded_f: depth,
                tie_break: TieBreak::MinTotalOps,
                engine: Engine::Bfs,
            });
        }
        layer = keys;
    }
    Err(SearchError::Infeasible)
}
