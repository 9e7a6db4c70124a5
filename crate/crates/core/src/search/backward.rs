//! Backward search from the final configuration towards a configuration
//! that a straight blast (`Pebble(j)` at step `j`) can reach.

use super::engine::{self, Domain, Edge, Found, Outcome};
use super::{Budget, Engine, OptResult, PebbleConfig, SearchError, StepBits, TieBreak};
use crate::pebble::{Schedule, TimeStep, Variant};

pub(crate) struct Backward<'a> {
    pub budget: &'a Budget,
    pub variant: Variant,
    /// Upper bound on pebbles in `[1, top]` when the target is reached.
    reach_pebbles: u32,
}

#[derive(Clone, Copy)]
struct Opt {
    site: usize,
    pebble: bool,
    ghost: u128,
    /// Bits added to / removed from the pebbled set going backwards.
    add: u128,
    remove: u128,
    extra: u32,
}

impl<'a> Backward<'a> {
    fn new(budget: &'a Budget, variant: Variant) -> Self {
        let l = budget.length;
        let mut dom = Backward { budget, variant, reach_pebbles: 0 };
        // step l counts the pebbles below l - 1, site l - 1 and site l
        let below = (0..=l as u32).rev().find(|&c| budget.fits(c + 2, budget.tau[l])).unwrap_or(0);
        let extra = if variant == Variant::Plain { 2 } else { 1 };
        dom.reach_pebbles = (below + extra).min(dom.top() as u32);
        dom
    }

    fn len(&self) -> usize {
        self.budget.length
    }

    /// Rightmost occupied site once the target has been reached.
    fn top(&self) -> usize {
        match self.variant {
            Variant::Plain => self.len(),
            Variant::MeasuredTarget => self.len() - 1,
        }
    }

    /// Pebbled sites right after the blast's last step (before any Measure).
    fn reach_set(&self, k: &PebbleConfig) -> u128 {
        match self.variant {
            Variant::Plain => k.pebbled,
            Variant::MeasuredTarget => k.pebbled | 1u128 << self.len(),
        }
    }

    fn blast_fits(&self, k: &PebbleConfig) -> bool {
        let reach = self.reach_set(k);
        (1..=self.len()).all(|j| {
            let below = if j >= 3 { (reach & ((1u128 << (j - 1)) - 1)).count_ones() } else { 0 };
            let count = below + (j >= 2) as u32 + 1;
            self.budget.fits(count, self.budget.tau[j])
        })
    }

    fn blast_steps(&self, k: &PebbleConfig) -> Vec<TimeStep> {
        let l = self.len();
        let reach = self.reach_set(k);
        (1..=l)
            .map(|j| {
                let mut s = StepBits { pebble: 1 << j, ..StepBits::default() };
                if j >= 2 && reach >> (j - 1) & 1 == 0 {
                    s.ghost |= 1 << (j - 1);
                }
                if j == l && reach >> l & 1 == 0 {
                    s.ghost |= 1 << l;
                }
                s.to_step()
            })
            .collect()
    }

    fn options(&self, k: &PebbleConfig, out: &mut Vec<Opt>) {
        let r = k.rightmost as usize;
        let top = self.top();
        let left = |i: usize| i == 1 || k.has(i - 1);
        for i in 1..=(r + 1).min(top) {
            let bit = 1u128 << i;
            if k.has(i) {
                if left(i) {
                    out.push(Opt { site: i, pebble: true, ghost: 0, add: 0, remove: bit, extra: 0 });
                } else {
                    let prev = bit >> 1;
                    out.push(Opt { site: i, pebble: true, ghost: prev, add: prev, remove: bit, extra: 1 });
                }
            } else {
                if left(i) && (i < r || i == r + 1) {
                    out.push(Opt { site: i, pebble: false, ghost: 0, add: bit, remove: 0, extra: 1 });
                }
                if i == r + 1 && r >= 1 && !k.has(r) {
                    let prev = bit >> 1;
                    out.push(Opt {
                        site: i,
                        pebble: false,
                        ghost: prev,
                        add: bit | prev,
                        remove: 0,
                        extra: 2,
                    });
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        &self,
        k: &PebbleConfig,
        opts: &[Opt],
        at: usize,
        last_site: usize,
        acc: (StepBits, u128, u128),
        count: u32,
        tau: i64,
        out: &mut Vec<Edge>,
    ) {
        if at == opts.len() {
            let (step, add, remove) = acc;
            if step.pebble | step.unpebble == 0 {
                return;
            }
            let r = k.rightmost as usize;
            let moved_up = (step.pebble | step.unpebble) >> (r + 1) & 1 == 1;
            let key = PebbleConfig {
                pebbled: (k.pebbled & !remove) | add,
                rightmost: if moved_up { r as u8 + 1 } else { r as u8 },
                target_reached: true,
            };
            out.push(Edge { key, cost: step.cost(), step });
            return;
        }
        let site = opts[at].site;
        let mut next = at;
        while next < opts.len() && opts[next].site == site {
            next += 1;
        }
        self.rec(k, opts, next, last_site, acc, count, tau, out);
        if last_site != 0 && last_site + 1 == site {
            return;
        }
        for o in &opts[at..next] {
            let c = count + o.extra;
            let t = tau + self.budget.tau[site];
            if !self.budget.fits(c, t) {
                continue;
            }
            let (mut s, add, remove) = acc;
            if o.pebble {
                s.pebble |= 1 << site;
            } else {
                s.unpebble |= 1 << site;
            }
            s.ghost |= o.ghost;
            self.rec(k, opts, next, site, (s, add | o.add, remove | o.remove), c, t, out);
        }
    }
}

impl Domain for Backward<'_> {
    fn start(&self) -> PebbleConfig {
        PebbleConfig { pebbled: 0, rightmost: 0, target_reached: true }
    }

    fn h(&self, k: &PebbleConfig) -> (u32, u32) {
        let rest = (self.top() - k.rightmost as usize) as u32;
        let l = self.len() as u32;
        // Sites right of R are cleared on the way from the reach configuration;
        // a ghost there costs two calls. A pebbled site left of R that was a
        // ghost at the reach costs one. Only `reach_pebbles` sites were pebbled.
        let calls = (2 * rest + k.count()).saturating_sub(self.reach_pebbles).max(rest);
        (rest + l, calls + l)
    }

    fn is_goal(&self, k: &PebbleConfig) -> bool {
        k.rightmost as usize == self.top() && self.blast_fits(k)
    }

    fn expand(&self, k: &PebbleConfig, out: &mut Vec<Edge>) {
        let mut opts = Vec::new();
        self.options(k, &mut opts);
        self.rec(k, &opts, 0, 0, (StepBits::default(), 0, 0), k.count(), 0, out);
    }
}

/// Searches for a schedule of depth at most `bound` (unbounded when `None`).
pub(crate) fn search(
    budget: &Budget,
    variant: Variant,
    use_cost: bool,
    bound: Option<usize>,
    node_cap: usize,
) -> Result<Outcome, SearchError> {
    let dom = Backward::new(budget, variant);
    let l = budget.length;
    // `h` already counts the `l` blast steps
    match engine::run(&dom, use_cost, bound.map(|b| b as u32), node_cap)? {
        Found::Exhausted { expanded, stored } => Ok(Outcome::Exhausted { expanded, stored }),
        Found::Yes(sol) => {
            let reach = sol.keys.last().expect("solution has a goal key");
            let mut steps = dom.blast_steps(reach);
            steps.extend(sol.steps.iter().rev().map(|s| s.to_step()));
            Ok(Outcome::Found(OptResult {
                optimal_depth: sol.depth as usize + l,
                total_ops: sol.cost as usize + l,
                schedule: Schedule { length: l, variant, steps },
                expanded_nodes: sol.expanded,
                stored_nodes: sol.stored,
                max_expanded_f: sol.max_f as usize,
                tie_break: TieBreak::MinTotalOps,
                engine: Engine::Backward,
            }))
        }
    }
}
