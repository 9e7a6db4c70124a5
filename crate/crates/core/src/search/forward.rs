//! Forward search over the whole game, from the empty line to the empty line.

use super::engine::{self, Domain, Edge, Found, Outcome};
use super::{Budget, Engine, OptResult, PebbleConfig, SearchError, StepBits};
use crate::pebble::{Schedule, Variant};

pub(crate) struct Forward<'a> {
    pub budget: &'a Budget,
    pub variant: Variant,
}

#[derive(Clone, Copy)]
struct Opt {
    site: usize,
    pebble: bool,
    ghost: u128,
}

impl Forward<'_> {
    fn len(&self) -> usize {
        self.budget.length
    }

    /// Rightmost index still to be cleared right after the target is reached.
    fn top(&self) -> u32 {
        match self.variant {
            Variant::Plain => self.len() as u32,
            Variant::MeasuredTarget => self.len() as u32 - 1,
        }
    }

    fn options(&self, k: &PebbleConfig, out: &mut Vec<Opt>) {
        let l = self.len();
        let r = k.rightmost as usize;
        let limit = if k.target_reached { r } else { (r + 1).min(l) };
        let left_ok = |i: usize| i == 1 || k.has(i - 1);
        for i in 1..=limit {
            if !left_ok(i) {
                continue;
            }
            if !k.has(i) {
                let prev = if i >= 2 { 1u128 << (i - 1) } else { 0 };
                let reach_plain = !k.target_reached && i == l && self.variant == Variant::Plain;
                let targets = if reach_plain { [0, 1u128 << l] } else { [0, 0] };
                let n_targets = if reach_plain { 2 } else { 1 };
                for &t in &targets[..n_targets] {
                    out.push(Opt { site: i, pebble: true, ghost: t });
                    if prev != 0 {
                        out.push(Opt { site: i, pebble: true, ghost: t | prev });
                    }
                }
            } else {
                out.push(Opt { site: i, pebble: false, ghost: 0 });
                if i == r && i >= 2 {
                    out.push(Opt { site: i, pebble: false, ghost: 1u128 << (i - 1) });
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
        step: StepBits,
        count: u32,
        tau: i64,
        out: &mut Vec<Edge>,
    ) {
        if at == opts.len() {
            if step.pebble | step.unpebble != 0 {
                out.push(Edge { key: self.apply(k, &step), cost: step.cost(), step });
            }
            return;
        }
        let site = opts[at].site;
        // every option at `site` is skipped together
        let mut next = at;
        while next < opts.len() && opts[next].site == site {
            next += 1;
        }
        self.rec(k, opts, next, last_site, step, count, tau, out);
        if last_site + 1 == site && last_site != 0 {
            return;
        }
        for o in &opts[at..next] {
            let c = count + o.pebble as u32;
            let t = tau + self.budget.tau[site];
            if !self.budget.fits(c, t) {
                continue;
            }
            let mut s = step;
            if o.pebble {
                s.pebble |= 1 << site;
            } else {
                s.unpebble |= 1 << site;
            }
            s.ghost |= o.ghost;
            self.rec(k, opts, next, site, s, c, t, out);
        }
    }

    fn apply(&self, k: &PebbleConfig, s: &StepBits) -> PebbleConfig {
        let l = self.len();
        let r = k.rightmost as usize;
        let mut pebbled = (k.pebbled | s.pebble) & !s.unpebble & !s.ghost;
        let mut rightmost = r;
        if s.pebble >> (r + 1) & 1 == 1 {
            rightmost = r + 1;
        } else if r >= 1 && s.unpebble >> r & 1 == 1 {
            rightmost = r - 1;
        }
        let mut reached = k.target_reached;
        if !reached && s.pebble >> l & 1 == 1 {
            reached = true;
            if self.variant == Variant::MeasuredTarget {
                pebbled &= !(1u128 << l);
                rightmost = l - 1;
            }
        }
        PebbleConfig { pebbled, rightmost: rightmost as u8, target_reached: reached }
    }
}

impl Domain for Forward<'_> {
    fn start(&self) -> PebbleConfig {
        PebbleConfig { pebbled: 0, rightmost: 0, target_reached: false }
    }

    fn h(&self, k: &PebbleConfig) -> (u32, u32) {
        let r = k.rightmost as u32;
        if k.target_reached {
            (r, r)
        } else {
            let climb = self.len() as u32 - r;
            (climb + self.top(), climb + self.top())
        }
    }

    fn is_goal(&self, k: &PebbleConfig) -> bool {
        k.target_reached && k.rightmost == 0
    }

    fn expand(&self, k: &PebbleConfig, out: &mut Vec<Edge>) {
        let mut opts = Vec::new();
        self.options(k, &mut opts);
        self.rec(k, &opts, 0, 0, StepBits::default(), k.count(), 0, out);
    }
}

pub(crate) fn search(
    budget: &Budget,
    variant: Variant,
    use_cost: bool,
    node_cap: usize,
) -> Result<Outcome, SearchError> {
    let dom = Forward { budget, variant };
    match engine::run(&dom, use_cost, None, node_cap)? {
        Found::Exhausted { expanded, stored } => Ok(Outcome::Exhausted { expanded, stored }),
        Found::Yes(sol) => {
            let steps = sol.steps.iter().map(|s| s.to_step()).collect();
            let schedule = Schedule { length: budget.length, variant, steps };
            Ok(Outcome::Found(OptResult {
                optimal_depth: sol.depth as usize,
                total_ops: sol.cost as usize,
                schedule,
                expanded_nodes: sol.expanded,
                stored_nodes: sol.stored,
                max_expanded_f: sol.max_f as usize,
                tie_break: super::TieBreak::MinTotalOps,
                engine: Engine::Forward,
            }))
        }
    }
}
