//! Exact optimal-depth search for a pebble budget.
//!
//! [`astar_search`] works on abstract configurations: the set of pebbled
//! sites plus the rightmost occupied index. Unpebbled sites below the
//! rightmost one behave the same whether ghosted or empty, so ghosts are
//! only materialized when a schedule is written out. Ghosts are placed only
//! next to a move that needs them: `Ghost(p)` rides with `Pebble(p+1)`, with
//! `Unpebble(p+1)` when `p+1` is the rightmost occupied site, or (plain
//! variant) on the target in the step that first pebbles it.
//!
//! Two engines share one A* core. The backward engine starts from the final
//! configuration and stops at any configuration that a forward blast prefix
//! can produce. It first runs with the depth bound pinned to the variant's
//! lower bound. If that finds nothing, it runs again without a bound when no
//! site is heavier than the target (then it is exact at any depth), and
//! otherwise the forward engine searches the whole game. [`bfs_oracle`] is an unreduced breadth-first search used
//! to check both.

mod backward;
mod bfs;
mod engine;
mod forward;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pebble::{depth_lower_bound, Move, Schedule, TimeStep, Variant};
use crate::weights::{ScaledWeights, WeightProfile};

pub use bfs::{bfs_oracle, BFS_MAX_LENGTH, BFS_MAX_PEBBLES};

/// Longest line the bitset key supports.
pub const MAX_LENGTH: usize = 127;
pub const DEFAULT_NODE_CAP: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no schedule fits the space budget")]
    Infeasible,
    #[error("node store reached its cap of {0} nodes")]
    MemoryLimit(usize),
    #[error("instance outside the oracle's guard (length <= 10, pebbles <= 6)")]
    LimitExceeded,
    #[error("invalid search input: {0}")]
    InvalidInput(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    None,
    MinTotalOps,
}

impl std::str::FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(TieBreak::None),
            "min_total_ops" | "min-total-ops" => Ok(TieBreak::MinTotalOps),
            other => Err(format!("unknown tie-break `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Backward,
    Forward,
    Bfs,
}

/// Search key: pebbled sites as a bitset (bit `i` is site `i`), the
/// rightmost occupied site and whether the target has been pebbled yet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PebbleConfig {
    pub pebbled: u128,
    pub rightmost: u8,
    pub target_reached: bool,
}

impl PebbleConfig {
    pub fn count(&self) -> u32 {
        self.pebbled.count_ones()
    }

    pub fn has(&self, i: usize) -> bool {
        self.pebbled >> i & 1 == 1
    }

    pub fn sites(&self) -> Vec<usize> {
        (1..128).filter(|&i| self.has(i)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SearchParams {
    pub length: usize,
    pub pebbles: usize,
    pub weights: WeightProfile,
    /// Bound on weighted space; `None` means the pebble count `s`.
    pub space_cap: Option<Rational64>,
    pub variant: Variant,
    pub tie_break: TieBreak,
    pub node_cap: usize,
    /// Worker hint; results never depend on it.
    pub threads: usize,
}

impl SearchParams {
    pub fn new(length: usize, pebbles: usize, variant: Variant) -> Self {
        SearchParams {
            length,
            pebbles,
            weights: WeightProfile::unit(),
            space_cap: None,
            variant,
            tie_break: TieBreak::MinTotalOps,
            node_cap: DEFAULT_NODE_CAP,
            threads: 1,
        }
    }

    pub fn weights(mut self, w: WeightProfile) -> Self {
        self.weights = w;
        self
    }

    pub fn space_cap(mut self, cap: Rational64) -> Self {
        self.space_cap = Some(cap);
        self
    }

    pub fn tie_break(mut self, t: TieBreak) -> Self {
        self.tie_break = t;
        self
    }

    pub fn node_cap(mut self, n: usize) -> Self {
        self.node_cap = n;
        self
    }

    pub fn threads(mut self, n: usize) -> Self {
        self.threads = n;
        self
    }

    fn cap(&self) -> Rational64 {
        self.space_cap.unwrap_or_else(|| Rational64::from_integer(self.pebbles as i64))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OptResult {
    pub optimal_depth: usize,
    /// Pebble + Unpebble count of the returned schedule.
    pub total_ops: usize,
    #[serde(skip)]
    pub schedule: Schedule,
    pub expanded_nodes: u64,
    pub stored_nodes: u64,
    /// Largest `g + h` (depth part) over expanded nodes.
    pub max_expanded_f: usize,
    pub tie_break: TieBreak,
    pub engine: Engine,
}

/// Space limits in integer units.
#[derive(Clone, Debug)]
pub(crate) struct Budget {
    pub length: usize,
    pub pebbles: u32,
    pub cap: i64,
    pub site: i64,
    pub tau: Vec<i64>,
}

impl Budget {
    pub fn new(length: usize, pebbles: usize, weights: &WeightProfile, cap: Rational64) -> Self {
        let sw = ScaledWeights::new(weights, &[cap]);
        Budget {
            length,
            pebbles: pebbles.min(u32::MAX as usize) as u32,
            cap: sw.lift(cap),
            site: sw.site,
            tau: (0..=length).map(|i| sw.transient(i)).collect(),
        }
    }

    /// No site carries more transient weight than the target. Then the
    /// straight blast is the cheapest way to first reach the target, and the
    /// backward engine alone is exact at any depth.
    pub fn blast_safe(&self) -> bool {
        let top = self.tau[self.length];
        self.tau[1..].iter().all(|&t| t <= top)
    }

    /// A step that counts `count` sites and pays `tau` in transients.
    pub fn fits(&self, count: u32, tau: i64) -> bool {
        count <= self.pebbles && self.site * count as i64 + tau <= self.cap
    }
}

/// One time step as bit masks over sites.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct StepBits {
    pub pebble: u128,
    pub unpebble: u128,
    pub ghost: u128,
}

impl StepBits {
    pub fn cost(&self) -> u32 {
        (self.pebble | self.unpebble).count_ones()
    }

    pub fn to_step(self) -> TimeStep {
        let bits = |m: u128| (1..128).filter(move |&i| m >> i & 1 == 1);
        let mut moves: Vec<Move> = bits(self.pebble).map(Move::pebble).collect();
        moves.extend(bits(self.unpebble).map(Move::unpebble));
        moves.sort_by_key(|m| m.index);
        TimeStep { moves, ghosts: bits(self.ghost).collect() }
    }
}

fn check_input(p: &SearchParams) -> Result<(), SearchError> {
    if p.length == 0 {
        return Err(SearchError::InvalidInput("length must be at least 1".into()));
    }
    if p.length > MAX_LENGTH {
        return Err(SearchError::InvalidInput(format!("length {} exceeds {MAX_LENGTH}", p.length)));
    }
    if p.pebbles == 0 {
        return Err(SearchError::InvalidInput("pebbles must be at least 1".into()));
    }
    if p.cap() < Rational64::zero() {
        return Err(SearchError::InvalidInput("negative space cap".into()));
    }
    Ok(())
}

/// Minimum-depth schedule within the budget; among those, fewest Pebble and
/// Unpebble calls when `tie_break` is `MinTotalOps`.
pub fn astar_search(p: &SearchParams) -> Result<OptResult, SearchError> {
    check_input(p)?;
    let budget = Budget::new(p.length, p.pebbles, &p.weights, p.cap());
    let use_cost = p.tie_break == TieBreak::MinTotalOps;
    let tagged = |mut r: OptResult| {
        r.tie_break = p.tie_break;
        r
    };
    // Children above the bound are never stored, which keeps lower-bound
    // instances small; only if that fails is the open-ended search needed.
    let bound = depth_lower_bound(p.length, p.variant);
    let (expanded, stored) = match backward::search(&budget, p.variant, use_cost, Some(bound), p.node_cap)? {
        engine::Outcome::Found(r) => return Ok(tagged(r)),
        engine::Outcome::Exhausted { expanded, stored } => (expanded, stored),
    };
    let rest = if budget.blast_safe() {
        backward::search(&budget, p.variant, use_cost, None, p.node_cap)?
    } else {
        forward::search(&budget, p.variant, use_cost, p.node_cap)?
    };
    match rest {
        engine::Outcome::Found(mut r) => {
            r.expanded_nodes += expanded;
            r.stored_nodes = r.stored_nodes.max(stored);
            Ok(tagged(r))
        }
        engine::Outcome::Exhausted { .. } => Err(SearchError::Infeasible),
    }
}

/// Smallest pebble budget whose optimal depth is at most `target_depth`.
pub fn min_pebbles_for_depth(
    length: usize,
    target_depth: usize,
    weights: &WeightProfile,
    variant: Variant,
) -> Result<usize, SearchError> {
    if length == 0 {
        return Err(SearchError::InvalidInput("length must be at least 1".into()));
    }
    if target_depth < depth_lower_bound(length, variant) {
        return Err(SearchError::InvalidInput(format!(
            "target depth {target_depth} below the lower bound {}",
            depth_lower_bound(length, variant)
        )));
    }
    // with every site pebbled at once plus one transient slot, nothing more can help
    let max_tau = (1..=length).map(|i| weights.transient_weight(i)).max().unwrap_or_else(Rational64::zero);
    let ceiling = ((weights.default_site_weight * (length as i64 + 1) + max_tau).ceil().to_integer()
        as usize)
        .max(length + 1);
    for s in 1..=ceiling {
        let p = SearchParams::new(length, s, variant).weights(weights.clone()).tie_break(TieBreak::None);
        match astar_search(&p) {
            Ok(r) if r.optimal_depth <= target_depth => return Ok(s),
            Ok(_) | Err(SearchError::Infeasible) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(SearchError::Infeasible)
}
