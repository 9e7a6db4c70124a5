//! Game semantics on the line graph: site states, moves, two-phase time
//! steps, replay and the four schedule metrics.

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weights::{ScaledWeights, WeightProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteState {
    Pebble,
    Ghost,
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    MeasuredTarget,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Plain => f.write_str("plain"),
            Variant::MeasuredTarget => f.write_str("measured_target"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Variant::Plain),
            "measured_target" | "measured" => Ok(Variant::MeasuredTarget),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

/// Sites `0..=length`; site 0 is the dummy and stays pebbled.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GameState {
    sites: Vec<SiteState>,
}

impl GameState {
    pub fn initial(length: usize) -> Self {
        let mut sites = vec![SiteState::Empty; length + 1];
        sites[0] = SiteState::Pebble;
        GameState { sites }
    }

    /// Builds a state from sites `1..=length`; site 0 is prepended.
    pub fn from_sites(sites: &[SiteState]) -> Self {
        let mut all = Vec::with_capacity(sites.len() + 1);
        all.push(SiteState::Pebble);
        all.extend_from_slice(sites);
        GameState { sites: all }
    }

    pub fn length(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn site(&self, i: usize) -> SiteState {
        self.sites[i]
    }

    pub fn sites(&self) -> &[SiteState] {
        &self.sites
    }

    pub fn is_final(&self) -> bool {
        self.sites[1..].iter().all(|&s| s == SiteState::Empty)
    }

    pub fn pebble_count(&self) -> usize {
        self.sites[1..].iter().filter(|&&s| s == SiteState::Pebble).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Pebble,
    Unpebble,
    Ghost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub kind: MoveKind,
    pub index: usize,
}

impl Move {
    pub fn pebble(index: usize) -> Self {
        Move { kind: MoveKind::Pebble, index }
    }

    pub fn unpebble(index: usize) -> Self {
        Move { kind: MoveKind::Unpebble, index }
    }

    pub fn ghost(index: usize) -> Self {
        Move { kind: MoveKind::Ghost, index }
    }

    /// Lowest and highest site touched.
    pub fn active_set(&self) -> (usize, usize) {
        match self.kind {
            MoveKind::Ghost => (self.index, self.index),
            _ => (self.index - 1, self.index),
        }
    }
}

/// Phase 1 holds Pebble/Unpebble moves, phase 2 the ghosted indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TimeStep {
    pub moves: Vec<Move>,
    pub ghosts: Vec<usize>,
}

impl TimeStep {
    pub fn single(m: Move) -> Self {
        TimeStep { moves: vec![m], ghosts: Vec::new() }
    }

    pub fn with_ghosts(moves: Vec<Move>, ghosts: Vec<usize>) -> Self {
        TimeStep { moves, ghosts }
    }

    pub fn cost(&self) -> usize {
        self.moves.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub length: usize,
    pub variant: Variant,
    pub steps: Vec<TimeStep>,
}

impl Schedule {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn cost(&self) -> usize {
        self.steps.iter().map(TimeStep::cost).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("{kind:?}({index}): {reason}")]
    PreconditionViolated { kind: MoveKind, index: usize, reason: String },
    #[error("overlapping active sets at sites {0:?}")]
    OverlappingActiveSets(Vec<usize>),
}

fn violated(m: Move, reason: impl Into<String>) -> StepError {
    StepError::PreconditionViolated { kind: m.kind, index: m.index, reason: reason.into() }
}

/// In-place replay state with running space totals.
struct Replayer {
    sites: Vec<SiteState>,
    weights: ScaledWeights,
    pebbles: usize,
    occupied: usize,
    scratch: Vec<usize>,
}

impl Replayer {
    fn new(state: GameState, weights: &WeightProfile) -> Self {
        let mut r = Replayer {
            sites: state.sites,
            weights: ScaledWeights::new(weights, &[]),
            pebbles: 0,
            occupied: 0,
            scratch: Vec::new(),
        };
        for i in 1..r.sites.len() {
            match r.sites[i] {
                SiteState::Pebble => {
                    r.pebbles += 1;
                    r.occupied += 1;
                }
                SiteState::Ghost => r.occupied += 1,
                SiteState::Empty => {}
            }
        }
        r
    }

    fn set(&mut self, i: usize, to: SiteState) {
        let from = self.sites[i];
        if from == to {
            return;
        }
        if from == SiteState::Pebble {
            self.pebbles -= 1;
        }
        if to == SiteState::Pebble {
            self.pebbles += 1;
        }
        match (from == SiteState::Empty, to == SiteState::Empty) {
            (true, false) => self.occupied += 1,
            (false, true) => self.occupied -= 1,
            _ => {}
        }
        self.sites[i] = to;
    }

    /// Checks the whole step before touching any site.
    fn check(&mut self, step: &TimeStep) -> Result<(), StepError> {
        let len = self.sites.len() - 1;
        self.scratch.clear();
        for &m in &step.moves {
            if m.kind == MoveKind::Ghost {
                return Err(violated(m, "ghost moves belong to phase 2"));
            }
            if m.index == 0 || m.index > len {
                return Err(violated(m, format!("index outside [1, {len}]")));
            }
            self.scratch.push(m.index - 1);
            self.scratch.push(m.index);
        }
        self.scratch.sort_unstable();
        let mut overlap: Vec<usize> =
            self.scratch.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect();
        if !overlap.is_empty() {
            overlap.dedup();
            return Err(StepError::OverlappingActiveSets(overlap));
        }
        for &m in &step.moves {
            if self.sites[m.index - 1] != SiteState::Pebble {
                return Err(violated(m, format!("site {} is not pebbled", m.index - 1)));
            }
            let here = self.sites[m.index];
            match m.kind {
                MoveKind::Pebble if here == SiteState::Pebble => {
                    return Err(violated(m, "site already pebbled"))
                }
                MoveKind::Unpebble if here != SiteState::Pebble => {
                    return Err(violated(m, "site is not pebbled"))
                }
                _ => {}
            }
        }
        for (n, &g) in step.ghosts.iter().enumerate() {
            let m = Move::ghost(g);
            if g == 0 || g > len {
                return Err(violated(m, format!("index outside [1, {len}]")));
            }
            if step.ghosts[..n].contains(&g) {
                return Err(violated(m, "ghosted twice"));
            }
            let after_phase_one = match step.moves.iter().find(|mv| mv.index == g) {
                Some(mv) => mv.kind == MoveKind::Pebble,
                None => self.sites[g] == SiteState::Pebble,
            };
            if !after_phase_one {
                return Err(violated(m, "site is not pebbled after phase 1"));
            }
        }
        Ok(())
    }

    fn apply(&mut self, step: &TimeStep) -> Result<StepMetrics, StepError> {
        self.check(step)?;
        let mut space = self.pebbles;
        let mut transient = 0;
        for &m in &step.moves {
            transient += self.weights.transient(m.index);
            if m.kind == MoveKind::Pebble {
                space += 1;
            }
        }
        let weighted = self.weights.unscale(self.weights.site * space as i64 + transient);
        for &m in &step.moves {
            let to = if m.kind == MoveKind::Pebble { SiteState::Pebble } else { SiteState::Empty };
            self.set(m.index, to);
        }
        for &g in &step.ghosts {
            self.set(g, SiteState::Ghost);
        }
        Ok(StepMetrics { space, weighted_space: weighted, cost: step.moves.len() })
    }
}

/// Applies phase 1 then phase 2; `state` is left untouched.
pub fn apply_time_step(state: &GameState, step: &TimeStep) -> Result<GameState, StepError> {
    let mut r = Replayer::new(state.clone(), &WeightProfile::unit());
    r.apply(step)?;
    Ok(GameState { sites: r.sites })
}

pub fn depth_lower_bound(length: usize, variant: Variant) -> usize {
    match variant {
        Variant::Plain => 2 * length,
        Variant::MeasuredTarget => 2 * length - 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    /// Zero-based index of the offending step; equals the depth for end-state failures.
    pub step: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub space: usize,
    #[serde(with = "crate::weights::ratio_str")]
    pub weighted_space: Rational64,
    pub cost: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub depth: usize,
    pub cost: usize,
    pub space: usize,
    #[serde(with = "crate::weights::ratio_str")]
    pub weighted_space: Rational64,
    pub failure: Option<Failure>,
}

/// Per-step metrics of a full replay, or the first failure.
///
/// A site counts toward a step's space if it holds a pebble before the step,
/// after phase 1, or after phase 2.
pub fn replay(schedule: &Schedule, weights: &WeightProfile) -> Result<Vec<StepMetrics>, Failure> {
    let len = schedule.length;
    if len == 0 {
        return Err(Failure { step: 0, reason: "length must be at least 1".into() });
    }
    let mut r = Replayer::new(GameState::initial(len), weights);
    let mut reached = false;
    let mut out = Vec::with_capacity(schedule.steps.len());
    for (t, step) in schedule.steps.iter().enumerate() {
        if step.moves.is_empty() {
            return Err(Failure { step: t, reason: "step has no phase-1 moves".into() });
        }
        out.push(r.apply(step).map_err(|e| Failure { step: t, reason: e.to_string() })?);
        if !reached && step.moves.iter().any(|m| m.kind == MoveKind::Pebble && m.index == len) {
            reached = true;
            if schedule.variant == Variant::MeasuredTarget && r.sites[len] == SiteState::Pebble {
                r.set(len, SiteState::Empty);
            }
        }
    }
    let end = schedule.steps.len();
    if !reached {
        return Err(Failure { step: end, reason: format!("site {len} is never pebbled") });
    }
    if r.occupied != 0 {
        return Err(Failure { step: end, reason: "final state is not empty".into() });
    }
    Ok(out)
}

/// Replays bare steps from `state` with no start or end conditions; returns
/// per-step metrics and the final state.
pub fn replay_from(
    state: &GameState,
    steps: &[TimeStep],
    weights: &WeightProfile,
) -> Result<(Vec<StepMetrics>, GameState), Failure> {
    let mut r = Replayer::new(state.clone(), weights);
    let mut out = Vec::with_capacity(steps.len());
    for (t, step) in steps.iter().enumerate() {
        out.push(r.apply(step).map_err(|e| Failure { step: t, reason: e.to_string() })?);
    }
    Ok((out, GameState { sites: r.sites }))
}

pub fn validate(schedule: &Schedule, weights: &WeightProfile) -> ValidationReport {
    match replay(schedule, weights) {
        Ok(steps) => ValidationReport {
            valid: true,
            depth: steps.len(),
            cost: steps.iter().map(|s| s.cost).sum(),
            space: steps.iter().map(|s| s.space).max().unwrap_or(0),
            weighted_space: steps.iter().map(|s| s.weighted_space).max().unwrap_or_else(Rational64::zero),
            failure: None,
        },
        Err(failure) => ValidationReport {
            valid: false,
            depth: schedule.depth(),
            cost: schedule.cost(),
            space: 0,
            weighted_space: Rational64::zero(),
            failure: Some(failure),
        },
    }
}
