//! Cost model for Regev-style factoring circuits whose exponentiation is
//! scheduled as a spooky pebble game.
//!
//! Parameters `(d, m)` are chosen to minimize the bound on `log D`, the line
//! length follows from `log D` and the window size, and depth and total
//! multiplication counts come from a pebbling strategy. The Fibonacci
//! comparison, the multiplication-depth bound for the sequential scheme and
//! static Shor reference numbers live here too.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::a_sequence::construct;
use crate::pebble::{depth_lower_bound, validate, Variant};
use crate::search::{astar_search, SearchError, SearchParams, TieBreak, DEFAULT_NODE_CAP};
use crate::weights::WeightProfile;

/// Block sizes with a tabulated root-Hermite factor.
pub const ROOT_HERMITE: [(u32, &str); 4] = [
    (60, "1.01145310214785"),
    (120, "1.00843474281592"),
    (160, "1.00718344897388"),
    (200, "1.00628260691082"),
];

/// Fractional parts closer than this to an integer are re-evaluated exactly.
const GUARD: f64 = 1e-6;
/// Fixed-point fraction bits for the exact path.
const FRAC_BITS: usize = 192;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error("no root-Hermite factor for block size {0}")]
    UnknownBeta(u32),
    #[error("space formula needs s in {{1, 2}}, got {0}")]
    UnsupportedS(usize),
    #[error("no reference value for this configuration")]
    UnknownConfiguration,
    #[error("invalid estimator input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// A root-Hermite factor kept as its exact decimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootHermite {
    digits: String,
    exact: BigRational,
}

impl RootHermite {
    pub fn for_beta(beta: u32) -> Result<Self, EstimateError> {
        let (_, text) =
            ROOT_HERMITE.iter().find(|(b, _)| *b == beta).ok_or(EstimateError::UnknownBeta(beta))?;
        Self::parse(text)
    }

    /// Parses a plain decimal such as `1.0071`; the value must exceed 1.
    pub fn parse(text: &str) -> Result<Self, EstimateError> {
        let bad = || EstimateError::InvalidInput(format!("bad root-Hermite factor `{text}`"));
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if int.is_empty() || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let exact = BigRational::new(num, BigInt::from(10u32).pow(frac.len() as u32));
        if exact <= BigRational::one() {
            return Err(bad());
        }
        Ok(RootHermite { digits: text.to_string(), exact })
    }

    pub fn as_str(&self) -> &str {
        &self.digits
    }

    pub fn value(&self) -> f64 {
        self.digits.parse().expect("validated decimal")
    }
}

/// Right-hand side of the `log D` bound in floating point, with `C = 1`.
pub fn log_d_rhs(n: u32, d: u32, m: u32, delta0: &RootHermite, include_lower_order: bool) -> f64 {
    let (n, d, m) = (n as f64, d as f64, m as f64);
    let mut v = 2.0 * (m + d) * delta0.value().log2() + n / d + n / m;
    if include_lower_order {
        v += 0.5 * (m + d).log2() + 0.5 * (m + 1.0).log2() + (6.0 * d).log2() - 0.5 + 2.0 / m;
    }
    v
}

/// Smallest integer strictly greater than the bound's right-hand side.
pub fn log_d_bound(n: u32, d: u32, m: u32, delta0: &RootHermite, include_lower_order: bool) -> u32 {
    assert!(d >= 1 && m >= 1, "d and m must be positive");
    let v = log_d_rhs(n, d, m, delta0, include_lower_order);
    if (v - v.round()).abs() < GUARD {
        return log_d_bound_exact(n, d, m, delta0, include_lower_order);
    }
    v.floor() as u32 + 1
}

/// [`log_d_bound`] evaluated in fixed point with `FRAC_BITS` fraction bits.
pub fn log_d_bound_exact(n: u32, d: u32, m: u32, delta0: &RootHermite, include_lower_order: bool) -> u32 {
    assert!(d >= 1 && m >= 1, "d and m must be positive");
    let int = |x: u32| BigRational::from_integer(BigInt::from(x));
    let mut total = log2_fixed(&delta0.exact) * BigInt::from(2 * (m as u64 + d as u64));
    let mut rational = BigRational::new(BigInt::from(n), BigInt::from(d))
        + BigRational::new(BigInt::from(n), BigInt::from(m));
    if include_lower_order {
        rational += BigRational::new(BigInt::from(2), BigInt::from(m));
        rational -= BigRational::new(BigInt::one(), BigInt::from(2));
        let halves = log2_fixed(&int(m + d)) + log2_fixed(&int(m + 1));
        total += halves >> 1usize;
        total += log2_fixed(&int(6 * d));
    }
    let scaled = rational * BigRational::from_integer(BigInt::one() << FRAC_BITS);
    total += scaled.floor().to_integer();
    let floor = total >> FRAC_BITS;
    (floor + BigInt::one()).to_u32().expect("bound fits in u32")
}

/// `floor(log2(x) * 2^FRAC_BITS)` up to a few units in the last place, `x >= 1`.
fn log2_fixed(x: &BigRational) -> BigInt {
    assert!(!x.is_negative() && x >= &BigRational::one(), "log2 argument below 1");
    let (num, den) = (x.numer().magnitude(), x.denom().magnitude());
    let mut k = num.bits() as i64 - den.bits() as i64;
    let at = |k: i64| -> bool {
        // num >= den * 2^k
        if k >= 0 {
            num >= &(den << k as usize)
        } else {
            (num << (-k) as usize) >= *den
        }
    };
    if !at(k) {
        k -= 1;
    }
    let p = FRAC_BITS + 64;
    // y = x / 2^k in [1, 2), scaled by 2^p
    let mut y: BigUint = (num << p) >> k as usize;
    y /= den;
    let two = BigUint::one() << (p + 1);
    let mut frac = BigUint::zero();
    for _ in 0..FRAC_BITS {
        y = (&y * &y) >> p;
        frac <<= 1;
        if y >= two {
            y >>= 1;
            frac |= BigUint::one();
        }
    }
    (BigInt::from(k) << FRAC_BITS) + BigInt::from(frac)
}

fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&c| (2..).take_while(|p| p * p <= c).all(|p| c % p != 0))
}

/// Largest `d` with `prod_{i<=d} p_i^exponent <= 2^n`.
pub fn d_max_with_exponent(n: u32, exponent: u32) -> u32 {
    let limit = BigUint::one() << n as usize;
    let mut prod = BigUint::one();
    let mut d = 0;
    for p in primes() {
        prod *= BigUint::from(p).pow(exponent);
        if prod > limit {
            return d;
        }
        d += 1;
    }
    unreachable!("prime iterator is infinite")
}

/// Largest `d` with `prod_{i<=d} p_i^(2^w - 1) <= 2^n`.
pub fn d_max(n: u32, w: u32) -> u32 {
    assert!((1..32).contains(&w), "window out of range");
    d_max_with_exponent(n, (1u32 << w) - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub d: u32,
    pub m: u32,
    pub log_d: u32,
}

/// Scans `d in [1, d_cap]`, `m in [d + 4, 8 d_cap]` for the smallest bound;
/// ties go to smaller `d`, then smaller `m`.
pub fn select_params_with(
    n: u32,
    delta0: &RootHermite,
    d_cap: u32,
    include_lower_order: bool,
) -> LatticeParams {
    assert!(d_cap >= 1, "no admissible d");
    let m_cap = 8 * d_cap;
    let mut best: Option<LatticeParams> = None;
    for d in 1..=d_cap {
        for m in d + 4..=m_cap {
            let log_d = log_d_bound(n, d, m, delta0, include_lower_order);
            if best.is_none_or(|b| log_d < b.log_d) {
                best = Some(LatticeParams { d, m, log_d });
            }
        }
    }
    best.expect("scan range is non-empty")
}

pub fn select_params(n: u32, beta: u32, w: u32) -> Result<LatticeParams, EstimateError> {
    let delta0 = RootHermite::for_beta(beta)?;
    let cap = d_max(n, w);
    if cap == 0 {
        return Err(EstimateError::InvalidInput(format!("no d fits n = {n}")));
    }
    Ok(select_params_with(n, &delta0, cap, true))
}

/// Line length for a given `log D` and window size.
pub fn game_length(log_d: u32, w: u32) -> usize {
    assert!(log_d >= 1 && w >= 1);
    ((w + 1) * ((log_d - 1) / w) + 1) as usize
}

pub fn qubit_ratio(n: u32, d: u32, log_d: u32, s: usize) -> f64 {
    (d as f64 * log_d as f64 + s as f64 * n as f64) / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Astar,
    Construction,
    Table,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "astar" => Ok(Strategy::Astar),
            "construction" => Ok(Strategy::Construction),
            "table" => Ok(Strategy::Table),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Astar => "astar",
            Strategy::Construction => "construction",
            Strategy::Table => "table",
        })
    }
}

#[derive(Clone, Debug)]
pub struct EstimatorParams {
    pub n: u32,
    pub beta: u32,
    pub window: u32,
    pub pebbles: usize,
    /// Transient ancilla weight on sites `i ≡ 1 (mod w+1)`, in pebble units.
    pub tau: Rational64,
    pub include_lower_order: bool,
    pub tie_break: TieBreak,
    pub node_cap: usize,
}

impl EstimatorParams {
    pub fn new(n: u32, beta: u32, window: u32, pebbles: usize) -> Self {
        EstimatorParams {
            n,
            beta,
            window,
            pebbles,
            tau: Rational64::one(),
            include_lower_order: true,
            tie_break: TieBreak::None,
            node_cap: DEFAULT_NODE_CAP,
        }
    }

    pub fn weights(&self) -> WeightProfile {
        WeightProfile::factoring(self.window as usize, self.tau)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    pub n: u32,
    pub beta: u32,
    pub window: u32,
    pub pebbles: usize,
    pub length: usize,
    pub d: u32,
    pub m: u32,
    pub log_d: u32,
    pub depth: usize,
    pub total_mults: usize,
    pub qubit_ratio: f64,
    pub strategy: Strategy,
    /// Pebbles the construction actually uses (construction strategy only).
    pub pebbles_used: Option<usize>,
    /// The construction's weighted space exceeds the requested budget.
    pub exceeds_budget: bool,
}

/// Tabulated pebbling results: `(n, beta, s, d, m, log D, depth, total)`, `w = 2`.
pub const PEBBLING_TABLE: [(u32, u32, usize, u32, u32, u32, usize, usize); 16] = [
    (2048, 60, 5, 90, 203, 59, 465, 500),
    (2048, 60, 12, 90, 203, 59, 175, 295),
    (2048, 120, 5, 90, 242, 56, 418, 451),
    (2048, 120, 12, 90, 242, 56, 163, 266),
    (2048, 160, 5, 94, 242, 54, 396, 429),
    (2048, 160, 12, 94, 242, 54, 157, 253),
    (2048, 200, 5, 94, 255, 53, 396, 429),
    (2048, 200, 12, 94, 255, 53, 157, 253),
    (4096, 60, 5, 162, 314, 72, 610, 652),
    (4096, 60, 8, 162, 314, 72, 287, 444),
    (4096, 120, 5, 166, 371, 67, 561, 600),
    (4096, 120, 12, 166, 371, 67, 200, 381),
    (4096, 160, 5, 166, 388, 65, 537, 575),
    (4096, 160, 12, 166, 388, 65, 193, 345),
    (4096, 200, 5, 162, 401, 64, 513, 550),
    (4096, 200, 12, 162, 401, 64, 187, 326),
];

pub fn estimate(p: &EstimatorParams, strategy: Strategy) -> Result<CostReport, EstimateError> {
    if p.window == 0 || p.pebbles == 0 || p.n < 2 {
        return Err(EstimateError::InvalidInput("need n >= 2, window >= 1, pebbles >= 1".into()));
    }
    let delta0 = RootHermite::for_beta(p.beta)?;
    let report = |lp: LatticeParams, depth, total, used, exceeds| CostReport {
        n: p.n,
        beta: p.beta,
        window: p.window,
        pebbles: p.pebbles,
        length: game_length(lp.log_d, p.window),
        d: lp.d,
        m: lp.m,
        log_d: lp.log_d,
        depth,
        total_mults: total,
        qubit_ratio: qubit_ratio(p.n, lp.d, lp.log_d, p.pebbles),
        strategy,
        pebbles_used: used,
        exceeds_budget: exceeds,
    };
    if strategy == Strategy::Table {
        let row = PEBBLING_TABLE
            .iter()
            .find(|r| p.window == 2 && (r.0, r.1, r.2) == (p.n, p.beta, p.pebbles))
            .ok_or(EstimateError::UnknownConfiguration)?;
        return Ok(report(LatticeParams { d: row.3, m: row.4, log_d: row.5 }, row.6, row.7, None, false));
    }
    let cap = d_max(p.n, p.window);
    if cap == 0 {
        return Err(EstimateError::InvalidInput(format!("no d fits n = {}", p.n)));
    }
    let lp = select_params_with(p.n, &delta0, cap, p.include_lower_order);
    let length = game_length(lp.log_d, p.window);
    let weights = p.weights();
    match strategy {
        Strategy::Astar => {
            let sp = SearchParams::new(length, p.pebbles, Variant::MeasuredTarget)
                .weights(weights)
                .tie_break(p.tie_break)
                .node_cap(p.node_cap);
            let r = astar_search(&sp)?;
            Ok(report(lp, r.optimal_depth, r.total_ops, None, false))
        }
        Strategy::Construction => {
            let trace = construct(length, Variant::MeasuredTarget);
            let v = validate(&trace.schedule, &weights);
            debug_assert!(v.valid);
            let over = v.weighted_space > Rational64::from_integer(p.pebbles as i64);
            Ok(report(lp, v.depth, v.cost, Some(v.space), over))
        }
        Strategy::Table => unreachable!(),
    }
}

/// `G_0 = 0`, `G_1 = 1`, `G_k = r G_{k-1} + G_{k-2}`.
pub fn g_sequence(r: u32, count: usize) -> Vec<BigUint> {
    let mut g = vec![BigUint::zero(), BigUint::one()];
    while g.len() < count {
        let k = g.len();
        let next = &g[k - 1] * r + &g[k - 2];
        g.push(next);
    }
    g.truncate(count);
    g
}

/// Largest `K` with `G_K <= 2^log_d`.
pub fn fib_k(r: u32, log_d: u32) -> u32 {
    assert!(r >= 1);
    let limit = BigUint::one() << log_d as usize;
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    let mut k = 0;
    while b <= limit {
        let next = &b * r + &a;
        a = std::mem::replace(&mut b, next);
        k += 1;
    }
    k
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FibReport {
    pub n: u32,
    pub beta: u32,
    pub r: u32,
    pub s: u32,
    pub d: u32,
    pub m: u32,
    pub log_d: u32,
    pub k: u32,
    pub depth: u64,
    pub total_mults: u64,
    /// Lower bound on qubits per bit of `N`.
    pub qubit_ratio_lower: f64,
}

fn check_fib(r: u32, s: u32) -> Result<u32, EstimateError> {
    if r == 0 || s == 0 || !s.is_power_of_two() || !r.is_multiple_of(s) {
        return Err(EstimateError::InvalidInput(format!(
            "need s a power of 2 dividing r, got r = {r}, s = {s}"
        )));
    }
    Ok(s.trailing_zeros())
}

/// Depth, total and qubit lower bound for given `(d, K)`.
pub fn fibonacci_costs(n: u32, d: u32, r: u32, s: u32, k: u32) -> Result<(u64, u64, f64), EstimateError> {
    let log_s = check_fib(r, s)?;
    if s > 2 {
        return Err(EstimateError::UnsupportedS(s as usize));
    }
    let (r, s, k, log_s) = (r as u64, s as u64, k as u64, log_s as u64);
    let depth = 2 * (2 * r / s + 2 * log_s + 4) * k;
    let total = 2 * (4 * r / s + 4 * log_s + 8) * k;
    let bits = 64 - r.leading_zeros() as u64; // ceil(log2(r + 1))
    let qubits = d as u64 * k * bits + (2 * log_s + 8) * n as u64;
    Ok((depth, total, qubits as f64 / n as f64))
}

pub fn fibonacci_estimate(n: u32, beta: u32, r: u32, s: u32) -> Result<FibReport, EstimateError> {
    check_fib(r, s)?;
    if s > 2 {
        return Err(EstimateError::UnsupportedS(s as usize));
    }
    let delta0 = RootHermite::for_beta(beta)?;
    let cap = d_max_with_exponent(n, r);
    if cap == 0 {
        return Err(EstimateError::InvalidInput(format!("no d fits n = {n}")));
    }
    let lp = select_params_with(n, &delta0, cap, true);
    let k = fib_k(r, lp.log_d);
    let (depth, total, ratio) = fibonacci_costs(n, lp.d, r, s, k)?;
    Ok(FibReport {
        n,
        beta,
        r,
        s,
        d: lp.d,
        m: lp.m,
        log_d: lp.log_d,
        k,
        depth,
        total_mults: total,
        qubit_ratio_lower: ratio,
    })
}

/// Costs of the sequential arithmetic scheme for a given `log D`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SequentialCosts {
    pub log_d: u32,
    pub mult_depth: u64,
}

impl SequentialCosts {
    /// Space with `s_mult` qubits for one multiplier; the `o(n)` term is dropped.
    pub fn space_qubits(&self, n: u32, s_mult: f64) -> f64 {
        1.3 * (2.0 * n as f64 + s_mult) * (self.log_d as f64).log2()
    }

    pub fn space_expression(&self) -> String {
        format!("1.3*(2n + S_x(n) + o(n))*log({})", self.log_d)
    }
}

pub fn sequential_costs(log_d: u32) -> SequentialCosts {
    assert!(log_d >= 1, "log D must be positive");
    SequentialCosts { log_d, mult_depth: 4 * log_d as u64 }
}

/// Shor multiplication counts: `(n, windowed, multi_run, count)`.
pub const SHOR_TABLE: [(u32, bool, bool, u32); 8] = [
    (2048, false, false, 6018),
    (2048, false, true, 2290),
    (2048, true, false, 602),
    (2048, true, true, 230),
    (4096, false, false, 12162),
    (4096, false, true, 4438),
    (4096, true, false, 1218),
    (4096, true, true, 444),
];

pub fn shor_reference(n: u32, windowed: bool, multi_run: bool) -> Result<u32, EstimateError> {
    SHOR_TABLE
        .iter()
        .find(|r| (r.0, r.1, r.2) == (n, windowed, multi_run))
        .map(|r| r.3)
        .ok_or(EstimateError::UnknownConfiguration)
}

/// Depth floor for the estimator's game.
pub fn depth_floor(log_d: u32, w: u32) -> usize {
    depth_lower_bound(game_length(log_d, w), Variant::MeasuredTarget)
}
