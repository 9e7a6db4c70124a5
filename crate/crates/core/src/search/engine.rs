//! Single-threaded lexicographic A* over `(depth, cost)` with a flat node
//! arena, a hash index into it and a packed binary heap.
//!
//! Heap order is `(f_depth, f_cost, deeper first, insertion order)`, a total
//! order fixed by the deterministic expansion order, so results do not depend
//! on hashing or on the worker hint.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use hashbrown::{DefaultHashBuilder, HashTable};

use super::{PebbleConfig, SearchError, StepBits};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Edge {
    pub key: PebbleConfig,
    pub cost: u32,
    pub step: StepBits,
}

pub(crate) trait Domain {
    fn start(&self) -> PebbleConfig;
    /// Lower bounds on remaining `(depth, cost)`.
    fn h(&self, key: &PebbleConfig) -> (u32, u32);
    fn is_goal(&self, key: &PebbleConfig) -> bool;
    /// Successors in search order; must be deterministic.
    fn expand(&self, key: &PebbleConfig, out: &mut Vec<Edge>);
}

#[derive(Clone, Copy)]
struct Node {
    key: PebbleConfig,
    parent: u32,
    g_d: u16,
    g_c: u16,
    closed: bool,
}

pub(crate) struct Solution {
    /// Keys from the start to the goal.
    pub keys: Vec<PebbleConfig>,
    /// `steps[i]` leads from `keys[i]` to `keys[i + 1]` in search direction.
    pub steps: Vec<StepBits>,
    pub depth: u32,
    pub cost: u32,
    pub expanded: u64,
    pub stored: u64,
    pub max_f: u32,
}

pub(crate) enum Found {
    Yes(Solution),
    Exhausted { expanded: u64, stored: u64 },
}

/// Engine result after the domain has turned a solution into a schedule.
pub(crate) enum Outcome {
    Found(super::OptResult),
    Exhausted { expanded: u64, stored: u64 },
}

const NO_PARENT: u32 = u32::MAX;

/// With `use_cost` the order is `(f_d, f_c, deeper)`; without it `f_c` is
/// zero and sits below the depth slot.
fn pack(use_cost: bool, f_d: u32, f_c: u32, g_d: u32, seq: u64, idx: u32) -> u128 {
    debug_assert!(f_d < 1 << 16 && f_c < 1 << 16 && g_d < 1 << 16 && seq < 1 << 48);
    let (c_at, g_at) = if use_cost { (96, 80) } else { (80, 96) };
    (f_d as u128) << 112
        | (f_c as u128) << c_at
        | ((0xFFFF - g_d) as u128) << g_at
        | (seq as u128) << 32
        | idx as u128
}

fn unpack(use_cost: bool, p: u128) -> (u32, u32, u32, u32) {
    let (c_at, g_at) = if use_cost { (96, 80) } else { (80, 96) };
    let f_d = (p >> 112) as u32 & 0xFFFF;
    let f_c = (p >> c_at) as u32 & 0xFFFF;
    let g_d = 0xFFFF - ((p >> g_at) as u32 & 0xFFFF);
    (f_d, f_c, g_d, p as u32)
}

/// Runs A*; children whose depth estimate exceeds `depth_bound` are dropped.
/// With `use_cost` false the cost component is ignored throughout.
pub(crate) fn run<D: Domain>(
    dom: &D,
    use_cost: bool,
    depth_bound: Option<u32>,
    node_cap: usize,
) -> Result<Found, SearchError> {
    let hasher = DefaultHashBuilder::default();
    let hash = |k: &PebbleConfig| std::hash::BuildHasher::hash_one(&hasher, k);
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashTable<u32> = HashTable::new();
    let mut heap: BinaryHeap<Reverse<u128>> = BinaryHeap::new();
    let mut seq: u64 = 0;
    let mut expanded: u64 = 0;
    let mut max_f = 0u32;
    let mut edges = Vec::new();

    let start = dom.start();
    let h0 = dom.h(&start);
    if depth_bound.is_some_and(|b| h0.0 > b) {
        return Ok(Found::Exhausted { expanded: 0, stored: 0 });
    }
    nodes.push(Node { key: start, parent: NO_PARENT, g_d: 0, g_c: 0, closed: false });
    index.insert_unique(hash(&start), 0, |&i| hash(&nodes[i as usize].key));
    let f0 = if use_cost { h0.1 } else { 0 };
    heap.push(Reverse(pack(use_cost, h0.0, f0, 0, seq, 0)));

    while let Some(Reverse(top)) = heap.pop() {
        let (f_d, f_c, g_d, idx) = unpack(use_cost, top);
        let node = nodes[idx as usize];
        if node.closed || node.g_d as u32 != g_d {
            continue;
        }
        let h = dom.h(&node.key);
        if use_cost && node.g_c as u32 + h.1 != f_c {
            continue;
        }
        nodes[idx as usize].closed = true;
        expanded += 1;
        max_f = max_f.max(f_d);
        if dom.is_goal(&node.key) {
            let sol = trace(dom, &nodes, idx, use_cost, expanded, max_f);
            return Ok(Found::Yes(sol));
        }
        edges.clear();
        dom.expand(&node.key, &mut edges);
        for e in &edges {
            let cd = g_d + 1;
            let cc = node.g_c as u32 + e.cost;
            let ch = dom.h(&e.key);
            if depth_bound.is_some_and(|b| cd + ch.0 > b) {
                continue;
            }
            let hv = hash(&e.key);
            let found = index.find(hv, |&i| nodes[i as usize].key == e.key).copied();
            let child = match found {
                Some(ci) => {
                    let c = &mut nodes[ci as usize];
                    let old = (c.g_d as u32, if use_cost { c.g_c as u32 } else { 0 });
                    if c.closed || (cd, if use_cost { cc } else { 0 }) >= old {
                        continue;
                    }
                    c.g_d = cd as u16;
                    c.g_c = cc as u16;
                    c.parent = idx;
                    ci
                }
                None => {
                    if nodes.len() >= node_cap {
                        return Err(SearchError::MemoryLimit(node_cap));
                    }
                    let ci = nodes.len() as u32;
                    nodes.push(Node {
                        key: e.key,
                        parent: idx,
                        g_d: cd as u16,
                        g_c: cc as u16,
                        closed: false,
                    });
                    index.insert_unique(hv, ci, |&i| hash(&nodes[i as usize].key));
                    ci
                }
            };
            seq += 1;
            let second = if use_cost { cc + ch.1 } else { 0 };
            heap.push(Reverse(pack(use_cost, cd + ch.0, second, cd, seq, child)));
        }
    }
    Ok(Found::Exhausted { expanded, stored: nodes.len() as u64 })
}

fn trace<D: Domain>(
    dom: &D,
    nodes: &[Node],
    goal: u32,
    use_cost: bool,
    expanded: u64,
    max_f: u32,
) -> Solution {
    let mut chain = vec![goal];
    while nodes[*chain.last().unwrap() as usize].parent != NO_PARENT {
        chain.push(nodes[*chain.last().unwrap() as usize].parent);
    }
    chain.reverse();
    let mut steps = Vec::with_capacity(chain.len() - 1);
    let mut edges = Vec::new();
    for w in chain.windows(2) {
        let (p, c) = (&nodes[w[0] as usize], &nodes[w[1] as usize]);
        edges.clear();
        dom.expand(&p.key, &mut edges);
        let delta = c.g_c as u32 - p.g_c as u32;
        let e = edges
            .iter()
            .find(|e| e.key == c.key && (!use_cost || e.cost == delta))
            .expect("parent edge reappears on re-expansion");
        steps.push(e.step);
    }
    let g = &nodes[goal as usize];
    let cost = steps.iter().map(StepBits::cost).sum();
    Solution {
        keys: chain.iter().map(|&i| nodes[i as usize].key).collect(),
        steps,
        depth: g.g_d as u32,
        cost,
        expanded,
        stored: nodes.len() as u64,
        max_f,
    }
}
