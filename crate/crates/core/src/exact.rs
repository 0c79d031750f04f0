//! Exact solvers: subset dynamic programming over `(node, remaining set)`
//! states, and an exhaustive permutation search used as its oracle.
//!
//! Both objectives share one recursion. With `S` the set still to visit
//! after node `i`,
//!
//! ```text
//! cost(i, {})  = eta[i][0]
//! cost(i, S)   = min_{k in S} w(|S|) * eta[i][k] + cost(k, S - {k})
//! ```
//!
//! where `w = 1` for the max-age objective and `w = (M - |S|) / M` for the
//! average-age objective. The answer is `min_i cost(i, V - {i})`.

use std::time::Instant;

use itertools::Itertools;

use crate::aoi::{objective_unchecked, ObjectiveKind, Trajectory};
use crate::error::{AoiError, Result};
use crate::net::TransitCostMatrix;
use crate::solution::{Algorithm, SolveResult};

/// Largest instance the DP accepts; the table holds `M * 2^(M-1)` states.
pub const DP_MAX_NODES: usize = 24;
/// Largest instance the exhaustive search accepts.
pub const BRUTE_MAX_NODES: usize = 10;

const GA_ADVICE: &str = "use the genetic algorithm (ga) for larger instances";

/// Removes bit `bit` from `mask`, shifting higher bits down by one.
#[inline]
fn squeeze(mask: u32, bit: usize) -> usize {
    let low = mask & ((1u32 << bit) - 1);
    let high = (mask >> (bit + 1)) << bit;
    (low | high) as usize
}

/// Next larger integer with the same popcount (Gosper's hack).
#[inline]
fn next_same_popcount(mask: u32) -> u32 {
    let c = mask & mask.wrapping_neg();
    let r = mask + c;
    (((r ^ mask) >> 2) / c) | r
}

/// Every mask over `bits` bits with exactly `size` bits set, ascending.
fn masks_of_size(bits: usize, size: usize) -> impl Iterator<Item = u32> {
    let limit = 1u64 << bits;
    let first = if size == 0 { 0 } else { (1u32 << size) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let current = next?;
        next = if current == 0 {
            None
        } else {
            let candidate = next_same_popcount(current) as u64;
            (candidate < limit).then_some(candidate as u32)
        };
        Some(current)
    })
}

/// Bits of `mask` from lowest to highest.
#[inline]
fn bits(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            b
        })
    })
}

/// Filled DP table for one objective.
///
/// Node `i` (1-based id) is bit `i - 1` of a remaining-set mask. States with
/// `i` in its own remaining set do not exist; each node's row is indexed by
/// the mask with bit `i - 1` squeezed out.
#[derive(Clone, Debug)]
pub struct DpTable {
    m: usize,
    kind: ObjectiveKind,
    cost: Vec<f64>,
    successor: Vec<u8>,
}

impl DpTable {
    pub fn build(eta: &TransitCostMatrix, kind: ObjectiveKind) -> Result<Self> {
        let m = eta.m();
        if m > DP_MAX_NODES {
            return Err(AoiError::Capacity {
                solver: "dp",
                cap: DP_MAX_NODES,
                m,
                advice: GA_ADVICE,
            });
        }
        let row = 1usize << (m - 1);
        let states = m * row;
        let mut cost = Vec::new();
        let mut successor = Vec::new();
        cost.try_reserve_exact(states)
            .and_then(|_| successor.try_reserve_exact(states))
            .map_err(|_| AoiError::Capacity {
                solver: "dp",
                cap: m - 1,
                m,
                advice: "the DP table does not fit in memory; use the genetic algorithm (ga)",
            })?;
        cost.resize(states, f64::NAN);
        successor.resize(states, 0u8);

        for size in 0..m {
            let weight = match kind {
                ObjectiveKind::MaxAoi => 1.0,
                ObjectiveKind::AveAoi => (m - size) as f64 / m as f64,
            };
            for mask in masks_of_size(m, size) {
                for i in (0..m).filter(|&i| mask & (1 << i) == 0) {
                    let slot = i * row + squeeze(mask, i);
                    if size == 0 {
                        cost[slot] = eta.get(i + 1, 0);
                        continue;
                    }
                    let mut best = f64::INFINITY;
                    let mut best_next = 0;
                    for k in bits(mask) {
                        let rest = cost[k * row + squeeze(mask ^ (1 << k), k)];
                        let candidate = weight * eta.get(i + 1, k + 1) + rest;
                        if candidate < best {
                            best = candidate;
                            best_next = k + 1;
                        }
                    }
                    cost[slot] = best;
                    successor[slot] = best_next as u8;
                }
            }
        }

        Ok(DpTable {
            m,
            kind,
            cost,
            successor,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    /// Number of `(node, remaining set)` states, `M * 2^(M-1)`.
    pub fn state_count(&self) -> usize {
        self.cost.len()
    }

    fn slot(&self, node: usize, remaining: u32) -> usize {
        assert!((1..=self.m).contains(&node), "node {node} outside 1..={}", self.m);
        assert!(remaining >> self.m == 0, "remaining set names nodes beyond {}", self.m);
        assert!(remaining & (1 << (node - 1)) == 0, "node {node} cannot remain after itself");
        (node - 1) * (1 << (self.m - 1)) + squeeze(remaining, node - 1)
    }

    /// Optimal cost from `node` through every node in `remaining` (bit
    /// `j - 1` set for node `j`) and back to the data center.
    pub fn cost(&self, node: usize, remaining: u32) -> f64 {
        self.cost[self.slot(node, remaining)]
    }

    /// Best node to visit right after `node`; `None` when nothing remains.
    pub fn successor(&self, node: usize, remaining: u32) -> Option<usize> {
        (remaining != 0).then(|| self.successor[self.slot(node, remaining)] as usize)
    }

    fn all_nodes(&self) -> u32 {
        ((1u64 << self.m) - 1) as u32
    }

    /// First node of an optimal trajectory and the optimal value, preferring
    /// the smaller id on ties.
    pub fn best_start(&self) -> (usize, f64) {
        let all = self.all_nodes();
        let mut best = (0, f64::INFINITY);
        for node in 1..=self.m {
            let value = self.cost(node, all ^ (1 << (node - 1)));
            if value < best.1 {
                best = (node, value);
            }
        }
        best
    }

    /// Follows stored successors from the best start.
    pub fn trajectory(&self) -> Trajectory {
        let (mut node, _) = self.best_start();
        let mut remaining = self.all_nodes() ^ (1 << (node - 1));
        let mut order = Vec::with_capacity(self.m);
        order.push(node);
        while let Some(next) = self.successor(node, remaining) {
            remaining ^= 1 << (next - 1);
            order.push(next);
            node = next;
        }
        Trajectory::from_order_unchecked(order)
    }

    /// Re-expands every state and checks it equals the minimum over its
    /// successors, with the stored successor attaining it.
    pub fn is_bellman_consistent(&self, eta: &TransitCostMatrix) -> bool {
        let m = self.m;
        (1..=m).all(|node| {
            let others = self.all_nodes() ^ (1 << (node - 1));
            (0..=others).filter(|s| s & !others == 0).all(|remaining| {
                let stored = self.cost(node, remaining);
                if remaining == 0 {
                    return stored == eta.get(node, 0);
                }
                let size = remaining.count_ones() as usize;
                let weight = match self.kind {
                    ObjectiveKind::MaxAoi => 1.0,
                    ObjectiveKind::AveAoi => (m - size) as f64 / m as f64,
                };
                let expand = |k: usize| weight * eta.get(node, k + 1) + self.cost(k + 1, remaining ^ (1 << k));
                let minimum = bits(remaining).map(expand).fold(f64::INFINITY, f64::min);
                let chosen = self.successor(node, remaining).expect("non-empty set has a successor");
                stored == minimum && expand(chosen - 1) == minimum
            })
        })
    }
}

fn dp_solve(eta: &TransitCostMatrix, kind: ObjectiveKind) -> Result<SolveResult> {
    let started = Instant::now();
    let table = DpTable::build(eta, kind)?;
    let (_, objective_value) = table.best_start();
    Ok(SolveResult {
        trajectory: table.trajectory(),
        objective_value,
        objective_kind: kind,
        algorithm: Algorithm::Dp,
        wall_time: started.elapsed(),
    })
}

/// Trajectory minimising the age of the oldest sample.
pub fn dp_max_aoi(eta: &TransitCostMatrix) -> Result<SolveResult> {
    dp_solve(eta, ObjectiveKind::MaxAoi)
}

/// Trajectory minimising the mean age.
pub fn dp_ave_aoi(eta: &TransitCostMatrix) -> Result<SolveResult> {
    dp_solve(eta, ObjectiveKind::AveAoi)
}

/// DP for either objective.
pub fn dp(eta: &TransitCostMatrix, kind: ObjectiveKind) -> Result<SolveResult> {
    dp_solve(eta, kind)
}

/// Scores all `M!` visit orders in lexicographic order and keeps the first
/// strict minimum.
pub fn brute_force(eta: &TransitCostMatrix, kind: ObjectiveKind) -> Result<SolveResult> {
    let m = eta.m();
    if m > BRUTE_MAX_NODES {
        return Err(AoiError::Capacity {
            solver: "brute",
            cap: BRUTE_MAX_NODES,
            m,
            advice: "use dp (exact) or ga",
        });
    }
    let started = Instant::now();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for order in (1..=m).permutations(m) {
        let value = objective_unchecked(&order, eta, kind);
        if best.as_ref().is_none_or(|(_, v)| value < *v) {
            best = Some((order, value));
        }
    }
    let (order, objective_value) = best.expect("at least one permutation");
    Ok(SolveResult {
        trajectory: Trajectory::from_order_unchecked(order),
        objective_value,
        objective_kind: kind,
        algorithm: Algorithm::Brute,
        wall_time: started.elapsed(),
    })
}
