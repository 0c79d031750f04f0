//! Backward nearest-neighbour baseline.
//!
//! The last node is the one cheapest to leave for the data center; every
//! earlier position takes the unmarked node cheapest to leave for the node
//! after it. Only `eta` is read, so both objectives get the same tour.

use std::time::Instant;

use crate::aoi::{objective_unchecked, ObjectiveKind, Trajectory};
use crate::net::TransitCostMatrix;
use crate::solution::{Algorithm, SolveResult};

/// Builds the tour from the data center backwards. Ties go to the smaller id.
pub fn greedy_trajectory(eta: &TransitCostMatrix) -> Trajectory {
    let m = eta.m();
    let mut marked = vec![false; m + 1];
    let mut reversed = Vec::with_capacity(m);
    let mut target = 0;
    for _ in 0..m {
        let mut best: Option<(usize, f64)> = None;
        for j in (1..=m).filter(|&j| !marked[j]) {
            let cost = eta.get(j, target);
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((j, cost));
            }
        }
        let (j, _) = best.expect("an unmarked node remains");
        marked[j] = true;
        reversed.push(j);
        target = j;
    }
    reversed.reverse();
    Trajectory::from_order_unchecked(reversed)
}

/// Greedy tour scored under `kind`; the tour itself ignores `kind`.
pub fn greedy_solve(eta: &TransitCostMatrix, kind: ObjectiveKind) -> SolveResult {
    let started = Instant::now();
    let trajectory = greedy_trajectory(eta);
    let objective_value = objective_unchecked(trajectory.order(), eta, kind);
    SolveResult {
        trajectory,
        objective_value,
        objective_kind: kind,
        algorithm: Algorithm::Greedy,
        wall_time: started.elapsed(),
    }
}
