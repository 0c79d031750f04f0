//! Age-of-information evaluation of a visit order.
//!
//! Positions are 1-based throughout, matching the visit order: position `k`
//! holds `v_(k)`, and the leg leaving position `k` costs `eta[v_(k)][v_(k+1)]`
//! with `v_(M+1)` being the data center.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AoiError, Result};
use crate::net::TransitCostMatrix;

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        iter.into_iter().for_each(|x| acc.add(x));
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjectiveKind {
    /// Age of the oldest sample, `X_1`.
    #[serde(rename = "max-aoi")]
    MaxAoi,
    /// Mean age over all nodes, `X̄_1`.
    #[serde(rename = "ave-aoi")]
    AveAoi,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 2] = [ObjectiveKind::MaxAoi, ObjectiveKind::AveAoi];

    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectiveKind::MaxAoi => "max-aoi",
            ObjectiveKind::AveAoi => "ave-aoi",
        }
    }

    /// Weight of the leg leaving position `k` out of `m`.
    #[inline]
    pub fn stage_weight(&self, k: usize, m: usize) -> f64 {
        match self {
            ObjectiveKind::MaxAoi => 1.0,
            ObjectiveKind::AveAoi => k as f64 / m as f64,
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveKind {
    type Err = AoiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-aoi" | "max" => Ok(ObjectiveKind::MaxAoi),
            "ave-aoi" | "ave" | "avg" => Ok(ObjectiveKind::AveAoi),
            other => Err(AoiError::domain(
                "objective",
                format!("unknown objective {other:?}; expected max-aoi or ave-aoi"),
            )),
        }
    }
}

/// A visit order over sensor nodes `1..=M`. The data center is implicit at
/// both ends and never appears in the sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Trajectory(Vec<usize>);

impl Trajectory {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        if order.is_empty() {
            return Err(AoiError::domain("trajectory", "must visit at least one node"));
        }
        if !is_permutation(&order) {
            return Err(AoiError::domain(
                "trajectory",
                format!("{order:?} is not a permutation of 1..={}", order.len()),
            ));
        }
        Ok(Trajectory(order))
    }

    pub(crate) fn from_order_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(is_permutation(&order), "{order:?} is not a permutation");
        Trajectory(order)
    }

    /// `[1, 2, ..., m]`.
    pub fn identity(m: usize) -> Self {
        Trajectory((1..=m).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn into_order(self) -> Vec<usize> {
        self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    /// Node id visited at 1-based `position`.
    pub fn node_at(&self, position: usize) -> usize {
        self.0[position - 1]
    }

    /// Exchanges the nodes at two 1-based positions.
    pub fn swap_positions(&mut self, a: usize, b: usize) {
        self.0.swap(a - 1, b - 1);
    }

    fn check_against(&self, eta: &TransitCostMatrix) -> Result<()> {
        if self.m() != eta.m() {
            return Err(AoiError::domain(
                "trajectory",
                format!("visits {} nodes but the cost matrix has {}", self.m(), eta.m()),
            ));
        }
        Ok(())
    }

    fn check_position(&self, position: usize) -> Result<()> {
        if position == 0 || position > self.m() {
            return Err(AoiError::domain(
                "position",
                format!("{position} outside 1..={}", self.m()),
            ));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Trajectory {
    type Error = AoiError;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Trajectory::new(order)
    }
}

impl From<Trajectory> for Vec<usize> {
    fn from(t: Trajectory) -> Self {
        t.0
    }
}

impl fmt::Display for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "[{}]", ids.join(", "))
    }
}

/// True when `order` holds every id in `1..=order.len()` exactly once.
pub fn is_permutation(order: &[usize]) -> bool {
    let mut seen = vec![false; order.len() + 1];
    order.iter().all(|&id| {
        if id == 0 || id > order.len() || seen[id] {
            false
        } else {
            seen[id] = true;
            true
        }
    })
}

/// Cost of the leg leaving 1-based position `k`; the leg after the last
/// position returns to the data center.
#[inline]
fn leg(order: &[usize], eta: &TransitCostMatrix, k: usize) -> f64 {
    let next = order.get(k).copied().unwrap_or(0);
    eta.get(order[k - 1], next)
}

/// Walks positions `M, M-1, ..., 1`, calling `visit(k, value)` with the
/// stage-weighted suffix sum starting at position `k`.
#[inline]
fn for_each_suffix(
    order: &[usize],
    eta: &TransitCostMatrix,
    kind: ObjectiveKind,
    mut visit: impl FnMut(usize, f64),
) {
    let m = order.len();
    let mut acc = CompensatedSum::default();
    for k in (1..=m).rev() {
        acc.add(kind.stage_weight(k, m) * leg(order, eta, k));
        visit(k, acc.value());
    }
}

fn suffix_sums(order: &[usize], eta: &TransitCostMatrix, kind: ObjectiveKind) -> Vec<f64> {
    let mut out = vec![0.0; order.len()];
    for_each_suffix(order, eta, kind, |k, v| out[k - 1] = v);
    out
}

/// Objective value of a raw visit order, without validation.
///
/// Bit-identical to the first entry of the matching [`AoiReport`] column.
pub(crate) fn objective_unchecked(order: &[usize], eta: &TransitCostMatrix, kind: ObjectiveKind) -> f64 {
    let mut first = 0.0;
    for_each_suffix(order, eta, kind, |_, v| first = v);
    first
}

/// `eta` of each leg, positions `1..=M`.
pub fn leg_costs(traj: &Trajectory, eta: &TransitCostMatrix) -> Result<Vec<f64>> {
    traj.check_against(eta)?;
    Ok((1..=traj.m()).map(|k| leg(traj.order(), eta, k)).collect())
}

/// Age at mission end of the sample taken at `position`.
pub fn node_age(traj: &Trajectory, eta: &TransitCostMatrix, position: usize) -> Result<f64> {
    traj.check_against(eta)?;
    traj.check_position(position)?;
    Ok(suffix_sums(traj.order(), eta, ObjectiveKind::MaxAoi)[position - 1])
}

/// Sampling instant `T_i` of 1-based `position` given the takeoff leg.
pub fn sample_time(traj: &Trajectory, eta: &TransitCostMatrix, takeoff_leg: f64, position: usize) -> Result<f64> {
    traj.check_against(eta)?;
    traj.check_position(position)?;
    let mut acc = CompensatedSum::default();
    acc.add(takeoff_leg);
    (1..position).for_each(|k| acc.add(leg(traj.order(), eta, k)));
    Ok(acc.value())
}

/// `(t - T_i)^+`: zero until the node is sampled, then grows linearly.
pub fn age_at_time(
    traj: &Trajectory,
    eta: &TransitCostMatrix,
    takeoff_leg: f64,
    position: usize,
    t: f64,
) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(AoiError::domain("t", format!("must be non-negative, got {t}")));
    }
    let sampled_at = sample_time(traj, eta, takeoff_leg, position)?;
    Ok((t - sampled_at).max(0.0))
}

/// Mean final age, computed as the mean of the per-node suffix sums.
pub fn average_age(traj: &Trajectory, eta: &TransitCostMatrix) -> Result<f64> {
    traj.check_against(eta)?;
    let ages = suffix_sums(traj.order(), eta, ObjectiveKind::MaxAoi);
    let total: CompensatedSum = ages.into_iter().collect();
    Ok(total.value() / traj.m() as f64)
}

/// Mean final age, computed as the stage-weighted leg sum `sum_k (k/M) eta_k`.
pub fn average_age_reweighted(traj: &Trajectory, eta: &TransitCostMatrix) -> Result<f64> {
    traj.check_against(eta)?;
    let m = traj.m();
    let total: CompensatedSum = (1..=m)
        .map(|k| ObjectiveKind::AveAoi.stage_weight(k, m) * leg(traj.order(), eta, k))
        .collect();
    Ok(total.value())
}

/// `sum_{k >= position} (k/M) eta_k`.
pub fn weighted_partial_age(traj: &Trajectory, eta: &TransitCostMatrix, position: usize) -> Result<f64> {
    traj.check_against(eta)?;
    traj.check_position(position)?;
    Ok(suffix_sums(traj.order(), eta, ObjectiveKind::AveAoi)[position - 1])
}

/// Objective value of `traj` under `kind`.
pub fn objective_value(traj: &Trajectory, eta: &TransitCostMatrix, kind: ObjectiveKind) -> Result<f64> {
    traj.check_against(eta)?;
    Ok(objective_unchecked(traj.order(), eta, kind))
}

/// Full evaluation of one trajectory. Vectors are indexed by position - 1,
/// except `timestamps`, where index `i` holds `T_i` and `T_0 = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AoiReport {
    pub ages: Vec<f64>,
    pub weighted_partials: Vec<f64>,
    pub max_age: f64,
    pub avg_age: f64,
    pub timestamps: Vec<f64>,
    pub mission_end: f64,
}

impl AoiReport {
    pub fn objective(&self, kind: ObjectiveKind) -> f64 {
        match kind {
            ObjectiveKind::MaxAoi => self.max_age,
            ObjectiveKind::AveAoi => self.avg_age,
        }
    }
}

/// Evaluates `traj`. The takeoff leg shifts the timestamps and mission end
/// but no age.
pub fn evaluate(traj: &Trajectory, eta: &TransitCostMatrix, takeoff_leg: f64) -> Result<AoiReport> {
    traj.check_against(eta)?;
    if !(takeoff_leg >= 0.0 && takeoff_leg.is_finite()) {
        return Err(AoiError::domain(
            "takeoff_leg",
            format!("must be finite and non-negative, got {takeoff_leg}"),
        ));
    }
    let order = traj.order();
    let ages = suffix_sums(order, eta, ObjectiveKind::MaxAoi);
    let weighted_partials = suffix_sums(order, eta, ObjectiveKind::AveAoi);

    let mut timestamps = Vec::with_capacity(order.len() + 1);
    timestamps.push(0.0);
    let mut clock = CompensatedSum::default();
    clock.add(takeoff_leg);
    timestamps.push(clock.value());
    for k in 1..order.len() {
        clock.add(leg(order, eta, k));
        timestamps.push(clock.value());
    }

    Ok(AoiReport {
        max_age: ages[0],
        avg_age: weighted_partials[0],
        mission_end: timestamps[1] + ages[0],
        ages,
        weighted_partials,
        timestamps,
    })
}

/// [`evaluate`] with the takeoff leg read from row 0 of `eta`.
pub fn evaluate_mission(traj: &Trajectory, eta: &TransitCostMatrix) -> Result<AoiReport> {
    traj.check_against(eta)?;
    evaluate(traj, eta, eta.get(0, traj.node_at(1)))
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// eta_12 = 4, eta_21 = 6, eta_10 = 3, eta_20 = 5.
    fn two_node() -> TransitCostMatrix {
        TransitCostMatrix::from_rows(&[vec![0.0, 1.0, 2.0], vec![3.0, 0.0, 4.0], vec![5.0, 6.0, 0.0]]).unwrap()
    }

    fn t(order: &[usize]) -> Trajectory {
        Trajectory::new(order.to_vec()).unwrap()
    }

    fn random_instance(rng: &mut ChaCha8Rng, m: usize) -> (Trajectory, TransitCostMatrix) {
        let rows: Vec<Vec<f64>> = (0..=m)
            .map(|_| (0..=m).map(|_| rng.gen_range(0.01..100.0)).collect())
            .collect();
        let mut order: Vec<usize> = (1..=m).collect();
        order.shuffle(rng);
        (t(&order), TransitCostMatrix::from_rows(&rows).unwrap())
    }

    #[test]
    fn trajectory_validation() {
        assert!(Trajectory::new(vec![]).is_err());
        assert!(Trajectory::new(vec![1, 1]).is_err());
        assert!(Trajectory::new(vec![0, 1]).is_err());
        assert!(Trajectory::new(vec![1, 3]).is_err());
        assert!(Trajectory::new(vec![2, 3, 1]).is_ok());
        let json = serde_json::to_string(&t(&[2, 1])).unwrap();
        assert_eq!(json, "[2,1]");
        assert!(serde_json::from_str::<Trajectory>("[2,2]").is_err());
    }

    #[test]
    fn node_age_suffix_sums() {
        let eta = two_node();
        assert_eq!(node_age(&t(&[1, 2]), &eta, 1).unwrap(), 9.0);
        assert_eq!(node_age(&t(&[1, 2]), &eta, 2).unwrap(), 5.0);
        assert!(node_age(&t(&[1, 2]), &eta, 0).is_err());
        assert!(node_age(&t(&[1, 2]), &eta, 3).is_err());
        assert!(node_age(&t(&[1]), &eta, 1).is_err());

        let single = TransitCostMatrix::from_rows(&[vec![0.0, 2.5], vec![7.25, 0.0]]).unwrap();
        assert_eq!(node_age(&t(&[1]), &single, 1).unwrap(), 7.25);
    }

    #[test]
    fn age_process() {
        let eta = two_node();
        let traj = t(&[1, 2]);
        let takeoff = eta.get(0, 1);
        // T_1 = 1, T_2 = 5, T_3 = 10
        assert_eq!(age_at_time(&traj, &eta, takeoff, 2, 3.0).unwrap(), 0.0);
        assert_eq!(age_at_time(&traj, &eta, takeoff, 2, 5.0).unwrap(), 0.0);
        assert_eq!(age_at_time(&traj, &eta, takeoff, 2, 12.0).unwrap(), 7.0);
        assert!(age_at_time(&traj, &eta, takeoff, 2, -1.0).is_err());

        let report = evaluate(&traj, &eta, takeoff).unwrap();
        for position in 1..=2 {
            assert_relative_eq!(
                age_at_time(&traj, &eta, takeoff, position, report.mission_end).unwrap(),
                node_age(&traj, &eta, position).unwrap(),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn average_age_both_routes() {
        let eta = two_node();
        assert_eq!(average_age(&t(&[1, 2]), &eta).unwrap(), 7.0);
        assert_eq!(average_age_reweighted(&t(&[1, 2]), &eta).unwrap(), 7.0);
        assert_eq!(average_age(&t(&[2, 1]), &eta).unwrap(), 6.0);
        assert_eq!(average_age_reweighted(&t(&[2, 1]), &eta).unwrap(), 6.0);

        let single = TransitCostMatrix::from_rows(&[vec![0.0, 2.5], vec![7.25, 0.0]]).unwrap();
        assert_eq!(average_age(&t(&[1]), &single).unwrap(), 7.25);
    }

    #[test]
    fn weighted_partials() {
        let eta = two_node();
        assert_eq!(weighted_partial_age(&t(&[2, 1]), &eta, 1).unwrap(), 6.0);
        assert_eq!(weighted_partial_age(&t(&[2, 1]), &eta, 2).unwrap(), 3.0);
        assert_eq!(weighted_partial_age(&t(&[1, 2]), &eta, 2).unwrap(), eta.get(2, 0));
    }

    #[test]
    fn evaluate_two_node_instance() {
        let eta = two_node();
        let report = evaluate(&t(&[2, 1]), &eta, 0.0).unwrap();
        assert_eq!(report.ages, vec![9.0, 3.0]);
        assert_eq!(report.max_age, 9.0);
        assert_eq!(report.avg_age, 6.0);
        assert_eq!(report.weighted_partials, vec![6.0, 3.0]);
        assert_eq!(report.timestamps, vec![0.0, 0.0, 6.0]);
        assert_eq!(report.mission_end, 9.0);

        let other = evaluate_mission(&t(&[1, 2]), &eta).unwrap();
        assert_eq!(other.max_age, report.max_age);
        assert_eq!(other.avg_age, 7.0);
        assert_eq!(other.timestamps, vec![0.0, 1.0, 5.0]);
        assert_eq!(other.mission_end, 10.0);
    }

    #[test]
    fn uniform_costs_give_arithmetic_ages() {
        let m = 6;
        let c = 2.5;
        let eta = TransitCostMatrix::from_rows(&vec![vec![c; m + 1]; m + 1]).unwrap();
        let report = evaluate(&t(&[3, 6, 1, 2, 5, 4]), &eta, c).unwrap();
        let expected: Vec<f64> = (1..=m).rev().map(|k| k as f64 * c).collect();
        assert_eq!(report.ages, expected);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let total: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(total.value(), 2.0);
    }

    #[test]
    fn objective_matches_report() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 1..12 {
            let (traj, eta) = random_instance(&mut rng, m);
            let report = evaluate(&traj, &eta, 0.0).unwrap();
            assert_eq!(objective_value(&traj, &eta, ObjectiveKind::MaxAoi).unwrap(), report.max_age);
            assert_eq!(objective_value(&traj, &eta, ObjectiveKind::AveAoi).unwrap(), report.avg_age);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn report_invariants(seed in any::<u64>(), m in 1usize..40, takeoff in 0.001f64..50.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (traj, eta) = random_instance(&mut rng, m);
            let r = evaluate(&traj, &eta, takeoff).unwrap();

            for w in r.ages.windows(2) { prop_assert!(w[0] > w[1]); }
            for w in r.weighted_partials.windows(2) { prop_assert!(w[0] > w[1]); }
            for w in r.timestamps.windows(2) { prop_assert!(w[0] < w[1]); }
            prop_assert_eq!(r.max_age, r.ages[0]);
            prop_assert_eq!(r.avg_age, r.weighted_partials[0]);
            let mean = r.ages.iter().sum::<f64>() / m as f64;
            prop_assert!((r.avg_age - mean).abs() <= 1e-12 * mean);
            prop_assert_eq!(r.mission_end, r.timestamps[1] + r.ages[0]);
        }

        #[test]
        fn ages_are_positively_homogeneous(seed in any::<u64>(), m in 1usize..20, c in 0.01f64..100.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (traj, eta) = random_instance(&mut rng, m);
            let a = evaluate(&traj, &eta, 0.0).unwrap();
            let b = evaluate(&traj, &eta.scaled(c).unwrap(), 0.0).unwrap();
            for (x, y) in a.ages.iter().zip(&b.ages) {
                prop_assert!((y - c * x).abs() <= 1e-12 * c * x);
            }
            for (x, y) in a.weighted_partials.iter().zip(&b.weighted_partials) {
                prop_assert!((y - c * x).abs() <= 1e-12 * c * x);
            }
        }

        #[test]
        fn age_process_is_piecewise_linear(seed in any::<u64>(), m in 1usize..10, takeoff in 0.0f64..20.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (traj, eta) = random_instance(&mut rng, m);
            let report = evaluate(&traj, &eta, takeoff).unwrap();
            let position = rng.gen_range(1..=m);
            let sampled = report.timestamps[position];
            let mut previous = 0.0;
            for step in 0..50 {
                let time = report.mission_end * step as f64 / 49.0;
                let age = age_at_time(&traj, &eta, takeoff, position, time).unwrap();
                prop_assert!(age >= previous);
                if time <= sampled {
                    prop_assert_eq!(age, 0.0);
                } else {
                    assert_relative_eq!(age, time - sampled, max_relative = 1e-12);
                }
                previous = age;
            }
        }
    }
}
