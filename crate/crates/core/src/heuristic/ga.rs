//! Genetic search over visit orders.
//!
//! Each generation scores the population, keeps chromosomes whose
//! normalized fitness reaches the selection threshold as a mating pool,
//! pairs them at random for partially mapped crossover and replaces the
//! worst chromosomes with the offspring. Surviving chromosomes other than
//! the best `elitism` are mutated before the next generation; offspring
//! mutate with probability `mutation_prob`. Without the survivor mutation
//! the population collapses onto copies of a few orders within a few
//! hundred generations.

use std::cmp::Ordering;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aoi::{is_permutation, objective_unchecked, ObjectiveKind, Trajectory};
use crate::error::{AoiError, Result};
use crate::heuristic::greedy::greedy_trajectory;
use crate::net::TransitCostMatrix;
use crate::solution::{Algorithm, SolveResult};

/// Tunables of the genetic search. Defaults follow the reference setup:
/// 1000 chromosomes, 10^4 generations, acceleration 2, selection threshold
/// 0.8 and mutation probability 0.01.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: usize,
    /// Exponent applied to the normalized fitness; must exceed 1.
    pub acceleration: f64,
    /// Minimum fitness for entering the mating pool.
    pub selection_threshold: f64,
    /// Mutation probability of each offspring.
    pub mutation_prob: f64,
    /// Keeps the fitness denominator positive when all lengths agree.
    pub epsilon: f64,
    /// Random transpositions applied by one mutation.
    pub mutation_swaps: usize,
    /// Best chromosomes copied unchanged into the next generation.
    pub elitism: usize,
    pub seed: u64,
    /// Put the greedy trajectory into the initial population.
    pub seed_with_greedy: bool,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 1000,
            generations: 10_000,
            acceleration: 2.0,
            selection_threshold: 0.8,
            mutation_prob: 0.01,
            epsilon: 1e-9,
            mutation_swaps: 3,
            elitism: 1,
            seed: 0,
            seed_with_greedy: false,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, reason: String| Err(AoiError::domain(field, reason));
        if self.population_size < 2 {
            return fail("population_size", format!("must be at least 2, got {}", self.population_size));
        }
        if self.generations < 1 {
            return fail("generations", "must be at least 1".into());
        }
        if !(self.acceleration > 1.0 && self.acceleration.is_finite()) {
            return fail("acceleration", format!("must be finite and > 1, got {}", self.acceleration));
        }
        if !(0.0..=1.0).contains(&self.selection_threshold) {
            return fail(
                "selection_threshold",
                format!("must lie in [0, 1], got {}", self.selection_threshold),
            );
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return fail("mutation_prob", format!("must lie in [0, 1], got {}", self.mutation_prob));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return fail("epsilon", format!("must be finite and > 0, got {}", self.epsilon));
        }
        if self.mutation_swaps < 1 {
            return fail("mutation_swaps", "must be at least 1".into());
        }
        if self.elitism >= self.population_size {
            return fail(
                "elitism",
                format!("must be below population_size ({}), got {}", self.population_size, self.elitism),
            );
        }
        Ok(())
    }
}

/// `((1 - (l - l_min) / (l_max - l_min + eps))^alpha` for every length.
pub fn fitness(lengths: &[f64], alpha: f64, eps: f64) -> Vec<f64> {
    let (lo, hi) = lengths
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)));
    let span = hi - lo + eps;
    lengths
        .iter()
        .map(|&l| (1.0 - (l - lo) / span).powf(alpha))
        .collect()
}

/// Partially mapped crossover on raw orders, 0-based inclusive segment
/// `[lo, hi]`.
///
/// The first child takes `b`'s segment and fills the rest from `a`; a gene
/// of `a` already present in the segment is replaced by following
/// `b[j] -> a[j]` through the segment until it leaves it. The second child
/// is the mirror image.
fn pmx_orders(a: &[usize], b: &[usize], lo: usize, hi: usize) -> (Vec<usize>, Vec<usize>) {
    (pmx_child(a, b, lo, hi), pmx_child(b, a, lo, hi))
}

fn pmx_child(base: &[usize], donor: &[usize], lo: usize, hi: usize) -> Vec<usize> {
    let n = base.len();
    // Node id -> index inside the donor segment.
    let mut in_segment = vec![usize::MAX; n + 1];
    for j in lo..=hi {
        in_segment[donor[j]] = j;
    }
    let mut child = base.to_vec();
    child[lo..=hi].copy_from_slice(&donor[lo..=hi]);
    for p in (0..lo).chain(hi + 1..n) {
        let mut gene = base[p];
        while in_segment[gene] != usize::MAX {
            gene = base[in_segment[gene]];
        }
        child[p] = gene;
    }
    child
}

/// Partially mapped crossover with 1-based inclusive cut points
/// `1 <= cut1 < cut2 <= M`.
pub fn pmx_crossover(
    parent_a: &Trajectory,
    parent_b: &Trajectory,
    cut1: usize,
    cut2: usize,
) -> Result<(Trajectory, Trajectory)> {
    let m = parent_a.m();
    if parent_b.m() != m {
        return Err(AoiError::domain(
            "parent_b",
            format!("visits {} nodes, parent_a visits {m}", parent_b.m()),
        ));
    }
    if !(1 <= cut1 && cut1 < cut2 && cut2 <= m) {
        return Err(AoiError::domain(
            "cut points",
            format!("need 1 <= cut1 < cut2 <= {m}, got ({cut1}, {cut2})"),
        ));
    }
    let (x, y) = pmx_orders(parent_a.order(), parent_b.order(), cut1 - 1, cut2 - 1);
    Ok((Trajectory::from_order_unchecked(x), Trajectory::from_order_unchecked(y)))
}

fn mutate_order<R: Rng + ?Sized>(order: &mut [usize], swaps: usize, rng: &mut R) {
    let n = order.len();
    if n < 2 {
        return;
    }
    for _ in 0..swaps {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        order.swap(a, b);
    }
}

/// Applies `swaps` random transpositions.
pub fn mutate<R: Rng + ?Sized>(traj: &Trajectory, swaps: usize, rng: &mut R) -> Trajectory {
    let mut order = traj.order().to_vec();
    mutate_order(&mut order, swaps, rng);
    Trajectory::from_order_unchecked(order)
}

/// One scored generation.
#[derive(Clone, Debug)]
pub struct Population {
    pub chromosomes: Vec<Trajectory>,
    /// Objective value of each chromosome.
    pub lengths: Vec<f64>,
    pub fitness: Vec<f64>,
}

impl Population {
    pub fn evaluate(
        chromosomes: Vec<Trajectory>,
        eta: &TransitCostMatrix,
        kind: ObjectiveKind,
        params: &GaParams,
    ) -> Self {
        let lengths: Vec<f64> = chromosomes
            .iter()
            .map(|c| objective_unchecked(c.order(), eta, kind))
            .collect();
        let fitness = fitness(&lengths, params.acceleration, params.epsilon);
        Population {
            chromosomes,
            lengths,
            fitness,
        }
    }

    /// Indices from shortest to longest; equal lengths keep index order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.lengths.len()).collect();
        idx.sort_by(|&i, &j| self.lengths[i].total_cmp(&self.lengths[j]).then(i.cmp(&j)));
        idx
    }

    pub fn best(&self) -> usize {
        (0..self.lengths.len())
            .min_by(|&i, &j| match self.lengths[i].total_cmp(&self.lengths[j]) {
                Ordering::Equal => i.cmp(&j),
                other => other,
            })
            .expect("population is never empty")
    }

    /// Chromosomes with fitness at least `threshold`, or the two fittest
    /// when fewer qualify.
    pub fn mating_pool(&self, threshold: f64) -> Vec<usize> {
        let pool: Vec<usize> = (0..self.fitness.len()).filter(|&i| self.fitness[i] >= threshold).collect();
        if pool.len() >= 2 {
            pool
        } else {
            self.ranking().into_iter().take(2).collect()
        }
    }
}

/// A finished run plus the best length seen in each generation.
#[derive(Clone, Debug)]
pub struct GaRun {
    pub result: SolveResult,
    /// Best length of the population scored at the start of each
    /// generation, followed by the final population's best.
    pub best_per_generation: Vec<f64>,
}

pub fn ga_run(eta: &TransitCostMatrix, kind: ObjectiveKind, params: &GaParams) -> Result<GaRun> {
    params.validate()?;
    let started = Instant::now();
    let m = eta.m();
    let n = params.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    if m == 1 {
        let trajectory = Trajectory::identity(1);
        let value = objective_unchecked(trajectory.order(), eta, kind);
        return Ok(GaRun {
            result: SolveResult {
                trajectory,
                objective_value: value,
                objective_kind: kind,
                algorithm: Algorithm::Ga,
                wall_time: started.elapsed(),
            },
            best_per_generation: vec![value],
        });
    }

    let mut chromosomes: Vec<Trajectory> = (0..n)
        .map(|_| {
            let mut order: Vec<usize> = (1..=m).collect();
            order.shuffle(&mut rng);
            Trajectory::from_order_unchecked(order)
        })
        .collect();
    if params.seed_with_greedy {
        chromosomes[0] = greedy_trajectory(eta);
    }

    let mut history = Vec::with_capacity(params.generations + 1);
    for _ in 0..params.generations {
        let population = Population::evaluate(chromosomes, eta, kind, params);
        let ranking = population.ranking();
        history.push(population.lengths[ranking[0]]);

        let mut pool = population.mating_pool(params.selection_threshold);
        pool.shuffle(&mut rng);
        let mut offspring = Vec::with_capacity(pool.len());
        for pair in pool.chunks_exact(2) {
            let mut cuts = index::sample(&mut rng, m, 2).into_vec();
            cuts.sort_unstable();
            let (x, y) = pmx_orders(
                population.chromosomes[pair[0]].order(),
                population.chromosomes[pair[1]].order(),
                cuts[0],
                cuts[1],
            );
            offspring.push(x);
            offspring.push(y);
        }

        let replaced = offspring.len().min(n - params.elitism);
        let kept = n - replaced;
        let mut next: Vec<Vec<usize>> = ranking[..kept]
            .iter()
            .map(|&i| population.chromosomes[i].order().to_vec())
            .collect();
        next.extend(offspring.into_iter().take(replaced));

        // Elites pass through untouched, other carried-over survivors are
        // always mutated, offspring mutate with probability `mutation_prob`.
        for (slot, order) in next.iter_mut().enumerate().skip(params.elitism) {
            if slot < kept || rng.gen::<f64>() < params.mutation_prob {
                mutate_order(order, params.mutation_swaps, &mut rng);
            }
        }
        debug_assert!(next.iter().all(|o| is_permutation(o)));
        chromosomes = next.into_iter().map(Trajectory::from_order_unchecked).collect();
    }

    let population = Population::evaluate(chromosomes, eta, kind, params);
    let best = population.best();
    history.push(population.lengths[best]);
    let objective_value = population.lengths[best];
    let trajectory = population.chromosomes.into_iter().nth(best).expect("best index is in range");
    Ok(GaRun {
        result: SolveResult {
            trajectory,
            objective_value,
            objective_kind: kind,
            algorithm: Algorithm::Ga,
            wall_time: started.elapsed(),
        },
        best_per_generation: history,
    })
}

pub fn ga_solve(eta: &TransitCostMatrix, kind: ObjectiveKind, params: &GaParams) -> Result<SolveResult> {
    ga_run(eta, kind, params).map(|run| run.result)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    use super::*;

    fn t(order: &[usize]) -> Trajectory {
        Trajectory::new(order.to_vec()).unwrap()
    }

    fn random_perm(rng: &mut ChaCha8Rng, m: usize) -> Trajectory {
        let mut order: Vec<usize> = (1..=m).collect();
        order.shuffle(rng);
        t(&order)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> TransitCostMatrix {
        let rows: Vec<Vec<f64>> = (0..=m)
            .map(|_| (0..=m).map(|_| rng.gen_range(0.5..60.0)).collect())
            .collect();
        TransitCostMatrix::from_rows(&rows).unwrap()
    }

    fn small_params(seed: u64) -> GaParams {
        GaParams {
            population_size: 60,
            generations: 80,
            seed,
            ..GaParams::default()
        }
    }

    #[test]
    fn fitness_reference_values() {
        let eps = 1e-9;
        let phi = fitness(&[10.0, 20.0, 30.0], 2.0, eps);
        assert_eq!(phi[0], 1.0);
        assert_relative_eq!(phi[1], 0.25, max_relative = 1e-9);
        assert_relative_eq!(phi[2], (eps / (20.0 + eps)).powi(2), max_relative = 1e-6);
    }

    #[test]
    fn fitness_degenerate_population() {
        assert_eq!(fitness(&[7.0, 7.0, 7.0], 2.0, 1e-9), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn acceleration_spreads_without_reordering() {
        let lengths = [12.0, 30.0, 18.0, 25.0];
        let linear = fitness(&lengths, 1.0, 1e-9);
        let squared = fitness(&lengths, 2.0, 1e-9);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(linear[i] > linear[j], squared[i] > squared[j]);
            }
        }
        assert!(squared[2] < linear[2] && squared[3] < linear[3]);
    }

    #[test]
    fn params_validation() {
        assert!(GaParams::default().validate().is_ok());
        let bad = [
            GaParams { population_size: 1, ..GaParams::default() },
            GaParams { generations: 0, ..GaParams::default() },
            GaParams { acceleration: 1.0, ..GaParams::default() },
            GaParams { selection_threshold: 1.5, ..GaParams::default() },
            GaParams { mutation_prob: -0.1, ..GaParams::default() },
            GaParams { epsilon: 0.0, ..GaParams::default() },
            GaParams { mutation_swaps: 0, ..GaParams::default() },
            GaParams { elitism: 1000, ..GaParams::default() },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn pmx_golden() {
        // Segment positions 2..=4: child one takes [4, 5, 1] from the
        // second parent; 1 maps 1 -> 4 -> 2 and 5 maps 5 -> 3.
        let (x, y) = pmx_crossover(&t(&[1, 2, 3, 4, 5]), &t(&[3, 4, 5, 1, 2]), 2, 4).unwrap();
        assert_eq!(x.order(), &[2, 4, 5, 1, 3]);
        assert_eq!(y.order(), &[5, 2, 3, 4, 1]);
    }

    #[test]
    fn pmx_identical_parents() {
        let p = t(&[4, 1, 3, 2, 6, 5]);
        let (x, y) = pmx_crossover(&p, &p, 2, 5).unwrap();
        assert_eq!(x, p);
        assert_eq!(y, p);
    }

    #[test]
    fn pmx_rejects_bad_cuts() {
        let a = t(&[1, 2, 3]);
        let b = t(&[3, 2, 1]);
        assert!(pmx_crossover(&a, &b, 0, 2).is_err());
        assert!(pmx_crossover(&a, &b, 2, 2).is_err());
        assert!(pmx_crossover(&a, &b, 2, 4).is_err());
        assert!(pmx_crossover(&a, &t(&[1, 2]), 1, 2).is_err());
    }

    #[test]
    fn pmx_closure_over_random_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10_000 {
            let m = rng.gen_range(2..=15);
            let a = random_perm(&mut rng, m);
            let b = random_perm(&mut rng, m);
            let cut1 = rng.gen_range(1..m);
            let cut2 = rng.gen_range(cut1 + 1..=m);
            let (x, y) = pmx_crossover(&a, &b, cut1, cut2).unwrap();
            assert!(is_permutation(x.order()) && is_permutation(y.order()));
            assert_eq!(&x.order()[cut1 - 1..cut2], &b.order()[cut1 - 1..cut2]);
            assert_eq!(&y.order()[cut1 - 1..cut2], &a.order()[cut1 - 1..cut2]);
        }
    }

    #[test]
    fn mutation_behaviour() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(mutate(&t(&[1]), 3, &mut rng), t(&[1]));

        let mut forced = t(&[1, 2, 3]);
        forced.swap_positions(1, 3);
        assert_eq!(forced, t(&[3, 2, 1]));

        for _ in 0..10_000 {
            let m = rng.gen_range(1..=12);
            let swaps = rng.gen_range(1..=4);
            let before = random_perm(&mut rng, m);
            let after = mutate(&before, swaps, &mut rng);
            assert!(is_permutation(after.order()));
            let moved = before.order().iter().zip(after.order()).filter(|(a, b)| a != b).count();
            assert!(moved <= 2 * swaps);
        }
    }

    #[test]
    fn mating_pool_falls_back_to_top_two() {
        let eta = TransitCostMatrix::from_rows(&[vec![0.0, 1.0, 2.0], vec![3.0, 0.0, 4.0], vec![5.0, 6.0, 0.0]]).unwrap();
        let pop = Population::evaluate(vec![t(&[1, 2]), t(&[2, 1]), t(&[1, 2])], &eta, ObjectiveKind::AveAoi, &GaParams::default());
        // [2, 1] scores 6, the others 7: only index 1 reaches the threshold.
        assert_eq!(pop.lengths, vec![7.0, 6.0, 7.0]);
        assert_eq!(pop.mating_pool(0.8), vec![1, 0]);
        assert_eq!(pop.best(), 1);
        assert_eq!(pop.ranking(), vec![1, 0, 2]);
    }

    #[test]
    fn seeded_runs_repeat() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let eta = random_matrix(&mut rng, 9);
        for kind in ObjectiveKind::ALL {
            let a = ga_solve(&eta, kind, &small_params(4)).unwrap();
            let b = ga_solve(&eta, kind, &small_params(4)).unwrap();
            assert_eq!(a.trajectory, b.trajectory);
            assert_eq!(a.objective_value, b.objective_value);
        }
    }

    #[test]
    fn single_node_is_immediate() {
        let eta = TransitCostMatrix::from_rows(&[vec![0.0, 4.0], vec![2.5, 0.0]]).unwrap();
        let r = ga_solve(&eta, ObjectiveKind::MaxAoi, &GaParams::default()).unwrap();
        assert_eq!(r.trajectory.order(), &[1]);
        assert_eq!(r.objective_value, 2.5);
    }

    #[test]
    fn elitism_keeps_best_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let eta = random_matrix(&mut rng, 12);
        let params = GaParams { mutation_prob: 0.3, ..small_params(8) };
        for kind in ObjectiveKind::ALL {
            let run = ga_run(&eta, kind, &params).unwrap();
            assert_eq!(run.best_per_generation.len(), params.generations + 1);
            for w in run.best_per_generation.windows(2) {
                assert!(w[1] <= w[0]);
            }
            assert_eq!(*run.best_per_generation.last().unwrap(), run.result.objective_value);
        }
    }

    #[test]
    fn objective_value_replays() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let eta = random_matrix(&mut rng, 10);
        for kind in ObjectiveKind::ALL {
            let r = ga_solve(&eta, kind, &small_params(1)).unwrap();
            assert_eq!(r.objective_value, crate::aoi::objective_value(&r.trajectory, &eta, kind).unwrap());
        }
    }

    #[test]
    fn greedy_seed_is_never_beaten_downward() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let eta = random_matrix(&mut rng, 14);
        let greedy = greedy_trajectory(&eta);
        let params = GaParams { seed_with_greedy: true, ..small_params(2) };
        for kind in ObjectiveKind::ALL {
            let r = ga_solve(&eta, kind, &params).unwrap();
            assert!(r.objective_value <= objective_unchecked(greedy.order(), &eta, kind));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fitness_reverses_length_order(lengths in prop::collection::vec(0.1f64..1e4, 2..50), alpha in 1.01f64..5.0) {
            let phi = fitness(&lengths, alpha, 1e-9);
            for i in 0..lengths.len() {
                prop_assert!((0.0..=1.0).contains(&phi[i]));
                for j in 0..lengths.len() {
                    if lengths[i] < lengths[j] {
                        prop_assert!(phi[i] > phi[j]);
                    }
                }
            }
        }

        #[test]
        fn every_generation_stays_a_permutation(seed in any::<u64>(), m in 2usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let eta = random_matrix(&mut rng, m);
            let params = GaParams { population_size: 20, generations: 15, mutation_prob: 0.5, seed, ..GaParams::default() };
            let r = ga_solve(&eta, ObjectiveKind::AveAoi, &params).unwrap();
            prop_assert!(is_permutation(r.trajectory.order()));
        }
    }
}
