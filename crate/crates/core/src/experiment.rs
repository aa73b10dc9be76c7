//! Seeded random instances and online-versus-optimal ratio experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{Instance, Job, Time};
use crate::online::{run_online, OnlinePolicy};
use crate::rational::Rational;
use crate::solver::{solve_optimal, SolveOptions};

/// Heats are drawn from `k / HEAT_GRID` with `0 <= k <= 2 * HEAT_GRID`.
pub const HEAT_GRID: i64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomModel {
    pub jobs: usize,
    /// Releases are uniform in `0..release_span`.
    pub release_span: Time,
    /// Window lengths `d - r` are uniform in `1..=max_window`.
    pub max_window: Time,
    pub seed: u64,
}

impl RandomModel {
    pub fn new(jobs: usize, release_span: Time, max_window: Time, seed: u64) -> Self {
        RandomModel {
            jobs,
            release_span,
            max_window,
            seed,
        }
    }

    /// Largest horizon this model can produce.
    pub fn max_horizon(&self) -> Time {
        self.release_span.max(1) - 1 + self.max_window.max(1)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        RandomModel { seed, ..self }
    }
}

/// A pure function of the model, including its seed. Job ids are `1..=n`.
pub fn random_instance(model: &RandomModel) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let span = model.release_span.max(1);
    let window = model.max_window.max(1);
    let jobs = (0..model.jobs)
        .map(|i| {
            let release = rng.random_range(0..span);
            let len = rng.random_range(1..=window);
            let k = rng.random_range(0..=2 * HEAT_GRID);
            Job::new(i as u32 + 1, release, release + len, Rational::frac(k, HEAT_GRID))
        })
        .collect();
    Instance::with_default_config(jobs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub seed: u64,
    pub policy: String,
    pub opt: Option<usize>,
    pub throughput: Option<usize>,
    /// `opt / throughput`; absent when either is unknown, `opt` is 0, or the
    /// policy completed nothing.
    pub ratio: Option<Rational>,
    /// `throughput < ceil(opt / 2)`.
    pub counterexample: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: String,
    pub instances: usize,
    /// Instances with a ratio in the aggregates.
    pub evaluated: usize,
    pub opt_zero: usize,
    pub failures: usize,
    pub counterexamples: Vec<u64>,
    pub max_ratio: Option<Rational>,
    pub mean_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub model: Option<RandomModel>,
    pub count: usize,
    pub records: Vec<RatioRecord>,
    pub summaries: Vec<PolicySummary>,
}

impl RatioReport {
    pub fn counterexample_count(&self) -> usize {
        self.records.iter().filter(|r| r.counterexample).count()
    }

    pub fn summary(&self, policy: &str) -> Option<&PolicySummary> {
        self.summaries.iter().find(|s| s.policy == policy)
    }
}

fn evaluate_one(
    seed: u64,
    instance: &Instance,
    policies: &[&(dyn OnlinePolicy + Sync)],
    options: SolveOptions,
) -> Vec<RatioRecord> {
    let opt = solve_optimal(instance, options).map(|r| r.best_throughput);
    policies
        .iter()
        .map(|policy| {
            let name = policy.name();
            let run = run_online(instance, *policy);
            let mut record = RatioRecord {
                seed,
                policy: name,
                opt: opt.as_ref().ok().copied(),
                throughput: run.as_ref().ok().map(|r| r.trace.throughput),
                ratio: None,
                counterexample: false,
                error: None,
            };
            match (&opt, &run) {
                (Err(e), _) => record.error = Some(e.to_string()),
                (_, Err(e)) => record.error = Some(e.to_string()),
                (Ok(opt), Ok(run)) => {
                    let alg = run.trace.throughput;
                    record.counterexample = alg < opt.div_ceil(2);
                    if *opt > 0 && alg > 0 {
                        record.ratio = Some(Rational::frac(*opt as i64, alg as i64));
                    }
                }
            }
            record
        })
        .collect()
}

/// Compares each policy with the exact optimum on labelled instances.
/// Instances are evaluated in parallel; records come back sorted by label,
/// then in policy order.
pub fn evaluate_instances(
    instances: &[(u64, Instance)],
    policies: &[&(dyn OnlinePolicy + Sync)],
    options: SolveOptions,
) -> RatioReport {
    let mut per_instance: Vec<(u64, Vec<RatioRecord>)> = instances
        .par_iter()
        .map(|(seed, inst)| (*seed, evaluate_one(*seed, inst, policies, options)))
        .collect();
    per_instance.sort_by_key(|(seed, _)| *seed);
    let records: Vec<RatioRecord> = per_instance.into_iter().flat_map(|(_, r)| r).collect();

    let summaries = policies
        .iter()
        .map(|p| {
            let name = p.name();
            let mine: Vec<&RatioRecord> = records.iter().filter(|r| r.policy == name).collect();
            let ratios: Vec<&Rational> = mine.iter().filter_map(|r| r.ratio.as_ref()).collect();
            let total: Rational = ratios.iter().map(|r| (*r).clone()).sum();
            PolicySummary {
                policy: name,
                instances: mine.len(),
                evaluated: ratios.len(),
                opt_zero: mine.iter().filter(|r| r.opt == Some(0)).count(),
                failures: mine.iter().filter(|r| r.error.is_some()).count(),
                counterexamples: mine.iter().filter(|r| r.counterexample).map(|r| r.seed).collect(),
                max_ratio: ratios.iter().max().map(|r| (*r).clone()),
                mean_ratio: (!ratios.is_empty())
                    .then(|| (total / Rational::integer(ratios.len() as u64)).to_f64()),
            }
        })
        .collect();

    RatioReport {
        model: None,
        count: instances.len(),
        records,
        summaries,
    }
}

/// Generates `count` instances with seeds `model.seed, model.seed + 1, ...`
/// and evaluates every policy on each.
pub fn ratio_experiment(
    model: &RandomModel,
    policies: &[&(dyn OnlinePolicy + Sync)],
    count: usize,
    options: SolveOptions,
) -> RatioReport {
    let instances: Vec<(u64, Instance)> = (0..count as u64)
        .map(|i| {
            let seed = model.seed.wrapping_add(i);
            (seed, random_instance(&model.with_seed(seed)))
        })
        .collect();
    let mut report = evaluate_instances(&instances, policies, options);
    report.model = Some(*model);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{branch_instance, Branch};
    use crate::model::validate_instance;
    use crate::online::{BuiltinPolicy, CoolestFirst, EarliestDeadlineFirst};

    #[test]
    fn empty_model() {
        let inst = random_instance(&RandomModel::new(0, 5, 3, 7));
        assert!(inst.is_empty());
    }

    #[test]
    fn deterministic_in_seed() {
        let m = RandomModel::new(5, 6, 4, 42);
        assert_eq!(random_instance(&m), random_instance(&m));
        assert_ne!(random_instance(&m), random_instance(&m.with_seed(43)));
    }

    #[test]
    fn generator_postconditions() {
        let m = RandomModel::new(5, 6, 4, 42);
        let inst = random_instance(&m);
        assert_eq!(inst.len(), 5);
        assert!(validate_instance(&inst).is_empty());
        assert!(inst.jobs.iter().all(|j| j.release < j.deadline
            && j.heat >= Rational::zero()
            && j.heat <= Rational::integer(2)
            && j.release < 6
            && j.deadline - j.release <= 4));
        assert!(inst.horizon() <= m.max_horizon());
    }

    #[test]
    fn zero_count_is_empty() {
        let report = ratio_experiment(
            &RandomModel::new(4, 4, 3, 1),
            &[&CoolestFirst],
            0,
            SolveOptions::default(),
        );
        assert!(report.records.is_empty());
        assert_eq!(report.summaries[0].evaluated, 0);
        assert_eq!(report.summaries[0].max_ratio, None);
    }

    #[test]
    fn lower_bound_instance_ratio_two() {
        let inst = branch_instance(Branch::RanFirstJob);
        let report = evaluate_instances(
            &[(0, inst)],
            &[&CoolestFirst, &EarliestDeadlineFirst],
            SolveOptions::default(),
        );
        for s in &report.summaries {
            assert_eq!(s.max_ratio, Some(Rational::integer(2)), "{}", s.policy);
            assert!(s.counterexamples.is_empty());
        }
    }

    #[test]
    fn small_experiment_has_no_counterexamples() {
        let report = ratio_experiment(
            &RandomModel::new(6, 6, 4, 2024),
            &[&BuiltinPolicy::Coolest, &BuiltinPolicy::Edf],
            60,
            SolveOptions::default(),
        );
        assert_eq!(report.records.len(), 120);
        assert_eq!(report.counterexample_count(), 0);
        for s in &report.summaries {
            assert!(s.max_ratio.as_ref().is_none_or(|r| *r <= Rational::integer(2)));
        }
    }

    #[test]
    fn idle_policy_is_flagged() {
        let report = ratio_experiment(
            &RandomModel::new(3, 3, 3, 5),
            &[&BuiltinPolicy::Idle],
            10,
            SolveOptions::default(),
        );
        let s = report.summary("idle").unwrap();
        assert_eq!(s.counterexamples.len(), 10 - s.opt_zero);
    }

    #[test]
    fn budget_failures_recorded() {
        let report = ratio_experiment(
            &RandomModel::new(6, 4, 4, 9),
            &[&CoolestFirst],
            5,
            SolveOptions { node_budget: Some(1) },
        );
        assert!(report.records.iter().all(|r| r.error.is_some() && r.opt.is_none()));
        assert_eq!(report.summaries[0].failures, 5);
    }
}
