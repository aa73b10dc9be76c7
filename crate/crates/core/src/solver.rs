//! Exact maximum-throughput scheduling.
//!
//! [`solve_optimal`] is a depth-first branch and bound over slots: at each
//! slot it tries every admissible pending job and then idling. Two prunes
//! keep it tractable:
//!
//! * an optimistic bound (completed so far plus every undone, unexpired job,
//!   capped by the remaining slots) against the incumbent, and
//! * dominance memoization. States agreeing on the time and on which live
//!   jobs are done are compared by temperature and completion count; a state
//!   that is no cooler and has completed no more than a recorded one is cut.
//!   Lower temperature can never hurt because the recurrence is monotone in
//!   the starting temperature.
//!
//! [`enumerate_optimal_bruteforce`] shares none of this and exists only as an
//! oracle for tests.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, JobId, Schedule, Time};
use crate::rational::Rational;
use crate::thermal::{heat_fits, step_temperature};

pub const MAX_SOLVER_JOBS: usize = 128;
pub const BRUTE_FORCE_MAX_JOBS: usize = 10;
pub const BRUTE_FORCE_MAX_HORIZON: Time = 16;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Stop after this many search nodes.
    pub node_budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_throughput: usize,
    pub witness: Schedule,
    /// Search nodes visited.
    pub explored: u64,
    /// Nodes cut by the memo table.
    pub memo_pruned: u64,
    /// Nodes cut by the optimistic bound.
    pub bound_pruned: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("node budget of {budget} exhausted; best found {} is only a lower bound", .best.best_throughput)]
    BudgetExceeded { budget: u64, best: Box<OptResult> },
    #[error("instance has {0} jobs; the solver handles at most {MAX_SOLVER_JOBS}")]
    TooManyJobs(usize),
    #[error("instance too large for brute force: {jobs} jobs, horizon {horizon} (limits {BRUTE_FORCE_MAX_JOBS} jobs, horizon {BRUTE_FORCE_MAX_HORIZON})")]
    TooLargeForBruteForce { jobs: usize, horizon: Time },
}

struct Search<'a> {
    instance: &'a Instance,
    horizon: Time,
    /// Previous job index with identical (release, deadline, heat). Twins
    /// are used in index order, so their permutations are explored once.
    prev_twin: Vec<Option<usize>>,
    /// `live_mask[u]`: jobs with deadline > u.
    live_mask: Vec<u128>,
    memo: HashMap<(Time, u128), Vec<(Rational, usize)>>,
    path: Vec<Option<JobId>>,
    best: usize,
    witness: Vec<Option<JobId>>,
    explored: u64,
    memo_pruned: u64,
    bound_pruned: u64,
    budget: Option<u64>,
    exhausted: bool,
}

impl Search<'_> {
    fn upper_bound(&self, time: Time, done: u128, count: usize) -> usize {
        let remaining = (self.live_mask[time as usize] & !done).count_ones() as usize;
        count + remaining.min((self.horizon - time) as usize)
    }

    /// Returns true if a recorded state dominates `(temp, count)`; otherwise
    /// records it and drops entries it dominates.
    fn dominated(&mut self, key: (Time, u128), temp: &Rational, count: usize) -> bool {
        let frontier = self.memo.entry(key).or_default();
        if frontier.iter().any(|(t, c)| t <= temp && *c >= count) {
            return true;
        }
        frontier.retain(|(t, c)| !(temp <= t && count >= *c));
        frontier.push((temp.clone(), count));
        false
    }

    fn dfs(&mut self, time: Time, done: u128, count: usize, temp: Rational) {
        if self.exhausted {
            return;
        }
        self.explored += 1;
        if let Some(budget) = self.budget {
            if self.explored > budget {
                self.exhausted = true;
                return;
            }
        }
        if count > self.best {
            self.best = count;
            self.witness = self.path[..time as usize].to_vec();
            self.witness.resize(self.horizon as usize, None);
        }
        if time == self.horizon {
            return;
        }
        if self.upper_bound(time, done, count) <= self.best {
            self.bound_pruned += 1;
            return;
        }
        let key = (time, done & self.live_mask[time as usize]);
        if self.dominated(key, &temp, count) {
            self.memo_pruned += 1;
            return;
        }

        let config = &self.instance.config;
        let mut children: Vec<usize> = self
            .instance
            .jobs
            .iter()
            .enumerate()
            .filter(|&(i, job)| {
                done & (1u128 << i) == 0
                    && job.is_live_at(time)
                    && heat_fits(&temp, &job.heat, config)
                    && self.prev_twin[i].is_none_or(|k| done & (1u128 << k) != 0)
            })
            .map(|(i, _)| i)
            .collect();
        children.sort_by(|&a, &b| {
            let (ja, jb) = (&self.instance.jobs[a], &self.instance.jobs[b]);
            ja.deadline.cmp(&jb.deadline).then_with(|| ja.heat.cmp(&jb.heat))
        });

        for i in children {
            let job = &self.instance.jobs[i];
            let next = step_temperature(&temp, &job.heat, config);
            self.path[time as usize] = Some(job.id);
            self.dfs(time + 1, done | (1u128 << i), count + 1, next);
        }
        self.path[time as usize] = None;
        let cooled = step_temperature(&temp, &Rational::zero(), config);
        self.dfs(time + 1, done, count, cooled);
    }
}

/// Maximum throughput over all feasible schedules of `instance`, with a
/// witness schedule of length `horizon`.
pub fn solve_optimal(instance: &Instance, options: SolveOptions) -> Result<OptResult, SolveError> {
    let n = instance.jobs.len();
    if n > MAX_SOLVER_JOBS {
        return Err(SolveError::TooManyJobs(n));
    }
    let horizon = instance.horizon();
    let prev_twin = (0..n)
        .map(|i| {
            let ji = &instance.jobs[i];
            (0..i).rev().find(|&k| {
                let jk = &instance.jobs[k];
                jk.release == ji.release && jk.deadline == ji.deadline && jk.heat == ji.heat
            })
        })
        .collect();
    let live_mask = (0..=horizon)
        .map(|u| {
            instance
                .jobs
                .iter()
                .enumerate()
                .filter(|(_, j)| j.deadline > u)
                .fold(0u128, |m, (i, _)| m | (1u128 << i))
        })
        .collect();
    let mut search = Search {
        instance,
        horizon,
        prev_twin,
        live_mask,
        memo: HashMap::new(),
        path: vec![None; horizon as usize],
        best: 0,
        witness: vec![None; horizon as usize],
        explored: 0,
        memo_pruned: 0,
        bound_pruned: 0,
        budget: options.node_budget,
        exhausted: false,
    };
    search.dfs(0, 0, 0, Rational::zero());
    let result = OptResult {
        best_throughput: search.best,
        witness: Schedule {
            slots: search.witness,
        },
        explored: search.explored,
        memo_pruned: search.memo_pruned,
        bound_pruned: search.bound_pruned,
    };
    match (search.exhausted, options.node_budget) {
        (true, Some(budget)) => Err(SolveError::BudgetExceeded {
            budget,
            best: Box::new(result),
        }),
        _ => Ok(result),
    }
}

/// Exhaustive maximum throughput: tries every assignment of each slot to
/// idle or to an unused job whose window contains the slot, and keeps the
/// best one that never exceeds the threshold. Guarded to tiny instances.
pub fn enumerate_optimal_bruteforce(instance: &Instance) -> Result<usize, SolveError> {
    let horizon = instance.horizon();
    if instance.jobs.len() > BRUTE_FORCE_MAX_JOBS || horizon > BRUTE_FORCE_MAX_HORIZON {
        return Err(SolveError::TooLargeForBruteForce {
            jobs: instance.jobs.len(),
            horizon,
        });
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        instance: &Instance,
        slot: Time,
        horizon: Time,
        used: &mut Vec<bool>,
        temp: &Rational,
        feasible: bool,
        count: usize,
        best: &mut usize,
    ) {
        if slot == horizon {
            if feasible && count > *best {
                *best = count;
            }
            return;
        }
        let cfg = &instance.config;
        go(
            instance,
            slot + 1,
            horizon,
            used,
            &step_temperature(temp, &Rational::zero(), cfg),
            feasible,
            count,
            best,
        );
        for (i, job) in instance.jobs.iter().enumerate() {
            if used[i] || slot < job.release || slot >= job.deadline {
                continue;
            }
            let next = step_temperature(temp, &job.heat, cfg);
            let ok = feasible && next <= cfg.threshold;
            used[i] = true;
            go(instance, slot + 1, horizon, used, &next, ok, count + 1, best);
            used[i] = false;
        }
    }

    let mut best = 0;
    let mut used = vec![false; instance.jobs.len()];
    go(
        instance,
        0,
        horizon,
        &mut used,
        &Rational::zero(),
        true,
        0,
        &mut best,
    );
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::four_job_example;
    use crate::model::Job;
    use crate::thermal::simulate;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn check_witness(inst: &Instance, res: &OptResult) {
        let trace = simulate(inst, &res.witness);
        assert!(trace.violations.is_empty(), "{:?}", trace.violations);
        assert_eq!(trace.throughput, res.best_throughput);
    }

    #[test]
    fn example_optimum_is_four() {
        let inst = four_job_example();
        let res = solve_optimal(&inst, SolveOptions::default()).unwrap();
        assert_eq!(res.best_throughput, 4);
        check_witness(&inst, &res);
        assert_eq!(enumerate_optimal_bruteforce(&inst), Ok(4));
    }

    #[test]
    fn adversary_branch_instance() {
        let inst = Instance::with_default_config(vec![
            Job::new(1, 0, 3, r(6, 5)),
            Job::new(2, 1, 2, r(8, 5)),
        ]);
        let res = solve_optimal(&inst, SolveOptions::default()).unwrap();
        assert_eq!(res.best_throughput, 2);
        check_witness(&inst, &res);
    }

    #[test]
    fn too_hot_job_never_runs() {
        let inst = Instance::with_default_config(vec![Job::new(0, 0, 4, r(5, 2))]);
        assert_eq!(solve_optimal(&inst, SolveOptions::default()).unwrap().best_throughput, 0);
        assert_eq!(enumerate_optimal_bruteforce(&inst), Ok(0));
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::with_default_config(vec![]);
        let res = solve_optimal(&inst, SolveOptions::default()).unwrap();
        assert_eq!(res.best_throughput, 0);
        assert!(res.witness.is_empty());
        assert_eq!(enumerate_optimal_bruteforce(&inst), Ok(0));
    }

    #[test]
    fn twins_sharing_one_slot() {
        let inst = Instance::with_default_config(vec![
            Job::new(0, 0, 1, r(1, 2)),
            Job::new(1, 0, 1, r(1, 2)),
        ]);
        assert_eq!(enumerate_optimal_bruteforce(&inst), Ok(1));
        assert_eq!(solve_optimal(&inst, SolveOptions::default()).unwrap().best_throughput, 1);
    }

    #[test]
    fn twins_are_all_reachable() {
        let inst = Instance::with_default_config(
            (0..5).map(|i| Job::new(i, 0, 6, r(1, 1))).collect(),
        );
        let res = solve_optimal(&inst, SolveOptions::default()).unwrap();
        assert_eq!(res.best_throughput, 5);
        check_witness(&inst, &res);
    }

    #[test]
    fn budget_reports_lower_bound() {
        let inst = four_job_example();
        match solve_optimal(&inst, SolveOptions { node_budget: Some(3) }) {
            Err(SolveError::BudgetExceeded { budget, best }) => {
                assert_eq!(budget, 3);
                assert!(best.best_throughput <= 4);
                check_witness(&inst, &best);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn brute_force_guard() {
        let inst = Instance::with_default_config(
            (0..11).map(|i| Job::new(i, 0, 2, r(1, 2))).collect(),
        );
        assert!(matches!(
            enumerate_optimal_bruteforce(&inst),
            Err(SolveError::TooLargeForBruteForce { jobs: 11, .. })
        ));
        let long = Instance::with_default_config(vec![Job::new(0, 0, 17, r(1, 2))]);
        assert!(enumerate_optimal_bruteforce(&long).is_err());
    }
}
