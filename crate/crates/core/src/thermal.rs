//! The thermal recurrence and schedule simulation.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Job, JobId, Schedule, ThermalConfig, Time};
use crate::rational::Rational;

/// Temperature after one slot that adds `heat` at temperature `tau`.
/// Idle slots are `heat = 0`.
pub fn step_temperature(tau: &Rational, heat: &Rational, config: &ThermalConfig) -> Rational {
    (tau + heat) / &config.cooling_factor
}

/// Whether running `job` now keeps the temperature at or below the threshold.
pub fn is_admissible(tau: &Rational, job: &Job, config: &ThermalConfig) -> bool {
    heat_fits(tau, &job.heat, config)
}

pub(crate) fn heat_fits(tau: &Rational, heat: &Rational, config: &ThermalConfig) -> bool {
    step_temperature(tau, heat, config) <= config.threshold
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Post-step temperature above the threshold.
    Thermal { job: JobId, temperature: Rational },
    /// Started before its release or at/after its deadline.
    OutsideWindow { job: JobId },
    UnknownJob { job: JobId },
    RepeatedJob { job: JobId },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub time: Time,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationTrace {
    /// `temperatures[u]` is the temperature at time `u`; starts at 0.
    pub temperatures: Vec<Rational>,
    pub completed: BTreeSet<JobId>,
    pub throughput: usize,
    pub violations: Vec<Violation>,
}

impl SimulationTrace {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_temperature(&self) -> Rational {
        self.temperatures.iter().max().cloned().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("trace has {0} violation(s); throughput is undefined")]
pub struct InvalidTrace(pub usize);

/// Runs `schedule` slot by slot. Violations are recorded and the simulation
/// keeps going; only violation-free executions count as completed.
pub fn simulate(instance: &Instance, schedule: &Schedule) -> SimulationTrace {
    let config = &instance.config;
    let len = (instance.horizon() as usize).max(schedule.len());
    let mut temperatures = Vec::with_capacity(len + 1);
    let mut tau = Rational::zero();
    temperatures.push(tau.clone());
    let mut seen = HashSet::new();
    let mut completed = BTreeSet::new();
    let mut violations = Vec::new();
    let zero = Rational::zero();

    for u in 0..len {
        let time = u as Time;
        let slot = schedule.slots.get(u).copied().flatten();
        let heat = match slot {
            None => &zero,
            Some(id) => match instance.job(id) {
                None => {
                    violations.push(Violation {
                        time,
                        kind: ViolationKind::UnknownJob { job: id },
                    });
                    &zero
                }
                Some(job) => {
                    let mut ok = true;
                    if !seen.insert(id) {
                        ok = false;
                        violations.push(Violation {
                            time,
                            kind: ViolationKind::RepeatedJob { job: id },
                        });
                    }
                    if !job.is_live_at(time) {
                        ok = false;
                        violations.push(Violation {
                            time,
                            kind: ViolationKind::OutsideWindow { job: id },
                        });
                    }
                    let next = step_temperature(&tau, &job.heat, config);
                    if next > config.threshold {
                        ok = false;
                        violations.push(Violation {
                            time,
                            kind: ViolationKind::Thermal {
                                job: id,
                                temperature: next,
                            },
                        });
                    }
                    if ok {
                        completed.insert(id);
                    }
                    &job.heat
                }
            },
        };
        tau = step_temperature(&tau, heat, config);
        temperatures.push(tau.clone());
    }

    SimulationTrace {
        temperatures,
        throughput: completed.len(),
        completed,
        violations,
    }
}

/// Number of completed jobs of a violation-free trace.
pub fn throughput(trace: &SimulationTrace) -> Result<usize, InvalidTrace> {
    if trace.violations.is_empty() {
        Ok(trace.completed.len())
    } else {
        Err(InvalidTrace(trace.violations.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::four_job_example;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn step_examples() {
        let cfg = ThermalConfig::default();
        assert_eq!(step_temperature(&r(0, 1), &r(0, 1), &cfg), r(0, 1));
        assert_eq!(step_temperature(&r(1, 1), &r(1, 1), &cfg), r(1, 1));
        assert_eq!(step_temperature(&r(1, 10), &r(19, 10), &cfg), r(1, 1));
    }

    #[test]
    fn admissibility_examples() {
        let cfg = ThermalConfig::default();
        let job = |h| Job::new(0, 0, 1, h);
        assert!(!is_admissible(&r(3, 5), &job(r(8, 5)), &cfg));
        assert!(is_admissible(&r(1, 1), &job(r(1, 1)), &cfg));
        assert!(is_admissible(&r(0, 1), &job(r(2, 1)), &cfg));
    }

    #[test]
    fn second_example_schedule_completes_all() {
        let inst = four_job_example();
        let sched = Schedule::from_ids(&[Some(1), None, Some(3), Some(2), Some(4), None]);
        let trace = simulate(&inst, &sched);
        assert!(trace.violations.is_empty());
        assert_eq!(throughput(&trace), Ok(4));
        assert_eq!(
            trace.temperatures,
            vec![r(0, 1), r(1, 5), r(1, 10), r(1, 1), r(4, 5), r(4, 5), r(2, 5)]
        );
    }

    #[test]
    fn all_idle_is_cold() {
        let inst = four_job_example();
        let trace = simulate(&inst, &Schedule::idle(6));
        assert_eq!(throughput(&trace), Ok(0));
        assert!(trace.temperatures.iter().all(Rational::is_zero));
        assert_eq!(trace.temperatures.len(), 7);
    }

    #[test]
    fn greedy_prefix_overheats_job_three() {
        let inst = four_job_example();
        let sched = Schedule::from_ids(&[Some(1), Some(2), Some(3)]);
        let trace = simulate(&inst, &sched);
        assert_eq!(trace.temperatures[2], r(2, 5));
        assert_eq!(
            trace.violations,
            vec![Violation {
                time: 2,
                kind: ViolationKind::Thermal {
                    job: JobId(3),
                    temperature: r(23, 20)
                }
            }]
        );
        assert_eq!(throughput(&trace), Err(InvalidTrace(1)));
        // diagnostic mode: still six slots simulated
        assert_eq!(trace.temperatures.len(), 7);
        assert_eq!(trace.throughput, 2);
    }

    #[test]
    fn structural_violations() {
        let inst = four_job_example();
        let sched = Schedule::from_ids(&[Some(9), Some(1), Some(1), Some(4), None, None]);
        let trace = simulate(&inst, &sched);
        let kinds: Vec<_> = trace.violations.iter().map(|v| (v.time, v.kind.clone())).collect();
        assert_eq!(
            kinds,
            vec![
                (0, ViolationKind::UnknownJob { job: JobId(9) }),
                (2, ViolationKind::RepeatedJob { job: JobId(1) }),
                (2, ViolationKind::OutsideWindow { job: JobId(1) }),
                (3, ViolationKind::OutsideWindow { job: JobId(4) }),
            ]
        );
        assert_eq!(trace.completed, BTreeSet::from([JobId(1)]));
    }

    #[test]
    fn short_schedule_padded_long_schedule_kept() {
        let inst = four_job_example();
        let trace = simulate(&inst, &Schedule::from_ids(&[Some(1)]));
        assert_eq!(trace.temperatures.len(), 7);
        let trace = simulate(&inst, &Schedule::from_ids(&[None, None, None, None, None, None, Some(4)]));
        assert_eq!(trace.temperatures.len(), 8);
        assert_eq!(trace.violations.len(), 1);
    }

    #[test]
    fn over_hot_job_never_admissible() {
        let cfg = ThermalConfig::default();
        let job = Job::new(0, 0, 5, r(5, 2));
        assert!(!is_admissible(&Rational::zero(), &job, &cfg));
    }
}
