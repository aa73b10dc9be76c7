//! Instances, jobs and schedules.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// Integer slot boundary. Slot `u` spans `[u, u + 1]`.
pub type Time = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub u32);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A unit-length job. Legal start times are `release..deadline`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub id: JobId,
    pub release: Time,
    pub deadline: Time,
    pub heat: Rational,
}

impl Job {
    pub fn new(id: u32, release: Time, deadline: Time, heat: Rational) -> Self {
        Job {
            id: JobId(id),
            release,
            deadline,
            heat,
        }
    }

    /// Released and not expired at `time`.
    pub fn is_live_at(&self, time: Time) -> bool {
        self.release <= time && time < self.deadline
    }

    /// `self` is at most as hot and due no later than `other`.
    pub fn dominates(&self, other: &Job) -> bool {
        self.heat <= other.heat && self.deadline <= other.deadline
    }

    pub fn strictly_dominates(&self, other: &Job) -> bool {
        self.dominates(other) && (self.heat < other.heat || self.deadline < other.deadline)
    }
}

/// Thermal threshold `T` and cooling factor `R`: one slot maps a temperature
/// `t` to `(t + h) / R`, and temperatures above `T` are forbidden.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThermalConfig {
    pub threshold: Rational,
    pub cooling_factor: Rational,
}

impl Default for ThermalConfig {
    fn default() -> Self {
        ThermalConfig {
            threshold: Rational::one(),
            cooling_factor: Rational::integer(2),
        }
    }
}

impl ThermalConfig {
    /// Largest `t + h` that still lands at or below the threshold.
    pub fn heat_budget(&self) -> Rational {
        &self.threshold * &self.cooling_factor
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "InstanceDoc", into = "InstanceDoc")]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub config: ThermalConfig,
}

/// On-disk shape of an instance.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    threshold: Rational,
    cooling_factor: Rational,
    jobs: Vec<Job>,
}

impl From<InstanceDoc> for Instance {
    fn from(doc: InstanceDoc) -> Self {
        Instance::new(
            doc.jobs,
            ThermalConfig {
                threshold: doc.threshold,
                cooling_factor: doc.cooling_factor,
            },
        )
    }
}

impl From<Instance> for InstanceDoc {
    fn from(inst: Instance) -> Self {
        let mut jobs = inst.jobs;
        jobs.sort_by_key(|j| j.id);
        InstanceDoc {
            threshold: inst.config.threshold,
            cooling_factor: inst.config.cooling_factor,
            jobs,
        }
    }
}

impl Instance {
    /// Jobs are kept sorted by id.
    pub fn new(mut jobs: Vec<Job>, config: ThermalConfig) -> Self {
        jobs.sort_by_key(|j| j.id);
        Instance { jobs, config }
    }

    pub fn with_default_config(jobs: Vec<Job>) -> Self {
        Self::new(jobs, ThermalConfig::default())
    }

    /// Latest deadline; no useful work happens after it.
    pub fn horizon(&self) -> Time {
        self.jobs.iter().map(|j| j.deadline).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        match self.jobs.binary_search_by_key(&id, |j| j.id) {
            Ok(idx) => Some(&self.jobs[idx]),
            Err(_) => self.jobs.iter().find(|j| j.id == id),
        }
    }

    /// Copy without the job `id`.
    pub fn without(&self, id: JobId) -> Instance {
        Instance {
            jobs: self.jobs.iter().filter(|j| j.id != id).cloned().collect(),
            config: self.config.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("job {id}: empty window (release {release} >= deadline {deadline})")]
    EmptyWindow {
        id: JobId,
        release: Time,
        deadline: Time,
    },
    #[error("job {id}: negative heat {heat}")]
    NegativeHeat { id: JobId, heat: Rational },
    #[error("job {id}: id used by {count} jobs")]
    DuplicateId { id: JobId, count: usize },
    #[error("threshold must be positive, got {0}")]
    NonPositiveThreshold(Rational),
    #[error("cooling factor must exceed 1, got {0}")]
    CoolingFactorTooSmall(Rational),
}

/// Every structural problem with `instance`; empty when it is well formed.
pub fn validate_instance(instance: &Instance) -> Vec<InstanceError> {
    let mut errors = Vec::new();
    let cfg = &instance.config;
    if cfg.threshold <= Rational::zero() {
        errors.push(InstanceError::NonPositiveThreshold(cfg.threshold.clone()));
    }
    if cfg.cooling_factor <= Rational::one() {
        errors.push(InstanceError::CoolingFactorTooSmall(cfg.cooling_factor.clone()));
    }
    let mut counts: BTreeMap<JobId, usize> = BTreeMap::new();
    for job in &instance.jobs {
        *counts.entry(job.id).or_default() += 1;
        if job.release >= job.deadline {
            errors.push(InstanceError::EmptyWindow {
                id: job.id,
                release: job.release,
                deadline: job.deadline,
            });
        }
        if job.heat.is_negative() {
            errors.push(InstanceError::NegativeHeat {
                id: job.id,
                heat: job.heat.clone(),
            });
        }
    }
    errors.extend(
        counts
            .into_iter()
            .filter(|&(_, count)| count > 1)
            .map(|(id, count)| InstanceError::DuplicateId { id, count }),
    );
    errors
}

/// Per-slot assignment; `None` is an idle slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schedule {
    pub slots: Vec<Option<JobId>>,
}

impl Schedule {
    pub fn idle(len: usize) -> Self {
        Schedule {
            slots: vec![None; len],
        }
    }

    pub fn from_ids(slots: &[Option<u32>]) -> Self {
        Schedule {
            slots: slots.iter().map(|s| s.map(JobId)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Slot of `id`, if it is scheduled.
    pub fn slot_of(&self, id: JobId) -> Option<Time> {
        self.slots
            .iter()
            .position(|s| *s == Some(id))
            .map(|p| p as Time)
    }

    pub fn scheduled_jobs(&self) -> impl Iterator<Item = (Time, JobId)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(u, s)| s.map(|id| (u as Time, id)))
    }

    /// Extends with idle slots up to `len`.
    pub fn padded(mut self, len: usize) -> Self {
        if self.slots.len() < len {
            self.slots.resize(len, None);
        }
        self
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Four-job example: 1→(0,2,0.4), 2→(0,4,0.6), 3→(2,3,1.9), 4→(4,6,0.8).
    pub fn four_job_example() -> Instance {
        Instance::with_default_config(vec![
            Job::new(1, 0, 2, Rational::frac(2, 5)),
            Job::new(2, 0, 4, Rational::frac(3, 5)),
            Job::new(3, 2, 3, Rational::frac(19, 10)),
            Job::new(4, 4, 6, Rational::frac(4, 5)),
        ])
    }
}
