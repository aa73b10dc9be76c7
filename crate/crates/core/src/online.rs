//! Online execution harness and reasonable policies.
//!
//! A policy only ever sees the jobs released so far: [`run_online`] builds
//! the pending set from released, unexpired, unscheduled jobs and hands the
//! policy a [`DecisionContext`]. Anything it returns is checked against that
//! pending set and the thermal threshold before it is applied.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Job, JobId, Schedule, ThermalConfig, Time};
use crate::rational::Rational;
use crate::thermal::{is_admissible, simulate, step_temperature, SimulationTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyDecision {
    Execute(JobId),
    StayIdle,
}

impl PolicyDecision {
    pub fn job(self) -> Option<JobId> {
        match self {
            PolicyDecision::Execute(id) => Some(id),
            PolicyDecision::StayIdle => None,
        }
    }
}

/// What a policy may look at when deciding slot `time`.
#[derive(Debug, Clone, Copy)]
pub struct DecisionContext<'a> {
    pub time: Time,
    pub temperature: &'a Rational,
    /// Released, unexpired, unscheduled jobs, sorted by id.
    pub pending: &'a [Job],
    /// Decisions for slots `0..time`.
    pub history: &'a [PolicyDecision],
    pub config: &'a ThermalConfig,
}

impl<'a> DecisionContext<'a> {
    pub fn admissible(&self) -> impl Iterator<Item = &'a Job> + 'a {
        let tau = self.temperature;
        let config = self.config;
        self.pending
            .iter()
            .filter(move |j| is_admissible(tau, j, config))
    }
}

/// A deterministic online policy.
pub trait OnlinePolicy {
    fn decide(&self, ctx: &DecisionContext<'_>) -> PolicyDecision;

    fn name(&self) -> String {
        "custom".to_string()
    }
}

impl<F> OnlinePolicy for F
where
    F: Fn(&DecisionContext<'_>) -> PolicyDecision,
{
    fn decide(&self, ctx: &DecisionContext<'_>) -> PolicyDecision {
        self(ctx)
    }
}

fn coolest_key(a: &Job, b: &Job) -> Ordering {
    a.heat
        .cmp(&b.heat)
        .then(a.deadline.cmp(&b.deadline))
        .then(a.id.cmp(&b.id))
}

fn edf_key(a: &Job, b: &Job) -> Ordering {
    a.deadline
        .cmp(&b.deadline)
        .then_with(|| a.heat.cmp(&b.heat))
        .then(a.id.cmp(&b.id))
}

fn pick_min(
    tau: &Rational,
    pending: &[Job],
    config: &ThermalConfig,
    key: fn(&Job, &Job) -> Ordering,
) -> PolicyDecision {
    pending
        .iter()
        .filter(|j| is_admissible(tau, j, config))
        .min_by(|a, b| key(a, b))
        .map_or(PolicyDecision::StayIdle, |j| PolicyDecision::Execute(j.id))
}

/// Coolest admissible job; ties by earlier deadline, then smaller id.
pub fn coolest_first_decide(
    _time: Time,
    tau: &Rational,
    pending: &[Job],
    config: &ThermalConfig,
) -> PolicyDecision {
    pick_min(tau, pending, config, coolest_key)
}

/// Earliest-deadline admissible job; ties by lower heat, then smaller id.
pub fn edf_decide(
    _time: Time,
    tau: &Rational,
    pending: &[Job],
    config: &ThermalConfig,
) -> PolicyDecision {
    pick_min(tau, pending, config, edf_key)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CoolestFirst;

impl OnlinePolicy for CoolestFirst {
    fn decide(&self, ctx: &DecisionContext<'_>) -> PolicyDecision {
        coolest_first_decide(ctx.time, ctx.temperature, ctx.pending, ctx.config)
    }

    fn name(&self) -> String {
        "coolest".to_string()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EarliestDeadlineFirst;

impl OnlinePolicy for EarliestDeadlineFirst {
    fn decide(&self, ctx: &DecisionContext<'_>) -> PolicyDecision {
        edf_decide(ctx.time, ctx.temperature, ctx.pending, ctx.config)
    }

    fn name(&self) -> String {
        "edf".to_string()
    }
}

/// Never runs anything. Not reasonable; used as a baseline and in the
/// lower-bound game.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysIdle;

impl OnlinePolicy for AlwaysIdle {
    fn decide(&self, _ctx: &DecisionContext<'_>) -> PolicyDecision {
        PolicyDecision::StayIdle
    }

    fn name(&self) -> String {
        "idle".to_string()
    }
}

/// Built-in policies selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinPolicy {
    Coolest,
    Edf,
    Idle,
}

impl BuiltinPolicy {
    pub const ALL: [BuiltinPolicy; 3] = [BuiltinPolicy::Coolest, BuiltinPolicy::Edf, BuiltinPolicy::Idle];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "coolest" | "coolest-first" | "cf" => Some(BuiltinPolicy::Coolest),
            "edf" | "earliest-deadline-first" => Some(BuiltinPolicy::Edf),
            "idle" | "always-idle" => Some(BuiltinPolicy::Idle),
            _ => None,
        }
    }
}

impl OnlinePolicy for BuiltinPolicy {
    fn decide(&self, ctx: &DecisionContext<'_>) -> PolicyDecision {
        match self {
            BuiltinPolicy::Coolest => CoolestFirst.decide(ctx),
            BuiltinPolicy::Edf => EarliestDeadlineFirst.decide(ctx),
            BuiltinPolicy::Idle => AlwaysIdle.decide(ctx),
        }
    }

    fn name(&self) -> String {
        match self {
            BuiltinPolicy::Coolest => CoolestFirst.name(),
            BuiltinPolicy::Edf => EarliestDeadlineFirst.name(),
            BuiltinPolicy::Idle => AlwaysIdle.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub time: Time,
    pub temperature: Rational,
    pub pending: Vec<Job>,
    pub decision: PolicyDecision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnlineRun {
    pub policy: String,
    pub config: ThermalConfig,
    pub schedule: Schedule,
    pub trace: SimulationTrace,
    pub decisions: Vec<DecisionRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyViolation {
    #[error("time {time}: job {job} is not pending")]
    NotPending { time: Time, job: JobId },
    #[error("time {time}: job {job} is not admissible")]
    Inadmissible { time: Time, job: JobId },
}

/// Runs `policy` over `0..horizon`, revealing jobs at their release times.
pub fn run_online<P: OnlinePolicy + ?Sized>(
    instance: &Instance,
    policy: &P,
) -> Result<OnlineRun, PolicyViolation> {
    let config = &instance.config;
    let horizon = instance.horizon();
    let mut tau = Rational::zero();
    let mut scheduled = vec![false; instance.jobs.len()];
    let mut history = Vec::with_capacity(horizon as usize);
    let mut decisions = Vec::with_capacity(horizon as usize);
    let mut slots = Vec::with_capacity(horizon as usize);

    for time in 0..horizon {
        let pending: Vec<Job> = instance
            .jobs
            .iter()
            .zip(&scheduled)
            .filter(|(j, done)| !**done && j.is_live_at(time))
            .map(|(j, _)| j.clone())
            .collect();
        let ctx = DecisionContext {
            time,
            temperature: &tau,
            pending: &pending,
            history: &history,
            config,
        };
        let decision = policy.decide(&ctx);
        let heat = match decision {
            PolicyDecision::StayIdle => Rational::zero(),
            PolicyDecision::Execute(id) => {
                let job = pending
                    .iter()
                    .find(|j| j.id == id)
                    .ok_or(PolicyViolation::NotPending { time, job: id })?;
                if !is_admissible(&tau, job, config) {
                    return Err(PolicyViolation::Inadmissible { time, job: id });
                }
                let idx = instance
                    .jobs
                    .iter()
                    .position(|j| j.id == id)
                    .expect("pending job belongs to the instance");
                scheduled[idx] = true;
                job.heat.clone()
            }
        };
        decisions.push(DecisionRecord {
            time,
            temperature: tau.clone(),
            pending,
            decision,
        });
        history.push(decision);
        slots.push(decision.job());
        tau = step_temperature(&tau, &heat, config);
    }

    let schedule = Schedule { slots };
    let trace = simulate(instance, &schedule);
    debug_assert!(trace.violations.is_empty());
    Ok(OnlineRun {
        policy: policy.name(),
        config: config.clone(),
        schedule,
        trace,
        decisions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReasonablenessViolation {
    /// Idled while `admissible` could run.
    #[error("time {time}: idle while job {admissible} was admissible")]
    NonWaiting { time: Time, admissible: JobId },
    /// Ran `executed` although pending `dominator` strictly dominates it.
    #[error("time {time}: ran job {executed}, strictly dominated by job {dominator}")]
    Dominated {
        time: Time,
        executed: JobId,
        dominator: JobId,
    },
}

/// Checks the recorded run slot by slot for the two reasonableness
/// conditions: never idle when something is admissible, and never run a job
/// strictly dominated by another pending job.
pub fn check_reasonable(run: &OnlineRun) -> Vec<ReasonablenessViolation> {
    let mut out = Vec::new();
    for rec in &run.decisions {
        match rec.decision {
            PolicyDecision::StayIdle => {
                if let Some(job) = rec
                    .pending
                    .iter()
                    .find(|j| is_admissible(&rec.temperature, j, &run.config))
                {
                    out.push(ReasonablenessViolation::NonWaiting {
                        time: rec.time,
                        admissible: job.id,
                    });
                }
            }
            PolicyDecision::Execute(id) => {
                let Some(executed) = rec.pending.iter().find(|j| j.id == id) else {
                    continue;
                };
                if let Some(dom) = rec
                    .pending
                    .iter()
                    .find(|j| j.id != id && j.strictly_dominates(executed))
                {
                    out.push(ReasonablenessViolation::Dominated {
                        time: rec.time,
                        executed: id,
                        dominator: dom.id,
                    });
                }
            }
        }
    }
    out
}
