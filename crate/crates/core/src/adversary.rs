//! The two-branch adversary that holds every deterministic online policy to
//! half of the optimum.
//!
//! Job 1 = (0, 3, 6/5) is released first. If the policy runs it at time 0,
//! the tight job 2 = (1, 2, 8/5) follows: the policy is at 3/5 and cannot run
//! it, while the adversary idles, runs job 2 and then job 1. Otherwise the
//! tight job 3 = (2, 3, 8/5) is released at time 2 and the adversary runs job
//! 1, idles, and runs job 3; the policy cannot fit both.

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Job, JobId, Schedule, ThermalConfig, Time};
use crate::online::{
    run_online, DecisionContext, OnlinePolicy, OnlineRun, PolicyDecision, PolicyViolation,
};
use crate::rational::Rational;
use crate::thermal::{is_admissible, simulate, SimulationTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// The policy ran job 1 at time 0; job 2 is released at time 1.
    RanFirstJob,
    /// The policy did not; job 3 is released at time 2.
    HeldFirstJob,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reveal {
    pub time: Time,
    pub job: Job,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryTranscript {
    pub branch: Branch,
    /// Jobs in the order the adversary released them.
    pub reveals: Vec<Reveal>,
    pub instance: Instance,
    pub algorithm: OnlineRun,
    pub adversary_schedule: Schedule,
    pub adversary_trace: SimulationTrace,
    pub alg_throughput: usize,
    pub adv_throughput: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdversaryError {
    #[error(transparent)]
    Policy(#[from] PolicyViolation),
    #[error("policy decided {probe:?} at time 0 when probed but {replay:?} on replay")]
    Nondeterministic {
        probe: PolicyDecision,
        replay: PolicyDecision,
    },
}

pub fn first_job() -> Job {
    Job::new(1, 0, 3, Rational::frac(6, 5))
}

pub fn branch_job(branch: Branch) -> Job {
    match branch {
        Branch::RanFirstJob => Job::new(2, 1, 2, Rational::frac(8, 5)),
        Branch::HeldFirstJob => Job::new(3, 2, 3, Rational::frac(8, 5)),
    }
}

/// The final revealed instance of a branch.
pub fn branch_instance(branch: Branch) -> Instance {
    Instance::with_default_config(vec![first_job(), branch_job(branch)])
}

/// The adversary's own schedule in a branch.
pub fn adversary_schedule(branch: Branch) -> Schedule {
    match branch {
        Branch::RanFirstJob => Schedule::from_ids(&[None, Some(2), Some(1)]),
        Branch::HeldFirstJob => Schedule::from_ids(&[Some(1), None, Some(3)]),
    }
}

/// Plays the game against `policy`.
pub fn run_lower_bound_game<P: OnlinePolicy + ?Sized>(
    policy: &P,
) -> Result<AdversaryTranscript, AdversaryError> {
    let config = ThermalConfig::default();
    let job1 = first_job();
    let tau = Rational::zero();
    let pending = [job1.clone()];
    let probe = policy.decide(&DecisionContext {
        time: 0,
        temperature: &tau,
        pending: &pending,
        history: &[],
        config: &config,
    });
    let branch = match probe {
        PolicyDecision::Execute(id) if id == job1.id => {
            debug_assert!(is_admissible(&tau, &job1, &config));
            Branch::RanFirstJob
        }
        PolicyDecision::Execute(id) => {
            return Err(PolicyViolation::NotPending { time: 0, job: id }.into())
        }
        PolicyDecision::StayIdle => Branch::HeldFirstJob,
    };

    let extra = branch_job(branch);
    let instance = branch_instance(branch);
    let algorithm = run_online(&instance, policy)?;
    let replay = algorithm.decisions[0].decision;
    if replay != probe {
        return Err(AdversaryError::Nondeterministic { probe, replay });
    }

    let adversary_schedule = adversary_schedule(branch);
    let adversary_trace = simulate(&instance, &adversary_schedule);
    Ok(AdversaryTranscript {
        branch,
        reveals: vec![
            Reveal {
                time: 0,
                job: job1,
            },
            Reveal {
                time: extra.release,
                job: extra,
            },
        ],
        alg_throughput: algorithm.trace.throughput,
        adv_throughput: adversary_trace.throughput,
        instance,
        algorithm,
        adversary_schedule,
        adversary_trace,
    })
}

/// A policy that, at slot `u`, tries `choices[u]` (`0` = idle, `k` = job `k`)
/// and idles if that job is not pending and admissible. Over the three slots
/// of the game these 64 behaviors cover every deterministic policy, since
/// the revealed jobs are a function of the choice at slot 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScriptedPolicy {
    pub choices: [u32; 3],
}

impl ScriptedPolicy {
    pub fn all() -> impl Iterator<Item = ScriptedPolicy> {
        (0..64u32).map(|code| ScriptedPolicy {
            choices: [code % 4, (code / 4) % 4, code / 16],
        })
    }
}

impl OnlinePolicy for ScriptedPolicy {
    fn decide(&self, ctx: &DecisionContext<'_>) -> PolicyDecision {
        let want = self.choices.get(ctx.time as usize).copied().unwrap_or(0);
        if want == 0 {
            return PolicyDecision::StayIdle;
        }
        ctx.admissible()
            .find(|j| j.id == JobId(want))
            .map_or(PolicyDecision::StayIdle, |j| PolicyDecision::Execute(j.id))
    }

    fn name(&self) -> String {
        format!("scripted{:?}", self.choices)
    }
}
