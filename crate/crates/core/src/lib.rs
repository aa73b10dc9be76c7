//! Temperature-aware scheduling of unit-length jobs.
//!
//! Each job has a release time, a deadline and a heat contribution. Running a
//! job at temperature `t` moves the processor to `(t + h) / R` (idle slots use
//! `h = 0`), and the temperature may never exceed the threshold `T`. The goal
//! is to complete as many jobs as possible within their windows.
//!
//! The crate provides exact simulation ([`thermal`]), online policies and a
//! reasonableness checker ([`online`]), an exact offline solver ([`solver`]),
//! hardness-reduction constructions ([`reductions`]), the deterministic
//! lower-bound adversary and randomized ratio experiments ([`adversary`],
//! [`experiment`]), and file formats plus Gantt rendering ([`io`],
//! [`render`]). All arithmetic is exact.

pub mod adversary;
pub mod experiment;
pub mod io;
pub mod model;
pub mod online;
pub mod rational;
pub mod reductions;
pub mod render;
pub mod solver;
pub mod thermal;

pub use model::{validate_instance, Instance, InstanceError, Job, JobId, Schedule, ThermalConfig, Time};
pub use online::{
    check_reasonable, coolest_first_decide, edf_decide, run_online, AlwaysIdle, BuiltinPolicy,
    CoolestFirst, DecisionContext, EarliestDeadlineFirst, OnlinePolicy, OnlineRun, PolicyDecision,
    PolicyViolation, ReasonablenessViolation,
};
pub use rational::Rational;
pub use solver::{enumerate_optimal_bruteforce, solve_optimal, OptResult, SolveError, SolveOptions};
pub use thermal::{is_admissible, simulate, step_temperature, throughput, SimulationTrace, Violation, ViolationKind};
