//! Hardness reductions into the scheduling problem.
//!
//! Two constructions are provided, each with a generator, a canonical
//! schedule builder (certificate to full-throughput schedule), an extractor
//! (full-throughput schedule back to certificate) and a tiny brute-force
//! solver for the source problem:
//!
//! * [`three_partition`]: 3-Partition to instances with tight gadget jobs
//!   that cut time into `n` intervals of length `β`.
//! * [`n3dm`]: Numerical 3-Dimensional Matching to instances where every job
//!   is released at 0 and shares the deadline `4n + 1`.
//!
//! Generators emit a [`ReductionMeta`] next to the instance so extraction
//! never has to guess which source number a job came from.

use serde::{Deserialize, Serialize};

use crate::model::{JobId, Time};

pub mod n3dm;
pub mod three_partition;

pub use n3dm::{
    brute_n3dm, canonical_schedule_n3dm, extract_n3dm_matching, gen_from_n3dm, post_gadget_floor,
    post_gadget_temperatures, pre_gadget_temperatures, MatchingCertificate, N3dmInstance,
};
pub use three_partition::{
    brute_3partition, canonical_schedule_3partition, extract_3partition, gen_from_3partition,
    PartitionCertificate, ThreePartitionInstance,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("invalid source instance: {0}")]
    InvalidSource(String),
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("schedule completes {got} of {expected} jobs without violations")]
    NotFullThroughput { expected: usize, got: usize },
    #[error("schedule does not have the expected block structure: {0}")]
    UnexpectedLayout(String),
    #[error("source instance too large for brute force: {0}")]
    TooLarge(String),
    #[error("metadata does not describe a {0} reduction")]
    WrongMeta(&'static str),
}

/// What a generated job stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum JobRole {
    /// 3-Partition element `values[index]`.
    Element { index: usize, value: u64 },
    /// `A[index]`, `B[index]`, `C[index]` of a matching instance.
    A { index: usize, value: u64 },
    B { index: usize, value: u64 },
    C { index: usize, value: u64 },
    /// Time-structuring job; `index` 0 is the first (hottest) one.
    Gadget { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleEntry {
    pub job: JobId,
    #[serde(flatten)]
    pub role: JobRole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum ReductionSource {
    ThreePartition(ThreePartitionInstance),
    N3dm(N3dmInstance),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionMeta {
    pub source: ReductionSource,
    /// One entry per generated job, sorted by job id.
    pub roles: Vec<RoleEntry>,
    /// Slots reserved for gadget jobs in the canonical schedule.
    pub gadget_slots: Vec<Time>,
}

impl ReductionMeta {
    pub fn role_of(&self, job: JobId) -> Option<JobRole> {
        self.roles.iter().find(|e| e.job == job).map(|e| e.role)
    }

    pub fn job_with_role(&self, role: JobRole) -> Option<JobId> {
        self.roles.iter().find(|e| e.role == role).map(|e| e.job)
    }

    pub fn gadget_jobs(&self) -> impl Iterator<Item = (usize, JobId)> + '_ {
        self.roles.iter().filter_map(|e| match e.role {
            JobRole::Gadget { index } => Some((index, e.job)),
            _ => None,
        })
    }
}
