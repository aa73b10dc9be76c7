//! Numerical 3-Dimensional Matching reduction.
//!
//! With `f(x) = (1 + x/(8β)) / 25`, every `a ∈ A` becomes a job of heat
//! `8f(a)`, every `b ∈ B` one of heat `4f(b)` and every `c ∈ C` one of heat
//! `2f(c)`. Gadgets are one job of heat 2 and `n` jobs of heat `7/4`. All
//! `4n + 1` jobs are released at 0 with deadline `4n + 1`, so a full schedule
//! has no idle slot at all.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{JobRole, ReductionError, ReductionMeta, ReductionSource, RoleEntry};
use crate::model::{Instance, Job, JobId, Schedule, Time};
use crate::rational::Rational;
use crate::thermal::{simulate, SimulationTrace};

pub const BRUTE_FORCE_MAX_N: usize = 6;

/// Lower bound on the temperature right after any gadget job in a
/// full-throughput schedule.
pub fn post_gadget_floor() -> Rational {
    Rational::frac(364, 375)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct N3dmInstance {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    pub beta: u64,
}

impl N3dmInstance {
    pub fn new(a: Vec<u64>, b: Vec<u64>, c: Vec<u64>, beta: u64) -> Result<Self, ReductionError> {
        let inst = N3dmInstance { a, b, c, beta };
        inst.validate()?;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        let bad = |msg: String| Err(ReductionError::InvalidSource(msg));
        let n = self.a.len();
        if n == 0 || self.b.len() != n || self.c.len() != n {
            return bad(format!(
                "A, B, C must have the same positive size, got {}, {}, {}",
                n,
                self.b.len(),
                self.c.len()
            ));
        }
        if self.beta == 0 {
            return bad("β must be positive".to_string());
        }
        if let Some(x) = self.all().find(|&x| x > self.beta) {
            return bad(format!("value {x} exceeds β = {}", self.beta));
        }
        let sum: u64 = self.all().sum();
        if sum != self.beta * n as u64 {
            return bad(format!("values sum to {sum}, not β·n = {}", self.beta * n as u64));
        }
        Ok(())
    }

    fn all(&self) -> impl Iterator<Item = u64> + '_ {
        self.a.iter().chain(&self.b).chain(&self.c).copied()
    }

    pub fn horizon(&self) -> Time {
        (4 * self.n() + 1) as Time
    }

    /// `scale · f(x) = scale · (8β + x) / (200β)`.
    fn heat(&self, scale: i64, x: u64) -> Rational {
        let beta = self.beta as i64;
        Rational::frac(scale * (8 * beta + x as i64), 200 * beta)
    }

    pub fn a_heat(&self, a: u64) -> Rational {
        self.heat(8, a)
    }

    pub fn b_heat(&self, b: u64) -> Rational {
        self.heat(4, b)
    }

    pub fn c_heat(&self, c: u64) -> Rational {
        self.heat(2, c)
    }
}

/// Index triples `(i, j, k)` meaning `A[i] + B[j] + C[k] = β`; every index
/// of each set used exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchingCertificate {
    pub triples: Vec<[usize; 3]>,
}

impl MatchingCertificate {
    pub fn validate(&self, src: &N3dmInstance) -> Result<(), ReductionError> {
        let bad = |msg: String| Err(ReductionError::InvalidCertificate(msg));
        let n = src.n();
        if self.triples.len() != n {
            return bad(format!("{} triples for n = {n}", self.triples.len()));
        }
        let mut used = [vec![false; n], vec![false; n], vec![false; n]];
        for t in &self.triples {
            for (set, &i) in t.iter().enumerate() {
                if i >= n {
                    return bad(format!("index {i} out of range"));
                }
                if std::mem::replace(&mut used[set][i], true) {
                    return bad(format!("index {i} of set {} used twice", ["A", "B", "C"][set]));
                }
            }
            let sum = src.a[t[0]] + src.b[t[1]] + src.c[t[2]];
            if sum != src.beta {
                return bad(format!("triple {t:?} sums to {sum}, not β = {}", src.beta));
            }
        }
        Ok(())
    }

    /// Triples in a canonical order, for comparisons up to block order.
    pub fn sorted(&self) -> Vec<[usize; 3]> {
        let mut t = self.triples.clone();
        t.sort_unstable();
        t
    }
}

pub fn gen_from_n3dm(src: &N3dmInstance) -> Result<(Instance, ReductionMeta), ReductionError> {
    src.validate()?;
    let n = src.n();
    let deadline = src.horizon();
    let mut jobs = Vec::with_capacity(4 * n + 1);
    let mut roles = Vec::with_capacity(4 * n + 1);
    let mut push = |jobs: &mut Vec<Job>, heat: Rational, role: JobRole| {
        let id = jobs.len() as u32 + 1;
        jobs.push(Job::new(id, 0, deadline, heat));
        roles.push(RoleEntry {
            job: JobId(id),
            role,
        });
    };
    for (index, &value) in src.a.iter().enumerate() {
        push(&mut jobs, src.a_heat(value), JobRole::A { index, value });
    }
    for (index, &value) in src.b.iter().enumerate() {
        push(&mut jobs, src.b_heat(value), JobRole::B { index, value });
    }
    for (index, &value) in src.c.iter().enumerate() {
        push(&mut jobs, src.c_heat(value), JobRole::C { index, value });
    }
    push(&mut jobs, Rational::integer(2), JobRole::Gadget { index: 0 });
    for index in 1..=n {
        push(&mut jobs, Rational::frac(7, 4), JobRole::Gadget { index });
    }

    let meta = ReductionMeta {
        source: ReductionSource::N3dm(src.clone()),
        roles,
        gadget_slots: (0..=n).map(|i| (4 * i) as Time).collect(),
    };
    Ok((Instance::with_default_config(jobs), meta))
}

fn role_job(meta: &ReductionMeta, role: JobRole) -> Result<JobId, ReductionError> {
    meta.job_with_role(role).ok_or(ReductionError::WrongMeta("n3dm"))
}

/// Heat-2 gadget at slot 0, heat-7/4 gadgets at slots `4i`, and block `i`
/// (slots `4i+1..4i+3`) running the `i`-th triple in the order A, B, C.
pub fn canonical_schedule_n3dm(
    src: &N3dmInstance,
    meta: &ReductionMeta,
    cert: &MatchingCertificate,
) -> Result<Schedule, ReductionError> {
    src.validate()?;
    cert.validate(src)?;
    let mut slots = vec![None; src.horizon() as usize];
    for (index, job) in meta.gadget_jobs() {
        slots[4 * index] = Some(job);
    }
    for (block, &[i, j, k]) in cert.triples.iter().enumerate() {
        let base = 4 * block + 1;
        slots[base] = Some(role_job(meta, JobRole::A { index: i, value: src.a[i] })?);
        slots[base + 1] = Some(role_job(meta, JobRole::B { index: j, value: src.b[j] })?);
        slots[base + 2] = Some(role_job(meta, JobRole::C { index: k, value: src.c[k] })?);
    }
    Ok(Schedule { slots })
}

/// Reads the `(A, B, C)` triple of every block off a full-throughput
/// schedule.
pub fn extract_n3dm_matching(
    meta: &ReductionMeta,
    schedule: &Schedule,
) -> Result<MatchingCertificate, ReductionError> {
    let ReductionSource::N3dm(src) = &meta.source else {
        return Err(ReductionError::WrongMeta("n3dm"));
    };
    let (instance, _) = gen_from_n3dm(src)?;
    let trace = simulate(&instance, schedule);
    let expected = instance.len();
    if !trace.violations.is_empty() || trace.throughput != expected {
        return Err(ReductionError::NotFullThroughput {
            expected,
            got: trace.throughput,
        });
    }

    let role_at = |slot: usize| -> Option<JobRole> {
        schedule.slots.get(slot).copied().flatten().and_then(|id| meta.role_of(id))
    };
    let mut triples = Vec::with_capacity(src.n());
    for block in 0..src.n() {
        let base = 4 * block + 1;
        match (role_at(base), role_at(base + 1), role_at(base + 2)) {
            (
                Some(JobRole::A { index: i, .. }),
                Some(JobRole::B { index: j, .. }),
                Some(JobRole::C { index: k, .. }),
            ) => triples.push([i, j, k]),
            other => {
                return Err(ReductionError::UnexpectedLayout(format!(
                    "block {block} holds {other:?}"
                )))
            }
        }
    }
    let cert = MatchingCertificate { triples };
    cert.validate(src)
        .map_err(|e| ReductionError::UnexpectedLayout(e.to_string()))?;
    Ok(cert)
}

/// Temperatures right after each gadget slot of `meta`.
pub fn post_gadget_temperatures(meta: &ReductionMeta, trace: &SimulationTrace) -> Vec<Rational> {
    meta.gadget_slots
        .iter()
        .filter_map(|&s| trace.temperatures.get(s as usize + 1).cloned())
        .collect()
}

/// Temperatures right before each heat-7/4 gadget slot.
pub fn pre_gadget_temperatures(meta: &ReductionMeta, trace: &SimulationTrace) -> Vec<Rational> {
    meta.gadget_slots
        .iter()
        .skip(1)
        .filter_map(|&s| trace.temperatures.get(s as usize).cloned())
        .collect()
}

/// Exhaustive search over all pairs of permutations of `B` and `C`.
pub fn brute_n3dm(src: &N3dmInstance) -> Result<Option<MatchingCertificate>, ReductionError> {
    src.validate()?;
    let n = src.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(ReductionError::TooLarge(format!(
            "n = {n} (limit {BRUTE_FORCE_MAX_N})"
        )));
    }
    for pb in (0..n).permutations(n) {
        for pc in (0..n).permutations(n) {
            if (0..n).all(|i| src.a[i] + src.b[pb[i]] + src.c[pc[i]] == src.beta) {
                let triples = (0..n).map(|i| [i, pb[i], pc[i]]).collect();
                return Ok(Some(MatchingCertificate { triples }));
            }
        }
    }
    Ok(None)
}
