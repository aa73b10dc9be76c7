//! 3-Partition reduction.
//!
//! Element `a` becomes a job of heat `2 - 2^(1-a)` released at 1 with
//! deadline `n(β+1)`. Tight gadgets split time: one of heat 2 in slot 0 and
//! one of heat 1 in each slot `j(β+1)`, `1 ≤ j < n`. Starting from
//! temperature 1, an element job of value `a` needs `a - 1` idle slots first
//! and then lands at exactly 1 again, so each interval of `β` slots holds
//! elements summing to at most `β`.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{JobRole, ReductionError, ReductionMeta, ReductionSource, RoleEntry};
use crate::model::{Instance, Job, JobId, Schedule, Time};
use crate::rational::Rational;
use crate::thermal::simulate;

/// Largest element value accepted; heats carry denominators `2^(a-1)`.
pub const MAX_ELEMENT: u64 = 64;
pub const BRUTE_FORCE_MAX_ELEMENTS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreePartitionInstance {
    pub values: Vec<u64>,
    pub beta: u64,
}

impl ThreePartitionInstance {
    /// Computes `β = Σa / n` and checks every invariant.
    pub fn new(values: Vec<u64>) -> Result<Self, ReductionError> {
        if values.is_empty() || !values.len().is_multiple_of(3) {
            return Err(ReductionError::InvalidSource(format!(
                "need 3n values with n >= 1, got {}",
                values.len()
            )));
        }
        let n = (values.len() / 3) as u64;
        let sum: u64 = values.iter().sum();
        if !sum.is_multiple_of(n) {
            return Err(ReductionError::InvalidSource(format!(
                "sum {sum} is not divisible by n = {n}"
            )));
        }
        let inst = ThreePartitionInstance {
            values,
            beta: sum / n,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.values.len() / 3
    }

    pub fn validate(&self) -> Result<(), ReductionError> {
        let bad = |msg: String| Err(ReductionError::InvalidSource(msg));
        if self.values.is_empty() || !self.values.len().is_multiple_of(3) {
            return bad(format!("need 3n values with n >= 1, got {}", self.values.len()));
        }
        let n = self.n() as u64;
        let sum: u64 = self.values.iter().sum();
        if sum != n * self.beta {
            return bad(format!("sum {sum} != n·β = {}", n * self.beta));
        }
        for (i, &a) in self.values.iter().enumerate() {
            // β/4 < a < β/2
            if 4 * a <= self.beta || 2 * a >= self.beta {
                return bad(format!("value a[{i}] = {a} outside (β/4, β/2) for β = {}", self.beta));
            }
            if a > MAX_ELEMENT {
                return bad(format!("value a[{i}] = {a} exceeds cap {MAX_ELEMENT}"));
            }
        }
        Ok(())
    }

    /// Length of the scheduling horizon, `n(β+1)`.
    pub fn horizon(&self) -> Time {
        (self.n() as u64 * (self.beta + 1)) as Time
    }
}

/// `n` disjoint index triples covering all values, each summing to `β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub triples: Vec<[usize; 3]>,
}

impl PartitionCertificate {
    pub fn validate(&self, src: &ThreePartitionInstance) -> Result<(), ReductionError> {
        let bad = |msg: String| Err(ReductionError::InvalidCertificate(msg));
        if self.triples.len() != src.n() {
            return bad(format!("{} triples for n = {}", self.triples.len(), src.n()));
        }
        let mut used = vec![false; src.values.len()];
        for t in &self.triples {
            for &i in t {
                if i >= used.len() {
                    return bad(format!("index {i} out of range"));
                }
                if std::mem::replace(&mut used[i], true) {
                    return bad(format!("index {i} used twice"));
                }
            }
            let sum: u64 = t.iter().map(|&i| src.values[i]).sum();
            if sum != src.beta {
                return bad(format!("triple {t:?} sums to {sum}, not β = {}", src.beta));
            }
        }
        Ok(())
    }

    /// Sorted value triples; equal for certificates that differ only in
    /// triple order, order within triples, or swaps of equal values.
    pub fn value_multiset(&self, src: &ThreePartitionInstance) -> Vec<[u64; 3]> {
        let mut out: Vec<[u64; 3]> = self
            .triples
            .iter()
            .map(|t| {
                let mut v = t.map(|i| src.values[i]);
                v.sort_unstable();
                v
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// `2 - 2^(1-a)`.
pub fn element_heat(a: u64) -> Rational {
    Rational::integer(2) - Rational::pow2(1 - a as i64)
}

pub fn gen_from_3partition(
    src: &ThreePartitionInstance,
) -> Result<(Instance, ReductionMeta), ReductionError> {
    src.validate()?;
    let n = src.n();
    let period = (src.beta + 1) as Time;
    let deadline = src.horizon();
    let mut jobs = Vec::with_capacity(4 * n);
    let mut roles = Vec::with_capacity(4 * n);

    for (index, &value) in src.values.iter().enumerate() {
        let id = index as u32 + 1;
        jobs.push(Job::new(id, 1, deadline, element_heat(value)));
        roles.push(RoleEntry {
            job: JobId(id),
            role: JobRole::Element { index, value },
        });
    }
    let mut gadget_slots = Vec::with_capacity(n);
    for index in 0..n {
        let id = (3 * n + index) as u32 + 1;
        let release = index as Time * period;
        let heat = if index == 0 {
            Rational::integer(2)
        } else {
            Rational::one()
        };
        jobs.push(Job::new(id, release, release + 1, heat));
        roles.push(RoleEntry {
            job: JobId(id),
            role: JobRole::Gadget { index },
        });
        gadget_slots.push(release);
    }

    let meta = ReductionMeta {
        source: ReductionSource::ThreePartition(src.clone()),
        roles,
        gadget_slots,
    };
    Ok((Instance::with_default_config(jobs), meta))
}

fn element_job(meta: &ReductionMeta, index: usize, value: u64) -> Result<JobId, ReductionError> {
    meta.job_with_role(JobRole::Element { index, value })
        .ok_or(ReductionError::WrongMeta("3-partition"))
}

/// Gadgets at their release times; triple `i` fills interval `i`, each
/// element `a` preceded by `a - 1` idle slots.
pub fn canonical_schedule_3partition(
    src: &ThreePartitionInstance,
    meta: &ReductionMeta,
    cert: &PartitionCertificate,
) -> Result<Schedule, ReductionError> {
    src.validate()?;
    cert.validate(src)?;
    let period = (src.beta + 1) as usize;
    let mut slots = vec![None; src.horizon() as usize];
    for (index, job) in meta.gadget_jobs() {
        slots[index * period] = Some(job);
    }
    for (interval, triple) in cert.triples.iter().enumerate() {
        let mut pos = interval * period + 1;
        for &i in triple {
            let a = src.values[i];
            pos += (a - 1) as usize;
            slots[pos] = Some(element_job(meta, i, a)?);
            pos += 1;
        }
    }
    Ok(Schedule { slots })
}

/// Reads the partition off a full-throughput schedule: element jobs are
/// grouped by the gadget-delimited interval they run in.
pub fn extract_3partition(
    meta: &ReductionMeta,
    schedule: &Schedule,
) -> Result<PartitionCertificate, ReductionError> {
    let ReductionSource::ThreePartition(src) = &meta.source else {
        return Err(ReductionError::WrongMeta("3-partition"));
    };
    let (instance, _) = gen_from_3partition(src)?;
    let trace = simulate(&instance, schedule);
    let expected = instance.len();
    if !trace.violations.is_empty() || trace.throughput != expected {
        return Err(ReductionError::NotFullThroughput {
            expected,
            got: trace.throughput,
        });
    }

    let period = (src.beta + 1) as usize;
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); src.n()];
    for entry in &meta.roles {
        if let JobRole::Element { index, .. } = entry.role {
            let slot = schedule.slot_of(entry.job).expect("completed job is scheduled") as usize;
            groups[slot / period].push((slot, index));
        }
    }
    let triples = groups
        .into_iter()
        .enumerate()
        .map(|(interval, mut g)| {
            g.sort_unstable();
            <[usize; 3]>::try_from(g.iter().map(|&(_, i)| i).collect::<Vec<_>>()).map_err(|v| {
                ReductionError::UnexpectedLayout(format!(
                    "interval {interval} holds {} element jobs",
                    v.len()
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cert = PartitionCertificate { triples };
    cert.validate(src)
        .map_err(|e| ReductionError::UnexpectedLayout(e.to_string()))?;
    Ok(cert)
}

/// Exhaustive search for a 3-partition; `None` if there is none.
pub fn brute_3partition(
    src: &ThreePartitionInstance,
) -> Result<Option<PartitionCertificate>, ReductionError> {
    src.validate()?;
    if src.values.len() > BRUTE_FORCE_MAX_ELEMENTS {
        return Err(ReductionError::TooLarge(format!(
            "{} values (limit {BRUTE_FORCE_MAX_ELEMENTS})",
            src.values.len()
        )));
    }

    fn search(
        values: &[u64],
        beta: u64,
        used: &mut [bool],
        triples: &mut Vec<[usize; 3]>,
    ) -> bool {
        let Some(first) = used.iter().position(|u| !u) else {
            return true;
        };
        used[first] = true;
        let rest: Vec<usize> = (first + 1..values.len()).filter(|&i| !used[i]).collect();
        for pair in rest.iter().copied().combinations(2) {
            let (j, k) = (pair[0], pair[1]);
            if values[first] + values[j] + values[k] != beta {
                continue;
            }
            used[j] = true;
            used[k] = true;
            triples.push([first, j, k]);
            if search(values, beta, used, triples) {
                return true;
            }
            triples.pop();
            used[j] = false;
            used[k] = false;
        }
        used[first] = false;
        false
    }

    let mut used = vec![false; src.values.len()];
    let mut triples = Vec::new();
    Ok(search(&src.values, src.beta, &mut used, &mut triples)
        .then_some(PartitionCertificate { triples }))
}
