//! Canonical file formats.
//!
//! Instances, schedules, traces, runs and reports are JSON documents with
//! rationals written as lowest-terms strings (`"7/4"`, `"0"`). Output is
//! canonical: serializing a parsed document reproduces it byte for byte when
//! the input was canonical, and jobs are always sorted by id.
//!
//! Source instances for the reductions use a plain whitespace-separated
//! integer format. The first token names the problem, followed by `n` and
//! `β`, then the numbers; `#` starts a comment that runs to the end of the
//! line:
//!
//! ```text
//! # 3-Partition: 3n values
//! 3partition 2 9
//! 3 3 3 3 3 3
//!
//! # N3DM: n values each of A, then B, then C
//! n3dm 2 8
//! 0 6
//! 6 0
//! 2 2
//! ```

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::model::{Instance, Schedule};
use crate::reductions::{N3dmInstance, ReductionError, ThreePartitionInstance};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("source file: {0}")]
    Source(String),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable value");
    out.push('\n');
    out
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    from_json(text)
}

pub fn serialize_instance(instance: &Instance) -> String {
    to_canonical_json(instance)
}

pub fn parse_schedule(text: &str) -> Result<Schedule, IoError> {
    from_json(text)
}

/// Schedules are written on one line: `[1,null,3]`.
pub fn serialize_schedule(schedule: &Schedule) -> String {
    let mut out = serde_json::to_string(schedule).expect("serializable schedule");
    out.push('\n');
    out
}

fn source_tokens(text: &str) -> Vec<&str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .collect()
}

fn parse_numbers(tokens: &[&str]) -> Result<Vec<u64>, IoError> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| IoError::Source(format!("`{t}` is not a non-negative integer")))
        })
        .collect()
}

fn parse_header(
    text: &str,
    keyword: &str,
    per_n: usize,
) -> Result<(usize, u64, Vec<u64>), IoError> {
    let tokens = source_tokens(text);
    match tokens.first() {
        Some(&k) if k == keyword => {}
        other => {
            return Err(IoError::Source(format!(
                "expected header `{keyword} <n> <beta>`, found {other:?}"
            )))
        }
    }
    if tokens.len() < 3 {
        return Err(IoError::Source(format!("header needs `{keyword} <n> <beta>`")));
    }
    let head = parse_numbers(&tokens[1..3])?;
    let (n, beta) = (head[0] as usize, head[1]);
    let values = parse_numbers(&tokens[3..])?;
    if values.len() != per_n * n {
        return Err(IoError::Source(format!(
            "expected {} numbers for n = {n}, found {}",
            per_n * n,
            values.len()
        )));
    }
    Ok((n, beta, values))
}

pub fn parse_3partition_source(text: &str) -> Result<ThreePartitionInstance, IoError> {
    let (_, beta, values) = parse_header(text, "3partition", 3)?;
    let inst = ThreePartitionInstance { values, beta };
    inst.validate()?;
    Ok(inst)
}

pub fn parse_n3dm_source(text: &str) -> Result<N3dmInstance, IoError> {
    let (n, beta, values) = parse_header(text, "n3dm", 3)?;
    let inst = N3dmInstance {
        a: values[..n].to_vec(),
        b: values[n..2 * n].to_vec(),
        c: values[2 * n..].to_vec(),
        beta,
    };
    inst.validate()?;
    Ok(inst)
}

fn join(values: &[u64]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn format_3partition_source(src: &ThreePartitionInstance) -> String {
    format!("3partition {} {}\n{}\n", src.n(), src.beta, join(&src.values))
}

pub fn format_n3dm_source(src: &N3dmInstance) -> String {
    format!(
        "n3dm {} {}\n{}\n{}\n{}\n",
        src.n(),
        src.beta,
        join(&src.a),
        join(&src.b),
        join(&src.c)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::four_job_example;
    use crate::model::{Job, JobId, ThermalConfig};
    use crate::rational::Rational;
    use crate::thermal::simulate;

    const EXAMPLE: &str = r#"{
  "threshold": "1",
  "cooling_factor": "2",
  "jobs": [
    {
      "id": 1,
      "release": 0,
      "deadline": 2,
      "heat": "2/5"
    },
    {
      "id": 2,
      "release": 0,
      "deadline": 4,
      "heat": "3/5"
    },
    {
      "id": 3,
      "release": 2,
      "deadline": 3,
      "heat": "19/10"
    },
    {
      "id": 4,
      "release": 4,
      "deadline": 6,
      "heat": "4/5"
    }
  ]
}
"#;

    #[test]
    fn example_serializes_canonically() {
        assert_eq!(serialize_instance(&four_job_example()), EXAMPLE);
        assert_eq!(parse_instance(EXAMPLE).unwrap(), four_job_example());
    }

    #[test]
    fn decimals_accepted_and_canonicalized() {
        let text = r#"{"threshold": "1.0", "cooling_factor": "2",
            "jobs": [{"id": 4, "release": 4, "deadline": 6, "heat": "0.8"},
                     {"id": 3, "release": 2, "deadline": 3, "heat": "1.9"},
                     {"id": 2, "release": 0, "deadline": 4, "heat": "0.6"},
                     {"id": 1, "release": 0, "deadline": 2, "heat": "0.4"}]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst, four_job_example());
        assert_eq!(serialize_instance(&inst), EXAMPLE);
    }

    #[test]
    fn empty_instance_document() {
        let inst = Instance::new(vec![], ThermalConfig::default());
        let text = serialize_instance(&inst);
        assert_eq!(
            text,
            "{\n  \"threshold\": \"1\",\n  \"cooling_factor\": \"2\",\n  \"jobs\": []\n}\n"
        );
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn generator_heat_verbatim() {
        let inst = Instance::with_default_config(vec![Job::new(1, 1, 20, Rational::frac(7, 4))]);
        assert!(serialize_instance(&inst).contains("\"heat\": \"7/4\""));
    }

    #[test]
    fn parse_errors_carry_position() {
        let bad_heat = r#"{"threshold": "1", "cooling_factor": "2",
"jobs": [{"id": 1, "release": 0, "deadline": 2, "heat": "1/0"}]}"#;
        match parse_instance(bad_heat) {
            Err(IoError::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("zero denominator"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let unknown = r#"{"threshold": "1", "cooling_factor": "2", "jobs": [], "extra": 1}"#;
        match parse_instance(unknown) {
            Err(IoError::Parse { message, .. }) => assert!(message.contains("extra")),
            other => panic!("{other:?}"),
        }
        let job_field = r#"{"threshold": "1", "cooling_factor": "2",
"jobs": [{"id": 1, "release": 0, "deadline": 2, "heat": "1", "weight": 3}]}"#;
        assert!(parse_instance(job_field).is_err());
    }

    #[test]
    fn schedule_round_trip() {
        let s = Schedule::from_ids(&[Some(1), None, Some(3), Some(2), Some(4), None]);
        let text = serialize_schedule(&s);
        assert_eq!(text, "[1,null,3,2,4,null]\n");
        assert_eq!(parse_schedule(&text).unwrap(), s);
        assert!(parse_schedule("[1, \"x\"]").is_err());
    }

    #[test]
    fn trace_round_trip() {
        let inst = four_job_example();
        let trace = simulate(&inst, &Schedule::from_ids(&[Some(1), Some(2), Some(3)]));
        let text = to_canonical_json(&trace);
        assert!(text.contains("\"1/5\""));
        assert!(text.contains("\"kind\": \"thermal\""));
        let back: crate::thermal::SimulationTrace = from_json(&text).unwrap();
        assert_eq!(back, trace);
        assert!(back.completed.contains(&JobId(1)));
    }

    #[test]
    fn source_files() {
        let src = parse_3partition_source("# sample\n3partition 2 9\n3 3 3\n3 3 3 # tail\n").unwrap();
        assert_eq!(src.values, vec![3; 6]);
        assert_eq!(parse_3partition_source(&format_3partition_source(&src)).unwrap(), src);

        let m = parse_n3dm_source("n3dm 2 8\n0 6\n6 0\n2 2\n").unwrap();
        assert_eq!((m.a.clone(), m.b.clone(), m.c.clone()), (vec![0, 6], vec![6, 0], vec![2, 2]));
        assert_eq!(parse_n3dm_source(&format_n3dm_source(&m)).unwrap(), m);

        assert!(matches!(parse_3partition_source("3partition 2 9\n3 3 3"), Err(IoError::Source(_))));
        assert!(matches!(parse_3partition_source("n3dm 1 6\n1 2 3"), Err(IoError::Source(_))));
        assert!(matches!(
            parse_3partition_source("3partition 2 10\n3 3 3 3 3 3"),
            Err(IoError::Reduction(_))
        ));
        assert!(matches!(parse_n3dm_source("n3dm 1 6\n1 2 x"), Err(IoError::Source(_))));
    }
}
