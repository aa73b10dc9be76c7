//! Gantt charts as aligned text or SVG.
//!
//! Each row shows one schedule: the job (or `·` for idle) in every slot and
//! the exact temperature at every slot boundary, as a lowest-terms fraction
//! and a 4-significant-digit decimal. Boundaries at the threshold are marked
//! `T`, boundaries above it `!`, and slots with a violation carry a `!`
//! suffix. Output depends only on the inputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, JobId, Schedule, Time};
use crate::rational::Rational;
use crate::reductions::{JobRole, ReductionMeta};
use crate::thermal::simulate;

pub const IDLE_MARK: &str = "·";
pub const DECIMAL_DIGITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GanttFormat {
    Text,
    Svg,
}

/// Display names for jobs; unlisted jobs show their id.
pub type JobLabels = BTreeMap<JobId, String>;

/// Short names for generated jobs: `x1..` for elements, `A1`, `B1`, `C1`
/// for matching coordinates and `G0..` for gadgets.
pub fn role_labels(meta: &ReductionMeta) -> JobLabels {
    meta.roles
        .iter()
        .map(|e| {
            let label = match e.role {
                JobRole::Element { index, .. } => format!("x{}", index + 1),
                JobRole::A { index, .. } => format!("A{}", index + 1),
                JobRole::B { index, .. } => format!("B{}", index + 1),
                JobRole::C { index, .. } => format!("C{}", index + 1),
                JobRole::Gadget { index } => format!("G{index}"),
            };
            (e.job, label)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GanttRow {
    pub name: String,
    pub schedule: Schedule,
}

impl GanttRow {
    pub fn new(name: impl Into<String>, schedule: Schedule) -> Self {
        GanttRow {
            name: name.into(),
            schedule,
        }
    }
}

/// Everything drawn for one schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GanttRendering {
    pub name: String,
    pub lanes: Vec<Option<JobId>>,
    pub labels: Vec<String>,
    /// One more entry than `lanes`.
    pub temperatures: Vec<Rational>,
    pub threshold: Rational,
    pub violation_slots: BTreeSet<Time>,
    pub throughput: usize,
}

impl GanttRendering {
    pub fn build(instance: &Instance, row: &GanttRow, labels: Option<&JobLabels>) -> Self {
        let trace = simulate(instance, &row.schedule);
        let slots = trace.temperatures.len() - 1;
        let lanes: Vec<Option<JobId>> = (0..slots)
            .map(|u| row.schedule.slots.get(u).copied().flatten())
            .collect();
        let label_of = |id: JobId| {
            labels
                .and_then(|l| l.get(&id).cloned())
                .unwrap_or_else(|| id.to_string())
        };
        GanttRendering {
            name: row.name.clone(),
            labels: lanes
                .iter()
                .map(|s| s.map_or_else(|| IDLE_MARK.to_string(), label_of))
                .collect(),
            lanes,
            temperatures: trace.temperatures,
            threshold: instance.config.threshold.clone(),
            violation_slots: trace.violations.iter().map(|v| v.time).collect(),
            throughput: trace.throughput,
        }
    }

    fn slot_text(&self, u: usize) -> String {
        let mut s = self.labels[u].clone();
        if self.violation_slots.contains(&(u as Time)) {
            s.push('!');
        }
        s
    }

    fn boundary_mark(&self, k: usize) -> &'static str {
        match self.temperatures[k].cmp(&self.threshold) {
            std::cmp::Ordering::Less => "",
            std::cmp::Ordering::Equal => "T",
            std::cmp::Ordering::Greater => "!",
        }
    }
}

/// Renders one schedule, labelled by job id.
pub fn render_gantt(instance: &Instance, schedule: &Schedule, format: GanttFormat) -> String {
    render_gantt_rows(
        instance,
        &[GanttRow::new("schedule", schedule.clone())],
        None,
        format,
    )
}

/// Renders several schedules of one instance with a shared slot grid.
pub fn render_gantt_rows(
    instance: &Instance,
    rows: &[GanttRow],
    labels: Option<&JobLabels>,
    format: GanttFormat,
) -> String {
    let rendered: Vec<GanttRendering> = rows
        .iter()
        .map(|r| GanttRendering::build(instance, r, labels))
        .collect();
    match format {
        GanttFormat::Text => text(&rendered),
        GanttFormat::Svg => svg(&rendered),
    }
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pad_right(s: &str, w: usize) -> String {
    format!("{s}{}", " ".repeat(w.saturating_sub(width(s))))
}

fn center(s: &str, w: usize) -> String {
    let room = w.saturating_sub(width(s));
    let left = room / 2;
    format!("{}{s}{}", " ".repeat(left), " ".repeat(room - left))
}

const TEXT_MARGIN: usize = 8;

fn text(rows: &[GanttRendering]) -> String {
    // cell width shared by all rows
    let cell = rows
        .iter()
        .flat_map(|r| {
            let temps = r.temperatures.iter().flat_map(|t| {
                [width(&t.to_string()), width(&t.to_significant(DECIMAL_DIGITS))]
            });
            let slots = (0..r.labels.len()).map(|u| width(&r.slot_text(u)) + 2);
            temps.map(|w| w + 1).chain(slots).collect::<Vec<_>>()
        })
        .max()
        .unwrap_or(0)
        .max(5);
    let slots = rows.iter().map(|r| r.lanes.len()).max().unwrap_or(0);

    let boundary_line = |head: &str, cells: &dyn Fn(usize) -> String, count: usize| {
        let mut line = pad_right(head, TEXT_MARGIN);
        for k in 0..count {
            line.push_str(&pad_right(&cells(k), cell + 1));
        }
        line.trim_end().to_string()
    };

    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{}: throughput {}, threshold {}{}",
            r.name,
            r.throughput,
            r.threshold,
            if r.violation_slots.is_empty() {
                String::new()
            } else {
                format!(", {} violation(s)", r.violation_slots.len())
            }
        );
        let n = r.lanes.len();
        out.push_str(&boundary_line("time", &|k| k.to_string(), slots + 1));
        out.push('\n');
        let mut lane = pad_right("job", TEXT_MARGIN);
        lane.push('|');
        for u in 0..n {
            lane.push_str(&center(&r.slot_text(u), cell));
            lane.push('|');
        }
        out.push_str(&lane);
        out.push('\n');
        out.push_str(&boundary_line("temp", &|k| r.temperatures[k].to_string(), n + 1));
        out.push('\n');
        out.push_str(&boundary_line(
            "approx",
            &|k| r.temperatures[k].to_significant(DECIMAL_DIGITS),
            n + 1,
        ));
        out.push('\n');
        if (0..=n).any(|k| !r.boundary_mark(k).is_empty()) {
            out.push_str(&boundary_line("limit", &|k| r.boundary_mark(k).to_string(), n + 1));
            out.push('\n');
        }
    }
    out
}

const SVG_CELL: usize = 64;
const SVG_LEFT: usize = 96;
const SVG_ROW: usize = 150;
const SVG_PLOT: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg(rows: &[GanttRendering]) -> String {
    let slots = rows.iter().map(|r| r.lanes.len()).max().unwrap_or(0);
    let w = SVG_LEFT + slots * SVG_CELL + 48;
    let h = rows.len() * SVG_ROW + 16;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="monospace" font-size="11">"#
    );
    for (i, r) in rows.iter().enumerate() {
        let top = 16 + i * SVG_ROW;
        let plot_bottom = top as f64 + 12.0 + SVG_PLOT;
        let lane_y = top + 70;
        let x = |k: usize| SVG_LEFT + k * SVG_CELL;
        let scale = r
            .temperatures
            .iter()
            .chain(std::iter::once(&r.threshold))
            .max()
            .map(Rational::to_f64)
            .filter(|m| *m > 0.0)
            .unwrap_or(1.0);
        let y = |t: &Rational| plot_bottom - t.to_f64() / scale * SVG_PLOT;

        let _ = writeln!(out, r#"  <g class="row" id="row-{i}">"#);
        let _ = writeln!(
            out,
            r#"    <text x="4" y="{}" font-weight="bold">{}</text>"#,
            lane_y + 18,
            escape(&r.name)
        );
        let ty = y(&r.threshold);
        let _ = writeln!(
            out,
            r#"    <line class="threshold" x1="{}" y1="{ty:.2}" x2="{}" y2="{ty:.2}" stroke="red" stroke-dasharray="4 3"/>"#,
            x(0),
            x(r.lanes.len())
        );
        let _ = writeln!(
            out,
            r#"    <text x="4" y="{:.2}" fill="red">T = {}</text>"#,
            ty + 4.0,
            r.threshold
        );
        let points: Vec<String> = r
            .temperatures
            .iter()
            .enumerate()
            .map(|(k, t)| format!("{},{:.2}", x(k), y(t)))
            .collect();
        let _ = writeln!(
            out,
            r#"    <polyline class="temperature" points="{}" fill="none" stroke="black"/>"#,
            points.join(" ")
        );
        for u in 0..r.labels.len() {
            let violated = r.violation_slots.contains(&(u as Time));
            let (fill, stroke, dash) = match (r.lanes[u], violated) {
                (_, true) => ("#f4b6b6", "red", ""),
                (None, false) => ("white", "#999", r#" stroke-dasharray="3 3""#),
                (Some(_), false) => ("#cfe0f5", "black", ""),
            };
            let _ = writeln!(
                out,
                r#"    <rect class="slot" x="{}" y="{lane_y}" width="{SVG_CELL}" height="28" fill="{fill}" stroke="{stroke}"{dash}/>"#,
                x(u)
            );
            let _ = writeln!(
                out,
                r#"    <text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                x(u) + SVG_CELL / 2,
                lane_y + 18,
                escape(&r.slot_text(u))
            );
        }
        for (k, t) in r.temperatures.iter().enumerate() {
            let mark = r.boundary_mark(k);
            let color = if mark == "!" { "red" } else { "black" };
            let _ = writeln!(
                out,
                r#"    <text class="temp" x="{}" y="{}" text-anchor="middle" fill="{color}">{}</text>"#,
                x(k),
                lane_y + 44,
                escape(&t.to_string())
            );
            let _ = writeln!(
                out,
                r##"    <text class="approx" x="{}" y="{}" text-anchor="middle" fill="#555">{}</text>"##,
                x(k),
                lane_y + 58,
                t.to_significant(DECIMAL_DIGITS)
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}
