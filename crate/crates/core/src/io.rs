//! System descriptions, scenarios and schedule traces as versioned JSON
//! documents.
//!
//! System documents are parsed strictly: unknown keys are rejected, and a
//! document only becomes a system after every structural invariant checks
//! out. Traces are serialized as JSON lines: a header record carrying the
//! processor count and a phase label, one record per slice
//! (`{"t0":..,"t1":..,"cpu":..,"job":..}`) and one per event
//! (`{"t":..,"ev":..,"job":..}`). Simulator-produced traces round-trip
//! losslessly and byte-identically.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{
    validate_system, ArrivalScenario, EntityRef, JobId, MCREvent, Mode, MultiModeSystem, Policy,
    TaskSpec, Time, TransitionSpec, Violation,
};
use crate::sim::{Event, EventKind, ScheduleTrace, Slice};

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub version: u32,
    pub processors: u32,
    pub modes: Vec<ModeDoc>,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ModeDoc {
    pub name: String,
    pub policy: Policy,
    pub tasks: Vec<TaskDoc>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TaskDoc {
    pub name: String,
    pub wcet: Time,
    pub deadline: Time,
    pub period: Time,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub to: String,
    pub complete: Vec<String>,
    pub enable_deadlines: BTreeMap<String, Time>,
}

impl SystemDocument {
    pub fn to_system(&self) -> MultiModeSystem {
        MultiModeSystem {
            processors: self.processors,
            modes: self
                .modes
                .iter()
                .map(|m| Mode {
                    name: m.name.clone(),
                    policy: m.policy,
                    tasks: m
                        .tasks
                        .iter()
                        .map(|t| TaskSpec::new(t.name.clone(), t.wcet, t.deadline, t.period))
                        .collect(),
                })
                .collect(),
            transitions: self
                .transitions
                .iter()
                .map(|t| TransitionSpec {
                    from: t.from.clone(),
                    to: t.to.clone(),
                    complete_set: t.complete.iter().cloned().collect(),
                    enablement_deadlines: t.enable_deadlines.clone(),
                })
                .collect(),
        }
    }

    pub fn from_system(sys: &MultiModeSystem) -> Self {
        SystemDocument {
            version: DOCUMENT_VERSION,
            processors: sys.processors,
            modes: sys
                .modes
                .iter()
                .map(|m| ModeDoc {
                    name: m.name.clone(),
                    policy: m.policy,
                    tasks: m
                        .tasks
                        .iter()
                        .map(|t| TaskDoc {
                            name: t.name.clone(),
                            wcet: t.wcet,
                            deadline: t.deadline,
                            period: t.min_interarrival,
                        })
                        .collect(),
                })
                .collect(),
            transitions: sys
                .transitions
                .iter()
                .map(|t| TransitionDoc {
                    from: t.from.clone(),
                    to: t.to.clone(),
                    complete: t.complete_set.iter().cloned().collect(),
                    enable_deadlines: t.enablement_deadlines.clone(),
                })
                .collect(),
        }
    }

    /// JSON path of the entity a violation refers to.
    fn json_path(&self, entity: &EntityRef) -> String {
        match entity {
            EntityRef::System => "$".into(),
            EntityRef::Mode { mode } => match self.modes.iter().position(|m| &m.name == mode) {
                Some(i) => format!("$.modes[{i}]"),
                None => "$.modes".into(),
            },
            EntityRef::Task { mode, task } => {
                match self.modes.iter().position(|m| &m.name == mode) {
                    Some(i) => match self.modes[i].tasks.iter().position(|t| &t.name == task) {
                        Some(j) => format!("$.modes[{i}].tasks[{j}]"),
                        None => format!("$.modes[{i}].tasks"),
                    },
                    None => "$.modes".into(),
                }
            }
            EntityRef::Transition { from, to } => {
                match self
                    .transitions
                    .iter()
                    .position(|t| &t.from == from && &t.to == to)
                {
                    Some(i) => format!("$.transitions[{i}]"),
                    None => "$.transitions".into(),
                }
            }
        }
    }
}

/// A structural violation annotated with the JSON path it was found at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathedViolation {
    pub path: String,
    pub violation: Violation,
}

impl fmt::Display for PathedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.violation)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("cannot read '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("schema error at line {line}, column {column}: {msg}")]
    Schema {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("invalid system:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Semantic(Vec<PathedViolation>),
}

fn classify_json_error(err: serde_json::Error) -> ParseError {
    let (line, column, msg) = (err.line(), err.column(), err.to_string());
    match err.classify() {
        serde_json::error::Category::Syntax | serde_json::error::Category::Eof => {
            ParseError::Syntax { line, column, msg }
        }
        _ => ParseError::Schema { line, column, msg },
    }
}

fn check_version(version: u32) -> Result<(), ParseError> {
    if version != DOCUMENT_VERSION {
        return Err(ParseError::Schema {
            line: 0,
            column: 0,
            msg: format!("unsupported document version {version} (expected {DOCUMENT_VERSION})"),
        });
    }
    Ok(())
}

/// Parse and validate a system document from a string.
pub fn parse_system_str(text: &str) -> Result<MultiModeSystem, ParseError> {
    let doc: SystemDocument = serde_json::from_str(text).map_err(classify_json_error)?;
    check_version(doc.version)?;
    let sys = doc.to_system();
    let violations = validate_system(&sys);
    if !violations.is_empty() {
        return Err(ParseError::Semantic(
            violations
                .into_iter()
                .map(|v| PathedViolation {
                    path: doc.json_path(&v.entity),
                    violation: v,
                })
                .collect(),
        ));
    }
    Ok(sys)
}

/// Parse and validate a system document from a file.
pub fn parse_system(path: impl AsRef<Path>) -> Result<MultiModeSystem, ParseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_system_str(&text)
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub version: u32,
    pub horizon: Time,
    /// task name -> [arrival, exec_req] pairs.
    pub arrivals: BTreeMap<String, Vec<(Time, Time)>>,
}

impl ScenarioDocument {
    pub fn to_scenario(&self) -> ArrivalScenario {
        ArrivalScenario {
            horizon: self.horizon,
            arrivals: self.arrivals.clone(),
        }
    }
}

pub fn parse_scenario_str(text: &str) -> Result<ArrivalScenario, ParseError> {
    let doc: ScenarioDocument = serde_json::from_str(text).map_err(classify_json_error)?;
    check_version(doc.version)?;
    Ok(doc.to_scenario())
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ArrivalScenario, ParseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario_str(&text)
}

/// Rem-job situation at a mode change request, for driving one transition
/// directly.
#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TransitionScenarioDocument {
    pub version: u32,
    pub t_mcr: Time,
    pub rem_jobs: Vec<RemJobDoc>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RemJobDoc {
    pub task: String,
    pub release: Time,
    pub exec: Time,
}

pub fn parse_transition_scenario_str(text: &str) -> Result<TransitionScenarioDocument, ParseError> {
    let doc: TransitionScenarioDocument =
        serde_json::from_str(text).map_err(classify_json_error)?;
    check_version(doc.version)?;
    Ok(doc)
}

pub fn parse_transition_scenario(
    path: impl AsRef<Path>,
) -> Result<TransitionScenarioDocument, ParseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_transition_scenario_str(&text)
}

/// Script for a full multi-mode run: initial mode, release horizon for the
/// default periodic scenarios, the request sequence, and optional explicit
/// per-mode scenarios.
#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RunScriptDocument {
    pub version: u32,
    pub initial: String,
    pub horizon: Time,
    pub mcrs: Vec<McrDoc>,
    #[serde(default)]
    pub scenarios: BTreeMap<String, ScenarioDocument>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct McrDoc {
    pub at: Time,
    pub to: String,
}

impl RunScriptDocument {
    pub fn mcr_events(&self) -> Vec<MCREvent> {
        self.mcrs
            .iter()
            .map(|m| MCREvent {
                time: m.at,
                target_mode: m.to.clone(),
            })
            .collect()
    }
}

pub fn parse_run_script_str(text: &str) -> Result<RunScriptDocument, ParseError> {
    let doc: RunScriptDocument = serde_json::from_str(text).map_err(classify_json_error)?;
    check_version(doc.version)?;
    Ok(doc)
}

pub fn parse_run_script(path: impl AsRef<Path>) -> Result<RunScriptDocument, ParseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_run_script_str(&text)
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq, Clone)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub version: u32,
    pub m: u32,
    pub label: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct SliceRec {
    t0: Time,
    t1: Time,
    cpu: u32,
    job: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
struct EventRec {
    t: Time,
    ev: String,
    job: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum TraceRec {
    Header(TraceHeader),
    Slice(SliceRec),
    Event(EventRec),
}

fn event_kind_str(kind: EventKind) -> &'static str {
    match kind {
        EventKind::Arrival => "arrival",
        EventKind::Completion => "completion",
        EventKind::Preemption => "preemption",
        EventKind::IdleStart => "idle_start",
    }
}

fn event_kind_from(s: &str) -> Option<EventKind> {
    match s {
        "arrival" => Some(EventKind::Arrival),
        "completion" => Some(EventKind::Completion),
        "preemption" => Some(EventKind::Preemption),
        "idle_start" => Some(EventKind::IdleStart),
        _ => None,
    }
}

/// Serialize phases as JSON lines: per phase a header, then the slice and
/// event records merged into one time-ordered stream (stable, slices first
/// at equal instants, so simulator output re-serializes byte-identically).
pub fn write_trace(phases: &[(TraceHeader, &ScheduleTrace)]) -> String {
    let mut out = String::new();
    let mut push = |rec: &TraceRec| {
        out.push_str(&serde_json::to_string(rec).expect("trace records serialize"));
        out.push('\n');
    };
    for (header, trace) in phases {
        push(&TraceRec::Header(header.clone()));
        let mut slices = trace.slices.iter().peekable();
        let mut events = trace.events.iter().peekable();
        loop {
            let take_slice = match (slices.peek(), events.peek()) {
                (Some(slice), Some(event)) => slice.start <= event.time,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if take_slice {
                let slice = slices.next().expect("peeked");
                push(&TraceRec::Slice(SliceRec {
                    t0: slice.start,
                    t1: slice.end,
                    cpu: slice.processor,
                    job: slice.job.to_string(),
                }));
            } else {
                let event = events.next().expect("peeked");
                push(&TraceRec::Event(EventRec {
                    t: event.time,
                    ev: event_kind_str(event.kind).to_string(),
                    job: event.job.to_string(),
                }));
            }
        }
    }
    out
}

/// Parse a JSON-lines trace document back into per-phase traces.
/// Completion times are rebuilt from the completion events.
pub fn read_trace(text: &str) -> Result<Vec<(TraceHeader, ScheduleTrace)>, ParseError> {
    let mut phases: Vec<(TraceHeader, ScheduleTrace)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRec = serde_json::from_str(line).map_err(|e| {
            let mut err = classify_json_error(e);
            if let ParseError::Syntax { line, .. } | ParseError::Schema { line, .. } = &mut err {
                *line = lineno + 1;
            }
            err
        })?;
        match rec {
            TraceRec::Header(header) => {
                check_version(header.version)?;
                phases.push((header, ScheduleTrace::default()));
            }
            TraceRec::Slice(slice) => {
                let Some((_, trace)) = phases.last_mut() else {
                    return Err(ParseError::Schema {
                        line: lineno + 1,
                        column: 0,
                        msg: "slice record before any header".into(),
                    });
                };
                trace.slices.push(Slice {
                    start: slice.t0,
                    end: slice.t1,
                    processor: slice.cpu,
                    job: JobId::new(slice.job),
                });
            }
            TraceRec::Event(event) => {
                let Some((_, trace)) = phases.last_mut() else {
                    return Err(ParseError::Schema {
                        line: lineno + 1,
                        column: 0,
                        msg: "event record before any header".into(),
                    });
                };
                let kind = event_kind_from(&event.ev).ok_or_else(|| ParseError::Schema {
                    line: lineno + 1,
                    column: 0,
                    msg: format!("unknown event kind '{}'", event.ev),
                })?;
                let job = JobId::new(event.job);
                if kind == EventKind::Completion {
                    trace.completions.insert(job.clone(), event.t);
                }
                trace.events.push(Event {
                    time: event.t,
                    kind,
                    job,
                });
            }
        }
    }
    Ok(phases)
}
