//! Task, mode, system and transition data model for multi-mode real-time
//! systems on identical multiprocessors.
//!
//! A system is a set of operating modes, each holding sporadic tasks with
//! constrained deadlines (`D <= T`) and its own scheduling policy. Ordered
//! mode pairs may declare a transition: which old-mode tasks must complete
//! their last job (the complete set) and how late each new-mode task may be
//! enabled (the enablement deadlines, relative to the mode change request).
//!
//! All types are immutable values after construction; operations here are
//! pure functions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Non-negative integer time, in ticks.
pub type Time = u64;

/// Unique label of one released job, e.g. `"nominal/sense#2"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub String);

impl JobId {
    pub fn new(s: impl Into<String>) -> Self {
        JobId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Deterministic tie-break key for priority assignment: position of the job
/// in the release structure (mode index, task index, job index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReleaseKey {
    pub mode: u32,
    pub task: u32,
    pub job: u32,
}

impl ReleaseKey {
    pub fn new(mode: u32, task: u32, job: u32) -> Self {
        ReleaseKey { mode, task, job }
    }
}

/// Scheduling policy of one mode. All three assign fixed job-level
/// priorities: a job's priority is set at release and never changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Earliest absolute deadline first.
    Edf,
    /// Deadline monotonic: smallest relative deadline first.
    Dm,
    /// First in, first out: earliest arrival first.
    Fifo,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Edf => f.write_str("edf"),
            Policy::Dm => f.write_str("dm"),
            Policy::Fifo => f.write_str("fifo"),
        }
    }
}

/// A sporadic task within one mode: worst-case execution time, relative
/// deadline and minimal inter-arrival delay, with `wcet <= deadline <= T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: String,
    pub wcet: Time,
    pub deadline: Time,
    pub min_interarrival: Time,
}

impl TaskSpec {
    pub fn new(
        name: impl Into<String>,
        wcet: Time,
        deadline: Time,
        min_interarrival: Time,
    ) -> Self {
        TaskSpec {
            name: name.into(),
            wcet,
            deadline,
            min_interarrival,
        }
    }
}

/// One operating mode: a non-empty task set plus the scheduling policy used
/// while the mode is active.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub name: String,
    pub policy: Policy,
    pub tasks: Vec<TaskSpec>,
}

impl Mode {
    pub fn task(&self, name: &str) -> Option<(usize, &TaskSpec)> {
        self.tasks.iter().enumerate().find(|(_, t)| t.name == name)
    }
}

/// Transition data for one ordered mode pair: the subset of old-mode tasks
/// that must complete their last job, and per new-mode task the latest
/// allowed enablement time relative to the mode change request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionSpec {
    pub from: String,
    pub to: String,
    pub complete_set: BTreeSet<String>,
    pub enablement_deadlines: BTreeMap<String, Time>,
}

/// A multi-mode system: `processors` identical processors, a set of modes
/// and the declared transitions between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiModeSystem {
    pub processors: u32,
    pub modes: Vec<Mode>,
    pub transitions: Vec<TransitionSpec>,
}

impl MultiModeSystem {
    pub fn mode(&self, name: &str) -> Option<(usize, &Mode)> {
        self.modes.iter().enumerate().find(|(_, m)| m.name == name)
    }

    pub fn transition(&self, from: &str, to: &str) -> Option<&TransitionSpec> {
        self.transitions
            .iter()
            .find(|t| t.from == from && t.to == to)
    }
}

/// A released job. `exec_req` is the actual processing time (at most the
/// task's wcet; for a partially executed job, the remaining work).
/// `abs_deadline` is `None` for enablement-only bookkeeping jobs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobInstance {
    pub id: JobId,
    /// Name of the generating task.
    pub task: String,
    pub arrival: Time,
    pub exec_req: Time,
    pub abs_deadline: Option<Time>,
    /// Relative deadline of the generating task (deadline-monotonic key).
    pub rel_deadline: Option<Time>,
    pub release_key: ReleaseKey,
}

/// Concrete arrival pattern for one mode: per task, the sorted list of
/// (arrival, exec_req) pairs, all below `horizon`. Arrival times are
/// relative to the start of the mode's steady phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalScenario {
    pub horizon: Time,
    /// task name -> (arrival, exec_req) pairs, ascending by arrival.
    pub arrivals: BTreeMap<String, Vec<(Time, Time)>>,
}

/// A mode change request: at `time`, switch to `target_mode`. Only legal
/// while the system is in a steady phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MCREvent {
    pub time: Time,
    pub target_mode: String,
}

/// Which entity of a system a violation refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntityRef {
    System,
    Mode { mode: String },
    Task { mode: String, task: String },
    Transition { from: String, to: String },
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityRef::System => f.write_str("system"),
            EntityRef::Mode { mode } => write!(f, "mode '{mode}'"),
            EntityRef::Task { mode, task } => write!(f, "task '{task}' of mode '{mode}'"),
            EntityRef::Transition { from, to } => write!(f, "transition '{from}' -> '{to}'"),
        }
    }
}

/// One broken invariant: the offending entity and the rule it breaks.
/// Violations are data, not failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub entity: EntityRef,
    pub rule: String,
}

impl Violation {
    fn new(entity: EntityRef, rule: impl Into<String>) -> Self {
        Violation {
            entity,
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("no such transition: '{from}' -> '{to}'")]
    NoSuchTransition { from: String, to: String },
    #[error("no such mode: '{0}'")]
    UnknownMode(String),
}

/// Check every structural invariant of a system. Returns an empty list iff
/// the system is well formed; each violation names the offending entity and
/// the broken rule.
pub fn validate_system(sys: &MultiModeSystem) -> Vec<Violation> {
    let mut out = Vec::new();

    if sys.processors == 0 {
        out.push(Violation::new(
            EntityRef::System,
            "processor count must be >= 1",
        ));
    }

    let mut mode_names = BTreeSet::new();
    for mode in &sys.modes {
        if !mode_names.insert(mode.name.clone()) {
            out.push(Violation::new(
                EntityRef::System,
                format!("duplicate mode name '{}'", mode.name),
            ));
        }
        if mode.tasks.is_empty() {
            out.push(Violation::new(
                EntityRef::Mode {
                    mode: mode.name.clone(),
                },
                "task set must be non-empty",
            ));
        }
        let mut task_names = BTreeSet::new();
        for task in &mode.tasks {
            if !task_names.insert(task.name.clone()) {
                out.push(Violation::new(
                    EntityRef::Mode {
                        mode: mode.name.clone(),
                    },
                    format!("duplicate task name '{}'", task.name),
                ));
            }
            let entity = EntityRef::Task {
                mode: mode.name.clone(),
                task: task.name.clone(),
            };
            if task.wcet == 0 {
                out.push(Violation::new(entity.clone(), "wcet must be >= 1"));
            }
            if task.deadline < task.wcet {
                out.push(Violation::new(
                    entity.clone(),
                    format!("deadline {} must be >= wcet {}", task.deadline, task.wcet),
                ));
            }
            if task.deadline > task.min_interarrival {
                out.push(Violation::new(
                    entity,
                    format!(
                        "deadline {} must not exceed min_interarrival {} (D <= T)",
                        task.deadline, task.min_interarrival
                    ),
                ));
            }
        }
    }

    let mut pairs = BTreeSet::new();
    for spec in &sys.transitions {
        let entity = EntityRef::Transition {
            from: spec.from.clone(),
            to: spec.to.clone(),
        };
        if spec.from == spec.to {
            out.push(Violation::new(
                entity.clone(),
                "self-transitions are rejected",
            ));
        }
        if !pairs.insert((spec.from.clone(), spec.to.clone())) {
            out.push(Violation::new(
                entity.clone(),
                "at most one transition spec per ordered mode pair",
            ));
        }
        let from_mode = sys.mode(&spec.from);
        let to_mode = sys.mode(&spec.to);
        if from_mode.is_none() {
            out.push(Violation::new(
                entity.clone(),
                format!("from-mode '{}' does not exist", spec.from),
            ));
        }
        if to_mode.is_none() {
            out.push(Violation::new(
                entity.clone(),
                format!("to-mode '{}' does not exist", spec.to),
            ));
        }
        if let Some((_, from_mode)) = from_mode {
            for name in &spec.complete_set {
                if from_mode.task(name).is_none() {
                    out.push(Violation::new(
                        entity.clone(),
                        format!(
                            "complete set names task '{name}' absent from mode '{}'",
                            spec.from
                        ),
                    ));
                }
            }
        }
        if let Some((_, to_mode)) = to_mode {
            for task in &to_mode.tasks {
                if !spec.enablement_deadlines.contains_key(&task.name) {
                    out.push(Violation::new(
                        entity.clone(),
                        format!("missing enablement deadline for task '{}'", task.name),
                    ));
                }
            }
            for name in spec.enablement_deadlines.keys() {
                if to_mode.task(name).is_none() {
                    out.push(Violation::new(
                        entity.clone(),
                        format!(
                            "enablement deadline for task '{name}' absent from mode '{}'",
                            spec.to
                        ),
                    ));
                }
            }
        }
    }

    out
}

/// Build the worst-case rem-job set for the given transition: every task of
/// the complete set releases a job exactly at the mode change request
/// (arrival 0) with its full wcet and relative deadline measured from there.
pub fn build_worst_case_remjobs(
    sys: &MultiModeSystem,
    from: &str,
    to: &str,
) -> Result<Vec<JobInstance>, ModelError> {
    let spec = sys
        .transition(from, to)
        .ok_or_else(|| ModelError::NoSuchTransition {
            from: from.into(),
            to: to.into(),
        })?;
    let (mode_idx, mode) = sys
        .mode(from)
        .ok_or_else(|| ModelError::UnknownMode(from.into()))?;

    let mut jobs = Vec::new();
    for (task_idx, task) in mode.tasks.iter().enumerate() {
        if !spec.complete_set.contains(&task.name) {
            continue;
        }
        jobs.push(JobInstance {
            id: JobId::new(format!("{}/{}#0", mode.name, task.name)),
            task: task.name.clone(),
            arrival: 0,
            exec_req: task.wcet,
            abs_deadline: Some(task.deadline),
            rel_deadline: Some(task.deadline),
            release_key: ReleaseKey::new(mode_idx as u32, task_idx as u32, 0),
        });
    }
    Ok(jobs)
}

/// The default steady-state scenario: every task releases at exactly
/// `0, T, 2T, ...` below the horizon, each with full wcet.
pub fn periodic_scenario(mode: &Mode, horizon: Time) -> ArrivalScenario {
    let mut arrivals = BTreeMap::new();
    for task in &mode.tasks {
        let mut releases = Vec::new();
        let mut t = 0;
        while t < horizon {
            releases.push((t, task.wcet));
            t += task.min_interarrival;
        }
        arrivals.insert(task.name.clone(), releases);
    }
    ArrivalScenario { horizon, arrivals }
}

/// Check a scenario against its mode: tasks must exist, consecutive arrivals
/// of one task must be separated by at least its min inter-arrival delay,
/// exec_req must not exceed the wcet, and all arrivals must fall below the
/// horizon.
pub fn validate_scenario(mode: &Mode, scenario: &ArrivalScenario) -> Vec<Violation> {
    let mut out = Vec::new();
    for (name, releases) in &scenario.arrivals {
        let Some((_, task)) = mode.task(name) else {
            out.push(Violation::new(
                EntityRef::Mode {
                    mode: mode.name.clone(),
                },
                format!("scenario names task '{name}' absent from the mode"),
            ));
            continue;
        };
        let entity = EntityRef::Task {
            mode: mode.name.clone(),
            task: name.clone(),
        };
        let mut prev: Option<Time> = None;
        for &(arrival, exec) in releases {
            if let Some(p) = prev {
                if arrival < p + task.min_interarrival {
                    out.push(Violation::new(
                        entity.clone(),
                        format!(
                            "arrivals {p} and {arrival} violate min inter-arrival {}",
                            task.min_interarrival
                        ),
                    ));
                }
            }
            if exec > task.wcet {
                out.push(Violation::new(
                    entity.clone(),
                    format!("exec_req {exec} exceeds wcet {}", task.wcet),
                ));
            }
            if arrival >= scenario.horizon {
                out.push(Violation::new(
                    entity.clone(),
                    format!(
                        "arrival {arrival} at or beyond horizon {}",
                        scenario.horizon
                    ),
                ));
            }
            prev = Some(arrival);
        }
    }
    out
}

/// Materialize the jobs a scenario releases for `mode`, shifting all
/// arrivals by `phase_start`. Job ids are `"<mode>/<task>#<k>"`.
pub fn scenario_jobs(
    mode: &Mode,
    mode_idx: u32,
    scenario: &ArrivalScenario,
    phase_start: Time,
) -> Vec<JobInstance> {
    let mut jobs = Vec::new();
    for (task_idx, task) in mode.tasks.iter().enumerate() {
        let Some(releases) = scenario.arrivals.get(&task.name) else {
            continue;
        };
        for (k, &(offset, exec)) in releases.iter().enumerate() {
            let arrival = phase_start + offset;
            jobs.push(JobInstance {
                id: JobId::new(format!("{}/{}#{}", mode.name, task.name, k)),
                task: task.name.clone(),
                arrival,
                exec_req: exec,
                abs_deadline: Some(arrival + task.deadline),
                rel_deadline: Some(task.deadline),
                release_key: ReleaseKey::new(mode_idx, task_idx as u32, k as u32),
            });
        }
    }
    jobs
}
