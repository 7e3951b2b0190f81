//! Synchronous mode-change protocol: on a mode change request the tasks
//! outside the complete set are aborted, the complete-set tasks are
//! disabled, their last released incomplete jobs (the rem-jobs) keep
//! running under the old mode's scheduler and priorities, and every task of
//! the target mode is enabled simultaneously when the last rem-job
//! completes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{
    scenario_jobs, validate_scenario, validate_system, ArrivalScenario, JobId, JobInstance,
    MCREvent, MultiModeSystem, Time, TransitionSpec, Violation,
};
use crate::sim::{
    assign_priorities, check_trace_deadlines, simulate, DeadlineReport, IncompleteJob,
    PriorityAssignment, ScheduleTrace, Simulator,
};

/// Where the system is on the steady/transition cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "phase")]
pub enum SystemPhase {
    Steady {
        mode: String,
    },
    Transition {
        from: String,
        to: String,
        t_mcr: Time,
    },
}

/// Enablement verdict for one target-mode task: the deadline relative to
/// the request, the common enablement instant, and whether it was met
/// (inclusive comparison).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnablementVerdict {
    pub task: String,
    pub deadline: Time,
    pub enabled_at: Time,
    pub met: bool,
}

/// Everything one transition did: which jobs were aborted, which rem-jobs
/// ran and how, when the target mode was enabled, and the deadline
/// verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTrace {
    pub from: String,
    pub to: String,
    pub t_mcr: Time,
    pub aborted_jobs: Vec<JobId>,
    /// Rem-jobs as collected: true release time, remaining work, original
    /// absolute deadline.
    pub rem_jobs: Vec<JobInstance>,
    pub rem_schedule: ScheduleTrace,
    /// Completion of the last rem-job, or `t_mcr` when there is none. All
    /// target-mode tasks are enabled at exactly this instant.
    pub t_enable: Time,
    pub enablement_report: Vec<EnablementVerdict>,
    pub remjob_deadline_report: DeadlineReport,
}

impl TransitionTrace {
    /// The rem-jobs as the transition actually schedules them: available
    /// from `t_mcr` (their releases lie at or before it), everything else
    /// unchanged. `rem_schedule` is exact for these instances.
    pub fn sim_jobs(&self) -> Vec<JobInstance> {
        clamp_to_mcr(&self.rem_jobs, self.t_mcr)
    }

    /// Priority order the rem-jobs ran under.
    pub fn rem_priorities(&self, sys: &MultiModeSystem) -> Option<PriorityAssignment> {
        let (_, mode) = sys.mode(&self.from)?;
        Some(assign_priorities(mode.policy, &self.rem_jobs))
    }

    pub fn all_enablement_met(&self) -> bool {
        self.enablement_report.iter().all(|v| v.met)
    }
}

fn clamp_to_mcr(rem_jobs: &[JobInstance], t_mcr: Time) -> Vec<JobInstance> {
    rem_jobs
        .iter()
        .map(|j| {
            let mut j = j.clone();
            j.arrival = j.arrival.max(t_mcr);
            j
        })
        .collect()
}

/// One contiguous stretch of a full run: a steady phase or a transition,
/// with its absolute time window and schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseTrace {
    pub phase: SystemPhase,
    pub start: Time,
    pub end: Time,
    pub trace: ScheduleTrace,
    /// Jobs released within the phase window (what `trace` schedules).
    pub jobs: Vec<JobInstance>,
    pub priorities: PriorityAssignment,
}

/// A whole multi-mode run: contiguous phases, the requests that drove it,
/// per-transition details and aggregated deadline verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullRunTrace {
    pub phases: Vec<PhaseTrace>,
    pub mcrs: Vec<MCREvent>,
    pub transitions: Vec<TransitionTrace>,
    /// Verdicts for every job that carried a deadline and was not aborted:
    /// steady-phase completions plus rem-jobs.
    pub job_deadlines: DeadlineReport,
    pub all_enablement_met: bool,
}

impl FullRunTrace {
    pub fn all_met(&self) -> bool {
        self.job_deadlines.all_met && self.all_enablement_met
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error("no such transition: '{from}' -> '{to}'")]
    NoSuchTransition { from: String, to: String },
    #[error("no such mode: '{0}'")]
    UnknownMode(String),
    #[error("task '{task}' is not a completable task of the transition")]
    NotCompletable { task: String },
    #[error("more than one rem-job for task '{task}'")]
    DuplicateRemJob { task: String },
    #[error("rem-job '{job}' released at {arrival}, after the request at {t_mcr}")]
    RemJobAfterMcr {
        job: JobId,
        arrival: Time,
        t_mcr: Time,
    },
    #[error("missing enablement deadline for task '{task}'")]
    MissingEnablementDeadline { task: String },
    #[error("MCR at {at} during transition ending at {t_enable} is out of model")]
    McrDuringTransition { at: Time, t_enable: Time },
    #[error("MCR times must be strictly increasing ({prev} then {next})")]
    McrNotIncreasing { prev: Time, next: Time },
    #[error("no arrival scenario for mode '{0}'")]
    MissingScenario(String),
    #[error("invalid scenario for mode '{mode}':\n{}", .violations.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    InvalidScenario {
        mode: String,
        violations: Vec<Violation>,
    },
    #[error("invalid system:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    InvalidSystem(Vec<Violation>),
}

/// Execute one transition: schedule the rem-jobs under the old mode's
/// policy on the `m` processors from `t_mcr` on, enable every target-mode
/// task when the last rem-job completes, and judge every rem-job and
/// enablement deadline (both inclusive).
///
/// The rem-jobs must each belong to a distinct complete-set task and be
/// released at or before `t_mcr`. Their priorities are the ones fixed at
/// release: the old policy's keys are evaluated on the original arrival
/// and deadlines.
pub fn run_transition(
    sys: &MultiModeSystem,
    from: &str,
    to: &str,
    rem_jobs: Vec<JobInstance>,
    t_mcr: Time,
) -> Result<TransitionTrace, ProtocolError> {
    let spec = sys
        .transition(from, to)
        .ok_or_else(|| ProtocolError::NoSuchTransition {
            from: from.into(),
            to: to.into(),
        })?;
    let (_, from_mode) = sys
        .mode(from)
        .ok_or_else(|| ProtocolError::UnknownMode(from.into()))?;
    let (_, to_mode) = sys
        .mode(to)
        .ok_or_else(|| ProtocolError::UnknownMode(to.into()))?;

    let mut seen = std::collections::BTreeSet::new();
    for job in &rem_jobs {
        if !spec.complete_set.contains(&job.task) {
            return Err(ProtocolError::NotCompletable {
                task: job.task.clone(),
            });
        }
        if !seen.insert(&job.task) {
            return Err(ProtocolError::DuplicateRemJob {
                task: job.task.clone(),
            });
        }
        if job.arrival > t_mcr {
            return Err(ProtocolError::RemJobAfterMcr {
                job: job.id.clone(),
                arrival: job.arrival,
                t_mcr,
            });
        }
    }

    let prio = assign_priorities(from_mode.policy, &rem_jobs);
    let sim_jobs = clamp_to_mcr(&rem_jobs, t_mcr);
    let rem_schedule = simulate(&sim_jobs, &prio, sys.processors);
    let t_enable = if sim_jobs.is_empty() {
        t_mcr
    } else {
        rem_schedule.makespan()
    };

    let mut enablement_report = Vec::new();
    for task in &to_mode.tasks {
        let rel = spec
            .enablement_deadlines
            .get(&task.name)
            .copied()
            .ok_or_else(|| ProtocolError::MissingEnablementDeadline {
                task: task.name.clone(),
            })?;
        let deadline = t_mcr + rel;
        enablement_report.push(EnablementVerdict {
            task: task.name.clone(),
            deadline,
            enabled_at: t_enable,
            met: t_enable <= deadline,
        });
    }

    let remjob_deadline_report =
        check_trace_deadlines(&rem_schedule, &sim_jobs).expect("rem schedule covers its own jobs");

    Ok(TransitionTrace {
        from: from.into(),
        to: to.into(),
        t_mcr,
        aborted_jobs: Vec::new(),
        rem_jobs,
        rem_schedule,
        t_enable,
        enablement_report,
        remjob_deadline_report,
    })
}

/// Partition the incomplete jobs of the old mode at the request instant:
/// the last released incomplete job of each complete-set task becomes a
/// rem-job carrying its remaining work, true release, original deadline and
/// tie-break key; everything else is aborted. A complete-set task whose
/// last job already finished contributes no rem-job.
pub fn abort_and_collect(
    active_jobs: &[IncompleteJob],
    spec: &TransitionSpec,
) -> (Vec<JobId>, Vec<JobInstance>) {
    let mut last_per_task: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, inc) in active_jobs.iter().enumerate() {
        if !spec.complete_set.contains(&inc.job.task) {
            continue;
        }
        match last_per_task.entry(inc.job.task.as_str()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(i);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let held = &active_jobs[*e.get()].job;
                if (inc.job.arrival, inc.job.release_key) > (held.arrival, held.release_key) {
                    e.insert(i);
                }
            }
        }
    }

    let mut aborted = Vec::new();
    let mut rem_jobs = Vec::new();
    for (i, inc) in active_jobs.iter().enumerate() {
        if last_per_task.get(inc.job.task.as_str()) == Some(&i) {
            let mut job = inc.job.clone();
            job.exec_req = inc.remaining;
            rem_jobs.push(job);
        } else {
            aborted.push(inc.job.id.clone());
        }
    }
    (aborted, rem_jobs)
}

/// Drive a whole multi-mode run: steady phases release jobs per the active
/// mode's scenario (arrival offsets measured from the phase start) and are
/// scheduled by its policy; each request aborts, collects rem-jobs, runs
/// the transition, and the target mode's first releases start at the
/// common enablement instant.
///
/// Requests must be strictly increasing and may only land in a steady
/// phase. Every mode that becomes active needs a scenario.
pub fn run_multimode(
    sys: &MultiModeSystem,
    initial_mode: &str,
    scenarios: &BTreeMap<String, ArrivalScenario>,
    mcrs: &[MCREvent],
) -> Result<FullRunTrace, ProtocolError> {
    let violations = validate_system(sys);
    if !violations.is_empty() {
        return Err(ProtocolError::InvalidSystem(violations));
    }
    sys.mode(initial_mode)
        .ok_or_else(|| ProtocolError::UnknownMode(initial_mode.into()))?;
    for pair in mcrs.windows(2) {
        if pair[1].time <= pair[0].time {
            return Err(ProtocolError::McrNotIncreasing {
                prev: pair[0].time,
                next: pair[1].time,
            });
        }
    }

    let phase_scenario = |mode_name: &str| -> Result<&ArrivalScenario, ProtocolError> {
        let scenario = scenarios
            .get(mode_name)
            .ok_or_else(|| ProtocolError::MissingScenario(mode_name.into()))?;
        let (_, mode) = sys
            .mode(mode_name)
            .ok_or_else(|| ProtocolError::UnknownMode(mode_name.into()))?;
        let violations = validate_scenario(mode, scenario);
        if !violations.is_empty() {
            return Err(ProtocolError::InvalidScenario {
                mode: mode_name.into(),
                violations,
            });
        }
        Ok(scenario)
    };

    let mut phases = Vec::new();
    let mut transitions: Vec<TransitionTrace> = Vec::new();
    let mut verdicts = Vec::new();
    let mut current = initial_mode.to_string();
    let mut phase_start: Time = 0;

    for mcr in mcrs {
        if mcr.time < phase_start {
            return Err(ProtocolError::McrDuringTransition {
                at: mcr.time,
                t_enable: phase_start,
            });
        }
        let (mode_idx, mode) = sys
            .mode(&current)
            .map(|(i, m)| (i as u32, m))
            .expect("current mode exists");
        sys.mode(&mcr.target_mode)
            .ok_or_else(|| ProtocolError::UnknownMode(mcr.target_mode.clone()))?;
        let spec = sys.transition(&current, &mcr.target_mode).ok_or_else(|| {
            ProtocolError::NoSuchTransition {
                from: current.clone(),
                to: mcr.target_mode.clone(),
            }
        })?;

        let scenario = phase_scenario(&current)?;
        let jobs = scenario_jobs(mode, mode_idx, scenario, phase_start);
        let prio = assign_priorities(mode.policy, &jobs);
        let (steady_trace, incomplete) =
            Simulator::new(&jobs, &prio, sys.processors).run_to_cut(mcr.time);

        let released: Vec<JobInstance> = jobs
            .iter()
            .filter(|j| j.arrival <= mcr.time)
            .cloned()
            .collect();
        for job in &released {
            let Some(deadline) = job.abs_deadline else {
                continue;
            };
            if let Some(&completion) = steady_trace.completions.get(&job.id) {
                verdicts.push(crate::sim::JobVerdict {
                    job: job.id.clone(),
                    abs_deadline: deadline,
                    completion: Some(completion),
                    met: completion <= deadline,
                });
            }
        }

        let (aborted, rem_jobs) = abort_and_collect(&incomplete, spec);
        let mut ttrace = run_transition(sys, &current, &mcr.target_mode, rem_jobs, mcr.time)?;
        ttrace.aborted_jobs = aborted;

        phases.push(PhaseTrace {
            phase: SystemPhase::Steady {
                mode: current.clone(),
            },
            start: phase_start,
            end: mcr.time,
            trace: steady_trace,
            jobs: released,
            priorities: prio,
        });
        phases.push(PhaseTrace {
            phase: SystemPhase::Transition {
                from: current.clone(),
                to: mcr.target_mode.clone(),
                t_mcr: mcr.time,
            },
            start: mcr.time,
            end: ttrace.t_enable,
            trace: ttrace.rem_schedule.clone(),
            jobs: ttrace.sim_jobs(),
            priorities: assign_priorities(mode.policy, &ttrace.rem_jobs),
        });
        verdicts.extend(ttrace.remjob_deadline_report.per_job.iter().cloned());

        phase_start = ttrace.t_enable;
        current = mcr.target_mode.clone();
        transitions.push(ttrace);
    }

    let (mode_idx, mode) = sys
        .mode(&current)
        .map(|(i, m)| (i as u32, m))
        .expect("current mode exists");
    let scenario = phase_scenario(&current)?;
    let jobs = scenario_jobs(mode, mode_idx, scenario, phase_start);
    let prio = assign_priorities(mode.policy, &jobs);
    let trace = simulate(&jobs, &prio, sys.processors);
    let report = check_trace_deadlines(&trace, &jobs).expect("trace covers its own jobs");
    verdicts.extend(report.per_job);
    let end = trace.makespan().max(phase_start);
    phases.push(PhaseTrace {
        phase: SystemPhase::Steady {
            mode: current.clone(),
        },
        start: phase_start,
        end,
        trace,
        jobs,
        priorities: prio,
    });

    let all_met = verdicts.iter().all(|v| v.met);
    let all_enablement_met = transitions.iter().all(|t| t.all_enablement_met());
    Ok(FullRunTrace {
        phases,
        mcrs: mcrs.to_vec(),
        transitions,
        job_deadlines: DeadlineReport {
            per_job: verdicts,
            all_met,
        },
        all_enablement_met,
    })
}
