//! Deterministic discrete-event simulator of global, work-conserving,
//! preemptive, fixed job-level priority scheduling on `m` identical
//! processors.
//!
//! At every instant the `m` highest-priority pending jobs (if any) run.
//! Priorities are fixed per job, so the running set can only change at
//! arrival and completion instants; the engine steps event by event rather
//! than tick by tick. Preemption and migration are free. Completions are
//! processed before arrivals at the same instant. Zero-requirement jobs
//! complete instantly at arrival and occupy no slice.
//!
//! Runs are single-threaded and side-effect free; identical inputs produce
//! bit-identical traces.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{JobId, JobInstance, Policy, Time};

/// A strict total priority order over jobs: lower rank runs first. Fixed
/// for the lifetime of every job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityAssignment {
    order: Vec<JobId>,
    rank: BTreeMap<JobId, usize>,
}

impl PriorityAssignment {
    /// Build from an explicit order, highest priority first.
    pub fn from_order(order: Vec<JobId>) -> Self {
        let rank = order
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        let assignment = PriorityAssignment { order, rank };
        assert_eq!(
            assignment.order.len(),
            assignment.rank.len(),
            "priority order contains duplicate job ids"
        );
        assignment
    }

    pub fn rank(&self, id: &JobId) -> Option<usize> {
        self.rank.get(id).copied()
    }

    /// Job ids from highest to lowest priority.
    pub fn order(&self) -> &[JobId] {
        &self.order
    }
}

/// Fix job priorities per the mode policy. EDF orders by absolute deadline,
/// DM by the generating task's relative deadline, FIFO by arrival; jobs
/// without the relevant deadline sort last. Ties break deterministically by
/// (mode index, task index, job index).
pub fn assign_priorities(policy: Policy, jobs: &[JobInstance]) -> PriorityAssignment {
    let mut keyed: Vec<(Time, &JobInstance)> = jobs
        .iter()
        .map(|job| {
            let key = match policy {
                Policy::Edf => job.abs_deadline.unwrap_or(Time::MAX),
                Policy::Dm => job.rel_deadline.unwrap_or(Time::MAX),
                Policy::Fifo => job.arrival,
            };
            (key, job)
        })
        .collect();
    keyed.sort_by(|(ka, a), (kb, b)| (ka, a.release_key).cmp(&(kb, b.release_key)));
    PriorityAssignment::from_order(keyed.into_iter().map(|(_, j)| j.id.clone()).collect())
}

/// One maximal interval of a job running on one processor. Processor
/// indices are 1-based; intervals are half-open `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slice {
    pub start: Time,
    pub end: Time,
    pub processor: u32,
    pub job: JobId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Arrival,
    Completion,
    Preemption,
    IdleStart,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::Arrival => f.write_str("arrival"),
            EventKind::Completion => f.write_str("completion"),
            EventKind::Preemption => f.write_str("preemption"),
            EventKind::IdleStart => f.write_str("idle_start"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub time: Time,
    pub kind: EventKind,
    pub job: JobId,
}

/// Piecewise-constant processor-to-job assignment over time plus the event
/// log and per-job completion times.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleTrace {
    pub slices: Vec<Slice>,
    pub completions: BTreeMap<JobId, Time>,
    pub events: Vec<Event>,
}

impl ScheduleTrace {
    /// Completion time of the last completed job; 0 for an empty trace.
    pub fn makespan(&self) -> Time {
        self.completions.values().copied().max().unwrap_or(0)
    }
}

/// Per-job deadline verdict. `met` is true iff the job completed at or
/// before its deadline (inclusive boundary).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobVerdict {
    pub job: JobId,
    pub abs_deadline: Time,
    pub completion: Option<Time>,
    pub met: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeadlineReport {
    pub per_job: Vec<JobVerdict>,
    pub all_met: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SimError {
    #[error("unknown job in trace: '{0}'")]
    UnknownJob(JobId),
}

/// Compare completion times against absolute deadlines. Jobs without a
/// deadline are skipped; a job that never completed counts as missed.
pub fn check_trace_deadlines(
    trace: &ScheduleTrace,
    jobs: &[JobInstance],
) -> Result<DeadlineReport, SimError> {
    let known: BTreeMap<&JobId, &JobInstance> = jobs.iter().map(|j| (&j.id, j)).collect();
    for id in trace
        .slices
        .iter()
        .map(|s| &s.job)
        .chain(trace.events.iter().map(|e| &e.job))
        .chain(trace.completions.keys())
    {
        if !known.contains_key(id) {
            return Err(SimError::UnknownJob(id.clone()));
        }
    }

    let mut per_job = Vec::new();
    for job in jobs {
        let Some(deadline) = job.abs_deadline else {
            continue;
        };
        let completion = trace.completions.get(&job.id).copied();
        per_job.push(JobVerdict {
            job: job.id.clone(),
            abs_deadline: deadline,
            completion,
            met: completion.is_some_and(|c| c <= deadline),
        });
    }
    let all_met = per_job.iter().all(|v| v.met);
    Ok(DeadlineReport { per_job, all_met })
}

/// Snapshot of a job still incomplete when a run was cut short: the
/// original instance plus the work left at the cut instant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompleteJob {
    pub job: JobInstance,
    pub remaining: Time,
}

/// Incremental simulation engine. `simulate` drives it to completion;
/// `run_to_cut` stops it at a given instant and reports the incomplete
/// released jobs, which is what a mode change needs.
pub struct Simulator {
    m: usize,
    jobs: Vec<JobInstance>,
    rank: Vec<usize>,
    remaining: Vec<Time>,
    /// Job indices not yet released, ascending by (arrival, rank).
    future: Vec<usize>,
    next_future: usize,
    /// Released incomplete jobs (running included), keyed by (rank, index).
    active: std::collections::BTreeSet<(usize, usize)>,
    running: Vec<Option<usize>>,
    open_start: Vec<Time>,
    last_job: Vec<Option<usize>>,
    now: Time,
    slices: Vec<Slice>,
    events: Vec<Event>,
    completions: BTreeMap<JobId, Time>,
}

impl Simulator {
    pub fn new(jobs: &[JobInstance], prio: &PriorityAssignment, m: u32) -> Self {
        assert!(m >= 1, "processor count must be >= 1");
        let jobs = jobs.to_vec();
        let rank: Vec<usize> = jobs
            .iter()
            .map(|j| {
                prio.rank(&j.id)
                    .unwrap_or_else(|| panic!("job '{}' missing from priority assignment", j.id))
            })
            .collect();
        {
            let mut seen = std::collections::BTreeSet::new();
            for j in &jobs {
                assert!(seen.insert(&j.id), "duplicate job id '{}'", j.id);
            }
        }
        let mut future: Vec<usize> = (0..jobs.len()).collect();
        future.sort_by_key(|&i| (jobs[i].arrival, rank[i]));
        let remaining = jobs.iter().map(|j| j.exec_req).collect();
        Simulator {
            m: m as usize,
            rank,
            remaining,
            future,
            next_future: 0,
            active: std::collections::BTreeSet::new(),
            running: vec![None; m as usize],
            open_start: vec![0; m as usize],
            last_job: vec![None; m as usize],
            now: 0,
            slices: Vec::new(),
            events: Vec::new(),
            completions: BTreeMap::new(),
            jobs,
        }
    }

    fn next_arrival(&self) -> Option<Time> {
        self.future
            .get(self.next_future)
            .map(|&i| self.jobs[i].arrival)
    }

    fn next_completion(&self) -> Option<Time> {
        self.running
            .iter()
            .flatten()
            .map(|&j| self.now + self.remaining[j])
            .min()
    }

    fn next_event(&self) -> Option<Time> {
        match (self.next_arrival(), self.next_completion()) {
            (Some(a), Some(c)) => Some(a.min(c)),
            (Some(a), None) => Some(a),
            (None, Some(c)) => Some(c),
            (None, None) => None,
        }
    }

    fn advance_work(&mut self, t: Time) {
        let dt = t - self.now;
        if dt > 0 {
            for p in 0..self.m {
                if let Some(j) = self.running[p] {
                    self.remaining[j] -= dt;
                }
            }
        }
        self.now = t;
    }

    fn close_slice(&mut self, p: usize, end: Time) {
        let j = self.running[p].expect("closing a slice on an idle processor");
        debug_assert!(self.open_start[p] < end, "zero-length slice");
        self.slices.push(Slice {
            start: self.open_start[p],
            end,
            processor: p as u32 + 1,
            job: self.jobs[j].id.clone(),
        });
        self.running[p] = None;
    }

    fn complete(&mut self, idx: usize, t: Time) {
        self.completions.insert(self.jobs[idx].id.clone(), t);
        self.events.push(Event {
            time: t,
            kind: EventKind::Completion,
            job: self.jobs[idx].id.clone(),
        });
    }

    /// Process completions then arrivals at instant `t`. Work must already
    /// be advanced to `t`.
    fn settle(&mut self, t: Time) {
        for p in 0..self.m {
            if let Some(j) = self.running[p] {
                if self.remaining[j] == 0 {
                    self.close_slice(p, t);
                    self.active.remove(&(self.rank[j], j));
                    self.complete(j, t);
                }
            }
        }
        while let Some(&i) = self.future.get(self.next_future) {
            if self.jobs[i].arrival != t {
                break;
            }
            self.next_future += 1;
            self.events.push(Event {
                time: t,
                kind: EventKind::Arrival,
                job: self.jobs[i].id.clone(),
            });
            if self.jobs[i].exec_req == 0 {
                self.complete(i, t);
            } else {
                self.active.insert((self.rank[i], i));
            }
        }
    }

    /// Re-assign processors at instant `t`: the min(m, pending) highest
    /// priority jobs run. Running jobs keep their processor while still
    /// selected; newly dispatched jobs take the lowest free index.
    fn dispatch(&mut self, t: Time) {
        let was_busy: Vec<bool> = self.running.iter().map(Option::is_some).collect();
        let selected: Vec<usize> = self.active.iter().take(self.m).map(|&(_, j)| j).collect();
        let is_selected = |j: usize| selected.contains(&j);

        for p in 0..self.m {
            if let Some(j) = self.running[p] {
                if !is_selected(j) {
                    self.close_slice(p, t);
                    self.events.push(Event {
                        time: t,
                        kind: EventKind::Preemption,
                        job: self.jobs[j].id.clone(),
                    });
                }
            }
        }

        let incoming: Vec<usize> = selected
            .iter()
            .copied()
            .filter(|&j| !self.running.contains(&Some(j)))
            .collect();
        let mut incoming = incoming.into_iter();
        for p in 0..self.m {
            if self.running[p].is_none() {
                if let Some(j) = incoming.next() {
                    self.running[p] = Some(j);
                    self.open_start[p] = t;
                    self.last_job[p] = Some(j);
                }
            }
        }
        debug_assert!(
            incoming.next().is_none(),
            "selected more jobs than processors"
        );

        for (p, busy) in was_busy.iter().enumerate() {
            if *busy && self.running[p].is_none() {
                if let Some(j) = self.last_job[p] {
                    self.events.push(Event {
                        time: t,
                        kind: EventKind::IdleStart,
                        job: self.jobs[j].id.clone(),
                    });
                }
            }
        }
    }

    fn finalize(mut self, end: Time) -> ScheduleTrace {
        for p in 0..self.m {
            if self.running[p].is_some() {
                self.close_slice(p, end);
            }
        }
        self.slices.sort_by(|a, b| {
            (a.start, a.processor, a.end, &a.job).cmp(&(b.start, b.processor, b.end, &b.job))
        });
        ScheduleTrace {
            slices: self.slices,
            completions: self.completions,
            events: self.events,
        }
    }

    /// Run until every job has completed.
    pub fn run_to_completion(mut self) -> ScheduleTrace {
        while let Some(t) = self.next_event() {
            self.advance_work(t);
            self.settle(t);
            self.dispatch(t);
        }
        let end = self.now;
        self.finalize(end)
    }

    /// Run until instant `cut`. Completions and arrivals at `cut` itself
    /// still happen (a job released exactly at the cut counts as released;
    /// a job finishing exactly at the cut counts as complete), but no work
    /// is scheduled past it. Returns the truncated trace and the incomplete
    /// released jobs with their remaining work. Jobs released after `cut`
    /// are dropped.
    pub fn run_to_cut(mut self, cut: Time) -> (ScheduleTrace, Vec<IncompleteJob>) {
        while let Some(t) = self.next_event() {
            if t > cut {
                break;
            }
            self.advance_work(t);
            self.settle(t);
            if t < cut {
                self.dispatch(t);
            }
        }
        if self.now < cut {
            self.advance_work(cut);
            self.settle(cut);
        }

        let mut incomplete: Vec<(usize, IncompleteJob)> = self
            .active
            .iter()
            .map(|&(_, j)| {
                (
                    j,
                    IncompleteJob {
                        job: self.jobs[j].clone(),
                        remaining: self.remaining[j],
                    },
                )
            })
            .collect();
        incomplete.sort_by_key(|&(j, _)| j);
        let incomplete = incomplete.into_iter().map(|(_, s)| s).collect();
        (self.finalize(cut), incomplete)
    }
}

/// Simulate a finite job set to completion under a fixed priority order on
/// `m` identical processors. Deadline misses are recorded, never raised.
pub fn simulate(jobs: &[JobInstance], prio: &PriorityAssignment, m: u32) -> ScheduleTrace {
    Simulator::new(jobs, prio, m).run_to_completion()
}

/// A way the trace breaks the scheduler contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceViolation {
    UnknownJob {
        job: JobId,
    },
    MalformedSlice {
        processor: u32,
        start: Time,
        end: Time,
    },
    SliceOverlap {
        processor: u32,
        time: Time,
    },
    JobParallelism {
        job: JobId,
        time: Time,
    },
    IdleWithPending {
        time: Time,
        pending: JobId,
    },
    PriorityInversion {
        time: Time,
        running: JobId,
        pending: JobId,
    },
}

impl fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceViolation::UnknownJob { job } => write!(f, "trace references unknown job '{job}'"),
            TraceViolation::MalformedSlice {
                processor,
                start,
                end,
            } => {
                write!(
                    f,
                    "malformed slice [{start}, {end}) on processor {processor}"
                )
            }
            TraceViolation::SliceOverlap { processor, time } => {
                write!(
                    f,
                    "overlapping slices on processor {processor} at time {time}"
                )
            }
            TraceViolation::JobParallelism { job, time } => {
                write!(f, "job '{job}' on two processors at time {time}")
            }
            TraceViolation::IdleWithPending { time, pending } => {
                write!(
                    f,
                    "processor idle at time {time} while job '{pending}' is pending"
                )
            }
            TraceViolation::PriorityInversion {
                time,
                running,
                pending,
            } => {
                write!(
                    f,
                    "job '{running}' runs at time {time} while higher-priority '{pending}' waits"
                )
            }
        }
    }
}

/// Check a trace against the scheduler contract: (a) no overlapping slices
/// per processor, (b) no job on two processors at once, (c) work
/// conservation (no processor idle while a pending job is unscheduled), and
/// (d) no running job has lower priority than a pending unscheduled job.
/// Returns the empty list iff all four hold.
pub fn verify_trace_wellformed(
    trace: &ScheduleTrace,
    jobs: &[JobInstance],
    prio: &PriorityAssignment,
    m: u32,
) -> Vec<TraceViolation> {
    let mut out = Vec::new();
    let by_id: BTreeMap<&JobId, &JobInstance> = jobs.iter().map(|j| (&j.id, j)).collect();

    for slice in &trace.slices {
        if !by_id.contains_key(&slice.job) {
            out.push(TraceViolation::UnknownJob {
                job: slice.job.clone(),
            });
        }
        if slice.end <= slice.start || slice.processor == 0 || slice.processor > m {
            out.push(TraceViolation::MalformedSlice {
                processor: slice.processor,
                start: slice.start,
                end: slice.end,
            });
        }
    }
    if !out.is_empty() {
        return out;
    }

    let mut boundaries: Vec<Time> = Vec::new();
    for slice in &trace.slices {
        boundaries.push(slice.start);
        boundaries.push(slice.end);
    }
    for job in jobs {
        boundaries.push(job.arrival);
    }
    boundaries.extend(trace.completions.values().copied());
    boundaries.sort_unstable();
    boundaries.dedup();

    for window in boundaries.windows(2) {
        let (t0, t1) = (window[0], window[1]);
        let covering: Vec<&Slice> = trace
            .slices
            .iter()
            .filter(|s| s.start <= t0 && s.end >= t1)
            .collect();

        let mut proc_seen = BTreeMap::new();
        let mut job_seen = BTreeMap::new();
        for slice in &covering {
            if *proc_seen.entry(slice.processor).or_insert(0u32) + 1 > 1 {
                out.push(TraceViolation::SliceOverlap {
                    processor: slice.processor,
                    time: t0,
                });
            }
            *proc_seen.entry(slice.processor).or_insert(0) += 1;
            if *job_seen.entry(&slice.job).or_insert(0u32) + 1 > 1 {
                out.push(TraceViolation::JobParallelism {
                    job: slice.job.clone(),
                    time: t0,
                });
            }
            *job_seen.entry(&slice.job).or_insert(0) += 1;
        }

        let running: Vec<&JobId> = covering.iter().map(|s| &s.job).collect();
        let unscheduled: Vec<&JobInstance> = jobs
            .iter()
            .filter(|j| {
                j.exec_req > 0
                    && j.arrival <= t0
                    && trace.completions.get(&j.id).is_none_or(|&c| c > t0)
                    && !running.contains(&&j.id)
            })
            .collect();

        if (covering.len() as u32) < m {
            if let Some(job) = unscheduled.first() {
                out.push(TraceViolation::IdleWithPending {
                    time: t0,
                    pending: job.id.clone(),
                });
            }
        }
        for pending in &unscheduled {
            let pending_rank = prio.rank(&pending.id);
            for running_id in &running {
                if pending_rank < prio.rank(running_id) {
                    out.push(TraceViolation::PriorityInversion {
                        time: t0,
                        running: (*running_id).clone(),
                        pending: pending.id.clone(),
                    });
                }
            }
        }
    }

    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::ReleaseKey;

    pub(crate) fn job(
        id: &str,
        arrival: Time,
        exec: Time,
        deadline: Option<Time>,
        key: (u32, u32, u32),
    ) -> JobInstance {
        JobInstance {
            id: JobId::new(id),
            task: id.split('#').next().unwrap_or(id).to_string(),
            arrival,
            exec_req: exec,
            abs_deadline: deadline,
            rel_deadline: deadline.map(|d| d.saturating_sub(arrival)),
            release_key: ReleaseKey::new(key.0, key.1, key.2),
        }
    }

    fn order(ids: &[&str]) -> PriorityAssignment {
        PriorityAssignment::from_order(ids.iter().map(|s| JobId::new(*s)).collect())
    }

    #[test]
    fn edf_orders_by_absolute_deadline() {
        let jobs = vec![
            job("j1", 0, 1, Some(10), (0, 0, 0)),
            job("j2", 0, 1, Some(7), (0, 1, 0)),
        ];
        let prio = assign_priorities(Policy::Edf, &jobs);
        assert_eq!(prio.order(), &[JobId::new("j2"), JobId::new("j1")]);
    }

    #[test]
    fn edf_ties_break_by_release_key() {
        let jobs = vec![
            job("j2", 0, 1, Some(9), (0, 2, 0)),
            job("j1", 0, 1, Some(9), (0, 1, 0)),
        ];
        let prio = assign_priorities(Policy::Edf, &jobs);
        assert_eq!(prio.order(), &[JobId::new("j1"), JobId::new("j2")]);
    }

    #[test]
    fn fifo_orders_by_arrival() {
        let jobs = vec![
            job("j1", 4, 1, None, (0, 0, 0)),
            job("j2", 0, 1, None, (0, 1, 0)),
        ];
        let prio = assign_priorities(Policy::Fifo, &jobs);
        assert_eq!(prio.order(), &[JobId::new("j2"), JobId::new("j1")]);
    }

    #[test]
    fn dm_orders_by_relative_deadline() {
        let mut early = job("early", 0, 1, Some(20), (0, 0, 0));
        early.rel_deadline = Some(20);
        let mut tight = job("tight", 5, 1, Some(8), (0, 1, 0));
        tight.rel_deadline = Some(3);
        let prio = assign_priorities(Policy::Dm, &[early, tight]);
        assert_eq!(prio.order(), &[JobId::new("tight"), JobId::new("early")]);
    }

    #[test]
    fn three_jobs_two_processors_hand_schedule() {
        let jobs = vec![
            job("j1", 0, 2, None, (0, 0, 0)),
            job("j2", 0, 3, None, (0, 1, 0)),
            job("j3", 0, 4, None, (0, 2, 0)),
        ];
        let prio = order(&["j1", "j2", "j3"]);
        let trace = simulate(&jobs, &prio, 2);
        assert_eq!(trace.makespan(), 6);
        assert_eq!(
            trace.slices,
            vec![
                Slice {
                    start: 0,
                    end: 2,
                    processor: 1,
                    job: JobId::new("j1")
                },
                Slice {
                    start: 0,
                    end: 3,
                    processor: 2,
                    job: JobId::new("j2")
                },
                Slice {
                    start: 2,
                    end: 6,
                    processor: 1,
                    job: JobId::new("j3")
                },
            ]
        );
        assert!(verify_trace_wellformed(&trace, &jobs, &prio, 2).is_empty());
    }

    #[test]
    fn single_job_no_contention() {
        let jobs = vec![job("solo", 0, 5, None, (0, 0, 0))];
        let prio = order(&["solo"]);
        let trace = simulate(&jobs, &prio, 3);
        assert_eq!(trace.makespan(), 5);
        assert_eq!(trace.slices.len(), 1);
    }

    #[test]
    fn three_equal_jobs_makespan_independent_of_order() {
        let jobs = vec![
            job("a", 0, 3, None, (0, 0, 0)),
            job("b", 0, 3, None, (0, 1, 0)),
            job("c", 0, 3, None, (0, 2, 0)),
        ];
        let orders: [[&str; 3]; 6] = [
            ["a", "b", "c"],
            ["a", "c", "b"],
            ["b", "a", "c"],
            ["b", "c", "a"],
            ["c", "a", "b"],
            ["c", "b", "a"],
        ];
        for ids in orders {
            let trace = simulate(&jobs, &order(&ids), 2);
            assert_eq!(trace.makespan(), 6, "order {ids:?}");
        }
    }

    #[test]
    fn preemption_on_higher_priority_arrival() {
        let jobs = vec![
            job("low", 0, 4, None, (0, 1, 0)),
            job("high", 2, 1, None, (0, 0, 0)),
        ];
        let prio = order(&["high", "low"]);
        let trace = simulate(&jobs, &prio, 1);
        assert_eq!(trace.completions[&JobId::new("high")], 3);
        assert_eq!(trace.completions[&JobId::new("low")], 5);
        assert!(trace
            .events
            .iter()
            .any(|e| e.kind == EventKind::Preemption && e.job == JobId::new("low")));
        assert!(verify_trace_wellformed(&trace, &jobs, &prio, 1).is_empty());
    }

    #[test]
    fn zero_exec_job_completes_at_arrival_without_slice() {
        let jobs = vec![
            job("null", 3, 0, Some(3), (0, 0, 0)),
            job("work", 0, 5, None, (0, 1, 0)),
        ];
        let prio = order(&["null", "work"]);
        let trace = simulate(&jobs, &prio, 1);
        assert_eq!(trace.completions[&JobId::new("null")], 3);
        assert!(trace.slices.iter().all(|s| s.job != JobId::new("null")));
        assert_eq!(trace.completions[&JobId::new("work")], 5);
    }

    #[test]
    fn completion_processed_before_arrival_at_same_instant() {
        // "fill" completes exactly when "next" arrives: the processor hands
        // over without preempting anyone.
        let jobs = vec![
            job("fill", 0, 3, None, (0, 0, 0)),
            job("next", 3, 2, None, (0, 1, 0)),
        ];
        let prio = order(&["fill", "next"]);
        let trace = simulate(&jobs, &prio, 1);
        assert_eq!(trace.completions[&JobId::new("next")], 5);
        assert!(trace.events.iter().all(|e| e.kind != EventKind::Preemption));
        let completion_pos = trace
            .events
            .iter()
            .position(|e| e.kind == EventKind::Completion && e.job == JobId::new("fill"))
            .unwrap();
        let arrival_pos = trace
            .events
            .iter()
            .position(|e| e.kind == EventKind::Arrival && e.job == JobId::new("next"))
            .unwrap();
        assert!(completion_pos < arrival_pos);
    }

    #[test]
    fn deadline_boundary_is_inclusive() {
        let jobs = vec![job("j", 0, 6, Some(6), (0, 0, 0))];
        let trace = simulate(&jobs, &order(&["j"]), 1);
        let report = check_trace_deadlines(&trace, &jobs).unwrap();
        assert!(report.all_met);
        assert_eq!(report.per_job[0].completion, Some(6));
    }

    #[test]
    fn late_completion_is_a_miss() {
        let jobs = vec![
            job("a", 0, 4, Some(6), (0, 0, 0)),
            job("b", 0, 3, Some(6), (0, 1, 0)),
        ];
        // One processor: 'b' finishes at 7 > 6.
        let trace = simulate(&jobs, &order(&["a", "b"]), 1);
        let report = check_trace_deadlines(&trace, &jobs).unwrap();
        assert!(!report.all_met);
        let b = report
            .per_job
            .iter()
            .find(|v| v.job == JobId::new("b"))
            .unwrap();
        assert_eq!(b.completion, Some(7));
        assert!(!b.met);
    }

    #[test]
    fn all_deadlines_none_is_vacuously_met() {
        let jobs = vec![job("a", 0, 2, None, (0, 0, 0))];
        let trace = simulate(&jobs, &order(&["a"]), 1);
        let report = check_trace_deadlines(&trace, &jobs).unwrap();
        assert!(report.per_job.is_empty());
        assert!(report.all_met);
    }

    #[test]
    fn unknown_job_in_trace_is_an_error() {
        let jobs = vec![job("a", 0, 2, None, (0, 0, 0))];
        let trace = simulate(&jobs, &order(&["a"]), 1);
        let err = check_trace_deadlines(&trace, &[]).unwrap_err();
        assert_eq!(err, SimError::UnknownJob(JobId::new("a")));
    }

    #[test]
    fn hand_built_idle_trace_violates_work_conservation() {
        let jobs = vec![
            job("a", 0, 2, None, (0, 0, 0)),
            job("b", 0, 2, None, (0, 1, 0)),
        ];
        let prio = order(&["a", "b"]);
        // P2 idles while 'b' waits; 'b' then runs [2, 4) on P1.
        let trace = ScheduleTrace {
            slices: vec![
                Slice {
                    start: 0,
                    end: 2,
                    processor: 1,
                    job: JobId::new("a"),
                },
                Slice {
                    start: 2,
                    end: 4,
                    processor: 1,
                    job: JobId::new("b"),
                },
            ],
            completions: [(JobId::new("a"), 2), (JobId::new("b"), 4)]
                .into_iter()
                .collect(),
            events: vec![],
        };
        let violations = verify_trace_wellformed(&trace, &jobs, &prio, 2);
        assert!(
            violations
                .iter()
                .any(|v| matches!(v, TraceViolation::IdleWithPending { .. })),
            "{violations:?}"
        );
    }

    #[test]
    fn hand_built_inversion_trace_violates_priority_rule() {
        let jobs = vec![
            job("high", 0, 2, None, (0, 0, 0)),
            job("low", 0, 2, None, (0, 1, 0)),
        ];
        let prio = order(&["high", "low"]);
        // 'low' runs first on the single processor while 'high' waits.
        let trace = ScheduleTrace {
            slices: vec![
                Slice {
                    start: 0,
                    end: 2,
                    processor: 1,
                    job: JobId::new("low"),
                },
                Slice {
                    start: 2,
                    end: 4,
                    processor: 1,
                    job: JobId::new("high"),
                },
            ],
            completions: [(JobId::new("low"), 2), (JobId::new("high"), 4)]
                .into_iter()
                .collect(),
            events: vec![],
        };
        let violations = verify_trace_wellformed(&trace, &jobs, &prio, 1);
        assert!(
            violations
                .iter()
                .any(|v| matches!(v, TraceViolation::PriorityInversion { .. })),
            "{violations:?}"
        );
    }

    #[test]
    fn overlapping_slices_detected() {
        let jobs = vec![
            job("a", 0, 4, None, (0, 0, 0)),
            job("b", 0, 2, None, (0, 1, 0)),
        ];
        let prio = order(&["a", "b"]);
        let trace = ScheduleTrace {
            slices: vec![
                Slice {
                    start: 0,
                    end: 4,
                    processor: 1,
                    job: JobId::new("a"),
                },
                Slice {
                    start: 1,
                    end: 3,
                    processor: 1,
                    job: JobId::new("b"),
                },
            ],
            completions: [(JobId::new("a"), 4), (JobId::new("b"), 3)]
                .into_iter()
                .collect(),
            events: vec![],
        };
        let violations = verify_trace_wellformed(&trace, &jobs, &prio, 1);
        assert!(
            violations
                .iter()
                .any(|v| matches!(v, TraceViolation::SliceOverlap { .. })),
            "{violations:?}"
        );
    }

    #[test]
    fn reduction_to_equal_requirements_is_the_identity() {
        let jobs = vec![
            job("a", 0, 4, Some(10), (0, 0, 0)),
            job("b", 2, 3, Some(9), (0, 1, 0)),
        ];
        let prio = order(&["b", "a"]);
        let reduced = jobs.clone();
        assert_eq!(simulate(&jobs, &prio, 2), simulate(&reduced, &prio, 2));
    }

    #[test]
    fn single_job_reduced_to_zero_completes_at_arrival() {
        let jobs = vec![
            job("a", 0, 4, None, (0, 0, 0)),
            job("b", 1, 3, None, (0, 1, 0)),
            job("c", 2, 5, None, (0, 2, 0)),
        ];
        let prio = order(&["a", "b", "c"]);
        let full = simulate(&jobs, &prio, 1);
        let mut reduced = jobs.clone();
        reduced[1].exec_req = 0;
        let shrunk = simulate(&reduced, &prio, 1);
        assert_eq!(shrunk.completions[&JobId::new("b")], 1);
        for j in &jobs {
            assert!(shrunk.completions[&j.id] <= full.completions[&j.id]);
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let jobs = vec![
            job("a", 0, 3, Some(9), (0, 0, 0)),
            job("b", 1, 4, Some(7), (0, 1, 0)),
            job("c", 2, 2, Some(12), (0, 2, 0)),
        ];
        let prio = assign_priorities(Policy::Edf, &jobs);
        let t1 = simulate(&jobs, &prio, 2);
        let t2 = simulate(&jobs, &prio, 2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn run_to_cut_reports_remaining_work() {
        let jobs = vec![
            job("a", 0, 5, None, (0, 0, 0)),
            job("b", 3, 4, None, (0, 1, 0)),
            job("late", 10, 1, None, (0, 2, 0)),
        ];
        let prio = order(&["a", "b", "late"]);
        let (trace, incomplete) = Simulator::new(&jobs, &prio, 1).run_to_cut(4);
        // 'a' ran [0, 4): one unit left. 'b' arrived at 3, never ran.
        assert_eq!(incomplete.len(), 2);
        assert_eq!(incomplete[0].job.id, JobId::new("a"));
        assert_eq!(incomplete[0].remaining, 1);
        assert_eq!(incomplete[1].job.id, JobId::new("b"));
        assert_eq!(incomplete[1].remaining, 4);
        assert_eq!(
            trace.slices,
            vec![Slice {
                start: 0,
                end: 4,
                processor: 1,
                job: JobId::new("a")
            }]
        );
        // 'late' was never released and is gone.
        assert!(trace.events.iter().all(|e| e.job != JobId::new("late")));
    }

    #[test]
    fn run_to_cut_counts_arrival_at_cut_instant() {
        let jobs = vec![job("edge", 5, 2, None, (0, 0, 0))];
        let prio = order(&["edge"]);
        let (trace, incomplete) = Simulator::new(&jobs, &prio, 1).run_to_cut(5);
        assert_eq!(incomplete.len(), 1);
        assert_eq!(incomplete[0].remaining, 2);
        assert!(trace.events.iter().any(|e| e.kind == EventKind::Arrival));
        assert!(trace.slices.is_empty());
    }

    #[test]
    fn run_to_cut_counts_completion_at_cut_instant() {
        let jobs = vec![job("done", 0, 5, None, (0, 0, 0))];
        let prio = order(&["done"]);
        let (trace, incomplete) = Simulator::new(&jobs, &prio, 1).run_to_cut(5);
        assert!(incomplete.is_empty());
        assert_eq!(trace.completions[&JobId::new("done")], 5);
    }
}
