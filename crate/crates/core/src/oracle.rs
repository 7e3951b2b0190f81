//! Brute-force oracles and seeded fuzz campaigns that check the analytical
//! claims against the simulator at desk scale: the makespan bound over all
//! priority orders, predictability under execution-time reduction, and the
//! sufficiency of the transition condition.
//!
//! Every campaign derives one sub-seed per trial, so any reported failure
//! reproduces deterministically from its seed alone.

use std::fmt;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{check_transition_condition, upms, ExactTime, JobSetSummary};
use crate::model::{
    build_worst_case_remjobs, JobId, JobInstance, Mode, MultiModeSystem, Policy, ReleaseKey,
    TaskSpec, Time, TransitionSpec,
};
use crate::protocol::run_transition;
use crate::sim::{simulate, verify_trace_wellformed, PriorityAssignment};

/// Largest job count enumerated exhaustively (8! = 40320 orders).
pub const EXHAUSTIVE_CAP: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("exhaustive cap exceeded: {n} jobs > {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("condition not satisfied for '{from}' -> '{to}'; sufficiency test inapplicable")]
    ConditionNotSatisfied { from: String, to: String },
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
    #[error(transparent)]
    Protocol(#[from] crate::protocol::ProtocolError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error("simulator invariant breach: {0}")]
    InvariantBreach(String),
}

/// Result of quantifying the makespan over priority orders of one job set.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub max_makespan: Time,
    /// A priority order attaining the maximum.
    pub witness_order: PriorityAssignment,
    pub bound: ExactTime,
    /// `max_makespan <= bound`.
    pub holds: bool,
    /// False when only a sample of orders was explored.
    pub exhaustive: bool,
}

/// Seed, size and shape parameters of one fuzz campaign. The same seed
/// always produces the same trial stream.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: u32,
    pub n_range: RangeInclusive<usize>,
    pub m_range: RangeInclusive<u32>,
    pub p_range: RangeInclusive<Time>,
    /// Largest release offset (jitter) used for arrivals and for rem-job
    /// releases before the request.
    pub max_release_offset: Time,
    /// Per-job probability of shrinking the execution requirement.
    pub shrink_probability: f64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            trials: 100,
            n_range: 1..=7,
            m_range: 2..=4,
            p_range: 1..=20,
            max_release_offset: 10,
            shrink_probability: 0.5,
        }
    }
}

/// One failed trial, reproducible from its seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureRecord {
    pub trial: u32,
    pub seed: u64,
    pub detail: String,
}

impl fmt::Display for FailureRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trial {} (seed {:#018x}): {}",
            self.trial, self.seed, self.detail
        )
    }
}

/// Aggregate outcome of a campaign: zero failures means the checked claim
/// survived every trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignSummary {
    pub campaign: String,
    pub trials: u32,
    pub failures: Vec<FailureRecord>,
}

impl CampaignSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CampaignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} trials, {} failures",
            self.campaign,
            self.trials,
            self.failures.len()
        )?;
        for failure in &self.failures {
            write!(f, "\n  {failure}")?;
        }
        Ok(())
    }
}

fn trial_seed(seed: u64, trial: u32) -> u64 {
    let mut z = seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial as u64 + 1);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Anonymous jobs, all ready at time 0, one per processing time.
fn jobs_at_zero(ps: &[Time]) -> Vec<JobInstance> {
    ps.iter()
        .enumerate()
        .map(|(i, &p)| JobInstance {
            id: JobId::new(format!("j{i}")),
            task: format!("j{i}"),
            arrival: 0,
            exec_req: p,
            abs_deadline: None,
            rel_deadline: None,
            release_key: ReleaseKey::new(0, i as u32, 0),
        })
        .collect()
}

fn checked_makespan(
    jobs: &[JobInstance],
    prio: &PriorityAssignment,
    m: u32,
) -> Result<Time, OracleError> {
    let trace = simulate(jobs, prio, m);
    let violations = verify_trace_wellformed(&trace, jobs, prio, m);
    if let Some(v) = violations.first() {
        return Err(OracleError::InvariantBreach(format!(
            "{v} (order {:?})",
            prio.order()
        )));
    }
    Ok(trace.makespan())
}

fn heap_permutations<F: FnMut(&[usize]) -> Result<(), OracleError>>(
    n: usize,
    mut f: F,
) -> Result<(), OracleError> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&idx)?;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                idx.swap(0, i);
            } else {
                idx.swap(c[i], i);
            }
            f(&idx)?;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(())
}

/// Enumerate every priority order of the job set (all ready at time 0),
/// simulate each on `m` processors, and compare the maximal makespan to the
/// analytical bound. Every trace is also checked for well-formedness.
pub fn brute_force_max_makespan(ps: &[Time], m: u32) -> Result<OracleResult, OracleError> {
    if ps.len() > EXHAUSTIVE_CAP {
        return Err(OracleError::CapExceeded {
            n: ps.len(),
            cap: EXHAUSTIVE_CAP,
        });
    }
    let jobs = jobs_at_zero(ps);
    let ids: Vec<JobId> = jobs.iter().map(|j| j.id.clone()).collect();

    let mut max_makespan = 0;
    let mut witness: Vec<JobId> = ids.clone();
    heap_permutations(ps.len(), |perm| {
        let order: Vec<JobId> = perm.iter().map(|&i| ids[i].clone()).collect();
        let prio = PriorityAssignment::from_order(order.clone());
        let makespan = checked_makespan(&jobs, &prio, m)?;
        if makespan > max_makespan {
            max_makespan = makespan;
            witness = order;
        }
        Ok(())
    })?;

    let bound = upms(&JobSetSummary::from_times(ps.iter().copied()), m);
    Ok(OracleResult {
        max_makespan,
        witness_order: PriorityAssignment::from_order(witness),
        holds: ExactTime::from_integer(max_makespan as u128) <= bound,
        bound,
        exhaustive: true,
    })
}

/// Same check over a random sample of priority orders, for job sets past
/// the exhaustive cap. The result is explicitly flagged as sampled.
pub fn sampled_max_makespan(
    ps: &[Time],
    m: u32,
    orders: u32,
    seed: u64,
) -> Result<OracleResult, OracleError> {
    let jobs = jobs_at_zero(ps);
    let mut ids: Vec<JobId> = jobs.iter().map(|j| j.id.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut max_makespan = 0;
    let mut witness = ids.clone();
    for _ in 0..orders {
        ids.shuffle(&mut rng);
        let prio = PriorityAssignment::from_order(ids.clone());
        let makespan = checked_makespan(&jobs, &prio, m)?;
        if makespan > max_makespan {
            max_makespan = makespan;
            witness = ids.clone();
        }
    }

    let bound = upms(&JobSetSummary::from_times(ps.iter().copied()), m);
    Ok(OracleResult {
        max_makespan,
        witness_order: PriorityAssignment::from_order(witness),
        holds: ExactTime::from_integer(max_makespan as u128) <= bound,
        bound,
        exhaustive: false,
    })
}

/// One bound-campaign trial, fully determined by `seed`: draw a job set
/// within the configured ranges, enumerate every priority order, compare
/// against the bound. Returns the failure detail if the claim breaks.
pub fn bound_trial(cfg: &FuzzConfig, seed: u64) -> Option<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(cfg.n_range.clone());
    let m = rng.random_range(cfg.m_range.clone());
    let ps: Vec<Time> = (0..n)
        .map(|_| rng.random_range(cfg.p_range.clone()))
        .collect();
    match brute_force_max_makespan(&ps, m) {
        Ok(result) if result.holds => None,
        Ok(result) => Some(format!(
            "makespan {} exceeds bound {} for ps {ps:?}, m {m} (witness {:?})",
            result.max_makespan,
            result.bound,
            result.witness_order.order()
        )),
        Err(err) => Some(format!("{err} for ps {ps:?}, m {m}")),
    }
}

/// Random job sets, exhaustive priority enumeration per trial, zero
/// expected bound violations.
pub fn verify_bound_fuzz(cfg: &FuzzConfig) -> CampaignSummary {
    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, trial);
        if let Some(detail) = bound_trial(cfg, seed) {
            failures.push(FailureRecord {
                trial,
                seed,
                detail,
            });
        }
    }
    CampaignSummary {
        campaign: "bound".into(),
        trials: cfg.trials,
        failures,
    }
}

/// One predictability trial, fully determined by `seed`: random jobs,
/// arrivals and deadlines, a random fixed priority order, a componentwise
/// execution-requirement reduction; compare both runs job by job.
pub fn predictability_trial(cfg: &FuzzConfig, seed: u64) -> Option<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(cfg.n_range.clone());
    let m = rng.random_range(cfg.m_range.clone());

    let jobs: Vec<JobInstance> = (0..n)
        .map(|i| {
            let arrival = rng.random_range(0..=cfg.max_release_offset);
            let exec = rng.random_range(cfg.p_range.clone());
            let slack = rng.random_range(0..=*cfg.p_range.end());
            JobInstance {
                id: JobId::new(format!("j{i}")),
                task: format!("j{i}"),
                arrival,
                exec_req: exec,
                abs_deadline: Some(arrival + exec + slack),
                rel_deadline: Some(exec + slack),
                release_key: ReleaseKey::new(0, i as u32, 0),
            }
        })
        .collect();

    let mut order: Vec<JobId> = jobs.iter().map(|j| j.id.clone()).collect();
    order.shuffle(&mut rng);
    let prio = PriorityAssignment::from_order(order);

    let reduced: Vec<JobInstance> = jobs
        .iter()
        .map(|j| {
            let mut j = j.clone();
            if rng.random_bool(cfg.shrink_probability) {
                j.exec_req = rng.random_range(0..=j.exec_req);
            }
            j
        })
        .collect();

    let full = simulate(&jobs, &prio, m);
    let shrunk = simulate(&reduced, &prio, m);
    if let Some(v) = verify_trace_wellformed(&full, &jobs, &prio, m)
        .into_iter()
        .chain(verify_trace_wellformed(&shrunk, &reduced, &prio, m))
        .next()
    {
        return Some(format!("simulator invariant breach: {v}"));
    }
    for job in &jobs {
        let before = full.completions[&job.id];
        let after = shrunk.completions[&job.id];
        if after > before {
            return Some(format!(
                "job '{}' completes at {after} after reduction, {before} before",
                job.id
            ));
        }
    }
    None
}

/// Jobs with random arrivals and deadlines under a random fixed priority
/// order: shrinking execution requirements componentwise must never push
/// any completion later. Zero expected failures.
pub fn verify_predictability(cfg: &FuzzConfig) -> CampaignSummary {
    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, trial);
        if let Some(detail) = predictability_trial(cfg, seed) {
            failures.push(FailureRecord {
                trial,
                seed,
                detail,
            });
        }
    }
    CampaignSummary {
        campaign: "predictability".into(),
        trials: cfg.trials,
        failures,
    }
}

/// One fuzzed sufficiency trial, fully determined by `seed`: a random
/// request placement and per complete-set task a random release at or
/// before it with a possibly shrunk execution requirement (with some
/// probability the task's last job already finished and contributes no
/// rem-job). Returns the failure detail if any rem-job or enablement
/// deadline is missed.
pub fn sufficiency_trial(
    sys: &MultiModeSystem,
    from: &str,
    to: &str,
    cfg: &FuzzConfig,
    seed: u64,
) -> Result<Option<String>, OracleError> {
    let (from_idx, from_mode) =
        sys.mode(from)
            .ok_or_else(|| OracleError::ConditionNotSatisfied {
                from: from.into(),
                to: to.into(),
            })?;
    let spec = sys
        .transition(from, to)
        .ok_or_else(|| OracleError::ConditionNotSatisfied {
            from: from.into(),
            to: to.into(),
        })?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_mcr = rng.random_range(0..=cfg.max_release_offset);
    let mut rem = Vec::new();
    for (task_idx, task) in from_mode.tasks.iter().enumerate() {
        if !spec.complete_set.contains(&task.name) {
            continue;
        }
        // The task's last job may have completed before the request.
        if rng.random_bool(0.15) {
            continue;
        }
        let offset = rng.random_range(0..=t_mcr.min(cfg.max_release_offset));
        let release = t_mcr - offset;
        let exec = if rng.random_bool(cfg.shrink_probability) {
            rng.random_range(0..=task.wcet)
        } else {
            task.wcet
        };
        rem.push(JobInstance {
            id: JobId::new(format!("{}/{}#f", from_mode.name, task.name)),
            task: task.name.clone(),
            arrival: release,
            exec_req: exec,
            abs_deadline: Some(release + task.deadline),
            rel_deadline: Some(task.deadline),
            release_key: ReleaseKey::new(from_idx as u32, task_idx as u32, 0),
        });
    }
    run_trial_transition(sys, from, to, rem, t_mcr)
}

/// Fuzz one transition whose condition holds: random request placements,
/// rem-jobs released at or before the request with shrunk execution
/// requirements (a complete-set task may also have finished already).
/// Every run must meet all rem-job and enablement deadlines. Trial 0 is
/// always the worst case: simultaneous release at the request, full wcets.
pub fn verify_condition_sufficiency(
    sys: &MultiModeSystem,
    from: &str,
    to: &str,
    cfg: &FuzzConfig,
) -> Result<CampaignSummary, OracleError> {
    let report = check_transition_condition(sys, from, to)?;
    if !report.satisfied {
        return Err(OracleError::ConditionNotSatisfied {
            from: from.into(),
            to: to.into(),
        });
    }

    let mut failures = Vec::new();
    for trial in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, trial);
        let outcome = if trial == 0 {
            let rem = build_worst_case_remjobs(sys, from, to)?;
            run_trial_transition(sys, from, to, rem, 0)
        } else {
            sufficiency_trial(sys, from, to, cfg, seed)
        };

        match outcome {
            Ok(None) => {}
            Ok(Some(detail)) => failures.push(FailureRecord {
                trial,
                seed,
                detail,
            }),
            Err(err) => failures.push(FailureRecord {
                trial,
                seed,
                detail: err.to_string(),
            }),
        }
    }
    Ok(CampaignSummary {
        campaign: format!("sufficiency {from}->{to}"),
        trials: cfg.trials,
        failures,
    })
}

fn run_trial_transition(
    sys: &MultiModeSystem,
    from: &str,
    to: &str,
    rem: Vec<JobInstance>,
    t_mcr: Time,
) -> Result<Option<String>, OracleError> {
    let trace = run_transition(sys, from, to, rem, t_mcr)?;
    let sim_jobs = trace.sim_jobs();
    let prio = trace.rem_priorities(sys).expect("from-mode exists");
    if let Some(v) = verify_trace_wellformed(&trace.rem_schedule, &sim_jobs, &prio, sys.processors)
        .into_iter()
        .next()
    {
        return Err(OracleError::InvariantBreach(v.to_string()));
    }
    if !trace.remjob_deadline_report.all_met {
        let missed: Vec<_> = trace
            .remjob_deadline_report
            .per_job
            .iter()
            .filter(|v| !v.met)
            .map(|v| v.job.to_string())
            .collect();
        return Ok(Some(format!(
            "rem-job deadline missed at t_mcr {t_mcr}: {missed:?}"
        )));
    }
    if !trace.all_enablement_met() {
        let missed: Vec<_> = trace
            .enablement_report
            .iter()
            .filter(|v| !v.met)
            .map(|v| {
                format!(
                    "{} (deadline {}, enabled {})",
                    v.task, v.deadline, v.enabled_at
                )
            })
            .collect();
        return Ok(Some(format!(
            "enablement deadline missed at t_mcr {t_mcr}: {missed:?}"
        )));
    }
    Ok(None)
}

/// Fuzz every declared transition of a system (all must satisfy the
/// condition, or an error is returned).
pub fn verify_system_sufficiency(
    sys: &MultiModeSystem,
    cfg: &FuzzConfig,
) -> Result<Vec<CampaignSummary>, OracleError> {
    sys.transitions
        .iter()
        .map(|spec| verify_condition_sufficiency(sys, &spec.from, &spec.to, cfg))
        .collect()
}

fn random_policy(rng: &mut ChaCha8Rng) -> Policy {
    match rng.random_range(0..3u8) {
        0 => Policy::Edf,
        1 => Policy::Dm,
        _ => Policy::Fifo,
    }
}

/// Generate a two-mode system whose single declared transition satisfies
/// the condition by construction, with enough deadline margin that every
/// rem-job fuzzed with releases up to `max_release_offset` before the
/// request also meets its own deadline.
pub fn generate_satisfied_system(seed: u64, max_release_offset: Time) -> MultiModeSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(2..=4u32);
    let n_old = rng.random_range(2..=6usize);
    let wcets: Vec<Time> = (0..n_old).map(|_| rng.random_range(1..=12)).collect();

    let bound = upms(&JobSetSummary::from_times(wcets.iter().copied()), m);
    let bound_ticks = bound.ceil().to_integer() as Time;

    let old_tasks: Vec<TaskSpec> = wcets
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            // Any rem-job released within the offset window completes by
            // release + offset + bound, so this deadline is always safe.
            let deadline = max_release_offset + bound_ticks + rng.random_range(0..=8);
            let period = deadline + rng.random_range(0..=8);
            TaskSpec::new(format!("old{i}"), c, deadline, period)
        })
        .collect();

    let n_new = rng.random_range(1..=4usize);
    let new_tasks: Vec<TaskSpec> = (0..n_new)
        .map(|i| {
            let wcet = rng.random_range(1..=6);
            let deadline = wcet + rng.random_range(0..=10);
            let period = deadline + rng.random_range(0..=10);
            TaskSpec::new(format!("new{i}"), wcet, deadline, period)
        })
        .collect();
    let enablement_deadlines = new_tasks
        .iter()
        .map(|t| (t.name.clone(), bound_ticks + rng.random_range(0..=8)))
        .collect();

    MultiModeSystem {
        processors: m,
        modes: vec![
            Mode {
                name: "src".into(),
                policy: random_policy(&mut rng),
                tasks: old_tasks,
            },
            Mode {
                name: "dst".into(),
                policy: random_policy(&mut rng),
                tasks: new_tasks,
            },
        ],
        transitions: vec![TransitionSpec {
            from: "src".into(),
            to: "dst".into(),
            complete_set: wcets
                .iter()
                .enumerate()
                .map(|(i, _)| format!("old{i}"))
                .collect(),
            enablement_deadlines,
        }],
    }
}

/// The boundary instance: three unit-shape rem-jobs of work 3 on two
/// processors give a bound of exactly 6, and the single target task's
/// enablement deadline is exactly 6. The worst case enables precisely at
/// the deadline.
pub fn boundary_system() -> MultiModeSystem {
    let old_tasks = vec![
        TaskSpec::new("a", 3, 16, 16),
        TaskSpec::new("b", 3, 16, 16),
        TaskSpec::new("c", 3, 16, 16),
    ];
    MultiModeSystem {
        processors: 2,
        modes: vec![
            Mode {
                name: "src".into(),
                policy: Policy::Edf,
                tasks: old_tasks,
            },
            Mode {
                name: "dst".into(),
                policy: Policy::Edf,
                tasks: vec![TaskSpec::new("go", 1, 5, 5)],
            },
        ],
        transitions: vec![TransitionSpec {
            from: "src".into(),
            to: "dst".into(),
            complete_set: ["a", "b", "c"].iter().map(|s| s.to_string()).collect(),
            enablement_deadlines: [("go".to_string(), 6)].into_iter().collect(),
        }],
    }
}
