//! Command-line front end: analyze transition schedulability, drive single
//! transitions and steady-state simulations, execute full multi-mode runs,
//! and launch the validation campaigns.
//!
//! Exit codes: 0 success/positive verdict; 1 negative verdict (unsatisfied
//! condition, missed deadline, inapplicable sufficiency test); 2 unreadable
//! input or JSON syntax error; 3 validation campaign failures; 4 internal
//! invariant breach; 5 schema violation; 6 semantic violation.

mod gantt;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use modeswitch::analysis::{check_system, ExactTime, JobSetSummary, SystemReport};
use modeswitch::io::{
    self, parse_run_script, parse_scenario, parse_system, parse_transition_scenario, ParseError,
    TraceHeader,
};
use modeswitch::model::{
    build_worst_case_remjobs, periodic_scenario, scenario_jobs, validate_scenario, ArrivalScenario,
    JobId, JobInstance, MultiModeSystem, ReleaseKey, Time,
};
use modeswitch::oracle::{
    boundary_system, generate_satisfied_system, verify_bound_fuzz, verify_condition_sufficiency,
    verify_predictability, verify_system_sufficiency, CampaignSummary, FuzzConfig,
};
use modeswitch::protocol::{
    run_multimode, run_transition, FullRunTrace, SystemPhase, TransitionTrace,
};
use modeswitch::sim::{assign_priorities, check_trace_deadlines, simulate, DeadlineReport};

const EXIT_OK: u8 = 0;
const EXIT_VERDICT: u8 = 1;
const EXIT_READ: u8 = 2;
const EXIT_CAMPAIGN: u8 = 3;
const EXIT_INTERNAL: u8 = 4;
const EXIT_SCHEMA: u8 = 5;
const EXIT_SEMANTIC: u8 = 6;

#[derive(Parser)]
#[command(
    name = "modeswitch",
    version,
    about = "Multi-mode real-time scheduling on identical multiprocessors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the transition condition for every declared mode pair.
    Analyze {
        system: PathBuf,
        /// Emit a machine-readable report on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Execute one mode transition and judge its deadlines.
    Transition {
        system: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Use the worst case: every complete-set task releases at the
        /// request with full wcet (default when no scenario is given).
        #[arg(long, conflicts_with = "scenario")]
        worst_case: bool,
        /// Rem-job scenario document (t_mcr, releases, remaining work).
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Write the rem-job schedule as a JSON-lines trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Draw an ASCII Gantt chart of the transition window.
        #[arg(long)]
        gantt: bool,
        #[arg(long)]
        json: bool,
    },
    /// Simulate one mode in steady state and report job deadlines.
    Simulate {
        system: PathBuf,
        #[arg(long)]
        mode: String,
        /// Release horizon for the default periodic scenario.
        #[arg(long)]
        horizon: Option<Time>,
        /// Explicit arrival scenario document.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        gantt: bool,
        #[arg(long)]
        json: bool,
    },
    /// Execute a scripted multi-mode run (steady phases + transitions).
    Run {
        system: PathBuf,
        /// Run script: initial mode, horizon, MCR sequence.
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Validation campaigns against brute-force oracles.
    Validate {
        #[command(subcommand)]
        campaign: ValidateCommand,
    },
}

#[derive(Subcommand)]
enum ValidateCommand {
    /// Exhaustive priority-order enumeration per random job set: simulated
    /// makespan must never exceed the analytical bound.
    Bound {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: u32,
        #[arg(long, default_value_t = 7)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        m_min: u32,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
        #[arg(long, default_value_t = 20)]
        p_max: Time,
        #[arg(long)]
        json: bool,
    },
    /// Componentwise execution-time reduction must never delay any
    /// completion under identical fixed priorities.
    Predictability {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: u32,
        #[arg(long)]
        json: bool,
    },
    /// Fuzzed transition scenarios on systems whose condition holds must
    /// meet every rem-job and enablement deadline.
    Sufficiency {
        /// Fuzz this system's transitions (all must satisfy the condition);
        /// without it, seeded satisfied systems are generated.
        system: Option<PathBuf>,
        #[arg(long, requires = "system")]
        from: Option<String>,
        #[arg(long, requires = "system")]
        to: Option<String>,
        /// Number of generated systems when no file is given.
        #[arg(long, default_value_t = 20)]
        systems: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fuzzed scenarios per transition.
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Parse(ParseError),
    Verdict(String),
    CampaignFailures(usize),
    Usage(String),
    WriteFailed {
        path: String,
        source: std::io::Error,
    },
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(ParseError::Io { .. } | ParseError::Syntax { .. }) => EXIT_READ,
            CliError::Parse(ParseError::Schema { .. }) => EXIT_SCHEMA,
            CliError::Parse(ParseError::Semantic(_)) => EXIT_SEMANTIC,
            CliError::Verdict(_) => EXIT_VERDICT,
            CliError::CampaignFailures(_) => EXIT_CAMPAIGN,
            CliError::Usage(_) => EXIT_READ,
            CliError::WriteFailed { .. } => EXIT_READ,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(e) => write!(f, "{e}"),
            CliError::Verdict(msg) => write!(f, "{msg}"),
            CliError::CampaignFailures(n) => write!(f, "{n} validation failures"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::WriteFailed { path, source } => write!(f, "cannot write '{path}': {source}"),
        }
    }
}

#[derive(Serialize)]
struct ExactOut {
    frac: String,
    decimal: f64,
}

impl From<&ExactTime> for ExactOut {
    fn from(value: &ExactTime) -> Self {
        ExactOut {
            frac: value.to_string(),
            decimal: *value.numer() as f64 / *value.denom() as f64,
        }
    }
}

#[derive(Serialize)]
struct JobSetOut {
    n: usize,
    p_max: Time,
    total: u128,
    processing_times: Vec<Time>,
}

impl From<&JobSetSummary> for JobSetOut {
    fn from(js: &JobSetSummary) -> Self {
        JobSetOut {
            n: js.n,
            p_max: js.p_max,
            total: js.total,
            processing_times: js.processing_times.clone(),
        }
    }
}

#[derive(Serialize)]
struct AnalyzeOut {
    processors: u32,
    transitions: Vec<TransitionVerdictOut>,
    all_satisfied: bool,
}

#[derive(Serialize)]
struct TransitionVerdictOut {
    from: String,
    to: String,
    upms: ExactOut,
    min_enable_deadline: Time,
    satisfied: bool,
    jobset: JobSetOut,
}

#[derive(Serialize)]
struct EnablementOut {
    task: String,
    deadline: Time,
    enabled_at: Time,
    met: bool,
}

#[derive(Serialize)]
struct JobVerdictOut {
    job: String,
    deadline: Time,
    completion: Option<Time>,
    met: bool,
}

#[derive(Serialize)]
struct RemJobOut {
    id: String,
    task: String,
    release: Time,
    exec_req: Time,
    deadline: Option<Time>,
}

#[derive(Serialize)]
struct TransitionRunOut {
    from: String,
    to: String,
    t_mcr: Time,
    t_enable: Time,
    delay: Time,
    aborted: Vec<String>,
    rem_jobs: Vec<RemJobOut>,
    enablement: Vec<EnablementOut>,
    remjob_deadlines: Vec<JobVerdictOut>,
    all_met: bool,
}

#[derive(Serialize)]
struct SimulateOut {
    mode: String,
    processors: u32,
    jobs: usize,
    makespan: Time,
    deadlines: Vec<JobVerdictOut>,
    all_met: bool,
}

#[derive(Serialize)]
struct PhaseOut {
    kind: String,
    start: Time,
    end: Time,
    jobs: usize,
}

#[derive(Serialize)]
struct RunOut {
    initial: String,
    phases: Vec<PhaseOut>,
    transitions: Vec<TransitionRunOut>,
    job_deadlines: Vec<JobVerdictOut>,
    all_enablement_met: bool,
    all_met: bool,
}

#[derive(Serialize)]
struct FailureOut {
    trial: u32,
    seed: String,
    detail: String,
}

#[derive(Serialize)]
struct CampaignOut {
    campaign: String,
    trials: u32,
    failures: Vec<FailureOut>,
    passed: bool,
}

impl From<&CampaignSummary> for CampaignOut {
    fn from(summary: &CampaignSummary) -> Self {
        CampaignOut {
            campaign: summary.campaign.clone(),
            trials: summary.trials,
            failures: summary
                .failures
                .iter()
                .map(|f| FailureOut {
                    trial: f.trial,
                    seed: format!("{:#018x}", f.seed),
                    detail: f.detail.clone(),
                })
                .collect(),
            passed: summary.passed(),
        }
    }
}

fn verdict_out(report: &DeadlineReport) -> Vec<JobVerdictOut> {
    report
        .per_job
        .iter()
        .map(|v| JobVerdictOut {
            job: v.job.to_string(),
            deadline: v.abs_deadline,
            completion: v.completion,
            met: v.met,
        })
        .collect()
}

fn transition_out(trace: &TransitionTrace) -> TransitionRunOut {
    TransitionRunOut {
        from: trace.from.clone(),
        to: trace.to.clone(),
        t_mcr: trace.t_mcr,
        t_enable: trace.t_enable,
        delay: trace.t_enable - trace.t_mcr,
        aborted: trace.aborted_jobs.iter().map(|j| j.to_string()).collect(),
        rem_jobs: trace
            .rem_jobs
            .iter()
            .map(|j| RemJobOut {
                id: j.id.to_string(),
                task: j.task.clone(),
                release: j.arrival,
                exec_req: j.exec_req,
                deadline: j.abs_deadline,
            })
            .collect(),
        enablement: trace
            .enablement_report
            .iter()
            .map(|v| EnablementOut {
                task: v.task.clone(),
                deadline: v.deadline,
                enabled_at: v.enabled_at,
                met: v.met,
            })
            .collect(),
        remjob_deadlines: verdict_out(&trace.remjob_deadline_report),
        all_met: trace.all_enablement_met() && trace.remjob_deadline_report.all_met,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::WriteFailed {
        path: path.display().to_string(),
        source,
    })
}

fn met_str(met: bool) -> &'static str {
    if met {
        "met"
    } else {
        "MISSED"
    }
}

fn cmd_analyze(system: &Path, json: bool) -> Result<(), CliError> {
    let sys = parse_system(system)?;
    let report: SystemReport = check_system(&sys).expect("system validated during parse");

    if json {
        let out = AnalyzeOut {
            processors: sys.processors,
            transitions: report
                .reports
                .iter()
                .map(|r| TransitionVerdictOut {
                    from: r.from.clone(),
                    to: r.to.clone(),
                    upms: (&r.upms_value).into(),
                    min_enable_deadline: r.min_enable_deadline,
                    satisfied: r.satisfied,
                    jobset: (&r.worst_case_jobset).into(),
                })
                .collect(),
            all_satisfied: report.all_satisfied,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("report serializes")
        );
    } else {
        println!(
            "{} processors, {} declared transitions",
            sys.processors,
            report.reports.len()
        );
        for r in &report.reports {
            println!(
                "  {:<24} upms {:<8} min enablement deadline {:<6} {}",
                format!("{} -> {}", r.from, r.to),
                r.upms_value.to_string(),
                r.min_enable_deadline,
                if r.satisfied {
                    "satisfied"
                } else {
                    "NOT satisfied"
                }
            );
        }
        println!(
            "system: {}",
            if report.all_satisfied {
                "schedulable transitions"
            } else {
                "NOT guaranteed"
            }
        );
    }

    if report.all_satisfied {
        Ok(())
    } else {
        Err(CliError::Verdict(
            "transition condition not satisfied for every pair".into(),
        ))
    }
}

fn transition_remjobs(
    sys: &MultiModeSystem,
    from: &str,
    to: &str,
    scenario: Option<&Path>,
) -> Result<(Vec<JobInstance>, Time), CliError> {
    let Some(path) = scenario else {
        let rem =
            build_worst_case_remjobs(sys, from, to).map_err(|e| CliError::Usage(e.to_string()))?;
        return Ok((rem, 0));
    };

    let doc = parse_transition_scenario(path)?;
    let (mode_idx, mode) = sys
        .mode(from)
        .ok_or_else(|| CliError::Usage(format!("no such mode: '{from}'")))?;
    let mut rem = Vec::new();
    for (i, rj) in doc.rem_jobs.iter().enumerate() {
        let (task_idx, task) = mode
            .task(&rj.task)
            .ok_or_else(|| CliError::Usage(format!("no task '{}' in mode '{from}'", rj.task)))?;
        rem.push(JobInstance {
            id: JobId::new(format!("{}/{}#{}", mode.name, task.name, i)),
            task: task.name.clone(),
            arrival: rj.release,
            exec_req: rj.exec,
            abs_deadline: Some(rj.release + task.deadline),
            rel_deadline: Some(task.deadline),
            release_key: ReleaseKey::new(mode_idx as u32, task_idx as u32, i as u32),
        });
    }
    Ok((rem, doc.t_mcr))
}

fn cmd_transition(
    system: &Path,
    from: &str,
    to: &str,
    scenario: Option<&Path>,
    trace_path: Option<&Path>,
    gantt: bool,
    json: bool,
) -> Result<(), CliError> {
    let sys = parse_system(system)?;
    let (rem, t_mcr) = transition_remjobs(&sys, from, to, scenario)?;
    let trace =
        run_transition(&sys, from, to, rem, t_mcr).map_err(|e| CliError::Usage(e.to_string()))?;

    if let Some(path) = trace_path {
        let header = TraceHeader {
            version: 1,
            m: sys.processors,
            label: format!("transition {from}->{to} t_mcr={t_mcr}"),
        };
        write_file(path, &io::write_trace(&[(header, &trace.rem_schedule)]))?;
    }

    let out = transition_out(&trace);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("report serializes")
        );
    } else {
        println!(
            "transition {from} -> {to}: t_mcr {t_mcr}, {} rem-jobs, t_enable {} (delay {})",
            trace.rem_jobs.len(),
            trace.t_enable,
            trace.t_enable - t_mcr
        );
        println!(
            "enablement (all tasks enabled simultaneously at {}):",
            trace.t_enable
        );
        for v in &trace.enablement_report {
            println!(
                "  {:<12} deadline {:<6} {}",
                v.task,
                v.deadline,
                met_str(v.met)
            );
        }
        if !trace.remjob_deadline_report.per_job.is_empty() {
            println!("rem-job deadlines:");
            for v in &trace.remjob_deadline_report.per_job {
                println!(
                    "  {:<20} deadline {:<6} completion {:<6} {}",
                    v.job.to_string(),
                    v.abs_deadline,
                    v.completion.map_or("-".into(), |c| c.to_string()),
                    met_str(v.met)
                );
            }
        }
    }
    if gantt {
        print!(
            "{}",
            gantt::render(&trace.rem_schedule, sys.processors, t_mcr, trace.t_enable)
        );
    }

    if out.all_met {
        Ok(())
    } else {
        Err(CliError::Verdict("transition missed a deadline".into()))
    }
}

fn cmd_simulate(
    system: &Path,
    mode_name: &str,
    horizon: Option<Time>,
    scenario: Option<&Path>,
    trace_path: Option<&Path>,
    gantt: bool,
    json: bool,
) -> Result<(), CliError> {
    let sys = parse_system(system)?;
    let (mode_idx, mode) = sys
        .mode(mode_name)
        .ok_or_else(|| CliError::Usage(format!("no such mode: '{mode_name}'")))?;

    let scenario: ArrivalScenario = match (scenario, horizon) {
        (Some(path), _) => {
            let sc = parse_scenario(path)?;
            let violations = validate_scenario(mode, &sc);
            if !violations.is_empty() {
                let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
                return Err(CliError::Usage(format!(
                    "invalid scenario:\n{}",
                    lines.join("\n")
                )));
            }
            sc
        }
        (None, Some(h)) => periodic_scenario(mode, h),
        (None, None) => {
            return Err(CliError::Usage(
                "either --horizon or --scenario is required".into(),
            ))
        }
    };

    let jobs = scenario_jobs(mode, mode_idx as u32, &scenario, 0);
    let prio = assign_priorities(mode.policy, &jobs);
    let trace = simulate(&jobs, &prio, sys.processors);
    let report = check_trace_deadlines(&trace, &jobs).expect("trace covers its own jobs");

    if let Some(path) = trace_path {
        let header = TraceHeader {
            version: 1,
            m: sys.processors,
            label: format!("steady mode={mode_name}"),
        };
        write_file(path, &io::write_trace(&[(header, &trace)]))?;
    }

    if json {
        let out = SimulateOut {
            mode: mode_name.into(),
            processors: sys.processors,
            jobs: jobs.len(),
            makespan: trace.makespan(),
            deadlines: verdict_out(&report),
            all_met: report.all_met,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("report serializes")
        );
    } else {
        println!(
            "mode {mode_name} under {}: {} jobs on {} processors, makespan {}",
            mode.policy,
            jobs.len(),
            sys.processors,
            trace.makespan()
        );
        for v in &report.per_job {
            println!(
                "  {:<20} deadline {:<6} completion {:<6} {}",
                v.job.to_string(),
                v.abs_deadline,
                v.completion.map_or("-".into(), |c| c.to_string()),
                met_str(v.met)
            );
        }
        println!(
            "deadlines: {}",
            if report.all_met { "all met" } else { "MISSED" }
        );
    }
    if gantt {
        print!(
            "{}",
            gantt::render(&trace, sys.processors, 0, trace.makespan())
        );
    }

    if report.all_met {
        Ok(())
    } else {
        Err(CliError::Verdict("steady-state deadline missed".into()))
    }
}

fn phase_label(phase: &SystemPhase) -> String {
    match phase {
        SystemPhase::Steady { mode } => format!("steady mode={mode}"),
        SystemPhase::Transition { from, to, t_mcr } => {
            format!("transition {from}->{to} t_mcr={t_mcr}")
        }
    }
}

fn cmd_run(
    system: &Path,
    script: &Path,
    trace_path: Option<&Path>,
    json: bool,
) -> Result<(), CliError> {
    let sys = parse_system(system)?;
    let script = parse_run_script(script)?;

    let mut scenarios: BTreeMap<String, ArrivalScenario> = BTreeMap::new();
    for mode in &sys.modes {
        let scenario = match script.scenarios.get(&mode.name) {
            Some(doc) => doc.to_scenario(),
            None => periodic_scenario(mode, script.horizon),
        };
        scenarios.insert(mode.name.clone(), scenario);
    }

    let run: FullRunTrace = run_multimode(&sys, &script.initial, &scenarios, &script.mcr_events())
        .map_err(|e| CliError::Usage(e.to_string()))?;

    if let Some(path) = trace_path {
        let phases: Vec<(TraceHeader, &modeswitch::ScheduleTrace)> = run
            .phases
            .iter()
            .map(|p| {
                (
                    TraceHeader {
                        version: 1,
                        m: sys.processors,
                        label: format!("{} start={} end={}", phase_label(&p.phase), p.start, p.end),
                    },
                    &p.trace,
                )
            })
            .collect();
        write_file(path, &io::write_trace(&phases))?;
    }

    if json {
        let out = RunOut {
            initial: script.initial.clone(),
            phases: run
                .phases
                .iter()
                .map(|p| PhaseOut {
                    kind: phase_label(&p.phase),
                    start: p.start,
                    end: p.end,
                    jobs: p.jobs.len(),
                })
                .collect(),
            transitions: run.transitions.iter().map(transition_out).collect(),
            job_deadlines: verdict_out(&run.job_deadlines),
            all_enablement_met: run.all_enablement_met,
            all_met: run.all_met(),
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("report serializes")
        );
    } else {
        println!(
            "run from mode {} with {} MCRs:",
            script.initial,
            run.mcrs.len()
        );
        for p in &run.phases {
            println!(
                "  [{:>5}, {:>5})  {:<40} {} jobs",
                p.start,
                p.end,
                phase_label(&p.phase),
                p.jobs.len()
            );
        }
        for t in &run.transitions {
            println!(
                "  {} -> {}: {} aborted, {} rem-jobs, enabled at {} ({})",
                t.from,
                t.to,
                t.aborted_jobs.len(),
                t.rem_jobs.len(),
                t.t_enable,
                if t.all_enablement_met() {
                    "deadlines met"
                } else {
                    "deadline MISSED"
                }
            );
        }
        println!(
            "job deadlines: {} verdicts, {}; enablement: {}",
            run.job_deadlines.per_job.len(),
            if run.job_deadlines.all_met {
                "all met"
            } else {
                "MISSED"
            },
            if run.all_enablement_met {
                "all met"
            } else {
                "MISSED"
            }
        );
    }

    if run.all_met() {
        Ok(())
    } else {
        Err(CliError::Verdict("run missed a deadline".into()))
    }
}

fn report_campaigns(summaries: &[CampaignSummary], json: bool) -> Result<(), CliError> {
    let failures: usize = summaries.iter().map(|s| s.failures.len()).sum();
    if json {
        let out: Vec<CampaignOut> = summaries.iter().map(CampaignOut::from).collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&out).expect("report serializes")
        );
    } else {
        for summary in summaries {
            println!("{summary}");
        }
        println!("{failures} failures");
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::CampaignFailures(failures))
    }
}

fn cmd_validate(campaign: &ValidateCommand) -> Result<(), CliError> {
    let (summaries, json) = match campaign {
        ValidateCommand::Bound {
            seed,
            trials,
            n_max,
            m_min,
            m_max,
            p_max,
            json,
        } => {
            let cfg = FuzzConfig {
                seed: *seed,
                trials: *trials,
                n_range: 1..=*n_max,
                m_range: *m_min..=*m_max,
                p_range: 1..=*p_max,
                ..FuzzConfig::default()
            };
            (vec![verify_bound_fuzz(&cfg)], *json)
        }
        ValidateCommand::Predictability { seed, trials, json } => {
            let cfg = FuzzConfig {
                seed: *seed,
                trials: *trials,
                ..FuzzConfig::default()
            };
            (vec![verify_predictability(&cfg)], *json)
        }
        ValidateCommand::Sufficiency {
            system,
            from,
            to,
            systems,
            seed,
            trials,
            json,
        } => {
            let cfg = FuzzConfig {
                seed: *seed,
                trials: *trials,
                ..FuzzConfig::default()
            };
            let mut summaries = Vec::new();
            match system {
                Some(path) => {
                    let sys = parse_system(path)?;
                    match (from, to) {
                        (Some(from), Some(to)) => {
                            summaries.push(
                                verify_condition_sufficiency(&sys, from, to, &cfg)
                                    .map_err(|e| CliError::Verdict(e.to_string()))?,
                            );
                        }
                        _ => summaries.extend(
                            verify_system_sufficiency(&sys, &cfg)
                                .map_err(|e| CliError::Verdict(e.to_string()))?,
                        ),
                    }
                }
                None => {
                    // The boundary instance first: the bound equals the
                    // minimum enablement deadline exactly.
                    let sys = boundary_system();
                    summaries.extend(
                        verify_system_sufficiency(&sys, &cfg)
                            .map_err(|e| CliError::Verdict(e.to_string()))?,
                    );
                    for i in 0..*systems {
                        let sys = generate_satisfied_system(
                            seed.wrapping_add(i as u64),
                            cfg.max_release_offset,
                        );
                        summaries.extend(
                            verify_system_sufficiency(&sys, &cfg)
                                .map_err(|e| CliError::Verdict(e.to_string()))?,
                        );
                    }
                }
            }
            (summaries, *json)
        }
    };

    report_campaigns(&summaries, json)
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze { system, json } => cmd_analyze(system, *json),
        Command::Transition {
            system,
            from,
            to,
            scenario,
            trace,
            gantt,
            json,
            ..
        } => cmd_transition(
            system,
            from,
            to,
            scenario.as_deref(),
            trace.as_deref(),
            *gantt,
            *json,
        ),
        Command::Simulate {
            system,
            mode,
            horizon,
            scenario,
            trace,
            gantt,
            json,
        } => cmd_simulate(
            system,
            mode,
            *horizon,
            scenario.as_deref(),
            trace.as_deref(),
            *gantt,
            *json,
        ),
        Command::Run {
            system,
            script,
            trace,
            json,
        } => cmd_run(system, script, trace.as_deref(), *json),
        Command::Validate { campaign } => cmd_validate(campaign),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cli)));
    match outcome {
        Ok(Ok(())) => ExitCode::from(EXIT_OK),
        Ok(Err(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
        Err(_) => {
            eprintln!("error: internal invariant breach");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
