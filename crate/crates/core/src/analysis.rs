//! Makespan upper bound for fixed job-level priority scheduling and the
//! sufficient transition-schedulability condition built on it.
//!
//! For a set of jobs all ready at time 0 on `m` identical processors under
//! any global, work-conserving, fixed job-level priority scheduler, the
//! completion time of the last job never exceeds
//!
//! ```text
//!   upms(J, m) = p_max                                  if m >= n
//!   upms(J, m) = total/m + (1 - 1/m) * p_max            otherwise
//! ```
//!
//! A transition is accepted when this bound over the complete-set wcets is
//! at most the smallest enablement deadline of the target mode. All
//! arithmetic is exact rational; boundary cases are decided precisely.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::model::{validate_system, MultiModeSystem, Time, TransitionSpec, Violation};

/// Exact rational time value (ticks).
pub type ExactTime = Ratio<u128>;

/// The aggregate facts of a job set that the makespan bound depends on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JobSetSummary {
    pub processing_times: Vec<Time>,
    pub n: usize,
    pub p_max: Time,
    pub total: u128,
}

impl JobSetSummary {
    pub fn from_times(processing_times: impl IntoIterator<Item = Time>) -> Self {
        let processing_times: Vec<Time> = processing_times.into_iter().collect();
        JobSetSummary {
            n: processing_times.len(),
            p_max: processing_times.iter().copied().max().unwrap_or(0),
            total: processing_times.iter().map(|&p| p as u128).sum(),
            processing_times,
        }
    }
}

/// Upper bound on the makespan of the job set on `m` identical processors,
/// over every fixed job-level priority order. Exact rational result.
///
/// The empty set yields 0. For `m = 1` the bound is the total work, which
/// is the exact single-processor makespan.
pub fn upms(jobset: &JobSetSummary, m: u32) -> ExactTime {
    assert!(m >= 1, "processor count must be >= 1");
    let m = m as u128;
    if jobset.n == 0 {
        return ExactTime::from_integer(0);
    }
    if m == 1 {
        return ExactTime::from_integer(jobset.total);
    }
    if m >= jobset.n as u128 {
        return ExactTime::from_integer(jobset.p_max as u128);
    }
    // total/m + (1 - 1/m) * p_max == (total + (m - 1) * p_max) / m
    Ratio::new(jobset.total + (m - 1) * jobset.p_max as u128, m)
}

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("no such transition: '{from}' -> '{to}'")]
    NoSuchTransition { from: String, to: String },
    #[error("transition '{from}' -> '{to}' has no enablement deadlines")]
    EmptyEnablementMap { from: String, to: String },
    #[error("invalid system:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    InvalidSystem(Vec<Violation>),
}

/// Smallest enablement deadline over all target-mode tasks of a transition.
pub fn min_enablement_deadline(spec: &TransitionSpec) -> Result<Time, AnalysisError> {
    spec.enablement_deadlines
        .values()
        .copied()
        .min()
        .ok_or_else(|| AnalysisError::EmptyEnablementMap {
            from: spec.from.clone(),
            to: spec.to.clone(),
        })
}

/// Verdict for one ordered mode pair: the makespan bound over the
/// complete-set wcets against the smallest enablement deadline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionReport {
    pub from: String,
    pub to: String,
    pub upms_value: ExactTime,
    pub min_enable_deadline: Time,
    pub satisfied: bool,
    pub worst_case_jobset: JobSetSummary,
}

impl fmt::Display for TransitionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} -> {}: upms {} vs min enablement deadline {}: {}",
            self.from,
            self.to,
            self.upms_value,
            self.min_enable_deadline,
            if self.satisfied {
                "satisfied"
            } else {
                "NOT satisfied"
            }
        )
    }
}

/// Evaluate the transition condition for one ordered mode pair: satisfied
/// iff `upms(wcets of the complete set, m) <= min enablement deadline`
/// (inclusive comparison, decided in exact arithmetic).
pub fn check_transition_condition(
    sys: &MultiModeSystem,
    from: &str,
    to: &str,
) -> Result<TransitionReport, AnalysisError> {
    let spec = sys
        .transition(from, to)
        .ok_or_else(|| AnalysisError::NoSuchTransition {
            from: from.into(),
            to: to.into(),
        })?;
    let from_mode =
        sys.mode(from)
            .map(|(_, m)| m)
            .ok_or_else(|| AnalysisError::NoSuchTransition {
                from: from.into(),
                to: to.into(),
            })?;

    let wcets = from_mode
        .tasks
        .iter()
        .filter(|t| spec.complete_set.contains(&t.name))
        .map(|t| t.wcet);
    let jobset = JobSetSummary::from_times(wcets);
    let bound = upms(&jobset, sys.processors);
    let min_deadline = min_enablement_deadline(spec)?;
    Ok(TransitionReport {
        from: from.into(),
        to: to.into(),
        satisfied: bound <= ExactTime::from_integer(min_deadline as u128),
        upms_value: bound,
        min_enable_deadline: min_deadline,
        worst_case_jobset: jobset,
    })
}

/// Reports for every declared transition plus the system-wide verdict.
#[derive(Debug, Clone)]
pub struct SystemReport {
    pub reports: Vec<TransitionReport>,
    pub all_satisfied: bool,
}

/// Evaluate the transition condition over every declared transition of a
/// validated system. The system verdict is the conjunction.
pub fn check_system(sys: &MultiModeSystem) -> Result<SystemReport, AnalysisError> {
    let violations = validate_system(sys);
    if !violations.is_empty() {
        return Err(AnalysisError::InvalidSystem(violations));
    }
    let mut reports = Vec::new();
    for spec in &sys.transitions {
        reports.push(check_transition_condition(sys, &spec.from, &spec.to)?);
    }
    let all_satisfied = reports.iter().all(|r| r.satisfied);
    Ok(SystemReport {
        reports,
        all_satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Mode, Policy, TaskSpec};
    use std::collections::{BTreeMap, BTreeSet};

    fn exact(n: u128) -> ExactTime {
        ExactTime::from_integer(n)
    }

    #[test]
    fn bound_is_p_max_when_processors_cover_jobs() {
        let js = JobSetSummary::from_times([3, 5]);
        assert_eq!(upms(&js, 4), exact(5));
    }

    #[test]
    fn bound_general_case() {
        let js = JobSetSummary::from_times([4, 4, 4]);
        assert_eq!(upms(&js, 2), exact(8));
    }

    #[test]
    fn bound_attained_instance() {
        let js = JobSetSummary::from_times([3, 3, 3]);
        assert_eq!(upms(&js, 2), exact(6));
    }

    #[test]
    fn bound_empty_set_is_zero() {
        let js = JobSetSummary::from_times([]);
        for m in 1..5 {
            assert_eq!(upms(&js, m), exact(0));
        }
    }

    #[test]
    fn bound_is_exact_rational() {
        let js = JobSetSummary::from_times([2, 3, 4]);
        assert_eq!(upms(&js, 2), Ratio::new(13, 2));
    }

    #[test]
    fn single_processor_bound_is_total_work() {
        let js = JobSetSummary::from_times([2, 3, 4]);
        assert_eq!(upms(&js, 1), exact(9));
    }

    fn condition_system(wcets: &[Time], deadlines: &[(&str, Time)]) -> MultiModeSystem {
        let old_tasks: Vec<TaskSpec> = wcets
            .iter()
            .enumerate()
            .map(|(i, &c)| TaskSpec::new(format!("old{i}"), c, 100, 100))
            .collect();
        let new_tasks: Vec<TaskSpec> = deadlines
            .iter()
            .map(|(name, _)| TaskSpec::new(*name, 1, 50, 50))
            .collect();
        let complete_set: BTreeSet<String> = old_tasks.iter().map(|t| t.name.clone()).collect();
        let enablement_deadlines: BTreeMap<String, Time> =
            deadlines.iter().map(|(n, d)| (n.to_string(), *d)).collect();
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
                    tasks: new_tasks,
                },
            ],
            transitions: vec![TransitionSpec {
                from: "src".into(),
                to: "dst".into(),
                complete_set,
                enablement_deadlines,
            }],
        }
    }

    #[test]
    fn min_enablement_deadline_examples() {
        let sys = condition_system(&[1], &[("a", 8), ("b", 10), ("c", 9)]);
        assert_eq!(min_enablement_deadline(&sys.transitions[0]).unwrap(), 8);
        let sys = condition_system(&[1], &[("a", 5)]);
        assert_eq!(min_enablement_deadline(&sys.transitions[0]).unwrap(), 5);
        let sys = condition_system(&[1], &[("a", 7), ("b", 7)]);
        assert_eq!(min_enablement_deadline(&sys.transitions[0]).unwrap(), 7);
    }

    #[test]
    fn condition_boundary_satisfied() {
        let sys = condition_system(&[4, 4, 4], &[("a", 8), ("b", 10), ("c", 9)]);
        let report = check_transition_condition(&sys, "src", "dst").unwrap();
        assert_eq!(report.upms_value, exact(8));
        assert_eq!(report.min_enable_deadline, 8);
        assert!(report.satisfied);
    }

    #[test]
    fn condition_tight_deadline_unsatisfied() {
        let sys = condition_system(&[4, 4, 4], &[("a", 7), ("b", 10), ("c", 9)]);
        let report = check_transition_condition(&sys, "src", "dst").unwrap();
        assert_eq!(report.upms_value, exact(8));
        assert!(!report.satisfied);
    }

    #[test]
    fn condition_empty_complete_set_trivially_satisfied() {
        let mut sys = condition_system(&[4], &[("a", 0)]);
        sys.transitions[0].complete_set.clear();
        let report = check_transition_condition(&sys, "src", "dst").unwrap();
        assert_eq!(report.upms_value, exact(0));
        assert!(report.satisfied);
    }

    #[test]
    fn unknown_transition_is_an_error() {
        let sys = condition_system(&[4], &[("a", 5)]);
        assert!(matches!(
            check_transition_condition(&sys, "dst", "src"),
            Err(AnalysisError::NoSuchTransition { .. })
        ));
    }

    #[test]
    fn system_report_covers_every_declared_transition() {
        let sys = crate::model::tests::two_mode_system();
        let report = check_system(&sys).unwrap();
        assert_eq!(report.reports.len(), 2);
        assert!(report.all_satisfied);
    }

    #[test]
    fn one_failing_pair_flips_system_verdict() {
        let sys = condition_system(&[4, 4, 4], &[("a", 7), ("b", 10), ("c", 9)]);
        let report = check_system(&sys).unwrap();
        assert!(!report.all_satisfied);
        assert_eq!(report.reports.len(), 1);
    }

    #[test]
    fn empty_enablement_map_is_an_error() {
        let spec = TransitionSpec {
            from: "src".into(),
            to: "dst".into(),
            complete_set: BTreeSet::new(),
            enablement_deadlines: BTreeMap::new(),
        };
        assert!(matches!(
            min_enablement_deadline(&spec),
            Err(AnalysisError::EmptyEnablementMap { .. })
        ));
    }

    #[test]
    fn three_modes_with_full_matrix_yield_six_reports() {
        let mode = |name: &str| Mode {
            name: name.into(),
            policy: Policy::Edf,
            tasks: vec![TaskSpec::new(format!("{name}_t"), 2, 10, 10)],
        };
        let names = ["red", "green", "blue"];
        let mut transitions = Vec::new();
        for from in names {
            for to in names {
                if from == to {
                    continue;
                }
                transitions.push(TransitionSpec {
                    from: from.into(),
                    to: to.into(),
                    complete_set: [format!("{from}_t")].into_iter().collect(),
                    enablement_deadlines: [(format!("{to}_t"), 4)].into_iter().collect(),
                });
            }
        }
        let sys = MultiModeSystem {
            processors: 2,
            modes: names.iter().map(|n| mode(n)).collect(),
            transitions,
        };
        let report = check_system(&sys).unwrap();
        assert_eq!(report.reports.len(), 6);
        assert!(report.all_satisfied);
    }

    #[test]
    fn invalid_system_is_rejected_with_violations() {
        let mut sys = condition_system(&[4], &[("a", 5)]);
        sys.modes[0].tasks[0].deadline = 200; // D > T
        match check_system(&sys) {
            Err(AnalysisError::InvalidSystem(violations)) => assert_eq!(violations.len(), 1),
            other => panic!("expected InvalidSystem, got {other:?}"),
        }
    }

    #[test]
    fn case_consistency_at_equal_counts() {
        // At n = m the dedicated branch (p_max) is never looser than the
        // general formula evaluated on the same set.
        for n in 1..6u32 {
            let times: Vec<Time> = (1..=n as Time).map(|i| i * 3).collect();
            let js = JobSetSummary::from_times(times);
            let p_max = exact(js.p_max as u128);
            let general = Ratio::new(js.total + (n as u128 - 1) * js.p_max as u128, n as u128);
            assert!(p_max <= general, "n = m = {n}");
        }
    }
}
