//! Multi-mode real-time scheduling toolkit for identical multiprocessors.
//!
//! The pieces, bottom up:
//!
//! - [`model`]: sporadic tasks, modes, transitions, job instances and
//!   arrival scenarios, plus structural validation.
//! - [`sim`]: a deterministic discrete-event simulator of global,
//!   work-conserving, preemptive, fixed job-level priority scheduling
//!   (EDF, DM, FIFO), with trace well-formedness checking.
//! - [`analysis`]: the exact-rational makespan upper bound for such
//!   schedulers and the sufficient transition-schedulability condition.
//! - [`protocol`]: the synchronous mode-change protocol — abort, collect
//!   rem-jobs, finish them under the old scheduler, enable the whole new
//!   mode at once — for single transitions and full multi-mode runs.
//! - [`oracle`]: brute-force and fuzz campaigns validating the bound, the
//!   predictability argument and the condition's sufficiency against the
//!   simulator.
//! - [`io`]: JSON system/scenario documents and JSON-lines trace export.
//!
//! ```
//! use modeswitch::model::{Mode, MultiModeSystem, Policy, TaskSpec, TransitionSpec};
//! use modeswitch::{build_worst_case_remjobs, check_transition_condition, run_transition};
//!
//! let sys = MultiModeSystem {
//!     processors: 2,
//!     modes: vec![
//!         Mode {
//!             name: "busy".into(),
//!             policy: Policy::Edf,
//!             tasks: vec![
//!                 TaskSpec::new("a", 3, 12, 12),
//!                 TaskSpec::new("b", 3, 12, 12),
//!                 TaskSpec::new("c", 3, 12, 12),
//!             ],
//!         },
//!         Mode {
//!             name: "calm".into(),
//!             policy: Policy::Edf,
//!             tasks: vec![TaskSpec::new("d", 1, 4, 4)],
//!         },
//!     ],
//!     transitions: vec![TransitionSpec {
//!         from: "busy".into(),
//!         to: "calm".into(),
//!         complete_set: ["a", "b", "c"].iter().map(|s| s.to_string()).collect(),
//!         enablement_deadlines: [("d".to_string(), 6)].into_iter().collect(),
//!     }],
//! };
//!
//! // Work {3,3,3} on two processors is bounded by 9/2 + 3/2 = 6, which
//! // meets the enablement deadline of 6: the transition is accepted.
//! let report = check_transition_condition(&sys, "busy", "calm").unwrap();
//! assert!(report.satisfied);
//!
//! // The worst case (all three release at the request with full wcet)
//! // enables the new mode exactly at the bound.
//! let rem = build_worst_case_remjobs(&sys, "busy", "calm").unwrap();
//! let trace = run_transition(&sys, "busy", "calm", rem, 0).unwrap();
//! assert_eq!(trace.t_enable, 6);
//! assert!(trace.all_enablement_met());
//! ```

pub mod analysis;
pub mod io;
pub mod model;
pub mod oracle;
pub mod protocol;
pub mod sim;

pub use analysis::{check_system, check_transition_condition, upms, JobSetSummary};
pub use model::{
    build_worst_case_remjobs, periodic_scenario, validate_system, JobId, JobInstance, MCREvent,
    Mode, MultiModeSystem, Policy, TaskSpec, Time, TransitionSpec,
};
pub use protocol::{run_multimode, run_transition, FullRunTrace, TransitionTrace};
pub use sim::{
    assign_priorities, check_trace_deadlines, simulate, verify_trace_wellformed,
    PriorityAssignment, ScheduleTrace,
};
