//! Acceptance suite. Each test is one criterion, prints one PASS line when
//! it holds, and pins its tolerances in code:
//!
//!  1. bound unit values (exact rational equality)
//!  2. bound soundness: 200 seeded job sets, every priority order simulated
//!  3. bound attainment on {3,3,3} x 2 processors under every order
//!  4. bound monotonicity in jobs and in processing times (1000 cases each)
//!  5. predictability: 500 seeded execution-time reductions
//!  6. transition-condition sufficiency: boundary system + 20 generated
//!     systems, 100 fuzzed scenarios each
//!  7. trace well-formedness across the suites
//!  8. worst-case transition via the CLI: one common enablement instant
//!  9. byte-identical reruns of every command with fixed seeds

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use modeswitch::analysis::{upms, ExactTime, JobSetSummary};
use modeswitch::model::{build_worst_case_remjobs, periodic_scenario, JobId, Time};
use modeswitch::oracle::{
    boundary_system, brute_force_max_makespan, generate_satisfied_system, verify_bound_fuzz,
    verify_predictability, verify_system_sufficiency, FuzzConfig,
};
use modeswitch::protocol::{run_multimode, run_transition};
use modeswitch::sim::{simulate, verify_trace_wellformed, PriorityAssignment};

fn exact(n: u128) -> ExactTime {
    ExactTime::from_integer(n)
}

fn budget(name: &str, elapsed: Duration, limit: Duration) {
    assert!(
        elapsed <= limit,
        "{name} took {elapsed:?}, over the {limit:?} budget"
    );
}

#[test]
fn c1_bound_unit_values() {
    let start = Instant::now();
    assert_eq!(upms(&JobSetSummary::from_times([3, 5]), 4), exact(5));
    assert_eq!(upms(&JobSetSummary::from_times([4, 4, 4]), 2), exact(8));
    for m in 1..=6 {
        assert_eq!(upms(&JobSetSummary::from_times([]), m), exact(0));
    }
    assert_eq!(upms(&JobSetSummary::from_times([3, 3, 3]), 2), exact(6));
    assert_eq!(
        upms(&JobSetSummary::from_times([2, 3, 4]), 2),
        Ratio::new(13, 2)
    );
    budget("criterion 1", start.elapsed(), Duration::from_secs(1));
    println!("PASS criterion 1: bound unit values, exact rational equality");
}

#[test]
fn c2_bound_soundness_over_all_priority_orders() {
    let start = Instant::now();
    let cfg = FuzzConfig {
        seed: 42,
        trials: 200,
        n_range: 1..=7,
        m_range: 2..=4,
        p_range: 1..=20,
        ..FuzzConfig::default()
    };
    let summary = verify_bound_fuzz(&cfg);
    assert!(summary.passed(), "{summary}");
    budget("criterion 2", start.elapsed(), Duration::from_secs(60));
    println!(
        "PASS criterion 2: {} job sets, all n! orders each, zero bound violations ({:?})",
        summary.trials,
        start.elapsed()
    );
}

#[test]
fn c3_bound_attained_under_every_order() {
    let oracle = brute_force_max_makespan(&[3, 3, 3], 2).unwrap();
    assert_eq!(oracle.bound, exact(6));
    assert_eq!(oracle.max_makespan, 6);

    // Not just the maximum: every one of the 6 orders lands exactly on the
    // bound.
    let jobs: Vec<Time> = vec![3, 3, 3];
    let ids: Vec<JobId> = (0..3).map(|i| JobId::new(format!("j{i}"))).collect();
    let mut orders_seen = 0;
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for perm in perms {
        let order: Vec<JobId> = perm.iter().map(|&i| ids[i].clone()).collect();
        let prio = PriorityAssignment::from_order(order);
        let sim_jobs: Vec<modeswitch::model::JobInstance> = jobs
            .iter()
            .enumerate()
            .map(|(i, &p)| modeswitch::model::JobInstance {
                id: ids[i].clone(),
                task: format!("j{i}"),
                arrival: 0,
                exec_req: p,
                abs_deadline: None,
                rel_deadline: None,
                release_key: modeswitch::model::ReleaseKey::new(0, i as u32, 0),
            })
            .collect();
        let trace = simulate(&sim_jobs, &prio, 2);
        assert_eq!(trace.makespan(), 6, "order {perm:?}");
        orders_seen += 1;
    }
    assert_eq!(orders_seen, 6);
    println!("PASS criterion 3: {{3,3,3}} on 2 processors attains the bound under every order");
}

#[test]
fn c4_bound_monotonicity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    for case in 0..1000 {
        let n = rng.random_range(0..8usize);
        let ps: Vec<Time> = (0..n).map(|_| rng.random_range(1..=30)).collect();
        let m = rng.random_range(1..=5u32);
        let before = upms(&JobSetSummary::from_times(ps.iter().copied()), m);
        let mut grown = ps.clone();
        grown.push(rng.random_range(1..=30));
        let after = upms(&JobSetSummary::from_times(grown), m);
        assert!(after >= before, "job addition case {case}: {ps:?} m={m}");
    }

    for case in 0..1000 {
        let n = rng.random_range(1..8usize);
        let ps: Vec<Time> = (0..n).map(|_| rng.random_range(1..=30)).collect();
        let m = rng.random_range(1..=5u32);
        let before = upms(&JobSetSummary::from_times(ps.iter().copied()), m);
        let mut grown = ps.clone();
        let i = rng.random_range(0..n);
        grown[i] += rng.random_range(0..=20);
        let after = upms(&JobSetSummary::from_times(grown), m);
        assert!(after >= before, "growth case {case}: {ps:?} m={m}");
    }

    budget("criterion 4", start.elapsed(), Duration::from_secs(5));
    println!("PASS criterion 4: bound monotone over 1000 job-addition and 1000 growth cases");
}

#[test]
fn c5_predictability_under_reduction() {
    let start = Instant::now();
    let cfg = FuzzConfig {
        seed: 1234,
        trials: 500,
        ..FuzzConfig::default()
    };
    let summary = verify_predictability(&cfg);
    assert!(summary.passed(), "{summary}");
    budget("criterion 5", start.elapsed(), Duration::from_secs(30));
    println!(
        "PASS criterion 5: {} reductions, no completion ever delayed ({:?})",
        summary.trials,
        start.elapsed()
    );
}

#[test]
fn c6_condition_sufficiency() {
    let start = Instant::now();
    let cfg = FuzzConfig {
        seed: 99,
        trials: 100,
        ..FuzzConfig::default()
    };

    // Boundary system: the bound equals the minimum enablement deadline.
    // The worst case must enable exactly at the deadline and still count as
    // met.
    let boundary = boundary_system();
    let rem = build_worst_case_remjobs(&boundary, "src", "dst").unwrap();
    let trace = run_transition(&boundary, "src", "dst", rem, 0).unwrap();
    assert_eq!(trace.t_enable, 6);
    assert_eq!(trace.enablement_report[0].deadline, 6);
    assert!(
        trace.enablement_report[0].met,
        "boundary enablement at the deadline counts as met"
    );

    let mut campaigns = verify_system_sufficiency(&boundary, &cfg).unwrap();
    for i in 0..20u64 {
        let sys = generate_satisfied_system(1000 + i, cfg.max_release_offset);
        campaigns.extend(verify_system_sufficiency(&sys, &cfg).unwrap());
    }
    for summary in &campaigns {
        assert!(summary.passed(), "{summary}");
        assert_eq!(summary.trials, 100);
    }
    assert_eq!(campaigns.len(), 21);

    budget("criterion 6", start.elapsed(), Duration::from_secs(120));
    println!(
        "PASS criterion 6: 21 systems x 100 fuzzed scenarios, zero rem-job or enablement misses ({:?})",
        start.elapsed()
    );
}

#[test]
fn c7_trace_wellformedness_across_suites() {
    // The campaigns in criteria 2, 5 and 6 check every simulated trace
    // internally and fail on any violation. This pass drives the checker
    // directly across all three kinds of schedule the toolkit produces.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0usize;

    // Synchronous-release job sets under random orders.
    for _ in 0..300 {
        let n = rng.random_range(1..8usize);
        let m = rng.random_range(1..=4u32);
        let jobs: Vec<modeswitch::model::JobInstance> = (0..n)
            .map(|i| modeswitch::model::JobInstance {
                id: JobId::new(format!("j{i}")),
                task: format!("j{i}"),
                arrival: rng.random_range(0..10),
                exec_req: rng.random_range(0..15),
                abs_deadline: None,
                rel_deadline: None,
                release_key: modeswitch::model::ReleaseKey::new(0, i as u32, 0),
            })
            .collect();
        let mut order: Vec<JobId> = jobs.iter().map(|j| j.id.clone()).collect();
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng);
        let prio = PriorityAssignment::from_order(order);
        let trace = simulate(&jobs, &prio, m);
        let violations = verify_trace_wellformed(&trace, &jobs, &prio, m);
        assert!(violations.is_empty(), "{violations:?}");
        checked += 1;
    }

    // Transition schedules.
    for seed in 0..30u64 {
        let sys = generate_satisfied_system(seed, 10);
        let rem = build_worst_case_remjobs(&sys, "src", "dst").unwrap();
        let trace = run_transition(&sys, "src", "dst", rem, 3).unwrap();
        let sim_jobs = trace.sim_jobs();
        let prio = trace.rem_priorities(&sys).unwrap();
        let violations =
            verify_trace_wellformed(&trace.rem_schedule, &sim_jobs, &prio, sys.processors);
        assert!(violations.is_empty(), "seed {seed}: {violations:?}");
        checked += 1;
    }

    // Every phase of a full multi-mode run.
    let sys = modeswitch::io::parse_system(systems_dir().join("fig1.json")).unwrap();
    let scenarios = sys
        .modes
        .iter()
        .map(|m| (m.name.clone(), periodic_scenario(m, 24)))
        .collect();
    let mcrs = vec![modeswitch::model::MCREvent {
        time: 14,
        target_mode: "alarm".into(),
    }];
    let run = run_multimode(&sys, "nominal", &scenarios, &mcrs).unwrap();
    for phase in &run.phases {
        let violations =
            verify_trace_wellformed(&phase.trace, &phase.jobs, &phase.priorities, sys.processors);
        assert!(violations.is_empty(), "{:?}: {violations:?}", phase.phase);
        checked += 1;
    }

    println!("PASS criterion 7: {checked} traces verified work-conserving, priority-correct, overlap-free");
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modeswitch"))
}

fn systems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems")
}

fn run_cli(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn c8_worst_case_transition_via_cli() {
    let sys = systems_dir().join("fig1.json");
    let out = run_cli(&[
        "transition",
        sys.to_str().unwrap(),
        "--from",
        "nominal",
        "--to",
        "alarm",
        "--worst-case",
        "--json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("json report parses");

    // Two processors, four old-mode rem-jobs, three new-mode tasks.
    assert_eq!(report["rem_jobs"].as_array().unwrap().len(), 4);
    let enablement = report["enablement"].as_array().unwrap();
    assert_eq!(enablement.len(), 3);
    let instants: Vec<u64> = enablement
        .iter()
        .map(|e| e["enabled_at"].as_u64().unwrap())
        .collect();
    assert!(
        instants.windows(2).all(|w| w[0] == w[1]),
        "single common instant: {instants:?}"
    );

    let delay = report["delay"].as_u64().unwrap();
    let wcets: Vec<Time> = report["rem_jobs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|j| j["exec_req"].as_u64().unwrap())
        .collect();
    let bound = upms(&JobSetSummary::from_times(wcets), 2);
    assert!(
        exact(delay as u128) <= bound,
        "delay {delay} over bound {bound}"
    );
    println!("PASS criterion 8: worst-case transition enables all 3 tasks at one instant, delay {delay} <= {bound}");
}

#[test]
fn c9_reruns_are_byte_identical() {
    let sys_fig1 = systems_dir().join("fig1.json");
    let sys_boundary = systems_dir().join("boundary.json");
    let script = systems_dir().join("fig1_run.json");
    let dir = std::env::temp_dir().join(format!("modeswitch-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let fig1 = sys_fig1.to_str().unwrap();
    let cases: Vec<(Vec<&str>, bool)> = vec![
        (
            vec!["analyze", sys_boundary.to_str().unwrap(), "--json"],
            false,
        ),
        (
            vec![
                "transition",
                fig1,
                "--from",
                "nominal",
                "--to",
                "alarm",
                "--worst-case",
                "--json",
            ],
            true,
        ),
        (
            vec![
                "simulate",
                fig1,
                "--mode",
                "nominal",
                "--horizon",
                "24",
                "--json",
            ],
            true,
        ),
        (
            vec!["run", fig1, "--script", script.to_str().unwrap(), "--json"],
            true,
        ),
        (
            vec![
                "validate", "bound", "--trials", "15", "--seed", "42", "--json",
            ],
            false,
        ),
        (
            vec![
                "validate",
                "predictability",
                "--trials",
                "50",
                "--seed",
                "42",
                "--json",
            ],
            false,
        ),
    ];

    for (args, with_trace) in cases {
        let run_once = |trace_path: Option<&PathBuf>| -> (Vec<u8>, Option<Vec<u8>>) {
            let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            if let Some(path) = trace_path {
                full.push("--trace".into());
                full.push(path.to_str().unwrap().into());
            }
            let out = bin().args(&full).output().expect("binary runs");
            assert_eq!(
                out.status.code(),
                Some(0),
                "{full:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            let trace = trace_path.map(|p| std::fs::read(p).expect("trace written"));
            (out.stdout, trace)
        };

        if with_trace {
            let (first, trace_first) = run_once(Some(&dir.join("a.jsonl")));
            let (second, trace_second) = run_once(Some(&dir.join("b.jsonl")));
            assert_eq!(first, second, "stdout differs for {args:?}");
            assert_eq!(trace_first, trace_second, "trace differs for {args:?}");
        } else {
            let (first, _) = run_once(None);
            let (second, _) = run_once(None);
            assert_eq!(first, second, "stdout differs for {args:?}");
        }
    }
    println!("PASS criterion 9: identical stdout and trace bytes across reruns of every command");
}
