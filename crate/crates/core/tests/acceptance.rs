//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod support;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use petrel::domain::{
    average_speedup, completion_time_cloud, completion_time_daemon, completion_time_mobile, completion_time_remote,
    speedup,
};
use petrel::engine::unsafe_delays;
use petrel::experiment::{compare, run_cell, write_comparison, write_records, Comparison, OutputFormat};
use petrel::schedulers::{daa_decide, less_loaded, sample_two, DaaObservation, ProbeResult};
use petrel::workload::generate_arrivals;
use petrel::{
    simulate, Allocation, Cloudlet, CloudletId, EdgeCloudConfig, EngineOptions, NetworkParams, Policy,
    SchedulingDecision, Task, TaskClass, TaskId,
};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ulp(x: f64) -> f64 {
    x.abs().next_up() - x.abs()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= ulp(a.abs().max(b.abs()))
}

fn net(daemon_rtt: f64, cloud_rtt: f64, cloudlet_bw: f64, cloud_bw: f64) -> NetworkParams {
    NetworkParams {
        daemon_rtt,
        cloud_rtt,
        cloudlet_bandwidth: cloudlet_bw,
        cloud_bandwidth: cloud_bw,
    }
}

fn cloudlet(id: u32, speed: f64, net: NetworkParams) -> Cloudlet {
    Cloudlet {
        id: CloudletId(id),
        vm_count: 1,
        speed_factor: speed,
        net,
    }
}

fn task(base: f64, mobile: f64, cloud: f64, data: f64) -> Task {
    Task {
        id: TaskId(0),
        arrival_time: 0.0,
        daemon_id: CloudletId(0),
        benchmark: "face".into(),
        class: TaskClass::LatencySensitive,
        base_service_time: base,
        mobile_exec_time: mobile,
        cloud_exec_time: cloud,
        data_volume: data,
        latency_bound: None,
    }
}

fn model_identities() -> Outcome {
    let checked = std::cell::Cell::new(0);
    let expect = |what: &str, got: f64, want: f64| -> Result<(), String> {
        checked.set(checked.get() + 1);
        ensure(close(got, want), || format!("{what}: got {got}, want {want}"))
    };

    for m in [1000.0, 250.0] {
        let b = completion_time_mobile(&task(1.0, m, 1.0, 0.0));
        expect("mobile total", b.total, m)?;
        expect("mobile wait", b.wait, 0.0)?;
        expect("mobile comm", b.comm, 0.0)?;
    }

    let cloud = |exec, data, bw, rtt| completion_time_cloud(&task(1.0, 1.0, exec, data), &net(0.0, rtt, 1.0, bw));
    expect("cloud sum", cloud(2000.0, 1000.0, 1.0, 500.0).unwrap().total, 3500.0)?;
    expect("cloud zero comm", cloud(2000.0, 0.0, 1.0, 0.0).unwrap().total, 2000.0)?;
    expect(
        "cloud arithmetic",
        cloud(200.0, 800.0, 4.0, 100.0).unwrap().total,
        500.0,
    )?;
    ensure(cloud(1.0, 1.0, 0.0, 1.0).is_err(), || {
        "cloud accepted zero bandwidth".into()
    })?;

    // D/B = 200 with B = 1
    let d = cloudlet(0, 1.0, net(10.0, 0.0, 1.0, 1.0));
    let e = cloudlet(1, 1.0, net(10.0, 0.0, 1.0, 1.0));
    let t = task(1000.0, 1.0, 1.0, 200.0);
    let local = completion_time_daemon(&t, &d, 500.0).unwrap();
    expect("daemon sum", local.total, 1710.0)?;
    let idle = completion_time_daemon(
        &task(1000.0, 1.0, 1.0, 0.0),
        &cloudlet(0, 1.0, net(0.0, 0.0, 1.0, 1.0)),
        0.0,
    );
    expect("daemon idle", idle.unwrap().total, 1000.0)?;
    let fast = completion_time_daemon(
        &task(1000.0, 1.0, 1.0, 0.0),
        &cloudlet(0, 2.0, net(10.0, 0.0, 1.0, 1.0)),
        0.0,
    );
    expect("daemon speed factor", fast.unwrap().total, 510.0)?;
    ensure(completion_time_daemon(&t, &d, -1.0).is_err(), || {
        "negative wait accepted".into()
    })?;

    let remote = completion_time_remote(&t, &d, &e, 60.0, 500.0).unwrap();
    expect("remote sum", remote.total, 1770.0)?;
    expect("remote minus daemon", remote.total - local.total, 60.0)?;
    let degenerate = completion_time_remote(&t, &d, &e, 0.0, 500.0).unwrap();
    ensure(degenerate == local, || {
        format!("zero rtt remote {degenerate:?} != daemon {local:?}")
    })?;
    let r2 = completion_time_remote(&task(1000.0, 1.0, 1.0, 100.0), &d, &e, 50.0, 0.0).unwrap();
    expect("remote arithmetic", r2.total, 1160.0)?;
    ensure(completion_time_remote(&t, &d, &d, 60.0, 0.0).is_err(), || {
        "remote path accepted the daemon".into()
    })?;

    let sp = |m, c| speedup(&task(1.0, m, 1.0, 0.0), Allocation::Cloudlet(CloudletId(0)), c).unwrap();
    expect("speedup ratio", sp(10_000.0, 2000.0), 5.0)?;
    expect("speedup below one", sp(3000.0, 6000.0), 0.5)?;
    expect("speedup mobile", speedup(&t, Allocation::Mobile, 123.0).unwrap(), 1.0)?;
    ensure(speedup(&t, Allocation::Cloud, 0.0).is_err(), || {
        "zero completion accepted".into()
    })?;
    let a = task(1.0, 10_000.0, 1.0, 0.0);
    let b = task(1.0, 6000.0, 1.0, 0.0);
    let cl = Allocation::Cloudlet(CloudletId(0));
    expect(
        "average speedup",
        average_speedup([(&a, cl, 2000.0), (&b, cl, 2000.0)]).unwrap(),
        4.0,
    )?;
    expect("average single", average_speedup([(&a, cl, 2000.0)]).unwrap(), 5.0)?;
    expect(
        "average mobile",
        average_speedup([(&a, Allocation::Mobile, 9.0), (&b, Allocation::Mobile, 1.0)]).unwrap(),
        1.0,
    )?;

    let mut rng = support::rng(11);
    for _ in 0..2000 {
        use rand::Rng;
        let n = net(
            rng.random_range(0.0..50.0),
            rng.random_range(10.0..400.0),
            rng.random_range(1e2..5e4),
            1e3,
        );
        let speed = rng.random_range(0.25..4.0);
        let (dc, ec) = (cloudlet(0, speed, n), cloudlet(1, speed, n));
        let t = task(rng.random_range(1.0..1e5), 1.0, 1.0, rng.random_range(0.0..1e8));
        let wait = rng.random_range(0.0..1e6);
        let rtt = rng.random_range(0.0..200.0);
        let l = completion_time_daemon(&t, &dc, wait).unwrap();
        let r = completion_time_remote(&t, &dc, &ec, rtt, wait).unwrap();
        for bd in [l, r] {
            expect("breakdown sum", bd.total, bd.exec + bd.wait + bd.comm)?;
        }
        checked.set(checked.get() + 1);
        ensure(((r.total - l.total) - rtt).abs() <= ulp(r.total), || {
            format!("identity off: {} - {} vs {rtt}", r.total, l.total)
        })?;
    }
    Ok(format!("{} checks", checked.get()))
}

fn probe(id: u32, completion: f64, idle: bool) -> ProbeResult {
    ProbeResult {
        cloudlet: CloudletId(id),
        start: 0.0,
        expected_completion: completion,
        has_idle_vm: idle,
    }
}

struct DaaCase {
    name: &'static str,
    class: TaskClass,
    arrival: f64,
    bound: Option<f64>,
    daemon: ProbeResult,
    samples: Vec<ProbeResult>,
    delayed: f64,
    want: SchedulingDecision,
}

fn daa_table() -> Vec<DaaCase> {
    use SchedulingDecision::{Assign, Delay};
    use TaskClass::{LatencySensitive as S, LatencyTolerant as T};
    let c = |id| Assign(CloudletId(id));
    let case = |name, class, arrival, bound, daemon, samples: &[ProbeResult], delayed, want| DaaCase {
        name,
        class,
        arrival,
        bound,
        daemon,
        samples: samples.to_vec(),
        delayed,
        want,
    };
    vec![
        case(
            "idle daemon keeps sensitive",
            S,
            0.0,
            None,
            probe(0, 900.0, true),
            &[probe(1, 100.0, true), probe(2, 50.0, true)],
            0.0,
            c(0),
        ),
        case(
            "idle daemon keeps tolerant",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 5000.0, true),
            &[probe(3, 10.0, true), probe(4, 10.0, true)],
            9e9,
            c(0),
        ),
        case(
            "idle daemon beats past deadline",
            T,
            0.0,
            Some(1.0),
            probe(0, 5000.0, true),
            &[],
            9e9,
            c(0),
        ),
        case(
            "idle daemon with no samples",
            S,
            0.0,
            None,
            probe(0, 5000.0, true),
            &[],
            0.0,
            c(0),
        ),
        case(
            "sensitive redirect to faster sample",
            S,
            0.0,
            None,
            probe(0, 5000.0, false),
            &[probe(1, 4000.0, false), probe(2, 6000.0, false)],
            0.0,
            c(1),
        ),
        case(
            "sensitive picks the less loaded of two",
            S,
            0.0,
            None,
            probe(0, 5000.0, false),
            &[probe(1, 4500.0, false), probe(2, 3000.0, false)],
            0.0,
            c(2),
        ),
        case(
            "sensitive sample tie goes to lower id",
            S,
            0.0,
            None,
            probe(0, 5000.0, false),
            &[probe(4, 3000.0, false), probe(2, 3000.0, false)],
            0.0,
            c(2),
        ),
        case(
            "sensitive stays when samples slower",
            S,
            0.0,
            None,
            probe(0, 5000.0, false),
            &[probe(1, 5500.0, false), probe(2, 6000.0, true)],
            0.0,
            c(0),
        ),
        case(
            "sensitive tie stays on daemon",
            S,
            0.0,
            None,
            probe(0, 5000.0, false),
            &[probe(1, 5000.0, false), probe(2, 7000.0, false)],
            0.0,
            c(0),
        ),
        case(
            "sensitive with no samples stays",
            S,
            0.0,
            None,
            probe(0, 5000.0, false),
            &[],
            0.0,
            c(0),
        ),
        case(
            "sensitive single sample faster",
            S,
            0.0,
            None,
            probe(1, 5000.0, false),
            &[probe(0, 4999.0, false)],
            0.0,
            c(0),
        ),
        case(
            "sensitive ignores idle flag of slower sample",
            S,
            0.0,
            None,
            probe(0, 2000.0, false),
            &[probe(1, 2500.0, true), probe(2, 2600.0, true)],
            0.0,
            c(0),
        ),
        case(
            "tolerant takes idle sample",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 5000.0, false),
            &[probe(1, 4000.0, true), probe(2, 6000.0, false)],
            8000.0,
            c(1),
        ),
        case(
            "tolerant takes idle sample even if slower",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 5000.0, false),
            &[probe(1, 9000.0, true), probe(2, 9500.0, false)],
            8000.0,
            c(1),
        ),
        case(
            "tolerant busy sample delays within bound",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 5000.0, false),
            &[probe(1, 4000.0, false), probe(2, 6000.0, false)],
            8000.0,
            Delay(2500.0),
        ),
        case(
            "tolerant busy sample past bound stays",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 15_000.0, false),
            &[probe(1, 4000.0, false), probe(2, 6000.0, false)],
            21_000.0,
            c(0),
        ),
        case(
            "tolerant at exactly the bound stays",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 15_000.0, false),
            &[probe(1, 4000.0, false), probe(2, 6000.0, false)],
            20_000.0,
            c(0),
        ),
        case(
            "tolerant just under the bound delays",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 15_000.0, false),
            &[probe(1, 4000.0, false)],
            19_999.0,
            Delay(2500.0),
        ),
        case(
            "tolerant deadline counts from arrival",
            T,
            50_000.0,
            Some(20_000.0),
            probe(0, 60_000.0, false),
            &[probe(1, 4000.0, false), probe(2, 6000.0, false)],
            65_000.0,
            Delay(2500.0),
        ),
        case(
            "tolerant late arrival past deadline stays",
            T,
            50_000.0,
            Some(20_000.0),
            probe(0, 60_000.0, false),
            &[probe(1, 4000.0, false), probe(2, 6000.0, false)],
            70_000.0,
            c(0),
        ),
        case(
            "tolerant without samples delays",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 5000.0, false),
            &[],
            8000.0,
            Delay(2500.0),
        ),
        case(
            "tolerant without samples past bound stays",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 5000.0, false),
            &[],
            30_000.0,
            c(0),
        ),
        case(
            "tolerant checks the less loaded sample only",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 5000.0, false),
            &[probe(1, 7000.0, true), probe(2, 3000.0, false)],
            8000.0,
            Delay(2500.0),
        ),
        case(
            "tolerant idle less loaded sample wins",
            T,
            0.0,
            Some(20_000.0),
            probe(0, 5000.0, false),
            &[probe(1, 7000.0, false), probe(2, 3000.0, true)],
            8000.0,
            c(2),
        ),
    ]
}

fn daa_conformance() -> Outcome {
    let table = daa_table();
    let branches: std::collections::HashSet<String> = table.iter().map(|c| format!("{:?}", c.want)).collect();
    for c in &table {
        let mut t = task(1000.0, 6000.0, 800.0, 0.0);
        t.class = c.class;
        t.arrival_time = c.arrival;
        t.latency_bound = c.bound;
        t.daemon_id = c.daemon.cloudlet;
        let candidate = match c.samples.as_slice() {
            [] => None,
            [a] => Some(*a),
            [a, b, ..] => Some(less_loaded(*a, *b)),
        };
        let obs = DaaObservation {
            daemon: c.daemon,
            candidate,
            delayed_daemon_completion: c.delayed,
        };
        let got = daa_decide(&t, &obs, 2500.0);
        ensure(got == c.want, || format!("{}: got {got:?}, want {:?}", c.name, c.want))?;
    }
    Ok(format!("{} states, {} distinct outcomes", table.len(), branches.len()))
}

fn oracle_equivalence() -> Outcome {
    let mut r = support::rng(0xacce);
    let mut runs = 0;
    for case in 0..200u64 {
        let inst = support::random_instance(&mut r, 3, 2, 10);
        for policy in Policy::ALL {
            let mut s = policy.build(&inst.edge, case, inst.delay);
            let out = simulate(&inst.edge, &inst.trace, s.as_mut(), EngineOptions::default())
                .map_err(|e| format!("case {case} {policy}: {e}"))?;
            let replayed = support::replay(&inst, &out.decisions).map_err(|e| format!("case {case} {policy}: {e}"))?;
            support::check_records(&out.records, &replayed).map_err(|e| format!("case {case} {policy}: {e}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} runs match exactly"))
}

fn awt(cmp: &Comparison, p: Policy, l: f64) -> f64 {
    cmp.row(p, l).expect("row present").awt.mean
}

fn awt_ordering(cmp: &Comparison) -> Outcome {
    let mut detail = Vec::new();
    let mut failures = Vec::new();
    let mut gaps = Vec::new();
    for l in [1.0, 2.0] {
        let (daa, tc, gr, rr, dm) = (
            awt(cmp, Policy::Daa, l),
            awt(cmp, Policy::TwoChoices, l),
            awt(cmp, Policy::Greedy, l),
            awt(cmp, Policy::RoundRobin, l),
            awt(cmp, Policy::DaemonOnly, l),
        );
        detail.push(format!(
            "λ={l}: daa {daa:.4} tc {tc:.4} greedy {gr:.4} rr {rr:.4} daemon {dm:.4}"
        ));
        if !(daa < tc) {
            failures.push(format!("λ={l}: daa not below two-choices"));
        }
        if !((tc - gr).abs() < 0.5 * (rr - gr)) {
            failures.push(format!("λ={l}: two-choices outside the greedy neighborhood"));
        }
        if !(rr >= 1.1 * daa && dm >= 1.1 * daa) {
            failures.push(format!("λ={l}: round-robin or daemon-only within 10% of daa"));
        }
        gaps.push(tc - daa);
    }
    if !(gaps[1] > gaps[0]) {
        failures.push(format!("gap does not grow: {:.4} then {:.4}", gaps[0], gaps[1]));
    }
    let detail = detail.join("; ");
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", failures.join(", ")))
    }
}

fn makespan_ordering(cmp: &Comparison) -> Outcome {
    let cloudlet_policies = [
        Policy::Daa,
        Policy::DaemonOnly,
        Policy::RoundRobin,
        Policy::Greedy,
        Policy::TwoChoices,
    ];
    let mut detail = Vec::new();
    let mut failures = Vec::new();
    for l in [1.0, 2.0] {
        let row = |p: Policy| cmp.row(p, l).expect("row present");
        let mut by_max: Vec<Policy> = cloudlet_policies.to_vec();
        by_max.sort_by(|a, b| row(*b).makespan_max.mean.total_cmp(&row(*a).makespan_max.mean));
        let top2 = [by_max[0], by_max[1]];
        if !(top2.contains(&Policy::DaemonOnly) && top2.contains(&Policy::RoundRobin)) {
            failures.push(format!("λ={l}: largest MaxMakespan are {} and {}", top2[0], top2[1]));
        }
        let best_avg = cloudlet_policies
            .iter()
            .copied()
            .min_by(|a, b| row(*a).makespan_avg.mean.total_cmp(&row(*b).makespan_avg.mean))
            .unwrap();
        if best_avg != Policy::Daa {
            failures.push(format!("λ={l}: smallest AverageMakespan is {best_avg}"));
        }
        let avgs: Vec<String> = cloudlet_policies
            .iter()
            .map(|&p| format!("{p} {:.0}", row(p).makespan_avg.mean))
            .collect();
        detail.push(format!("λ={l} avg makespan ms: {}", avgs.join(", ")));
    }
    let detail = detail.join("; ");
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", failures.join(", ")))
    }
}

fn cloud_anchor(cmp: &Comparison) -> Outcome {
    let cloud = awt(cmp, Policy::CloudOnly, 1.0);
    let daa = awt(cmp, Policy::Daa, 1.0);
    let detail = format!("cloud-only awt {cloud:.4}, daa awt {daa:.4}");
    ensure((1.4..=1.8).contains(&cloud) && cloud > daa, || detail.clone())?;
    Ok(detail)
}

fn delay_safety(cmp: &Comparison) -> Outcome {
    let mut unsafe_count = 0;
    let mut delayed_at_2 = 0;
    for cell in &cmp.cells {
        unsafe_count += unsafe_delays(&cell.output.decisions).len();
        if cell.lambda == 2.0 {
            delayed_at_2 += cell.output.records.iter().filter(|r| r.delays_taken > 0).count();
        }
    }
    let detail = format!("{unsafe_count} unsafe delays, {delayed_at_2} tasks delayed at λ=2");
    ensure(unsafe_count == 0 && delayed_at_2 > 0, || detail.clone())?;
    Ok(detail)
}

fn determinism_and_statistics() -> Outcome {
    let cfg = EdgeCloudConfig::default();
    for policy in Policy::ALL {
        let bytes = || {
            let cell = run_cell(&cfg, policy, 2.0, 17).unwrap();
            let mut buf = Vec::new();
            write_records(&cell.output.records, &mut buf).unwrap();
            buf
        };
        ensure(bytes() == bytes(), || format!("{policy} records differ between runs"))?;
    }
    let report = || {
        let cmp = compare(&cfg, &[Policy::Daa, Policy::TwoChoices], &[1.0, 2.0], &[1, 2, 3]).unwrap();
        let mut buf = Vec::new();
        write_comparison(&cmp.rows, OutputFormat::Csv, &mut buf).unwrap();
        buf
    };
    ensure(report() == report(), || "comparison report differs between runs".into())?;

    let edge = cfg.build_edge_cloud(5);
    let daemon = CloudletId(3);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 100_000;
    let mut counts: HashMap<(CloudletId, CloudletId), u64> = HashMap::new();
    for _ in 0..draws {
        let (a, b) = sample_two(&edge, daemon, &mut rng).unwrap();
        ensure(a != b && a != daemon && b != daemon, || format!("bad pair {a} {b}"))?;
        *counts.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    let others = edge.len() - 1;
    let cells = others * (others - 1) / 2;
    ensure(counts.len() == cells, || {
        format!("{} of {cells} pairs seen", counts.len())
    })?;
    let expected = draws as f64 / cells as f64;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(chi2);
    ensure(p > 0.01, || format!("sample_two chi-square p = {p:.4}"))?;

    let arrivals = generate_arrivals(1.0, 100_000, 1000.0, 9).unwrap();
    let mean = arrivals.last().unwrap() / arrivals.len() as f64;
    ensure((mean - 1000.0).abs() <= 10.0, || {
        format!("mean interarrival {mean:.2} ms")
    })?;
    Ok(format!(
        "byte-identical reruns, chi-square p = {p:.3}, mean interarrival {mean:.2} ms"
    ))
}

fn main() {
    let criteria = [
        Criterion {
            id: 1,
            name: "model identities",
            limit: Duration::from_secs(1),
        },
        Criterion {
            id: 2,
            name: "DAA decision table",
            limit: Duration::from_secs(1),
        },
        Criterion {
            id: 3,
            name: "replay oracle equivalence",
            limit: Duration::from_secs(30),
        },
        Criterion {
            id: 4,
            name: "AWT ordering",
            limit: Duration::from_secs(120),
        },
        Criterion {
            id: 5,
            name: "makespan ordering",
            limit: Duration::from_secs(120),
        },
        Criterion {
            id: 6,
            name: "cloud-only AWT anchor",
            limit: Duration::from_secs(30),
        },
        Criterion {
            id: 7,
            name: "delay scheduling safety",
            limit: Duration::from_secs(120),
        },
        Criterion {
            id: 8,
            name: "determinism and statistics",
            limit: Duration::from_secs(60),
        },
    ];

    let timed = |f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = f();
        (out, start.elapsed())
    };

    let cfg = EdgeCloudConfig::default();
    let seeds: Vec<u64> = (1..=30).collect();
    let (cmp, sweep_time) = {
        let start = Instant::now();
        let cmp = compare(&cfg, &Policy::ALL, &[1.0, 2.0], &seeds).expect("default sweep runs");
        (cmp, start.elapsed())
    };

    let mut failed = 0;
    for c in &criteria {
        let (outcome, elapsed) = match c.id {
            1 => timed(&model_identities),
            2 => timed(&daa_conformance),
            3 => timed(&oracle_equivalence),
            4 => timed(&|| awt_ordering(&cmp)),
            5 => timed(&|| makespan_ordering(&cmp)),
            6 => timed(&|| cloud_anchor(&cmp)),
            7 => timed(&|| delay_safety(&cmp)),
            _ => timed(&determinism_and_statistics),
        };
        let elapsed = if (4..=7).contains(&c.id) {
            elapsed + sweep_time
        } else {
            elapsed
        };
        let outcome = outcome.and_then(|d| {
            if elapsed <= c.limit {
                Ok(d)
            } else {
                Err(format!("took {elapsed:.2?}, limit {:?}; {d}", c.limit))
            }
        });
        match outcome {
            Ok(d) => println!("PASS criterion {} {}: {d} [{elapsed:.2?}]", c.id, c.name),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {} {}: {d} [{elapsed:.2?}]", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
