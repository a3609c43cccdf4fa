use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use slitcommit::optics::SlitGeometry;
use slitcommit::protocol::{CommitBit, Thresholds};
use slitcommit_cli::{RunConfig, SWEEP_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slitcommit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn simulate(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--out-dir", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn verify(dir: &Path) -> Output {
    run(&["verify", "--out-dir", dir.to_str().unwrap()])
}

#[test]
fn simulate_writes_transcripts_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(
        dir.path(),
        &[
            "--n",
            "1000",
            "--bit",
            "0",
            "--particle",
            "neutron",
            "--seed",
            "7",
        ],
    );
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("detected 1000 of "), "{stdout}");
    for f in ["public.jsonl", "bob.jsonl", "alice.jsonl", "unveil.jsonl"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let files = ["public.jsonl", "bob.jsonl", "alice.jsonl", "unveil.jsonl"];
    let snapshot = || -> Vec<Vec<u8>> {
        assert_eq!(
            code(&simulate(
                dir.path(),
                &[
                    "--n",
                    "200",
                    "--seed",
                    "11",
                    "--strategy",
                    "helstrom-router"
                ]
            )),
            0
        );
        files
            .iter()
            .map(|f| fs::read(dir.path().join(f)).unwrap())
            .collect()
    };
    let first = snapshot();
    assert_eq!(first, snapshot());
    let d = dir.path().to_str().unwrap();
    let sweep = || {
        assert_eq!(
            code(&run(&[
                "attack-sweep",
                "--grid",
                "60",
                "--reps",
                "50",
                "--seed",
                "2",
                "--out-dir",
                d
            ])),
            0
        );
        fs::read(dir.path().join("sweep.csv")).unwrap()
    };
    assert_eq!(sweep(), sweep());
}

#[test]
fn zero_detections_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&simulate(dir.path(), &["--n", "0"])), 2);
}

#[test]
fn honest_pipeline_is_accepted() {
    for bit in ["0", "1"] {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(
            code(&simulate(
                dir.path(),
                &["--n", "1200", "--bit", bit, "--seed", "3"]
            )),
            0
        );
        let out = verify(dir.path());
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
        assert!(dir.path().join("report.jsonl").exists());
    }
}

#[test]
fn forged_unveil_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&simulate(
            dir.path(),
            &["--n", "600", "--strategy", "forge-positions", "--seed", "3"]
        )),
        0
    );
    assert_eq!(code(&verify(dir.path())), 3);
}

#[test]
fn truncated_unveil_is_malformed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&simulate(dir.path(), &["--n", "300", "--seed", "3"])),
        0
    );
    let path = dir.path().join("unveil.jsonl");
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&verify(dir.path())), 2);
}

#[test]
fn unveil_with_dropped_lines_is_malformed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&simulate(dir.path(), &["--n", "300", "--seed", "3"])),
        0
    );
    let path = dir.path().join("unveil.jsonl");
    let text = fs::read_to_string(&path).unwrap();
    let kept: Vec<&str> = text.lines().take(100).collect();
    fs::write(&path, kept.join("\n") + "\n").unwrap();
    assert_eq!(code(&verify(dir.path())), 2);
}

#[test]
fn pattern_tables() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&run(&[
            "pattern",
            "--out-dir",
            dir.path().to_str().unwrap()
        ])),
        0
    );
    let env = fs::read_to_string(dir.path().join("envelope.csv")).unwrap();
    let ds = fs::read_to_string(dir.path().join("doubleslit.csv")).unwrap();
    for t in [&env, &ds] {
        assert_eq!(t.lines().next(), Some("x,density"));
        assert_eq!(t.lines().count() - 1, SlitGeometry::default().grid_nodes);
    }
    let at_one = env.lines().find(|l| l.starts_with("1,")).unwrap();
    assert_eq!(at_one, "1,0");
}

#[test]
fn attack_sweep_csv_and_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = run(&[
        "attack-sweep",
        "--strategy",
        "guess-which-slit",
        "--grid",
        "50,100,200,400",
        "--reps",
        "200",
        "--out-dir",
        d,
    ]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(SWEEP_HEADER));
    let est: Vec<f64> = lines
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(est.len(), 4);
    assert!(est.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(
        code(&run(&["attack-sweep", "--grid", "", "--out-dir", d])),
        2
    );
}

#[test]
fn nogo_demo_reports_every_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "nogo-demo",
        "--pairs",
        "20",
        "--seed",
        "1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let lines = fs::read_to_string(dir.path().join("nogo.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 1 + 41);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("concealing 20/20 attacked; perturbed 20/20 blocked"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        n: 150,
        seed: 5,
        out_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let path = dir.path().join("run.json");
    fs::write(&path, cfg.to_json()).unwrap();
    let out = run(&["simulate", "--config", path.to_str().unwrap(), "--n", "120"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("detected 120 of "));
    fs::write(&path, "{\"n\": 5").unwrap();
    assert_eq!(
        code(&run(&["simulate", "--config", path.to_str().unwrap()])),
        2
    );
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&run(&["simulate", "--bit", "2"])), 2);
    assert_eq!(
        code(&run(&[
            "simulate",
            "--strategy",
            "teleport",
            "--out-dir",
            "/nonexistent/x"
        ])),
        2
    );
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    (
        1usize..5000,
        prop_oneof![Just("neutron"), Just("muon")],
        proptest::option::of(1e-9f64..1e4),
        1.0f64..30.0,
        any::<u64>(),
        (0.001f64..0.2, 0.001f64..0.49, 0usize..100),
        prop::sample::select(vec![
            "honest",
            "forge-positions",
            "guess-which-slit",
            "store-and-delay",
            "helstrom-router",
        ]),
        any::<bool>(),
        (0.0f64..5.0, 101usize..10_000),
    )
        .prop_map(
            |(
                n,
                particle,
                half_life,
                k,
                seed,
                (alpha, epsilon, min_events),
                strategy,
                bit,
                (ia, nodes),
            )| RunConfig {
                n,
                particle: particle.into(),
                half_life,
                k,
                geometry: SlitGeometry {
                    grid_nodes: nodes,
                    ..SlitGeometry::default()
                },
                thresholds: Thresholds {
                    alpha,
                    epsilon,
                    min_events,
                    ..Thresholds::default()
                },
                seed,
                strategy: strategy.into(),
                bit: if bit { CommitBit::One } else { CommitBit::Zero },
                inter_arrival: ia,
                transit_latency: 1e-9,
                out_dir: format!("runs/{seed}").into(),
            },
        )
}

proptest! {
    #[test]
    fn config_round_trips(cfg in arb_config()) {
        let first = cfg.to_json();
        let parsed: RunConfig = serde_json::from_str(&first).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.to_json(), first);
    }
}
