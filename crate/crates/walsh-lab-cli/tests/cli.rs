//! End-to-end runs of the command-line interface, in process via `run`.

use std::fs;
use std::path::Path;
use walsh_lab_cli::run;

fn invoke(args: &[&str]) -> i32 {
    let argv = std::iter::once("walsh-lab").chain(args.iter().copied());
    run(argv)
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn every_subcommand_writes_records_and_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let runs: &[(&str, &[&str])] = &[
        ("systems-check", &["--m", "6"]),
        ("kernel-survey", &["--system", "kaczmarz", "--alpha", "0.5", "--max-n", "255"]),
        ("goginava", &["--alpha", "1", "--n", "2..4", "--variant", "both"]),
        ("counterexample", &["--alpha", "0.5,0.5", "--cone", "identity", "--n1", "4..5"]),
        ("converge", &["--function", "polynomial", "--alpha", "1,1", "--n1", "3..5"]),
        ("sneider", &["--rank", "8", "--j", "4..8", "--c", "0.1,0.5"]),
        ("contrast", &["--x", "1", "--j", "3..6", "--alpha", "1"]),
    ];
    for (name, extra) in runs {
        let out = dir.path().join(format!("{name}.csv"));
        let mut args = vec![*name];
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out", out.to_str().unwrap()]);
        assert_eq!(invoke(&args), 0, "{name} failed");
        let records = read(&out);
        assert!(records.lines().count() > 1, "{name} wrote no records");
        assert!(
            records.starts_with("experiment,"),
            "{name} records miss the header"
        );
        let sidecar = read(&dir.path().join(format!("{name}.csv.config.toml")));
        assert!(sidecar.contains(&format!("command = \"{name}\"")));
    }
}

#[test]
fn thread_count_never_changes_the_records() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "2", "4"] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let code = invoke(&[
            "counterexample",
            "--alpha",
            "0.5,0.5",
            "--n1",
            "4..6",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        outputs.push(read(&out));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn the_sidecar_reproduces_the_run_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let code = invoke(&[
        "converge",
        "--function",
        "indicator",
        "--cone",
        "power:2",
        "--alpha",
        "0.5,0.5",
        "--n1",
        "3..5",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let sidecar = dir.path().join("first.csv.config.toml");
    // the snapshot embeds the resolved cone, so the rerun needs no flags
    let second = dir.path().join("second.csv");
    let code = invoke(&[
        "converge",
        "--config",
        sidecar.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(exit_name(code), exit_name(0));
    assert_eq!(read(&first), read(&second));
    let resnapshot = read(&dir.path().join("second.csv.config.toml"));
    assert!(resnapshot.contains("cone = \"power:2\""), "label survives: {resnapshot}");

    // drop the label and the embedded axes alone must still reproduce it
    let stripped: String = read(&sidecar)
        .lines()
        .filter(|line| !line.starts_with("cone = "))
        .map(|line| format!("{line}\n"))
        .collect();
    let label_free = dir.path().join("label-free.toml");
    fs::write(&label_free, stripped).unwrap();
    let third = dir.path().join("third.csv");
    let code = invoke(&[
        "converge",
        "--config",
        label_free.to_str().unwrap(),
        "--out",
        third.to_str().unwrap(),
    ]);
    assert_eq!(exit_name(code), exit_name(0));
    assert_eq!(read(&first), read(&third));
    let resnapshot = read(&dir.path().join("third.csv.config.toml"));
    assert!(resnapshot.contains("cone = \"embedded\""), "{resnapshot}");
}

fn exit_name(code: i32) -> &'static str {
    match code {
        0 => "ok",
        2 => "usage",
        3 => "config",
        4 => "runtime",
        _ => "other",
    }
}

#[test]
fn a_cone_file_works_like_a_catalog_name() {
    let dir = tempfile::tempdir().unwrap();
    let cone_path = dir.path().join("steep.toml");
    let spec = walsh_lab::ConeSpec::catalog("power:3", 2).unwrap();
    fs::write(&cone_path, spec.to_toml_string()).unwrap();
    let by_file = dir.path().join("by_file.csv");
    let code = invoke(&[
        "counterexample",
        "--alpha",
        "0.5,0.5",
        "--cone",
        cone_path.to_str().unwrap(),
        "--n1",
        "4..5",
        "--oracle",
        "off",
        "--out",
        by_file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let by_name = dir.path().join("by_name.csv");
    let code = invoke(&[
        "counterexample",
        "--alpha",
        "0.5,0.5",
        "--cone",
        "power:3",
        "--n1",
        "4..5",
        "--oracle",
        "off",
        "--out",
        by_name.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(read(&by_file), read(&by_name));
}

#[test]
fn jsonl_output_is_one_record_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("check.jsonl");
    let code = invoke(&[
        "systems-check",
        "--m",
        "5",
        "--format",
        "jsonl",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for line in read(&out).lines() {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(value["experiment"], "systems-check");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();

    assert_eq!(invoke(&["--help"]), 0);
    assert_eq!(invoke(&["goginava", "--help"]), 0);

    // usage errors out of the parser
    assert_eq!(invoke(&["no-such-command"]), 2);
    assert_eq!(invoke(&["goginava", "--no-such-flag"]), 2);
    assert_eq!(invoke(&["sneider", "--rank", "not-a-number"]), 2);

    // configuration errors out of validation
    assert_eq!(invoke(&["goginava", "--alpha", "1.5"]), 3);
    assert_eq!(invoke(&["goginava", "--n", "7..3"]), 3);
    assert_eq!(invoke(&["counterexample", "--cone", "no-such-cone"]), 3);
    assert_eq!(invoke(&["counterexample", "--alpha", "0.7,0.5"]), 3);
    assert_eq!(invoke(&["contrast", "--alpha", "0.5,0.5"]), 3);
    let two_axis = dir.path().join("two-axis.toml");
    let spec = walsh_lab::ConeSpec::catalog("identity", 2).unwrap();
    fs::write(&two_axis, spec.to_toml_string()).unwrap();
    assert_eq!(
        invoke(&["counterexample", "--alpha", "0.5", "--cone", two_axis.to_str().unwrap()]),
        3
    );

    // a config written for one command rejects another
    let miscast = dir.path().join("miscast.toml");
    fs::write(&miscast, "command = \"sneider\"\nrank = 8\n").unwrap();
    assert_eq!(invoke(&["goginava", "--config", miscast.to_str().unwrap()]), 3);
    let unknown_key = dir.path().join("unknown.toml");
    fs::write(&unknown_key, "command = \"goginava\"\nshrubbery = 1\n").unwrap();
    assert_eq!(invoke(&["goginava", "--config", unknown_key.to_str().unwrap()]), 3);

    // runtime failures: an output path that cannot be created
    let blocked = dir.path().join("not-a-dir");
    fs::write(&blocked, "plain file").unwrap();
    let out_below_file = blocked.join("out.csv");
    assert_eq!(
        invoke(&["systems-check", "--m", "4", "--out", out_below_file.to_str().unwrap()]),
        4
    );
}

#[test]
fn flags_override_config_entries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("survey.toml");
    fs::write(
        &cfg,
        "command = \"kernel-survey\"\nsystem = \"paley\"\nalpha = [1.0]\nmax_n = 63\n",
    )
    .unwrap();
    let out = dir.path().join("survey.csv");
    let code = invoke(&[
        "kernel-survey",
        "--config",
        cfg.to_str().unwrap(),
        "--max-n",
        "127",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let sidecar = read(&dir.path().join("survey.csv.config.toml"));
    assert!(sidecar.contains("max_n = 127"), "flag should win: {sidecar}");
    assert!(sidecar.contains("system = \"paley\""), "config entry should survive");
}
