//! The `sim` binary: outputs, sidecar re-runs and error exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn sim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim")).args(args).current_dir(dir).output().expect("sim runs")
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

const CONFIG: &str = r#"
[[run]]
protocol = "gap"
j = 2
h_over_gx = [0.4, 1.6]

[[run]]
protocol = "order"
prefix = "order_j3"
j = 3
h_over_gx = [0.0, 0.5]
"#;

#[test]
fn runs_are_deterministic_and_sidecars_rerun() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), CONFIG).unwrap();
    for out in ["a", "b"] {
        let o = sim(&["run", "run.toml", "--out", out, "--plot"], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let files = ["gap_spectrogram.csv", "gap_estimates.csv", "gap_traces.csv", "gap_plot.py", "order_j3_distribution.csv", "gap_spectrogram.json"];
    for f in files {
        assert_eq!(read(dir.path().join("a").join(f)), read(dir.path().join("b").join(f)), "{f}");
    }

    // a sidecar carries the fully resolved run and reproduces it
    let sidecar: serde_json::Value = serde_json::from_str(&read(dir.path().join("a/gap_spectrogram.json"))).unwrap();
    assert_eq!(sidecar["resolved"]["protocol"], "gap");
    assert_eq!(sidecar["resolved"]["params"]["j"], 2);
    assert!(sidecar["resolved"]["options"].is_object());
    let o = sim(&["run", "a/gap_spectrogram.json", "--out", "c"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["gap_spectrogram.csv", "gap_estimates.csv"] {
        assert_eq!(read(dir.path().join("a").join(f)), read(dir.path().join("c").join(f)), "{f}");
    }

    let estimates = read(dir.path().join("a/gap_estimates.csv"));
    assert!(estimates.lines().count() > 2);
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), CONFIG).unwrap();
    let one = sim(&["run", "run.toml", "--out", "one", "--jobs", "1"], dir.path());
    let four = sim(&["run", "run.toml", "--out", "four", "--jobs", "4"], dir.path());
    assert!(one.status.success() && four.status.success());
    assert_eq!(read(dir.path().join("one/gap_spectrogram.csv")), read(dir.path().join("four/gap_spectrogram.csv")));
}

fn error_record(o: &Output) -> serde_json::Value {
    let line = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("stderr {line:?}: {e}"))
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("missing.toml", "[[run]]\nprotocol = \"dpt\"\nh = 0.5\n"),
        ("unknown.toml", "[[run]]\nprotocol = \"dpt\"\nj = 2\nh = 0.5\nspeed = 3\n"),
        ("protocol.toml", "[[run]]\nprotocol = \"teleport\"\nj = 2\n"),
        ("syntax.toml", "[[run]\nprotocol = \"dpt\"\n"),
        ("crossing.toml", "[[run]]\nprotocol = \"esqpt\"\nj = 4\nh = 1.5\n"),
    ];
    for (name, text) in cases {
        std::fs::write(dir.path().join(name), text).unwrap();
        let o = sim(&["run", name, "--out", "o"], dir.path());
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let rec = error_record(&o);
        assert_eq!(rec["error"], "config", "{name}");
        assert_eq!(rec["exit_code"], 2);
    }
    let o = sim(&["run", "does_not_exist.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = sim(&["reproduce", "9z"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    // Omega large enough that the propagator overflows
    let text = "[[run]]\nprotocol = \"dpt\"\nj = 2\nh = 0.5\nomega = 1e308\nn_points = 5\n\n[run.options.drive]\nrwa_fraction = 1e300\n";
    std::fs::write(dir.path().join("overflow.toml"), text).unwrap();
    let o = sim(&["run", "overflow.toml", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = error_record(&o);
    assert_eq!(rec["error"], "numerical");
    assert!(rec["message"].as_str().unwrap().contains("non-finite"));
}

#[test]
fn reproduce_writes_figure_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(&["list-figures"], dir.path());
    let listing = String::from_utf8_lossy(&o.stdout);
    assert_eq!(listing.lines().count(), 8);
    let o = sim(&["reproduce", "2d", "--plot"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fig = dir.path().join("figure_2d");
    let names: Vec<String> = std::fs::read_dir(&fig).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert!(names.iter().any(|n| n.ends_with("_plot.py")), "{names:?}");
    assert!(names.iter().any(|n| n.ends_with(".json")), "{names:?}");
}
