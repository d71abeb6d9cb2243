use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use octkcf::synth::{generate, SceneSpec};

fn octkcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octkcf")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn fixture(root: &Path) {
    generate(&SceneSpec::constant_velocity()).unwrap().write_otb(&root.join("synth_cv")).unwrap();
    generate(&SceneSpec { frames: 15, ..SceneSpec::occluded() })
        .unwrap()
        .write_otb(&root.join("synth_occlusion"))
        .unwrap();
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn selftest_passes() {
    let o = octkcf(&["selftest"]);
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{out}");
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!out.contains("FAIL"));
}

#[test]
fn track_writes_one_row_per_frame() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let out = tmp.path().join("r");
    let o = octkcf(&["track", "--seq", s(&tmp.path().join("synth_cv")), "--mode", "oct-kcf", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("synth_cv/oct-kcf.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "frame,pred_x,pred_y,pred_w,pred_h,gt_x,gt_y,gt_w,gt_h,cle,iou,peak,zscore,gate,redetect"
    );
    assert_eq!(lines.count(), 60);
}

#[test]
fn config_file_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let cfg = tmp.path().join("exp.cfg");
    fs::write(&cfg, "# baseline run\nmode=kcf\nkcf_rate=0.05\n").unwrap();
    let out = tmp.path().join("r");
    let seq = tmp.path().join("synth_cv");
    let o = octkcf(&["track", "--seq", s(&seq), "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(out.join("synth_cv/kcf.csv").is_file());
    // --mode wins over the file
    let o = octkcf(&["track", "--seq", s(&seq), "--config", s(&cfg), "--mode", "oct-kcf", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(out.join("synth_cv/oct-kcf.csv").is_file());
    let o = octkcf(&["track", "--seq", s(&seq), "--set", "t_g=2.5", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
}

#[test]
fn bench_and_compare() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    fixture(&data);
    let out = tmp.path().join("r");
    let o = octkcf(&["bench", "--dataset", s(&data), "--out", s(&out), "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["summary.csv", "synth_cv/kcf.csv", "synth_occlusion/oct-kcf.csv", "curves/success.svg"] {
        assert!(out.join(f).is_file(), "{f}");
    }

    let o = octkcf(&["compare", "--dataset", s(&data)]);
    assert_eq!(code(&o), 0);
    let table = String::from_utf8_lossy(&o.stdout);
    let header = table.lines().next().unwrap();
    assert!(header.contains("Precision") && header.contains("Success rate") && header.contains("Speed"));
    assert!(table.lines().any(|l| l.starts_with("KCF ")));
    assert!(table.lines().any(|l| l.starts_with("OCT-KCF ")));
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let seq = tmp.path().join("synth_cv");
    let out = tmp.path().join("r");

    assert_eq!(code(&octkcf(&[])), 1);
    assert_eq!(code(&octkcf(&["frobnicate"])), 1);
    assert_eq!(code(&octkcf(&["track", "--seq", s(&seq)])), 1);

    let o = octkcf(&["track", "--seq", s(&seq), "--mode", "struck", "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--mode"));

    let cfg = tmp.path().join("typo.cfg");
    fs::write(&cfg, "lamda=1e-4\n").unwrap();
    let o = octkcf(&["track", "--seq", s(&seq), "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("typo.cfg") && err.contains("lamda"), "{err}");

    let o = octkcf(&["track", "--seq", s(&seq), "--config", s(&tmp.path().join("nope.cfg")), "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    let o = octkcf(&["track", "--seq", s(&seq), "--set", "lambda", "--out", s(&out)]);
    assert_eq!(code(&o), 1);

    assert_eq!(code(&octkcf(&["--help"])), 0);
}

#[test]
fn data_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    fixture(tmp.path());
    let out = tmp.path().join("r");

    let missing = tmp.path().join("missing");
    let o = octkcf(&["track", "--seq", s(&missing), "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing"));

    let seq = tmp.path().join("synth_cv");
    fs::write(seq.join("groundtruth_rect.txt"), "10,10,20,20\n11,x,20,20\n").unwrap();
    let o = octkcf(&["track", "--seq", s(&seq), "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));

    let empty = tmp.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    assert_eq!(code(&octkcf(&["bench", "--dataset", s(&empty), "--out", s(&out)])), 2);
}
