use std::path::Path;
use std::process::{Command, Output};

fn berslab(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_berslab"));
    cmd.args(args).current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../.."));
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("berslab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn malformed_polygon_is_a_usage_error() {
    let dir = scratch("bad");
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"{"alphas": [0.5, 0.5], "prevertices": [0, 1]}"#).unwrap();
    let out = berslab(&["critical-radius", "--polygon", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(berslab(&["critical-radius", "--polygon", path.to_str().unwrap()], &[]).status.code(), Some(2));
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = berslab(&["critical-radius", "--polygon", "configs/nope.json"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn empty_or_out_of_range_grid_is_rejected() {
    let p = ["ray-probe", "--polygon", "configs/rectangle.json", "--t-grid"];
    assert_eq!(berslab(&[&p[..], &["0.5:0.4:0.1"]].concat(), &[]).status.code(), Some(2));
    assert_eq!(berslab(&[&p[..], &["0.5:1.5:0.5"]].concat(), &[]).status.code(), Some(2));
    assert_eq!(berslab(&[&p[..], &["0.5:1.5:0.5", "--allow-beyond-one", "--variant", "scaled"]].concat(), &[]).status.code(), Some(0));
}

#[test]
fn unknown_convention_is_a_usage_error() {
    let out = berslab(&["bnorm", "--polygon", "configs/rectangle.json", "--convention", "hp2"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_does_not_depend_on_thread_count() {
    let args = ["report", "--polygon", "configs/triangle.json", "--seed", "3", "--N", "8", "--M", "128", "--L", "3"];
    let one = berslab(&args, &[("BERSLAB_THREADS", "1")]);
    let four = berslab(&args, &[("BERSLAB_THREADS", "4")]);
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(berslab(&args, &[("BERSLAB_THREADS", "many")]).status.code(), Some(2));
}

#[test]
fn seeds_and_polygons_change_the_report() {
    let base = ["report", "--N", "8", "--M", "128", "--L", "2", "--polygon"];
    let a = berslab(&[&base[..], &["configs/rectangle.json", "--seed", "1"]].concat(), &[]);
    let b = berslab(&[&base[..], &["configs/rectangle.json", "--seed", "2"]].concat(), &[]);
    let c = berslab(&[&base[..], &["configs/pentagon.toml", "--seed", "1"]].concat(), &[]);
    assert!(a.status.success() && b.status.success() && c.status.success());
    assert_ne!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], "berslab.report/1");
}

#[test]
fn ray_probe_writes_csv_to_out_dir() {
    let dir = scratch("probe");
    let out = berslab(
        &["--out", dir.to_str().unwrap(), "ray-probe", "--polygon", "configs/rectangle.json", "--t-grid", "0.2:0.6:0.2"],
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let names: Vec<String> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    let csv = names.iter().find(|n| n.ends_with(".csv")).expect("a csv file");
    let text = std::fs::read_to_string(dir.join(csv)).unwrap();
    assert!(text.contains("t,variant,simple,norm_hp1,norm_hp4,aw_applicable,breakdown_flag"));
    assert_eq!(text.lines().filter(|l| l.contains(",homotopy,")).count(), 3);
}

#[test]
fn theta_reads_generator_files() {
    let out = berslab(&["theta", "--generators", "configs/schottky.json", "--L", "3"], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let missing = berslab(&["theta", "--generators", "configs/none.json"], &[]);
    assert_eq!(missing.status.code(), Some(2));
}
