use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hexstruct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexstruct"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn synth(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap();
    let mut args = vec!["synth", "--output", p];
    args.extend_from_slice(extra);
    let o = hexstruct(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p.to_string()
}

fn csv_row(text: &str) -> Vec<String> {
    text.lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect()
}

#[test]
fn synth_grid_report() {
    let o = hexstruct(&["analyze", "--synth-grid", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let row = csv_row(&stdout(&o));
    // |C|, hex_ratio, |C_B|, hexbc_ratio, n_sheets, n_t1..n_t3
    assert_eq!(&row[1..9], ["27", "1", "1", "1", "9", "0", "0", "0"]);
}

#[test]
fn missing_file_exits_2() {
    let o = hexstruct(&["analyze", "/definitely/not/here.vtk"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn unsupported_cell_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.vtk");
    fs::write(
        &path,
        "# vtk DataFile Version 3.0\nt\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS 3 float\n\
         0 0 0 1 0 0 0 1 0\nCELLS 1 4\n3 0 1 2\nCELL_TYPES 1\n5\n",
    )
    .unwrap();
    let o = hexstruct(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn malformed_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.vtk");
    fs::write(&path, "not a vtk file\n").unwrap();
    assert_eq!(
        hexstruct(&["analyze", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn synth_round_trip_matches_direct_analysis() {
    let dir = tempfile::tempdir().unwrap();
    let p = synth(
        dir.path(),
        "d.vtk",
        &["--synth-grid", "3,3,1", "--synth-recipe", "doublet:4"],
    );
    let from_file = csv_row(&stdout(&hexstruct(&["analyze", &p, "--format", "csv"])));
    let direct = csv_row(&stdout(&hexstruct(&[
        "analyze",
        "--synth-grid",
        "3,3,1",
        "--synth-recipe",
        "doublet:4",
        "--format",
        "csv",
    ])));
    assert_eq!(from_file[1..10], direct[1..10]);
}

#[test]
fn compare_with_itself_has_zero_deltas() {
    let dir = tempfile::tempdir().unwrap();
    let p = synth(dir.path(), "g.vtk", &["--synth-grid", "2"]);
    let o = hexstruct(&["compare", &p, &p, "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["|C|", "|C_B|", "n_sheets", "n_t1", "n_t2", "n_t3"] {
        assert_eq!(v["delta"][key], 0, "{key}");
    }
    assert_eq!(v["delta"]["hex_ratio"], 0.0);
}

#[test]
fn compare_grid_with_doublet_grows_components() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "a.vtk", &["--synth-grid", "3,3,1"]);
    let b = synth(
        dir.path(),
        "b.vtk",
        &["--synth-grid", "3,3,1", "--synth-recipe", "doublet:4"],
    );
    let o = hexstruct(&["compare", &a, &b, "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let delta: Vec<&str> = text.lines().nth(3).unwrap().split(',').collect();
    assert_eq!(delta[0], "delta");
    let d_cb: i64 = delta[4].parse().unwrap();
    assert!(d_cb > 0, "{text}");
}

#[test]
fn batch_rows_and_empty_dir() {
    let empty = tempfile::tempdir().unwrap();
    let o = hexstruct(&["batch", empty.path().to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);

    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), "a.vtk", &["--synth-grid", "2"]);
    synth(
        dir.path(),
        "b.vtk",
        &["--synth-grid", "1", "--synth-recipe", "split-hex"],
    );
    synth(
        dir.path(),
        "c.vtk",
        &["--synth-grid", "2,2,1", "--synth-recipe", "glue-prism"],
    );
    fs::write(dir.path().join("broken.vtk"), "garbage").unwrap();
    let d = dir.path().to_str().unwrap();
    let o = hexstruct(&["batch", d, "--format", "csv", "--jobs", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("1 failed"));

    let strict = hexstruct(&["batch", d, "--format", "csv", "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn exports_are_byte_stable() {
    let run = |dir: &Path| {
        let d = dir.to_str().unwrap();
        let o = hexstruct(&[
            "analyze",
            "--synth-grid",
            "3,3,1",
            "--synth-recipe",
            "doublet:4",
            "--synth-recipe",
            "glue-prism:4",
            "--export-hsg",
            d,
            "--export-complex",
            d,
            "--export-sheets",
            d,
            "--export-wireframe",
            d,
            "--export-sheet-wireframes",
            d,
        ]);
        assert!(o.status.success());
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().into_string().unwrap(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let fa = run(a.path());
    assert!(fa.iter().any(|(n, _)| n == "complex.vtk"));
    assert!(fa.iter().any(|(n, _)| n == "wireframe.vtk"));
    assert!(fa.iter().any(|(n, _)| n == "subsheet_000_wireframe.vtk"));
    assert_eq!(fa, run(b.path()));
}
