use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_stokes-stab");

const HANGING: &str =
    "trimesh v1\nvertices 5\n0 0\n1 0\n1 1\n0 1\n0.5 0.5\ntriangles 3\n0 1 2\n0 4 3\n4 2 3\n\
                       boundary 4\n0 1 D\n1 2 D\n2 3 D\n3 0 D\n";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn column(header: &str, name: &str) -> usize {
    header.split(',').position(|c| c == name).unwrap()
}

#[test]
fn uniform_study_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "uniform-study",
            "--case",
            "SMOOTH_SQUARE",
            "--pair",
            "P1P1",
            "--levels",
            "4",
            "--out",
            "run",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("run/table.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);

    let (eu, ep, rate) = (
        column(header, "err_H1_u"),
        column(header, "err_L2_p"),
        column(header, "rate"),
    );
    let err: Vec<f64> = rows
        .iter()
        .map(|r| r[eu].parse::<f64>().unwrap() + r[ep].parse::<f64>().unwrap())
        .collect();
    assert!(rows[0][rate].is_empty());
    for i in 1..rows.len() {
        let printed: f64 = rows[i][rate].parse().unwrap();
        let recomputed = (err[i - 1] / err[i]).log2();
        assert!(
            (printed - recomputed).abs() <= 1e-12,
            "row {i}: {printed} vs {recomputed}"
        );
        assert!((printed - 1.0).abs() <= 0.2, "row {i}: rate {printed}");
    }

    let manifest = std::fs::read_to_string(dir.path().join("run/manifest.txt")).unwrap();
    assert!(manifest.contains("command = uniform-study"));
    assert!(manifest.contains("rows = 4"));
    for level in 0..4 {
        assert!(dir
            .path()
            .join(format!("run/solution_{level}.vtk"))
            .exists());
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = run(
            dir.path(),
            &[
                "adaptive-study",
                "--case",
                "LSHAPE_PEAK",
                "--pair",
                "P2P1",
                "--max-iters",
                "3",
                "--out",
                out,
            ],
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let files: Vec<_> = std::fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert!(files.len() >= 3);
    for name in files {
        let a = std::fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(&name)).unwrap();
        assert!(a == b, "{name:?} differs");
    }
}

#[test]
fn nonconforming_mesh_exits_with_mesh_code() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("hanging.mesh"), HANGING).unwrap();
    for command in ["audit", "solve"] {
        let out = run(
            dir.path(),
            &[command, "--mesh", "hanging.mesh", "--case", "SMOOTH_SQUARE"],
        );
        assert_eq!(out.status.code(), Some(3), "{command}: {}", stderr(&out));
        assert!(stderr(&out).contains("conformity"), "{}", stderr(&out));
    }
}

#[test]
fn inadmissible_alpha_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "solve",
            "--case",
            "SMOOTH_SQUARE",
            "--pair",
            "P2P1",
            "--alpha",
            "0.5",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("C_I"), "{msg}");
    assert_eq!(msg.trim_end().lines().count(), 1, "{msg}");
}

#[test]
fn bad_configuration_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "case = SMOOTH_SQUARE\nbogus = 1\n",
    )
    .unwrap();
    let out = run(dir.path(), &["solve", "--config", "run.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = run(
        dir.path(),
        &["uniform-study", "--case", "SMOOTH_SQUARE", "--levels", "2"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flags_merge() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.cfg"),
        "# solve settings\ncase = NEUMANN_STRIP\npair = P1P1\nn = 3\n",
    )
    .unwrap();
    let out = run(
        dir.path(),
        &[
            "solve", "--config", "run.cfg", "--pair", "P2P1", "--out", "s",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest = std::fs::read_to_string(dir.path().join("s/manifest.txt")).unwrap();
    assert!(manifest.contains("case = NEUMANN_STRIP"));
    assert!(manifest.contains("pair = P2P1"));
}
