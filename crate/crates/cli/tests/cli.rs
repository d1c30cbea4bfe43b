use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn polyspace(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyspace"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_toy_table(dir: &Path, name: &str, offset: i64) {
    let mut text = String::from("n=0 m=2 p=0 q=3\n");
    for z in 0..4i64 {
        let v = 2 * z + offset;
        text.push_str(&format!("{z} {v} {v}\n"));
    }
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn toy_table_is_feasible_without_lookup_bits() {
    let dir = tempfile::tempdir().unwrap();
    write_toy_table(dir.path(), "toy.txt", 0);
    let o = polyspace(&["--table", "toy.txt", "feasible"], dir.path());
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("R=0 feasible"), "{s}");
    assert!(s.contains("min_feasible_R=0"));
}

#[test]
fn toy_generate_reports_zero_shift() {
    let dir = tempfile::tempdir().unwrap();
    write_toy_table(dir.path(), "toy.txt", 0);
    let o = polyspace(&["--table", "toy.txt", "-R", "0", "generate"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("R=0 k=0 linear"));
    let cat = fs::read_to_string(dir.path().join("toy_R0.catalog")).unwrap();
    assert!(cat.contains("region 0 a=0..0 entries=1"), "{cat}");
}

#[test]
fn lookup_bits_beyond_input_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspace(
        &["-f", "recip", "-b", "10", "-R", "11", "feasible"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_build_names_region() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspace(&["-f", "recip", "-b", "10", "-R", "1", "build"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("region 0 is infeasible at R=1"), "{err}");
}

#[test]
fn recip_sweep_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspace(
        &["-f", "recip", "-b", "10", "--r-max", "7", "feasible"],
        dir.path(),
    );
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("min_feasible_R=3"), "{s}");
    for r in 3..=7 {
        let o = polyspace(
            &["-f", "recip", "-b", "10", "-R", &r.to_string(), "feasible"],
            dir.path(),
        );
        assert!(stdout(&o).contains(&format!("R={r} feasible")));
    }
}

#[test]
fn build_is_deterministic_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = polyspace(
            &[
                "-f",
                "recip",
                "-b",
                "10",
                "-R",
                "6",
                "-j",
                threads,
                "--out-dir",
                out,
                "build",
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let a = run("1", "a");
    let b = run("4", "b");
    assert!(a.contains("LUT [0,4,14] = 18"), "{a}");
    assert!(a.contains("check result=pass inputs=1024"));
    assert_eq!(a.replace("a/", ""), b.replace("b/", ""));
    for ext in ["design", "v"] {
        let f = format!("recip_10_R6.{ext}");
        assert_eq!(
            fs::read(dir.path().join("a").join(&f)).unwrap(),
            fs::read(dir.path().join("b").join(&f)).unwrap()
        );
    }
    let hdl = fs::read_to_string(dir.path().join("a/recip_10_R6.v")).unwrap();
    assert!(hdl.starts_with("// LUT [0,4,14] = 18\n"));
    assert!(hdl.contains("module recip_10_R6 ("));
    assert!(!hdl.contains("sq ="));
}

#[test]
fn verify_passes_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    write_toy_table(dir.path(), "toy.txt", 0);
    write_toy_table(dir.path(), "shifted.txt", 1);
    let o = polyspace(&["--table", "toy.txt", "-R", "0", "build"], dir.path());
    assert!(o.status.success());

    let o = polyspace(
        &["--table", "toy.txt", "verify", "toy_R0.design", "--hdl"],
        dir.path(),
    );
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("result=pass inputs=4 worst_slack=0\n"), "{s}");
    assert!(s.contains("hdl=match"));

    let o = polyspace(
        &["--table", "shifted.txt", "verify", "toy_R0.design"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample=0:0:1:1"));

    let o = polyspace(
        &[
            "--table",
            "toy.txt",
            "verify",
            "toy_R0.design",
            "--samples",
            "10",
        ],
        dir.path(),
    );
    assert!(stdout(&o).starts_with("result=pass inputs=10"));

    let text = fs::read_to_string(dir.path().join("toy_R0.design")).unwrap();
    fs::write(dir.path().join("bad.design"), text.replace("k=0", "k=x")).unwrap();
    let o = polyspace(&["--table", "toy.txt", "verify", "bad.design"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "function = \"log2\"\nbits = 10\nlookup_bits = 5\nout_dir = \"out\"\n",
    )
    .unwrap();
    let o = polyspace(&["--config", "run.toml", "-R", "6", "generate"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("R=6 k=3 linear"), "{s}");
    assert!(dir.path().join("out/log2_10_R6.catalog").exists());

    fs::write(
        dir.path().join("bad.toml"),
        "function = \"log2\"\nbitz = 10\n",
    )
    .unwrap();
    let o = polyspace(&["--config", "bad.toml", "feasible"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_command_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspace(
        &["-f", "exp2", "-b", "4", "--accuracy", "faithful", "bounds"],
        dir.path(),
    );
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("n=0 m=4 p=1 q=4\n0 16 16\n"), "{s}");
}

#[test]
fn bench_reports_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let o = polyspace(
        &["-f", "recip", "-b", "8", "bench", "--sweep", "3..4"],
        dir.path(),
    );
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("R skip_s naive_s speedup"));
    assert!(s.contains("loglog_slope="), "{s}");
}
