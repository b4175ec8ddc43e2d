use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainlet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn file(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn problems(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "problems", name].iter().collect();
    p.to_string_lossy().into_owned()
}

#[test]
fn norm_of_two_points() {
    let dir = tempfile::tempdir().unwrap();
    let c = file(dir.path(), "two.chain", "chain n=1 k=0 mode=rat\nT P 0 S 0 A 1\nT P 1/2 S 0 A -1\n");
    let o = run(&["norm", &c]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.5 0.5 0\n");
    let cert = std::fs::read_to_string(dir.path().join("two.cert")).unwrap();
    assert!(cert.starts_with("bracket r=1"));
    let o2 = run(&["norm", &c, "--r", "2"]);
    let ub2: f64 = stdout(&o2).split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(ub2 <= 0.5);
}

#[test]
fn norm_of_empty_files() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["", "chain n=2 k=1 mode=f64\n"] {
        let c = file(dir.path(), "e.chain", text);
        let o = run(&["norm", &c]);
        assert!(o.status.success());
        assert_eq!(stdout(&o), "0 0 0\n");
    }
}

#[test]
fn parse_errors_exit_2_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let c = file(dir.path(), "bad.chain", "chain n=1 k=0 mode=rat\nT P 0 S 0 A\n");
    let o = run(&["norm", &c]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let p = file(dir.path(), "bad.plateau", "plateu\ncurve param (cos x1) (sin x1) 0\nconepoint 0 0 1\n");
    let o = run(&["plateau", &p, "--out-dir", &dir.path().to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn verify_is_deterministic_and_catches_the_canary() {
    let a = run(&["verify", "--seed", "7", "--trials", "30"]);
    let b = run(&["verify", "--seed", "7", "--trials", "30"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("config seed=7 trials=30"));
    let f = run(&["verify", "--trials", "30", "--inject-fault", "retract-sign"]);
    assert_eq!(f.status.code(), Some(1));
    let text = stdout(&f);
    let failing: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].contains("retraction"));
}

#[test]
fn integrate_boundary_and_cone() {
    let dir = tempfile::tempdir().unwrap();
    let sq = file(
        dir.path(),
        "sq.chain",
        "chain n=2 k=2 mode=rat\nC plain W 1 V 0 0 1 0 1 1\nC plain W 1 V 0 0 1 1 0 1\n",
    );
    let xdy = file(dir.path(), "xdy.form", "form n=2 k=1\nF 2 x1\n");
    let b = run(&["boundary", &sq]);
    assert!(b.status.success());
    let bd = file(dir.path(), "bd.chain", &stdout(&b));
    // ∫_{∂Q} x dy = area of the unit square
    let o = run(&["integrate", &bd, &xdy]);
    assert_eq!(stdout(&o).trim(), "1");
    let seg = file(dir.path(), "seg.chain", "chain n=2 k=1 mode=rat\nC plain W 1 V 0 1 1 1\n");
    let c = run(&["cone", &seg, "--point", "0 0"]);
    assert!(c.status.success());
    let cone = file(dir.path(), "cone.chain", &stdout(&c));
    let vol = file(dir.path(), "vol.form", "form n=2 k=2\nF 1,2 1\n");
    let o = run(&["integrate", &cone, &vol]);
    assert_eq!(stdout(&o).trim().trim_start_matches('-'), "1/2");
}

#[test]
fn yframe_writes_junction_lines() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["plateau", &problems("yframe.plateau"), "--out-dir", &dir.path().to_string_lossy()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let obj = std::fs::read_to_string(dir.path().join("yframe.obj")).unwrap();
    let verts: Vec<[f64; 3]> = obj
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let x: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            [x[0], x[1], x[2]]
        })
        .collect();
    // some `l` record runs along the hinge x = y = 0
    let on_hinge = obj.lines().filter_map(|l| l.strip_prefix("l ")).any(|l| {
        l.split_whitespace().map(|t| verts[t.parse::<usize>().unwrap() - 1]).all(|v| v[0].abs() < 1e-9 && v[1].abs() < 1e-9)
    });
    assert!(on_hinge);
    let report = std::fs::read_to_string(dir.path().join("yframe.report")).unwrap();
    assert!(report.contains("config backend: flow"));
    assert!(report.contains("result: ok"));
}

#[test]
fn circle_reports_area_near_pi() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["plateau", &problems("circle.plateau"), "--out-dir", &dir.path().to_string_lossy()]);
    assert!(o.status.success());
    let area: f64 = stdout(&o).lines().find_map(|l| l.strip_prefix("area: ")).unwrap().parse().unwrap();
    assert!((area - std::f64::consts::PI).abs() < 0.05 * std::f64::consts::PI);
}
