use std::path::Path;
use std::process::{Command, Output};

use mapcones::cones::in_f;
use mapcones::fixtures::CHOI_MAP_JSON;
use mapcones::mapfile::MapFile;
use mapcones::{CMatrix, Dims, MapRep};
use mapcones_cli::exit;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapcones"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_map(dir: &Path, name: &str, phi: &MapRep) -> String {
    let p = dir.join(name);
    std::fs::write(&p, MapFile::from_map(phi).to_json()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_identity_cp_and_cop() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_map(dir.path(), "id.json", &MapRep::identity(2).unwrap());
    let o = run(&["check", &id, "cp"]);
    assert_eq!(code(&o), exit::IN, "{}", stdout(&o));
    assert!(stdout(&o).contains("status: IN"));
    let o = run(&["check", &id, "cop"]);
    assert_eq!(code(&o), exit::OUT);
    assert!(stdout(&o).contains("min-eigen"));
    let o = run(&["check", &id, "CP"]);
    assert_eq!(code(&o), exit::IN);
}

#[test]
fn check_every_cone_name() {
    let dir = tempfile::tempdir().unwrap();
    let depol = MapRep::completely_depolarizing(2, 2).unwrap();
    let tr = depol.choi().trace().re;
    let depol = write_map(dir.path(), "depol.json", &depol.scale(1.0 / tr));
    for cone in ["cp", "cop", "p", "d", "s", "pos", "psd", "f", "e", "sep", "blockpos"] {
        let o = run(&["check", &depol, cone]);
        assert_eq!(code(&o), exit::IN, "{cone}: {}", stdout(&o));
    }
}

#[test]
fn check_errors() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_map(dir.path(), "id.json", &MapRep::identity(2).unwrap());
    let text = std::fs::read_to_string(&id).unwrap();
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&run(&["check", cut.to_str().unwrap(), "cp"])), exit::USAGE);
    assert_eq!(code(&run(&["check", &id, "nonsense"])), exit::UNKNOWN_NAME);
    assert_eq!(code(&run(&["check", "/nonexistent/file.json", "cp"])), exit::IO);
    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"n": 2, "m": 2, "choi": [[1, 0]]}"#).unwrap();
    assert_eq!(code(&run(&["check", short.to_str().unwrap(), "cp"])), exit::DATA);
    assert_eq!(code(&run(&["check"])), exit::USAGE);
}

#[test]
fn pair_values() {
    let dir = tempfile::tempdir().unwrap();
    let id = write_map(dir.path(), "id.json", &MapRep::identity(2).unwrap());
    let o = run(&["pair", &id, &id]);
    assert_eq!(code(&o), exit::IN);
    assert_eq!(stdout(&o).trim(), "4.0");

    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (p, seed) in [(&a, "1"), (&b, "2")] {
        let o = run(&["random", "cp", "2", "2", "--seed", seed, "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), exit::IN);
    }
    let o = run(&["pair", a.to_str().unwrap(), b.to_str().unwrap()]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!(v >= 0.0);

    let other = write_map(dir.path(), "id3.json", &MapRep::identity(3).unwrap());
    assert_eq!(code(&run(&["pair", &id, &other])), exit::DATA);
}

#[test]
fn witness_for_choi_map() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("choi.json");
    std::fs::write(&file, CHOI_MAP_JSON).unwrap();
    let w_path = dir.path().join("w.json");
    let o = run(&["witness", file.to_str().unwrap(), "--out", w_path.to_str().unwrap()]);
    assert_eq!(code(&o), exit::IN, "{}", stdout(&o));
    let w = MapFile::parse(&std::fs::read_to_string(&w_path).unwrap()).unwrap();
    assert!(w.violation.unwrap() < 0.0);
    assert!((w.choi.trace().re - 1.0).abs() < 1e-9);
    assert!(in_f(&w.choi, w.dims, 1e-9).unwrap().is_in());

    let id = write_map(dir.path(), "id.json", &MapRep::identity(3).unwrap());
    let o = run(&["witness", &id]);
    assert_eq!(code(&o), exit::OUT);
    assert_eq!(stdout(&o).trim(), "none");
}

#[test]
fn random_is_deterministic() {
    let a = run(&["random", "cp", "3", "3", "--seed", "7"]);
    let b = run(&["random", "cp", "3", "3", "--seed", "7"]);
    assert_eq!(code(&a), exit::IN);
    assert_eq!(a.stdout, b.stdout);
    let file = MapFile::parse(&stdout(&a)).unwrap();
    assert_eq!(file.dims, Dims::square(3).unwrap());
    assert_eq!(code(&run(&["random", "psd", "2", "2"])), exit::UNKNOWN_NAME);
    assert_eq!(code(&run(&["random", "bogus", "2", "2"])), exit::UNKNOWN_NAME);
}

#[test]
fn verify_reports() {
    let o = run(&["verify", "L4", "3", "3", "--trials", "100", "--seed", "1", "--format", "json"]);
    assert_eq!(code(&o), exit::IN);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["failures"].as_array().unwrap().len(), 0);
    assert_eq!(report["theorem"], "L4");

    let o = run(&["verify", "T13", "3", "3", "--trials", "200", "--seed", "1", "--format", "markdown"]);
    assert_eq!(code(&o), exit::IN);
    let text = stdout(&o);
    assert!(text.starts_with("# PASS"));
    assert!(text.contains("fixture violation"));

    assert_eq!(code(&run(&["verify", "T99", "3", "3"])), exit::UNKNOWN_NAME);
    assert_eq!(code(&run(&["verify", "L4", "3", "3", "--format", "xml"])), exit::UNKNOWN_NAME);
    assert_eq!(code(&run(&["verify", "T18", "2", "3", "--trials", "1"])), exit::DATA);
}

#[test]
fn non_hermitian_input_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut x = CMatrix::<f64>::zeros(4, 4);
    x[(0, 1)] = mapcones::C64::new(1.0, 0.0);
    let phi = MapRep::from_choi(Dims::square(2).unwrap(), x).unwrap();
    let p = write_map(dir.path(), "nh.json", &phi);
    assert_eq!(code(&run(&["check", &p, "cp"])), exit::DATA);
}
