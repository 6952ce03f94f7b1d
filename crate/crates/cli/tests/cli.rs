use std::path::Path;
use std::process::{Command, Output};

fn affiq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affiq"))
        .args(args)
        .env_remove("AFFIQ_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_cube(dir: &Path) -> String {
    let path = dir.join("cube.json");
    let o = affiq(&["body", "generate", "--kind", "cube", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path.to_str().unwrap().to_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn generate_cube_and_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write_cube(dir.path());
    let body: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cube).unwrap()).unwrap();
    assert_eq!(body["vertices"].as_array().unwrap().len(), 8);
    let o = affiq(&["body", "inspect", &cube]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["volume"]["value"], 1.0);
    assert_eq!(v["dim"], 3);
    assert_eq!(v["vertices"], 8);
}

#[test]
fn random_generation_is_deterministic() {
    let args = ["body", "generate", "--kind", "random-poly", "--n", "4", "--m", "30", "--seed", "7"];
    let (a, b) = (affiq(&args), affiq(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn quermass_of_the_ball_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.json");
    let o = affiq(&["body", "generate", "--kind", "ball", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = affiq(&["quermass", "compute", path.to_str().unwrap(), "--k", "2", "--p", "-3", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((v["q"]["value"].as_f64().unwrap() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    assert_eq!(v["q"]["stderr"], 0.0);
    assert!(v["phi"].is_object());
}

#[test]
fn quermass_of_the_cube_mean_width() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write_cube(dir.path());
    let o = affiq(&["quermass", "compute", &cube, "--k", "2", "--p", "1", "--seed", "1", "--budget", "100000"]);
    let v = json(&o);
    let q = v["q"]["value"].as_f64().unwrap();
    let se = v["q"]["stderr"].as_f64().unwrap();
    assert!((q - 2.0).abs() <= 4.0 * se + 1e-9, "{q} ± {se}");
    assert!(v.get("phi").is_none());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write_cube(dir.path());
    assert_eq!(code(&affiq(&["quermass", "compute", &cube, "--k", "2", "--p", "1"])), 2, "missing seed");
    let o = affiq(&["verify", "no-such-suite", "--seed", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("lutwak"));
    assert_eq!(code(&affiq(&["body", "generate", "--kind", "dodecahedron", "--n", "3"])), 2);
    assert_eq!(code(&affiq(&["body", "inspect", "/nonexistent/body.json"])), 2);
    assert_eq!(code(&affiq(&["verify", "geometry", "--seed", "1"])), 0);

    // a flat point set passes parsing but has no interior
    let flat = dir.path().join("flat.json");
    std::fs::write(&flat, r#"{"kind":"vpoly","dim":3,"vertices":[[0,0,0],[1,0,0],[0,1,0],[1,1,0]]}"#).unwrap();
    assert_eq!(code(&affiq(&["body", "inspect", flat.to_str().unwrap()])), 3);
}

#[test]
fn verify_list() {
    let o = affiq(&["verify", "--list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for s in ["lutwak", "steiner", "petty", "bp", "slab"] {
        assert!(text.contains(s), "{s}");
    }
}

#[test]
fn verify_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report");
    let o = affiq(&["verify", "geometry", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let j: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(j["suite"], "geometry");
    assert_eq!(j["pass"], true);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("suite,case,body,n,k,p,t,u_hash,lhs,rhs,margin,stderr,pass\n"));
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |threads: &str| {
        affiq(&["verify", "rolodex", "--seed", "5", "--n", "3", "--budget", "20000", "--threads", threads]).stdout
    };
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("3"));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write_cube(dir.path());
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"seed": 9, "k": 1, "p": "log", "budget": 5000}"#).unwrap();
    let a = affiq(&["quermass", "compute", &cube, "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = affiq(&["quermass", "compute", &cube, "--seed", "9", "--k", "1", "--p", "log", "--budget", "5000"]);
    assert_eq!(a.stdout, b.stdout);
    let c = affiq(&["quermass", "compute", &cube, "--config", cfg.to_str().unwrap(), "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
    std::fs::write(&cfg, r#"{"sed": 9}"#).unwrap();
    assert_eq!(code(&affiq(&["quermass", "compute", &cube, "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn symmetrize_preserves_volume() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write_cube(dir.path());
    let sym = dir.path().join("sym.json");
    let o = affiq(&["symmetrize", &cube, "--u", "1,2,0", "--t", "0", "--seed", "1", "--out", sym.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&affiq(&["body", "inspect", sym.to_str().unwrap()]));
    assert!((v["volume"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn documented_verify_runs_pass() {
    let o = affiq(&["verify", "lutwak", "--n", "3", "--budget", "200000", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = affiq(&["verify", "steiner", "--body", "simplex3", "--dirs", "8", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["cases"].as_array().unwrap().iter().filter(|c| c["body"] != "simplex3").count(), 0);
}
