//! Acceptance criteria, one line each. Run with
//! `cargo test --release -p affiq-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use affiq::experiments::run_suite;
use affiq::{BodyCatalog, Result, SuiteConfig, SuiteReport};

const SEED: u64 = 1;

type Check = Box<dyn Fn() -> Result<(bool, String)>>;

fn suite(name: &str) -> Result<SuiteReport> {
    run_suite(name, &BodyCatalog::builtin(), &SuiteConfig::new(SEED))
}

fn suites(names: &[&str]) -> Result<(bool, String)> {
    let mut pass = true;
    let mut detail = Vec::new();
    for name in names {
        let r = suite(name)?;
        let asserted = r.cases.iter().filter(|c| c.assertion.is_asserted()).count();
        let failed = r.failures().count();
        pass &= r.pass && asserted > 0;
        detail.push(format!("{name} {}/{asserted}", asserted - failed));
        for c in r.failures() {
            detail.push(format!("[{} margin {:.3e} se {:.2e}]", c.case, c.margin, c.stderr));
        }
    }
    Ok((pass, detail.join(", ")))
}

fn determinism() -> Result<(bool, String)> {
    let mut pass = true;
    let mut detail = Vec::new();
    for name in ["kubota", "rolodex", "lutwak"] {
        let run = |threads: usize| -> Result<String> {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
            pool.install(|| suite(name))?.to_json()
        };
        let same = run(1)? == run(3)?;
        pass &= same;
        detail.push(format!("{name} {}", if same { "identical" } else { "differs" }));
    }
    Ok((pass, format!("1 vs 3 threads: {}", detail.join(", "))))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Check)> = vec![
        ("exact geometry", Box::new(|| suites(&["geometry"]))),
        ("Kubota and Steiner polynomial", Box::new(|| suites(&["kubota"]))),
        ("affine quermassintegral vs ball", Box::new(|| suites(&["lutwak"]))),
        ("Steiner monotonicity", Box::new(|| suites(&["steiner"]))),
        ("Rolodex measure ratio", Box::new(|| suites(&["rolodex"]))),
        ("split-sampler invariance", Box::new(|| suites(&["bp"]))),
        ("Fubini and wedge lemmas", Box::new(|| suites(&["fubini-wedge"]))),
        ("moment structure and chains", Box::new(|| suites(&["moments", "af-chain"]))),
        ("averaged Loomis-Whitney", Box::new(|| suites(&["loomis-whitney"]))),
        ("polar projection body", Box::new(|| suites(&["petty"]))),
        ("thread-count determinism", Box::new(determinism)),
    ];
    let mut all = true;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!(
            "{:>2}. {} {name}: {detail} ({:.1}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
