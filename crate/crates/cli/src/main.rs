mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use affiq::experiments::{suite_bp, SUITES};
use affiq::quermass::{ball_bound, ProjectionOracle, ShadowSample};
use affiq::rolodex::{mu_estimate, mu_linear, split_stream};
use affiq::symmetry::{default_extra, ShadowFamily};
use affiq::{
    q_kp, run_suite, standard_body, Body, BodyCatalog, BodyParams, McEstimate, QuermassSpec, RngStream, SuiteConfig,
    SuiteReport,
};
use config::{Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(affiq::Error),
}

impl From<affiq::Error> for CliError {
    fn from(e: affiq::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "affiq", version, about = "Affine quermassintegrals and Steiner symmetrization")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON file of defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, env = "AFFIQ_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Moment order, or `log` for the geometric mean.
    #[arg(long, global = true, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Direction, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    u: Option<Vec<f64>>,
    /// Monte Carlo samples.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path; `verify` writes `<out>.json` and `<out>.csv`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Body catalog JSON; the built-in catalog otherwise.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Common {
    fn run_config(&self) -> CliResult<RunConfig> {
        let flags = RunConfig {
            n: self.n,
            k: self.k,
            p: self.p.clone(),
            t: self.t,
            u: self.u.clone(),
            budget: self.budget,
            seed: self.seed,
            threads: self.threads,
            out: self.out.clone(),
            format: self.format,
            catalog: self.catalog.clone(),
            verbosity: (self.verbose > 0).then_some(self.verbose),
        };
        let file = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        Ok(flags.over(file))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate or inspect bodies.
    Body {
        #[command(subcommand)]
        action: BodyCommand,
    },
    /// Moment quermassintegrals of a body.
    Quermass {
        #[command(subcommand)]
        action: QuermassCommand,
    },
    /// Member `K_u(t)` of the shadow system of a body; `t = 0` is the Steiner symmetral.
    Symmetrize {
        body: PathBuf,
        /// Extra base points for polytopes.
        #[arg(long)]
        extra: Option<usize>,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Split-sampler constant across test functions.
    BpCheck,
    /// Rolodex measure of a body against its polar projection moment.
    RolodexCheck { body: PathBuf },
}

#[derive(Subcommand)]
enum BodyCommand {
    Generate {
        #[arg(long)]
        kind: String,
        /// Vertex count for random kinds.
        #[arg(long)]
        m: Option<usize>,
        /// Box sides or ellipsoid semi-axes, comma separated.
        #[arg(long, value_delimiter = ',')]
        sides: Option<Vec<f64>>,
        #[arg(long)]
        radius: Option<f64>,
    },
    Inspect {
        body: PathBuf,
    },
}

#[derive(Subcommand)]
enum QuermassCommand {
    Compute { body: PathBuf },
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name; see `--list`.
    suite: Option<String>,
    #[arg(long)]
    list: bool,
    /// Catalog ids, comma separated.
    #[arg(long, value_delimiter = ',')]
    body: Option<Vec<String>>,
    /// Random directions per body.
    #[arg(long)]
    dirs: Option<usize>,
    /// Parameter grid (shadow-system t, or perturbation size), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    grid: Option<Vec<f64>>,
    /// Moment orders, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p_grid: Option<Vec<f64>>,
    /// Also report cases outside the proven range.
    #[arg(long)]
    exploratory: bool,
}

fn read_body(path: &Path) -> CliResult<Body> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(Body::from_json(&text)?)
}

fn write_out(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> CliResult<String> {
    let v = serde_json::to_value(v).map_err(affiq::Error::from)?;
    Ok(serde_json::to_string_pretty(&v).map_err(affiq::Error::from)? + "\n")
}

fn catalog(cfg: &RunConfig) -> CliResult<BodyCatalog> {
    Ok(match &cfg.catalog {
        Some(p) => BodyCatalog::load(p)?,
        None => BodyCatalog::builtin(),
    })
}

fn direction(cfg: &RunConfig, n: usize) -> CliResult<Vec<f64>> {
    let u = RunConfig::need(&cfg.u, "u")?;
    if u.len() != n {
        return Err(CliError::Usage(format!("--u needs {n} components, got {}", u.len())));
    }
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(CliError::Usage("--u must be non-zero".into()));
    }
    Ok(u.iter().map(|x| x / norm).collect())
}

#[derive(Serialize)]
struct Inspection {
    kind: &'static str,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<usize>,
    volume: affiq::VolumeResult,
    inradius: f64,
}

fn cmd_body(action: &BodyCommand, cfg: &RunConfig) -> CliResult<u8> {
    match action {
        BodyCommand::Generate { kind, m, sides, radius } => {
            let n = RunConfig::need(&cfg.n, "n")?;
            let params = BodyParams { m: *m, seed: cfg.seed, sides: sides.clone(), radius: *radius, ..Default::default() };
            let b = standard_body(kind, n, &params)?;
            write_out(cfg.out.as_deref(), &(b.to_json()? + "\n"))?;
        }
        BodyCommand::Inspect { body } => {
            let b = read_body(body)?;
            let oracle = ProjectionOracle::new(&b)?;
            let report = Inspection {
                kind: b.kind_name(),
                dim: b.dim(),
                vertices: b.as_vpoly().map(|p| p.n_vertices()),
                rows: match &b {
                    Body::HPoly(h) => Some(h.n_rows()),
                    _ => None,
                },
                volume: oracle.volume(),
                inradius: oracle.inradius(),
            };
            let text = match cfg.format() {
                Format::Json => json(&report)?,
                Format::Csv => format!(
                    "kind,dim,vertices,rows,volume,volume_stderr,inradius\n{},{},{},{},{},{},{}\n",
                    report.kind,
                    report.dim,
                    report.vertices.map(|v| v.to_string()).unwrap_or_default(),
                    report.rows.map(|v| v.to_string()).unwrap_or_default(),
                    report.volume.value,
                    report.volume.stderr,
                    report.inradius
                ),
            };
            write_out(cfg.out.as_deref(), &text)?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct QuermassOutput {
    n: usize,
    k: usize,
    p: f64,
    q: McEstimate,
    /// Present when `p = −n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<McEstimate>,
    i: McEstimate,
}

fn cmd_quermass(body: &Path, cfg: &RunConfig) -> CliResult<u8> {
    let b = read_body(body)?;
    let n = b.dim();
    let seed = cfg.seed()?;
    let k = RunConfig::need(&cfg.k, "k")?;
    let p = cfg.p_value()?.ok_or_else(|| CliError::Usage("--p is required (a number or `log`)".into()))?;
    let budget = cfg.budget.unwrap_or(100_000);
    let spec = QuermassSpec::new(k, p, budget);
    let q = q_kp(&b, &spec, seed)?;
    let i = affiq::i_kp(&b, &spec, seed)?;
    let out = QuermassOutput { n, k, p, q, phi: (p == -(n as f64)).then_some(q), i };
    let text = match cfg.format() {
        Format::Json => json(&out)?,
        Format::Csv => {
            let mut s = String::from("quantity,value,stderr,n_samples,seed\n");
            let mut row = |name: &str, e: &McEstimate| {
                let _ = writeln!(s, "{name},{},{},{},{}", e.value, e.stderr, e.n_samples, e.seed);
            };
            row("q", &q);
            if let Some(phi) = &out.phi {
                row("phi", phi);
            }
            row("i", &i);
            s
        }
    };
    write_out(cfg.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_symmetrize(body: &Path, extra: Option<usize>, cfg: &RunConfig) -> CliResult<u8> {
    let b = read_body(body)?;
    let n = b.dim();
    let seed = cfg.seed()?;
    let u = direction(cfg, n)?;
    let t = cfg.t.unwrap_or(0.0);
    let stream = RngStream::new(seed, 0).labeled("symmetrize");
    let family = ShadowFamily::new(&b, &u, extra.unwrap_or_else(|| default_extra(n)), stream)?;
    let out = family.at(t)?;
    write_out(cfg.out.as_deref(), &(out.to_json()? + "\n"))?;
    Ok(0)
}

fn emit_report(report: &SuiteReport, cfg: &RunConfig) -> CliResult<u8> {
    match &cfg.out {
        Some(prefix) => {
            let with = |ext: &str| {
                let mut s = prefix.clone().into_os_string();
                s.push(ext);
                PathBuf::from(s)
            };
            write_out(Some(&with(".json")), &report.to_json()?)?;
            write_out(Some(&with(".csv")), &report.to_csv())?;
        }
        None => match cfg.format() {
            Format::Json => write_out(None, &report.to_json()?)?,
            Format::Csv => write_out(None, &report.to_csv())?,
        },
    }
    eprint!("{}", report.summary());
    Ok(if report.pass { 0 } else { 1 })
}

fn suite_list() -> String {
    let mut s = String::new();
    for info in SUITES {
        let _ = writeln!(s, "{:<16}{}", info.name, info.description);
    }
    s
}

fn cmd_verify(args: &VerifyArgs, cfg: &RunConfig) -> CliResult<u8> {
    if args.list {
        print!("{}", suite_list());
        return Ok(0);
    }
    let Some(name) = &args.suite else {
        return Err(CliError::Usage(format!("missing suite name; available suites:\n{}", suite_list())));
    };
    if !SUITES.iter().any(|s| s.name == name) {
        return Err(CliError::Usage(format!("unknown suite `{name}`; available suites:\n{}", suite_list())));
    }
    let suite_cfg = SuiteConfig {
        seed: cfg.seed()?,
        budget: cfg.budget,
        n: cfg.n,
        k: cfg.k,
        bodies: args.body.clone(),
        dirs: args.dirs,
        u: cfg.u.clone(),
        t_grid: args.grid.clone(),
        p_grid: args.p_grid.clone(),
        exploratory: args.exploratory,
    };
    let report = run_suite(name, &catalog(cfg)?, &suite_cfg)?;
    emit_report(&report, cfg)
}

fn cmd_bp(cfg: &RunConfig) -> CliResult<u8> {
    let suite_cfg = SuiteConfig { budget: cfg.budget, n: cfg.n, k: cfg.k, u: cfg.u.clone(), ..SuiteConfig::new(cfg.seed()?) };
    let report = suite_bp(&suite_cfg)?;
    if report.cases.is_empty() {
        return Err(CliError::Usage("no (n, k) split matches; supported: (3,2), (4,2), (4,3)".into()));
    }
    emit_report(&report, cfg)
}

#[derive(Serialize)]
struct RolodexOutput {
    n: usize,
    k: usize,
    mu: McEstimate,
    /// `mean |P_F K|^{−n}` over the Grassmannian.
    polar_moment: McEstimate,
    /// `mu / polar_moment`, with the joint standard error.
    ratio: McEstimate,
    /// `Φ_k`.
    phi: McEstimate,
    ball_bound: f64,
}

fn cmd_rolodex(body: &Path, cfg: &RunConfig) -> CliResult<u8> {
    let b = read_body(body)?;
    let n = b.dim();
    let seed = cfg.seed()?;
    let k = RunConfig::need(&cfg.k, "k")?;
    let u = direction(cfg, n)?;
    let budget = cfg.budget.unwrap_or(100_000);
    let oracle = ProjectionOracle::new(&b)?;
    let mu = mu_linear(&oracle, &u, k, budget, split_stream(seed, n, k))?;
    let sample = ShadowSample::draw(&oracle, k, budget, seed)?;
    let moment = sample.raw_negative_moment();
    let none = affiq::numerics::Transform::None;
    let out = RolodexOutput {
        n,
        k,
        mu: mu_estimate(&b, &u, k, budget, seed)?,
        polar_moment: moment.to_estimate(seed, none),
        ratio: mu.div(&moment).to_estimate(seed, none),
        phi: sample.phi().to_estimate(seed, affiq::numerics::Transform::ReciprocalRoot { p: -(n as f64) }),
        ball_bound: ball_bound(&oracle, k).value,
    };
    write_out(cfg.out.as_deref(), &json(&out)?)?;
    Ok(0)
}

fn run(cli: Cli) -> CliResult<u8> {
    let cfg = cli.common.run_config()?;
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Body { action } => cmd_body(action, &cfg),
        Command::Quermass { action: QuermassCommand::Compute { body } } => cmd_quermass(body, &cfg),
        Command::Symmetrize { body, extra } => cmd_symmetrize(body, *extra, &cfg),
        Command::Verify(args) => cmd_verify(args, &cfg),
        Command::BpCheck => cmd_bp(&cfg),
        Command::RolodexCheck { body } => cmd_rolodex(body, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = e.exit_code();
            match e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Lib(err) => eprintln!("error: {err}"),
            }
            ExitCode::from(code)
        }
    }
}
