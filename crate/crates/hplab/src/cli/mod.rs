//! The `hplab` command line: series evaluation, verification batteries and
//! connection dumps, all reported as one JSON schema.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
//! configuration or input errors.

use crate::battery::{self, BatteryConfig, PfaffSystem};
use crate::hgseries::{eval_f2n, eval_f2nm, eval_f4, eval_fnm, AppellF4Params, HGParamsF2n, HGParamsF2nm, HGParamsFnm, SeriesConfig, SeriesValue};
use crate::pfaff::{
    build_connection_degenerate, build_connection_f4, build_connection_main, expected_scheme_degenerate, expected_scheme_f4, expected_scheme_main,
    riemann_scheme, verify_scheme, LogConnection, RiemannScheme,
};
use crate::report::{all_pass, Check};
use crate::sampling::Sampler;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::PathBuf;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const SEED_ENV: &str = "HPLAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "hplab", version, about = "Extended Appell series, Pfaff connections and their verification")]
struct Cli {
    /// JSON file with default settings; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the timestamp so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Seed for all draws (falls back to the config file, then HPLAB_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override every default tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a series at a point.
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Run a verification battery.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Print a seeded connection or its Riemann scheme.
    #[command(subcommand)]
    Dump(DumpCmd),
}

#[derive(Debug, Args)]
struct Degree {
    /// Truncation degree.
    #[arg(long = "N")]
    degree: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum EvalCmd {
    /// F2^(n) at the chart point (t1, 1 - t2)
    F2n {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        b: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        bprime: f64,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        c: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        cprime: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, allow_hyphen_values = true)]
        t2: f64,
        #[command(flatten)]
        degree: Degree,
    },
    /// F_{n+1,2} at (s1, s2)
    Fn2 {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        beta: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        gamma: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        s1: f64,
        #[arg(long, allow_hyphen_values = true)]
        s2: f64,
        #[command(flatten)]
        degree: Degree,
    },
    /// F_{n+1,m} at (s1, ..., sm)
    Fnm {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        beta: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        gamma: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        s: Vec<f64>,
        #[command(flatten)]
        degree: Degree,
    },
    /// F2^(n,m) at (t1, ..., tm)
    F2nm {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        b1row: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        b_rest: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        c1row: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        c_rest: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        t: Vec<f64>,
        #[command(flatten)]
        degree: Degree,
    },
    /// Appell F4 in its own variables
    F4 {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        c1: f64,
        #[arg(long, allow_hyphen_values = true)]
        c2: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[command(flatten)]
        degree: Degree,
    },
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// Pin every draw to this n.
    #[arg(long)]
    n: Option<usize>,
    /// Largest n to cycle through.
    #[arg(long)]
    n_max: Option<usize>,
    /// Draws per check.
    #[arg(long)]
    draws: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SystemArg {
    Main,
    Degenerate,
    F4,
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    /// Annihilation of the series by their differential systems
    Lpde(RunArgs),
    /// Integral representations against the series
    Integral(RunArgs),
    /// Solution vectors and component equations of a connection
    Pfaff {
        #[command(flatten)]
        run: RunArgs,
        /// Restrict to one connection (default: all three).
        #[arg(long, value_enum)]
        system: Option<SystemArg>,
    },
    /// Riemann schemes of the connections
    Scheme(RunArgs),
    /// Hamiltonian reductions and drift of the constraints
    Reduction(RunArgs),
    /// The birational symmetry
    Symmetry(RunArgs),
    /// Identity and change of variables between F2n and F_{n+1,2}
    Equivalence(RunArgs),
    /// Degeneration chain for n = 1..n-max
    Chain(RunArgs),
    /// Every battery in a fixed order
    All(RunArgs),
}

#[derive(Debug, Subcommand)]
enum DumpCmd {
    /// Residue matrices of a seeded connection
    Connection {
        #[arg(long, value_enum, default_value = "main")]
        system: SystemArg,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Riemann scheme of a seeded connection
    Scheme {
        #[arg(long, value_enum, default_value = "main")]
        system: SystemArg,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

/// Defaults read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    tol: Option<f64>,
    n_max: Option<usize>,
    draws: Option<usize>,
    #[serde(rename = "N")]
    degree: Option<usize>,
    out: Option<PathBuf>,
    no_timestamp: Option<bool>,
}

/// Result of one invocation, before anything is printed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

struct Settings {
    seed: u64,
    tol: Option<f64>,
    n_max: Option<usize>,
    draws: Option<usize>,
    degree: Option<usize>,
    out: Option<PathBuf>,
    timestamp: bool,
}

fn settings(cli: &Cli, env_seed: Option<&str>) -> Result<Settings, String> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str::<FileConfig>(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let env = match env_seed {
        Some(v) => Some(v.trim().parse::<u64>().map_err(|_| format!("{SEED_ENV} = {v:?} is not an unsigned integer"))?),
        None => None,
    };
    Ok(Settings {
        seed: cli.seed.or(file.seed).or(env).unwrap_or(0),
        tol: cli.tol.or(file.tol),
        n_max: file.n_max,
        draws: file.draws,
        degree: file.degree,
        out: cli.out.clone().or(file.out),
        timestamp: !(cli.no_timestamp || file.no_timestamp.unwrap_or(false)),
    })
}

fn report(command: &str, st: &Settings, params: Value, checks: &[Check], result: Option<Value>) -> Value {
    let passed = checks.iter().filter(|c| c.pass).count();
    let mut v = json!({
        "command": command,
        "seed": st.seed,
        "params": params,
        "checks": checks,
        "summary": {
            "total": checks.len(),
            "passed": passed,
            "failed": checks.len() - passed,
            "pass": all_pass(checks),
        },
    });
    if let Some(r) = result {
        v["result"] = r;
    }
    if st.timestamp {
        let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        v["timestamp"] = json!(secs);
    }
    v
}

fn series_result(command: &str, st: &Settings, params: Value, degree: usize, r: crate::Result<SeriesValue>) -> Result<Value, String> {
    let v = r.map_err(|e| e.to_string())?;
    let tol = st.tol.unwrap_or(SeriesConfig::default().tail_tolerance);
    let checks = [Check::new("tail_bound", v.tail_bound, tol)];
    let mut params = params;
    params["N"] = json!(degree);
    Ok(report(command, st, params, &checks, Some(json!({ "value": v.value, "tail_bound": v.tail_bound, "warning": v.warning }))))
}

fn eval(cmd: &EvalCmd, st: &Settings) -> Result<Value, String> {
    let cfg = SeriesConfig::default();
    let deg = |d: &Degree| d.degree.or(st.degree).unwrap_or(40);
    match cmd {
        EvalCmd::F2n { n, b, bprime, a, c, cprime, t1, t2, degree } => {
            if let Some(n) = n {
                if b.len() != *n || c.len() != *n {
                    return Err(format!("--n {n} but {} b values and {} c values", b.len(), c.len()));
                }
            }
            let p = HGParamsF2n::new(b.clone(), *bprime, *a, c.clone(), *cprime).map_err(|e| e.to_string())?;
            let d = deg(degree);
            let params = json!({ "b": b, "bprime": bprime, "a": a, "c": c, "cprime": cprime, "t1": t1, "t2": t2 });
            series_result("eval f2n", st, params, d, eval_f2n(&p, *t1, 1.0 - t2, d, &cfg))
        }
        EvalCmd::Fn2 { alpha, beta, gamma, s1, s2, degree } => {
            if beta.len() != 2 {
                return Err(format!("fn2 takes two beta values, got {}", beta.len()));
            }
            let p = HGParamsFnm::new(alpha.clone(), beta.clone(), gamma.clone()).map_err(|e| e.to_string())?;
            let d = deg(degree);
            let params = json!({ "alpha": alpha, "beta": beta, "gamma": gamma, "s1": s1, "s2": s2 });
            series_result("eval fn2", st, params, d, eval_fnm(&p, &[*s1, *s2], d, &cfg))
        }
        EvalCmd::Fnm { alpha, beta, gamma, s, degree } => {
            let p = HGParamsFnm::new(alpha.clone(), beta.clone(), gamma.clone()).map_err(|e| e.to_string())?;
            let d = deg(degree);
            let params = json!({ "alpha": alpha, "beta": beta, "gamma": gamma, "s": s });
            series_result("eval fnm", st, params, d, eval_fnm(&p, s, d, &cfg))
        }
        EvalCmd::F2nm { b1row, b_rest, a, c1row, c_rest, t, degree } => {
            let p = HGParamsF2nm::new(b1row.clone(), b_rest.clone(), *a, c1row.clone(), c_rest.clone()).map_err(|e| e.to_string())?;
            let d = deg(degree);
            let params = json!({ "b1row": b1row, "b_rest": b_rest, "a": a, "c1row": c1row, "c_rest": c_rest, "t": t });
            series_result("eval f2nm", st, params, d, eval_f2nm(&p, t, d, &cfg))
        }
        EvalCmd::F4 { a, b, c1, c2, x, y, degree } => {
            let p = AppellF4Params::new(*a, *b, *c1, *c2).map_err(|e| e.to_string())?;
            let d = deg(degree);
            let params = json!({ "a": a, "b": b, "c1": c1, "c2": c2, "x": x, "y": y });
            series_result("eval f4", st, params, d, eval_f4(&p, *x, *y, d, &cfg))
        }
    }
}

fn battery_config(run: &RunArgs, st: &Settings) -> Result<BatteryConfig, String> {
    let d = BatteryConfig::default();
    let n_max = run.n.or(run.n_max).or(st.n_max).unwrap_or(d.n_max);
    if !(1..=3).contains(&n_max) {
        return Err(format!("n = {n_max} outside 1..=3"));
    }
    let draws = run.draws.or(st.draws).unwrap_or(d.draws);
    if draws == 0 {
        return Err("--draws must be positive".into());
    }
    Ok(BatteryConfig { seed: st.seed, n_max, draws, tol: st.tol, n_only: run.n })
}

fn verify(cmd: &VerifyCmd, st: &Settings) -> Result<Value, String> {
    let (name, run, system) = match cmd {
        VerifyCmd::Lpde(r) => ("lpde", r, None),
        VerifyCmd::Integral(r) => ("integral", r, None),
        VerifyCmd::Pfaff { run, system } => ("pfaff", run, *system),
        VerifyCmd::Scheme(r) => ("scheme", r, None),
        VerifyCmd::Reduction(r) => ("reduction", r, None),
        VerifyCmd::Symmetry(r) => ("symmetry", r, None),
        VerifyCmd::Equivalence(r) => ("equivalence", r, None),
        VerifyCmd::Chain(r) => ("chain", r, None),
        VerifyCmd::All(r) => ("all", r, None),
    };
    let cfg = battery_config(run, st)?;
    let checks = match cmd {
        VerifyCmd::Lpde(_) => {
            let mut c = battery::series_oracles(&cfg);
            c.extend(battery::lpde(&cfg));
            c
        }
        VerifyCmd::Integral(_) => battery::integrals(&cfg),
        VerifyCmd::Pfaff { .. } => {
            let systems: Vec<PfaffSystem> = match system {
                Some(SystemArg::Main) => vec![PfaffSystem::Main],
                Some(SystemArg::Degenerate) => vec![PfaffSystem::Degenerate],
                Some(SystemArg::F4) => vec![PfaffSystem::F4],
                None => vec![PfaffSystem::Main, PfaffSystem::Degenerate, PfaffSystem::F4],
            };
            let mut c = battery::flatness(&cfg);
            c.retain(|ch| systems.iter().any(|s| ch.name.ends_with(system_label(*s))));
            c.extend(battery::pfaff(&cfg, &systems));
            c
        }
        VerifyCmd::Scheme(_) => battery::schemes(&cfg),
        VerifyCmd::Reduction(_) => battery::reductions(&cfg),
        VerifyCmd::Symmetry(_) => battery::symmetry(&cfg),
        VerifyCmd::Equivalence(_) => battery::equivalence(&cfg),
        VerifyCmd::Chain(_) => battery::chain(&cfg),
        VerifyCmd::All(_) => battery::all(&cfg),
    };
    let mut params = json!({ "n_max": cfg.n_max, "draws": cfg.draws, "tol": cfg.tol });
    if let Some(n) = cfg.n_only {
        params["n"] = json!(n);
    }
    if let Some(s) = system {
        params["system"] = json!(system_label(pfaff_system(s)));
    }
    if matches!(cmd, VerifyCmd::Chain(_) | VerifyCmd::Equivalence(_) | VerifyCmd::All(_)) {
        params["corollary_exponent"] = json!("b' read as beta2");
    }
    Ok(report(&format!("verify {name}"), st, params, &checks, None))
}

fn pfaff_system(s: SystemArg) -> PfaffSystem {
    match s {
        SystemArg::Main => PfaffSystem::Main,
        SystemArg::Degenerate => PfaffSystem::Degenerate,
        SystemArg::F4 => PfaffSystem::F4,
    }
}

fn system_label(s: PfaffSystem) -> &'static str {
    match s {
        PfaffSystem::Main => "main",
        PfaffSystem::Degenerate => "degenerate",
        PfaffSystem::F4 => "f4",
    }
}

fn seeded_connection(system: SystemArg, n: usize, seed: u64) -> Result<(Value, LogConnection, RiemannScheme), String> {
    let mut s = Sampler::new(seed);
    if !(1..=3).contains(&n) {
        return Err(format!("n = {n} outside 1..=3"));
    }
    let e = |e: crate::Error| e.to_string();
    Ok(match system {
        SystemArg::Main => {
            let p = battery::draw_painleve(&mut s, n, false);
            (serde_json::to_value(&p).map_err(|e| e.to_string())?, build_connection_main(&p), expected_scheme_main(&p))
        }
        SystemArg::Degenerate => {
            let p = battery::draw_painleve(&mut s, n, true);
            (serde_json::to_value(&p).map_err(|e| e.to_string())?, build_connection_degenerate(&p).map_err(e)?, expected_scheme_degenerate(&p))
        }
        SystemArg::F4 => {
            let a = battery::draw_f4_alpha(&mut s);
            (json!({ "alpha": a }), build_connection_f4(&a).map_err(e)?, expected_scheme_f4(&a))
        }
    })
}

fn dump(cmd: &DumpCmd, st: &Settings) -> Result<Value, String> {
    let (what, system, n) = match cmd {
        DumpCmd::Connection { system, n } => ("connection", *system, *n),
        DumpCmd::Scheme { system, n } => ("scheme", *system, *n),
    };
    let (prm, conn, expected) = seeded_connection(system, n, st.seed)?;
    let params = json!({ "system": system_label(pfaff_system(system)), "n": n, "draw": prm });
    let tol = st.tol.unwrap_or(1e-10);
    let sr = verify_scheme(&conn, &expected, tol);
    let checks = [Check::new("scheme", if sr.pass { sr.max_deviation() } else { f64::INFINITY }, tol)];
    let result = match what {
        "connection" => conn.to_json(),
        _ => json!({ "actual": riemann_scheme(&conn), "expected": expected, "columns": crate::pfaff::COLUMN_LABELS }),
    };
    Ok(report(&format!("dump {what}"), st, params, &checks, Some(result)))
}

/// Runs one invocation. `env_seed` stands in for the HPLAB_SEED variable.
pub fn execute<I, T>(argv: I, env_seed: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: EXIT_PASS, stdout: text, stderr: String::new() },
                _ => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    let st = match settings(&cli, env_seed) {
        Ok(s) => s,
        Err(m) => return Outcome::usage(m),
    };
    let value = match &cli.command {
        Command::Eval(c) => eval(c, &st),
        Command::Verify(c) => verify(c, &st),
        Command::Dump(c) => dump(c, &st),
    };
    let value = match value {
        Ok(v) => v,
        Err(m) => return Outcome::usage(m),
    };
    let code = if value["summary"]["pass"].as_bool() == Some(true) { EXIT_PASS } else { EXIT_FAIL };
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    match &st.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome::usage(format!("cannot write {}: {e}", path.display())),
        },
        None => Outcome { code, stdout: text, stderr: String::new() },
    }
}

/// Runs `argv` against the real environment and streams, returning the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(SEED_ENV).ok();
    let o = execute(argv, env.as_deref());
    print!("{}", o.stdout);
    eprint!("{}", o.stderr);
    o.code
}
