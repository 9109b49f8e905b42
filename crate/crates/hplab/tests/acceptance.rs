//! Acceptance run: one line per criterion, non-zero exit if any fails.

use hplab::battery::{self, BatteryConfig, PfaffSystem};
use hplab::cli::{execute, EXIT_PASS};
use hplab::report::Check;
use std::time::{Duration, Instant};

const SEED: u64 = 20240611;

struct Outcome {
    checks: Vec<Check>,
    note: String,
}

impl From<Vec<Check>> for Outcome {
    fn from(checks: Vec<Check>) -> Self {
        Outcome { checks, note: String::new() }
    }
}

fn cfg(draws: usize, n_max: usize) -> BatteryConfig {
    BatteryConfig { seed: SEED, n_max, draws, tol: None, n_only: None }
}

fn criterion(id: usize, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let el = t.elapsed();
    let failing: Vec<&Check> = out.checks.iter().filter(|c| !c.pass).collect();
    let in_time = el <= budget;
    let pass = failing.is_empty() && !out.checks.is_empty() && in_time;
    let worst = out
        .checks
        .iter()
        .filter(|c| c.tolerance > 0.0 || c.residual == Some(0.0))
        .filter_map(|c| c.residual.map(|r| (r, c)))
        .filter(|(_, c)| !c.name.contains("control"))
        .max_by(|a, b| (a.0 / a.1.tolerance.max(f64::MIN_POSITIVE)).total_cmp(&(b.0 / b.1.tolerance.max(f64::MIN_POSITIVE))));
    let worst = worst.map_or(String::new(), |(r, c)| format!(", tightest {} = {r:.2e} (tol {:.0e})", c.name, c.tolerance));
    println!(
        "[{}] {id:>2} {title}: {}/{} checks{worst}, {:.2}s (budget {}s){}",
        if pass { "PASS" } else { "FAIL" },
        out.checks.len() - failing.len(),
        out.checks.len(),
        el.as_secs_f64(),
        budget.as_secs(),
        out.note
    );
    for c in failing {
        println!("       failed {}: residual {:?} tol {:e} {}", c.name, c.residual, c.tolerance, c.error.as_deref().unwrap_or(""));
    }
    if !in_time {
        println!("       over the runtime budget");
    }
    pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() {
    let mut results = Vec::new();
    results.push(criterion(1, "series oracle equivalence", secs(5), || battery::series_oracles(&cfg(20, 1)).into()));
    results.push(criterion(2, "LPDE annihilation (8 systems, N = 16)", secs(60), || battery::lpde(&cfg(20, 3)).into()));
    results.push(criterion(3, "flatness of the three connections", secs(10), || battery::flatness(&cfg(20, 3)).into()));
    results.push(criterion(4, "Riemann schemes", secs(10), || battery::schemes(&cfg(20, 3)).into()));
    results.push(criterion(5, "main solution vector and component equations", secs(30), || {
        battery::pfaff(&cfg(20, 2), &[PfaffSystem::Main]).into()
    }));
    results.push(criterion(6, "degeneration square", secs(30), || battery::pfaff(&cfg(20, 2), &[PfaffSystem::Degenerate]).into()));
    results.push(criterion(7, "integral representations", secs(60), || battery::integrals(&cfg(10, 3)).into()));
    results.push(criterion(8, "F2n / F_{n+1,2} equivalence", secs(30), || battery::equivalence(&cfg(20, 3)).into()));
    results.push(criterion(9, "Hamiltonian layer", secs(60), || {
        let c = cfg(20, 3);
        let mut v = battery::reductions(&c);
        v.extend(battery::symmetry(&c));
        v.into()
    }));
    results.push(criterion(10, "determinism of `verify all --n-max 2 --seed 7`", secs(300), || {
        let argv = ["hplab", "verify", "all", "--n-max", "2", "--seed", "7", "--no-timestamp"];
        let a = execute(argv, None);
        let b = execute(argv, None);
        let same = a == b;
        let mut checks = vec![Check::new("identical_reports", if same { 0.0 } else { 1.0 }, 0.0)];
        checks.push(Check::new("suite_exit_code", a.code as f64, EXIT_PASS as f64));
        Outcome { checks, note: format!(" [{} bytes per report]", a.stdout.len()) }
    }));
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
