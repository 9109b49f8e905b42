//! Seeded verification batteries. Each returns one [`Check`] per property,
//! with the residual taken as the worst case over all draws.

use crate::equivalence::{degeneration_chain_report, system_transform_control, transform_grid, verify_corollary_identity, verify_system_transform};
use crate::error::{Error, Result};
use crate::hgseries::{
    coeff_f1_classical, coeff_f2_classical, coeff_f2n, eval_f2n, eval_fnm, expand_f2_classical, expand_f2n, expand_f2nm, expand_f4, expand_fn2,
    AppellF4Params, HGParamsF2n, HGParamsF2nm, HGParamsFnm, SeriesConfig,
};
use crate::integrals::{
    degenerate_series_side, inner_beta_reduction, integral_f2n, integral_f2n_degenerate, integral_fn2, pochhammer_ratio_identity, QuadratureConfig,
};
use crate::lpde::{
    build_f2_classical, build_f2n_a_eq_cprime, build_f2n_constrained, build_f2n_degenerate, build_f2n_general, build_f4_system, build_fa_system,
    build_fn2, f4_base_point, f4_pullback_jet, FnJet,
};
use crate::painleve::{
    birational_map, check_on_f4_manifold, constraint_drift, constraint_drift_f4, constraint_drift_unchecked, project_to_manifold, reduction_residual,
    symmetry_residual, symplectic_defect, verify_reduction, verify_reduction_deg, verify_reduction_f4, verify_symmetry, Manifold,
    PainleveParamsF4, PhasePoint,
};
use crate::pfaff::{
    build_connection_degenerate, build_connection_f4, build_connection_main, construct_w_degenerate, construct_w_main, default_grid,
    degenerate_series_solution, degeneration_substitution, dictionary_main, expected_scheme_degenerate, expected_scheme_f4,
    expected_scheme_main, flatness_residual, main_series_solution, transport_matrix, verify_component_odes, verify_pfaff_solution,
    verify_scheme, F4Solution, LogConnection, PainleveParams, RiemannScheme, SeriesVector, TransportConfig,
};
use crate::report::Check;
use crate::sampling::{draw_until, near_integer, Sampler};
use crate::scalar::{Rational, Scalar};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub seed: u64,
    pub n_max: usize,
    pub draws: usize,
    /// Replaces every default tolerance (negative-control thresholds excepted).
    pub tol: Option<f64>,
    /// Pins every draw to this n (still capped by each battery's range).
    pub n_only: Option<usize>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig { seed: 0, n_max: 3, draws: 20, tol: None, n_only: None }
    }
}

impl BatteryConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// Independent sampler for draw `d` of the stream labelled `tag`.
    fn sampler(&self, tag: u64, d: usize) -> Sampler {
        Sampler::fork(self.seed, (tag << 32) | d as u64)
    }

    /// Runs `f(draw, n)` for every draw, cycling n through 1..=n_max.
    fn over_draws<R: Send>(&self, tag: u64, f: impl Fn(&mut Sampler, usize) -> R + Sync + Send) -> Vec<R> {
        let n_max = self.n_max.max(1);
        let n_of = |d: usize| self.n_only.map_or(1 + d % n_max, |k| k.clamp(1, n_max));
        crate::par::map_range(self.draws, |d| f(&mut self.sampler(tag, d), n_of(d)))
    }
}

/// Worst residual over a batch; the first error, if any, fails the check.
fn worst(name: &str, results: Vec<Result<f64>>, tol: f64) -> Check {
    let mut m = 0.0f64;
    for r in results {
        match r {
            Ok(v) if v.is_nan() => return Check::failed(name, tol, "NaN residual"),
            Ok(v) => m = m.max(v),
            Err(e) => return Check::failed(name, tol, e),
        }
    }
    Check::new(name, m, tol)
}

/// Smallest value in a batch, for negative controls that must stay large.
fn least(name: &str, results: Vec<Result<f64>>, threshold: f64) -> Check {
    let mut m = f64::INFINITY;
    for r in results {
        match r {
            Ok(v) => m = m.min(v),
            Err(e) => return Check::failed(name, threshold, e),
        }
    }
    Check::above(name, m, threshold)
}

fn exact_gap(a: &Rational, b: &Rational) -> f64 {
    if a == b {
        0.0
    } else {
        (a.clone() - b.clone()).abs_f64().max(f64::MIN_POSITIVE)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

// ---------- draws ----------

pub fn draw_f2n(s: &mut Sampler, n: usize) -> HGParamsF2n {
    let b = s.params(n);
    let c = (0..n).map(|_| 1.0 + s.param()).collect();
    HGParamsF2n::new(b, s.param(), s.param(), c, 1.0 + s.param()).expect("c > 1 is never a pole")
}

pub fn draw_fnm(s: &mut Sampler, n: usize) -> HGParamsFnm {
    let alpha = s.params(n);
    let gamma = (0..n).map(|_| 1.0 + s.param()).collect();
    HGParamsFnm::new(alpha, s.params(2), gamma).expect("gamma > 1 is never a pole")
}

fn generic_painleve(p: &PainleveParams) -> bool {
    dictionary_main(p).is_ok_and(|q| q.c.iter().chain([&q.cprime, &q.a]).all(|v| !near_integer(*v)))
}

/// Generic Painlevé parameters; `degenerate` forces κ₀ = κ₁.
pub fn draw_painleve(s: &mut Sampler, n: usize, degenerate: bool) -> PainleveParams {
    draw_until(
        s,
        |s| {
            let mut kappa = s.params(n + 1);
            if degenerate {
                kappa[0] = kappa[1];
            }
            let th = s.params(3);
            PainleveParams::new(th[0], th[1], th[2], kappa, s.params(n)).expect("sizes match")
        },
        generic_painleve,
    )
}

/// α with α₁ = 0 and the linear relation solved for α₄.
pub fn draw_f4_alpha(s: &mut Sampler) -> [f64; 6] {
    let mut a = [s.param(), 0.0, s.param(), s.param(), 0.0, s.param()];
    a[4] = -(2.0 * a[0] + a[2] + a[3] + a[5]);
    a
}

pub fn draw_phase_point(s: &mut Sampler, n: usize) -> PhasePoint {
    PhasePoint {
        q: (0..n).map(|_| s.dyadic_in(0.2, 0.8)).collect(),
        p: (0..n).map(|_| s.dyadic_in(-0.5, 0.5)).collect(),
        qp: (0..n).map(|_| s.dyadic_in(0.2, 0.8)).collect(),
        pp: (0..n).map(|_| s.dyadic_in(-0.5, 0.5)).collect(),
        t1: s.dyadic_in(0.2, 0.4),
        t2: s.dyadic_in(0.55, 0.8),
    }
}

/// Point in (0.05, 0.95)² at least 0.05 away from t₁ = t₂.
fn off_divisor_point(s: &mut Sampler) -> (f64, f64) {
    loop {
        let (a, b) = (s.uniform(0.05, 0.95), s.uniform(0.05, 0.95));
        if (a - b).abs() > 0.05 {
            return (a, b);
        }
    }
}

fn f4_connection_draw(s: &mut Sampler) -> ([f64; 6], Result<LogConnection>) {
    let a = draw_f4_alpha(s);
    (a, build_connection_f4(&a))
}

// ---------- batteries ----------

/// Coefficient and evaluation oracles for the series layer.
pub fn series_oracles(cfg: &BatteryConfig) -> Vec<Check> {
    let coeff = cfg.over_draws(1, |s, _| -> Result<f64> {
        let p = draw_f2n(s, 1);
        let mut gap = 0.0f64;
        for i in 0..=12 {
            for j in 0..=12 - i {
                let a: Rational = coeff_f2n(&p, i, j)?;
                let b: Rational = coeff_f2_classical(p.a, p.b[0], p.bprime, p.c[0], p.cprime, i, j);
                gap = gap.max(exact_gap(&a, &b));
            }
        }
        Ok(gap)
    });
    let f1 = cfg.over_draws(2, |s, _| -> Result<f64> {
        let p = draw_fnm(s, 1);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let (s1, s2) = (s.uniform(-0.6, 0.6), s.uniform(-0.6, 0.6));
            let v = eval_fnm(&p, &[s1, s2], 90, &SeriesConfig::default())?.value;
            let mut oracle = 0.0;
            for i in 0..=90usize {
                for j in 0..=90 - i {
                    let c: f64 = coeff_f1_classical(p.alpha[0], p.beta[0], p.beta[1], p.gamma[0], i, j);
                    oracle += c * s1.powi(i as i32) * s2.powi(j as i32);
                }
            }
            worst = worst.max((v - oracle).abs());
        }
        Ok(worst)
    });
    vec![worst("series/f2n_n1_vs_classical_f2", coeff, cfg.tol(0.0)), worst("series/fnm_n1m2_vs_f1", f1, cfg.tol(1e-12))]
}

const LPDE_DEGREE: usize = 16;

/// Annihilation of the designated series by each of the eight systems.
pub fn lpde(cfg: &BatteryConfig) -> Vec<Check> {
    let n_cap = cfg.n_max.clamp(1, 3);
    let cfg = BatteryConfig { n_max: n_cap, ..*cfg };
    let exact = |tag: u64, f: fn(&mut Sampler, usize) -> Result<f64>| cfg.over_draws(tag, f);
    let general = exact(10, |s, n| {
        let p = draw_f2n(s, n);
        Ok(build_f2n_general(&p).residual_coefficients(&expand_f2n::<Rational>(&p, LPDE_DEGREE)?)?.max)
    });
    let constrained = exact(11, |s, n| {
        let mut p = draw_f2n(s, n);
        p.a = p.c[0] + p.cprime - 2.0;
        Ok(build_f2n_constrained(&p)?.residual_coefficients(&expand_f2n::<Rational>(&p, LPDE_DEGREE)?)?.max)
    });
    let degenerate = exact(12, |s, n| {
        let p = draw_f2n(s, n);
        let zt = crate::pfaff::degenerate_tilde_series::<Rational>(&p, LPDE_DEGREE)?;
        Ok(build_f2n_degenerate(&p).residual_coefficients(&zt)?.max)
    });
    let fn2 = exact(13, |s, n| {
        let p = draw_fnm(s, n);
        Ok(build_fn2(&p)?.residual_coefficients(&expand_fn2::<Rational>(&p, LPDE_DEGREE)?)?.max)
    });
    let a_eq_cprime = exact(14, |s, n| {
        let mut p = draw_f2n(s, n);
        p.a = p.cprime;
        Ok(build_f2n_a_eq_cprime(&p)?.residual_coefficients(&expand_f2n::<Rational>(&p, LPDE_DEGREE)?)?.max)
    });
    let classical = exact(15, |s, _| {
        let p = draw_f2n(s, 1);
        let z = expand_f2_classical::<Rational>(p.a, p.b[0], p.bprime, p.c[0], p.cprime, LPDE_DEGREE)?;
        Ok(build_f2_classical(p.a, p.b[0], p.bprime, p.c[0], p.cprime).residual_coefficients(&z)?.max)
    });
    // F₄ lives in pulled-back coordinates, so only a pointwise check is possible;
    // the series needs more terms than the coefficient batteries for 1e-9
    let f4 = exact(16, |s, _| {
        let p = AppellF4Params::new(1.0 + s.param(), -s.param(), 1.0 + s.param(), 1.0 + s.param())?;
        let g = expand_f4::<f64>(&p, 48)?;
        let src = FnJet(|t1: f64, t2: f64, k: usize| Ok(f4_pullback_jet(&g, t1, t2, k)));
        let pts = [(0.05, 0.08), (0.03, 0.1), (0.1, 0.02), (0.06, 0.06)].iter().map(|&(x, y)| f4_base_point(x, y)).collect::<Result<Vec<_>>>()?;
        Ok(build_f4_system(&p).residual_pointwise(&src, &pts)?.max)
    });
    let fa = exact(17, |s, _| {
        let mut worst = 0.0f64;
        for m in 2..=3 {
            let b = s.params(m);
            let c: Vec<f64> = (0..m).map(|_| 1.0 + s.param()).collect();
            let p = HGParamsF2nm::lauricella_a(s.param(), &b, &c)?;
            let z = expand_f2nm::<Rational>(&p, LPDE_DEGREE)?;
            worst = worst.max(build_fa_system(&p)?.residual(&z)?.max);
        }
        Ok(worst)
    });
    let t = cfg.tol(0.0);
    vec![
        worst("lpde/f2n_general", general, t),
        worst("lpde/f2n_constrained", constrained, t),
        worst("lpde/f2n_degenerate", degenerate, t),
        worst("lpde/fn2", fn2, t),
        worst("lpde/f2n_a_eq_cprime", a_eq_cprime, t),
        worst("lpde/f2_classical", classical, t),
        worst("lpde/f4_pointwise", f4, cfg.tol(1e-9)),
        worst("lpde/fa_m2_m3", fa, t),
    ]
}

/// Flatness at 100 random off-divisor points per draw.
pub fn flatness(cfg: &BatteryConfig) -> Vec<Check> {
    let run = |tag: u64, build: fn(&mut Sampler, usize) -> Result<LogConnection>| {
        cfg.over_draws(tag, move |s, n| -> Result<f64> {
            let conn = build(s, n)?;
            let mut w = 0.0f64;
            for _ in 0..100 {
                let (t1, t2) = off_divisor_point(s);
                w = w.max(flatness_residual(&conn, t1, t2)?);
            }
            Ok(w)
        })
    };
    let main = run(20, |s, n| Ok(build_connection_main(&draw_painleve(s, n, false))));
    let deg = run(21, |s, n| build_connection_degenerate(&draw_painleve(s, n, true)));
    let f4 = run(22, |s, _| f4_connection_draw(s).1);
    let t = cfg.tol(1e-11);
    vec![worst("flatness/main", main, t), worst("flatness/degenerate", deg, t), worst("flatness/f4", f4, t)]
}

fn scheme_residual(conn: &LogConnection, expected: &RiemannScheme, tol: f64) -> f64 {
    let r = verify_scheme(conn, expected, tol);
    if r.columns.iter().all(|c| c.multiplicities_match) {
        r.max_deviation()
    } else {
        f64::INFINITY
    }
}

/// Residue eigenvalues and multiplicities against the closed-form schemes.
pub fn schemes(cfg: &BatteryConfig) -> Vec<Check> {
    let t = cfg.tol(1e-10);
    let main = cfg.over_draws(30, |s, n| {
        let p = draw_painleve(s, n, false);
        Ok(scheme_residual(&build_connection_main(&p), &expected_scheme_main(&p), t))
    });
    let deg = cfg.over_draws(31, |s, n| {
        let p = draw_painleve(s, n, true);
        Ok(scheme_residual(&build_connection_degenerate(&p)?, &expected_scheme_degenerate(&p), t))
    });
    let f4 = cfg.over_draws(32, |s, _| {
        let (a, c) = f4_connection_draw(s);
        Ok(scheme_residual(&c?, &expected_scheme_f4(&a), t))
    });
    vec![worst("scheme/main", main, t), worst("scheme/degenerate", deg, t), worst("scheme/f4", f4, t)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfaffSystem {
    Main,
    Degenerate,
    F4,
}

const PFAFF_DEGREE: usize = 24;
const F4_DEGREE: usize = 80;

/// Solution vectors against their connections, with the component equations,
/// a perturbed-dictionary control and a transport consistency check.
pub fn pfaff(cfg: &BatteryConfig, systems: &[PfaffSystem]) -> Vec<Check> {
    // solution vectors are only built for n ≤ 2
    let cfg2 = BatteryConfig { n_max: cfg.n_max.clamp(1, 2), ..*cfg };
    let mut out = Vec::new();
    let grid = default_grid();
    if systems.contains(&PfaffSystem::Main) {
        let sol = cfg2.over_draws(40, |s, n| {
            let p = draw_painleve(s, n, false);
            let w = main_series_solution::<f64>(&p, PFAFF_DEGREE)?;
            let q = dictionary_main(&p)?;
            let r = verify_pfaff_solution(&build_connection_main(&p), &SeriesVector::new(&w), &grid)?;
            Ok((r, verify_component_odes(&w, &q, &grid)?))
        });
        let mut residuals = Vec::new();
        let mut comps: Vec<(String, Vec<Result<f64>>)> = Vec::new();
        for r in sol {
            match r {
                Ok((v, c)) => {
                    residuals.push(Ok(v));
                    for (name, val) in c.entries {
                        match comps.iter_mut().find(|(k, _)| *k == name) {
                            Some((_, list)) => list.push(Ok(val)),
                            None => comps.push((name, vec![Ok(val)])),
                        }
                    }
                }
                Err(e) => residuals.push(Err(e)),
            }
        }
        out.push(worst("pfaff/main_solution", residuals, cfg.tol(1e-9)));
        for (name, list) in comps {
            out.push(worst(&format!("pfaff/component/{name}"), list, cfg.tol(1e-9)));
        }
        let control = cfg2.over_draws(41, |s, n| {
            let p = draw_painleve(s, n, false);
            let mut q = dictionary_main(&p)?;
            q.bprime += 0.0625;
            let w = construct_w_main(&expand_f2n::<f64>(&q, PFAFF_DEGREE)?, &q)?;
            verify_pfaff_solution(&build_connection_main(&p), &SeriesVector::new(&w), &grid)
        });
        out.push(least("pfaff/control_perturbed_dictionary", control, 1e-4));
        let transport = cfg2.over_draws(42, |s, n| {
            let c = build_connection_main(&draw_painleve(s, n, false));
            let tc = TransportConfig::default();
            let a = transport_matrix(&c, &[(0.1, 0.9), (0.3, 0.9), (0.3, 0.7)], &tc)?;
            let b = transport_matrix(&c, &[(0.1, 0.9), (0.1, 0.7), (0.3, 0.7)], &tc)?;
            Ok((a - b).amax())
        });
        out.push(worst("pfaff/transport_homotopy", transport, cfg.tol(1e-8)));
    }
    if systems.contains(&PfaffSystem::Degenerate) {
        let sub = cfg2.over_draws(43, |s, n| {
            let p = draw_painleve(s, n, true);
            let d = degeneration_substitution(&main_series_solution::<f64>(&p, PFAFF_DEGREE)?, &p)?;
            verify_pfaff_solution(&build_connection_degenerate(&p)?, &SeriesVector::new(&d), &grid)
        });
        out.push(worst("pfaff/degenerate_substitution", sub, cfg.tol(1e-9)));
        let built = cfg2.over_draws(44, |s, n| {
            let p = draw_painleve(s, n, true);
            let w = SeriesVector::new(&degenerate_series_solution::<f64>(&p, PFAFF_DEGREE)?);
            verify_pfaff_solution(&build_connection_degenerate(&p)?, &w, &grid)
        });
        out.push(worst("pfaff/degenerate_construction", built, cfg.tol(1e-9)));
        let exact = cfg2.over_draws(45, |s, _| degenerate_exact_gap(&draw_painleve(s, 2, true), 8));
        out.push(worst("pfaff/degenerate_exact_n2", exact, cfg.tol(0.0)));
    }
    if systems.contains(&PfaffSystem::F4) {
        let f4 = cfg.over_draws(46, |s, _| {
            let a = draw_f4_alpha(s);
            verify_pfaff_solution(&build_connection_f4(&a)?, &F4Solution::new(&a, F4_DEGREE)?, &grid)
        });
        out.push(worst("pfaff/f4_solution", f4, cfg.tol(1e-8)));
    }
    out
}

/// Largest coefficient gap between construct_w_degenerate and the substituted
/// main vector, in exact arithmetic (0 when identical).
pub fn degenerate_exact_gap(p: &PainleveParams, degree: usize) -> Result<f64> {
    let q = crate::pfaff::dictionary_degenerate(p)?;
    let built = construct_w_degenerate(&crate::pfaff::degenerate_tilde_series::<Rational>(&q, degree)?, &q)?;
    let sub = degeneration_substitution(&main_series_solution::<Rational>(p, degree)?, p)?;
    if built.len() != sub.len() {
        return Err(Error::Consistency(format!("{} vs {} components", built.len(), sub.len())));
    }
    let mut gap = 0.0f64;
    for (a, b) in built.iter().zip(&sub) {
        let d = a.sub(b)?;
        if !d.is_identically_zero() {
            gap = gap.max(d.max_abs_upto(d.degree()).max(f64::MIN_POSITIVE));
        }
    }
    Ok(gap)
}

/// Integral representations against their series, plus the two auxiliary
/// identities.
pub fn integrals(cfg: &BatteryConfig) -> Vec<Check> {
    let q = QuadratureConfig::default();
    let sc = SeriesConfig::default();
    let cfg = BatteryConfig { n_max: cfg.n_max.clamp(1, 3), ..*cfg };
    let main = cfg.over_draws(50, |s, n| {
        let b = s.params(n);
        let c = b.iter().map(|v| v + s.param()).collect();
        let bp = s.param();
        let p = HGParamsF2n::new(b, bp, s.param(), c, bp + s.param())?;
        let (t1, t2) = (s.uniform(0.05, 0.3), s.uniform(0.7, 0.95));
        let i = integral_f2n(&p, t1, t2, &q)?;
        Ok((i - eval_f2n(&p, t1, 1.0 - t2, 90, &sc)?.value).abs())
    });
    let deg = cfg.over_draws(51, |s, n| {
        let mut b = s.params(n);
        let mut c: Vec<f64> = b.iter().map(|v| v + s.param()).collect();
        b[0] = s.param();
        c[0] = 1.0 + s.param();
        let p = HGParamsF2n::new(b, s.param(), 0.0, c, s.param())?;
        let (t1, t2) = (s.uniform(0.05, 0.3), s.uniform(0.7, 0.95));
        let i = integral_f2n_degenerate(&p, t1, t2, &q)?;
        Ok((i - degenerate_series_side(&p, t1, t2, 90, &sc)?).abs())
    });
    let fn2 = cfg.over_draws(52, |s, n| {
        let alpha = s.params(n);
        let gamma = alpha.iter().map(|v| v + s.param()).collect();
        let p = HGParamsFnm::new(alpha, s.params(2), gamma)?;
        let (s1, s2) = (s.uniform(-0.5, 0.5), s.uniform(-0.5, 0.5));
        let i = integral_fn2(&p, s1, s2, &q)?;
        Ok((i - eval_fnm(&p, &[s1, s2], 90, &sc)?.value).abs())
    });
    let beta = cfg.over_draws(53, |s, _| {
        let bp = s.param();
        let cp = bp + s.param();
        let t2 = s.uniform(0.3, 0.9);
        let u = s.uniform(-0.5, t2 - 0.1);
        let r = inner_beta_reduction(bp, cp, u, t2, &q)?;
        Ok((r.lhs - r.rhs).abs() / r.rhs.abs())
    });
    let poch = cfg.over_draws(54, |s, _| {
        let dy = |s: &mut Sampler| Rational::new(BigInt::from((s.param() * 1024.0) as i64), BigInt::from(1024));
        let (c1, b1) = (dy(s) + Rational::from_i64(1), dy(s));
        let mut bad = 0usize;
        for i in 0..=6 {
            for j in 0..=6 {
                if !pochhammer_ratio_identity(&c1, &b1, i, j)? {
                    bad += 1;
                }
            }
        }
        Ok(bad as f64)
    });
    vec![
        worst("integral/f2n", main, cfg.tol(1e-7)),
        worst("integral/f2n_degenerate", deg, cfg.tol(1e-7)),
        worst("integral/fn2", fn2, cfg.tol(1e-7)),
        worst("integral/inner_beta", beta, cfg.tol(1e-8)),
        worst("integral/pochhammer_identity", poch, cfg.tol(0.0)),
    ]
}

const COROLLARY_DEGREE: usize = 400;

/// The function identity at random region points and the system transform.
pub fn equivalence(cfg: &BatteryConfig) -> Vec<Check> {
    let cfg = BatteryConfig { n_max: cfg.n_max.clamp(1, 3), ..*cfg };
    let cor = cfg.over_draws(60, |s, n| {
        let p = draw_fnm(s, n);
        let s1 = s.uniform(0.1, 0.5);
        // |s1| + |1 − s1/s2| ≤ 0.75 and s2 ≤ 0.9
        let s2 = loop {
            let r = s.uniform(-(0.75 - s1), 0.75 - s1);
            let s2 = s1 / (1.0 - r);
            if s2 < 0.9 {
                break s2;
            }
        };
        Ok(verify_corollary_identity(&p, s1, s2, COROLLARY_DEGREE, &SeriesConfig::default())?.discrepancy)
    });
    // c′ = 2b′ would make the wrong dictionary coincide with the right one
    let draw = |s: &mut Sampler, n: usize| {
        let mut p = draw_until(s, |s| draw_f2n(s, n), |p| (p.cprime - 2.0 * p.bprime).abs() > 0.25);
        p.a = p.cprime;
        p
    };
    let tr = cfg.over_draws(61, |s, n| verify_system_transform(&draw(s, n), &transform_grid(), 80));
    let ctl = cfg.over_draws(61, |s, n| system_transform_control(&draw(s, n), &transform_grid(), 80));
    vec![
        worst("equivalence/corollary", cor, cfg.tol(1e-10)),
        worst("equivalence/system_transform", tr, cfg.tol(1e-6)),
        least("equivalence/control_wrong_dictionary", ctl, 1e-3),
    ]
}

fn f4_phase_draw(s: &mut Sampler) -> Result<(PainleveParamsF4, PhasePoint)> {
    let prm = PainleveParamsF4::new(draw_f4_alpha(s))?;
    let pt = PhasePoint { q: vec![0.0; 3], p: (0..3).map(|_| s.dyadic_in(-0.6, 0.6)).collect(), qp: vec![], pp: vec![], t1: s.dyadic_in(0.1, 0.4), t2: s.dyadic_in(0.55, 0.85) };
    check_on_f4_manifold(&prm, &pt)?;
    Ok((prm, pt))
}

/// Constraint manifolds and their reductions to the Pfaff connections.
pub fn reductions(cfg: &BatteryConfig) -> Vec<Check> {
    let cfg = BatteryConfig { n_max: cfg.n_max.clamp(1, 3), ..*cfg };
    let t = cfg.tol(1e-6);
    let mut out = Vec::new();
    for (k, (which, label)) in [(Manifold::F2, "f2"), (Manifold::F1, "f1"), (Manifold::Deg, "deg")].into_iter().enumerate() {
        let r = cfg.over_draws(70 + k as u64, |s, n| {
            let (p, x) = project_to_manifold(&draw_painleve(s, n, false), &draw_phase_point(s, n), which);
            Ok(max_abs(&constraint_drift(&p, &x, which)?))
        });
        out.push(worst(&format!("reduction/drift_{label}"), r, t));
    }
    let f4d = cfg.over_draws(73, |s, _| {
        let (p, x) = f4_phase_draw(s)?;
        Ok(max_abs(&constraint_drift_f4(&p, &x)?))
    });
    out.push(worst("reduction/drift_f4", f4d, t));
    let main = cfg.over_draws(74, |s, n| {
        let (p, x) = project_to_manifold(&draw_painleve(s, n, false), &draw_phase_point(s, n), Manifold::F2);
        verify_reduction(&p, &x)
    });
    out.push(worst("reduction/main", main, t));
    let deg = cfg.over_draws(75, |s, n| {
        let (p, x) = project_to_manifold(&draw_painleve(s, n, false), &draw_phase_point(s, n), Manifold::Deg);
        verify_reduction_deg(&p, &x)
    });
    out.push(worst("reduction/degenerate", deg, t));
    let f4 = cfg.over_draws(76, |s, _| {
        let (p, x) = f4_phase_draw(s)?;
        verify_reduction_f4(&p, &x)
    });
    out.push(worst("reduction/f4", f4, t));
    let ctl = cfg.over_draws(74, |s, n| {
        let (mut p, x) = project_to_manifold(&draw_painleve(s, n, false), &draw_phase_point(s, n), Manifold::F2);
        p.theta1 += 0.125;
        reduction_residual(&p, &x)
    });
    out.push(least("reduction/control_shifted_theta1", ctl, 1e-3));
    let off = cfg.over_draws(70, |s, n| {
        let (p, mut x) = project_to_manifold(&draw_painleve(s, n, false), &draw_phase_point(s, n), Manifold::F2);
        x.pp[0] += 0.25;
        Ok(max_abs(&constraint_drift_unchecked(&p, &x, Manifold::F2)?))
    });
    out.push(least("reduction/control_off_manifold_drift", off, 1e-3));
    out
}

/// The birational involution: involutivity, symplecticity, invariance.
pub fn symmetry(cfg: &BatteryConfig) -> Vec<Check> {
    let cfg = BatteryConfig { n_max: cfg.n_max.clamp(1, 3), ..*cfg };
    let pair = |s: &mut Sampler, n: usize| (draw_painleve(s, n, false), draw_phase_point(s, n));
    let inv = cfg.over_draws(80, |s, n| {
        let (p, x) = pair(s, n);
        let a = birational_map(&x, &p)?;
        let b = birational_map(&a.point, &a.params)?;
        let mut d = b.point.coords().iter().zip(x.coords()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        d = d.max((b.point.t1 - x.t1).abs()).max((b.point.t2 - x.t2).abs());
        if b.params != p {
            d = f64::INFINITY;
        }
        Ok(d)
    });
    let sym = cfg.over_draws(81, |s, n| {
        let (p, x) = pair(s, n);
        Ok(symplectic_defect(&p, &x))
    });
    let invar = cfg.over_draws(82, |s, n| {
        let (p, x) = pair(s, n);
        verify_symmetry(&p, &x)
    });
    let ctl = cfg.over_draws(82, |s, n| {
        let (p, x) = pair(s, n);
        symmetry_residual(&p, &x, false)
    });
    vec![
        worst("symmetry/involution", inv, cfg.tol(1e-9)),
        worst("symmetry/symplectic", sym, cfg.tol(1e-9)),
        worst("symmetry/invariance", invar, cfg.tol(1e-5)),
        least("symmetry/control_unswapped_theta", ctl, 1e-3),
    ]
}

/// The degeneration chain for n ≤ min(n_max, 3).
pub fn chain(cfg: &BatteryConfig) -> Vec<Check> {
    match degeneration_chain_report(cfg.n_max.clamp(1, 3), cfg.seed) {
        Ok(r) => r.checks,
        Err(e) => vec![Check::failed("chain", 0.0, e)],
    }
}

/// Every battery, in a fixed order.
pub fn all(cfg: &BatteryConfig) -> Vec<Check> {
    let mut out = series_oracles(cfg);
    out.extend(lpde(cfg));
    out.extend(integrals(cfg));
    out.extend(flatness(cfg));
    out.extend(schemes(cfg));
    out.extend(pfaff(cfg, &[PfaffSystem::Main, PfaffSystem::Degenerate, PfaffSystem::F4]));
    out.extend(reductions(cfg));
    out.extend(symmetry(cfg));
    out.extend(equivalence(cfg));
    out.extend(chain(cfg));
    out
}
