//! Quadrature on [0, 1] against normalized Beta-type weights
//! x^p (1−x)^q / B(p+1, q+1).
//!
//! Gauss–Jacobi nodes come from the Golub–Welsch eigenproblem; the squared
//! first components of the eigenvectors are already the normalized weights.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    GaussJacobi,
    TanhSinh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub nodes_per_axis: usize,
    pub rule: RuleKind,
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { nodes_per_axis: 64, rule: RuleKind::GaussJacobi, tolerance: 1e-7 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 4 {
            return Err(Error::Contract(format!("nodes_per_axis = {} (need at least 4)", self.nodes_per_axis)));
        }
        Ok(())
    }
}

/// Nodes in (0, 1) and weights that integrate f against the normalized weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

fn gauss_jacobi(n: usize, p: f64, q: f64) -> Rule {
    // Standard Jacobi on [-1, 1] with (1-t)^α (1+t)^β; x = (1+t)/2 gives β = p, α = q.
    let (al, be) = (q, p);
    let ab = al + be;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        j[(k, k)] = if k == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let m = (k + 1) as f64;
            let b2 = if k == 0 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + al) * (m + be) * (m + ab)
                    / ((2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0))
            };
            j[(k, k + 1)] = b2.sqrt();
            j[(k + 1, k)] = b2.sqrt();
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| ((1.0 + eig.eigenvalues[i]) / 2.0, eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

fn tanh_sinh(n: usize, p: f64, q: f64) -> Rule {
    // Nodes x = 1/(1+e^{-2u}), u = (π/2) sinh(kh); 1 − x is formed from the
    // complementary expression so endpoint weights keep full precision.
    let half = (n / 2) as i64;
    let h = 3.2 / half as f64;
    let lnb = ln_beta(p + 1.0, q + 1.0);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for k in -half..=half {
        let s = k as f64 * h;
        let u = std::f64::consts::FRAC_PI_2 * s.sinh();
        let x = 1.0 / (1.0 + (-2.0 * u).exp());
        let xc = 1.0 / (1.0 + (2.0 * u).exp());
        if x <= 0.0 || xc <= 0.0 {
            continue;
        }
        // dx/ds = (π/2) cosh(s) · x(1−x) · 2
        let dxds = std::f64::consts::PI * s.cosh() * x * xc;
        let w = h * dxds * (p * x.ln() + q * xc.ln() - lnb).exp();
        if w.is_finite() && w > 0.0 {
            nodes.push(x);
            weights.push(w);
        }
    }
    Rule { nodes, weights }
}

type CacheKey = (RuleKind, usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Rule for weight x^p (1−x)^q, normalized to total mass one. Cached.
pub fn beta_rule(cfg: &QuadratureConfig, p: f64, q: f64) -> Result<Arc<Rule>> {
    cfg.validate()?;
    if !(p > -1.0 && q > -1.0) {
        return Err(Error::Domain(format!("weight exponents ({p}, {q}) must exceed -1")));
    }
    let key = (cfg.rule, cfg.nodes_per_axis, p.to_bits(), q.to_bits());
    if let Some(r) = cache().lock().expect("rule cache").get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(match cfg.rule {
        RuleKind::GaussJacobi => gauss_jacobi(cfg.nodes_per_axis, p, q),
        RuleKind::TanhSinh => tanh_sinh(cfg.nodes_per_axis, p, q),
    });
    cache().lock().expect("rule cache").insert(key, rule.clone());
    Ok(rule)
}

/// Tensor-product sum Σ ∏wₖ f(x). The first axis is split across threads.
pub fn tensor_sum(rules: &[Arc<Rule>], f: impl Fn(&[f64]) -> f64 + Sync + Send) -> f64 {
    let d = rules.len();
    assert!((1..=8).contains(&d), "1 to 8 axes supported");
    let first = &rules[0];
    crate::par::sum_range(first.nodes.len(), |i0| {
        let mut x = [0.0; 8];
        x[0] = first.nodes[i0];
        let w0 = first.weights[i0];
        if d == 1 {
            return w0 * f(&x[..1]);
        }
        let mut idx = vec![0usize; d];
        let mut acc = 0.0;
        loop {
            let mut w = w0;
            for k in 1..d {
                x[k] = rules[k].nodes[idx[k]];
                w *= rules[k].weights[idx[k]];
            }
            acc += w * f(&x[..d]);
            // odometer over axes 1..d
            let mut k = d - 1;
            loop {
                idx[k] += 1;
                if idx[k] < rules[k].nodes.len() {
                    break;
                }
                idx[k] = 0;
                k -= 1;
                if k == 0 {
                    return acc;
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_moments_match() {
        let cfg = QuadratureConfig { nodes_per_axis: 12, ..Default::default() };
        for &(p, q) in &[(-0.5, 0.3), (0.0, 0.0), (1.2, -0.7), (-0.9, -0.9)] {
            let r = beta_rule(&cfg, p, q).unwrap();
            let total: f64 = r.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-13);
            // E[x] = (p+1)/(p+q+2), E[x²] = E[x](p+2)/(p+q+3)
            let m1 = r.integrate(|x| x);
            let m2 = r.integrate(|x| x * x);
            let e1 = (p + 1.0) / (p + q + 2.0);
            assert!((m1 - e1).abs() < 1e-13, "{p} {q}");
            assert!((m2 - e1 * (p + 2.0) / (p + q + 3.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn tanh_sinh_agrees_with_gauss() {
        let g = beta_rule(&QuadratureConfig { nodes_per_axis: 40, ..Default::default() }, -0.4, 0.6).unwrap();
        let t = beta_rule(
            &QuadratureConfig { nodes_per_axis: 200, rule: RuleKind::TanhSinh, tolerance: 1e-7 },
            -0.4,
            0.6,
        )
        .unwrap();
        let f = |x: f64| (1.0 - 0.7 * x).powf(-0.8);
        assert!((g.integrate(f) - t.integrate(f)).abs() < 1e-9);
    }

    #[test]
    fn too_few_nodes_rejected() {
        let cfg = QuadratureConfig { nodes_per_axis: 3, ..Default::default() };
        assert!(beta_rule(&cfg, 0.0, 0.0).is_err());
    }
}
