//! Euler-type integral representations, evaluated on the unit cube where the
//! endpoint singularities become Jacobi weights.

mod quadrature;

pub use quadrature::{beta_rule, tensor_sum, QuadratureConfig, Rule, RuleKind};

use crate::error::{Error, Result};
use crate::hgseries::{eval_f2n, pochhammer, HGParamsF2n, HGParamsFnm, SeriesConfig};
use crate::scalar::Rational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {v} must be positive for the integral to converge")))
    }
}

fn f2n_region(t1: f64, t2: f64) -> Result<()> {
    let r = t1.abs() + (1.0 - t2).abs();
    if r < 1.0 {
        Ok(())
    } else {
        Err(Error::Region(format!("|t1| + |1 - t2| = {r}")))
    }
}

/// F₂⁽ⁿ⁾ as ∫ over [0,1]^{n+1} of Beta weights times
/// {1 − t₁v₁…vₙ − (1 − t₂)v_{n+1}}^{−a}.
pub fn integral_f2n(p: &HGParamsF2n, t1: f64, t2: f64, q: &QuadratureConfig) -> Result<f64> {
    p.validate()?;
    let n = p.n();
    for k in 0..n {
        positive(&format!("b{}", k + 1), p.b[k])?;
        positive(&format!("c{} - b{}", k + 1, k + 1), p.c[k] - p.b[k])?;
    }
    positive("b'", p.bprime)?;
    positive("c' - b'", p.cprime - p.bprime)?;
    f2n_region(t1, t2)?;
    let mut rules: Vec<Arc<Rule>> = Vec::with_capacity(n + 1);
    for k in 0..n {
        rules.push(beta_rule(q, p.b[k] - 1.0, p.c[k] - p.b[k] - 1.0)?);
    }
    rules.push(beta_rule(q, p.bprime - 1.0, p.cprime - p.bprime - 1.0)?);
    let y = 1.0 - t2;
    let a = p.a;
    Ok(tensor_sum(&rules, |v| {
        let prod: f64 = v[..n].iter().product();
        (1.0 - t1 * prod - y * v[n]).powf(-a)
    }))
}

/// The integral side for (δ₁ + c₁ − 1)z. Axes v₁…v_{n−1} carry the (b_k, c_k)
/// weights for k ≥ 2 and vₙ carries vₙ^{b′−c′}(1 − vₙ)^{−b′}.
pub fn integral_f2n_degenerate(p: &HGParamsF2n, t1: f64, t2: f64, q: &QuadratureConfig) -> Result<f64> {
    p.validate()?;
    let n = p.n();
    for k in 1..n {
        positive(&format!("b{}", k + 1), p.b[k])?;
        positive(&format!("c{} - b{}", k + 1, k + 1), p.c[k] - p.b[k])?;
    }
    positive("b' - c' + 1", p.bprime - p.cprime + 1.0)?;
    positive("1 - b'", 1.0 - p.bprime)?;
    f2n_region(t1, t2)?;
    let mut rules: Vec<Arc<Rule>> = Vec::with_capacity(n);
    for k in 1..n {
        rules.push(beta_rule(q, p.b[k] - 1.0, p.c[k] - p.b[k] - 1.0)?);
    }
    rules.push(beta_rule(q, p.bprime - p.cprime, -p.bprime)?);
    let y = 1.0 - t2;
    let (b1, c1) = (p.b[0], p.c[0]);
    let cube = tensor_sum(&rules, |v| {
        let prod: f64 = v[..n - 1].iter().product();
        let vn = v[n - 1];
        (1.0 - t1 * prod - y * vn).powf(-b1) * (1.0 - y * vn).powf(b1 - c1 + 1.0)
    });
    Ok(y.powf(1.0 - p.cprime) * cube)
}

/// Parameters of the series that the degenerate integral represents:
/// F₂⁽ⁿ⁾[b; b′ − c′ + 1, a = c₁ − 1 / c₁ − 1, c₂…cₙ; 2 − c′].
pub fn degenerate_series_params(p: &HGParamsF2n) -> Result<HGParamsF2n> {
    let mut c = p.c.clone();
    c[0] = p.c[0] - 1.0;
    HGParamsF2n::new(p.b.clone(), p.bprime - p.cprime + 1.0, p.c[0] - 1.0, c, 2.0 - p.cprime)
}

/// Series side of the degenerate representation, (1 − t₂)^{1−c′} times the
/// substituted F₂⁽ⁿ⁾.
pub fn degenerate_series_side(p: &HGParamsF2n, t1: f64, t2: f64, degree: usize, cfg: &SeriesConfig) -> Result<f64> {
    let q = degenerate_series_params(p)?;
    let y = 1.0 - t2;
    Ok(y.powf(1.0 - p.cprime) * eval_f2n(&q, t1, y, degree, cfg)?.value)
}

/// F_{n+1,2} from its chain integral over 0 < vₙ < … < v₁ < 1. The chain is
/// mapped to the cube by vₖ = w₁…wₖ; the literal integrand times the Jacobian
/// is divided by the Jacobi weight of each wₖ before quadrature.
pub fn integral_fn2(p: &HGParamsFnm, s1: f64, s2: f64, q: &QuadratureConfig) -> Result<f64> {
    p.validate()?;
    if p.m() != 2 {
        return Err(Error::Contract(format!("integral_fn2 needs m = 2, got {}", p.m())));
    }
    let n = p.n();
    for k in 0..n {
        positive(&format!("alpha{}", k + 1), p.alpha[k])?;
        positive(&format!("gamma{} - alpha{}", k + 1, k + 1), p.gamma[k] - p.alpha[k])?;
    }
    if !(s1.abs() < 1.0 && s2.abs() < 1.0) {
        return Err(Error::Region(format!("|s| must be below 1, got ({s1}, {s2})")));
    }
    let rules =
        (0..n).map(|k| beta_rule(q, p.alpha[k] - 1.0, p.gamma[k] - p.alpha[k] - 1.0)).collect::<Result<Vec<_>>>()?;
    let (al, ga, be) = (&p.alpha, &p.gamma, &p.beta);
    Ok(tensor_sum(&rules, |w| {
        let mut v = [0.0; 8];
        let mut acc = 1.0;
        for k in 0..n {
            acc *= w[k];
            v[k] = acc;
        }
        let mut lv = (ga[0] - al[0] - 1.0) * (1.0 - v[0]).ln();
        for k in 0..n - 1 {
            // v_k − v_{k+1} = v_k (1 − w_{k+1})
            lv += (al[k] - ga[k + 1]) * v[k].ln() + (ga[k + 1] - al[k + 1] - 1.0) * (v[k] * (1.0 - w[k + 1])).ln();
        }
        lv += -be[0] * (1.0 - s1 * v[n - 1]).ln() - be[1] * (1.0 - s2 * v[n - 1]).ln() + (al[n - 1] - 1.0) * v[n - 1].ln();
        let mut lj = 0.0;
        let mut lw = 0.0;
        for k in 0..n {
            lj += (n - 1 - k) as f64 * w[k].ln();
            lw += (al[k] - 1.0) * w[k].ln() + (ga[k] - al[k] - 1.0) * (1.0 - w[k]).ln();
        }
        (lv + lj - lw).exp()
    }))
}

/// Both sides of the inner Beta reduction on the reflected domain w ∈ (t₂, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerBeta {
    /// ∫_{t₂}^{1} (w − u)^{−c′}(w − t₂)^{c′−b′−1}(1 − w)^{b′−1} dw by quadrature.
    pub lhs: f64,
    /// B(b′, c′ − b′)(1 − t₂)^{c′−1}(t₂ − u)^{−b′}(1 − u)^{b′−c′}.
    pub rhs: f64,
    /// The displayed integral runs from 1 to t₂; reversing it gives this sign.
    pub orientation: f64,
}

pub fn inner_beta_reduction(bp: f64, cp: f64, u: f64, t2: f64, q: &QuadratureConfig) -> Result<InnerBeta> {
    if !(0.0 < bp && bp < cp) {
        return Err(Error::Domain(format!("need 0 < b' < c', got b' = {bp}, c' = {cp}")));
    }
    if !(0.0 < t2 && t2 < 1.0) {
        return Err(Error::Domain(format!("t2 = {t2} must lie in (0, 1)")));
    }
    if u >= t2 {
        return Err(Error::Domain(format!("u = {u} must lie below t2 = {t2}")));
    }
    let beta = (libm::lgamma(bp) + libm::lgamma(cp - bp) - libm::lgamma(cp)).exp();
    // w = t₂ + (1 − t₂)s
    let rule = beta_rule(q, cp - bp - 1.0, bp - 1.0)?;
    let d = t2 - u;
    let lhs = beta * (1.0 - t2).powf(cp - 1.0) * rule.integrate(|s| (d + (1.0 - t2) * s).powf(-cp));
    let rhs = beta * (1.0 - t2).powf(cp - 1.0) * d.powf(-bp) * (1.0 - u).powf(bp - cp);
    Ok(InnerBeta { lhs, rhs, orientation: -1.0 })
}

/// (c₁−1+i)_j/(b₁+i)_j against Σ_k (c₁−b₁−1)_k/(b₁+i+j−k)_k · (1)_j/((1)_k(1)_{j−k}),
/// exactly.
pub fn pochhammer_ratio_identity(c1: &Rational, b1: &Rational, i: usize, j: usize) -> Result<bool> {
    let r = |v: i64| Rational::from_integer(v.into());
    let ii = r(i as i64);
    let den = pochhammer(b1.clone() + ii.clone(), j);
    if den.is_zero() {
        return Err(Error::Domain(format!("(b1 + {i})_{j} vanishes")));
    }
    let lhs = pochhammer(c1.clone() - Rational::one() + ii.clone(), j) / den;
    let mut rhs = Rational::zero();
    for k in 0..=j {
        let d = pochhammer(b1.clone() + ii.clone() + r((j - k) as i64), k);
        if d.is_zero() {
            return Err(Error::Domain(format!("(b1 + {} )_{k} vanishes", i + j - k)));
        }
        let binom = pochhammer(Rational::one(), j) / (pochhammer(Rational::one(), k) * pochhammer(Rational::one(), j - k));
        rhs += pochhammer(c1.clone() - b1.clone() - Rational::one(), k) / d * binom;
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgseries::{eval_fnm, SeriesConfig};
    use crate::scalar::ratio;

    #[test]
    fn a_zero_gives_one() {
        let p = HGParamsF2n::new(vec![0.5, 0.3], 0.4, 0.0, vec![1.5, 1.1], 1.3).unwrap();
        let v = integral_f2n(&p, 0.2, 0.9, &QuadratureConfig { nodes_per_axis: 8, ..Default::default() }).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn n1_point_matches_series() {
        let p = HGParamsF2n::new(vec![0.5], 0.4, 0.7, vec![1.5], 1.3).unwrap();
        let i = integral_f2n(&p, 0.2, 0.9, &QuadratureConfig::default()).unwrap();
        let s = eval_f2n(&p, 0.2, 0.1, 80, &SeriesConfig::default()).unwrap().value;
        assert!((i - s).abs() < 1e-10, "{i} {s}");
    }

    #[test]
    fn divergent_weight_rejected() {
        let p = HGParamsF2n::new(vec![1.5], 0.4, 0.7, vec![1.2], 1.3).unwrap();
        assert!(matches!(integral_f2n(&p, 0.2, 0.9, &QuadratureConfig::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn fn2_beta_zero_is_one() {
        let p = HGParamsFnm::new(vec![0.4, 0.6], vec![0.0, 0.0], vec![1.1, 1.5]).unwrap();
        let v = integral_fn2(&p, 0.3, 0.5, &QuadratureConfig { nodes_per_axis: 10, ..Default::default() }).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fn2_n2_matches_series() {
        let p = HGParamsFnm::new(vec![0.4, 0.6], vec![0.3, 0.7], vec![1.1, 1.5]).unwrap();
        let v = integral_fn2(&p, 0.2, 0.4, &QuadratureConfig::default()).unwrap();
        let s = eval_fnm(&p, &[0.2, 0.4], 80, &SeriesConfig::default()).unwrap().value;
        assert!((v - s).abs() < 1e-10, "{v} {s}");
    }

    #[test]
    fn degenerate_n1_matches_series() {
        let p = HGParamsF2n::new(vec![0.35], 0.3, 0.0, vec![1.45], 0.8).unwrap();
        let i = integral_f2n_degenerate(&p, 0.15, 0.92, &QuadratureConfig::default()).unwrap();
        let s = degenerate_series_side(&p, 0.15, 0.92, 80, &SeriesConfig::default()).unwrap();
        assert!((i - s).abs() < 1e-10, "{i} {s}");
    }

    #[test]
    fn inner_beta_symmetric_case() {
        let r = inner_beta_reduction(0.3, 0.6, 0.2, 0.7, &QuadratureConfig::default()).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-12 * r.rhs.abs());
        assert_eq!(r.orientation, -1.0);
    }

    #[test]
    fn pochhammer_identity_cases() {
        assert!(pochhammer_ratio_identity(&ratio(7, 2), &ratio(3, 2), 2, 3).unwrap());
        assert!(pochhammer_ratio_identity(&ratio(5, 2), &ratio(3, 2), 1, 4).unwrap());
        assert!(pochhammer_ratio_identity(&ratio(1, 3), &ratio(2, 5), 0, 0).unwrap());
        assert!(pochhammer_ratio_identity(&ratio(1, 1), &ratio(-1, 1), 0, 2).is_err());
    }
}
