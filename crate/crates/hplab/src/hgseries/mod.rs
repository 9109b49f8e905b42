//! Hypergeometric series as coefficient grids and partial sums.

mod multi;
mod params;
mod series2d;

pub use multi::{expand_f2nm, MultiSeries, MAX_MULTI_VARS};
pub use params::{is_nonpositive_integer, AppellF4Params, HGParamsF2n, HGParamsF2nm, HGParamsFnm};
pub use series2d::{Chart, TruncatedSeries2D};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Rising factorial (a)_k = a(a+1)…(a+k−1).
pub fn pochhammer<S: Scalar>(a: S, k: usize) -> S {
    let mut acc = S::one();
    for l in 0..k {
        acc = acc * (a.clone() + S::from_i64(l as i64));
    }
    acc
}

fn s<S: Scalar>(v: f64) -> S {
    S::from_f64(v)
}

fn nonzero_denominator<S: Scalar>(v: S, what: &str) -> Result<S> {
    if v.is_zero() {
        Err(Error::Domain(format!("{what}: zero denominator")))
    } else {
        Ok(v)
    }
}

/// Exact (i, j) coefficient of F₂⁽ⁿ⁾ by direct products.
pub fn coeff_f2n<S: Scalar>(p: &HGParamsF2n, i: usize, j: usize) -> Result<S> {
    p.validate()?;
    let mut num = pochhammer(s::<S>(p.bprime), j) * pochhammer(s::<S>(p.a), i + j);
    let mut den = pochhammer(s::<S>(p.cprime), j) * pochhammer(S::one(), i) * pochhammer(S::one(), j);
    for (b, c) in p.b.iter().zip(&p.c) {
        num = num * pochhammer(s::<S>(*b), i);
        den = den * pochhammer(s::<S>(*c), i);
    }
    Ok(num / nonzero_denominator(den, "coeff_f2n")?)
}

/// Classical Appell F₂(a; b, b′; c, c′) coefficient, for oracles.
pub fn coeff_f2_classical<S: Scalar>(a: f64, b: f64, bp: f64, c: f64, cp: f64, i: usize, j: usize) -> S {
    let num = pochhammer(s::<S>(a), i + j) * pochhammer(s::<S>(b), i) * pochhammer(s::<S>(bp), j);
    let den = pochhammer(s::<S>(c), i) * pochhammer(s::<S>(cp), j) * pochhammer(S::one(), i) * pochhammer(S::one(), j);
    num / den
}

/// Classical Appell F₁(a; b₁, b₂; c) coefficient, for oracles.
pub fn coeff_f1_classical<S: Scalar>(a: f64, b1: f64, b2: f64, c: f64, i: usize, j: usize) -> S {
    let num = pochhammer(s::<S>(a), i + j) * pochhammer(s::<S>(b1), i) * pochhammer(s::<S>(b2), j);
    let den = pochhammer(s::<S>(c), i + j) * pochhammer(S::one(), i) * pochhammer(S::one(), j);
    num / den
}

/// Exact (i, j) coefficient of F_{n+1,2}.
pub fn coeff_fn2<S: Scalar>(p: &HGParamsFnm, i: usize, j: usize) -> Result<S> {
    p.validate()?;
    if p.m() != 2 {
        return Err(Error::Contract(format!("coeff_fn2 needs m = 2, got {}", p.m())));
    }
    let mut num = pochhammer(s::<S>(p.beta[0]), i) * pochhammer(s::<S>(p.beta[1]), j);
    let mut den = pochhammer(S::one(), i) * pochhammer(S::one(), j);
    for (a, g) in p.alpha.iter().zip(&p.gamma) {
        num = num * pochhammer(s::<S>(*a), i + j);
        den = den * pochhammer(s::<S>(*g), i + j);
    }
    Ok(num / nonzero_denominator(den, "coeff_fn2")?)
}

/// Build a grid from c[0][0] = 1 and the two step ratios
/// c[i+1][0] = c[i][0]·rx(i) and c[i][j+1] = c[i][j]·ry(i, j).
fn grid_by_ratios<S: Scalar>(
    chart: Chart,
    degree: usize,
    rx: impl Fn(usize) -> S,
    ry: impl Fn(usize, usize) -> S,
) -> TruncatedSeries2D<S> {
    let mut g = TruncatedSeries2D::zeros(chart, degree);
    let mut head = S::one();
    for i in 0..=degree {
        let mut v = head.clone();
        g.set(i, 0, v.clone());
        for j in 0..degree - i {
            v = v * ry(i, j);
            g.set(i, j + 1, v.clone());
        }
        if i < degree {
            head = head * rx(i);
        }
    }
    g
}

fn ratio_f2n<S: Scalar>(p: &HGParamsF2n) -> (impl Fn(usize) -> S + '_, impl Fn(usize, usize) -> S + '_) {
    let rx = move |i: usize| {
        let ii = S::from_i64(i as i64);
        let mut num = s::<S>(p.a) + ii.clone();
        let mut den = S::one() + ii.clone();
        for (b, c) in p.b.iter().zip(&p.c) {
            num = num * (s::<S>(*b) + ii.clone());
            den = den * (s::<S>(*c) + ii.clone());
        }
        num / den
    };
    let ry = move |i: usize, j: usize| {
        let jj = S::from_i64(j as i64);
        (s::<S>(p.bprime) + jj.clone()) * (s::<S>(p.a) + S::from_i64((i + j) as i64))
            / ((s::<S>(p.cprime) + jj.clone()) * (S::one() + jj))
    };
    (rx, ry)
}

/// F₂⁽ⁿ⁾ as a grid in chart (x, y) = (t₁, 1 − t₂).
pub fn expand_f2n<S: Scalar>(p: &HGParamsF2n, degree: usize) -> Result<TruncatedSeries2D<S>> {
    p.validate()?;
    let (rx, ry) = ratio_f2n::<S>(p);
    Ok(grid_by_ratios(Chart::XT1YOneMinusT2, degree, rx, ry))
}

/// Classical Appell F₂ in its own variables (t₁, t₂).
pub fn expand_f2_classical<S: Scalar>(a: f64, b: f64, bp: f64, c: f64, cp: f64, degree: usize) -> Result<TruncatedSeries2D<S>> {
    let p = HGParamsF2n::new(vec![b], bp, a, vec![c], cp)?;
    let (rx, ry) = ratio_f2n::<S>(&p);
    Ok(grid_by_ratios(Chart::XT1YT2, degree, rx, ry))
}

/// F_{n+1,2} as a grid in chart (s₁, s₂).
pub fn expand_fn2<S: Scalar>(p: &HGParamsFnm, degree: usize) -> Result<TruncatedSeries2D<S>> {
    p.validate()?;
    if p.m() != 2 {
        return Err(Error::Contract(format!("expand_fn2 needs m = 2, got {}", p.m())));
    }
    let diag = |k: usize| {
        let kk = S::from_i64(k as i64);
        let mut num = S::one();
        let mut den = S::one();
        for (a, g) in p.alpha.iter().zip(&p.gamma) {
            num = num * (s::<S>(*a) + kk.clone());
            den = den * (s::<S>(*g) + kk.clone());
        }
        num / den
    };
    let rx = |i: usize| diag(i) * (s::<S>(p.beta[0]) + S::from_i64(i as i64)) / S::from_i64(i as i64 + 1);
    let ry = |i: usize, j: usize| diag(i + j) * (s::<S>(p.beta[1]) + S::from_i64(j as i64)) / S::from_i64(j as i64 + 1);
    Ok(grid_by_ratios(Chart::XS1YS2, degree, rx, ry))
}

/// Appell F₄ in its own variables.
pub fn expand_f4<S: Scalar>(p: &AppellF4Params, degree: usize) -> Result<TruncatedSeries2D<S>> {
    AppellF4Params::new(p.a, p.b, p.c1, p.c2)?;
    let ab = |k: usize| (s::<S>(p.a) + S::from_i64(k as i64)) * (s::<S>(p.b) + S::from_i64(k as i64));
    let rx = |i: usize| ab(i) / ((s::<S>(p.c1) + S::from_i64(i as i64)) * S::from_i64(i as i64 + 1));
    let ry = |i: usize, j: usize| ab(i + j) / ((s::<S>(p.c2) + S::from_i64(j as i64)) * S::from_i64(j as i64 + 1));
    Ok(grid_by_ratios(Chart::XT1YT2, degree, rx, ry))
}

/// Any of the bivariate families, for callers that pick the family at runtime.
#[derive(Debug, Clone)]
pub enum SeriesFamily {
    F2n(HGParamsF2n),
    Fn2(HGParamsFnm),
    F4(AppellF4Params),
}

pub fn series_expand<S: Scalar>(family: &SeriesFamily, degree: usize) -> Result<TruncatedSeries2D<S>> {
    match family {
        SeriesFamily::F2n(p) => expand_f2n(p, degree),
        SeriesFamily::Fn2(p) => expand_fn2(p, degree),
        SeriesFamily::F4(p) => expand_f4(p, degree),
    }
}

/// Knobs for pointwise evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    /// Points must sit this far inside the convergence region.
    pub margin: f64,
    /// A tail bound above this raises the warning flag.
    pub tail_tolerance: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { margin: 1e-3, tail_tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Heuristic: ratio test on the last two anti-diagonals, safety factor 2.
    pub tail_bound: f64,
    pub warning: bool,
}

/// Partial sum over |i| ≤ N of a series whose term ratios depend only on the
/// index being stepped and on the current total degree:
/// term(i + e_l) = term(i) · ratio(l, i_l, |i|). Returns the value and the
/// absolute sum of each anti-diagonal.
fn partial_sum(m: usize, degree: usize, ratio: &dyn Fn(usize, usize, usize) -> f64) -> (f64, Vec<f64>) {
    let mut diag = vec![0.0; degree + 1];
    let mut value = 0.0;
    fn rec(
        level: usize,
        m: usize,
        degree: usize,
        term: f64,
        tot: usize,
        ratio: &dyn Fn(usize, usize, usize) -> f64,
        value: &mut f64,
        diag: &mut [f64],
    ) {
        let mut t = term;
        let mut il = 0;
        loop {
            if level + 1 == m {
                *value += t;
                diag[tot + il] += t.abs();
            } else {
                rec(level + 1, m, degree, t, tot + il, ratio, value, diag);
            }
            if tot + il == degree {
                break;
            }
            t *= ratio(level, il, tot + il);
            il += 1;
            if t == 0.0 {
                break;
            }
        }
    }
    rec(0, m, degree, 1.0, 0, ratio, &mut value, &mut diag);
    (value, diag)
}

fn tail_from_diagonals(diag: &[f64]) -> f64 {
    let n = diag.len() - 1;
    let last = diag[n];
    if last == 0.0 {
        return 0.0;
    }
    if n == 0 {
        return f64::INFINITY;
    }
    let prev = diag[n - 1];
    if prev == 0.0 {
        return f64::INFINITY;
    }
    let r = last / prev;
    if r >= 1.0 {
        f64::INFINITY
    } else {
        2.0 * last * r / (1.0 - r)
    }
}

fn finish(value: f64, diag: &[f64], cfg: &SeriesConfig) -> SeriesValue {
    let tail_bound = tail_from_diagonals(diag);
    SeriesValue { value, tail_bound, warning: !(tail_bound <= cfg.tail_tolerance) }
}

fn check_region(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Region(what()))
    }
}

/// F₂⁽ⁿ⁾ at chart point (x, y) = (t₁, 1 − t₂).
pub fn eval_f2n(p: &HGParamsF2n, x: f64, y: f64, degree: usize, cfg: &SeriesConfig) -> Result<SeriesValue> {
    p.validate()?;
    check_region(x.abs() + y.abs() < 1.0 - cfg.margin, || format!("|x|+|y| = {} for F2n", x.abs() + y.abs()))?;
    let ratio = |l: usize, il: usize, tot: usize| {
        let i = il as f64;
        if l == 0 {
            let mut r = (p.a + tot as f64) / (1.0 + i) * x;
            for (b, c) in p.b.iter().zip(&p.c) {
                r *= (b + i) / (c + i);
            }
            r
        } else {
            (p.bprime + i) * (p.a + tot as f64) / ((p.cprime + i) * (1.0 + i)) * y
        }
    };
    let (v, d) = partial_sum(2, degree, &ratio);
    Ok(finish(v, &d, cfg))
}

/// F_{n+1,m} at (s₁, …, s_m).
pub fn eval_fnm(p: &HGParamsFnm, svals: &[f64], degree: usize, cfg: &SeriesConfig) -> Result<SeriesValue> {
    p.validate()?;
    if svals.len() != p.m() {
        return Err(Error::Contract(format!("{} variables for m = {}", svals.len(), p.m())));
    }
    for sv in svals {
        check_region(sv.abs() < 1.0 - cfg.margin, || format!("|s| = {} for Fnm", sv.abs()))?;
    }
    let ratio = |l: usize, il: usize, tot: usize| {
        let k = tot as f64;
        let mut r = (p.beta[l] + il as f64) / (1.0 + il as f64) * svals[l];
        for (a, g) in p.alpha.iter().zip(&p.gamma) {
            r *= (a + k) / (g + k);
        }
        r
    };
    let (v, d) = partial_sum(p.m(), degree, &ratio);
    Ok(finish(v, &d, cfg))
}

/// F₂⁽ⁿ'ᵐ⁾ at (t₁, …, t_m). The region Σ|tᵢ| < 1 is a heuristic.
pub fn eval_f2nm(p: &HGParamsF2nm, t: &[f64], degree: usize, cfg: &SeriesConfig) -> Result<SeriesValue> {
    p.validate()?;
    if t.len() != p.m() {
        return Err(Error::Contract(format!("{} variables for m = {}", t.len(), p.m())));
    }
    let l1: f64 = t.iter().map(|v| v.abs()).sum();
    check_region(l1 < 1.0 - cfg.margin, || format!("sum |t| = {l1} for F2nm"))?;
    let ratio = |l: usize, il: usize, tot: usize| {
        let i = il as f64;
        let mut r = (p.a + tot as f64) / (1.0 + i) * t[l];
        if l == 0 {
            for (b, c) in p.b1row.iter().zip(&p.c1row) {
                r *= (b + i) / (c + i);
            }
        } else {
            r *= (p.b_rest[l - 1] + i) / (p.c_rest[l - 1] + i);
        }
        r
    };
    let (v, d) = partial_sum(p.m(), degree, &ratio);
    Ok(finish(v, &d, cfg))
}

/// Appell F₄ in its own variables.
pub fn eval_f4(p: &AppellF4Params, t1: f64, t2: f64, degree: usize, cfg: &SeriesConfig) -> Result<SeriesValue> {
    AppellF4Params::new(p.a, p.b, p.c1, p.c2)?;
    let r = t1.abs().sqrt() + t2.abs().sqrt();
    check_region(r < 1.0 - cfg.margin, || format!("sqrt|t1|+sqrt|t2| = {r} for F4"))?;
    let ratio = |l: usize, il: usize, tot: usize| {
        let k = tot as f64;
        let i = il as f64;
        let (c, t) = if l == 0 { (p.c1, t1) } else { (p.c2, t2) };
        (p.a + k) * (p.b + k) / ((c + i) * (1.0 + i)) * t
    };
    let (v, d) = partial_sum(2, degree, &ratio);
    Ok(finish(v, &d, cfg))
}

/// Gauss ₂F₁ partial sum, used as a one-variable oracle.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64, terms: usize) -> f64 {
    let mut t = 1.0;
    let mut acc = 1.0;
    for k in 0..terms {
        let k = k as f64;
        t *= (a + k) * (b + k) / ((c + k) * (1.0 + k)) * x;
        acc += t;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn ones(n: usize) -> HGParamsF2n {
        HGParamsF2n::new(vec![1.0; n], 1.0, 1.0, vec![1.0; n], 1.0).unwrap()
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(0.37, 0), 1.0);
        assert_eq!(pochhammer(1.0, 4), 24.0);
        assert_eq!(pochhammer(0.5, 3), 1.875);
    }

    #[test]
    fn f2n_coefficients_by_hand() {
        let p = ones(1);
        assert_eq!(coeff_f2n::<Rational>(&p, 0, 0).unwrap(), ratio(1, 1));
        assert_eq!(coeff_f2n::<Rational>(&p, 2, 1).unwrap(), ratio(3, 1));
        let q = HGParamsF2n::new(vec![0.5], 0.0, 0.7, vec![1.5], 1.3).unwrap();
        assert_eq!(coeff_f2n::<f64>(&q, 3, 1).unwrap(), 0.0);
    }

    #[test]
    fn poles_are_domain_errors() {
        assert!(HGParamsF2n::new(vec![0.5], 0.2, 0.3, vec![-2.0], 1.1).is_err());
        assert!(HGParamsF2n::new(vec![0.5], 0.2, 0.3, vec![0.4], 0.0).is_err());
        assert!(AppellF4Params::new(0.1, 0.2, -1.0, 0.5).is_err());
    }

    #[test]
    fn f2n_expansion_first_coefficient() {
        let p = HGParamsF2n::new(vec![0.25], 0.375, 0.625, vec![1.125], 1.5).unwrap();
        let g = expand_f2n::<Rational>(&p, 3).unwrap();
        let expect = Rational::from_f64(0.25) * Rational::from_f64(0.625) / Rational::from_f64(1.125);
        assert_eq!(g.coeff(1, 0), expect);
        assert_eq!(expand_f2n::<f64>(&p, 0).unwrap().degree(), 0);
    }

    #[test]
    fn fn2_expansion_first_coefficient() {
        let p = HGParamsFnm::new(vec![0.25], vec![0.5, 0.75], vec![1.25]).unwrap();
        let g = expand_fn2::<Rational>(&p, 3).unwrap();
        let expect = Rational::from_f64(0.25) * Rational::from_f64(0.75) / Rational::from_f64(1.25);
        assert_eq!(g.coeff(0, 1), expect);
    }

    #[test]
    fn eval_at_origin_is_one() {
        let cfg = SeriesConfig::default();
        let p = HGParamsF2n::new(vec![0.3, 0.4], 0.2, 0.5, vec![1.2, 1.4], 1.1).unwrap();
        let v = eval_f2n(&p, 0.0, 0.0, 10, &cfg).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.tail_bound, 0.0);
        let f = HGParamsFnm::new(vec![0.3], vec![0.2, 0.7], vec![1.3]).unwrap();
        assert_eq!(eval_fnm(&f, &[0.0, 0.0], 10, &cfg).unwrap().value, 1.0);
        let f4 = AppellF4Params::new(0.3, 0.4, 1.2, 1.5).unwrap();
        assert_eq!(eval_f4(&f4, 0.0, 0.0, 10, &cfg).unwrap().value, 1.0);
    }

    #[test]
    fn bprime_zero_gives_gauss() {
        let cfg = SeriesConfig::default();
        let p = HGParamsF2n::new(vec![0.35], 0.0, 0.55, vec![1.25], 1.1).unwrap();
        let v = eval_f2n(&p, 0.3, 0.2, 60, &cfg).unwrap().value;
        assert!((v - hyp2f1(0.55, 0.35, 1.25, 0.3, 200)).abs() < 1e-14);
    }

    #[test]
    fn f4_on_axis_is_gauss() {
        let cfg = SeriesConfig::default();
        let p = AppellF4Params::new(0.3, 0.45, 1.2, 0.45).unwrap();
        let v = eval_f4(&p, 0.2, 0.0, 60, &cfg).unwrap().value;
        assert!((v - hyp2f1(0.3, 0.45, 1.2, 0.2, 200)).abs() < 1e-14);
    }

    #[test]
    fn region_errors() {
        let cfg = SeriesConfig::default();
        let p = ones(1);
        assert!(matches!(eval_f2n(&p, 0.6, 0.5, 5, &cfg), Err(Error::Region(_))));
        let f4 = AppellF4Params::new(0.3, 0.4, 1.2, 1.5).unwrap();
        assert!(matches!(eval_f4(&f4, 0.3, 0.3, 5, &cfg), Err(Error::Region(_))));
    }

    #[test]
    fn f2nm_at_m2_is_f2n() {
        let cfg = SeriesConfig::default();
        let q = HGParamsF2nm::new(vec![0.3, 0.6], vec![0.25], 0.45, vec![1.3, 1.7], vec![1.15]).unwrap();
        let a = eval_f2nm(&q, &[0.2, 0.3], 40, &cfg).unwrap().value;
        let b = eval_f2n(&q.as_f2n().unwrap(), 0.2, 0.3, 40, &cfg).unwrap().value;
        assert!((a - b).abs() < 1e-15);
    }
}
