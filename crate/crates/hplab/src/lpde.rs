//! Linear PDE systems as polynomials in Euler operators with monomial
//! coefficients, and their residuals on series (coefficientwise) or on jets
//! (pointwise).

use crate::error::{contract, Error, Result};
use crate::hgseries::{AppellF4Params, Chart, HGParamsF2n, HGParamsF2nm, HGParamsFnm, MultiSeries, TruncatedSeries2D};
use crate::jet::Jet;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// One linear factor d₁δ₁ + d₂δ₂ + c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub d1: i64,
    pub d2: i64,
    pub c: f64,
}

impl Factor {
    pub fn new(d1: i64, d2: i64, c: f64) -> Self {
        Factor { d1, d2, c }
    }
    /// δ₁ + c
    pub fn x(c: f64) -> Self {
        Factor::new(1, 0, c)
    }
    /// δ₂ + c
    pub fn y(c: f64) -> Self {
        Factor::new(0, 1, c)
    }
    /// δ₁ + δ₂ + c
    pub fn total(c: f64) -> Self {
        Factor::new(1, 1, c)
    }
}

/// coef · xᵖyᵠ · ∏ factors, optionally divided by (t₁ − t₂).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorTerm {
    pub xpow: usize,
    pub ypow: usize,
    pub coef: f64,
    pub factors: Vec<Factor>,
    pub pole: bool,
}

impl OperatorTerm {
    pub fn new(xpow: usize, ypow: usize, coef: f64, factors: Vec<Factor>) -> Self {
        OperatorTerm { xpow, ypow, coef, factors, pole: false }
    }

    pub fn over_t1_minus_t2(mut self) -> Self {
        self.pole = true;
        self
    }

    pub fn operator_degree(&self) -> usize {
        self.factors.iter().filter(|f| f.d1 != 0 || f.d2 != 0).count()
    }

    /// The factor product expanded as Σ coef·δ₁^e₁δ₂^e₂, without the monomial
    /// and coefficient. Entries are (e₁, e₂, coefficient).
    pub fn dpoly(&self) -> Vec<(usize, usize, f64)> {
        let mut poly: Vec<(usize, usize, f64)> = vec![(0, 0, 1.0)];
        for f in &self.factors {
            let mut next: Vec<(usize, usize, f64)> = Vec::new();
            let mut push = |e1: usize, e2: usize, v: f64| {
                if let Some(slot) = next.iter_mut().find(|(a, b, _)| *a == e1 && *b == e2) {
                    slot.2 += v;
                } else {
                    next.push((e1, e2, v));
                }
            };
            for &(e1, e2, v) in &poly {
                if f.d1 != 0 {
                    push(e1 + 1, e2, v * f.d1 as f64);
                }
                if f.d2 != 0 {
                    push(e1, e2 + 1, v * f.d2 as f64);
                }
                if f.c != 0.0 {
                    push(e1, e2, v * f.c);
                }
            }
            poly = next;
        }
        poly.retain(|t| t.2 != 0.0);
        poly
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LPDESystem {
    pub name: String,
    pub chart: Chart,
    pub equations: Vec<Vec<OperatorTerm>>,
    /// Set when some term carries a rational coefficient.
    pub pointwise_only: bool,
}

impl LPDESystem {
    fn new(name: &str, chart: Chart, equations: Vec<Vec<OperatorTerm>>) -> Self {
        let pointwise_only = equations.iter().flatten().any(|t| t.pole);
        LPDESystem { name: name.into(), chart, equations, pointwise_only }
    }

    /// Operator degree of each equation.
    pub fn degrees(&self) -> Vec<usize> {
        self.equations.iter().map(|e| e.iter().map(OperatorTerm::operator_degree).max().unwrap_or(0)).collect()
    }

    /// Largest monomial degree in an equation; that many top anti-diagonals of
    /// the residual are truncation artifacts.
    pub fn shift(&self, eq: usize) -> usize {
        self.equations[eq].iter().map(|t| t.xpow + t.ypow).max().unwrap_or(0)
    }

    /// Apply one equation to a series, coefficientwise.
    pub fn apply<S: Scalar>(&self, eq: usize, z: &TruncatedSeries2D<S>) -> Result<TruncatedSeries2D<S>> {
        contract(!self.pointwise_only, || format!("{} has rational coefficients; use the pointwise residual", self.name))?;
        contract(z.chart() == self.chart, || format!("{} needs chart {:?}, series is in {:?}", self.name, self.chart, z.chart()))?;
        let mut acc = TruncatedSeries2D::zeros(z.chart(), z.degree());
        for t in &self.equations[eq] {
            let mut s = z.clone();
            for f in &t.factors {
                s = s.apply_linear(f.d1, f.d2, &S::from_f64(f.c));
            }
            s = s.mul_monomial(t.xpow, t.ypow).scale(&S::from_f64(t.coef));
            acc = acc.add(&s)?;
        }
        Ok(acc)
    }

    /// Residual series of every equation.
    pub fn residual_series<S: Scalar>(&self, z: &TruncatedSeries2D<S>) -> Result<Vec<TruncatedSeries2D<S>>> {
        (0..self.equations.len()).map(|e| self.apply(e, z)).collect()
    }

    /// Coefficientwise residual over the trusted range i + j ≤ N − shift.
    pub fn residual_coefficients<S: Scalar>(&self, z: &TruncatedSeries2D<S>) -> Result<Residual> {
        let mut per_equation = Vec::new();
        for (e, r) in self.residual_series(z)?.iter().enumerate() {
            let shift = self.shift(e);
            let v = if shift > z.degree() { 0.0 } else { r.max_abs_upto(z.degree() - shift) };
            per_equation.push(v);
        }
        Ok(Residual::from(per_equation))
    }

    fn base_point(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        match self.chart {
            Chart::XT1YOneMinusT2 => Ok((x, 1.0 - y)),
            Chart::XT1YT2 => Ok((x, y)),
            Chart::XS1YS2 => Err(Error::Contract("no (t1, t2) base point in the s-chart".into())),
        }
    }

    /// Value of one equation applied to a jet based at chart point (x, y).
    pub fn eval_equation(&self, eq: usize, z: &Jet, x: f64, y: f64) -> Result<f64> {
        let mut acc = 0.0;
        for t in &self.equations[eq] {
            let mut j = z.clone();
            for f in &t.factors {
                let mut next = j.scale(f.c);
                if f.d1 != 0 {
                    next = next.add(&j.euler(0, x).scale(f.d1 as f64));
                }
                if f.d2 != 0 {
                    next = next.add(&j.euler(1, y).scale(f.d2 as f64));
                }
                j = next;
            }
            let mut v = t.coef * x.powi(t.xpow as i32) * y.powi(t.ypow as i32) * j.value();
            if t.pole {
                let (t1, t2) = self.base_point(x, y)?;
                let d = t1 - t2;
                if d.abs() < 1e-12 {
                    return Err(Error::Singular(format!("t1 = t2 = {t1} in {}", self.name)));
                }
                v /= d;
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Jet order needed to apply every equation.
    pub fn jet_order(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Pointwise residual at base points. The source returns jets in chart
    /// coordinates at the chart image of each point.
    pub fn residual_pointwise(&self, z: &dyn JetSource, points: &[(f64, f64)]) -> Result<Residual> {
        contract(!points.is_empty(), || "pointwise residual needs at least one point".into())?;
        let order = self.jet_order();
        let mut per_equation = vec![0.0f64; self.equations.len()];
        for &(t1, t2) in points {
            let (x, y) = self.chart.local(t1, t2);
            let j = z.jet(x, y, order)?;
            for (e, slot) in per_equation.iter_mut().enumerate() {
                let v = self.eval_equation(e, &j, x, y)?.abs();
                *slot = if v.is_nan() { f64::NAN } else { slot.max(v) };
            }
        }
        Ok(Residual::from(per_equation))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub per_equation: Vec<f64>,
    pub max: f64,
}

impl From<Vec<f64>> for Residual {
    fn from(per_equation: Vec<f64>) -> Self {
        let max = crate::par::max_of(per_equation.iter().copied());
        Residual { per_equation, max }
    }
}

/// Anything that can produce a Taylor jet at a chart point.
pub trait JetSource: Sync {
    fn jet(&self, x: f64, y: f64, order: usize) -> Result<Jet>;
}

impl JetSource for TruncatedSeries2D<f64> {
    fn jet(&self, x: f64, y: f64, order: usize) -> Result<Jet> {
        Ok(Jet::of_series(self, x, y, order))
    }
}

/// Wraps a closure as a jet source.
pub struct FnJet<F>(pub F);

impl<F: Fn(f64, f64, usize) -> Result<Jet> + Sync> JetSource for FnJet<F> {
    fn jet(&self, x: f64, y: f64, order: usize) -> Result<Jet> {
        (self.0)(x, y, order)
    }
}

fn prod_x(vals: &[f64], shift: f64) -> Vec<Factor> {
    vals.iter().map(|v| Factor::x(v + shift)).collect()
}

fn with(mut first: Vec<Factor>, rest: impl IntoIterator<Item = Factor>) -> Vec<Factor> {
    first.extend(rest);
    first
}

fn f2n_pair(name: &str, b: &[f64], c: &[f64], bp: f64, a: f64, cp: f64) -> LPDESystem {
    let eq1 = vec![
        OperatorTerm::new(1, 0, 1.0, with(vec![Factor::total(a)], prod_x(b, 0.0))),
        OperatorTerm::new(0, 0, -1.0, with(vec![Factor::x(0.0)], prod_x(c, -1.0))),
    ];
    let eq2 = vec![
        OperatorTerm::new(0, 1, 1.0, vec![Factor::total(a), Factor::y(bp)]),
        OperatorTerm::new(0, 0, -1.0, vec![Factor::y(0.0), Factor::y(cp - 1.0)]),
    ];
    LPDESystem::new(name, Chart::XT1YOneMinusT2, vec![eq1, eq2])
}

/// The general F₂⁽ⁿ⁾ system in (x, y) = (t₁, 1 − t₂).
pub fn build_f2n_general(p: &HGParamsF2n) -> LPDESystem {
    f2n_pair("f2n_general", &p.b, &p.c, p.bprime, p.a, p.cprime)
}

/// The general system under a = c₁ + c′ − 2.
pub fn build_f2n_constrained(p: &HGParamsF2n) -> Result<LPDESystem> {
    let target = p.c[0] + p.cprime - 2.0;
    contract((p.a - target).abs() < 1e-12, || format!("a = {} but c1 + c' - 2 = {target}", p.a))?;
    let mut s = f2n_pair("f2n_constrained", &p.b, &p.c, p.bprime, target, p.cprime);
    s.name = "f2n_constrained".into();
    Ok(s)
}

/// The reduced system satisfied by z̃ = (δ₁ + c₁ − 1)z when b₁ = c₁ − 1.
/// Products run over i = 2…n; the total-degree shift keeps c₁ + c′ − 2.
pub fn build_f2n_degenerate(p: &HGParamsF2n) -> LPDESystem {
    let a = p.c[0] + p.cprime - 2.0;
    f2n_pair("f2n_degenerate", &p.b[1..], &p.c[1..], p.bprime, a, p.cprime)
}

/// The F_{n+1,2} system in (s₁, s₂), including the mixed equation.
pub fn build_fn2(p: &HGParamsFnm) -> Result<LPDESystem> {
    if p.m() != 2 {
        return Err(Error::Contract(format!("build_fn2 needs m = 2, got {}", p.m())));
    }
    let tot = |v: &[f64], s: f64| v.iter().map(|x| Factor::total(x + s)).collect::<Vec<_>>();
    let eq = |l: usize| {
        let (dl, sx, sy) = if l == 0 { (Factor::x(0.0), 1, 0) } else { (Factor::y(0.0), 0, 1) };
        let shifted = Factor::new(dl.d1, dl.d2, p.beta[l]);
        vec![
            OperatorTerm::new(sx, sy, 1.0, with(vec![shifted], tot(&p.alpha, 0.0))),
            OperatorTerm::new(0, 0, -1.0, with(vec![dl], tot(&p.gamma, -1.0))),
        ]
    };
    let mixed = vec![
        OperatorTerm::new(1, 0, 1.0, vec![Factor::x(p.beta[0]), Factor::y(0.0)]),
        OperatorTerm::new(0, 1, -1.0, vec![Factor::y(p.beta[1]), Factor::x(0.0)]),
    ];
    Ok(LPDESystem::new("fn2", Chart::XS1YS2, vec![eq(0), eq(1), mixed]))
}

/// The three-equation F₂⁽ⁿ⁾ system for a = c′.
pub fn build_f2n_a_eq_cprime(p: &HGParamsF2n) -> Result<LPDESystem> {
    contract((p.a - p.cprime).abs() < 1e-12, || format!("a = {} differs from c' = {}", p.a, p.cprime))?;
    let mut s = f2n_pair("f2n_a_eq_cprime", &p.b, &p.c, p.bprime, p.cprime, p.cprime);
    let eq3 = vec![
        OperatorTerm::new(1, 0, 1.0, with(vec![Factor::y(0.0)], prod_x(&p.b, 0.0))),
        OperatorTerm::new(0, 1, 1.0, with(vec![Factor::y(p.bprime)], prod_x(&p.c, -1.0))),
        OperatorTerm::new(0, 0, -1.0, with(vec![Factor::y(0.0)], prod_x(&p.c, -1.0))),
    ];
    s.equations.push(eq3);
    Ok(s)
}

/// Appell's F₂ system in its own variables, δ₂ = t₂∂/∂t₂.
pub fn build_f2_classical(a: f64, b: f64, bp: f64, c: f64, cp: f64) -> LPDESystem {
    let mut s = f2n_pair("f2_classical", &[b], &[c], bp, a, cp);
    s.chart = Chart::XT1YT2;
    s
}

/// The F₄-type system. Its solution is Appell's F₄ taken at
/// (t₁t₂, (1 − t₁)(1 − t₂)); both equations carry δᵢ(δᵢ + c₁ − 1).
pub fn build_f4_system(p: &AppellF4Params) -> LPDESystem {
    let k = p.a + p.b - p.c1 - p.c2 + 1.0;
    let d12 = vec![Factor::new(1, -1, 0.0)];
    let d21 = vec![Factor::new(-1, 1, 0.0)];
    let eq1 = vec![
        OperatorTerm::new(1, 0, 1.0, vec![Factor::x(p.a), Factor::x(p.b)]),
        OperatorTerm::new(0, 0, -1.0, vec![Factor::x(0.0), Factor::x(p.c1 - 1.0)]),
        // K t₁(t₂ − 1)(δ₁ − δ₂)/(t₁ − t₂)
        OperatorTerm::new(1, 1, k, d12.clone()).over_t1_minus_t2(),
        OperatorTerm::new(1, 0, -k, d12).over_t1_minus_t2(),
    ];
    let eq2 = vec![
        OperatorTerm::new(0, 1, 1.0, vec![Factor::y(p.a), Factor::y(p.b)]),
        OperatorTerm::new(0, 0, -1.0, vec![Factor::y(0.0), Factor::y(p.c1 - 1.0)]),
        // K t₂(t₁ − 1)(δ₂ − δ₁)/(t₂ − t₁)
        OperatorTerm::new(1, 1, -k, d21.clone()).over_t1_minus_t2(),
        OperatorTerm::new(0, 1, k, d21).over_t1_minus_t2(),
    ];
    LPDESystem::new("f4", Chart::XT1YT2, vec![eq1, eq2])
}

/// Jet of F₄(a, b; c₁, c₂; t₁t₂, (1 − t₁)(1 − t₂)) at (t₁, t₂); the series
/// must be the F₄ coefficient grid.
pub fn f4_pullback_jet(f4: &TruncatedSeries2D<f64>, t1: f64, t2: f64, order: usize) -> Jet {
    let u = Jet::var(order, t1, 0);
    let v = Jet::var(order, t2, 1);
    let x = u.mul(&v);
    let y = u.scale(-1.0).add_const(1.0).mul(&v.scale(-1.0).add_const(1.0));
    Jet::compose_series(f4, &x, &y)
}

/// Base points (t₁, t₂) where the pulled-back F₄ series takes arguments
/// (X, Y) = (t₁t₂, (1 − t₁)(1 − t₂)). Returns the root pair with t₁ < t₂.
pub fn f4_base_point(x: f64, y: f64) -> Result<(f64, f64)> {
    // t₁ + t₂ = 1 + X − Y, t₁t₂ = X
    let s = 1.0 + x - y;
    let disc = s * s - 4.0 * x;
    if disc <= 0.0 {
        return Err(Error::Domain(format!("no real base point for F4 arguments ({x}, {y})")));
    }
    let r = disc.sqrt();
    Ok(((s - r) / 2.0, (s + r) / 2.0))
}

/// The m-variate Lauricella F_A system, m ≤ 3.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLPDESystem {
    pub m: usize,
    /// equations[i] = list of (variable to multiply by or None, coef, factors);
    /// each factor is (weights on δ₁…δ_m, constant).
    pub equations: Vec<Vec<(Option<usize>, f64, Vec<(Vec<i64>, f64)>)>>,
}

pub fn build_fa_system(p: &HGParamsF2nm) -> Result<MultiLPDESystem> {
    if p.n() != 1 {
        return Err(Error::Contract(format!("F_A system needs n = 1, got {}", p.n())));
    }
    let m = p.m();
    if m > crate::hgseries::MAX_MULTI_VARS {
        return Err(Error::Unsupported(format!("F_A with m = {m}")));
    }
    let equations = (0..m)
        .map(|i| {
            let (b, c) = p.fa_pair(i);
            let unit = |w: i64| (0..m).map(|k| if k == i { w } else { 0 }).collect::<Vec<i64>>();
            vec![
                (Some(i), 1.0, vec![(vec![1; m], p.a), (unit(1), b)]),
                (None, -1.0, vec![(unit(1), 0.0), (unit(1), c - 1.0)]),
            ]
        })
        .collect();
    Ok(MultiLPDESystem { m, equations })
}

impl MultiLPDESystem {
    pub fn apply<S: Scalar>(&self, eq: usize, z: &MultiSeries<S>) -> Result<MultiSeries<S>> {
        contract(z.vars() == self.m, || "variable count mismatch".into())?;
        let mut acc = MultiSeries::zeros(self.m, z.degree())?;
        for (var, coef, factors) in &self.equations[eq] {
            let mut s = z.clone();
            for (w, c) in factors {
                s = s.apply_linear(w, &S::from_f64(*c));
            }
            if let Some(l) = var {
                s = s.mul_var(*l);
            }
            s = s.apply_linear(&vec![0; self.m], &S::from_f64(*coef));
            acc = acc.add(&s)?;
        }
        Ok(acc)
    }

    /// Coefficientwise residual over total degree ≤ N − 1.
    pub fn residual<S: Scalar>(&self, z: &MultiSeries<S>) -> Result<Residual> {
        let upto = z.degree().saturating_sub(1);
        let v = (0..self.equations.len()).map(|e| self.apply(e, z).map(|r| r.max_abs_upto(upto))).collect::<Result<Vec<_>>>()?;
        Ok(Residual::from(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgseries::{expand_f2n, expand_f4, expand_fn2};
    use crate::scalar::Rational;

    fn p1() -> HGParamsF2n {
        HGParamsF2n::new(vec![0.3125], 0.40625, 0.59375, vec![1.21875], 1.34375).unwrap()
    }

    #[test]
    fn degrees_for_n1() {
        assert_eq!(build_f2n_general(&p1()).degrees(), vec![2, 2]);
    }

    #[test]
    fn f2n_annihilated_exactly() {
        let p = p1();
        let z = expand_f2n::<Rational>(&p, 12).unwrap();
        let r = build_f2n_general(&p).residual_coefficients(&z).unwrap();
        assert_eq!(r.max, 0.0);
    }

    #[test]
    fn constant_one_residual() {
        let p = p1();
        let one = TruncatedSeries2D::<Rational>::constant(Chart::XT1YOneMinusT2, 4, Rational::from_i64(1));
        let r = build_f2n_general(&p).apply(0, &one).unwrap();
        assert_eq!(r.coeff(1, 0), Rational::from_f64(p.a) * Rational::from_f64(p.b[0]));
    }

    #[test]
    fn fn2_mixed_on_one_is_zero() {
        let p = HGParamsFnm::new(vec![0.25], vec![0.5, 0.375], vec![1.25]).unwrap();
        let s = build_fn2(&p).unwrap();
        let one = TruncatedSeries2D::<Rational>::constant(Chart::XS1YS2, 3, Rational::from_i64(1));
        assert!(s.apply(2, &one).unwrap().is_identically_zero());
        let z = expand_fn2::<Rational>(&p, 10).unwrap();
        assert_eq!(s.residual_coefficients(&z).unwrap().max, 0.0);
    }

    #[test]
    fn f4_pullback_pointwise() {
        let p = AppellF4Params::new(1.7, -0.6, 1.3, 1.45).unwrap();
        let g = expand_f4::<f64>(&p, 40).unwrap();
        let src = FnJet(|t1: f64, t2: f64, k: usize| Ok(f4_pullback_jet(&g, t1, t2, k)));
        let (t1, t2) = f4_base_point(0.05, 0.08).unwrap();
        let r = build_f4_system(&p).residual_pointwise(&src, &[(t1, t2)]).unwrap();
        assert!(r.max < 1e-12, "{r:?}");
    }

    #[test]
    fn f4_singular_locus() {
        let p = AppellF4Params::new(1.7, -0.6, 1.3, 1.45).unwrap();
        let g = expand_f4::<f64>(&p, 10).unwrap();
        let src = FnJet(|t1: f64, t2: f64, k: usize| Ok(f4_pullback_jet(&g, t1, t2, k)));
        assert!(matches!(build_f4_system(&p).residual_pointwise(&src, &[(0.3, 0.3)]), Err(Error::Singular(_))));
    }

    #[test]
    fn empty_points_is_contract_error() {
        let p = p1();
        let z = expand_f2n::<f64>(&p, 4).unwrap();
        assert!(matches!(build_f2n_general(&p).residual_pointwise(&z, &[]), Err(Error::Contract(_))));
    }

    #[test]
    fn dpoly_expansion() {
        let t = OperatorTerm::new(0, 0, 1.0, vec![Factor::x(2.0), Factor::y(0.0)]);
        let mut d = t.dpoly();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(d, vec![(0, 1, 2.0), (1, 1, 1.0)]);
    }
}
