use super::connection::{check_off_divisors, matrices_at, LogConnection, PainleveParams};
use crate::error::{contract, Error, Result};
use crate::hgseries::{expand_f2n, expand_f4, AppellF4Params, Chart, HGParamsF2n, TruncatedSeries2D};
use crate::jet::Jet;
use crate::lpde::f4_pullback_jet;
use crate::scalar::Scalar;
use nalgebra::DVector;

/// Series parameters attached to the main connection:
/// bᵢ = −κᵢ−ρ₁, b′ = −θ₂, c₁ = −κ₀−ρ₁+1, cᵢ = −ρ₁+ρᵢ+1, c′ = 1−θ₂−θ₃, a = c₁+c′−2.
pub fn dictionary_main(p: &PainleveParams) -> Result<HGParamsF2n> {
    let n = p.n();
    let r1 = p.rho[0];
    let b = (1..=n).map(|i| -p.kappa[i] - r1).collect();
    let mut c = vec![-p.kappa[0] - r1 + 1.0];
    c.extend((2..=n).map(|i| -r1 + p.rho[i - 1] + 1.0));
    let cp = 1.0 - p.theta2 - p.theta3;
    let a = c[0] + cp - 2.0;
    HGParamsF2n::new(b, -p.theta2, a, c, cp)
}

/// Parameters of the series z̃ is built from when κ₀ = κ₁ (then b₁ = c₁ − 1).
pub fn dictionary_degenerate(p: &PainleveParams) -> Result<HGParamsF2n> {
    contract((p.kappa[0] - p.kappa[1]).abs() < 1e-12, || format!("kappa0 = {} differs from kappa1 = {}", p.kappa[0], p.kappa[1]))?;
    dictionary_main(p)
}

/// a = α₀+α₃+α₅+1, b = −α₀−α₂, c₁ = α₃+1, c₂ = α₅+1.
pub fn dictionary_f4(alpha: &[f64; 6]) -> Result<AppellF4Params> {
    let [a0, _, a2, a3, _, a5] = *alpha;
    AppellF4Params::new(a0 + a3 + a5 + 1.0, -a0 - a2, a3 + 1.0, a5 + 1.0)
}

fn check_main_series<S: Scalar>(z: &TruncatedSeries2D<S>, p: &HGParamsF2n) -> Result<()> {
    contract(z.chart() == Chart::XT1YOneMinusT2, || format!("z must use chart XT1YOneMinusT2, got {:?}", z.chart()))?;
    let target = p.c[0] + p.cprime - 2.0;
    contract((p.a - target).abs() < 1e-12, || format!("a = {} but c1 + c' - 2 = {target}", p.a))
}

fn prod_delta1<S: Scalar>(z: &TruncatedSeries2D<S>, shifts: impl IntoIterator<Item = f64>) -> TruncatedSeries2D<S> {
    shifts.into_iter().fold(z.clone(), |acc, s| acc.delta1_plus(&S::from_f64(s)))
}

/// The (2n+1) components (w₀, w₁…wₙ, w′₁…w′ₙ) built from a solution of the
/// constrained F₂⁽ⁿ⁾ system.
pub fn construct_w_main<S: Scalar>(z: &TruncatedSeries2D<S>, p: &HGParamsF2n) -> Result<Vec<TruncatedSeries2D<S>>> {
    check_main_series(z, p)?;
    let n = p.n();
    let (b, c) = (&p.b, &p.c);
    let f = S::from_f64;
    let k = f(p.bprime) - f(p.cprime) + S::one();
    let w0 = prod_delta1(z, b.iter().copied()).delta2_plus(&f(p.cprime - 1.0)).scale(&-S::one());
    let mut ws = Vec::with_capacity(n);
    let mut wps = Vec::with_capacity(n);
    for i in 1..=n {
        let (base, coef) = if i == 1 {
            (prod_delta1(z, b[1..].iter().copied().chain([c[0] - 1.0])), f(b[0]))
        } else {
            let shifts = b[i..].iter().copied().chain(c[..i - 1].iter().map(|x| x - 1.0)).chain([0.0]);
            (prod_delta1(z, shifts), f(b[i - 1]) - f(c[i - 1]) + S::one())
        };
        ws.push(base.scale(&-(coef.clone() * k.clone())));
        wps.push(base.delta2_plus(&f(p.bprime)).scale(&coef));
    }
    let mut out = vec![w0];
    out.extend(ws);
    out.extend(wps);
    Ok(out)
}

/// The 2n components (w₀, w₁…wₙ, w′₂…w′ₙ) built from a solution z̃ of the
/// degenerate system; only c, b₂…bₙ, b′, c′ are read.
pub fn construct_w_degenerate<S: Scalar>(zt: &TruncatedSeries2D<S>, p: &HGParamsF2n) -> Result<Vec<TruncatedSeries2D<S>>> {
    contract(zt.chart() == Chart::XT1YOneMinusT2, || format!("z must use chart XT1YOneMinusT2, got {:?}", zt.chart()))?;
    let n = p.n();
    let (b, c) = (&p.b, &p.c);
    let f = S::from_f64;
    let k = f(p.bprime) - f(p.cprime) + S::one();
    let w0 = prod_delta1(zt, b[1..].iter().copied()).delta2_plus(&f(p.cprime - 1.0)).scale(&-S::one());
    let w1 = prod_delta1(zt, b[1..].iter().copied()).scale(&-((f(c[0]) - S::one()) * k.clone()));
    let mut ws = vec![w1];
    let mut wps = Vec::new();
    for i in 2..=n {
        let shifts = b[i..].iter().copied().chain(c[1..i - 1].iter().map(|x| x - 1.0)).chain([0.0]);
        let base = prod_delta1(zt, shifts);
        let coef = f(b[i - 1]) - f(c[i - 1]) + S::one();
        ws.push(base.scale(&-(coef.clone() * k.clone())));
        wps.push(base.delta2_plus(&f(p.bprime)).scale(&coef));
    }
    let mut out = vec![w0];
    out.extend(ws);
    out.extend(wps);
    Ok(out)
}

/// z̃ = (δ₁ + c₁ − 1)F₂⁽ⁿ⁾ with b₁ replaced by c₁ − 1.
pub fn degenerate_tilde_series<S: Scalar>(p: &HGParamsF2n, degree: usize) -> Result<TruncatedSeries2D<S>> {
    let mut q = p.clone();
    q.b[0] = q.c[0] - 1.0;
    q.a = q.c[0] + q.cprime - 2.0;
    let z = expand_f2n::<S>(&q, degree)?;
    Ok(z.delta1_plus(&(S::from_f64(q.c[0]) - S::one())))
}

/// Drops w′₁ from a main-system vector after checking
/// w′₁ = (κ₁+ρ₁)w₀ − w₁ coefficientwise. Exact scalars must give exact zero;
/// floats get a relative tolerance of 1e−12.
pub fn degeneration_substitution<S: Scalar>(w_main: &[TruncatedSeries2D<S>], p: &PainleveParams) -> Result<Vec<TruncatedSeries2D<S>>> {
    contract((p.kappa[0] - p.kappa[1]).abs() < 1e-12, || format!("kappa0 = {} differs from kappa1 = {}", p.kappa[0], p.kappa[1]))?;
    let n = p.n();
    contract(w_main.len() == 2 * n + 1, || format!("expected {} components, got {}", 2 * n + 1, w_main.len()))?;
    let kr = S::from_f64(p.kappa[1]) + S::from_f64(p.rho[0]);
    let rel = w_main[0].scale(&kr).sub(&w_main[1])?.sub(&w_main[n + 1])?;
    let ok = if S::is_exact() {
        rel.is_identically_zero()
    } else {
        let d = rel.degree();
        let scale = [&w_main[0], &w_main[1], &w_main[n + 1]].iter().map(|w| w.max_abs_upto(d)).fold(1.0, f64::max);
        rel.max_abs_upto(d) <= 1e-12 * scale
    };
    if !ok {
        return Err(Error::Consistency(format!("(k1+r1)w0 - w1 - w'1 is nonzero (max coefficient {:e})", rel.max_abs_upto(rel.degree()))));
    }
    let mut out: Vec<_> = w_main[..=n].to_vec();
    out.extend_from_slice(&w_main[n + 2..]);
    Ok(out)
}

/// A solution vector that can be evaluated with first derivatives.
pub trait PfaffSolution: Sync {
    fn dim(&self) -> usize;
    /// (𝐰, ∂𝐰/∂t₁, ∂𝐰/∂t₂) at a base point.
    fn eval(&self, t1: f64, t2: f64) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)>;
}

/// Components given as truncated series in one chart.
#[derive(Debug, Clone)]
pub struct SeriesVector {
    pub components: Vec<TruncatedSeries2D<f64>>,
}

impl SeriesVector {
    pub fn new<S: Scalar>(components: &[TruncatedSeries2D<S>]) -> Self {
        SeriesVector { components: components.iter().map(|c| c.to_f64()).collect() }
    }
}

/// Points with |x| + |y| beyond this are refused for series evaluation.
pub const SERIES_REGION: f64 = 0.9;

impl PfaffSolution for SeriesVector {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, t1: f64, t2: f64) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        if let Some(c) = self.components.first() {
            let (x, y) = c.chart().local(t1, t2);
            if x.abs() + y.abs() > SERIES_REGION {
                return Err(Error::Region(format!("|x| + |y| = {} at ({t1}, {t2})", x.abs() + y.abs())));
            }
        }
        let d = self.dim();
        let (mut w, mut g1, mut g2) = (DVector::zeros(d), DVector::zeros(d), DVector::zeros(d));
        for (k, c) in self.components.iter().enumerate() {
            let (v, a, b) = c.value_and_gradient(t1, t2);
            w[k] = v;
            g1[k] = a;
            g2[k] = b;
        }
        Ok((w, g1, g2))
    }
}

/// The four-component vector attached to the F₄ connection, built pointwise
/// from jets of the pulled-back F₄ series.
#[derive(Debug, Clone)]
pub struct F4Solution {
    pub grid: TruncatedSeries2D<f64>,
    pub alpha: [f64; 6],
}

impl F4Solution {
    pub fn new(alpha: &[f64; 6], degree: usize) -> Result<Self> {
        let p = dictionary_f4(alpha)?;
        Ok(F4Solution { grid: expand_f4::<f64>(&p, degree)?, alpha: *alpha })
    }

    /// Jets (order one) of the four components.
    pub fn jets(&self, t1: f64, t2: f64) -> Result<[Jet; 4]> {
        let (x, y) = (t1 * t2, (1.0 - t1) * (1.0 - t2));
        if !(x >= 0.0 && y >= 0.0) || x.sqrt() + y.sqrt() > SERIES_REGION {
            return Err(Error::Region(format!("F4 arguments ({x}, {y}) outside sqrt X + sqrt Y < {SERIES_REGION}")));
        }
        check_off_divisors(t1, t2, 1e-12)?;
        let [a0, _, a2, a3, _, _] = self.alpha;
        let z = f4_pullback_jet(&self.grid, t1, t2, 3);
        let d1 = z.euler(0, t1);
        let d2 = z.euler(1, t2);
        let d12 = d2.euler(0, t1);
        let (u1, u2) = (Jet::var(2, t1, 0), Jet::var(2, t2, 1));
        let inv = u1.sub(&u2).recip();
        // (δ₁+u)(δ₂+v)z
        let op = |u: f64, v: f64| d12.add(&d1.scale(v)).add(&d2.scale(u)).add(&z.scale(u * v));
        // α₂{t₂(δ₁+u)z − t₁(δ₂+v)z}/(t₁−t₂)
        let cr = |u: f64, v: f64| {
            u2.mul(&d1.add(&z.scale(u))).sub(&u1.mul(&d2.add(&z.scale(v)))).mul(&inv).scale(a2)
        };
        Ok([
            op(-a0, -a0).add(&cr(-a0, -a0)).scale(-1.0),
            op(a3, -a0).add(&cr(a3, a3)).scale(a0),
            op(-a0, a3).add(&cr(a3, a3)).scale(a0),
            op(a3, a3).add(&cr(a3, a3)).scale(-a0 * (a0 + a2)),
        ])
    }
}

impl PfaffSolution for F4Solution {
    fn dim(&self) -> usize {
        4
    }

    fn eval(&self, t1: f64, t2: f64) -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
        let j = self.jets(t1, t2)?;
        Ok((
            DVector::from_iterator(4, j.iter().map(|c| c.value())),
            DVector::from_iterator(4, j.iter().map(|c| c.gradient().0)),
            DVector::from_iterator(4, j.iter().map(|c| c.gradient().1)),
        ))
    }
}

/// 5×5 grid, t₁ ∈ [0.05, 0.15], 1 − t₂ ∈ [0.05, 0.15].
pub fn default_grid() -> Vec<(f64, f64)> {
    let ax: Vec<f64> = (0..5).map(|k| 0.05 + 0.025 * k as f64).collect();
    ax.iter().flat_map(|&t1| ax.iter().map(move |&y| (t1, 1.0 - y))).collect()
}

/// Max over the points of ‖∂₁𝐰 − M1𝐰‖∞ and ‖∂₂𝐰 − M2𝐰‖∞.
pub fn verify_pfaff_solution(conn: &LogConnection, w: &dyn PfaffSolution, points: &[(f64, f64)]) -> Result<f64> {
    contract(w.dim() == conn.dim(), || format!("solution has {} components, connection {}", w.dim(), conn.dim()))?;
    contract(!points.is_empty(), || "no sample points".into())?;
    let per: Vec<Result<f64>> = crate::par::map(points, |&(t1, t2)| {
        let (m1, m2) = matrices_at(conn, t1, t2)?;
        let (v, g1, g2) = w.eval(t1, t2)?;
        Ok((g1 - &m1 * &v).amax().max((g2 - &m2 * &v).amax()))
    });
    let mut worst = 0.0f64;
    for r in per {
        worst = worst.max(r?);
    }
    Ok(worst)
}

/// Main-connection vector from the series at given truncation.
pub fn main_series_solution<S: Scalar>(p: &PainleveParams, degree: usize) -> Result<Vec<TruncatedSeries2D<S>>> {
    let q = dictionary_main(p)?;
    construct_w_main(&expand_f2n::<S>(&q, degree)?, &q)
}

/// Degenerate-connection vector built from z̃.
pub fn degenerate_series_solution<S: Scalar>(p: &PainleveParams, degree: usize) -> Result<Vec<TruncatedSeries2D<S>>> {
    let q = dictionary_degenerate(p)?;
    construct_w_degenerate(&degenerate_tilde_series::<S>(&q, degree)?, &q)
}

/// Residual of each component equation family, in the order
/// w01, w02, w11, w'11, wi1, w'i1, wi2, w'i2 (the i ≥ 2 families are absent for n = 1).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ComponentResiduals {
    pub entries: Vec<(String, f64)>,
}

impl ComponentResiduals {
    pub fn max(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

struct Tilde {
    bt: Vec<f64>,
    ct: Vec<f64>,
    c0: f64,
}

fn tilde(p: &HGParamsF2n) -> Tilde {
    let n = p.n();
    let mut bt = vec![p.b[0]];
    let mut ct = vec![0.0];
    for j in 1..n {
        bt.push(p.b[j] - p.c[j] + 1.0);
        ct.push(p.c[j] - 1.0);
    }
    Tilde { bt, ct, c0: p.c[0] - 1.0 }
}

fn component_point(w: &[TruncatedSeries2D<f64>], p: &HGParamsF2n, t1: f64, t2: f64) -> [f64; 8] {
    let n = p.n();
    let (x, y) = (t1, 1.0 - t2);
    let v = |c: &TruncatedSeries2D<f64>| c.eval(x, y);
    let w0 = v(&w[0]);
    let wi: Vec<f64> = w[1..=n].iter().map(v).collect();
    let wp: Vec<f64> = w[n + 1..].iter().map(v).collect();
    let d1: Vec<f64> = w.iter().map(|c| v(&c.euler_delta1())).collect();
    let d2: Vec<f64> = w.iter().map(|c| v(&c.euler_delta2())).collect();
    let (s, sp) = (wi.iter().sum::<f64>(), wp.iter().sum::<f64>());
    let (bp, cp) = (p.bprime, p.cprime);
    let k = bp - cp + 1.0;
    let Tilde { bt, ct, c0 } = tilde(p);
    let mut r = [0.0f64; 8];
    r[0] = (d1[0] - (t1 / (t1 - t2) * (-bp * w0 + sp) + t1 / (t1 - 1.0) * (k * w0 + s) - c0 * w0 - (s + sp))).abs();
    r[1] = (d2[0] + (t2 - 1.0) / (t2 - t1) * (bp * w0 - sp)).abs();
    for i in 0..n {
        let tail_w: f64 = wi[i + 1..].iter().sum();
        let tail_wp: f64 = wp[i + 1..].iter().sum();
        let head_wp: f64 = wp[..i].iter().sum();
        let e_wi1 = d1[1 + i] - (-t1 / (t1 - 1.0) * bt[i] * (k * w0 + s) - ct[i] * wi[i] + bt[i] * tail_w);
        let e_wpi1 = d1[n + 1 + i] - (-t1 / (t1 - t2) * bt[i] * (-bp * w0 + sp) - ct[i] * wp[i] + bt[i] * tail_wp);
        let e_wi2 = d2[1 + i] - (-bp * wi[i] - k * wp[i]);
        let e_wpi2 = d2[n + 1 + i]
            - ((t2 - 1.0) / (t2 - t1) * bt[i] * (bp * w0 - sp)
                + (t2 - 1.0) / t2 * (-bt[i] * bp * w0 - bp * wi[i] + bt[i] * head_wp + (p.b[i] - p.c[0] - bp + 1.0) * wp[i])
                + bp * wi[i]
                + k * wp[i]);
        let (a, b) = if i == 0 { (2, 3) } else { (4, 5) };
        r[a] = r[a].max(e_wi1.abs());
        r[b] = r[b].max(e_wpi1.abs());
        r[6] = r[6].max(e_wi2.abs());
        r[7] = r[7].max(e_wpi2.abs());
    }
    r
}

/// Checks the first-order equations satisfied by each component of the main
/// vector, pointwise on the given grid.
pub fn verify_component_odes(w: &[TruncatedSeries2D<f64>], p: &HGParamsF2n, points: &[(f64, f64)]) -> Result<ComponentResiduals> {
    let n = p.n();
    contract(w.len() == 2 * n + 1, || format!("expected {} components, got {}", 2 * n + 1, w.len()))?;
    contract(!points.is_empty(), || "no sample points".into())?;
    for &(t1, t2) in points {
        check_off_divisors(t1, t2, 1e-12)?;
        if t1.abs() + (1.0 - t2).abs() > SERIES_REGION {
            return Err(Error::Region(format!("({t1}, {t2}) outside the series region")));
        }
    }
    let per = crate::par::map(points, |&(t1, t2)| component_point(w, p, t1, t2));
    let labels = ["w01", "w02", "w11", "w'11", "wi1", "w'i1", "wi2", "w'i2"];
    let entries = labels
        .iter()
        .enumerate()
        .filter(|(k, _)| n > 1 || !matches!(k, 4 | 5))
        .map(|(k, l)| (l.to_string(), per.iter().map(|r| r[k]).fold(0.0, f64::max)))
        .collect();
    Ok(ComponentResiduals { entries })
}

/// δ₂wᵢ + b′wᵢ + (b′−c′+1)w′ᵢ, coefficientwise, for each i. Zero for exact input.
pub fn component_wi2_residual<S: Scalar>(w: &[TruncatedSeries2D<S>], p: &HGParamsF2n) -> Result<Vec<TruncatedSeries2D<S>>> {
    let n = p.n();
    contract(w.len() == 2 * n + 1, || format!("expected {} components, got {}", 2 * n + 1, w.len()))?;
    let f = S::from_f64;
    let k = f(p.bprime) - f(p.cprime) + S::one();
    (1..=n).map(|i| w[i].delta2_plus(&f(p.bprime)).add(&w[n + i].scale(&k))).collect()
}

#[cfg(test)]
mod tests {
    use super::super::connection::*;
    use super::*;
    use crate::scalar::Rational;

    fn pp(n: usize) -> PainleveParams {
        let kappa = (0..=n).map(|i| 0.125 + 0.0625 * i as f64).collect();
        let rho = (0..n).map(|i| 0.1875 + 0.125 * i as f64).collect();
        PainleveParams::new(0.25, 0.3125, 0.4375, kappa, rho).unwrap()
    }

    #[test]
    fn main_solution_satisfies_connection() {
        for n in 1..=2 {
            let p = pp(n);
            let w = SeriesVector::new(&main_series_solution::<f64>(&p, 24).unwrap());
            let r = verify_pfaff_solution(&build_connection_main(&p), &w, &default_grid()).unwrap();
            assert!(r < 1e-9, "n = {n}: {r:e}");
        }
    }

    #[test]
    fn w1_constant_term() {
        let p = pp(1);
        let q = dictionary_main(&p).unwrap();
        let z = expand_f2n::<f64>(&q, 4).unwrap();
        let w = construct_w_main(&z, &q).unwrap();
        let want = -q.b[0] * (q.bprime - q.cprime + 1.0) * (q.c[0] - 1.0);
        assert!((w[1].coeff(0, 0) - want).abs() < 1e-15);
    }

    #[test]
    fn degenerate_relation_is_exact() {
        for n in 1..=3 {
            let mut p = pp(n);
            p.kappa[0] = p.kappa[1];
            let w = main_series_solution::<Rational>(&p, 6).unwrap();
            let d = degeneration_substitution(&w, &p).unwrap();
            assert_eq!(d.len(), 2 * n);
            let wd = degenerate_series_solution::<Rational>(&p, 6).unwrap();
            assert_eq!(d, wd);
        }
    }

    #[test]
    fn degenerate_solution_satisfies_connection() {
        for n in 1..=2 {
            let mut p = pp(n);
            p.kappa[0] = p.kappa[1];
            let w = SeriesVector::new(&degenerate_series_solution::<f64>(&p, 24).unwrap());
            let r = verify_pfaff_solution(&build_connection_degenerate(&p).unwrap(), &w, &default_grid()).unwrap();
            assert!(r < 1e-9, "n = {n}: {r:e}");
        }
    }

    #[test]
    fn components_odes_hold() {
        let p = pp(2);
        let q = dictionary_main(&p).unwrap();
        let w = main_series_solution::<f64>(&p, 24).unwrap();
        let r = verify_component_odes(&w, &q, &default_grid()).unwrap();
        assert_eq!(r.entries.len(), 8);
        assert!(r.max() < 1e-9, "{r:?}");
        let wq = main_series_solution::<Rational>(&p, 5).unwrap();
        assert!(component_wi2_residual(&wq, &q).unwrap().iter().all(|s| s.is_identically_zero()));
    }

    #[test]
    fn f4_solution_satisfies_connection() {
        let mut a = [0.21, 0.0, 0.33, 0.17, 0.0, 0.41];
        a[4] = -(2.0 * a[0] + a[2] + a[3] + a[5]);
        let w = F4Solution::new(&a, 80).unwrap();
        let r = verify_pfaff_solution(&build_connection_f4(&a).unwrap(), &w, &default_grid()).unwrap();
        assert!(r < 1e-8, "{r:e}");
    }
}
