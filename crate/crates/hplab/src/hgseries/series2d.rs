use crate::error::{contract, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Which local variables a bivariate series is expanded in.
///
/// The Euler operators act the same way on coefficients in every chart
/// (`δ₁ c[i][j] = i c[i][j]`, `δ₂ c[i][j] = j c[i][j]`); the chart records what
/// that action means on the base variables:
///
/// * `XT1YOneMinusT2`: x = t₁, y = 1 − t₂, so δ₂ = y∂/∂y = (t₂ − 1)∂/∂t₂.
/// * `XT1YT2`: x = t₁, y = t₂, δ₂ = t₂∂/∂t₂.
/// * `XS1YS2`: x = s₁, y = s₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    XT1YOneMinusT2,
    XT1YT2,
    XS1YS2,
}

impl Chart {
    /// Chart coordinates of a base point (t₁, t₂), or (s₁, s₂) for `XS1YS2`.
    pub fn local(self, t1: f64, t2: f64) -> (f64, f64) {
        match self {
            Chart::XT1YOneMinusT2 => (t1, 1.0 - t2),
            Chart::XT1YT2 | Chart::XS1YS2 => (t1, t2),
        }
    }

    /// Sign of ∂y/∂t₂.
    pub fn dy_dt2(self) -> f64 {
        match self {
            Chart::XT1YOneMinusT2 => -1.0,
            _ => 1.0,
        }
    }
}

/// Triangular grid of coefficients c[i][j], i + j ≤ degree.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries2D<S> {
    chart: Chart,
    degree: usize,
    // rows[i] holds c[i][0..=degree-i]
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> TruncatedSeries2D<S> {
    pub fn zeros(chart: Chart, degree: usize) -> Self {
        let rows = (0..=degree).map(|i| vec![S::zero(); degree - i + 1]).collect();
        TruncatedSeries2D { chart, degree, rows }
    }

    pub fn constant(chart: Chart, degree: usize, v: S) -> Self {
        let mut s = Self::zeros(chart, degree);
        s.rows[0][0] = v;
        s
    }

    pub fn from_fn(chart: Chart, degree: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let rows = (0..=degree).map(|i| (0..=degree - i).map(|j| f(i, j)).collect()).collect();
        TruncatedSeries2D { chart, degree, rows }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of xⁱyʲ; zero outside the grid.
    pub fn coeff(&self, i: usize, j: usize) -> S {
        if i + j <= self.degree {
            self.rows[i][j].clone()
        } else {
            S::zero()
        }
    }

    pub fn coeff_ref(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        assert!(i + j <= self.degree, "index ({i},{j}) beyond degree {}", self.degree);
        self.rows[i][j] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| (i, j, v)))
    }

    pub fn map_indexed(&self, mut f: impl FnMut(usize, usize, &S) -> S) -> Self {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, v)| f(i, j, v)).collect())
            .collect();
        TruncatedSeries2D { chart: self.chart, degree: self.degree, rows }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        contract(self.chart == other.chart, || format!("chart mismatch: {:?} vs {:?}", self.chart, other.chart))?;
        contract(self.degree == other.degree, || format!("degree mismatch: {} vs {}", self.degree, other.degree))
    }

    pub fn euler_delta1(&self) -> Self {
        self.map_indexed(|i, _, v| S::from_i64(i as i64) * v.clone())
    }

    pub fn euler_delta2(&self) -> Self {
        self.map_indexed(|_, j, v| S::from_i64(j as i64) * v.clone())
    }

    /// (d₁δ₁ + d₂δ₂ + c) applied to the series.
    pub fn apply_linear(&self, d1: i64, d2: i64, c: &S) -> Self {
        self.map_indexed(|i, j, v| (S::from_i64(d1 * i as i64 + d2 * j as i64) + c.clone()) * v.clone())
    }

    /// δ₁ + c.
    pub fn delta1_plus(&self, c: &S) -> Self {
        self.apply_linear(1, 0, c)
    }

    /// δ₂ + c.
    pub fn delta2_plus(&self, c: &S) -> Self {
        self.apply_linear(0, 1, c)
    }

    /// ∂/∂x; the top anti-diagonal is lost so the degree drops by one.
    pub fn partial_x(&self) -> Self {
        let d = self.degree.saturating_sub(1);
        if self.degree == 0 {
            return Self::zeros(self.chart, 0);
        }
        Self::from_fn(self.chart, d, |i, j| S::from_i64(i as i64 + 1) * self.rows[i + 1][j].clone())
    }

    pub fn partial_y(&self) -> Self {
        let d = self.degree.saturating_sub(1);
        if self.degree == 0 {
            return Self::zeros(self.chart, 0);
        }
        Self::from_fn(self.chart, d, |i, j| S::from_i64(j as i64 + 1) * self.rows[i][j + 1].clone())
    }

    /// t₂∂/∂t₂ in the chart x = t₁, y = 1 − t₂, i.e. y∂/∂y − ∂/∂y. Not diagonal,
    /// so the degree drops by one.
    pub fn t2_dt2(&self) -> Result<Self> {
        contract(self.chart == Chart::XT1YOneMinusT2, || format!("t2_dt2 needs chart XT1YOneMinusT2, got {:?}", self.chart))?;
        if self.degree == 0 {
            return Ok(Self::zeros(self.chart, 0));
        }
        let d = self.degree - 1;
        Ok(Self::from_fn(self.chart, d, |i, j| {
            S::from_i64(j as i64) * self.rows[i][j].clone() - S::from_i64(j as i64 + 1) * self.rows[i][j + 1].clone()
        }))
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map_indexed(|_, _, v| s.clone() * v.clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.map_indexed(|i, j, v| v.clone() + other.rows[i][j].clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.map_indexed(|i, j, v| v.clone() - other.rows[i][j].clone()))
    }

    /// Multiply by xᵖyᵠ, truncating at the same degree.
    pub fn mul_monomial(&self, p: usize, q: usize) -> Self {
        Self::from_fn(self.chart, self.degree, |i, j| {
            if i >= p && j >= q {
                self.rows[i - p][j - q].clone()
            } else {
                S::zero()
            }
        })
    }

    pub fn mul_x(&self) -> Self {
        self.mul_monomial(1, 0)
    }

    pub fn mul_y(&self) -> Self {
        self.mul_monomial(0, 1)
    }

    /// Keep only terms with i + j ≤ d (d ≤ degree).
    pub fn truncate(&self, d: usize) -> Self {
        let d = d.min(self.degree);
        Self::from_fn(self.chart, d, |i, j| self.rows[i][j].clone())
    }

    /// Largest |c[i][j]| over i + j ≤ upto.
    pub fn max_abs_upto(&self, upto: usize) -> f64 {
        self.iter().filter(|(i, j, _)| i + j <= upto).map(|(_, _, v)| v.abs_f64()).fold(0.0, f64::max)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.iter().all(|(_, _, v)| v.is_zero())
    }

    pub fn to_f64(&self) -> TruncatedSeries2D<f64> {
        TruncatedSeries2D {
            chart: self.chart,
            degree: self.degree,
            rows: self.rows.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect(),
        }
    }

    /// Pointwise value at chart coordinates (x, y).
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // Horner in y inside, x outside.
        let mut acc = 0.0;
        for i in (0..=self.degree).rev() {
            let mut row = 0.0;
            for v in self.rows[i].iter().rev() {
                row = row * y + v.to_f64();
            }
            acc = acc * x + row;
        }
        acc
    }

    /// Value at a base point, through the chart map.
    pub fn eval_at(&self, t1: f64, t2: f64) -> f64 {
        let (x, y) = self.chart.local(t1, t2);
        self.eval(x, y)
    }

    /// (value, ∂/∂t₁, ∂/∂t₂) at a base point; the t₂ derivative carries the
    /// chart sign (∂/∂t₂ = −∂/∂y for y = 1 − t₂).
    pub fn value_and_gradient(&self, t1: f64, t2: f64) -> (f64, f64, f64) {
        let (x, y) = self.chart.local(t1, t2);
        let v = self.eval(x, y);
        let dx = self.partial_x().eval(x, y);
        let dy = self.partial_y().eval(x, y);
        (v, dx, self.chart.dy_dt2() * dy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn delta1_of_constant_is_zero() {
        let one = TruncatedSeries2D::<f64>::constant(Chart::XT1YOneMinusT2, 4, 1.0);
        assert!(one.euler_delta1().is_identically_zero());
    }

    #[test]
    fn shift_then_delta1() {
        let one = TruncatedSeries2D::<Rational>::constant(Chart::XT1YT2, 3, ratio(1, 1));
        let s = one.mul_x().euler_delta1();
        assert_eq!(s.coeff(1, 0), ratio(1, 1));
        assert_eq!(s.coeff(0, 0), ratio(0, 1));
    }

    #[test]
    fn horner_matches_naive_sum() {
        let s = TruncatedSeries2D::<f64>::from_fn(Chart::XS1YS2, 5, |i, j| (1 + i + 2 * j) as f64 / 7.0);
        let naive: f64 = s.iter().map(|(i, j, v)| v * 0.3f64.powi(i as i32) * 0.2f64.powi(j as i32)).sum();
        assert!((s.eval(0.3, 0.2) - naive).abs() < 1e-15);
    }

    #[test]
    fn chart_mismatch_is_contract_error() {
        let a = TruncatedSeries2D::<f64>::zeros(Chart::XT1YT2, 2);
        let b = TruncatedSeries2D::<f64>::zeros(Chart::XS1YS2, 2);
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn t2_dt2_on_one_minus_y() {
        // t₂ = 1 − y, so t₂∂t₂ applied to t₂ gives t₂ = 1 − y.
        let mut s = TruncatedSeries2D::<f64>::zeros(Chart::XT1YOneMinusT2, 3);
        s.set(0, 0, 1.0);
        s.set(0, 1, -1.0);
        let r = s.t2_dt2().unwrap();
        assert_eq!(r.coeff(0, 0), 1.0);
        assert_eq!(r.coeff(0, 1), -1.0);
    }
}
