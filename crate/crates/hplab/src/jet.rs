//! Truncated bivariate Taylor jets.
//!
//! A `Jet` of order K around a point holds the Taylor coefficients
//! c[i][j] (i + j ≤ K) of a function in the displacements (h₁, h₂). Jets give
//! exact derivatives of composite expressions (prefactors, pullbacks, rational
//! coefficients) where a power series in the chart variables is not available.

use crate::hgseries::TruncatedSeries2D;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: usize,
    // rows[i][j] is the coefficient of h₁ⁱh₂ʲ
    rows: Vec<Vec<f64>>,
}

impl Jet {
    pub fn zeros(order: usize) -> Self {
        Jet { order, rows: (0..=order).map(|i| vec![0.0; order - i + 1]).collect() }
    }

    pub fn constant(order: usize, v: f64) -> Self {
        let mut j = Self::zeros(order);
        j.rows[0][0] = v;
        j
    }

    /// The coordinate function x₀ + h_axis (axis 0 or 1).
    pub fn var(order: usize, x0: f64, axis: usize) -> Self {
        let mut j = Self::constant(order, x0);
        if order > 0 {
            if axis == 0 {
                j.rows[1][0] = 1.0;
            } else {
                j.rows[0][1] = 1.0;
            }
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j <= self.order {
            self.rows[i][j]
        } else {
            0.0
        }
    }

    pub fn value(&self) -> f64 {
        self.rows[0][0]
    }

    /// First partial derivatives at the base point.
    pub fn gradient(&self) -> (f64, f64) {
        (self.coeff(1, 0), self.coeff(0, 1))
    }

    /// ∂ᵃ₁∂ᵇ₂ at the base point.
    pub fn derivative(&self, a: usize, b: usize) -> f64 {
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        self.coeff(a, b) * fact(a) * fact(b)
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let order = self.order.min(other.order);
        let mut out = Jet::zeros(order);
        for i in 0..=order {
            for j in 0..=order - i {
                out.rows[i][j] = f(self.rows[i][j], other.rows[i][j]);
            }
        }
        out
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { order: self.order, rows: self.rows.iter().map(|r| r.iter().map(|v| v * s).collect()).collect() }
    }

    pub fn add_const(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.rows[0][0] += c;
        out
    }

    /// Truncated product; the result has the smaller of the two orders.
    pub fn mul(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let mut out = Jet::zeros(order);
        for i1 in 0..=order {
            for j1 in 0..=order - i1 {
                let a = self.rows[i1][j1];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=order - i1 - j1 {
                    for j2 in 0..=order - i1 - j1 - i2 {
                        out.rows[i1 + i2][j1 + j2] += a * other.rows[i2][j2];
                    }
                }
            }
        }
        out
    }

    /// f(self) for a univariate f given by its Taylor coefficients at
    /// self.value(): taylor[k] = f⁽ᵏ⁾(x₀)/k!.
    pub fn compose_univariate(&self, taylor: &[f64]) -> Jet {
        let r = self.add_const(-self.value());
        let k = self.order.min(taylor.len().saturating_sub(1));
        let mut acc = Jet::constant(self.order, taylor[k]);
        for c in taylor[..k].iter().rev() {
            acc = acc.mul(&r).add_const(*c);
        }
        acc
    }

    pub fn recip(&self) -> Jet {
        let x0 = self.value();
        let taylor: Vec<f64> = (0..=self.order).map(|k| (-1f64).powi(k as i32) / x0.powi(k as i32 + 1)).collect();
        self.compose_univariate(&taylor)
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self.mul(&other.recip())
    }

    /// self^e for a positive base value.
    pub fn powf(&self, e: f64) -> Jet {
        let x0 = self.value();
        let mut taylor = Vec::with_capacity(self.order + 1);
        let mut c = x0.powf(e);
        for k in 0..=self.order {
            taylor.push(c);
            c *= (e - k as f64) / ((k + 1) as f64 * x0);
        }
        self.compose_univariate(&taylor)
    }

    /// ∂/∂h_axis; the order drops by one.
    pub fn partial(&self, axis: usize) -> Jet {
        if self.order == 0 {
            return Jet::zeros(0);
        }
        let order = self.order - 1;
        let mut out = Jet::zeros(order);
        for i in 0..=order {
            for j in 0..=order - i {
                out.rows[i][j] = if axis == 0 {
                    (i + 1) as f64 * self.rows[i + 1][j]
                } else {
                    (j + 1) as f64 * self.rows[i][j + 1]
                };
            }
        }
        out
    }

    /// Euler operator (x₀ + h)∂/∂h along one axis, for a jet based at x₀.
    pub fn euler(&self, axis: usize, x0: f64) -> Jet {
        let d = self.partial(axis);
        d.mul(&Jet::var(d.order, x0, axis))
    }

    /// F(X, Y) for a power series F in two variables and jets X, Y.
    /// Taylor coefficients of F at (X₀, Y₀) come from the binomial re-expansion
    /// of the series coefficients.
    pub fn compose_series(f: &TruncatedSeries2D<f64>, x: &Jet, y: &Jet) -> Jet {
        let order = x.order.min(y.order);
        let (x0, y0) = (x.value(), y.value());
        let n = f.degree();
        // g[i][b] = Σ_j C(j,b) c_ij y0^(j-b)
        let mut g = vec![vec![0.0; order + 1]; n + 1];
        for (i, gi) in g.iter_mut().enumerate() {
            for (b, slot) in gi.iter_mut().enumerate() {
                let mut acc = 0.0;
                let mut binom = 1.0;
                let mut pw = 1.0;
                for j in b..=n - i {
                    acc += binom * pw * f.coeff_ref(i, j);
                    binom *= (j + 1) as f64 / (j + 1 - b) as f64;
                    pw *= y0;
                }
                *slot = acc;
            }
        }
        let mut taylor = vec![vec![0.0; order + 1]; order + 1];
        for a in 0..=order {
            for b in 0..=order - a {
                let mut acc = 0.0;
                let mut binom = 1.0;
                let mut pw = 1.0;
                for (i, gi) in g.iter().enumerate().skip(a) {
                    acc += binom * pw * gi[b];
                    binom *= (i + 1) as f64 / (i + 1 - a) as f64;
                    pw *= x0;
                }
                taylor[a][b] = acc;
            }
        }
        let dx = x.add_const(-x0);
        let dy = y.add_const(-y0);
        let mut dxp = vec![Jet::constant(order, 1.0)];
        let mut dyp = vec![Jet::constant(order, 1.0)];
        for k in 1..=order {
            dxp.push(dxp[k - 1].mul(&dx));
            dyp.push(dyp[k - 1].mul(&dy));
        }
        let mut out = Jet::zeros(order);
        for a in 0..=order {
            for b in 0..=order - a {
                out = out.add(&dxp[a].mul(&dyp[b]).scale(taylor[a][b]));
            }
        }
        out
    }

    /// Jet of a series in its own chart variables at (x₀, y₀).
    pub fn of_series(f: &TruncatedSeries2D<f64>, x0: f64, y0: f64, order: usize) -> Jet {
        Jet::compose_series(f, &Jet::var(order, x0, 0), &Jet::var(order, y0, 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgseries::Chart;

    #[test]
    fn product_and_reciprocal() {
        let x = Jet::var(4, 0.5, 0);
        let y = Jet::var(4, 0.25, 1);
        let p = x.mul(&y).recip();
        // 1/(xy): ∂x = -1/(x²y)
        assert!((p.value() - 8.0).abs() < 1e-14);
        assert!((p.gradient().0 + 1.0 / (0.25 * 0.25)).abs() < 1e-12);
        let one = p.mul(&x.mul(&y));
        assert!((one.value() - 1.0).abs() < 1e-14);
        assert!(one.coeff(2, 1).abs() < 1e-12);
    }

    #[test]
    fn powf_derivatives() {
        let x = Jet::var(3, 0.8, 1);
        let p = x.powf(-0.3);
        let d2 = -0.3 * -1.3 * 0.8f64.powf(-2.3);
        assert!((p.derivative(0, 2) - d2).abs() < 1e-12);
    }

    #[test]
    fn series_taylor_matches_polynomial() {
        // F = 1 + 2x + 3xy + y^2
        let mut f = TruncatedSeries2D::<f64>::zeros(Chart::XT1YT2, 3);
        f.set(0, 0, 1.0);
        f.set(1, 0, 2.0);
        f.set(1, 1, 3.0);
        f.set(0, 2, 1.0);
        let j = Jet::of_series(&f, 0.3, -0.2, 3);
        assert!((j.value() - f.eval(0.3, -0.2)).abs() < 1e-15);
        assert!((j.gradient().0 - (2.0 + 3.0 * -0.2)).abs() < 1e-14);
        assert!((j.gradient().1 - (3.0 * 0.3 + 2.0 * -0.2)).abs() < 1e-14);
        assert!((j.derivative(1, 1) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn euler_on_monomial() {
        // x∂x x^3 = 3x^3
        let x = Jet::var(5, 0.7, 0);
        let c = x.mul(&x).mul(&x);
        let e = c.euler(0, 0.7);
        assert!((e.value() - 3.0 * 0.343).abs() < 1e-14);
    }
}
