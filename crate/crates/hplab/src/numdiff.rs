//! Central differences with one Richardson step.

/// f'(x) to O(h^4): combines central differences at h and h/2.
pub fn richardson_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// f''(x) to O(h^4).
pub fn richardson_second(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let f0 = f(x);
    let d = |h: f64| (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Gradient of a multivariate function, one Richardson derivative per axis.
pub fn gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut buf = x.to_vec();
    (0..x.len())
        .map(|k| {
            let x0 = x[k];
            let g = |v: f64| {
                let mut b = buf.clone();
                b[k] = v;
                f(&b)
            };
            let r = richardson_derivative(g, x0, h);
            buf[k] = x0;
            r
        })
        .collect()
}

/// Jacobian of a vector map; row r holds the gradient of output r.
pub fn jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let m = f(x).len();
    let mut cols = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let eval = |v: f64| {
            let mut b = x.to_vec();
            b[k] = v;
            f(&b)
        };
        let d = |h: f64| {
            let a = eval(x[k] + h);
            let b = eval(x[k] - h);
            a.iter().zip(&b).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>()
        };
        let d1 = d(h);
        let d2 = d(h / 2.0);
        cols.push(d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect::<Vec<_>>());
    }
    (0..m).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sin() {
        let d = richardson_derivative(f64::sin, 0.3, 1e-3);
        assert!((d - 0.3f64.cos()).abs() < 1e-12);
        let d2 = richardson_second(f64::exp, 0.2, 1e-3);
        assert!((d2 - 0.2f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn jacobian_of_polar() {
        let j = jacobian(|v| vec![v[0] * v[1].cos(), v[0] * v[1].sin()], &[2.0, 0.5], 1e-4);
        assert!((j[0][0] - 0.5f64.cos()).abs() < 1e-10);
        assert!((j[1][1] - 2.0 * 0.5f64.cos()).abs() < 1e-10);
    }
}
