use super::params::HGParamsF2nm;
use crate::error::{contract, Error, Result};
use crate::scalar::Scalar;

pub const MAX_MULTI_VARS: usize = 3;

/// Truncated power series in m ≤ 3 variables, total degree ≤ N, stored densely
/// in the (N+1)^m box with entries above the total degree kept at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSeries<S> {
    m: usize,
    degree: usize,
    data: Vec<S>,
}

impl<S: Scalar> MultiSeries<S> {
    pub fn zeros(m: usize, degree: usize) -> Result<Self> {
        if m == 0 || m > MAX_MULTI_VARS {
            return Err(Error::Unsupported(format!("multi-variable series with m = {m} (1..=3 supported)")));
        }
        Ok(MultiSeries { m, degree, data: vec![S::zero(); (degree + 1).pow(m as u32)] })
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * (self.degree + 1) + i)
    }

    fn unindex(&self, mut k: usize) -> Vec<usize> {
        let mut out = vec![0; self.m];
        for slot in out.iter_mut().rev() {
            *slot = k % (self.degree + 1);
            k /= self.degree + 1;
        }
        out
    }

    pub fn get(&self, idx: &[usize]) -> S {
        if idx.iter().sum::<usize>() > self.degree {
            return S::zero();
        }
        self.data[self.index(idx)].clone()
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        assert_eq!(idx.len(), self.m);
        assert!(idx.iter().sum::<usize>() <= self.degree);
        let k = self.index(idx);
        self.data[k] = v;
    }

    /// Multi-indices with |i| ≤ N in storage order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.data.len()).map(|k| self.unindex(k)).filter(|i| i.iter().sum::<usize>() <= self.degree)
    }

    fn map_indexed(&self, f: impl Fn(&[usize], &S) -> S) -> Self {
        let data = (0..self.data.len())
            .map(|k| {
                let idx = self.unindex(k);
                if idx.iter().sum::<usize>() <= self.degree {
                    f(&idx, &self.data[k])
                } else {
                    S::zero()
                }
            })
            .collect();
        MultiSeries { m: self.m, degree: self.degree, data }
    }

    /// (Σ d_l δ_l + c) applied coefficientwise.
    pub fn apply_linear(&self, d: &[i64], c: &S) -> Self {
        self.map_indexed(|idx, v| {
            let w: i64 = idx.iter().zip(d).map(|(&i, &dl)| i as i64 * dl).sum();
            (S::from_i64(w) + c.clone()) * v.clone()
        })
    }

    /// Multiply by the l-th variable, truncating.
    pub fn mul_var(&self, l: usize) -> Self {
        self.map_indexed(|idx, _| {
            if idx[l] == 0 {
                S::zero()
            } else {
                let mut src = idx.to_vec();
                src[l] -= 1;
                self.get(&src)
            }
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        contract(self.m == other.m && self.degree == other.degree, || "multi-series shape mismatch".into())?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(MultiSeries { m: self.m, degree: self.degree, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        contract(self.m == other.m && self.degree == other.degree, || "multi-series shape mismatch".into())?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(MultiSeries { m: self.m, degree: self.degree, data })
    }

    pub fn max_abs_upto(&self, upto: usize) -> f64 {
        self.indices().filter(|i| i.iter().sum::<usize>() <= upto).map(|i| self.get(&i).abs_f64()).fold(0.0, f64::max)
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        self.indices()
            .map(|i| self.get(&i).to_f64() * i.iter().zip(t).map(|(&e, &x)| x.powi(e as i32)).product::<f64>())
            .sum()
    }
}

/// F₂⁽ⁿ'ᵐ⁾ coefficient grid for m ≤ 3.
pub fn expand_f2nm<S: Scalar>(p: &HGParamsF2nm, degree: usize) -> Result<MultiSeries<S>> {
    p.validate()?;
    let m = p.m();
    let mut out = MultiSeries::zeros(m, degree)?;
    let step = |l: usize, il: usize, tot: usize| -> S {
        let i = S::from_i64(il as i64);
        let mut num = S::from_f64(p.a) + S::from_i64(tot as i64);
        let mut den = S::one() + i.clone();
        if l == 0 {
            for (b, c) in p.b1row.iter().zip(&p.c1row) {
                num = num * (S::from_f64(*b) + i.clone());
                den = den * (S::from_f64(*c) + i.clone());
            }
        } else {
            num = num * (S::from_f64(p.b_rest[l - 1]) + i.clone());
            den = den * (S::from_f64(p.c_rest[l - 1]) + i);
        }
        num / den
    };
    // Walk the multi-indices in storage order; each entry is its predecessor
    // along the last nonzero axis times one ratio.
    let idxs: Vec<Vec<usize>> = out.indices().collect();
    for idx in idxs {
        let v = match idx.iter().rposition(|&e| e > 0) {
            None => S::one(),
            Some(l) => {
                let mut prev = idx.clone();
                prev[l] -= 1;
                let tot: usize = prev.iter().sum();
                out.get(&prev) * step(l, prev[l], tot)
            }
        };
        out.set(&idx, v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgseries::{coeff_f2n, HGParamsF2nm};
    use crate::scalar::Rational;

    #[test]
    fn m2_grid_matches_f2n() {
        let p = HGParamsF2nm::new(vec![0.25, 0.5], vec![0.375], 0.625, vec![1.125, 1.75], vec![1.5]).unwrap();
        let g = expand_f2nm::<Rational>(&p, 6).unwrap();
        let q = p.as_f2n().unwrap();
        for i in 0..=6 {
            for j in 0..=6 - i {
                assert_eq!(g.get(&[i, j]), coeff_f2n::<Rational>(&q, i, j).unwrap());
            }
        }
    }

    #[test]
    fn four_variables_unsupported() {
        assert!(matches!(MultiSeries::<f64>::zeros(4, 3), Err(Error::Unsupported(_))));
    }
}
