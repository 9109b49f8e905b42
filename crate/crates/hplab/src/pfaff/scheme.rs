use super::connection::{Divisor, LogConnection, PainleveParams};
use nalgebra::DMatrix;
use serde::Serialize;

pub const COLUMN_LABELS: [&str; 7] = ["t1=1", "t1=0", "t1=inf", "t1=t2", "t2=1", "t2=0", "t2=inf"];

/// Column indices belonging to each variable; t₁ = t₂ sits in both.
pub const T1_COLUMNS: [usize; 4] = [0, 1, 2, 3];
pub const T2_COLUMNS: [usize; 4] = [3, 4, 5, 6];

/// Per column, a list of (eigenvalue, multiplicity).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiemannScheme {
    pub columns: Vec<Vec<(f64, usize)>>,
}

impl RiemannScheme {
    pub fn column(&self, label: &str) -> Option<&[(f64, usize)]> {
        COLUMN_LABELS.iter().position(|l| *l == label).map(|k| self.columns[k].as_slice())
    }

    pub fn multiplicity_total(&self, k: usize) -> usize {
        self.columns[k].iter().map(|c| c.1).sum()
    }

    /// Σ eigenvalue × multiplicity over the given columns.
    pub fn weighted_sum(&self, cols: &[usize]) -> f64 {
        cols.iter().flat_map(|&k| self.columns[k].iter()).map(|(v, m)| v * *m as f64).sum()
    }
}

fn residue_columns(conn: &LogConnection) -> [DMatrix<f64>; 7] {
    let a11 = conn.residue(Divisor::T1Minus1).clone();
    let a01 = conn.residue(Divisor::T1).clone();
    let at = conn.residue(Divisor::T1MinusT2).clone();
    let a12 = conn.residue(Divisor::T2Minus1).clone();
    let a02 = conn.residue(Divisor::T2).clone();
    let inf1 = -(&a11 + &a01 + &at);
    let inf2 = -(&a12 + &a02 + &at);
    [a11, a01, inf1, at, a12, a02, inf2]
}

/// Real parts of the eigenvalues (the schemes here are real). Defective
/// eigenvalues come back split by ~ε^{1/k}; clustering absorbs that.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Groups sorted values whose neighbours lie within `tol`; each group is
/// reported by its mean, which is far better conditioned than its members.
pub fn cluster(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((sum, k, last)) if (v - *last).abs() <= tol => {
                *sum += v;
                *k += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(s, k, _)| (s / k as f64, k)).collect()
}

/// Clustering radius for repeated eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-8;

pub fn riemann_scheme(conn: &LogConnection) -> RiemannScheme {
    let columns = residue_columns(conn).iter().map(|m| cluster(&eigenvalues(m), CLUSTER_TOL)).collect();
    RiemannScheme { columns }
}

fn merge(entries: Vec<(f64, usize)>) -> Vec<(f64, usize)> {
    let mut v: Vec<(f64, usize)> = entries.into_iter().filter(|e| e.1 > 0).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for (x, m) in v {
        match out.last_mut() {
            Some((y, k)) if (x - *y).abs() <= 1e-12 => *k += m,
            _ => out.push((x, m)),
        }
    }
    out
}

/// Symbolic scheme of the (2n+1)-dimensional connection.
pub fn expected_scheme_main(p: &PainleveParams) -> RiemannScheme {
    let n = p.n();
    let s = p.kr_sum();
    let (th2, th3) = (p.theta2, p.theta3);
    let r1 = p.rho[0];
    let c11 = vec![(0.0, 2 * n), (th3 + s, 1)];
    let mut c01 = vec![(0.0, 2), (p.kappa[0] + r1, 1)];
    c01.extend((2..=n).map(|i| (r1 - p.rho[i - 1], 2)));
    let mut cinf1: Vec<(f64, usize)> = (1..=n).map(|i| (-p.kappa[i] - r1, 2)).collect();
    cinf1.push((-th2 - th3 - p.kappa[0] - r1, 1));
    let ct = vec![(0.0, 2 * n), (th2 + s, 1)];
    let c12 = vec![(0.0, n + 1), (th2 + th3, n)];
    let mut c02 = vec![(0.0, n + 1)];
    c02.extend((1..=n).map(|i| (th2 + p.kappa[0] - p.kappa[i], 1)));
    let mut cinf2 = vec![(-th2, n + 1)];
    cinf2.extend((1..=n).map(|i| (-th2 - th3 - p.kappa[0] - p.rho[i - 1], 1)));
    RiemannScheme { columns: [c11, c01, cinf1, ct, c12, c02, cinf2].into_iter().map(merge).collect() }
}

/// Symbolic scheme of the 2n-dimensional connection (κ₀ = κ₁).
pub fn expected_scheme_degenerate(p: &PainleveParams) -> RiemannScheme {
    let n = p.n();
    let s = p.kr_sum();
    let (th2, th3, k1) = (p.theta2, p.theta3, p.kappa[1]);
    let r1 = p.rho[0];
    let c11 = vec![(0.0, 2 * n - 1), (th3 + s, 1)];
    let mut c01 = vec![(0.0, 2)];
    c01.extend((2..=n).map(|i| (r1 - p.rho[i - 1], 2)));
    let mut cinf1: Vec<(f64, usize)> = (2..=n).map(|i| (-p.kappa[i] - r1, 2)).collect();
    cinf1.push((-k1 - r1, 1));
    cinf1.push((-th2 - th3 - k1 - r1, 1));
    let ct = vec![(0.0, 2 * n - 1), (th2 + s, 1)];
    let c12 = vec![(0.0, n), (th2 + th3, n)];
    let mut c02 = vec![(0.0, n + 1)];
    c02.extend((2..=n).map(|i| (th2 + k1 - p.kappa[i], 1)));
    let mut cinf2 = vec![(-th2, n)];
    cinf2.extend((1..=n).map(|i| (-th2 - th3 - k1 - p.rho[i - 1], 1)));
    RiemannScheme { columns: [c11, c01, cinf1, ct, c12, c02, cinf2].into_iter().map(merge).collect() }
}

/// Symbolic scheme of the 4×4 connection.
pub fn expected_scheme_f4(alpha: &[f64; 6]) -> RiemannScheme {
    let [a0, _, a2, a3, _, a5] = *alpha;
    let c1 = vec![(-a5 - 1.0, 2), (0.0, 2)];
    let c0 = vec![(-a3, 2), (0.0, 2)];
    let cinf = vec![(a0 + a3 + a5 + 1.0, 2), (-a0 - a2, 2)];
    let ct = vec![(2.0 * a2, 1), (0.0, 3)];
    let cols = vec![c1.clone(), c0.clone(), cinf.clone(), ct, c1, c0, cinf];
    RiemannScheme { columns: cols.into_iter().map(merge).collect() }
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnCheck {
    pub label: String,
    pub expected: Vec<(f64, usize)>,
    pub actual: Vec<(f64, usize)>,
    /// Largest |λ_expected − λ_actual| over cluster means, counted per eigenvalue.
    pub max_deviation: f64,
    pub multiplicities_match: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeReport {
    pub columns: Vec<ColumnCheck>,
    /// Σ eigenvalue × multiplicity over the t₁ columns and over the t₂ columns.
    pub trace_t1: f64,
    pub trace_t2: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SchemeReport {
    pub fn max_deviation(&self) -> f64 {
        self.columns.iter().map(|c| c.max_deviation).fold(0.0, f64::max).max(self.trace_t1.abs()).max(self.trace_t2.abs())
    }
}

fn expand(col: &[(f64, usize)]) -> Vec<f64> {
    let mut v: Vec<f64> = col.iter().flat_map(|(x, m)| std::iter::repeat_n(*x, *m)).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Compares the numeric scheme of `conn` with `expected`, column by column,
/// as multisets within `tol`.
pub fn verify_scheme(conn: &LogConnection, expected: &RiemannScheme, tol: f64) -> SchemeReport {
    let actual = riemann_scheme(conn);
    let columns: Vec<ColumnCheck> = (0..7)
        .map(|k| {
            let (e, a) = (&expected.columns[k], &actual.columns[k]);
            let (ev, av) = (expand(e), expand(a));
            let max_deviation = if ev.len() == av.len() {
                ev.iter().zip(&av).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            // cluster means, both lists sorted by value
            let mut multiplicities_match = e.len() == a.len();
            if multiplicities_match {
                for ((x, m), (y, k)) in e.iter().zip(a) {
                    if m != k || (x - y).abs() > tol {
                        multiplicities_match = false;
                    }
                }
            }
            ColumnCheck {
                label: COLUMN_LABELS[k].into(),
                expected: e.clone(),
                actual: a.clone(),
                max_deviation,
                multiplicities_match,
                pass: multiplicities_match && max_deviation <= tol,
            }
        })
        .collect();
    let trace_t1 = actual.weighted_sum(&T1_COLUMNS);
    let trace_t2 = actual.weighted_sum(&T2_COLUMNS);
    let pass = columns.iter().all(|c| c.pass) && trace_t1.abs() < tol && trace_t2.abs() < tol;
    SchemeReport { columns, trace_t1, trace_t2, tolerance: tol, pass }
}

#[cfg(test)]
mod tests {
    use super::super::connection::*;
    use super::*;

    #[test]
    fn main_n1_t1_is_one_column() {
        let p = PainleveParams::new(0.0, 0.45, 0.3, vec![0.35, 0.2], vec![0.1]).unwrap();
        let s = riemann_scheme(&build_connection_main(&p));
        let col = s.column("t1=1").unwrap();
        assert_eq!(col.len(), 2);
        assert!(col[0].0.abs() < 1e-12 && col[0].1 == 2);
        assert!((col[1].0 - 0.6).abs() < 1e-12);
    }

    #[test]
    fn clustering_groups_close_values() {
        let c = cluster(&[0.0, 1e-9, 0.5, 0.5 + 2e-7, 1.0], 1e-6);
        assert_eq!(c.iter().map(|x| x.1).collect::<Vec<_>>(), vec![2, 2, 1]);
    }

    #[test]
    fn main_and_degenerate_draws_match() {
        let mut s = crate::sampling::Sampler::new(11);
        for draw in 0..20 {
            let n = 1 + draw % 3;
            let mut p = PainleveParams::new(s.param(), s.param(), s.param(), s.params(n + 1), s.params(n)).unwrap();
            let r = verify_scheme(&build_connection_main(&p), &expected_scheme_main(&p), 1e-10);
            assert!(r.pass, "main {draw}: {r:#?}");
            p.kappa[0] = p.kappa[1];
            let r = verify_scheme(&build_connection_degenerate(&p).unwrap(), &expected_scheme_degenerate(&p), 1e-10);
            assert!(r.pass, "degenerate {draw}: {r:#?}");
        }
    }

    #[test]
    fn f4_scheme_matches() {
        let mut a = [0.21, 0.0, 0.33, 0.17, 0.0, 0.41];
        a[4] = -(2.0 * a[0] + a[2] + a[3] + a[5]);
        let r = verify_scheme(&build_connection_f4(&a).unwrap(), &expected_scheme_f4(&a), 1e-10);
        assert!(r.pass, "{r:#?}");
    }
}
