use crate::error::{contract, Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// (θ₁, θ₂, θ₃, κ₀…κₙ, ρ₁…ρₙ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PainleveParams {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub kappa: Vec<f64>,
    pub rho: Vec<f64>,
}

impl PainleveParams {
    pub fn new(theta1: f64, theta2: f64, theta3: f64, kappa: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        contract(!rho.is_empty(), || "need n >= 1".into())?;
        contract(kappa.len() == rho.len() + 1, || format!("kappa has {} entries, expected {}", kappa.len(), rho.len() + 1))?;
        Ok(PainleveParams { theta1, theta2, theta3, kappa, rho })
    }

    pub fn n(&self) -> usize {
        self.rho.len()
    }

    /// κᵢ + ρᵢ for i = 1…n (1-based).
    pub fn kr(&self, i: usize) -> f64 {
        self.kappa[i] + self.rho[i - 1]
    }

    /// Σⱼ (κⱼ + ρⱼ).
    pub fn kr_sum(&self) -> f64 {
        (1..=self.n()).map(|i| self.kr(i)).sum()
    }
}

/// The five divisors carrying residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Divisor {
    T1Minus1,
    T1,
    T1MinusT2,
    T2Minus1,
    T2,
}

impl Divisor {
    pub const ALL: [Divisor; 5] = [Divisor::T1Minus1, Divisor::T1, Divisor::T1MinusT2, Divisor::T2Minus1, Divisor::T2];

    pub fn label(self) -> &'static str {
        match self {
            Divisor::T1Minus1 => "t1-1",
            Divisor::T1 => "t1",
            Divisor::T1MinusT2 => "t1-t2",
            Divisor::T2Minus1 => "t2-1",
            Divisor::T2 => "t2",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectionKind {
    Main,
    Degenerate,
    F4,
    Custom,
}

/// d𝐰 = Σ A_D dlog D · 𝐰 over the five divisors.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConnection {
    pub kind: ConnectionKind,
    dim: usize,
    residues: [DMatrix<f64>; 5],
}

impl LogConnection {
    pub fn new(kind: ConnectionKind, residues: [DMatrix<f64>; 5]) -> Result<Self> {
        let dim = residues[0].nrows();
        for r in &residues {
            contract(r.nrows() == dim && r.ncols() == dim, || "residues must be square and of equal size".into())?;
        }
        Ok(LogConnection { kind, dim, residues })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn residue(&self, d: Divisor) -> &DMatrix<f64> {
        &self.residues[d.slot()]
    }

    pub fn residue_mut(&mut self, d: Divisor) -> &mut DMatrix<f64> {
        &mut self.residues[d.slot()]
    }

    /// Copy with every residue multiplied by λ.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mut c = self.clone();
        for r in c.residues.iter_mut() {
            *r *= lambda;
        }
        c
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = |m: &DMatrix<f64>| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<f64>>()).collect::<Vec<_>>()
        };
        let mut res = serde_json::Map::new();
        for d in Divisor::ALL {
            res.insert(d.label().into(), serde_json::json!(rows(self.residue(d))));
        }
        serde_json::json!({ "kind": format!("{:?}", self.kind), "dim": self.dim, "residues": res })
    }
}

/// Rejects points on t₁ ∈ {0, 1}, t₂ ∈ {0, 1} or t₁ = t₂.
pub fn check_off_divisors(t1: f64, t2: f64, margin: f64) -> Result<()> {
    let d = [t1, t1 - 1.0, t2, t2 - 1.0, t1 - t2].iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if d < margin {
        Err(Error::Singular(format!("({t1}, {t2}) is within {d:e} of a divisor")))
    } else {
        Ok(())
    }
}

/// (M1, M2) with d𝐰 = (M1 dt₁ + M2 dt₂)𝐰.
pub fn matrices_at(conn: &LogConnection, t1: f64, t2: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_off_divisors(t1, t2, 1e-14)?;
    let at = conn.residue(Divisor::T1MinusT2);
    let m1 = conn.residue(Divisor::T1Minus1) / (t1 - 1.0) + conn.residue(Divisor::T1) / t1 + at / (t1 - t2);
    let m2 = conn.residue(Divisor::T2Minus1) / (t2 - 1.0) + conn.residue(Divisor::T2) / t2 + at / (t2 - t1);
    Ok((m1, m2))
}

/// max-norm of ∂₂M1 − ∂₁M2 + [M1, M2], with the derivatives in closed form:
/// ∂₂M1 = A_t/(t₁−t₂)², ∂₁M2 = A_t/(t₂−t₁)². They cancel, leaving the commutator.
pub fn flatness_residual(conn: &LogConnection, t1: f64, t2: f64) -> Result<f64> {
    let (m1, m2) = matrices_at(conn, t1, t2)?;
    let at = conn.residue(Divisor::T1MinusT2);
    let d2m1 = at / (t1 - t2).powi(2);
    let d1m2 = at / (t2 - t1).powi(2);
    let r = d2m1 - d1m2 + &m1 * &m2 - &m2 * &m1;
    Ok(r.amax())
}

fn e(d: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    m[(i, j)] = 1.0;
    m
}

/// The (2n+1)-dimensional connection, indices 0 (w₀), 1…n (wᵢ), n+1…2n (w′ᵢ).
pub fn build_connection_main(p: &PainleveParams) -> LogConnection {
    let n = p.n();
    let d = 2 * n + 1;
    let (th2, th3) = (p.theta2, p.theta3);
    let r = |i: usize| p.rho[i - 1];
    let kr = |i: usize| p.kr(i);

    let mut a11 = e(d, 0, 0) * th3;
    for j in 1..=n {
        a11 += e(d, 0, j);
    }
    for i in 1..=n {
        a11 += e(d, i, 0) * (th3 * kr(i));
        for j in 1..=n {
            a11 += e(d, i, j) * kr(i);
        }
    }

    let mut a01 = e(d, 0, 0) * (p.kappa[0] + r(1));
    for j in 1..=n {
        a01 -= e(d, 0, j) + e(d, 0, n + j);
    }
    for i in 1..=n {
        a01 += e(d, i, i) * (r(1) - r(i)) + e(d, n + i, n + i) * (r(1) - r(i));
        for j in i + 1..=n {
            a01 -= e(d, i, j) * kr(i) + e(d, n + i, n + j) * kr(i);
        }
    }

    let mut at = e(d, 0, 0) * th2;
    for j in 1..=n {
        at += e(d, 0, n + j);
    }
    for i in 1..=n {
        at += e(d, n + i, 0) * (th2 * kr(i));
        for j in 1..=n {
            at += e(d, n + i, n + j) * kr(i);
        }
    }

    let mut a12 = DMatrix::zeros(d, d);
    for i in 1..=n {
        a12 += e(d, i, i) * th2 - e(d, i, n + i) * th3 - e(d, n + i, i) * th2 + e(d, n + i, n + i) * th3;
    }

    let mut a02 = DMatrix::zeros(d, d);
    for i in 1..=n {
        a02 += e(d, n + i, i) * th2 - e(d, n + i, 0) * (th2 * kr(i)) + e(d, n + i, n + i) * (th2 + p.kappa[0] - p.kappa[i]);
        for j in 1..i {
            a02 -= e(d, n + i, n + j) * kr(i);
        }
    }
    LogConnection::new(ConnectionKind::Main, [a11, a01, at, a12, a02]).expect("square by construction")
}

/// The 2n-dimensional connection for κ₀ = κ₁, indices 0 (w₀), 1…n (wᵢ),
/// n+1…2n−1 (w′₂…w′ₙ).
pub fn build_connection_degenerate(p: &PainleveParams) -> Result<LogConnection> {
    contract((p.kappa[0] - p.kappa[1]).abs() < 1e-12, || format!("kappa0 = {} differs from kappa1 = {}", p.kappa[0], p.kappa[1]))?;
    let n = p.n();
    let d = 2 * n;
    let (th2, th3) = (p.theta2, p.theta3);
    let r = |i: usize| p.rho[i - 1];
    let kr = |i: usize| p.kr(i);
    let g = th2 + kr(1);

    let mut a11 = e(d, 0, 0) * th3;
    for j in 1..=n {
        a11 += e(d, 0, j);
    }
    for i in 1..=n {
        a11 += e(d, i, 0) * (th3 * kr(i));
        for j in 1..=n {
            a11 += e(d, i, j) * kr(i);
        }
    }

    let mut a01 = DMatrix::zeros(d, d);
    for j in 2..=n {
        a01 -= e(d, 0, j);
    }
    for j in 1..n {
        a01 -= e(d, 0, n + j);
    }
    for i in 1..=n {
        a01 += e(d, i, i) * (r(1) - r(i));
        for j in i + 1..=n {
            a01 -= e(d, i, j) * kr(i);
        }
    }
    for i in 1..n {
        a01 += e(d, n + i, n + i) * (r(1) - r(i + 1));
        for j in i + 1..n {
            a01 -= e(d, n + i, n + j) * kr(i + 1);
        }
    }

    let mut at = e(d, 0, 0) * g - e(d, 0, 1);
    for j in 1..n {
        at += e(d, 0, n + j);
    }
    for i in 1..n {
        at += e(d, n + i, 0) * (g * kr(i + 1)) - e(d, n + i, 1) * kr(i + 1);
        for j in 1..n {
            at += e(d, n + i, n + j) * kr(i + 1);
        }
    }

    let mut a12 = e(d, 1, 1) * (th2 + th3) - e(d, 1, 0) * (th3 * kr(1));
    for i in 1..n {
        a12 += e(d, i + 1, i + 1) * th2 - e(d, i + 1, n + i) * th3 - e(d, n + i, i + 1) * th2 + e(d, n + i, n + i) * th3;
    }

    let mut a02 = DMatrix::zeros(d, d);
    for i in 1..n {
        a02 += e(d, n + i, 1) * kr(i + 1) - e(d, n + i, 0) * (g * kr(i + 1)) + e(d, n + i, i + 1) * th2;
        a02 += e(d, n + i, n + i) * (th2 + p.kappa[1] - p.kappa[i + 1]);
        for j in 1..i {
            a02 -= e(d, n + i, n + j) * kr(i + 1);
        }
    }
    LogConnection::new(ConnectionKind::Degenerate, [a11, a01, at, a12, a02])
}

/// Relation 2α₀ + α₁ + … + α₅ = 0.
pub fn f4_relation(alpha: &[f64; 6]) -> f64 {
    2.0 * alpha[0] + alpha[1..].iter().sum::<f64>()
}

/// Swap of indices 1 and 2 (0-based), i.e. conjugation by E₂₃.
pub fn e23_conjugate(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    out.swap_rows(1, 2);
    out.swap_columns(1, 2);
    out
}

/// The 4×4 connection; the t₂ residues are E₂₃-conjugates of the t₁ ones.
pub fn build_connection_f4(alpha: &[f64; 6]) -> Result<LogConnection> {
    let rel = f4_relation(alpha);
    contract(rel.abs() < 1e-12, || format!("2a0 + a1 + ... + a5 = {rel}"))?;
    let [a0, _, a2, a3, _, a5] = *alpha;
    #[rustfmt::skip]
    let a11 = DMatrix::from_row_slice(4, 4, &[
        -(a0 + a5 + 1.0), -1.0, 0.0, 0.0,
        a0 * (a0 + a5 + 1.0), a0, 0.0, 0.0,
        0.0, 0.0, -(a0 + a2 + a5 + 1.0), -1.0,
        0.0, 0.0, (a0 + a2) * (a0 + a2 + a5 + 1.0), a0 + a2,
    ]);
    #[rustfmt::skip]
    let a01 = DMatrix::from_row_slice(4, 4, &[
        -a3, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
        0.0, a2, -a3, 1.0,
        0.0, 0.0, 0.0, 0.0,
    ]);
    #[rustfmt::skip]
    let at = DMatrix::from_row_slice(4, 4, &[
        0.0, 0.0, 0.0, 0.0,
        0.0, a2, -a2, 0.0,
        0.0, -a2, a2, 0.0,
        0.0, 0.0, 0.0, 0.0,
    ]);
    let a12 = e23_conjugate(&a11);
    let a02 = e23_conjugate(&a01);
    LogConnection::new(ConnectionKind::F4, [a11, a01, at, a12, a02])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(n: usize) -> PainleveParams {
        let kappa = (0..=n).map(|i| 0.11 + 0.07 * i as f64).collect();
        let rho = (0..n).map(|i| 0.23 + 0.05 * i as f64).collect();
        PainleveParams::new(0.17, 0.31, 0.43, kappa, rho).unwrap()
    }

    #[test]
    fn main_n1_a11_by_hand() {
        let p = PainleveParams::new(0.0, 0.5, 2.0, vec![0.1, 0.5], vec![0.25]).unwrap();
        let c = build_connection_main(&p);
        let want = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.5, 0.75, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.residue(Divisor::T1Minus1), &want);
        let a12 = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.5, -2.0, 0.0, -0.5, 2.0]);
        assert_eq!(c.residue(Divisor::T2Minus1), &a12);
    }

    #[test]
    fn degenerate_n2_at_row0() {
        let mut p = pp(2);
        p.kappa[0] = p.kappa[1];
        let c = build_connection_degenerate(&p).unwrap();
        assert_eq!(c.dim(), 4);
        let at = c.residue(Divisor::T1MinusT2);
        let g = p.theta2 + p.kr(1);
        assert_eq!((at[(0, 0)], at[(0, 1)], at[(0, 2)], at[(0, 3)]), (g, -1.0, 0.0, 1.0));
        p.kappa[0] += 0.1;
        assert!(build_connection_degenerate(&p).is_err());
    }

    #[test]
    fn flat_at_a_point() {
        for n in 1..=3 {
            let c = build_connection_main(&pp(n));
            assert!(flatness_residual(&c, 0.3, -0.7).unwrap() < 1e-12);
        }
    }

    #[test]
    fn f4_relation_enforced() {
        let mut a = [0.2, 0.0, 0.3, 0.4, 0.0, 0.1];
        a[4] = -(2.0 * a[0] + a[2] + a[3] + a[5]);
        assert!(build_connection_f4(&a).is_ok());
        a[1] = 0.1;
        assert!(build_connection_f4(&a).is_err());
    }

    #[test]
    fn divisor_points_rejected() {
        let c = build_connection_main(&pp(1));
        assert!(matches!(matrices_at(&c, 0.4, 0.4), Err(Error::Singular(_))));
        assert!(matches!(matrices_at(&c, 1.0, 0.4), Err(Error::Singular(_))));
    }
}
