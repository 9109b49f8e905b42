use crate::error::{contract, Error, Result};
use crate::numdiff::richardson_derivative;
use crate::pfaff::PainleveParams;
use serde::{Deserialize, Serialize};

/// Step for the Richardson-extrapolated central differences of H.
pub const FD_STEP: f64 = 1e-5;

/// (qᵢ, pᵢ, q′ᵢ, p′ᵢ) and the times. The F₄ layout uses q, p of length 3 and
/// leaves qp, pp empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub qp: Vec<f64>,
    pub pp: Vec<f64>,
    pub t1: f64,
    pub t2: f64,
}

impl PhasePoint {
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Coordinates flattened as (q, p, q′, p′).
    pub fn coords(&self) -> Vec<f64> {
        [&self.q[..], &self.p, &self.qp, &self.pp].concat()
    }

    pub fn with_coords(&self, x: &[f64]) -> PhasePoint {
        let (n, m) = (self.q.len(), self.qp.len());
        PhasePoint {
            q: x[..n].to_vec(),
            p: x[n..2 * n].to_vec(),
            qp: x[2 * n..2 * n + m].to_vec(),
            pp: x[2 * n + m..].to_vec(),
            t1: self.t1,
            t2: self.t2,
        }
    }

    pub fn with_times(&self, t1: f64, t2: f64) -> PhasePoint {
        PhasePoint { t1, t2, ..self.clone() }
    }
}

/// Parameters α₀…α₅ of the four-dimensional system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PainleveParamsF4 {
    pub alpha: [f64; 6],
}

impl PainleveParamsF4 {
    pub fn new(alpha: [f64; 6]) -> Result<Self> {
        let rel = crate::pfaff::f4_relation(&alpha);
        contract(rel.abs() < 1e-12, || format!("2a0 + a1 + ... + a5 = {rel}"))?;
        Ok(PainleveParamsF4 { alpha })
    }
}

fn check_times(t1: f64, t2: f64) -> Result<()> {
    const EPS: f64 = 1e-12;
    let bad = t1.abs() < EPS || (t1 - 1.0).abs() < EPS || t2.abs() < EPS || (t2 - 1.0).abs() < EPS || (t1 - t2).abs() < EPS;
    if bad {
        Err(Error::Singular(format!("times ({t1}, {t2}) on the divisor set")))
    } else {
        Ok(())
    }
}

fn check_layout(p: &PainleveParams, pt: &PhasePoint) -> Result<()> {
    let n = p.n();
    contract(
        pt.q.len() == n && pt.p.len() == n && pt.qp.len() == n && pt.pp.len() == n,
        || format!("phase point does not have the n = {n} layout"),
    )
}

/// H₁ as a function of its arguments; H₂ is this with the arguments swapped.
#[allow(clippy::too_many_arguments)]
fn h1_form(prm: &PainleveParams, t1: f64, t2: f64, q: &[f64], p: &[f64], qp: &[f64], pp: &[f64], th1: f64, th2: f64) -> f64 {
    let n = prm.n();
    let (ka, th3) = (&prm.kappa, prm.theta3);
    let kr = |i: usize| prm.kappa[i + 1] + prm.rho[i];
    let ht = ((0..n).map(|i| q[i] * (p[i] - pp[i])).sum::<f64>() + th1) * ((0..n).map(|i| qp[i] * (pp[i] - p[i])).sum::<f64>() + th2);
    let x: Vec<f64> = (0..n).map(|i| (q[i] - 1.0) * p[i] + qp[i] * pp[i] - kr(i)).collect();
    let h1 = (x.iter().sum::<f64>() - th3) * ((0..n).map(|i| q[i] * x[i]).sum::<f64>() - th1);
    let mut h0 = ((0..n).map(|i| q[i] * p[i]).sum::<f64>() + th1) * ((0..n).map(|i| (q[i] + qp[i] - 1.0) * p[i]).sum::<f64>() + ka[0])
        - (0..n).map(|i| ka[i + 1] * q[i] * p[i]).sum::<f64>();
    for i in 0..n {
        for j in i + 1..n {
            h0 += q[i] * p[j] * ((q[i] - q[j]) * p[i] + (qp[i] - qp[j]) * pp[i] - kr(i));
        }
    }
    ht / (t1 - t2) + h1 / (t1 - 1.0) + h0 / t1
}

/// H₁ or H₂ of the 4n-dimensional system.
pub fn eval_h(prm: &PainleveParams, pt: &PhasePoint, i: usize) -> Result<f64> {
    check_layout(prm, pt)?;
    check_times(pt.t1, pt.t2)?;
    match i {
        1 => Ok(h1_form(prm, pt.t1, pt.t2, &pt.q, &pt.p, &pt.qp, &pt.pp, prm.theta1, prm.theta2)),
        2 => Ok(h1_form(prm, pt.t2, pt.t1, &pt.qp, &pt.pp, &pt.q, &pt.p, prm.theta2, prm.theta1)),
        _ => Err(Error::Contract(format!("Hamiltonian index {i} (expected 1 or 2)"))),
    }
}

fn other(i: usize) -> usize {
    if i == 1 {
        2
    } else {
        1
    }
}

/// Garnier part of the F₄-type Hamiltonian (i ∈ {1, 2}).
fn h_gar(al: &[f64; 6], t: [f64; 2], q: &[f64], p: &[f64], i: usize) -> f64 {
    let j = other(i);
    let (ti, tj) = (t[i - 1], t[j - 1]);
    let (qi, qj, pi, pj) = (q[i - 1], q[j - 1], p[i - 1], p[j - 1]);
    let [a0, _, _, a3, a4, a5] = *al;
    let quad = ti * (ti - 1.0) * pi * pi - 2.0 * ti * (tj - 1.0) * p[0] * p[1] + (ti - 1.0) * tj * pj * pj;
    qi * (qi - 1.0) * (qi - ti) * pi * pi - (al[j] + a3 - 1.0) * qi * (qi - 1.0) * pi - a4 * qi * (qi - ti) * pi
        - al[i] * (qi - 1.0) * (qi - ti) * pi
        + a0 * (a0 + a5 + 1.0) * qi
        + q[0] * q[1] * pj * (2.0 * qi * pi + qj * pj + 2.0 * a0 + a5 + 1.0)
        - q[0] * q[1] * quad / (ti - tj)
        + al[i] * ti / (ti - tj) * qj * ((ti - 1.0) * pi - (tj - 1.0) * pj)
        - al[j] * (ti - 1.0) * tj / (ti - tj) * qi * (pi - pj)
}

fn h_f4_form(al: &[f64; 6], t: [f64; 2], q: &[f64], p: &[f64], i: usize) -> f64 {
    let j = other(i);
    let (ti, tj) = (t[i - 1], t[j - 1]);
    let (t1, t2) = (t[0], t[1]);
    let (qi, qj, pi, pj) = (q[i - 1], q[j - 1], p[i - 1], p[j - 1]);
    let (q3, p3) = (q[2], p[2]);
    let [a0, a1, a2, a3, a4, a5] = *al;
    let d = if i == 2 { 1.0 } else { 0.0 };
    let quad = ti * (ti - 1.0) * pi * pi - 2.0 * ti * (tj - 1.0) * p[0] * p[1] + (ti - 1.0) * tj * pj * pj;
    h_gar(al, t, q, p, i) - (a1 - a2) * t1 / (t1 - t2) * q[1] * ((ti - 1.0) * pi - (t2 - 1.0) * pj)
        + d * (a1 - a2) * t2 * (q[1] - 1.0) * p[1]
        - (ti + 1.0) * q3 * q3 * p3 * p3
        + (a1 + a3 - 1.0 + (a1 + a4) * ti) * q3 * p3
        + qi * q3 * p3 * (2.0 * q[0] * p[0] + 2.0 * q[1] * p[1] + q3 * p3 + 2.0 * a0 + a5 + 1.0)
        + ti * qj * p3 * (q3 * p3 - a1 + a2)
        - 2.0 * (ti + 1.0) * qi * q3 * pi * p3
        - q3 * pj * (2.0 * qi * pi + qj * pj + 2.0 * q3 * p3 + 2.0 * a0 + a2 + a5 + 1.0)
        + 2.0 * ti * q3 * pi * p3
        + q3 * quad / (ti - tj)
}

/// H₁ or H₂ of the six-dimensional system attached to F₄.
pub fn eval_h_f4(prm: &PainleveParamsF4, pt: &PhasePoint, i: usize) -> Result<f64> {
    contract(pt.q.len() == 3 && pt.p.len() == 3, || "F4 phase point needs q, p of length 3".into())?;
    check_times(pt.t1, pt.t2)?;
    match i {
        1 | 2 => Ok(h_f4_form(&prm.alpha, [pt.t1, pt.t2], &pt.q, &pt.p, i)),
        _ => Err(Error::Contract(format!("Hamiltonian index {i} (expected 1 or 2)"))),
    }
}

/// Canonical equations from a Hamiltonian on the flattened coordinates:
/// q̇ = ∂H/∂p, ṗ = −∂H/∂q for each (q, p) block pair, divided by `scale`.
fn canonical(h: impl Fn(&[f64]) -> f64, x: &[f64], blocks: &[(usize, usize, usize)], scale: f64) -> Vec<f64> {
    let partial = |k: usize| {
        let f = |v: f64| {
            let mut b = x.to_vec();
            b[k] = v;
            h(&b)
        };
        richardson_derivative(f, x[k], FD_STEP)
    };
    let mut out = vec![0.0; x.len()];
    for &(qs, ps, len) in blocks {
        for k in 0..len {
            out[qs + k] = partial(ps + k) / scale;
            out[ps + k] = -partial(qs + k) / scale;
        }
    }
    out
}

/// Time derivatives (q̇, ṗ, q̇′, ṗ′) along t_i.
pub fn vector_field(prm: &PainleveParams, pt: &PhasePoint, i: usize) -> Result<Vec<f64>> {
    eval_h(prm, pt, i)?;
    let n = prm.n();
    let h = |x: &[f64]| eval_h(prm, &pt.with_coords(x), i).expect("layout checked");
    Ok(canonical(h, &pt.coords(), &[(0, n, n), (2 * n, 3 * n, n)], 1.0))
}

/// Time derivatives (q̇, ṗ) along t_i, with the tᵢ(tᵢ−1) factor divided out.
pub fn vector_field_f4(prm: &PainleveParamsF4, pt: &PhasePoint, i: usize) -> Result<Vec<f64>> {
    eval_h_f4(prm, pt, i)?;
    let ti = if i == 1 { pt.t1 } else { pt.t2 };
    let h = |x: &[f64]| eval_h_f4(prm, &pt.with_coords(x), i).expect("layout checked");
    Ok(canonical(h, &pt.coords(), &[(0, 3, 3)], ti * (ti - 1.0)))
}

/// Max-norm of the commutator of the two flows, ∂_{t₂}V₁ + (DV₁)V₂ − ∂_{t₁}V₂ − (DV₂)V₁,
/// by nested finite differences with outer step `h`.
pub fn flow_commutator(prm: &PainleveParams, pt: &PhasePoint, h: f64) -> Result<f64> {
    let v1 = vector_field(prm, pt, 1)?;
    let v2 = vector_field(prm, pt, 2)?;
    let x = pt.coords();
    // directional derivative of V_i along (∂_{t_j} + V_j)
    let along = |i: usize, dir: &[f64], dt: (f64, f64)| -> Result<Vec<f64>> {
        let at = |s: f64| -> Result<Vec<f64>> {
            let xs: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + s * d).collect();
            let p = pt.with_coords(&xs).with_times(pt.t1 + s * dt.0, pt.t2 + s * dt.1);
            vector_field(prm, &p, i)
        };
        let (ap, am, bp, bm) = (at(h)?, at(-h)?, at(h / 2.0)?, at(-h / 2.0)?);
        Ok((0..x.len()).map(|k| (4.0 * (bp[k] - bm[k]) / h - (ap[k] - am[k]) / (2.0 * h)) / 3.0).collect())
    };
    let a = along(1, &v2, (0.0, 1.0))?;
    let b = along(2, &v1, (1.0, 0.0))?;
    Ok(a.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prm() -> PainleveParams {
        PainleveParams::new(0.21, 0.34, 0.47, vec![0.13, 0.29, 0.37], vec![0.19, 0.23]).unwrap()
    }

    fn point() -> PhasePoint {
        PhasePoint { q: vec![0.4, 0.7], p: vec![0.3, -0.2], qp: vec![0.5, 0.9], pp: vec![0.15, 0.25], t1: 0.3, t2: 0.6 }
    }

    #[test]
    fn origin_values() {
        let p = prm();
        let pt = PhasePoint { q: vec![0.0; 2], p: vec![0.0; 2], qp: vec![0.0; 2], pp: vec![0.0; 2], t1: 0.3, t2: 0.6 };
        let s = p.kr_sum();
        let want = p.theta1 * p.theta2 / (0.3 - 0.6) + (-s - p.theta3) * (-p.theta1) / (0.3 - 1.0) + p.theta1 * p.kappa[0] / 0.3;
        assert!((eval_h(&p, &pt, 1).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn swap_relates_h1_and_h2() {
        let p = prm();
        let pt = point();
        let mut ps = p.clone();
        ps.theta1 = p.theta2;
        ps.theta2 = p.theta1;
        let sw = PhasePoint { q: pt.qp.clone(), p: pt.pp.clone(), qp: pt.q.clone(), pp: pt.p.clone(), t1: pt.t2, t2: pt.t1 };
        assert!((eval_h(&p, &pt, 1).unwrap() - eval_h(&ps, &sw, 2).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn f4_vanishes_at_origin() {
        let mut a = [0.2, 0.1, 0.3, 0.4, 0.0, 0.15];
        a[4] = -(2.0 * a[0] + a[1] + a[2] + a[3] + a[5]);
        let prm = PainleveParamsF4::new(a).unwrap();
        let pt = PhasePoint { q: vec![0.0; 3], p: vec![0.0; 3], qp: vec![], pp: vec![], t1: 0.2, t2: 0.7 };
        assert_eq!(eval_h_f4(&prm, &pt, 1).unwrap(), 0.0);
        assert_eq!(eval_h_f4(&prm, &pt, 2).unwrap(), 0.0);
    }

    #[test]
    fn divisor_times_rejected() {
        let mut pt = point();
        pt.t2 = pt.t1;
        assert!(matches!(eval_h(&prm(), &pt, 1), Err(Error::Singular(_))));
    }

    #[test]
    fn flows_commute() {
        let r = flow_commutator(&prm(), &point(), 1e-3).unwrap();
        assert!(r < 1e-5, "{r:e}");
    }
}
