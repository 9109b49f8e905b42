use super::hamiltonian::{vector_field, vector_field_f4, PainleveParamsF4, PhasePoint};
use crate::error::{Error, Result};
use crate::pfaff::{build_connection_degenerate, build_connection_f4, build_connection_main, matrices_at, PainleveParams};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Tolerance for "the point lies on the manifold".
pub const ON_MANIFOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Manifold {
    /// qᵢpᵢ = κᵢ+ρᵢ, p′ᵢ = 0, θ₁ + Σ(κⱼ+ρⱼ) = 0.
    F2,
    /// pᵢ = p′ᵢ = 0, θ₃ + Σ(κⱼ+ρⱼ) = 0.
    F1,
    /// q′₁ = 1 − q₁, p′₁ = 0, κ₀ = κ₁, together with the F2 constraints.
    Deg,
}

/// Values of the constraint functions (all zero on the manifold),
/// parameter relations first.
pub fn constraint_values(prm: &PainleveParams, pt: &PhasePoint, which: Manifold) -> Vec<f64> {
    let n = prm.n();
    let s = prm.kr_sum();
    match which {
        Manifold::F2 => {
            let mut v = vec![prm.theta1 + s];
            v.extend((0..n).map(|i| pt.q[i] * pt.p[i] - prm.kr(i + 1)));
            v.extend(pt.pp.iter().copied());
            v
        }
        Manifold::F1 => {
            let mut v = vec![prm.theta3 + s];
            v.extend(pt.p.iter().copied());
            v.extend(pt.pp.iter().copied());
            v
        }
        Manifold::Deg => {
            let mut v = vec![prm.kappa[0] - prm.kappa[1], prm.theta1 + s, pt.qp[0] + pt.q[0] - 1.0, pt.pp[0]];
            v.extend((0..n).map(|i| pt.q[i] * pt.p[i] - prm.kr(i + 1)));
            v.extend(pt.pp[1..].iter().copied());
            v
        }
    }
}

pub fn check_on_manifold(prm: &PainleveParams, pt: &PhasePoint, which: Manifold) -> Result<()> {
    let worst = constraint_values(prm, pt, which).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > ON_MANIFOLD_TOL {
        Err(Error::Contract(format!("point is off the {which:?} manifold (constraint value {worst:e})")))
    } else {
        Ok(())
    }
}

/// Flow derivatives of the coordinate constraints, for t₁ then t₂.
fn drift_unchecked(prm: &PainleveParams, pt: &PhasePoint, which: Manifold) -> Result<Vec<f64>> {
    let n = prm.n();
    let mut out = Vec::new();
    for i in 1..=2 {
        let v = vector_field(prm, pt, i)?;
        let (dq, dp, dqp, dpp) = (&v[..n], &v[n..2 * n], &v[2 * n..3 * n], &v[3 * n..]);
        let qp_rate = |k: usize| dq[k] * pt.p[k] + pt.q[k] * dp[k];
        match which {
            Manifold::F2 => {
                out.extend((0..n).map(qp_rate));
                out.extend_from_slice(dpp);
            }
            Manifold::F1 => {
                out.extend_from_slice(dp);
                out.extend_from_slice(dpp);
            }
            Manifold::Deg => {
                out.push(dqp[0] + dq[0]);
                out.push(dpp[0]);
                out.extend((0..n).map(qp_rate));
                out.extend_from_slice(&dpp[1..]);
            }
        }
    }
    Ok(out)
}

/// Time derivatives of every constraint along both flows at an on-manifold point.
pub fn constraint_drift(prm: &PainleveParams, pt: &PhasePoint, which: Manifold) -> Result<Vec<f64>> {
    check_on_manifold(prm, pt, which)?;
    drift_unchecked(prm, pt, which)
}

/// Same as `constraint_drift` without the manifold check, for negative controls.
pub fn constraint_drift_unchecked(prm: &PainleveParams, pt: &PhasePoint, which: Manifold) -> Result<Vec<f64>> {
    drift_unchecked(prm, pt, which)
}

/// ∂log w₀/∂t₁, ∂log w₀/∂t₂ and the coefficients they are assembled from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDeriv {
    pub d1: f64,
    pub d2: f64,
    /// Main/degenerate: coefficients of dlog(t₁−1), dlog t₁, dlog(t₁−t₂).
    /// F₄: coefficients of dlog(t₁−1), dlog t₁, dlog(t₂−1), dlog t₂.
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum W0Kind {
    Main,
    Deg,
}

pub fn w0_logderiv(prm: &PainleveParams, pt: &PhasePoint, which: W0Kind) -> LogDeriv {
    let n = prm.n();
    let (t1, t2) = (pt.t1, pt.t2);
    let psum: f64 = pt.p.iter().sum();
    let c1 = psum + prm.theta3;
    let (c0, ct) = match which {
        W0Kind::Main => (
            (0..n).map(|j| (pt.qp[j] - 1.0) * pt.p[j]).sum::<f64>() + prm.kappa[0] + prm.rho[0],
            -(0..n).map(|j| pt.qp[j] * pt.p[j]).sum::<f64>() + prm.theta2,
        ),
        W0Kind::Deg => (
            -pt.q[0] * pt.p[0] + (1..n).map(|j| (pt.qp[j] - 1.0) * pt.p[j]).sum::<f64>() + prm.kappa[1] + prm.rho[0],
            (pt.q[0] - 1.0) * pt.p[0] - (1..n).map(|j| pt.qp[j] * pt.p[j]).sum::<f64>() + prm.theta2,
        ),
    };
    LogDeriv { d1: c1 / (t1 - 1.0) + c0 / t1 + ct / (t1 - t2), d2: -ct / (t1 - t2), coeffs: vec![c1, c0, ct] }
}

pub fn w0_logderiv_f4(prm: &PainleveParamsF4, pt: &PhasePoint) -> LogDeriv {
    let [a0, _, _, a3, _, a5] = prm.alpha;
    let c = |k: usize| pt.p[k] - (a0 + a5 + 1.0);
    LogDeriv {
        d1: c(0) / (pt.t1 - 1.0) - a3 / pt.t1,
        d2: c(1) / (pt.t2 - 1.0) - a3 / pt.t2,
        coeffs: vec![c(0), -a3, c(1), -a3],
    }
}

fn max_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax()
}

/// ẇ − M·w for w = w₀·(1, pᵢ, −q′ᵢpᵢ) with w₀ = 1 at the point; no manifold check.
pub fn reduction_residual(prm: &PainleveParams, pt: &PhasePoint) -> Result<f64> {
    let n = prm.n();
    let conn = build_connection_main(prm);
    let (m1, m2) = matrices_at(&conn, pt.t1, pt.t2)?;
    let ld = w0_logderiv(prm, pt, W0Kind::Main);
    let mut r = vec![1.0];
    r.extend_from_slice(&pt.p);
    r.extend((0..n).map(|k| -pt.qp[k] * pt.p[k]));
    let r = DVector::from_vec(r);
    let mut worst = 0.0f64;
    for (i, m, l) in [(1, &m1, ld.d1), (2, &m2, ld.d2)] {
        let v = vector_field(prm, pt, i)?;
        let (dp, dqp) = (&v[n..2 * n], &v[2 * n..3 * n]);
        let mut dr = vec![0.0];
        dr.extend_from_slice(dp);
        dr.extend((0..n).map(|k| -(dqp[k] * pt.p[k] + pt.qp[k] * dp[k])));
        let lhs = DVector::from_vec(dr) + &r * l;
        worst = worst.max(max_diff(&lhs, &(m * &r)));
    }
    Ok(worst)
}

/// Reduction check on the F2 manifold against the (2n+1)-dimensional connection.
pub fn verify_reduction(prm: &PainleveParams, pt: &PhasePoint) -> Result<f64> {
    check_on_manifold(prm, pt, Manifold::F2)?;
    reduction_residual(prm, pt)
}

/// As `reduction_residual` on the degenerate manifold, against the 2n-dimensional
/// connection, with w = w₀·(1, pᵢ, −q′ᵢpᵢ for i ≥ 2).
pub fn reduction_residual_deg(prm: &PainleveParams, pt: &PhasePoint) -> Result<f64> {
    let n = prm.n();
    let conn = build_connection_degenerate(prm)?;
    let (m1, m2) = matrices_at(&conn, pt.t1, pt.t2)?;
    let ld = w0_logderiv(prm, pt, W0Kind::Deg);
    let mut r = vec![1.0];
    r.extend_from_slice(&pt.p);
    r.extend((1..n).map(|k| -pt.qp[k] * pt.p[k]));
    let r = DVector::from_vec(r);
    let mut worst = 0.0f64;
    for (i, m, l) in [(1, &m1, ld.d1), (2, &m2, ld.d2)] {
        let v = vector_field(prm, pt, i)?;
        let (dp, dqp) = (&v[n..2 * n], &v[2 * n..3 * n]);
        let mut dr = vec![0.0];
        dr.extend_from_slice(dp);
        dr.extend((1..n).map(|k| -(dqp[k] * pt.p[k] + pt.qp[k] * dp[k])));
        let lhs = DVector::from_vec(dr) + &r * l;
        worst = worst.max(max_diff(&lhs, &(m * &r)));
    }
    Ok(worst)
}

pub fn verify_reduction_deg(prm: &PainleveParams, pt: &PhasePoint) -> Result<f64> {
    check_on_manifold(prm, pt, Manifold::Deg)?;
    reduction_residual_deg(prm, pt)
}

/// q₁ = q₂ = q₃ = 0 and α₁ = 0.
pub fn check_on_f4_manifold(prm: &PainleveParamsF4, pt: &PhasePoint) -> Result<()> {
    let worst = pt.q.iter().chain([&prm.alpha[1]]).fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > ON_MANIFOLD_TOL {
        Err(Error::Contract(format!("point is off the F4 manifold (constraint value {worst:e})")))
    } else {
        Ok(())
    }
}

/// q̇ along both flows at an on-manifold point.
pub fn constraint_drift_f4(prm: &PainleveParamsF4, pt: &PhasePoint) -> Result<Vec<f64>> {
    check_on_f4_manifold(prm, pt)?;
    let mut out = Vec::new();
    for i in 1..=2 {
        out.extend_from_slice(&vector_field_f4(prm, pt, i)?[..3]);
    }
    Ok(out)
}

/// w/w₀ = (1, −t₁p₁, −t₂p₂, t₁t₂(p₁p₂ − α₂p₃)) pushed through both flows; no manifold check.
pub fn reduction_residual_f4(prm: &PainleveParamsF4, pt: &PhasePoint) -> Result<f64> {
    let conn = build_connection_f4(&prm.alpha)?;
    let (m1, m2) = matrices_at(&conn, pt.t1, pt.t2)?;
    let a2 = prm.alpha[2];
    let (t1, t2) = (pt.t1, pt.t2);
    let (p1, p2, p3) = (pt.p[0], pt.p[1], pt.p[2]);
    let g = p1 * p2 - a2 * p3;
    let r = DVector::from_vec(vec![1.0, -t1 * p1, -t2 * p2, t1 * t2 * g]);
    let ld = w0_logderiv_f4(prm, pt);
    let mut worst = 0.0f64;
    for (i, m, l) in [(1, &m1, ld.d1), (2, &m2, ld.d2)] {
        let v = vector_field_f4(prm, pt, i)?;
        let (d1, d2, d3) = (v[3], v[4], v[5]);
        let dg = d1 * p2 + p1 * d2 - a2 * d3;
        let dr = if i == 1 {
            vec![0.0, -p1 - t1 * d1, -t2 * d2, t2 * g + t1 * t2 * dg]
        } else {
            vec![0.0, -t1 * d1, -p2 - t2 * d2, t1 * g + t1 * t2 * dg]
        };
        let lhs = DVector::from_vec(dr) + &r * l;
        worst = worst.max(max_diff(&lhs, &(m * &r)));
    }
    Ok(worst)
}

pub fn verify_reduction_f4(prm: &PainleveParamsF4, pt: &PhasePoint) -> Result<f64> {
    check_on_f4_manifold(prm, pt)?;
    reduction_residual_f4(prm, pt)
}

/// A point on the named manifold from free coordinates: q and q′ as given, p
/// and p′ forced; the parameter relation is imposed on a copy of `prm`.
pub fn project_to_manifold(prm: &PainleveParams, pt: &PhasePoint, which: Manifold) -> (PainleveParams, PhasePoint) {
    let n = prm.n();
    let mut p = prm.clone();
    let mut x = pt.clone();
    match which {
        Manifold::F2 => {
            p.theta1 = -p.kr_sum();
            for i in 0..n {
                x.p[i] = p.kr(i + 1) / x.q[i];
                x.pp[i] = 0.0;
            }
        }
        Manifold::F1 => {
            p.theta3 = -p.kr_sum();
            x.p.iter_mut().for_each(|v| *v = 0.0);
            x.pp.iter_mut().for_each(|v| *v = 0.0);
        }
        Manifold::Deg => {
            p.kappa[0] = p.kappa[1];
            p.theta1 = -p.kr_sum();
            x.qp[0] = 1.0 - x.q[0];
            for i in 0..n {
                x.p[i] = p.kr(i + 1) / x.q[i];
                x.pp[i] = 0.0;
            }
        }
    }
    (p, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(n: usize) -> (PainleveParams, PhasePoint) {
        let kappa = (0..=n).map(|i| 0.13 + 0.08 * i as f64).collect();
        let rho = (0..n).map(|i| 0.19 + 0.04 * i as f64).collect();
        let prm = PainleveParams::new(0.21, 0.34, 0.47, kappa, rho).unwrap();
        let pt = PhasePoint {
            q: (0..n).map(|i| 0.4 + 0.2 * i as f64).collect(),
            p: (0..n).map(|i| 0.3 - 0.1 * i as f64).collect(),
            qp: (0..n).map(|i| 0.5 + 0.15 * i as f64).collect(),
            pp: (0..n).map(|i| 0.15 + 0.05 * i as f64).collect(),
            t1: 0.3,
            t2: 0.6,
        };
        (prm, pt)
    }

    #[test]
    fn manifolds_are_invariant() {
        for n in 1..=3 {
            for which in [Manifold::F2, Manifold::F1, Manifold::Deg] {
                let (p0, x0) = base(n);
                let (p, x) = project_to_manifold(&p0, &x0, which);
                let d = constraint_drift(&p, &x, which).unwrap();
                let worst = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(worst < 1e-7, "n = {n} {which:?}: {worst:e}");
            }
        }
    }

    #[test]
    fn reductions_hold() {
        for n in 1..=3 {
            let (p0, x0) = base(n);
            let (p, x) = project_to_manifold(&p0, &x0, Manifold::F2);
            let r = verify_reduction(&p, &x).unwrap();
            assert!(r < 1e-6, "main n = {n}: {r:e}");
            let (p, x) = project_to_manifold(&p0, &x0, Manifold::Deg);
            let r = verify_reduction_deg(&p, &x).unwrap();
            assert!(r < 1e-6, "deg n = {n}: {r:e}");
        }
    }

    #[test]
    fn reduction_control_fails_off_relation() {
        let (p0, x0) = base(1);
        let (mut p, x) = project_to_manifold(&p0, &x0, Manifold::F2);
        p.theta1 += 0.1;
        assert!(verify_reduction(&p, &x).is_err());
        assert!(reduction_residual(&p, &x).unwrap() > 1e-3);
    }

    #[test]
    fn f4_reduction_holds() {
        let mut a = [0.2, 0.0, 0.3, 0.4, 0.0, 0.15];
        a[4] = -(2.0 * a[0] + a[2] + a[3] + a[5]);
        let prm = PainleveParamsF4::new(a).unwrap();
        let pt = PhasePoint { q: vec![0.0; 3], p: vec![0.35, -0.4, 0.6], qp: vec![], pp: vec![], t1: 0.2, t2: 0.7 };
        let r = verify_reduction_f4(&prm, &pt).unwrap();
        assert!(r < 1e-6, "{r:e}");
        let d = constraint_drift_f4(&prm, &pt).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-7), "{d:?}");
    }

    #[test]
    fn main_logderiv_at_simple_point() {
        let (p, mut x) = base(2);
        x.p = vec![0.0; 2];
        x.qp = vec![1.0; 2];
        let l = w0_logderiv(&p, &x, W0Kind::Main);
        assert_eq!(l.coeffs, vec![p.theta3, p.kappa[0] + p.rho[0], p.theta2]);
    }
}
