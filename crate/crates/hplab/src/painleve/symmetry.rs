use super::hamiltonian::{vector_field, PhasePoint};
use crate::error::{Error, Result};
use crate::numdiff::jacobian;
use crate::pfaff::PainleveParams;

/// Image point, swapped parameters, and ∂(T₁, T₂)/∂(t₁, t₂) as rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BirationalImage {
    pub point: PhasePoint,
    pub params: PainleveParams,
    pub base_jacobian: [[f64; 2]; 2],
}

/// Phase-space part of the map on flattened coordinates (q, p, q′, p′).
pub fn birational_coords(prm: &PainleveParams, x: &[f64]) -> Vec<f64> {
    let n = prm.n();
    let (q, p, qp, pp) = (&x[..n], &x[n..2 * n], &x[2 * n..3 * n], &x[3 * n..]);
    let mut out = Vec::with_capacity(4 * n);
    out.extend(q.iter().map(|v| 1.0 / v));
    out.extend((0..n).map(|i| -q[i] * (q[i] * p[i] + qp[i] * pp[i] - prm.kr(i + 1))));
    out.extend((0..n).map(|i| -qp[i] / q[i]));
    out.extend((0..n).map(|i| -q[i] * pp[i]));
    out
}

/// qᵢ → 1/qᵢ, pᵢ → −qᵢ(qᵢpᵢ+q′ᵢp′ᵢ−κᵢ−ρᵢ), q′ᵢ → −q′ᵢ/qᵢ, p′ᵢ → −qᵢp′ᵢ,
/// θ₁ ↔ θ₃, (t₁, t₂) → (1/t₁, t₂/t₁).
pub fn birational_map(pt: &PhasePoint, prm: &PainleveParams) -> Result<BirationalImage> {
    if let Some(i) = pt.q.iter().position(|v| *v == 0.0) {
        return Err(Error::Singular(format!("q{} = 0", i + 1)));
    }
    if pt.t1 == 0.0 {
        return Err(Error::Singular("t1 = 0".into()));
    }
    let x = birational_coords(prm, &pt.coords());
    let point = pt.with_coords(&x).with_times(1.0 / pt.t1, pt.t2 / pt.t1);
    let mut params = prm.clone();
    std::mem::swap(&mut params.theta1, &mut params.theta3);
    let (t1, t2) = (pt.t1, pt.t2);
    let base_jacobian = [[-1.0 / (t1 * t1), 0.0], [-t2 / (t1 * t1), 1.0 / t1]];
    Ok(BirationalImage { point, params, base_jacobian })
}

/// Max-norm of JᵀΩJ − Ω for the numeric Jacobian of the phase-space map,
/// Ω = Σ dqᵢ∧dpᵢ + dq′ᵢ∧dp′ᵢ.
pub fn symplectic_defect(prm: &PainleveParams, pt: &PhasePoint) -> f64 {
    let n = prm.n();
    let d = 4 * n;
    let j = jacobian(|x| birational_coords(prm, x), &pt.coords(), 1e-4);
    let omega = |a: usize, b: usize| -> f64 {
        let pair = |u: usize, v: usize| (u < n && v == u + n) || (2 * n <= u && u < 3 * n && v == u + n);
        if pair(a, b) {
            1.0
        } else if pair(b, a) {
            -1.0
        } else {
            0.0
        }
    };
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                for l in 0..d {
                    let w = omega(k, l);
                    if w != 0.0 {
                        s += j[k][a] * w * j[l][b];
                    }
                }
            }
            worst = worst.max((s - omega(a, b)).abs());
        }
    }
    worst
}

/// Compares J·Vⱼ with Σₖ (∂Tₖ/∂tⱼ) Wₖ, where V are the flows at the point, W
/// the flows of the image system at the image point. `swap_theta = false`
/// runs the same comparison without exchanging θ₁ and θ₃ (negative control).
pub fn symmetry_residual(prm: &PainleveParams, pt: &PhasePoint, swap_theta: bool) -> Result<f64> {
    let img = birational_map(pt, prm)?;
    let target = if swap_theta { img.params.clone() } else { prm.clone() };
    let v = [vector_field(prm, pt, 1)?, vector_field(prm, pt, 2)?];
    let w = [vector_field(&target, &img.point, 1)?, vector_field(&target, &img.point, 2)?];
    let j = jacobian(|x| birational_coords(prm, x), &pt.coords(), 1e-4);
    let d = j.len();
    let mut worst = 0.0f64;
    for tj in 0..2 {
        for r in 0..d {
            let push: f64 = (0..d).map(|c| j[r][c] * v[tj][c]).sum();
            let chain = img.base_jacobian[0][tj] * w[0][r] + img.base_jacobian[1][tj] * w[1][r];
            worst = worst.max((push - chain).abs());
        }
    }
    Ok(worst)
}

pub fn verify_symmetry(prm: &PainleveParams, pt: &PhasePoint) -> Result<f64> {
    symmetry_residual(prm, pt, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (PainleveParams, PhasePoint) {
        let prm = PainleveParams::new(0.14, 0.22, 0.27, vec![0.26, 0.31, 0.17], vec![0.12, 0.41]).unwrap();
        let pt = PhasePoint { q: vec![0.6, 1.3], p: vec![1.2, 0.4], qp: vec![0.75, 0.5], pp: vec![0.33, 0.8], t1: 0.3, t2: 0.7 };
        (prm, pt)
    }

    #[test]
    fn map_is_an_involution() {
        let (prm, pt) = setup();
        let a = birational_map(&pt, &prm).unwrap();
        let b = birational_map(&a.point, &a.params).unwrap();
        for (x, y) in b.point.coords().iter().zip(pt.coords()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((b.point.t1 - pt.t1).abs() < 1e-15 && (b.point.t2 - pt.t2).abs() < 1e-15);
        assert_eq!(b.params, prm);
    }

    #[test]
    fn map_is_symplectic() {
        let (prm, pt) = setup();
        assert!(symplectic_defect(&prm, &pt) < 1e-9);
    }

    #[test]
    fn system_is_invariant() {
        let (prm, pt) = setup();
        let r = verify_symmetry(&prm, &pt).unwrap();
        assert!(r < 1e-5, "{r:e}");
        assert!(symmetry_residual(&prm, &pt, false).unwrap() > 1e-3);
    }

    #[test]
    fn zero_q_is_singular() {
        let (prm, mut pt) = setup();
        pt.q[0] = 0.0;
        assert!(matches!(birational_map(&pt, &prm), Err(Error::Singular(_))));
    }
}
