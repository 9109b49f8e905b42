//! Parallel transport along polylines with an embedded Dormand–Prince 5(4) pair.

use super::connection::{matrices_at, LogConnection};
use crate::error::{contract, Error, Result};
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Minimum distance from the path to every divisor.
    pub margin: f64,
    pub max_steps: usize,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig { rtol: 1e-12, atol: 1e-14, margin: 1e-3, max_steps: 200_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Smallest |f| over a segment for the five divisor functions, which are all
/// affine along it.
fn segment_clearance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let funcs: [fn(f64, f64) -> f64; 5] = [|t1, _| t1, |t1, _| t1 - 1.0, |_, t2| t2, |_, t2| t2 - 1.0, |t1, t2| t1 - t2];
    funcs
        .iter()
        .map(|f| {
            let (fa, fb) = (f(a.0, a.1), f(b.0, b.1));
            if fa.signum() != fb.signum() || fa == 0.0 || fb == 0.0 {
                0.0
            } else {
                fa.abs().min(fb.abs())
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Integrates d𝐰/ds = (M1 t₁′ + M2 t₂′)𝐰 along a straight segment.
fn transport_segment(conn: &LogConnection, w: DMatrix<f64>, a: (f64, f64), b: (f64, f64), cfg: &TransportConfig, s_offset: f64) -> Result<DMatrix<f64>> {
    let (dt1, dt2) = (b.0 - a.0, b.1 - a.1);
    if dt1 == 0.0 && dt2 == 0.0 {
        return Ok(w);
    }
    let rhs = |s: f64, y: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let (m1, m2) = matrices_at(conn, a.0 + s * dt1, a.1 + s * dt2)?;
        Ok((m1 * dt1 + m2 * dt2) * y)
    };
    let mut s: f64 = 0.0;
    let mut y = w;
    let mut h: f64 = 0.05;
    let mut k1 = rhs(0.0, &y)?;
    let mut steps = 0;
    while s < 1.0 {
        if steps >= cfg.max_steps {
            return Err(Error::StepUnderflow(s_offset + s));
        }
        steps += 1;
        h = h.min(1.0 - s);
        let mut k = vec![k1.clone()];
        for i in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[i][j] != 0.0 {
                    yi += kj * (h * A[i][j]);
                }
            }
            k.push(rhs(s + C[i] * h, &yi)?);
        }
        let mut y5 = y.clone();
        let mut err = DMatrix::zeros(y.nrows(), y.ncols());
        for i in 0..7 {
            y5 += &k[i] * (h * B5[i]);
            err += &k[i] * (h * (B5[i] - B4[i]));
        }
        let mut en = 0.0f64;
        for (e, (y0, y1)) in err.iter().zip(y.iter().zip(y5.iter())) {
            let sc = cfg.atol + cfg.rtol * y0.abs().max(y1.abs());
            en = en.max((e / sc).abs());
        }
        if en <= 1.0 {
            s += h;
            y = y5;
            // FSAL: the last stage is f at the accepted point
            k1 = k.pop().expect("seven stages");
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h < 1e-14 && s < 1.0 {
            return Err(Error::StepUnderflow(s_offset + s));
        }
    }
    Ok(y)
}

fn check_path(path: &[(f64, f64)], cfg: &TransportConfig) -> Result<()> {
    contract(!path.is_empty(), || "empty path".into())?;
    for (k, &p) in path.iter().enumerate() {
        let next = path.get(k + 1).copied().unwrap_or(p);
        let c = segment_clearance(p, next);
        if c < cfg.margin {
            return Err(Error::Singular(format!("path segment {k} passes within {c:e} of a divisor (margin {})", cfg.margin)));
        }
    }
    Ok(())
}

/// Fundamental matrix of the transport along the polyline.
pub fn transport_matrix(conn: &LogConnection, path: &[(f64, f64)], cfg: &TransportConfig) -> Result<DMatrix<f64>> {
    check_path(path, cfg)?;
    let mut y = DMatrix::identity(conn.dim(), conn.dim());
    for (k, seg) in path.windows(2).enumerate() {
        y = transport_segment(conn, y, seg[0], seg[1], cfg, k as f64)?;
    }
    Ok(y)
}

/// Transports 𝐰 from the first path vertex to the last.
pub fn continue_solution(conn: &LogConnection, w0: &[f64], path: &[(f64, f64)], cfg: &TransportConfig) -> Result<Vec<f64>> {
    contract(w0.len() == conn.dim(), || format!("vector has {} entries, connection dim {}", w0.len(), conn.dim()))?;
    check_path(path, cfg)?;
    let mut y = DMatrix::from_column_slice(w0.len(), 1, w0);
    for (k, seg) in path.windows(2).enumerate() {
        y = transport_segment(conn, y, seg[0], seg[1], cfg, k as f64)?;
    }
    Ok(y.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::super::connection::*;
    use super::super::solution::*;
    use super::*;

    fn pp() -> PainleveParams {
        PainleveParams::new(0.25, 0.3125, 0.4375, vec![0.125, 0.1875, 0.25], vec![0.1875, 0.3125]).unwrap()
    }

    #[test]
    fn constant_path_is_identity() {
        let c = build_connection_main(&pp());
        let m = transport_matrix(&c, &[(0.1, 0.9), (0.1, 0.9)], &TransportConfig::default()).unwrap();
        assert_eq!(m, DMatrix::identity(5, 5));
    }

    #[test]
    fn homotopic_paths_agree() {
        let c = build_connection_main(&pp());
        let cfg = TransportConfig::default();
        let p1 = transport_matrix(&c, &[(0.1, 0.9), (0.3, 0.9), (0.3, 0.7)], &cfg).unwrap();
        let p2 = transport_matrix(&c, &[(0.1, 0.9), (0.1, 0.7), (0.3, 0.7)], &cfg).unwrap();
        assert!((p1 - p2).amax() < 1e-8);
    }

    #[test]
    fn matches_series_continuation() {
        let p = pp();
        let c = build_connection_main(&p);
        let w = SeriesVector::new(&main_series_solution::<f64>(&p, 40).unwrap());
        let (a, _, _) = w.eval(0.1, 0.9).unwrap();
        let (b, _, _) = w.eval(0.12, 0.92).unwrap();
        let out = continue_solution(&c, a.as_slice(), &[(0.1, 0.9), (0.12, 0.92)], &TransportConfig::default()).unwrap();
        let d = out.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d < 1e-8, "{d:e}");
    }

    #[test]
    fn divisor_crossing_rejected() {
        let c = build_connection_main(&pp());
        let r = continue_solution(&c, &[1.0; 5], &[(0.1, 0.9), (0.1, 1.1)], &TransportConfig::default());
        assert!(matches!(r, Err(Error::Singular(_))));
    }
}
