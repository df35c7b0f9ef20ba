//! Gauss–Legendre rules on [0,1] and collapsed (conical product) rules on the
//! reference triangle.

use alloc::vec::Vec;

use crate::math;

/// Gauss–Legendre rule with `n` points on [0, 1]; weights sum to 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        // Newton on P_n starting from the Chebyshev-like guess
        let mut z = math::cos(math::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x.push(0.5 * (1.0 - z));
        w.push(1.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

/// Quadrature on the reference triangle, stored in barycentric coordinates
/// with weights normalised to sum to one (multiply by |T| to integrate).
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub order: usize,
}

impl QuadratureRule {
    /// Collapsed Gauss rule exact for polynomials of total degree `order`.
    pub fn triangle(order: usize) -> Self {
        let ns = order / 2 + 1;
        // the Duffy Jacobian (1 - t) adds one degree in t
        let nt = (order + 1) / 2 + 1;
        let (xs, ws) = gauss_legendre(ns);
        let (xt, wt) = gauss_legendre(nt);
        let mut points = Vec::with_capacity(ns * nt);
        let mut weights = Vec::with_capacity(ns * nt);
        for (&t, &wtt) in xt.iter().zip(&wt) {
            for (&s, &wss) in xs.iter().zip(&ws) {
                let x = s * (1.0 - t);
                let y = t;
                points.push([1.0 - x - y, x, y]);
                weights.push(2.0 * wss * wtt * (1.0 - t));
            }
        }
        QuadratureRule { points, weights, order }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
