//! Orthonormal spherical harmonics and their theta-derivatives.
//!
//! `Y_{lm}(theta, phi) = Q_{lm}(cos theta) e^{i m phi}` with the
//! Condon-Shortley phase folded into `Q` and the normalization
//! `int |Y_{lm}|^2 dA = 1`.  Values for `m < 0` follow from
//! `Q_{l,-m} = (-1)^m Q_{lm}`.

use std::f64::consts::PI;

/// All `Q_{lm}` and `dQ_{lm}/dtheta` for `0 <= m <= l <= lmax` at a single
/// colatitude.
#[derive(Clone, Debug)]
pub struct LegendrePoint {
    lmax: usize,
    /// cos(theta)
    pub x: f64,
    /// sin(theta), strictly positive away from the poles
    pub s: f64,
    q: Vec<f64>,
    dq: Vec<f64>,
}

#[inline]
fn idx(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

impl LegendrePoint {
    pub fn new(lmax: usize, theta: f64) -> Self {
        let x = theta.cos();
        let s = theta.sin();
        let len = idx(lmax, lmax) + 1;
        let mut q = vec![0.0; len];
        let mut dq = vec![0.0; len];
        q[idx(0, 0)] = (1.0 / (4.0 * PI)).sqrt();
        // diagonal: Q_{mm} = -sqrt((2m+1)/(2m)) sin(theta) Q_{m-1,m-1}
        for m in 1..=lmax {
            let f = -((2.0 * m as f64 + 1.0) / (2.0 * m as f64)).sqrt();
            q[idx(m, m)] = f * s * q[idx(m - 1, m - 1)];
        }
        // first off-diagonal: Q_{m+1,m} = sqrt(2m+3) x Q_{mm}
        for m in 0..lmax {
            q[idx(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * q[idx(m, m)];
        }
        // upward recurrence in l
        for m in 0..=lmax {
            for l in (m + 2)..=lmax {
                let (lf, mf) = (l as f64, m as f64);
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf)
                    / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                    .sqrt();
                q[idx(l, m)] = a * (x * q[idx(l - 1, m)] - b * q[idx(l - 2, m)]);
            }
        }
        // dQ/dtheta = (l x Q_{lm} - c_{lm} Q_{l-1,m}) / sin(theta)
        for m in 0..=lmax {
            for l in m..=lmax {
                let (lf, mf) = (l as f64, m as f64);
                let below = if l > m { q[idx(l - 1, m)] } else { 0.0 };
                let c = if l > 0 {
                    ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt()
                } else {
                    0.0
                };
                dq[idx(l, m)] = (lf * x * q[idx(l, m)] - c * below) / s;
            }
        }
        LegendrePoint { lmax, x, s, q, dq }
    }

    /// `Q_{lm}` for signed `m`.
    pub fn q(&self, l: usize, m: i32) -> f64 {
        debug_assert!(l <= self.lmax && m.unsigned_abs() as usize <= l);
        let sign = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
        sign * self.q[idx(l, m.unsigned_abs() as usize)]
    }

    /// `dQ_{lm}/dtheta` for signed `m`.
    pub fn dq_dtheta(&self, l: usize, m: i32) -> f64 {
        debug_assert!(l <= self.lmax && m.unsigned_abs() as usize <= l);
        let sign = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
        sign * self.dq[idx(l, m.unsigned_abs() as usize)]
    }
}
