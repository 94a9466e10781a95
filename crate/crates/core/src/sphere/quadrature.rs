//! Gauss-Legendre x uniform product quadrature on the sphere.
//!
//! Nodes are exact for band-limited integrands: `n` Legendre nodes in
//! `cos(theta)` integrate polynomials up to degree `2n - 1`, and `k`
//! uniform nodes in `phi` integrate `exp(i m phi)` exactly for `|m| < k`.

use std::f64::consts::PI;

/// One quadrature node; `weight` already contains the full area element, so
/// `integral(f) = sum_q w_q f(theta_q, phi_q)`.
#[derive(Clone, Copy, Debug)]
pub struct QuadNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and its derivative at x
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // roots come out in descending order of |x|; fill symmetrically
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product grid: `n_theta` Gauss-Legendre nodes in `cos(theta)` by `n_phi`
/// uniform nodes in `phi`, weights carrying the full `dA` measure.
pub fn sphere_grid(n_theta: usize, n_phi: usize) -> Vec<QuadNode> {
    let (xs, ws) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    for (x, w) in xs.iter().zip(ws.iter()) {
        let theta = x.acos();
        for k in 0..n_phi {
            nodes.push(QuadNode {
                theta,
                phi: dphi * k as f64,
                weight: w * dphi,
            });
        }
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (xs, ws) = gauss_legendre(8);
        // integrates x^k over [-1,1] exactly up to degree 15
        for k in 0..=15usize {
            let quad: f64 = xs.iter().zip(ws.iter()).map(|(x, w)| w * x.powi(k as i32)).sum();
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((quad - exact).abs() < 1e-13, "degree {k}: {quad} vs {exact}");
        }
    }

    #[test]
    fn sphere_area_and_harmonic_orthogonality() {
        let nodes = sphere_grid(10, 16);
        let area: f64 = nodes.iter().map(|n| n.weight).sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        // int cos^2(theta) dA = 4 pi / 3
        let second: f64 = nodes
            .iter()
            .map(|n| n.weight * n.theta.cos().powi(2))
            .sum();
        assert!((second - 4.0 * PI / 3.0).abs() < 1e-12);
        // exp(3 i phi) integrates to zero
        let osc: f64 = nodes.iter().map(|n| n.weight * (3.0 * n.phi).cos()).sum();
        assert!(osc.abs() < 1e-12);
    }
}
