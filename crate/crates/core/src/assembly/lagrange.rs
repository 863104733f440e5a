//! Lagrange bases on equispaced nodes: 1D on `[0, 1]` and Pk on the
//! reference triangle.

use alloc::vec::Vec;

/// Values and derivatives of the degree-`k` Lagrange basis on the nodes
/// `m / k`, `m = 0..=k`, at `x`.
pub fn lagrange_1d(k: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let nodes: Vec<f64> = (0..=k).map(|m| m as f64 / k as f64).collect();
    let mut val = Vec::with_capacity(k + 1);
    let mut der = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let (mut v, mut d) = (1.0, 0.0);
        for j in (0..=k).filter(|&j| j != i) {
            let den = nodes[i] - nodes[j];
            d = d * (x - nodes[j]) / den + v / den;
            v *= (x - nodes[j]) / den;
        }
        val.push(v);
        der.push(d);
    }
    (val, der)
}

/// Barycentric multi-indices of the Pk nodes in local order: the three
/// vertices, then `k − 1` nodes along each edge `0→1`, `1→2`, `2→0`, then
/// the interior.
pub fn triangle_nodes(k: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity((k + 1) * (k + 2) / 2);
    out.extend_from_slice(&[[k, 0, 0], [0, k, 0], [0, 0, k]]);
    for m in 1..k {
        out.push([k - m, m, 0]);
    }
    for m in 1..k {
        out.push([0, k - m, m]);
    }
    for m in 1..k {
        out.push([m, 0, k - m]);
    }
    for a2 in 1..k {
        for a1 in 1..k.saturating_sub(a2) {
            out.push([k - a1 - a2, a1, a2]);
        }
    }
    out
}

pub fn num_triangle_nodes(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// `Π_{m<α} (kλ − m)/(α − m)` and its derivative in `λ`.
fn factor(k: usize, alpha: usize, lambda: f64) -> (f64, f64) {
    let (mut v, mut d) = (1.0, 0.0);
    for m in 0..alpha {
        let den = (alpha - m) as f64;
        let t = (k as f64 * lambda - m as f64) / den;
        d = d * t + v * k as f64 / den;
        v *= t;
    }
    (v, d)
}

/// Values and reference gradients `(∂/∂ξ, ∂/∂η)` of the Pk basis at the
/// reference point `(ξ, η)`, where `λ = (1 − ξ − η, ξ, η)`.
pub fn triangle_basis(k: usize, nodes: &[[usize; 3]], xi: f64, eta: f64) -> (Vec<f64>, Vec<[f64; 2]>) {
    let lam = [1.0 - xi - eta, xi, eta];
    let mut val = Vec::with_capacity(nodes.len());
    let mut grad = Vec::with_capacity(nodes.len());
    for alpha in nodes {
        let f: [(f64, f64); 3] = core::array::from_fn(|i| factor(k, alpha[i], lam[i]));
        let v = f[0].0 * f[1].0 * f[2].0;
        let dl = [f[0].1 * f[1].0 * f[2].0, f[0].0 * f[1].1 * f[2].0, f[0].0 * f[1].0 * f[2].1];
        val.push(v);
        grad.push([dl[1] - dl[0], dl[2] - dl[0]]);
    }
    (val, grad)
}
