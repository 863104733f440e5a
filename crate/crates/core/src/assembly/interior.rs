use alloc::vec::Vec;

use super::lagrange::{triangle_basis, triangle_nodes};
use super::quadrature::triangle_rule;
use super::AssemblyError;
use crate::linalg::DenseMatrix;
use crate::mesh::Point;

/// Local Pk matrices of one triangle:
/// `mass = ∫ φ_i φ_j`, `stiffness = ∫ ∇φ_i·∇φ_j`, `drift = ∫ φ_i (d·∇φ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorLocal {
    pub mass: DenseMatrix<f64>,
    pub stiffness: DenseMatrix<f64>,
    pub drift: DenseMatrix<f64>,
}

pub fn interior_local(tri: [Point; 3], fe_order: usize, d: [f64; 2]) -> Result<InteriorLocal, AssemblyError> {
    if !(1..=4).contains(&fe_order) {
        return Err(AssemblyError::InvalidOrder(fe_order));
    }
    let e1 = [tri[1][0] - tri[0][0], tri[1][1] - tri[0][1]];
    let e2 = [tri[2][0] - tri[0][0], tri[2][1] - tri[0][1]];
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    if !(det > 0.0) {
        return Err(AssemblyError::DegenerateTriangle);
    }
    // B = [e1 e2]; reference gradients map by B^{-T}
    let inv_t = [[e2[1] / det, -e1[1] / det], [-e2[0] / det, e1[0] / det]];
    let nodes = triangle_nodes(fe_order);
    let n = nodes.len();
    let mut mass = DenseMatrix::zeros(n, n);
    let mut stiffness = DenseMatrix::zeros(n, n);
    let mut drift = DenseMatrix::zeros(n, n);
    for (x, y, w) in triangle_rule(fe_order + 2) {
        let (val, gref) = triangle_basis(fe_order, &nodes, x, y);
        let grad: Vec<[f64; 2]> = gref
            .iter()
            .map(|g| [inv_t[0][0] * g[0] + inv_t[0][1] * g[1], inv_t[1][0] * g[0] + inv_t[1][1] * g[1]])
            .collect();
        let wd = w * det;
        for i in 0..n {
            for j in 0..n {
                mass[(i, j)] += wd * val[i] * val[j];
                stiffness[(i, j)] += wd * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
                drift[(i, j)] += wd * val[i] * (d[0] * grad[j][0] + d[1] * grad[j][1]);
            }
        }
    }
    Ok(InteriorLocal { mass, stiffness, drift })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_mass_on_unit_right_triangle() {
        let loc = interior_local([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], 1, [0.0, 0.0]).unwrap();
        let area = 0.5;
        for i in 0..3 {
            for j in 0..3 {
                let expect = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                assert!((loc.mass[(i, j)] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let tri = [[0.3, -0.2], [1.7, 0.4], [0.1, 1.3]];
        for k in 1..=4 {
            let loc = interior_local(tri, k, [0.7, -1.1]).unwrap();
            let n = loc.stiffness.rows();
            for i in 0..n {
                let s: f64 = (0..n).map(|j| loc.stiffness[(i, j)]).sum();
                let dsum: f64 = (0..n).map(|j| loc.drift[(i, j)]).sum();
                assert!(s.abs() < 1e-12 && dsum.abs() < 1e-12);
                for j in 0..n {
                    assert!((loc.stiffness[(i, j)] - loc.stiffness[(j, i)]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mass_integrates_to_area() {
        let tri = [[0.3, -0.2], [1.7, 0.4], [0.1, 1.3]];
        let area = 0.5 * ((1.4 * 1.5) - (0.6 * -0.2));
        for k in 1..=4 {
            let loc = interior_local(tri, k, [0.0, 0.0]).unwrap();
            let total: f64 = loc.mass.as_slice().iter().sum();
            assert!((total - area).abs() < 1e-13);
        }
    }

    #[test]
    fn p2_stiffness_matches_seven_point_rule() {
        // degree-5 Dunavant rule, independent of the collapsed Gauss rule
        let a1 = 0.059_715_871_789_770;
        let b1 = 0.470_142_064_105_115;
        let a2 = 0.797_426_985_353_087;
        let b2 = 0.101_286_507_323_456;
        let w0 = 0.225;
        let w1 = 0.132_394_152_788_506;
        let w2 = 0.125_939_180_544_827;
        let pts = [
            (1.0 / 3.0, 1.0 / 3.0, w0),
            (b1, b1, w1),
            (a1, b1, w1),
            (b1, a1, w1),
            (b2, b2, w2),
            (a2, b2, w2),
            (b2, a2, w2),
        ];
        let tri = [[0.3, -0.2], [1.7, 0.4], [0.1, 1.3]];
        let loc = interior_local(tri, 2, [0.0, 0.0]).unwrap();
        let e1 = [1.4, 0.6];
        let e2 = [-0.2, 1.5];
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        let nodes = triangle_nodes(2);
        let mut brute = DenseMatrix::<f64>::zeros(6, 6);
        for &(x, y, w) in &pts {
            let (_, g) = triangle_basis(2, &nodes, x, y);
            let gx: Vec<[f64; 2]> = g
                .iter()
                .map(|r| [(e2[1] * r[0] - e1[1] * r[1]) / det, (-e2[0] * r[0] + e1[0] * r[1]) / det])
                .collect();
            for i in 0..6 {
                for j in 0..6 {
                    brute[(i, j)] += 0.5 * w * det * (gx[i][0] * gx[j][0] + gx[i][1] * gx[j][1]);
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                assert!((brute[(i, j)] - loc.stiffness[(i, j)]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let flat = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert_eq!(interior_local(flat, 1, [0.0, 0.0]), Err(AssemblyError::DegenerateTriangle));
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert_eq!(interior_local(tri, 5, [0.0, 0.0]), Err(AssemblyError::InvalidOrder(5)));
    }
}
