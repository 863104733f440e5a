//! Local element matrices and their assembly into the s0-graded global
//! system
//!
//! ```text
//! p(∂t) M u = (L + D − k² M) u,   M = M0 + M₋₁/s0 + M₋₂/s0²,
//!                                 L = L0 + s0 L1,  D = D0 + D₋₁/s0.
//! ```
//!
//! Unknowns are ordered as FE nodes, then Hardy coefficients `F_0..F_{Nξ−1}`
//! per boundary trace node (the trace value itself is the FE node), then the
//! element-local auxiliary unknowns of the exterior elements.

mod exterior;
mod interior;
mod lagrange;
mod quadrature;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use exterior::{
    direct_stiffness, eta_blocks, l11_inverse_form, local_exterior, rotated_drift, schur_eliminate_auxiliary,
    xi_blocks, EtaBlocks, LocalExteriorMatrices, XiBlocks,
};
pub use interior::{interior_local, InteriorLocal};
pub use lagrange::{lagrange_1d, num_triangle_nodes, triangle_basis, triangle_nodes};
pub use quadrature::{gauss_legendre, triangle_rule};

use crate::hardy::{HardyError, HardyOperatorSet};
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::mesh::{exterior_geometry, ExteriorElementGeometry, Mesh, MeshError, Point};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub enum AssemblyError {
    InvalidOrder(usize),
    DegenerateTriangle,
    Mesh(MeshError),
    Hardy(HardyError),
    NonFiniteParameter,
}

impl fmt::Display for AssemblyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssemblyError::InvalidOrder(k) => write!(f, "finite element order {k} not in 1..=4"),
            AssemblyError::DegenerateTriangle => f.write_str("degenerate triangle"),
            AssemblyError::Mesh(e) => write!(f, "mesh: {e}"),
            AssemblyError::Hardy(e) => write!(f, "hardy: {e}"),
            AssemblyError::NonFiniteParameter => f.write_str("PDE parameters must be finite"),
        }
    }
}

impl core::error::Error for AssemblyError {}

impl From<MeshError> for AssemblyError {
    fn from(e: MeshError) -> Self {
        AssemblyError::Mesh(e)
    }
}

impl From<HardyError> for AssemblyError {
    fn from(e: HardyError) -> Self {
        AssemblyError::Hardy(e)
    }
}

/// Coefficients of `c² Δu − d·∇u − k² u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeParams {
    pub c: f64,
    pub d: [f64; 2],
    pub k: f64,
}

/// How the truncation boundary is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Hardy-space infinite elements with `n_xi` coefficients per ray.
    Transparent { n_xi: usize },
    /// Homogeneous Dirichlet: boundary nodes are removed from the system.
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub fe_order: usize,
    /// Zero for the Dirichlet variant.
    pub n_xi: usize,
    /// Coordinates of every FE node.
    pub node_coords: Vec<Point>,
    /// System index of every FE node; `None` for eliminated Dirichlet nodes.
    pub fe_dof: Vec<Option<usize>>,
    /// FE nodes of each triangle, in local basis order.
    pub cell_nodes: Vec<Vec<usize>>,
    /// FE nodes on the boundary, each owning a ray of Hardy coefficients.
    pub trace_nodes: Vec<usize>,
    /// System indices of each exterior element's local unknowns.
    pub ext_dofs: Vec<Vec<usize>>,
    pub n_fe_dofs: usize,
    pub n_hardy: usize,
    pub n_aux: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, geometry: &[ExteriorElementGeometry], fe_order: usize, boundary: Boundary) -> Result<Self, AssemblyError> {
        if !(1..=4).contains(&fe_order) {
            return Err(AssemblyError::InvalidOrder(fe_order));
        }
        let k = fe_order;
        let nv = mesh.vertices.len();
        let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &mesh.triangles {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                edges.insert((a.min(b), a.max(b)), 0);
            }
        }
        for (id, v) in edges.values_mut().enumerate() {
            *v = id;
        }
        let per_edge = k - 1;
        let per_cell = num_triangle_nodes(k) - 3 - 3 * per_edge;
        let edge_base = nv;
        let cell_base = nv + edges.len() * per_edge;
        let n_nodes = cell_base + mesh.triangles.len() * per_cell;

        // edge node q (1..k-1) sits at lo + q/k (hi − lo)
        let edge_node = |s: usize, t: usize, m: usize| -> usize {
            let (lo, hi) = (s.min(t), s.max(t));
            let q = if s == lo { m } else { k - m };
            edge_base + edges[&(lo, hi)] * per_edge + (q - 1)
        };

        let mut node_coords = vec![[0.0, 0.0]; n_nodes];
        node_coords[..nv].copy_from_slice(&mesh.vertices);
        let local = triangle_nodes(k);
        let mut cell_nodes = Vec::with_capacity(mesh.triangles.len());
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let mut ids = Vec::with_capacity(local.len());
            let mut interior = 0;
            for alpha in &local {
                let id = match alpha.iter().filter(|&&a| a > 0).count() {
                    1 => tri[alpha.iter().position(|&a| a > 0).unwrap_or(0)],
                    2 => {
                        // edge node: the two non-zero entries name the edge
                        let (e, m) = if alpha[2] == 0 {
                            ((tri[0], tri[1]), alpha[1])
                        } else if alpha[0] == 0 {
                            ((tri[1], tri[2]), alpha[2])
                        } else {
                            ((tri[2], tri[0]), alpha[0])
                        };
                        edge_node(e.0, e.1, m)
                    }
                    _ => {
                        interior += 1;
                        cell_base + t * per_cell + interior - 1
                    }
                };
                let p: Point = core::array::from_fn(|d| {
                    (0..3).map(|v| alpha[v] as f64 / k as f64 * mesh.vertices[tri[v]][d]).sum()
                });
                node_coords[id] = p;
                ids.push(id);
            }
            cell_nodes.push(ids);
        }

        // boundary nodes in loop order
        let mut trace_nodes = Vec::new();
        for e in 0..mesh.boundary_loop.len() {
            let (s, t) = mesh.boundary_edge(e);
            trace_nodes.push(s);
            for m in 1..k {
                trace_nodes.push(edge_node(s, t, m));
            }
        }
        let mut on_boundary = vec![false; n_nodes];
        for &n in &trace_nodes {
            on_boundary[n] = true;
        }

        let mut fe_dof = vec![None; n_nodes];
        let mut next = 0;
        for (n, slot) in fe_dof.iter_mut().enumerate() {
            if boundary == Boundary::Dirichlet && on_boundary[n] {
                continue;
            }
            *slot = Some(next);
            next += 1;
        }
        let n_fe_dofs = next;

        let n_xi = match boundary {
            Boundary::Transparent { n_xi } => {
                if n_xi < 1 {
                    return Err(HardyError::EmptyTruncation.into());
                }
                n_xi
            }
            Boundary::Dirichlet => 0,
        };
        let mut ext_dofs = Vec::new();
        let (mut n_hardy, mut n_aux) = (0, 0);
        if n_xi > 0 {
            let mut trace_index = vec![usize::MAX; n_nodes];
            for (i, &n) in trace_nodes.iter().enumerate() {
                trace_index[n] = i;
            }
            n_hardy = trace_nodes.len() * n_xi;
            let block = (k + 1) * (n_xi + 1);
            n_aux = geometry.len() * block;
            let hardy_base = n_fe_dofs;
            let aux_base = n_fe_dofs + n_hardy;
            for (e, g) in geometry.iter().enumerate() {
                let [i0, i1] = g.vertices;
                let mut dofs = Vec::with_capacity(2 * block);
                for m in 0..=k {
                    // η = m/k runs from p0 to p1
                    let node = match m {
                        0 => i0,
                        _ if m == k => i1,
                        _ => edge_node(i0, i1, m),
                    };
                    let Some(fe) = fe_dof[node] else {
                        return Err(AssemblyError::Mesh(MeshError::Inconsistent("trace node without FE dof")));
                    };
                    if trace_index[node] == usize::MAX {
                        return Err(AssemblyError::Mesh(MeshError::Inconsistent("exterior node not on boundary")));
                    }
                    dofs.push(fe);
                    for j in 1..=n_xi {
                        dofs.push(hardy_base + trace_index[node] * n_xi + (j - 1));
                    }
                }
                dofs.extend((0..block).map(|i| aux_base + e * block + i));
                ext_dofs.push(dofs);
            }
        }
        Ok(DofMap {
            fe_order,
            n_xi,
            node_coords,
            fe_dof,
            cell_nodes,
            trace_nodes,
            ext_dofs,
            n_fe_dofs,
            n_hardy,
            n_aux,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.n_fe_dofs + self.n_hardy + self.n_aux
    }

    /// `(system index, coordinates)` of every FE unknown.
    pub fn fe_nodes(&self) -> impl Iterator<Item = (usize, Point)> + '_ {
        self.fe_dof.iter().zip(&self.node_coords).filter_map(|(d, p)| d.map(|d| (d, *p)))
    }
}

/// The assembled semi-discrete system.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub m0: CsrMatrix,
    pub mm1: CsrMatrix,
    pub mm2: CsrMatrix,
    pub l0: CsrMatrix,
    pub l1: CsrMatrix,
    pub d0: CsrMatrix,
    pub dm1: CsrMatrix,
    /// The interior part of `L0` (minus the FE stiffness), used by energy
    /// functionals.
    pub l0_interior: CsrMatrix,
    pub dof_map: DofMap,
    pub params: PdeParams,
}

impl GlobalSystem {
    pub fn n_dofs(&self) -> usize {
        self.dof_map.n_dofs()
    }
}

const INTERIOR_TAG: u64 = 0;
const EXTERIOR_TAG: u64 = 1 << 62;

fn tag(kind: u64, element: usize, i: usize, j: usize) -> u64 {
    kind | (element as u64) << 24 | (i as u64) << 12 | j as u64
}

/// Assemble the global system in natural element order.
pub fn assemble_global(mesh: &Mesh, fe_order: usize, boundary: Boundary, params: PdeParams) -> Result<GlobalSystem, AssemblyError> {
    let interior: Vec<usize> = (0..mesh.triangles.len()).collect();
    let exterior: Vec<usize> = (0..mesh.boundary_loop.len()).collect();
    assemble_global_in_order(mesh, fe_order, boundary, params, &interior, &exterior)
}

/// Assemble visiting elements in the given order. Every contribution is
/// tagged with its element and local position and summed in tag order, so
/// the result is bitwise independent of the visiting order.
pub fn assemble_global_in_order(
    mesh: &Mesh,
    fe_order: usize,
    boundary: Boundary,
    params: PdeParams,
    interior_order: &[usize],
    exterior_order: &[usize],
) -> Result<GlobalSystem, AssemblyError> {
    if !(params.c.is_finite() && params.k.is_finite() && params.d.iter().all(|v| v.is_finite())) {
        return Err(AssemblyError::NonFiniteParameter);
    }
    let geometry = match boundary {
        Boundary::Transparent { .. } => exterior_geometry(mesh)?,
        Boundary::Dirichlet => Vec::new(),
    };
    let dof_map = DofMap::new(mesh, &geometry, fe_order, boundary)?;
    let n = dof_map.n_dofs();
    let new = || TripletBuilder::new(n, n);
    let (mut m0, mut mm1, mut mm2) = (new(), new(), new());
    let (mut l0, mut l1, mut d0, mut dm1) = (new(), new(), new(), new());
    let mut l0_interior = new();
    let r = |x: f64| C64::new(x, 0.0);

    for &t in interior_order {
        let tri = mesh.triangles[t];
        let pts = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
        let loc = interior_local(pts, fe_order, params.d)?;
        let nodes = &dof_map.cell_nodes[t];
        for (i, &ni) in nodes.iter().enumerate() {
            let Some(gi) = dof_map.fe_dof[ni] else { continue };
            for (j, &nj) in nodes.iter().enumerate() {
                let Some(gj) = dof_map.fe_dof[nj] else { continue };
                let tg = tag(INTERIOR_TAG, t, i, j);
                m0.push(gi, gj, tg, r(loc.mass[(i, j)]));
                l0.push(gi, gj, tg, r(-loc.stiffness[(i, j)]));
                l0_interior.push(gi, gj, tg, r(-loc.stiffness[(i, j)]));
                d0.push(gi, gj, tg, r(-loc.drift[(i, j)]));
            }
        }
    }

    if let Boundary::Transparent { n_xi } = boundary {
        let hardy = HardyOperatorSet::new(n_xi)?;
        for &e in exterior_order {
            let loc = local_exterior(&geometry[e], &hardy, fe_order, params.d);
            let dofs = &dof_map.ext_dofs[e];
            for (i, &gi) in dofs.iter().enumerate() {
                for (j, &gj) in dofs.iter().enumerate() {
                    let tg = tag(EXTERIOR_TAG, e, i, j);
                    l0.push(gi, gj, tg, r(-loc.l0[(i, j)]));
                    l1.push(gi, gj, tg, r(-loc.l1[(i, j)]));
                    mm1.push(gi, gj, tg, r(loc.mm1[(i, j)]));
                    mm2.push(gi, gj, tg, r(loc.mm2[(i, j)]));
                    d0.push(gi, gj, tg, r(-loc.d0[(i, j)]));
                    dm1.push(gi, gj, tg, r(-loc.dm1[(i, j)]));
                }
            }
        }
    }

    Ok(GlobalSystem {
        m0: m0.build(),
        mm1: mm1.build(),
        mm2: mm2.build(),
        l0: l0.build(),
        l1: l1.build(),
        d0: d0.build(),
        dm1: dm1.build(),
        l0_interior: l0_interior.build(),
        dof_map,
        params,
    })
}

/// `(‖u_h − f‖, ‖f‖)` in L2 over the interior domain, by quadrature of the
/// FE interpolant. Eliminated Dirichlet nodes count as zero.
pub fn fe_l2_error(mesh: &Mesh, dofs: &DofMap, u: &[C64], f: impl Fn(Point) -> C64) -> (f64, f64) {
    let k = dofs.fe_order;
    let nodes = triangle_nodes(k);
    let rule = triangle_rule(k + 3);
    let (mut err, mut norm) = (0.0, 0.0);
    for (tri, cell) in mesh.triangles.iter().zip(&dofs.cell_nodes) {
        let [p0, p1, p2] = tri.map(|v| mesh.vertices[v]);
        let e1 = [p1[0] - p0[0], p1[1] - p0[1]];
        let e2 = [p2[0] - p0[0], p2[1] - p0[1]];
        let area2 = libm::fabs(e1[0] * e2[1] - e1[1] * e2[0]);
        for &(x, y, w) in &rule {
            let (vals, _) = triangle_basis(k, &nodes, x, y);
            let uh: C64 = cell.iter().zip(&vals).map(|(&n, &v)| dofs.fe_dof[n].map_or(C64::new(0.0, 0.0), |d| u[d]) * v).sum();
            let fx = f([p0[0] + x * e1[0] + y * e2[0], p0[1] + x * e1[1] + y * e2[1]]);
            err += w * area2 * (uh - fx).norm_sqr();
            norm += w * area2 * fx.norm_sqr();
        }
    }
    (libm::sqrt(err), libm::sqrt(norm))
}
