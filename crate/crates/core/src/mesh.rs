//! Interior triangulation of the truncated domain and the semi-infinite
//! trapezoids attached to its boundary.
//!
//! The domain is a square with 45° chamfered corners. Every boundary vertex
//! carries a ray along the bisector of the two adjacent outward normals; two
//! neighbouring rays and the boundary edge between them bound one exterior
//! element.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub enum MeshError {
    NonPositiveDimension,
    ChamferTooLarge,
    /// Ray at a boundary vertex does not point out of an adjacent edge.
    RayNotOutward { edge: usize },
    /// Exterior element with diverging rays of negative total offset.
    NegativeSpread { edge: usize },
    DegenerateTriangle { triangle: usize },
    BoundaryNotConvex { vertex: usize },
    Inconsistent(&'static str),
}

impl fmt::Display for MeshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshError::NonPositiveDimension => f.write_str("mesh dimensions must be positive"),
            MeshError::ChamferTooLarge => f.write_str("corner chamfer must be smaller than the half width"),
            MeshError::RayNotOutward { edge } => write!(f, "ray not outward for boundary edge {edge}"),
            MeshError::NegativeSpread { edge } => write!(f, "exterior element {edge} has a + b < 0"),
            MeshError::DegenerateTriangle { triangle } => write!(f, "triangle {triangle} has non-positive area"),
            MeshError::BoundaryNotConvex { vertex } => write!(f, "boundary not convex at loop position {vertex}"),
            MeshError::Inconsistent(what) => write!(f, "inconsistent mesh: {what}"),
        }
    }
}

impl core::error::Error for MeshError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary vertex indices in counterclockwise order (not closed).
    pub boundary_loop: Vec<usize>,
    /// Unit ray direction for `boundary_loop[k]`.
    pub rays: Vec<Point>,
    pub refinement_level: usize,
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: Point) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Twice the signed area of `(a, b, c)`.
fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

/// Outward unit normal of a counterclockwise boundary edge `p -> q`.
fn outward_normal(p: Point, q: Point) -> Point {
    let e = sub(q, p);
    let l = norm(e);
    [e[1] / l, -e[0] / l]
}

/// Corners of the chamfered square, counterclockwise, starting on the
/// lower edge.
fn polygon_corners(h: f64, c: f64) -> Vec<Point> {
    if c == 0.0 {
        return vec![[h, -h], [h, h], [-h, h], [-h, -h]];
    }
    vec![
        [h - c, -h],
        [h, -h + c],
        [h, h - c],
        [h - c, h],
        [-h + c, h],
        [-h, h - c],
        [-h, -h + c],
        [-h + c, -h],
    ]
}

/// Polygon sides subdivided so that no piece exceeds `target`.
fn subdivide(corners: &[Point], target: f64) -> Vec<Point> {
    let n = corners.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (p, q) = (corners[i], corners[(i + 1) % n]);
        let pieces = (libm::ceil(norm(sub(q, p)) / target) as usize).max(1);
        for m in 0..pieces {
            let s = m as f64 / pieces as f64;
            out.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
        }
    }
    out
}

impl Mesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * orient(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    /// Boundary edge `k` runs from `boundary_loop[k]` to `boundary_loop[k + 1]`.
    pub fn boundary_edge(&self, k: usize) -> (usize, usize) {
        let n = self.boundary_loop.len();
        (self.boundary_loop[k], self.boundary_loop[(k + 1) % n])
    }

    /// Check every structural invariant.
    pub fn validate(&self) -> Result<(), MeshError> {
        let nv = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(MeshError::Inconsistent("triangle vertex out of range"));
            }
            if !(self.signed_area(t) > 0.0) {
                return Err(MeshError::DegenerateTriangle { triangle: t });
            }
        }
        let n = self.boundary_loop.len();
        if n < 3 || self.rays.len() != n {
            return Err(MeshError::Inconsistent("boundary loop and rays"));
        }
        let mut winding = 0.0;
        for k in 0..n {
            let p = self.vertices[self.boundary_loop[(k + n - 1) % n]];
            let q = self.vertices[self.boundary_loop[k]];
            let r = self.vertices[self.boundary_loop[(k + 1) % n]];
            let (e1, e2) = (sub(q, p), sub(r, q));
            let turn = cross(e1, e2);
            // collinear vertices from subdivision are allowed
            if turn < -1e-12 * norm(e1) * norm(e2) {
                return Err(MeshError::BoundaryNotConvex { vertex: k });
            }
            winding += libm::atan2(turn, dot(e1, e2));
        }
        if libm::fabs(winding - 2.0 * PI) > 1e-8 {
            return Err(MeshError::BoundaryNotConvex { vertex: 0 });
        }
        for k in 0..n {
            let (p, q) = self.boundary_edge(k);
            let nrm = outward_normal(self.vertices[p], self.vertices[q]);
            if !(dot(self.rays[k], nrm) > 0.0 && dot(self.rays[(k + 1) % n], nrm) > 0.0) {
                return Err(MeshError::RayNotOutward { edge: k });
            }
        }
        // every boundary edge must be an edge of exactly one triangle, every
        // other edge of exactly two
        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &self.triangles {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut boundary_edges = 0;
        for &c in count.values() {
            match c {
                1 => boundary_edges += 1,
                2 => {}
                _ => return Err(MeshError::Inconsistent("edge shared by more than two triangles")),
            }
        }
        if boundary_edges != n {
            return Err(MeshError::Inconsistent("boundary loop does not match triangulation"));
        }
        for k in 0..n {
            let (a, b) = self.boundary_edge(k);
            if count.get(&(a.min(b), a.max(b))) != Some(&1) {
                return Err(MeshError::Inconsistent("boundary loop edge is not a hull edge"));
            }
        }
        Ok(())
    }
}

/// Triangulate the chamfered square `[-h, h]²`.
///
/// Scaled copies of the boundary polygon form concentric rings spaced by
/// `target_edge`; neighbouring rings are zipped together, the innermost one is
/// fanned around the centre, and the result is made Delaunay by edge flips.
pub fn build_base_mesh(half_width: f64, corner_chamfer: f64, target_edge: f64) -> Result<Mesh, MeshError> {
    if !(half_width > 0.0 && target_edge > 0.0 && corner_chamfer >= 0.0) {
        return Err(MeshError::NonPositiveDimension);
    }
    if corner_chamfer >= half_width {
        return Err(MeshError::ChamferTooLarge);
    }
    let corners = polygon_corners(half_width, corner_chamfer);
    let mut vertices = subdivide(&corners, target_edge);
    let n_boundary = vertices.len();
    let mut triangles = Vec::new();
    let mut outer: Vec<usize> = (0..n_boundary).collect();
    let mut ring = 1;
    loop {
        let s = 1.0 - ring as f64 * target_edge / half_width;
        if s <= 1e-9 {
            break;
        }
        let scaled: Vec<Point> = corners.iter().map(|p| [s * p[0], s * p[1]]).collect();
        let pts = subdivide(&scaled, target_edge);
        let start = vertices.len();
        vertices.extend_from_slice(&pts);
        let inner: Vec<usize> = (start..vertices.len()).collect();
        zip_rings(&vertices, &outer, &inner, &mut triangles);
        outer = inner;
        ring += 1;
    }
    if ring == 1 {
        for i in 1..outer.len() - 1 {
            triangles.push([outer[0], outer[i], outer[i + 1]]);
        }
    } else {
        let c = vertices.len();
        vertices.push([0.0, 0.0]);
        for i in 0..outer.len() {
            triangles.push([c, outer[i], outer[(i + 1) % outer.len()]]);
        }
    }
    delaunay_flips(&vertices, &mut triangles);

    let boundary_loop: Vec<usize> = (0..n_boundary).collect();
    let rays = bisector_rays(&vertices, &boundary_loop);
    let mesh = Mesh { vertices, triangles, boundary_loop, rays, refinement_level: 0 };
    mesh.validate()?;
    Ok(mesh)
}

/// Angle of `p` measured counterclockwise from `start`, in `[0, 2π)`.
fn angle_from(p: Point, start: f64) -> f64 {
    let mut a = libm::atan2(p[1], p[0]) - start;
    while a < 0.0 {
        a += 2.0 * PI;
    }
    while a >= 2.0 * PI {
        a -= 2.0 * PI;
    }
    a
}

/// Triangulate the annulus between two nested counterclockwise rings whose
/// first vertices lie on a common ray from the origin.
fn zip_rings(v: &[Point], outer: &[usize], inner: &[usize], tris: &mut Vec<[usize; 3]>) {
    let start = libm::atan2(v[outer[0]][1], v[outer[0]][0]);
    let ang = |ring: &[usize], i: usize| {
        if i == ring.len() {
            2.0 * PI
        } else if i == 0 {
            0.0
        } else {
            angle_from(v[ring[i]], start)
        }
    };
    let (no, ni) = (outer.len(), inner.len());
    let (mut i, mut j) = (0, 0);
    while i < no || j < ni {
        let advance_outer = j == ni || (i < no && ang(outer, i + 1) <= ang(inner, j + 1));
        if advance_outer {
            tris.push([outer[i], outer[(i + 1) % no], inner[j % ni]]);
            i += 1;
        } else {
            tris.push([outer[i % no], inner[(j + 1) % ni], inner[j]]);
            j += 1;
        }
    }
}

fn in_circumcircle(a: Point, b: Point, c: Point, d: Point) -> bool {
    let m = [sub(a, d), sub(b, d), sub(c, d)];
    let det = |r: Point| r[0] * r[0] + r[1] * r[1];
    let value = m[0][0] * (m[1][1] * det(m[2]) - det(m[1]) * m[2][1])
        - m[0][1] * (m[1][0] * det(m[2]) - det(m[1]) * m[2][0])
        + det(m[0]) * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let scale = [m[0], m[1], m[2]].iter().map(|r| det(*r)).fold(0.0, f64::max);
    value > 1e-12 * scale * scale
}

/// Lawson flips until every interior edge is locally Delaunay.
fn delaunay_flips(v: &[Point], tris: &mut [[usize; 3]]) {
    for _sweep in 0..1000 {
        let mut edges: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (t, tri) in tris.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_default().push((t, e));
            }
        }
        let mut touched = vec![false; tris.len()];
        let mut flipped = false;
        for sides in edges.values() {
            if sides.len() != 2 {
                continue;
            }
            let ((t1, e1), (t2, e2)) = (sides[0], sides[1]);
            if touched[t1] || touched[t2] {
                continue;
            }
            // t1 = (a, b, c) with shared edge a-b; t2 = (b, a, d)
            let a = tris[t1][e1];
            let b = tris[t1][(e1 + 1) % 3];
            let c = tris[t1][(e1 + 2) % 3];
            let d = tris[t2][(e2 + 2) % 3];
            if !in_circumcircle(v[a], v[b], v[c], v[d]) {
                continue;
            }
            if orient(v[c], v[a], v[d]) <= 0.0 || orient(v[d], v[b], v[c]) <= 0.0 {
                continue;
            }
            tris[t1] = [c, a, d];
            tris[t2] = [d, b, c];
            touched[t1] = true;
            touched[t2] = true;
            flipped = true;
        }
        if !flipped {
            return;
        }
    }
}

fn bisector_rays(v: &[Point], boundary: &[usize]) -> Vec<Point> {
    let n = boundary.len();
    (0..n)
        .map(|k| {
            let prev = v[boundary[(k + n - 1) % n]];
            let here = v[boundary[k]];
            let next = v[boundary[(k + 1) % n]];
            let n1 = outward_normal(prev, here);
            let n2 = outward_normal(here, next);
            let s = [n1[0] + n2[0], n1[1] + n2[1]];
            let l = norm(s);
            [s[0] / l, s[1] / l]
        })
        .collect()
}

/// Red refinement: every triangle is split into four through its edge
/// midpoints. Boundary vertices keep their rays; new boundary midpoints get
/// the normal of the edge they split.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh, MeshError> {
    mesh.validate()?;
    let mut vertices = mesh.vertices.clone();
    let mut midpoints: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoints.entry(key).or_insert_with(|| {
            let (p, q) = (vertices[key.0], vertices[key.1]);
            vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let ab = mid(a, b, &mut vertices);
        let bc = mid(b, c, &mut vertices);
        let ca = mid(c, a, &mut vertices);
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    let n = mesh.boundary_loop.len();
    let mut boundary_loop = Vec::with_capacity(2 * n);
    let mut rays = Vec::with_capacity(2 * n);
    for k in 0..n {
        let (p, q) = mesh.boundary_edge(k);
        boundary_loop.push(p);
        rays.push(mesh.rays[k]);
        let m = midpoints[&(p.min(q), p.max(q))];
        boundary_loop.push(m);
        rays.push(outward_normal(mesh.vertices[p], mesh.vertices[q]));
    }
    let refined = Mesh { vertices, triangles, boundary_loop, rays, refinement_level: mesh.refinement_level + 1 };
    refined.validate()?;
    Ok(refined)
}

/// Parameters of the bilinear map from `[0,1] × [0,∞)` onto one exterior
/// trapezoid:
///
/// ```text
/// g(η, ξ) = (1−η)(p0 + ξ w0) + η (p1 + ξ w1),
/// J = R [[h_η + (a+b)ξ, −b + (a+b)η], [0, h_ξ]].
/// ```
///
/// The edge is traversed clockwise (`p0` is the later vertex of the
/// counterclockwise loop) so that `R = [t n]` is a proper rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorElementGeometry {
    pub edge_index: usize,
    /// Global vertex indices of `p0` and `p1`.
    pub vertices: [usize; 2],
    pub p0: Point,
    pub p1: Point,
    pub h_eta: f64,
    pub h_xi: f64,
    pub a: f64,
    pub b: f64,
    /// Columns are the tangent `t = (p1 − p0)/h_η` and the outward normal `n`.
    pub r: [[f64; 2]; 2],
    /// Ray vectors with normal component exactly `h_ξ`.
    pub w0: Point,
    pub w1: Point,
}

impl ExteriorElementGeometry {
    pub fn tangent(&self) -> Point {
        [self.r[0][0], self.r[1][0]]
    }

    pub fn normal(&self) -> Point {
        [self.r[0][1], self.r[1][1]]
    }

    pub fn map(&self, eta: f64, xi: f64) -> Point {
        let q0 = [self.p0[0] + xi * self.w0[0], self.p0[1] + xi * self.w0[1]];
        let q1 = [self.p1[0] + xi * self.w1[0], self.p1[1] + xi * self.w1[1]];
        [(1.0 - eta) * q0[0] + eta * q1[0], (1.0 - eta) * q0[1] + eta * q1[1]]
    }

    /// Jacobian of [`map`](Self::map) (columns ∂/∂η, ∂/∂ξ) and its determinant.
    pub fn jacobian(&self, eta: f64, xi: f64) -> ([[f64; 2]; 2], f64) {
        let s = self.a + self.b;
        let local = [[self.h_eta + s * xi, -self.b + s * eta], [0.0, self.h_xi]];
        let r = self.r;
        let mut j = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                j[i][k] = r[i][0] * local[0][k] + r[i][1] * local[1][k];
            }
        }
        (j, self.h_xi * (self.h_eta + s * xi))
    }
}

/// One exterior element per boundary edge, with `h_ξ = 1`.
pub fn exterior_geometry(mesh: &Mesh) -> Result<Vec<ExteriorElementGeometry>, MeshError> {
    exterior_geometry_scaled(mesh, 1.0)
}

pub fn exterior_geometry_scaled(mesh: &Mesh, h_xi: f64) -> Result<Vec<ExteriorElementGeometry>, MeshError> {
    if !(h_xi > 0.0) {
        return Err(MeshError::NonPositiveDimension);
    }
    let n = mesh.boundary_loop.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (first, second) = mesh.boundary_edge(k);
        let g = ExteriorElementGeometry::from_edge(
            k,
            [first, second],
            [mesh.vertices[first], mesh.vertices[second]],
            [mesh.rays[k], mesh.rays[(k + 1) % n]],
            h_xi,
        )?;
        out.push(g);
    }
    Ok(out)
}

impl ExteriorElementGeometry {
    /// Element behind the counterclockwise boundary edge `points[0] -> points[1]`
    /// with unit ray directions `rays` at those points.
    pub fn from_edge(
        edge_index: usize,
        vertices: [usize; 2],
        points: [Point; 2],
        rays: [Point; 2],
        h_xi: f64,
    ) -> Result<Self, MeshError> {
        let (p0, p1) = (points[1], points[0]);
        let (d0, d1) = (rays[1], rays[0]);
        let e = sub(p1, p0);
        let h_eta = norm(e);
        if !(h_eta > 0.0) {
            return Err(MeshError::Inconsistent("zero-length boundary edge"));
        }
        let t = [e[0] / h_eta, e[1] / h_eta];
        let nrm = outward_normal(points[0], points[1]);
        let (dn0, dn1) = (dot(d0, nrm), dot(d1, nrm));
        if !(dn0 > 0.0 && dn1 > 0.0) {
            return Err(MeshError::RayNotOutward { edge: edge_index });
        }
        let w0 = [d0[0] * h_xi / dn0, d0[1] * h_xi / dn0];
        let w1 = [d1[0] * h_xi / dn1, d1[1] * h_xi / dn1];
        let b = -dot(w0, t);
        let a = dot(w1, t);
        if a + b < -1e-12 * h_xi {
            return Err(MeshError::NegativeSpread { edge: edge_index });
        }
        Ok(ExteriorElementGeometry {
            edge_index,
            vertices: [vertices[1], vertices[0]],
            p0,
            p1,
            h_eta,
            h_xi,
            a,
            b,
            r: [[t[0], nrm[0]], [t[1], nrm[1]]],
            w0,
            w1,
        })
    }
}
