//! Plain-text dumps for offline inspection.

use std::fmt::Write as _;

use polecond_core::linalg::CsrMatrix;
use polecond_core::mesh::Mesh;

/// `v x y` per vertex, `t i j k` per triangle, `r i dx dy` per boundary
/// vertex; indices are 0-based.
pub fn mesh_text(mesh: &Mesh) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {}", v[0], v[1]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "t {} {} {}", t[0], t[1], t[2]);
    }
    for (&i, d) in mesh.boundary_loop.iter().zip(&mesh.rays) {
        let _ = writeln!(s, "r {} {} {}", i, d[0], d[1]);
    }
    s
}

/// Coordinate format, one stored entry per line: `i j re im`.
pub fn matrix_text(a: &CsrMatrix) -> String {
    let mut s = String::new();
    for i in 0..a.nrows() {
        for (j, v) in a.row(i) {
            let _ = writeln!(s, "{i} {j} {} {}", v.re, v.im);
        }
    }
    s
}
