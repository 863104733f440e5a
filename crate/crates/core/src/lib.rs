//! Finite element solver for time-dependent PDEs of the form
//!
//! ```text
//! p(∂t) u = c² Δu − d·∇u − k² u
//! ```
//!
//! on a truncated convex domain, with transparent boundary conditions
//! imposed by the pole condition. The exterior is decomposed into
//! semi-infinite trapezoids; along every ray the solution is expanded in a
//! truncated monomial basis of the Hardy space on the unit disc, obtained
//! from the spatial Laplace transform through a Möbius map.
//!
//! The crate is `no_std` and only needs `alloc`. Everything touching files,
//! configuration or the command line lives in the companion `polecond` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod hardy;
pub mod linalg;
pub mod mesh;
pub mod system;

pub use num_complex::Complex64 as C64;


/// Shorthand used throughout for complex literals.
#[inline]
pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
