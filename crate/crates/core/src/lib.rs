//! Exact big quantum cohomology of the Grassmannian Gr(2,4), the Dubrovin
//! operator `K^t` over a truncated Novikov ring, and its spectrum.

pub mod dubrovin;
pub mod eigen;
pub mod engine;
pub mod gw;
pub mod matrix;
pub mod schubert;
pub mod series;
pub mod spectral;
