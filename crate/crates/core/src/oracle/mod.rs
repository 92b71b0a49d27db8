//! Independent reference computations. Nothing here is used by the
//! production paths; tests and the harness `--oracle` mode compare against
//! these.

mod quadrature;
mod spectrum;
mod wick;

pub use quadrature::{
    composition_quadrature, fock_toeplitz_quadrature, gauss_hermite, gauss_legendre, section_norm_quadrature,
    sphere_toeplitz_quadrature,
};
pub use spectrum::spectrum_bruteforce;
pub use wick::wick_compose;
