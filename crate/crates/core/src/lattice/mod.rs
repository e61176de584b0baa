//! Construction-A lattices, nearest-point quantization and shaped codebooks.

pub mod code;
pub mod codebook;
pub mod construction;

pub use code::{is_prime, make_linear_code, LinearCode};
pub use codebook::{ball_volume, build_codebook, mean_power, target_size, Codebook};
pub use construction::{construction_a, scale_lattice, Lattice, LatticeDoc};
