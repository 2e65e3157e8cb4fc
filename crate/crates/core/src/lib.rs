//! Design and analysis of permutation-polynomial interleavers for turbo codes.
//!
//! The crate covers the algebra of degree-≤3 polynomials over `Z_L` and their
//! null polynomials ([`poly`]), the Lee-metric spread of an interleaver
//! ([`spread`]), the `G = [1, 15/13]` turbo encoder ([`turbo`]), low-weight
//! distance spectra ([`spectrum`]), truncated union bounds ([`tub`]) and the
//! largest-spread / best-spectrum interleaver search ([`search`]).

pub mod error;
pub mod perm;
pub mod poly;
pub mod presets;
pub mod report;
pub mod search;
pub mod spectrum;
pub mod spread;
pub mod tub;
pub mod turbo;

pub use error::{Error, Result};
pub use perm::{inverse_permutation, Permutation};
pub use poly::{null_polynomials, triangular_class, ModPoly};
pub use spectrum::{
    brute_force_spectrum, distance_spectrum, merge_spectra, DistanceSpectrum, SpectrumLine,
};
pub use spread::{circular_distance, lee_point_distance, spread, SpreadResult};
pub use tub::{tub_awgn, tub_rayleigh, BoundResult, ChannelModel};
pub use turbo::{
    code_rate, codeword_weight, rsc_encode_terminated, turbo_encode, RscSpec, TurboCodeword,
};
