//! Compactly supported wavelet machinery: Daubechies filters, scaling
//! function evaluation, periodic 1D/2D transforms, wavelet packets with
//! entropy best basis, connection coefficients, and the sample/coefficient
//! maps used by the Galerkin operators.
//!
//! Everything here is a pure function of its inputs; the filter moment and
//! connection-coefficient caches are initialize-once and idempotent.

pub mod basis;
pub mod cascade;
pub mod connection;
pub mod filters;
pub mod packets;
pub mod transform;

pub use basis::ScalingBasis;
pub use cascade::{cascade_evaluate, ScalingFunction};
pub use connection::{
    connection_coefficients, connection_coefficients_for_order, moment_table,
    ConnectionTable, MomentTable,
};
pub use filters::{daubechies_filter, WaveletFilter, MAX_ORDER};
pub use packets::{best_basis, shannon_entropy, BasisNode, BasisTree, BestBasis, PacketBand};
pub use transform::{dwt_1d, dwt_2d, idwt_1d, inverse_dwt_2d, CoefficientPyramid, Subband};
