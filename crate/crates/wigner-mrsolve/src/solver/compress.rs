//! Coefficient thresholding: hard-zero everything below a relative cut.

use crate::wavelet::CoefficientPyramid;

/// Result bookkeeping of one compression pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionReport {
    pub kept_fraction: f64,
    /// relative L2 reconstruction error (orthogonal transform, so this is
    /// exactly the norm ratio of dropped coefficients)
    pub l2_error: f64,
    pub threshold: f64,
}

/// Zero coefficients with `|c| < eps * max|c|`. Returns the compressed
/// pyramid and the report; the error obeys `l2_error <= eps * sqrt(count)`.
pub fn threshold_compress(
    pyramid: &CoefficientPyramid,
    eps: f64,
) -> (CoefficientPyramid, CompressionReport) {
    assert!(eps >= 0.0, "threshold must be nonnegative");
    let coeffs = pyramid.coefficients();
    let count = coeffs.len();
    let max = coeffs.iter().fold(0.0f64, |m, &c| m.max(c.abs()));
    let cut = eps * max;

    let total_sq: f64 = coeffs.iter().map(|c| c * c).sum();
    let mut dropped_sq = 0.0;
    let mut kept = 0usize;
    let mut out = pyramid.clone();
    out.map_coefficients_mut(|c| {
        if c.abs() < cut {
            dropped_sq += c * c;
            0.0
        } else {
            kept += 1;
            c
        }
    });

    let l2_error = if total_sq > 0.0 {
        (dropped_sq / total_sq).sqrt()
    } else {
        0.0
    };
    let report = CompressionReport {
        kept_fraction: kept as f64 / count as f64,
        l2_error,
        threshold: cut,
    };
    // guaranteed bound: each dropped |c| < eps * max <= eps * ||c||_2
    debug_assert!(report.l2_error <= eps * (count as f64).sqrt() + 1e-15);
    (out, report)
}
