//! Scaling-function evaluation on dyadic grids.
//!
//! Integer-point values come from the eigenvector of the refinement matrix
//! `M[k][j] = sqrt(2) h[2k-j]` at eigenvalue 1, normalized by partition of
//! unity `sum_k phi(k) = 1`. Dyadic points are then filled in level by level
//! with the two-scale relation, which is exact on the dyadic lattice.

use nalgebra::DMatrix;

use crate::error::{Result, WignerError};
use crate::wavelet::filters::WaveletFilter;

/// Residual threshold for accepting the refinement fixed point.
const TWO_SCALE_TOL: f64 = 1e-8;

/// Sampled scaling function on `[0, 2N-1]` with spacing `2^-level`.
#[derive(Debug, Clone)]
pub struct ScalingFunction {
    order: usize,
    refinement_level: u32,
    samples: Vec<f64>,
}

/// Evaluate the scaling function of `filter` on the dyadic grid of
/// `[0, 2N-1]` with spacing `2^-refinement_level`.
pub fn cascade_evaluate(
    filter: &WaveletFilter,
    refinement_level: u32,
) -> Result<ScalingFunction> {
    if refinement_level < 1 {
        return Err(WignerError::InvalidArgument(
            "refinement_level must be >= 1".into(),
        ));
    }
    let support = filter.support_end(); // 2N-1
    let integer_values = integer_values(filter);

    // Fill level by level; index i at level l is the point i/2^l.
    let mut level = 0u32;
    let mut samples: Vec<f64> = integer_values;
    while level < refinement_level {
        let n_new = support * (1usize << (level + 1)) + 1;
        let mut next = vec![0.0; n_new];
        for (i, v) in next.iter_mut().enumerate() {
            if i % 2 == 0 {
                *v = samples[i / 2];
            } else {
                // phi(i/2^(l+1)) = sqrt(2) sum_k h[k] phi((i - k 2^l)/2^l):
                // the argument lands on the previous level's grid.
                let mut acc = 0.0;
                for (k, &h) in filter.low_pass().iter().enumerate() {
                    let idx = i as i64 - (k as i64) * (1i64 << level);
                    if idx >= 0 && (idx as usize) < samples.len() {
                        acc += h * samples[idx as usize];
                    }
                }
                *v = std::f64::consts::SQRT_2 * acc;
            }
        }
        samples = next;
        level += 1;
    }

    let phi = ScalingFunction {
        order: filter.order(),
        refinement_level,
        samples,
    };
    debug_assert!(phi.two_scale_residual(filter) < TWO_SCALE_TOL);
    Ok(phi)
}

/// Values of the scaling function at the integers `0..=2N-1`.
///
/// For N >= 2 the interior values solve the eigenproblem of the refinement
/// matrix; endpoints are zero. Haar is the right-continuous box indicator.
pub fn integer_values(filter: &WaveletFilter) -> Vec<f64> {
    let support = filter.support_end();
    if filter.order() == 1 {
        let mut v = vec![0.0; support + 1];
        v[0] = 1.0;
        return v;
    }
    let n = support - 1; // interior integers 1..=2N-2
    let h = filter.low_pass();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        for j in 1..=n {
            let idx = 2 * k as i64 - j as i64;
            if idx >= 0 && (idx as usize) < h.len() {
                m[(k - 1, j - 1)] = std::f64::consts::SQRT_2 * h[idx as usize];
            }
        }
    }
    // Null vector of (M - I) via SVD.
    let a = m - DMatrix::<f64>::identity(n, n);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("SVD requested with V^T");
    let null = v_t.row(n - 1);
    let sum: f64 = null.iter().sum();
    debug_assert!(sum.abs() > 1e-12, "degenerate refinement eigenvector");
    let mut v = vec![0.0; support + 1];
    for (i, x) in null.iter().enumerate() {
        v[i + 1] = x / sum;
    }
    v
}

impl ScalingFunction {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn refinement_level(&self) -> u32 {
        self.refinement_level
    }

    /// Grid spacing `2^-refinement_level`.
    pub fn step(&self) -> f64 {
        0.5_f64.powi(self.refinement_level as i32)
    }

    /// Samples at `i * step()` for `i = 0..=(2N-1) * 2^level`.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Evaluate at an arbitrary point by linear interpolation, zero outside
    /// the support.
    pub fn eval(&self, x: f64) -> f64 {
        let t = x / self.step();
        if t < 0.0 || t > (self.samples.len() - 1) as f64 {
            return 0.0;
        }
        let i = t.floor() as usize;
        if i + 1 >= self.samples.len() {
            return self.samples[self.samples.len() - 1];
        }
        let frac = t - i as f64;
        self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac
    }

    /// Integral over the support; should be ~1. Left-endpoint Riemann sum,
    /// which coincides with the trapezoid rule for N >= 2 (phi vanishes at
    /// both support endpoints) and is exact for the Haar indicator.
    pub fn integral(&self) -> f64 {
        let s = &self.samples;
        s[..s.len() - 1].iter().sum::<f64>() * self.step()
    }

    /// Max deviation from `phi(x) = sqrt(2) sum_k h[k] phi(2x-k)` over all
    /// sample points where the right-hand side is representable.
    pub fn two_scale_residual(&self, filter: &WaveletFilter) -> f64 {
        let scale = 1i64 << self.refinement_level;
        let mut worst = 0.0f64;
        for i in 0..self.samples.len() {
            let mut acc = 0.0;
            for (k, &h) in filter.low_pass().iter().enumerate() {
                let idx = 2 * i as i64 - k as i64 * scale;
                if idx >= 0 && (idx as usize) < self.samples.len() {
                    acc += h * self.samples[idx as usize];
                }
            }
            let r = (self.samples[i] - std::f64::consts::SQRT_2 * acc).abs();
            worst = worst.max(r);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::filters::daubechies_filter;

    #[test]
    fn haar_is_box_indicator() {
        let f = daubechies_filter(1).unwrap();
        let phi = cascade_evaluate(&f, 4).unwrap();
        let n = phi.samples().len();
        for (i, &v) in phi.samples().iter().enumerate() {
            let expect = if i < n - 1 { 1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-12, "sample {i}: {v}");
        }
    }

    #[test]
    fn db2_integer_value_matches_eigen_solution() {
        // phi(1) = (1 + sqrt 3)/2 for the minimum-phase Daubechies-2 mask.
        let f = daubechies_filter(2).unwrap();
        let phi = cascade_evaluate(&f, 10).unwrap();
        let at_1 = phi.eval(1.0);
        assert!((at_1 - 1.36603).abs() < 1e-5, "phi(1) = {at_1}");
        assert!((at_1 - (1.0 + 3.0_f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn partition_of_unity() {
        for order in 2..=8 {
            let f = daubechies_filter(order).unwrap();
            let phi = cascade_evaluate(&f, 6).unwrap();
            let per = 1usize << 6;
            // sum over integer shifts at points x in [0,1)
            for i in 0..per {
                let mut s = 0.0;
                let mut idx = i;
                while idx < phi.samples().len() {
                    s += phi.samples()[idx];
                    idx += per;
                }
                assert!(
                    (s - 1.0).abs() < 1e-6,
                    "order {order}, point {i}: sum {s}"
                );
            }
        }
    }

    #[test]
    fn two_scale_residual_small_and_integral_one() {
        for order in [1, 2, 4, 6, 10] {
            let f = daubechies_filter(order).unwrap();
            let phi = cascade_evaluate(&f, 10).unwrap();
            assert!(
                phi.two_scale_residual(&f) < 1e-8,
                "order {order} residual"
            );
            assert!(
                (phi.integral() - 1.0).abs() < 1e-6,
                "order {order} integral {}",
                phi.integral()
            );
        }
    }

    #[test]
    fn residual_does_not_grow_with_level() {
        let f = daubechies_filter(6).unwrap();
        let r5 = cascade_evaluate(&f, 5).unwrap().two_scale_residual(&f);
        let r10 = cascade_evaluate(&f, 10).unwrap().two_scale_residual(&f);
        assert!(r10 <= r5.max(1e-12) * 10.0);
        assert!(r10 < 1e-8);
    }

    #[test]
    fn level_zero_rejected() {
        let f = daubechies_filter(2).unwrap();
        assert!(cascade_evaluate(&f, 0).is_err());
    }
}
