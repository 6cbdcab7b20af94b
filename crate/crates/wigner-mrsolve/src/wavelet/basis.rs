//! Maps between grid samples and scaling-function coefficients at the
//! finest level.
//!
//! Synthesis is exact: on the dyadic grid, `f(y_i) = sum_k phi(k) c_{i-k}`
//! with `phi` evaluated at the integers. Analysis is an order-N quadrature
//! prefilter whose discrete moments match the continuous moments of `phi`,
//! so polynomials of degree < N round-trip exactly. Coefficients are kept
//! in "sample scale" (the `2^(J/2)` factors per axis are folded in), which
//! makes `sum(coeffs) = sum(samples)` exact in both directions.

use ndarray::Array2;

use crate::error::Result;
use crate::wavelet::cascade;
use crate::wavelet::connection::moment_table;
use crate::wavelet::filters::WaveletFilter;

/// Prefilter/synthesis pair for one wavelet order.
#[derive(Debug, Clone)]
pub struct ScalingBasis {
    order: usize,
    /// analysis taps: c_n = sum_s w[s] f[n + s0 + s]
    analysis_taps: Vec<f64>,
    analysis_offset: i64,
    /// synthesis taps: f_i = sum_k phi_int[k] c[i - k]
    synthesis_taps: Vec<f64>,
}

impl ScalingBasis {
    pub fn new(filter: &WaveletFilter) -> Result<Self> {
        let n = filter.order();
        let moments = moment_table(filter);

        // Solve sum_s w_s (s0+s)^r = m_r for r < N (Vandermonde system).
        let k = n;
        let s0 = (moments.scaling_moment(1) - (k as f64 - 1.0) / 2.0).floor() as i64;
        let mut a = nalgebra::DMatrix::<f64>::zeros(k, k);
        let mut b = nalgebra::DVector::<f64>::zeros(k);
        for r in 0..k {
            for (si, col) in (0..k).enumerate() {
                let s = (s0 + si as i64) as f64;
                a[(r, col)] = s.powi(r as i32);
            }
            b[r] = moments.scaling_moment(r);
        }
        let w = a
            .lu()
            .solve(&b)
            .expect("prefilter Vandermonde system is nonsingular");

        let synthesis_taps = cascade::integer_values(filter);
        Ok(ScalingBasis {
            order: n,
            analysis_taps: w.iter().copied().collect(),
            analysis_offset: s0,
            synthesis_taps,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn analyze_axis0(&self, input: &Array2<f64>) -> Array2<f64> {
        let (nr, nc) = input.dim();
        let mut out = Array2::zeros((nr, nc));
        for c in 0..nc {
            for i in 0..nr {
                let mut acc = 0.0;
                for (si, &w) in self.analysis_taps.iter().enumerate() {
                    let idx = (i as i64 + self.analysis_offset + si as i64)
                        .rem_euclid(nr as i64) as usize;
                    acc += w * input[(idx, c)];
                }
                out[(i, c)] = acc;
            }
        }
        out
    }

    fn analyze_axis1(&self, input: &Array2<f64>) -> Array2<f64> {
        let (nr, nc) = input.dim();
        let mut out = Array2::zeros((nr, nc));
        for r in 0..nr {
            for i in 0..nc {
                let mut acc = 0.0;
                for (si, &w) in self.analysis_taps.iter().enumerate() {
                    let idx = (i as i64 + self.analysis_offset + si as i64)
                        .rem_euclid(nc as i64) as usize;
                    acc += w * input[(r, idx)];
                }
                out[(r, i)] = acc;
            }
        }
        out
    }

    fn synth_axis0(&self, input: &Array2<f64>) -> Array2<f64> {
        let (nr, nc) = input.dim();
        let mut out = Array2::zeros((nr, nc));
        for c in 0..nc {
            for i in 0..nr {
                let mut acc = 0.0;
                for (k, &p) in self.synthesis_taps.iter().enumerate() {
                    if p != 0.0 {
                        let idx = (i as i64 - k as i64).rem_euclid(nr as i64) as usize;
                        acc += p * input[(idx, c)];
                    }
                }
                out[(i, c)] = acc;
            }
        }
        out
    }

    fn synth_axis1(&self, input: &Array2<f64>) -> Array2<f64> {
        let (nr, nc) = input.dim();
        let mut out = Array2::zeros((nr, nc));
        for r in 0..nr {
            for i in 0..nc {
                let mut acc = 0.0;
                for (k, &p) in self.synthesis_taps.iter().enumerate() {
                    if p != 0.0 {
                        let idx = (i as i64 - k as i64).rem_euclid(nc as i64) as usize;
                        acc += p * input[(r, idx)];
                    }
                }
                out[(r, i)] = acc;
            }
        }
        out
    }

    /// Grid samples -> scaling coefficients (both axes).
    pub fn to_coefficients(&self, samples: &Array2<f64>) -> Array2<f64> {
        self.analyze_axis1(&self.analyze_axis0(samples))
    }

    /// Scaling coefficients -> grid samples (both axes); exact for any
    /// field in the span of the basis.
    pub fn to_samples(&self, coeffs: &Array2<f64>) -> Array2<f64> {
        self.synth_axis1(&self.synth_axis0(coeffs))
    }

    /// 1D variants used by diagnostics on series.
    pub fn to_coefficients_1d(&self, samples: &[f64]) -> Vec<f64> {
        let n = samples.len();
        (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for (si, &w) in self.analysis_taps.iter().enumerate() {
                    let idx = (i as i64 + self.analysis_offset + si as i64)
                        .rem_euclid(n as i64) as usize;
                    acc += w * samples[idx];
                }
                acc
            })
            .collect()
    }

    pub fn to_samples_1d(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = coeffs.len();
        (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for (k, &p) in self.synthesis_taps.iter().enumerate() {
                    if p != 0.0 {
                        let idx = (i as i64 - k as i64).rem_euclid(n as i64) as usize;
                        acc += p * coeffs[idx];
                    }
                }
                acc
            })
            .collect()
    }
}
