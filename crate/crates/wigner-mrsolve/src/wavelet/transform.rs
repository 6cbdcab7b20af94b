//! Periodic orthogonal DWT in one and two dimensions.
//!
//! Boundary handling is periodic wrap, so the transform is exactly
//! orthogonal at every level and Parseval holds to rounding. Fields are
//! required to be dyadic (2^J samples per axis).

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::error::{Result, WignerError};
use crate::wavelet::filters::WaveletFilter;

/// Detail subband of one 2D transform step. Rows are axis 0 (q), columns
/// axis 1 (p); `LowHigh` = low-pass rows, high-pass columns, etc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Subband {
    LowHigh,
    HighLow,
    HighHigh,
}

/// Multiresolution coefficients of a 2^J x 2^J field.
///
/// The coarse block holds scaling coefficients at `base_level`; detail
/// bands are keyed by `(level, subband)` for `level` in
/// `base_level..top_level`. The total coefficient count equals the field
/// sample count (non-redundant orthogonal transform).
#[derive(Debug, Clone)]
pub struct CoefficientPyramid {
    base_level: u32,
    top_level: u32,
    coarse: Array2<f64>,
    bands: BTreeMap<(u32, Subband), Array2<f64>>,
}

fn is_dyadic(n: usize) -> bool {
    n >= 2 && n.is_power_of_two()
}

fn check_square_dyadic(shape: (usize, usize)) -> Result<u32> {
    let (r, c) = shape;
    if r != c || !is_dyadic(r) {
        return Err(WignerError::InvalidArgument(format!(
            "field shape {r}x{c} is not square dyadic (need 2^J x 2^J)"
        )));
    }
    Ok(r.trailing_zeros())
}

/// One periodic analysis step: returns (approx, detail), each half length.
pub fn dwt_step_1d(signal: &[f64], filter: &WaveletFilter) -> (Vec<f64>, Vec<f64>) {
    let n = signal.len();
    let half = n / 2;
    let h = filter.low_pass();
    let g = filter.high_pass();
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for m in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for k in 0..h.len() {
            let s = signal[(2 * m + k) % n];
            a += h[k] * s;
            d += g[k] * s;
        }
        approx[m] = a;
        detail[m] = d;
    }
    (approx, detail)
}

/// Inverse of [`dwt_step_1d`].
pub fn idwt_step_1d(
    approx: &[f64],
    detail: &[f64],
    filter: &WaveletFilter,
) -> Vec<f64> {
    let half = approx.len();
    let n = 2 * half;
    let h = filter.low_pass();
    let g = filter.high_pass();
    let mut out = vec![0.0; n];
    for m in 0..half {
        for k in 0..h.len() {
            let idx = (2 * m + k) % n;
            out[idx] += h[k] * approx[m] + g[k] * detail[m];
        }
    }
    out
}

/// Multi-level periodic 1D DWT: `(coarse approx, details)` with details
/// ordered finest-first deepest-last (index 0 = level J-1, last = base).
pub fn dwt_1d(
    signal: &[f64],
    filter: &WaveletFilter,
    levels: u32,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if !is_dyadic(signal.len()) {
        return Err(WignerError::InvalidArgument(format!(
            "signal length {} is not a power of two",
            signal.len()
        )));
    }
    let j = signal.len().trailing_zeros();
    if levels < 1 || levels > j {
        return Err(WignerError::InvalidArgument(format!(
            "levels {levels} out of range 1..={j}"
        )));
    }
    let mut approx = signal.to_vec();
    let mut details = Vec::new();
    for _ in 0..levels {
        let (a, d) = dwt_step_1d(&approx, filter);
        details.push(d);
        approx = a;
    }
    Ok((approx, details))
}

/// Inverse of [`dwt_1d`].
pub fn idwt_1d(
    coarse: &[f64],
    details: &[Vec<f64>],
    filter: &WaveletFilter,
) -> Vec<f64> {
    let mut approx = coarse.to_vec();
    for d in details.iter().rev() {
        approx = idwt_step_1d(&approx, d, filter);
    }
    approx
}

fn transform_rows(field: &Array2<f64>, filter: &WaveletFilter) -> (Array2<f64>, Array2<f64>) {
    let (nr, nc) = field.dim();
    let mut low = Array2::zeros((nr / 2, nc));
    let mut high = Array2::zeros((nr / 2, nc));
    for c in 0..nc {
        let col: Vec<f64> = (0..nr).map(|r| field[(r, c)]).collect();
        let (a, d) = dwt_step_1d(&col, filter);
        for m in 0..nr / 2 {
            low[(m, c)] = a[m];
            high[(m, c)] = d[m];
        }
    }
    (low, high)
}

fn transform_cols(field: &Array2<f64>, filter: &WaveletFilter) -> (Array2<f64>, Array2<f64>) {
    let (nr, nc) = field.dim();
    let mut low = Array2::zeros((nr, nc / 2));
    let mut high = Array2::zeros((nr, nc / 2));
    for r in 0..nr {
        let row: Vec<f64> = (0..nc).map(|c| field[(r, c)]).collect();
        let (a, d) = dwt_step_1d(&row, filter);
        for m in 0..nc / 2 {
            low[(r, m)] = a[m];
            high[(r, m)] = d[m];
        }
    }
    (low, high)
}

fn inverse_rows(low: &Array2<f64>, high: &Array2<f64>, filter: &WaveletFilter) -> Array2<f64> {
    let (half, nc) = low.dim();
    let mut out = Array2::zeros((half * 2, nc));
    for c in 0..nc {
        let a: Vec<f64> = (0..half).map(|r| low[(r, c)]).collect();
        let d: Vec<f64> = (0..half).map(|r| high[(r, c)]).collect();
        let s = idwt_step_1d(&a, &d, filter);
        for (r, v) in s.into_iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    out
}

fn inverse_cols(low: &Array2<f64>, high: &Array2<f64>, filter: &WaveletFilter) -> Array2<f64> {
    let (nr, half) = low.dim();
    let mut out = Array2::zeros((nr, half * 2));
    for r in 0..nr {
        let a: Vec<f64> = (0..half).map(|c| low[(r, c)]).collect();
        let d: Vec<f64> = (0..half).map(|c| high[(r, c)]).collect();
        let s = idwt_step_1d(&a, &d, filter);
        for (c, v) in s.into_iter().enumerate() {
            out[(r, c)] = v;
        }
    }
    out
}

/// One separable 2D analysis step: `(LL, LH, HL, HH)`, each half size.
pub fn dwt_step_2d(
    field: &Array2<f64>,
    filter: &WaveletFilter,
) -> (Array2<f64>, Array2<f64>, Array2<f64>, Array2<f64>) {
    let (low_r, high_r) = transform_rows(field, filter);
    let (ll, lh) = transform_cols(&low_r, filter);
    let (hl, hh) = transform_cols(&high_r, filter);
    (ll, lh, hl, hh)
}

/// Inverse of [`dwt_step_2d`].
pub fn idwt_step_2d(
    ll: &Array2<f64>,
    lh: &Array2<f64>,
    hl: &Array2<f64>,
    hh: &Array2<f64>,
    filter: &WaveletFilter,
) -> Array2<f64> {
    let low_r = inverse_cols(ll, lh, filter);
    let high_r = inverse_cols(hl, hh, filter);
    inverse_rows(&low_r, &high_r, filter)
}

/// Multi-level 2D DWT of a 2^J x 2^J field.
pub fn dwt_2d(
    field: &Array2<f64>,
    filter: &WaveletFilter,
    levels: u32,
) -> Result<CoefficientPyramid> {
    let j = check_square_dyadic(field.dim())?;
    if levels < 1 || levels > j {
        return Err(WignerError::InvalidArgument(format!(
            "levels {levels} out of range 1..={j}"
        )));
    }
    let mut bands = BTreeMap::new();
    let mut approx = field.clone();
    for step in 0..levels {
        let level = j - step - 1; // scale level of the produced bands
        let (ll, lh, hl, hh) = dwt_step_2d(&approx, filter);
        bands.insert((level, Subband::LowHigh), lh);
        bands.insert((level, Subband::HighLow), hl);
        bands.insert((level, Subband::HighHigh), hh);
        approx = ll;
    }
    Ok(CoefficientPyramid {
        base_level: j - levels,
        top_level: j,
        coarse: approx,
        bands,
    })
}

/// Reconstruct the field from a pyramid.
pub fn inverse_dwt_2d(pyramid: &CoefficientPyramid, filter: &WaveletFilter) -> Array2<f64> {
    let mut approx = pyramid.coarse.clone();
    for level in pyramid.base_level..pyramid.top_level {
        let lh = &pyramid.bands[&(level, Subband::LowHigh)];
        let hl = &pyramid.bands[&(level, Subband::HighLow)];
        let hh = &pyramid.bands[&(level, Subband::HighHigh)];
        approx = idwt_step_2d(&approx, lh, hl, hh, filter);
    }
    approx
}

impl CoefficientPyramid {
    pub fn base_level(&self) -> u32 {
        self.base_level
    }

    pub fn top_level(&self) -> u32 {
        self.top_level
    }

    /// Shape of the field this pyramid came from.
    pub fn field_shape(&self) -> (usize, usize) {
        let n = 1usize << self.top_level;
        (n, n)
    }

    pub fn coarse(&self) -> &Array2<f64> {
        &self.coarse
    }

    pub fn band(&self, level: u32, subband: Subband) -> Option<&Array2<f64>> {
        self.bands.get(&(level, subband))
    }

    pub fn band_mut(&mut self, level: u32, subband: Subband) -> Option<&mut Array2<f64>> {
        self.bands.get_mut(&(level, subband))
    }

    pub fn coarse_mut(&mut self) -> &mut Array2<f64> {
        &mut self.coarse
    }

    pub fn bands(&self) -> impl Iterator<Item = (&(u32, Subband), &Array2<f64>)> {
        self.bands.iter()
    }

    /// Total number of coefficients; equals the field sample count.
    pub fn coefficient_count(&self) -> usize {
        self.coarse.len() + self.bands.values().map(|b| b.len()).sum::<usize>()
    }

    /// All coefficients, coarse block first, then bands in key order.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coefficient_count());
        out.extend(self.coarse.iter().copied());
        for band in self.bands.values() {
            out.extend(band.iter().copied());
        }
        out
    }

    /// Sum of squared coefficients (for Parseval checks).
    pub fn energy(&self) -> f64 {
        let mut e: f64 = self.coarse.iter().map(|c| c * c).sum();
        for band in self.bands.values() {
            e += band.iter().map(|c| c * c).sum::<f64>();
        }
        e
    }

    /// Apply `f` to every coefficient in place.
    pub fn map_coefficients_mut(&mut self, mut f: impl FnMut(f64) -> f64) {
        for c in self.coarse.iter_mut() {
            *c = f(*c);
        }
        for band in self.bands.values_mut() {
            for c in band.iter_mut() {
                *c = f(*c);
            }
        }
    }

    /// Zero all detail bands except level `level` and clear the coarse
    /// block unless `keep_coarse`; used for per-band reconstructions.
    pub fn isolate(&self, level: Option<u32>, keep_coarse: bool) -> CoefficientPyramid {
        let mut out = self.clone();
        if !keep_coarse {
            out.coarse.fill(0.0);
        }
        for ((l, _), band) in out.bands.iter_mut() {
            if Some(*l) != level {
                band.fill(0.0);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::filters::daubechies_filter;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(j: u32, seed: u64) -> Array2<f64> {
        let n = 1usize << j;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn constant_field_haar_concentrates_in_coarse() {
        let f = daubechies_filter(1).unwrap();
        let field = Array2::from_elem((32, 32), 3.25);
        let pyr = dwt_2d(&field, &f, 5).unwrap();
        for (_, band) in pyr.bands() {
            for &c in band.iter() {
                assert!(c.abs() < 1e-12);
            }
        }
        let total: f64 = field.iter().map(|v| v * v).sum();
        assert!((pyr.coarse()[(0, 0)].powi(2) - total).abs() < 1e-8);
    }

    #[test]
    fn round_trip_and_parseval() {
        for order in [1, 2, 6] {
            let f = daubechies_filter(order).unwrap();
            let field = random_field(6, 7 + order as u64);
            let pyr = dwt_2d(&field, &f, 4).unwrap();
            assert_eq!(pyr.coefficient_count(), field.len());
            let field_energy: f64 = field.iter().map(|v| v * v).sum();
            let rel = (pyr.energy() - field_energy).abs() / field_energy;
            assert!(rel < 1e-10, "order {order}: parseval {rel}");
            let back = inverse_dwt_2d(&pyr, &f);
            let err: f64 = field
                .iter()
                .zip(back.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                / field_energy.sqrt();
            assert!(err < 1e-10, "order {order}: roundtrip {err}");
        }
    }

    #[test]
    fn single_wavelet_injection_recovers_one_coefficient() {
        let f = daubechies_filter(4).unwrap();
        let zero = Array2::zeros((64, 64));
        let mut pyr = dwt_2d(&zero, &f, 3).unwrap();
        // inject a unit coefficient in a fine band
        let band = pyr.bands.get_mut(&(5, Subband::HighLow)).unwrap();
        band[(7, 11)] = 1.0;
        let field = inverse_dwt_2d(&pyr, &f);
        let rec = dwt_2d(&field, &f, 3).unwrap();
        let mut nonzero = 0;
        for &c in rec.coefficients().iter() {
            if c.abs() > 1e-10 {
                nonzero += 1;
            }
        }
        assert_eq!(nonzero, 1);
        assert!((rec.band(5, Subband::HighLow).unwrap()[(7, 11)] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_dyadic_rejected() {
        let f = daubechies_filter(2).unwrap();
        let field = Array2::zeros((48, 48));
        assert!(dwt_2d(&field, &f, 2).is_err());
        let rect = Array2::zeros((32, 64));
        assert!(dwt_2d(&rect, &f, 2).is_err());
    }

    #[test]
    fn one_d_round_trip() {
        let f = daubechies_filter(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let signal: Vec<f64> = (0..256).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (coarse, details) = dwt_1d(&signal, &f, 5).unwrap();
        let back = idwt_1d(&coarse, &details, &f);
        for (a, b) in signal.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
        let e1: f64 = signal.iter().map(|v| v * v).sum();
        let e2: f64 = coarse.iter().map(|v| v * v).sum::<f64>()
            + details
                .iter()
                .map(|d| d.iter().map(|v| v * v).sum::<f64>())
                .sum::<f64>();
        assert!((e1 - e2).abs() / e1 < 1e-12);
    }
}
