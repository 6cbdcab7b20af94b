//! Multiscale decomposition of fields and diagnostic time series into a
//! slow part plus dyadic frequency bands.
//!
//! The slow part is the reconstruction from scaling coefficients at levels
//! up to the cutoff; band `l` is the reconstruction from the detail
//! coefficients at level `l` alone. By linearity the parts sum back to the
//! input, and band energies follow Parseval.

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::error::{Result, WignerError};
use crate::phase_space::field::WignerField;
use crate::wavelet::transform::{dwt_1d, dwt_2d, idwt_1d, inverse_dwt_2d};
use crate::wavelet::WaveletFilter;

/// Decomposition into `slow + sum_l band_l`.
#[derive(Debug, Clone)]
pub struct MultiscaleDecomposition<T> {
    pub slow_part: T,
    /// band components keyed by scale level `l >= cutoff`
    pub band_parts: BTreeMap<u32, T>,
    /// coefficient energy per band (Parseval bookkeeping)
    pub band_energy: BTreeMap<u32, f64>,
    pub slow_energy: f64,
    pub total_energy: f64,
}

impl<T> MultiscaleDecomposition<T> {
    /// `slow_energy + sum band_energy` (should equal `total_energy`).
    pub fn energy_sum(&self) -> f64 {
        self.slow_energy + self.band_energy.values().sum::<f64>()
    }
}

/// Decompose a Wigner field: slow part = scale levels <= `cutoff`.
pub fn decompose_multiscale_field(
    field: &WignerField,
    filter: &WaveletFilter,
    cutoff: u32,
) -> Result<MultiscaleDecomposition<Array2<f64>>> {
    let j = field.grid().level;
    if cutoff >= j {
        return Err(WignerError::InvalidArgument(format!(
            "cutoff {cutoff} out of range 0..{j}"
        )));
    }
    let levels = j - cutoff;
    let pyr = dwt_2d(field.values(), filter, levels)?;
    let total_energy = pyr.energy();

    let slow = inverse_dwt_2d(&pyr.isolate(None, true), filter);
    let slow_energy: f64 = pyr.coarse().iter().map(|c| c * c).sum();

    let mut band_parts = BTreeMap::new();
    let mut band_energy = BTreeMap::new();
    for level in cutoff..j {
        let part = inverse_dwt_2d(&pyr.isolate(Some(level), false), filter);
        let mut e = 0.0;
        for ((l, _), band) in pyr.bands() {
            if *l == level {
                e += band.iter().map(|c| c * c).sum::<f64>();
            }
        }
        band_parts.insert(level, part);
        band_energy.insert(level, e);
    }

    Ok(MultiscaleDecomposition {
        slow_part: slow,
        band_parts,
        band_energy,
        slow_energy,
        total_energy,
    })
}

/// Pad a series to the next power of two by symmetric reflection.
fn reflect_pad(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    let target = n.next_power_of_two().max(2);
    let mut out = Vec::with_capacity(target);
    out.extend_from_slice(series);
    // reflect without repeating the edge sample; wrap if the tail is long
    let mut i = n as i64 - 2;
    let mut step = -1i64;
    while out.len() < target {
        if i < 0 {
            i = 0;
            step = 1;
        }
        if i as usize >= n {
            i = n as i64 - 1;
            step = -1;
        }
        out.push(series[i as usize]);
        i += step;
    }
    out
}

/// Decompose a diagnostic time series sampled at fixed dt. The series is
/// reflect-padded to dyadic length; components are truncated back, so
/// `slow + sum bands` still reconstructs the input exactly.
pub fn decompose_multiscale_series(
    series: &[f64],
    filter: &WaveletFilter,
    cutoff: u32,
) -> Result<MultiscaleDecomposition<Vec<f64>>> {
    if series.len() < 2 {
        return Err(WignerError::InvalidArgument(
            "series needs at least 2 samples".into(),
        ));
    }
    let padded = reflect_pad(series);
    let j = padded.len().trailing_zeros();
    if cutoff >= j {
        return Err(WignerError::InvalidArgument(format!(
            "cutoff {cutoff} out of range 0..{j}"
        )));
    }
    let levels = j - cutoff;
    let (coarse, details) = dwt_1d(&padded, filter, levels)?;
    let total_energy: f64 = coarse.iter().map(|c| c * c).sum::<f64>()
        + details
            .iter()
            .map(|d| d.iter().map(|c| c * c).sum::<f64>())
            .sum::<f64>();

    let n = series.len();
    let zero_details: Vec<Vec<f64>> = details.iter().map(|d| vec![0.0; d.len()]).collect();

    let mut slow = idwt_1d(&coarse, &zero_details, filter);
    slow.truncate(n);
    let slow_energy: f64 = coarse.iter().map(|c| c * c).sum();

    let mut band_parts = BTreeMap::new();
    let mut band_energy = BTreeMap::new();
    // details[0] is the finest band (level j-1), the last is level cutoff
    for (idx, d) in details.iter().enumerate() {
        let level = j - 1 - idx as u32;
        let mut ds = zero_details.clone();
        ds[idx] = d.clone();
        let mut part = idwt_1d(&vec![0.0; coarse.len()], &ds, filter);
        part.truncate(n);
        band_parts.insert(level, part);
        band_energy.insert(level, d.iter().map(|c| c * c).sum());
    }

    Ok(MultiscaleDecomposition {
        slow_part: slow,
        band_parts,
        band_energy,
        slow_energy,
        total_energy,
    })
}
