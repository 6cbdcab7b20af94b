//! Wigner-field data model: the phase-space grid, physical parameters,
//! canonical initial states, diagnostics, and multiscale decompositions.

pub mod diagnostics;
pub mod field;
pub mod multiscale;
pub mod states;

pub use diagnostics::{
    classify_state, energy_expectation, marginals, negativity_volume, purity,
    ClassifierThresholds, DiagnosticsRecord, Regime,
};
pub use field::WignerField;
pub use multiscale::{
    decompose_multiscale_field, decompose_multiscale_series, MultiscaleDecomposition,
};
pub use states::{cat_state, gaussian_coherent_state, wigner_from_wavefunction};

use crate::error::{Result, WignerError};

/// Dyadic phase-space box `[q_min, q_max) x [p_min, p_max)` with a
/// `2^J x 2^J` periodic grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhaseSpaceGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub level: u32,
}

impl PhaseSpaceGrid {
    pub fn new(q_min: f64, q_max: f64, p_min: f64, p_max: f64, level: u32) -> Result<Self> {
        let g = PhaseSpaceGrid {
            q_min,
            q_max,
            p_min,
            p_max,
            level,
        };
        g.validate()?;
        Ok(g)
    }

    /// Symmetric box `[-half, half)^2`.
    pub fn symmetric(half: f64, level: u32) -> Result<Self> {
        PhaseSpaceGrid::new(-half, half, -half, half, level)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_max > self.q_min) || !(self.p_max > self.p_min) {
            return Err(WignerError::InvalidArgument(format!(
                "degenerate phase-space box [{}, {}] x [{}, {}]",
                self.q_min, self.q_max, self.p_min, self.p_max
            )));
        }
        if self.level < 4 {
            return Err(WignerError::InvalidArgument(format!(
                "grid level {} below the minimum 4",
                self.level
            )));
        }
        if self.level > 12 {
            return Err(WignerError::InvalidArgument(format!(
                "grid level {} above the practical cap 12",
                self.level
            )));
        }
        Ok(())
    }

    /// Points per axis, `2^level`.
    pub fn n(&self) -> usize {
        1usize << self.level
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.n() as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.n() as f64
    }

    /// Quadrature cell weight `dq * dp`.
    pub fn cell_area(&self) -> f64 {
        self.dq() * self.dp()
    }

    pub fn q_at(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq()
    }

    pub fn p_at(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    pub fn q_values(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.q_at(i)).collect()
    }

    pub fn p_values(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.p_at(j)).collect()
    }

    /// Grid index closest to `q` (clamped).
    pub fn q_index(&self, q: f64) -> usize {
        let i = ((q - self.q_min) / self.dq()).round() as i64;
        i.clamp(0, self.n() as i64 - 1) as usize
    }
}

/// Physical constants of a run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    /// friction rate gamma >= 0 (1/time)
    pub gamma: f64,
    /// momentum diffusion D >= 0 (momentum^2/time)
    pub diffusion: f64,
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64, gamma: f64, diffusion: f64) -> Result<Self> {
        let p = PhysicalParams {
            hbar,
            mass,
            gamma,
            diffusion,
        };
        p.validate()?;
        Ok(p)
    }

    /// hbar = mass = 1, no environment coupling.
    pub fn unit_closed() -> Self {
        PhysicalParams {
            hbar: 1.0,
            mass: 1.0,
            gamma: 0.0,
            diffusion: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) {
            return Err(WignerError::InvalidArgument(format!(
                "hbar must be > 0 (got {})",
                self.hbar
            )));
        }
        if !(self.mass > 0.0) {
            return Err(WignerError::InvalidArgument(format!(
                "mass must be > 0 (got {})",
                self.mass
            )));
        }
        if self.gamma < 0.0 {
            return Err(WignerError::InvalidArgument(format!(
                "gamma must be >= 0 (got {})",
                self.gamma
            )));
        }
        if self.diffusion < 0.0 {
            return Err(WignerError::InvalidArgument(format!(
                "diffusion must be >= 0 (got {})",
                self.diffusion
            )));
        }
        Ok(())
    }
}
