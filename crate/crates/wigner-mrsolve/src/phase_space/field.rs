//! The central state object: a real Wigner field on a dyadic grid.

use ndarray::Array2;

use crate::error::{Result, WignerError};
use crate::phase_space::PhaseSpaceGrid;

/// Normalization tolerance for fields labeled physical.
pub const NORM_TOL: f64 = 1e-6;

/// Real-valued `W(q, p)` on a `2^J x 2^J` grid. Axis 0 is q, axis 1 is p.
///
/// Emitted fields are normalized to `integral W dq dp = 1` within 1e-6;
/// unnormalized work arrays stay plain `Array2<f64>` and never leave the
/// crate as `WignerField`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    grid: PhaseSpaceGrid,
    values: Array2<f64>,
    time: f64,
}

impl WignerField {
    /// Wrap values that are already normalized (checked).
    pub fn new(grid: PhaseSpaceGrid, values: Array2<f64>, time: f64) -> Result<Self> {
        grid.validate()?;
        let n = grid.n();
        if values.dim() != (n, n) {
            return Err(WignerError::InvalidArgument(format!(
                "field shape {:?} does not match grid {n}x{n}",
                values.dim()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(WignerError::InvalidArgument(
                "field contains non-finite values".into(),
            ));
        }
        let f = WignerField { grid, values, time };
        let norm = f.integral();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(WignerError::InvalidArgument(format!(
                "field is not normalized: integral = {norm:.8}"
            )));
        }
        Ok(f)
    }

    /// Wrap values after rescaling them to unit mass.
    pub fn normalized(grid: PhaseSpaceGrid, mut values: Array2<f64>, time: f64) -> Result<Self> {
        let mass: f64 = values.iter().sum::<f64>() * grid.cell_area();
        if !mass.is_finite() || mass.abs() < 1e-300 {
            return Err(WignerError::InvalidArgument(format!(
                "cannot normalize field with mass {mass:e}"
            )));
        }
        values.mapv_inplace(|v| v / mass);
        WignerField::new(grid, values, time)
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// `integral W dq dp` by the midpoint rule.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// `integral |W| dq dp`.
    pub fn abs_integral(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_area()
    }

    /// L2 norm `sqrt(integral W^2 dq dp)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Largest |W| on the outermost grid ring (periodic-wrap aliasing
    /// indicator).
    pub fn boundary_max_abs(&self) -> f64 {
        let n = self.grid.n();
        let mut m = 0.0f64;
        for i in 0..n {
            m = m.max(self.values[(i, 0)].abs());
            m = m.max(self.values[(i, n - 1)].abs());
            m = m.max(self.values[(0, i)].abs());
            m = m.max(self.values[(n - 1, i)].abs());
        }
        m
    }

    /// Phase-space centroid `(<q>, <p>)`.
    pub fn centroid(&self) -> (f64, f64) {
        let area = self.grid.cell_area();
        let mut q_acc = 0.0;
        let mut p_acc = 0.0;
        for ((i, j), &w) in self.values.indexed_iter() {
            q_acc += self.grid.q_at(i) * w;
            p_acc += self.grid.p_at(j) * w;
        }
        (q_acc * area, p_acc * area)
    }

    /// Relative L2 distance to another field on the same grid.
    pub fn relative_l2_distance(&self, other: &WignerField) -> f64 {
        relative_l2(&self.values, &other.values)
    }
}

/// `||a - b||_2 / ||b||_2` over raw arrays.
pub fn relative_l2(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    (num / den.max(1e-300)).sqrt()
}
