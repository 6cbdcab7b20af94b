//! Canonical initial states: coherent Gaussians, Wigner transforms of
//! arbitrary wavefunctions, and cat superpositions.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Result, WignerError};
use crate::phase_space::field::WignerField;
use crate::phase_space::{PhaseSpaceGrid, PhysicalParams};

fn check_margins(
    grid: &PhaseSpaceGrid,
    q0: f64,
    p0: f64,
    sigma: f64,
    params: &PhysicalParams,
) -> Result<()> {
    if !(sigma > 0.0) {
        return Err(WignerError::InvalidArgument(format!(
            "sigma must be > 0 (got {sigma})"
        )));
    }
    let q_margin = 4.0 * sigma;
    let p_margin = 4.0 * params.hbar / (2.0 * sigma);
    let q_ok = q0 - q_margin >= grid.q_min && q0 + q_margin <= grid.q_max;
    let p_ok = p0 - p_margin >= grid.p_min && p0 + p_margin <= grid.p_max;
    if !q_ok || !p_ok {
        return Err(WignerError::DomainTooSmall(format!(
            "state at (q0={q0}, p0={p0}, sigma={sigma}) needs \
             q in [{:.3}, {:.3}] and p in [{:.3}, {:.3}]; \
             box is [{}, {}] x [{}, {}]",
            q0 - q_margin,
            q0 + q_margin,
            p0 - p_margin,
            p0 + p_margin,
            grid.q_min,
            grid.q_max,
            grid.p_min,
            grid.p_max
        )));
    }
    Ok(())
}

/// Wigner function of a coherent state:
/// `W = exp(-(q-q0)^2/sigma^2 - sigma^2 (p-p0)^2/hbar^2) / (pi hbar)`.
pub fn gaussian_coherent_state(
    grid: &PhaseSpaceGrid,
    q0: f64,
    p0: f64,
    sigma: f64,
    params: &PhysicalParams,
) -> Result<WignerField> {
    check_margins(grid, q0, p0, sigma, params)?;
    let n = grid.n();
    let norm = 1.0 / (std::f64::consts::PI * params.hbar);
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        let q = grid.q_at(i) - q0;
        let p = grid.p_at(j) - p0;
        norm * (-q * q / (sigma * sigma)
            - sigma * sigma * p * p / (params.hbar * params.hbar))
            .exp()
    });
    WignerField::normalized(*grid, values, 0.0)
}

/// Wigner transform of a wavefunction sampled on the q-grid:
/// `W(q,p) = (1/pi hbar) integral psi*(q+y) psi(q-y) exp(2ipy/hbar) dy`,
/// trapezoid quadrature over the largest symmetric window, psi extended
/// by zero.
pub fn wigner_from_wavefunction(
    psi: &[Complex64],
    grid: &PhaseSpaceGrid,
    params: &PhysicalParams,
) -> Result<WignerField> {
    let n = grid.n();
    if psi.len() != n {
        return Err(WignerError::InvalidArgument(format!(
            "psi has {} samples, grid expects {n}",
            psi.len()
        )));
    }
    let dq = grid.dq();
    let norm2: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dq;
    if (norm2 - 1.0).abs() > 1e-6 {
        return Err(WignerError::InvalidArgument(format!(
            "psi is not normalized: sum |psi|^2 dq = {norm2:.8}"
        )));
    }

    let half = (n / 2) as i64;
    // phase[j][k] = exp(2 i p_j y_k / hbar), y_k = k dq, k = 0..=half
    let mut phase = Array2::<Complex64>::zeros((n, half as usize + 1));
    for j in 0..n {
        let p = grid.p_at(j);
        for k in 0..=half as usize {
            let arg = 2.0 * p * (k as f64 * dq) / params.hbar;
            phase[(j, k)] = Complex64::new(arg.cos(), arg.sin());
        }
    }

    let at = |idx: i64| -> Complex64 {
        if idx < 0 || idx >= n as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            psi[idx as usize]
        }
    };

    let prefactor = dq / (std::f64::consts::PI * params.hbar);
    let mut values = Array2::<f64>::zeros((n, n));
    let mut max_imag = 0.0f64;
    for i in 0..n {
        // a[k] = psi*(q_i + y_k) psi(q_i - y_k) for k = 0..=half;
        // a[-k] is its conjugate with the roles of +-y swapped.
        let a: Vec<Complex64> = (0..=half)
            .map(|k| at(i as i64 + k).conj() * at(i as i64 - k))
            .collect();
        for j in 0..n {
            // full symmetric window k = -half..=half, trapezoid weights,
            // negative k via conjugates of the tabulated phase
            let mut acc = a[0] * phase[(j, 0)];
            for k in 1..half as usize {
                acc += a[k] * phase[(j, k)] + a[k].conj() * phase[(j, k)].conj();
            }
            let k = half as usize;
            acc += 0.5 * (a[k] * phase[(j, k)] + a[k].conj() * phase[(j, k)].conj());
            let w = prefactor * acc;
            max_imag = max_imag.max(w.im.abs());
            values[(i, j)] = w.re;
        }
    }

    let scale = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if max_imag > 1e-10 * scale.max(1.0) {
        return Err(WignerError::InvalidArgument(format!(
            "Wigner transform produced imaginary residue {max_imag:e}"
        )));
    }

    let mass: f64 = values.iter().sum::<f64>() * grid.cell_area();
    if (mass - 1.0).abs() > 1e-4 {
        return Err(WignerError::InvalidArgument(format!(
            "Wigner transform mass {mass:.6} deviates from 1 beyond 1e-4; \
             grid too coarse or state leaks outside the box"
        )));
    }
    WignerField::normalized(*grid, values, 0.0)
}

/// Ground-state Gaussian wavefunction samples, discretely normalized.
pub fn gaussian_wavefunction(grid: &PhaseSpaceGrid, q0: f64, sigma: f64) -> Vec<Complex64> {
    let n = grid.n();
    let mut psi: Vec<Complex64> = (0..n)
        .map(|i| {
            let q = grid.q_at(i) - q0;
            Complex64::new((-q * q / (2.0 * sigma * sigma)).exp(), 0.0)
        })
        .collect();
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dq();
    let s = 1.0 / norm.sqrt();
    for c in &mut psi {
        *c *= s;
    }
    psi
}

/// Cat state: Wigner field of `N (psi_+ + psi_-)` with Gaussians centered
/// at `+-q0`. Interference fringes along p at q ~ 0 have period
/// `pi hbar / q0`.
pub fn cat_state(
    grid: &PhaseSpaceGrid,
    q0: f64,
    sigma: f64,
    params: &PhysicalParams,
) -> Result<WignerField> {
    check_margins(grid, q0, 0.0, sigma, params)?;
    check_margins(grid, -q0, 0.0, sigma, params)?;
    let n = grid.n();
    let mut psi: Vec<Complex64> = (0..n)
        .map(|i| {
            let q = grid.q_at(i);
            let a = (-(q - q0) * (q - q0) / (2.0 * sigma * sigma)).exp();
            let b = (-(q + q0) * (q + q0) / (2.0 * sigma * sigma)).exp();
            Complex64::new(a + b, 0.0)
        })
        .collect();
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dq();
    let s = 1.0 / norm.sqrt();
    for c in &mut psi {
        *c *= s;
    }
    wigner_from_wavefunction(&psi, grid, params)
}
