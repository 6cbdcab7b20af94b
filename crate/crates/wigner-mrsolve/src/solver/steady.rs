//! Steady-state (waveleton) solve: the null vector of the assembled
//! operator.
//!
//! The mass functional is an exact left null vector of the operator, so
//! the one-dimensional kernel can be deflated exactly by a rank-one
//! bordering: solving `(L + s g mu^T) x = g` with `mu` the mass functional
//! and `g` any unit-mass vector gives `L x = 0` with `mu(x) = 1/s`
//! identically. That single solve is inverse power iteration with shift 0
//! made nonsingular; repeating it polishes the iterate when the inner
//! iterative solver (BiCGStab, diagonally preconditioned) returns early.
//! If the inner solver stalls, the routine falls back to damped
//! propagation with RK4, which converges unconditionally for these
//! dissipative operators.

use ndarray::Array2;

use crate::error::{Result, WignerError};
use crate::moyal::GalerkinOperator;
use crate::phase_space::{PhysicalParams, WignerField};
use crate::solver::stability::stability_estimate;
use crate::solver::step_rk4;
use crate::wavelet::{daubechies_filter, ScalingBasis};

/// Outcome of [`steady_state`].
#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub field: WignerField,
    /// `||L a|| / ||a||` of the returned coefficients
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn l2(v: &Array2<f64>) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Diagonally preconditioned BiCGStab on a matrix-free operator.
/// Returns (solution, achieved relative residual, iterations).
fn bicgstab<F>(
    apply: F,
    b: &Array2<f64>,
    x0: &Array2<f64>,
    diag: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Array2<f64>, f64, usize)
where
    F: Fn(&Array2<f64>) -> Array2<f64>,
{
    let precond = |v: &Array2<f64>| -> Array2<f64> {
        let mut out = v.clone();
        for (o, &d) in out.iter_mut().zip(diag.iter()) {
            let scale = if d.abs() > 1e-12 { d } else { 1.0 };
            *o /= scale;
        }
        out
    };

    let b_norm = l2(b).max(1e-300);
    let mut x = x0.clone();
    let mut r = b - &apply(&x);
    let r0 = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = Array2::<f64>::zeros(b.dim());
    let mut p = Array2::<f64>::zeros(b.dim());
    let mut best = (x.clone(), l2(&r) / b_norm);

    for it in 0..max_iter {
        let rho_new: f64 = r0.iter().zip(r.iter()).map(|(a, b)| a * b).sum();
        if rho_new.abs() < 1e-300 {
            break; // breakdown; return best so far
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p = &r + &((&p - &(&v * omega)) * beta);
        let p_hat = precond(&p);
        v = apply(&p_hat);
        let r0v: f64 = r0.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        if r0v.abs() < 1e-300 {
            break;
        }
        alpha = rho / r0v;
        let s = &r - &(&v * alpha);
        if l2(&s) / b_norm < tol {
            x = &x + &(&p_hat * alpha);
            let res = l2(&(b - &apply(&x))) / b_norm;
            return (x, res, it + 1);
        }
        let s_hat = precond(&s);
        let t = apply(&s_hat);
        let tt: f64 = t.iter().map(|a| a * a).sum();
        if tt < 1e-300 {
            break;
        }
        omega = t.iter().zip(s.iter()).map(|(a, b)| a * b).sum::<f64>() / tt;
        x = &x + &(&p_hat * alpha) + &(&s_hat * omega);
        r = &s - &(&t * omega);
        let rel = l2(&r) / b_norm;
        if rel < best.1 {
            best = (x.clone(), rel);
        }
        if rel < tol {
            return (x, rel, it + 1);
        }
        if omega.abs() < 1e-300 {
            break;
        }
    }
    (best.0, best.1, max_iter)
}

/// Find the normalized steady state of the assembled operator.
///
/// Preconditions: `gamma > 0` and `diffusion > 0` (otherwise every
/// function of H is stationary and no normalizable steady state is
/// selected); the operator should contain all terms of the equation.
pub fn steady_state(
    op: &GalerkinOperator,
    params: &PhysicalParams,
    tolerance: f64,
    max_iterations: usize,
) -> Result<SteadyStateResult> {
    if params.gamma <= 0.0 || params.diffusion <= 0.0 {
        return Err(WignerError::InvalidArgument(format!(
            "steady state needs gamma > 0 and diffusion > 0 (got gamma = {}, D = {}): \
             with a closed system any function of H is stationary and the \
             kernel is not one-dimensional",
            params.gamma, params.diffusion
        )));
    }
    if op.is_time_dependent() {
        return Err(WignerError::InvalidArgument(
            "steady state of a time-dependent Hamiltonian is not defined".into(),
        ));
    }
    let grid = *op.grid();
    let n = grid.n();
    let area = grid.cell_area();
    let filter = daubechies_filter(op.wavelet_order())?;
    let basis = ScalingBasis::new(&filter)?;

    // unit-mass positive seed: broad Gaussian at the box center
    let (qc, pc) = (
        0.5 * (grid.q_min + grid.q_max),
        0.5 * (grid.p_min + grid.p_max),
    );
    let wq = (grid.q_max - grid.q_min) / 6.0;
    let wp = (grid.p_max - grid.p_min) / 6.0;
    let mut seed = Array2::from_shape_fn((n, n), |(i, j)| {
        let dq = (grid.q_at(i) - qc) / wq;
        let dp = (grid.p_at(j) - pc) / wp;
        (-0.5 * (dq * dq + dp * dp)).exp()
    });
    let mass0: f64 = seed.iter().sum::<f64>() * area;
    seed.mapv_inplace(|v| v / mass0);
    let g = basis.to_coefficients(&seed);

    // deflation scale: place the moved eigenvalue inside the spectrum
    let rho = stability_estimate(n, 0, |v| op.apply(v, 1.0)).spectral_radius;
    let s = 0.05 * rho.max(1.0);

    let mass = |v: &Array2<f64>| -> f64 { v.iter().sum::<f64>() * area };
    let deflated = |v: &Array2<f64>| -> Array2<f64> {
        let mut out = op.apply(v, 1.0);
        let m = mass(v) * s;
        out.scaled_add(m, &g);
        out
    };
    let mut diag = op.diagonal(1.0);
    let g_flat = g.as_slice().expect("standard layout");
    for (i, d) in diag.iter_mut().enumerate() {
        *d += s * g_flat[i] * area;
    }

    let mut x = g.clone();
    let mut iterations = 0usize;
    let mut residual = f64::INFINITY;
    let inner_cap = 400;
    for outer in 0..max_iterations.max(1) {
        let rhs = &x / mass(&x).max(1e-300);
        let (sol, _inner_res, inner_its) = bicgstab(deflated, &rhs, &x, &diag, 1e-10, inner_cap);
        iterations += inner_its;
        let m = mass(&sol);
        if !m.is_finite() || m.abs() < 1e-300 {
            break;
        }
        let cand = &sol / (m);
        let res = l2(&op.apply(&cand, 1.0)) / l2(&cand);
        if res < residual {
            residual = res;
            x = cand;
        } else if outer > 0 {
            break; // no further progress
        }
        if residual <= tolerance {
            break;
        }
    }

    // fallback: damped propagation if the linear solves stalled
    if residual > tolerance {
        let est = stability_estimate(n, 1, |v| op.apply(v, 1.0));
        let dt = est.dt_max.min(1e3);
        // relax over blocks, tracking the residual
        let relax_time = 4.0 / (2.0 * params.gamma);
        let block_steps = ((relax_time / dt).ceil() as usize).clamp(10, 40_000);
        for _ in 0..6 {
            for _ in 0..block_steps {
                x = match step_rk4(&x, dt, |v, _| op.apply(v, 1.0), 0.0) {
                    Ok(next) => next,
                    Err(_) => break,
                };
                let m = mass(&x);
                x.mapv_inplace(|v| v / m);
            }
            residual = l2(&op.apply(&x, 1.0)) / l2(&x);
            iterations += block_steps;
            if residual <= tolerance {
                break;
            }
        }
    }

    let converged = residual <= tolerance;
    let samples = basis.to_samples(&x);
    let field = WignerField::normalized(grid, samples, 0.0)?;
    Ok(SteadyStateResult {
        field,
        residual,
        iterations,
        converged,
    })
}
