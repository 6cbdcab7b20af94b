//! Independent verification path: the same right-hand side evaluated with
//! 4th-order central finite differences on grid samples.
//!
//! Shares only the term *enumeration* with the Galerkin path; the
//! discretization (Fornberg stencils on samples, pointwise polynomial
//! multiplication) is a separate code path.

use ndarray::Array2;

use crate::error::Result;
use crate::hamiltonian::{poly_eval, PolynomialHamiltonian};
use crate::moyal::pairs::{self, TermSpec};
use crate::moyal::RhsTerms;
use crate::phase_space::{PhaseSpaceGrid, PhysicalParams, WignerField};

/// Finite-difference weights for the `order`-th derivative at `x = 0` on
/// integer nodes `-r..=r` (Fornberg's recursion). Exact for polynomials of
/// degree `2r`, i.e. accuracy order `2r - order + 1` rounded up to even
/// for symmetric stencils.
pub fn fornberg_weights(order: usize, half_width: usize) -> Vec<f64> {
    let r = half_width as i64;
    let nodes: Vec<f64> = (-r..=r).map(|i| i as f64).collect();
    let n = nodes.len();
    let m = order;
    // c[k][j]: weight of node j for the k-th derivative
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    for j in 1..n {
        let mut c2 = 1.0;
        let upper = m.min(j);
        let xj = nodes[j];
        for k in 0..j {
            let c3 = xj - nodes[k];
            c2 *= c3;
            if k == j - 1 {
                for s in (1..=upper).rev() {
                    let prev = c[s - 1][j - 1];
                    c[s][j] = c1 * (s as f64 * prev - nodes[j - 1] * c[s][j - 1]) / c2;
                }
                c[0][j] = -c1 * nodes[j - 1] * c[0][j - 1] / c2;
            }
            for s in (1..=upper).rev() {
                let a = c[s][k];
                let b = c[s - 1][k];
                c[s][k] = (xj * a - s as f64 * b) / c3;
            }
            c[0][k] = xj * c[0][k] / c3;
        }
        c1 = c2;
    }
    let mut w = c[m].clone();
    // enforce the exact zero-sum property of derivative stencils so the
    // discrete mass is conserved to rounding
    if m >= 1 {
        let residual: f64 = w.iter().sum();
        w[half_width] -= residual;
    }
    w
}

/// Stencil half-width giving at least 4th-order accuracy for derivative
/// order `d`.
pub fn stencil_half_width(d: usize) -> usize {
    d / 2 + 1 + (d % 2)
    // d=1 -> 2 (5 points), d=2 -> 2, d=3 -> 3 (7 points), d=4 -> 3, ...
}

/// d-th periodic derivative along axis 0 (q).
fn fd_axis0(m: &Array2<f64>, d: usize, step: f64) -> Array2<f64> {
    if d == 0 {
        return m.clone();
    }
    let r = stencil_half_width(d);
    let w = fornberg_weights(d, r);
    let scale = step.powi(-(d as i32));
    let (nr, nc) = m.dim();
    let mut out = Array2::zeros((nr, nc));
    for i in 0..nr {
        for (t, &wt) in w.iter().enumerate() {
            let l = t as i64 - r as i64;
            if wt == 0.0 {
                continue;
            }
            let j = ((i as i64 + l).rem_euclid(nr as i64)) as usize;
            for c in 0..nc {
                out[(i, c)] += wt * scale * m[(j, c)];
            }
        }
    }
    out
}

/// d-th periodic derivative along axis 1 (p).
fn fd_axis1(m: &Array2<f64>, d: usize, step: f64) -> Array2<f64> {
    if d == 0 {
        return m.clone();
    }
    let r = stencil_half_width(d);
    let w = fornberg_weights(d, r);
    let scale = step.powi(-(d as i32));
    let (nr, nc) = m.dim();
    let mut out = Array2::zeros((nr, nc));
    for i in 0..nr {
        for j in 0..nc {
            let mut acc = 0.0;
            for (t, &wt) in w.iter().enumerate() {
                let l = t as i64 - r as i64;
                let k = ((j as i64 + l).rem_euclid(nc as i64)) as usize;
                acc += wt * m[(i, k)];
            }
            out[(i, j)] = acc * scale;
        }
    }
    out
}

fn multiply_axis0(m: &mut Array2<f64>, poly: &[f64], grid: &PhaseSpaceGrid) {
    if poly == [1.0] {
        return;
    }
    let (nr, nc) = m.dim();
    for i in 0..nr {
        let f = poly_eval(poly, grid.q_at(i));
        for j in 0..nc {
            m[(i, j)] *= f;
        }
    }
}

fn multiply_axis1(m: &mut Array2<f64>, poly: &[f64], grid: &PhaseSpaceGrid) {
    if poly == [1.0] {
        return;
    }
    let (nr, nc) = m.dim();
    for j in 0..nc {
        let f = poly_eval(poly, grid.p_at(j));
        for i in 0..nr {
            m[(i, j)] *= f;
        }
    }
}

/// Apply one term spec to samples.
fn apply_term(spec: &TermSpec, values: &Array2<f64>, grid: &PhaseSpaceGrid) -> Array2<f64> {
    let mut work;
    if spec.p_flux {
        // flux form: multiply by the p-polynomial, then differentiate
        work = values.clone();
        multiply_axis1(&mut work, &spec.p_poly, grid);
        work = fd_axis1(&work, spec.p_deriv, grid.dp());
    } else {
        work = fd_axis1(values, spec.p_deriv, grid.dp());
        multiply_axis1(&mut work, &spec.p_poly, grid);
    }
    work = fd_axis0(&work, spec.q_deriv, grid.dq());
    multiply_axis0(&mut work, &spec.q_poly, grid);
    work.mapv_inplace(|v| v * spec.scale);
    work
}

/// Apply a list of term specs to samples at time `t` (time scaling of the
/// potential-derived terms included).
pub fn apply_term_specs(
    specs: &[TermSpec],
    values: &Array2<f64>,
    grid: &PhaseSpaceGrid,
    potential_scale: f64,
) -> Array2<f64> {
    let mut out = Array2::zeros(values.dim());
    for spec in specs {
        let term = apply_term(spec, values, grid);
        let s = if spec.time_scaled {
            potential_scale
        } else {
            1.0
        };
        out.scaled_add(s, &term);
    }
    out
}

/// Full right-hand side of the selected terms by 4th-order central
/// differences on the periodic grid.
pub fn finite_difference_rhs_oracle(
    h: &PolynomialHamiltonian,
    params: &PhysicalParams,
    flags: &RhsTerms,
    w: &WignerField,
) -> Result<Array2<f64>> {
    flags.validate()?;
    let mut specs: Vec<TermSpec> = Vec::new();
    if flags.include_liouville {
        specs.extend(pairs::liouville_terms(h, params));
    }
    if flags.include_quantum {
        specs.extend(pairs::quantum_terms(h, params));
    }
    if flags.include_friction && params.gamma > 0.0 {
        specs.push(pairs::friction_term(params));
    }
    if flags.include_diffusion && params.diffusion > 0.0 {
        specs.push(pairs::diffusion_term(params));
    }
    Ok(apply_term_specs(
        &specs,
        w.values(),
        w.grid(),
        h.time_scale(w.time()),
    ))
}
