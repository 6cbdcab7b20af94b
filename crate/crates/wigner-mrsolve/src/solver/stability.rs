//! Explicit-step stability bound from a power-iteration estimate of the
//! operator's spectral radius.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Result of [`stability_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityEstimate {
    /// conservative RK4 step bound `0.8 * 2.7 / rho`
    pub dt_max: f64,
    /// spectral-radius estimate
    pub spectral_radius: f64,
    /// false when power iteration hit the iteration cap first; the
    /// returned radius is then a lower bound (dt_max an upper bound)
    pub converged: bool,
}

const MAX_ITERATIONS: usize = 500;
const REL_TOL: f64 = 1e-3;
const RK4_REACH: f64 = 2.7;
const SAFETY: f64 = 0.8;

/// Estimate the spectral radius of the linear map `apply` on fields of
/// shape `(n, n)` by power iteration with a seeded start vector, and
/// derive the RK4 step bound.
pub fn stability_estimate<F>(n: usize, seed: u64, apply: F) -> StabilityEstimate
where
    F: Fn(&Array2<f64>) -> Array2<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0));
    let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.mapv_inplace(|x| x / norm0);

    let mut rho = 0.0f64;
    let mut rho_prev;
    let mut converged = false;
    for it in 0..MAX_ITERATIONS {
        let w = apply(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            // zero operator (or v in the kernel and iteration collapsed)
            return StabilityEstimate {
                dt_max: f64::INFINITY,
                spectral_radius: 0.0,
                converged: true,
            };
        }
        rho_prev = rho;
        // complex eigenvalue pairs make ||Lv|| oscillate; track the
        // running max, which upper-bounds |lambda| estimates and keeps
        // the step bound conservative
        rho = rho.max(norm);
        v = w;
        v.mapv_inplace(|x| x / norm);
        if it > 20 && (rho - rho_prev).abs() <= REL_TOL * rho {
            converged = true;
            break;
        }
    }
    StabilityEstimate {
        dt_max: SAFETY * RK4_REACH / rho,
        spectral_radius: rho,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moyal::{GalerkinOperator, RhsTerms};
    use crate::hamiltonian::PolynomialHamiltonian;
    use crate::phase_space::{PhaseSpaceGrid, PhysicalParams};

    #[test]
    fn zero_operator_is_unbounded() {
        let est = stability_estimate(16, 0, |_| Array2::zeros((16, 16)));
        assert_eq!(est.dt_max, f64::INFINITY);
        assert!(est.converged);
    }

    #[test]
    fn pure_diffusion_matches_discrete_symbol() {
        // D d_p^2: spectral radius ~ (16/3) D / dp^2 for the 4th-order
        // stencil (within a factor 2 of the classic 4 D / dp^2)
        let grid = PhaseSpaceGrid::symmetric(10.0, 6).unwrap();
        let params = PhysicalParams {
            hbar: 1.0,
            mass: 1.0,
            gamma: 0.0,
            diffusion: 0.25,
        };
        let h = PolynomialHamiltonian::free();
        let flags = RhsTerms {
            include_liouville: false,
            include_quantum: false,
            include_friction: false,
            include_diffusion: true,
        };
        let op = GalerkinOperator::assemble(&h, &params, &flags, &grid, 6, 3).unwrap();
        let est = stability_estimate(grid.n(), 1, |v| op.apply(v, 1.0));
        let analytic = 4.0 * params.diffusion / (grid.dp() * grid.dp());
        assert!(
            est.spectral_radius > analytic / 2.0 && est.spectral_radius < analytic * 2.0,
            "rho {} vs analytic {analytic}",
            est.spectral_radius
        );
    }

    #[test]
    fn doubling_diffusion_halves_dt() {
        let grid = PhaseSpaceGrid::symmetric(10.0, 5).unwrap();
        let h = PolynomialHamiltonian::free();
        let flags = RhsTerms {
            include_liouville: false,
            include_quantum: false,
            include_friction: false,
            include_diffusion: true,
        };
        let dt_for = |d: f64| {
            let params = PhysicalParams {
                hbar: 1.0,
                mass: 1.0,
                gamma: 0.0,
                diffusion: d,
            };
            let op = GalerkinOperator::assemble(&h, &params, &flags, &grid, 6, 3).unwrap();
            stability_estimate(grid.n(), 2, |v| op.apply(v, 1.0)).dt_max
        };
        let a = dt_for(0.1);
        let b = dt_for(0.2);
        assert!((a / b - 2.0).abs() < 0.2, "ratio {}", a / b);
    }
}
