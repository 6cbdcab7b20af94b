//! The reduced algebraic system: sparse Galerkin operator on scaling
//! coefficients.
//!
//! Each right-hand-side term is stored as a Kronecker pair of banded
//! one-axis operators; applying the operator to a coefficient matrix `C`
//! is `sum_t A_q^t C (A_p^t)^T`, never materializing the 4^J x 4^J matrix.
//! Matrix Market export flattens it on demand for external inspection.

use std::io::Write;
use std::sync::OnceLock;

use ndarray::Array2;

use crate::error::{Result, WignerError};
use crate::hamiltonian::PolynomialHamiltonian;
use crate::moyal::banded::Banded1D;
use crate::moyal::pairs::{self, TermSpec, TermTag};
use crate::moyal::RhsTerms;
use crate::phase_space::{PhaseSpaceGrid, PhysicalParams};
use crate::wavelet::connection::{connection_coefficients, moment_table};
use crate::wavelet::{daubechies_filter, ScalingBasis};

/// Rayon pool capped by `WIGNER_MRSOLVE_THREADS` (unset or 0 = rayon
/// default). Built once.
pub fn thread_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("WIGNER_MRSOLVE_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
    })
}

/// One assembled term: `scale-folded q_op (x) p_op`.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinTerm {
    pub tag: TermTag,
    pub time_scaled: bool,
    pub q_op: Banded1D,
    pub p_op: Banded1D,
}

/// Sparse linear operator on coefficient vectors of length `4^J`
/// representing the selected right-hand-side terms of the evolution
/// equation in the scaling basis at level J.
#[derive(Debug, Clone)]
pub struct GalerkinOperator {
    grid: PhaseSpaceGrid,
    wavelet_order: usize,
    depth: u32,
    terms: Vec<GalerkinTerm>,
    hamiltonian_digest: String,
    time_dependent: bool,
}

impl GalerkinOperator {
    /// Assemble the operator for the term set `flags`.
    ///
    /// Needs connection tables up to the highest derivative order any term
    /// requests; insufficient wavelet smoothness propagates as
    /// `UnsupportedOrder`.
    pub fn assemble(
        h: &PolynomialHamiltonian,
        params: &PhysicalParams,
        flags: &RhsTerms,
        grid: &PhaseSpaceGrid,
        wavelet_order: usize,
        depth: u32,
    ) -> Result<Self> {
        flags.validate()?;
        grid.validate()?;
        params.validate()?;
        if depth > grid.level {
            return Err(WignerError::InvalidArgument(format!(
                "transform depth {depth} exceeds grid level {}",
                grid.level
            )));
        }

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

        let terms = assemble_terms(&specs, grid, wavelet_order)?;
        Ok(GalerkinOperator {
            grid: *grid,
            wavelet_order,
            depth,
            terms,
            hamiltonian_digest: h.digest(),
            time_dependent: h.is_time_dependent(),
        })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn level(&self) -> u32 {
        self.grid.level
    }

    pub fn wavelet_order(&self) -> usize {
        self.wavelet_order
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn terms(&self) -> &[GalerkinTerm] {
        &self.terms
    }

    pub fn hamiltonian_digest(&self) -> &str {
        &self.hamiltonian_digest
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_dependent
    }

    /// Coefficient-vector length `4^J`.
    pub fn dim(&self) -> usize {
        let n = self.grid.n();
        n * n
    }

    /// Apply to a coefficient matrix; `potential_scale` multiplies the
    /// time-scaled terms (1 for autonomous Hamiltonians). Data-parallel
    /// over coefficient rows inside the env-capped pool; parallel and
    /// serial results are bit-identical.
    pub fn apply(&self, coeffs: &Array2<f64>, potential_scale: f64) -> Array2<f64> {
        thread_pool().install(|| self.apply_serial_semantics(coeffs, potential_scale))
    }

    fn apply_serial_semantics(&self, coeffs: &Array2<f64>, potential_scale: f64) -> Array2<f64> {
        let n = self.grid.n();
        debug_assert_eq!(coeffs.dim(), (n, n));
        let mut out = Array2::<f64>::zeros((n, n));
        let mut tmp = Array2::<f64>::zeros((n, n));
        let mut tmp2 = Array2::<f64>::zeros((n, n));
        for term in &self.terms {
            term.q_op.apply_rows(coeffs, &mut tmp);
            term.p_op.apply_cols(&tmp, &mut tmp2);
            let s = if term.time_scaled {
                potential_scale
            } else {
                1.0
            };
            if s == 1.0 {
                out += &tmp2;
            } else {
                out.scaled_add(s, &tmp2);
            }
        }
        out
    }

    /// Apply to a flat row-major coefficient vector of length `4^J`.
    pub fn apply_flat(&self, coeffs: &[f64], potential_scale: f64) -> Vec<f64> {
        let n = self.grid.n();
        let m = Array2::from_shape_vec((n, n), coeffs.to_vec()).expect("length 4^J");
        self.apply(&m, potential_scale).into_raw_vec_and_offset().0
    }

    /// Transpose application (for left-null-vector checks).
    pub fn apply_transpose(&self, coeffs: &Array2<f64>, potential_scale: f64) -> Array2<f64> {
        let n = self.grid.n();
        let mut out = Array2::<f64>::zeros((n, n));
        let mut tmp = Array2::<f64>::zeros((n, n));
        let mut tmp2 = Array2::<f64>::zeros((n, n));
        for term in &self.terms {
            let qt = term.q_op.transpose();
            let pt = term.p_op.transpose();
            qt.apply_rows(coeffs, &mut tmp);
            pt.apply_cols(&tmp, &mut tmp2);
            let s = if term.time_scaled {
                potential_scale
            } else {
                1.0
            };
            if s == 1.0 {
                out += &tmp2;
            } else {
                out.scaled_add(s, &tmp2);
            }
        }
        out
    }

    /// Diagonal of the flattened operator (used as a preconditioner).
    pub fn diagonal(&self, potential_scale: f64) -> Vec<f64> {
        let n = self.grid.n();
        let mut diag = vec![0.0; n * n];
        for term in &self.terms {
            let dq = term.q_op.diagonal();
            let dp = term.p_op.diagonal();
            let s = if term.time_scaled {
                potential_scale
            } else {
                1.0
            };
            for iq in 0..n {
                for ip in 0..n {
                    diag[iq * n + ip] += s * dq[iq] * dp[ip];
                }
            }
        }
        diag
    }

    /// Largest per-monomial row support: `(4N-3)^2` bounds every bracket
    /// term's Kronecker row.
    pub fn row_support_bound(&self) -> usize {
        let w = 4 * self.wavelet_order - 3;
        w * w
    }

    /// Row of the flattened operator as `(column, value)` pairs, duplicate
    /// columns merged, sorted by column.
    pub fn flattened_row(&self, row: usize, potential_scale: f64) -> Vec<(usize, f64)> {
        let n = self.grid.n() as i64;
        let iq = row as i64 / n;
        let ip = row as i64 % n;
        let mut acc: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        for term in &self.terms {
            let s = if term.time_scaled {
                potential_scale
            } else {
                1.0
            };
            let qh = term.q_op.half_bw() as i64;
            let ph = term.p_op.half_bw() as i64;
            for lq in -qh..=qh {
                let a = term.q_op.entry(iq as usize, lq);
                if a == 0.0 {
                    continue;
                }
                let jq = (iq + lq).rem_euclid(n);
                for lp in -ph..=ph {
                    let b = term.p_op.entry(ip as usize, lp);
                    if b == 0.0 {
                        continue;
                    }
                    let jp = (ip + lp).rem_euclid(n);
                    *acc.entry((jq * n + jp) as usize).or_insert(0.0) += s * a * b;
                }
            }
        }
        acc.into_iter().collect()
    }

    /// Export in Matrix Market coordinate format (1-based, general real).
    pub fn export_matrix_market<W: Write>(&self, mut out: W, potential_scale: f64) -> std::io::Result<()> {
        let dim = self.dim();
        let mut nnz = 0usize;
        for row in 0..dim {
            nnz += self.flattened_row(row, potential_scale).len();
        }
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(
            out,
            "% wavelet-Galerkin phase-space operator, level {}, Daubechies-{}",
            self.grid.level, self.wavelet_order
        )?;
        writeln!(out, "{dim} {dim} {nnz}")?;
        for row in 0..dim {
            for (col, v) in self.flattened_row(row, potential_scale) {
                writeln!(out, "{} {} {:.17e}", row + 1, col + 1, v)?;
            }
        }
        Ok(())
    }
}

/// Build banded Kronecker factors for each term spec.
fn assemble_terms(
    specs: &[TermSpec],
    grid: &PhaseSpaceGrid,
    wavelet_order: usize,
) -> Result<Vec<GalerkinTerm>> {
    let filter = daubechies_filter(wavelet_order)?;
    let moments = moment_table(&filter);
    let n = grid.n();
    let dq = grid.dq();
    let dp = grid.dp();

    let mut terms = Vec::with_capacity(specs.len());
    for spec in specs {
        // q axis: multiplication then derivative of W, i.e. M * D
        let q_op = {
            let mut op: Option<Banded1D> = None;
            if spec.q_deriv > 0 {
                let table = connection_coefficients(&filter, spec.q_deriv)?;
                op = Some(Banded1D::derivative(n, &table, dq));
            }
            if spec.q_poly != vec![1.0] {
                let m = Banded1D::multiplication(n, &spec.q_poly, grid.q_min, dq, &moments);
                op = Some(match op {
                    Some(d) => m.compose(&d),
                    None => m,
                });
            }
            op.unwrap_or_else(|| Banded1D::identity(n))
        };
        let p_op = {
            let mut op: Option<Banded1D> = None;
            let deriv = if spec.p_deriv > 0 {
                let table = connection_coefficients(&filter, spec.p_deriv)?;
                Some(Banded1D::derivative(n, &table, dp))
            } else {
                None
            };
            let mult = if spec.p_poly != vec![1.0] {
                Some(Banded1D::multiplication(
                    n,
                    &spec.p_poly,
                    grid.p_min,
                    dp,
                    &moments,
                ))
            } else {
                None
            };
            match (deriv, mult) {
                (Some(d), Some(m)) => {
                    // flux form: d/dp after multiplication
                    op = Some(if spec.p_flux { d.compose(&m) } else { m.compose(&d) });
                }
                (Some(d), None) => op = Some(d),
                (None, Some(m)) => op = Some(m),
                (None, None) => {}
            }
            op.unwrap_or_else(|| Banded1D::identity(n))
        };
        terms.push(GalerkinTerm {
            tag: spec.tag,
            time_scaled: spec.time_scaled,
            q_op: q_op.scaled(spec.scale),
            p_op,
        });
    }
    Ok(terms)
}

/// Samples -> coefficients -> terms -> samples for an ad-hoc term list
/// (the per-term public operations).
pub fn apply_specs_to_samples(
    specs: &[TermSpec],
    samples: &Array2<f64>,
    grid: &PhaseSpaceGrid,
    wavelet_order: usize,
    potential_scale: f64,
) -> Result<Array2<f64>> {
    let filter = daubechies_filter(wavelet_order)?;
    let basis = ScalingBasis::new(&filter)?;
    let terms = assemble_terms(specs, grid, wavelet_order)?;
    let coeffs = basis.to_coefficients(samples);
    let n = grid.n();
    let mut out = Array2::<f64>::zeros((n, n));
    let mut tmp = Array2::<f64>::zeros((n, n));
    let mut tmp2 = Array2::<f64>::zeros((n, n));
    thread_pool().install(|| {
        for term in &terms {
            term.q_op.apply_rows(&coeffs, &mut tmp);
            term.p_op.apply_cols(&tmp, &mut tmp2);
            let s = if term.time_scaled {
                potential_scale
            } else {
                1.0
            };
            out.scaled_add(s, &tmp2);
        }
    });
    Ok(basis.to_samples(&out))
}

/// Convenience: field samples -> coefficients -> L -> samples, for the
/// per-term grid-space entry points.
pub struct GalerkinFieldOperator {
    pub operator: GalerkinOperator,
    pub basis: ScalingBasis,
}

impl GalerkinFieldOperator {
    pub fn new(operator: GalerkinOperator) -> Result<Self> {
        let filter = daubechies_filter(operator.wavelet_order())?;
        Ok(GalerkinFieldOperator {
            operator,
            basis: ScalingBasis::new(&filter)?,
        })
    }

    /// RHS of the selected terms evaluated on grid samples.
    pub fn apply_to_samples(&self, samples: &Array2<f64>, potential_scale: f64) -> Array2<f64> {
        let coeffs = self.basis.to_coefficients(samples);
        let rhs = self.operator.apply(&coeffs, potential_scale);
        self.basis.to_samples(&rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::states::gaussian_coherent_state;

    fn setup() -> (PhaseSpaceGrid, PhysicalParams, PolynomialHamiltonian) {
        let grid = PhaseSpaceGrid::symmetric(10.0, 6).unwrap();
        let params = PhysicalParams {
            hbar: 1.0,
            mass: 1.0,
            gamma: 0.1,
            diffusion: 0.2,
        };
        let h = PolynomialHamiltonian::harmonic(1.0, 1.0);
        (grid, params, h)
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let (grid, params, h) = setup();
        let op = GalerkinOperator::assemble(&h, &params, &RhsTerms::all(), &grid, 6, 4).unwrap();
        let z = Array2::zeros((64, 64));
        let out = op.apply(&z, 1.0);
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mass_is_conserved_exactly() {
        // the all-ones functional is a left null vector
        let (grid, params, h) = setup();
        let op = GalerkinOperator::assemble(&h, &params, &RhsTerms::all(), &grid, 6, 4).unwrap();
        let ones = Array2::from_elem((64, 64), 1.0);
        let lt = op.apply_transpose(&ones, 1.0);
        let scale: f64 = op
            .terms()
            .iter()
            .map(|t| t.q_op.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .fold(1.0, f64::max);
        let worst = lt.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(worst < 1e-8 * scale, "left-null residual {worst}");
    }

    #[test]
    fn assembly_is_deterministic_and_reusable() {
        let (grid, params, h) = setup();
        let a = GalerkinOperator::assemble(&h, &params, &RhsTerms::all(), &grid, 6, 4).unwrap();
        let b = GalerkinOperator::assemble(&h, &params, &RhsTerms::all(), &grid, 6, 4).unwrap();
        assert_eq!(a.terms(), b.terms());
        assert_eq!(a.hamiltonian_digest(), b.hamiltonian_digest());
    }

    #[test]
    fn term_additivity() {
        let (grid, params, h) = setup();
        let w = gaussian_coherent_state(&grid, 1.0, -1.0, 1.2, &params).unwrap();
        let filter = daubechies_filter(6).unwrap();
        let basis = ScalingBasis::new(&filter).unwrap();
        let c = basis.to_coefficients(w.values());

        let full = GalerkinOperator::assemble(&h, &params, &RhsTerms::all(), &grid, 6, 4)
            .unwrap()
            .apply(&c, 1.0);
        let mut sum = Array2::<f64>::zeros(c.dim());
        for flags in [
            RhsTerms::only_liouville(),
            RhsTerms {
                include_liouville: false,
                include_quantum: true,
                include_friction: false,
                include_diffusion: false,
            },
            RhsTerms {
                include_liouville: false,
                include_quantum: false,
                include_friction: true,
                include_diffusion: false,
            },
            RhsTerms {
                include_liouville: false,
                include_quantum: false,
                include_friction: false,
                include_diffusion: true,
            },
        ] {
            if flags.validate().is_ok() {
                let op =
                    GalerkinOperator::assemble(&h, &params, &flags, &grid, 6, 4).unwrap();
                sum += &op.apply(&c, 1.0);
            }
        }
        let num: f64 = full
            .iter()
            .zip(sum.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let den: f64 = full.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(num / den < 1e-12, "additivity {}", num / den);
    }

    #[test]
    fn row_support_within_bound() {
        let (grid, params, _) = setup();
        // quartic potential: liouville + quantum terms are single monomials
        let h = PolynomialHamiltonian::new(vec![0.0, 0.0, 0.0, 0.0, 0.1]).unwrap();
        let flags = RhsTerms {
            include_liouville: false,
            include_quantum: true,
            include_friction: false,
            include_diffusion: false,
        };
        let op = GalerkinOperator::assemble(&h, &params, &flags, &grid, 6, 4).unwrap();
        let bound = op.row_support_bound();
        for row in [0usize, 100, 2048, 4095] {
            let nnz = op.flattened_row(row, 1.0).len();
            assert!(nnz <= bound, "row {row}: {nnz} > {bound}");
        }
    }

    #[test]
    fn matrix_market_round_trip_matches_matvec() {
        let (_, params, h) = setup();
        let grid = PhaseSpaceGrid::symmetric(6.0, 4).unwrap();
        let op = GalerkinOperator::assemble(&h, &params, &RhsTerms::all(), &grid, 3, 2).unwrap();
        let mut buf = Vec::new();
        op.export_matrix_market(&mut buf, 1.0).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines().filter(|l| !l.starts_with('%'));
        let header: Vec<usize> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(header[0], 256);
        assert_eq!(header[1], 256);
        // dense reconstruction from the file
        let mut dense = vec![0.0; 256 * 256];
        let mut count = 0;
        for line in lines {
            let mut it = line.split_whitespace();
            let r: usize = it.next().unwrap().parse::<usize>().unwrap() - 1;
            let c: usize = it.next().unwrap().parse::<usize>().unwrap() - 1;
            let v: f64 = it.next().unwrap().parse().unwrap();
            dense[r * 256 + c] += v;
            count += 1;
        }
        assert_eq!(count, header[2]);
        // compare action on a test vector
        let x: Vec<f64> = (0..256).map(|i| ((i * 31 % 97) as f64) * 0.01 - 0.4).collect();
        let via_op = op.apply_flat(&x, 1.0);
        for r in 0..256 {
            let mut acc = 0.0;
            for c in 0..256 {
                acc += dense[r * 256 + c] * x[c];
            }
            assert!(
                (acc - via_op[r]).abs() < 1e-10 * via_op[r].abs().max(1.0),
                "row {r}: {acc} vs {}",
                via_op[r]
            );
        }
    }
}
