//! Connection coefficients and scaling-function moment integrals.
//!
//! These turn differential and polynomial-multiplication operators into
//! banded matrices on scaling coefficients:
//!
//! - `Gamma_k = integral phi(x) phi^(d)(x+k) dx` is the derivative stencil;
//!   it is the eigenvector of the autocorrelation transfer operator
//!   `B[l][s] = a(s-2l)` at eigenvalue `2^-d`, normalized by the moment
//!   identity `sum_k k^d Gamma_k = (-1)^d d!`.
//! - `I^(k)_l = integral x^k phi(x) phi(x-l) dx` feeds multiplication by
//!   polynomials; computed by refinement-equation recursion in `k`.
//!
//! Both are cached per filter order; initialization is idempotent so
//! concurrent first use is safe.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Result, WignerError};
use crate::wavelet::filters::{daubechies_filter, WaveletFilter};

/// Highest polynomial power supported by the moment tables (Hamiltonian
/// degree bound).
pub const MAX_POLY_POWER: usize = 10;

/// Banded table of connection coefficients for one derivative order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionTable {
    derivative_order: usize,
    wavelet_order: usize,
    support_radius: usize,
    /// coefficients for shifts `-support_radius ..= support_radius`
    coefficients: Vec<f64>,
}

impl ConnectionTable {
    pub fn derivative_order(&self) -> usize {
        self.derivative_order
    }

    pub fn wavelet_order(&self) -> usize {
        self.wavelet_order
    }

    /// `Gamma_k = 0` for `|k| > support_radius = 2N-2`.
    pub fn support_radius(&self) -> usize {
        self.support_radius
    }

    pub fn coefficient(&self, k: i64) -> f64 {
        let r = self.support_radius as i64;
        if k < -r || k > r {
            0.0
        } else {
            self.coefficients[(k + r) as usize]
        }
    }

    /// Taps ordered from shift `-support_radius` to `+support_radius`.
    pub fn taps(&self) -> &[f64] {
        &self.coefficients
    }

    /// `sum_k k^m Gamma_k`.
    pub fn moment(&self, m: u32) -> f64 {
        let r = self.support_radius as i64;
        (-r..=r)
            .map(|k| (k as f64).powi(m as i32) * self.coefficient(k))
            .sum()
    }

    /// CSV dump, columns `k,gamma_k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,gamma_k\n");
        let r = self.support_radius as i64;
        for k in -r..=r {
            out.push_str(&format!("{},{:.17e}\n", k, self.coefficient(k)));
        }
        out
    }
}

/// Autocorrelation transfer matrix `B[l][s] = a(s - 2l)` on shifts
/// `-R ..= R`, `R = 2N-2`.
fn transfer_matrix(filter: &WaveletFilter) -> DMatrix<f64> {
    let r = 2 * filter.order() as i64 - 2;
    let n = (2 * r + 1) as usize;
    DMatrix::from_fn(n, n, |li, si| {
        let l = li as i64 - r;
        let s = si as i64 - r;
        filter.autocorrelation(s - 2 * l)
    })
}

/// Connection coefficients `Gamma_k = integral phi(x) phi^(d)(x+k) dx` for
/// the scaling function of `filter` and derivative order `d >= 1`.
///
/// Requires `d < N` (conservative regularity bound); Haar supports no
/// derivatives at all.
pub fn connection_coefficients(
    filter: &WaveletFilter,
    derivative_order: usize,
) -> Result<ConnectionTable> {
    let n = filter.order();
    if derivative_order < 1 {
        return Err(WignerError::InvalidArgument(
            "derivative order must be >= 1".into(),
        ));
    }
    if derivative_order >= n {
        return Err(WignerError::UnsupportedOrder {
            order: derivative_order,
            wavelet_order: n,
            hint: format!(
                "Daubechies-{n} supports derivative orders 1..={}; \
                 use a higher wavelet order or the finite-difference scheme",
                n.saturating_sub(1)
            ),
        });
    }

    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<ConnectionTable>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    {
        let guard = cache.lock().unwrap();
        if let Some(t) = guard.get(&(n, derivative_order)) {
            return Ok((**t).clone());
        }
    }

    let table = compute_connection_table(filter, derivative_order)?;
    let mut guard = cache.lock().unwrap();
    let entry = guard
        .entry((n, derivative_order))
        .or_insert_with(|| Arc::new(table));
    Ok((**entry).clone())
}

fn compute_connection_table(
    filter: &WaveletFilter,
    d: usize,
) -> Result<ConnectionTable> {
    let r = 2 * filter.order() as i64 - 2;
    let size = (2 * r + 1) as usize;
    let b = transfer_matrix(filter);
    let shifted = &b - DMatrix::<f64>::identity(size, size) * 0.5_f64.powi(d as i32);
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("SVD with V^T");
    let sv = &svd.singular_values;
    let smallest = sv[sv.len() - 1];
    if smallest > 1e-6 {
        return Err(WignerError::NonConvergence(format!(
            "no eigenvector at 2^-{d} for Daubechies-{} (residual {smallest:.3e})",
            filter.order()
        )));
    }
    let mut gamma: Vec<f64> = v_t.row(size - 1).iter().copied().collect();

    // Enforce parity Gamma_{-k} = (-1)^d Gamma_k exactly.
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    for k in 1..=r as usize {
        let a = gamma[(r as usize) + k];
        let bb = gamma[(r as usize) - k];
        let avg = 0.5 * (a + sign * bb);
        gamma[(r as usize) + k] = avg;
        gamma[(r as usize) - k] = sign * avg;
    }
    if d % 2 == 1 {
        gamma[r as usize] = 0.0;
    }

    // Normalize by sum_k k^d Gamma_k = (-1)^d d!.
    let mut md = 0.0;
    for (i, &g) in gamma.iter().enumerate() {
        let k = i as i64 - r;
        md += (k as f64).powi(d as i32) * g;
    }
    if md.abs() < 1e-300 {
        return Err(WignerError::NonConvergence(format!(
            "degenerate connection eigenvector for d={d}"
        )));
    }
    let factorial: f64 = (1..=d).map(|i| i as f64).product();
    let target = if d % 2 == 0 { factorial } else { -factorial };
    let scale = target / md;
    for g in gamma.iter_mut() {
        *g *= scale;
    }

    // Zero-sum correction into the center tap: keeps parity and all
    // moments with m >= 1 intact, makes column sums of the induced
    // circulant exactly zero (discrete mass conservation).
    let residual: f64 = gamma.iter().sum();
    gamma[r as usize] -= residual;

    Ok(ConnectionTable {
        derivative_order: d,
        wavelet_order: filter.order(),
        support_radius: r as usize,
        coefficients: gamma,
    })
}

/// Scaling-function and product moment tables for one filter order.
#[derive(Debug, Clone)]
pub struct MomentTable {
    wavelet_order: usize,
    support_radius: usize,
    /// `m_k = integral x^k phi(x) dx`, k = 0..=MAX_POLY_POWER
    scaling_moments: Vec<f64>,
    /// `product[k][l + R] = integral x^k phi(x) phi(x-l) dx`
    product_moments: Vec<Vec<f64>>,
}

impl MomentTable {
    pub fn wavelet_order(&self) -> usize {
        self.wavelet_order
    }

    pub fn support_radius(&self) -> usize {
        self.support_radius
    }

    /// `integral x^k phi(x) dx`.
    pub fn scaling_moment(&self, k: usize) -> f64 {
        self.scaling_moments[k]
    }

    /// `integral x^k phi(x) phi(x-l) dx`, zero outside the support band.
    pub fn product_moment(&self, k: usize, l: i64) -> f64 {
        let r = self.support_radius as i64;
        if l < -r || l > r {
            0.0
        } else {
            self.product_moments[k][(l + r) as usize]
        }
    }
}

/// Moment tables for `filter`, cached per order.
pub fn moment_table(filter: &WaveletFilter) -> Arc<MomentTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<MomentTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    {
        let guard = cache.lock().unwrap();
        if let Some(t) = guard.get(&filter.order()) {
            return Arc::clone(t);
        }
    }
    let table = Arc::new(compute_moment_table(filter));
    let mut guard = cache.lock().unwrap();
    Arc::clone(
        guard
            .entry(filter.order())
            .or_insert_with(|| Arc::clone(&table)),
    )
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn compute_moment_table(filter: &WaveletFilter) -> MomentTable {
    let kmax = MAX_POLY_POWER;
    // m_k (1 - 2^-k) = sqrt(2) 2^-(k+1) sum_{r<k} C(k,r) mu_{k-r} m_r
    let mut m = vec![0.0; kmax + 1];
    m[0] = 1.0;
    for k in 1..=kmax {
        let mut rhs = 0.0;
        for r in 0..k {
            rhs += binomial(k, r) * filter.low_pass_moment((k - r) as u32) * m[r];
        }
        rhs *= std::f64::consts::SQRT_2 * 0.5_f64.powi(k as i32 + 1);
        m[k] = rhs / (1.0 - 0.5_f64.powi(k as i32));
    }

    // I^(k): (Id - 2^-k B_0) I^(k) = 2^-k sum_{r<k} C(k,r) B_{k-r} I^(r)
    // with B_t[l][s] = sum_i h_i i^t h_{i+s-2l}.
    let r = 2 * filter.order() as i64 - 2;
    let size = (2 * r + 1) as usize;
    let h = filter.low_pass();
    let b_t = |t: usize| -> DMatrix<f64> {
        DMatrix::from_fn(size, size, |li, si| {
            let l = li as i64 - r;
            let s = si as i64 - r;
            let mut acc = 0.0;
            for (i, &hi) in h.iter().enumerate() {
                let j = i as i64 + s - 2 * l;
                if j >= 0 && (j as usize) < h.len() {
                    acc += hi * (i as f64).powi(t as i32) * h[j as usize];
                }
            }
            acc
        })
    };

    let b0 = b_t(0);
    let mut product: Vec<Vec<f64>> = Vec::with_capacity(kmax + 1);
    let mut i0 = vec![0.0; size];
    i0[r as usize] = 1.0; // orthonormality: I^(0)_l = delta_{l0}
    product.push(i0);
    for k in 1..=kmax {
        let mut rhs = nalgebra::DVector::<f64>::zeros(size);
        for t in 0..k {
            let bm = b_t(k - t);
            let prev = nalgebra::DVector::from_column_slice(&product[t]);
            rhs += binomial(k, t) * (&bm * prev);
        }
        rhs *= 0.5_f64.powi(k as i32);
        let a = DMatrix::<f64>::identity(size, size) - &b0 * 0.5_f64.powi(k as i32);
        let sol = a
            .lu()
            .solve(&rhs)
            .expect("moment recursion system is nonsingular");
        product.push(sol.iter().copied().collect());
    }

    MomentTable {
        wavelet_order: filter.order(),
        support_radius: r as usize,
        scaling_moments: m,
        product_moments: product,
    }
}

/// Convenience: connection table by filter order.
pub fn connection_coefficients_for_order(
    order: usize,
    derivative_order: usize,
) -> Result<ConnectionTable> {
    let filter = daubechies_filter(order)?;
    connection_coefficients(&filter, derivative_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::cascade::cascade_evaluate;

    #[test]
    fn haar_first_derivative_unsupported() {
        let f = daubechies_filter(1).unwrap();
        let err = connection_coefficients(&f, 1).unwrap_err();
        assert!(matches!(err, WignerError::UnsupportedOrder { .. }));
    }

    #[test]
    fn moment_identities_all_supported_pairs() {
        for order in 2..=10 {
            let f = daubechies_filter(order).unwrap();
            for d in 1..order {
                let t = connection_coefficients(&f, d).unwrap();
                assert_eq!(t.support_radius(), 2 * order - 2);
                // sum Gamma = 0 (exact by construction)
                assert!(t.moment(0).abs() < 1e-12, "order {order} d {d}");
                // lower moments vanish, d-th moment = (-1)^d d!; tolerance
                // scales with the size of the summands actually added.
                let mut fact = 1.0;
                for m in 1..=d as u32 {
                    fact *= m as f64;
                    let value = t.moment(m);
                    let target = if (m as usize) < d {
                        0.0
                    } else if d % 2 == 0 {
                        fact
                    } else {
                        -fact
                    };
                    let scale: f64 = t
                        .taps()
                        .iter()
                        .enumerate()
                        .map(|(i, &g)| {
                            let k = i as i64 - t.support_radius() as i64;
                            (g * (k as f64).powi(m as i32)).abs()
                        })
                        .sum();
                    assert!(
                        (value - target).abs() < 1e-11 * scale.max(1.0),
                        "order {order} d {d} moment {m}: {value} vs {target}"
                    );
                }
            }
        }
    }

    #[test]
    fn first_and_second_moment_reference_values() {
        let t1 = connection_coefficients_for_order(3, 1).unwrap();
        assert!(t1.moment(0).abs() < 1e-10);
        assert!((t1.moment(1) + 1.0).abs() < 1e-10);
        let t2 = connection_coefficients_for_order(3, 2).unwrap();
        assert!((t2.moment(2) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn parity() {
        for (order, d) in [(3, 1), (3, 2), (6, 1), (6, 3), (6, 5)] {
            let t = connection_coefficients_for_order(order, d).unwrap();
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            for k in 0..=t.support_radius() as i64 {
                let a = t.coefficient(k);
                let b = t.coefficient(-k);
                assert!(
                    (b - sign * a).abs() < 1e-10,
                    "order {order} d {d} k {k}"
                );
            }
        }
    }

    #[test]
    fn quadrature_oracle_cross_check() {
        // Independent check: integrate phi(x) phi'(x+k) numerically from
        // cascade samples, with phi' by centered differences.
        for (order, d) in [(3usize, 1usize), (4, 2)] {
            let f = daubechies_filter(order).unwrap();
            let level = 12;
            let phi = cascade_evaluate(&f, level).unwrap();
            let s = phi.samples();
            let n = s.len();
            let dx = phi.step();
            let per = 1usize << level;
            let table = connection_coefficients(&f, d).unwrap();
            for k in -(table.support_radius() as i64)..=table.support_radius() as i64 {
                // d-th derivative of phi at sample i + k*per by central FD
                let mut acc = 0.0;
                for i in 0..n {
                    let j = i as i64 + k * per as i64;
                    let deriv = match d {
                        1 => {
                            let get = |x: i64| -> f64 {
                                if x < 0 || x >= n as i64 {
                                    0.0
                                } else {
                                    s[x as usize]
                                }
                            };
                            (get(j + 1) - get(j - 1)) / (2.0 * dx)
                        }
                        2 => {
                            let get = |x: i64| -> f64 {
                                if x < 0 || x >= n as i64 {
                                    0.0
                                } else {
                                    s[x as usize]
                                }
                            };
                            (get(j + 1) - 2.0 * get(j) + get(j - 1)) / (dx * dx)
                        }
                        _ => unreachable!(),
                    };
                    acc += s[i] * deriv;
                }
                acc *= dx;
                let gamma = table.coefficient(k);
                assert!(
                    (acc - gamma).abs() < 2e-4 * (1.0 + gamma.abs()),
                    "order {order} d {d} k {k}: quadrature {acc} vs {gamma}"
                );
            }
        }
    }

    #[test]
    fn scaling_moments_match_quadrature() {
        for order in [2usize, 4, 6] {
            let f = daubechies_filter(order).unwrap();
            let t = moment_table(&f);
            let phi = cascade_evaluate(&f, 12).unwrap();
            let dx = phi.step();
            for k in 0..=4usize {
                let mut acc = 0.0;
                for (i, &v) in phi.samples().iter().enumerate() {
                    acc += (i as f64 * dx).powi(k as i32) * v;
                }
                acc *= dx;
                let m = t.scaling_moment(k);
                assert!(
                    (acc - m).abs() < 1e-5 * (1.0 + m.abs()),
                    "order {order} k {k}: {acc} vs {m}"
                );
            }
        }
    }

    #[test]
    fn product_moments_match_quadrature() {
        let f = daubechies_filter(4).unwrap();
        let t = moment_table(&f);
        let phi = cascade_evaluate(&f, 12).unwrap();
        let s = phi.samples();
        let dx = phi.step();
        let per = 1i64 << 12;
        for k in 0..=3usize {
            for l in -3i64..=3 {
                let mut acc = 0.0;
                for i in 0..s.len() {
                    let j = i as i64 - l * per;
                    if j >= 0 && (j as usize) < s.len() {
                        acc += (i as f64 * dx).powi(k as i32) * s[i] * s[j as usize];
                    }
                }
                acc *= dx;
                let m = t.product_moment(k, l);
                assert!(
                    (acc - m).abs() < 1e-5 * (1.0 + m.abs()),
                    "k {k} l {l}: {acc} vs {m}"
                );
            }
        }
    }

    #[test]
    fn product_moment_consistency_with_scaling_moment() {
        // sum_l I^(k)_l = m_k by partition of unity.
        let f = daubechies_filter(6).unwrap();
        let t = moment_table(&f);
        for k in 0..=MAX_POLY_POWER {
            let r = t.support_radius() as i64;
            let s: f64 = (-r..=r).map(|l| t.product_moment(k, l)).sum();
            let m = t.scaling_moment(k);
            assert!(
                (s - m).abs() < 1e-9 * (1.0 + m.abs()),
                "k {k}: {s} vs {m}"
            );
        }
    }
}
