//! Enumeration of right-hand-side terms as tensor pairs of one-axis
//! operators.
//!
//! The Moyal bracket of a polynomial Hamiltonian is the finite Groenewold
//! sine series
//!
//! ```text
//! {H, W}_M = sum_{j>=0} (-1)^j (hbar/2)^(2j) / (2j+1)!
//!            sum_{i=0}^{2j+1} C(2j+1, i) (-1)^i
//!            (d_q^(2j+1-i) d_p^i H) (d_q^i d_p^(2j+1-i) W)
//! ```
//!
//! For a monomial `c q^a p^b` every factor is again a monomial, so each
//! contribution is `scale * [q-poly * d_q^i] (x) [p-poly * d_p^(k-i)]`.
//! `j = 0` is the classical Liouville part; `j >= 1` are the quantum
//! corrections, which truncate because `H` is polynomial.

use crate::hamiltonian::PolynomialHamiltonian;
use crate::phase_space::PhysicalParams;

/// Which physical term a tensor pair belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermTag {
    Liouville,
    Quantum,
    Friction,
    Diffusion,
}

/// One `scale * [mult(q_poly) d_q^q_deriv] (x) [mult(p_poly) d_p^p_deriv]`
/// contribution. When `p_flux` is set the p-axis order is derivative after
/// multiplication (the conservative flux form used by friction).
#[derive(Debug, Clone, PartialEq)]
pub struct TermSpec {
    pub tag: TermTag,
    pub scale: f64,
    /// ascending coefficients of the q-axis multiplier (1 = identity)
    pub q_poly: Vec<f64>,
    pub q_deriv: usize,
    pub p_poly: Vec<f64>,
    pub p_deriv: usize,
    pub p_flux: bool,
    /// scaled by the Hamiltonian time table during evolution
    pub time_scaled: bool,
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn falling_factorial(a: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (a - i) as f64;
    }
    acc
}

/// monomial q^a with coefficient c as an ascending coefficient list
fn monomial(c: f64, power: usize) -> Vec<f64> {
    let mut v = vec![0.0; power + 1];
    v[power] = c;
    v
}

struct Monomial {
    coefficient: f64,
    q_power: usize,
    p_power: usize,
    time_scaled: bool,
}

fn hamiltonian_monomials(h: &PolynomialHamiltonian, params: &PhysicalParams) -> Vec<Monomial> {
    let mut out = Vec::new();
    // kinetic p^2 / 2m
    out.push(Monomial {
        coefficient: 0.5 / params.mass,
        q_power: 0,
        p_power: 2,
        time_scaled: false,
    });
    for (k, &c) in h.potential().iter().enumerate() {
        if c != 0.0 {
            out.push(Monomial {
                coefficient: c,
                q_power: k,
                p_power: 0,
                time_scaled: h.is_time_dependent(),
            });
        }
    }
    for t in h.mixed_terms() {
        if t.coefficient != 0.0 {
            out.push(Monomial {
                coefficient: t.coefficient,
                q_power: t.q_power as usize,
                p_power: t.p_power as usize,
                time_scaled: false,
            });
        }
    }
    out
}

/// Bracket pairs of one monomial for bidifferential orders `k = 2j+1`
/// restricted by `min_j`/`max_j`.
fn bracket_pairs(
    m: &Monomial,
    params: &PhysicalParams,
    min_j: usize,
    max_j: Option<usize>,
    out: &mut Vec<TermSpec>,
) {
    let total = m.q_power + m.p_power;
    let mut j = min_j;
    loop {
        let k = 2 * j + 1;
        if k > total {
            break;
        }
        if let Some(cap) = max_j {
            if j > cap {
                break;
            }
        }
        // C_j = (-1)^j (hbar/2)^(2j) / (2j+1)!
        let mut kfact = 1.0;
        for i in 1..=k {
            kfact *= i as f64;
        }
        let sign_j = if j % 2 == 0 { 1.0 } else { -1.0 };
        let cj = sign_j * (params.hbar / 2.0).powi(2 * j as i32) / kfact;
        for i in 0..=k {
            // H gets d_q^(k-i) d_p^i; W gets d_q^i d_p^(k-i)
            if k - i > m.q_power || i > m.p_power {
                continue;
            }
            let h_coeff = m.coefficient
                * falling_factorial(m.q_power, k - i)
                * falling_factorial(m.p_power, i);
            let sign_i = if i % 2 == 0 { 1.0 } else { -1.0 };
            let scale = cj * binomial(k, i) * sign_i * h_coeff;
            if scale == 0.0 {
                continue;
            }
            out.push(TermSpec {
                tag: if j == 0 {
                    TermTag::Liouville
                } else {
                    TermTag::Quantum
                },
                scale,
                q_poly: monomial(1.0, m.q_power - (k - i)),
                q_deriv: i,
                p_poly: monomial(1.0, m.p_power - i),
                p_deriv: k - i,
                p_flux: false,
                time_scaled: m.time_scaled,
            });
        }
        j += 1;
    }
}

/// Classical Liouville pairs `{H, W}` (bidifferential order 1).
pub fn liouville_terms(h: &PolynomialHamiltonian, params: &PhysicalParams) -> Vec<TermSpec> {
    let mut out = Vec::new();
    for m in hamiltonian_monomials(h, params) {
        bracket_pairs(&m, params, 0, Some(0), &mut out);
    }
    out
}

/// Quantum-correction pairs (bidifferential orders 3, 5, ...); an exact
/// finite sum for polynomial H.
pub fn quantum_terms(h: &PolynomialHamiltonian, params: &PhysicalParams) -> Vec<TermSpec> {
    let mut out = Vec::new();
    for m in hamiltonian_monomials(h, params) {
        bracket_pairs(&m, params, 1, None, &mut out);
    }
    out
}

/// Full Moyal bracket pairs (all odd bidifferential orders).
pub fn moyal_terms(h: &PolynomialHamiltonian, params: &PhysicalParams) -> Vec<TermSpec> {
    let mut out = Vec::new();
    for m in hamiltonian_monomials(h, params) {
        bracket_pairs(&m, params, 0, None, &mut out);
    }
    out
}

/// Friction `2 gamma d_p (p W)` in flux form.
pub fn friction_term(params: &PhysicalParams) -> TermSpec {
    TermSpec {
        tag: TermTag::Friction,
        scale: 2.0 * params.gamma,
        q_poly: vec![1.0],
        q_deriv: 0,
        p_poly: vec![0.0, 1.0],
        p_deriv: 1,
        p_flux: true,
        time_scaled: false,
    }
}

/// Diffusion `D d_p^2 W`.
pub fn diffusion_term(params: &PhysicalParams) -> TermSpec {
    TermSpec {
        tag: TermTag::Diffusion,
        scale: params.diffusion,
        q_poly: vec![1.0],
        q_deriv: 0,
        p_poly: vec![1.0],
        p_deriv: 2,
        p_flux: false,
        time_scaled: false,
    }
}

/// Highest derivative orders `(d_q, d_p)` any term requests of W.
pub fn max_derivative_orders(terms: &[TermSpec]) -> (usize, usize) {
    terms.iter().fold((0, 0), |(dq, dp), t| {
        (dq.max(t.q_deriv), dp.max(t.p_deriv))
    })
}
