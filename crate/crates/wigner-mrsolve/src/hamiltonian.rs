//! Polynomial Hamiltonians `H(q, p, t) = p^2/(2m) + U(q) + mixed terms`.
//!
//! The potential is a coefficient list `U(q) = sum_k a_k q^k`; mixed
//! monomials `c q^i p^j` feed the general Moyal-bracket path. An optional
//! time table scales the potential coefficients by a linearly interpolated
//! factor, so time dependence stays affine in the assembled operators.

use crate::error::{Result, WignerError};

/// Degree cap for potentials and mixed monomials.
pub const MAX_DEGREE: usize = 10;

/// One `c * q^i p^j` monomial.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MixedTerm {
    pub coefficient: f64,
    pub q_power: u32,
    pub p_power: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialHamiltonian {
    /// `U(q) = sum_k potential[k] q^k`, ascending powers.
    potential: Vec<f64>,
    mixed_terms: Vec<MixedTerm>,
    /// `(t_i, s_i)` pairs, strictly increasing in t; potential coefficients
    /// are multiplied by the interpolated `s(t)`, clamped at the ends.
    time_table: Option<Vec<(f64, f64)>>,
}

/// Evaluate an ascending-coefficient polynomial (Horner).
pub fn poly_eval(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients of the derivative polynomial.
pub fn poly_derive(coefficients: &[f64]) -> Vec<f64> {
    if coefficients.len() <= 1 {
        return vec![0.0];
    }
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

/// `order`-fold derivative coefficients.
pub fn poly_derive_n(coefficients: &[f64], order: usize) -> Vec<f64> {
    let mut c = coefficients.to_vec();
    for _ in 0..order {
        c = poly_derive(&c);
    }
    c
}

fn effective_degree(coefficients: &[f64]) -> usize {
    coefficients
        .iter()
        .rposition(|&c| c != 0.0)
        .unwrap_or(0)
}

impl PolynomialHamiltonian {
    pub fn new(potential: Vec<f64>) -> Result<Self> {
        Self::with_terms(potential, Vec::new(), None)
    }

    pub fn with_terms(
        potential: Vec<f64>,
        mixed_terms: Vec<MixedTerm>,
        time_table: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        let potential = if potential.is_empty() {
            vec![0.0]
        } else {
            potential
        };
        if effective_degree(&potential) > MAX_DEGREE {
            return Err(WignerError::InvalidArgument(format!(
                "potential degree {} exceeds the bound {MAX_DEGREE}",
                effective_degree(&potential)
            )));
        }
        for t in &mixed_terms {
            if (t.q_power + t.p_power) as usize > MAX_DEGREE {
                return Err(WignerError::InvalidArgument(format!(
                    "mixed term q^{} p^{} exceeds total degree {MAX_DEGREE}",
                    t.q_power, t.p_power
                )));
            }
        }
        if let Some(table) = &time_table {
            if table.len() < 2 {
                return Err(WignerError::InvalidArgument(
                    "time_table needs at least two (t, scale) entries".into(),
                ));
            }
            for w in table.windows(2) {
                if w[1].0 <= w[0].0 {
                    return Err(WignerError::InvalidArgument(format!(
                        "time_table stamps must strictly increase ({} then {})",
                        w[0].0, w[1].0
                    )));
                }
            }
        }
        Ok(PolynomialHamiltonian {
            potential,
            mixed_terms,
            time_table,
        })
    }

    /// Harmonic oscillator `U = m omega^2 q^2 / 2`.
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        PolynomialHamiltonian::new(vec![0.0, 0.0, 0.5 * mass * omega * omega])
            .expect("quadratic potential is valid")
    }

    /// Free particle (`U = 0`).
    pub fn free() -> Self {
        PolynomialHamiltonian::new(vec![0.0]).expect("valid")
    }

    /// Base potential coefficients (unscaled).
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn mixed_terms(&self) -> &[MixedTerm] {
        &self.mixed_terms
    }

    pub fn time_table(&self) -> Option<&[(f64, f64)]> {
        self.time_table.as_deref()
    }

    pub fn is_time_dependent(&self) -> bool {
        self.time_table.is_some()
    }

    /// Degree of the potential polynomial (trailing zeros ignored).
    pub fn potential_degree(&self) -> usize {
        effective_degree(&self.potential)
    }

    /// Total degree including mixed terms and the kinetic p^2.
    pub fn total_degree(&self) -> usize {
        let mixed = self
            .mixed_terms
            .iter()
            .map(|t| (t.q_power + t.p_power) as usize)
            .max()
            .unwrap_or(0);
        self.potential_degree().max(mixed).max(2)
    }

    /// Potential scale factor at time `t` (1 when no table).
    pub fn time_scale(&self, t: f64) -> f64 {
        match &self.time_table {
            None => 1.0,
            Some(table) => {
                if t <= table[0].0 {
                    return table[0].1;
                }
                if t >= table[table.len() - 1].0 {
                    return table[table.len() - 1].1;
                }
                let idx = table.partition_point(|&(ti, _)| ti <= t);
                let (t0, s0) = table[idx - 1];
                let (t1, s1) = table[idx];
                s0 + (s1 - s0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Potential coefficients scaled to time `t`.
    pub fn potential_at(&self, t: f64) -> Vec<f64> {
        let s = self.time_scale(t);
        self.potential.iter().map(|&c| s * c).collect()
    }

    /// `U(q)` at time `t`.
    pub fn eval_potential(&self, q: f64, t: f64) -> f64 {
        poly_eval(&self.potential, q) * self.time_scale(t)
    }

    /// Full `H(q, p, t)` given the particle mass.
    pub fn eval(&self, q: f64, p: f64, mass: f64, t: f64) -> f64 {
        let mut h = p * p / (2.0 * mass) + self.eval_potential(q, t);
        for term in &self.mixed_terms {
            h += term.coefficient
                * q.powi(term.q_power as i32)
                * p.powi(term.p_power as i32);
        }
        h
    }

    /// Stable content digest for operator-reuse checks.
    pub fn digest(&self) -> String {
        let mut s = String::new();
        for c in &self.potential {
            s.push_str(&format!("{:.17e},", c));
        }
        s.push(';');
        for t in &self.mixed_terms {
            s.push_str(&format!(
                "{:.17e}^{}^{},",
                t.coefficient, t.q_power, t.p_power
            ));
        }
        if let Some(table) = &self.time_table {
            s.push(';');
            for (t, f) in table {
                s.push_str(&format!("{t:.17e}:{f:.17e},"));
            }
        }
        s
    }
}
