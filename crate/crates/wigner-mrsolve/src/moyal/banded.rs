//! Banded one-axis operators on periodic scaling-coefficient vectors.
//!
//! Every right-hand-side term factors into a Kronecker product of two of
//! these (one per phase-space axis), so the full 4^J x 4^J operator is
//! never materialized; applying a term is two banded matrix products.

use ndarray::Array2;
use rayon::prelude::*;

use crate::hamiltonian::{poly_derive_n, poly_eval};
use crate::wavelet::connection::{ConnectionTable, MomentTable};

/// Row-banded periodic matrix: entry `(m, (m + l) mod n)` for
/// `l in -half_bw ..= half_bw` lives at `data[m * width + (l + half_bw)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Banded1D {
    n: usize,
    half_bw: usize,
    data: Vec<f64>,
}

impl Banded1D {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_bw(&self) -> usize {
        self.half_bw
    }

    pub fn width(&self) -> usize {
        2 * self.half_bw + 1
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n];
        data.iter_mut().for_each(|v| *v = 1.0);
        Banded1D {
            n,
            half_bw: 0,
            data,
        }
    }

    pub fn zero(n: usize, half_bw: usize) -> Self {
        Banded1D {
            n,
            half_bw,
            data: vec![0.0; n * (2 * half_bw + 1)],
        }
    }

    pub fn entry(&self, row: usize, offset: i64) -> f64 {
        let hbw = self.half_bw as i64;
        if offset < -hbw || offset > hbw {
            0.0
        } else {
            self.data[row * self.width() + (offset + hbw) as usize]
        }
    }

    pub fn set_entry(&mut self, row: usize, offset: i64, value: f64) {
        let hbw = self.half_bw as i64;
        debug_assert!(offset >= -hbw && offset <= hbw);
        let w = self.width();
        self.data[row * w + (offset + hbw) as usize] = value;
    }

    /// Derivative operator from a connection table: the coefficient-space
    /// action is `(D c)_m = h^-d sum_k Gamma_k c_{m-k}`, i.e. the entry at
    /// column offset `l` is `Gamma_{-l} / h^d`.
    pub fn derivative(n: usize, table: &ConnectionTable, step: f64) -> Self {
        let r = table.support_radius() as i64;
        let scale = step.powi(-(table.derivative_order() as i32));
        let mut op = Banded1D::zero(n, r as usize);
        for row in 0..n {
            for l in -r..=r {
                op.set_entry(row, l, table.coefficient(-l) * scale);
            }
        }
        op
    }

    /// Multiplication by a physical-coordinate polynomial `P`:
    /// `<phi_m, P phi_{m+l}> = sum_j P^(j)(x_m) h^j I^(j)_l / j!`,
    /// the Taylor expansion of `P` about the grid point weighted by the
    /// scaling-function product moments.
    pub fn multiplication(
        n: usize,
        poly: &[f64],
        axis_min: f64,
        step: f64,
        moments: &MomentTable,
    ) -> Self {
        let r = moments.support_radius() as i64;
        let degree = poly.len() - 1;
        // derivative coefficient arrays P, P', P'', ...
        let mut derivs: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
        derivs.push(poly.to_vec());
        for j in 1..=degree {
            derivs.push(poly_derive_n(poly, j));
        }
        let mut op = Banded1D::zero(n, r as usize);
        let mut factorial = 1.0;
        let mut hj = vec![0.0; degree + 1];
        let mut facts = vec![0.0; degree + 1];
        for (j, (h, f)) in hj.iter_mut().zip(facts.iter_mut()).enumerate() {
            factorial = if j == 0 { 1.0 } else { factorial * j as f64 };
            *h = step.powi(j as i32);
            *f = factorial;
        }
        for row in 0..n {
            let x = axis_min + row as f64 * step;
            for l in -r..=r {
                let mut acc = 0.0;
                for j in 0..=degree {
                    acc += poly_eval(&derivs[j], x) * hj[j] * moments.product_moment(j, l)
                        / facts[j];
                }
                op.set_entry(row, l, acc);
            }
        }
        op
    }

    /// Banded product `self * other` (periodic wrap).
    pub fn compose(&self, other: &Banded1D) -> Banded1D {
        assert_eq!(self.n, other.n);
        let n = self.n as i64;
        let hbw = self.half_bw + other.half_bw;
        let mut out = Banded1D::zero(self.n, hbw);
        for row in 0..self.n {
            for l1 in -(self.half_bw as i64)..=self.half_bw as i64 {
                let a = self.entry(row, l1);
                if a == 0.0 {
                    continue;
                }
                let mid = ((row as i64 + l1).rem_euclid(n)) as usize;
                for l2 in -(other.half_bw as i64)..=other.half_bw as i64 {
                    let b = other.entry(mid, l2);
                    if b == 0.0 {
                        continue;
                    }
                    // column offset relative to `row`, wrapped into band
                    let total = l1 + l2;
                    let prev = out.entry(row, total);
                    out.set_entry(row, total, prev + a * b);
                }
            }
        }
        out
    }

    pub fn scaled(mut self, s: f64) -> Banded1D {
        for v in &mut self.data {
            *v *= s;
        }
        self
    }

    /// Transpose (still banded): `A^T[m, m+l] = A[(m+l) mod n, -l]`.
    pub fn transpose(&self) -> Banded1D {
        let mut out = Banded1D::zero(self.n, self.half_bw);
        let n = self.n as i64;
        for row in 0..self.n {
            for l in -(self.half_bw as i64)..=self.half_bw as i64 {
                let src_row = ((row as i64 + l).rem_euclid(n)) as usize;
                out.set_entry(row, l, self.entry(src_row, -l));
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.entry(r, 0)).collect()
    }

    /// `out = A * m` over axis 0 (rows are contracted). Output rows are
    /// independent, so the parallel result is bit-identical to serial.
    pub fn apply_rows(&self, m: &Array2<f64>, out: &mut Array2<f64>) {
        let (nr, nc) = m.dim();
        debug_assert_eq!(nr, self.n);
        debug_assert_eq!(m.dim(), out.dim());
        let hbw = self.half_bw as i64;
        let src = m.as_slice().expect("standard layout");
        out.as_slice_mut()
            .expect("standard layout")
            .par_chunks_mut(nc)
            .enumerate()
            .for_each(|(i, row)| {
                row.fill(0.0);
                for l in -hbw..=hbw {
                    let a = self.entry(i, l);
                    if a == 0.0 {
                        continue;
                    }
                    let j = ((i as i64 + l).rem_euclid(nr as i64)) as usize;
                    let src_row = &src[j * nc..(j + 1) * nc];
                    for (o, s) in row.iter_mut().zip(src_row.iter()) {
                        *o += a * s;
                    }
                }
            });
    }

    /// `out = m * A^T` over axis 1 (columns are contracted).
    pub fn apply_cols(&self, m: &Array2<f64>, out: &mut Array2<f64>) {
        let (_nr, nc) = m.dim();
        debug_assert_eq!(nc, self.n);
        debug_assert_eq!(m.dim(), out.dim());
        let hbw = self.half_bw as i64;
        let src = m.as_slice().expect("standard layout");
        out.as_slice_mut()
            .expect("standard layout")
            .par_chunks_mut(nc)
            .enumerate()
            .for_each(|(r, row)| {
                let src_row = &src[r * nc..(r + 1) * nc];
                for (j, o) in row.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for l in -hbw..=hbw {
                        let a = self.entry(j, l);
                        if a == 0.0 {
                            continue;
                        }
                        let k = ((j as i64 + l).rem_euclid(nc as i64)) as usize;
                        acc += a * src_row[k];
                    }
                    *o = acc;
                }
            });
    }

    /// Column sums (the left action of the all-ones vector).
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        let n = self.n as i64;
        for row in 0..self.n {
            for l in -(self.half_bw as i64)..=self.half_bw as i64 {
                let col = ((row as i64 + l).rem_euclid(n)) as usize;
                sums[col] += self.entry(row, l);
            }
        }
        sums
    }
}
