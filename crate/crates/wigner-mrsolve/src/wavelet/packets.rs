//! 2D wavelet packets with Shannon-entropy best-basis selection
//! (Coifman-Wickerhauser).
//!
//! The cost of a node is the Shannon entropy of its coefficients with
//! probabilities normalized by the *global* energy, which makes the cost
//! additive over disjoint bands: the total over any admissible pruning
//! equals the entropy of that basis' full coefficient vector. Minimizing
//! it bottom-up therefore minimizes the Shannon entropy over all
//! admissible prunings, including the standard wavelet basis.

use ndarray::Array2;

use crate::error::{Result, WignerError};
use crate::wavelet::filters::WaveletFilter;
use crate::wavelet::transform::{dwt_step_2d, idwt_step_2d};

/// Shannon entropy `-sum p_i ln p_i` with `p_i = c_i^2 / sum_j c_j^2`.
/// Zero coefficients contribute nothing; the all-zero vector is rejected.
pub fn shannon_entropy(coefficients: &[f64]) -> Result<f64> {
    let total: f64 = coefficients.iter().map(|c| c * c).sum();
    if total <= 0.0 {
        return Err(WignerError::InvalidArgument(
            "entropy of an all-zero coefficient vector is undefined".into(),
        ));
    }
    let mut h = 0.0;
    for &c in coefficients {
        let p = c * c / total;
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    Ok(h)
}

/// Quad-split tree over 2D packet bands; `Leaf` marks a retained band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisNode {
    Leaf,
    /// children in order (LL, LH, HL, HH)
    Split(Box<[BasisNode; 4]>),
}

impl BasisNode {
    pub fn leaf_count(&self) -> usize {
        match self {
            BasisNode::Leaf => 1,
            BasisNode::Split(ch) => ch.iter().map(|c| c.leaf_count()).sum(),
        }
    }

    pub fn max_depth(&self) -> u32 {
        match self {
            BasisNode::Leaf => 0,
            BasisNode::Split(ch) => 1 + ch.iter().map(|c| c.max_depth()).max().unwrap(),
        }
    }
}

/// Entropy-selected packet basis.
#[derive(Debug, Clone)]
pub struct BasisTree {
    pub root: BasisNode,
    pub entropy_total: f64,
}

/// One retained packet band. Band indices are in natural (Paley) order:
/// child `(2b_q + qbit, 2b_p + pbit)` takes the high-pass half along the
/// corresponding axis when the bit is set.
#[derive(Debug, Clone)]
pub struct PacketBand {
    pub depth: u32,
    pub band_q: usize,
    pub band_p: usize,
    pub data: Array2<f64>,
}

/// Best-basis decomposition result.
#[derive(Debug, Clone)]
pub struct BestBasis {
    pub tree: BasisTree,
    pub leaves: Vec<PacketBand>,
}

impl BestBasis {
    /// All retained coefficients, leaves in tree order.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for leaf in &self.leaves {
            out.extend(leaf.data.iter().copied());
        }
        out
    }

    pub fn energy(&self) -> f64 {
        self.leaves
            .iter()
            .map(|l| l.data.iter().map(|c| c * c).sum::<f64>())
            .sum()
    }

    /// Reconstruct the field (the transform is orthogonal, so this is the
    /// exact inverse).
    pub fn reconstruct(&self, filter: &WaveletFilter) -> Array2<f64> {
        fn rebuild(
            node: &BasisNode,
            depth: u32,
            bq: usize,
            bp: usize,
            leaves: &[PacketBand],
            filter: &WaveletFilter,
            size: usize,
        ) -> Array2<f64> {
            match node {
                BasisNode::Leaf => leaves
                    .iter()
                    .find(|l| l.depth == depth && l.band_q == bq && l.band_p == bp)
                    .expect("leaf present for every tree leaf")
                    .data
                    .clone(),
                BasisNode::Split(ch) => {
                    let half = size / 2;
                    let ll = rebuild(&ch[0], depth + 1, 2 * bq, 2 * bp, leaves, filter, half);
                    let lh = rebuild(&ch[1], depth + 1, 2 * bq, 2 * bp + 1, leaves, filter, half);
                    let hl = rebuild(&ch[2], depth + 1, 2 * bq + 1, 2 * bp, leaves, filter, half);
                    let hh =
                        rebuild(&ch[3], depth + 1, 2 * bq + 1, 2 * bp + 1, leaves, filter, half);
                    idwt_step_2d(&ll, &lh, &hl, &hh, filter)
                }
            }
        }
        let size = self
            .leaves
            .iter()
            .map(|l| l.data.dim().0 << l.depth)
            .max()
            .unwrap_or(0);
        rebuild(&self.tree.root, 0, 0, 0, &self.leaves, filter, size)
    }
}

/// Entropy tie tolerance: parent kept when not better than children by
/// more than this.
const TIE_EPS: f64 = 1e-12;

/// Coifman-Wickerhauser best basis of a dyadic field.
pub fn best_basis(
    field: &Array2<f64>,
    filter: &WaveletFilter,
    max_depth: u32,
) -> Result<BestBasis> {
    let (nr, nc) = field.dim();
    if nr != nc || !nr.is_power_of_two() || nr < 2 {
        return Err(WignerError::InvalidArgument(format!(
            "field shape {nr}x{nc} is not square dyadic"
        )));
    }
    let j = nr.trailing_zeros();
    if max_depth > j {
        return Err(WignerError::InvalidArgument(format!(
            "max_depth {max_depth} exceeds field level {j}"
        )));
    }
    let global_energy: f64 = field.iter().map(|c| c * c).sum();
    if global_energy <= 0.0 {
        return Err(WignerError::InvalidArgument(
            "best basis of an all-zero field is undefined".into(),
        ));
    }

    struct Ctx<'a> {
        filter: &'a WaveletFilter,
        max_depth: u32,
        global_energy: f64,
    }

    // Additive node cost with global normalization.
    fn node_cost(data: &Array2<f64>, global_energy: f64) -> f64 {
        let mut h = 0.0;
        for &c in data.iter() {
            let p = c * c / global_energy;
            if p > 0.0 {
                h -= p * p.ln();
            }
        }
        h
    }

    fn descend(
        ctx: &Ctx,
        data: Array2<f64>,
        depth: u32,
        bq: usize,
        bp: usize,
    ) -> (BasisNode, f64, Vec<PacketBand>) {
        let own = node_cost(&data, ctx.global_energy);
        if depth == ctx.max_depth {
            return (
                BasisNode::Leaf,
                own,
                vec![PacketBand {
                    depth,
                    band_q: bq,
                    band_p: bp,
                    data,
                }],
            );
        }
        let (ll, lh, hl, hh) = dwt_step_2d(&data, ctx.filter);
        let (n0, c0, l0) = descend(ctx, ll, depth + 1, 2 * bq, 2 * bp);
        let (n1, c1, l1) = descend(ctx, lh, depth + 1, 2 * bq, 2 * bp + 1);
        let (n2, c2, l2) = descend(ctx, hl, depth + 1, 2 * bq + 1, 2 * bp);
        let (n3, c3, l3) = descend(ctx, hh, depth + 1, 2 * bq + 1, 2 * bp + 1);
        let child_cost = c0 + c1 + c2 + c3;
        if own <= child_cost + TIE_EPS {
            (
                BasisNode::Leaf,
                own,
                vec![PacketBand {
                    depth,
                    band_q: bq,
                    band_p: bp,
                    data,
                }],
            )
        } else {
            let mut leaves = l0;
            leaves.extend(l1);
            leaves.extend(l2);
            leaves.extend(l3);
            (
                BasisNode::Split(Box::new([n0, n1, n2, n3])),
                child_cost,
                leaves,
            )
        }
    }

    let ctx = Ctx {
        filter,
        max_depth,
        global_energy,
    };
    let (root, cost, leaves) = descend(&ctx, field.clone(), 0, 0, 0);
    Ok(BestBasis {
        tree: BasisTree {
            root,
            entropy_total: cost,
        },
        leaves,
    })
}
