//! Deformation functionals of a nodal curve and their rank.
//!
//! A curve with node preimages `(a_k, b_k)` and marked points `c_i` carries
//! pole functions `f_i = 1/(t - c_i)^2 + sum_j alpha_ij/(t - c_j)` and dual
//! differentials `eta_j = e_j(t) dt` with
//! `e_j(t) = sum_k x_kj/((t - a_k)(t - b_k))` normalized so `e_j(c_i)` is
//! `delta_ij`.  Pairing `df_i (x) eta_j` against the node-smoothing and
//! moving-point directions yields, for every ordered pair `(i, j)` with
//! `i != j`, a functional on a `5g`-dimensional coordinate space: the
//! regularized values at the nodes, the simple-pole coefficients at `a_k`
//! and `b_k`, and the polar coefficients at the marked points.  The rank of
//! this family of `g(g - 1)` vectors is bounded by `5g - 3`, the dimension
//! of the curve's parameter space, and equals `min(5g - 3, g(g - 1))` for
//! generic data.

use serde::{Deserialize, Serialize};

use crate::curve::{gluing_matrices, CurveError, NodalCurve};
use crate::linalg::QMatrix;
use crate::rat::Rat;

/// Pairing tables of a nodal curve together with the assembled functionals.
///
/// `x[k][j]` is the coefficient of `1/((t - a_k)(t - b_k))` in `e_j`, and
/// `ecp`/`ecpp` hold the derivatives `e_j'(c_i)`, `e_j''(c_i)`.  The tables
/// `fpa[i][j] = -f_i'(a_j)` and `fpb[i][j] = -f_i'(b_j)` absorb a sign, and
/// the node blocks of `functionals` drop the residue denominators
/// `1/(a_k - b_k)`; both are fixed nonzero per-coordinate factors, so the
/// rank is unaffected.  `sign_faithful_functionals` restores them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentData {
    pub curve: NodalCurve,
    /// Full simple-pole coefficient matrix of the `f_i`, diagonal included.
    pub alpha: QMatrix,
    /// Inverse of the normalization matrix `M[i][j] = 1/((a_j - c_i)(b_j - c_i))`.
    pub x: QMatrix,
    /// `ecp[i][j] = e_j'(c_i)`.
    pub ecp: QMatrix,
    /// `ecpp[i][j] = e_j''(c_i)`.
    pub ecpp: QMatrix,
    /// `fpa[i][j] = -f_i'(a_j)`.
    pub fpa: QMatrix,
    /// `fpb[i][j] = -f_i'(b_j)`.
    pub fpb: QMatrix,
    /// `eta[k][j]`: value at `a_k` of `e_j` with its `k`-th pole regularized,
    /// the singular term replaced by the constant `-x_kj/(a_k - b_k)^2`.
    pub eta: QMatrix,
    /// Same regularized values at `b_k`.
    pub etb: QMatrix,
    /// One row per ordered pair `(i, j)`, `i != j`, in lexicographic order.
    /// Blocks of width `g`: node values, poles at `a_k`, poles at `b_k`,
    /// simple and double polar coefficients at the marked points.
    pub functionals: Vec<Vec<Rat>>,
}

/// Summary of a functional-rank computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentReport {
    pub g: usize,
    pub rank: usize,
    /// `min(5g - 3, g(g - 1))`, the rank of a generic curve of this genus.
    pub expected_for_generic: usize,
    pub vectors_emitted: bool,
}

/// Builds every pairing table and the `g(g - 1)` functional vectors.
///
/// Fails with `Degenerate` when the normalization matrix `M` is singular,
/// i.e. when no dual basis `e_j(c_i) = delta_ij` exists.
pub fn assemble_functionals(curve: &NodalCurve) -> Result<TangentData, CurveError> {
    let g = curve.genus();
    let nodes = curve.nodes();
    let marked = curve.marked();
    let (m, n) = gluing_matrices(nodes, marked)?;
    let x = m.inverse().ok_or(CurveError::Degenerate)?;
    let alpha = n.matmul(&x)?;

    let ecp = QMatrix::from_fn(g, g, |i, j| -alpha.at(i, j));
    // (d/dt)^2 of 1/((t - a)(t - b)) at c, by partial fractions.
    let np = QMatrix::from_fn(g, g, |i, j| {
        let ca = (&marked[i] - &nodes[j].0).pow(-3);
        let cb = (&marked[i] - &nodes[j].1).pow(-3);
        (ca - cb) * Rat::from_int(2) / (&nodes[j].0 - &nodes[j].1)
    });
    let ecpp = np.matmul(&x).expect("square tables conform");

    let ac2 = QMatrix::from_fn(g, g, |i, j| (&nodes[j].0 - &marked[i]).pow(-2));
    let bc2 = QMatrix::from_fn(g, g, |i, j| (&nodes[j].1 - &marked[i]).pow(-2));
    let aac2 = alpha.matmul(&ac2).expect("square tables conform");
    let abc2 = alpha.matmul(&bc2).expect("square tables conform");
    let fpa = QMatrix::from_fn(g, g, |i, j| {
        (&nodes[j].0 - &marked[i]).pow(-3) * Rat::from_int(2) + aac2.at(i, j)
    });
    let fpb = QMatrix::from_fn(g, g, |i, j| {
        (&nodes[j].1 - &marked[i]).pow(-3) * Rat::from_int(2) + abc2.at(i, j)
    });

    // Values of the node kernels at a_k and b_k; the diagonal carries the
    // regularizing constant in place of the pole.
    let ea = QMatrix::from_fn(g, g, |k, l| {
        if k == l {
            -(&nodes[k].0 - &nodes[k].1).pow(-2)
        } else {
            ((&nodes[k].0 - &nodes[l].0) * (&nodes[k].0 - &nodes[l].1)).pow(-1)
        }
    });
    let eb = QMatrix::from_fn(g, g, |k, l| {
        if k == l {
            -(&nodes[k].0 - &nodes[k].1).pow(-2)
        } else {
            ((&nodes[k].1 - &nodes[l].0) * (&nodes[k].1 - &nodes[l].1)).pow(-1)
        }
    });
    let eta = ea.matmul(&x).expect("square tables conform");
    let etb = eb.matmul(&x).expect("square tables conform");

    let mut functionals = Vec::with_capacity(g * (g - 1));
    for i in 0..g {
        for j in 0..g {
            if i == j {
                continue;
            }
            let mut v = vec![Rat::zero(); 5 * g];
            for k in 0..g {
                v[k] = etb.at(k, j) * fpa.at(i, k) + eta.at(k, j) * fpb.at(i, k);
                v[g + k] = x.at(k, j) * fpa.at(i, k);
                v[2 * g + k] = x.at(k, j) * fpb.at(i, k);
                let (simple, double) = if k == i {
                    (
                        ecpp.at(i, j) + ecp.at(i, j) * alpha.at(i, i),
                        ecp.at(i, j) * Rat::from_int(2),
                    )
                } else if k == j {
                    (ecp.at(j, j) * alpha.at(i, j), alpha.at(i, j).clone())
                } else {
                    (ecp.at(k, j) * alpha.at(i, k), Rat::zero())
                };
                v[3 * g + k] = simple;
                v[4 * g + k] = double;
            }
            functionals.push(v);
        }
    }

    Ok(TangentData {
        curve: curve.clone(),
        alpha,
        x,
        ecp,
        ecpp,
        fpa,
        fpb,
        eta,
        etb,
        functionals,
    })
}

impl TangentData {
    /// Rank of the functional family.
    pub fn rank(&self) -> usize {
        QMatrix::from_rows(self.functionals.clone())
            .expect("functional rows share one width")
            .rank()
    }

    /// The functionals with true derivative signs and the residue
    /// denominators `1/(a_k - b_k)`, `1/(b_k - a_k)` restored in the node
    /// blocks.  Marked-point blocks keep the moving-point orientation
    /// `d/dc = -d/dt`, the negation of the local expansion coefficients of
    /// `f_i'(t) e_j(t)`.  Each coordinate is a fixed nonzero multiple of its
    /// counterpart in `functionals`, so the rank agrees.
    pub fn sign_faithful_functionals(&self) -> Vec<Vec<Rat>> {
        let g = self.curve.genus();
        let nodes = self.curve.nodes();
        self.functionals
            .iter()
            .map(|v| {
                let mut w = v.clone();
                for (k, (a, b)) in nodes.iter().enumerate() {
                    let ab = a - b;
                    w[k] = -&v[k];
                    w[g + k] = -&v[g + k] / &ab;
                    w[2 * g + k] = &v[2 * g + k] / &ab;
                }
                w
            })
            .collect()
    }

    pub fn report(&self, vectors_emitted: bool) -> TangentReport {
        let g = self.curve.genus();
        TangentReport {
            g,
            rank: self.rank(),
            expected_for_generic: (5 * g).saturating_sub(3).min(g * (g - 1)),
            vectors_emitted,
        }
    }
}

/// Rank of the deformation functionals of `curve`.
pub fn tangent_rank(curve: &NodalCurve) -> Result<usize, CurveError> {
    Ok(assemble_functionals(curve)?.rank())
}
