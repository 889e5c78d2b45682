//! Recovery of the full constants table from its leading alpha matrix.
//!
//! The expansion constants of a curve satisfy a family of polynomial
//! relations in which everything beyond alpha enters linearly. For generic
//! alpha those relations pin the rest of the table up to the same gauge
//! freedoms the direct expansion fixes, so the table can be rebuilt from
//! alpha alone by exact linear algebra. This module assembles the two
//! homogeneous systems whose solution dimensions certify that genericity,
//! performs the gauged reconstruction, and evaluates the rescaling
//! invariant monomials in alpha that serve as moduli coordinates.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{ordered_triples, ConstantsTable};
use crate::linalg::{ordered_pairs, IntLattice, LinalgError, QMatrix};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("invalid alpha matrix: {0}")]
    InvalidAlpha(String),
    #[error("solution space of {system} exceeds the universal family by {excess}")]
    ExcessKernel { system: SystemId, excess: usize },
    #[error("relation system is inconsistent; alpha does not come from a curve")]
    Inconsistent,
    #[error("alpha has a zero off-diagonal entry")]
    ZeroAlphaEntry,
    #[error("exponent lattice does not match the ordered-pair coordinates")]
    LatticeMismatch,
    #[error("exponent vector is outside the kernel of the doubling map")]
    ExponentNotInKernel,
}

/// Identifies one of the two homogeneous relation systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemId {
    /// Relations linear in the off-diagonal gamma and beta entries.
    #[serde(rename = "CT_HOM")]
    CtHom,
    /// Relations linear in the off-diagonal epsilon entries, the symmetric
    /// constants a_ij, and the diagonal gamma entries.
    #[serde(rename = "ACD_HOM")]
    AcdHom,
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemId::CtHom => "CT_HOM",
            SystemId::AcdHom => "ACD_HOM",
        })
    }
}

/// Shape and solution-space data of one homogeneous relation system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystemReport {
    pub system_id: SystemId,
    pub num_equations: usize,
    pub num_unknowns: usize,
    /// Dimension of the space of homogeneous solutions.
    pub solution_dim: usize,
    /// Dimension of the family of solutions present for every alpha; the
    /// system is nondegenerate when `solution_dim` matches it.
    pub trivial_dim: usize,
}

/// One monomial in the off-diagonal alpha entries together with its value.
///
/// Exponents are indexed by [`ordered_pairs`] and constrained to the kernel
/// of the doubling map sending the pair (i, j) to 2 e_i - e_j; that is
/// exactly the condition making the value invariant under the rescalings
/// alpha_ij -> l_i^2 l_j^{-1} alpha_ij induced by scaling each canonical
/// parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialValue {
    pub exponents: Vec<i64>,
    pub value: Rat,
}

fn validate_alpha(alpha: &QMatrix, min_genus: usize) -> Result<usize, ReconstructError> {
    let g = alpha.nrows();
    if alpha.ncols() != g {
        return Err(ReconstructError::InvalidAlpha(format!(
            "expected a square matrix, got {} x {}",
            g,
            alpha.ncols()
        )));
    }
    if g < min_genus {
        return Err(ReconstructError::InvalidAlpha(format!(
            "need genus at least {min_genus}, got {g}"
        )));
    }
    Ok(g)
}

/// Lexicographic column indices for the ordered pairs (i, j), i != j, not
/// accepted by `skip`, starting at `start`. Returns the index table and the
/// next free column.
fn pair_columns(
    g: usize,
    start: usize,
    skip: impl Fn(usize, usize) -> bool,
) -> (Vec<Vec<Option<usize>>>, usize) {
    let mut col = vec![vec![None; g]; g];
    let mut next = start;
    for (i, row) in col.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            if i != j && !skip(i, j) {
                *slot = Some(next);
                next += 1;
            }
        }
    }
    (col, next)
}

/// Column indices for the unordered pairs i < j, starting at `start`.
fn upper_columns(g: usize, start: usize) -> (Vec<Vec<Option<usize>>>, usize) {
    pair_columns(g, start, |i, j| i > j)
}

fn bump(row: &mut [Rat], col: Option<usize>, value: Rat) {
    if let Some(c) = col {
        row[c] += value;
    }
}

/// The triples (i, j, k) with i < j and k distinct from both, one relation
/// instance each; the i <-> j symmetric partner adds nothing.
fn relation_triples(g: usize) -> Vec<(usize, usize, usize)> {
    ordered_triples(g)
        .into_iter()
        .filter(|&(i, j, _)| i < j)
        .collect()
}

/// Coefficient row, over the gamma/beta columns, of
/// alpha_ik (gamma_jk - gamma_ji) + alpha_jk (gamma_ik - gamma_ij)
///   - alpha_ji beta_ik - alpha_ij beta_jk.
fn ct_row(
    alpha: &QMatrix,
    ncols: usize,
    gamma_col: &[Vec<Option<usize>>],
    beta_col: &[Vec<Option<usize>>],
    (i, j, k): (usize, usize, usize),
) -> Vec<Rat> {
    let mut row = vec![Rat::zero(); ncols];
    bump(&mut row, gamma_col[j][k], alpha.at(i, k).clone());
    bump(&mut row, gamma_col[j][i], -alpha.at(i, k));
    bump(&mut row, gamma_col[i][k], alpha.at(j, k).clone());
    bump(&mut row, gamma_col[i][j], -alpha.at(j, k));
    bump(&mut row, beta_col[i][k], -alpha.at(j, i));
    bump(&mut row, beta_col[j][k], -alpha.at(i, j));
    row
}

/// Coefficient row, over the epsilon/a/diagonal-gamma columns, of
/// alpha_ji epsilon_ik + alpha_ij epsilon_jk
///   + 3 alpha_ik alpha_jk gamma_kk + a_ij.
fn acd_row(
    alpha: &QMatrix,
    ncols: usize,
    eps_col: &[Vec<Option<usize>>],
    a_col: &[Vec<Option<usize>>],
    diag_base: usize,
    (i, j, k): (usize, usize, usize),
) -> Vec<Rat> {
    let mut row = vec![Rat::zero(); ncols];
    bump(&mut row, eps_col[i][k], alpha.at(j, i).clone());
    bump(&mut row, eps_col[j][k], alpha.at(i, j).clone());
    row[diag_base + k] += Rat::from_int(3) * alpha.at(i, k) * alpha.at(j, k);
    bump(&mut row, a_col[i][j], Rat::one());
    row
}

fn ct_hom_matrix(alpha: &QMatrix, g: usize) -> QMatrix {
    let (gamma_col, at) = pair_columns(g, 0, |_, _| false);
    let (beta_col, ncols) = pair_columns(g, at, |_, _| false);
    let rows = relation_triples(g)
        .into_iter()
        .map(|t| ct_row(alpha, ncols, &gamma_col, &beta_col, t))
        .collect();
    QMatrix::from_rows(rows).expect("rows share a length")
}

fn acd_hom_matrix(alpha: &QMatrix, g: usize) -> QMatrix {
    let (eps_col, at) = pair_columns(g, 0, |_, _| false);
    let (a_col, diag_base) = upper_columns(g, at);
    let ncols = diag_base + g;
    let rows = relation_triples(g)
        .into_iter()
        .map(|t| acd_row(alpha, ncols, &eps_col, &a_col, diag_base, t))
        .collect();
    QMatrix::from_rows(rows).expect("rows share a length")
}

/// Solution-space dimensions of the two homogeneous relation systems.
///
/// Both systems have one equation per triple (i, j, k), i < j, k distinct
/// from both. Each carries a universal g-dimensional solution family valid
/// for every alpha: constant gamma rows (gamma_ij = l_i, beta = 0) for the
/// first, and parameter shifts (epsilon_ij = -m_i, a_ij = alpha_ji m_i +
/// alpha_ij m_j, gamma_kk = 0) for the second. A solution dimension of
/// exactly g therefore certifies that alpha determines the corresponding
/// constants up to those families.
pub fn homogeneous_system_dims(
    alpha: &QMatrix,
) -> Result<(LinearSystemReport, LinearSystemReport), ReconstructError> {
    let g = validate_alpha(alpha, 4)?;
    let num_equations = relation_triples(g).len();
    let ct = ct_hom_matrix(alpha, g);
    let acd = acd_hom_matrix(alpha, g);
    let report = |system_id, mat: &QMatrix| LinearSystemReport {
        system_id,
        num_equations,
        num_unknowns: mat.ncols(),
        solution_dim: mat.ncols() - mat.rank(),
        trivial_dim: g,
    };
    Ok((
        report(SystemId::CtHom, &ct),
        report(SystemId::AcdHom, &acd),
    ))
}

fn solve_unique(
    rows: Vec<Vec<Rat>>,
    rhs: &[Rat],
    system: SystemId,
) -> Result<Vec<Rat>, ReconstructError> {
    let mat = QMatrix::from_rows(rows).expect("rows share a length");
    match mat.solve(rhs) {
        Ok(sol) if sol.kernel_dim == 0 => Ok(sol.particular),
        Ok(sol) => Err(ReconstructError::ExcessKernel {
            system,
            excess: sol.kernel_dim,
        }),
        Err(LinalgError::Inconsistent) => Err(ReconstructError::Inconsistent),
        Err(e) => unreachable!("system dimensions match by construction: {e}"),
    }
}

/// Rebuild the full constants table of a curve from its alpha matrix.
///
/// Requires both homogeneous systems of [`homogeneous_system_dims`] to have
/// solution dimension exactly g, so that each unknown block is determined
/// up to its universal family; the cyclic gauge gamma_{i,i+1} =
/// epsilon_{i,i+1} = 0 then pins the table completely, matching the
/// normalization of the direct expansion. The diagonal of `alpha` is
/// ignored and zeroed in the output.
///
/// The solve proceeds in stages: first the off-diagonal gamma and beta from
/// their linear relations, then epsilon, the symmetric a, and the diagonal
/// gamma from the relations with delta eliminated, and finally delta,
/// theta, and b by direct substitution. A matrix that does not come from a
/// curve generically fails with [`ReconstructError::Inconsistent`]; when
/// the solve happens to succeed, the residual relation families not used
/// here still detect the mismatch through
/// [`ConstantsTable::satisfies_relations`].
pub fn reconstruct_constants(alpha: &QMatrix) -> Result<ConstantsTable, ReconstructError> {
    let (ct, acd) = homogeneous_system_dims(alpha)?;
    for report in [&ct, &acd] {
        assert!(
            report.solution_dim >= report.trivial_dim,
            "universal family bounds the solution space from below"
        );
        if report.solution_dim > report.trivial_dim {
            return Err(ReconstructError::ExcessKernel {
                system: report.system_id,
                excess: report.solution_dim - report.trivial_dim,
            });
        }
    }
    let g = alpha.nrows();
    let succ = |i: usize| (i + 1) % g;
    let triples = relation_triples(g);

    // Stage 1: off-diagonal gamma and beta, gauged by gamma_{i,i+1} = 0.
    let (gamma_col, at) = pair_columns(g, 0, |i, j| j == succ(i));
    let (beta_col, ncols) = pair_columns(g, at, |_, _| false);
    let mut rows = Vec::with_capacity(triples.len());
    let mut rhs = Vec::with_capacity(triples.len());
    for &(i, j, k) in &triples {
        rows.push(ct_row(alpha, ncols, &gamma_col, &beta_col, (i, j, k)));
        let mut r = Rat::zero();
        for l in 0..g {
            if l != i && l != j && l != k {
                r = r + alpha.at(i, l) * alpha.at(j, l) * alpha.at(l, k);
            }
        }
        rhs.push(r);
    }
    let x = solve_unique(rows, &rhs, SystemId::CtHom)?;
    let mut gamma = QMatrix::zeros(g, g);
    let mut beta = QMatrix::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            if let Some(c) = gamma_col[i][j] {
                *gamma.at_mut(i, j) = x[c].clone();
            }
            if let Some(c) = beta_col[i][j] {
                *beta.at_mut(i, j) = x[c].clone();
            }
        }
    }

    // The part of delta_ij not involving gamma_jj; the relation defining
    // delta reads delta_ij = d_ij - alpha_ij gamma_jj.
    let mut d = QMatrix::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            if j == i {
                continue;
            }
            let mut v = alpha.at(j, i) * beta.at(i, j) + gamma.at(j, i) * alpha.at(i, j);
            for k in 0..g {
                if k != i && k != j {
                    v = v + alpha.at(i, k) * alpha.at(j, k) * alpha.at(k, j);
                }
            }
            *d.at_mut(i, j) = v;
        }
    }

    // Stage 2: epsilon, a, and diagonal gamma, gauged by epsilon_{i,i+1} =
    // 0. Eliminating delta from the relation quadratic in gamma leaves
    // alpha_ji eps_ik + alpha_ij eps_jk + 3 alpha_ik alpha_jk gamma_kk
    //   + a_ij
    //   = alpha_ik d_jk + alpha_jk d_ik + gamma_ik gamma_jk
    //     - gamma_ji gamma_ik - gamma_ij gamma_jk
    //     - sum_{l / {i,j,k}} alpha_il alpha_jl gamma_lk,
    // the factor 3 collecting the l = k summand with the two delta terms.
    let (eps_col, at) = pair_columns(g, 0, |i, j| j == succ(i));
    let (a_col, diag_base) = upper_columns(g, at);
    let ncols = diag_base + g;
    let mut rows = Vec::with_capacity(triples.len());
    let mut rhs = Vec::with_capacity(triples.len());
    for &(i, j, k) in &triples {
        rows.push(acd_row(alpha, ncols, &eps_col, &a_col, diag_base, (i, j, k)));
        let mut r = alpha.at(i, k) * d.at(j, k) + alpha.at(j, k) * d.at(i, k)
            + gamma.at(i, k) * gamma.at(j, k)
            - gamma.at(j, i) * gamma.at(i, k)
            - gamma.at(i, j) * gamma.at(j, k);
        for l in 0..g {
            if l != i && l != j && l != k {
                r = r - alpha.at(i, l) * alpha.at(j, l) * gamma.at(l, k);
            }
        }
        rhs.push(r);
    }
    let y = solve_unique(rows, &rhs, SystemId::AcdHom)?;
    let mut epsilon = QMatrix::zeros(g, g);
    let mut a = QMatrix::zeros(g, g);
    let mut gamma_diag = vec![Rat::zero(); g];
    for i in 0..g {
        for j in 0..g {
            if let Some(c) = eps_col[i][j] {
                *epsilon.at_mut(i, j) = y[c].clone();
            }
            if let Some(c) = a_col[i][j] {
                *a.at_mut(i, j) = y[c].clone();
                *a.at_mut(j, i) = y[c].clone();
            }
        }
    }
    for (k, slot) in gamma_diag.iter_mut().enumerate() {
        *slot = y[diag_base + k].clone();
    }
    let gamma_at = |l: usize, k: usize| {
        if l == k {
            gamma_diag[l].clone()
        } else {
            gamma.at(l, k).clone()
        }
    };

    // Stage 3: delta, theta, and b by substitution into their defining
    // relations; b_ij is read off at the smallest admissible third index.
    let mut delta = QMatrix::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            if j != i {
                *delta.at_mut(i, j) = d.at(i, j) - alpha.at(i, j) * &gamma_diag[j];
            }
        }
    }
    let mut theta = QMatrix::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            if j == i {
                continue;
            }
            let mut bracket = Rat::from_int(2) * alpha.at(j, i) * gamma.at(j, i)
                - Rat::from_int(2) * &gamma_diag[j] * alpha.at(j, i);
            for k in 0..g {
                if k != i && k != j {
                    bracket = bracket - alpha.at(j, k) * alpha.at(j, k) * alpha.at(k, i);
                }
            }
            let mut v = gamma.at(i, j) * beta.at(j, i) + delta.at(i, j) * alpha.at(j, i)
                + alpha.at(i, j) * &bracket
                - beta.at(j, i) * &gamma_diag[i];
            for k in 0..g {
                if k != i && k != j {
                    v = v + alpha.at(i, k) * beta.at(j, k) * alpha.at(k, i);
                }
            }
            *theta.at_mut(j, i) = v;
        }
    }
    let mut b = QMatrix::zeros(g, g);
    for i in 0..g {
        for j in 0..g {
            if j == i {
                continue;
            }
            let k = (0..g).find(|&k| k != i && k != j).expect("genus at least 3");
            let mut bracket = gamma.at(j, k) * gamma.at(j, k)
                + Rat::from_int(2) * alpha.at(j, k) * delta.at(j, k)
                - Rat::from_int(2) * &gamma_diag[j] * gamma.at(j, k);
            for l in 0..g {
                if l != j {
                    bracket = bracket - alpha.at(j, l) * alpha.at(j, l) * &gamma_at(l, k);
                }
            }
            let mut v = alpha.at(i, k) * theta.at(j, k)
                + gamma.at(i, k) * epsilon.at(j, k)
                + delta.at(i, k) * beta.at(j, k)
                - beta.at(j, i) * epsilon.at(i, k)
                - gamma.at(i, j) * epsilon.at(j, k)
                - epsilon.at(j, i) * gamma.at(i, k)
                - delta.at(i, j) * gamma.at(j, k)
                - alpha.at(i, j) * &bracket;
            for l in 0..g {
                if l != i && l != j {
                    v = v - alpha.at(i, l) * beta.at(j, l) * &gamma_at(l, k);
                }
            }
            *b.at_mut(i, j) = v;
        }
    }

    let mut alpha_out = alpha.clone();
    for i in 0..g {
        *alpha_out.at_mut(i, i) = Rat::zero();
    }
    let table = ConstantsTable {
        alpha: alpha_out,
        beta,
        gamma,
        delta,
        epsilon,
        theta,
        gamma_diag,
        a,
        b,
    };
    // The families solved or substituted above hold by construction; check
    // the transcription. The remaining residuals are genuine constraints on
    // alpha and stay the caller's concern.
    let residuals = table.relation_residuals();
    let pairs = g * (g - 1);
    let all_triples = pairs * (g - 2);
    assert!(
        residuals[..2 * pairs + 2 * all_triples]
            .iter()
            .all(Rat::is_zero),
        "reconstructed table satisfies the relations it was solved from"
    );
    Ok(table)
}

fn monomial_value(alpha: &QMatrix, pairs: &[(usize, usize)], exponents: &[i64]) -> Rat {
    let mut v = Rat::one();
    for (t, &(i, j)) in pairs.iter().enumerate() {
        if exponents[t] != 0 {
            v = v * alpha.at(i - 1, j - 1).pow(exponents[t]);
        }
    }
    v
}

/// Values of the rescaling-invariant monomials in the off-diagonal alpha
/// entries, one per basis vector of `lattice`.
///
/// The lattice must live in the ordered-pair coordinates of
/// [`ordered_pairs`] and every basis vector must lie in the kernel of the
/// doubling map, as [`crate::linalg::phi_kernel_lattice`] guarantees; all
/// off-diagonal alpha entries must be nonzero so negative exponents make
/// sense.
pub fn moduli_map(
    alpha: &QMatrix,
    lattice: &IntLattice,
) -> Result<Vec<MonomialValue>, ReconstructError> {
    let g = validate_alpha(alpha, 2)?;
    for i in 0..g {
        for j in 0..g {
            if i != j && alpha.at(i, j).is_zero() {
                return Err(ReconstructError::ZeroAlphaEntry);
            }
        }
    }
    let pairs = ordered_pairs(g);
    if lattice.ambient_dim != pairs.len() {
        return Err(ReconstructError::LatticeMismatch);
    }
    lattice
        .basis
        .iter()
        .map(|exponents| {
            if exponents.len() != pairs.len() {
                return Err(ReconstructError::LatticeMismatch);
            }
            let mut weight = vec![0i64; g];
            for (t, &(i, j)) in pairs.iter().enumerate() {
                weight[i - 1] += 2 * exponents[t];
                weight[j - 1] -= exponents[t];
            }
            if weight.iter().any(|&w| w != 0) {
                return Err(ReconstructError::ExponentNotInKernel);
            }
            Ok(MonomialValue {
                exponents: exponents.clone(),
                value: monomial_value(alpha, &pairs, exponents),
            })
        })
        .collect()
}
