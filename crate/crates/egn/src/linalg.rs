//! Dense exact linear algebra over the rationals.
//!
//! Everything here reduces to Gauss-Jordan elimination on row-major `Rat`
//! matrices, run fraction-free over the integers (Montante-Bareiss) so the
//! per-operation gcd cost of naive rational pivoting never appears.
//! Elimination skips zero entries, which matters for the large, sparse-ish
//! differential matrices produced by the cohomology modules, but the storage
//! stays dense and the arithmetic stays exact: a reported rank or kernel
//! dimension is a theorem, not an estimate.
//!
//! The module also hosts the integer-lattice helpers used by the moduli
//! monomial maps: rational kernels are cleared to primitive integer vectors,
//! no Smith normal form is needed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::Rat;

/// Errors from the linear-algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

/// A dense matrix over `Rat`, row-major.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Rat>>", into = "Vec<Vec<Rat>>")]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl std::fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl TryFrom<Vec<Vec<Rat>>> for QMatrix {
    type Error = String;
    fn try_from(rows: Vec<Vec<Rat>>) -> Result<Self, String> {
        QMatrix::from_rows(rows).map_err(|e| e.to_string())
    }
}

impl From<QMatrix> for Vec<Vec<Rat>> {
    fn from(m: QMatrix) -> Self {
        (0..m.rows)
            .map(|i| m.data[i * m.cols..(i + 1) * m.cols].to_vec())
            .collect()
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has length {} but row 0 has length {ncols}",
                    r.len()
                )));
            }
        }
        Ok(QMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    pub fn matmul(&self, rhs: &QMatrix) -> Result<QMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    *out.at_mut(i, j) += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * vec of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Rat::zero(); self.rows];
        for i in 0..self.rows {
            for (j, x) in v.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let a = self.at(i, j);
                if !a.is_zero() {
                    out[i] += a * x;
                }
            }
        }
        Ok(out)
    }

    /// In-place reduction to reduced row echelon form.
    ///
    /// Returns the pivot columns in increasing order; the rank is their count.
    /// Internally this clears each row to integers and runs fraction-free
    /// Gauss-Jordan elimination (Montante-Bareiss): every update is
    /// `(p * a_ij - a_ic * p_j) / prev` with an exact integer division by the
    /// previous pivot, so no rational normalization happens until the pivot
    /// rows are rescaled at the very end. Entry growth stays bounded by minor
    /// determinants and the costly per-operation gcds of naive rational
    /// elimination disappear.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let div_exact = |v: BigInt, d: &BigInt| -> BigInt {
            debug_assert!((&v % d).is_zero(), "fraction-free update divides exactly");
            v / d
        };
        // Row scaling by the positive denominator lcm leaves the RREF alone.
        let mut work: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let mut l = BigInt::from(1);
                for x in row {
                    l = l.lcm(x.denom());
                }
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::from(1);
        for col in 0..self.cols {
            let pivot_row = pivots.len();
            if pivot_row >= self.rows {
                break;
            }
            let found = (pivot_row..self.rows).find(|&r| !work[r][col].is_zero());
            let Some(src) = found else { continue };
            work.swap(src, pivot_row);
            let prow = std::mem::take(&mut work[pivot_row]);
            let p = prow[col].clone();
            for (i, row) in work.iter_mut().enumerate() {
                if i == pivot_row {
                    continue;
                }
                let f = std::mem::replace(&mut row[col], BigInt::from(0));
                if f.is_zero() {
                    if p != prev {
                        for x in row.iter_mut() {
                            if !x.is_zero() {
                                *x = div_exact(&*x * &p, &prev);
                            }
                        }
                    }
                } else {
                    for (j, x) in row.iter_mut().enumerate() {
                        if j == col {
                            continue;
                        }
                        let b = &prow[j];
                        if x.is_zero() && b.is_zero() {
                            continue;
                        }
                        *x = div_exact(&*x * &p - &f * b, &prev);
                    }
                }
            }
            work[pivot_row] = prow;
            prev = p;
            pivots.push(col);
        }
        // Unit pivots; dependent rows below the rank are exactly zero.
        for (r, &pc) in pivots.iter().enumerate() {
            let p = work[r][pc].clone();
            for j in 0..self.cols {
                let v = std::mem::take(&mut work[r][j]);
                *self.at_mut(r, j) = if v.is_zero() {
                    Rat::zero()
                } else {
                    Rat::from_big(v, p.clone())
                };
            }
        }
        for r in pivots.len()..self.rows {
            for j in 0..self.cols {
                *self.at_mut(r, j) = Rat::zero();
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Basis of the right kernel `{v : A v = 0}` in echelon form.
    ///
    /// One vector per free column, ordered by increasing free-column index;
    /// the free coordinate of each vector is 1, making the basis canonical.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -m.at(r, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `A x = b` exactly.
    ///
    /// Returns a particular solution together with the kernel dimension of
    /// `A`, or `Inconsistent` when no solution exists.
    pub fn solve(&self, b: &[Rat]) -> Result<Solution, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "matrix has {} rows but rhs has length {}",
                self.rows,
                b.len()
            )));
        }
        let mut aug = QMatrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return Err(LinalgError::Inconsistent);
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols).clone();
        }
        Ok(Solution {
            particular: x,
            kernel_dim: self.cols - pivots.len(),
        })
    }

    /// Exact inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = QMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.at(i, j).clone()
            } else if j == n + i {
                Rat::one()
            } else {
                Rat::zero()
            }
        });
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(QMatrix::from_fn(n, n, |i, j| aug.at(i, n + j).clone()))
    }
}

/// Result of an exact linear solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<Rat>,
    pub kernel_dim: usize,
}

/// A sublattice of `Z^n` given by a basis of primitive integer row vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntLattice {
    /// Ambient dimension `n`.
    pub ambient_dim: usize,
    /// Basis rows; each is primitive (content 1, first nonzero entry positive).
    pub basis: Vec<Vec<i64>>,
}

impl IntLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Clears denominators and content from a rational kernel basis.
    ///
    /// Each vector is scaled independently, so the span over `Q` is unchanged
    /// and every output vector is primitive.
    pub fn from_rational_basis(ambient_dim: usize, vectors: &[Vec<Rat>]) -> IntLattice {
        let basis = vectors
            .iter()
            .map(|v| {
                assert_eq!(v.len(), ambient_dim, "kernel vector length mismatch");
                let mut lcm = BigInt::from(1);
                for x in v {
                    lcm = lcm.lcm(x.denom());
                }
                let mut ints: Vec<BigInt> =
                    v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
                let mut content = BigInt::zero();
                for x in &ints {
                    content = content.gcd(x);
                }
                if !content.is_zero() {
                    for x in &mut ints {
                        *x = &*x / &content;
                    }
                }
                if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
                    if first.is_negative() {
                        for x in &mut ints {
                            *x = -&*x;
                        }
                    }
                }
                ints.iter()
                    .map(|x| x.to_i64().expect("lattice entry exceeds i64"))
                    .collect()
            })
            .collect();
        IntLattice { ambient_dim, basis }
    }
}

/// The ordered index pairs `(i, j)`, `i != j`, `1 <= i, j <= g`, in
/// lexicographic order. This fixes the coordinate convention on `Z^{g(g-1)}`
/// shared by the doubling map, its kernel lattice, and the monomial maps.
pub fn ordered_pairs(g: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(g * g.saturating_sub(1));
    for i in 1..=g {
        for j in 1..=g {
            if i != j {
                out.push((i, j));
            }
        }
    }
    out
}

/// Kernel of the map `Z^{g(g-1)} -> Z^g` sending the `(i, j)` basis vector to
/// `2 e_i - e_j`, as an integer lattice.
///
/// For `g >= 2` the map has full rank `g`, so the kernel has rank `g^2 - 2g`.
/// Coordinates follow [`ordered_pairs`].
pub fn phi_kernel_lattice(g: usize) -> Result<IntLattice, LinalgError> {
    if g < 2 {
        return Err(LinalgError::InvalidParam(format!(
            "doubling-map kernel needs g >= 2, got {g}"
        )));
    }
    let pairs = ordered_pairs(g);
    let mut phi = QMatrix::zeros(g, pairs.len());
    for (col, &(i, j)) in pairs.iter().enumerate() {
        *phi.at_mut(i - 1, col) += Rat::from_int(2);
        *phi.at_mut(j - 1, col) -= Rat::one();
    }
    let kernel = phi.kernel_basis();
    Ok(IntLattice::from_rational_basis(pairs.len(), &kernel))
}
