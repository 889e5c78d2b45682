//! Graded Hochschild cohomology of E(g, n), by two routes.
//!
//! For n = g the minimal bimodule resolution gives small cochain spaces
//! Hom(P_j, E) in each internal degree, with transpose differentials
//! assembled from the resolution module. For any 1 <= n <= g the reduced bar
//! complex over the span of the idempotents has basis functionals [w]^*b,
//! where w is a composable word in positive-degree basis elements and b a
//! basis element with matching endpoint vertices; the internal degree of
//! [w]^*b is deg(b) - deg(w).
//!
//! The bar differential on a cochain phi of internal degree m is
//!
//! ```text
//! (delta phi)(a_1, ..., a_{n+1}) = (-1)^{deg(a_1) m} a_1 phi(a_2, ..., a_{n+1})
//!     + sum_k (-1)^k phi(a_1, ..., a_k a_{k+1}, ..., a_{n+1})
//!     + (-1)^{n+1} phi(a_1, ..., a_n) a_{n+1}
//! ```
//!
//! which on the basis functional [w]^*b becomes: prepend a letter a with
//! a b != 0 (sign (-1)^{deg(a) m}), split a letter Y_i -> (A_i, B_i) or
//! X_i -> (B_i, A_i) at position k (sign (-1)^k), or append a letter a with
//! b a != 0 (sign (-1)^{n+1}). This convention reproduces the evaluated
//! instances (delta h)(B_i, Y_i, A_i) = -h(B_i, Y_i) A_i - B_i h(Y_i, A_i)
//! for 2-cochains of internal degree -1; the unit tests lock it.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::linalg::QMatrix;
use crate::quiver::{Algebra, AlgebraElement, BasisElement, Vertex};
use crate::rat::Rat;
use crate::resolution::{ap_paths, differential};

/// Default ceiling on the number of enumerated bar words per computation.
pub const DEFAULT_WORD_CAP: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HochschildError {
    #[error("bar complex needs {required} words, over the cap {cap}")]
    TooLarge { required: usize, cap: usize },
    #[error("input cochain is not closed")]
    NotACocycle,
}

/// A graded piece of a cochain space, with printable basis labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedCochainSpace {
    pub level: usize,
    pub internal_degree: i64,
    pub labels: Vec<String>,
}

impl GradedCochainSpace {
    pub fn dimension(&self) -> usize {
        self.labels.len()
    }
}

/// Kernel, image and cohomology dimensions at one level and internal degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HHResult {
    pub i: usize,
    pub internal_degree: i64,
    pub dim_cochains: usize,
    pub dim_kernel: usize,
    pub dim_image_in: usize,
    pub hh_dimension: usize,
}

/// Resolution generators at a level: printable name, target and source
/// vertices, internal degree. Level 0 lists the trivial paths at the
/// vertices.
fn res_generators(g: usize, j: usize) -> Vec<(String, Vertex, Vertex, usize)> {
    if j == 0 {
        let alg = Algebra::new(g, g).expect("valid parameters");
        return alg
            .vertices()
            .into_iter()
            .map(|v| (format!("[{}]", BasisElement::E(v)), v, v, 0))
            .collect();
    }
    ap_paths(g, j)
        .iter()
        .map(|p| (format!("[{p}]"), p.target(), p.source(), p.internal_degree()))
        .collect()
}

/// Typed basis of Hom(P_j, E) in internal degree m: pairs of a generator
/// index and the value basis element.
fn res_basis(g: usize, j: usize, m: i64) -> Vec<(usize, BasisElement)> {
    let alg = Algebra::new(g, g).expect("valid parameters");
    let mut out = Vec::new();
    for (idx, (_, v, w, deg)) in res_generators(g, j).iter().enumerate() {
        for x in alg.basis() {
            if x.target() == *v && x.source() == *w && x.degree() == *deg as i64 + m {
                out.push((idx, x));
            }
        }
    }
    out
}

/// The graded piece Hom(P_j, E) in internal degree m, with labels `[p]^*x`.
pub fn hom_space(g: usize, j: usize, m: i64) -> GradedCochainSpace {
    let gens = res_generators(g, j);
    let labels = res_basis(g, j, m)
        .into_iter()
        .map(|(idx, x)| format!("{}^*{}", gens[idx].0, x))
        .collect();
    GradedCochainSpace { level: j, internal_degree: m, labels }
}

/// Matrix of the transpose differential Hom(P_{j-1}, E)_m -> Hom(P_j, E)_m
/// in the `res_basis` bases (rows index level j). A degree-m morphism is
/// left-linear only up to the Koszul rule phi(l xi) = (-1)^{deg(l) m} l
/// phi(xi), so each term contributes with that sign; dropping it computes
/// the cohomology of the underlying ungraded algebra instead, which differs
/// (already at level 3, internal degree -1).
pub fn res_matrix(g: usize, j: usize, m: i64) -> QMatrix {
    assert!(j >= 1);
    let alg = Algebra::new(g, g).expect("valid parameters");
    let rows = res_basis(g, j, m);
    let cols = res_basis(g, j - 1, m);
    let row_index: BTreeMap<(usize, BasisElement), usize> = rows
        .iter()
        .enumerate()
        .map(|(r, key)| (*key, r))
        .collect();
    let d = differential(g, j);
    let mut out = QMatrix::zeros(rows.len(), cols.len());
    for (c, (q, x)) in cols.iter().enumerate() {
        for (p, terms) in d.terms.iter().enumerate() {
            for t in terms.iter().filter(|t| t.target_gen == *q) {
                let Some(lx) = alg.mul_basis(&t.left, x) else { continue };
                let Some(z) = alg.mul_basis(&lx, &t.right) else { continue };
                let r = row_index[&(p, z)];
                if (t.left.degree() * m).rem_euclid(2) == 1 {
                    *out.at_mut(r, c) -= &t.coeff;
                } else {
                    *out.at_mut(r, c) += &t.coeff;
                }
            }
        }
    }
    out
}

/// Cohomology of the resolution complex at level i, internal degree m, for
/// the algebra E(g, g).
pub fn hh_dim_resolution(g: usize, i: usize, m: i64) -> HHResult {
    assert!(i >= 1);
    let dim_cochains = res_basis(g, i, m).len();
    let dim_kernel = dim_cochains - res_matrix(g, i + 1, m).rank();
    let dim_image_in = res_matrix(g, i, m).rank();
    assert!(dim_kernel >= dim_image_in, "boundaries escape cocycles");
    HHResult {
        i,
        internal_degree: m,
        dim_cochains,
        dim_kernel,
        dim_image_in,
        hh_dimension: dim_kernel - dim_image_in,
    }
}

/// A bar-complex basis functional [w]^*b: a composable word of positive
/// basis elements (empty words carry their vertex) and a value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BarGen {
    pub letters: Vec<BasisElement>,
    pub vertex: Vertex,
    pub value: BasisElement,
}

impl BarGen {
    pub fn label(&self) -> String {
        let word: String = self.letters.iter().map(BasisElement::to_string).collect();
        if word.is_empty() {
            format!("[{}]^*{}", BasisElement::E(self.vertex), self.value)
        } else {
            format!("[{word}]^*{}", self.value)
        }
    }
}

/// All composable words of the given length, as (letters, target vertex).
fn bar_words(alg: &Algebra, len: usize) -> Vec<(Vec<BasisElement>, Vertex)> {
    let mut words: Vec<(Vec<BasisElement>, Vertex)> = alg
        .vertices()
        .into_iter()
        .map(|v| (Vec::new(), v))
        .collect();
    for _ in 0..len {
        let mut next = Vec::new();
        for (letters, v) in &words {
            let src = letters.last().map_or(*v, BasisElement::source);
            for t in alg.positive_basis() {
                if t.target() == src {
                    let mut w = letters.clone();
                    w.push(t);
                    next.push((w, *v));
                }
            }
        }
        words = next;
    }
    words
}

/// Number of composable words of the given length (no enumeration).
fn bar_word_count(alg: &Algebra, len: usize) -> usize {
    if len == 0 {
        return alg.n() + 1;
    }
    // counts[v] = words of the current length whose source is v
    let verts = alg.vertices();
    let pos = alg.positive_basis();
    let mut counts: BTreeMap<Vertex, usize> = verts.iter().map(|v| (*v, 1)).collect();
    for _ in 0..len {
        let mut next: BTreeMap<Vertex, usize> = verts.iter().map(|v| (*v, 0)).collect();
        for t in &pos {
            *next.get_mut(&t.source()).unwrap() += counts[&t.target()];
        }
        counts = next;
    }
    counts.values().sum()
}

/// Basis of the reduced bar cochains C^len in internal degree m.
pub fn bar_basis(alg: &Algebra, len: usize, m: i64) -> Vec<BarGen> {
    let mut out = Vec::new();
    for (letters, vertex) in bar_words(alg, len) {
        let src = letters.last().map_or(vertex, BasisElement::source);
        let deg: i64 = letters.iter().map(BasisElement::degree).sum();
        for value in alg.basis() {
            if value.target() == vertex && value.source() == src && value.degree() == deg + m {
                out.push(BarGen { letters: letters.clone(), vertex, value });
            }
        }
    }
    out
}

type BarKey = (Vec<BasisElement>, Vertex, BasisElement);

/// How a letter factors as a product of two positive basis elements.
fn splittings(alg: &Algebra, letter: &BasisElement) -> Option<(BasisElement, BasisElement)> {
    match *letter {
        BasisElement::Y(i) => Some((BasisElement::A(i), BasisElement::B(i))),
        BasisElement::X(i) if i <= alg.n() => Some((BasisElement::B(i), BasisElement::A(i))),
        _ => None,
    }
}

/// The differential of a single basis functional of internal degree m, as a
/// coefficient map on level-(n+1) functionals.
fn delta_of_gen(alg: &Algebra, gen: &BarGen, m: i64) -> BTreeMap<BarKey, Rat> {
    fn add(out: &mut BTreeMap<BarKey, Rat>, key: BarKey, c: Rat) {
        let entry = out.entry(key.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            out.remove(&key);
        }
    }
    let mut out: BTreeMap<BarKey, Rat> = BTreeMap::new();
    let n = gen.letters.len();
    for a in alg.positive_basis() {
        // Prepend: a phi(...), sign (-1)^{deg(a) m}.
        if let Some(ab) = alg.mul_basis(&a, &gen.value) {
            let sign = if (a.degree() * m).rem_euclid(2) == 1 { -Rat::one() } else { Rat::one() };
            let mut letters = Vec::with_capacity(n + 1);
            letters.push(a);
            letters.extend_from_slice(&gen.letters);
            add(&mut out, (letters, a.target(), ab), sign);
        }
        // Append: phi(...) a, sign (-1)^{n+1}.
        if let Some(ba) = alg.mul_basis(&gen.value, &a) {
            let sign = if (n + 1) % 2 == 1 { -Rat::one() } else { Rat::one() };
            let mut letters = gen.letters.clone();
            letters.push(a);
            let vertex = if n == 0 { a.target() } else { gen.vertex };
            add(&mut out, (letters, vertex, ba), sign);
        }
    }
    // Split letter k into a product pair, sign (-1)^{k+1} (0-based k); the
    // value is unchanged.
    for (k, letter) in gen.letters.iter().enumerate() {
        if let Some((x, y)) = splittings(alg, letter) {
            let sign = if (k + 1) % 2 == 1 { -Rat::one() } else { Rat::one() };
            let mut letters = Vec::with_capacity(n + 1);
            letters.extend_from_slice(&gen.letters[..k]);
            letters.push(x);
            letters.push(y);
            letters.extend_from_slice(&gen.letters[k + 1..]);
            add(&mut out, (letters, gen.vertex, gen.value), sign);
        }
    }
    out
}

/// Matrix of delta: C^i_m -> C^{i+1}_m in the `bar_basis` bases.
pub fn bar_matrix(alg: &Algebra, i: usize, m: i64) -> QMatrix {
    let rows = bar_basis(alg, i + 1, m);
    let cols = bar_basis(alg, i, m);
    let row_index: BTreeMap<BarKey, usize> = rows
        .iter()
        .enumerate()
        .map(|(r, gen)| ((gen.letters.clone(), gen.vertex, gen.value), r))
        .collect();
    let mut out = QMatrix::zeros(rows.len(), cols.len());
    for (c, gen) in cols.iter().enumerate() {
        for (key, coeff) in delta_of_gen(alg, gen, m) {
            let r = row_index[&key];
            *out.at_mut(r, c) += &coeff;
        }
    }
    out
}

/// Cohomology of the reduced bar complex of E(g, n) at level i, internal
/// degree m, with the default word cap.
pub fn hh_dim_bar(g: usize, n: usize, i: usize, m: i64) -> Result<HHResult, HochschildError> {
    hh_dim_bar_with_cap(g, n, i, m, DEFAULT_WORD_CAP)
}

pub fn hh_dim_bar_with_cap(
    g: usize,
    n: usize,
    i: usize,
    m: i64,
    cap: usize,
) -> Result<HHResult, HochschildError> {
    assert!(i >= 1);
    let alg = Algebra::new(g, n).expect("valid parameters");
    let required: usize = (i - 1..=i + 1).map(|l| bar_word_count(&alg, l)).sum();
    if required > cap {
        return Err(HochschildError::TooLarge { required, cap });
    }
    let dim_cochains = bar_basis(&alg, i, m).len();
    let dim_kernel = dim_cochains - bar_matrix(&alg, i, m).rank();
    let dim_image_in = bar_matrix(&alg, i - 1, m).rank();
    assert!(dim_kernel >= dim_image_in, "boundaries escape cocycles");
    Ok(HHResult {
        i,
        internal_degree: m,
        dim_cochains,
        dim_kernel,
        dim_image_in,
        hh_dimension: dim_kernel - dim_image_in,
    })
}

/// A finite rational combination of bar basis functionals of one level.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BarCochain {
    pub level: usize,
    pub coefficients: BTreeMap<BarKey, Rat>,
}

impl BarCochain {
    /// Builds a cochain from (word, value, coefficient) terms with nonempty
    /// words; the word's vertex is read off its first letter.
    pub fn from_terms(terms: Vec<(Vec<BasisElement>, BasisElement, Rat)>) -> BarCochain {
        let mut out = BarCochain::default();
        for (letters, value, coeff) in terms {
            assert!(!letters.is_empty());
            out.level = letters.len();
            let vertex = letters[0].target();
            out.add_term((letters, vertex, value), coeff);
        }
        assert!(out.coefficients.keys().all(|(w, _, _)| w.len() == out.level));
        out
    }

    pub fn add_term(&mut self, key: BarKey, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coefficients.entry(key.clone()).or_default();
        *entry += coeff;
        if entry.is_zero() {
            self.coefficients.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// The common internal degree of the terms; panics if mixed.
    pub fn internal_degree(&self) -> i64 {
        let mut degrees = self.coefficients.keys().map(|(w, _, b)| {
            b.degree() - w.iter().map(BasisElement::degree).sum::<i64>()
        });
        let first = degrees.next().expect("empty cochain has no degree");
        assert!(degrees.all(|d| d == first), "cochain is not homogeneous");
        first
    }

    /// The bar differential of the cochain.
    pub fn delta(&self, alg: &Algebra) -> BarCochain {
        if self.is_zero() {
            return BarCochain::default();
        }
        let m = self.internal_degree();
        let mut out = BarCochain { level: self.level + 1, ..BarCochain::default() };
        for ((letters, vertex, value), coeff) in &self.coefficients {
            let gen = BarGen { letters: letters.clone(), vertex: *vertex, value: *value };
            for (key, c) in delta_of_gen(alg, &gen, m) {
                out.add_term(key, coeff * c);
            }
        }
        out
    }

    /// Evaluates the cochain on a composable word.
    pub fn evaluate(&self, letters: &[BasisElement]) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        if letters.is_empty() {
            return out;
        }
        let vertex = letters[0].target();
        for ((w, v, b), c) in &self.coefficients {
            if w == letters && *v == vertex {
                out.add_term(*b, c.clone());
            }
        }
        out
    }

    /// Coordinates with respect to `bar_basis(alg, level, m)`.
    pub fn vector(&self, basis: &[BarGen]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); basis.len()];
        let index: BTreeMap<BarKey, usize> = basis
            .iter()
            .enumerate()
            .map(|(r, gen)| ((gen.letters.clone(), gen.vertex, gen.value), r))
            .collect();
        for (key, c) in &self.coefficients {
            out[index[key]] = c.clone();
        }
        out
    }
}

/// Whether a closed cochain is the differential of a lower cochain, by exact
/// membership in the column space of delta.
pub fn is_coboundary(alg: &Algebra, c: &BarCochain) -> bool {
    let m = c.internal_degree();
    let basis = bar_basis(alg, c.level, m);
    let matrix = bar_matrix(alg, c.level - 1, m);
    matrix.solve(&c.vector(&basis)).is_ok()
}

/// The off-diagonal coefficient matrix of a closed 3-cochain of internal
/// degree -1 on E(g, g): entry (i, j), i != j, is the X_j-coefficient of the
/// value on the word (B_i, Y_i, A_i); the diagonal is dropped.
pub fn alpha_extraction(g: usize, cocycle: &BarCochain) -> Result<QMatrix, HochschildError> {
    let alg = Algebra::new(g, g).expect("valid parameters");
    assert_eq!(cocycle.level, 3);
    assert!(cocycle.is_zero() || cocycle.internal_degree() == -1);
    if !cocycle.delta(&alg).is_zero() {
        return Err(HochschildError::NotACocycle);
    }
    let mut out = QMatrix::zeros(g, g);
    for i in 1..=g {
        let word = vec![BasisElement::B(i), BasisElement::Y(i), BasisElement::A(i)];
        let value = cocycle.evaluate(&word);
        for j in (1..=g).filter(|&j| j != i) {
            *out.at_mut(i - 1, j - 1) = value.coefficient(&BasisElement::X(j));
        }
    }
    Ok(out)
}
