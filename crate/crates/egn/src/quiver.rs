//! The finite-dimensional graded quiver algebras E(g, n).
//!
//! E(g, n) is spanned by idempotents e_O, e_1..e_n, degree-0 arrows A_i,
//! degree-1 arrows B_i, loops Y_i at the skyscraper vertices and loops X_j at
//! the structure-sheaf vertex (j <= g; for j > n these are the extra loops
//! that exist when n < g). Products are morphism compositions: multiply(x, y)
//! is "x after y". The only nonzero products besides the idempotent laws are
//! A_i o B_i = Y_i and B_i o A_i = X_i; in particular the augmentation ideal
//! cubes to zero.

use std::collections::BTreeMap;
use std::fmt;

use crate::rat::Rat;

/// A vertex of the quiver: the structure sheaf or the i-th skyscraper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Structure,
    Skyscraper(usize),
}

/// A basis element of E(g, n). Indices are 1-based; `A`, `B`, `Y` carry a
/// skyscraper index `i <= n`, `X` a loop index `j <= g`.
///
/// The derived `Ord` gives the canonical basis order
/// `e0 < e1 < ... < A1 < ... < B1 < ... < Y1 < ... < X1 < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisElement {
    E(Vertex),
    A(usize),
    B(usize),
    Y(usize),
    X(usize),
}

impl BasisElement {
    /// Internal (cohomological) degree: 0 for idempotents and A, 1 otherwise.
    pub fn degree(&self) -> i64 {
        match self {
            BasisElement::E(_) | BasisElement::A(_) => 0,
            _ => 1,
        }
    }

    /// Source vertex as a morphism.
    pub fn source(&self) -> Vertex {
        match *self {
            BasisElement::E(v) => v,
            BasisElement::A(_) => Vertex::Structure,
            BasisElement::B(i) => Vertex::Skyscraper(i),
            BasisElement::Y(i) => Vertex::Skyscraper(i),
            BasisElement::X(_) => Vertex::Structure,
        }
    }

    /// Target vertex as a morphism.
    pub fn target(&self) -> Vertex {
        match *self {
            BasisElement::E(v) => v,
            BasisElement::A(i) => Vertex::Skyscraper(i),
            BasisElement::B(_) => Vertex::Structure,
            BasisElement::Y(i) => Vertex::Skyscraper(i),
            BasisElement::X(_) => Vertex::Structure,
        }
    }

    pub fn is_idempotent(&self) -> bool {
        matches!(self, BasisElement::E(_))
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisElement::E(Vertex::Structure) => write!(f, "e0"),
            BasisElement::E(Vertex::Skyscraper(i)) => write!(f, "e{i}"),
            BasisElement::A(i) => write!(f, "A{i}"),
            BasisElement::B(i) => write!(f, "B{i}"),
            BasisElement::Y(i) => write!(f, "Y{i}"),
            BasisElement::X(j) => write!(f, "X{j}"),
        }
    }
}

/// Errors from algebra construction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("invalid parameters g={g}, n={n}: need 1 <= n <= g")]
    InvalidParams { g: usize, n: usize },
}

/// Immutable handle for E(g, n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    g: usize,
    n: usize,
}

impl Algebra {
    pub fn new(g: usize, n: usize) -> Result<Algebra, AlgebraError> {
        if n < 1 || n > g {
            return Err(AlgebraError::InvalidParams { g, n });
        }
        Ok(Algebra { g, n })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `4n + g + 1`.
    pub fn dimension(&self) -> usize {
        4 * self.n + self.g + 1
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        std::iter::once(Vertex::Structure)
            .chain((1..=self.n).map(Vertex::Skyscraper))
            .collect()
    }

    /// The canonical ordered basis.
    pub fn basis(&self) -> Vec<BasisElement> {
        let mut out = Vec::with_capacity(self.dimension());
        out.push(BasisElement::E(Vertex::Structure));
        out.extend((1..=self.n).map(|i| BasisElement::E(Vertex::Skyscraper(i))));
        out.extend((1..=self.n).map(BasisElement::A));
        out.extend((1..=self.n).map(BasisElement::B));
        out.extend((1..=self.n).map(BasisElement::Y));
        out.extend((1..=self.g).map(BasisElement::X));
        out
    }

    /// The non-idempotent basis elements, spanning the augmentation ideal.
    pub fn positive_basis(&self) -> Vec<BasisElement> {
        self.basis()
            .into_iter()
            .filter(|b| !b.is_idempotent())
            .collect()
    }

    pub fn contains(&self, b: &BasisElement) -> bool {
        match *b {
            BasisElement::E(Vertex::Structure) => true,
            BasisElement::E(Vertex::Skyscraper(i)) => (1..=self.n).contains(&i),
            BasisElement::A(i) | BasisElement::B(i) | BasisElement::Y(i) => {
                (1..=self.n).contains(&i)
            }
            BasisElement::X(j) => (1..=self.g).contains(&j),
        }
    }

    /// Product of two basis elements, `x` after `y`; `None` means zero.
    pub fn mul_basis(&self, x: &BasisElement, y: &BasisElement) -> Option<BasisElement> {
        debug_assert!(self.contains(x) && self.contains(y));
        if x.source() != y.target() {
            return None;
        }
        match (*x, *y) {
            (BasisElement::E(_), y) => Some(y),
            (x, BasisElement::E(_)) => Some(x),
            (BasisElement::A(i), BasisElement::B(j)) if i == j => Some(BasisElement::Y(i)),
            (BasisElement::B(i), BasisElement::A(j)) if i == j => Some(BasisElement::X(i)),
            _ => None,
        }
    }

    /// Bilinear extension of the basis product table.
    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (bx, cx) in &x.coefficients {
            if cx.is_zero() {
                continue;
            }
            for (by, cy) in &y.coefficients {
                if cy.is_zero() {
                    continue;
                }
                if let Some(b) = self.mul_basis(bx, by) {
                    out.add_term(b, cx * cy);
                }
            }
        }
        out
    }

    /// The multiplicative identity: the sum of all idempotents.
    pub fn identity(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for v in self.vertices() {
            out.add_term(BasisElement::E(v), Rat::one());
        }
        out
    }
}

/// A linear combination of basis elements with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    coefficients: BTreeMap<BasisElement, Rat>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn from_basis(b: BasisElement) -> Self {
        let mut out = AlgebraElement::zero();
        out.add_term(b, Rat::one());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficient(&self, b: &BasisElement) -> Rat {
        self.coefficients.get(b).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisElement, &Rat)> {
        self.coefficients.iter()
    }

    /// Adds `c * b`, dropping the entry if the total cancels.
    pub fn add_term(&mut self, b: BasisElement, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coefficients.entry(b).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coefficients.remove(&b);
        }
    }

    pub fn add(&self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (b, c) in &rhs.coefficients {
            out.add_term(*b, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> AlgebraElement {
        if c.is_zero() {
            return AlgebraElement::zero();
        }
        AlgebraElement {
            coefficients: self
                .coefficients
                .iter()
                .map(|(b, x)| (*b, x * c))
                .collect(),
        }
    }

    pub fn neg(&self) -> AlgebraElement {
        AlgebraElement {
            coefficients: self.coefficients.iter().map(|(b, x)| (*b, -x)).collect(),
        }
    }

    /// The common degree of all terms, when homogeneous.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degs = self.coefficients.keys().map(BasisElement::degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasisElement::{A, B, E, X, Y};

    fn elem(b: BasisElement) -> AlgebraElement {
        AlgebraElement::from_basis(b)
    }

    #[test]
    fn dimensions_match_the_counting_formula() {
        assert_eq!(Algebra::new(1, 1).unwrap().dimension(), 6);
        assert_eq!(Algebra::new(3, 3).unwrap().dimension(), 16);
        let e31 = Algebra::new(3, 1).unwrap();
        assert_eq!(e31.dimension(), 8);
        // The extra loops X2, X3 exist and sit at the structure vertex.
        let basis = e31.basis();
        assert_eq!(basis.len(), 8);
        assert!(basis.contains(&X(2)) && basis.contains(&X(3)));
        assert_eq!(X(2).source(), Vertex::Structure);
        assert_eq!(X(2).target(), Vertex::Structure);
        assert!(Algebra::new(2, 3).is_err());
        assert!(Algebra::new(2, 0).is_err());
    }

    #[test]
    fn generator_products() {
        let alg = Algebra::new(2, 2).unwrap();
        assert_eq!(alg.mul_basis(&B(1), &A(1)), Some(X(1)));
        assert_eq!(alg.mul_basis(&A(1), &B(1)), Some(Y(1)));
        assert_eq!(alg.mul_basis(&A(1), &B(2)), None);
        assert_eq!(alg.mul_basis(&B(1), &B(1)), None);
        assert_eq!(alg.mul_basis(&Y(1), &A(1)), None);
        assert_eq!(alg.mul_basis(&X(1), &X(2)), None);
        // Idempotent laws.
        assert_eq!(alg.mul_basis(&E(Vertex::Structure), &X(2)), Some(X(2)));
        assert_eq!(alg.mul_basis(&X(2), &E(Vertex::Structure)), Some(X(2)));
        assert_eq!(alg.mul_basis(&E(Vertex::Skyscraper(1)), &A(1)), Some(A(1)));
        assert_eq!(alg.mul_basis(&A(1), &E(Vertex::Skyscraper(1))), None);
    }

    #[test]
    fn associativity_exhaustive_up_to_g4() {
        for (g, n) in [(1, 1), (2, 2), (3, 1), (3, 3), (4, 2), (4, 4)] {
            let alg = Algebra::new(g, n).unwrap();
            let basis = alg.basis();
            for x in &basis {
                for y in &basis {
                    for z in &basis {
                        let xy_z = alg.multiply(
                            &alg.multiply(&elem(*x), &elem(*y)),
                            &elem(*z),
                        );
                        let x_yz = alg.multiply(
                            &elem(*x),
                            &alg.multiply(&elem(*y), &elem(*z)),
                        );
                        assert_eq!(xy_z, x_yz, "associativity failed at ({x}, {y}, {z})");
                    }
                }
            }
        }
    }

    #[test]
    fn products_are_graded() {
        let alg = Algebra::new(4, 4).unwrap();
        for x in alg.basis() {
            for y in alg.basis() {
                if let Some(p) = alg.mul_basis(&x, &y) {
                    assert_eq!(p.degree(), x.degree() + y.degree());
                }
            }
        }
    }

    #[test]
    fn idempotent_sum_is_the_identity() {
        let alg = Algebra::new(3, 2).unwrap();
        let one = alg.identity();
        for b in alg.basis() {
            assert_eq!(alg.multiply(&one, &elem(b)), elem(b));
            assert_eq!(alg.multiply(&elem(b), &one), elem(b));
        }
    }

    #[test]
    fn augmentation_ideal_nilpotency() {
        let alg = Algebra::new(4, 2).unwrap();
        let plus = alg.positive_basis();
        // (E+)^2 is spanned by the loops X_i, Y_i that arise as products.
        let mut square_terms = std::collections::BTreeSet::new();
        for x in &plus {
            for y in &plus {
                if let Some(p) = alg.mul_basis(x, y) {
                    square_terms.insert(p);
                }
            }
        }
        assert_eq!(
            square_terms.into_iter().collect::<Vec<_>>(),
            vec![Y(1), Y(2), X(1), X(2)]
        );
        // (E+)^3 = 0.
        for x in &plus {
            for y in &plus {
                for z in &plus {
                    let xy = match alg.mul_basis(x, y) {
                        Some(p) => p,
                        None => continue,
                    };
                    assert_eq!(alg.mul_basis(&xy, z), None, "({x}{y}){z} nonzero");
                }
            }
        }
    }

    #[test]
    fn text_names() {
        assert_eq!(E(Vertex::Structure).to_string(), "e0");
        assert_eq!(E(Vertex::Skyscraper(2)).to_string(), "e2");
        assert_eq!(A(1).to_string(), "A1");
        assert_eq!(X(3).to_string(), "X3");
    }

    #[test]
    fn element_arithmetic_cancels() {
        let mut x = AlgebraElement::from_basis(X(1));
        x.add_term(X(1), Rat::from_int(-1));
        assert!(x.is_zero());
        let y = elem(Y(1)).add(&elem(A(1)));
        assert_eq!(y.homogeneous_degree(), None);
        assert_eq!(elem(Y(1)).add(&elem(X(1))).homogeneous_degree(), Some(1));
    }
}
