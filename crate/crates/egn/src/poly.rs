//! Univariate polynomials and rational functions over `Rat`.
//!
//! These are the function models for everything living on the projective
//! line: sections of line bundles on nodal curves, the wheel and
//! hyperelliptic data, and the inputs to Laurent expansion. Representations
//! are dense and always normalized (no trailing zero coefficients; rational
//! functions are reduced with a monic denominator), so equality is
//! structural.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::rat::Rat;

/// A dense univariate polynomial; `coeffs[k]` is the coefficient of `t^k`.
///
/// Invariant: no trailing zeros, so the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})t"),
                _ => format!("({c})t^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(coeffs)
    }

    /// `t - c`, the linear factor with root `c`.
    pub fn linear_root(c: &Rat) -> Self {
        Poly::from_coeffs(vec![-c, Rat::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Rat::from_int(k as i64) * c)
                .collect(),
        )
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Euclidean division; panics on zero divisor.
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let d = divisor.coeffs.len();
        if self.coeffs.len() < d {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = divisor.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); rem.len() - d + 1];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + d - 1] * &lead_inv;
            if q.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    rem[k + j] -= &q * b;
                }
            }
            quot[k] = q;
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic greatest common divisor.
    ///
    /// Runs on integer coefficient vectors with a primitive remainder
    /// sequence: each pseudo-remainder is stripped of its integer content,
    /// which keeps coefficient heights small where fraction-based Euclid
    /// blows up.
    pub fn gcd(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            let p = if self.is_zero() { rhs } else { self };
            return match p.leading() {
                Some(l) if !l.is_one() => {
                    let inv = l.recip();
                    p.scale(&inv)
                }
                _ => p.clone(),
            };
        }
        let mut a = primitive_part(integer_coeffs(self));
        let mut b = primitive_part(integer_coeffs(rhs));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = primitive_part(pseudo_rem(&a, &b));
            a = b;
            b = r;
        }
        let lead = a.last().expect("gcd of nonzero polynomials is nonzero").clone();
        Poly::from_coeffs(
            a.into_iter()
                .map(|c| Rat::from_big(c, lead.clone()))
                .collect(),
        )
    }

    /// `p(t + c)`, the Taylor shift used for expansion at a finite center.
    pub fn shift(&self, c: &Rat) -> Poly {
        let mut acc = Poly::zero();
        let linear = Poly::from_coeffs(vec![c.clone(), Rat::one()]);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&linear);
            acc = acc.add(&Poly::constant(a.clone()));
        }
        acc
    }

    /// Coefficient-reversed polynomial `t^deg * p(1/t)` (for expansion at
    /// infinity).
    pub fn reversed(&self) -> Poly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Poly::from_coeffs(coeffs)
    }

    /// Multiplicity of `c` as a root (0 when `p(c) != 0`); panics on the zero
    /// polynomial.
    pub fn root_multiplicity(&self, c: &Rat) -> usize {
        assert!(!self.is_zero(), "root multiplicity of the zero polynomial");
        let factor = Poly::linear_root(c);
        let mut p = self.clone();
        let mut mult = 0;
        loop {
            let (q, r) = p.divrem(&factor);
            if !r.is_zero() {
                return mult;
            }
            mult += 1;
            p = q;
        }
    }

    /// `prod (t - r)` over the given roots.
    pub fn from_roots(roots: &[Rat]) -> Poly {
        roots
            .iter()
            .fold(Poly::one(), |acc, r| acc.mul(&Poly::linear_root(r)))
    }
}

/// Coefficients scaled to a common denominator, as integers.
fn integer_coeffs(p: &Poly) -> Vec<BigInt> {
    let mut l = BigInt::from(1);
    for c in p.coeffs() {
        l = l.lcm(c.denom());
    }
    p.coeffs()
        .iter()
        .map(|c| c.numer() * (&l / c.denom()))
        .collect()
}

/// Divide out the integer content (gcd of the coefficients).
fn primitive_part(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    if v.is_empty() {
        return v;
    }
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
    }
    for c in &mut v {
        *c = &*c / &g;
    }
    v
}

/// Integer pseudo-remainder: a constant multiple of `a mod b`, computed
/// without fractions by premultiplying with the leading coefficient of `b`
/// at each elimination step.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r: Vec<BigInt> = a.to_vec();
    while r.len() >= b.len() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in &mut r {
            *c *= &lb;
        }
        let shift = dr - db;
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= &lr * bc;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

/// A reduced rational function `num/den` with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl RatFunc {
    /// Builds and normalizes `num/den`; panics if `den` is the zero
    /// polynomial.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        if den.degree() == Some(0) {
            let inv = den.leading().unwrap().recip();
            return RatFunc {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.divrem(&g).0, den.divrem(&g).0)
        };
        let lead_inv = den.leading().unwrap().recip();
        RatFunc {
            num: num.scale(&lead_inv),
            den: den.scale(&lead_inv),
        }
    }

    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    /// `c / (t - p)^k` for `k >= 1`.
    pub fn pole_term(c: Rat, p: &Rat, k: usize) -> Self {
        let mut den = Poly::one();
        let factor = Poly::linear_root(p);
        for _ in 0..k {
            den = den.mul(&factor);
        }
        RatFunc::new(Poly::constant(c), den)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().map_or(true, |d| d == 0) && self.den.degree() == Some(0)
    }

    /// Shared core of `add` and `sub`. Splitting the denominators along
    /// their gcd keeps every reduction small: with d1 = g d1', d2 = g d2'
    /// the sum is (n1 d2' + n2 d1') / (d1 d2') and any common factor of
    /// numerator and denominator divides g.
    fn combine(&self, rhs: &RatFunc, negate: bool) -> RatFunc {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { rhs.neg() } else { rhs.clone() };
        }
        let rn = if negate { rhs.num.neg() } else { rhs.num.clone() };
        let g0 = self.den.gcd(&rhs.den);
        if g0.degree() == Some(0) {
            return RatFunc {
                num: self.num.mul(&rhs.den).add(&rn.mul(&self.den)),
                den: self.den.mul(&rhs.den),
            };
        }
        let d1r = self.den.divrem(&g0).0;
        let d2r = rhs.den.divrem(&g0).0;
        let t = self.num.mul(&d2r).add(&rn.mul(&d1r));
        if t.is_zero() {
            return RatFunc::zero();
        }
        let g1 = t.gcd(&g0);
        if g1.degree() == Some(0) {
            RatFunc {
                num: t,
                den: self.den.mul(&d2r),
            }
        } else {
            RatFunc {
                num: t.divrem(&g1).0,
                den: self.den.divrem(&g1).0.mul(&d2r),
            }
        }
    }

    pub fn add(&self, rhs: &RatFunc) -> RatFunc {
        self.combine(rhs, false)
    }

    pub fn sub(&self, rhs: &RatFunc) -> RatFunc {
        self.combine(rhs, true)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    /// Cross-cancel before multiplying: with both factors reduced, the
    /// gcds of each numerator with the opposite denominator carry every
    /// common factor, so the assembled product needs no further reduction.
    pub fn mul(&self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (n1, d2) = if g1.degree() == Some(0) {
            (self.num.clone(), rhs.den.clone())
        } else {
            (self.num.divrem(&g1).0, rhs.den.divrem(&g1).0)
        };
        let (n2, d1) = if g2.degree() == Some(0) {
            (rhs.num.clone(), self.den.clone())
        } else {
            (rhs.num.divrem(&g2).0, self.den.divrem(&g2).0)
        };
        RatFunc {
            num: n1.mul(&n2),
            den: d1.mul(&d2),
        }
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() || self.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Division; panics when `rhs` is zero.
    pub fn div(&self, rhs: &RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by the zero rational function");
        RatFunc::new(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }

    pub fn derivative(&self) -> RatFunc {
        RatFunc::new(
            self.num
                .derivative()
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.derivative())),
            self.den.mul(&self.den),
        )
    }

    /// Value at a finite point, or `None` at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Order of vanishing at a finite point: positive at a zero, negative at
    /// a pole, 0 otherwise. Returns `None` for the zero function.
    pub fn order_at(&self, c: &Rat) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        // num and den are coprime, so at most one of the two terms is nonzero.
        Some(self.num.root_multiplicity(c) as i64 - self.den.root_multiplicity(c) as i64)
    }

    /// Order of vanishing at infinity (`deg den - deg num`); `None` for zero.
    pub fn order_at_infinity(&self) -> Option<i64> {
        let dn = self.num.degree()? as i64;
        let dd = self.den.degree().unwrap() as i64;
        Some(dd - dn)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rint};

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| rint(c)).collect())
    }

    #[test]
    fn normalization_trims_trailing_zeros() {
        assert_eq!(p(&[1, 2, 0, 0]), p(&[1, 2]));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[0, 0]).degree(), None);
        assert_eq!(p(&[5]).degree(), Some(0));
    }

    #[test]
    fn divrem_and_gcd() {
        let a = p(&[-1, 0, 1]); // t^2 - 1
        let b = p(&[1, 1]); // t + 1
        let (q, r) = a.divrem(&b);
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&b), b);
        // gcd is monic even with non-monic inputs.
        assert_eq!(p(&[-2, 0, 2]).gcd(&p(&[3, 3])), p(&[1, 1]));
        assert_eq!(p(&[1, 1]).gcd(&p(&[1, 0, 1])), Poly::one());
    }

    #[test]
    fn shift_is_substitution() {
        let q = p(&[1, 2, 3]); // 1 + 2t + 3t^2
        let shifted = q.shift(&rint(5)); // q(t + 5)
        for x in [-2i64, 0, 1, 7] {
            assert_eq!(shifted.eval(&rint(x)), q.eval(&rint(x + 5)));
        }
    }

    #[test]
    fn root_multiplicity_counts_factors() {
        let q = Poly::from_roots(&[rint(2), rint(2), rint(-1)]);
        assert_eq!(q.root_multiplicity(&rint(2)), 2);
        assert_eq!(q.root_multiplicity(&rint(-1)), 1);
        assert_eq!(q.root_multiplicity(&rint(0)), 0);
    }

    #[test]
    fn ratfunc_reduces_and_normalizes() {
        // (2t^2 - 2) / (4t + 4) = (t - 1)/2.
        let f = RatFunc::new(p(&[-2, 0, 2]), p(&[4, 4]));
        assert_eq!(f.numerator(), &Poly::from_coeffs(vec![rat(-1, 2), rat(1, 2)]));
        assert_eq!(f.denominator(), &Poly::one());
        assert_eq!(f.eval(&rint(3)), Some(rint(1)));
    }

    #[test]
    fn ratfunc_field_ops() {
        let f = RatFunc::pole_term(Rat::one(), &rint(0), 1); // 1/t
        let g = RatFunc::from_poly(p(&[0, 1])); // t
        assert_eq!(f.mul(&g), RatFunc::constant(Rat::one()));
        let sum = f.add(&g); // (1 + t^2)/t
        assert_eq!(sum.eval(&rint(2)), Some(rat(5, 2)));
        assert_eq!(sum.eval(&rint(0)), None);
        assert_eq!(f.div(&g), RatFunc::pole_term(Rat::one(), &rint(0), 2));
    }

    #[test]
    fn orders_at_points_and_infinity() {
        // t / (t - 1)^2
        let f = RatFunc::new(p(&[0, 1]), p(&[1, -2, 1]));
        assert_eq!(f.order_at(&rint(0)), Some(1));
        assert_eq!(f.order_at(&rint(1)), Some(-2));
        assert_eq!(f.order_at(&rint(5)), Some(0));
        assert_eq!(f.order_at_infinity(), Some(1));
        assert_eq!(RatFunc::zero().order_at(&rint(0)), None);
    }

    #[test]
    fn derivative_quotient_rule() {
        let f = RatFunc::pole_term(Rat::one(), &rint(1), 1); // 1/(t-1)
        let df = f.derivative(); // -1/(t-1)^2
        assert_eq!(df, RatFunc::pole_term(rint(-1), &rint(1), 2));
    }
}
