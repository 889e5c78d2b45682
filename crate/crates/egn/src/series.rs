//! Truncated Laurent series over the rationals.
//!
//! A series stores a window of exactly known coefficients starting at
//! `lowest_exponent`; everything at or above `truncation_order` is unknown.
//! Binary operations propagate the tightest valid truncation, so a
//! coefficient that is readable from a result is guaranteed correct. This
//! bookkeeping is what lets the canonical-parameter pipeline certify which
//! expansion constants it has fully determined.
//!
//! Invariants:
//! - `truncation_order > lowest_exponent`,
//! - stored coefficients begin and end with a nonzero value (the zero series
//!   stores nothing); coefficients between the stored window and the
//!   truncation order are known to be zero.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::{Poly, RatFunc};
use crate::rat::Rat;

/// Truncation bound used for exactly known series (polynomial windows).
/// Kept far from `i64::MAX` so exponent arithmetic cannot overflow.
pub const EXACT: i64 = i64::MAX / 4;

/// Errors from series composition and reversion.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series is not a formal parameter (needs lowest exponent 1 and nonzero leading coefficient)")]
    NotAParameter,
    #[error("series are not composable: {0}")]
    NotComposable(String),
}

/// Where to expand a rational function. The derived order (finite points
/// first, by value) makes the type usable as a divisor key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExpansionPoint {
    Finite(Rat),
    Infinity,
}

/// A truncated Laurent series in one formal variable.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    lowest_exponent: i64,
    coefficients: Vec<Rat>,
    truncation_order: i64,
}

impl std::fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})s^{}", self.lowest_exponent + k as i64))
            .collect();
        if terms.is_empty() {
            terms.push("0".into());
        }
        if self.truncation_order >= EXACT {
            write!(f, "{}", terms.join(" + "))
        } else {
            write!(f, "{} + O(s^{})", terms.join(" + "), self.truncation_order)
        }
    }
}

impl LaurentSeries {
    /// Builds a series from a coefficient window and normalizes it.
    ///
    /// `coefficients[k]` is the coefficient of `s^(lowest_exponent + k)`.
    /// Coefficients at or above `truncation_order` are discarded. Panics if
    /// the window is empty, i.e. `truncation_order <= lowest_exponent` with a
    /// nonzero leading part.
    pub fn new(lowest_exponent: i64, coefficients: Vec<Rat>, truncation_order: i64) -> Self {
        let trunc = truncation_order.min(EXACT);
        let mut lo = lowest_exponent;
        let mut coeffs = coefficients;
        let keep = (trunc - lo).max(0) as usize;
        coeffs.truncate(keep.min(coeffs.len()));
        while coeffs.first().is_some_and(Rat::is_zero) {
            coeffs.remove(0);
            lo += 1;
        }
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            lo = trunc - 1;
        }
        assert!(
            trunc > lo,
            "series truncation order {trunc} does not exceed lowest exponent {lo}"
        );
        LaurentSeries {
            lowest_exponent: lo,
            coefficients: coeffs,
            truncation_order: trunc,
        }
    }

    /// The zero series, known to be zero below `truncation_order`.
    pub fn zero(truncation_order: i64) -> Self {
        LaurentSeries::new(truncation_order.min(EXACT) - 1, Vec::new(), truncation_order)
    }

    /// `c * s^e`, exactly known.
    pub fn monomial(c: Rat, e: i64) -> Self {
        LaurentSeries::new(e, vec![c], EXACT)
    }

    /// A polynomial in `s`, exactly known.
    pub fn from_poly(p: &Poly) -> Self {
        LaurentSeries::new(0, p.coeffs().to_vec(), EXACT)
    }

    pub fn lowest_exponent(&self) -> i64 {
        self.lowest_exponent
    }

    pub fn truncation_order(&self) -> i64 {
        self.truncation_order
    }

    /// True when every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// The coefficient of `s^e`, or `None` when `e` is beyond the truncation.
    pub fn coefficient(&self, e: i64) -> Option<Rat> {
        if e >= self.truncation_order {
            return None;
        }
        let k = e - self.lowest_exponent;
        if k < 0 || k as usize >= self.coefficients.len() {
            Some(Rat::zero())
        } else {
            Some(self.coefficients[k as usize].clone())
        }
    }

    /// The stored window, for serialization and display.
    pub fn coefficients(&self) -> &[Rat] {
        &self.coefficients
    }

    /// Restricts the known window to exponents `< order`.
    pub fn truncate_to(&self, order: i64) -> Self {
        LaurentSeries::new(
            self.lowest_exponent,
            self.coefficients.clone(),
            order.min(self.truncation_order),
        )
    }

    /// True when the two series agree on every coefficient both know.
    pub fn agrees_with(&self, other: &LaurentSeries) -> bool {
        let upto = self.truncation_order.min(other.truncation_order);
        let from = self.lowest_exponent.min(other.lowest_exponent);
        (from..upto).all(|e| self.coefficient(e) == other.coefficient(e))
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            lowest_exponent: self.lowest_exponent,
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            truncation_order: self.truncation_order,
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return LaurentSeries::zero(self.truncation_order);
        }
        LaurentSeries {
            lowest_exponent: self.lowest_exponent,
            coefficients: self.coefficients.iter().map(|a| a * c).collect(),
            truncation_order: self.truncation_order,
        }
    }

    pub fn add(&self, rhs: &LaurentSeries) -> Self {
        let trunc = self.truncation_order.min(rhs.truncation_order);
        // Iterate only over the union of the stored windows; the canonical
        // zero stores nothing and must not widen the range.
        let (lo, hi) = match (self.is_zero(), rhs.is_zero()) {
            (true, true) => return LaurentSeries::zero(trunc),
            (true, false) => (rhs.lowest_exponent, rhs.stored_end()),
            (false, true) => (self.lowest_exponent, self.stored_end()),
            (false, false) => (
                self.lowest_exponent.min(rhs.lowest_exponent),
                self.stored_end().max(rhs.stored_end()),
            ),
        };
        let hi = hi.min(trunc);
        if hi <= lo {
            return LaurentSeries::zero(trunc);
        }
        let coeffs = (lo..hi)
            .map(|e| {
                self.coefficient(e).unwrap_or_default() + rhs.coefficient(e).unwrap_or_default()
            })
            .collect();
        LaurentSeries::new(lo, coeffs, trunc)
    }

    pub fn sub(&self, rhs: &LaurentSeries) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &LaurentSeries) -> Self {
        // O(s^T1) * O(s^lo2) contributes nothing below T1 + lo2; symmetrically
        // for the other factor, giving the tightest safe truncation.
        let trunc = (self.truncation_order.saturating_add(rhs.lowest_exponent))
            .min(rhs.truncation_order.saturating_add(self.lowest_exponent))
            .min(EXACT);
        if self.is_zero() || rhs.is_zero() {
            return LaurentSeries::zero(trunc);
        }
        let lo = self.lowest_exponent + rhs.lowest_exponent;
        let len = (self.coefficients.len() + rhs.coefficients.len() - 1)
            .min((trunc.saturating_sub(lo)).max(0) as usize);
        let mut coeffs = vec![Rat::zero(); len];
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coefficients.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        LaurentSeries::new(lo, coeffs, trunc)
    }

    /// Term-wise derivative `d/ds`.
    pub fn derivative(&self) -> Self {
        let trunc = if self.truncation_order >= EXACT {
            EXACT
        } else {
            self.truncation_order - 1
        };
        let coeffs = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * Rat::from_int(self.lowest_exponent + k as i64))
            .collect();
        LaurentSeries::new(self.lowest_exponent - 1, coeffs, trunc)
    }

    /// Multiplicative inverse; `None` when the series is zero to truncation.
    ///
    /// Needs a finite truncation unless the series is a monomial (the inverse
    /// of a longer exact series has infinitely many terms).
    pub fn invert(&self) -> Option<LaurentSeries> {
        if self.is_zero() {
            return None;
        }
        let v = self.lowest_exponent;
        if self.coefficients.len() == 1 {
            let trunc = if self.truncation_order >= EXACT {
                EXACT
            } else {
                self.truncation_order - 2 * v
            };
            return Some(LaurentSeries::new(
                -v,
                vec![self.coefficients[0].recip()],
                trunc,
            ));
        }
        assert!(
            self.truncation_order < EXACT,
            "inverse of a non-monomial series needs a finite truncation"
        );
        let window = (self.truncation_order - v) as usize;
        let unit: Vec<Rat> = (0..window)
            .map(|k| self.coefficient(v + k as i64).unwrap())
            .collect();
        let lead_inv = unit[0].recip();
        let mut inv = vec![Rat::zero(); window];
        inv[0] = lead_inv.clone();
        for k in 1..window {
            let mut acc = Rat::zero();
            for m in 1..=k {
                if !unit[m].is_zero() && !inv[k - m].is_zero() {
                    acc += &unit[m] * &inv[k - m];
                }
            }
            inv[k] = -(acc * &lead_inv);
        }
        Some(LaurentSeries::new(-v, inv, self.truncation_order - 2 * v))
    }

    /// Small integer power, through [`invert`] for negative exponents.
    pub fn pow(&self, e: i64) -> Option<LaurentSeries> {
        if e == 0 {
            return Some(LaurentSeries::monomial(Rat::one(), 0));
        }
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    fn stored_end(&self) -> i64 {
        self.lowest_exponent + self.coefficients.len() as i64
    }
}

/// Formal substitution `outer(inner)`.
///
/// `inner` must have positive valuation; when `outer` has negative exponents
/// `inner` must additionally be invertible (nonzero to truncation). The
/// result truncation accounts both for the truncation of `inner` and for the
/// unknown tail of `outer` entering at `inner^truncation`.
pub fn compose(outer: &LaurentSeries, inner: &LaurentSeries) -> Result<LaurentSeries, SeriesError> {
    if inner.is_zero() {
        if outer.lowest_exponent < 0 {
            return Err(SeriesError::NotComposable(
                "outer has a pole but inner is zero to truncation".into(),
            ));
        }
        let c0 = outer.coefficient(0).ok_or_else(|| {
            SeriesError::NotComposable("outer constant term is beyond its truncation".into())
        })?;
        let trunc = inner.truncation_order;
        return Ok(LaurentSeries::new(trunc - 1, vec![], trunc).add(&LaurentSeries::monomial(c0, 0)));
    }
    let v = inner.lowest_exponent;
    if v < 1 {
        return Err(SeriesError::NotComposable(format!(
            "inner series has lowest exponent {v}, need >= 1"
        )));
    }
    // Error from the unknown tail of outer: O(inner^T_out) = O(s^(v*T_out)).
    let cap = if outer.truncation_order >= EXACT {
        EXACT
    } else {
        v.saturating_mul(outer.truncation_order).min(EXACT)
    };
    let mut result = LaurentSeries::zero(EXACT);
    // Non-negative part by Horner from the highest known exponent.
    let hi = outer.stored_end();
    if hi > 0 {
        let mut acc = LaurentSeries::zero(EXACT);
        for e in (0..hi).rev() {
            acc = acc.mul(inner);
            let c = outer.coefficient(e).expect("coefficient below stored end");
            if !c.is_zero() {
                acc = acc.add(&LaurentSeries::monomial(c, 0));
            }
        }
        result = result.add(&acc);
    }
    // Negative part through the inverse of inner.
    if outer.lowest_exponent < 0 {
        let inv = inner.invert().ok_or_else(|| {
            SeriesError::NotComposable("inner is not invertible to truncation".into())
        })?;
        let mut power = inv.clone();
        for e in (outer.lowest_exponent..0).rev() {
            let c = outer.coefficient(e).expect("coefficient below stored end");
            if !c.is_zero() {
                result = result.add(&power.scale(&c));
            }
            if e > outer.lowest_exponent {
                power = power.mul(&inv);
            }
        }
    }
    Ok(result.truncate_to(cap))
}

/// Compositional inverse of a formal parameter `f = c1 s + c2 s^2 + ...`.
///
/// Solves coefficient by coefficient: the degree-k residual of `f(g)` against
/// the identity is killed by the degree-k coefficient of `g`. The result has
/// the same truncation window as the input, and satisfies
/// `compose(f, revert(f)) = s` to truncation.
pub fn revert(f: &LaurentSeries) -> Result<LaurentSeries, SeriesError> {
    if f.lowest_exponent != 1 || f.is_zero() {
        return Err(SeriesError::NotAParameter);
    }
    assert!(
        f.truncation_order < EXACT,
        "reversion needs a finite truncation"
    );
    let t = f.truncation_order;
    let c1 = f.coefficient(1).unwrap();
    let c1_inv = c1.recip();
    // Known window of f as an exact polynomial: valid because the degree-k
    // coefficient of f(g) only involves coefficients of f up to degree k.
    let f_window = LaurentSeries::new(
        1,
        (1..t).map(|e| f.coefficient(e).unwrap()).collect(),
        EXACT,
    );
    let mut b: Vec<Rat> = vec![c1_inv.clone()];
    for k in 2..t {
        let g_partial = LaurentSeries::new(1, b.clone(), EXACT);
        let h = compose(&f_window, &g_partial).expect("polynomial composition");
        let r = h.coefficient(k).expect("exact composition coefficient");
        b.push(-(r * &c1_inv));
    }
    Ok(LaurentSeries::new(1, b, t))
}

/// Laurent expansion of a rational function.
///
/// At a finite center the local coordinate is `s = t - center`; at infinity
/// it is `s = 1/t`. Coefficients are exact for every exponent below `order`.
/// When the expansion starts at or beyond `order` (a deep zero at the
/// center), every known coefficient is zero and the result is the zero
/// series with that window.
pub fn expand_rational(f: &RatFunc, center: &ExpansionPoint, order: i64) -> LaurentSeries {
    if f.is_zero() {
        return LaurentSeries::zero(order);
    }
    let (num, den, shift) = match center {
        ExpansionPoint::Finite(c) => (f.numerator().shift(c), f.denominator().shift(c), 0i64),
        ExpansionPoint::Infinity => (
            f.numerator().reversed(),
            f.denominator().reversed(),
            f.denominator().degree().unwrap() as i64 - f.numerator().degree().unwrap() as i64,
        ),
    };
    let num_series = LaurentSeries::from_poly(&num);
    let den_series = LaurentSeries::from_poly(&den);
    let v_d = den_series.lowest_exponent;
    // The expansion starts at this exponent; past `order` nothing is known.
    if num_series.lowest_exponent - v_d + shift >= order {
        return LaurentSeries::zero(order);
    }
    // Enough working precision that the final window reaches `order`.
    let working = order - shift + 2 * v_d + 1;
    let den_inv = den_series
        .truncate_to(working)
        .invert()
        .expect("reduced denominator is nonzero");
    let expansion = num_series
        .mul(&den_inv)
        .mul(&LaurentSeries::monomial(Rat::one(), shift));
    expansion.truncate_to(order)
}

impl Serialize for LaurentSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("LaurentSeries", 3)?;
        s.serialize_field("lowest_exponent", &self.lowest_exponent)?;
        s.serialize_field("truncation_order", &self.truncation_order)?;
        s.serialize_field("coefficients", &self.coefficients)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for LaurentSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lowest_exponent: i64,
            truncation_order: i64,
            coefficients: Vec<Rat>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.truncation_order <= raw.lowest_exponent {
            return Err(serde::de::Error::custom(
                "truncation_order must exceed lowest_exponent",
            ));
        }
        Ok(LaurentSeries::new(
            raw.lowest_exponent,
            raw.coefficients,
            raw.truncation_order,
        ))
    }
}
