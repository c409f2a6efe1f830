use std::fmt::{self, Debug, Display};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, to_f64, Q};

/// Exponent standing in for "exact to all orders".
pub const EXACT: i64 = i64::MAX / 4;
pub const DEFAULT_HI: i64 = 8;
pub const DEFAULT_LO: i64 = -8;

/// Coefficient field of a Laurent series: exact rationals or doubles.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_q(x: &Q) -> Self;
    fn to_f64(&self) -> f64;
    fn fmt_coeff(&self) -> String;
}

impl Coeff for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
    fn to_f64(&self) -> f64 {
        to_f64(self)
    }
    fn fmt_coeff(&self) -> String {
        fmt_q(self)
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_q(x: &Q) -> Self {
        to_f64(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn fmt_coeff(&self) -> String {
        format!("{self:e}")
    }
}

/// Truncated Laurent series `sum_{k=lo}^{hi} c_k z^k`.
///
/// Coefficients below `lo` are exactly zero; coefficients above `hi` are
/// unknown. `hi == EXACT` marks a Laurent polynomial known to all orders.
#[derive(Clone, PartialEq)]
pub struct LaurentSeries<C: Coeff = Q> {
    lo: i64,
    hi: i64,
    coeffs: Vec<C>,
}

pub type QSeries = LaurentSeries<Q>;
pub type FSeries = LaurentSeries<f64>;

impl<C: Coeff> LaurentSeries<C> {
    pub fn zero(hi: i64) -> Self {
        Self { lo: 0, hi, coeffs: Vec::new() }
    }

    pub fn one(hi: i64) -> Self {
        Self::monomial(0, C::one(), hi)
    }

    pub fn monomial(k: i64, c: C, hi: i64) -> Self {
        Self::from_coeffs(k, vec![c], hi)
    }

    /// Series with `coeffs[i]` at exponent `lo + i`, known up to `hi`.
    pub fn from_coeffs(lo: i64, coeffs: Vec<C>, hi: i64) -> Self {
        let mut s = Self { lo, hi, coeffs };
        s.normalize();
        s
    }

    /// Same as `from_coeffs` with `hi` defaulting to the window top.
    pub fn laurent_poly(lo: i64, coeffs: Vec<C>) -> Self {
        Self::from_coeffs(lo, coeffs, DEFAULT_HI)
    }

    fn normalize(&mut self) {
        if self.hi > EXACT / 2 {
            self.hi = EXACT;
        }
        let keep = (self.hi.saturating_sub(self.lo).saturating_add(1)).max(0);
        if (self.coeffs.len() as i64) > keep {
            self.coeffs.truncate(keep as usize);
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.lo = 0;
            }
            Some(i) => {
                self.coeffs.drain(..i);
                self.lo += i as i64;
                while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.hi >= EXACT
    }

    /// Lowest exponent with a nonzero coefficient, `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.lo)
    }

    /// Largest stored exponent, `None` for zero.
    pub fn top(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then(|| self.lo + self.coeffs.len() as i64 - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `z^k`; `None` when `k` is beyond the window.
    pub fn coeff(&self, k: i64) -> Option<C> {
        if k > self.hi {
            return None;
        }
        if k < self.lo || k >= self.lo + self.coeffs.len() as i64 {
            return Some(C::zero());
        }
        Some(self.coeffs[(k - self.lo) as usize].clone())
    }

    pub fn coeff_or_zero(&self, k: i64) -> C {
        self.coeff(k).unwrap_or_else(C::zero)
    }

    /// `(exponent, coefficient)` for every nonzero stored term.
    pub fn terms(&self) -> Vec<(i64, C)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.lo + i as i64, c.clone()))
            .collect()
    }

    pub fn with_hi(&self, hi: i64) -> Self {
        Self::from_coeffs(self.lo, self.coeffs.clone(), hi.min(self.hi))
    }

    pub fn add(&self, o: &Self) -> Self {
        let hi = self.hi.min(o.hi);
        if self.is_zero() {
            return o.with_hi(hi);
        }
        if o.is_zero() {
            return self.with_hi(hi);
        }
        let lo = self.lo.min(o.lo);
        let top = self.top().unwrap().max(o.top().unwrap()).min(hi);
        let coeffs = (lo..=top).map(|k| self.coeff_or_zero(k).add(&o.coeff_or_zero(k))).collect();
        Self::from_coeffs(lo, coeffs, hi)
    }

    pub fn neg(&self) -> Self {
        Self { lo: self.lo, hi: self.hi, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_coeffs(self.lo, self.coeffs.iter().map(|x| x.mul(c)).collect(), self.hi)
    }

    /// Product; the result is exact up to `min(v_a + hi_b, v_b + hi_a)`.
    pub fn mul(&self, o: &Self) -> Self {
        let va = self.valuation().unwrap_or(self.hi.saturating_add(1));
        let vb = o.valuation().unwrap_or(o.hi.saturating_add(1));
        let hi = va.saturating_add(o.hi).min(vb.saturating_add(self.hi)).min(EXACT);
        if self.is_zero() || o.is_zero() {
            return Self::zero(hi);
        }
        let lo = self.lo + o.lo;
        let top = (self.top().unwrap() + o.top().unwrap()).min(hi);
        if top < lo {
            return Self::zero(hi);
        }
        let mut coeffs = vec![C::zero(); (top - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k < coeffs.len() {
                    coeffs[k] = coeffs[k].add(&a.mul(b));
                }
            }
        }
        Self::from_coeffs(lo, coeffs, hi)
    }

    /// Multiplicative inverse; needs a nonzero leading coefficient inside
    /// the window. The inverse of an exact Laurent polynomial with several
    /// terms is truncated at `DEFAULT_HI`.
    pub fn invert(&self) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::TruncationUnderflow("cannot invert a series that vanishes on its window".into()))?;
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Self::monomial(-v, C::one().div(&self.coeffs[0]), EXACT));
        }
        let hi = if self.is_exact() { DEFAULT_HI } else { self.hi - 2 * v };
        let len = (hi + v + 1).max(0) as usize;
        let a: Vec<C> = (0..len).map(|i| self.coeff_or_zero(v + i as i64)).collect();
        let mut b: Vec<C> = Vec::with_capacity(len);
        for k in 0..len {
            let mut s = if k == 0 { C::one() } else { C::zero() };
            for j in 1..=k {
                s = s.sub(&a[j].mul(&b[k - j]));
            }
            b.push(s.div(&a[0]));
        }
        Ok(Self::from_coeffs(-v, b, hi))
    }

    /// Minimal subtraction projection onto strictly negative exponents.
    pub fn polar_part(&self) -> Self {
        let hi = if self.hi >= -1 { EXACT } else { self.hi };
        let coeffs = self.coeffs.iter().enumerate().filter(|(i, _)| self.lo + (*i as i64) < 0).map(|(_, c)| c.clone());
        Self::from_coeffs(self.lo, coeffs.collect(), hi)
    }

    /// `(1 - T)`: the holomorphic part.
    pub fn regular_part(&self) -> Self {
        self.sub(&self.polar_part())
    }

    pub fn is_pole_free(&self) -> bool {
        self.valuation().map_or(true, |v| v >= 0)
    }

    /// Formal derivative in `z`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.lo + i as i64;
                c.mul(&C::from_q(&Q::from_integer(k.into())))
            })
            .collect();
        let hi = if self.is_exact() { EXACT } else { self.hi - 1 };
        Self::from_coeffs(self.lo - 1, coeffs, hi)
    }

    /// Value of the regular part at `z = 0`.
    pub fn value_at_zero(&self) -> Result<C> {
        self.coeff(0).ok_or_else(|| Error::TruncationUnderflow("window does not reach z^0".into()))
    }

    /// `exp(c z)` truncated at `hi`.
    pub fn exp_linear(c: &C, hi: i64) -> Self {
        if c.is_zero() {
            return Self::one(EXACT);
        }
        let hi = hi.min(64);
        let mut coeffs = Vec::new();
        let mut term = C::one();
        for k in 0..=hi.max(0) {
            if k > 0 {
                term = term.mul(c).div(&C::from_q(&Q::from_integer(k.into())));
            }
            coeffs.push(term.clone());
        }
        Self::from_coeffs(0, coeffs, hi)
    }

    /// Largest absolute coefficient difference on the common window.
    pub fn distance(&self, o: &Self) -> f64 {
        let hi = self.hi.min(o.hi);
        let lo = self.lo.min(o.lo);
        let top = self.top().unwrap_or(lo).max(o.top().unwrap_or(lo)).min(hi);
        (lo..=top)
            .map(|k| self.coeff_or_zero(k).sub(&o.coeff_or_zero(k)).to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Equality of all coefficients on the common window.
    pub fn agrees_with(&self, o: &Self) -> bool {
        let hi = self.hi.min(o.hi);
        let lo = self.lo.min(o.lo);
        let top = self.top().unwrap_or(lo).max(o.top().unwrap_or(lo)).min(hi);
        (lo..=top).all(|k| self.coeff_or_zero(k) == o.coeff_or_zero(k))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentSeries<D> {
        LaurentSeries::from_coeffs(self.lo, self.coeffs.iter().map(f).collect(), self.hi)
    }

    pub fn to_f64_series(&self) -> FSeries {
        self.map_coeffs(|c| c.to_f64())
    }
}

impl QSeries {
    /// Parse a `{exponent: "num/den"}` style list of pairs.
    pub fn from_pairs(pairs: &[(i64, Q)], hi: i64) -> Self {
        if pairs.is_empty() {
            return Self::zero(hi);
        }
        let lo = pairs.iter().map(|p| p.0).min().unwrap();
        let top = pairs.iter().map(|p| p.0).max().unwrap();
        let mut coeffs = vec![<Q as Zero>::zero(); (top - lo + 1) as usize];
        for (k, c) in pairs {
            coeffs[(k - lo) as usize] += c;
        }
        Self::from_coeffs(lo, coeffs, hi)
    }

    /// Max |coefficient| on the window, as an exact rational.
    pub fn max_abs(&self) -> Q {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(<Q as Zero>::zero)
    }
}

impl<C: Coeff> Debug for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Coeff> Display for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (k, c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{}", c.fmt_coeff())?,
                1 => write!(f, "{}*z", c.fmt_coeff())?,
                _ => write!(f, "{}*z^{}", c.fmt_coeff(), k)?,
            }
        }
        if !self.is_exact() {
            write!(f, " + O(z^{})", self.hi + 1)?;
        }
        Ok(())
    }
}

