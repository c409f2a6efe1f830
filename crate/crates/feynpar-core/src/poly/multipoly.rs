use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, fmt_q_frac, parse_q, to_f64, Q};

use super::order::{grlex_cmp, MonomialOrder};

pub type Exps = Vec<u32>;

/// Sparse polynomial in `arity` variables with exact rational coefficients.
///
/// Terms are stored in a `BTreeMap`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Exps, Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homogeneity {
    pub is_homogeneous: bool,
    pub degree: u32,
    pub per_variable: Vec<u32>,
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        Self { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Q) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Q::one())
    }

    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity, "variable index {i} out of range for arity {arity}");
        let mut e = vec![0; arity];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exps: Exps, c: Q) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Exps, Q)>) -> Self {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent vector length differs from arity");
            p.add_term(e, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&vec![0; self.arity])
    }

    pub fn add_term(&mut self, e: Exps, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { left: self.arity, right: other.arity });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self * other)
    }

    pub fn try_eval(&self, point: &[Q]) -> Result<Q> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch { left: self.arity, right: point.len() });
        }
        Ok(self.eval(point))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        Self {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.arity);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn mul_monomial(&self, e: &[u32], c: &Q) -> Self {
        Self {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.iter().zip(e).map(|(a, b)| a + b).collect(), x * c))
                .collect(),
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.arity);
        let mut total = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += t;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                to_f64(c)
                    * e.iter()
                        .zip(point)
                        .map(|(&k, &x)| x.powi(k as i32))
                        .product::<f64>()
            })
            .sum()
    }

    pub fn derivative(&self, i: usize) -> Self {
        assert!(i < self.arity);
        let mut p = Self::zero(self.arity);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                p.add_term(f, c * Q::from_integer(e[i].into()));
            }
        }
        p
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.arity).map(|i| self.derivative(i)).collect()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn homogeneity(&self) -> Result<Homogeneity> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let degs: Vec<u32> = self.terms.keys().map(|e| e.iter().sum()).collect();
        let degree = *degs.iter().max().unwrap();
        Ok(Homogeneity {
            is_homogeneous: degs.iter().all(|&d| d == degree),
            degree,
            per_variable: (0..self.arity).map(|i| self.degree_in(i)).collect(),
        })
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneity().map(|h| h.is_homogeneous).unwrap_or(true)
    }

    /// Degree at most one in every variable.
    pub fn is_multilinear(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k <= 1))
    }

    /// Leading term under `order`.
    pub fn leading(&self, order: MonomialOrder) -> Option<(&Exps, &Q)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn leading_exps(&self, order: MonomialOrder) -> Option<Exps> {
        self.leading(order).map(|(e, _)| e.clone())
    }

    pub fn make_monic(&self, order: MonomialOrder) -> Self {
        match self.leading(order) {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Substitute polynomial `images[i]` (all of a common arity) for variable `i`.
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.arity);
        let target = images.first().map_or(0, |p| p.arity);
        let mut cache: Vec<Vec<MultiPoly>> = images.iter().map(|p| vec![MultiPoly::one(target), p.clone()]).collect();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = &cache[i][cache[i].len() - 1] * &images[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Shift: p(x + a).
    pub fn translate(&self, a: &[Q]) -> MultiPoly {
        let images: Vec<MultiPoly> = (0..self.arity)
            .map(|i| &MultiPoly::var(self.arity, i) + &MultiPoly::constant(self.arity, a[i].clone()))
            .collect();
        self.compose(&images)
    }

    /// Embed into a larger polynomial ring, keeping variable positions.
    pub fn extend_arity(&self, arity: usize) -> MultiPoly {
        assert!(arity >= self.arity);
        MultiPoly::from_terms(
            arity,
            self.terms.iter().map(|(e, c)| {
                let mut f = e.clone();
                f.resize(arity, 0);
                (f, c.clone())
            }),
        )
    }

    /// Set variable `i` to the rational `value`, keeping the arity.
    pub fn specialize(&self, i: usize, value: &Q) -> MultiPoly {
        let mut p = MultiPoly::zero(self.arity);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f[i];
            f[i] = 0;
            p.add_term(f, c * num_traits::pow(value.clone(), k as usize));
        }
        p
    }

    /// Drop variable `i`, which must not occur.
    pub fn remove_var(&self, i: usize) -> MultiPoly {
        assert!(self.degree_in(i) == 0, "variable {i} still occurs");
        MultiPoly::from_terms(
            self.arity - 1,
            self.terms.iter().map(|(e, c)| {
                let mut f = e.clone();
                f.remove(i);
                (f, c.clone())
            }),
        )
    }

    /// Insert a new variable at position `i` (inverse of `remove_var`).
    pub fn insert_var(&self, i: usize) -> MultiPoly {
        assert!(i <= self.arity);
        MultiPoly::from_terms(
            self.arity + 1,
            self.terms.iter().map(|(e, c)| {
                let mut f = e.clone();
                f.insert(i, 0);
                (f, c.clone())
            }),
        )
    }

    /// Coefficients with respect to variable `v`: `self = sum_k coeffs[k] * x_v^k`.
    pub fn coeffs_in(&self, v: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![MultiPoly::zero(self.arity); d + 1];
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f[v] as usize;
            f[v] = 0;
            out[k].add_term(f, c.clone());
        }
        out
    }

    /// Terms in canonical graded-lex order, highest first.
    pub fn sorted_terms(&self) -> Vec<(&Exps, &Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grlex_cmp(b.0, a.0));
        v
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { "-" } else { "+" });
            }
            let mut factors: Vec<String> = Vec::new();
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(names[j].clone()),
                    _ => factors.push(format!("{}^{}", names[j], k)),
                }
            }
            if factors.is_empty() {
                s.push_str(&fmt_q(&a));
            } else {
                if !a.is_one() {
                    s.push_str(&fmt_q(&a));
                    s.push('*');
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }

    pub fn default_names(arity: usize, prefix: &str) -> Vec<String> {
        (1..=arity).map(|i| format!("{prefix}{i}")).collect()
    }

    /// Line format `coef num/den : e1 ... en`, canonical term order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (e, c) in self.sorted_terms() {
            let exps: Vec<String> = e.iter().map(|k| k.to_string()).collect();
            out.push_str(&format!("coef {} : {}\n", fmt_q_frac(c), exps.join(" ")));
        }
        out
    }

    pub fn deserialize(text: &str, arity: usize) -> Result<MultiPoly> {
        let mut p = MultiPoly::zero(arity);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let rest = line
                .strip_prefix("coef")
                .ok_or_else(|| Error::Parse(format!("expected `coef`: {line}")))?;
            let (c, e) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `:`: {line}")))?;
            let c = parse_q(c)?;
            let e: Vec<u32> = e
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad exponent in {line}"))))
                .collect::<Result<_>>()?;
            if e.len() != arity {
                return Err(Error::ArityMismatch { left: arity, right: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&Self::default_names(self.arity, "t")))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in addition");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in subtraction");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Q::one())
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in multiplication");
        let mut out = MultiPoly::zero(self.arity);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let e: Exps = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(e, x * y);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Precompiled floating-point evaluator for hot loops.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    arity: usize,
    max_deg: Vec<u32>,
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &MultiPoly) -> Self {
        let terms = p
            .terms()
            .map(|(e, c)| {
                let factors = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect();
                (to_f64(c), factors)
            })
            .collect();
        Self {
            arity: p.arity(),
            max_deg: (0..p.arity()).map(|i| p.degree_in(i)).collect(),
            terms,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(i, k) in factors {
                t *= if k == 1 { x[i] } else { x[i].powi(k as i32) };
            }
            sum += t;
        }
        sum
    }

    pub fn max_degree(&self, i: usize) -> u32 {
        self.max_deg[i]
    }
}

impl PartialOrd for MultiPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.arity
            .cmp(&other.arity)
            .then_with(|| self.terms.iter().cmp(other.terms.iter()))
    }
}
