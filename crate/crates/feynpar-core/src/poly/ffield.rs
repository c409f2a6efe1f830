//! Brute-force point counts of hypersurfaces over prime fields.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::MultiPoly;
use crate::error::{Error, Result};

/// Largest enumeration, in points, accepted by the brute-force counter.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomial with coefficients reduced into Z/q.
#[derive(Clone, Debug)]
pub struct ModPoly {
    q: u64,
    terms: Vec<(u64, Vec<u32>)>,
}

impl ModPoly {
    pub fn reduce(p: &MultiPoly, q: u64) -> Result<Self> {
        let qb = BigInt::from(q);
        let mut terms = Vec::new();
        for (e, c) in p.terms() {
            let den = c.denom().mod_floor(&qb);
            if den.is_zero() {
                return Err(Error::Precondition(format!("coefficient {c} has a denominator divisible by {q}")));
            }
            let num = c.numer().mod_floor(&qb).to_u64().unwrap();
            let den = den.to_u64().unwrap();
            let v = num * inv_mod(den, q) % q;
            if v != 0 {
                terms.push((v, e.clone()));
            }
        }
        Ok(Self { q, terms })
    }

    pub fn eval(&self, x: &[u64]) -> u64 {
        let q = self.q;
        let mut s = 0u64;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (&xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * xi % q;
                }
            }
            s = (s + t) % q;
        }
        s
    }
}

fn inv_mod(a: u64, q: u64) -> u64 {
    // Fermat: q is prime
    pow_mod(a, q - 2, q)
}

fn pow_mod(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1 % q;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % q;
        }
        a = a * a % q;
        e >>= 1;
    }
    r
}

fn check_inputs(p: &MultiPoly, q: u64) -> Result<()> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if q > (1 << 20) || !is_prime(q) {
        return Err(Error::Precondition(format!("q = {q} must be a prime at most 2^20")));
    }
    let total = (q as f64).powi(p.arity() as i32);
    if total > ENUMERATION_LIMIT as f64 {
        return Err(Error::TooLarge { cap: ENUMERATION_LIMIT as usize });
    }
    Ok(())
}

fn decode(mut idx: u64, q: u64, x: &mut [u64]) {
    for xi in x.iter_mut() {
        *xi = idx % q;
        idx /= q;
    }
}

/// Zeros of `p` in F_q^n, or in P^{n-1}(F_q) when `projective` (homogeneous `p` only).
pub fn finite_field_point_count(p: &MultiPoly, q: u64, projective: bool) -> Result<u64> {
    check_inputs(p, q)?;
    let mp = ModPoly::reduce(p, q)?;
    let n = p.arity();
    if !projective {
        let total = q.pow(n as u32);
        return Ok((0..total)
            .into_par_iter()
            .map_init(
                || vec![0u64; n],
                |x, idx| {
                    decode(idx, q, x);
                    u64::from(mp.eval(x) == 0)
                },
            )
            .sum());
    }
    if !p.is_homogeneous() {
        return Err(Error::Precondition("projective counts need a homogeneous polynomial".into()));
    }
    // normalized representatives: first nonzero coordinate equal to 1
    let mut count = 0u64;
    for lead in 0..n {
        let free = n - lead - 1;
        let total = q.pow(free as u32);
        count += (0..total)
            .into_par_iter()
            .map_init(
                || vec![0u64; n],
                |x, idx| {
                    x.iter_mut().for_each(|v| *v = 0);
                    x[lead] = 1;
                    decode(idx, q, &mut x[lead + 1..]);
                    u64::from(mp.eval(x) == 0)
                },
            )
            .sum::<u64>();
    }
    Ok(count)
}
