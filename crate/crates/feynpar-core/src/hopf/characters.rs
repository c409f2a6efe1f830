use std::collections::BTreeMap;

use rayon::prelude::*;

use super::algebra::{Element, GenId, Grading, HopfAlgebra};
use super::laurent::{Coeff, LaurentSeries, DEFAULT_HI, DEFAULT_LO, EXACT};
use crate::error::{Error, Result};
use crate::rational::Q;

/// Values of a linear map `H -> K` on generators.
pub type GeneratorValues<C> = BTreeMap<GenId, LaurentSeries<C>>;

/// A linear map from the algebra to truncated Laurent series, evaluated on monomials.
pub trait LinearForm<C: Coeff>: Sync {
    fn on_mono(&self, h: &HopfAlgebra, m: &[GenId]) -> Result<LaurentSeries<C>>;

    fn eval(&self, h: &HopfAlgebra, x: &Element) -> Result<LaurentSeries<C>> {
        let mut acc = LaurentSeries::zero(EXACT);
        for (m, c) in x {
            acc = acc.add(&self.on_mono(h, m)?.scale(&C::from_q(c)));
        }
        Ok(acc)
    }
}

fn lookup<'a, C: Coeff>(values: &'a GeneratorValues<C>, h: &HopfAlgebra, id: GenId) -> Result<&'a LaurentSeries<C>> {
    values.get(&id).ok_or_else(|| Error::Precondition(format!("no value for generator `{}`", h.generator(id).name)))
}

/// Multiplicative map: `phi(1) = 1`, `phi(xy) = phi(x) phi(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Character<C: Coeff = Q> {
    values: GeneratorValues<C>,
}

impl<C: Coeff> Default for Character<C> {
    fn default() -> Self {
        Self { values: BTreeMap::new() }
    }
}

impl<C: Coeff> Character<C> {
    pub fn new(values: GeneratorValues<C>) -> Self {
        Self { values }
    }

    /// The counit `e`: zero on every generator.
    pub fn counit(h: &HopfAlgebra) -> Self {
        Self { values: (0..h.len()).map(|i| (i, LaurentSeries::zero(EXACT))).collect() }
    }

    pub fn set(&mut self, id: GenId, s: LaurentSeries<C>) {
        self.values.insert(id, s);
    }

    pub fn get(&self, id: GenId) -> Option<&LaurentSeries<C>> {
        self.values.get(&id)
    }

    pub fn values(&self) -> &GeneratorValues<C> {
        &self.values
    }
}

impl<C: Coeff> LinearForm<C> for Character<C> {
    fn on_mono(&self, h: &HopfAlgebra, m: &[GenId]) -> Result<LaurentSeries<C>> {
        let mut acc = LaurentSeries::one(EXACT);
        for &g in m {
            acc = acc.mul(lookup(&self.values, h, g)?);
        }
        Ok(acc)
    }
}

/// Linear map vanishing on 1 and on products of generators.
#[derive(Clone, Debug, PartialEq)]
pub struct Infinitesimal<C: Coeff = Q> {
    values: GeneratorValues<C>,
}

impl<C: Coeff> Infinitesimal<C> {
    pub fn new(values: GeneratorValues<C>) -> Self {
        Self { values }
    }

    pub fn get(&self, id: GenId) -> Option<&LaurentSeries<C>> {
        self.values.get(&id)
    }

    pub fn values(&self) -> &GeneratorValues<C> {
        &self.values
    }
}

impl<C: Coeff> LinearForm<C> for Infinitesimal<C> {
    fn on_mono(&self, h: &HopfAlgebra, m: &[GenId]) -> Result<LaurentSeries<C>> {
        match m {
            [g] => Ok(lookup(&self.values, h, *g)?.clone()),
            _ => Ok(LaurentSeries::zero(EXACT)),
        }
    }
}

/// `d phi / dz` extended to monomials by the Leibniz rule.
pub struct ZDerivative<'a, C: Coeff>(pub &'a Character<C>);

impl<C: Coeff> LinearForm<C> for ZDerivative<'_, C> {
    fn on_mono(&self, h: &HopfAlgebra, m: &[GenId]) -> Result<LaurentSeries<C>> {
        let mut total = LaurentSeries::zero(EXACT);
        for i in 0..m.len() {
            let mut term = LaurentSeries::one(EXACT);
            for (j, &g) in m.iter().enumerate() {
                let v = lookup(&self.0.values, h, g)?;
                term = term.mul(&if i == j { v.derivative() } else { v.clone() });
            }
            total = total.add(&term);
        }
        Ok(total)
    }
}

/// `Y phi`: the value on a monomial times its degree.
pub struct Graded<'a, C: Coeff>(pub &'a Character<C>, pub Grading);

impl<C: Coeff> LinearForm<C> for Graded<'_, C> {
    fn on_mono(&self, h: &HopfAlgebra, m: &[GenId]) -> Result<LaurentSeries<C>> {
        let d = h.mono_degree(m, self.1) as i64;
        Ok(self.0.on_mono(h, m)?.scale(&C::from_q(&Q::from_integer(d.into()))))
    }
}

fn check_window<C: Coeff>(s: LaurentSeries<C>, h: &HopfAlgebra, id: GenId) -> Result<LaurentSeries<C>> {
    if s.hi() < DEFAULT_LO {
        return Err(Error::TruncationUnderflow(format!(
            "window for `{}` ends at z^{}, below z^{DEFAULT_LO}",
            h.generator(id).name,
            s.hi()
        )));
    }
    Ok(s)
}

/// `(A * B)(x) = sum A(x') B(x'')` over the full coproduct of `x`.
pub fn convolve_on<C: Coeff>(
    h: &HopfAlgebra,
    a: &dyn LinearForm<C>,
    b: &dyn LinearForm<C>,
    id: GenId,
) -> Result<LaurentSeries<C>> {
    let mut acc = LaurentSeries::zero(EXACT);
    for ((l, r), c) in h.coproduct_generator(id) {
        let term = a.on_mono(h, &l)?.mul(&b.on_mono(h, &r)?);
        acc = acc.add(&term.scale(&C::from_q(&c)));
    }
    check_window(acc, h, id)
}

/// Convolution restricted to generators.
pub fn convolution<C: Coeff>(h: &HopfAlgebra, a: &dyn LinearForm<C>, b: &dyn LinearForm<C>) -> Result<GeneratorValues<C>> {
    (0..h.len()).into_par_iter().map(|id| Ok((id, convolve_on(h, a, b, id)?))).collect()
}

/// `phi o S`, again a character since the algebra is commutative.
pub fn compose_antipode<C: Coeff>(h: &HopfAlgebra, phi: &Character<C>) -> Result<Character<C>> {
    let table = h.antipode_table();
    let values = table
        .par_iter()
        .enumerate()
        .map(|(id, s)| Ok((id, check_window(phi.eval(h, s)?, h, id)?)))
        .collect::<Result<_>>()?;
    Ok(Character::new(values))
}

/// Minimal subtraction: the polar part.
pub fn rota_baxter_t<C: Coeff>(s: &LaurentSeries<C>) -> LaurentSeries<C> {
    s.polar_part()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Birkhoff<C: Coeff = Q> {
    pub minus: Character<C>,
    pub plus: Character<C>,
}

/// `phi_-(x) = -T(phi(x) + sum phi_-(x') phi(x''))`, and `phi_+ = (1 - T)` of
/// the same bracket. Generators are processed in id order, which respects
/// the coproduct.
pub fn birkhoff<C: Coeff>(h: &HopfAlgebra, phi: &Character<C>) -> Result<Birkhoff<C>> {
    let mut minus = Character::default();
    let mut plus = Character::default();
    for id in 0..h.len() {
        let mut bar = lookup(&phi.values, h, id)?.clone();
        for (l, r, c) in &h.generator(id).reduced {
            let term = minus.on_mono(h, l)?.mul(&phi.on_mono(h, r)?);
            bar = bar.add(&term.scale(&C::from_q(c)));
        }
        let bar = check_window(bar, h, id)?;
        let t = rota_baxter_t(&bar);
        minus.set(id, t.neg());
        plus.set(id, bar.sub(&t));
    }
    Ok(Birkhoff { minus, plus })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenormalizedValue<C: Coeff = Q> {
    pub value: C,
    pub counterterm: LaurentSeries<C>,
}

/// `phi_+(x)(0)` and the counterterm `phi_-(x)`.
pub fn renormalized_value<C: Coeff>(h: &HopfAlgebra, bk: &Birkhoff<C>, id: GenId) -> Result<RenormalizedValue<C>> {
    let plus = lookup(&bk.plus.values, h, id)?;
    Ok(RenormalizedValue { value: plus.value_at_zero()?, counterterm: lookup(&bk.minus.values, h, id)?.clone() })
}

/// `theta_t(phi)(x) = exp(t deg(x) z) phi(x)`.
pub fn grading_flow<C: Coeff>(h: &HopfAlgebra, phi: &Character<C>, t: &C, grading: Grading) -> Character<C> {
    let values = phi
        .values
        .iter()
        .map(|(&id, s)| {
            let d = h.generator(id).degree(grading) as i64;
            let c = t.mul(&C::from_q(&Q::from_integer(d.into())));
            let top = if s.is_exact() { DEFAULT_HI } else { s.hi() };
            let span = top - s.valuation().unwrap_or(0);
            (id, LaurentSeries::exp_linear(&c, span).mul(s))
        })
        .collect();
    Character::new(values)
}

/// `phi_mu(x) = mu^{-z loops(x)} base(x)` with `log mu` rational.
pub fn mu_prefactored(h: &HopfAlgebra, base: &Character<Q>, log_mu: &Q) -> Character<Q> {
    grading_flow(h, base, &-log_mu.clone(), Grading::Loops)
}

/// Max coefficient deviation between `phi_{e^t mu}` and `theta_{-t}(phi_mu)`
/// under the loop grading, over all generators with a value.
pub fn scaling_check(
    h: &HopfAlgebra,
    family: &dyn Fn(&Q) -> Result<Character<Q>>,
    log_mu: &Q,
    t: &Q,
) -> Result<f64> {
    let at_mu = family(log_mu)?;
    let shifted = family(&(log_mu + t))?;
    let flowed = grading_flow(h, &at_mu, &-t.clone(), Grading::Loops);
    let mut worst = 0.0f64;
    for (id, s) in flowed.values() {
        let other = lookup(&shifted.values, h, *id)?;
        worst = worst.max(s.distance(other));
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData<C: Coeff = Q> {
    pub a: Infinitesimal<C>,
    pub b: Infinitesimal<C>,
    /// `db/dz - Y(a) + [a, b]` per generator.
    pub residuals: GeneratorValues<C>,
    pub residual: f64,
}

/// `a = (phi o S) * phi'`, `b = (phi o S) * Y phi` and the flatness residual.
pub fn connection_data<C: Coeff>(h: &HopfAlgebra, phi: &Character<C>, grading: Grading) -> Result<ConnectionData<C>> {
    let inv = compose_antipode(h, phi)?;
    let a = Infinitesimal::new(convolution(h, &inv, &ZDerivative(phi))?);
    let b = Infinitesimal::new(convolution(h, &inv, &Graded(phi, grading))?);
    let ab = convolution(h, &a, &b)?;
    let ba = convolution(h, &b, &a)?;
    let mut residuals = BTreeMap::new();
    let mut worst = 0.0f64;
    for id in 0..h.len() {
        let d = h.generator(id).degree(grading) as i64;
        let ya = a.values[&id].scale(&C::from_q(&Q::from_integer(d.into())));
        let r = b.values[&id].derivative().sub(&ya).add(&ab[&id].sub(&ba[&id]));
        let norm = r.terms().iter().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max);
        worst = worst.max(norm);
        residuals.insert(id, r);
    }
    Ok(ConnectionData { a, b, residuals, residual: worst })
}
