//! Factorization strategies, registered by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bi_factor::{algorithm1, factor_prepared, prepare, verify, Context};
use crate::error::{Error, Result};
use crate::quat_poly::QuatPoly;
use crate::real_poly::{RealPoly, Var};
use crate::uni_factor::{real_to_h, Factorization, Item, LinearFactor};

/// Produces a univariate factorization of `K·q`.
///
/// `order` permutes the quadratic norm factors of the variable the strategy
/// works in; `None` keeps the canonical tuple order.
pub trait Factorizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn factor(&self, q: &QuatPoly, order: Option<&[usize]>, ctx: &Context) -> Result<Factorization>;
}

/// Multiplication technique in the role of one variable.
pub struct Multiplication(pub Var);

impl Factorizer for Multiplication {
    fn name(&self) -> &'static str {
        match self.0 {
            Var::S => "mult-s",
            Var::T => "mult-t",
        }
    }

    fn describe(&self) -> &'static str {
        match self.0 {
            Var::S => "multiplication technique over s-orders, K in R[t]",
            Var::T => "multiplication technique over t-orders, K in R[s]",
        }
    }

    fn factor(&self, q: &QuatPoly, order: Option<&[usize]>, ctx: &Context) -> Result<Factorization> {
        let prep = prepare(q, ctx)?;
        factor_prepared(q, &prep, self.0, order, ctx)
    }
}

/// Direct splitting for polynomials of s-degree at most one; `order`
/// permutes the t-factors and K is always 1.
pub struct Splitting;

impl Factorizer for Splitting {
    fn name(&self) -> &'static str {
        "splitting"
    }

    fn describe(&self) -> &'static str {
        "splitting lemma for s-degree <= 1, K = 1"
    }

    fn factor(&self, q: &QuatPoly, order: Option<&[usize]>, ctx: &Context) -> Result<Factorization> {
        let prep = prepare(q, ctx)?;
        if prep.core.deg_s() > 1 {
            return Err(Error::InvalidInput(format!(
                "splitting needs s-degree at most 1, got {}",
                prep.core.deg_s()
            )));
        }
        let tuple = match order {
            Some(o) => prep.t_tuple.permuted(o)?,
            None => prep.t_tuple.clone(),
        };
        let split = algorithm1(&prep.core, &tuple.factors, &ctx.tol)?;
        let mut items = vec![Item::Unit(prep.unit)];
        items.extend(split.left.into_iter().map(Item::Factor));
        if split.middle.deg_s() == 1 {
            let (a, b) = (split.middle.coeff(0, 1), split.middle.coeff(0, 0));
            items.push(Item::Factor(LinearFactor::s(-(b * a.inv()))));
            items.push(Item::Unit(a));
        } else {
            items.push(Item::Unit(split.middle.coeff(0, 0)));
        }
        items.extend(split.right.into_iter().map(Item::Factor));
        for d in &prep.real {
            let f = real_to_h(d, ctx.finder.as_ref(), &ctx.tol)?;
            items.push(Item::Unit(f.unit));
            items.extend(f.factors.into_iter().map(Item::Factor));
        }
        let f = Factorization::from_items(RealPoly::one(Var::T), items);
        let r = verify(q, &f);
        if r.is_nan() || r > ctx.tol.residual() {
            return Err(Error::ResidualTooLarge { residual: r, allowed: ctx.tol.residual() });
        }
        Ok(f)
    }
}

/// Name-indexed set of factorizers.
#[derive(Clone, Default)]
pub struct Registry {
    entries: BTreeMap<&'static str, Arc<dyn Factorizer>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry::default()
    }

    /// `mult-s`, `mult-t` and `splitting`.
    pub fn builtin() -> Self {
        let mut r = Registry::empty();
        r.register(Arc::new(Multiplication(Var::S)));
        r.register(Arc::new(Multiplication(Var::T)));
        r.register(Arc::new(Splitting));
        r
    }

    /// Adds `f`, replacing any factorizer of the same name.
    pub fn register(&mut self, f: Arc<dyn Factorizer>) {
        self.entries.insert(f.name(), f);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Factorizer>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

/// Default strategy for a variable role.
pub fn for_var(var: Var) -> &'static str {
    match var {
        Var::S => "mult-s",
        Var::T => "mult-t",
    }
}
