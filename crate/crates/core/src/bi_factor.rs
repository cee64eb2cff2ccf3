//! Factorization of bivariate polynomials with factorizable norm.
//!
//! [`algorithm1`] splits polynomials of s-degree at most one, [`algorithm2`]
//! is the multiplication technique for arbitrary bidegree, and [`enumerate`]
//! runs it over every ordering of the quadratic norm factors.

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::quat_poly::{Mrpf, QuatPoly};
use crate::real_poly::{
    nfc_rank1_with, rp_quadratic_factors_with, NfcSplit, QuadraticFactorTuple, RealPoly, Var,
};
use crate::roots::{default_finder, RootFinder};
use crate::tol::Tol;
use crate::uni_factor::{flip_factors, real_to_h, Factorization, Item, LinearFactor};

/// Largest number of states explored by [`equivalent`].
pub const STATE_BUDGET: usize = 10_000;

/// Order in which [`algorithm1`] consumes the t-factors of a remainder norm.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerOrder {
    /// Ascending root modulus, then ascending real part of the root.
    #[default]
    Modulus,
    /// The tuple order: ascending linear, then constant coefficient.
    Canonical,
    Reversed,
    /// Permutation of the canonical tuple for each call, in call order;
    /// calls past the end use the canonical tuple.
    Schedule(Vec<Vec<usize>>),
}

/// Numerical settings shared by the factorization routines.
#[derive(Clone)]
pub struct Context {
    pub tol: Tol,
    pub finder: Arc<dyn RootFinder>,
    pub inner: InnerOrder,
}

impl Default for Context {
    fn default() -> Self {
        Context { tol: Tol::default(), finder: default_finder(), inner: InnerOrder::default() }
    }
}

impl Context {
    pub fn new(tol: Tol) -> Self {
        Context { tol, ..Context::default() }
    }

    pub fn with_finder(mut self, finder: Arc<dyn RootFinder>) -> Self {
        self.finder = finder;
        self
    }

    pub fn with_inner(mut self, inner: InnerOrder) -> Self {
        self.inner = inner;
        self
    }
}

/// `q = ∏ left · middle · ∏ right` with `middle` free of `t`.
#[derive(Clone, Debug)]
pub struct Split {
    pub left: Vec<LinearFactor>,
    pub middle: QuatPoly,
    pub right: Vec<LinearFactor>,
    /// All factors of `left` and `right`, in the order they were split off.
    pub extracted: Vec<LinearFactor>,
    /// Entries of the input order consumed by the factors of `left`.
    pub left_norms: Vec<RealPoly>,
}

impl Split {
    pub fn product(&self) -> QuatPoly {
        let l: Vec<QuatPoly> = self.left.iter().map(LinearFactor::poly).collect();
        let r: Vec<QuatPoly> = self.right.iter().map(LinearFactor::poly).collect();
        QuatPoly::product(&l).mul(&self.middle).mul(&QuatPoly::product(&r))
    }
}

/// Splits off the t-factors of a polynomial of s-degree at most one.
///
/// `order` lists monic quadratic t-factors of the norm; each step divides by
/// the next one and extracts a left or right linear factor with that norm.
pub fn algorithm1(q: &QuatPoly, order: &[RealPoly], tol: &Tol) -> Result<Split> {
    if q.deg_s() > 1 {
        return Err(Error::InvalidInput(format!("s-degree {} exceeds 1", q.deg_s())));
    }
    if order.len() != q.deg_t() {
        return Err(Error::InvalidOrder(format!(
            "{} quadratic factors for t-degree {}",
            order.len(),
            q.deg_t()
        )));
    }
    let eps = tol.structural();
    let mut u = q.clone();
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut extracted = Vec::new();
    let mut left_norms = Vec::new();
    for m in order {
        if m.var() != Var::T || m.degree() != 2 {
            return Err(Error::InvalidOrder(format!("{m} is not a quadratic in t")));
        }
        let (tq, s) = u.divrem_real(m)?;
        let scale = s.max_abs();
        if scale <= eps * u.max_abs() {
            return Err(Error::DivisibleByM);
        }
        let (s00, s10, s01, s11) = (s.coeff(0, 0), s.coeff(1, 0), s.coeff(0, 1), s.coeff(1, 1));
        if s01.max_abs().max(s11.max_abs()) <= eps * scale {
            if s10.max_abs() <= eps * scale {
                return Err(Error::DegenerateRemainder);
            }
            let g = s10.inv() * s00;
            let f = LinearFactor::t(-g);
            u = tq.mul(&f.poly().conj()).add(&QuatPoly::constant(s10));
            right.insert(0, f);
            extracted.push(f);
            continue;
        }
        if s11.max_abs() <= eps * scale {
            return Err(Error::DegenerateRemainder);
        }
        let inv11 = s11.inv();
        let qq = -(s10 * inv11);
        let p = s00 - s10 * inv11 * s01;
        let p_scale = s00.abs() + s10.abs() * inv11.abs() * s01.abs();
        // S = (s − q)·S11·(t + S11⁻¹S01), exact iff p = 0
        let fr = LinearFactor::t(-(inv11 * s01));
        let sq = QuatPoly::monomial(0, 1, s11).add(&QuatPoly::constant(-(qq * s11)));
        // S = (t + S01·S11⁻¹)·S11·(s − conj(p⁻¹ q p)), needs p ≠ 0
        let fl = LinearFactor::t(-(s01 * inv11));
        let c = (p.inv() * qq * p).conj();
        let sc = QuatPoly::monomial(0, 1, s11).add(&QuatPoly::constant(-(s11 * c)));
        let use_right = if p.abs() <= eps * p_scale {
            true
        } else {
            // near-degenerate p: keep whichever split reproduces S better
            let res_r = s.max_diff(&sq.mul(&fr.poly()));
            let res_l = s.max_diff(&fl.poly().mul(&sc));
            res_r < res_l
        };
        if use_right {
            u = tq.mul(&fr.poly().conj()).add(&sq);
            right.insert(0, fr);
            extracted.push(fr);
        } else {
            u = fl.poly().conj().mul(&tq).add(&sc);
            left.push(fl);
            extracted.push(fl);
            left_norms.push(m.clone());
        }
    }
    Ok(Split { left, middle: u, right, extracted, left_norms })
}

/// Monic quadratic factors of both parts of `N(q) = P(t)·R(s)`.
fn norm_tuples(q: &QuatPoly, nfc_eps: f64, ctx: &Context) -> Result<(NfcSplit, QuadraticFactorTuple, QuadraticFactorTuple)> {
    let n = q.norm_poly(ctx.tol.structural())?;
    let split = nfc_rank1_with(&n, nfc_eps)?;
    let t = rp_quadratic_factors_with(&split.p, ctx.finder.as_ref(), &ctx.tol)?;
    let s = rp_quadratic_factors_with(&split.r, ctx.finder.as_ref(), &ctx.tol)?;
    Ok((split, t, s))
}

/// Removes the real factors of `q` whose squares divide the t-part (and, if
/// `with_s`, the s-part) of its norm.
fn strip_real(q: &QuatPoly, with_s: bool, ctx: &Context) -> Result<Mrpf> {
    let (_, t, s) = norm_tuples(q, ctx.tol.structural(), ctx)?;
    let mut candidates = t.factors;
    if with_s {
        candidates.extend(s.factors);
    }
    q.mrpf_extract(&candidates, ctx.tol.structural())
}

/// t-factors of the norm of a remainder, in the order fed to [`algorithm1`].
///
/// Each computed factor is replaced by the closest entry of `known` within
/// the factor matching tolerance. Remainder norms have clustered roots and
/// high degree, so factors known from earlier steps are more accurate.
fn inner_order(q: &QuatPoly, step: usize, known: &[RealPoly], ctx: &Context) -> Result<Vec<RealPoly>> {
    let (_, mut t, _) = norm_tuples(q, ctx.tol.structural(), ctx)?;
    for f in &mut t.factors {
        let dist = |k: &RealPoly| k.sub(f).max_abs() / f.max_abs().max(1.0);
        if let Some(k) = known.iter().min_by(|a, b| dist(a).total_cmp(&dist(b))) {
            if dist(k) <= ctx.tol.factor_match() {
                *f = k.clone();
            }
        }
    }
    match &ctx.inner {
        InnerOrder::Modulus => {
            let mut f = t.factors;
            // v² + bv + c has roots of modulus √c and real part −b/2
            f.sort_by(|x, y| x.coeff(0).total_cmp(&y.coeff(0)).then(y.coeff(1).total_cmp(&x.coeff(1))));
            Ok(f)
        }
        InnerOrder::Canonical => Ok(t.factors),
        InnerOrder::Reversed => Ok(t.factors.into_iter().rev().collect()),
        InnerOrder::Schedule(steps) => match steps.get(step) {
            Some(perm) => Ok(t.permuted(perm)?.factors),
            None => Ok(t.factors),
        },
    }
}

fn real_factor_items(divisors: &[RealPoly], ctx: &Context) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    for d in divisors {
        let f = real_to_h(d, ctx.finder.as_ref(), &ctx.tol)?;
        items.push(Item::Unit(f.unit));
        items.extend(f.factors.into_iter().map(Item::Factor));
    }
    Ok(items)
}

/// Relative residual `‖K·q − unit·∏ factors‖ / ‖K·q‖` in the largest
/// coefficient norm.
pub fn verify(q: &QuatPoly, f: &Factorization) -> f64 {
    let kq = q.mul_real(&f.k);
    kq.max_diff(&f.product()) / kq.max_abs().max(f64::MIN_POSITIVE)
}

/// Gauss-Newton on the unit and the factor constants of `f` with `K` fixed.
///
/// Remainders of long extraction chains lose digits when their norms have
/// close factors; a few Newton steps on the full product recover them.
fn polish(q: &QuatPoly, f: Factorization) -> Factorization {
    let target = q.mul_real(&f.k);
    let (dt, ds) = target.bidegree();
    let flat = |p: &QuatPoly| {
        let mut v = DVector::zeros((dt + 1) * (ds + 1) * 4);
        for i in 0..=dt {
            for j in 0..=ds {
                let c = p.coeff(i, j);
                let at = (i * (ds + 1) + j) * 4;
                for (k, x) in [c.w, c.x, c.y, c.z].into_iter().enumerate() {
                    v[at + k] = x;
                }
            }
        }
        v
    };
    let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    let mut best = f;
    let mut r = flat(&best.product().sub(&target));
    for _ in 0..8 {
        let polys: Vec<QuatPoly> = best.factors.iter().map(LinearFactor::poly).collect();
        let n = polys.len();
        let mut prefix = vec![QuatPoly::constant(best.unit)];
        for p in &polys {
            let next = prefix.last().expect("nonempty").mul(p);
            prefix.push(next);
        }
        let mut suffix = vec![QuatPoly::one(); n + 1];
        for k in (0..n).rev() {
            suffix[k] = polys[k].mul(&suffix[k + 1]);
        }
        let mut jac = DMatrix::zeros(r.len(), 4 * (n + 1));
        for (e, &b) in basis.iter().enumerate() {
            jac.set_column(e, &flat(&QuatPoly::constant(b).mul(&suffix[0])));
            for k in 0..n {
                // d/dh of (x − h) is −1
                let col = prefix[k].mul(&QuatPoly::constant(-b)).mul(&suffix[k + 1]);
                jac.set_column(4 * (k + 1) + e, &flat(&col));
            }
        }
        let Ok(step) = jac.svd(true, true).solve(&(-&r), 1e-12 * r.amax().max(f64::MIN_POSITIVE)) else {
            break;
        };
        let at = |k: usize| Quaternion::new(step[4 * k], step[4 * k + 1], step[4 * k + 2], step[4 * k + 3]);
        let next = Factorization {
            unit: best.unit + at(0),
            k: best.k.clone(),
            factors: best.factors.iter().enumerate().map(|(k, l)| LinearFactor::new(l.var, l.h + at(k + 1))).collect(),
        };
        let nr = flat(&next.product().sub(&target));
        if nr.amax().is_nan() || nr.amax() >= 0.5 * r.amax() {
            break;
        }
        best = next;
        r = nr;
    }
    best
}

fn checked(q: &QuatPoly, f: Factorization, tol: &Tol) -> Result<Factorization> {
    let f = if verify(q, &f) > 1e3 * f64::EPSILON { polish(q, f) } else { f };
    let r = verify(q, &f);
    if r.is_nan() || r > tol.residual() {
        return Err(Error::ResidualTooLarge { residual: r, allowed: tol.residual() });
    }
    Ok(f)
}

/// Multiplication technique: factors `K·q` with `K ∈ R[t]`, extracting the
/// s-factors with norms `order[0], order[1], …` from left to right.
///
/// `q` must be free of real polynomial factors and `order` must list the
/// monic quadratic factors of the s-part of its norm.
pub fn algorithm2(q: &QuatPoly, order: &[RealPoly], ctx: &Context) -> Result<Factorization> {
    let tol = &ctx.tol;
    let eps = tol.structural();
    let n = order.len();
    if n != q.deg_s() {
        return Err(Error::InvalidOrder(format!("{n} quadratic factors for s-degree {}", q.deg_s())));
    }
    let mut u = q.clone();
    let mut k = RealPoly::one(Var::T);
    let mut items: Vec<Item> = Vec::new();
    let (_, t_tuple, _) = norm_tuples(q, ctx.tol.structural(), ctx)?;
    let mut known = t_tuple.factors;
    for (step, m) in order.iter().take(n.saturating_sub(1)).enumerate() {
        if m.var() != Var::S || m.degree() != 2 {
            return Err(Error::InvalidOrder(format!("{m} is not a quadratic in s")));
        }
        let (tq, s) = u.divrem_real(m)?;
        if s.max_abs() <= eps * u.max_abs() {
            return Err(Error::DivisibleByM);
        }
        let real = strip_real(&s, false, ctx)?;
        let split = algorithm1(&real.quotient, &inner_order(&real.quotient, step, &known, ctx)?, tol)?;
        let (a, b) = (split.middle.coeff(0, 1), split.middle.coeff(0, 0));
        if a.max_abs() <= eps * split.middle.max_abs() {
            return Err(Error::DegenerateRemainder);
        }
        // a·s + b = (s − h)·a
        let h = -(b * a.inv());
        let right: Vec<QuatPoly> = split.right.iter().map(LinearFactor::poly).collect();
        let g = QuatPoly::product(&right).left_mul(a).mul_real(&real.factor(Var::T));
        let left: Vec<QuatPoly> = split.left.iter().map(LinearFactor::poly).collect();
        let kp = QuatPoly::product(&left);
        // the consumed quadratics are more accurate than the norms of the computed factors
        let ki = split.left_norms.clone();
        let sh = LinearFactor::s(h).poly();
        u = sh.conj().mul(&kp.conj()).mul(&tq).add(&g.mul_real(&RealPoly::product(Var::T, &ki)));
        known.extend(ki.iter().cloned());
        let mut kept = Vec::new();
        for c in ki {
            if u.divides_real(&c, eps)? {
                u = u.divrem_real(&c)?.0;
            } else {
                kept.push(c);
            }
        }
        k = k.mul(&RealPoly::product(Var::T, &kept));

        items.extend(split.left.into_iter().map(Item::Factor));
        items.push(Item::Factor(LinearFactor::s(h)));
    }
    if let Some(m) = order.last() {
        if m.var() != Var::S || m.degree() != 2 {
            return Err(Error::InvalidOrder(format!("{m} is not a quadratic in s")));
        }
    }
    let real = strip_real(&u, true, ctx)?;
    let last = n.saturating_sub(1);
    let split = algorithm1(&real.quotient, &inner_order(&real.quotient, last, &known, ctx)?, tol)?;
    items.extend(split.left.into_iter().map(Item::Factor));
    if split.middle.deg_s() == 1 {
        let (a, b) = (split.middle.coeff(0, 1), split.middle.coeff(0, 0));
        items.push(Item::Factor(LinearFactor::s(-(b * a.inv()))));
        items.push(Item::Unit(a));
    } else {
        items.push(Item::Unit(split.middle.coeff(0, 0)));
    }
    items.extend(split.right.into_iter().map(Item::Factor));
    items.extend(real_factor_items(&real.divisors, ctx)?);
    checked(q, Factorization::from_items(k, items), tol)
}

fn swap_factorization(f: Factorization) -> Factorization {
    let var = f.k.var().other();
    Factorization {
        unit: f.unit,
        k: f.k.with_var(var),
        factors: f.factors.into_iter().map(|l| LinearFactor::new(l.var.other(), l.h)).collect(),
    }
}

/// Multiplication technique with the roles of `t` and `s` exchanged: `order`
/// lists t-factors and the result has `K ∈ R[s]`.
pub fn algorithm2_t(q: &QuatPoly, order: &[RealPoly], ctx: &Context) -> Result<Factorization> {
    let swapped: Vec<RealPoly> = order.iter().map(|m| m.clone().with_var(m.var().other())).collect();
    let f = algorithm2(&q.swap_vars(), &swapped, ctx)?;
    Ok(swap_factorization(f))
}

/// A polynomial brought into the form the factorization routines expect.
#[derive(Clone, Debug)]
pub struct Prepared {
    /// Leading coefficient of the input.
    pub unit: Quaternion,
    /// Monic input with all real factors removed.
    pub core: QuatPoly,
    /// Removed real factors, with multiplicity.
    pub real: Vec<RealPoly>,
    pub t_tuple: QuadraticFactorTuple,
    pub s_tuple: QuadraticFactorTuple,
}

impl Prepared {
    pub fn tuple(&self, var: Var) -> &QuadraticFactorTuple {
        match var {
            Var::T => &self.t_tuple,
            Var::S => &self.s_tuple,
        }
    }
}

/// Checks the norm condition, normalizes the leading coefficient and strips
/// the maximal real polynomial factor.
pub fn prepare(q: &QuatPoly, ctx: &Context) -> Result<Prepared> {
    if q.is_zero() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    let nfc = |e| match e {
        Error::NotRankOne { max_minor, allowed } => Error::NfcViolated(format!(
            "norm polynomial is not a product P(t)·R(s): 2x2 minor {max_minor:.3e} exceeds {allowed:.3e}"
        )),
        e => e,
    };
    nfc_rank1_with(&q.norm_poly(ctx.tol.structural())?, ctx.tol.eps).map_err(nfc)?;
    let unit = q.top_coeff();
    if unit.max_abs() <= ctx.tol.structural() * q.max_abs() {
        return Err(Error::NfcViolated("the coefficient of the top bidegree vanishes".into()));
    }
    let monic = q.left_mul(unit.inv());
    let (_, t, s) = norm_tuples(&monic, ctx.tol.eps, ctx).map_err(nfc)?;
    let candidates: Vec<RealPoly> = t.factors.iter().chain(&s.factors).cloned().collect();
    let mrpf = monic.mrpf_extract(&candidates, ctx.tol.structural())?;
    let (t_tuple, s_tuple) = if mrpf.divisors.is_empty() {
        (t, s)
    } else {
        let (_, t, s) = norm_tuples(&mrpf.quotient, ctx.tol.structural(), ctx)?;
        (t, s)
    };
    Ok(Prepared { unit, core: mrpf.quotient, real: mrpf.divisors, t_tuple, s_tuple })
}

/// Factorization of an already prepared polynomial; `order` permutes the
/// quadratic factors of the `var`-part of the norm.
pub fn factor_prepared(
    q: &QuatPoly,
    prep: &Prepared,
    var: Var,
    order: Option<&[usize]>,
    ctx: &Context,
) -> Result<Factorization> {
    let tuple = prep.tuple(var);
    let tuple = match order {
        Some(o) => tuple.permuted(o)?,
        None => tuple.clone(),
    };
    let core = match var {
        Var::S => algorithm2(&prep.core, &tuple.factors, ctx)?,
        Var::T => algorithm2_t(&prep.core, &tuple.factors, ctx)?,
    };
    let mut items = vec![Item::Unit(prep.unit), Item::Unit(core.unit)];
    items.extend(core.factors.into_iter().map(Item::Factor));
    items.extend(real_factor_items(&prep.real, ctx)?);
    checked(q, Factorization::from_items(core.k, items), &ctx.tol)
}

/// Factors `K·q` by the multiplication technique in the role of `var`.
pub fn factor(q: &QuatPoly, var: Var, order: Option<&[usize]>, ctx: &Context) -> Result<Factorization> {
    let prep = prepare(q, ctx)?;
    factor_prepared(q, &prep, var, order, ctx)
}

/// One run of the multiplication technique.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnumerationEntry {
    /// Variable whose norm factors were permuted.
    pub var: Var,
    pub order: Vec<usize>,
    #[serde(flatten)]
    pub factorization: Factorization,
    pub k_is_one: bool,
    /// Equivalence class among the entries with `K = 1`.
    pub class: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub entries: Vec<EnumerationEntry>,
    pub k_one_count: usize,
    pub class_count: usize,
}

/// Distinct permutations of a tuple, treating equal factors as identical.
pub fn distinct_orders(tuple: &QuadraticFactorTuple, tol: f64) -> Vec<Vec<usize>> {
    let n = tuple.len();
    let mut label = vec![0usize; n];
    for i in 0..n {
        label[i] = (0..i)
            .find(|&j| {
                let scale = tuple.factors[i].max_abs().max(1.0);
                tuple.factors[i].approx_eq(&tuple.factors[j], tol * scale)
            })
            .map_or(i, |j| label[j]);
    }
    label
        .iter()
        .copied()
        .permutations(n)
        .unique()
        .map(|labels| {
            let mut used = vec![false; n];
            labels
                .into_iter()
                .map(|l| {
                    let k = (0..n).find(|&k| label[k] == l && !used[k]).unwrap_or(l);
                    used[k] = true;
                    k
                })
                .collect()
        })
        .collect()
}

/// Runs the multiplication technique for every distinct ordering of the
/// quadratic norm factors of each variable in `vars`, and groups the
/// factorizations with `K = 1` into equivalence classes.
pub fn enumerate(q: &QuatPoly, vars: &[Var], ctx: &Context) -> Result<EnumerationReport> {
    let prep = prepare(q, ctx)?;
    let jobs: Vec<(Var, Vec<usize>)> = vars
        .iter()
        .flat_map(|&v| {
            distinct_orders(prep.tuple(v), ctx.tol.factor_match()).into_iter().map(move |o| (v, o))
        })
        .collect();
    let mut entries: Vec<EnumerationEntry> = jobs
        .into_par_iter()
        .map(|(var, order)| {
            let f = factor_prepared(q, &prep, var, Some(&order), ctx)?;
            let k_is_one = f.k_is_one();
            Ok(EnumerationEntry { var, order, factorization: f, k_is_one, class: None })
        })
        .collect::<Result<_>>()?;
    let ones: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].k_is_one).collect();
    let mut parent: Vec<usize> = (0..ones.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for a in 0..ones.len() {
        for b in a + 1..ones.len() {
            if root(&mut parent, a) == root(&mut parent, b) {
                continue;
            }
            let (fa, fb) = (&entries[ones[a]].factorization, &entries[ones[b]].factorization);
            if equivalent(fa, fb, &ctx.tol)? {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                parent[rb] = ra;
            }
        }
    }
    let mut ids: Vec<usize> = Vec::new();
    for a in 0..ones.len() {
        let r = root(&mut parent, a);
        let id = match ids.iter().position(|&x| x == r) {
            Some(id) => id,
            None => {
                ids.push(r);
                ids.len() - 1
            }
        };
        entries[ones[a]].class = Some(id);
    }
    Ok(EnumerationReport { k_one_count: ones.len(), class_count: ids.len(), entries })
}

fn same_polynomial(a: &Factorization, b: &Factorization, tol: &Tol) -> Result<()> {
    let (pa, pb) = (a.product(), b.product());
    let d = pa.max_diff(&pb) / pa.max_abs().max(pb.max_abs()).max(f64::MIN_POSITIVE);
    if d > tol.structural() {
        return Err(Error::DifferentPolynomials(d));
    }
    Ok(())
}

fn norms_in(f: &Factorization, var: Var) -> Vec<RealPoly> {
    f.factors_in(var).map(LinearFactor::norm_poly).collect()
}

fn same_norm_sequence(a: &[RealPoly], b: &[RealPoly], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, tol * x.max_abs().max(y.max_abs()).max(1.0)))
}

/// Same polynomial and the same sequence of norms of the s-factors.
pub fn t_equivalent(a: &Factorization, b: &Factorization, tol: &Tol) -> Result<bool> {
    same_polynomial(a, b, tol)?;
    Ok(same_norm_sequence(&norms_in(a, Var::S), &norms_in(b, Var::S), tol.factor_match()))
}

/// Same polynomial and the same sequence of norms of the t-factors.
pub fn s_equivalent(a: &Factorization, b: &Factorization, tol: &Tol) -> Result<bool> {
    same_polynomial(a, b, tol)?;
    Ok(same_norm_sequence(&norms_in(a, Var::T), &norms_in(b, Var::T), tol.factor_match()))
}

type StateKey = Vec<(Var, [i64; 4])>;

fn state_key(fs: &[LinearFactor]) -> StateKey {
    fs.iter().map(|f| (f.var, f.h.to_array().map(|x| (x * 1e6).round() as i64))).collect()
}

fn same_factors(a: &[LinearFactor], b: &[LinearFactor], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| x.var == y.var && x.h.approx_eq(y.h, tol * x.h.max_abs().max(1.0)))
}

/// Decides whether `b` is reachable from `a` by swapping adjacent commuting
/// factors and replacing adjacent factors in one variable by the other
/// factorization of their product.
///
/// Breadth-first search over at most [`STATE_BUDGET`] states.
pub fn equivalent(a: &Factorization, b: &Factorization, tol: &Tol) -> Result<bool> {
    same_polynomial(a, b, tol)?;
    if a.factors.len() != b.factors.len() || a.factors_in(Var::T).count() != b.factors_in(Var::T).count() {
        return Ok(false);
    }
    let goal = &b.factors;
    let mut seen: HashSet<StateKey> = HashSet::new();
    let mut queue: VecDeque<Vec<LinearFactor>> = VecDeque::new();
    seen.insert(state_key(&a.factors));
    queue.push_back(a.factors.clone());
    while let Some(state) = queue.pop_front() {
        if same_factors(&state, goal, tol.factor_match()) {
            return Ok(true);
        }
        for l in 0..state.len().saturating_sub(1) {
            let (x, y) = (state[l], state[l + 1]);
            let next = if x.commutes_with(&y, tol.structural()) {
                Some((y, x))
            } else if x.var == y.var {
                flip_factors(&x, &y, tol).ok()
            } else {
                None
            };
            if let Some((p, q)) = next {
                let mut n = state.clone();
                n[l] = p;
                n[l + 1] = q;
                if seen.insert(state_key(&n)) {
                    if seen.len() > STATE_BUDGET {
                        return Err(Error::StateBudgetExceeded(STATE_BUDGET));
                    }
                    queue.push_back(n);
                }
            }
        }
    }
    Ok(false)
}
