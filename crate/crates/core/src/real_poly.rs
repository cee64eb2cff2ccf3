//! Real univariate and bivariate polynomials, quadratic factor tuples and
//! the rank-one split of norm polynomials.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Real;
use crate::error::{Error, Result};
use crate::roots::{self, RootFinder};
use crate::tol::Tol;

/// Polynomial indeterminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    T,
    S,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::T => Var::S,
            Var::S => Var::T,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::S => "s",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Var {
    type Err = Error;
    fn from_str(s: &str) -> Result<Var> {
        match s {
            "t" => Ok(Var::T),
            "s" => Ok(Var::S),
            _ => Err(Error::InvalidInput(format!("unknown variable `{s}`"))),
        }
    }
}

/// Real polynomial in one variable, coefficients in ascending degree.
///
/// Exact trailing zeros are stripped; the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "RealPolyRepr", into = "RealPolyRepr")]
pub struct RealPoly {
    var: Var,
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RealPolyRepr {
    var: Var,
    coeffs: Vec<f64>,
}

impl From<RealPolyRepr> for RealPoly {
    fn from(r: RealPolyRepr) -> Self {
        RealPoly::new(r.var, r.coeffs)
    }
}

impl From<RealPoly> for RealPolyRepr {
    fn from(p: RealPoly) -> Self {
        RealPolyRepr { var: p.var, coeffs: p.coeffs }
    }
}

impl RealPoly {
    pub fn new(var: Var, mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealPoly { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        RealPoly { var, coeffs: Vec::new() }
    }

    pub fn one(var: Var) -> Self {
        RealPoly::constant(var, 1.0)
    }

    pub fn constant(var: Var, c: f64) -> Self {
        RealPoly::new(var, vec![c])
    }

    /// `v − r`
    pub fn linear(var: Var, r: f64) -> Self {
        RealPoly::new(var, vec![-r, 1.0])
    }

    /// `v² + b v + c`
    pub fn quadratic(var: Var, b: f64, c: f64) -> Self {
        RealPoly::new(var, vec![c, b, 1.0])
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Drops trailing coefficients below `tol · max_abs`.
    pub fn trimmed(mut self, tol: f64) -> Self {
        let cut = tol * self.max_abs();
        while self.coeffs.last().is_some_and(|c| c.abs() <= cut) {
            self.coeffs.pop();
        }
        self
    }

    pub fn scale(&self, r: f64) -> Self {
        RealPoly::new(self.var, self.coeffs.iter().map(|c| c * r).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(1.0 / self.lead())
    }

    fn result_var(&self, o: &RealPoly) -> Var {
        if self.degree() == 0 {
            o.var
        } else {
            debug_assert!(o.degree() == 0 || o.var == self.var, "mixed variables");
            self.var
        }
    }

    pub fn add(&self, o: &RealPoly) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|k| self.coeff(k) + o.coeff(k)).collect();
        RealPoly::new(self.result_var(o), c)
    }

    pub fn sub(&self, o: &RealPoly) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn mul(&self, o: &RealPoly) -> Self {
        let var = self.result_var(o);
        if self.is_zero() || o.is_zero() {
            return RealPoly::zero(var);
        }
        let mut c = vec![0.0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RealPoly::new(var, c)
    }

    pub fn product<'a>(var: Var, it: impl IntoIterator<Item = &'a RealPoly>) -> Self {
        it.into_iter().fold(RealPoly::one(var), |acc, p| acc.mul(p))
    }

    /// Division with remainder by a monic divisor: `self = q·d + r`, `deg r < deg d`.
    pub fn divrem(&self, d: &RealPoly) -> Result<(RealPoly, RealPoly)> {
        check_monic(d)?;
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return Ok((RealPoly::zero(self.var), self.clone()));
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![0.0; self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = r[k + dd];
            q[k] = c;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= c * dc;
            }
        }
        r.truncate(dd);
        Ok((RealPoly::new(self.var, q), RealPoly::new(self.var, r)))
    }

    pub fn approx_eq(&self, o: &RealPoly, tol: f64) -> bool {
        let n = self.coeffs.len().max(o.coeffs.len());
        (0..n).all(|k| (self.coeff(k) - o.coeff(k)).abs() <= tol)
    }
}

pub(crate) fn check_monic(d: &RealPoly) -> Result<()> {
    if d.is_zero() || (d.lead() - 1.0).abs() > 1e-12 {
        return Err(Error::NonMonicDivisor(d.lead()));
    }
    Ok(())
}

impl fmt::Display for RealPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let (sign, mag) = if c < 0.0 { ("-", -c) } else { ("+", c) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => self.var.name().to_string(),
                _ => format!("{}^{}", self.var, k),
            };
            if k == 0 {
                write!(f, "{}", Real(mag))?;
            } else if mag == 1.0 {
                f.write_str(&mono)?;
            } else {
                write!(f, "{}*{mono}", Real(mag))?;
            }
        }
        Ok(())
    }
}

/// Real polynomial in `t` and `s`; `coeffs[i][j]` multiplies `tⁱsʲ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealBiPoly {
    pub coeffs: Vec<Vec<f64>>,
}

impl RealBiPoly {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealBiPoly { coeffs: vec![vec![0.0; cols]; rows] }
    }

    pub fn rows(&self) -> usize {
        self.coeffs.len()
    }

    pub fn cols(&self) -> usize {
        self.coeffs.first().map_or(0, Vec::len)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coeffs.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().flatten().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|&c| c == 0.0)
    }

    /// `P(t)·R(s)` as a coefficient matrix.
    pub fn outer(p: &RealPoly, r: &RealPoly) -> Self {
        RealBiPoly {
            coeffs: p
                .coeffs()
                .iter()
                .map(|a| r.coeffs().iter().map(|b| a * b).collect())
                .collect(),
        }
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, row| acc * t + row.iter().rev().fold(0.0, |a, &c| a * s + c))
    }

    pub fn mul(&self, o: &RealBiPoly) -> Self {
        if self.rows() == 0 || o.rows() == 0 {
            return RealBiPoly::zeros(0, 0);
        }
        let mut out = RealBiPoly::zeros(self.rows() + o.rows() - 1, self.cols() + o.cols() - 1);
        for (i1, r1) in self.coeffs.iter().enumerate() {
            for (j1, a) in r1.iter().enumerate() {
                for (i2, r2) in o.coeffs.iter().enumerate() {
                    for (j2, b) in r2.iter().enumerate() {
                        out.coeffs[i1 + i2][j1 + j2] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise difference against another matrix of any shape.
    pub fn max_diff(&self, o: &RealBiPoly) -> f64 {
        let rows = self.rows().max(o.rows());
        let cols = self.cols().max(o.cols());
        let mut m: f64 = 0.0;
        for i in 0..rows {
            for j in 0..cols {
                m = m.max((self.get(i, j) - o.get(i, j)).abs());
            }
        }
        m
    }
}

/// Result of a successful rank-one split `N = P(t)·R(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NfcSplit {
    /// t-part; carries the leading scalar of `N`.
    pub p: RealPoly,
    /// Monic s-part.
    pub r: RealPoly,
    /// Largest 2×2 minor through the pivot, for diagnostics.
    pub max_minor: f64,
}

/// Splits a bivariate real polynomial as `P(t)·R(s)` when its coefficient
/// matrix has rank one.
///
/// Every minor `n[i][j]·n[a][b] − n[i][b]·n[a][j]` through the largest entry
/// `n[a][b]` must stay below `eps · max|n|²`; together these imply rank one.
pub fn nfc_rank1(n: &RealBiPoly, tol: &Tol) -> Result<NfcSplit> {
    nfc_rank1_with(n, tol.eps)
}

/// Relative size below which an entry of a split norm is rounding noise.
const NOISE_FLOOR: f64 = 1e3 * f64::EPSILON;

pub(crate) fn nfc_rank1_with(n: &RealBiPoly, eps: f64) -> Result<NfcSplit> {
    if n.is_zero() {
        return Err(Error::InvalidInput("zero norm polynomial".into()));
    }
    let mut piv = (0, 0);
    let mut best = 0.0;
    for (i, row) in n.coeffs.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c.abs() > best {
                best = c.abs();
                piv = (i, j);
            }
        }
    }
    let (a, b) = piv;
    let pivot = n.coeffs[a][b];
    let mut max_minor: f64 = 0.0;
    for (i, row) in n.coeffs.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            let minor = c * pivot - n.coeffs[i][b] * n.coeffs[a][j];
            max_minor = max_minor.max(minor.abs());
        }
    }
    let allowed = eps * best * best;
    if max_minor > allowed {
        return Err(Error::NotRankOne { max_minor, allowed });
    }
    // Entries at rounding level are zero. This must not depend on `eps`:
    // norms of high degree span many orders of magnitude.
    let floor = NOISE_FLOOR * best;
    let clean = |x: f64| if x.abs() <= floor { 0.0 } else { x };
    let col: Vec<f64> = (0..n.rows()).map(|i| clean(n.coeffs[i][b])).collect();
    let row: Vec<f64> = (0..n.cols()).map(|j| clean(n.coeffs[a][j]) / pivot).collect();
    let r = RealPoly::new(Var::S, row);
    let lr = r.lead();
    let r = r.scale(1.0 / lr);
    let p = RealPoly::new(Var::T, col.into_iter().map(|c| c * lr).collect());
    Ok(NfcSplit { p, r, max_minor })
}

/// Ordered monic quadratic factors of a nonnegative real polynomial together
/// with its leading scalar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFactorTuple {
    pub var: Var,
    pub lead: f64,
    pub factors: Vec<RealPoly>,
}

impl QuadraticFactorTuple {
    pub fn empty(var: Var, lead: f64) -> Self {
        QuadraticFactorTuple { var, lead, factors: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// `lead · ∏ factors`
    pub fn product(&self) -> RealPoly {
        RealPoly::product(self.var, &self.factors).scale(self.lead)
    }

    /// Reorders the factors; `order[k]` is the index of the factor placed at `k`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        validate_permutation(order, self.factors.len())?;
        Ok(QuadraticFactorTuple {
            var: self.var,
            lead: self.lead,
            factors: order.iter().map(|&k| self.factors[k].clone()).collect(),
        })
    }
}

pub fn validate_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::InvalidOrder(format!(
            "expected a permutation of 0..{n}, got {} indices",
            order.len()
        )));
    }
    for &k in order {
        if k >= n || seen[k] {
            return Err(Error::InvalidOrder(format!("{order:?} is not a permutation of 0..{n}")));
        }
        seen[k] = true;
    }
    Ok(())
}

/// Roots of `p` with multiplicity, using the default root finder.
pub fn rp_roots(p: &RealPoly, tol: &Tol) -> Result<Vec<Complex64>> {
    rp_roots_with(p, roots::default_finder().as_ref(), tol)
}

/// Roots of `p` with multiplicity. Numerically multiple roots are merged to
/// their cluster mean, and near-real roots are snapped to the real axis.
pub fn rp_roots_with(p: &RealPoly, finder: &dyn RootFinder, tol: &Tol) -> Result<Vec<Complex64>> {
    if p.degree() == 0 {
        return Err(Error::InvalidInput("root finding needs degree >= 1".into()));
    }
    let raw = finder.find(p.coeffs())?;
    Ok(roots::cluster_and_snap(raw, p.coeffs(), tol.root_cluster(), tol.conj_pairing()))
}

/// Monic quadratic factors of a polynomial without real roots of odd
/// multiplicity, in canonical order (by linear, then constant coefficient).
pub fn rp_quadratic_factors(p: &RealPoly, tol: &Tol) -> Result<QuadraticFactorTuple> {
    rp_quadratic_factors_with(p, roots::default_finder().as_ref(), tol)
}

pub fn rp_quadratic_factors_with(
    p: &RealPoly,
    finder: &dyn RootFinder,
    tol: &Tol,
) -> Result<QuadraticFactorTuple> {
    if p.is_zero() {
        return Err(Error::InvalidInput("zero polynomial has no factors".into()));
    }
    if p.degree() == 0 {
        return Ok(QuadraticFactorTuple::empty(p.var(), p.lead()));
    }
    if p.degree() % 2 == 1 {
        return Err(Error::InvalidInput(format!("odd degree {} polynomial", p.degree())));
    }
    // Merging a root cluster is exact for a true multiple root but distorts
    // nearby distinct ones; keep whichever root set reconstructs p better.
    let raw = finder.find(p.coeffs())?;
    let snap = tol.conj_pairing();
    let merged = roots::cluster_and_snap(raw.clone(), p.coeffs(), tol.root_cluster(), snap);
    let separate = roots::cluster_and_snap(raw, p.coeffs(), 0.0, snap);
    let bound = 10.0 * tol.root_cluster();
    let mut best: Option<(f64, Vec<RealPoly>)> = None;
    let mut first_err = None;
    'sets: for set in [&merged, &separate] {
        let centers = match pair_conjugates(set, bound) {
            Ok(c) => c,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        for squares in [false, true] {
            let quads: Vec<Quad> = centers
                .iter()
                .map(|m| {
                    if squares && m.im.abs() <= bound * m.norm().max(1.0) {
                        Quad::Square(m.re)
                    } else {
                        Quad::Pair(-2.0 * m.re, m.norm_sqr())
                    }
                })
                .collect();
            let (e, f) = refine_quadratics(p, quads);
            if best.as_ref().is_none_or(|(b, _)| e < *b) {
                best = Some((e, f));
            }
            if e <= NOISE_FLOOR {
                break 'sets;
            }
        }
    }
    let Some((e, mut factors)) = best else {
        return Err(first_err.expect("a candidate or an error"));
    };
    if e.is_nan() || e > tol.structural() {
        return Err(Error::InvalidInput(format!("quadratic factors reproduce the polynomial only to {e:.1e}")));
    }
    factors.sort_by(|a, b| a.coeff(1).total_cmp(&b.coeff(1)).then(a.coeff(0).total_cmp(&b.coeff(0))));
    Ok(QuadraticFactorTuple { var: p.var(), lead: p.lead(), factors })
}

/// Centers `(z + w̄)/2` of a greedy matching of each root `z` with the root
/// `w` nearest its conjugate.
fn pair_conjugates(roots: &[Complex64], bound: f64) -> Result<Vec<Complex64>> {
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            cand.push(((roots[i] - roots[j].conj()).norm() / scale, i, j));
        }
    }
    cand.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used = vec![false; roots.len()];
    let mut centers = Vec::new();
    for (d, i, j) in cand {
        if d > bound {
            break;
        }
        if used[i] || used[j] {
            continue;
        }
        used[i] = true;
        used[j] = true;
        centers.push((roots[i] + roots[j].conj()) * 0.5);
    }
    if let Some(i) = (0..roots.len()).find(|&i| !used[i]) {
        let z = roots[i];
        if z.im.abs() <= bound * z.norm().max(1.0) {
            let multiplicity = roots.iter().filter(|w| (*w - z).norm() <= bound * z.norm().max(1.0)).count();
            return Err(Error::OddRealRoot { root: z.re, multiplicity });
        }
        return Err(Error::InvalidInput(format!("complex root {z} has no conjugate partner")));
    }
    Ok(centers)
}

#[derive(Clone, Copy)]
enum Quad {
    Square(f64),
    Pair(f64, f64),
}

impl Quad {
    fn poly(self, var: Var) -> RealPoly {
        match self {
            Quad::Square(r) => RealPoly::quadratic(var, -2.0 * r, r * r),
            Quad::Pair(b, c) => RealPoly::quadratic(var, b, c),
        }
    }
}

/// Gauss-Newton on `lead · ∏ qᵢ = p` with perfect squares kept square.
/// Returns the relative coefficient error and the factors.
fn refine_quadratics(p: &RealPoly, mut quads: Vec<Quad>) -> (f64, Vec<RealPoly>) {
    let var = p.var();
    let n = p.degree() + 1;
    let scale = p.max_abs();
    let product = |qs: &[Quad], skip: Option<usize>| {
        qs.iter()
            .enumerate()
            .filter(|&(k, _)| Some(k) != skip)
            .fold(RealPoly::constant(var, p.lead()), |acc, (_, q)| acc.mul(&q.poly(var)))
    };
    let residual = |qs: &[Quad]| {
        let d = product(qs, None).sub(p);
        DVector::from_iterator(n, (0..n).map(|k| d.coeff(k)))
    };
    let mut r = residual(&quads);
    let mut best = (r.amax() / scale, quads.clone());
    for _ in 0..30 {
        if best.0 <= NOISE_FLOOR {
            break;
        }
        let unknowns: usize = quads.iter().map(|q| if matches!(q, Quad::Square(_)) { 1 } else { 2 }).sum();
        let mut jac = DMatrix::<f64>::zeros(n, unknowns);
        let mut col = 0;
        for (k, q) in quads.iter().enumerate() {
            let rest = product(&quads, Some(k));
            let mut put = |d: RealPoly| {
                for row in 0..n {
                    jac[(row, col)] = d.coeff(row);
                }
                col += 1;
            };
            match *q {
                Quad::Square(x) => put(rest.mul(&RealPoly::new(var, vec![2.0 * x, -2.0]))),
                Quad::Pair(..) => {
                    put(rest.mul(&RealPoly::new(var, vec![0.0, 1.0])));
                    put(rest);
                }
            }
        }
        let Ok(step) = jac.svd(true, true).solve(&(-&r), 1e-14 * scale) else {
            break;
        };
        let mut it = step.iter();
        let next: Vec<Quad> = quads
            .iter()
            .map(|q| match *q {
                Quad::Square(x) => Quad::Square(x + it.next().unwrap()),
                Quad::Pair(b, c) => Quad::Pair(b + it.next().unwrap(), c + it.next().unwrap()),
            })
            .collect();
        let nr = residual(&next);
        if nr.amax().is_nan() || nr.amax() >= r.amax() {
            break;
        }
        quads = next;
        r = nr;
        if r.amax() / scale < best.0 {
            best = (r.amax() / scale, quads.clone());
        }
    }
    let clean = |x: f64, m: f64| if x.abs() <= NOISE_FLOOR * m.max(1.0) { 0.0 } else { x };
    let factors = best
        .1
        .into_iter()
        .map(|q| {
            let q = q.poly(var);
            let (b, c) = (q.coeff(1), q.coeff(0));
            RealPoly::quadratic(var, clean(b, c.abs()), c)
        })
        .collect();
    (best.0, factors)
}

/// Is `v² + b v + c` a perfect square `(v − r)²` within `tol`? Returns `r`.
pub fn square_root_of_quadratic(q: &RealPoly, tol: f64) -> Option<f64> {
    if q.degree() != 2 {
        return None;
    }
    let b = q.coeff(1);
    let c = q.coeff(0);
    let disc = b * b / 4.0 - c;
    (disc.abs() <= tol * c.abs().max(1.0)).then_some(-b / 2.0)
}
