//! Polynomials in `H[t, s]` with indeterminates that commute with the
//! coefficients and with each other.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::real_poly::{check_monic, square_root_of_quadratic, RealBiPoly, RealPoly, Var};

/// Bivariate quaternionic polynomial stored as a sparse monomial map
/// `(t-degree, s-degree) → coefficient`. Exact zeros are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuatPoly {
    terms: BTreeMap<(usize, usize), Quaternion>,
}

impl QuatPoly {
    pub fn zero() -> Self {
        QuatPoly::default()
    }

    pub fn one() -> Self {
        QuatPoly::constant(Quaternion::ONE)
    }

    pub fn constant(c: Quaternion) -> Self {
        QuatPoly::monomial(0, 0, c)
    }

    pub fn monomial(i: usize, j: usize, c: Quaternion) -> Self {
        let mut p = QuatPoly::zero();
        p.add_term(i, j, c);
        p
    }

    /// Monic linear polynomial `v − h`.
    pub fn linear(var: Var, h: Quaternion) -> Self {
        let mut p = QuatPoly::constant(Quaternion::ZERO - h);
        p.add_term_var(var, 1, 0, Quaternion::ONE);
        p
    }

    pub fn var(var: Var) -> Self {
        QuatPoly::linear(var, Quaternion::ZERO)
    }

    pub fn from_real(r: &RealPoly) -> Self {
        let mut p = QuatPoly::zero();
        for (k, &c) in r.coeffs().iter().enumerate() {
            p.add_term_var(r.var(), k, 0, Quaternion::real(c));
        }
        p
    }

    /// Univariate polynomial in `var` with ascending coefficients.
    pub fn univariate(var: Var, coeffs: &[Quaternion]) -> Self {
        let mut p = QuatPoly::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term_var(var, k, 0, c);
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), Quaternion)>) -> Self {
        let mut p = QuatPoly::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: Quaternion) {
        let e = self.terms.entry((i, j)).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    /// Adds `c · var^k · other^l`.
    fn add_term_var(&mut self, var: Var, k: usize, l: usize, c: Quaternion) {
        match var {
            Var::T => self.add_term(k, l, c),
            Var::S => self.add_term(l, k, c),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), Quaternion)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coeff(&self, i: usize, j: usize) -> Quaternion {
        self.terms.get(&(i, j)).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_t(&self) -> usize {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn deg_s(&self) -> usize {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn degree(&self, var: Var) -> usize {
        match var {
            Var::T => self.deg_t(),
            Var::S => self.deg_s(),
        }
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.deg_t(), self.deg_s())
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    /// Coefficient of `(deg_t, deg_s)`; the graded-lex leading coefficient
    /// whenever that monomial is present.
    pub fn top_coeff(&self) -> Quaternion {
        self.coeff(self.deg_t(), self.deg_s())
    }

    /// Coefficient of `var^k`, a polynomial in the other variable.
    pub fn coeff_in(&self, var: Var, k: usize) -> QuatPoly {
        let mut out = QuatPoly::zero();
        for ((i, j), c) in self.terms() {
            match var {
                Var::T if i == k => out.add_term(0, j, c),
                Var::S if j == k => out.add_term(i, 0, c),
                _ => {}
            }
        }
        out
    }

    /// Drops coefficients with magnitude at most `rel · max_abs`.
    pub fn pruned(&self, rel: f64) -> QuatPoly {
        let cut = rel * self.max_abs();
        QuatPoly {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.max_abs() > cut)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    pub fn add(&self, o: &QuatPoly) -> QuatPoly {
        let mut out = self.clone();
        for ((i, j), c) in o.terms() {
            out.add_term(i, j, c);
        }
        out
    }

    pub fn sub(&self, o: &QuatPoly) -> QuatPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> QuatPoly {
        self.map(|c| -c)
    }

    pub fn mul(&self, o: &QuatPoly) -> QuatPoly {
        let mut out = QuatPoly::zero();
        for ((i1, j1), a) in self.terms() {
            for ((i2, j2), b) in o.terms() {
                out.add_term(i1 + i2, j1 + j2, a * b);
            }
        }
        out
    }

    pub fn product<'a>(it: impl IntoIterator<Item = &'a QuatPoly>) -> QuatPoly {
        it.into_iter().fold(QuatPoly::one(), |acc, p| acc.mul(p))
    }

    /// `c · self`
    pub fn left_mul(&self, c: Quaternion) -> QuatPoly {
        self.map(|x| c * x)
    }

    /// `self · c`
    pub fn right_mul(&self, c: Quaternion) -> QuatPoly {
        self.map(|x| x * c)
    }

    pub fn scale(&self, r: f64) -> QuatPoly {
        self.map(|x| x * r)
    }

    /// Product with a central real polynomial.
    pub fn mul_real(&self, r: &RealPoly) -> QuatPoly {
        self.mul(&QuatPoly::from_real(r))
    }

    pub fn conj(&self) -> QuatPoly {
        self.map(Quaternion::conj)
    }

    fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> QuatPoly {
        QuatPoly::from_terms(self.terms().map(|(k, c)| (k, f(c))))
    }

    /// Exchanges the roles of `t` and `s`.
    pub fn swap_vars(&self) -> QuatPoly {
        QuatPoly::from_terms(self.terms().map(|((i, j), c)| ((j, i), c)))
    }

    pub fn eval(&self, t: f64, s: f64) -> Quaternion {
        self.terms()
            .map(|((i, j), c)| c * (t.powi(i as i32) * s.powi(j as i32)))
            .fold(Quaternion::ZERO, |a, b| a + b)
    }

    /// Largest coefficient difference.
    pub fn max_diff(&self, o: &QuatPoly) -> f64 {
        self.sub(o).max_abs()
    }

    /// Norm polynomial `conj(Q)·Q`.
    ///
    /// The imaginary residue is checked against `eps` times the largest
    /// real coefficient and then discarded.
    pub fn norm_poly(&self, eps: f64) -> Result<RealBiPoly> {
        let prod = self.conj().mul(self);
        let (m, n) = prod.bidegree();
        let mut out = RealBiPoly::zeros(m + 1, n + 1);
        let mut residue: f64 = 0.0;
        for ((i, j), c) in prod.terms() {
            out.coeffs[i][j] = c.w;
            residue = residue.max(c.imag().max_abs());
        }
        if residue > eps * out.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::NonRealResidue(residue));
        }
        Ok(out)
    }

    /// Division with remainder by a monic real polynomial `m` in `m.var()`:
    /// `self = T·m + S` with `deg_v S < deg m`.
    ///
    /// Since `m` is central, each coefficient in the other variable divides
    /// independently.
    pub fn divrem_real(&self, m: &RealPoly) -> Result<(QuatPoly, QuatPoly)> {
        check_monic(m)?;
        let v = m.var();
        let dm = m.degree();
        let deg_v = self.degree(v);
        if self.is_zero() || deg_v < dm {
            return Ok((QuatPoly::zero(), self.clone()));
        }
        let mut quot = QuatPoly::zero();
        let mut rem = QuatPoly::zero();
        for l in 0..=self.degree(v.other()) {
            let mut col: Vec<Quaternion> = (0..=deg_v).map(|k| self.coeff_var(v, k, l)).collect();
            for k in (0..=deg_v - dm).rev() {
                let c = col[k + dm];
                quot.add_term_var(v, k, l, c);
                for (j, &mc) in m.coeffs().iter().enumerate() {
                    col[k + j] -= c * mc;
                }
            }
            for (k, &c) in col.iter().take(dm).enumerate() {
                rem.add_term_var(v, k, l, c);
            }
        }
        Ok((quot, rem))
    }

    fn coeff_var(&self, var: Var, k: usize, l: usize) -> Quaternion {
        match var {
            Var::T => self.coeff(k, l),
            Var::S => self.coeff(l, k),
        }
    }

    /// Does the monic real polynomial `m` divide `self`? The remainder must be
    /// at most `eps · max_abs(self)` coefficientwise.
    pub fn divides_real(&self, m: &RealPoly, eps: f64) -> Result<bool> {
        if self.is_zero() {
            return Ok(true);
        }
        let (_, rem) = self.divrem_real(m)?;
        Ok(rem.max_abs() <= eps * self.max_abs())
    }

    /// Right division by `var − h`: returns `(Q', r)` with `self = Q'·(var − h) + r`,
    /// `r` free of `var`.
    pub fn div_right_linear(&self, var: Var, h: Quaternion) -> (QuatPoly, QuatPoly) {
        self.div_linear(var, h, true)
    }

    /// Left division by `var − h`: `self = (var − h)·Q' + r`.
    pub fn div_left_linear(&self, var: Var, h: Quaternion) -> (QuatPoly, QuatPoly) {
        self.div_linear(var, h, false)
    }

    fn div_linear(&self, var: Var, h: Quaternion, right: bool) -> (QuatPoly, QuatPoly) {
        let deg_v = self.degree(var);
        let mut quot = QuatPoly::zero();
        let mut rem = QuatPoly::zero();
        if self.is_zero() {
            return (quot, rem);
        }
        for l in 0..=self.degree(var.other()) {
            let col: Vec<Quaternion> = (0..=deg_v).map(|k| self.coeff_var(var, k, l)).collect();
            // c_k = q_{k-1} − q_k·h  (right)  or  q_{k-1} − h·q_k  (left)
            let mut q_next = Quaternion::ZERO;
            for k in (1..=deg_v).rev() {
                let hq = if right { q_next * h } else { h * q_next };
                let q = col[k] + hq;
                quot.add_term_var(var, k - 1, l, q);
                q_next = q;
            }
            let hq = if right { q_next * h } else { h * q_next };
            rem.add_term_var(var, 0, l, col[0] + hq);
        }
        (quot, rem)
    }

    /// Strips every real factor drawn from `candidates` (repeatedly, for
    /// multiplicity). A perfect-square candidate `(v − r)²` is tested as the
    /// linear factor `v − r`.
    pub fn mrpf_extract(&self, candidates: &[RealPoly], eps: f64) -> Result<Mrpf> {
        let mut unique: Vec<RealPoly> = Vec::new();
        for c in candidates {
            let c = match square_root_of_quadratic(c, 1e-6) {
                Some(r) => RealPoly::linear(c.var(), r),
                None => c.clone(),
            };
            let scale = c.max_abs().max(1.0);
            if !unique.iter().any(|u| u.var() == c.var() && u.approx_eq(&c, 1e-9 * scale)) {
                unique.push(c);
            }
        }
        let mut q = self.clone();
        let mut divisors = Vec::new();
        for c in unique {
            while !q.is_zero() && q.degree(c.var()) >= c.degree() && q.divides_real(&c, eps)? {
                q = q.divrem_real(&c)?.0;
                divisors.push(c.clone());
            }
        }
        Ok(Mrpf { divisors, quotient: q })
    }
}

/// Real factor stripped by [`QuatPoly::mrpf_extract`].
#[derive(Clone, Debug)]
pub struct Mrpf {
    /// Extracted monic divisors, with multiplicity.
    pub divisors: Vec<RealPoly>,
    /// The polynomial with all divisors removed.
    pub quotient: QuatPoly,
}

impl Mrpf {
    /// Product of the divisors in `var` (divisors in the other variable are skipped).
    pub fn factor(&self, var: Var) -> RealPoly {
        RealPoly::product(var, self.divisors.iter().filter(|d| d.var() == var))
    }
}

#[derive(Serialize, Deserialize)]
struct Term {
    t: usize,
    s: usize,
    c: Quaternion,
}

#[derive(Serialize, Deserialize)]
struct TermList {
    terms: Vec<Term>,
}

impl Serialize for QuatPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        TermList {
            terms: self.terms().map(|((t, s), c)| Term { t, s, c }).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for QuatPoly {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let list = TermList::deserialize(de)?;
        Ok(QuatPoly::from_terms(list.terms.into_iter().map(|t| ((t.t, t.s), t.c))))
    }
}

impl fmt::Display for QuatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for ((i, j), c) in self.terms.iter().rev().map(|(&k, &c)| (k, c)) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, e) in [("t", i), ("s", j)] {
                match e {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    _ => write!(f, "*{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    const ONE: Quaternion = Quaternion::ONE;
    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;
    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn lin(var: Var, h: Quaternion) -> QuatPoly {
        QuatPoly::linear(var, h)
    }

    pub(crate) fn beauregard() -> QuatPoly {
        // (t² − i)s² + (2j t)s + (i t² − 1)
        QuatPoly::from_terms([
            ((2, 2), ONE),
            ((0, 2), -I),
            ((1, 1), J * 2.0),
            ((2, 0), I),
            ((0, 0), -ONE),
        ])
    }

    #[test]
    fn products() {
        let p = lin(Var::T, I).mul(&lin(Var::T, -I));
        assert_eq!(p, QuatPoly::from_real(&RealPoly::new(Var::T, vec![1.0, 0.0, 1.0])));

        let a = lin(Var::T, -I - J).mul(&lin(Var::T, I));
        let b = lin(Var::T, -I).mul(&lin(Var::T, I - J));
        assert_eq!(a, b);

        let x = lin(Var::S, J).mul(&lin(Var::T, J));
        let y = lin(Var::T, J).mul(&lin(Var::S, J));
        assert_eq!(x, y);
    }

    #[test]
    fn norm_examples() {
        let n = beauregard().norm_poly(1e-9).unwrap();
        let quartic = RealPoly::new(Var::T, vec![1.0, 0.0, 0.0, 0.0, 1.0]);
        let expect = RealBiPoly::outer(&quartic, &quartic.clone().with_var(Var::S));
        assert_eq!(n.max_diff(&expect), 0.0);

        let n = lin(Var::T, ONE + I).norm_poly(1e-9).unwrap();
        assert_eq!(n.coeffs, vec![vec![2.0], vec![-2.0], vec![1.0]]);

        let n = QuatPoly::constant(Quaternion::new(1.0, 2.0, 3.0, 4.0)).norm_poly(1e-9).unwrap();
        assert_eq!(n.coeffs, vec![vec![30.0]]);
    }

    #[test]
    fn beauregard_remainder() {
        let m = RealPoly::new(Var::S, vec![1.0, SQRT2, 1.0]);
        let (t, s) = beauregard().divrem_real(&m).unwrap();
        // (√2 i + 2j t − √2 t²)s + i(t² + 1) − 1 − t²
        let expect = QuatPoly::from_terms([
            ((0, 1), I * SQRT2),
            ((1, 1), J * 2.0),
            ((2, 1), -ONE * SQRT2),
            ((2, 0), I - ONE),
            ((0, 0), I - ONE),
        ]);
        assert!(s.max_diff(&expect) < 1e-15, "{s}");
        assert!(t.mul_real(&m).add(&s).max_diff(&beauregard()) < 1e-15);
    }

    #[test]
    fn divrem_low_degree_is_identity() {
        let q = lin(Var::T, I).mul(&lin(Var::S, J));
        let (t, s) = q.divrem_real(&RealPoly::new(Var::S, vec![1.0, 0.0, 1.0])).unwrap();
        assert!(t.is_zero());
        assert_eq!(s, q);
    }

    #[test]
    fn divisibility() {
        let m = RealPoly::new(Var::T, vec![1.0, 0.0, 1.0]);
        let q = QuatPoly::from_real(&m).mul(&lin(Var::S, J));
        assert!(q.divides_real(&m, 1e-9).unwrap());
        assert!(!beauregard().divides_real(&m, 1e-9).unwrap());
        assert!(QuatPoly::zero().divides_real(&m, 1e-9).unwrap());
        assert!(q.divides_real(&RealPoly::new(Var::T, vec![1.0, 2.0]), 1e-9).is_err());
    }

    #[test]
    fn mrpf_examples() {
        let m = RealPoly::new(Var::T, vec![1.0, 0.0, 1.0]);
        let core = lin(Var::S, J);
        let q = QuatPoly::from_real(&m).mul(&core);
        let out = q.mrpf_extract(std::slice::from_ref(&m), 1e-9).unwrap();
        assert_eq!(out.factor(Var::T), m);
        assert!(out.quotient.max_diff(&core) < 1e-15);

        let out = core.mrpf_extract(std::slice::from_ref(&m), 1e-9).unwrap();
        assert!(out.divisors.is_empty());
        assert_eq!(out.quotient, core);

        // (t² + 1)² (s − j): oracle is reconstruction of the stripped parts.
        let q = QuatPoly::from_real(&m.mul(&m)).mul(&core);
        let out = q.mrpf_extract(&[m.clone(), m.clone()], 1e-9).unwrap();
        assert_eq!(out.divisors.len(), 2);
        assert!(out.factor(Var::T).approx_eq(&m.mul(&m), 0.0));
        assert!(out.quotient.max_diff(&core) < 1e-15);
        assert!(out.quotient.mul_real(&out.factor(Var::T)).max_diff(&q) < 1e-14);
        assert!(!out.quotient.divides_real(&m, 1e-9).unwrap());
    }

    #[test]
    fn mrpf_linear_real_factor_from_square_candidate() {
        let core = lin(Var::S, J).mul(&lin(Var::T, I));
        let q = QuatPoly::from_real(&RealPoly::linear(Var::T, 2.0)).mul(&core);
        let sq = RealPoly::quadratic(Var::T, -4.0, 4.0);
        let out = q.mrpf_extract(&[sq], 1e-9).unwrap();
        assert_eq!(out.divisors, vec![RealPoly::linear(Var::T, 2.0)]);
        assert!(out.quotient.max_diff(&core) < 1e-14);
    }

    #[test]
    fn linear_division() {
        let q = lin(Var::T, I).mul(&lin(Var::T, J)).mul(&lin(Var::S, K));
        let (left, r) = q.div_left_linear(Var::T, I);
        assert!(r.max_abs() < 1e-15);
        assert!(left.max_diff(&lin(Var::T, J).mul(&lin(Var::S, K))) < 1e-15);
        let (right, r) = q.div_right_linear(Var::S, K);
        assert!(r.max_abs() < 1e-15);
        assert!(right.max_diff(&lin(Var::T, I).mul(&lin(Var::T, J))) < 1e-15);
        let (_, r) = q.div_right_linear(Var::T, I);
        assert!(r.max_abs() > 0.1);
    }

    #[test]
    fn json_term_map() {
        let q = lin(Var::T, I);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(
            s,
            r#"{"terms":[{"t":0,"s":0,"c":[0.0,-1.0,0.0,0.0]},{"t":1,"s":0,"c":[1.0,0.0,0.0,0.0]}]}"#
        );
        let back: QuatPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-3.0f64..3.0).prop_map(Quaternion::from)
    }

    fn bipoly(max: usize) -> impl Strategy<Value = QuatPoly> {
        prop::collection::vec(((0..=max, 0..=max), quat()), 1..10).prop_map(QuatPoly::from_terms)
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in bipoly(3), b in bipoly(3)) {
            let na = a.norm_poly(1e-9).unwrap();
            let nb = b.norm_poly(1e-9).unwrap();
            let nab = a.mul(&b).norm_poly(1e-9).unwrap();
            let prod = na.mul(&nb);
            prop_assert!(nab.max_diff(&prod) <= 1e-8 * prod.max_abs().max(1.0));
        }

        #[test]
        fn divrem_reconstructs(q in bipoly(4), c in prop::collection::vec(-2.0f64..2.0, 1..4), s_var in any::<bool>()) {
            let var = if s_var { Var::S } else { Var::T };
            let mut coeffs = c;
            coeffs.push(1.0);
            let m = RealPoly::new(var, coeffs);
            let (t, s) = q.divrem_real(&m).unwrap();
            prop_assert!(s.is_zero() || s.degree(var) < m.degree());
            let back = t.mul_real(&m).add(&s);
            prop_assert!(back.max_diff(&q) <= 1e-9 * q.max_abs().max(1.0));
            // T·m ÷ m leaves no remainder.
            let (_, r2) = t.mul_real(&m).divrem_real(&m).unwrap();
            prop_assert!(r2.max_abs() <= 1e-9 * t.max_abs().max(1.0) * m.max_abs());
        }
    }
}
