//! Factorization of univariate quaternionic polynomials into monic linear
//! factors, and the Bennett flip of adjacent factors.

use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::quat_poly::QuatPoly;
use crate::real_poly::{rp_roots_with, RealPoly, Var};
use crate::roots::RootFinder;
use crate::tol::Tol;

/// Monic linear factor `var − h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFactor {
    pub var: Var,
    pub h: Quaternion,
}

impl LinearFactor {
    pub fn new(var: Var, h: Quaternion) -> Self {
        LinearFactor { var, h }
    }

    pub fn t(h: Quaternion) -> Self {
        LinearFactor::new(Var::T, h)
    }

    pub fn s(h: Quaternion) -> Self {
        LinearFactor::new(Var::S, h)
    }

    pub fn poly(&self) -> QuatPoly {
        QuatPoly::linear(self.var, self.h)
    }

    /// `var² − 2 Re(h) var + |h|²`
    pub fn norm_poly(&self) -> RealPoly {
        RealPoly::quadratic(self.var, -2.0 * self.h.w, self.h.norm())
    }

    /// `c⁻¹ (var − h) c`
    pub fn conjugated_by(&self, c: Quaternion) -> LinearFactor {
        LinearFactor::new(self.var, c.inv() * self.h * c)
    }

    pub fn commutes_with(&self, o: &LinearFactor, tol: f64) -> bool {
        let scale = self.h.max_abs().max(o.h.max_abs()).max(1.0);
        self.h.commutator(o.h).max_abs() <= tol * scale * scale
    }
}

impl std::fmt::Display for LinearFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = -self.h;
        write!(f, "({} + ({}))", self.var, n)
    }
}

/// `K · Q = unit · ∏ factors`, with monic linear factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub unit: Quaternion,
    #[serde(rename = "K")]
    pub k: RealPoly,
    pub factors: Vec<LinearFactor>,
}

impl Factorization {
    pub fn new(unit: Quaternion, k: RealPoly, factors: Vec<LinearFactor>) -> Self {
        Factorization { unit, k, factors }
    }

    /// Factorization of `Q` itself (`K = 1`).
    pub fn plain(unit: Quaternion, factors: Vec<LinearFactor>) -> Self {
        Factorization::new(unit, RealPoly::one(Var::T), factors)
    }

    /// `unit · ∏ factors`
    pub fn product(&self) -> QuatPoly {
        let polys: Vec<QuatPoly> = self.factors.iter().map(LinearFactor::poly).collect();
        QuatPoly::product(&polys).left_mul(self.unit)
    }

    pub fn k_is_one(&self) -> bool {
        self.k.degree() == 0
    }

    pub fn factors_in(&self, var: Var) -> impl Iterator<Item = &LinearFactor> {
        self.factors.iter().filter(move |f| f.var == var)
    }

    /// Builds a factorization from a left-to-right sequence of linear factors
    /// and interior units, moving every unit to the front.
    pub fn from_items(k: RealPoly, items: impl IntoIterator<Item = Item>) -> Self {
        let mut unit = Quaternion::ONE;
        let mut factors: Vec<LinearFactor> = Vec::new();
        for item in items {
            match item {
                Item::Factor(f) => factors.push(f),
                // X·c = c·(c⁻¹ X c)
                Item::Unit(c) => {
                    for f in &mut factors {
                        *f = f.conjugated_by(c);
                    }
                    unit = unit * c;
                }
            }
        }
        Factorization { unit, k, factors }
    }
}

/// Element of a factor sequence before unit normalization.
#[derive(Clone, Copy, Debug)]
pub enum Item {
    Factor(LinearFactor),
    Unit(Quaternion),
}

/// Linear right factor `v − h` of a univariate `q` with norm `m`.
///
/// Writes the remainder of `q ÷ m` as `a(v − h)` and returns `h = −a⁻¹ s₀`.
pub fn right_factor(q: &QuatPoly, m: &RealPoly, tol: &Tol) -> Result<Quaternion> {
    let v = m.var();
    if q.degree(v.other()) != 0 {
        return Err(Error::InvalidInput(format!("polynomial is not univariate in {v}")));
    }
    if m.degree() != 2 {
        return Err(Error::InvalidInput(format!("{m} is not quadratic")));
    }
    let (_, rem) = q.divrem_real(m)?;
    let scale = q.max_abs();
    if rem.max_abs() <= tol.structural() * scale {
        return Err(Error::DivisibleByM);
    }
    let (a, s0) = match v {
        Var::T => (rem.coeff(1, 0), rem.coeff(0, 0)),
        Var::S => (rem.coeff(0, 1), rem.coeff(0, 0)),
    };
    if a.max_abs() <= tol.structural() * rem.max_abs() {
        return Err(Error::DegenerateRemainder);
    }
    Ok(-(a.inv() * s0))
}

/// Linear left factor `v − h` of `q` with norm `m`, computed as a right
/// factor of the conjugate polynomial.
pub fn left_factor(q: &QuatPoly, m: &RealPoly, tol: &Tol) -> Result<Quaternion> {
    Ok(right_factor(&q.conj(), m, tol)?.conj())
}

/// Factors a univariate `q` into `unit · ∏ (v − hᵢ)`.
///
/// `order` lists the monic quadratic factors of the norm of `q`; the k-th
/// entry is consumed by the k-th extracted right factor (so `order[0]` is
/// the norm of the rightmost factor). A quadratic that divides `q` itself is
/// split by [`real_to_h`] and consumes two entries.
pub fn factor_univariate(
    q: &QuatPoly,
    var: Var,
    order: &[RealPoly],
    finder: &dyn RootFinder,
    tol: &Tol,
) -> Result<Factorization> {
    if q.degree(var.other()) != 0 {
        return Err(Error::InvalidInput(format!("polynomial is not univariate in {var}")));
    }
    let mut current = q.clone();
    let mut pending: Vec<RealPoly> = order.to_vec();
    pending.reverse();
    let mut extracted: Vec<LinearFactor> = Vec::new();
    while let Some(m) = pending.pop() {
        if m.var() != var {
            return Err(Error::InvalidOrder(format!("factor {m} is not in {var}")));
        }
        if current.divides_real(&m, tol.structural())? {
            current = current.divrem_real(&m)?.0;
            let pair = real_to_h(&m, finder, tol)?;
            let scale = m.max_abs().max(1.0);
            if let Some(k) = pending.iter().rposition(|p| p.approx_eq(&m, 1e-8 * scale)) {
                pending.remove(k);
            }
            extracted.splice(0..0, pair.factors);
            continue;
        }
        let h = right_factor(&current, &m, tol)?;
        current = current.div_right_linear(var, h).0;
        extracted.insert(0, LinearFactor::new(var, h));
    }
    if current.degree(var) != 0 {
        return Err(Error::InvalidOrder(format!(
            "order leaves a remainder of degree {}",
            current.degree(var)
        )));
    }
    Ok(Factorization::new(current.coeff(0, 0), RealPoly::one(var), extracted))
}

/// Splits a real polynomial into linear quaternionic factors:
/// a quadratic `v² + bv + c` without real roots becomes
/// `(v − h)(v − conj h)` with `h = −b/2 + i·√(c − b²/4)`, and each real root
/// `r` gives `v − r`.
pub fn real_to_h(f: &RealPoly, finder: &dyn RootFinder, tol: &Tol) -> Result<Factorization> {
    if f.degree() == 0 {
        return Err(Error::InvalidInput("real_to_h needs a nonconstant polynomial".into()));
    }
    let var = f.var();
    let lead = f.lead();
    let mut factors = Vec::new();
    if f.degree() == 2 {
        let b = f.coeff(1) / lead;
        let c = f.coeff(0) / lead;
        let disc = c - b * b / 4.0;
        if disc > 0.0 {
            let h = Quaternion::new(-b / 2.0, disc.sqrt(), 0.0, 0.0);
            factors.push(LinearFactor::new(var, h));
            factors.push(LinearFactor::new(var, h.conj()));
        } else {
            let d = (-disc).sqrt();
            factors.push(LinearFactor::new(var, Quaternion::real(-b / 2.0 + d)));
            factors.push(LinearFactor::new(var, Quaternion::real(-b / 2.0 - d)));
        }
    } else {
        let roots = rp_roots_with(f, finder, tol)?;
        let mut reals: Vec<f64> = Vec::new();
        for z in roots {
            if z.im == 0.0 {
                reals.push(z.re);
            } else if z.im > 0.0 {
                let h = Quaternion::new(z.re, z.im, 0.0, 0.0);
                factors.push(LinearFactor::new(var, h));
                factors.push(LinearFactor::new(var, h.conj()));
            }
        }
        reals.sort_by(f64::total_cmp);
        factors.extend(reals.into_iter().map(|r| LinearFactor::new(var, Quaternion::real(r))));
    }
    Ok(Factorization::new(Quaternion::real(lead), RealPoly::one(var), factors))
}

/// Bennett flip: given `(u − h1)(u − h2)` returns `(k1, k2)` with
/// `(u − h1)(u − h2) = (u − k1)(u − k2)` and swapped factor norms.
pub fn bennett_flip(h1: Quaternion, h2: Quaternion, tol: &Tol) -> Result<(Quaternion, Quaternion)> {
    let d = h1.conj() - h2;
    let scale = h1.max_abs().max(h2.max_abs()).max(1.0);
    if d.max_abs() <= tol.structural() * scale {
        return Err(Error::NoFlip);
    }
    let k2 = -(d.inv() * (h1 * h2 - h1 * h1.conj()));
    let k1 = h1 + h2 - k2;
    Ok((k1, k2))
}

/// Bennett flip on two factors in the same variable.
pub fn flip_factors(a: &LinearFactor, b: &LinearFactor, tol: &Tol) -> Result<(LinearFactor, LinearFactor)> {
    if a.var != b.var {
        return Err(Error::InvalidInput("Bennett flip needs factors in one variable".into()));
    }
    let (k1, k2) = bennett_flip(a.h, b.h, tol)?;
    Ok((LinearFactor::new(a.var, k1), LinearFactor::new(a.var, k2)))
}
