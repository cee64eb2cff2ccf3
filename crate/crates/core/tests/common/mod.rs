//! Polynomials and factorizations shared by the integration tests and the
//! acceptance suite.
#![allow(dead_code)]

use quatfact::io::parse_expr;
use quatfact::{Factorization, LinearFactor, QuatPoly, Quaternion, RealPoly, Var};

pub const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
    Quaternion::new(w, x, y, z)
}

pub fn poly(text: &str) -> QuatPoly {
    parse_expr(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub const BEAUREGARD: &str = "(t^2 - i)*s^2 + (2*j*t)*s + (i*t^2 - 1)";

pub const THREE_FIVE: &str = "(i(-3t + 1) + t^2 - t - 2)s^2 \
    + (i(-t^2 + t + 2) + j(-2t^2 - 2t) + k(2 + 2t) - 3t + 1)s \
    + i(2t^2 - 2t + 4) + j(-t^2 + 2t - 1) + k(-t^2 - 3) - 2t - 2";

pub const REMARKABLE: &str = "(t+i+j+2k)(s+k)(t-i-j)(s+i+j-k)";
pub const REMARKABLE_OTHER: &str = "(s+i+j+k)(t+i+j)(s-k)(t-i-j+2k)";

pub const SIX: &str = "(t-i)(t-j)(s-j)(s-i+j)(s-2k)(t-1-j)";

/// Expected output of one run: the role, the order indices into the
/// canonical tuple, `K` by ascending coefficients, and the factors.
pub struct Golden {
    pub name: &'static str,
    pub var: Var,
    pub order: [usize; 2],
    pub k: Vec<f64>,
    pub factors: Vec<LinearFactor>,
}

/// Factor `var + c`, as the factors are displayed.
fn plus(var: char, c: Quaternion) -> LinearFactor {
    match var {
        't' => LinearFactor::t(-c),
        _ => LinearFactor::s(-c),
    }
}

pub fn beauregard_goldens() -> Vec<Golden> {
    let f = |v: char, w: f64, x: f64, y: f64, z: f64| plus(v, q(w, x, y, z) * R);
    vec![
        Golden {
            name: "s-order (s²+√2s+1, s²−√2s+1)",
            var: Var::S,
            order: [1, 0],
            k: vec![1.0, 0.0, 1.0],
            factors: vec![
                f('t', 0.0, 0.0, -1.0, -1.0),
                f('s', 1.0, -1.0, 0.0, 0.0),
                f('t', 1.0, 0.0, 0.0, 1.0),
                f('t', -1.0, 0.0, 0.0, 1.0),
                f('s', -1.0, 1.0, 0.0, 0.0),
                f('t', 0.0, 0.0, 1.0, -1.0),
            ],
        },
        Golden {
            name: "s-order (s²−√2s+1, s²+√2s+1)",
            var: Var::S,
            order: [0, 1],
            k: vec![1.0, 0.0, 1.0],
            factors: vec![
                f('t', 0.0, 0.0, 1.0, 1.0),
                f('s', -1.0, 1.0, 0.0, 0.0),
                f('t', 1.0, 0.0, 0.0, -1.0),
                f('t', -1.0, 0.0, 0.0, -1.0),
                f('s', 1.0, -1.0, 0.0, 0.0),
                f('t', 0.0, 0.0, -1.0, 1.0),
            ],
        },
        Golden {
            name: "t-order (t²−√2t+1, t²+√2t+1)",
            var: Var::T,
            order: [0, 1],
            k: vec![1.0, 0.0, 1.0],
            factors: vec![
                f('s', 0.0, 0.0, 1.0, -1.0),
                f('t', -1.0, -1.0, 0.0, 0.0),
                f('s', 1.0, 0.0, 0.0, 1.0),
                f('s', -1.0, 0.0, 0.0, 1.0),
                f('t', 1.0, 1.0, 0.0, 0.0),
                f('s', 0.0, 0.0, -1.0, -1.0),
            ],
        },
        Golden {
            name: "t-order (t²+√2t+1, t²−√2t+1)",
            var: Var::T,
            order: [1, 0],
            k: vec![1.0, 0.0, 1.0],
            factors: vec![
                f('s', 0.0, 0.0, -1.0, 1.0),
                f('t', 1.0, 1.0, 0.0, 0.0),
                f('s', 1.0, 0.0, 0.0, -1.0),
                f('s', -1.0, 0.0, 0.0, -1.0),
                f('t', -1.0, -1.0, 0.0, 0.0),
                f('s', 0.0, 0.0, 1.0, 1.0),
            ],
        },
    ]
}

/// Runs of the multiplication technique on the bidegree (2, 2) example with
/// norm factors s² + 2 and s² + 3.
pub fn three_five_goldens() -> Vec<Golden> {
    vec![
        Golden {
            name: "s-order (s²+3, s²+2)",
            var: Var::S,
            order: [1, 0],
            k: vec![1.8, 1.2, 1.0],
            factors: vec![
                LinearFactor::t(q(0.0, 1.0, 0.0, 0.0)),
                LinearFactor::t(q(-0.6, 0.4, 0.8, -0.8)),
                LinearFactor::s(q(0.0, 0.2, 1.4, -1.0)),
                LinearFactor::t(q(1.0, 1.2, -1.6, 0.0)),
                LinearFactor::s(q(0.0, 0.8, 0.6, 1.0)),
                LinearFactor::t(q(-0.6, 0.4, 0.8, 0.8)),
            ],
        },
        Golden {
            name: "s-order (s²+2, s²+3)",
            var: Var::S,
            order: [0, 1],
            k: vec![1.0],
            factors: vec![
                LinearFactor::t(q(0.0, 1.0, 0.0, 0.0)),
                LinearFactor::s(q(0.0, 0.0, 1.0, -1.0)),
                LinearFactor::t(q(1.0, 2.0, 0.0, 0.0)),
                LinearFactor::s(q(0.0, 1.0, 1.0, 1.0)),
            ],
        },
    ]
}

/// Largest absolute deviation of `f` from `g` over K, the unit and every
/// factor coefficient; infinite if the shapes differ.
pub fn golden_error(f: &Factorization, g: &Golden) -> f64 {
    if f.factors.len() != g.factors.len() || f.k.coeffs().len() != g.k.len() {
        return f64::INFINITY;
    }
    let mut err = (f.unit - Quaternion::ONE).max_abs();
    for (a, b) in f.k.coeffs().iter().zip(&g.k) {
        err = err.max((a - b).abs());
    }
    for (a, b) in f.factors.iter().zip(&g.factors) {
        if a.var != b.var {
            return f64::INFINITY;
        }
        err = err.max((a.h - b.h).max_abs());
    }
    err
}

pub fn k_poly(g: &Golden) -> RealPoly {
    RealPoly::new(g.var.other(), g.k.clone())
}

/// Factorization read from a product of monic linear factors in text.
pub fn factorization(text: &str) -> Factorization {
    let mut factors = Vec::new();
    for part in text.split(')').map(str::trim).filter(|p| !p.is_empty()) {
        let inner = part.trim_start_matches('(');
        let p = poly(inner);
        let var = if p.deg_t() == 1 { Var::T } else { Var::S };
        assert_eq!(p.bidegree(), if var == Var::T { (1, 0) } else { (0, 1) }, "{inner}");
        factors.push(LinearFactor::new(var, -p.coeff(0, 0)));
    }
    Factorization::plain(Quaternion::ONE, factors)
}

pub const TWO_REPS: [&str; 2] = [
    "(t - 7i/5 + k/5)(t - 3i/5 + 4k/5)(s + 2i - 2k)(t + 2j)(s - i - 4j + k)(t + j - 2k)",
    "(t - i)(s + 2i - 2k)(t - 4i/3 + 2j/3 + 4k/3)(s - i - 4j + k)(t + 14i/33 + 65j/33 - 32k/33)(t - i/11 + 4j/11 - 15k/11)",
];

/// Dual parts d₁..d₄, f₁..f₄ of the displayed lift family of the remarkable
/// example, flattened as `[w, x, y, z]` per factor.
pub fn lift_family(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let v = |x: f64, y: f64, z: f64| [0.0, x, y, z];
    [
        v(b - a + d - 2.0 * c, a - b - d, c),
        v(d - c, a, 0.0),
        v(-b, b, -(a + c + d)),
        v(0.5 * (a + 2.0 * b - d + 2.0 * c), -0.5 * (a + 2.0 * b - d), c),
        v(0.5 * (-a + 2.0 * b + d - 2.0 * c), 0.5 * (a - 2.0 * b - d), c),
        v(b, -b, -(a - c + d)),
        v(a + c, d, 0.0),
        v(-b - a + d - 2.0 * c, a + b - d, -c),
    ]
    .concat()
}

/// The six factorizations of the bidegree (3, 3) example obtained from the
/// six factorizations of its middle s-part.
pub fn six_factorizations() -> Vec<Factorization> {
    use itertools::Itertools;
    use quatfact::roots::default_finder;
    use quatfact::uni_factor::factor_univariate;
    use quatfact::Tol;

    let middle = poly("(s-j)(s-i+j)(s-2k)");
    let norms = [1.0, 2.0, 4.0].map(|c| RealPoly::quadratic(Var::S, 0.0, c));
    let finder = default_finder();
    norms
        .iter()
        .cloned()
        .permutations(3)
        .map(|order| {
            let m = factor_univariate(&middle, Var::S, &order, finder.as_ref(), &Tol::default()).unwrap();
            assert!((m.unit - Quaternion::ONE).max_abs() < 1e-12);
            let mut factors = vec![LinearFactor::t(Quaternion::I), LinearFactor::t(Quaternion::J)];
            factors.extend(m.factors);
            factors.push(LinearFactor::t(q(1.0, 0.0, 1.0, 0.0)));
            Factorization::plain(Quaternion::ONE, factors)
        })
        .collect()
}

pub fn random_quaternion(rng: &mut impl rand::Rng, r: f64) -> Quaternion {
    q(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// Random product of `nt` t-factors and `ns` s-factors in random positions,
/// with norms that differ by at least 0.1 in some coefficient within each
/// variable.
pub fn random_factorization(rng: &mut impl rand::Rng, nt: usize, ns: usize) -> Factorization {
    use rand::seq::SliceRandom;
    let mut vars: Vec<Var> = std::iter::repeat_n(Var::T, nt).chain(std::iter::repeat_n(Var::S, ns)).collect();
    vars.shuffle(rng);
    let mut factors: Vec<LinearFactor> = Vec::new();
    for var in vars {
        loop {
            let f = LinearFactor::new(var, random_quaternion(rng, 2.0));
            let n = f.norm_poly();
            let clash = factors.iter().filter(|g| g.var == var).any(|g| {
                let m = g.norm_poly();
                (n.coeff(0) - m.coeff(0)).abs() < 0.1 && (n.coeff(1) - m.coeff(1)).abs() < 0.1
            });
            if !clash && f.h.imag().norm() > 0.05 {
                factors.push(f);
                break;
            }
        }
    }
    Factorization::plain(Quaternion::ONE, factors)
}
