//! Extension of two quaternion factorizations of one polynomial to dual
//! quaternions.
//!
//! Every linear factor `v − h` of both factorizations receives an unknown dual
//! part `d`, giving `v − h + εd`. The unknowns must satisfy the Study
//! condition of each factor and make the dual parts of both products agree.
//! All conditions are linear, so the admissible dual parts form the nullspace
//! of a real matrix.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::quat_poly::QuatPoly;
use crate::tol::Tol;
use crate::uni_factor::{Factorization, LinearFactor};

/// Which factorization an unknown belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    G,
    H,
}

/// Position of one quaternion unknown (four consecutive columns).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub side: Side,
    pub index: usize,
}

/// Origin of a row of the lift system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowTag {
    /// `p d̄ + d p̄ = 0` for the factor in `slot`.
    StudyScalar(Slot),
    /// `d + d̄ = 0` for the factor in `slot`.
    StudyRealPart(Slot),
    /// Component `component` of the coefficient of `tⁱsʲ` in the dual parts.
    Coeff { i: usize, j: usize, component: usize },
}

#[derive(Clone, Debug)]
pub struct LiftSystem {
    pub matrix: DMatrix<f64>,
    pub rows: Vec<RowTag>,
    pub layout: Vec<Slot>,
}

impl LiftSystem {
    pub fn unknowns(&self) -> usize {
        self.matrix.ncols()
    }

    /// `‖A x‖∞`
    pub fn apply_residual(&self, x: &[f64]) -> f64 {
        let v = &self.matrix * DVector::from_column_slice(x);
        v.amax()
    }

    /// The same system with one row removed.
    pub fn without_row(&self, r: usize) -> LiftSystem {
        LiftSystem {
            matrix: self.matrix.clone().remove_row(r),
            rows: self.rows.iter().enumerate().filter(|(k, _)| *k != r).map(|(_, t)| *t).collect(),
            layout: self.layout.clone(),
        }
    }
}

/// Orthonormal nullspace basis of a [`LiftSystem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftSolution {
    pub dimension: usize,
    pub basis: Vec<Vec<f64>>,
    pub layout: Vec<Slot>,
}

impl LiftSolution {
    /// `Σ cₖ · basisₖ`
    pub fn point(&self, coords: &[f64]) -> Vec<f64> {
        let n = self.layout.len() * 4;
        let mut x = vec![0.0; n];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    }

    /// Distance of `x` from the solution space, relative to `‖x‖`.
    pub fn reprojection_residual(&self, x: &[f64]) -> f64 {
        let mut r = x.to_vec();
        for b in &self.basis {
            let c: f64 = b.iter().zip(x).map(|(u, v)| u * v).sum();
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nr = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nx == 0.0 {
            0.0
        } else {
            nr / nx
        }
    }
}

/// Matrix of `d ↦ q d` on `[w, x, y, z]`.
fn left_matrix(q: Quaternion) -> Matrix4<f64> {
    let Quaternion { w, x, y, z } = q;
    Matrix4::new(
        w, -x, -y, -z, //
        x, w, -z, y, //
        y, z, w, -x, //
        z, -y, x, w,
    )
}

/// Matrix of `d ↦ d q` on `[w, x, y, z]`.
fn right_matrix(q: Quaternion) -> Matrix4<f64> {
    let Quaternion { w, x, y, z } = q;
    Matrix4::new(
        w, -x, -y, -z, //
        x, w, z, -y, //
        y, -z, w, x, //
        z, y, -x, w,
    )
}

fn polys(f: &Factorization) -> Vec<QuatPoly> {
    f.factors.iter().map(LinearFactor::poly).collect()
}

fn check_same(f1: &Factorization, f2: &Factorization, tol: &Tol) -> Result<()> {
    let (p1, p2) = (f1.product(), f2.product());
    let scale = p1.max_abs().max(p2.max_abs()).max(f64::MIN_POSITIVE);
    let d = p1.max_diff(&p2) / scale;
    if d > tol.structural() {
        return Err(Error::MismatchedPolynomials(format!("products differ by {d:e}")));
    }
    Ok(())
}

/// Coefficient rows contributed by one factorization, keyed by monomial.
fn coeff_blocks(f: &Factorization, col0: usize, sign: f64, out: &mut BTreeMap<(usize, usize), DMatrix<f64>>, n: usize) {
    let ps = polys(f);
    for k in 0..ps.len() {
        let left = QuatPoly::product(&ps[..k]).left_mul(f.unit);
        let right = QuatPoly::product(&ps[k + 1..]);
        for ((ai, aj), a) in left.terms() {
            for ((bi, bj), b) in right.terms() {
                let block = left_matrix(a) * right_matrix(b) * sign;
                let m = out.entry((ai + bi, aj + bj)).or_insert_with(|| DMatrix::zeros(4, n));
                let mut view = m.fixed_view_mut::<4, 4>(0, col0 + 4 * k);
                view += block;
            }
        }
    }
}

/// Assembles the Study and coefficient-comparison equations for `f1 = f2`.
///
/// Numerically zero rows are dropped.
pub fn build_lift_system(f1: &Factorization, f2: &Factorization, tol: &Tol) -> Result<LiftSystem> {
    check_same(f1, f2, tol)?;
    let layout: Vec<Slot> = (0..f1.factors.len())
        .map(|index| Slot { side: Side::G, index })
        .chain((0..f2.factors.len()).map(|index| Slot { side: Side::H, index }))
        .collect();
    let n = 4 * layout.len();
    let mut rows: Vec<(RowTag, Vec<f64>)> = Vec::new();

    let factors = f1.factors.iter().chain(&f2.factors);
    for (c, (slot, f)) in layout.iter().zip(factors).enumerate() {
        let p = -f.h;
        let mut scalar = vec![0.0; n];
        scalar[4 * c..4 * c + 4].copy_from_slice(&p.to_array());
        rows.push((RowTag::StudyScalar(*slot), scalar));
        let mut real = vec![0.0; n];
        real[4 * c] = 1.0;
        rows.push((RowTag::StudyRealPart(*slot), real));
    }

    let mut blocks = BTreeMap::new();
    coeff_blocks(f1, 0, 1.0, &mut blocks, n);
    coeff_blocks(f2, 4 * f1.factors.len(), -1.0, &mut blocks, n);
    for ((i, j), m) in blocks {
        for component in 0..4 {
            rows.push((RowTag::Coeff { i, j, component }, m.row(component).iter().copied().collect()));
        }
    }

    let scale = rows.iter().flat_map(|(_, r)| r.iter()).fold(0.0f64, |a, v| a.max(v.abs()));
    rows.retain(|(_, r)| r.iter().any(|v| v.abs() > tol.eps * scale));
    let matrix = DMatrix::from_row_iterator(rows.len(), n, rows.iter().flat_map(|(_, r)| r.iter().copied()));
    Ok(LiftSystem { matrix, rows: rows.into_iter().map(|(t, _)| t).collect(), layout })
}

/// Nullspace of the system by SVD. Singular values at most
/// `tol.rank() · σ_max` count as zero.
pub fn solve_lift(sys: &LiftSystem, tol: &Tol) -> LiftSolution {
    let n = sys.unknowns();
    let m = sys.matrix.nrows();
    // pad so that the SVD returns a full right basis
    let mut a = DMatrix::zeros(m.max(n), n);
    a.view_mut((0, 0), (m, n)).copy_from(&sys.matrix);
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    let cutoff = tol.rank() * smax;
    let basis: Vec<Vec<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cutoff)
        .map(|(r, _)| vt.row(r).iter().copied().collect())
        .collect();
    LiftSolution { dimension: basis.len(), basis, layout: sys.layout.clone() }
}

/// Splits a solution vector into the dual parts of `f1` and `f2`.
pub fn dual_parts(x: &[f64], n1: usize) -> (Vec<Quaternion>, Vec<Quaternion>) {
    let qs: Vec<Quaternion> = x.chunks(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])).collect();
    let (a, b) = qs.split_at(n1.min(qs.len()));
    (a.to_vec(), b.to_vec())
}

/// Dual part of `unit · ∏ (fₖ + ε dₖ)`.
fn dual_product(f: &Factorization, d: &[Quaternion]) -> QuatPoly {
    let mut primal = QuatPoly::constant(f.unit);
    let mut dual = QuatPoly::zero();
    for (lf, dk) in f.factors.iter().zip(d) {
        let p = lf.poly();
        dual = dual.mul(&p).add(&primal.right_mul(*dk));
        primal = primal.mul(&p);
    }
    dual
}

/// Largest violation of the dual product equality and the Study conditions
/// at the point `x`, relative to `‖x‖∞ · max(1, ‖f1‖)`.
pub fn verify_lift(f1: &Factorization, f2: &Factorization, x: &[f64]) -> f64 {
    let n1 = f1.factors.len();
    let (d1, d2) = dual_parts(x, n1);
    let mut worst = dual_product(f1, &d1).max_diff(&dual_product(f2, &d2));
    let factors = f1.factors.iter().chain(&f2.factors);
    for (f, d) in factors.zip(d1.iter().chain(&d2)) {
        let p = -f.h;
        let study = p * d.conj() + *d * p.conj();
        let real = *d + d.conj();
        worst = worst.max(study.max_abs()).max(real.max_abs());
    }
    let xinf = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = xinf * f1.product().max_abs().max(1.0);
    if worst == 0.0 {
        0.0
    } else {
        worst / scale.max(f64::MIN_POSITIVE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;

    fn plain(fs: &[(char, Quaternion)]) -> Factorization {
        let fs = fs
            .iter()
            .map(|&(v, c)| if v == 't' { LinearFactor::t(-c) } else { LinearFactor::s(-c) })
            .collect();
        Factorization::plain(Quaternion::ONE, fs)
    }

    fn pair() -> (Factorization, Factorization) {
        let g = plain(&[('t', I + J + K * 2.0), ('s', K), ('t', -I - J), ('s', I + J - K)]);
        let h = plain(&[('s', I + J + K), ('t', I + J), ('s', -K), ('t', -I - J + K * 2.0)]);
        (g, h)
    }

    // displayed four-parameter family, dual parts d₁..d₄ then f₁..f₄
    fn family(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
        let q = |x: f64, y: f64, z: f64| [0.0, x, y, z];
        [
            q(b - a + d - 2.0 * c, a - b - d, c),
            q(d - c, a, 0.0),
            q(-b, b, -(a + c + d)),
            q(0.5 * (a + 2.0 * b - d + 2.0 * c), -0.5 * (a + 2.0 * b - d), c),
            q(0.5 * (-a + 2.0 * b + d - 2.0 * c), 0.5 * (a - 2.0 * b - d), c),
            q(b, -b, -(a - c + d)),
            q(a + c, d, 0.0),
            q(-b - a + d - 2.0 * c, a + b - d, -c),
        ]
        .concat()
    }

    #[test]
    fn left_and_right_matrices_multiply() {
        let a = Quaternion::new(0.3, -1.2, 0.7, 2.0);
        let d = Quaternion::new(1.1, 0.4, -0.9, 0.2);
        let v = nalgebra::Vector4::from(d.to_array());
        let l = left_matrix(a) * v;
        let r = right_matrix(a) * v;
        assert!(Quaternion::new(l[0], l[1], l[2], l[3]).approx_eq(a * d, 1e-14));
        assert!(Quaternion::new(r[0], r[1], r[2], r[3]).approx_eq(d * a, 1e-14));
    }

    #[test]
    fn remarkable_pair_has_four_dimensional_lift() {
        let (g, h) = pair();
        let tol = Tol::default();
        let sys = build_lift_system(&g, &h, &tol).unwrap();
        assert_eq!(sys.unknowns(), 32);
        assert_eq!(sys.matrix.nrows(), 48);
        let sol = solve_lift(&sys, &tol);
        assert_eq!(sol.dimension, 4);
        for b in &sol.basis {
            assert!(verify_lift(&g, &h, b) <= 1e-8);
            assert!(sys.apply_residual(b) <= 1e-10);
        }
    }

    #[test]
    fn displayed_family_lies_in_nullspace() {
        let (g, h) = pair();
        let tol = Tol::default();
        let sol = solve_lift(&build_lift_system(&g, &h, &tol).unwrap(), &tol);
        let x = family(0.0, 1.0, 0.0, 0.0);
        let (d, f) = dual_parts(&x, 4);
        assert_eq!(d, vec![I - J, Quaternion::ZERO, -I + J, I - J]);
        assert_eq!(f, vec![I - J, I - J, Quaternion::ZERO, -I + J]);
        for e in 0..4 {
            let mut u = [0.0; 4];
            u[e] = 1.0;
            let x = family(u[0], u[1], u[2], u[3]);
            assert!(sol.reprojection_residual(&x) <= 1e-8, "{e}");
            assert!(verify_lift(&g, &h, &x) <= 1e-8, "{e}");
        }
    }

    fn dimension_without(sys: &LiftSystem, drop: impl Fn(&RowTag) -> bool) -> usize {
        let keep: Vec<usize> = (0..sys.rows.len()).filter(|&r| !drop(&sys.rows[r])).collect();
        let reduced = LiftSystem {
            matrix: sys.matrix.select_rows(keep.iter()),
            rows: keep.iter().map(|&r| sys.rows[r]).collect(),
            layout: sys.layout.clone(),
        };
        solve_lift(&reduced, &Tol::default()).dimension
    }

    // With pairwise coprime factor norms, the Study conditions of one side
    // force those of the other, so no single Study row is independent.
    #[test]
    fn study_rows_of_one_side_imply_the_other() {
        let (g, h) = pair();
        let sys = build_lift_system(&g, &h, &Tol::default()).unwrap();
        for (r, tag) in sys.rows.iter().enumerate() {
            if !matches!(tag, RowTag::Coeff { .. }) {
                assert_eq!(solve_lift(&sys.without_row(r), &Tol::default()).dimension, 4, "{tag:?}");
            }
        }
        let side = |t: &RowTag, want: Side| match t {
            RowTag::StudyScalar(s) | RowTag::StudyRealPart(s) => s.side == want,
            RowTag::Coeff { .. } => false,
        };
        assert_eq!(dimension_without(&sys, |t| side(t, Side::G)), 4);
        assert_eq!(dimension_without(&sys, |t| side(t, Side::H)), 4);
        assert_eq!(dimension_without(&sys, |t| matches!(t, RowTag::StudyScalar(_))), 8);
        assert_eq!(dimension_without(&sys, |t| matches!(t, RowTag::StudyRealPart(_))), 8);
        assert_eq!(dimension_without(&sys, |t| !matches!(t, RowTag::Coeff { .. })), 12);
    }

    #[test]
    fn identical_factorizations_admit_the_diagonal() {
        let tol = Tol::default();
        let f = plain(&[('t', -I)]);
        let sys = build_lift_system(&f, &f, &tol).unwrap();
        assert_eq!(sys.unknowns(), 8);
        let sol = solve_lift(&sys, &tol);
        assert!(sol.dimension >= 1);
        // d = f = j satisfies both Study conditions for t − i
        let x = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert!(sol.reprojection_residual(&x) <= 1e-10);
        assert_eq!(verify_lift(&f, &f, &x), 0.0);

        let (g, _) = pair();
        let sol = solve_lift(&build_lift_system(&g, &g, &tol).unwrap(), &tol);
        let mut x = family(0.3, -0.2, 0.5, 1.0)[..16].to_vec();
        x.extend_from_within(..);
        assert!(sol.reprojection_residual(&x) <= 1e-8);
        assert_eq!(verify_lift(&g, &g, &vec![0.0; 32]), 0.0);
    }

    #[test]
    fn full_rank_system_has_no_solutions() {
        let sys = LiftSystem {
            matrix: DMatrix::identity(4, 4),
            rows: vec![],
            layout: vec![Slot { side: Side::G, index: 0 }],
        };
        let sol = solve_lift(&sys, &Tol::default());
        assert_eq!(sol.dimension, 0);
        assert!(sol.basis.is_empty());
    }

    #[test]
    fn random_points_fail_verification() {
        let (g, h) = pair();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(verify_lift(&g, &h, &x) > 1e-3);
        }
    }

    #[test]
    fn mismatched_products_are_rejected() {
        let (g, _) = pair();
        let other = plain(&[('t', I), ('s', J)]);
        assert!(matches!(
            build_lift_system(&g, &other, &Tol::default()),
            Err(Error::MismatchedPolynomials(_))
        ));
    }

    #[test]
    fn solution_json_shape() {
        let (g, h) = pair();
        let tol = Tol::default();
        let sol = solve_lift(&build_lift_system(&g, &h, &tol).unwrap(), &tol);
        let v = serde_json::to_value(&sol).unwrap();
        assert_eq!(v["dimension"], 4);
        assert_eq!(v["layout"][4], serde_json::json!({"side": "H", "index": 0}));
        assert_eq!(v["basis"].as_array().unwrap().len(), 4);
    }
}
