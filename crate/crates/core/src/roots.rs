//! Complex roots of real polynomials.
//!
//! Root finders sit behind [`RootFinder`] and are looked up by name; the
//! default is the simultaneous Aberth iteration.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Finds all complex roots (with multiplicity) of a real polynomial given by
/// ascending coefficients.
pub trait RootFinder: Send + Sync {
    fn name(&self) -> &'static str;
    fn find(&self, coeffs: &[f64]) -> Result<Vec<Complex64>>;
}

/// Names accepted by [`finder`].
pub const FINDERS: &[&str] = &["aberth", "companion"];

pub fn finder(name: &str) -> Result<Arc<dyn RootFinder>> {
    match name {
        "aberth" => Ok(Arc::new(Aberth::default())),
        "companion" => Ok(Arc::new(Companion)),
        _ => Err(Error::UnknownStrategy(name.to_string())),
    }
}

pub fn default_finder() -> Arc<dyn RootFinder> {
    Arc::new(Aberth::default())
}

/// Aberth–Ehrlich simultaneous iteration with a backward-error stopping rule.
#[derive(Clone, Debug)]
pub struct Aberth {
    pub max_iterations: usize,
}

impl Default for Aberth {
    fn default() -> Self {
        Aberth { max_iterations: 2000 }
    }
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Value, derivative and a running-error bound for `|p(z)|`.
fn eval_with_bound(c: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    let r = z.norm();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
        mag = mag * r + a.abs();
    }
    let bound = 4.0 * c.len() as f64 * f64::EPSILON * mag;
    (p, dp, bound)
}

impl RootFinder for Aberth {
    fn name(&self) -> &'static str {
        "aberth"
    }

    fn find(&self, coeffs: &[f64]) -> Result<Vec<Complex64>> {
        let (c, zero_roots) = strip_zero_roots(coeffs);
        let n = c.len().saturating_sub(1);
        let mut out = vec![Complex64::new(0.0, 0.0); zero_roots];
        if n == 0 {
            return Ok(out);
        }
        let lead = c[n];
        let c: Vec<f64> = c.iter().map(|a| a / lead).collect();

        // Fujiwara bound on the root moduli.
        let radius = (1..=n)
            .map(|k| {
                let a = c[n - k].abs();
                if k == n {
                    (a / 2.0).powf(1.0 / k as f64)
                } else {
                    a.powf(1.0 / k as f64)
                }
            })
            .fold(0.0, f64::max)
            * 2.0;
        let radius = radius.max(f64::MIN_POSITIVE);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
            .collect();
        let mut done = vec![false; n];

        for _ in 0..self.max_iterations {
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let (p, dp, bound) = eval_with_bound(&c, z[i]);
                if p.norm() <= bound {
                    done[i] = true;
                    continue;
                }
                let ratio = p / dp;
                let sum: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (z[i] - z[j]).inv())
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
                if step.is_finite() {
                    z[i] -= step;
                } else {
                    let nudge = Complex64::new(1e-8, 1e-8) * z[i].norm().max(1.0);
                    z[i] += nudge;
                }
            }
            if done.iter().all(|&d| d) {
                out.extend(z);
                return Ok(out);
            }
        }
        Err(Error::DidNotConverge(self.max_iterations))
    }
}

/// Eigenvalues of the companion matrix.
#[derive(Clone, Copy, Debug, Default)]
pub struct Companion;

impl RootFinder for Companion {
    fn name(&self) -> &'static str {
        "companion"
    }

    fn find(&self, coeffs: &[f64]) -> Result<Vec<Complex64>> {
        let (c, zero_roots) = strip_zero_roots(coeffs);
        let n = c.len().saturating_sub(1);
        let mut out = vec![Complex64::new(0.0, 0.0); zero_roots];
        if n == 0 {
            return Ok(out);
        }
        let lead = c[n];
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -c[i] / lead;
        }
        let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
            .ok_or(Error::DidNotConverge(10_000))?;
        out.extend(schur.complex_eigenvalues().iter().copied());
        // One Newton step against the original coefficients.
        let d: Vec<f64> = (1..c.len()).map(|k| c[k] * k as f64).collect();
        for z in out.iter_mut().skip(zero_roots) {
            let dp = horner(&d, *z);
            if dp.norm() > 0.0 {
                let step = horner(&c, *z) / dp;
                if step.is_finite() && step.norm() < 1e-6 * z.norm().max(1.0) {
                    *z -= step;
                }
            }
        }
        Ok(out)
    }
}

/// Trims trailing zero coefficients and factors out `v^k`.
fn strip_zero_roots(coeffs: &[f64]) -> (Vec<f64>, usize) {
    let mut c = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let k = c.iter().take_while(|&&a| a == 0.0).count();
    (c.split_off(k), k)
}

/// Replaces every cluster of roots (single linkage, relative radius
/// `cluster`) by one value and snaps imaginary parts below
/// `snap · max(1, |z|)` to zero.
///
/// A cluster of `m` roots approximates an `m`-fold root, which is a simple
/// root of the `(m − 1)`-th derivative; the cluster mean is refined by Newton
/// steps on that derivative of `coeffs`.
pub fn cluster_and_snap(roots: Vec<Complex64>, coeffs: &[f64], cluster: f64, snap: f64) -> Vec<Complex64> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= cluster * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut out = roots.clone();
    let mut done = vec![false; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if done[r] {
            continue;
        }
        done[r] = true;
        let members: Vec<usize> = (0..n).filter(|&j| find(&mut parent, j) == r).collect();
        if members.len() > 1 {
            let mean: Complex64 =
                members.iter().map(|&j| roots[j]).sum::<Complex64>() / members.len() as f64;
            let z = polish(coeffs, members.len() - 1, mean, cluster * mean.norm().max(1.0));
            for &j in &members {
                out[j] = z;
            }
        }
    }
    for z in &mut out {
        if z.im.abs() <= snap * z.norm().max(1.0) {
            z.im = 0.0;
        }
    }
    out
}

fn derivative(c: &[f64]) -> Vec<f64> {
    (1..c.len()).map(|k| c[k] * k as f64).collect()
}

/// Newton iteration on the `order`-th derivative, kept only if it stays
/// within `radius` of the start.
fn polish(coeffs: &[f64], order: usize, start: Complex64, radius: f64) -> Complex64 {
    let mut d = coeffs.to_vec();
    for _ in 0..order {
        d = derivative(&d);
    }
    if d.len() < 2 {
        return start;
    }
    let dd = derivative(&d);
    let mut z = start;
    for _ in 0..50 {
        let dp = horner(&dd, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = horner(&d, z) / dp;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }
    if (z - start).norm() <= radius {
        z
    } else {
        start
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn same_multiset(got: &[Complex64], expect: &[Complex64], tol: f64) -> bool {
        let mut left: Vec<Complex64> = expect.to_vec();
        got.len() == expect.len()
            && got.iter().all(|g| match left.iter().position(|e| (g - e).norm() < tol) {
                Some(k) => {
                    left.swap_remove(k);
                    true
                }
                None => false,
            })
    }

    fn check_all(coeffs: &[f64], expect: &[Complex64], tol: f64) {
        for name in FINDERS {
            let f = finder(name).unwrap();
            let got = cluster_and_snap(f.find(coeffs).unwrap(), coeffs, 1e-3, 1e-7);
            assert!(same_multiset(&got, expect, tol), "{name}: {got:?}");
        }
    }

    #[test]
    fn simple_roots() {
        let c = |re, im| Complex64::new(re, im);
        check_all(&[-6.0, 11.0, -6.0, 1.0], &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1e-12);
        check_all(&[1.0, 0.0, 1.0], &[c(0.0, 1.0), c(0.0, -1.0)], 1e-14);
    }

    #[test]
    fn zero_roots_are_factored_out() {
        let c = |re, im| Complex64::new(re, im);
        check_all(&[0.0, 0.0, 1.0, 0.0, 1.0], &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)], 1e-14);
    }

    #[test]
    fn multiple_roots_are_merged() {
        // (t² + 1)² (t − 2)²
        let c = |re, im| Complex64::new(re, im);
        let coeffs = [4.0, -4.0, 9.0, -8.0, 6.0, -4.0, 1.0];
        check_all(
            &coeffs,
            &[c(0.0, 1.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, -1.0), c(2.0, 0.0), c(2.0, 0.0)],
            1e-10,
        );
    }

    #[test]
    fn unknown_finder() {
        assert!(matches!(finder("bisection"), Err(Error::UnknownStrategy(_))));
    }
}
