//! Tolerances. Every threshold in the crate is derived from one base `eps`.

/// Default base tolerance.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Base tolerance plus the per-operation scalings derived from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol {
    pub eps: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { eps: DEFAULT_EPS }
    }
}

impl Tol {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0 && eps.is_finite(), "tolerance must be positive");
        Tol { eps }
    }

    /// Relative threshold for "this remainder is zero" inside the factorization
    /// pipeline. Non-divisible remainders are O(1) relative; rounding noise
    /// accumulated over several divisions stays far below this.
    pub fn structural(&self) -> f64 {
        self.eps * 1e3
    }

    /// Largest accepted `verify` residual.
    pub fn residual(&self) -> f64 {
        self.eps * 10.0
    }

    /// Relative singular-value cutoff for nullspace extraction.
    pub fn rank(&self) -> f64 {
        self.eps * 0.1
    }

    /// Radius used to merge numerically multiple roots.
    pub fn root_cluster(&self) -> f64 {
        1e-3
    }

    /// Imaginary parts below this (relative) snap to the real axis.
    pub fn conj_pairing(&self) -> f64 {
        1e-7
    }

    /// Coefficient matching tolerance used when comparing factors.
    pub fn factor_match(&self) -> f64 {
        1e-6
    }
}
