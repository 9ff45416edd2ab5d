//! Chain descriptions and their quadratic-form coupling matrices.
//!
//! A chain of N spin-1/2 sites with nearest-neighbor XY couplings,
//!
//! ```text
//! H = Σ_i (κ/4) (J_i σx_i σx_{i+1} + K_i σy_i σy_{i+1}),
//! ```
//!
//! is fixed per bond by the pair (J_i, K_i); κ = 1 throughout, so every
//! output of the crate is dimensionless. The weak-end family couples the
//! two edge spins to the bulk through bonds (1,2) and (N−1,N) carrying
//! (J, K) = (λ₁, λ₂), while the bulk bonds carry (1+γ, 1−γ) with γ the
//! bulk anisotropy (γ = 0 is the XX chain).
//!
//! After the Jordan-Wigner transformation the Hamiltonian takes the
//! quadratic form κ Σ_ij [k†_i A_ij k_j + ½(k†_i B_ij k†_j + h.c.)] with
//!
//! ```text
//! A_ij = ½(J'_i δ_{i+1,j} + J'_j δ_{i,j+1}),   J'_i = (J_i + K_i)/2,
//! B_ij = ½(K'_i δ_{i+1,j} − K'_j δ_{i,j+1}),   K'_i = (J_i − K_i)/2,
//! ```
//!
//! so A is symmetric and B antisymmetric, both tridiagonal except for the
//! (1,N) corners of closed rings.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Default floor used to realize "λ ≈ 0". An exactly-zero end coupling
/// decouples an edge spin, the ground state becomes degenerate and the
/// correlation matrix is no longer well defined.
pub const DEFAULT_LAMBDA_FLOOR: f64 = 1e-3;

/// Boundary condition of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// No bond between sites N and 1.
    Open,
    /// Ring: bond N couples site N back to site 1.
    Closed,
}

/// Inverse-temperature tag for the state of the chain.
///
/// `Ground` is the β → ∞ limit; `Inverse(β)` holds β in units of 1/κ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Temperature {
    Ground,
    Inverse(f64),
}

impl Temperature {
    /// Tag for thermal equilibrium at temperature `t` (units of κ/k_B).
    pub fn from_temperature(t: f64) -> Result<Self> {
        if t.is_finite() && t > 0.0 {
            Ok(Temperature::Inverse(1.0 / t))
        } else {
            Err(Error::InvalidTemperature(format!(
                "temperature must be finite and positive, got {t}"
            )))
        }
    }

    /// Occupation factor tanh(βΔ/2) entering the thermal correlation
    /// matrix; the ground-state tag is its β → ∞ limit.
    ///
    /// An exactly zero mode keeps weight 0 in that limit (tanh(β·0/2) = 0
    /// for every β), which selects the symmetrized mixture over the
    /// degenerate ground sector; a basis pick among degenerate ground
    /// states would be arbitrary.
    pub fn mode_weight(self, delta: f64) -> f64 {
        const ZERO_MODE_TOL: f64 = 1e-12;
        match self {
            Temperature::Ground => {
                if delta <= ZERO_MODE_TOL {
                    0.0
                } else {
                    1.0
                }
            }
            Temperature::Inverse(beta) => (0.5 * beta * delta).tanh(),
        }
    }

    pub fn is_ground(self) -> bool {
        matches!(self, Temperature::Ground)
    }

    pub fn beta(self) -> Option<f64> {
        match self {
            Temperature::Ground => None,
            Temperature::Inverse(beta) => Some(beta),
        }
    }
}

/// Full description of one chain instance: size, per-bond couplings,
/// boundary and the temperature of the state to be computed.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    n: usize,
    jx: Vec<f64>,
    jy: Vec<f64>,
    boundary: Boundary,
    temperature: Temperature,
}

impl ChainSpec {
    /// Weak-end chain: open, N ≥ 4, end bonds (1,2) and (N−1,N) carry
    /// (λ₁, λ₂), bulk bonds carry (1+γ, 1−γ).
    ///
    /// Both λ must be strictly positive; use [`DEFAULT_LAMBDA_FLOOR`]
    /// where a plot calls for "λ ≈ 0".
    pub fn weak_end(n: usize, lambda1: f64, lambda2: f64, gamma: f64) -> Result<Self> {
        let bulk = n.saturating_sub(3);
        Self::weak_end_with_bulk(
            n,
            lambda1,
            lambda2,
            vec![1.0 + gamma; bulk],
            vec![1.0 - gamma; bulk],
        )
    }

    /// Weak-end chain with an explicit list of bulk couplings for bonds
    /// (2,3), ..., (N−2,N−1); both lists must have length N−3.
    pub fn weak_end_with_bulk(
        n: usize,
        lambda1: f64,
        lambda2: f64,
        bulk_jx: Vec<f64>,
        bulk_jy: Vec<f64>,
    ) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidChain(format!(
                "weak-end chains need at least 4 spins, got {n}"
            )));
        }
        if !lambda1.is_finite() || lambda1 <= 0.0 || !lambda2.is_finite() || lambda2 <= 0.0 {
            return Err(Error::InvalidChain(format!(
                "end couplings must be strictly positive, got lambda1 = {lambda1}, \
                 lambda2 = {lambda2}"
            )));
        }
        if bulk_jx.len() != n - 3 || bulk_jy.len() != n - 3 {
            return Err(Error::InvalidChain(format!(
                "bulk coupling lists must have length N-3 = {}, got {} and {}",
                n - 3,
                bulk_jx.len(),
                bulk_jy.len()
            )));
        }
        let mut jx = Vec::with_capacity(n - 1);
        let mut jy = Vec::with_capacity(n - 1);
        jx.push(lambda1);
        jy.push(lambda2);
        jx.extend_from_slice(&bulk_jx);
        jy.extend_from_slice(&bulk_jy);
        jx.push(lambda1);
        jy.push(lambda2);
        Self::from_bonds(jx, jy, Boundary::Open)
    }

    /// Uniform chain: every bond carries the same (J, K).
    pub fn uniform(n: usize, jx: f64, jy: f64, boundary: Boundary) -> Result<Self> {
        let bonds = match boundary {
            Boundary::Open => n.saturating_sub(1),
            Boundary::Closed => n,
        };
        Self::from_bonds(vec![jx; bonds], vec![jy; bonds], boundary)
    }

    /// Chain from explicit per-bond couplings. Bond i (0-based) connects
    /// sites i+1 and i+2; for closed chains the last bond connects N to 1.
    /// Lists must have length N−1 (open) or N (closed).
    pub fn from_bonds(jx: Vec<f64>, jy: Vec<f64>, boundary: Boundary) -> Result<Self> {
        if jx.len() != jy.len() {
            return Err(Error::InvalidChain(format!(
                "coupling lists differ in length: {} vs {}",
                jx.len(),
                jy.len()
            )));
        }
        let n = match boundary {
            Boundary::Open => jx.len() + 1,
            Boundary::Closed => jx.len(),
        };
        if n < 2 {
            return Err(Error::InvalidChain(format!(
                "a chain needs at least 2 spins, got {n}"
            )));
        }
        if jx.iter().chain(jy.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidChain("couplings must be finite".into()));
        }
        Ok(ChainSpec {
            n,
            jx,
            jy,
            boundary,
            temperature: Temperature::Ground,
        })
    }

    pub fn with_temperature(mut self, temperature: Temperature) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn temperature(&self) -> Temperature {
        self.temperature
    }

    /// σx couplings J_i, one entry per bond.
    pub fn bond_jx(&self) -> &[f64] {
        &self.jx
    }

    /// σy couplings K_i, one entry per bond.
    pub fn bond_jy(&self) -> &[f64] {
        &self.jy
    }
}

/// The symmetric/antisymmetric coupling matrices of the quadratic form.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl QuadraticForm {
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

/// Assemble the (A, B) pair for a chain.
///
/// Symmetry of A and antisymmetry of B hold exactly: each bond writes the
/// same value to both mirror entries, so no floating-point cancellation is
/// involved. Closed chains put the bond-N entries in the (1,N)/(N,1)
/// corners with the same ½ scale as every other bond.
pub fn build_quadratic_form(spec: &ChainSpec) -> QuadraticForm {
    let n = spec.n;
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for (bond, (&jx, &jy)) in spec.jx.iter().zip(spec.jy.iter()).enumerate() {
        let jp = 0.5 * (jx + jy);
        let kp = 0.5 * (jx - jy);
        // Bond `bond` points from site i = bond+1 to site i+1 (wrapping for
        // the closed corner); `i` below is the 0-based source index.
        let (i, j) = if bond + 1 < n { (bond, bond + 1) } else { (n - 1, 0) };
        a[(i, j)] += 0.5 * jp;
        a[(j, i)] += 0.5 * jp;
        b[(i, j)] += 0.5 * kp;
        b[(j, i)] -= 0.5 * kp;
    }
    QuadraticForm { a, b }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn open_xx_bulk_n3() {
        // J = K = 1 on every bond: J' = 1, K' = 0.
        let spec = ChainSpec::uniform(3, 1.0, 1.0, Boundary::Open).unwrap();
        let qf = build_quadratic_form(&spec);
        assert_eq!(qf.a()[(0, 1)], 0.5);
        assert_eq!(qf.a()[(1, 0)], 0.5);
        assert_eq!(qf.a()[(1, 2)], 0.5);
        assert_eq!(qf.a()[(0, 2)], 0.0);
        assert_eq!(max_abs(qf.b()), 0.0);
    }

    #[test]
    fn weak_end_n4_entries() {
        let spec = ChainSpec::weak_end(4, 0.2, 0.4, 0.0).unwrap();
        let qf = build_quadratic_form(&spec);
        // a12 = (λ1 + λ2)/4, b12 = (λ1 − λ2)/4.
        assert!((qf.a()[(0, 1)] - 0.15).abs() < 1e-15);
        assert!((qf.b()[(0, 1)] - (-0.05)).abs() < 1e-15);
        // Same couplings on the (N-1, N) bond.
        assert!((qf.a()[(2, 3)] - 0.15).abs() < 1e-15);
        assert!((qf.b()[(2, 3)] - (-0.05)).abs() < 1e-15);
        // The single bulk bond of an N = 4 chain is XX: a23 = 1/2, b23 = 0.
        assert!((qf.a()[(1, 2)] - 0.5).abs() < 1e-15);
        assert_eq!(qf.b()[(1, 2)], 0.0);
    }

    #[test]
    fn closed_xx_corner() {
        let spec = ChainSpec::uniform(3, 1.0, 1.0, Boundary::Closed).unwrap();
        let qf = build_quadratic_form(&spec);
        assert_eq!(qf.a()[(0, 2)], 0.5);
        assert_eq!(qf.a()[(2, 0)], 0.5);
        assert_eq!(qf.b()[(0, 2)], 0.0);
    }

    #[test]
    fn rejects_tiny_chains_and_bad_lambdas() {
        assert!(ChainSpec::uniform(1, 1.0, 1.0, Boundary::Open).is_err());
        assert!(ChainSpec::weak_end(3, 0.1, 0.1, 0.0).is_err());
        assert!(ChainSpec::weak_end(8, 0.0, 0.1, 0.0).is_err());
        assert!(ChainSpec::weak_end(8, 0.1, -0.2, 0.0).is_err());
        assert!(ChainSpec::weak_end(8, f64::NAN, 0.1, 0.0).is_err());
    }

    #[test]
    fn symmetry_is_exact() {
        let spec = ChainSpec::weak_end(10, 0.3, 0.7, 0.25).unwrap();
        let qf = build_quadratic_form(&spec);
        assert_eq!(max_abs(&(qf.a() - qf.a().transpose())), 0.0);
        assert_eq!(max_abs(&(qf.b() + qf.b().transpose())), 0.0);
    }

    #[test]
    fn lambda_swap_flips_b_for_xx_bulk() {
        let qf = build_quadratic_form(&ChainSpec::weak_end(8, 0.2, 0.5, 0.0).unwrap());
        let swapped = build_quadratic_form(&ChainSpec::weak_end(8, 0.5, 0.2, 0.0).unwrap());
        assert!(max_abs(&(qf.a() - swapped.a())) < 1e-15);
        assert!(max_abs(&(qf.b() + swapped.b())) < 1e-15);
    }

    #[test]
    fn gamma_zero_is_uniform_xx_bulk() {
        let spec = ChainSpec::weak_end(9, 0.2, 0.3, 0.0).unwrap();
        for bond in 1..spec.n_spins() - 2 {
            assert_eq!(spec.bond_jx()[bond], 1.0);
            assert_eq!(spec.bond_jy()[bond], 1.0);
        }
    }

    #[test]
    fn band_structure() {
        let spec = ChainSpec::weak_end(12, 0.2, 0.3, 0.4).unwrap();
        let qf = build_quadratic_form(&spec);
        for i in 0..12usize {
            for j in 0..12 {
                if i.abs_diff(j) > 1 {
                    assert_eq!(qf.a()[(i, j)], 0.0, "a[({i},{j})] off band");
                    assert_eq!(qf.b()[(i, j)], 0.0, "b[({i},{j})] off band");
                }
            }
        }
    }
}
