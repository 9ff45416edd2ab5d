//! Two-site correlators and the Bell-diagonal reduced state.
//!
//! At zero field the reduced state of any site pair (i, j) is
//! ρ = I/4 + Σ_α T^αα σα ⊗ σα with quarter-scaled correlators
//! T^αα = ⟨σα_i σα_j⟩ / 4. In terms of the correlation matrix G these are
//! determinant minors,
//!
//! ```text
//! T^xx = ¼ det G[i..j, i+1..j+1],   T^yy = ¼ det G[i+1..j+1, i..j],
//! T^zz = ¼ (G_ii G_jj − G_ij G_ji),
//! ```
//!
//! (1-based inclusive ranges) which for nearest neighbors collapse to
//! ¼G_{i,i+1}, ¼G_{i+1,i} and −¼G_{i,i+1}G_{i+1,i}.
//!
//! For the end pair (1, N) of an open chain in its ground state, G is
//! orthogonal and the (N−1)-dimensional minors reduce via the cofactor
//! identity adj(G) = det(G) Gᵀ to single entries:
//! T^xx_{1N} = −¼ s G_{N1} and T^yy_{1N} = −¼ s G_{1N} with
//! s = sgn det(A−B). The sign comes from pivot signs of an LU
//! factorization, never from the determinant value, which underflows for
//! long chains.

use nalgebra::DMatrix;

use crate::chain::QuadraticForm;
use crate::fermion::CorrelationMatrix;
use crate::{Error, Result};

/// Bell eigenvalues may stray this far outside [0, 1] before the input
/// correlators are rejected as inconsistent.
const BELL_SLACK: f64 = 1e-12;

/// Quarter-scaled two-site correlators for one site pair (1-based, i < j).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSiteCorrelators {
    pub txx: f64,
    pub tyy: f64,
    pub tzz: f64,
    pub sites: (usize, usize),
}

/// Eigenvalues of the Bell-diagonal reduced state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellDiagonalState {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
}

impl BellDiagonalState {
    pub fn as_array(&self) -> [f64; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }
}

fn det(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.clone().lu().determinant(),
    }
}

/// Correlators for an arbitrary site pair via the determinant minors.
pub fn pair_correlators(gm: &CorrelationMatrix, i: usize, j: usize) -> Result<TwoSiteCorrelators> {
    let n = gm.dim();
    if i < 1 || j <= i || j > n {
        return Err(Error::SiteRange { i, j, n });
    }
    let g = gm.g();
    let d = j - i;
    let gxx = DMatrix::from_fn(d, d, |r, c| g[(i - 1 + r, i + c)]);
    let gyy = DMatrix::from_fn(d, d, |r, c| g[(i + r, i - 1 + c)]);
    let txx = 0.25 * det(&gxx);
    let tyy = 0.25 * det(&gyy);
    let tzz = 0.25 * (g[(i - 1, i - 1)] * g[(j - 1, j - 1)] - g[(i - 1, j - 1)] * g[(j - 1, i - 1)]);
    Ok(TwoSiteCorrelators {
        txx,
        tyy,
        tzz,
        sites: (i, j),
    })
}

/// Sign of the determinant of a square matrix from the pivot signs of its
/// LU factorization. Errors if a pivot is negligible relative to the
/// largest one, i.e. the matrix is numerically singular.
pub fn determinant_sign(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    let lu = m.clone().lu();
    let u = lu.u();
    let mut sign: f64 = lu.p().determinant();
    let mut min_abs = f64::INFINITY;
    let mut max_abs = 0.0f64;
    for k in 0..n {
        let pivot = u[(k, k)];
        if pivot < 0.0 {
            sign = -sign;
        }
        min_abs = min_abs.min(pivot.abs());
        max_abs = max_abs.max(pivot.abs());
    }
    if min_abs <= 1e-13 * max_abs.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularQuadraticForm);
    }
    Ok(sign)
}

/// End-to-end correlators of an open chain.
///
/// In the ground state this uses the O(N³)-once LU sign of (A−B) and two
/// entries of G instead of an (N−1)-dimensional minor. At finite
/// temperature G is no longer orthogonal and the cofactor shortcut does
/// not apply, so the general minor route is used; either way the result
/// matches [`pair_correlators`] on (1, N).
pub fn end_to_end_correlators(
    gm: &CorrelationMatrix,
    qf: &QuadraticForm,
) -> Result<TwoSiteCorrelators> {
    let n = qf.dim();
    if gm.dim() != n {
        return Err(Error::InvalidChain(format!(
            "correlation matrix is {}-dimensional but the quadratic form is {n}-dimensional",
            gm.dim()
        )));
    }
    if n > 2 && (qf.a()[(0, n - 1)] != 0.0 || qf.b()[(0, n - 1)] != 0.0) {
        return Err(Error::ClosedChain);
    }
    if !gm.temperature().is_ground() {
        return pair_correlators(gm, 1, n);
    }
    let sign = determinant_sign(&(qf.a() - qf.b()))?;
    let g = gm.g();
    let txx = -0.25 * sign * g[(n - 1, 0)];
    let tyy = -0.25 * sign * g[(0, n - 1)];
    let tzz = -0.25 * g[(0, n - 1)] * g[(n - 1, 0)];
    Ok(TwoSiteCorrelators {
        txx,
        tyy,
        tzz,
        sites: (1, n),
    })
}

/// Eigenvalues of the Bell-diagonal state generated by a correlator triple.
///
/// Values outside [−1e-12, 1 + 1e-12] signal inconsistent correlators and
/// are rejected; smaller excursions are clamped into [0, 1].
pub fn bell_state(t: &TwoSiteCorrelators) -> Result<BellDiagonalState> {
    let raw = [
        0.25 - t.txx - t.tyy - t.tzz,
        0.25 - t.txx + t.tyy + t.tzz,
        0.25 + t.txx - t.tyy + t.tzz,
        0.25 + t.txx + t.tyy - t.tzz,
    ];
    let mut e = [0.0; 4];
    for (out, &v) in e.iter_mut().zip(&raw) {
        if !(-BELL_SLACK..=1.0 + BELL_SLACK).contains(&v) {
            return Err(Error::InconsistentCorrelators { value: v });
        }
        *out = v.clamp(0.0, 1.0);
    }
    Ok(BellDiagonalState {
        e1: e[0],
        e2: e[1],
        e3: e[2],
        e4: e[3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_quadratic_form, Boundary, ChainSpec, Temperature};
    use crate::fermion::{correlation_matrix, diagonalize};
    use crate::oracle;

    fn ground_g(spec: &ChainSpec) -> (CorrelationMatrix, QuadraticForm) {
        let qf = build_quadratic_form(spec);
        let s = diagonalize(&qf).unwrap();
        (correlation_matrix(&s, spec.temperature()), qf)
    }

    #[test]
    fn nearest_neighbor_reduces_to_single_entries() {
        let spec = ChainSpec::weak_end(8, 0.3, 0.5, 0.2).unwrap();
        let (gm, _) = ground_g(&spec);
        let g = gm.g().clone();
        for i in 1..8 {
            let t = pair_correlators(&gm, i, i + 1).unwrap();
            assert!((t.txx - 0.25 * g[(i - 1, i)]).abs() < 1e-14);
            assert!((t.tyy - 0.25 * g[(i, i - 1)]).abs() < 1e-14);
            assert!((t.tzz - (-0.25 * g[(i - 1, i)] * g[(i, i - 1)])).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_matrix_gives_zero_correlators() {
        let spec = ChainSpec::weak_end(6, 0.2, 0.4, 0.0).unwrap();
        let s = diagonalize(&build_quadratic_form(&spec)).unwrap();
        // beta -> 0 washes every entry out.
        let gm = correlation_matrix(&s, Temperature::Inverse(1e-12));
        let t = pair_correlators(&gm, 2, 5).unwrap();
        assert!(t.txx.abs() < 1e-12 && t.tyy.abs() < 1e-12 && t.tzz.abs() < 1e-12);
    }

    #[test]
    fn out_of_range_pairs_rejected() {
        let spec = ChainSpec::weak_end(6, 0.2, 0.4, 0.0).unwrap();
        let (gm, _) = ground_g(&spec);
        assert!(matches!(pair_correlators(&gm, 0, 3), Err(Error::SiteRange { .. })));
        assert!(matches!(pair_correlators(&gm, 3, 3), Err(Error::SiteRange { .. })));
        assert!(matches!(pair_correlators(&gm, 2, 7), Err(Error::SiteRange { .. })));
    }

    #[test]
    fn end_route_matches_minor_route() {
        let spec = ChainSpec::weak_end(10, 0.3, 0.2, 0.0).unwrap();
        let (gm, qf) = ground_g(&spec);
        let shortcut = end_to_end_correlators(&gm, &qf).unwrap();
        let minors = pair_correlators(&gm, 1, 10).unwrap();
        assert!((shortcut.txx - minors.txx).abs() < 1e-9);
        assert!((shortcut.tyy - minors.tyy).abs() < 1e-9);
        assert!((shortcut.tzz - minors.tzz).abs() < 1e-9);
    }

    #[test]
    fn end_route_matches_minor_route_thermally() {
        let spec = ChainSpec::weak_end(8, 0.45, 0.3, 0.1)
            .unwrap()
            .with_temperature(Temperature::Inverse(9.0));
        let (gm, qf) = ground_g(&spec);
        let a = end_to_end_correlators(&gm, &qf).unwrap();
        let b = pair_correlators(&gm, 1, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn closed_chain_rejected_for_end_route() {
        let spec = ChainSpec::uniform(6, 1.0, 1.0, Boundary::Closed).unwrap();
        let (gm, qf) = ground_g(&spec);
        assert!(matches!(
            end_to_end_correlators(&gm, &qf),
            Err(Error::ClosedChain)
        ));
    }

    #[test]
    fn pair_correlators_match_oracle_on_n8() {
        let spec = ChainSpec::weak_end(8, 0.35, 0.55, 0.0).unwrap();
        let (gm, _) = ground_g(&spec);
        let dense = oracle::exact_ground_state(&spec).unwrap();
        for (i, j) in [(1, 8), (1, 2), (2, 6), (3, 7), (1, 5)] {
            let t = pair_correlators(&gm, i, j).unwrap();
            let red = oracle::reduced_state(dense.rho(), 8, i, j).unwrap();
            let (oxx, oyy, ozz) = oracle::state_correlators(&red);
            assert!(
                (t.txx - oxx).abs() < 1e-10
                    && (t.tyy - oyy).abs() < 1e-10
                    && (t.tzz - ozz).abs() < 1e-10,
                "pair ({i},{j}): pipeline ({}, {}, {}) vs oracle ({oxx}, {oyy}, {ozz})",
                t.txx,
                t.tyy,
                t.tzz
            );
        }
    }

    #[test]
    fn reduced_end_state_is_bell_diagonal() {
        let spec = ChainSpec::weak_end(8, 0.25, 0.6, 0.0).unwrap();
        let dense = oracle::exact_ground_state(&spec).unwrap();
        let red = oracle::reduced_state(dense.rho(), 8, 1, 8).unwrap();
        // Only the diagonal and the two anti-diagonal entries (1,4)/(2,3)
        // may be populated for a Bell-diagonal state.
        for r in 0..4 {
            for c in 0..4 {
                let allowed = r == c || (r, c) == (0, 3) || (r, c) == (3, 0) || (r, c) == (1, 2) || (r, c) == (2, 1);
                if !allowed {
                    assert!(
                        red[(r, c)].abs() < 1e-10,
                        "entry ({r},{c}) = {} breaks Bell-diagonal form",
                        red[(r, c)]
                    );
                }
            }
        }
    }

    #[test]
    fn determinant_sign_matches_brute_force_expansion() {
        fn laplace_det(m: &DMatrix<f64>) -> f64 {
            let n = m.nrows();
            if n == 1 {
                return m[(0, 0)];
            }
            let mut acc = 0.0;
            for c in 0..n {
                let minor = DMatrix::from_fn(n - 1, n - 1, |r, cc| {
                    m[(r + 1, if cc < c { cc } else { cc + 1 })]
                });
                let sgn = if c % 2 == 0 { 1.0 } else { -1.0 };
                acc += sgn * m[(0, c)] * laplace_det(&minor);
            }
            acc
        }
        // Deterministic pseudo-random 6x6 instances.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..25 {
            let m = DMatrix::from_fn(6, 6, |_, _| next());
            let brute = laplace_det(&m);
            if brute.abs() < 1e-9 {
                continue;
            }
            let sign = determinant_sign(&m).unwrap();
            assert_eq!(sign, brute.signum());
        }
    }

    #[test]
    fn singular_matrix_detected() {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        m[(2, 3)] = 1.0;
        m[(3, 2)] = 1.0;
        m[(3, 3)] = 1e-16;
        m[(0, 0)] = 1.0;
        // Row 2 and row 0 made dependent.
        let m2 = {
            let mut m2 = m.clone();
            m2.set_row(2, &m.row(0).clone_owned());
            m2
        };
        assert!(matches!(
            determinant_sign(&m2),
            Err(Error::SingularQuadraticForm)
        ));
    }

    #[test]
    fn bell_state_limits() {
        let singlet = TwoSiteCorrelators {
            txx: -0.25,
            tyy: -0.25,
            tzz: -0.25,
            sites: (1, 2),
        };
        let e = bell_state(&singlet).unwrap();
        assert_eq!(e.as_array(), [1.0, 0.0, 0.0, 0.0]);

        let mixed = TwoSiteCorrelators {
            txx: 0.0,
            tyy: 0.0,
            tzz: 0.0,
            sites: (1, 2),
        };
        let e = bell_state(&mixed).unwrap();
        assert_eq!(e.as_array(), [0.25; 4]);
    }

    #[test]
    fn bell_state_rejects_inconsistent_correlators() {
        let bad = TwoSiteCorrelators {
            txx: 0.3,
            tyy: 0.3,
            tzz: 0.3,
            sites: (1, 2),
        };
        assert!(matches!(
            bell_state(&bad),
            Err(Error::InconsistentCorrelators { .. })
        ));
    }

    #[test]
    fn bell_eigenvalues_match_oracle_on_n8_end_pair() {
        let spec = ChainSpec::weak_end(8, 0.3, 0.45, 0.0).unwrap();
        let (gm, _) = ground_g(&spec);
        let t = pair_correlators(&gm, 1, 8).unwrap();
        let mut pipeline = bell_state(&t).unwrap().as_array();
        pipeline.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let dense = oracle::exact_ground_state(&spec).unwrap();
        let red = oracle::reduced_state(dense.rho(), 8, 1, 8).unwrap();
        let oracle_eigs = oracle::state_eigenvalues(&red);
        for (p, o) in pipeline.iter().zip(&oracle_eigs) {
            assert!((p - o).abs() < 1e-10, "bell eigenvalue {p} vs oracle {o}");
        }
    }

    #[test]
    fn small_lambda_end_pair_approaches_singlet_weight() {
        let spec = ChainSpec::weak_end(10, 1e-3, 1e-3, 0.0).unwrap();
        let (gm, qf) = ground_g(&spec);
        let t = end_to_end_correlators(&gm, &qf).unwrap();
        let e = bell_state(&t).unwrap();
        let top = e.as_array().into_iter().fold(0.0f64, f64::max);
        assert!(top > 0.99, "largest Bell weight {top} should approach 1");
    }
}
