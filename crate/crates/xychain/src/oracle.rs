//! Brute-force verification against full 2^N exact diagonalization.
//!
//! Everything here is deliberately independent of the free-fermion route:
//! the Hamiltonian is assembled literally from the spin couplings, states
//! come from a dense symmetric eigensolve, two-site states from explicit
//! partial traces, discord from a measurement grid on the Bloch sphere and
//! concurrence from the Wootters spin-flip formula. The crate's formula
//! choices (minor orientations, determinant signs, the concurrence branch)
//! are all arbitrated by agreement with this module.
//!
//! Dense solves cost O(8^N) and are capped at N = 12.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::chain::{ChainSpec, Temperature};
use crate::{Error, Result};

/// Largest chain the dense solver accepts (2^12 = 4096 basis states).
pub const MAX_ORACLE_SPINS: usize = 12;

/// Relative tolerance below which the two lowest levels count as degenerate.
const DEGENERACY_TOL: f64 = 1e-10;

// Dense solves hold two dim² matrices; serialize them by default so a
// parallel test run cannot stack several 4096² allocations.
static SOLVE_GUARD: Mutex<()> = Mutex::new(());
static CONCURRENT_SOLVES: AtomicBool = AtomicBool::new(false);

/// Allow dense solves to run concurrently (off by default).
pub fn allow_concurrent_solves(allow: bool) {
    CONCURRENT_SOLVES.store(allow, Ordering::SeqCst);
}

fn solve_guard() -> Option<std::sync::MutexGuard<'static, ()>> {
    if CONCURRENT_SOLVES.load(Ordering::SeqCst) {
        None
    } else {
        Some(SOLVE_GUARD.lock().unwrap_or_else(|p| p.into_inner()))
    }
}

/// Dense many-body state: a density matrix over all 2^N basis states plus
/// the full energy spectrum it was built from.
#[derive(Clone, Debug)]
pub struct DenseState {
    rho: DMatrix<f64>,
    energies: Vec<f64>,
    n: usize,
    ground_degenerate: bool,
}

impl DenseState {
    pub fn rho(&self) -> &DMatrix<f64> {
        &self.rho
    }

    /// Full spectrum in ascending order.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn n_spins(&self) -> usize {
        self.n
    }

    /// Whether the two lowest levels are degenerate within tolerance; the
    /// ground-state projector is then basis-dependent and callers decide
    /// what to do with it.
    pub fn ground_degenerate(&self) -> bool {
        self.ground_degenerate
    }

    /// E_1 − E_0 from the many-body spectrum.
    pub fn energy_gap(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }
}

/// Assemble the 2^N × 2^N spin Hamiltonian
/// H = Σ_bonds (κ/4)(J σx σx + K σy σy) with κ = 1.
///
/// Site i occupies bit i−1 of the basis index; both Pauli products are
/// real, so the matrix is real symmetric.
pub fn dense_hamiltonian(spec: &ChainSpec) -> Result<DMatrix<f64>> {
    let n = spec.n_spins();
    if n > MAX_ORACLE_SPINS {
        return Err(Error::OracleTooLarge {
            n,
            max: MAX_ORACLE_SPINS,
        });
    }
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    for (bond, (&jx, &jy)) in spec.bond_jx().iter().zip(spec.bond_jy()).enumerate() {
        let (pi, pj) = if bond + 1 < n { (bond, bond + 1) } else { (n - 1, 0) };
        let mask = (1usize << pi) | (1usize << pj);
        for s in 0..dim {
            let equal = ((s >> pi) & 1) == ((s >> pj) & 1);
            // σxσx flips both bits with amplitude +1; σyσy flips them with
            // amplitude −1 when the bits agree and +1 when they differ.
            let amp = 0.25 * (jx + if equal { -jy } else { jy });
            if amp != 0.0 {
                h[(s ^ mask, s)] += amp;
            }
        }
    }
    Ok(h)
}

fn sorted_spectrum(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, Vec<usize>) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    (energies, eig.eigenvectors, order)
}

fn degeneracy_scale(energies: &[f64]) -> f64 {
    energies
        .iter()
        .fold(1.0f64, |acc, e| acc.max(e.abs()))
}

/// Ground-state projector of the dense Hamiltonian.
pub fn exact_ground_state(spec: &ChainSpec) -> Result<DenseState> {
    let _guard = solve_guard();
    let h = dense_hamiltonian(spec)?;
    let (energies, vectors, order) = sorted_spectrum(&h);
    let ground = vectors.column(order[0]);
    let rho = ground * ground.transpose();
    let degenerate = energies[1] - energies[0] < DEGENERACY_TOL * degeneracy_scale(&energies);
    Ok(DenseState {
        rho,
        energies,
        n: spec.n_spins(),
        ground_degenerate: degenerate,
    })
}

/// Thermal Gibbs state e^{−βH}/Z of the dense Hamiltonian.
pub fn gibbs_state(spec: &ChainSpec, beta: f64) -> Result<DenseState> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidTemperature(format!(
            "beta must be finite and positive, got {beta}"
        )));
    }
    let _guard = solve_guard();
    let h = dense_hamiltonian(spec)?;
    let (energies, vectors, order) = sorted_spectrum(&h);
    let e0 = energies[0];
    let weights: Vec<f64> = energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    // ρ = V diag(w/Z) Vᵀ via one GEMM on the √-weighted eigenvector matrix.
    let dim = energies.len();
    let mut scaled = DMatrix::zeros(dim, dim);
    for (col, &k) in order.iter().enumerate() {
        let w = (weights[col] / z).sqrt();
        scaled.column_mut(col).copy_from(&(vectors.column(k) * w));
    }
    let rho = &scaled * scaled.transpose();
    let degenerate = energies[1] - energies[0] < DEGENERACY_TOL * degeneracy_scale(&energies);
    Ok(DenseState {
        rho,
        energies,
        n: spec.n_spins(),
        ground_degenerate: degenerate,
    })
}

/// Ground or Gibbs state according to the spec's temperature tag.
pub fn thermal_state(spec: &ChainSpec) -> Result<DenseState> {
    match spec.temperature() {
        Temperature::Ground => exact_ground_state(spec),
        Temperature::Inverse(beta) => gibbs_state(spec, beta),
    }
}

/// Partial trace of an N-site density matrix down to sites (i, j), 1-based,
/// i < j. The result is 4×4 in the basis |a⟩_i ⊗ |b⟩_j, row index 2a + b.
pub fn reduced_state(rho: &DMatrix<f64>, n: usize, i: usize, j: usize) -> Result<DMatrix<f64>> {
    if i < 1 || j <= i || j > n {
        return Err(Error::SiteRange { i, j, n });
    }
    let dim = 1usize << n;
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::InvalidChain(format!(
            "density matrix is {}x{}, expected {dim}x{dim}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let (pi, pj) = (i - 1, j - 1);
    let mid_bits = pj - 1 - pi;
    let mut red = DMatrix::zeros(4, 4);
    for rest in 0..(1usize << (n - 2)) {
        let low = rest & ((1 << pi) - 1);
        let mid = (rest >> pi) & ((1 << mid_bits) - 1);
        let high = rest >> (pj - 1);
        let base = low | (mid << (pi + 1)) | (high << (pj + 1));
        for a in 0..2 {
            for b in 0..2 {
                let row = base | (a << pi) | (b << pj);
                for c in 0..2 {
                    for d in 0..2 {
                        let col = base | (c << pi) | (d << pj);
                        red[(2 * a + b, 2 * c + d)] += rho[(row, col)];
                    }
                }
            }
        }
    }
    Ok(red)
}

/// Quarter-scaled correlators (⟨σxσx⟩, ⟨σyσy⟩, ⟨σzσz⟩)/4 of a two-site state.
pub fn state_correlators(rho: &DMatrix<f64>) -> (f64, f64, f64) {
    let txx = 0.25 * (rho[(0, 3)] + rho[(1, 2)] + rho[(2, 1)] + rho[(3, 0)]);
    let tyy = 0.25 * (-rho[(0, 3)] + rho[(1, 2)] + rho[(2, 1)] - rho[(3, 0)]);
    let tzz = 0.25 * (rho[(0, 0)] - rho[(1, 1)] - rho[(2, 2)] + rho[(3, 3)]);
    (txx, tyy, tzz)
}

fn entropy_bits(eigs: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    for e in eigs {
        if e > 0.0 {
            s -= e * e.log2();
        }
    }
    s
}

fn eig2(m00: f64, m11: f64, off_sq: f64) -> (f64, f64) {
    let half_tr = 0.5 * (m00 + m11);
    let disc = (0.25 * (m00 - m11) * (m00 - m11) + off_sq).max(0.0).sqrt();
    (half_tr + disc, half_tr - disc)
}

/// Eigenvalues of a two-site (4×4 real symmetric) state, ascending.
pub fn state_eigenvalues(rho: &DMatrix<f64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(rho.clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Quantum mutual information S(A) + S(B) − S(AB) of a two-site state,
/// in bits, straight from density-matrix entropies.
pub fn mutual_information(rho: &DMatrix<f64>) -> f64 {
    let (a00, a01, a11) = (
        rho[(0, 0)] + rho[(1, 1)],
        rho[(0, 2)] + rho[(1, 3)],
        rho[(2, 2)] + rho[(3, 3)],
    );
    let (b00, b01, b11) = (
        rho[(0, 0)] + rho[(2, 2)],
        rho[(0, 1)] + rho[(2, 3)],
        rho[(1, 1)] + rho[(3, 3)],
    );
    let (ea1, ea2) = eig2(a00, a11, a01 * a01);
    let (eb1, eb2) = eig2(b00, b11, b01 * b01);
    let s_a = entropy_bits([ea1, ea2]);
    let s_b = entropy_bits([eb1, eb2]);
    let s_ab = entropy_bits(state_eigenvalues(rho));
    s_a + s_b - s_ab
}

/// Classical correlation extracted by a projective measurement along the
/// Bloch direction (cx, cy, cz) on the second qubit:
/// S(ρ_A) − Σ_k p_k S(ρ_A|k).
fn classical_for_direction(rho: &DMatrix<f64>, cx: f64, cy: f64, cz: f64) -> f64 {
    // Unnormalized conditional block M⁺_{ac} = Σ_{b,d} ρ_{(a,b),(c,d)} Π_{d,b}
    // with Π = (I + n·σ)/2; the "−" outcome is the B-marginal minus M⁺.
    let p00 = 0.5 * (1.0 + cz);
    let p11 = 0.5 * (1.0 - cz);
    let mut m = [[(0.0f64, 0.0f64); 2]; 2]; // (re, im)
    for a in 0..2 {
        for c in 0..2 {
            let re = rho[(2 * a, 2 * c)] * p00
                + rho[(2 * a + 1, 2 * c + 1)] * p11
                + 0.5 * cx * (rho[(2 * a, 2 * c + 1)] + rho[(2 * a + 1, 2 * c)]);
            let im = 0.5 * cy * (rho[(2 * a, 2 * c + 1)] - rho[(2 * a + 1, 2 * c)]);
            m[a][c] = (re, im);
        }
    }
    let tr_b = [
        [rho[(0, 0)] + rho[(1, 1)], rho[(0, 2)] + rho[(1, 3)]],
        [rho[(2, 0)] + rho[(3, 1)], rho[(2, 2)] + rho[(3, 3)]],
    ];
    let mut cond = 0.0;
    let blocks = [
        (m[0][0].0, m[1][1].0, m[0][1].0, m[0][1].1),
        (
            tr_b[0][0] - m[0][0].0,
            tr_b[1][1] - m[1][1].0,
            tr_b[0][1] - m[0][1].0,
            -m[0][1].1,
        ),
    ];
    for (d00, d11, off_re, off_im) in blocks {
        let p = d00 + d11;
        if p > 1e-14 {
            let (e1, e2) = eig2(d00, d11, off_re * off_re + off_im * off_im);
            cond += p * entropy_bits([e1 / p, e2 / p]);
        }
    }
    let (ea1, ea2) = eig2(
        tr_b[0][0],
        tr_b[1][1],
        0.25 * (tr_b[0][1] + tr_b[1][0]) * (tr_b[0][1] + tr_b[1][0]),
    );
    entropy_bits([ea1, ea2]) - cond
}

/// Classical correlation maximized over single-qubit projective measurements
/// on a (θ, φ) Bloch grid with local refinement.
pub fn brute_classical_correlation(rho: &DMatrix<f64>, n_polar: usize, n_azimuthal: usize) -> f64 {
    let n_polar = n_polar.max(100);
    let n_azimuthal = n_azimuthal.max(200);
    let mut best = f64::NEG_INFINITY;
    let mut best_dir = (0.0, 0.0);
    for it in 0..n_polar {
        let theta = std::f64::consts::PI * (it as f64 + 0.5) / n_polar as f64;
        for ip in 0..n_azimuthal {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / n_azimuthal as f64;
            let v = classical_for_direction(
                rho,
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            );
            if v > best {
                best = v;
                best_dir = (theta, phi);
            }
        }
    }
    // Local refinement: shrink an 11×11 window around the best direction.
    let (mut theta0, mut phi0) = best_dir;
    let mut dt = std::f64::consts::PI / n_polar as f64;
    let mut dp = 2.0 * std::f64::consts::PI / n_azimuthal as f64;
    for _ in 0..4 {
        for it in 0..11 {
            let theta = theta0 + dt * (it as f64 / 5.0 - 1.0);
            for ip in 0..11 {
                let phi = phi0 + dp * (ip as f64 / 5.0 - 1.0);
                let v = classical_for_direction(
                    rho,
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                );
                if v > best {
                    best = v;
                    theta0 = theta;
                    phi0 = phi;
                }
            }
        }
        dt /= 5.0;
        dp /= 5.0;
    }
    best.max(0.0)
}

/// Quantum discord of a two-site state by explicit minimization over
/// projective measurements: I − max C. The grid resolution is clamped to
/// at least 100×200 and locally refined.
pub fn brute_discord(rho: &DMatrix<f64>, n_polar: usize, n_azimuthal: usize) -> f64 {
    let mi = mutual_information(rho);
    let cc = brute_classical_correlation(rho, n_polar, n_azimuthal);
    (mi - cc).max(0.0)
}

/// Wootters concurrence from the spin-flip spectrum of √(√ρ ρ̃ √ρ).
///
/// Takes a real density matrix (every state this crate produces is real in
/// the computational basis), for which ρ* = ρ and the spin flip
/// ρ̃ = (σy⊗σy) ρ (σy⊗σy) stays real.
pub fn wootters_concurrence(rho: &DMatrix<f64>) -> f64 {
    let mut y = DMatrix::zeros(4, 4);
    y[(0, 3)] = -1.0;
    y[(1, 2)] = 1.0;
    y[(2, 1)] = 1.0;
    y[(3, 0)] = -1.0;
    let rho_tilde = &y * rho * y.clone();
    let eig = SymmetricEigen::new(rho.clone());
    let mut sqrt_rho = DMatrix::zeros(4, 4);
    for k in 0..4 {
        let v = eig.eigenvectors.column(k);
        sqrt_rho += eig.eigenvalues[k].max(0.0).sqrt() * &v * v.transpose();
    }
    let m = &sqrt_rho * rho_tilde * sqrt_rho;
    let m_sym = 0.5 * (&m + m.transpose());
    let mut lams: Vec<f64> = SymmetricEigen::new(m_sym)
        .eigenvalues
        .iter()
        .map(|e| e.max(0.0).sqrt())
        .collect();
    lams.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (lams[0] - lams[1] - lams[2] - lams[3]).max(0.0)
}

/// Whether a two-site state has a positive partial transpose (separability
/// for two qubits by the Peres-Horodecki criterion).
pub fn positive_partial_transpose(rho: &DMatrix<f64>) -> bool {
    // Transpose the second qubit: swap b <-> d in ρ_{(a,b),(c,d)}.
    let mut pt = DMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    pt[(2 * a + d, 2 * c + b)] = rho[(2 * a + b, 2 * c + d)];
                }
            }
        }
    }
    state_eigenvalues(&pt).iter().all(|&e| e > -1e-10)
}

/// Side-by-side comparison of the fermionic pipeline and the dense oracle
/// on one chain instance.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Max |T_pipeline − T_oracle| over pairs and components.
    pub correlator_dev: f64,
    /// Max deviation of sorted Bell eigenvalues.
    pub bell_dev: f64,
    pub mutual_info_dev: f64,
    /// Closed-form classical correlation vs measurement-grid maximum.
    pub classical_dev: f64,
    /// Closed-form discord vs measurement-grid discord.
    pub discord_dev: f64,
    /// Closed-form concurrence vs Wootters spin-flip value.
    pub concurrence_dev: f64,
    /// min_k Δ_k vs E_1 − E_0 of the dense spectrum.
    pub gap_dev: f64,
    /// End-pair shortcut vs general minor route, pipeline-internal.
    pub end_route_dev: f64,
}

impl EquivalenceReport {
    /// Pass check: exact quantities within `tol_exact`, measurement-grid
    /// quantities (classical, discord) within `tol_grid`.
    pub fn passed(&self, tol_exact: f64, tol_grid: f64) -> bool {
        self.correlator_dev <= tol_exact
            && self.bell_dev <= tol_exact
            && self.mutual_info_dev <= tol_exact
            && self.concurrence_dev <= tol_exact
            && self.gap_dev <= tol_exact
            && self.end_route_dev <= tol_exact
            && self.classical_dev <= tol_grid
            && self.discord_dev <= tol_grid
    }
}

impl std::fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "oracle equivalence, N = {}, pairs {:?}", self.n, self.pairs)?;
        writeln!(f, "  correlators   {:.3e}", self.correlator_dev)?;
        writeln!(f, "  bell eigs     {:.3e}", self.bell_dev)?;
        writeln!(f, "  mutual info   {:.3e}", self.mutual_info_dev)?;
        writeln!(f, "  classical     {:.3e} (grid)", self.classical_dev)?;
        writeln!(f, "  discord       {:.3e} (grid)", self.discord_dev)?;
        writeln!(f, "  concurrence   {:.3e}", self.concurrence_dev)?;
        writeln!(f, "  energy gap    {:.3e}", self.gap_dev)?;
        write!(f, "  end-pair route {:.3e}", self.end_route_dev)
    }
}

/// Run the full pipeline-vs-oracle comparison for one spec: correlators and
/// measures on the end pair plus a few interior pairs, and the energy gap.
pub fn equivalence_check(spec: &ChainSpec) -> Result<EquivalenceReport> {
    let n = spec.n_spins();
    let qf = crate::chain::build_quadratic_form(spec);
    let spectrum = crate::fermion::diagonalize(&qf)?;
    let g = crate::fermion::correlation_matrix(&spectrum, spec.temperature());
    let gap = crate::fermion::energy_gap(&spectrum);

    let dense = thermal_state(spec)?;

    let mut pairs = vec![(1, n), (1, 2), (1, n / 2 + 1), (2, n - 1)];
    pairs.sort();
    pairs.dedup();
    pairs.retain(|&(i, j)| i < j && j <= n);

    let mut report = EquivalenceReport {
        n,
        pairs: pairs.clone(),
        correlator_dev: 0.0,
        bell_dev: 0.0,
        mutual_info_dev: 0.0,
        classical_dev: 0.0,
        discord_dev: 0.0,
        concurrence_dev: 0.0,
        gap_dev: (gap - dense.energy_gap()).abs(),
        end_route_dev: 0.0,
    };

    for &(i, j) in &pairs {
        let t = crate::correlators::pair_correlators(&g, i, j)?;
        let red = reduced_state(dense.rho(), n, i, j)?;
        let (oxx, oyy, ozz) = state_correlators(&red);
        report.correlator_dev = report
            .correlator_dev
            .max((t.txx - oxx).abs())
            .max((t.tyy - oyy).abs())
            .max((t.tzz - ozz).abs());

        let bell = crate::correlators::bell_state(&t)?;
        let mut pipeline_eigs = [bell.e1, bell.e2, bell.e3, bell.e4];
        pipeline_eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let oracle_eigs = state_eigenvalues(&red);
        for (p, o) in pipeline_eigs.iter().zip(&oracle_eigs) {
            report.bell_dev = report.bell_dev.max((p - o).abs());
        }

        let m = crate::qinfo::measures(&t)?;
        let mi = mutual_information(&red);
        let cc = brute_classical_correlation(&red, 100, 200);
        report.mutual_info_dev = report.mutual_info_dev.max((m.mutual_info - mi).abs());
        report.classical_dev = report.classical_dev.max((m.classical - cc).abs());
        report.discord_dev = report.discord_dev.max((m.discord - (mi - cc)).abs());
        report.concurrence_dev = report
            .concurrence_dev
            .max((m.concurrence - wootters_concurrence(&red)).abs());
    }

    let end = crate::correlators::end_to_end_correlators(&g, &qf)?;
    let minor = crate::correlators::pair_correlators(&g, 1, n)?;
    report.end_route_dev = (end.txx - minor.txx)
        .abs()
        .max((end.tyy - minor.tyy).abs())
        .max((end.tzz - minor.tzz).abs());

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Boundary;

    fn singlet() -> DMatrix<f64> {
        let mut rho = DMatrix::zeros(4, 4);
        rho[(1, 1)] = 0.5;
        rho[(2, 2)] = 0.5;
        rho[(1, 2)] = -0.5;
        rho[(2, 1)] = -0.5;
        rho
    }

    #[test]
    fn n2_ground_state_is_singlet() {
        let spec = ChainSpec::uniform(2, 1.0, 1.0, Boundary::Open).unwrap();
        let state = exact_ground_state(&spec).unwrap();
        assert!((state.energies()[0] - (-0.5)).abs() < 1e-12);
        assert!(!state.ground_degenerate());
        let red = reduced_state(state.rho(), 2, 1, 2).unwrap();
        let (txx, tyy, tzz) = state_correlators(&red);
        assert!((txx + 0.25).abs() < 1e-12);
        assert!((tyy + 0.25).abs() < 1e-12);
        assert!((tzz + 0.25).abs() < 1e-12);
        assert!((wootters_concurrence(&red) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dense_state_invariants() {
        let spec = ChainSpec::weak_end(6, 0.3, 0.6, 0.2).unwrap();
        for state in [
            exact_ground_state(&spec).unwrap(),
            gibbs_state(&spec, 4.0).unwrap(),
        ] {
            assert!((state.rho().trace() - 1.0).abs() < 1e-10);
            let asym = (state.rho() - state.rho().transpose()).abs().max();
            assert!(asym < 1e-12);
            let min_eig = state_min_eig(state.rho());
            assert!(min_eig > -1e-10, "rho not PSD: min eig {min_eig}");
        }
    }

    fn state_min_eig(rho: &DMatrix<f64>) -> f64 {
        SymmetricEigen::new(rho.clone())
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    #[test]
    fn gibbs_low_temperature_approaches_ground_projector() {
        let spec = ChainSpec::weak_end(4, 0.4, 0.7, 0.0).unwrap();
        let ground = exact_ground_state(&spec).unwrap();
        let gibbs = gibbs_state(&spec, 2000.0).unwrap();
        let dev = (ground.rho() - gibbs.rho()).abs().max();
        assert!(dev < 1e-6, "beta = 2000 Gibbs state deviates by {dev}");
    }

    #[test]
    fn product_state_reduces_to_product() {
        // ρ = ρ_1 ⊗ ρ_2 ⊗ ρ_3 with distinct diagonal qubit states.
        let q = |p: f64| {
            let mut m = DMatrix::zeros(2, 2);
            m[(0, 0)] = p;
            m[(1, 1)] = 1.0 - p;
            m
        };
        // Site 1 is bit 0 (fastest index), so the full-state Kronecker order
        // is q3 ⊗ q2 ⊗ q1; the reduced basis puts site i first.
        let rho = q(0.9).kronecker(&q(0.7)).kronecker(&q(0.2));
        let red = reduced_state(&rho, 3, 1, 3).unwrap();
        let expect = q(0.2).kronecker(&q(0.9));
        assert!((red - expect).abs().max() < 1e-14);
    }

    #[test]
    fn singlet_measures() {
        let rho = singlet();
        assert!((mutual_information(&rho) - 2.0).abs() < 1e-10);
        let cc = brute_classical_correlation(&rho, 100, 200);
        assert!((cc - 1.0).abs() < 1e-6, "singlet classical = {cc}");
        let d = brute_discord(&rho, 100, 200);
        assert!((d - 1.0).abs() < 1e-6, "singlet discord = {d}");
        assert!((wootters_concurrence(&rho) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_measures() {
        let rho = DMatrix::identity(4, 4) * 0.25;
        assert!(mutual_information(&rho).abs() < 1e-12);
        assert!(brute_discord(&rho, 100, 200).abs() < 1e-9);
        assert_eq!(wootters_concurrence(&rho), 0.0);
    }

    #[test]
    fn separable_diagonal_state_has_zero_concurrence() {
        let mut rho = DMatrix::zeros(4, 4);
        rho[(0, 0)] = 0.4;
        rho[(1, 1)] = 0.3;
        rho[(2, 2)] = 0.2;
        rho[(3, 3)] = 0.1;
        assert_eq!(wootters_concurrence(&rho), 0.0);
        assert!(positive_partial_transpose(&rho));
    }

    #[test]
    fn oracle_too_large_is_rejected() {
        let spec = ChainSpec::uniform(13, 1.0, 1.0, Boundary::Open).unwrap();
        assert!(matches!(
            dense_hamiltonian(&spec),
            Err(Error::OracleTooLarge { n: 13, .. })
        ));
    }
}
