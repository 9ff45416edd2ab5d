//! Parameter sweeps and detection of the freezing phenomena.
//!
//! A sweep evaluates the full pipeline (chain → fermion solver →
//! correlators → measures, plus the energy gap) for the end pair (1, N) at
//! every point of a λ₁ grid; all other parameters are fixed by a
//! [`SweepContext`]. Grid points are independent and evaluated in
//! parallel; results are ordered by grid index regardless of scheduling,
//! so identical configs produce identical sweeps at any parallelism.
//!
//! On top of sweeps sit the detectors:
//!
//! * [`detect_freezing`] — freezing length l_f (the largest λ₁ up to which
//!   the discord stays within ε of its value at the smallest λ₁), the
//!   frozen discord D_f (plateau mean) and the entanglement sudden-death
//!   point λ₁^D (first grid λ₁ with concurrence ≤ ε_E).
//! * [`gap_freezing`] — the complementary plateau of the energy gap,
//!   anchored at the largest λ₁.
//! * [`anisotropy_scan`] — the order parameter λ₂ − l_f as a function of
//!   bulk anisotropy γ and its transition point γ_c.
//! * [`thermal_scan`] — the ratio l_f^β / l_f over a temperature grid and
//!   the critical temperature T_c where freezing disappears.

use rayon::prelude::*;

use crate::chain::{build_quadratic_form, ChainSpec, Temperature};
use crate::correlators::{end_to_end_correlators, TwoSiteCorrelators};
use crate::fermion::{correlation_matrix, diagonalize, energy_gap};
use crate::qinfo::{measures, CorrelationMeasures};
use crate::{Error, Result};

/// Ascending, uniformly spaced grid `start, start + step, ..., <= stop`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("grid bounds must be finite".into()));
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if stop < start {
            return Err(Error::InvalidGrid(format!("stop {stop} below start {start}")));
        }
        Ok(Grid { start, stop, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Everything a λ₁ sweep holds fixed: size, the y end coupling, bulk
/// anisotropy and the temperature tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepContext {
    pub n: usize,
    pub lambda2: f64,
    pub gamma: f64,
    pub temperature: Temperature,
}

impl SweepContext {
    pub fn spec_at(&self, lambda1: f64) -> Result<ChainSpec> {
        Ok(ChainSpec::weak_end(self.n, lambda1, self.lambda2, self.gamma)?
            .with_temperature(self.temperature))
    }
}

/// One evaluated grid point.
#[derive(Clone, Copy, Debug)]
pub struct SweepPoint {
    pub lambda1: f64,
    pub correlators: TwoSiteCorrelators,
    pub measures: CorrelationMeasures,
    pub gap: f64,
}

/// A λ₁ sweep: the fixed context plus one record per grid point.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub context: SweepContext,
    pub points: Vec<SweepPoint>,
}

/// End-pair correlators, measures and gap for a single chain.
pub fn evaluate_end_pair(spec: &ChainSpec) -> Result<(TwoSiteCorrelators, CorrelationMeasures, f64)> {
    let qf = build_quadratic_form(spec);
    let spectrum = diagonalize(&qf)?;
    let g = correlation_matrix(&spectrum, spec.temperature());
    let t = end_to_end_correlators(&g, &qf)?;
    let m = measures(&t)?;
    Ok((t, m, energy_gap(&spectrum)))
}

fn validate_lambda1_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("lambda1 grid is empty".into()));
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidGrid(format!(
                "lambda1 grid not strictly ascending at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    if first <= 0.0 || last > 1.0 + 1e-12 {
        return Err(Error::InvalidGrid(format!(
            "lambda1 grid must lie in (0, 1], spans [{first}, {last}]"
        )));
    }
    Ok(())
}

/// Evaluate the pipeline at every grid point. Points are independent; the
/// first failure is reported with its λ₁.
pub fn sweep(context: &SweepContext, lambda1_grid: &[f64]) -> Result<SweepResult> {
    validate_lambda1_grid(lambda1_grid)?;
    let evaluated: Vec<(f64, Result<(TwoSiteCorrelators, CorrelationMeasures, f64)>)> =
        lambda1_grid
            .par_iter()
            .map(|&lambda1| {
                let point = context
                    .spec_at(lambda1)
                    .and_then(|spec| evaluate_end_pair(&spec));
                (lambda1, point)
            })
            .collect();
    let mut points = Vec::with_capacity(evaluated.len());
    for (lambda1, outcome) in evaluated {
        match outcome {
            Ok((correlators, measures, gap)) => points.push(SweepPoint {
                lambda1,
                correlators,
                measures,
                gap,
            }),
            Err(source) => {
                return Err(Error::SweepPoint {
                    lambda1,
                    source: Box::new(source),
                })
            }
        }
    }
    Ok(SweepResult {
        context: *context,
        points,
    })
}

/// Thresholds for plateau and sudden-death detection.
#[derive(Clone, Copy, Debug)]
pub struct FreezeDetection {
    /// Discord plateau tolerance ε, in bits.
    pub plateau_tol: f64,
    /// Concurrence threshold ε_E below which entanglement counts as dead.
    pub esd_tol: f64,
    /// Largest admissible grid step; coarser sweeps are refused rather
    /// than producing an unreliable freezing length.
    pub max_grid_step: f64,
}

impl Default for FreezeDetection {
    fn default() -> Self {
        FreezeDetection {
            plateau_tol: 1e-3,
            esd_tol: 1e-6,
            max_grid_step: 0.005,
        }
    }
}

/// Freezing length, frozen discord and the ESD point of one sweep.
///
/// `l_f` is grid-resolution limited; read it as l_f ± `grid_step`.
#[derive(Clone, Copy, Debug)]
pub struct FreezingReport {
    pub l_f: f64,
    pub d_frozen: f64,
    pub esd_point: Option<f64>,
    pub plateau_tol: f64,
    /// λ₂ − l_f, the anisotropy-transition order parameter.
    pub order_parameter: f64,
    /// Largest consecutive grid step, the resolution of `l_f`.
    pub grid_step: f64,
}

/// Detect the discord plateau of a sweep.
pub fn detect_freezing(sweep: &SweepResult, detection: &FreezeDetection) -> Result<FreezingReport> {
    let pts = &sweep.points;
    if pts.is_empty() {
        return Err(Error::InvalidGrid("cannot detect freezing on an empty sweep".into()));
    }
    let mut grid_step = 0.0f64;
    for w in pts.windows(2) {
        grid_step = grid_step.max(w[1].lambda1 - w[0].lambda1);
    }
    if grid_step > detection.max_grid_step * (1.0 + 1e-9) {
        return Err(Error::GridTooCoarse {
            step: grid_step,
            max_step: detection.max_grid_step,
        });
    }

    let d0 = pts[0].measures.discord;
    let mut plateau_end = 0;
    for (idx, p) in pts.iter().enumerate() {
        if (p.measures.discord - d0).abs() <= detection.plateau_tol {
            plateau_end = idx;
        } else {
            break;
        }
    }
    let plateau = &pts[..=plateau_end];
    let d_frozen = plateau.iter().map(|p| p.measures.discord).sum::<f64>() / plateau.len() as f64;
    let l_f = pts[plateau_end].lambda1;
    let esd_point = pts
        .iter()
        .find(|p| p.measures.concurrence <= detection.esd_tol)
        .map(|p| p.lambda1);
    Ok(FreezingReport {
        l_f,
        d_frozen,
        esd_point,
        plateau_tol: detection.plateau_tol,
        order_parameter: sweep.context.lambda2 - l_f,
        grid_step,
    })
}

/// The λ₁ range over which the energy gap is frozen, anchored at the top
/// of the grid (for the XX bulk the gap freezes for λ₁ ≥ λ₂,
/// complementary to the discord plateau).
#[derive(Clone, Copy, Debug)]
pub struct GapFreezeReport {
    /// Smallest grid λ₁ from which the gap stays constant to the end.
    pub frozen_from: f64,
    /// Mean gap over the frozen range.
    pub frozen_value: f64,
    pub tol: f64,
}

pub fn gap_freezing(sweep: &SweepResult, tol: f64) -> Result<GapFreezeReport> {
    let pts = &sweep.points;
    if pts.is_empty() {
        return Err(Error::InvalidGrid("cannot detect gap freezing on an empty sweep".into()));
    }
    let last = pts[pts.len() - 1].gap;
    let mut start = pts.len() - 1;
    for idx in (0..pts.len()).rev() {
        if (pts[idx].gap - last).abs() <= tol {
            start = idx;
        } else {
            break;
        }
    }
    let frozen = &pts[start..];
    let frozen_value = frozen.iter().map(|p| p.gap).sum::<f64>() / frozen.len() as f64;
    Ok(GapFreezeReport {
        frozen_from: pts[start].lambda1,
        frozen_value,
        tol,
    })
}

/// Order parameter λ₂ − l_f and frozen discord across an anisotropy grid.
#[derive(Clone, Debug)]
pub struct AnisotropyReport {
    pub gammas: Vec<f64>,
    pub order_parameter: Vec<f64>,
    pub d_frozen: Vec<f64>,
    /// Location of the steepest decrease of the order parameter on the
    /// γ ≥ 0 side; the transition point γ_c^N.
    pub gamma_c: Option<f64>,
    /// Optional diagnostic: first sign change of the discrete curvature of
    /// D_f(γ) on the γ ≥ 0 side.
    pub curvature_gamma_c: Option<f64>,
}

/// Run one freezing detection per anisotropy value.
pub fn anisotropy_scan(
    n: usize,
    lambda2: f64,
    gammas: &[f64],
    lambda1_grid: &[f64],
    detection: &FreezeDetection,
    temperature: Temperature,
) -> Result<AnisotropyReport> {
    if gammas.is_empty() {
        return Err(Error::InvalidGrid("gamma grid is empty".into()));
    }
    let mut order_parameter = Vec::with_capacity(gammas.len());
    let mut d_frozen = Vec::with_capacity(gammas.len());
    for &gamma in gammas {
        let ctx = SweepContext {
            n,
            lambda2,
            gamma,
            temperature,
        };
        let report = detect_freezing(&sweep(&ctx, lambda1_grid)?, detection)?;
        order_parameter.push(report.order_parameter);
        d_frozen.push(report.d_frozen);
    }
    // l_f naturally jitters by one lambda1 grid step; require a drop well
    // above that before calling it the transition.
    let min_drop = 4.0 * max_lambda_step(lambda1_grid);
    let gamma_c = steepest_drop(gammas, &order_parameter, min_drop);
    let curvature_gamma_c = curvature_flip(gammas, &d_frozen);
    Ok(AnisotropyReport {
        gammas: gammas.to_vec(),
        order_parameter,
        d_frozen,
        gamma_c,
        curvature_gamma_c,
    })
}

fn max_lambda_step(grid: &[f64]) -> f64 {
    grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Midpoint of the grid interval with the most negative discrete
/// derivative, restricted to γ ≥ 0 ("sharply decreases beyond γ_c").
/// Intervals dropping less than `min_drop` do not qualify.
fn steepest_drop(gammas: &[f64], values: &[f64], min_drop: f64) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for i in 0..gammas.len().saturating_sub(1) {
        if gammas[i] < -1e-12 {
            continue;
        }
        let dg = gammas[i + 1] - gammas[i];
        if dg <= 0.0 || values[i] - values[i + 1] < min_drop {
            continue;
        }
        let deriv = (values[i + 1] - values[i]) / dg;
        if best.is_none_or(|(b, _)| deriv < b) {
            best = Some((deriv, 0.5 * (gammas[i] + gammas[i + 1])));
        }
    }
    best.map(|(_, loc)| loc)
}

/// First sign change of the second difference on the γ ≥ 0 side.
fn curvature_flip(gammas: &[f64], values: &[f64]) -> Option<f64> {
    let idx: Vec<usize> = (0..gammas.len()).filter(|&i| gammas[i] >= -1e-12).collect();
    let second = |k: usize| values[idx[k + 1]] - 2.0 * values[idx[k]] + values[idx[k - 1]];
    for k in 1..idx.len().saturating_sub(2) {
        if second(k) * second(k + 1) < 0.0 {
            return Some(gammas[idx[k + 1]]);
        }
    }
    None
}

/// How close a thermal discord value must stay to the ground-state frozen
/// value D_f for its grid point to still count as frozen.
///
/// The absolute mode reuses the plateau ε of the ground-state runs. The
/// relative mode scales the tolerance with D_f itself, which makes the
/// critical temperature track the frozen energy gap across chain sizes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThermalTolerance {
    Absolute(f64),
    RelativeToFrozen(f64),
}

impl ThermalTolerance {
    fn bits(self, d_frozen: f64) -> f64 {
        match self {
            ThermalTolerance::Absolute(eps) => eps,
            ThermalTolerance::RelativeToFrozen(r) => r * d_frozen,
        }
    }
}

/// Parameters of a thermal scan.
#[derive(Clone, Copy, Debug)]
pub struct ThermalScanConfig {
    /// Plateau detection for the ground-state reference sweep.
    pub detection: FreezeDetection,
    /// Frozen-value tolerance for the thermal sweeps.
    pub tolerance: ThermalTolerance,
    /// Freezing counts as intact while l_f^β / l_f ≥ ρ_min.
    pub rho_min: f64,
}

impl Default for ThermalScanConfig {
    fn default() -> Self {
        let detection = FreezeDetection::default();
        ThermalScanConfig {
            detection,
            tolerance: ThermalTolerance::Absolute(detection.plateau_tol),
            rho_min: 0.99,
        }
    }
}

/// Thermal response of the freezing length for one chain size.
#[derive(Clone, Debug)]
pub struct ThermalReport {
    pub temperatures: Vec<f64>,
    /// l_f^β / l_f per temperature.
    pub ratios: Vec<f64>,
    /// Largest grid temperature with ratio ≥ ρ_min, if any.
    pub t_c: Option<f64>,
    pub l_f_ground: f64,
    pub d_frozen_ground: f64,
    /// Whether the ratio was nonincreasing across the whole grid; violations
    /// are flagged here instead of being assumed away.
    pub monotone: bool,
    pub rho_min: f64,
    pub tolerance: ThermalTolerance,
}

/// Sweep the thermal freezing length over a temperature grid.
///
/// The ground sweep fixes l_f and the frozen value D_f. At each
/// temperature, l_f^β is the largest grid λ₁ whose discord still equals
/// D_f within the configured tolerance, or zero when no grid point does.
/// In the β → ∞ limit this recovers l_f. The first grid point cannot
/// anchor the thermal plateau the way it does at T = 0: its soft mode
/// (energy ~ λ₁²/2) thermalizes at temperatures orders of magnitude below
/// the scale at which freezing actually disappears, so an anchored rule
/// would report l_f^β ≈ 0 at any temperature of interest.
///
/// The single-particle spectrum per λ₁ is temperature independent, so each
/// grid point is solved once and reweighted per temperature.
pub fn thermal_scan(
    base: &SweepContext,
    lambda1_grid: &[f64],
    temperatures: &[f64],
    config: &ThermalScanConfig,
) -> Result<ThermalReport> {
    validate_lambda1_grid(lambda1_grid)?;
    if temperatures.is_empty() {
        return Err(Error::InvalidGrid("temperature grid is empty".into()));
    }
    for w in temperatures.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidGrid("temperature grid not strictly ascending".into()));
        }
    }
    let betas: Vec<Temperature> = temperatures
        .iter()
        .map(|&t| Temperature::from_temperature(t))
        .collect::<Result<_>>()?;

    struct Column {
        lambda1: f64,
        ground: (TwoSiteCorrelators, CorrelationMeasures, f64),
        thermal: Vec<(TwoSiteCorrelators, CorrelationMeasures, f64)>,
    }

    let columns: Vec<Result<Column>> = lambda1_grid
        .par_iter()
        .map(|&lambda1| {
            let spec = ChainSpec::weak_end(base.n, lambda1, base.lambda2, base.gamma)?;
            let qf = build_quadratic_form(&spec);
            let spectrum = diagonalize(&qf)?;
            let gap = energy_gap(&spectrum);
            let eval = |temperature: Temperature| -> Result<_> {
                let g = correlation_matrix(&spectrum, temperature);
                let t = end_to_end_correlators(&g, &qf)?;
                Ok((t, measures(&t)?, gap))
            };
            let ground = eval(Temperature::Ground)?;
            let thermal = betas.iter().map(|&b| eval(b)).collect::<Result<Vec<_>>>()?;
            Ok(Column {
                lambda1,
                ground,
                thermal,
            })
        })
        .collect();

    let mut cols = Vec::with_capacity(columns.len());
    for (outcome, &lambda1) in columns.into_iter().zip(lambda1_grid) {
        cols.push(outcome.map_err(|source| Error::SweepPoint {
            lambda1,
            source: Box::new(source),
        })?);
    }

    let assemble = |temperature: Temperature, pick: &dyn Fn(&Column) -> (TwoSiteCorrelators, CorrelationMeasures, f64)| {
        SweepResult {
            context: SweepContext {
                temperature,
                ..*base
            },
            points: cols
                .iter()
                .map(|c| {
                    let (correlators, measures, gap) = pick(c);
                    SweepPoint {
                        lambda1: c.lambda1,
                        correlators,
                        measures,
                        gap,
                    }
                })
                .collect(),
        }
    };

    let ground_sweep = assemble(Temperature::Ground, &|c| c.ground);
    let ground = detect_freezing(&ground_sweep, &config.detection)?;
    let eps = config.tolerance.bits(ground.d_frozen);

    let mut ratios = Vec::with_capacity(temperatures.len());
    for (ti, &beta) in betas.iter().enumerate() {
        let sweep_t = assemble(beta, &|c| c.thermal[ti]);
        let l_f_beta = sweep_t
            .points
            .iter()
            .rev()
            .find(|p| (p.measures.discord - ground.d_frozen).abs() <= eps)
            .map_or(0.0, |p| p.lambda1);
        ratios.push(l_f_beta / ground.l_f);
    }

    let t_c = temperatures
        .iter()
        .zip(&ratios)
        .filter(|&(_, &r)| r >= config.rho_min)
        .map(|(&t, _)| t)
        .next_back();
    let monotone = ratios.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    Ok(ThermalReport {
        temperatures: temperatures.to_vec(),
        ratios,
        t_c,
        l_f_ground: ground.l_f,
        d_frozen_ground: ground.d_frozen,
        monotone,
        rho_min: config.rho_min,
        tolerance: config.tolerance,
    })
}

/// Least-squares line through (x, y) pairs: (slope, intercept).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
