//! The six dataset-producing subcommands.
//!
//! Every command resolves its parameters as flag > config file > default,
//! records the effective values in the dataset header, and evaluates grid
//! points in deterministic order (parallelism never changes the bytes).

use std::str::FromStr;

use rayon::prelude::*;
use serde_json::Value;

use xychain::{
    anisotropy_scan, detect_freezing, evaluate_end_pair, gap_freezing, linear_fit, oracle, sweep,
    thermal_scan, ChainSpec, FreezeDetection, SweepContext, Temperature, ThermalScanConfig,
    ThermalTolerance,
};

use crate::config::{grid_values, parse_list, FileConfig};
use crate::output::{int, num, opt_num, text, Dataset};
use crate::{
    AnisotropyArgs, CliError, CliResult, GapArgs, OracleCheckArgs, SurfaceArgs, SweepArgs,
    ThermalArgs,
};

const DEFAULT_LAMBDA1_GRID: &str = "0.005:1.0:0.005";
const DEFAULT_GAP_TOL: f64 = 1e-8;

fn resolve<T: FromStr + Copy>(
    flag: Option<T>,
    file: &FileConfig,
    key: &str,
    default: T,
) -> CliResult<T> {
    Ok(flag.or(file.get(key)?).unwrap_or(default))
}

fn resolve_string(flag: &Option<String>, file: &FileConfig, key: &str, default: &str) -> String {
    flag.clone()
        .or_else(|| file.get_string(key))
        .unwrap_or_else(|| default.to_string())
}

/// Ground state unless exactly one of --beta / --temperature is given.
fn resolve_state(
    beta: Option<f64>,
    temperature: Option<f64>,
    file: &FileConfig,
) -> CliResult<(Temperature, String)> {
    let beta = beta.or(file.get("beta")?);
    let temperature = temperature.or(file.get("temperature")?);
    match (beta, temperature) {
        (Some(_), Some(_)) => Err(CliError::Validation(
            "give either --beta or --temperature, not both".into(),
        )),
        (Some(b), None) => {
            if !(b.is_finite() && b > 0.0) {
                return Err(CliError::Validation(format!(
                    "beta must be finite and positive, got {b}"
                )));
            }
            Ok((Temperature::Inverse(b), format!("beta={b}")))
        }
        (None, Some(t)) => {
            let tag = Temperature::from_temperature(t)?;
            Ok((tag, format!("temperature={t}")))
        }
        (None, None) => Ok((Temperature::Ground, "ground".to_string())),
    }
}

fn check_coupling_grid(values: &[f64], what: &str) -> CliResult<()> {
    let first = values[0];
    let last = values[values.len() - 1];
    if first <= 0.0 || last > 1.0 + 1e-12 {
        return Err(CliError::Validation(format!(
            "{what} must lie in (0, 1], spans [{first}, {last}]"
        )));
    }
    Ok(())
}

fn scope_lambda2(lambda2: f64) -> String {
    format!("lambda2={lambda2}")
}

pub fn cmd_sweep(args: &SweepArgs, file: &FileConfig) -> CliResult<Dataset> {
    let n = resolve(args.n, file, "n", 20)?;
    let lambda2_list: Vec<f64> = parse_list(
        &resolve_string(&args.lambda2, file, "lambda2", "0.2"),
        "lambda2",
    )?;
    let grid_raw = resolve_string(&args.lambda1, file, "lambda1", DEFAULT_LAMBDA1_GRID);
    let grid = grid_values(&grid_raw, "lambda1")?;
    let gamma = resolve(args.gamma, file, "gamma", 0.0)?;
    let (state, state_label) = resolve_state(args.beta, args.temperature, file)?;
    let eps = resolve(args.eps, file, "eps", 1e-3)?;
    let eps_esd = resolve(args.eps_esd, file, "eps_esd", 1e-6)?;
    let verify_oracle = args.verify_oracle || file.get("verify_oracle")?.unwrap_or(false);

    let detection = FreezeDetection {
        plateau_tol: eps,
        esd_tol: eps_esd,
        ..FreezeDetection::default()
    };

    let mut ds = Dataset::new(
        "sweep",
        vec![
            "lambda2",
            "lambda1",
            "txx",
            "tyy",
            "tzz",
            "mutual_info",
            "classical",
            "discord",
            "concurrence",
            "gap",
        ],
    );
    ds.config("n", n);
    ds.config(
        "lambda2",
        lambda2_list
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    ds.config("lambda1", &grid_raw);
    ds.config("gamma", gamma);
    ds.config("state", &state_label);
    ds.config("eps", eps);
    ds.config("eps_esd", eps_esd);

    for &lambda2 in &lambda2_list {
        let ctx = SweepContext {
            n,
            lambda2,
            gamma,
            temperature: state,
        };
        let result = sweep(&ctx, &grid)?;
        for p in &result.points {
            ds.point(vec![
                num(lambda2),
                num(p.lambda1),
                num(p.correlators.txx),
                num(p.correlators.tyy),
                num(p.correlators.tzz),
                num(p.measures.mutual_info),
                num(p.measures.classical),
                num(p.measures.discord),
                num(p.measures.concurrence),
                num(p.gap),
            ]);
        }
        let scope = scope_lambda2(lambda2);
        let freeze = detect_freezing(&result, &detection)?;
        ds.summary(&scope, "l_f", num(freeze.l_f));
        ds.summary(&scope, "d_frozen", num(freeze.d_frozen));
        ds.summary(&scope, "esd_lambda1", opt_num(freeze.esd_point));
        ds.summary(&scope, "order_parameter", num(freeze.order_parameter));
        let gap = gap_freezing(&result, DEFAULT_GAP_TOL)?;
        ds.summary(&scope, "gap_frozen_from", num(gap.frozen_from));
        ds.summary(&scope, "gap_frozen_value", num(gap.frozen_value));

        if verify_oracle {
            let picks = [0, result.points.len() / 2, result.points.len() - 1];
            for &idx in &picks {
                let lambda1 = result.points[idx].lambda1;
                let spec = ctx.spec_at(lambda1)?;
                let report = oracle::equivalence_check(&spec)?;
                let exact = report
                    .correlator_dev
                    .max(report.bell_dev)
                    .max(report.mutual_info_dev)
                    .max(report.concurrence_dev)
                    .max(report.gap_dev)
                    .max(report.end_route_dev);
                let grid_dev = report.classical_dev.max(report.discord_dev);
                let scope = format!("lambda2={lambda2};lambda1={lambda1}");
                ds.summary(&scope, "oracle_exact_dev", num(exact));
                ds.summary(&scope, "oracle_grid_dev", num(grid_dev));
            }
        }
    }
    Ok(ds)
}

pub fn cmd_surface(args: &SurfaceArgs, file: &FileConfig) -> CliResult<Dataset> {
    let n = resolve(args.n, file, "n", 20)?;
    let l1_raw = resolve_string(&args.lambda1, file, "lambda1", DEFAULT_LAMBDA1_GRID);
    let l2_raw = resolve_string(&args.lambda2, file, "lambda2", DEFAULT_LAMBDA1_GRID);
    let l1 = grid_values(&l1_raw, "lambda1")?;
    let l2 = grid_values(&l2_raw, "lambda2")?;
    check_coupling_grid(&l1, "lambda1")?;
    check_coupling_grid(&l2, "lambda2")?;
    let gamma = resolve(args.gamma, file, "gamma", 0.0)?;
    let (state, state_label) = resolve_state(args.beta, args.temperature, file)?;

    let coords: Vec<(f64, f64)> = l2
        .iter()
        .flat_map(|&b| l1.iter().map(move |&a| (a, b)))
        .collect();
    let rows: Vec<Result<(f64, f64, f64), xychain::Error>> = coords
        .par_iter()
        .map(|&(lambda1, lambda2)| {
            let spec =
                ChainSpec::weak_end(n, lambda1, lambda2, gamma)?.with_temperature(state);
            let (_, m, gap) = evaluate_end_pair(&spec)?;
            Ok((m.discord, m.concurrence, gap))
        })
        .collect();

    let mut ds = Dataset::new(
        "surface",
        vec!["lambda1", "lambda2", "discord", "concurrence", "gap"],
    );
    ds.config("n", n);
    ds.config("lambda1", &l1_raw);
    ds.config("lambda2", &l2_raw);
    ds.config("gamma", gamma);
    ds.config("state", &state_label);

    for (&(lambda1, lambda2), row) in coords.iter().zip(rows) {
        let (discord, concurrence, gap) = row.map_err(|e| {
            CliError::Runtime(format!(
                "surface point lambda1={lambda1}, lambda2={lambda2}: {e}"
            ))
        })?;
        ds.point(vec![
            num(lambda1),
            num(lambda2),
            num(discord),
            num(concurrence),
            num(gap),
        ]);
    }
    Ok(ds)
}

pub fn cmd_gap(args: &GapArgs, file: &FileConfig) -> CliResult<Dataset> {
    let n_list: Vec<usize> = parse_list(&resolve_string(&args.n, file, "n", "20,30"), "n")?;
    let lambda2_list: Vec<f64> = parse_list(
        &resolve_string(&args.lambda2, file, "lambda2", "0.2,0.4,0.6,0.8"),
        "lambda2",
    )?;
    let grid_raw = resolve_string(&args.lambda1, file, "lambda1", DEFAULT_LAMBDA1_GRID);
    let grid = grid_values(&grid_raw, "lambda1")?;
    let gamma = resolve(args.gamma, file, "gamma", 0.0)?;
    let gap_tol = resolve(args.gap_tol, file, "gap_tol", DEFAULT_GAP_TOL)?;

    let mut ds = Dataset::new("gap", vec!["n", "lambda2", "lambda1", "gap"]);
    ds.config(
        "n",
        n_list.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
    );
    ds.config(
        "lambda2",
        lambda2_list
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    ds.config("lambda1", &grid_raw);
    ds.config("gamma", gamma);
    ds.config("gap_tol", gap_tol);

    for &n in &n_list {
        for &lambda2 in &lambda2_list {
            let ctx = SweepContext {
                n,
                lambda2,
                gamma,
                temperature: Temperature::Ground,
            };
            let result = sweep(&ctx, &grid)?;
            for p in &result.points {
                ds.point(vec![int(n), num(lambda2), num(p.lambda1), num(p.gap)]);
            }
            let frozen = gap_freezing(&result, gap_tol)?;
            let scope = format!("n={n};lambda2={lambda2}");
            ds.summary(&scope, "gap_frozen_from", num(frozen.frozen_from));
            ds.summary(&scope, "gap_frozen_value", num(frozen.frozen_value));
        }
    }
    Ok(ds)
}

pub fn cmd_anisotropy(args: &AnisotropyArgs, file: &FileConfig) -> CliResult<Dataset> {
    let n_list: Vec<usize> = parse_list(&resolve_string(&args.n, file, "n", "10,20,30"), "n")?;
    let lambda2 = resolve(args.lambda2, file, "lambda2", 0.2)?;
    let gamma_raw = resolve_string(&args.gamma, file, "gamma", "-0.5:0.5:0.025");
    let gammas = grid_values(&gamma_raw, "gamma")?;
    let grid_raw = resolve_string(&args.lambda1, file, "lambda1", DEFAULT_LAMBDA1_GRID);
    let grid = grid_values(&grid_raw, "lambda1")?;
    let eps = resolve(args.eps, file, "eps", 1e-3)?;
    let eps_esd = resolve(args.eps_esd, file, "eps_esd", 1e-6)?;
    let detection = FreezeDetection {
        plateau_tol: eps,
        esd_tol: eps_esd,
        ..FreezeDetection::default()
    };

    let mut ds = Dataset::new(
        "anisotropy",
        vec!["n", "gamma", "order_parameter", "d_frozen", "l_f"],
    );
    ds.config(
        "n",
        n_list.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
    );
    ds.config("lambda2", lambda2);
    ds.config("gamma", &gamma_raw);
    ds.config("lambda1", &grid_raw);
    ds.config("eps", eps);
    ds.config("eps_esd", eps_esd);

    for &n in &n_list {
        let report = anisotropy_scan(n, lambda2, &gammas, &grid, &detection, Temperature::Ground)?;
        for i in 0..report.gammas.len() {
            ds.point(vec![
                int(n),
                num(report.gammas[i]),
                num(report.order_parameter[i]),
                num(report.d_frozen[i]),
                num(lambda2 - report.order_parameter[i]),
            ]);
        }
        let scope = format!("n={n}");
        ds.summary(&scope, "gamma_c", opt_num(report.gamma_c));
        ds.summary(&scope, "curvature_gamma_c", opt_num(report.curvature_gamma_c));
    }
    Ok(ds)
}

pub fn cmd_thermal(args: &ThermalArgs, file: &FileConfig) -> CliResult<Dataset> {
    let n_list: Vec<usize> =
        parse_list(&resolve_string(&args.n, file, "n", "10,20,30,40,50"), "n")?;
    let lambda2 = resolve(args.lambda2, file, "lambda2", 0.2)?;
    let temps_raw = resolve_string(&args.temps, file, "temps", "0.25e-4:25e-4:0.25e-4");
    let temps = grid_values(&temps_raw, "temps")?;
    let grid_raw = resolve_string(&args.lambda1, file, "lambda1", DEFAULT_LAMBDA1_GRID);
    let grid = grid_values(&grid_raw, "lambda1")?;
    let gamma = resolve(args.gamma, file, "gamma", 0.0)?;
    let eps = resolve(args.eps, file, "eps", 1e-3)?;
    let rho_min = resolve(args.rho_min, file, "rho_min", 0.99)?;
    let rel_tol: Option<f64> = args.rel_tol.or(file.get("rel_tol")?);

    let tolerance = match rel_tol {
        Some(r) => ThermalTolerance::RelativeToFrozen(r),
        None => ThermalTolerance::Absolute(eps),
    };
    let config = ThermalScanConfig {
        detection: FreezeDetection {
            plateau_tol: eps,
            ..FreezeDetection::default()
        },
        tolerance,
        rho_min,
    };

    let mut ds = Dataset::new("thermal", vec!["n", "temperature", "ratio"]);
    ds.config(
        "n",
        n_list.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
    );
    ds.config("lambda2", lambda2);
    ds.config("temps", &temps_raw);
    ds.config("lambda1", &grid_raw);
    ds.config("gamma", gamma);
    ds.config("eps", eps);
    ds.config("rho_min", rho_min);
    ds.config(
        "tolerance",
        match tolerance {
            ThermalTolerance::Absolute(e) => format!("absolute={e}"),
            ThermalTolerance::RelativeToFrozen(r) => format!("relative={r}"),
        },
    );

    let mut tc_points: Vec<(f64, f64)> = Vec::new();
    for &n in &n_list {
        let base = SweepContext {
            n,
            lambda2,
            gamma,
            temperature: Temperature::Ground,
        };
        let report = thermal_scan(&base, &grid, &temps, &config)?;
        for (t, r) in report.temperatures.iter().zip(&report.ratios) {
            ds.point(vec![int(n), num(*t), num(*r)]);
        }
        let scope = format!("n={n}");
        ds.summary(&scope, "t_c", opt_num(report.t_c));
        ds.summary(&scope, "l_f_ground", num(report.l_f_ground));
        ds.summary(&scope, "d_frozen_ground", num(report.d_frozen_ground));
        ds.summary(&scope, "ratio_monotone", Value::Bool(report.monotone));
        if let Some(tc) = report.t_c {
            tc_points.push((n as f64, tc * 1e4));
        }
    }
    if tc_points.len() >= 2 {
        let xs: Vec<f64> = tc_points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = tc_points.iter().map(|p| p.1).collect();
        if let Some((slope, intercept)) = linear_fit(&xs, &ys) {
            ds.summary("fit", "tc_slope_x1e4", num(slope));
            ds.summary("fit", "tc_intercept_x1e4", num(intercept));
            ds.summary("fit", "tc_points", int(tc_points.len()));
        }
    }
    Ok(ds)
}

pub fn cmd_oracle_check(args: &OracleCheckArgs, file: &FileConfig) -> CliResult<Dataset> {
    use rand::{Rng, SeedableRng};

    let n_list: Vec<usize> = parse_list(&resolve_string(&args.n, file, "n", "8"), "n")?;
    if let Some(&n) = n_list.iter().find(|&&n| !(4..=oracle::MAX_ORACLE_SPINS).contains(&n)) {
        return Err(CliError::Validation(format!(
            "oracle-check sizes must be between 4 and {}, got {n}",
            oracle::MAX_ORACLE_SPINS
        )));
    }
    let specs = resolve(args.specs, file, "specs", 5)?;
    let seed = resolve(args.seed, file, "seed", 7)?;
    let tol = resolve(args.tol, file, "tol", 1e-8)?;
    let tol_grid = resolve(args.tol_grid, file, "tol_grid", 1e-4)?;

    let mut ds = Dataset::new(
        "oracle-check",
        vec![
            "index",
            "n",
            "lambda1",
            "lambda2",
            "gamma",
            "beta",
            "correlator_dev",
            "bell_dev",
            "mutual_info_dev",
            "classical_dev",
            "discord_dev",
            "concurrence_dev",
            "gap_dev",
            "end_route_dev",
            "passed",
        ],
    );
    ds.config(
        "n",
        n_list.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
    );
    ds.config("specs", specs);
    ds.config("seed", seed);
    ds.config("tol", tol);
    ds.config("tol_grid", tol_grid);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let betas = [None, Some(20.0), Some(5.0)];
    let mut passed_count = 0usize;
    for index in 0..specs {
        let n = n_list[index % n_list.len()];
        let lambda1 = 1.0 - rng.random::<f64>();
        let lambda2 = 1.0 - rng.random::<f64>();
        let gamma = rng.random_range(-0.5..=0.5);
        let beta = betas[index % betas.len()];
        let temperature = match beta {
            None => Temperature::Ground,
            Some(b) => Temperature::Inverse(b),
        };
        let spec = ChainSpec::weak_end(n, lambda1, lambda2, gamma)?.with_temperature(temperature);
        let report = oracle::equivalence_check(&spec)?;
        let passed = report.passed(tol, tol_grid);
        passed_count += passed as usize;
        ds.point(vec![
            int(index),
            int(n),
            num(lambda1),
            num(lambda2),
            num(gamma),
            beta.map_or(text("ground"), num),
            num(report.correlator_dev),
            num(report.bell_dev),
            num(report.mutual_info_dev),
            num(report.classical_dev),
            num(report.discord_dev),
            num(report.concurrence_dev),
            num(report.gap_dev),
            num(report.end_route_dev),
            int(passed as usize),
        ]);
    }
    ds.summary("overall", "passed", int(passed_count));
    ds.summary("overall", "failed", int(specs - passed_count));
    Ok(ds)
}
