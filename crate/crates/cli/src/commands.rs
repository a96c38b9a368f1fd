//! The five subcommands. Each builds a deterministic [`Table`]; rendering and
//! output routing happen in `main`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use num_complex::Complex64;
use qwindow_core::{
    anomaly_term, dimensional_energy, eta_boundary_conditions, frobenius_coeffs, frobenius_eval,
    spectrum_sweep, ConstraintSet, DiracStructure, DormandPrince, EpsilonOde, EtaProfile,
    EvalContext, SpectrumEntry, TaylorCoeffs, WindowFn,
};
use serde_json::{Map, Value};

use crate::config::{ConfigError, RunConfig, Units};
use crate::error::CliError;
use crate::table::{complex_str, json_complex, json_num, Cell, Table};

fn c64(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn base_meta(cfg: &RunConfig, command: &str) -> Map<String, Value> {
    let precision = cfg.output.precision;
    let mut meta = Map::new();
    meta.insert("command".into(), Value::String(command.into()));
    meta.insert(
        "version".into(),
        Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    let mut profile = Map::new();
    profile.insert("variant".into(), Value::String(cfg.profile.variant.clone()));
    profile.insert("rho_c".into(), json_num(cfg.profile.rho_c, precision));
    profile.insert(
        "parameters".into(),
        Value::Object(
            cfg.profile
                .parameters
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        ),
    );
    if let Some(n) = &cfg.profile.normalization {
        profile.insert("normalization".into(), Value::String(n.clone()));
    }
    meta.insert("profile".into(), Value::Object(profile));
    let mut constants = Map::new();
    constants.insert("hbar".into(), json_num(cfg.constants.hbar, precision));
    constants.insert("mass".into(), json_num(cfg.constants.mass, precision));
    constants.insert(
        "units".into(),
        Value::String(
            match cfg.constants.units {
                Units::Natural => "natural",
                Units::Si => "si",
            }
            .into(),
        ),
    );
    meta.insert("constants".into(), Value::Object(constants));
    let mut tol = Map::new();
    tol.insert("rel_tol".into(), json_num(cfg.solver.rel_tol, precision));
    tol.insert("abs_tol".into(), json_num(cfg.solver.abs_tol, precision));
    tol.insert("strict_tol".into(), json_num(cfg.solver.strict_tol, precision));
    meta.insert("tolerances".into(), Value::Object(tol));
    meta
}

/// Commutator table with numeric spot evaluations: one row per (pair, radius).
/// The spot phase point sits on the constraint surface with unit momenta
/// (p_r = p_θ = p_φ = 1) at θ = π/3, φ = 0.
pub fn brackets(cfg: &RunConfig, profile: &EtaProfile) -> Result<Table, CliError> {
    let norm = cfg.profile.normalization()?;
    let w = norm.scale_f64();
    let structure = DiracStructure::build(ConstraintSet::linearized(norm))?;
    let entries = structure.commutator_table()?;
    let samples = cfg
        .samples
        .clone()
        .unwrap_or_else(|| vec![0.8, 1.0, 1.25]);
    let mut table = Table::new(vec![
        "pair",
        "bracket",
        "planck_power",
        "r",
        "value_re",
        "value_im",
        "anomaly",
    ]);
    for entry in &entries {
        for &r in &samples {
            let eta = profile.derivs(r, 2)?;
            let point = [
                r,
                FRAC_PI_3,
                0.0,
                w * eta[0],
                FRAC_PI_4,
                1.0,
                1.0,
                1.0,
                w * eta[1],
                0.0,
            ];
            let ctx = EvalContext::natural_units()
                .set_phase_point(&point)
                .with_window(profile);
            let value = entry.dirac_bracket.eval(&ctx)?;
            let anomaly = anomaly_term(profile, r, cfg.constants.hbar)?;
            table.push_row(vec![
                Cell::Str(format!("{{{}, {}}}", entry.pair.0, entry.pair.1)),
                Cell::Str(entry.rendered.clone()),
                Cell::Int(entry.planck_power as i64),
                Cell::Num(r),
                Cell::Num(value.re),
                Cell::Num(value.im),
                Cell::Num(anomaly),
            ]);
        }
    }
    let mut meta = base_meta(cfg, "brackets");
    meta.insert(
        "spot_point".into(),
        Value::String("on-surface, theta=pi/3, phi=0, p_r=p_theta=p_phi=1".into()),
    );
    table.meta = meta;
    Ok(table)
}

/// Singular-point reports for the requested ε values (default {0, 1}).
pub fn classify(cfg: &RunConfig, profile: &EtaProfile, points: &[f64]) -> Result<Table, CliError> {
    let ode = EpsilonOde::new(
        profile.clone(),
        cfg.quantum.l_min,
        c64(cfg.quantum.energy_bar),
    )?;
    let pts: Vec<f64> = if points.is_empty() {
        vec![0.0, 1.0]
    } else {
        points.to_vec()
    };
    let mut table = Table::new(vec![
        "point",
        "classification",
        "p_exponent",
        "p_limit_re",
        "p_limit_im",
        "q_exponent",
        "q_limit_re",
        "q_limit_im",
    ]);
    for &point in &pts {
        let report = ode.classify(point)?;
        table.push_row(vec![
            Cell::Num(point),
            Cell::Str(report.classification.to_string()),
            Cell::Num(report.limit_p.exponent),
            Cell::Num(report.limit_p.limit.re),
            Cell::Num(report.limit_p.limit.im),
            Cell::Num(report.limit_q.exponent),
            Cell::Num(report.limit_q.limit.re),
            Cell::Num(report.limit_q.limit.im),
        ]);
    }
    let mut meta = base_meta(cfg, "classify");
    meta.insert("l".into(), Value::Number(cfg.quantum.l_min.into()));
    meta.insert(
        "energy_bar".into(),
        json_num(cfg.quantum.energy_bar, cfg.output.precision),
    );
    table.meta = meta;
    Ok(table)
}

/// Spectrum sweep over l ∈ [l_min, l_max], the configured branches, and every
/// truncation order up to the configured maximum.
pub fn spectrum(cfg: &RunConfig, profile: &EtaProfile) -> Result<Table, CliError> {
    let precision = cfg.output.precision;
    let c = &cfg.constants;
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    let mut degenerate: Vec<(usize, u32, u32)> = Vec::new();
    let mut last = None;
    for n in 0..=cfg.solver.truncation {
        let result = spectrum_sweep(
            profile,
            cfg.quantum.l_min..=cfg.quantum.l_max,
            &cfg.quantum.ks,
            n,
        )?;
        entries.extend(result.entries.iter().cloned());
        degenerate.extend(result.degenerate.iter().map(|&(l, k)| (n, l, k)));
        last = Some(result);
    }
    entries.sort_by(|a, b| {
        a.l.cmp(&b.l)
            .then(a.k.cmp(&b.k))
            .then(a.n.cmp(&b.n))
            .then(a.energy_bar.re.total_cmp(&b.energy_bar.re))
            .then(a.energy_bar.im.total_cmp(&b.energy_bar.im))
    });
    let result = last.expect("at least truncation order 0 runs");
    let mut table = Table::new(vec![
        "l",
        "k",
        "n",
        "energy_bar_re",
        "energy_bar_im",
        "energy_si_re",
        "energy_si_im",
        "kk_term",
        "remainder_re",
        "remainder_im",
        "residual",
        "rejected_branch",
        "eta_conditions",
    ]);
    for e in &entries {
        let esi = dimensional_energy(e.energy_bar, c.hbar, c.mass, profile.rho_c());
        let conds = if e.eta_conditions.is_empty() {
            Cell::Null
        } else {
            Cell::Str(
                e.eta_conditions
                    .iter()
                    .map(|z| complex_str(*z, precision))
                    .collect::<Vec<_>>()
                    .join(";"),
            )
        };
        table.push_row(vec![
            Cell::Int(e.l as i64),
            Cell::Int(e.k as i64),
            Cell::Int(e.n as i64),
            Cell::Num(e.energy_bar.re),
            Cell::Num(e.energy_bar.im),
            Cell::Num(esi.re),
            Cell::Num(esi.im),
            Cell::Int((e.l * (e.l + 1)) as i64),
            Cell::Num(e.remainder.re),
            Cell::Num(e.remainder.im),
            Cell::Num(e.residual),
            Cell::Bool(result.branch.rejected),
            conds,
        ]);
    }
    let mut meta = base_meta(cfg, "spectrum");
    meta.insert("l_min".into(), Value::Number(cfg.quantum.l_min.into()));
    meta.insert("l_max".into(), Value::Number(cfg.quantum.l_max.into()));
    meta.insert(
        "ks".into(),
        Value::Array(
            cfg.quantum
                .ks
                .iter()
                .map(|&k| Value::Number(k.into()))
                .collect(),
        ),
    );
    meta.insert(
        "truncation".into(),
        Value::Number(cfg.solver.truncation.into()),
    );
    meta.insert(
        "omega_natural".into(),
        json_num(result.omega_natural, precision),
    );
    meta.insert(
        "casimir_scale_natural".into(),
        json_num(result.casimir_scale_natural, precision),
    );
    let mut branch = Map::new();
    branch.insert("rejected".into(), Value::Bool(result.branch.rejected));
    branch.insert(
        "energy_factor".into(),
        json_complex(result.branch.energy_factor, precision),
    );
    branch.insert(
        "boundary_values".into(),
        Value::Array(
            result
                .branch
                .boundary_values
                .iter()
                .map(|&z| json_complex(z, precision))
                .collect(),
        ),
    );
    branch.insert(
        "reason".into(),
        Value::String(result.branch.reason.clone()),
    );
    meta.insert("branch".into(), Value::Object(branch));
    meta.insert(
        "degenerate".into(),
        Value::Array(
            degenerate
                .iter()
                .map(|&(n, l, k)| {
                    Value::Array(vec![
                        Value::Number(n.into()),
                        Value::Number(l.into()),
                        Value::Number(k.into()),
                    ])
                })
                .collect(),
        ),
    );
    table.meta = meta;
    Ok(table)
}

/// Series solution against adaptive integration on the configured ε grid,
/// seeded from the series value and slope at the boundary ε = 1.
pub fn solve(cfg: &RunConfig, profile: &EtaProfile) -> Result<Table, CliError> {
    let l = cfg.quantum.l_min;
    let k = cfg.quantum.ks[0];
    let eb = c64(cfg.quantum.energy_bar);
    let degree = cfg.solver.series_degree;
    let coeffs = TaylorCoeffs::new(profile, l, degree)?;
    let a = frobenius_coeffs(&coeffs, k, eb, c64(1.0), degree)?;
    let [lo, hi] = cfg.solver.range;
    let steps = cfg.solver.steps;
    let grid: Vec<f64> = if steps == 1 {
        vec![lo]
    } else {
        (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let ode = EpsilonOde::new(profile.clone(), l, eb)?;
    let settings = DormandPrince::with_tolerance(cfg.solver.rel_tol, cfg.solver.abs_tol);
    let (v0, d0, _) = frobenius_eval(&a, k, 1.0);

    let mut below: Vec<f64> = grid.iter().copied().filter(|&e| e < 1.0).collect();
    below.reverse();
    let above: Vec<f64> = grid.iter().copied().filter(|&e| e > 1.0).collect();
    let mut numeric: HashMap<u64, Complex64> = HashMap::new();
    for targets in [below, above] {
        if targets.is_empty() {
            continue;
        }
        let states = ode
            .integrate(1.0, [v0, d0], &targets, &settings)
            .map_err(|e| {
                CliError::Numeric(format!(
                    "integration failed between ε = 1 and ε = {}: {e}",
                    targets.last().unwrap()
                ))
            })?;
        for (t, s) in targets.iter().zip(states) {
            numeric.insert(t.to_bits(), s[0]);
        }
    }

    let mut table = Table::new(vec![
        "eps",
        "series_re",
        "series_im",
        "numeric_re",
        "numeric_im",
        "abs_diff",
    ]);
    let mut max_diff = 0.0f64;
    let mut max_at = grid[0];
    for &eps in &grid {
        let (series, _, _) = frobenius_eval(&a, k, eps);
        let num = *numeric.get(&eps.to_bits()).unwrap_or(&v0);
        let diff = (series - num).norm();
        if diff > max_diff {
            max_diff = diff;
            max_at = eps;
        }
        table.push_row(vec![
            Cell::Num(eps),
            Cell::Num(series.re),
            Cell::Num(series.im),
            Cell::Num(num.re),
            Cell::Num(num.im),
            Cell::Num(diff),
        ]);
    }
    let mut meta = base_meta(cfg, "solve");
    meta.insert("l".into(), Value::Number(l.into()));
    meta.insert("k".into(), Value::Number(k.into()));
    meta.insert("degree".into(), Value::Number(degree.into()));
    meta.insert(
        "energy_bar".into(),
        json_num(cfg.quantum.energy_bar, cfg.output.precision),
    );
    meta.insert("max_abs_diff".into(), json_num(max_diff, cfg.output.precision));
    meta.insert("max_abs_diff_at".into(), json_num(max_at, cfg.output.precision));
    table.meta = meta;
    Ok(table)
}

/// Leftover boundary-condition residuals of the one-order-past-square series
/// system: conditions the window profile's boundary derivatives must satisfy.
pub fn eta_conditions(cfg: &RunConfig, profile: &EtaProfile) -> Result<Table, CliError> {
    let l = cfg.quantum.l_min;
    let order = cfg.solver.truncation;
    if order < 2 {
        return Err(ConfigError::at(
            "solver.truncation",
            format!("eta-conditions needs order at least 2, got {order}"),
        )
        .into());
    }
    let coeffs = TaylorCoeffs::new(profile, l, order)?;
    let ec = eta_boundary_conditions(&coeffs, order)?;
    let mut table = Table::new(vec![
        "index",
        "condition",
        "residual_re",
        "residual_im",
        "residual_abs",
    ]);
    for (i, (residual, rendered)) in ec.residuals.iter().zip(&ec.rendered).enumerate() {
        table.push_row(vec![
            Cell::Int(i as i64),
            Cell::Str(rendered.clone()),
            Cell::Num(residual.re),
            Cell::Num(residual.im),
            Cell::Num(residual.norm()),
        ]);
    }
    let precision = cfg.output.precision;
    let mut meta = base_meta(cfg, "eta-conditions");
    meta.insert("l".into(), Value::Number(l.into()));
    meta.insert("order".into(), Value::Number(ec.order.into()));
    meta.insert("energy_bar".into(), json_complex(ec.energy_bar, precision));
    meta.insert(
        "coefficients".into(),
        Value::Array(ec.a.iter().map(|&z| json_complex(z, precision)).collect()),
    );
    table.meta = meta;
    Ok(table)
}

/// Strict-mode guard: the mechanically transformed ε-chart coefficients and
/// the direct closed forms must agree on a fixed grid; any persistent
/// discrepancy aborts the run with exit code 4.
pub fn strict_check(cfg: &RunConfig, profile: &EtaProfile) -> Result<(), CliError> {
    let ode = EpsilonOde::new(
        profile.clone(),
        cfg.quantum.l_min,
        c64(cfg.quantum.energy_bar),
    )?;
    let mut worst = (0.0f64, 0.0f64);
    for i in 0..=24 {
        let eps = 0.3 + 0.05 * i as f64;
        let (dp, dq) = ode.route_discrepancy(eps)?;
        let m = dp.max(dq);
        if m > worst.1 {
            worst = (eps, m);
        }
    }
    if worst.1 > cfg.solver.strict_tol {
        return Err(CliError::Strict(format!(
            "coefficient routes disagree: relative discrepancy {:.3e} at ε = {:.2} \
             exceeds strict_tol {:.1e}",
            worst.1, worst.0, cfg.solver.strict_tol
        )));
    }
    Ok(())
}
