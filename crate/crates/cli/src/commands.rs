//! The six subcommands: solve, verify, oracle, sweep, flat, assumptions.
//!
//! Commands run single-threaded at the orchestration level (the oracle
//! parallelizes internally) and write their artifacts atomically. Figures are
//! always rendered from the CSV files after writing them, never from
//! in-memory state.

use crate::config::RunConfig;
use crate::csvio::{atomic_write, fmt_float, read_menu_csv, write_json, write_menu_csv};
use crate::error::CliError;
use crate::report::*;
use crate::svg::{line_chart, Series};
use infomenu_core::assumptions::{
    check_exclusion_bound, check_mlr, check_supermod_virtual, gate_report, h_scan,
    scd_sample_grid, scd_signs, SupermodParams,
};
use infomenu_core::comparative::{
    blackwell_monotone, dispersion_pivot, is_more_dispersed, rotation_family, solve_family,
    surplus_monotone, thresholds_monotone,
};
use infomenu_core::model::belief::Belief;
use infomenu_core::model::surplus::delta_v;
use infomenu_core::numeric::{linspace, trapezoid};
use infomenu_core::oracle::{
    brute_force_optimal, revealed_state_pattern, simple_catalog, three_signal_no_improvement,
    uniform_types, verify_ic_ir, verify_mechanism, DiscreteInstance, IcIrReport, OracleOptions,
};
use infomenu_core::solver::{build_menu, flat_price_optimum, MenuPoint};
use infomenu_core::{BeliefDensity, Error as CoreError, Orientation, SimpleExperiment, ValueFunction};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// What a command produced and whether its checks passed.
#[derive(Debug)]
pub struct CmdOutcome {
    pub pass: bool,
    pub files: Vec<PathBuf>,
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output.dir.join(name)
}

fn log_timing(cfg: &RunConfig, command: &str, started: Instant) -> Result<(), CliError> {
    let line = format!(
        "{command} completed in {:.3} s (wall clock; this file is not reproducible)\n",
        started.elapsed().as_secs_f64()
    );
    let path = out_path(cfg, "run.log");
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, line)?;
    Ok(())
}

fn experiment_of(row: &MenuPoint) -> Result<SimpleExperiment, CoreError> {
    Ok(match row.orientation {
        Orientation::Null => SimpleExperiment::null(),
        Orientation::Full => SimpleExperiment::full(),
        Orientation::RevealL => SimpleExperiment::reveal_l(row.noise)?,
        Orientation::RevealH => SimpleExperiment::reveal_h(row.noise)?,
    })
}

/// Global IC/IR check of menu rows against all their own contracts plus the
/// outside option.
fn menu_ic_report(rows: &[MenuPoint], v: &ValueFunction, tol: f64) -> Result<IcIrReport, CliError> {
    let types: Vec<f64> = rows.iter().map(|r| r.mu).collect();
    let experiments: Vec<SimpleExperiment> = rows
        .iter()
        .map(experiment_of)
        .collect::<Result<_, _>>()
        .map_err(CliError::from)?;
    let prices: Vec<f64> = rows.iter().map(|r| r.price).collect();
    let outside: Vec<f64> = types.iter().map(|&mu| v.value(mu)).collect();
    let gross = |i: usize, j: usize| -> f64 {
        outside[i] + delta_v(Belief::clamped(types[i]), experiments[j], v)
    };
    let net_own: Vec<f64> = (0..rows.len()).map(|i| gross(i, i) - prices[i]).collect();
    Ok(verify_ic_ir(&types, &net_own, &outside, &prices, gross, tol))
}

/// Quadrature of `price * f` over the CSV rows.
fn revenue_from_rows(rows: &[MenuPoint], f: &BeliefDensity) -> f64 {
    let xs: Vec<f64> = rows.iter().map(|r| r.mu).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.price * f.density(r.mu)).collect();
    trapezoid(&xs, &ys)
}

/// Solve the menu and emit `menu.csv`, `thresholds.json`, `report.json`, and
/// a figure of the value function against the buyer's gross payoff.
pub fn cmd_solve(cfg: &RunConfig) -> Result<CmdOutcome, CliError> {
    let started = Instant::now();
    let v = cfg.build_value()?;
    let f = cfg.build_density()?;
    if !v.is_smooth() {
        return Err(CliError::Solver(CoreError::UnsupportedValueKind {
            operation: "cmd_solve",
        }));
    }
    let mut opts = cfg.solve_options();
    let gate = gate_report(&v, &f, opts.lambda_bracket)?;
    if !gate.all_pass() {
        if !opts.override_assumptions {
            return Err(CliError::Solver(CoreError::AssumptionsFailed {
                summary: gate.summary(),
            }));
        }
        eprintln!(
            "warning: solving despite failed regularity checks — {}",
            gate.summary()
        );
    }
    // the gate already ran (and is being reported); skip the internal one
    opts.override_assumptions = true;
    let menu = build_menu(&v, &f, &opts)?;

    let csv_path = out_path(cfg, "menu.csv");
    write_menu_csv(&csv_path, &menu)?;
    let thresholds_path = out_path(cfg, "thresholds.json");
    write_json(&thresholds_path, &menu.thresholds)?;
    let report_path = out_path(cfg, "report.json");
    write_json(
        &report_path,
        &SolveReport {
            version: VERSION,
            command: "solve",
            pass: true,
            thresholds: menu.thresholds,
            revenue: menu.revenue,
            grid_points: menu.points.len(),
            assumptions: gate,
            config: cfg.clone(),
        },
    )?;

    // figure from the CSV just written
    let rows = read_menu_csv(&csv_path)?;
    let svg_path = out_path(cfg, "menu.svg");
    let value_curve: Vec<(f64, f64)> = rows.iter().map(|r| (r.mu, v.value(r.mu))).collect();
    let gross_curve: Vec<(f64, f64)> = rows.iter().map(|r| (r.mu, r.gross_utility)).collect();
    let svg = line_chart(
        "value of belief (solid) and gross payoff under the menu (dashed)",
        &[
            Series {
                label: "V(mu)".to_owned(),
                color: "steelblue",
                dashed: false,
                points: value_curve,
            },
            Series {
                label: "gross payoff".to_owned(),
                color: "black",
                dashed: true,
                points: gross_curve,
            },
        ],
    );
    atomic_write(&svg_path, svg.as_bytes())?;
    log_timing(cfg, "solve", started)?;
    Ok(CmdOutcome {
        pass: true,
        files: vec![csv_path, thresholds_path, report_path, svg_path],
    })
}

/// Re-read a menu CSV and verify global IC/IR plus the regularity checks.
pub fn cmd_verify(cfg: &RunConfig, menu_path: &Path) -> Result<CmdOutcome, CliError> {
    let started = Instant::now();
    let rows = read_menu_csv(menu_path)?;
    let v = cfg.build_value()?;
    let f = cfg.build_density()?;
    let ic = menu_ic_report(&rows, &v, cfg.verify.ic_tol)?;
    let mut reports = vec![check_mlr(
        &f,
        &[0.25, 0.375, 0.5, 0.625, 0.75],
        &linspace(0.002, 0.998, 512),
    )];
    if v.is_smooth() {
        let params = SupermodParams::defaults(&f, cfg.solve_options().lambda_bracket)?;
        reports.push(check_supermod_virtual(&v, &f, &params));
    }
    let pass = ic.pass && reports.iter().all(|r| r.pass);
    let report_path = out_path(cfg, "verify_report.json");
    write_json(
        &report_path,
        &VerifyReport {
            version: VERSION,
            command: "verify",
            pass,
            rows: rows.len(),
            ic,
            assumptions: reports,
            revenue_from_csv: revenue_from_rows(&rows, &f),
            config: cfg.clone(),
        },
    )?;
    log_timing(cfg, "verify", started)?;
    Ok(CmdOutcome {
        pass,
        files: vec![report_path],
    })
}

fn noise_grid(step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut x = step;
    while x < 1.0 - 1e-12 {
        grid.push(x);
        x += step;
    }
    grid
}

/// Brute-force screening on a finite instance, pattern and three-signal spot
/// checks, and a comparison against the closed-form menu when it applies.
pub fn cmd_oracle(cfg: &RunConfig) -> Result<CmdOutcome, CliError> {
    let started = Instant::now();
    let v = cfg.build_value()?;
    let f = cfg.build_density()?;
    let o = &cfg.oracle;
    let types = uniform_types(o.types, o.type_lo, o.type_hi);
    let catalog = simple_catalog(&noise_grid(o.noise_step));
    let instance = DiscreteInstance::new(types.clone(), catalog, v.clone())?;
    let opts = OracleOptions {
        budget: o.budget,
        restarts: o.restarts,
        seed: o.seed,
    };
    let mechanism = brute_force_optimal(&instance, &opts);
    if !mechanism.exhaustive && !o.allow_fallback {
        return Err(CliError::input(format!(
            "enumeration of {} types x {} contracts exceeds oracle.budget = {} and oracle.allow_fallback is off",
            o.types,
            instance.catalog.len(),
            o.budget
        )));
    }
    let ic = verify_mechanism(&instance, &mechanism, o.ic_tol);

    // closed-form menu, when the instance admits one
    let closed_form = if v.is_smooth() {
        gate_report(&v, &f, cfg.solve_options().lambda_bracket)?
            .all_pass()
            .then(|| build_menu(&v, &f, &cfg.solve_options()))
            .transpose()?
    } else {
        None
    };
    let (mu0, mu0_source) = match &closed_form {
        Some(menu) => (menu.thresholds.mu0, "closed-form menu".to_owned()),
        None => (0.5, "symmetric default".to_owned()),
    };
    let pattern = revealed_state_pattern(&instance, &mechanism, mu0);

    let comparison = closed_form.map(|menu| {
        // restrict the menu to the oracle's types (nearest grid row)
        let restricted: Vec<MenuPoint> = types
            .iter()
            .map(|t| {
                let idx = match menu
                    .points
                    .binary_search_by(|p| p.mu.partial_cmp(&t.belief).unwrap())
                {
                    Ok(i) => i,
                    Err(0) => 0,
                    Err(i) if i >= menu.points.len() => menu.points.len() - 1,
                    Err(i) => {
                        if (menu.points[i].mu - t.belief).abs()
                            < (t.belief - menu.points[i - 1].mu).abs()
                        {
                            i
                        } else {
                            i - 1
                        }
                    }
                };
                menu.points[idx]
            })
            .collect();
        let restricted_revenue: f64 = types
            .iter()
            .zip(restricted.iter())
            .map(|(t, r)| t.weight * r.price)
            .sum();
        let feas = menu_ic_report(&restricted, &v, o.ic_tol).expect("valid rows");
        ClosedFormComparison {
            restricted_revenue,
            oracle_revenue: mechanism.revenue,
            relative_gap: (mechanism.revenue - restricted_revenue).abs()
                / restricted_revenue.max(f64::MIN_POSITIVE),
            restriction_feasible: feas.pass,
            worst_restriction_violation: feas.worst_violation,
        }
    });

    // three-signal extension on the dedicated smaller instance
    let small = DiscreteInstance::new(
        uniform_types(o.three_signal_types, o.three_signal_lo, o.three_signal_hi),
        simple_catalog(&o.three_signal_noise),
        v.clone(),
    )?;
    let three_signal = three_signal_no_improvement(&small, o.posterior_step, &opts, o.gain_tol);

    let pass = ic.pass
        && pattern.applicable
        && pattern.pass
        && three_signal.pass
        && comparison
            .as_ref()
            .map(|c| c.restriction_feasible)
            .unwrap_or(true);
    let report_path = out_path(cfg, "oracle.json");
    write_json(
        &report_path,
        &OracleReport {
            version: VERSION,
            command: "oracle",
            pass,
            type_count: instance.types.len(),
            catalog_size: instance.catalog.len(),
            mu0,
            mu0_source,
            mechanism,
            ic,
            pattern,
            three_signal,
            comparison,
            config: cfg.clone(),
        },
    )?;
    log_timing(cfg, "oracle", started)?;
    Ok(CmdOutcome {
        pass,
        files: vec![report_path],
    })
}

pub const SWEEP_HEADER: &str = "t,mu,orientation,noise,price,surplus";

/// Solve the rotation family, check the comparative statics, and emit the
/// long-format CSV plus an overlay figure.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<CmdOutcome, CliError> {
    let started = Instant::now();
    let v = cfg.build_value()?;
    let base = cfg.build_density()?;
    if !base.is_symmetric() {
        return Err(CliError::input(
            "sweep needs a symmetric base density (the rotation family is symmetric by construction)",
        ));
    }
    let family = rotation_family(&base, &cfg.sweep.t_values)?;
    let members = solve_family(&v, &family, &cfg.solve_options())?;

    let thresholds = thresholds_monotone(&members, cfg.sweep.slack);
    let blackwell = blackwell_monotone(&v, &members, &cfg.sweep.probes, cfg.sweep.slack)?;
    let surplus = surplus_monotone(&members, &cfg.sweep.probes, cfg.sweep.slack);
    let mut dispersion_order = Vec::new();
    for w in members.windows(2) {
        dispersion_order.push(is_more_dispersed(&w[1].density, &w[0].density)?);
    }

    // long-format CSV
    let mut csv = String::new();
    csv.push_str(SWEEP_HEADER);
    csv.push('\n');
    for m in &members {
        for p in &m.menu.points {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_float(m.t),
                fmt_float(p.mu),
                p.orientation.as_str(),
                fmt_float(p.noise),
                fmt_float(p.price),
                fmt_float(p.surplus),
            ));
        }
    }
    let csv_path = out_path(cfg, "sweep.csv");
    atomic_write(&csv_path, csv.as_bytes())?;

    // overlay figure from the CSV: gross payoff (V + price + surplus) and
    // surplus per member
    let svg_path = out_path(cfg, "sweep.svg");
    let svg = sweep_svg_from_csv(&csv_path, &v)?;
    atomic_write(&svg_path, svg.as_bytes())?;

    let pass = thresholds.pass
        && blackwell.pass
        && surplus.pass
        && dispersion_order.iter().all(|&ok| ok);
    let summaries: Vec<MemberSummary> = members
        .iter()
        .map(|m| {
            Ok(MemberSummary {
                t: m.t,
                thresholds: m.menu.thresholds,
                revenue: m.menu.revenue,
                pivot: dispersion_pivot(&m.density)?,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let report_path = out_path(cfg, "sweep_report.json");
    write_json(
        &report_path,
        &SweepReport {
            version: VERSION,
            command: "sweep",
            pass,
            members: summaries,
            thresholds_monotone: thresholds,
            blackwell_monotone: blackwell,
            surplus_monotone: surplus,
            dispersion_order,
            config: cfg.clone(),
        },
    )?;
    log_timing(cfg, "sweep", started)?;
    Ok(CmdOutcome {
        pass,
        files: vec![csv_path, svg_path, report_path],
    })
}

fn sweep_svg_from_csv(path: &Path, v: &ValueFunction) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)?;
    // per family member: (t, gross payoff curve, surplus curve)
    type MemberCurves = (f64, Vec<(f64, f64)>, Vec<(f64, f64)>);
    let mut by_t: Vec<MemberCurves> = Vec::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::input(format!(
                "sweep csv line {}: expected 6 fields",
                lineno + 1
            )));
        }
        let parse = |i: usize| -> Result<f64, CliError> {
            fields[i]
                .trim()
                .parse()
                .map_err(|e| CliError::input(format!("sweep csv line {}: {e}", lineno + 1)))
        };
        let (t, mu, price, surplus) = (parse(0)?, parse(1)?, parse(4)?, parse(5)?);
        if by_t.last().map(|g| g.0) != Some(t) {
            by_t.push((t, Vec::new(), Vec::new()));
        }
        let group = by_t.last_mut().expect("pushed above");
        group.1.push((mu, v.value(mu) + price + surplus));
        group.2.push((mu, surplus));
    }
    const COLORS: [&str; 6] = ["steelblue", "seagreen", "goldenrod", "darkorange", "crimson", "purple"];
    let mut series = Vec::new();
    for (i, (t, gross, surplus)) in by_t.into_iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        series.push(Series {
            label: format!("gross payoff, t = {t}"),
            color,
            dashed: false,
            points: gross,
        });
        series.push(Series {
            label: format!("surplus, t = {t}"),
            color,
            dashed: true,
            points: surplus,
        });
    }
    Ok(line_chart(
        "gross payoff (solid) and surplus (dashed) across dispersion",
        &series,
    ))
}

/// Flat-price benchmark, with the menu comparison when the instance admits
/// the closed form.
pub fn cmd_flat(cfg: &RunConfig) -> Result<CmdOutcome, CliError> {
    let started = Instant::now();
    let v = cfg.build_value()?;
    let f = cfg.build_density()?;
    let flat = flat_price_optimum(&v, &f)?;
    let menu_revenue = if v.is_smooth()
        && gate_report(&v, &f, cfg.solve_options().lambda_bracket)?.all_pass()
    {
        Some(build_menu(&v, &f, &cfg.solve_options())?.revenue)
    } else {
        None
    };
    let dominance_margin = menu_revenue.map(|r| r - flat.revenue);
    let pass = dominance_margin.map(|m| m >= -1e-9).unwrap_or(true);
    let report_path = out_path(cfg, "flat.json");
    write_json(
        &report_path,
        &FlatReport {
            version: VERSION,
            command: "flat",
            pass,
            flat,
            menu_revenue,
            dominance_margin,
            config: cfg.clone(),
        },
    )?;
    log_timing(cfg, "flat", started)?;
    Ok(CmdOutcome {
        pass,
        files: vec![report_path],
    })
}

/// Run the full battery of regularity checks and diagnostics.
pub fn cmd_assumptions(cfg: &RunConfig) -> Result<CmdOutcome, CliError> {
    let started = Instant::now();
    let v = cfg.build_value()?;
    let f = cfg.build_density()?;
    let bracket = cfg.solve_options().lambda_bracket;
    let mut reports = vec![check_mlr(
        &f,
        &[0.25, 0.375, 0.5, 0.625, 0.75],
        &linspace(0.002, 0.998, 512),
    )];
    let mut h_scans = Vec::new();
    if v.is_smooth() {
        let params = SupermodParams::defaults(&f, bracket)?;
        reports.push(check_supermod_virtual(&v, &f, &params));
        // H-function scans near the orientation switch, where monotonicity is
        // claimed on the whole posterior range
        let lambda_mid = 0.5 * (bracket.0 + bracket.1);
        let nu_grid = linspace(1e-3, 1.0 - 1e-3, 512);
        for q in [0.38, 0.46, 0.54, 0.62] {
            let mu = f.quantile(q);
            h_scans.push(h_scan(
                &v,
                &f,
                lambda_mid,
                mu,
                &nu_grid,
                Some((params.mu_lo, params.mu_hi)),
            ));
        }
        // menu-dependent checks
        if reports.iter().all(|r| r.pass) {
            let menu = build_menu(&v, &f, &cfg.solve_options())?;
            let samples = scd_sample_grid(&v, &f, &menu.thresholds, 64, 64)?;
            reports.push(scd_signs(&v, menu.thresholds.mu0, &samples));
            reports.push(check_exclusion_bound(
                &v,
                &f,
                bracket.0,
                bracket.1,
                menu.revenue,
            ));
        }
    }
    let pass = reports.iter().all(|r| r.pass)
        && h_scans
            .iter()
            .all(|h| h.h1.strictly_monotone && h.h2.strictly_monotone);
    let report_path = out_path(cfg, "assumptions.json");
    write_json(
        &report_path,
        &AssumptionsReport {
            version: VERSION,
            command: "assumptions",
            pass,
            reports,
            h_scans,
            config: cfg.clone(),
        },
    )?;
    log_timing(cfg, "assumptions", started)?;
    Ok(CmdOutcome {
        pass,
        files: vec![report_path],
    })
}
