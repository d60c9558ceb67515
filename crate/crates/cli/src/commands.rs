//! One function per subcommand. Each builds tables, optional SVG plots and
//! a manifest inside the chosen output directory.

use crate::config::{crossing_filter, ExperimentConfig};
use crate::error::CliError;
use crate::manifest::Manifest;
use crate::svg::{self, Series};
use crate::table::{Cell, Table};
use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;
use timecrystal::chaos::{epsilon_distinct_count, lyapunov_max, poincare_section, LyapunovConfig};
use timecrystal::dynamics::{casimir, hamiltonian, pair_number, StateVector};
use timecrystal::integrate::integrate;
use timecrystal::orbit::{refine_orbit, scan_time_crystals, Classification, SearchWindow};
use timecrystal::quantum::{find_regular_derivative, ShootingProblem, Slot};

pub struct OutputOptions {
    pub json: bool,
    pub plot: bool,
}

fn write_table(
    manifest: &mut Manifest,
    out_dir: &Path,
    stem: &str,
    table: &Table,
    opts: &OutputOptions,
) -> Result<(), CliError> {
    let (name, body) = if opts.json {
        (format!("{stem}.json"), table.to_json())
    } else {
        (format!("{stem}.csv"), table.to_csv())
    };
    manifest
        .write_output(out_dir, &name, body.as_bytes())
        .map_err(|e| CliError::Numerical(format!("cannot write {name}: {e}")))?;
    Ok(())
}

fn write_plot(
    manifest: &mut Manifest,
    out_dir: &Path,
    stem: &str,
    svg_text: &str,
) -> Result<(), CliError> {
    let name = format!("{stem}.svg");
    manifest
        .write_output(out_dir, &name, svg_text.as_bytes())
        .map_err(|e| CliError::Numerical(format!("cannot write {name}: {e}")))?;
    Ok(())
}

fn observable_value(s: &StateVector, name: &str) -> Result<f64, CliError> {
    Ok(match name {
        "mx" => s.mx,
        "my" => s.my,
        "mz" => s.mz,
        "x" => s.x,
        "p" => s.p,
        "pair_number" => pair_number(s.mx, s.x, 1.0).map_err(CliError::from)?,
        other => {
            return Err(CliError::Config(format!("unknown observable '{other}'")));
        }
    })
}

pub fn cmd_simulate(
    cfg: &ExperimentConfig,
    config_text: &str,
    out_dir: &Path,
    opts: &OutputOptions,
) -> Result<Manifest, CliError> {
    let t0 = Instant::now();
    let mut manifest = Manifest::new("simulate", config_text);
    let run = cfg.run().map_err(CliError::Config)?;
    let tau_end = run
        .tau_end_pi
        .ok_or_else(|| CliError::Config("simulate needs run.tau_end_pi".into()))?
        * PI;
    let with_pairs = run.pair_number.unwrap_or(false);
    let observable = run.observable.clone().unwrap_or_else(|| "mx".to_string());
    let init = cfg.initial_state().map_err(CliError::Config)?;
    let icfg = cfg.integrator_config().map_err(CliError::Config)?;

    let traj = integrate(&init, tau_end, &icfg)?;

    let mut headers = vec!["tau", "mx", "my", "mz", "x", "p", "h", "msq"];
    if with_pairs {
        headers.push("n_p");
    }
    let mut table = Table::new(&headers);
    for (tau, s) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![
            Cell::Float(*tau),
            Cell::Float(s.mx),
            Cell::Float(s.my),
            Cell::Float(s.mz),
            Cell::Float(s.x),
            Cell::Float(s.p),
            Cell::Float(hamiltonian(s)),
            Cell::Float(casimir(s)),
        ];
        if with_pairs {
            row.push(Cell::Float(pair_number(s.mx, s.x, 1.0)?));
        }
        table.push(row);
    }
    write_table(&mut manifest, out_dir, "trajectory", &table, opts)?;

    manifest.record(
        "hamiltonian_drift",
        serde_json::json!(traj.stats.max_hamiltonian_drift),
    );
    manifest.record(
        "casimir_drift",
        serde_json::json!(traj.stats.max_casimir_drift),
    );

    if opts.plot {
        let pts: Vec<(f64, f64)> = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(t, s)| Ok((*t, observable_value(s, &observable)?)))
            .collect::<Result<_, CliError>>()?;
        let svg_text = svg::line_plot(
            &[Series {
                label: &observable,
                points: &pts,
            }],
            &format!("{observable} vs tau"),
        );
        write_plot(&mut manifest, out_dir, "trajectory", &svg_text)?;
    }
    manifest.record_timing("total", t0.elapsed().as_secs_f64() * 1e3);
    Ok(manifest)
}

pub fn cmd_find_orbit(
    cfg: &ExperimentConfig,
    config_text: &str,
    out_dir: &Path,
    opts: &OutputOptions,
) -> Result<Manifest, CliError> {
    let t0 = Instant::now();
    let mut manifest = Manifest::new("find-orbit", config_text);
    let w = cfg
        .window
        .as_ref()
        .ok_or_else(|| CliError::Config("find-orbit needs a [window] section".into()))?;
    let horizon = cfg
        .run
        .as_ref()
        .and_then(|r| r.tau_horizon_pi)
        .unwrap_or(200.0)
        * PI;
    let base = cfg.base.as_ref();
    let base_init = StateVector::new(
        base.map_or(0.009, |b| b.mx),
        base.map_or(-0.027, |b| b.my),
        base.map_or(0.0, |b| b.mz),
        0.0,
        base.map_or(0.006, |b| b.p),
    )?;
    let win = SearchWindow {
        x0_min: w.x0_min,
        x0_max: w.x0_max,
        grid_n: w.grid_n,
        base_init,
        tau_horizon: horizon,
    };
    let icfg = cfg.integrator_config().map_err(CliError::Config)?;
    let outcome = scan_time_crystals(&win, &icfg)?;

    let mut table = Table::new(&["x0", "period", "residual", "classification", "lambda_max"]);
    for c in &outcome.candidates {
        table.push(vec![
            Cell::Float(c.init.x),
            Cell::Float(c.period),
            Cell::Float(c.residual),
            Cell::Text(c.classification.to_string()),
            match c.lambda_max {
                Some(l) => Cell::Float(l),
                None => Cell::Text(String::new()),
            },
        ]);
    }
    if outcome.candidates.is_empty() {
        manifest.warn("window produced no period candidates");
    }
    for (x0, msg) in &outcome.failures {
        manifest.warn(format!("grid point X0={x0}: {msg}"));
    }
    write_table(&mut manifest, out_dir, "candidates", &table, opts)?;

    if opts.plot {
        let pts: Vec<(f64, f64)> = outcome
            .candidates
            .iter()
            .map(|c| (c.init.x, c.residual.max(1e-16).log10()))
            .collect();
        let svg_text = svg::scatter_plot(
            &[Series {
                label: "log10 residual",
                points: &pts,
            }],
            "recurrence residual vs X0",
        );
        write_plot(&mut manifest, out_dir, "candidates", &svg_text)?;
    }
    manifest.record_timing("total", t0.elapsed().as_secs_f64() * 1e3);
    Ok(manifest)
}

pub fn cmd_unit_cell(
    cfg: &ExperimentConfig,
    config_text: &str,
    out_dir: &Path,
    opts: &OutputOptions,
) -> Result<Manifest, CliError> {
    let t0 = Instant::now();
    let mut manifest = Manifest::new("unit-cell", config_text);
    let cell = cfg
        .cell
        .as_ref()
        .ok_or_else(|| CliError::Config("unit-cell needs a [cell] section".into()))?;
    let init = cfg.initial_state().map_err(CliError::Config)?;
    let icfg = cfg.integrator_config().map_err(CliError::Config)?;
    let period0 = cell.period_pi * PI;

    let (init, period) = if cell.refine {
        let cand = refine_orbit(&init, period0, &icfg)?;
        manifest.record("refined_x0", serde_json::json!(cand.init.x));
        manifest.record("refined_period", serde_json::json!(cand.period));
        manifest.record("residual", serde_json::json!(cand.residual));
        manifest.record(
            "classification",
            serde_json::json!(cand.classification.to_string()),
        );
        if cell.require_periodic && cand.classification != Classification::Periodic {
            return Err(CliError::Search(format!(
                "candidate is {} (residual {:.3e}), not periodic",
                cand.classification, cand.residual
            )));
        }
        (cand.init, cand.period)
    } else {
        (init, period0)
    };

    // one pass over four cells, then read the shifted traces from dense output
    let traj = integrate(&init, 4.0 * period, &icfg)?;
    let n = ((period / icfg.sample_dt).ceil() as usize).max(2);
    let mut table = Table::new(&["tau", "mx_k0", "mx_k1", "mx_k2", "mx_k3"]);
    let mut series: [Vec<(f64, f64)>; 4] = Default::default();
    let mut overlap: f64 = 0.0;
    for i in 0..=n {
        let tau = period * i as f64 / n as f64;
        let mut vals = [0.0; 4];
        for (k, v) in vals.iter_mut().enumerate() {
            *v = traj.eval(tau + k as f64 * period).mx;
            series[k].push((tau, *v));
        }
        for a in 0..4 {
            for b in a + 1..4 {
                overlap = overlap.max((vals[a] - vals[b]).abs());
            }
        }
        table.push(vec![
            Cell::Float(tau),
            Cell::Float(vals[0]),
            Cell::Float(vals[1]),
            Cell::Float(vals[2]),
            Cell::Float(vals[3]),
        ]);
    }
    manifest.record("overlap_sup_distance", serde_json::json!(overlap));
    write_table(&mut manifest, out_dir, "unit_cell", &table, opts)?;

    if opts.plot {
        let labels = ["k=0", "k=1", "k=2", "k=3"];
        let s: Vec<Series> = series
            .iter()
            .zip(labels)
            .map(|(pts, label)| Series { label, points: pts })
            .collect();
        let svg_text = svg::line_plot(&s, "Mx over one cell, four consecutive cells");
        write_plot(&mut manifest, out_dir, "unit_cell", &svg_text)?;
    }
    manifest.record_timing("total", t0.elapsed().as_secs_f64() * 1e3);
    Ok(manifest)
}

pub fn cmd_poincare(
    cfg: &ExperimentConfig,
    config_text: &str,
    out_dir: &Path,
    opts: &OutputOptions,
) -> Result<Manifest, CliError> {
    let t0 = Instant::now();
    let mut manifest = Manifest::new("poincare", config_text);
    let run = cfg.run().map_err(CliError::Config)?;
    let tau_end = run
        .tau_end_pi
        .ok_or_else(|| CliError::Config("poincare needs run.tau_end_pi".into()))?
        * PI;
    let filter = crossing_filter(run.crossing_direction.as_deref().unwrap_or("both"))
        .map_err(CliError::Config)?;
    let eps = run.epsilon.unwrap_or(1e-3);
    let init = cfg.initial_state().map_err(CliError::Config)?;
    let icfg = cfg.integrator_config().map_err(CliError::Config)?;

    let section = poincare_section(&init, tau_end, filter, &icfg)?;
    if section.degenerate {
        manifest.warn("electric field is identically zero; empty section");
    }

    let mut table = Table::new(&["tau", "mx", "my", "direction"]);
    for ((tau, (mx, my)), dir) in section
        .crossing_times
        .iter()
        .zip(&section.points)
        .zip(&section.directions)
    {
        table.push(vec![
            Cell::Float(*tau),
            Cell::Float(*mx),
            Cell::Float(*my),
            Cell::Int(*dir as i64),
        ]);
    }
    write_table(&mut manifest, out_dir, "section", &table, opts)?;

    let counts = epsilon_distinct_count(&section, eps)?;
    let mut count_table = Table::new(&["n", "distinct"]);
    for (i, c) in counts.iter().enumerate() {
        count_table.push(vec![Cell::Int(i as i64 + 1), Cell::Int(*c as i64)]);
    }
    write_table(&mut manifest, out_dir, "distinct_counts", &count_table, opts)?;
    manifest.record("epsilon", serde_json::json!(eps));
    manifest.record(
        "distinct_final",
        serde_json::json!(counts.last().copied().unwrap_or(0)),
    );
    manifest.record(
        "distinct_halfway",
        serde_json::json!(counts.get(counts.len() / 2).copied().unwrap_or(0)),
    );

    if opts.plot {
        let svg_text = svg::scatter_plot(
            &[Series {
                label: "(Mx, My) at P = 0",
                points: &section.points,
            }],
            "Poincare section",
        );
        write_plot(&mut manifest, out_dir, "section", &svg_text)?;
    }
    manifest.record_timing("total", t0.elapsed().as_secs_f64() * 1e3);
    Ok(manifest)
}

pub fn cmd_lyapunov(
    cfg: &ExperimentConfig,
    config_text: &str,
    out_dir: &Path,
    opts: &OutputOptions,
) -> Result<Manifest, CliError> {
    let t0 = Instant::now();
    let mut manifest = Manifest::new("lyapunov", config_text);
    let run = cfg.run().map_err(CliError::Config)?;
    let tau_total = run
        .tau_total_pi
        .ok_or_else(|| CliError::Config("lyapunov needs run.tau_total_pi".into()))?
        * PI;
    let renorm_dt = run.renorm_dt_pi.unwrap_or(0.5) * PI;
    let init = cfg.initial_state().map_err(CliError::Config)?;
    let mut lcfg = LyapunovConfig::default();
    if let Some(d) = run.delta0 {
        lcfg.delta0 = d;
    }
    if let Some(dir) = run.direction {
        lcfg.direction = dir;
    }

    let est = lyapunov_max(&init, tau_total, renorm_dt, &lcfg)?;
    let mut table = Table::new(&["tau", "lambda"]);
    for (tau, l) in &est.history {
        table.push(vec![Cell::Float(*tau), Cell::Float(*l)]);
    }
    write_table(&mut manifest, out_dir, "lyapunov", &table, opts)?;
    manifest.record("lambda_max", serde_json::json!(est.lambda_max));
    manifest.record("renorm_interval", serde_json::json!(est.renorm_interval));

    if opts.plot {
        let svg_text = svg::line_plot(
            &[Series {
                label: "running lambda",
                points: &est.history,
            }],
            "largest Lyapunov exponent",
        );
        write_plot(&mut manifest, out_dir, "lyapunov", &svg_text)?;
    }
    manifest.record_timing("total", t0.elapsed().as_secs_f64() * 1e3);
    Ok(manifest)
}

pub fn cmd_quantum(
    cfg: &ExperimentConfig,
    config_text: &str,
    out_dir: &Path,
    opts: &OutputOptions,
) -> Result<Manifest, CliError> {
    let t0 = Instant::now();
    let mut manifest = Manifest::new("quantum", config_text);
    let p = cfg
        .problem
        .as_ref()
        .ok_or_else(|| CliError::Config("quantum needs a [problem] section".into()))?;
    let slot = match p.free_slot.as_str() {
        "dphi1" => Slot::DPhi1,
        "dphi2" => Slot::DPhi2,
        other => {
            return Err(CliError::Config(format!("unknown free slot '{other}'")));
        }
    };
    let mut prob = ShootingProblem::standard(p.energy, slot)?;
    if let Some(y) = p.y_max {
        prob.y_max = y;
    }
    if let Some([lo, hi]) = p.bracket {
        prob.bracket = (lo, hi);
    }

    let sol = find_regular_derivative(&prob)?;
    let mut table = Table::new(&["y", "phi1", "phi2"]);
    for ((y, p1), p2) in sol.grid.iter().zip(&sol.phi1).zip(&sol.phi2) {
        table.push(vec![Cell::Float(*y), Cell::Float(*p1), Cell::Float(*p2)]);
    }
    write_table(&mut manifest, out_dir, "eigenfunction", &table, opts)?;
    manifest.record("energy", serde_json::json!(sol.energy));
    manifest.record("solved_free_value", serde_json::json!(sol.solved_free_value));
    manifest.record("defect", serde_json::json!(sol.defect));

    if opts.plot {
        let s1: Vec<(f64, f64)> = sol.grid.iter().copied().zip(sol.phi1.iter().copied()).collect();
        let s2: Vec<(f64, f64)> = sol.grid.iter().copied().zip(sol.phi2.iter().copied()).collect();
        let svg_text = svg::line_plot(
            &[
                Series {
                    label: "phi1",
                    points: &s1,
                },
                Series {
                    label: "phi2",
                    points: &s2,
                },
            ],
            &format!("eigenfunction components, energy {}", sol.energy),
        );
        write_plot(&mut manifest, out_dir, "eigenfunction", &svg_text)?;
    }
    manifest.record_timing("total", t0.elapsed().as_secs_f64() * 1e3);
    Ok(manifest)
}
