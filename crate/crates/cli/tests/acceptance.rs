//! End-to-end acceptance gate. Each test prints a single
//! `criterion N (<name>): PASS|FAIL` line with supporting detail and then
//! asserts, so the suite doubles as a readable report.
//!
//! Criteria 2 and 7 encode reference values that the implementation cannot
//! reproduce as stated; the analysis is recorded in the project notes. They
//! are kept faithful here and are expected to fail.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use timecrystal::chaos::{
    epsilon_distinct_count, lyapunov_max, poincare_section, DirectionFilter, LyapunovConfig,
};
use timecrystal::dynamics::{standard_init, StateVector};
use timecrystal::integrate::{
    integrate_adaptive, integrate_splitting, IntegratorConfig, Method,
};
use timecrystal::orbit::{
    scan_time_crystals, Classification, OrbitCandidate, ScanOutcome, SearchWindow,
};
use timecrystal::quantum::{
    coupling_full, find_regular_derivative, find_regular_derivative_with_coupling, grid_residual,
    mirror_solution, shoot, ShootingProblem, Slot,
};

fn report(criterion: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status} — {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_1_conservation() {
    let init = standard_init(0.2509);
    let cfg = IntegratorConfig::default(); // rel_tol 1e-10
    let adaptive = integrate_adaptive(&init, 200.0 * PI, &cfg).unwrap();
    let split_cfg = IntegratorConfig {
        method: Method::StrangSplit,
        fixed_dt: 1e-3,
        ..cfg
    };
    let split = integrate_splitting(&init, 200.0 * PI, &split_cfg).unwrap();

    let dh = adaptive.stats.max_hamiltonian_drift;
    let dc = adaptive.stats.max_casimir_drift;
    let dc_split = split.stats.max_casimir_drift;
    let pass = dh <= 1e-8 && dc <= 1e-8 && dc_split <= 1e-13;
    report(
        "1 (conservation)",
        pass,
        &format!(
            "adaptive |dH| = {dh:.2e}, |dM2| = {dc:.2e} (<= 1e-8); splitting |dM2| = {dc_split:.2e} (<= 1e-13)"
        ),
    );
}

// ---------------------------------------------------------------- criterion 2

struct CrystalCase {
    name: &'static str,
    x0_min: f64,
    x0_max: f64,
    grid_n: usize,
    x0_ref: f64,
    period_ref_pi: f64,
}

const CASES: [CrystalCase; 4] = [
    CrystalCase {
        name: "window around -0.12171",
        x0_min: -0.13671,
        x0_max: -0.10671,
        grid_n: 61,
        x0_ref: -0.12171,
        period_ref_pi: 27.43,
    },
    CrystalCase {
        name: "window around -0.045",
        x0_min: -0.06,
        x0_max: -0.03,
        grid_n: 61,
        x0_ref: -0.045,
        period_ref_pi: 20.0,
    },
    CrystalCase {
        name: "window around 0.0843",
        x0_min: 0.0693,
        x0_max: 0.0993,
        grid_n: 61,
        x0_ref: 0.0843,
        period_ref_pi: 12.465,
    },
    CrystalCase {
        name: "window around 0.2509",
        x0_min: 0.24,
        x0_max: 0.26,
        grid_n: 41,
        x0_ref: 0.2509,
        period_ref_pi: 23.025,
    },
];

fn scans() -> &'static [ScanOutcome; 4] {
    static SCANS: OnceLock<[ScanOutcome; 4]> = OnceLock::new();
    SCANS.get_or_init(|| {
        let cfg = IntegratorConfig::default();
        let run = |c: &CrystalCase| {
            let win = SearchWindow {
                x0_min: c.x0_min,
                x0_max: c.x0_max,
                grid_n: c.grid_n,
                base_init: standard_init(0.0),
                tau_horizon: 200.0 * PI,
            };
            scan_time_crystals(&win, &cfg).unwrap()
        };
        [run(&CASES[0]), run(&CASES[1]), run(&CASES[2]), run(&CASES[3])]
    })
}

#[test]
fn criterion_2_time_crystal_reproduction() {
    let mut all = true;
    let mut details = Vec::new();
    for (case, outcome) in CASES.iter().zip(scans().iter()) {
        let t_ref = case.period_ref_pi * PI;
        let matched = outcome.candidates.iter().find(|c| {
            (c.init.x - case.x0_ref).abs() <= 0.002
                && (c.period - t_ref).abs() / t_ref <= 0.02
                && c.residual <= 1e-3
        });
        match matched {
            Some(c) => details.push(format!(
                "{}: matched X0 = {:.5}, T = {:.3}pi, residual {:.1e}",
                case.name,
                c.init.x,
                c.period / PI,
                c.residual
            )),
            None => {
                all = false;
                // nearest candidate by X0 for the report
                let near = outcome
                    .candidates
                    .iter()
                    .min_by(|a, b| {
                        (a.init.x - case.x0_ref)
                            .abs()
                            .total_cmp(&(b.init.x - case.x0_ref).abs())
                    });
                let info = near.map_or("no candidates".to_string(), |c| {
                    format!(
                        "closest: X0 = {:.5}, T = {:.3}pi, residual {:.1e}, {}",
                        c.init.x,
                        c.period / PI,
                        c.residual,
                        c.classification
                    )
                });
                details.push(format!(
                    "{}: no candidate with X0 within 0.002 of {:.5}, T within 2% of {}pi and residual <= 1e-3 ({info})",
                    case.name, case.x0_ref, case.period_ref_pi
                ));
            }
        }
    }
    report("2 (time-crystal reproduction)", all, &details.join("; "));
}

// ---------------------------------------------------------------- criterion 3

fn hann_fft_peak(samples: &[f64], dt: f64, omega_min: f64) -> f64 {
    use rustfft::{num_complex::Complex64, FftPlanner};
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = 0.5 * (1.0 - (2.0 * PI * i as f64 / (n - 1) as f64).cos());
            Complex64::new((v - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let domega = 2.0 * PI / (n as f64 * dt);
    let k_lo = (omega_min / domega).ceil() as usize;
    let (k, _) = (k_lo..n / 2)
        .map(|k| (k, buf[k].norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    // parabolic interpolation around the winning bin
    let (ym, y0, yp) = (buf[k - 1].norm(), buf[k].norm(), buf[k + 1].norm());
    let denom = ym - 2.0 * y0 + yp;
    let shift = if denom.abs() > 0.0 {
        0.5 * (ym - yp) / denom
    } else {
        0.0
    };
    (k as f64 + shift) * domega
}

#[test]
fn criterion_3_fast_period_near_pi() {
    let cfg = IntegratorConfig::default();
    let traj = integrate_adaptive(&standard_init(0.2509), 100.0 * PI, &cfg).unwrap();
    let mx: Vec<f64> = traj.states.iter().map(|s| s.mx).collect();
    // fast oscillation: search above omega = 1 (periods below 2 pi)
    let omega = hann_fft_peak(&mx, cfg.sample_dt, 1.0);
    let period = 2.0 * PI / omega;
    let pass = (period - PI).abs() / PI <= 0.05;
    report(
        "3 (fast oscillation period)",
        pass,
        &format!("dominant short period {:.4}pi, within 5% of pi", period / PI),
    );
}

// ---------------------------------------------------------------- criterion 4

fn best_periodic(outcome: &ScanOutcome) -> Option<&OrbitCandidate> {
    outcome
        .candidates
        .iter()
        .find(|c| c.classification == Classification::Periodic && !c.degenerate)
}

#[test]
fn criterion_4_unit_cell_overlap() {
    let cfg = IntegratorConfig::default();
    let mut all = true;
    let mut details = Vec::new();
    for (case, outcome) in CASES.iter().zip(scans().iter()) {
        let Some(cand) = best_periodic(outcome) else {
            all = false;
            details.push(format!("{}: no certified periodic orbit", case.name));
            continue;
        };
        let traj = integrate_adaptive(&cand.init, 4.0 * cand.period, &cfg).unwrap();
        let n = ((cand.period / cfg.sample_dt).ceil() as usize).max(2);
        let mut overlap: f64 = 0.0;
        for i in 0..=n {
            let tau = cand.period * i as f64 / n as f64;
            let vals: Vec<f64> = (0..4)
                .map(|k| traj.eval(tau + k as f64 * cand.period).mx)
                .collect();
            for a in 0..4 {
                for b in a + 1..4 {
                    overlap = overlap.max((vals[a] - vals[b]).abs());
                }
            }
        }
        let ok = overlap <= 1e-2;
        all &= ok;
        details.push(format!(
            "{}: X0 = {:.5}, T = {:.3}pi, overlap {:.1e}",
            case.name,
            cand.init.x,
            cand.period / PI,
            overlap
        ));
    }
    report("4 (unit-cell overlap)", all, &details.join("; "));
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_5_chaos_dichotomy() {
    let cfg = IntegratorConfig::default();
    let tau_end = 50.0 * 12.465 * PI;
    let eps = 1e-3;

    let regular = poincare_section(
        &standard_init(0.0843),
        tau_end,
        DirectionFilter::Both,
        &cfg,
    )
    .unwrap();
    let counts_r = epsilon_distinct_count(&regular, eps).unwrap();
    let plateau = counts_r.last() == counts_r.get(counts_r.len() / 2);

    let chaotic_init = StateVector {
        mz: 0.1743,
        ..standard_init(0.0843)
    };
    let chaotic = poincare_section(&chaotic_init, tau_end, DirectionFilter::Both, &cfg).unwrap();
    let counts_c = epsilon_distinct_count(&chaotic, eps).unwrap();
    let growing = counts_c.last().unwrap() > &(counts_c[counts_c.len() / 2] + 10);

    let lcfg = LyapunovConfig::default();
    let l_regular = lyapunov_max(&standard_init(0.0843), 500.0, PI / 2.0, &lcfg)
        .unwrap()
        .lambda_max;
    let l_chaotic = lyapunov_max(&chaotic_init, 500.0, PI / 2.0, &lcfg)
        .unwrap()
        .lambda_max;

    let pass = plateau && l_regular.abs() <= 0.01 && growing && l_chaotic >= 0.02;
    report(
        "5 (chaos dichotomy)",
        pass,
        &format!(
            "regular: counts {} -> {} (plateau: {plateau}), lambda = {l_regular:.4}; \
             perturbed Mz(0)=0.1743: counts {} -> {} (growing: {growing}), lambda = {l_chaotic:.4}",
            counts_r[counts_r.len() / 2],
            counts_r.last().unwrap(),
            counts_c[counts_c.len() / 2],
            counts_c.last().unwrap()
        ),
    );
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn criterion_6_quantum_boundary_values() {
    let solve = |energy: f64, slot: Slot, y_max: f64| {
        let prob = ShootingProblem {
            y_max,
            ..ShootingProblem::standard(energy, slot).unwrap()
        };
        find_regular_derivative(&prob).unwrap().solved_free_value
    };
    let v1 = solve(2.0, Slot::DPhi2, 12.0);
    let v2 = solve(2.0, Slot::DPhi1, 12.0);
    let v3 = solve(5.0, Slot::DPhi1, 12.0);
    let stab = (solve(2.0, Slot::DPhi2, 10.0) - solve(2.0, Slot::DPhi2, 14.0)).abs();

    let ok1 = (v1 - (-0.354651985)).abs() <= 1e-4;
    let ok2 = (v2 - (-0.665192338)).abs() <= 1e-4;
    let ok3 = (v3 - (-0.36012)).abs() <= 1e-3;
    let ok4 = stab <= 1e-5;
    report(
        "6 (quantum boundary values)",
        ok1 && ok2 && ok3 && ok4,
        &format!(
            "energy 2 first: {v1:.9} (ref -0.354651985); energy 2 second: {v2:.9} \
             (ref -0.665192338); energy 5: {v3:.5} (ref -0.36012); y_max 10 vs 14 spread {stab:.1e}"
        ),
    );
}

// ---------------------------------------------------------------- criterion 7

#[test]
fn criterion_7_eigen_residual_and_mirror() {
    let prob = ShootingProblem::standard(2.0, Slot::DPhi2).unwrap();
    let sol = find_regular_derivative(&prob).unwrap();
    let residual = grid_residual(&sol, prob.y_max - 1.0);
    let ok_residual = residual <= 1e-6;

    let mir = mirror_solution(&sol);
    let mprob = ShootingProblem {
        energy: sol.energy,
        fixed_ics: mir.ics,
        free_slot: mir.free_slot,
        y_max: prob.y_max,
        bracket: prob.bracket,
    };
    let d_orig = shoot(&prob, sol.solved_free_value).unwrap().abs();
    let d_mirror = shoot(&mprob, mir.solved_free_value).unwrap().abs();
    let ok_mirror = d_mirror <= 10.0 * d_orig.max(1e-9);

    report(
        "7 (eigen residual and mirror)",
        ok_residual && ok_mirror,
        &format!(
            "sup residual on |y| <= 11: {residual:.2e} (<= 1e-6); mirror defect {d_mirror:.2e} \
             vs original {d_orig:.2e} (<= 10x)"
        ),
    );
}

// ---------------------------------------------------------------- criterion 8

fn airy_ai(z: f64) -> (f64, f64) {
    const AI0: f64 = 0.355_028_053_887_817_24;
    const DAI0: f64 = -0.258_819_403_792_806_80;
    let mut cf = vec![0.0f64; 120];
    let mut cg = vec![0.0f64; 120];
    cf[0] = 1.0;
    cg[1] = 1.0;
    for n in 1..118 {
        let fac = ((n + 2) * (n + 1)) as f64;
        cf[n + 2] = cf[n - 1] / fac;
        cg[n + 2] = cg[n - 1] / fac;
    }
    let (mut f, mut df, mut g, mut dg) = (0.0, 0.0, 0.0, 0.0);
    let mut zn = 1.0;
    for n in 0..120 {
        f += cf[n] * zn;
        g += cg[n] * zn;
        if n + 1 < 120 {
            df += cf[n + 1] * (n + 1) as f64 * zn;
            dg += cg[n + 1] * (n + 1) as f64 * zn;
        }
        zn *= z;
    }
    (AI0 * f + DAI0 * g, AI0 * df + DAI0 * dg)
}

#[test]
fn criterion_8_oracle_equivalence() {
    // decoupled shooting vs independent Airy series
    let energy = 2.0;
    let shift = energy / 2f64.powf(1.0 / 3.0);
    let prob = ShootingProblem {
        energy,
        fixed_ics: [1.0, 0.0, 0.0, 0.0],
        free_slot: Slot::DPhi1,
        y_max: 12.0,
        bracket: (-2.0, 2.0),
    };
    let solved = find_regular_derivative_with_coupling(&prob, 0.0)
        .unwrap()
        .solved_free_value;
    let (ai, dai) = airy_ai(-shift);
    let airy_err = (solved - dai / ai).abs();

    // adaptive vs splitting at tau = pi
    let cfg = IntegratorConfig::default();
    let split_cfg = IntegratorConfig {
        method: Method::StrangSplit,
        fixed_dt: 1e-4,
        ..cfg
    };
    let init = standard_init(0.2509);
    let a = integrate_adaptive(&init, PI, &cfg).unwrap();
    let s = integrate_splitting(&init, PI, &split_cfg).unwrap();
    let (ea, es) = (a.states.last().unwrap().to_array(), s.states.last().unwrap().to_array());
    let max_diff = ea
        .iter()
        .zip(&es)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0f64, f64::max);

    let pass = airy_err <= 1e-6 && max_diff <= 1e-6;
    report(
        "8 (oracle equivalence)",
        pass,
        &format!(
            "decoupled shooting vs Airy series: {airy_err:.2e} (<= 1e-6); \
             adaptive vs splitting at tau = pi: {max_diff:.2e} per component (<= 1e-6)"
        ),
    );
    let _ = coupling_full(); // silence unused import when features change
}

// ---------------------------------------------------------------- criterion 9

#[test]
fn criterion_9_determinism() {
    let bin = env!("CARGO_BIN_EXE_timecrystal");
    let config_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let tmp = tempfile::tempdir().unwrap();

    let mut all = true;
    let mut details = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(&config_dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    assert_eq!(entries.len(), 11, "expected the 11 shipped figure configs");

    for config in entries {
        let stem = config.file_stem().unwrap().to_string_lossy().to_string();
        let command = std::fs::read_to_string(&config)
            .unwrap()
            .lines()
            .find_map(|l| {
                l.strip_prefix("command = ")
                    .map(|v| v.trim_matches('"').to_string())
            })
            .unwrap();
        let mut digests = Vec::new();
        for round in 0..2 {
            let out = tmp.path().join(format!("{stem}_{round}"));
            let status = Command::new(bin)
                .args([
                    &command,
                    "--config",
                    config.to_str().unwrap(),
                    "--out",
                    out.to_str().unwrap(),
                ])
                .status()
                .unwrap();
            if !status.success() {
                all = false;
                details.push(format!("{stem}: run {round} exited with {status}"));
                continue;
            }
            // digest = all table/plot bytes + the manifest's checksum section
            let manifest: serde_json::Value =
                serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
                    .unwrap();
            let mut digest = String::new();
            for entry in manifest["outputs"].as_array().unwrap() {
                digest.push_str(&format!(
                    "{}:{};",
                    entry["file"].as_str().unwrap(),
                    entry["sha256"].as_str().unwrap()
                ));
            }
            digests.push(digest);
        }
        if digests.len() == 2 && digests[0] != digests[1] {
            all = false;
            details.push(format!("{stem}: reruns differ"));
        }
    }
    if details.is_empty() {
        details.push("all 11 shipped configs byte-identical across reruns".into());
    }
    report("9 (determinism)", all, &details.join("; "));
}
