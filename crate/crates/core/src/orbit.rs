//! Periodic-orbit (time-crystal) detection: recurrence residuals, period
//! estimation from spectra and recurrence minima, local refinement, and
//! grid scans over the free initial momentum X(0).

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::{num_complex::Complex64, FftPlanner};

use crate::chaos::{lyapunov_max, LyapunovConfig};
use crate::dynamics::{vector_field, StateVector};
use crate::error::{Error, Result};
use crate::integrate::{integrate_adaptive, IntegratorConfig, Trajectory};

/// Residual below which an orbit counts as periodic.
pub const PERIODIC_THRESHOLD: f64 = 1e-3;
/// Residual above which recurrence alone says nothing; Lyapunov decides.
pub const QUASIPERIODIC_THRESHOLD: f64 = 1e-1;
/// Lyapunov exponent above which an orbit counts as chaotic.
pub const CHAOS_LAMBDA_THRESHOLD: f64 = 0.01;

/// Default integration horizon for recurrence analysis.
pub fn default_horizon() -> f64 {
    200.0 * PI
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Periodic,
    Quasiperiodic,
    Chaotic,
    Undetermined,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Periodic => "periodic",
            Classification::Quasiperiodic => "quasiperiodic",
            Classification::Chaotic => "chaotic",
            Classification::Undetermined => "undetermined",
        };
        f.write_str(s)
    }
}

/// A candidate orbit: initial condition, estimated period, and the
/// recurrence residual certifying (or rejecting) periodicity.
#[derive(Debug, Clone)]
pub struct OrbitCandidate {
    pub init: StateVector,
    pub period: f64,
    pub residual: f64,
    pub classification: Classification,
    /// Lyapunov exponent, when it was needed for classification.
    pub lambda_max: Option<f64>,
    /// The initial condition is a fixed point (trivially periodic).
    pub degenerate: bool,
}

/// Scan window over X(0) with the remaining initial values held fixed.
#[derive(Debug, Clone)]
pub struct SearchWindow {
    pub x0_min: f64,
    pub x0_max: f64,
    pub grid_n: usize,
    /// Initial values for the non-scanned variables; its `x` is ignored.
    pub base_init: StateVector,
    pub tau_horizon: f64,
}

impl SearchWindow {
    pub fn validate(&self) -> Result<()> {
        if !(self.x0_min < self.x0_max) && self.grid_n > 1 {
            return Err(Error::InvalidParameter("x0_min must be below x0_max".into()));
        }
        if self.grid_n < 1 {
            return Err(Error::InvalidParameter("grid_n must be at least 1".into()));
        }
        if !(self.tau_horizon > 0.0) {
            return Err(Error::InvalidParameter("tau_horizon must be positive".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.grid_n == 1 {
            return vec![self.x0_min];
        }
        let step = (self.x0_max - self.x0_min) / (self.grid_n - 1) as f64;
        (0..self.grid_n).map(|i| self.x0_min + i as f64 * step).collect()
    }
}

/// Euclidean distance between the state at tau = T and at tau = 0,
/// the quantitative form of superimposing shifted plots.
pub fn recurrence_residual(init: &StateVector, period: f64, cfg: &IntegratorConfig) -> Result<f64> {
    if !(period > 0.0) {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    let cfg = tightened(cfg);
    let traj = integrate_adaptive(init, period, &cfg)?;
    Ok(traj.states.last().unwrap().distance(init))
}

fn tightened(cfg: &IntegratorConfig) -> IntegratorConfig {
    IntegratorConfig {
        rel_tol: cfg.rel_tol.min(1e-10),
        abs_tol: cfg.abs_tol.min(1e-12),
        ..*cfg
    }
}

fn is_fixed_point(s: &StateVector) -> bool {
    vector_field(s)
        .map(|d| d.to_array().iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-14)
        .unwrap_or(false)
}

/// Recurrence function R(T) = |z(T) - z(0)| evaluated from a trajectory.
fn recurrence_at(traj: &Trajectory, period: f64) -> f64 {
    traj.eval(period).distance(&traj.states[0])
}

/// Period candidates from (a) the dominant low-frequency spectral peak of
/// Mx and (b) minima of the recurrence function over a T-grid, merged and
/// sorted by recurrence score (lower is better).
pub fn estimate_period(traj: &Trajectory) -> Vec<(f64, f64)> {
    let horizon = traj.t_end();
    let t_min = 2.0 * PI;
    let t_max = horizon / 2.0;
    if t_max <= t_min {
        return Vec::new();
    }

    // constant trajectories carry no period
    let s0 = &traj.states[0];
    let amplitude = traj
        .states
        .iter()
        .map(|s| s.distance(s0))
        .fold(0.0, f64::max);
    if amplitude < 1e-12 {
        return Vec::new();
    }

    let mut raw: Vec<(f64, f64)> = Vec::new();

    // recurrence-minima route
    let grid_dt = (traj.times[1] - traj.times[0]).min(PI / 50.0);
    let n = ((t_max - t_min) / grid_dt) as usize;
    let r: Vec<f64> = (0..=n)
        .map(|i| recurrence_at(traj, t_min + i as f64 * grid_dt))
        .collect();
    let noise_floor = amplitude * 0.25;
    for i in 1..r.len() - 1 {
        if r[i] <= r[i - 1] && r[i] <= r[i + 1] && r[i] < noise_floor {
            let t = t_min + i as f64 * grid_dt;
            let (t_ref, r_ref) = golden_min(
                |tt| recurrence_at(traj, tt),
                t - grid_dt,
                t + grid_dt,
                1e-6,
            );
            raw.push((t_ref, r_ref));
        }
    }

    // spectral route on Mx; only meaningful for uniform sampling
    if let Some(t_spec) = spectral_candidate(traj, t_min, t_max) {
        let (t_ref, r_ref) = golden_min(
            |tt| recurrence_at(traj, tt),
            t_spec * 0.99,
            t_spec * 1.01,
            1e-6,
        );
        raw.push((t_ref, r_ref));
    }

    // deduplicate within 1%
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (t, r) in raw {
        match merged.last_mut() {
            Some((tm, rm)) if (t - *tm).abs() <= 0.01 * *tm => {
                if r < *rm {
                    *tm = t;
                    *rm = r;
                }
            }
            _ => merged.push((t, r)),
        }
    }
    merged.retain(|&(_, r)| r < noise_floor);
    merged.sort_by(|a, b| a.1.total_cmp(&b.1));
    merged
}

/// Dominant low-frequency peak of the Mx spectrum after mean removal and
/// Hann windowing; returns the corresponding period.
fn spectral_candidate(traj: &Trajectory, t_min: f64, t_max: f64) -> Option<f64> {
    let n = traj.times.len();
    if n < 16 {
        return None;
    }
    let dt = traj.times[1] - traj.times[0];
    // require uniform sampling (the final sample may be off-grid)
    let uniform = traj
        .times
        .windows(2)
        .take(n - 2)
        .all(|w| ((w[1] - w[0]) - dt).abs() < 1e-9 * dt.max(1.0));
    if !uniform {
        return None;
    }
    let n_fft = n - 1;
    let mean = traj.states[..n_fft].iter().map(|s| s.mx).sum::<f64>() / n_fft as f64;
    let mut buf: Vec<Complex64> = (0..n_fft)
        .map(|i| {
            let w = 0.5 * (1.0 - (2.0 * PI * i as f64 / (n_fft - 1) as f64).cos());
            Complex64::new((traj.states[i].mx - mean) * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);

    let df = 2.0 * PI / (n_fft as f64 * dt); // angular frequency resolution
    let lo = ((2.0 * PI / t_max) / df).ceil() as usize;
    let hi = (((2.0 * PI / t_min) / df).floor() as usize).min(n_fft / 2);
    if lo >= hi || lo == 0 {
        return None;
    }
    let (k, mag) = (lo..=hi)
        .map(|k| (k, buf[k].norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    // ignore peaks indistinguishable from spectral leakage
    let total: f64 = buf[1..n_fft / 2].iter().map(|c| c.norm()).sum();
    if mag < 1e-3 * total {
        return None;
    }
    // parabolic interpolation of the peak bin
    let (ym, y0, yp) = (buf[k - 1].norm(), buf[k].norm(), buf[k + 1].norm());
    let denom = ym - 2.0 * y0 + yp;
    let shift = if denom.abs() > 0.0 {
        0.5 * (ym - yp) / denom
    } else {
        0.0
    };
    let omega = (k as f64 + shift) * df;
    Some(2.0 * PI / omega)
}

/// Period of the fast (Zitterbewegung) oscillation at momentum X.
pub fn zitter_period(x: f64) -> f64 {
    PI / (1.0 + x * x).sqrt()
}

fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm <= fc && fm <= fd {
        (mid, fm)
    } else if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Locally minimize the recurrence residual over (X(0), T) by coordinate
/// descent with golden-section line searches in a box of +-2% in T and
/// +-0.01 in X(0) around the seed.
pub fn refine_orbit(
    init: &StateVector,
    t_guess: f64,
    cfg: &IntegratorConfig,
) -> Result<OrbitCandidate> {
    if !(t_guess > 0.0) {
        return Err(Error::InvalidParameter("T guess must be positive".into()));
    }
    if is_fixed_point(init) {
        return Ok(OrbitCandidate {
            init: *init,
            period: t_guess,
            residual: 0.0,
            classification: Classification::Periodic,
            lambda_max: None,
            degenerate: true,
        });
    }

    let cfg = tightened(cfg);
    let (t_lo, t_hi) = (0.98 * t_guess, 1.02 * t_guess);
    let (x_lo, x_hi) = (init.x - 0.01, init.x + 0.01);

    let mut best_t = t_guess;
    let mut best_x = init.x;
    let mut best_r = recurrence_residual(&StateVector { x: best_x, ..*init }, best_t, &cfg)?;

    for _round in 0..3 {
        // T line search reuses one dense trajectory
        let probe = StateVector { x: best_x, ..*init };
        let traj = integrate_adaptive(&probe, t_hi * 1.001, &cfg)?;
        let (t_new, r_new) = golden_min(|t| recurrence_at(&traj, t), t_lo, t_hi, 1e-9 * t_guess);
        if r_new < best_r {
            best_t = t_new;
            best_r = r_new;
        }

        // X(0) line search at the current period
        let (x_new, r_new) = golden_min(
            |x| {
                let s = StateVector { x, ..*init };
                recurrence_residual(&s, best_t, &cfg).unwrap_or(f64::INFINITY)
            },
            x_lo,
            x_hi,
            1e-8,
        );
        if r_new < best_r {
            best_x = x_new;
            best_r = r_new;
        }
        if best_r < 1e-12 {
            break;
        }
    }

    let refined = StateVector { x: best_x, ..*init };
    let boundary_eps_t = 1e-4 * (t_hi - t_lo);
    let boundary_eps_x = 1e-4 * (x_hi - x_lo);
    let on_boundary = (best_t - t_lo).abs() < boundary_eps_t
        || (t_hi - best_t).abs() < boundary_eps_t
        || (best_x - x_lo).abs() < boundary_eps_x
        || (x_hi - best_x).abs() < boundary_eps_x;

    let (classification, lambda) = if on_boundary {
        (Classification::Undetermined, None)
    } else {
        classify(&refined, best_r)?
    };

    Ok(OrbitCandidate {
        init: refined,
        period: best_t,
        residual: best_r,
        classification,
        lambda_max: lambda,
        degenerate: false,
    })
}

/// Classify by recurrence residual, consulting the Lyapunov exponent in
/// the ambiguous range.
fn classify(init: &StateVector, residual: f64) -> Result<(Classification, Option<f64>)> {
    if residual <= PERIODIC_THRESHOLD {
        return Ok((Classification::Periodic, None));
    }
    let est = lyapunov_max(init, 500.0, PI / 2.0, &LyapunovConfig::default())?;
    let l = est.lambda_max;
    let class = if l > CHAOS_LAMBDA_THRESHOLD {
        Classification::Chaotic
    } else if residual <= QUASIPERIODIC_THRESHOLD {
        Classification::Quasiperiodic
    } else {
        Classification::Undetermined
    };
    Ok((class, Some(l)))
}

/// Outcome of a window scan; grid points whose integration failed are
/// recorded instead of aborting the whole scan.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    /// Candidates sorted by residual (ties by X(0) grid order).
    pub candidates: Vec<OrbitCandidate>,
    pub failures: Vec<(f64, String)>,
}

/// Scan X(0) over the window: integrate each grid point, estimate its
/// period, refine the most plausible candidate. Deterministic for a fixed
/// configuration; grid points run concurrently.
pub fn scan_time_crystals(win: &SearchWindow, cfg: &IntegratorConfig) -> Result<ScanOutcome> {
    win.validate()?;
    let cfg = tightened(cfg);

    let results: Vec<(usize, std::result::Result<Option<OrbitCandidate>, String>)> = win
        .grid()
        .par_iter()
        .enumerate()
        .map(|(i, &x0)| {
            let init = StateVector { x: x0, ..win.base_init };
            let out = scan_point(&init, win.tau_horizon, &cfg).map_err(|e| e.to_string());
            (i, out)
        })
        .collect();

    let mut candidates = Vec::new();
    let mut failures = Vec::new();
    for (i, res) in results {
        match res {
            Ok(Some(c)) => candidates.push((i, c)),
            Ok(None) => {}
            Err(msg) => failures.push((win.grid()[i], msg)),
        }
    }
    candidates.sort_by(|a, b| a.1.residual.total_cmp(&b.1.residual).then(a.0.cmp(&b.0)));
    Ok(ScanOutcome {
        candidates: candidates.into_iter().map(|(_, c)| c).collect(),
        failures,
    })
}

fn scan_point(
    init: &StateVector,
    tau_horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Option<OrbitCandidate>> {
    if is_fixed_point(init) {
        return Ok(Some(OrbitCandidate {
            init: *init,
            period: 0.0,
            residual: 0.0,
            classification: Classification::Periodic,
            lambda_max: None,
            degenerate: true,
        }));
    }
    let traj = integrate_adaptive(init, tau_horizon, cfg)?;
    let cands = estimate_period(&traj);
    let Some(&(_, best_score)) = cands.first() else {
        return Ok(None);
    };
    // among candidates of comparable score, prefer the shortest period
    // (multiples of the fundamental recur equally well)
    let pick = cands
        .iter()
        .filter(|&&(_, s)| s <= 2.0 * best_score.max(1e-12))
        .map(|&(t, _)| t)
        .fold(f64::INFINITY, f64::min);
    let refined = refine_orbit(init, pick, cfg)?;
    Ok(Some(refined))
}
