//! Dormand-Prince 5(4) with the classic quartic dense-output interpolant.
//!
//! Generic over the state dimension so the same core integrates the 5D
//! dynamical system and the 4D shooting equations.

use crate::error::{Error, Result};

// Butcher tableau of DP5.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Interpolant for one accepted step, valid on [t0, t0 + h].
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    /// Evaluate the interpolant at `t` (no extrapolation guard).
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + theta1
                            * (self.rcont[2][i]
                                + theta * (self.rcont[3][i] + theta1 * self.rcont[4][i])));
        }
        out
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Dense solution of an initial value problem on [t0, t_end].
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    pub steps: Vec<DenseStep<N>>,
    pub t_end: f64,
    pub y_end: [f64; N],
    pub stats: StepStats,
}

impl<const N: usize> DenseSolution<N> {
    /// Evaluate the solution at any `t` inside the integration range.
    pub fn eval(&self, t: f64) -> [f64; N] {
        debug_assert!(!self.steps.is_empty());
        // binary search for the step containing t
        let idx = self
            .steps
            .partition_point(|s| s.t_end() < t)
            .min(self.steps.len() - 1);
        self.steps[idx].eval(t)
    }
}

pub struct Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Optional stop condition: integration halts early when it returns true
    /// for the state at the end of an accepted step.
    pub max_abs: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            max_abs: f64::INFINITY,
        }
    }
}

fn scaled_err_norm<const N: usize>(
    err: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    rel: f64,
    abs: f64,
) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let sc = abs + rel * y0[i].abs().max(y1[i].abs());
        let r = err[i] / sc;
        sum += r * r;
    }
    (sum / N as f64).sqrt()
}

/// Integrate `dy/dt = f(t, y)` from `t0` to `t_end` (t_end > t0),
/// returning a dense solution over the whole interval.
pub fn integrate<const N: usize>(
    f: &mut dyn FnMut(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Options,
) -> Result<DenseSolution<N>> {
    if !(t_end > t0) {
        return Err(Error::InvalidParameter(format!(
            "t_end ({t_end}) must exceed t0 ({t0})"
        )));
    }
    if !(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0) {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }

    let mut stats = StepStats::default();
    let mut steps = Vec::new();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.rhs_evals += 1;

    // initial step size from the usual starting heuristic, clamped
    let span = t_end - t0;
    let mut h = initial_step(f, t, &y, &k1, opts, &mut stats).min(span).min(opts.max_step);

    let h_min = 16.0 * f64::EPSILON * span.abs().max(t0.abs()).max(1.0);

    while t < t_end {
        if h < h_min {
            return Err(Error::IntegrationFailure {
                tau: t,
                reason: format!("step size underflow (h = {h:.3e})"),
            });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let (y1, k, err) = dp5_step(f, t, &y, &k1, h, &mut stats);
        let err_norm = scaled_err_norm(&err, &y, &y1, opts.rel_tol, opts.abs_tol);

        if err_norm <= 1.0 {
            // accept; build the interpolant
            let mut rcont = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y1[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k[6][i] - bspl;
                let mut d = 0.0;
                for (j, dj) in D.iter().enumerate() {
                    d += dj * k[j][i];
                }
                rcont[4][i] = h * d;
            }
            steps.push(DenseStep { t0: t, h, rcont });
            t += h;
            y = y1;
            k1 = k[6]; // FSAL
            stats.accepted += 1;

            if !y.iter().all(|v| v.is_finite()) || y.iter().any(|v| v.abs() > opts.max_abs) {
                return Err(Error::IntegrationFailure {
                    tau: t,
                    reason: "solution escaped (non-finite or above max_abs)".into(),
                });
            }

            let fac = 0.9 * err_norm.powf(-0.2);
            h = (h * fac.clamp(0.2, 5.0)).min(opts.max_step);
        } else {
            stats.rejected += 1;
            let fac = 0.9 * err_norm.powf(-0.2);
            h *= fac.clamp(0.2, 1.0);
        }
    }

    Ok(DenseSolution {
        steps,
        t_end,
        y_end: y,
        stats,
    })
}

fn dp5_step<const N: usize>(
    f: &mut dyn FnMut(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    stats: &mut StepStats,
) -> ([f64; N], [[f64; N]; 7], [f64; N]) {
    let mut k = [[0.0; N]; 7];
    k[0] = *k1;

    let stage = |k: &[[f64; N]; 7], a: &[f64], y: &[f64; N]| -> [f64; N] {
        let mut out = *y;
        for (j, aj) in a.iter().enumerate() {
            if *aj != 0.0 {
                for i in 0..N {
                    out[i] += h * aj * k[j][i];
                }
            }
        }
        out
    };

    k[1] = f(t + C[1] * h, &stage(&k, &A2, y));
    k[2] = f(t + C[2] * h, &stage(&k, &A3, y));
    k[3] = f(t + C[3] * h, &stage(&k, &A4, y));
    k[4] = f(t + C[4] * h, &stage(&k, &A5, y));
    k[5] = f(t + C[5] * h, &stage(&k, &A6, y));
    let y1 = stage(&k, &A7, y);
    k[6] = f(t + h, &y1);
    stats.rhs_evals += 6;

    let mut err = [0.0; N];
    for i in 0..N {
        let mut e = 0.0;
        for (j, ej) in E.iter().enumerate() {
            e += ej * k[j][i];
        }
        err[i] = h * e;
    }
    (y1, k, err)
}

fn initial_step<const N: usize>(
    f: &mut dyn FnMut(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    opts: &Options,
    stats: &mut StepStats,
) -> f64 {
    let sc: Vec<f64> = y
        .iter()
        .map(|yi| opts.abs_tol + opts.rel_tol * yi.abs())
        .collect();
    let d0 = norm_scaled(y, &sc);
    let d1 = norm_scaled(k1, &sc);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h0 * k1[i];
    }
    let k2 = f(t + h0, &y1);
    stats.rhs_evals += 1;
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = k2[i] - k1[i];
    }
    let d2 = norm_scaled(&diff, &sc) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

fn norm_scaled<const N: usize>(v: &[f64; N], sc: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let r = v[i] / sc[i];
        sum += r * r;
    }
    (sum / N as f64).sqrt()
}
