//! Event location on dense trajectories: bracket a sign change on the
//! sample grid, then bisect on the interpolant.

use super::Trajectory;
use crate::dynamics::StateVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Event {
    pub tau: f64,
    pub state: StateVector,
    /// Near-tangent crossing: |dg/dtau| < 1e-8 at the root.
    pub tangent: bool,
}

#[derive(Debug, Clone, Default)]
pub struct EventList {
    pub events: Vec<Event>,
    /// The event function was indistinguishable from zero along the whole
    /// trajectory, so sign changes are meaningless.
    pub degenerate: bool,
}

const TAU_TOL: f64 = 1e-12;
const DEGENERATE_LEVEL: f64 = 1e-12;
const TANGENCY_LEVEL: f64 = 1e-8;

/// Find all roots of `event` along `traj`, ordered in tau.
/// Requires dense output.
pub fn locate_events<F>(traj: &Trajectory, event: F) -> Result<EventList>
where
    F: Fn(&StateVector) -> f64,
{
    if !traj.has_dense() {
        return Err(Error::InvalidParameter(
            "event location requires a trajectory with dense output".into(),
        ));
    }

    let g: Vec<f64> = traj.states.iter().map(|s| event(s)).collect();
    if g.iter().all(|v| v.abs() <= DEGENERATE_LEVEL) {
        return Ok(EventList {
            events: Vec::new(),
            degenerate: true,
        });
    }

    let mut events = Vec::new();
    for i in 1..traj.times.len() {
        let (ga, gb) = (g[i - 1], g[i]);
        if ga == 0.0 && i == 1 {
            // exact zero at the very first sample counts as a crossing only
            // if the function moves away from zero afterwards
            continue;
        }
        if ga * gb < 0.0 || (gb == 0.0 && ga != 0.0) {
            let (mut a, mut b) = (traj.times[i - 1], traj.times[i]);
            let mut ga = ga;
            while b - a > TAU_TOL {
                let mid = 0.5 * (a + b);
                let gm = event(&traj.eval(mid));
                if gm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if ga * gm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
            let tau = 0.5 * (a + b);
            let state = traj.eval(tau);
            // centered difference of g on the interpolant for the tangency flag
            let dt = 1e-6;
            let lo = traj.eval((tau - dt).max(0.0));
            let hi = traj.eval((tau + dt).min(traj.t_end()));
            let dg = (event(&hi) - event(&lo)) / (2.0 * dt);
            events.push(Event {
                tau,
                state,
                tangent: dg.abs() < TANGENCY_LEVEL,
            });
        }
    }
    Ok(EventList {
        events,
        degenerate: false,
    })
}

/// Sign changes of the electric field P, the surface used for the
/// Poincare section.
pub fn locate_p_crossings(traj: &Trajectory) -> Result<EventList> {
    locate_events(traj, |s| s.p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::StateVector;
    use crate::integrate::{integrate_adaptive, IntegratorConfig};

    #[test]
    fn fixed_point_is_degenerate() {
        let s0 = StateVector::new(0.0, 0.0, 0.0, 0.5, 0.0).unwrap();
        let traj = integrate_adaptive(&s0, 20.0, &IntegratorConfig::default()).unwrap();
        let ev = locate_p_crossings(&traj).unwrap();
        assert!(ev.degenerate);
        assert!(ev.events.is_empty());
    }

    #[test]
    fn p_crossing_found_and_refined() {
        // dP/dtau = -2 My = -2 initially, so P = 0.5 crosses zero before tau = 2
        let s0 = StateVector::new(0.0, 1.0, 0.0, 0.0, 0.5).unwrap();
        let traj = integrate_adaptive(&s0, 2.0, &IntegratorConfig::default()).unwrap();
        let ev = locate_p_crossings(&traj).unwrap();
        assert!(!ev.events.is_empty());
        let first = &ev.events[0];
        assert!(first.tau < 2.0);
        assert!(first.state.p.abs() <= 1e-10);
        assert!(!first.tangent);
    }

    #[test]
    fn events_are_ordered() {
        let s0 = crate::dynamics::standard_init(0.0843);
        let traj = integrate_adaptive(&s0, 50.0, &IntegratorConfig::default()).unwrap();
        let ev = locate_p_crossings(&traj).unwrap();
        assert!(ev.events.len() > 10);
        assert!(ev.events.windows(2).all(|w| w[0].tau < w[1].tau));
        for e in &ev.events {
            assert!(e.state.p.abs() <= 1e-10);
        }
    }
}
