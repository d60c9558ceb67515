//! State space of the reduced pair-field model.
//!
//! The model couples three pseudo-spin components (Mx, My, Mz) to a
//! dimensionless kinetic momentum X and electric field P. The flow
//! conserves a Hamiltonian and the squared spin length (Casimir).

use crate::error::{Error, Result};

/// The five dimensionless dynamical variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
    pub x: f64,
    pub p: f64,
}

impl StateVector {
    pub fn new(mx: f64, my: f64, mz: f64, x: f64, p: f64) -> Result<Self> {
        let s = Self { mx, my, mz, x, p };
        if !s.is_finite() {
            return Err(Error::NonFinite {
                context: "StateVector::new",
            });
        }
        Ok(s)
    }

    pub fn is_finite(&self) -> bool {
        self.mx.is_finite()
            && self.my.is_finite()
            && self.mz.is_finite()
            && self.x.is_finite()
            && self.p.is_finite()
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.mx, self.my, self.mz, self.x, self.p]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self {
            mx: a[0],
            my: a[1],
            mz: a[2],
            x: a[3],
            p: a[4],
        }
    }

    /// Unweighted Euclidean distance over the five components.
    pub fn distance(&self, other: &StateVector) -> f64 {
        let d = [
            self.mx - other.mx,
            self.my - other.my,
            self.mz - other.mz,
            self.x - other.x,
            self.p - other.p,
        ];
        d.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Time derivative of a `StateVector`.
#[derive(Debug, Clone, Copy)]
pub struct StateDerivative {
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
    pub x: f64,
    pub p: f64,
}

impl StateDerivative {
    pub fn to_array(&self) -> [f64; 5] {
        [self.mx, self.my, self.mz, self.x, self.p]
    }
}

/// Physical scales mapping model units to the dimensionless variables.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalScales {
    /// Electron mass.
    pub m: f64,
    /// Elementary charge.
    pub e: f64,
    /// Current-coupling constant.
    pub gamma: f64,
    /// Canonical momentum, absorbed into X.
    pub p_c: f64,
}

impl PhysicalScales {
    pub fn new(m: f64, e: f64, gamma: f64, p_c: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
        }
        Ok(Self { m, e, gamma, p_c })
    }
}

/// Physical-side variables of the dimensionless map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalState {
    pub f3: f64,
    pub g1: f64,
    pub g2: f64,
    pub a: f64,
    pub e_field: f64,
    pub t: f64,
}

/// Right-hand side of the equations of motion:
/// dMx = 2 X Mz, dMy = -2 Mz, dMz = 2 My - 2 X Mx, dX = P, dP = -2 My.
pub fn vector_field(s: &StateVector) -> Result<StateDerivative> {
    if !s.is_finite() {
        return Err(Error::NonFinite {
            context: "vector_field",
        });
    }
    Ok(vector_field_unchecked(s))
}

#[inline]
pub(crate) fn vector_field_unchecked(s: &StateVector) -> StateDerivative {
    StateDerivative {
        mx: 2.0 * s.x * s.mz,
        my: -2.0 * s.mz,
        mz: 2.0 * s.my - 2.0 * s.x * s.mx,
        x: s.p,
        p: -2.0 * s.my,
    }
}

/// First constant of motion: H = P^2/2 + 2 X My + 2 Mx.
pub fn hamiltonian(s: &StateVector) -> f64 {
    s.p * s.p / 2.0 + 2.0 * s.x * s.my + 2.0 * s.mx
}

/// Second constant of motion: the squared spin length Mx^2 + My^2 + Mz^2.
pub fn casimir(s: &StateVector) -> f64 {
    s.mx * s.mx + s.my * s.my + s.mz * s.mz
}

/// Map physical variables to the dimensionless state and time.
pub fn to_dimensionless(phys: &PhysicalScales, state: &PhysicalState) -> Result<(StateVector, f64)> {
    if !(phys.m > 0.0) {
        return Err(Error::InvalidParameter("mass must be positive".into()));
    }
    let k = phys.e * phys.gamma / (2.0 * phys.m);
    let s = StateVector::new(
        k * state.f3,
        k * state.g1,
        k * state.g2,
        -phys.e * state.a / phys.m + phys.p_c / phys.m,
        phys.e * state.e_field / phys.m,
    )?;
    Ok((s, phys.m * state.t))
}

/// Inverse of [`to_dimensionless`]; requires a non-zero coupling.
pub fn from_dimensionless(phys: &PhysicalScales, s: &StateVector, tau: f64) -> Result<PhysicalState> {
    if !(phys.m > 0.0) {
        return Err(Error::InvalidParameter("mass must be positive".into()));
    }
    if phys.gamma == 0.0 {
        return Err(Error::InvalidParameter(
            "gamma must be non-zero to invert the dimensionless map".into(),
        ));
    }
    let k = 2.0 * phys.m / (phys.e * phys.gamma);
    Ok(PhysicalState {
        f3: k * s.mx,
        g1: k * s.my,
        g2: k * s.mz,
        a: (phys.p_c - phys.m * s.x) / phys.e,
        e_field: phys.m * s.p / phys.e,
        t: tau / phys.m,
    })
}

/// Number of pairs from the f3 component: N_p = 2 + f3 sqrt(m^2 + p^2) / (2 m).
pub fn pair_number(f3: f64, p: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {m}")));
    }
    Ok(2.0 + f3 * (m * m + p * p).sqrt() / (2.0 * m))
}

/// Standard initial data used throughout: Mx=0.009, My=-0.027, Mz=0, P=0.006,
/// with X(0) as the free parameter.
pub fn standard_init(x0: f64) -> StateVector {
    StateVector {
        mx: 0.009,
        my: -0.027,
        mz: 0.0,
        x: x0,
        p: 0.006,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn vector_field_vanishes_on_fixed_point_family() {
        for x0 in [-1.0, 0.0, 0.7, 3.5] {
            let s = StateVector::new(0.0, 0.0, 0.0, x0, 0.0).unwrap();
            let d = vector_field(&s).unwrap();
            assert_eq!(d.to_array(), [0.0; 5]);
        }
    }

    #[test]
    fn vector_field_direct_substitution() {
        let s = StateVector::new(0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let d = vector_field(&s).unwrap();
        assert_eq!(d.to_array(), [0.0, 0.0, 2.0, 0.0, -2.0]);
    }

    #[test]
    fn vector_field_hand_evaluated() {
        // Term-by-term hand evaluation:
        //   dMx = 2*0.0843*0      = 0
        //   dMy = -2*0            = 0
        //   dMz = 2*(-0.027) - 2*0.0843*0.009 = -0.054 - 0.0015174 = -0.0555174
        //   dX  = P               = 0.006
        //   dP  = -2*(-0.027)     = 0.054
        let s = StateVector::new(0.009, -0.027, 0.0, 0.0843, 0.006).unwrap();
        let d = vector_field(&s).unwrap();
        assert_abs_diff_eq!(d.mx, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.my, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.mz, -0.0555174, epsilon = 1e-15);
        assert_abs_diff_eq!(d.x, 0.006, epsilon = 1e-15);
        assert_abs_diff_eq!(d.p, 0.054, epsilon = 1e-15);
    }

    #[test]
    fn vector_field_rejects_non_finite() {
        let s = StateVector {
            mx: f64::NAN,
            my: 0.0,
            mz: 0.0,
            x: 0.0,
            p: 0.0,
        };
        assert!(vector_field(&s).is_err());
    }

    #[test]
    fn hamiltonian_values() {
        let zero = StateVector::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(hamiltonian(&zero), 0.0);

        let s = StateVector::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(hamiltonian(&s), 2.0);

        // 0.006^2/2 + 2*0.0843*(-0.027) + 2*0.009 = 0.000018 - 0.0045522 + 0.018
        let s = standard_init(0.0843);
        assert_abs_diff_eq!(hamiltonian(&s), 0.0134658, epsilon = 1e-15);
    }

    #[test]
    fn casimir_values() {
        let zero = StateVector::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(casimir(&zero), 0.0);

        let s = StateVector::new(0.0, 0.0, 1.0, -3.0, 7.0).unwrap();
        assert_eq!(casimir(&s), 1.0);

        // 0.009^2 + 0.027^2 = 0.000081 + 0.000729 = 0.00081
        assert_abs_diff_eq!(casimir(&standard_init(0.0)), 0.00081, epsilon = 1e-18);
    }

    #[test]
    fn dimensionless_map_basics() {
        let phys = PhysicalScales::new(1.0, 1.0, 2.0, 0.0).unwrap();
        let zero = PhysicalState {
            f3: 0.0,
            g1: 0.0,
            g2: 0.0,
            a: 0.0,
            e_field: 0.0,
            t: 0.0,
        };
        let (s, tau) = to_dimensionless(&phys, &zero).unwrap();
        assert_eq!(s.to_array(), [0.0; 5]);
        assert_eq!(tau, 0.0);

        let one = PhysicalState { f3: 1.0, ..zero };
        let (s, _) = to_dimensionless(&phys, &one).unwrap();
        assert_eq!(s.mx, 1.0);
    }

    #[test]
    fn dimensionless_map_rejects_bad_scales() {
        assert!(PhysicalScales::new(0.0, 1.0, 1.0, 0.0).is_err());
        let phys = PhysicalScales {
            m: 1.0,
            e: 1.0,
            gamma: 0.0,
            p_c: 0.0,
        };
        let s = standard_init(0.1);
        assert!(from_dimensionless(&phys, &s, 1.0).is_err());
    }

    #[test]
    fn pair_number_values() {
        assert_eq!(pair_number(0.0, 5.0, 1.0).unwrap(), 2.0);
        assert_eq!(pair_number(2.0, 0.0, 1.0).unwrap(), 3.0);
        // sqrt(1 + 3) = 2, so N_p = 2 + 2*2/2 = 4
        assert_abs_diff_eq!(pair_number(2.0, 3f64.sqrt(), 1.0).unwrap(), 4.0, epsilon = 1e-15);
        assert!(pair_number(1.0, 0.0, -1.0).is_err());
    }

    fn arb_state() -> impl Strategy<Value = StateVector> {
        let c = -2.0..2.0f64;
        (c.clone(), c.clone(), c.clone(), c.clone(), c)
            .prop_map(|(mx, my, mz, x, p)| StateVector { mx, my, mz, x, p })
    }

    proptest! {
        // Directional derivative of both invariants along the flow is zero.
        #[test]
        fn invariants_conserved_along_flow(s in arb_state()) {
            let d = vector_field(&s).unwrap();
            let dh = s.p * d.p + 2.0 * (s.x * d.my + d.x * s.my) + 2.0 * d.mx;
            let dc = 2.0 * (s.mx * d.mx + s.my * d.my + s.mz * d.mz);
            prop_assert!(dh.abs() <= 1e-12);
            prop_assert!(dc.abs() <= 1e-12);
        }

        // The M subsystem is a pure rotation: M . dM/dtau = 0.
        #[test]
        fn spin_flow_is_rotation(s in arb_state()) {
            let d = vector_field(&s).unwrap();
            let dot = s.mx * d.mx + s.my * d.my + s.mz * d.mz;
            prop_assert!(dot.abs() <= 1e-14);
        }

        // The flow equals the Poisson-bracket expansion {z, H} with
        // {X,P}=1 and {M_i,M_j}=eps_ijk M_k, checked term by term.
        #[test]
        fn flow_matches_bracket_expansion(s in arb_state()) {
            let d = vector_field(&s).unwrap();
            // dH/dMx = 2, dH/dMy = 2X, dH/dMz = 0, dH/dX = 2My, dH/dP = P.
            // {M_i, H} = (M x grad_M H)_i, {X,H} = dH/dP, {P,H} = -dH/dX.
            let gm = [2.0, 2.0 * s.x, 0.0];
            let m = [s.mx, s.my, s.mz];
            // {M_i, H} = eps_ijk M_k dH/dM_j = (grad_M H x M)_i
            let bracket = [
                gm[1] * m[2] - gm[2] * m[1],
                gm[2] * m[0] - gm[0] * m[2],
                gm[0] * m[1] - gm[1] * m[0],
            ];
            prop_assert!((d.mx - bracket[0]).abs() <= 1e-13);
            prop_assert!((d.my - bracket[1]).abs() <= 1e-13);
            prop_assert!((d.mz - bracket[2]).abs() <= 1e-13);
            prop_assert!((d.x - s.p).abs() <= 1e-13);
            prop_assert!((d.p - (-2.0 * s.my)).abs() <= 1e-13);
        }

        // Round-trip through the physical map is the identity.
        #[test]
        fn dimensionless_round_trip(
            s in arb_state(),
            m in 0.1..10.0f64,
            e in 0.1..5.0f64,
            gamma in 0.1..5.0f64,
            p_c in -2.0..2.0f64,
            tau in -10.0..10.0f64,
        ) {
            let phys = PhysicalScales::new(m, e, gamma, p_c).unwrap();
            let ps = from_dimensionless(&phys, &s, tau).unwrap();
            let (back, tau_back) = to_dimensionless(&phys, &ps).unwrap();
            let scale = s.to_array().iter().map(|v| v.abs()).fold(1.0, f64::max);
            prop_assert!(back.distance(&s) <= 1e-14 * scale * 10.0);
            prop_assert!((tau_back - tau).abs() <= 1e-13 * tau.abs().max(1.0));
        }
    }
}
