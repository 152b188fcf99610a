//! Gell-Mann generators and the U(3) parametrization of a Y-junction.
//!
//! A junction is characterized by `U = V D V†` with
//! `D = diag(e^{iθ₁}, e^{iθ₂}, e^{iθ₃})` and
//! `V = e^{iαλ₃} e^{iβλ₂} e^{iγλ₃} e^{iδλ₅} e^{iaλ₃} e^{ibλ₂}`.
//! Only the three generators appearing in that product are supported.

use std::ops::Mul;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{dagger, identity_deviation};
use crate::CMatrix3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Canonical Hermitian generator `λ_index` for `index ∈ {2, 3, 5}`.
pub fn gell_mann(index: u8) -> Result<CMatrix3> {
    let m = match index {
        2 => Matrix3::new(ZERO, -I, ZERO, I, ZERO, ZERO, ZERO, ZERO, ZERO),
        3 => Matrix3::new(ONE, ZERO, ZERO, ZERO, -ONE, ZERO, ZERO, ZERO, ZERO),
        5 => Matrix3::new(ZERO, ZERO, -I, ZERO, ZERO, ZERO, I, ZERO, ZERO),
        _ => return Err(unsupported(index)),
    };
    Ok(m)
}

/// Closed-form `e^{i·angle·λ_index}`.
///
/// `λ₃` is diagonal; `λ₂` and `λ₅` generate real planar rotations in the
/// (1,2) and (1,3) coordinate planes respectively.
pub fn exp_i_lambda(index: u8, angle: f64) -> Result<UnitaryMatrix3> {
    let (s, c) = angle.sin_cos();
    let (s, c) = (Complex64::from(s), Complex64::from(c));
    let m = match index {
        2 => Matrix3::new(c, s, ZERO, -s, c, ZERO, ZERO, ZERO, ONE),
        3 => Matrix3::from_diagonal(&nalgebra::Vector3::new(
            Complex64::from_polar(1.0, angle),
            Complex64::from_polar(1.0, -angle),
            ONE,
        )),
        5 => Matrix3::new(c, ZERO, s, ZERO, ONE, ZERO, -s, ZERO, c),
        _ => return Err(unsupported(index)),
    };
    Ok(UnitaryMatrix3(m))
}

fn unsupported(index: u8) -> Error {
    Error::InvalidArgument(format!(
        "Gell-Mann index {index} is not supported (expected 2, 3 or 5)"
    ))
}

/// The six Euler-like angles of `V`, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub a: f64,
    pub b: f64,
}

impl EulerAngles {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.alpha, self.beta, self.gamma, self.delta, self.a, self.b,
        ]
    }
}

/// Parameters of one Y-junction: eigenphases `theta`, the angles of `V`, the
/// gauge length `l0` and the node position `xi` on the shared coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeParams {
    pub theta: [f64; 3],
    pub euler: EulerAngles,
    pub l0: f64,
    pub xi: f64,
}

impl NodeParams {
    pub fn new(theta: [f64; 3], euler: EulerAngles, l0: f64, xi: f64) -> Result<Self> {
        let p = Self {
            theta,
            euler,
            l0,
            xi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l0 > 0.0 && self.l0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "L0 must be positive and finite, got {}",
                self.l0
            )));
        }
        let all_finite = self
            .theta
            .iter()
            .chain(self.euler.as_array().iter())
            .chain(std::iter::once(&self.xi))
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidArgument(
                "node angles and position must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Same junction, moved to a different node position.
    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    /// Physical lengths `L_(i) = L0·cot(θ_i/2)`. Infinite entries are the
    /// Neumann limit `θ_i = 0`.
    pub fn lengths(&self) -> [f64; 3] {
        self.theta.map(|t| {
            let (s, c) = (0.5 * t).sin_cos();
            if s == 0.0 {
                f64::INFINITY
            } else {
                self.l0 * c / s
            }
        })
    }
}

/// A 3x3 complex matrix that is unitary up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryMatrix3(pub(crate) CMatrix3);

impl UnitaryMatrix3 {
    /// Wraps `m` after checking `‖m·m† − I‖_max ≤ tol`.
    pub fn try_new(m: CMatrix3, tol: f64) -> Result<Self> {
        let dev = identity_deviation(&(m * dagger(&m)));
        if dev <= tol {
            Ok(Self(m))
        } else {
            Err(Error::InvalidArgument(format!(
                "matrix is not unitary: ‖M·M† − I‖_max = {dev:e}"
            )))
        }
    }

    /// Wraps `m` without checking. Intended for test fixtures that need to
    /// hold a deliberately broken matrix.
    pub fn from_matrix_unchecked(m: CMatrix3) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(CMatrix3::identity())
    }

    pub fn matrix(&self) -> &CMatrix3 {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix3 {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(dagger(&self.0))
    }

    /// `‖M·M† − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        identity_deviation(&(self.0 * dagger(&self.0)))
    }
}

impl Mul for UnitaryMatrix3 {
    type Output = UnitaryMatrix3;

    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

/// `V = e^{iαλ₃} e^{iβλ₂} e^{iγλ₃} e^{iδλ₅} e^{iaλ₃} e^{ibλ₂}`, in that order.
pub fn build_v(p: &NodeParams) -> UnitaryMatrix3 {
    v_from_euler(&p.euler)
}

pub(crate) fn v_from_euler(e: &EulerAngles) -> UnitaryMatrix3 {
    let factors = [
        (3, e.alpha),
        (2, e.beta),
        (3, e.gamma),
        (5, e.delta),
        (3, e.a),
        (2, e.b),
    ];
    factors
        .iter()
        .map(|&(idx, angle)| exp_i_lambda(idx, angle).expect("generator index is valid"))
        .fold(UnitaryMatrix3::identity(), |acc, f| acc * f)
}

/// `D = diag(e^{iθ₁}, e^{iθ₂}, e^{iθ₃})`.
pub fn build_d(p: &NodeParams) -> UnitaryMatrix3 {
    let d = nalgebra::Vector3::from(p.theta.map(|t| Complex64::from_polar(1.0, t)));
    UnitaryMatrix3(CMatrix3::from_diagonal(&d))
}

/// Junction unitary `U = V D V†`.
pub fn build_u(p: &NodeParams) -> UnitaryMatrix3 {
    let v = build_v(p);
    v * build_d(p) * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &CMatrix3, b: &CMatrix3) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn generators_match_canonical_definitions() {
        let l3 = gell_mann(3).unwrap();
        assert_eq!(
            l3,
            CMatrix3::from_diagonal(&nalgebra::Vector3::new(ONE, -ONE, ZERO))
        );
        let l2 = gell_mann(2).unwrap();
        assert_eq!(l2[(0, 1)], c(0.0, -1.0));
        assert_eq!(l2[(1, 0)], c(0.0, 1.0));
        let l5 = gell_mann(5).unwrap();
        assert_eq!(l5[(0, 2)], c(0.0, -1.0));
        assert_eq!(l5[(2, 0)], c(0.0, 1.0));
        for idx in [2, 3, 5] {
            let g = gell_mann(idx).unwrap();
            assert_eq!(g, g.adjoint());
            assert_eq!(g.trace(), ZERO);
        }
    }

    #[test]
    fn unsupported_generator_is_rejected() {
        for idx in [0, 1, 4, 6, 7, 8, 9] {
            assert!(matches!(gell_mann(idx), Err(Error::InvalidArgument(_))));
            assert!(exp_i_lambda(idx, 0.1).is_err());
        }
    }

    #[test]
    fn diagonal_exponential() {
        assert_eq!(
            *exp_i_lambda(3, 0.0).unwrap().matrix(),
            CMatrix3::identity()
        );
        let m = exp_i_lambda(3, PI / 2.0).unwrap();
        let expected =
            CMatrix3::from_diagonal(&nalgebra::Vector3::new(c(0.0, 1.0), c(0.0, -1.0), ONE));
        assert!(max_diff(m.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn v_is_identity_for_zero_angles() {
        let p = NodeParams::new([0.3, 0.2, 0.1], EulerAngles::default(), 1.0, 0.0).unwrap();
        assert_eq!(*build_v(&p).matrix(), CMatrix3::identity());
    }

    #[test]
    fn scalar_d_commutes_through_v() {
        let euler = EulerAngles {
            alpha: 0.3,
            beta: 1.1,
            gamma: -0.4,
            delta: 2.0,
            a: 0.9,
            b: -1.7,
        };
        let zero = NodeParams::new([0.0; 3], euler, 1.0, 0.0).unwrap();
        assert!(max_diff(build_u(&zero).matrix(), &CMatrix3::identity()) < 1e-14);

        let th = 0.77;
        let scalar = NodeParams::new([th; 3], euler, 1.0, 0.0).unwrap();
        let expected = CMatrix3::identity() * Complex64::from_polar(1.0, th);
        assert!(max_diff(build_u(&scalar).matrix(), &expected) < 1e-14);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(NodeParams::new([0.0; 3], EulerAngles::default(), 0.0, 0.0).is_err());
        assert!(NodeParams::new([0.0; 3], EulerAngles::default(), -1.0, 0.0).is_err());
        assert!(NodeParams::new([f64::NAN, 0.0, 0.0], EulerAngles::default(), 1.0, 0.0).is_err());
    }

    #[test]
    fn lengths_cover_dirichlet_and_neumann_limits() {
        let p = NodeParams::new([PI, 0.0, PI / 2.0], EulerAngles::default(), 2.0, 0.0).unwrap();
        let l = p.lengths();
        assert!(l[0].abs() < 1e-15);
        assert!(l[1].is_infinite());
        assert!((l[2] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn try_new_rejects_non_unitary() {
        let mut m = CMatrix3::identity();
        m[(0, 0)] = c(1.1, 0.0);
        assert!(UnitaryMatrix3::try_new(m, 1e-12).is_err());
        assert!(UnitaryMatrix3::try_new(CMatrix3::identity(), 1e-12).is_ok());
    }
}
