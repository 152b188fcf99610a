//! Two-terminal ring assembled from node I and node II.

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::error::{check_k, Error, Result};
use crate::junction::{s0_entry, scattering_matrix, NodeKind, NodeScattering};
use crate::linalg::{det2, max_abs_diff, min_norm_solve, solve_pivoted};
use crate::su3::{build_v, NodeParams};
use crate::{CMatrix2, CMatrix3};

/// `|det(I₂ − s·s̃)|` below which the direct inverse is not attempted.
pub const SINGULAR_DET_TOL: f64 = 1e-12;

/// Lead reflection modulus treated as extremal (lead decoupled from the ring).
pub const EXTREMAL_TOL: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-12;

/// Two junctions joined by two arms of equal length `d = ξ_I − ξ_II`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSystem {
    pub node_i: NodeParams,
    pub node_ii: NodeParams,
}

impl RingSystem {
    pub fn new(node_i: NodeParams, node_ii: NodeParams) -> Result<Self> {
        node_i.validate()?;
        node_ii.validate()?;
        let d = node_i.xi - node_ii.xi;
        if !(d > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "arm length d = xi_I - xi_II must be positive, got {d}"
            )));
        }
        Ok(Self { node_i, node_ii })
    }

    /// Mirror-symmetric ring: node II carries node I's junction.
    pub fn symmetric(node: NodeParams, xi_i: f64, xi_ii: f64) -> Result<Self> {
        Self::new(node.with_xi(xi_i), node.with_xi(xi_ii))
    }

    pub fn d(&self) -> f64 {
        self.node_i.xi - self.node_ii.xi
    }

    /// True when both nodes realize the same junction, i.e. equal `V` up to
    /// column phases and equal `L_(i)`.
    ///
    /// Compared through the reduced operator `V·S₀(k)·V†` at two reference
    /// wavenumbers. `S₀` entries are injective in `L_(i)`, so equal operators
    /// mean equal eigenvectors and equal lengths, independent of the angle
    /// tuples and gauge lengths used to encode them.
    pub fn is_symmetric(&self) -> bool {
        let d = self.d();
        [1.0 / d, 2.5 / d].iter().all(|&k| {
            match (
                reduced_operator(&self.node_i, k),
                reduced_operator(&self.node_ii, k),
            ) {
                (Some(a), Some(b)) => max_abs_diff(&a, &b) <= SYMMETRY_TOL,
                _ => false,
            }
        })
    }

    pub fn node_scattering(&self, k: f64) -> Result<(NodeScattering, NodeScattering)> {
        Ok((
            scattering_matrix(&self.node_i, k, NodeKind::I)?,
            scattering_matrix(&self.node_ii, k, NodeKind::II)?,
        ))
    }
}

fn reduced_operator(p: &NodeParams, k: f64) -> Option<CMatrix3> {
    let mut diag = nalgebra::Vector3::zeros();
    for (d, &t) in diag.iter_mut().zip(p.theta.iter()) {
        *d = s0_entry(k, t, p.l0, NodeKind::I).ok()?;
    }
    let v = build_v(p);
    let v = v.matrix();
    Some(v * CMatrix3::from_diagonal(&diag) * v.adjoint())
}

/// Reflection and transmission for unit incidence from the `x₁` lead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingResponse {
    pub r: Complex64,
    pub t: Complex64,
    pub k: f64,
    /// Aharonov-Bohm phase `θ_B`; zero without flux.
    pub flux_phase: f64,
}

impl RingResponse {
    pub fn prob_r(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn prob_t(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// `|R|² + |T|² − 1`.
    pub fn unitarity_residual(&self) -> f64 {
        self.prob_r() + self.prob_t() - 1.0
    }
}

/// The 2x2 ring S-matrix mapping `(φ₁, ψ₄)` to `(ψ₁, φ₄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSMatrix {
    pub matrix: CMatrix2,
    pub k: f64,
    /// Set when `I₂ − s·s̃` was numerically singular (a localized state sits
    /// at this `k`) and the decoupled null direction was projected out.
    pub regularized: bool,
}

impl RingSMatrix {
    pub fn reflection(&self) -> Complex64 {
        self.matrix[(0, 0)]
    }

    pub fn transmission(&self) -> Complex64 {
        self.matrix[(1, 0)]
    }

    /// `‖S_R·S_R† − I‖_max`.
    pub fn unitarity_residual(&self) -> f64 {
        crate::linalg::identity_deviation(&(self.matrix * self.matrix.adjoint()))
    }
}

enum Resolvent {
    Direct(CMatrix2),
    Regularized(CMatrix2),
}

impl Resolvent {
    fn apply(&self, b: &Vector2<Complex64>) -> Result<Vector2<Complex64>> {
        match self {
            // Pivoted elimination rather than adjugate/det: near a localized
            // state the rounding error of det would rescale the whole
            // solution, while elimination confines it to the decoupled
            // direction that the lead vectors do not see.
            Resolvent::Direct(m) => solve_pivoted(*m, *b)
                .map(|(x, _)| x)
                .ok_or_else(|| Error::SingularAssembly("ring resolvent has a zero pivot".into())),
            Resolvent::Regularized(m) => {
                let (x, residual) = min_norm_solve(m, b, 1e-9);
                if residual > 1e-8 * (1.0 + b.norm()) {
                    return Err(Error::SingularAssembly(format!(
                        "ring equations are inconsistent at a singular point (residual {residual:e})"
                    )));
                }
                Ok(x)
            }
        }
    }
}

/// Assembles `S_R` from the two node matrices.
///
/// `(I₂ − s̃s)⁻¹` and `(I₂ − ss̃)⁻¹` are applied by direct 2x2 elimination.
/// When the determinant falls below [`SINGULAR_DET_TOL`] two cases are told
/// apart: an extremal node whose lead reflects with unit modulus is an
/// error; otherwise the singular direction is a localized state that does
/// not couple to the leads and the minimum-norm solution is used.
pub fn ring_smatrix(s_i: &NodeScattering, s_ii: &NodeScattering) -> Result<RingSMatrix> {
    if s_i.kind != NodeKind::I || s_ii.kind != NodeKind::II {
        return Err(Error::InvalidArgument(
            "ring assembly expects node I then node II".into(),
        ));
    }
    if (s_i.k - s_ii.k).abs() > 1e-14 * s_i.k.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "node matrices evaluated at different k ({} vs {})",
            s_i.k, s_ii.k
        )));
    }
    let s = s_i.arm_block();
    let st = s_ii.arm_block();
    let s11 = s_i.lead_reflection();
    let s44 = s_ii.lead_reflection();
    let col = s_i.lead_to_arms();
    let row = s_i.arms_to_lead();
    let col_t = s_ii.lead_to_arms();
    let row_t = s_ii.arms_to_lead();

    let a = CMatrix2::identity() - s * st;
    let b = CMatrix2::identity() - st * s;
    let det_a = det2(&a);
    let det_b = det2(&b);

    let (ra, rb, regularized) =
        if det_a.norm() >= SINGULAR_DET_TOL && det_b.norm() >= SINGULAR_DET_TOL {
            (Resolvent::Direct(a), Resolvent::Direct(b), false)
        } else {
            let extremal = s11.norm().max(s44.norm());
            if extremal >= 1.0 - EXTREMAL_TOL {
                return Err(Error::SingularAssembly(format!(
                "|det(I - s s~)| = {:e} with an extremal node (max lead reflection {extremal}); \
                 a lead is decoupled from the ring",
                det_a.norm()
            )));
            }
            (Resolvent::Regularized(a), Resolvent::Regularized(b), true)
        };

    let r11 = s11 + row.dot(&rb.apply(&(st * col))?);
    let r12 = row.dot(&rb.apply(&col_t)?);
    let r21 = row_t.dot(&ra.apply(&col)?);
    let r22 = s44 + row_t.dot(&ra.apply(&(s * col_t))?);

    Ok(RingSMatrix {
        matrix: CMatrix2::new(r11, r12, r21, r22),
        k: s_i.k,
        regularized,
    })
}

/// Closed-form `R` and `T` of a symmetric ring from the node-I lead
/// reflection `s11` (which already carries the `e^{2ikξ_I}` factor).
pub fn symmetric_rt(s11: Complex64, k: f64, d: f64) -> Result<RingResponse> {
    check_k(k)?;
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "d must be positive, got {d}"
        )));
    }
    let m = s11.norm();
    if m >= 1.0 - EXTREMAL_TOL {
        return Err(Error::Extremal(m));
    }
    let e = Complex64::from_polar(1.0, 2.0 * k * d);
    let denom = 1.0 - e * (m * m);
    Ok(RingResponse {
        r: s11 * (1.0 - e) / denom,
        t: e * (1.0 - m * m) / denom,
        k,
        flux_phase: 0.0,
    })
}

/// `R = (S_R)₁₁`, `T = (S_R)₂₁` for unit incidence from `x₁`.
pub fn ring_response(ring: &RingSystem, k: f64) -> Result<RingResponse> {
    let (s_i, s_ii) = ring.node_scattering(k)?;
    let sr = ring_smatrix(&s_i, &s_ii)?;
    Ok(RingResponse {
        r: sr.reflection(),
        t: sr.transmission(),
        k,
        flux_phase: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su3::EulerAngles;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn node() -> NodeParams {
        let euler = EulerAngles {
            alpha: 0.4,
            beta: 1.3,
            gamma: -0.2,
            delta: 0.8,
            a: 2.1,
            b: -0.6,
        };
        NodeParams::new([0.7, 2.2, -1.4], euler, 1.1, 0.0).unwrap()
    }

    #[test]
    fn arm_length_must_be_positive() {
        assert!(RingSystem::symmetric(node(), 0.0, 0.0).is_err());
        assert!(RingSystem::symmetric(node(), 0.0, 1.0).is_err());
        assert!(RingSystem::symmetric(node(), 1.0, 0.0).is_ok());
    }

    #[test]
    fn symmetric_predicate() {
        let ring = RingSystem::symmetric(node(), 1.5, 0.25).unwrap();
        assert!(ring.is_symmetric());

        let mut other = ring;
        other.node_ii.theta[1] += 0.1;
        assert!(!other.is_symmetric());

        // same physical lengths, different gauge length
        let mut regauged = ring;
        let p = &mut regauged.node_ii;
        let lengths = ring.node_i.lengths();
        p.l0 = 2.7;
        for (t, l) in p.theta.iter_mut().zip(lengths) {
            *t = 2.0 * (p.l0 / l).atan();
        }
        assert!(regauged.is_symmetric());

        // with b = 0 the trailing e^{iaλ3} only rephases columns of V
        let mut base = node();
        base.euler.b = 0.0;
        let ring = RingSystem::symmetric(base, 1.5, 0.25).unwrap();
        let mut rephased = ring;
        rephased.node_ii.euler.a += 0.37;
        rephased.node_ii.theta[0] += 2.0 * PI;
        assert!(rephased.is_symmetric());
    }

    #[test]
    fn decoupled_neumann_ring_is_singular() {
        let p = NodeParams::new([0.0; 3], EulerAngles::default(), 1.0, 0.0).unwrap();
        let d = 1.3;
        let ring = RingSystem::symmetric(p, d, 0.0).unwrap();
        let k = PI / d;
        let err = ring_response(&ring, k).unwrap_err();
        assert!(matches!(err, Error::SingularAssembly(_)), "{err}");
    }

    #[test]
    fn symmetric_rt_closed_forms() {
        let d = 0.8;
        let s11 = c(0.3, -0.4);
        let m2 = s11.norm_sqr();

        let at_res = symmetric_rt(s11, PI / d, d).unwrap();
        assert!(at_res.r.norm() < 1e-15);
        assert!((at_res.t - 1.0).norm() < 1e-14);

        let anti = symmetric_rt(s11, PI / (2.0 * d), d).unwrap();
        assert!((anti.r - 2.0 * s11 / (1.0 + m2)).norm() < 1e-14);
        assert!((anti.t + (1.0 - m2) / (1.0 + m2)).norm() < 1e-14);

        for k in [0.1, 0.9, 3.3] {
            let clean = symmetric_rt(c(0.0, 0.0), k, d).unwrap();
            assert_eq!(clean.r, c(0.0, 0.0));
            assert!((clean.t - Complex64::from_polar(1.0, 2.0 * k * d)).norm() < 1e-15);
        }
    }

    #[test]
    fn symmetric_rt_rejects_extremal_and_bad_input() {
        assert!(matches!(
            symmetric_rt(c(1.0, 0.0), 1.0, 1.0),
            Err(Error::Extremal(_))
        ));
        assert!(matches!(
            symmetric_rt(c(0.0, -1.0), 1.0, 1.0),
            Err(Error::Extremal(_))
        ));
        assert!(symmetric_rt(c(0.5, 0.0), 1.0, 0.0).is_err());
        assert!(symmetric_rt(c(0.5, 0.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn assembly_rejects_mismatched_inputs() {
        let ring = RingSystem::symmetric(node(), 1.0, 0.0).unwrap();
        let (a, b) = ring.node_scattering(1.0).unwrap();
        assert!(ring_smatrix(&b, &a).is_err());
        let (_, b2) = ring.node_scattering(1.5).unwrap();
        assert!(ring_smatrix(&a, &b2).is_err());
    }

    #[test]
    fn symmetric_ring_at_resonance_is_regularized() {
        let d = 1.1;
        let ring = RingSystem::symmetric(node(), d, 0.0).unwrap();
        let (a, b) = ring.node_scattering(2.0 * PI / d).unwrap();
        let sr = ring_smatrix(&a, &b).unwrap();
        assert!(sr.regularized);
        assert!(sr.reflection().norm() < 1e-10);
        assert!((sr.transmission().norm() - 1.0).abs() < 1e-10);
        assert!(sr.unitarity_residual() < 1e-10);
    }
}
