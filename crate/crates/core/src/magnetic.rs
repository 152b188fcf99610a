//! Aharonov-Bohm flux through a ring.
//!
//! The flux enters through the gauge choice `χ₂ = −χ₃ = −φ₀/2`, which turns
//! node II's `Ṽ` into `P·Ṽ` with `P = diag(e^{iθ_B/2}, e^{−iθ_B/2}, 1)`.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{check_k, Error, Result};
use crate::junction::{scattering_with_v, NodeKind, NodeScattering};
use crate::ring::{ring_smatrix, RingResponse, RingSMatrix, RingSystem};
use crate::su3::{build_v, EulerAngles, NodeParams, UnitaryMatrix3};
use crate::CMatrix3;

/// Dimensionless flux phase `θ_B = eφ₀/ℏc` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FluxPhase(pub f64);

impl FluxPhase {
    pub fn radians(self) -> f64 {
        self.0
    }
}

/// `P = diag(e^{iθ_B/2}, e^{−iθ_B/2}, 1)`.
pub fn flux_phase_matrix(f: FluxPhase) -> UnitaryMatrix3 {
    let half = 0.5 * f.0;
    UnitaryMatrix3(CMatrix3::from_diagonal(&nalgebra::Vector3::new(
        Complex64::from_polar(1.0, half),
        Complex64::from_polar(1.0, -half),
        Complex64::new(1.0, 0.0),
    )))
}

/// Node II scattering with `Ṽ` replaced by `P·Ṽ`.
pub fn flux_modified_node_ii(p: &NodeParams, f: FluxPhase, k: f64) -> Result<NodeScattering> {
    let v = flux_phase_matrix(f) * build_v(p);
    scattering_with_v(&v, p, k, NodeKind::II)
}

/// Ring S-matrix with flux, for any ring (symmetric or not).
pub fn flux_ring_smatrix(ring: &RingSystem, k: f64, f: FluxPhase) -> Result<RingSMatrix> {
    check_k(k)?;
    let s_i = crate::junction::scattering_matrix(&ring.node_i, k, NodeKind::I)?;
    let s_ii = flux_modified_node_ii(&ring.node_ii, f, k)?;
    ring_smatrix(&s_i, &s_ii)
}

/// Closed-form amplitudes of the symmetric flux-threaded ring written in
/// terms of node I's matrix elements, kept alongside the assembled values
/// for cross-checking.
///
/// Two readings of the transmission are carried: `t_quarter` with the factor
/// `1 + 2i e^{iθ_B/4} sin(θ_B/4)` and `t_half` with `θ_B/2` in its place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormAudit {
    pub delta: Complex64,
    pub r: Complex64,
    pub t_quarter: Complex64,
    pub t_half: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxResponse {
    /// Assembled from the node matrices; this is the reported answer.
    pub response: RingResponse,
    pub regularized: bool,
    /// `None` when the closed-form denominator vanishes (`|Δ| < 1e-12`).
    pub closed_form: Option<ClosedFormAudit>,
}

impl FluxResponse {
    /// `|R_closed − R|`.
    pub fn r_deviation(&self) -> Option<f64> {
        self.closed_form.map(|c| (c.r - self.response.r).norm())
    }

    /// `|T_closed − T|` for the quarter-angle reading.
    pub fn t_quarter_deviation(&self) -> Option<f64> {
        self.closed_form
            .map(|c| (c.t_quarter - self.response.t).norm())
    }

    /// `|T_closed − T|` for the half-angle reading.
    pub fn t_half_deviation(&self) -> Option<f64> {
        self.closed_form
            .map(|c| (c.t_half - self.response.t).norm())
    }
}

fn closed_form(s_i: &NodeScattering, d: f64, theta_b: f64) -> Option<ClosedFormAudit> {
    // slot of each wire label in node I's (x₂, x₃, x₁) ordering
    let m = s_i.matrix.matrix();
    let s = |out: usize, inc: usize| {
        let slot = |label: usize| [2, 0, 1][label - 1];
        m[(slot(out), slot(inc))]
    };
    let i = Complex64::i();
    let e = Complex64::from_polar(1.0, 2.0 * s_i.k * d);
    let sn = (0.5 * theta_b).sin();
    let ph = Complex64::from_polar(1.0, 0.5 * theta_b);
    let s11 = s(1, 1);
    let m11 = s11.norm_sqr();

    let delta = (1.0 - e * m11) * (1.0 - e)
        + 2.0 * i * e * sn * (ph.conj() * s(2, 3).norm_sqr() - ph * s(3, 2).norm_sqr());
    if delta.norm() < 1e-12 {
        return None;
    }
    let r = (s11 * (1.0 - e) * (1.0 - e)
        + 2.0
            * i
            * e
            * sn
            * (ph.conj() * s(2, 3).conj() * (s11 * s(2, 3) - s(1, 3) * s(2, 1))
                - ph * s(3, 2).conj() * (s11 * s(3, 2) - s(1, 2) * s(3, 1))))
        / delta;
    let t_with = |angle: f64| {
        let factor = 1.0 + 2.0 * i * Complex64::from_polar(1.0, angle) * angle.sin();
        e / delta
            * ((1.0 - m11) * (1.0 - e) * factor
                - 2.0 * i * sn * (s(2, 1).norm_sqr() - e * s(1, 2).norm_sqr()))
    };
    Some(ClosedFormAudit {
        delta,
        r,
        t_quarter: t_with(0.25 * theta_b),
        t_half: t_with(0.5 * theta_b),
    })
}

/// `R`, `T` of a symmetric ring threaded by flux `f`.
pub fn flux_ring_response(ring: &RingSystem, k: f64, f: FluxPhase) -> Result<FluxResponse> {
    if !ring.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    check_k(k)?;
    let s_i = crate::junction::scattering_matrix(&ring.node_i, k, NodeKind::I)?;
    let s_ii = flux_modified_node_ii(&ring.node_ii, f, k)?;
    let sr = ring_smatrix(&s_i, &s_ii)?;
    Ok(FluxResponse {
        response: RingResponse {
            r: sr.reflection(),
            t: sr.transmission(),
            k,
            flux_phase: f.0,
        },
        regularized: sr.regularized,
        closed_form: closed_form(&s_i, ring.d(), f.0),
    })
}

/// The current-switch junction: `α = γ = a = 0`, `β = δ = b = π/4`,
/// `L₍₁₎ = L₍₂₎ = 0` and `L₍₃₎ → ∞`.
pub fn special_switch_node(l0: f64, xi: f64) -> Result<NodeParams> {
    let euler = EulerAngles {
        alpha: 0.0,
        beta: FRAC_PI_4,
        gamma: 0.0,
        delta: FRAC_PI_4,
        a: 0.0,
        b: FRAC_PI_4,
    };
    NodeParams::new(
        [std::f64::consts::PI, std::f64::consts::PI, 0.0],
        euler,
        l0,
        xi,
    )
}

/// Closed-form `R`, `T` for the current-switch junction.
///
/// With `w = e^{−iθ_B}` and `E = e^{2ikd}` the denominator is
/// `E(w+1)² − 4w`. It vanishes only for `w = 1, E = 1`; there the `E → 1`
/// limit `R = 0, T = E·e^{−iθ_B/2}` is returned, any other zero is an error.
pub fn flux_rt_special(k: f64, d: f64, xi_i: f64, f: FluxPhase) -> Result<RingResponse> {
    check_k(k)?;
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "d must be positive, got {d}"
        )));
    }
    let e = Complex64::from_polar(1.0, 2.0 * k * d);
    let w = Complex64::from_polar(1.0, -f.0);
    let half = Complex64::from_polar(1.0, -0.5 * f.0);
    let den = e * (w + 1.0) * (w + 1.0) - 4.0 * w;
    if den.norm() < 1e-12 {
        if (w - 1.0).norm() <= 1e-12 {
            return Ok(RingResponse {
                r: Complex64::default(),
                t: e * half,
                k,
                flux_phase: f.0,
            });
        }
        return Err(Error::SingularAssembly(format!(
            "switch denominator vanishes at k = {k}, theta_B = {}",
            f.0
        )));
    }
    let lead = Complex64::from_polar(1.0, 2.0 * k * xi_i);
    Ok(RingResponse {
        r: -lead * e * (w - 1.0) * (w - 1.0) / den,
        t: 2.0 * e * half * (e - 1.0) * (w + 1.0) / den,
        k,
        flux_phase: f.0,
    })
}
