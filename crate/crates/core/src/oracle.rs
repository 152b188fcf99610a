//! Reference solvers that go straight from the junction condition
//! `(U − I)Ψ + iL₀(U + I)Ψ′ = 0` to amplitudes, with no S-matrix algebra.
//! Slow and only used for cross-checks.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{check_k, Error, Result};
use crate::junction::NodeKind;
use crate::linalg::solve_pivoted;
use crate::magnetic::{flux_phase_matrix, FluxPhase};
use crate::ring::RingSystem;
use crate::su3::{build_u, NodeParams};
use crate::CMatrix3;

/// Pivot ratio above which a solution is flagged as near-singular.
pub const NEAR_SINGULAR_COND: f64 = 1e12;

/// Which lead carries the unit incoming wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incoming {
    FromX1,
    FromX4,
}

/// Plane-wave amplitudes on wires 1..4: `Φ_j(x) = φ_j e^{ikx} + ψ_j e^{−ikx}`.
/// Index 0 is wire 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeVector {
    pub phi: [Complex64; 4],
    pub psi: [Complex64; 4],
}

impl AmplitudeVector {
    /// `(|φ₁|² − |ψ₁|²) − (|φ₄|² − |ψ₄|²)`; the currents themselves carry an
    /// extra common factor `k`.
    pub fn current_imbalance(&self) -> f64 {
        let j1 = self.phi[0].norm_sqr() - self.psi[0].norm_sqr();
        let j4 = self.phi[3].norm_sqr() - self.psi[3].norm_sqr();
        j1 - j4
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSolution {
    pub amplitudes: AmplitudeVector,
    /// Max/min pivot modulus of the elimination.
    pub condition_estimate: f64,
    pub near_singular: bool,
}

/// Value and derivative at `x` of a unit amplitude on `e^{±ikx}`.
fn wave(k: f64, x: f64, forward: bool) -> (Complex64, Complex64) {
    let sign = if forward { 1.0 } else { -1.0 };
    let v = Complex64::from_polar(1.0, sign * k * x);
    (v, Complex64::new(0.0, sign * k) * v)
}

/// Contribution of one amplitude sitting on `slot` of a node to the three
/// junction rows: `(U − I)·e_slot·value + iL₀(U + I)·e_slot·derivative`.
fn junction_column(
    u: &CMatrix3,
    l0: f64,
    slot: usize,
    value: Complex64,
    deriv: Complex64,
) -> [Complex64; 3] {
    let il0 = Complex64::new(0.0, l0);
    let mut out = [Complex64::default(); 3];
    for (row, o) in out.iter_mut().enumerate() {
        let delta = if row == slot { 1.0 } else { 0.0 };
        *o = (u[(row, slot)] - delta) * value + il0 * (u[(row, slot)] + delta) * deriv;
    }
    out
}

/// Scattering state of the ring by direct solution of the six junction rows.
///
/// Unknowns are `(ψ₁, φ₂, ψ₂, φ₃, ψ₃, φ₄)`; node II uses `P·U·P†`.
pub fn solve_ring_direct(
    ring: &RingSystem,
    k: f64,
    f: FluxPhase,
    incoming: Incoming,
) -> Result<OracleSolution> {
    check_k(k)?;
    let (phi1, psi4) = match incoming {
        Incoming::FromX1 => (Complex64::new(1.0, 0.0), Complex64::default()),
        Incoming::FromX4 => (Complex64::default(), Complex64::new(1.0, 0.0)),
    };
    let u_i = *build_u(&ring.node_i).matrix();
    let p = *flux_phase_matrix(f).matrix();
    let u_ii = p * build_u(&ring.node_ii).matrix() * p.adjoint();

    let mut a = SMatrix::<Complex64, 6, 6>::zeros();
    let mut b = SVector::<Complex64, 6>::zeros();

    // (row offset, U, L0, ξ, lead wire index)
    let nodes = [
        (0, u_i, ring.node_i.l0, ring.node_i.xi),
        (3, u_ii, ring.node_ii.l0, ring.node_ii.xi),
    ];
    for (offset, u, l0, xi) in nodes {
        let place = |a: &mut SMatrix<Complex64, 6, 6>, col: usize, slot: usize, forward: bool| {
            let (v, dv) = wave(k, xi, forward);
            for (r, z) in junction_column(&u, l0, slot, v, dv).iter().enumerate() {
                a[(offset + r, col)] += z;
            }
        };
        // arms: slot 0 = wire 2, slot 1 = wire 3
        place(&mut a, 1, 0, true);
        place(&mut a, 2, 0, false);
        place(&mut a, 3, 1, true);
        place(&mut a, 4, 1, false);
        if offset == 0 {
            place(&mut a, 0, 2, false);
            let (v, dv) = wave(k, xi, true);
            for (r, z) in junction_column(&u, l0, 2, v, dv).iter().enumerate() {
                b[offset + r] -= z * phi1;
            }
        } else {
            place(&mut a, 5, 2, true);
            let (v, dv) = wave(k, xi, false);
            for (r, z) in junction_column(&u, l0, 2, v, dv).iter().enumerate() {
                b[offset + r] -= z * psi4;
            }
        }
    }

    let (x, cond) = solve_pivoted(a, b).ok_or_else(|| {
        Error::SingularAssembly(format!(
            "6x6 junction system is exactly singular at k = {k}"
        ))
    })?;
    Ok(OracleSolution {
        amplitudes: AmplitudeVector {
            phi: [phi1, x[1], x[3], x[5]],
            psi: [x[0], x[2], x[4], psi4],
        },
        condition_estimate: cond,
        near_singular: cond > NEAR_SINGULAR_COND,
    })
}

/// Outgoing amplitudes of a single node for a unit wave arriving on `slot`
/// (0, 1, 2 in the node's `(x₂, x₃, x_lead)` order).
///
/// At node I the wires extend to the left, so `φ` is incoming and `ψ`
/// outgoing; at node II it is the other way round.
pub fn solve_junction_direct(
    p: &NodeParams,
    k: f64,
    kind: NodeKind,
    slot: usize,
) -> Result<[Complex64; 3]> {
    check_k(k)?;
    if slot > 2 {
        return Err(Error::InvalidArgument(format!(
            "incoming slot must be 0, 1 or 2, got {slot}"
        )));
    }
    let u = *build_u(p).matrix();
    let incoming_forward = kind == NodeKind::I;
    let mut a = SMatrix::<Complex64, 3, 3>::zeros();
    for col in 0..3 {
        let (v, dv) = wave(k, p.xi, !incoming_forward);
        for (r, z) in junction_column(&u, p.l0, col, v, dv).iter().enumerate() {
            a[(r, col)] = *z;
        }
    }
    let (v, dv) = wave(k, p.xi, incoming_forward);
    let rhs = junction_column(&u, p.l0, slot, v, dv);
    let b = SVector::<Complex64, 3>::from_iterator(rhs.iter().map(|z| -z));
    let (x, _) = solve_pivoted(a, b).ok_or_else(|| {
        Error::SingularAssembly(format!("3x3 junction system is singular at k = {k}"))
    })?;
    Ok([x[0], x[1], x[2]])
}

/// Node S-matrix rebuilt column by column from [`solve_junction_direct`].
pub fn reconstruct_node_smatrix(p: &NodeParams, k: f64, kind: NodeKind) -> Result<CMatrix3> {
    let mut s = CMatrix3::zeros();
    for col in 0..3 {
        for (row, z) in solve_junction_direct(p, k, kind, col)?.iter().enumerate() {
            s[(row, col)] = *z;
        }
    }
    Ok(s)
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm_series(a: &CMatrix3, tol: f64) -> Result<CMatrix3> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix entries must be finite".into(),
        ));
    }
    let norm1 = (0..3)
        .map(|c| (0..3).map(|r| a[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm1 * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * Complex64::from(scale);
    // squaring amplifies the truncation error roughly by 2^s
    let term_tol = tol / 2f64.powi(squarings as i32 + 2);
    let mut term = CMatrix3::identity();
    let mut sum = CMatrix3::identity();
    for n in 1..200 {
        term = term * b / Complex64::from(n as f64);
        sum += term;
        if term.iter().map(|z| z.norm()).fold(0.0, f64::max) < term_tol {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    Ok(sum)
}
