//! Node scattering matrices.
//!
//! Node I maps incoming amplitudes `(φ₂, φ₃, φ₁)` to outgoing `(ψ₂, ψ₃, ψ₁)`;
//! node II maps `(ψ₂, ψ₃, ψ₄)` to `(φ₂, φ₃, φ₄)`. Both use the axis order
//! `(x₂, x₃, x_lead)`, so the ring arms always occupy the leading 2x2 block.

use std::fmt;

use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;

use crate::error::{check_k, Result};
use crate::su3::{build_v, NodeParams, UnitaryMatrix3};
use crate::CMatrix2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    I,
    II,
}

/// Physical wire label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X1,
    X2,
    X3,
    X4,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Axis::X1 => 1,
            Axis::X2 => 2,
            Axis::X3 => 3,
            Axis::X4 => 4,
        };
        write!(f, "x{n}")
    }
}

impl NodeKind {
    /// Axis carried by each matrix row/column.
    pub fn axes(self) -> [Axis; 3] {
        match self {
            NodeKind::I => [Axis::X2, Axis::X3, Axis::X1],
            NodeKind::II => [Axis::X2, Axis::X3, Axis::X4],
        }
    }
}

/// Diagonal entry of the reduced node S-matrix for eigenphase `theta`.
///
/// Uses `L = L0·cot(θ/2)` multiplied through by `sin(θ/2)`, so `θ = 0`
/// (Neumann, `L → ∞`) evaluates to exactly `+1` and `θ = π` (Dirichlet) to `−1`.
pub fn s0_entry(k: f64, theta: f64, l0: f64, kind: NodeKind) -> Result<Complex64> {
    check_k(k)?;
    let (s, c) = (0.5 * theta).sin_cos();
    let ikl = Complex64::new(0.0, k * l0 * c);
    let plus = ikl + s;
    let minus = ikl - s;
    Ok(match kind {
        NodeKind::I => plus / minus,
        NodeKind::II => minus / plus,
    })
}

/// Scattering matrix of one junction at wavenumber `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeScattering {
    pub matrix: UnitaryMatrix3,
    pub k: f64,
    pub kind: NodeKind,
}

/// One labeled matrix element `s_{out,in}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub out: Axis,
    pub inc: Axis,
    pub value: Complex64,
}

impl NodeScattering {
    fn slot(&self, axis: Axis) -> Option<usize> {
        self.kind.axes().iter().position(|&a| a == axis)
    }

    /// Amplitude for scattering from `inc` into `out`, if both wires meet
    /// at this node.
    pub fn entry(&self, out: Axis, inc: Axis) -> Option<Complex64> {
        Some(self.matrix.matrix()[(self.slot(out)?, self.slot(inc)?)])
    }

    pub fn components(&self) -> Vec<Component> {
        let axes = self.kind.axes();
        let m = self.matrix.matrix();
        let mut out = Vec::with_capacity(9);
        for (i, &a) in axes.iter().enumerate() {
            for (j, &b) in axes.iter().enumerate() {
                out.push(Component {
                    out: a,
                    inc: b,
                    value: m[(i, j)],
                });
            }
        }
        out
    }

    /// Arm-to-arm block over `(x₂, x₃)`.
    pub fn arm_block(&self) -> CMatrix2 {
        self.matrix.matrix().fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Lead-to-arm column `(s_{2,lead}, s_{3,lead})`.
    pub fn lead_to_arms(&self) -> Vector2<Complex64> {
        self.matrix.matrix().fixed_view::<2, 1>(0, 2).into_owned()
    }

    /// Arm-to-lead row `(s_{lead,2}, s_{lead,3})`, as a column vector.
    pub fn arms_to_lead(&self) -> Vector2<Complex64> {
        self.matrix.matrix().fixed_view::<1, 2>(2, 0).transpose()
    }

    /// Lead reflection amplitude (`s₁₁` at node I, `s̃₄₄` at node II).
    pub fn lead_reflection(&self) -> Complex64 {
        self.matrix.matrix()[(2, 2)]
    }
}

/// `S_I = e^{2ikξ} V S₀ V†` or `S_II = e^{−2ikξ} Ṽ S₀ Ṽ†`.
pub fn scattering_matrix(p: &NodeParams, k: f64, kind: NodeKind) -> Result<NodeScattering> {
    scattering_with_v(&build_v(p), p, k, kind)
}

/// Same as [`scattering_matrix`] but with an explicit `V`; the magnetic
/// module feeds `P·Ṽ` through here.
pub(crate) fn scattering_with_v(
    v: &UnitaryMatrix3,
    p: &NodeParams,
    k: f64,
    kind: NodeKind,
) -> Result<NodeScattering> {
    check_k(k)?;
    let mut diag = Vector3::zeros();
    for (d, &t) in diag.iter_mut().zip(p.theta.iter()) {
        *d = s0_entry(k, t, p.l0, kind)?;
    }
    let phase = match kind {
        NodeKind::I => Complex64::from_polar(1.0, 2.0 * k * p.xi),
        NodeKind::II => Complex64::from_polar(1.0, -2.0 * k * p.xi),
    };
    let v = v.matrix();
    let s = v * crate::CMatrix3::from_diagonal(&diag) * v.adjoint() * phase;
    Ok(NodeScattering {
        matrix: UnitaryMatrix3(s),
        k,
        kind,
    })
}
