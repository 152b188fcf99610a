//! Localized states on the ring arms.
//!
//! A state with `Φ₁ = Φ₄ = 0` has to satisfy all six junction equations with
//! only the four arm amplitudes `(φ₂, ψ₂, φ₃, ψ₃)`. Such a state exists iff
//! the 6x4 matching matrix `M` is rank deficient.

use std::f64::consts::PI;

use nalgebra::SMatrix;
use num_complex::Complex64;

use crate::error::{check_k, Error, Result};
use crate::ring::RingSystem;
use crate::su3::{build_v, NodeParams};

/// Default relative cut-off for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// A refined `σ_min/σ_max` below this value counts as a localized state.
pub const LOCALIZED_THRESHOLD: f64 = 1e-6;

/// Composite Simpson panels per arm for normalization checks.
pub const QUADRATURE_PANELS: usize = 2048;

pub type Matrix6x4 = SMatrix<Complex64, 6, 4>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingMatrix {
    pub entries: Matrix6x4,
    pub k: f64,
}

impl MatchingMatrix {
    pub fn singular_values(&self) -> [f64; 4] {
        let sv = self.entries.singular_values();
        let mut out = [sv[0], sv[1], sv[2], sv[3]];
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// `σ_min / σ_max`, or 0 for the zero matrix.
    pub fn deficiency(&self) -> f64 {
        let sv = self.singular_values();
        if sv[0] == 0.0 {
            0.0
        } else {
            sv[3] / sv[0]
        }
    }

    /// `max_i |(M·x)_i|` for arm amplitudes `x = (φ₂, ψ₂, φ₃, ψ₃)`.
    pub fn residual(&self, amplitudes: &[Complex64; 4]) -> f64 {
        let x = nalgebra::Vector4::from(*amplitudes);
        (self.entries * x)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Three rows of `M` contributed by one node.
///
/// Row `i` is `(V*₂ᵢκᵢe^{2ikξ}, V*₂ᵢκᵢ*, V*₃ᵢκᵢe^{2ikξ}, V*₃ᵢκᵢ*)` with
/// `κᵢ = 1 + ikL_(i)`, multiplied by the real factor `sin(θᵢ/2)/|·|` so that
/// the Neumann limit stays finite and every row has unit scale. Row scaling
/// leaves the rank and null space unchanged.
fn node_rows(p: &NodeParams, k: f64) -> [[Complex64; 4]; 3] {
    let v = build_v(p);
    let v = v.matrix();
    let phase = Complex64::from_polar(1.0, 2.0 * k * p.xi);
    let mut rows = [[Complex64::default(); 4]; 3];
    for (i, row) in rows.iter_mut().enumerate() {
        let (s, c) = (0.5 * p.theta[i]).sin_cos();
        let t = k * p.l0 * c;
        let h = s.hypot(t);
        let kappa = Complex64::new(s / h, t / h);
        let (a2, a3) = (v[(0, i)].conj(), v[(1, i)].conj());
        *row = [
            a2 * kappa * phase,
            a2 * kappa.conj(),
            a3 * kappa * phase,
            a3 * kappa.conj(),
        ];
    }
    rows
}

/// Matching matrix acting on `(φ₂, ψ₂, φ₃, ψ₃)`: rows 1-3 from node I,
/// rows 4-6 from node II.
pub fn build_m(ring: &RingSystem, k: f64) -> Result<MatchingMatrix> {
    check_k(k)?;
    let mut entries = Matrix6x4::zeros();
    for (block, p) in [&ring.node_i, &ring.node_ii].into_iter().enumerate() {
        for (i, row) in node_rows(p, k).iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                entries[(3 * block + i, j)] = *z;
            }
        }
    }
    Ok(MatchingMatrix { entries, k })
}

/// Number of singular values above `rel_tol·σ_max`.
pub fn numerical_rank(m: &MatchingMatrix, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rank tolerance must lie in (0, 1), got {rel_tol}"
        )));
    }
    let sv = m.singular_values();
    if sv[0] == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * sv[0]).count())
}

/// A rank-deficient point found by [`find_localized_k`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedHit {
    pub k: f64,
    pub rank: usize,
    /// Refined `σ_min/σ_max`.
    pub deficiency: f64,
}

/// Golden-section minimization of `f` on `[a, b]` down to interval `width`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    width: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // hard cap guards against a width below the floating-point spacing
    for _ in 0..200 {
        if b - a <= width {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Indices of grid-local minima (plateaus report every member).
pub fn grid_minima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&j| {
            let left = j == 0 || values[j] <= values[j - 1];
            let right = j + 1 == n || values[j] <= values[j + 1];
            left && right
        })
        .collect()
}

/// Scans `σ_min/σ_max` of `M(k)` on a uniform grid, refines every grid
/// minimum by golden section to width `1e-12·(k_max − k_min)`, and keeps the
/// refined points whose deficiency drops below [`LOCALIZED_THRESHOLD`].
pub fn find_localized_k(
    ring: &RingSystem,
    k_min: f64,
    k_max: f64,
    grid_points: usize,
) -> Result<Vec<LocalizedHit>> {
    if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }
    if grid_points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 grid points, got {grid_points}"
        )));
    }
    let span = k_max - k_min;
    let step = span / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points)
        .map(|j| {
            if j + 1 == grid_points {
                k_max
            } else {
                k_min + step * j as f64
            }
        })
        .collect();
    let deficiency = |k: f64| {
        build_m(ring, k)
            .map(|m| m.deficiency())
            .unwrap_or(f64::INFINITY)
    };
    let values: Vec<f64> = grid.iter().map(|&k| deficiency(k)).collect();

    let width = 1e-12 * span;
    let mut hits: Vec<LocalizedHit> = Vec::new();
    for j in grid_minima(&values) {
        let lo = grid[j.saturating_sub(1)];
        let hi = grid[(j + 1).min(grid_points - 1)];
        let (k, def) = golden_section_min(deficiency, lo, hi, width);
        if def >= LOCALIZED_THRESHOLD {
            continue;
        }
        let rank = numerical_rank(&build_m(ring, k)?, DEFAULT_RANK_TOL)?;
        hits.push(LocalizedHit {
            k,
            rank,
            deficiency: def,
        });
    }
    hits.sort_by(|a, b| a.k.total_cmp(&b.k));
    let mut merged: Vec<LocalizedHit> = Vec::with_capacity(hits.len());
    for h in hits {
        match merged.last_mut() {
            Some(last) if h.k - last.k < step => {
                if h.deficiency < last.deficiency {
                    *last = h;
                }
            }
            _ => merged.push(h),
        }
    }
    Ok(merged)
}

/// Normalized localized state of a symmetric ring at `k = nπ/d`.
///
/// On each arm `φ_j(x) = (C_j sin k(x−ξ_II) + D_j cos k(x−ξ_II)) / N`.
/// The coefficients are the cofactor solution of the three independent
/// junction rows; they carry a common real factor `Π sin(θᵢ/2)/|κᵢ sin(θᵢ/2)|`
/// relative to the plain `kL_(i)` sums, which keeps `θᵢ = 0` finite and
/// cancels in the normalized wavefunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedState {
    pub k: f64,
    pub n: u32,
    pub c2: Complex64,
    pub d2: Complex64,
    pub c3: Complex64,
    pub d3: Complex64,
    pub norm: f64,
    pub xi_i: f64,
    pub xi_ii: f64,
}

impl LocalizedState {
    fn arm(&self, c: Complex64, d: Complex64, x: f64) -> Complex64 {
        let (s, co) = (self.k * (x - self.xi_ii)).sin_cos();
        (c * s + d * co) / self.norm
    }

    pub fn phi2(&self, x: f64) -> Complex64 {
        self.arm(self.c2, self.d2, x)
    }

    pub fn phi3(&self, x: f64) -> Complex64 {
        self.arm(self.c3, self.d3, x)
    }

    /// Sign relating the values at `ξ_I` to those at `ξ_II`, `cos(kd) = (−1)ⁿ`.
    pub fn node_sign(&self) -> f64 {
        if self.n.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Plane-wave amplitudes `(φ₂, ψ₂, φ₃, ψ₃)` of the same state.
    pub fn plane_wave_amplitudes(&self) -> [Complex64; 4] {
        let shift = Complex64::from_polar(1.0, -self.k * self.xi_ii);
        let half_i = Complex64::new(0.0, 0.5);
        let split = |c: Complex64, d: Complex64| {
            let fwd = (0.5 * d - half_i * c) / self.norm * shift;
            let bwd = (0.5 * d + half_i * c) / self.norm * shift.conj();
            (fwd, bwd)
        };
        let (p2, q2) = split(self.c2, self.d2);
        let (p3, q3) = split(self.c3, self.d3);
        [p2, q2, p3, q3]
    }

    /// `∫|φ₂|² + ∫|φ₃|²` over the arms by composite Simpson.
    pub fn norm_by_quadrature(&self) -> f64 {
        let density = |x: f64| self.phi2(x).norm_sqr() + self.phi3(x).norm_sqr();
        simpson(density, self.xi_ii, self.xi_i, QUADRATURE_PANELS)
    }

    /// `points` equally spaced samples `(x, φ₂(x), φ₃(x))` on `[ξ_II, ξ_I]`.
    pub fn sample(&self, points: usize) -> Vec<(f64, Complex64, Complex64)> {
        let n = points.max(2);
        let h = (self.xi_i - self.xi_ii) / (n - 1) as f64;
        (0..n)
            .map(|j| {
                let x = if j + 1 == n {
                    self.xi_i
                } else {
                    self.xi_ii + h * j as f64
                };
                (x, self.phi2(x), self.phi3(x))
            })
            .collect()
    }
}

/// Composite Simpson rule with an even number of panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2) + panels % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for j in 1..n {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * j as f64);
    }
    acc * h / 3.0
}

/// Constructs the localized state of index `n ≥ 1` on a symmetric ring.
pub fn localized_wavefunction(ring: &RingSystem, n: u32) -> Result<LocalizedState> {
    if !ring.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "resonance index n must be >= 1".into(),
        ));
    }
    let d = ring.d();
    let k = n as f64 * PI / d;
    let p = &ring.node_i;
    let v = build_v(p);
    let v = v.matrix();

    // (sin, kL0 cos) scaled onto the unit circle: kL_(i) = t[i] / s[i]
    let mut s = [0.0; 3];
    let mut t = [0.0; 3];
    for i in 0..3 {
        let (si, ci) = (0.5 * p.theta[i]).sin_cos();
        let ti = k * p.l0 * ci;
        let h = si.hypot(ti);
        s[i] = si / h;
        t[i] = ti / h;
    }
    let mut c2 = Complex64::default();
    let mut d2 = Complex64::default();
    let mut c3 = Complex64::default();
    let mut d3 = Complex64::default();
    for m in 0..3 {
        let (m1, m2) = ((m + 1) % 3, (m + 2) % 3);
        let wc = t[m] * s[m1] * s[m2];
        let wd = s[m] * t[m1] * t[m2];
        let arm2 = v[(1, m)].conj() * v[(2, m)];
        let arm3 = v[(0, m)].conj() * v[(2, m)];
        c2 += arm2 * wc;
        d2 += arm2 * wd;
        c3 -= arm3 * wc;
        d3 -= arm3 * wd;
    }
    let sum_sq = c2.norm_sqr() + d2.norm_sqr() + c3.norm_sqr() + d3.norm_sqr();
    if sum_sq.sqrt() <= 1e-12 {
        return Err(Error::DegenerateState {
            n,
            norm: sum_sq.sqrt(),
        });
    }
    Ok(LocalizedState {
        k,
        n,
        c2,
        d2,
        c3,
        d3,
        norm: (0.5 * d * sum_sq).sqrt(),
        xi_i: ring.node_i.xi,
        xi_ii: ring.node_ii.xi,
    })
}
