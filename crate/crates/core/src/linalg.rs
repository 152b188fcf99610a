//! Small dense complex helpers shared by the physics modules.

use nalgebra::{SMatrix, SVector, Vector2};
use num_complex::Complex64;

use crate::{CMatrix2, CMatrix3};

pub(crate) fn dagger(m: &CMatrix3) -> CMatrix3 {
    m.adjoint()
}

/// `max |m_ij − δ_ij|`.
pub(crate) fn identity_deviation<const N: usize>(m: &SMatrix<Complex64, N, N>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in 0..N {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

pub(crate) fn max_abs_diff<const R: usize, const C: usize>(
    a: &SMatrix<Complex64, R, C>,
    b: &SMatrix<Complex64, R, C>,
) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn det2(m: &CMatrix2) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Minimum-norm solution of `m·x = b` keeping only singular values above
/// `rel_cut·σ_max`. Returns the solution and the residual `‖m·x − b‖`.
///
/// Worked out from the closed-form eigensystem of `m†m`; nalgebra's 2x2
/// complex SVD loses accuracy (reconstruction errors near 1e-3) on nearly
/// rank-one input.
pub(crate) fn min_norm_solve(
    m: &CMatrix2,
    b: &Vector2<Complex64>,
    rel_cut: f64,
) -> (Vector2<Complex64>, f64) {
    let h = m.adjoint() * m;
    let (p, q, off) = (h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)]);
    let mean = 0.5 * (p + q);
    let spread = (0.5 * (p - q)).hypot(off.norm());
    let top = mean + spread;
    if top <= 0.0 {
        return (Vector2::zeros(), b.norm());
    }
    // |det m| = σ_max·σ_min avoids the cancellation in mean − spread
    let smax = top.sqrt();
    let smin = det2(m).norm() / smax;
    let x = if smin > rel_cut * smax {
        match solve_pivoted(*m, *b) {
            Some((x, _)) => x,
            None => Vector2::zeros(),
        }
    } else {
        // dominant right singular vector, built from the better conditioned
        // of the two eigenvector formulas
        let v = if p >= q {
            Vector2::new(Complex64::from(top - q), off.conj())
        } else {
            Vector2::new(off, Complex64::from(top - p))
        };
        let v = v / Complex64::from(v.norm());
        let mv = m * v;
        v * (mv.dotc(b) / Complex64::from(top))
    };
    let residual = (m * x - b).norm();
    (x, residual)
}

/// Gaussian elimination with partial pivoting.
///
/// Returns the solution and the pivot ratio `max|p| / min|p|` as a cheap
/// condition estimate; `None` when a pivot is exactly zero.
pub(crate) fn solve_pivoted<const N: usize>(
    mut a: SMatrix<Complex64, N, N>,
    mut b: SVector<Complex64, N>,
) -> Option<(SVector<Complex64, N>, f64)> {
    let mut pmax = 0.0_f64;
    let mut pmin = f64::INFINITY;
    for col in 0..N {
        let pivot_row = (col..N)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .expect("non-empty range");
        let p = a[(pivot_row, col)];
        if p.norm() == 0.0 {
            return None;
        }
        if pivot_row != col {
            a.swap_rows(pivot_row, col);
            b.swap_rows(pivot_row, col);
        }
        pmax = pmax.max(p.norm());
        pmin = pmin.min(p.norm());
        for row in col + 1..N {
            let f = a[(row, col)] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..N {
                let delta = f * a[(col, k)];
                a[(row, k)] -= delta;
            }
            let delta = f * b[col];
            b[row] -= delta;
        }
    }
    let mut x = SVector::<Complex64, N>::zeros();
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc -= a[(row, k)] * x[k];
        }
        x[row] = acc / a[(row, row)];
    }
    Some((x, pmax / pmin))
}
