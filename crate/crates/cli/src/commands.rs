//! Table-producing subcommands.

use std::f64::consts::PI;

use qring_core::{
    find_localized_k, flux_modified_node_ii, localized_wavefunction, ring_smatrix,
    scattering_matrix, solve_ring_direct, Complex64, Error, FluxPhase, Incoming, LocalizedState,
    NodeKind, NodeScattering, RingSystem,
};
use rayon::prelude::*;

use crate::config::{ConfigError, Result, RunConfig};
use crate::output::{Cell, Table};

/// Samples per arm in the wavefunction file.
pub const WAVEFUNCTION_SAMPLES: usize = 513;

/// Default grid for the σ_min scan when the config gives no `points`.
pub const LOCALIZED_GRID: usize = 2000;

pub const SWEEP_K_COLUMNS: [&str; 10] = [
    "k",
    "kd_over_pi",
    "re_R",
    "im_R",
    "re_T",
    "im_T",
    "prob_R",
    "prob_T",
    "unitarity_residual",
    "status",
];

pub const SWEEP_FLUX_COLUMNS: [&str; 8] = [
    "theta_B", "re_R", "im_R", "re_T", "im_T", "prob_R", "prob_T", "status",
];

pub const LOCALIZED_COLUMNS: [&str; 12] = [
    "k",
    "n_estimate",
    "rank",
    "re_C2",
    "im_C2",
    "re_D2",
    "im_D2",
    "re_C3",
    "im_C3",
    "re_D3",
    "im_D3",
    "N",
];

pub const WAVEFUNCTION_COLUMNS: [&str; 5] = ["x", "re_phi2", "im_phi2", "re_phi3", "im_phi3"];

pub const SMATRIX_COLUMNS: [&str; 6] = ["matrix", "row", "col", "re", "im", "abs"];

/// `points` values from `lo` to `hi`, both ends exact.
pub fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|j| {
            if j + 1 == points {
                hi
            } else {
                lo + step * j as f64
            }
        })
        .collect()
}

fn is_singular(e: &Error) -> bool {
    matches!(e, Error::SingularAssembly(_) | Error::Extremal(_))
}

fn amplitude_cells(r: Complex64, t: Complex64) -> Vec<Cell> {
    vec![
        Cell::Num(r.re),
        Cell::Num(r.im),
        Cell::Num(t.re),
        Cell::Num(t.im),
        Cell::Num(r.norm_sqr()),
        Cell::Num(t.norm_sqr()),
    ]
}

fn status(regularized: bool) -> Cell {
    Cell::Text(if regularized { "regularized" } else { "ok" }.into())
}

fn node_ii_at(ring: &RingSystem, k: f64, flux: f64) -> qring_core::Result<NodeScattering> {
    if flux == 0.0 {
        scattering_matrix(&ring.node_ii, k, NodeKind::II)
    } else {
        flux_modified_node_ii(&ring.node_ii, FluxPhase(flux), k)
    }
}

/// Node and ring S-matrices at the configured `k`, one row per element.
///
/// A non-zero `flux` threads the ring and replaces node II by its
/// flux-modified matrix.
pub fn smatrix(cfg: &RunConfig, flux: f64) -> Result<Table> {
    let k = cfg.sweep.k.ok_or_else(|| ConfigError::MissingKey {
        section: "sweep".into(),
        key: "k".into(),
    })?;
    let ring = &cfg.ring;
    let s_i = scattering_matrix(&ring.node_i, k, NodeKind::I)?;
    let s_ii = node_ii_at(ring, k, flux)?;
    let mut table = Table::new(SMATRIX_COLUMNS.to_vec());
    let mut push = |name: &str, row: String, col: String, z: Complex64| {
        table.push(vec![
            Cell::Text(name.into()),
            Cell::Text(row),
            Cell::Text(col),
            Cell::Num(z.re),
            Cell::Num(z.im),
            Cell::Num(z.norm()),
        ]);
    };
    for (name, s) in [("S_I", &s_i), ("S_II", &s_ii)] {
        let axes = s.kind.axes();
        let m = s.matrix.matrix();
        for (i, out) in axes.iter().enumerate() {
            for (j, inc) in axes.iter().enumerate() {
                push(name, out.to_string(), inc.to_string(), m[(i, j)]);
            }
        }
    }
    let sr = ring_smatrix(&s_i, &s_ii)?;
    let ports = ["x1", "x4"];
    for (i, out) in ports.iter().enumerate() {
        for (j, inc) in ports.iter().enumerate() {
            push("S_R", out.to_string(), inc.to_string(), sr.matrix[(i, j)]);
        }
    }
    Ok(table)
}

/// `R`, `T` across the configured k grid. With `verify`, every row is also
/// solved by the direct oracle and the larger of the two deviations is
/// appended.
pub fn sweep_k(cfg: &RunConfig) -> Result<Table> {
    let (k_min, k_max, points) = cfg.sweep.k_range()?;
    let ring = cfg.ring;
    let d = ring.d();
    let mut columns = SWEEP_K_COLUMNS.to_vec();
    if cfg.verify {
        columns.push("oracle_deviation");
    }
    let width = columns.len();
    let verify = cfg.verify;
    let rows: Vec<std::result::Result<Vec<Cell>, Error>> = grid(k_min, k_max, points)
        .into_par_iter()
        .map(|k| {
            let mut row = vec![Cell::Num(k), Cell::Num(k * d / PI)];
            let (s_i, s_ii) = ring.node_scattering(k)?;
            match ring_smatrix(&s_i, &s_ii) {
                Ok(sr) => {
                    let (r, t) = (sr.reflection(), sr.transmission());
                    row.extend(amplitude_cells(r, t));
                    row.push(Cell::Num(r.norm_sqr() + t.norm_sqr() - 1.0));
                    row.push(status(sr.regularized));
                    if verify {
                        let o = solve_ring_direct(&ring, k, FluxPhase(0.0), Incoming::FromX1)?;
                        let dev = (o.amplitudes.psi[0] - r)
                            .norm()
                            .max((o.amplitudes.phi[3] - t).norm());
                        row.push(Cell::Num(dev));
                    }
                }
                Err(e) if is_singular(&e) => {
                    row.resize(width, Cell::Empty);
                    row[9] = Cell::Text("singular".into());
                }
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect();
    let mut table = Table::new(columns);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

/// `R`, `T` of a symmetric ring at fixed `k` across the flux grid.
pub fn sweep_flux(cfg: &RunConfig) -> Result<Table> {
    let (lo, hi, points, k) = cfg.sweep.flux_range()?;
    if !cfg.ring.is_symmetric() {
        return Err(ConfigError::Invalid(
            "sweep-flux needs a symmetric ring (node II must realize the same junction as \
             node I); the flux response is only defined here for that case. Pass --symmetric \
             or make [node_II] match [node_I]"
                .into(),
        ));
    }
    let ring = cfg.ring;
    let rows: Vec<std::result::Result<Vec<Cell>, Error>> = grid(lo, hi, points)
        .into_par_iter()
        .map(|tb| {
            let mut row = vec![Cell::Num(tb)];
            match qring_core::flux_ring_response(&ring, k, FluxPhase(tb)) {
                Ok(f) => {
                    row.extend(amplitude_cells(f.response.r, f.response.t));
                    row.push(status(f.regularized));
                }
                Err(e) if is_singular(&e) => {
                    row.extend(std::iter::repeat_n(Cell::Empty, 6));
                    row.push(Cell::Text("singular".into()));
                }
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect();
    let mut table = Table::new(SWEEP_FLUX_COLUMNS.to_vec());
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

/// One row per localized state found in the configured k range, plus the
/// states themselves (symmetric rings only).
pub fn localized(cfg: &RunConfig) -> Result<(Table, Vec<LocalizedState>)> {
    let need = |v: Option<f64>, key: &str| {
        v.ok_or_else(|| ConfigError::MissingKey {
            section: "sweep".into(),
            key: key.into(),
        })
    };
    let k_min = need(cfg.sweep.k_min, "k_min")?;
    let k_max = need(cfg.sweep.k_max, "k_max")?;
    let points = cfg.sweep.points.unwrap_or(LOCALIZED_GRID);
    let ring = &cfg.ring;
    let d = ring.d();
    let symmetric = ring.is_symmetric();
    let mut table = Table::new(LOCALIZED_COLUMNS.to_vec());
    let mut states = Vec::new();
    for hit in find_localized_k(ring, k_min, k_max, points)? {
        let n = (hit.k * d / PI).round().max(0.0) as u32;
        let mut row = vec![
            Cell::Num(hit.k),
            Cell::Int(n as i64),
            Cell::Int(hit.rank as i64),
        ];
        let state = if symmetric && n > 0 {
            match localized_wavefunction(ring, n) {
                Ok(s) => Some(s),
                Err(Error::DegenerateState { .. }) => None,
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };
        match state {
            Some(s) => {
                for z in [s.c2, s.d2, s.c3, s.d3] {
                    row.push(Cell::Num(z.re));
                    row.push(Cell::Num(z.im));
                }
                row.push(Cell::Num(s.norm));
                states.push(s);
            }
            None => row.extend(std::iter::repeat_n(Cell::Empty, 9)),
        }
        table.push(row);
    }
    Ok((table, states))
}

/// `φ₂`, `φ₃` sampled at [`WAVEFUNCTION_SAMPLES`] points on the arm.
pub fn wavefunction_table(state: &LocalizedState) -> Table {
    let mut table = Table::new(WAVEFUNCTION_COLUMNS.to_vec());
    for (x, p2, p3) in state.sample(WAVEFUNCTION_SAMPLES) {
        table.push(vec![
            Cell::Num(x),
            Cell::Num(p2.re),
            Cell::Num(p2.im),
            Cell::Num(p3.re),
            Cell::Num(p3.im),
        ]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_both_ends() {
        let g = grid(0.3, 1.7, 8);
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], 0.3);
        assert_eq!(g[7], 1.7);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
