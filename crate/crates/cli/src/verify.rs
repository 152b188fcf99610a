//! Oracle-vs-closed-form verification report.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use qring_core::{
    flux_ring_response, flux_rt_special, reconstruct_node_smatrix, ring_smatrix, scattering_matrix,
    solve_ring_direct, special_switch_node, Complex64, EulerAngles, FluxPhase, Incoming, NodeKind,
    NodeParams, NodeScattering, RingSystem, UnitaryMatrix3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::commands::grid;
use crate::config::RunConfig;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_DRAWS: usize = 100;

const ORACLE_TOL: f64 = 1e-10;
const UNITARITY_TOL: f64 = 1e-12;
const CLOSED_FORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub draws: usize,
    /// Scale one cached node S-matrix entry so that unitarity breaks.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            draws: DEFAULT_DRAWS,
            inject_fault: false,
        }
    }
}

/// One line of the report. `tol == None` marks an informational value.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
    pub tol: Option<f64>,
    pub samples: usize,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.tol {
            Some(t) => self.max_deviation <= t,
            None => true,
        }
    }

    fn label(&self) -> &'static str {
        match (self.tol, self.passed()) {
            (None, _) => "INFO",
            (Some(_), true) => "PASS",
            (Some(_), false) => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub draws: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "qring verify: seed {} draws {}", self.seed, self.draws);
        for c in &self.checks {
            let tol = c
                .tol
                .map_or("informational".to_string(), |t| format!("tol {t:.0e}"));
            let _ = writeln!(
                s,
                "{} {:<48} max deviation {:.3e} ({tol}, {} samples)",
                c.label(),
                c.name,
                c.max_deviation,
                c.samples
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        if failed == 0 {
            let _ = writeln!(s, "result: all checks passed");
        } else {
            let _ = writeln!(s, "result: {failed} check(s) failed");
        }
        s
    }

    pub fn to_json(&self) -> String {
        let checks: Vec<_> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "check": c.name,
                    "status": c.label(),
                    "max_deviation": c.max_deviation,
                    "tolerance": c.tol,
                    "samples": c.samples,
                })
            })
            .collect();
        let v = json!({
            "seed": self.seed,
            "draws": self.draws,
            "passed": self.passed(),
            "checks": checks,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }
}

fn random_node(rng: &mut ChaCha8Rng, xi: f64) -> NodeParams {
    let mut angle = || rng.gen_range(0.0..TAU);
    let theta = [angle(), angle(), angle()];
    let euler = EulerAngles {
        alpha: angle(),
        beta: angle(),
        gamma: angle(),
        delta: angle(),
        a: angle(),
        b: angle(),
    };
    let l0 = rng.gen_range(0.5..2.0);
    NodeParams::new(theta, euler, l0, xi).expect("drawn parameters are valid")
}

fn random_ring(rng: &mut ChaCha8Rng, symmetric: bool) -> RingSystem {
    let d = rng.gen_range(0.5..2.0);
    let xi_ii = rng.gen_range(-1.0..1.0);
    let a = random_node(rng, xi_ii + d);
    let b = if symmetric {
        a.with_xi(xi_ii)
    } else {
        random_node(rng, xi_ii)
    };
    RingSystem::new(a, b).expect("drawn ring is valid")
}

struct Tally {
    name: &'static str,
    tol: Option<f64>,
    worst: f64,
    samples: usize,
}

impl Tally {
    fn new(name: &'static str, tol: Option<f64>) -> Self {
        Tally {
            name,
            tol,
            worst: 0.0,
            samples: 0,
        }
    }

    /// Failed evaluations count as infinite deviation.
    fn add(&mut self, dev: Option<f64>) {
        self.samples += 1;
        let d = dev.unwrap_or(f64::INFINITY);
        if d.is_nan() || d > self.worst {
            self.worst = if d.is_nan() { f64::INFINITY } else { d };
        }
    }

    fn finish(self) -> Check {
        Check {
            name: self.name.into(),
            max_deviation: self.worst,
            tol: self.tol,
            samples: self.samples,
        }
    }
}

fn max_diff(a: &qring_core::CMatrix3, b: &qring_core::CMatrix3) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn oracle_gap(ring: &RingSystem, k: f64, f: FluxPhase, r: Complex64, t: Complex64) -> Option<f64> {
    let o = solve_ring_direct(ring, k, f, Incoming::FromX1)
        .ok()?
        .amplitudes;
    Some((o.psi[0] - r).norm().max((o.phi[3] - t).norm()))
}

pub fn run(cfg: Option<&RunConfig>, opts: VerifyOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();

    // node matrices are computed once and checked from the cache
    let mut cache: Vec<(NodeParams, NodeScattering)> = Vec::with_capacity(2 * opts.draws);
    for _ in 0..opts.draws {
        let xi = rng.gen_range(-2.0..2.0);
        let p = random_node(&mut rng, xi);
        let k = rng.gen_range(0.05..10.0);
        for kind in [NodeKind::I, NodeKind::II] {
            if let Ok(s) = scattering_matrix(&p, k, kind) {
                cache.push((p, s));
            }
        }
    }
    if opts.inject_fault {
        if let Some((_, s)) = cache.first_mut() {
            let mut m = *s.matrix.matrix();
            m[(0, 0)] *= 1.1;
            s.matrix = UnitaryMatrix3::from_matrix_unchecked(m);
        }
    }
    let mut unitarity = Tally::new("node S-matrix unitarity", Some(UNITARITY_TOL));
    let mut node_oracle = Tally::new("node S-matrix vs direct junction solve", Some(ORACLE_TOL));
    for (p, s) in &cache {
        unitarity.add(Some(s.matrix.unitarity_residual()));
        let direct = reconstruct_node_smatrix(p, s.k, s.kind).ok();
        node_oracle.add(direct.map(|d| max_diff(&d, s.matrix.matrix())));
    }
    checks.push(unitarity.finish());
    checks.push(node_oracle.finish());

    let mut ring_oracle = Tally::new("ring response vs direct solve", Some(ORACLE_TOL));
    let mut ring_unitarity = Tally::new("ring S-matrix unitarity", Some(ORACLE_TOL));
    for _ in 0..opts.draws {
        let ring = random_ring(&mut rng, false);
        let k = rng.gen_range(0.05..10.0);
        let sr = ring
            .node_scattering(k)
            .and_then(|(a, b)| ring_smatrix(&a, &b))
            .ok();
        ring_unitarity.add(sr.map(|s| s.unitarity_residual()));
        ring_oracle.add(
            sr.and_then(|s| oracle_gap(&ring, k, FluxPhase(0.0), s.reflection(), s.transmission())),
        );
    }
    checks.push(ring_oracle.finish());
    checks.push(ring_unitarity.finish());

    let mut flux_oracle = Tally::new("flux response vs direct solve", Some(ORACLE_TOL));
    let mut closed_r = Tally::new("closed-form flux R vs assembly", Some(CLOSED_FORM_TOL));
    let mut closed_tq = Tally::new(
        "closed-form flux T, quarter-angle factor",
        Some(CLOSED_FORM_TOL),
    );
    let mut closed_th = Tally::new("closed-form flux T, printed half-angle factor", None);
    for _ in 0..opts.draws {
        let ring = random_ring(&mut rng, true);
        let k = rng.gen_range(0.05..10.0);
        let f = FluxPhase(rng.gen_range(0.0..TAU));
        let Ok(fr) = flux_ring_response(&ring, k, f) else {
            flux_oracle.add(None);
            continue;
        };
        flux_oracle.add(oracle_gap(&ring, k, f, fr.response.r, fr.response.t));
        if fr.closed_form.is_some() {
            closed_r.add(fr.r_deviation());
            closed_tq.add(fr.t_quarter_deviation());
            closed_th.add(fr.t_half_deviation());
        }
    }
    checks.push(flux_oracle.finish());
    checks.push(closed_r.finish());
    checks.push(closed_tq.finish());
    checks.push(closed_th.finish());

    checks.extend(switch_suite());
    if let Some(cfg) = cfg {
        checks.push(configured_ring(cfg));
    }

    VerifyReport {
        seed: opts.seed,
        draws: opts.draws,
        checks,
    }
}

/// Reflectionless switch node on a ring with `d = 1.3`: the assembly must
/// give `R = 0` at even multiples of π and `T = 0` at odd ones, and the
/// special-case closed form is compared against it on a flux grid.
fn switch_suite() -> Vec<Check> {
    let d = 1.3;
    let xi_ii = 0.4;
    let node = special_switch_node(1.0, 0.0).expect("switch node is valid");
    let ring = RingSystem::symmetric(node, xi_ii + d, xi_ii).expect("switch ring is valid");
    let mut switch = Tally::new(
        "switch fixture: R(2nπ) = 0, T((2n+1)π) = 0",
        Some(ORACLE_TOL),
    );
    let mut special = Tally::new(
        "switch fixture: special closed form vs assembly",
        Some(CLOSED_FORM_TOL),
    );
    let mut printed = Tally::new("switch fixture: printed-form T residual", None);
    for n in 1..=2 {
        let k = n as f64 * PI / d;
        for m in 0..=3 {
            let f = FluxPhase(m as f64 * PI);
            let resp = flux_ring_response(&ring, k, f).ok().map(|x| x.response);
            switch.add(resp.map(|x| if m % 2 == 0 { x.r.norm() } else { x.t.norm() }));
        }
        for tb in grid(0.0, 2.0 * PI, 33) {
            let f = FluxPhase(tb);
            let Ok(fr) = flux_ring_response(&ring, k, f) else {
                special.add(None);
                continue;
            };
            let closed = flux_rt_special(k, d, xi_ii + d, f).ok();
            special.add(closed.map(|c| {
                (c.r - fr.response.r)
                    .norm()
                    .max((c.t - fr.response.t).norm())
            }));
            if fr.closed_form.is_some() {
                printed.add(fr.t_half_deviation());
            }
        }
    }
    vec![switch.finish(), special.finish(), printed.finish()]
}

/// The configured ring against the oracle on its sweep grid, or on
/// `[0.05, 10]` when no k range is configured. Singular points are skipped.
fn configured_ring(cfg: &RunConfig) -> Check {
    let ring = cfg.ring;
    let ks = match cfg.sweep.k_range() {
        Ok((lo, hi, n)) => grid(lo, hi, n),
        Err(_) => grid(0.05, 10.0, 200),
    };
    let mut tally = Tally::new("configured ring vs direct solve", Some(ORACLE_TOL));
    for k in ks {
        let Ok(sr) = ring
            .node_scattering(k)
            .and_then(|(a, b)| ring_smatrix(&a, &b))
        else {
            continue;
        };
        tally.add(oracle_gap(
            &ring,
            k,
            FluxPhase(0.0),
            sr.reflection(),
            sr.transmission(),
        ));
    }
    tally.finish()
}
