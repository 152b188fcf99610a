//! Fixtures shared by the criterion benchmarks.

use qring_core::{EulerAngles, NodeParams, RingSystem};

/// A generic mirror-symmetric ring with `d = 1`.
pub fn symmetric_ring() -> RingSystem {
    let euler = EulerAngles {
        alpha: 0.4,
        beta: 1.3,
        gamma: -0.2,
        delta: 0.8,
        a: 2.1,
        b: -0.6,
    };
    let node = NodeParams::new([0.7, 2.2, -1.4], euler, 1.1, 0.0).expect("valid node");
    RingSystem::symmetric(node, 1.0, 0.0).expect("valid ring")
}

/// The symmetric ring with node II's first eigenphase perturbed.
pub fn asymmetric_ring() -> RingSystem {
    let mut ring = symmetric_ring();
    ring.node_ii.theta[0] += 0.1;
    ring
}
