#![allow(dead_code)]

use std::f64::consts::TAU;

use qring_core::{EulerAngles, NodeParams, RingSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_node<R: Rng>(rng: &mut R, xi: f64) -> NodeParams {
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
    NodeParams::new(theta, euler, l0, xi).unwrap()
}

pub fn random_symmetric_ring<R: Rng>(rng: &mut R) -> RingSystem {
    let d = rng.gen_range(0.5..2.0);
    let xi_ii = rng.gen_range(-1.0..1.0);
    let node = random_node(rng, 0.0);
    RingSystem::symmetric(node, xi_ii + d, xi_ii).unwrap()
}

pub fn random_ring<R: Rng>(rng: &mut R) -> RingSystem {
    let d = rng.gen_range(0.5..2.0);
    let xi_ii = rng.gen_range(-1.0..1.0);
    let a = random_node(rng, xi_ii + d);
    let b = random_node(rng, xi_ii);
    RingSystem::new(a, b).unwrap()
}
