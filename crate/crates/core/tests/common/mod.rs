#![allow(dead_code)]

use qls_core::circuit::Circuit;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const UNARY: [&str; 5] = ["h", "x", "t", "s", "tdg"];

/// A random circuit with `qubits` qubits, `cx` CX gates and `unary` unary
/// gates in random order.
pub fn random_circuit(rng: &mut StdRng, qubits: usize, cx: usize, unary: usize) -> Circuit {
    let mut kinds: Vec<bool> = std::iter::repeat_n(true, cx)
        .chain(std::iter::repeat_n(false, unary))
        .collect();
    for i in (1..kinds.len()).rev() {
        kinds.swap(i, rng.random_range(0..=i));
    }
    let mut c = Circuit::new(qubits);
    for is_cx in kinds {
        if is_cx {
            let a = rng.random_range(0..qubits);
            let mut b = rng.random_range(0..qubits - 1);
            if b >= a {
                b += 1;
            }
            c.cx(a, b);
        } else {
            let q = rng.random_range(0..qubits);
            c.unary(UNARY[rng.random_range(0..UNARY.len())], q);
        }
    }
    c
}

/// Instances in the fuzzing range: 2 to 4 qubits (capped by the platform),
/// 2 to 8 CX gates and 0 to 3 unary gates.
pub fn fuzz_instances(seed: u64, count: usize, max_qubits: usize) -> Vec<Circuit> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let q = rng.random_range(2..=max_qubits.min(4));
            let cx = rng.random_range(2..=8);
            let u = rng.random_range(0..=3);
            random_circuit(&mut rng, q, cx, u)
        })
        .collect()
}
