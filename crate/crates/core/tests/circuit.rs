use proptest::prelude::*;
use qls_core::circuit::{cx_depth, dependency_graph, depth, emit_qasm, parse_qasm, strip_unary, Circuit, Operands};

#[derive(Debug, Clone)]
enum Op {
    Unary(usize, usize, Option<f64>),
    Cx(usize, usize),
}

const NAMES: [&str; 6] = ["h", "x", "t", "tdg", "rz", "u1"];

fn circuit_strategy(max_qubits: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    (2..=max_qubits).prop_flat_map(move |n| {
        let op = prop_oneof![
            (0..n, 0..NAMES.len(), proptest::option::of(-4.0f64..4.0)).prop_map(|(q, k, p)| Op::Unary(q, k, p)),
            (0..n, 1..n).prop_map(move |(a, d)| Op::Cx(a, (a + d) % n)),
        ];
        proptest::collection::vec(op, 0..=max_gates).prop_map(move |ops| {
            let mut c = Circuit::new(n);
            for op in ops {
                match op {
                    Op::Unary(q, k, p) => {
                        c.try_push(NAMES[k], Operands::Unary(q), p.into_iter().collect())
                            .unwrap();
                    }
                    Op::Cx(a, b) => {
                        c.cx(a, b);
                    }
                }
            }
            c
        })
    })
}

/// ASAP levels: each gate sits one level above the latest gate on any of its
/// qubits, tracked per wire.
fn asap_depth(c: &Circuit, count_unary: bool) -> usize {
    let mut level = vec![0usize; c.num_qubits()];
    for g in c.gates() {
        let qs = g.qubits();
        let w = usize::from(count_unary || !g.is_unary());
        let l = qs.iter().map(|&q| level[q]).max().unwrap() + w;
        for q in qs {
            level[q] = l;
        }
    }
    level.into_iter().max().unwrap_or(0)
}

/// Transitive predecessors of `g` by depth-first search over gates sharing a
/// qubit with an earlier gate.
fn dfs_closure(c: &Circuit, g: usize) -> Vec<usize> {
    let gates = c.gates();
    let mut seen = vec![false; gates.len()];
    let mut stack = vec![g];
    while let Some(x) = stack.pop() {
        for y in 0..x {
            if !seen[y] && gates[y].qubits().iter().any(|&q| gates[x].acts_on(q)) {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    (0..gates.len()).filter(|&y| seen[y]).collect()
}

#[test]
fn closure_example() {
    let mut c = Circuit::new(3);
    c.cx(0, 1).unary("h", 1).cx(1, 2);
    let deps = dependency_graph(&c);
    assert_eq!(deps.full_pred[2], vec![0, 1]);
    assert_eq!(deps.full_pred[2], dfs_closure(&c, 2));
}

#[test]
fn anchor_example_agrees_with_dependencies() {
    let mut c = Circuit::new(3);
    c.cx(0, 1).unary("t", 1).cx(1, 2);
    let deps = dependency_graph(&c);
    let (_, anchors) = strip_unary(&c);
    assert_eq!(anchors.len(), 1);
    assert_eq!(anchors[0].prev_cx, Some(0));
    assert_eq!(anchors[0].next_cx, Some(1));
    assert!(deps.pred[1].contains(&0));
    assert!(deps.succ[1].contains(&2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_emit_roundtrip(c in circuit_strategy(6, 20)) {
        let text = emit_qasm(&c, "roundtrip");
        let back = parse_qasm(&text).unwrap();
        prop_assert!(back.structurally_eq(&c), "{text}");
    }

    #[test]
    fn depth_matches_asap_layering(c in circuit_strategy(8, 50)) {
        prop_assert_eq!(depth(&c), asap_depth(&c, true));
        prop_assert_eq!(cx_depth(&c), asap_depth(&c, false));
    }

    #[test]
    fn depth_bounds_cx_depth(c in circuit_strategy(6, 30)) {
        prop_assert!(depth(&c) >= cx_depth(&c));
        prop_assert_eq!(depth(&c) == 0, c.is_empty());
        prop_assert_eq!(cx_depth(&c) == 0, c.cx_count() == 0);
    }

    #[test]
    fn full_pred_is_dfs_closure(c in circuit_strategy(5, 25)) {
        let deps = dependency_graph(&c);
        for g in 0..c.len() {
            prop_assert_eq!(&deps.full_pred[g], &dfs_closure(&c, g));
            for &p in &deps.full_pred[g] {
                prop_assert!(deps.full_succ[p].contains(&g));
            }
        }
    }

    #[test]
    fn strip_unary_keeps_cx_order(c in circuit_strategy(6, 30)) {
        let (stripped, anchors) = strip_unary(&c);
        prop_assert_eq!(stripped.cx_count(), c.cx_count());
        prop_assert_eq!(stripped.len(), c.cx_count());
        prop_assert_eq!(anchors.len(), c.len() - c.cx_count());
        let original: Vec<_> = c.gates().iter().filter(|g| g.is_cx()).map(|g| g.operands).collect();
        let kept: Vec<_> = stripped.gates().iter().map(|g| g.operands).collect();
        prop_assert_eq!(original, kept);
        prop_assert_eq!(cx_depth(&stripped), cx_depth(&c));
    }
}
