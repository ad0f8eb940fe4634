mod common;

use flg::optimize::{
    approx_mwss_trianglefree, max_stable_set, max_stable_set_brute, solve_uflp, uflp_brute, UflpInstance,
};
use flg::{Digraph, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn branch_and_bound_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..300 {
        let n = rng.gen_range(0..=16);
        let p = rng.gen_range(0.05..0.7);
        let g = common::random_graph(&mut rng, n, p);
        let g = if rng.gen_bool(0.5) {
            let w = (0..n).map(|_| common::random_rational(&mut rng, 9) - Weight::from_integer(2)).collect();
            g.with_weights(w).unwrap()
        } else {
            g
        };
        let fast = max_stable_set(&g).unwrap();
        let brute = max_stable_set_brute(&g).unwrap();
        assert!(fast.is_stable(&g));
        assert_eq!(fast.weight, brute.weight, "{:?}", g.edges());
        let sum: Weight = fast.nodes.iter().map(|&v| g.weight(v)).sum();
        assert_eq!(sum, fast.weight);
    }
}

#[test]
fn colour_class_is_a_third_of_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..300 {
        let arcs = rng.gen_range(1..=30);
        let (_, g) = common::random_trianglefree_preimage(&mut rng, arcs);
        let w = (0..g.node_count())
            .map(|_| common::random_rational(&mut rng, 10) - Weight::from_integer(3))
            .collect();
        let g = g.with_weights(w).unwrap();
        let approx = approx_mwss_trianglefree(&g).unwrap();
        let opt = max_stable_set(&g).unwrap();
        assert!(approx.is_stable(&g));
        assert!(approx.weight * Weight::from_integer(3) >= opt.weight, "{} vs {}", approx.weight, opt.weight);
        assert!(approx.weight <= opt.weight);
    }
}

fn integer_uflp(rng: &mut ChaCha8Rng) -> UflpInstance {
    let n = rng.gen_range(2..=9);
    let mut d = Digraph::new(n);
    for _ in 0..rng.gen_range(0..=16) {
        let (t, h) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if t != h {
            d.add_arc(t, h).unwrap();
        }
    }
    let f = (0..n).map(|_| Weight::from_integer(rng.gen_range(0..=20))).collect();
    let c = (0..d.arc_count()).map(|_| Weight::from_integer(rng.gen_range(0..=20))).collect();
    UflpInstance::new(d, f, c).unwrap()
}

#[test]
fn uflp_on_integer_costs() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for trial in 0..500 {
        let inst = integer_uflp(&mut rng);
        let fast = solve_uflp(&inst).unwrap();
        let brute = uflp_brute(&inst).unwrap();
        assert!(fast.is_valid(&inst), "trial {trial}");
        assert!(brute.is_valid(&inst), "trial {trial}");
        assert_eq!(fast.objective, brute.objective, "trial {trial}");
        assert!(fast.objective.is_integer());
    }
}

#[test]
fn uflp_text_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    for _ in 0..50 {
        let inst = common::random_uflp(&mut rng, 8, 12);
        assert_eq!(UflpInstance::parse(&inst.to_text()).unwrap(), inst);
    }
}

#[test]
fn mismatched_costs_are_rejected() {
    let d = Digraph::from_arcs(2, [(0, 1)]).unwrap();
    assert!(UflpInstance::new(d.clone(), vec![Weight::from_integer(1)], vec![Weight::from_integer(1)]).is_err());
    assert!(UflpInstance::new(d, vec![Weight::from_integer(1); 2], vec![]).is_err());
}
