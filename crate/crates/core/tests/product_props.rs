mod common;

use common::*;
use num_rational::Ratio;
use proptest::prelude::*;
use ssexp::exact::{symmetric_eigenvalues, symmetrized_walk_matrix};
use ssexp::product::{
    lift_set, make_inner, materialize_product, product_index, InnerFamily, ProductVertex, ReplacementProduct,
};
use ssexp::walk::StepKernel;
use ssexp::{conductance, Graph, OracleHandle};

fn degree_choice() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![4usize, 8])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn implicit_steps_match_the_materialized_product(g in graphs(10, 14), d in degree_choice()) {
        let fam = InnerFamily::for_graph(&g, d, 1e-3).unwrap();
        let big = materialize_product(&g, &fam).unwrap();
        prop_assert_eq!(big.n() as u64, g.volume());
        prop_assert!(big.n() == 0 || (big.is_regular() && big.degree(0) == 2 * d));
        big.check_involution().unwrap();
        let w = naive_walk(big.n(), big.edges());
        let kernel = ReplacementProduct::new(&fam);
        let mut o = OracleHandle::rotation_map(&g);
        for id in 0..big.n() {
            let p = g.port_of_id(id);
            let x = ProductVertex { u: p.vertex, i: p.index };
            let out: Vec<usize> = kernel
                .outcomes(&mut o, x)
                .unwrap()
                .into_iter()
                .map(|y| product_index(&g, y))
                .collect();
            prop_assert!(close(&outcome_distribution(&out, big.n()), &w[id], 1e-12));
        }
    }

    #[test]
    fn lifting_halves_conductance((n, edges) in edge_lists(8, 12), mask in 1u32..256, d in degree_choice()) {
        let g = Graph::from_edges(n, edges.clone()).unwrap();
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let (cut, vol) = naive_cut(n, &edges, &set);
        prop_assume!(!set.is_empty() && vol > 0);
        let fam = InnerFamily::for_graph(&g, d, 1e-3).unwrap();
        let big = materialize_product(&g, &fam).unwrap();
        let lifted: Vec<usize> = lift_set(&g, &set).unwrap().into_iter().map(|x| product_index(&g, x)).collect();
        prop_assert_eq!(lifted.len() as u64, vol);
        let r = conductance(&big, &lifted).unwrap();
        prop_assert_eq!(r.conductance, Ratio::new(cut, 2 * vol));
    }
}

#[test]
fn inner_graphs_are_regular_and_consistent() {
    for d in [4, 8] {
        for s in 1..=70 {
            let h = make_inner(s, d).unwrap();
            let g = h.to_graph();
            assert_eq!(g.n(), s);
            assert!(g.is_regular() && g.degree(0) == d, "s={s} d={d}");
            g.check_involution().unwrap();
            for i in 0..s {
                let mut implicit: Vec<usize> = (0..d).map(|p| h.neighbor(i, p)).collect();
                let mut explicit: Vec<usize> = g.ports(i).iter().map(|p| p.vertex).collect();
                implicit.sort_unstable();
                explicit.sort_unstable();
                assert_eq!(implicit, explicit, "s={s} d={d} i={i}");
            }
            if s > 1 {
                let eta = symmetric_eigenvalues(&symmetrized_walk_matrix(&g).unwrap()).unwrap();
                let jacobi = eta.eta2().unwrap();
                assert!((jacobi - h.eta2().unwrap()).abs() < 1e-9, "s={s} d={d}");
            }
        }
    }
}

#[test]
fn default_family_covers_desk_scale_degrees() {
    let sizes: Vec<usize> = (1..=1000).collect();
    let fam = InnerFamily::for_sizes(&sizes, 8, 0.05).unwrap();
    assert_eq!(fam.graphs().len(), 1000);
    assert!(fam.graphs().iter().all(|h| h.eta2().is_none_or(|e| e <= 0.95 + 1e-12)));
}
