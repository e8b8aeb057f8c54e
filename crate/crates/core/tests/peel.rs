mod common;

use abcs::graph::{effective_degree, Layer, SubgraphMask, VertexRef};
use abcs::peel::{core_decompose, core_mask, CoreParams, PeelOrder, Peeler};
use common::*;
use proptest::prelude::*;

fn p(a: u32, b: u32) -> CoreParams {
    CoreParams::new(a, b).unwrap()
}

fn as_sets(m: &SubgraphMask) -> (Vec<u32>, Vec<u32>) {
    (m.upper_vertices().collect(), m.lower_vertices().collect())
}

#[test]
fn toy_core_and_components() {
    let g = fixture("toy");
    let core = core_mask(&g, &SubgraphMask::full(&g), p(2, 2));
    let (us, vs) = as_sets(&core);
    assert_eq!(labels(&g, Layer::Upper, &us), ["A", "C", "D", "E"].map(String::from).into());
    assert_eq!(labels(&g, Layer::Lower, &vs), ["G", "H", "I"].map(String::from).into());
    let comps = core_decompose(&g, p(1, 1));
    assert_eq!(comps.len(), 2);
    let sizes: Vec<usize> = comps.iter().map(|c| c.upper_len() + c.lower_len()).collect();
    assert_eq!(sizes, vec![9, 2]);
}

#[test]
fn degree_sum_equals_edge_count() {
    let g = fixture("southern_women");
    let full = SubgraphMask::full(&g);
    let up: usize = (0..g.upper_count() as u32).map(|u| effective_degree(&g, &full, VertexRef::upper(u))).sum();
    let low: usize = (0..g.lower_count() as u32).map(|v| effective_degree(&g, &full, VertexRef::lower(v))).sum();
    assert_eq!((up, low), (89, 89));
    assert_eq!((g.upper_count(), g.lower_count()), (18, 14));
    assert_eq!(core_mask(&g, &full, p(2, 2)), full);
}

fn random_mask(g: &abcs::AttributedBipartiteGraph, bits: u64) -> SubgraphMask {
    let us: Vec<u32> = (0..g.upper_count() as u32).filter(|u| bits >> (u % 32) & 1 == 1).collect();
    let vs: Vec<u32> = (0..g.lower_count() as u32).filter(|v| bits >> (32 + v % 32) & 1 == 1).collect();
    SubgraphMask::from_vertices(g, &us, &vs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn core_matches_brute_fixed_point(seed in any::<u64>(), a in 1u32..4, b in 1u32..4) {
        let g = random_graph(seed, 16);
        let pl = Plain::of(&g);
        let (cu, cl) = brute_core(&pl, &vec![true; g.upper_count()], &vec![true; g.lower_count()], a as usize, b as usize);
        let m = core_mask(&g, &SubgraphMask::full(&g), p(a, b));
        for u in 0..g.upper_count() {
            prop_assert_eq!(m.contains(VertexRef::upper(u as u32)), cu[u]);
        }
        for v in 0..g.lower_count() {
            prop_assert_eq!(m.contains(VertexRef::lower(v as u32)), cl[v]);
        }
        let mut comps: Vec<_> = core_decompose(&g, p(a, b)).iter().map(as_sets).collect();
        comps.sort();
        prop_assert_eq!(comps, components(&pl, &cu, &cl));
    }

    #[test]
    fn community_matches_brute_in_random_scope(seed in any::<u64>(), bits in any::<u64>(), a in 1u32..4, b in 1u32..4) {
        let g = random_graph(seed, 16);
        let pl = Plain::of(&g);
        let mask = random_mask(&g, bits);
        let au: Vec<bool> = (0..g.upper_count() as u32).map(|u| mask.contains(VertexRef::upper(u))).collect();
        let al: Vec<bool> = (0..g.lower_count() as u32).map(|v| mask.contains(VertexRef::lower(v))).collect();
        let mut peeler = Peeler::new(&g);
        for q in 0..g.upper_count() as u32 {
            let r = peeler.peel(&g, &mask, VertexRef::upper(q), p(a, b));
            let expect = brute_community(&pl, &au, &al, q, p(a, b));
            prop_assert_eq!(r.exists, expect.is_some());
            if let Some((us, vs)) = expect {
                prop_assert_eq!(&r.upper, &us);
                prop_assert_eq!(&r.lower, &vs);
            }
        }
    }

    #[test]
    fn peel_order_does_not_matter(seed in any::<u64>(), order_seed in any::<u64>(), a in 1u32..4, b in 1u32..4) {
        let g = random_graph(seed, 20);
        let full = SubgraphMask::full(&g);
        let mut peeler = Peeler::new(&g);
        for q in 0..g.upper_count() as u32 {
            let q = VertexRef::upper(q);
            let fifo = peeler.peel(&g, &full, q, p(a, b));
            let rand = peeler.peel_with_order(&g, &full, q, p(a, b), PeelOrder::Random(order_seed));
            prop_assert_eq!(fifo, rand);
        }
    }

    #[test]
    fn cores_shrink_as_thresholds_grow(seed in any::<u64>(), a in 1u32..5, b in 1u32..5) {
        let g = random_graph(seed, 20);
        let full = SubgraphMask::full(&g);
        let base = core_mask(&g, &full, p(a, b));
        prop_assert!(core_mask(&g, &full, p(a + 1, b)).is_subset(&base));
        prop_assert!(core_mask(&g, &full, p(a, b + 1)).is_subset(&base));
    }

    #[test]
    fn core_degrees_meet_thresholds(seed in any::<u64>(), a in 1u32..4, b in 1u32..4) {
        let g = random_graph(seed, 20);
        let m = core_mask(&g, &SubgraphMask::full(&g), p(a, b));
        for u in m.upper_vertices() {
            prop_assert!(effective_degree(&g, &m, VertexRef::upper(u)) >= a as usize);
        }
        for v in m.lower_vertices() {
            prop_assert!(effective_degree(&g, &m, VertexRef::lower(v)) >= b as usize);
        }
    }
}
