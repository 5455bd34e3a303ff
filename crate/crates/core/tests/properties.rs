use cutwidth::buckets::{bucket_width, Bucketing};
use cutwidth::format::{parse_graph, parse_ordering, render_graph, render_ordering};
use cutwidth::obstructions::{heavy_subword, is_heavy};
use cutwidth::oracle::exact_cutwidth;
use cutwidth::ordering::{
    cut_sequence, cut_sum, make_linked, make_x_linked, minimize_blocks, verify_linked, verify_x_linked, width,
};
use cutwidth::solver::{cutwidth_decide, Decision};
use cutwidth::{MultiGraph, Ordering, VertexSet};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn graph(max_n: usize, max_mult: u32) -> impl Strategy<Value = MultiGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pair = (0..n, 0..n, 1..=max_mult);
        proptest::collection::vec(pair, 0..=2 * n).prop_map(move |list| {
            let edges: Vec<_> = list.into_iter().filter(|(u, v, _)| u != v).collect();
            MultiGraph::build(n, &edges).unwrap()
        })
    })
}

fn graph_and_order(max_n: usize, max_mult: u32) -> impl Strategy<Value = (MultiGraph, Ordering)> {
    graph(max_n, max_mult).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|(g, p)| (g, Ordering::new(p).unwrap()))
    })
}

fn relabel(g: &MultiGraph, perm: &[usize]) -> MultiGraph {
    let edges: Vec<_> = g.edges().iter().map(|&(u, v, m)| (perm[u], perm[v], m)).collect();
    MultiGraph::build(g.n(), &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cut_is_symmetric_and_submodular(g in graph(8, 3), a in 0u64..256, b in 0u64..256) {
        let n = g.n();
        let mask = (1u64 << n) - 1;
        let sa = VertexSet::from_mask(n, a & mask);
        let sb = VertexSet::from_mask(n, b & mask);
        prop_assert_eq!(g.delta(&sa), g.delta(&sa.complement()));
        prop_assert!(g.delta(&sa) + g.delta(&sb) >= g.delta(&sa.union(&sb)) + g.delta(&sa.intersection(&sb)));
    }

    #[test]
    fn width_is_max_of_cut_sequence((g, sigma) in graph_and_order(9, 3)) {
        let cuts = cut_sequence(&g, &sigma).unwrap();
        prop_assert_eq!(width(&g, &sigma).unwrap(), cuts.max());
        prop_assert_eq!(cuts.0.len(), g.n().saturating_sub(1));
    }

    #[test]
    fn width_is_max_bucket_width((g, sigma) in graph_and_order(8, 2), cuts in subsequence((1..8usize).collect::<Vec<_>>(), 0..7)) {
        let n = g.n();
        let cuts: Vec<usize> = cuts.into_iter().filter(|&c| c < n).collect();
        let ell = cuts.len() + 1;
        let mut assign = vec![0; n];
        for (p, &v) in sigma.as_slice().iter().enumerate() {
            assign[v] = 1 + cuts.iter().filter(|&&c| c <= p).count();
        }
        let t = Bucketing::new(&sigma, assign, ell).unwrap();
        let best = (1..=ell).map(|i| bucket_width(&g, &sigma, &t, i).unwrap()).max().unwrap();
        prop_assert_eq!(best, width(&g, &sigma).unwrap());
    }

    #[test]
    fn canonical_code_ignores_labels((g, sigma) in graph_and_order(8, 3)) {
        let h = relabel(&g, sigma.as_slice());
        prop_assert_eq!(g.canonical_code().unwrap(), h.canonical_code().unwrap());
    }

    #[test]
    fn text_format_round_trips((g, sigma) in graph_and_order(12, 4)) {
        let back = parse_graph(&render_graph(&g)).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(parse_ordering(&render_ordering(&sigma), g.n()).unwrap(), sigma);
    }

    #[test]
    fn dissolving_replays_to_the_original(g in graph(10, 2)) {
        let (h, trace) = g.dissolve_degree2();
        let back = trace.replay(&h).unwrap();
        prop_assert_eq!(back.canonical_code().unwrap(), g.canonical_code().unwrap());
    }

    #[test]
    fn subdividing_and_dissolving_keep_cutwidth(g in graph(7, 2), pick in any::<prop::sample::Index>()) {
        let (cw, _) = exact_cutwidth(&g).unwrap();
        if let Some(&(u, v, _)) = g.edges().get(pick.index(g.edges().len().max(1))) {
            let (s, _) = exact_cutwidth(&g.subdivide(u, v).unwrap()).unwrap();
            prop_assert_eq!(s, cw);
        }
        let (h, _) = g.dissolve_degree2();
        let (d, _) = exact_cutwidth(&h).unwrap();
        prop_assert_eq!(d, cw);
    }

    #[test]
    fn block_minimization_keeps_width((g, sigma) in graph_and_order(9, 2), mask in any::<u64>()) {
        let a = VertexSet::from_mask(g.n(), mask & ((1u64 << g.n()) - 1));
        let tau = minimize_blocks(&g, &sigma, &a).unwrap();
        prop_assert!(width(&g, &tau).unwrap() <= width(&g, &sigma).unwrap());
    }

    #[test]
    fn linking_lowers_cut_sum((g, sigma) in graph_and_order(8, 2)) {
        let tau = make_linked(&g, &sigma).unwrap();
        prop_assert!(verify_linked(&g, &tau));
        prop_assert!(cut_sum(&g, &tau) <= cut_sum(&g, &sigma));
        prop_assert!(width(&g, &tau).unwrap() <= width(&g, &sigma).unwrap());
    }

    #[test]
    fn x_linking_meets_its_postcondition((g, sigma) in graph_and_order(8, 2), mask in any::<u64>()) {
        let x = VertexSet::from_mask(g.n(), mask & ((1u64 << g.n()) - 1));
        let x_order = sigma.restrict(&x);
        let tau = make_x_linked(&g, &x, &x_order).unwrap();
        prop_assert!(verify_x_linked(&g, &tau, &x));
    }

    #[test]
    fn heavy_subword_exists_on_long_words(r in 1usize..=3, n in 1usize..=3, seed in proptest::collection::vec(1usize..=3, 27)) {
        let word: Vec<usize> = seed.iter().map(|&c| c.min(r)).take(n.pow(r as u32)).collect();
        let (s, (lo, hi)) = heavy_subword(&word, n).expect("long words have a heavy subword");
        prop_assert!(is_heavy(&word, n, s, lo, hi));
    }

    #[test]
    fn heavy_subword_answers_are_valid(word in proptest::collection::vec(1usize..=4, 0..20), n in 1usize..=4) {
        if let Some((s, (lo, hi))) = heavy_subword(&word, n) {
            prop_assert!(is_heavy(&word, n, s, lo, hi));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn decisions_are_monotone_in_k(g in graph(8, 2)) {
        let (cw, _) = exact_cutwidth(&g).unwrap();
        for k in cw.saturating_sub(2)..=cw + 1 {
            match cutwidth_decide(&g, k).unwrap() {
                Decision::Fits(tau) => {
                    prop_assert!(k >= cw);
                    prop_assert!(width(&g, &tau).unwrap() <= k);
                }
                Decision::TooWide => prop_assert!(k < cw),
            }
        }
    }
}
