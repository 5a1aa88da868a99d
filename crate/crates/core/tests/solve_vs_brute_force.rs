mod common;

use sigmarho::graph::{min_fill_heuristic, make_nice, validate_nice};
use sigmarho::oracle::brute_force_solve;
use sigmarho::{solve, JoinStrategy, Preset, SolveOptions, Variant};

#[test]
fn random_graphs_match_exhaustive_search() {
    let mut rng = common::rng(7);
    for trial in 0..40 {
        let n = 1 + trial % 9;
        let g = common::random_graph(&mut rng, n, 0.35);
        let nice = make_nice(&g, &min_fill_heuristic(&g)).unwrap();
        validate_nice(&g, &nice).unwrap();
        for preset in Preset::all(2) {
            let spec = preset.spec();
            for variant in Variant::ALL {
                let expect = brute_force_solve(&g, &spec, variant).unwrap();
                for strategy in [JoinStrategy::Naive, JoinStrategy::FastGeneral] {
                    let opts = SolveOptions { strategy, replacement: false };
                    let got = solve(&g, &nice, &spec, variant, opts).unwrap().answer;
                    assert_eq!(got, expect, "{} {variant} {strategy} on {:?}", preset.name(), g.edges());
                }
            }
        }
    }
}

#[test]
fn windowed_and_dominating_joins_match() {
    let mut rng = common::rng(11);
    for trial in 0..300 {
        let n = 2 + trial % 10;
        let g = common::random_graph(&mut rng, n, 0.3);
        let nice = make_nice(&g, &min_fill_heuristic(&g)).unwrap();
        for preset in [Preset::DominatingSet, Preset::TotalDominatingSet] {
            let spec = preset.spec();
            for variant in [Variant::Minimise, Variant::CountMinimise] {
                let expect = brute_force_solve(&g, &spec, variant).unwrap();
                let mut strategies = vec![JoinStrategy::FastGeneral];
                if spec.has_dominating_shape() {
                    strategies.push(JoinStrategy::FastDominating);
                }
                for strategy in strategies {
                    for replacement in [false, true] {
                        let opts = SolveOptions { strategy, replacement };
                        let got = solve(&g, &nice, &spec, variant, opts).unwrap().answer;
                        assert_eq!(got, expect, "{} {variant} {strategy} {replacement} on n={n} {:?}", preset.name(), g.edges());
                    }
                }
            }
        }
    }
}
