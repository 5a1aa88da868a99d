mod common;

use std::sync::Arc;

use rand::Rng;
use sigmarho::joins::{
    compatible_pairs, fast_join_dominating, fast_join_general, naive_join, FastContext, JoinAlgebra,
};
use sigmarho::modring::count_ops;
use sigmarho::oracle::{JoinOracle, OracleView};
use sigmarho::{CountMod, CountOptimum, Exists, Optimum, Preset, SigmaRhoSpec};

const MAX_SIZE: u32 = 5;

fn check<A: JoinAlgebra + OracleView>(
    alg: &A,
    ctx: &FastContext,
    spec: &SigmaRhoSpec,
    k: usize,
    trials: usize,
    rng: &mut impl Rng,
) {
    let oracle = JoinOracle::new(spec, k);
    let bag: Vec<usize> = (0..k).collect();
    for _ in 0..trials {
        let l = alg.random_table(rng, bag.clone(), spec.s(), MAX_SIZE);
        let r = alg.random_table(rng, bag.clone(), spec.s(), MAX_SIZE);
        let expect = oracle.join(&alg.to_oracle(&l.values), &alg.to_oracle(&r.values)).unwrap();
        let naive = naive_join(alg, spec, &l, &r).unwrap();
        assert_eq!(alg.to_oracle(&naive.values), expect, "naive, {spec}, k={k}");
        let fast = fast_join_general(alg, ctx, spec, &l, &r, None).unwrap();
        assert_eq!(alg.to_oracle(&fast.values), expect, "fast, {spec}, k={k}");
        if spec.has_dominating_shape() {
            let ds = fast_join_dominating(alg, ctx, spec, &l, &r, None).unwrap();
            assert_eq!(alg.to_oracle(&ds.values), expect, "dominating, {spec}, k={k}");
        }
    }
}

#[test]
fn joins_agree_with_reference_on_random_tables() {
    let mut rng = common::rng(21);
    for preset in Preset::all(2) {
        let spec = preset.spec();
        let ctx = FastContext::new(&spec, MAX_SIZE as usize, 4, 1).unwrap();
        let field = ctx.counts[0].clone();
        for k in 0..=3 {
            check(&Exists, &ctx, &spec, k, 6, &mut rng);
            check(&Optimum { maximise: false }, &ctx, &spec, k, 6, &mut rng);
            check(&Optimum { maximise: true }, &ctx, &spec, k, 6, &mut rng);
            check(&CountMod { field: field.clone() }, &ctx, &spec, k, 6, &mut rng);
            check(&CountOptimum { field: field.clone(), maximise: false }, &ctx, &spec, k, 6, &mut rng);
            check(&CountOptimum { field: field.clone(), maximise: true }, &ctx, &spec, k, 6, &mut rng);
        }
    }
}

#[test]
fn compatible_pair_counts() {
    assert_eq!(compatible_pairs(&Preset::DominatingSet.spec()).len(), 5);
    assert_eq!(compatible_pairs(&Preset::IndependentSet.spec()).len(), 2);
    assert_eq!(compatible_pairs(&Preset::TotalDominatingSet.spec()).len(), 8);
}

#[test]
fn dominating_join_rejects_other_problems() {
    let spec = Preset::PerfectCode.spec();
    let ctx = FastContext::new(&spec, 3, 2, 0).unwrap();
    let t = Exists.random_table(&mut common::rng(1), vec![0, 1], spec.s(), 3);
    assert!(fast_join_dominating(&Exists, &ctx, &spec, &t, &t, None).is_err());
}

#[test]
fn mismatched_bags_are_rejected() {
    let spec = Preset::DominatingSet.spec();
    let ctx = FastContext::new(&spec, 3, 2, 0).unwrap();
    let mut rng = common::rng(2);
    let a = Exists.random_table(&mut rng, vec![0, 1], spec.s(), 3);
    let b = Exists.random_table(&mut rng, vec![0, 2], spec.s(), 3);
    assert!(naive_join(&Exists, &spec, &a, &b).is_err());
    assert!(fast_join_general(&Exists, &ctx, &spec, &a, &b, None).is_err());
}

#[test]
fn dominating_set_counting_join_costs() {
    let spec = Preset::DominatingSet.spec();
    let ctx = FastContext::new(&spec, 1, 10, 1).unwrap();
    let alg = CountMod { field: Arc::clone(&ctx.counts[0]) };
    let mut rng = common::rng(4);
    for k in 1..=7 {
        let bag: Vec<usize> = (0..k).collect();
        let dense = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut t = alg.random_table(rng, bag.clone(), 3, 0);
            for v in &mut t.values {
                *v = rng.gen_range(1..alg.field.modulus());
            }
            t
        };
        let (l, r) = (dense(&mut rng), dense(&mut rng));
        let (_, naive) = count_ops(|| naive_join(&alg, &spec, &l, &r).unwrap());
        let (_, fast) = count_ops(|| fast_join_general(&alg, &ctx, &spec, &l, &r, None).unwrap());
        let (_, ds) = count_ops(|| fast_join_dominating(&alg, &ctx, &spec, &l, &r, None).unwrap());
        assert_eq!(naive.mults, 5u64.pow(k as u32));
        assert_eq!(fast.mults, 3u64.pow(k as u32));
        assert_eq!(ds.mults, 3u64.pow(k as u32));
    }
}
