use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::algebra::{CountMod, CountOptimum, Exists, Optimum, Variant};
use crate::error::Result;
use crate::joins::{fast_join_dominating, fast_join_general, naive_join, FastContext, JoinAlgebra, JoinStrategy};
use crate::modring::count_ops;
use crate::problem::SigmaRhoSpec;
use crate::table::MemoTable;

/// Field multiplications spent by one join of two dense random tables over a bag of `k`
/// vertices. Every entry is nonzero; sizes are drawn from `0..=k`.
pub fn join_mults(spec: &SigmaRhoSpec, variant: Variant, strategy: JoinStrategy, k: usize, seed: u64) -> Result<u64> {
    let ctx = FastContext::new(spec, 2 * k, k, 1)?;
    let mut rng = StdRng::seed_from_u64(seed ^ ((k as u64) << 32));
    let p = ctx.counts[0].modulus();
    let top = k as u32;
    let rng = &mut rng;
    match variant {
        Variant::Existence => measure(&Exists, &ctx, spec, strategy, k, rng, |_| true),
        Variant::Minimise | Variant::Maximise => {
            let alg = Optimum { maximise: variant == Variant::Maximise };
            measure(&alg, &ctx, spec, strategy, k, rng, |r| Some(r.gen_range(0..=top)))
        }
        Variant::Count => {
            let alg = CountMod { field: ctx.counts[0].clone() };
            measure(&alg, &ctx, spec, strategy, k, rng, |r| r.gen_range(1..p))
        }
        Variant::CountMinimise | Variant::CountMaximise => {
            let alg = CountOptimum { field: ctx.counts[0].clone(), maximise: variant == Variant::CountMaximise };
            measure(&alg, &ctx, spec, strategy, k, rng, |r| {
                (Some(r.gen_range(0..=top)), r.gen_range(1..p))
            })
        }
    }
}

fn measure<A: JoinAlgebra>(
    alg: &A,
    ctx: &FastContext,
    spec: &SigmaRhoSpec,
    strategy: JoinStrategy,
    k: usize,
    rng: &mut StdRng,
    mut value: impl FnMut(&mut StdRng) -> A::Value,
) -> Result<u64> {
    let s = spec.s();
    let bag: Vec<usize> = (0..k).collect();
    let len = s.pow(k as u32);
    let mut table = || MemoTable { bag: bag.clone(), s, values: (0..len).map(|_| value(rng)).collect() };
    let (left, right) = (table(), table());
    let (out, ops) = count_ops(|| match strategy {
        JoinStrategy::Naive => naive_join(alg, spec, &left, &right),
        JoinStrategy::FastGeneral => fast_join_general(alg, ctx, spec, &left, &right, None),
        JoinStrategy::FastDominating => fast_join_dominating(alg, ctx, spec, &left, &right, None),
    });
    out?;
    Ok(ops.mults)
}
