use std::sync::Arc;

use crate::algebra::{Answer, CountMod, CountOptimum, Exists, Optimum, Variant};
use crate::dp::run_dp;
use crate::error::{Error, Result};
use crate::graph::{Graph, NiceKind, NiceTreeDecomposition};
use crate::joins::{fast_join_dominating, fast_join_general, naive_join, FastContext, JoinAlgebra, JoinStrategy};
use crate::modring::{count_ops, crt_reconstruct, PrimeField, ResidueValue};
use crate::problem::SigmaRhoSpec;
use crate::table::MemoTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub strategy: JoinStrategy,
    /// Restrict fast joins of minimisation variants to sizes at most (bag size) above the
    /// smallest stored size. Only sound for dominating set and total dominating set.
    pub replacement: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { strategy: JoinStrategy::FastGeneral, replacement: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub answer: Answer,
    pub width: usize,
    pub nice_nodes: usize,
    pub joins: usize,
    pub primes: Vec<u64>,
    pub field_mults: u64,
}

/// Number of primes whose product exceeds 2^n, each prime being above 2^61.
pub fn count_prime_budget(n: usize) -> usize {
    n.div_ceil(60) + 1
}

/// Whether the size window may be used for this problem and variant.
pub fn replacement_applies(spec: &SigmaRhoSpec, variant: Variant) -> bool {
    variant.minimises() && (spec.is_dominating_set() || spec.is_total_dominating_set())
}

/// Default strategy: the general fast join when its work estimate s^(k+1) * n * l * k beats
/// the number of compatible colouring pairs at the widest join bag, the naive join otherwise.
pub fn auto_strategy(spec: &SigmaRhoSpec, nice: &NiceTreeDecomposition, n: usize) -> JoinStrategy {
    let k = nice.max_join_bag();
    let naive = crate::joins::pair_bound(spec, k);
    let ell = spec
        .side(crate::problem::Side::Sigma)
        .low
        .max(spec.side(crate::problem::Side::Rho).low)
        .max(1) as f64;
    let fast = (spec.s() as f64).powi(k as i32 + 1) * n.max(1) as f64 * ell * k.max(1) as f64;
    if fast < naive {
        JoinStrategy::FastGeneral
    } else {
        JoinStrategy::Naive
    }
}

struct Runner<'a> {
    spec: &'a SigmaRhoSpec,
    nice: &'a NiceTreeDecomposition,
    ctx: &'a FastContext,
    opts: SolveOptions,
}

impl Runner<'_> {
    fn run<A: JoinAlgebra>(&self, alg: &A) -> Result<A::Value> {
        let spec = self.spec;
        let ctx = self.ctx;
        let window_on = self.opts.replacement;
        run_dp(alg, spec, self.nice, |l: &MemoTable<A::Value>, r: &MemoTable<A::Value>| {
            let window = window_on.then_some(l.k());
            match self.opts.strategy {
                JoinStrategy::Naive => naive_join(alg, spec, l, r),
                JoinStrategy::FastGeneral => fast_join_general(alg, ctx, spec, l, r, window),
                JoinStrategy::FastDominating => fast_join_dominating(alg, ctx, spec, l, r, window),
            }
        })
    }
}

/// Solves the problem on `g` over a nice tree decomposition of it.
pub fn solve(
    g: &Graph,
    nice: &NiceTreeDecomposition,
    spec: &SigmaRhoSpec,
    variant: Variant,
    opts: SolveOptions,
) -> Result<SolveReport> {
    if opts.replacement && !replacement_applies(spec, variant) {
        return Err(Error::Precondition(format!(
            "the size window is only sound for minimising dominating set or total dominating set, not {variant} of {spec}"
        )));
    }
    if opts.strategy == JoinStrategy::FastDominating && !spec.has_dominating_shape() {
        return Err(Error::Precondition(format!("the dominating-set join does not apply to {spec}")));
    }
    let n = g.n();
    let count_primes = if variant.counts() { count_prime_budget(n) } else { 0 };
    let ctx = FastContext::new(spec, n, nice.max_join_bag(), count_primes)?;
    let runner = Runner { spec, nice, ctx: &ctx, opts };
    let joins = nice.nodes.iter().filter(|x| x.kind == NiceKind::Join).count();
    let (answer, ops) = count_ops(|| solve_with(&runner, variant));
    let answer = answer?;
    let mut primes: Vec<u64> = ctx.counts.iter().map(|f| f.modulus()).collect();
    if opts.strategy != JoinStrategy::Naive && variant != Variant::Count && joins > 0 {
        primes.extend(ctx.detect.iter().map(|f| f.modulus()));
    }
    Ok(SolveReport {
        answer,
        width: nice.width(),
        nice_nodes: nice.nodes.len(),
        joins,
        primes,
        field_mults: ops.mults,
    })
}

fn solve_with(runner: &Runner, variant: Variant) -> Result<Answer> {
    let ctx = runner.ctx;
    match variant {
        Variant::Existence => Ok(Answer::Exists(runner.run(&Exists)?)),
        Variant::Minimise | Variant::Maximise => {
            let alg = Optimum { maximise: variant == Variant::Maximise };
            Ok(Answer::Size(runner.run(&alg)?))
        }
        Variant::Count => {
            let residues = per_prime(&ctx.counts, |field| runner.run(&CountMod { field }))?;
            Ok(Answer::Count(reconstruct(&ctx.counts, residues)?))
        }
        Variant::CountMinimise | Variant::CountMaximise => {
            let maximise = variant == Variant::CountMaximise;
            let results = per_prime(&ctx.counts, |field| runner.run(&CountOptimum { field, maximise }))?;
            let size = results[0].0;
            if results.iter().any(|r| r.0 != size) {
                return Err(Error::Precondition("optimal size differs between primes".into()));
            }
            let count = reconstruct(&ctx.counts, results.iter().map(|r| r.1).collect())?;
            Ok(Answer::SizeCount(size, count))
        }
    }
}

fn per_prime<T>(
    fields: &[Arc<PrimeField>],
    mut f: impl FnMut(Arc<PrimeField>) -> Result<T>,
) -> Result<Vec<T>> {
    fields.iter().map(|field| f(field.clone())).collect()
}

fn reconstruct(fields: &[Arc<PrimeField>], residues: Vec<u64>) -> Result<num_bigint::BigUint> {
    let value = ResidueValue { primes: fields.iter().map(|f| f.modulus()).collect(), residues };
    crt_reconstruct(&value)
}
