use num_bigint::BigUint;
use rand::Rng;

use crate::algebra::{Algebra, Answer, CountMod, CountOptimum, Exists, Optimum, SizeCount, Variant};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::problem::{IntSet, SigmaRhoSpec};
use crate::table::MemoTable;

pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Answers the problem by checking every vertex subset.
pub fn brute_force_solve(g: &Graph, spec: &SigmaRhoSpec, variant: Variant) -> Result<Answer> {
    let n = g.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(n));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let mut counts = vec![0u64; n + 1];
    for set in 0u32..(1u32 << n) {
        let ok = (0..n).all(|v| {
            let k = (adj[v] & set).count_ones();
            if set >> v & 1 == 1 {
                spec.sigma.contains(k)
            } else {
                spec.rho.contains(k)
            }
        });
        if ok {
            counts[set.count_ones() as usize] += 1;
        }
    }
    let sizes = || (0..=n).filter(|&i| counts[i] > 0);
    Ok(match variant {
        Variant::Existence => Answer::Exists(sizes().next().is_some()),
        Variant::Minimise => Answer::Size(sizes().next().map(|s| s as u32)),
        Variant::Maximise => Answer::Size(sizes().next_back().map(|s| s as u32)),
        Variant::Count => Answer::Count(BigUint::from(counts.iter().sum::<u64>())),
        Variant::CountMinimise | Variant::CountMaximise => {
            let best = if variant == Variant::CountMinimise {
                sizes().next()
            } else {
                sizes().next_back()
            };
            match best {
                Some(s) => Answer::SizeCount(Some(s as u32), BigUint::from(counts[s])),
                None => Answer::SizeCount(None, BigUint::from(0u32)),
            }
        }
    })
}

/// Table values in a form independent of the DP engine's algebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleValues {
    Exists(Vec<bool>),
    Min(Vec<Option<u32>>),
    Max(Vec<Option<u32>>),
    Count { p: u64, values: Vec<u64> },
    CountMin { p: u64, values: Vec<(Option<u32>, u64)> },
    CountMax { p: u64, values: Vec<(Option<u32>, u64)> },
}

/// One side's labels, listed as (count, saturated).
fn side_labels(set: &IntSet) -> Vec<(u32, bool)> {
    match set {
        IntSet::Finite(items) => {
            let top = items.iter().max().copied().unwrap_or(0);
            (0..=top).map(|c| (c, false)).collect()
        }
        IntSet::Cofinite(excluded) => {
            let ell = excluded.iter().max().map_or(0, |m| m + 1);
            (0..ell).map(|c| (c, false)).chain([(ell, true)]).collect()
        }
    }
}

/// Combines two labels of the same side by adding their neighbour counts.
fn combine(set: &IntSet, a: (u32, bool), b: (u32, bool)) -> Option<(u32, bool)> {
    match set {
        IntSet::Finite(items) => {
            let top = items.iter().max().copied().unwrap_or(0);
            let c = a.0 + b.0;
            (c <= top).then_some((c, false))
        }
        IntSet::Cofinite(excluded) => {
            let ell = excluded.iter().max().map_or(0, |m| m + 1);
            let c = a.0 + b.0;
            if a.1 || b.1 || c >= ell {
                Some((ell, true))
            } else {
                Some((c, false))
            }
        }
    }
}

/// Reference join: for every pair of left and right colourings, checks coordinate by
/// coordinate that the two labels are on the same side and combine to a valid label, and
/// aggregates the product of their values into the combined colouring.
pub fn naive_table_join_oracle(
    spec: &SigmaRhoSpec,
    k: usize,
    left: &OracleValues,
    right: &OracleValues,
) -> Result<OracleValues> {
    JoinOracle::new(spec, k).join(left, right)
}

/// The reference join with its list of combinable colouring pairs computed once.
pub struct JoinOracle {
    total: usize,
    pairs: Vec<(usize, usize, usize)>,
}

impl JoinOracle {
    pub fn new(spec: &SigmaRhoSpec, k: usize) -> Self {
        let mut labels: Vec<(bool, u32, bool)> = Vec::new();
        for (c, t) in side_labels(&spec.sigma) {
            labels.push((true, c, t));
        }
        for (c, t) in side_labels(&spec.rho) {
            labels.push((false, c, t));
        }
        let s = labels.len();
        let total = s.pow(k as u32);
        let digits: Vec<Vec<usize>> = (0..total)
            .map(|mut i| {
                let mut d = vec![0; k];
                for slot in d.iter_mut().rev() {
                    *slot = i % s;
                    i /= s;
                }
                d
            })
            .collect();
        let combined: Vec<Vec<Option<usize>>> = labels
            .iter()
            .map(|&la| {
                labels
                    .iter()
                    .map(|&lb| {
                        if la.0 != lb.0 {
                            return None;
                        }
                        let set = if la.0 { &spec.sigma } else { &spec.rho };
                        let (c, t) = combine(set, (la.1, la.2), (lb.1, lb.2))?;
                        labels.iter().position(|&x| x == (la.0, c, t))
                    })
                    .collect()
            })
            .collect();
        let mut pairs = Vec::new();
        for (a, da) in digits.iter().enumerate() {
            'right: for (b, db) in digits.iter().enumerate() {
                let mut out = 0;
                for j in 0..k {
                    match combined[da[j]][db[j]] {
                        Some(c) => out = out * s + c,
                        None => continue 'right,
                    }
                }
                pairs.push((a, b, out));
            }
        }
        JoinOracle { total, pairs }
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn join(&self, left: &OracleValues, right: &OracleValues) -> Result<OracleValues> {
        let total = self.total;
        let pairs = &self.pairs;
        if [left, right].iter().any(|v| v.len() != total) {
            return Err(Error::Shape("oracle operand has the wrong number of entries".into()));
        }
        let best = |x: Option<u32>, y: Option<u32>, max: bool| match (x, y) {
            (None, z) | (z, None) => z,
            (Some(x), Some(y)) => Some(if max { x.max(y) } else { x.min(y) }),
        };
        let size_count = |l: &[(Option<u32>, u64)], r: &[(Option<u32>, u64)], p: u64, max: bool| {
            let mut out = vec![(None, 0u64); total];
            for &(a, b, c) in pairs {
                let (Some(x), Some(y)) = (l[a].0, r[b].0) else { continue };
                let size = x + y;
                let cnt = (l[a].1 as u128 * r[b].1 as u128 % p as u128) as u64;
                let cur: (Option<u32>, u64) = out[c];
                out[c] = match cur.0 {
                    None => (Some(size), cnt),
                    Some(z) if z == size => (Some(z), ((cur.1 as u128 + cnt as u128) % p as u128) as u64),
                    Some(z) if (size > z) == max => (Some(size), cnt),
                    Some(_) => cur,
                };
            }
            out
        };
        Ok(match (left, right) {
            (OracleValues::Exists(l), OracleValues::Exists(r)) => {
                let mut out = vec![false; total];
                for &(a, b, c) in pairs {
                    out[c] |= l[a] && r[b];
                }
                OracleValues::Exists(out)
            }
            (OracleValues::Min(l), OracleValues::Min(r)) | (OracleValues::Max(l), OracleValues::Max(r)) => {
                let max = matches!(left, OracleValues::Max(_));
                let mut out = vec![None; total];
                for &(a, b, c) in pairs {
                    if let (Some(x), Some(y)) = (l[a], r[b]) {
                        out[c] = best(out[c], Some(x + y), max);
                    }
                }
                if max {
                    OracleValues::Max(out)
                } else {
                    OracleValues::Min(out)
                }
            }
            (OracleValues::Count { p, values: l }, OracleValues::Count { p: q, values: r }) if p == q => {
                let mut out = vec![0u64; total];
                for &(a, b, c) in pairs {
                    let prod = l[a] as u128 * r[b] as u128 % *p as u128;
                    out[c] = ((out[c] as u128 + prod) % *p as u128) as u64;
                }
                OracleValues::Count { p: *p, values: out }
            }
            (OracleValues::CountMin { p, values: l }, OracleValues::CountMin { p: q, values: r }) if p == q => {
                OracleValues::CountMin { p: *p, values: size_count(l, r, *p, false) }
            }
            (OracleValues::CountMax { p, values: l }, OracleValues::CountMax { p: q, values: r }) if p == q => {
                OracleValues::CountMax { p: *p, values: size_count(l, r, *p, true) }
            }
            _ => return Err(Error::Precondition("oracle operands have different kinds".into())),
        })
    }
}

impl OracleValues {
    pub fn len(&self) -> usize {
        match self {
            OracleValues::Exists(v) => v.len(),
            OracleValues::Min(v) | OracleValues::Max(v) => v.len(),
            OracleValues::Count { values, .. } => values.len(),
            OracleValues::CountMin { values, .. } | OracleValues::CountMax { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn variant(&self) -> Variant {
        match self {
            OracleValues::Exists(_) => Variant::Existence,
            OracleValues::Min(_) => Variant::Minimise,
            OracleValues::Max(_) => Variant::Maximise,
            OracleValues::Count { .. } => Variant::Count,
            OracleValues::CountMin { .. } => Variant::CountMinimise,
            OracleValues::CountMax { .. } => Variant::CountMaximise,
        }
    }
}

/// Bridges engine algebras to the oracle's value representation and draws random values.
pub trait OracleView: Algebra {
    fn to_oracle(&self, values: &[Self::Value]) -> OracleValues;

    /// Random value; sizes are drawn from `0..=max_size` and about a quarter of the values
    /// are the zero of the algebra.
    fn random_value(&self, rng: &mut impl Rng, max_size: u32) -> Self::Value;

    fn random_table(&self, rng: &mut impl Rng, bag: Vec<usize>, s: usize, max_size: u32) -> MemoTable<Self::Value> {
        let len = s.pow(bag.len() as u32);
        let values = (0..len).map(|_| self.random_value(rng, max_size)).collect();
        MemoTable { bag, s, values }
    }
}

impl OracleView for Exists {
    fn to_oracle(&self, values: &[bool]) -> OracleValues {
        OracleValues::Exists(values.to_vec())
    }
    fn random_value(&self, rng: &mut impl Rng, _max_size: u32) -> bool {
        rng.gen_bool(0.6)
    }
}

impl OracleView for Optimum {
    fn to_oracle(&self, values: &[Option<u32>]) -> OracleValues {
        if self.maximise {
            OracleValues::Max(values.to_vec())
        } else {
            OracleValues::Min(values.to_vec())
        }
    }
    fn random_value(&self, rng: &mut impl Rng, max_size: u32) -> Option<u32> {
        rng.gen_bool(0.75).then(|| rng.gen_range(0..=max_size))
    }
}

impl OracleView for CountMod {
    fn to_oracle(&self, values: &[u64]) -> OracleValues {
        OracleValues::Count { p: self.field.modulus(), values: values.to_vec() }
    }
    fn random_value(&self, rng: &mut impl Rng, _max_size: u32) -> u64 {
        if rng.gen_bool(0.75) {
            rng.gen_range(1..self.field.modulus())
        } else {
            0
        }
    }
}

impl OracleView for CountOptimum {
    fn to_oracle(&self, values: &[SizeCount]) -> OracleValues {
        let p = self.field.modulus();
        let values = values.to_vec();
        if self.maximise {
            OracleValues::CountMax { p, values }
        } else {
            OracleValues::CountMin { p, values }
        }
    }
    fn random_value(&self, rng: &mut impl Rng, max_size: u32) -> SizeCount {
        if rng.gen_bool(0.75) {
            (Some(rng.gen_range(0..=max_size)), rng.gen_range(1..self.field.modulus()))
        } else {
            (None, 0)
        }
    }
}
