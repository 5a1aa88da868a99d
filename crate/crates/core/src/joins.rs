use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::algebra::{Algebra, CountMod, CountOptimum, Exists, Optimum, SizeCount};
use crate::error::{Error, Result};
use crate::modring::{choose_primes, PrimeField};
use crate::posets::{zeta_axes, CoordOrder};
use crate::problem::SigmaRhoSpec;
use crate::table::MemoTable;
use crate::transforms::{BoxDim, Direction, Ntt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JoinStrategy {
    Naive,
    FastGeneral,
    FastDominating,
}

impl fmt::Display for JoinStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JoinStrategy::Naive => "naive",
            JoinStrategy::FastGeneral => "fast",
            JoinStrategy::FastDominating => "fast-ds",
        })
    }
}

impl FromStr for JoinStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(JoinStrategy::Naive),
            "fast" | "fast-general" => Ok(JoinStrategy::FastGeneral),
            "fast-ds" | "fast-dominating" => Ok(JoinStrategy::FastDominating),
            _ => Err(Error::Problem(format!("unknown join strategy '{s}'"))),
        }
    }
}

fn check_join_inputs<V: Copy>(spec: &SigmaRhoSpec, left: &MemoTable<V>, right: &MemoTable<V>) -> Result<()> {
    if left.bag != right.bag {
        return Err(Error::Precondition("join children have different bags".into()));
    }
    let len = spec.s().pow(left.k() as u32);
    if left.s != spec.s() || left.values.len() != len || right.values.len() != len {
        return Err(Error::Shape("table size does not match the label count".into()));
    }
    Ok(())
}

/// Every (left digit, right digit, result digit) triple for one coordinate.
pub fn compatible_pairs(spec: &SigmaRhoSpec) -> Vec<(usize, usize, usize)> {
    let s = spec.s();
    let mut out = Vec::new();
    for a in 0..s {
        for b in 0..s {
            if let Some(c) = spec.oplus(a, b) {
                out.push((a, b, c));
            }
        }
    }
    out
}

/// Join by enumerating all compatible colouring pairs coordinate by coordinate.
pub fn naive_join<A: Algebra>(
    alg: &A,
    spec: &SigmaRhoSpec,
    left: &MemoTable<A::Value>,
    right: &MemoTable<A::Value>,
) -> Result<MemoTable<A::Value>> {
    check_join_inputs(spec, left, right)?;
    let s = spec.s();
    let k = left.k();
    let pairs = compatible_pairs(spec);
    let mut out = MemoTable::filled(left.bag.clone(), s, alg.zero());
    if pairs.is_empty() && k > 0 {
        return Ok(out);
    }
    let strides: Vec<usize> = (0..k).map(|j| s.pow((k - 1 - j) as u32)).collect();
    let mut choice = vec![0usize; k];
    let first = pairs.first().copied().unwrap_or((0, 0, 0));
    let (mut il, mut ir, mut io) = (0usize, 0usize, 0usize);
    for &st in &strides {
        il += first.0 * st;
        ir += first.1 * st;
        io += first.2 * st;
    }
    let shift = |x: usize, from: usize, to: usize, st: usize| x + to * st - from * st;
    loop {
        let (a, b) = (left.values[il], right.values[ir]);
        if !alg.is_zero(a) && !alg.is_zero(b) {
            out.values[io] = alg.add(out.values[io], alg.mul(a, b));
        }
        let mut j = k;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            let old = pairs[choice[j]];
            choice[j] += 1;
            let carry = choice[j] == pairs.len();
            if carry {
                choice[j] = 0;
            }
            let new = pairs[choice[j]];
            il = shift(il, old.0, new.0, strides[j]);
            ir = shift(ir, old.1, new.1, strides[j]);
            io = shift(io, old.2, new.2, strides[j]);
            if !carry {
                break;
            }
        }
    }
}

/// Primes used by the transform-based joins of one solve. All of them support the cyclic
/// lengths of the problem's low labels and power-of-two lengths up to the largest padded
/// size or label-sum dimension that can occur.
#[derive(Clone, Debug)]
pub struct FastContext {
    pub counts: Vec<Arc<PrimeField>>,
    pub detect: Vec<Arc<PrimeField>>,
}

pub const PRIME_FLOOR: u64 = 1 << 61;

impl FastContext {
    /// `max_value` bounds any stored size, `max_bag` any join bag, and `count_primes` is the
    /// number of primes needed for reconstructing counts.
    pub fn new(spec: &SigmaRhoSpec, max_value: usize, max_bag: usize, count_primes: usize) -> Result<Self> {
        let orders = transform_orders(spec, max_value, max_bag);
        let primes = choose_primes(&orders, PRIME_FLOOR, count_primes + 2)?;
        let fields = primes
            .iter()
            .map(|&p| PrimeField::new(p, &orders).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let detect = fields[count_primes..].to_vec();
        let counts = fields[..count_primes].to_vec();
        Ok(FastContext { counts, detect })
    }
}

/// Orders of the roots of unity the fast joins need.
pub fn transform_orders(spec: &SigmaRhoSpec, max_value: usize, max_bag: usize) -> Vec<u64> {
    let ms = spec.side(crate::problem::Side::Sigma).low;
    let mr = spec.side(crate::problem::Side::Rho).low;
    let mmax = ms.max(mr).max(1);
    let pow = (2 * max_value + 1)
        .next_power_of_two()
        .max((mmax * max_bag + 1).next_power_of_two());
    let mut orders = vec![pow as u64];
    for m in [ms, mr] {
        if m >= 2 && !orders.contains(&(m as u64)) {
            orders.push(m as u64);
        }
    }
    orders
}

/// Upper bound on the number of compatible colouring pairs in a join over `k` coordinates.
pub fn pair_bound(spec: &SigmaRhoSpec, k: usize) -> f64 {
    let ls = spec.side(crate::problem::Side::Sigma).len() as f64;
    let lr = spec.side(crate::problem::Side::Rho).len() as f64;
    (ls * ls + lr * lr).powi(k as i32)
}

/// A table encoded as field-valued layers over (colouring, size offset).
#[derive(Clone, Debug)]
pub struct Lifted {
    /// Number of size slots per colouring.
    pub q: usize,
    /// Size represented by slot 0.
    pub offset: u32,
    /// One array of `entries * q` values per layer.
    pub layers: Vec<Vec<u64>>,
}

/// Algebras whose join can be evaluated through field transforms.
pub trait JoinAlgebra: Algebra {
    /// Fields of the layers this algebra lifts to; `single_detect` allows one detection prime.
    fn layer_fields(&self, ctx: &FastContext, single_detect: bool) -> Vec<Arc<PrimeField>>;

    /// Lifts table values; with a window only sizes within `window` of the minimum are kept.
    fn lift(&self, values: &[Self::Value], fields: &[Arc<PrimeField>], window: Option<usize>) -> Lifted;

    /// Reads values back from joined layers.
    fn lower(&self, joined: &Lifted, entries: usize) -> Vec<Self::Value>;
}

fn detect_fields(ctx: &FastContext, single: bool) -> Vec<Arc<PrimeField>> {
    let n = if single { 1 } else { 2 };
    ctx.detect[..n].to_vec()
}

/// Size range of the finite sizes in `sizes`, cut to `window` above the minimum.
fn size_range(sizes: impl Iterator<Item = Option<u32>>, window: Option<usize>) -> (u32, usize) {
    let mut lo = u32::MAX;
    let mut hi = 0;
    for v in sizes.flatten() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == u32::MAX {
        return (0, 1);
    }
    let mut q = (hi - lo) as usize + 1;
    if let Some(w) = window {
        q = q.min(w + 1);
    }
    (lo, q)
}

fn lift_sized(
    entries: &[(Option<u32>, u64)],
    fields: &[Arc<PrimeField>],
    count_layer: bool,
    window: Option<usize>,
) -> Lifted {
    let (offset, q) = size_range(entries.iter().map(|e| e.0), window);
    let n_detect = fields.len() - count_layer as usize;
    let mut layers = vec![vec![0u64; entries.len() * q]; fields.len()];
    for (i, &(size, count)) in entries.iter().enumerate() {
        let Some(v) = size else { continue };
        let slot = (v - offset) as usize;
        if slot >= q {
            continue;
        }
        for layer in layers.iter_mut().take(n_detect) {
            layer[i * q + slot] = 1;
        }
        if count_layer {
            layers[n_detect][i * q + slot] = count;
        }
    }
    Lifted { q, offset, layers }
}

/// Best slot with a nonzero detection value, scanning upwards or downwards.
fn best_slot(joined: &Lifted, n_detect: usize, entry: usize, maximise: bool) -> Option<usize> {
    let q = joined.q;
    let hit = |slot: usize| joined.layers[..n_detect].iter().any(|l| l[entry * q + slot] != 0);
    if maximise {
        (0..q).rev().find(|&s| hit(s))
    } else {
        (0..q).find(|&s| hit(s))
    }
}

impl JoinAlgebra for Exists {
    fn layer_fields(&self, ctx: &FastContext, single_detect: bool) -> Vec<Arc<PrimeField>> {
        detect_fields(ctx, single_detect)
    }

    fn lift(&self, values: &[bool], fields: &[Arc<PrimeField>], _window: Option<usize>) -> Lifted {
        let layer: Vec<u64> = values.iter().map(|&b| b as u64).collect();
        Lifted { q: 1, offset: 0, layers: vec![layer; fields.len()] }
    }

    fn lower(&self, joined: &Lifted, entries: usize) -> Vec<bool> {
        (0..entries).map(|i| joined.layers.iter().any(|l| l[i] != 0)).collect()
    }
}

impl JoinAlgebra for Optimum {
    fn layer_fields(&self, ctx: &FastContext, single_detect: bool) -> Vec<Arc<PrimeField>> {
        detect_fields(ctx, single_detect)
    }

    fn lift(&self, values: &[Option<u32>], fields: &[Arc<PrimeField>], window: Option<usize>) -> Lifted {
        let entries: Vec<(Option<u32>, u64)> = values.iter().map(|&v| (v, 1)).collect();
        lift_sized(&entries, fields, false, window)
    }

    fn lower(&self, joined: &Lifted, entries: usize) -> Vec<Option<u32>> {
        let n = joined.layers.len();
        (0..entries)
            .map(|i| best_slot(joined, n, i, self.maximise).map(|s| s as u32 + joined.offset))
            .collect()
    }
}

impl JoinAlgebra for CountMod {
    fn layer_fields(&self, _ctx: &FastContext, _single_detect: bool) -> Vec<Arc<PrimeField>> {
        vec![self.field.clone()]
    }

    fn lift(&self, values: &[u64], _fields: &[Arc<PrimeField>], _window: Option<usize>) -> Lifted {
        Lifted { q: 1, offset: 0, layers: vec![values.to_vec()] }
    }

    fn lower(&self, joined: &Lifted, entries: usize) -> Vec<u64> {
        joined.layers[0][..entries].to_vec()
    }
}

impl JoinAlgebra for CountOptimum {
    fn layer_fields(&self, ctx: &FastContext, single_detect: bool) -> Vec<Arc<PrimeField>> {
        let mut f = detect_fields(ctx, single_detect);
        f.push(self.field.clone());
        f
    }

    fn lift(&self, values: &[SizeCount], fields: &[Arc<PrimeField>], window: Option<usize>) -> Lifted {
        lift_sized(values, fields, true, window)
    }

    fn lower(&self, joined: &Lifted, entries: usize) -> Vec<SizeCount> {
        let n = joined.layers.len() - 1;
        let q = joined.q;
        (0..entries)
            .map(|i| match best_slot(joined, n, i, self.maximise) {
                Some(s) => (Some(s as u32 + joined.offset), joined.layers[n][i * q + s]),
                None => (None, 0),
            })
            .collect()
    }
}

/// Output size range of a join of two lifted operands: slots, transform length, window cut.
fn joined_size_dim(ql: usize, qr: usize, window: Option<usize>) -> (usize, BoxDim) {
    let full = ql + qr - 1;
    let q_out = window.map_or(full, |w| full.min(w + 1));
    let boxed = ql.max(qr).max(q_out);
    let pad = full.next_power_of_two().max(boxed.next_power_of_two());
    (q_out, BoxDim::linear(boxed, if boxed == 1 { 1 } else { pad }))
}

fn single_detect_ok(spec: &SigmaRhoSpec, k: usize, ctx: &FastContext) -> bool {
    let p = ctx.detect.iter().map(|f| f.modulus()).min().unwrap_or(0);
    pair_bound(spec, k) < p as f64
}

/// One class of coordinates in the general fast join: the top label of a side, or the low
/// labels of a side.
#[derive(Clone, Copy, Debug)]
struct Block {
    top: bool,
    /// Digit of the top label, or of the first low label.
    digit: usize,
    /// Number of low labels (cyclic length); 1 for a top block.
    m: usize,
}

fn blocks(spec: &SigmaRhoSpec) -> Vec<Block> {
    use crate::problem::Side;
    let mut out = Vec::new();
    for side in [Side::Sigma, Side::Rho] {
        let sl = spec.side(side);
        let off = spec.side_offset(side);
        if sl.low > 0 {
            out.push(Block { top: false, digit: off, m: sl.low });
        }
        if sl.top {
            out.push(Block { top: true, digit: off + sl.low, m: 1 });
        }
    }
    out
}

/// Smallest power of two M such that no nonzero number of wrap-arounds is invisible modulo
/// M. A coordinate of a side with m low labels that wraps loses exactly m from the sum of
/// low counts, so the total loss is m_sigma * w_sigma + m_rho * w_rho with w_x bounded by the
/// number of low coordinates of side x (and zero if m = 1, where sums never wrap).
fn wrap_modulus(low: &[(usize, Block)]) -> usize {
    let mut per_m: Vec<(usize, usize)> = Vec::new();
    for &(_, b) in low {
        if b.m < 2 {
            continue;
        }
        match per_m.iter_mut().find(|e| e.0 == b.m) {
            Some(e) => e.1 += 1,
            None => per_m.push((b.m, 1)),
        }
    }
    let mut modulus = 1;
    'search: loop {
        let mut w = vec![0usize; per_m.len()];
        loop {
            let mut j = 0;
            while j < w.len() {
                w[j] += 1;
                if w[j] <= per_m[j].1 {
                    break;
                }
                w[j] = 0;
                j += 1;
            }
            if j == w.len() {
                return modulus;
            }
            let loss: usize = w.iter().zip(&per_m).map(|(&x, &(m, _))| x * m).sum();
            if loss.is_multiple_of(modulus) {
                modulus *= 2;
                continue 'search;
            }
        }
    }
}

/// Join via zeta transforms over the label order and one combined cyclic/linear convolution
/// per split of the bag into top coordinates and low coordinates of each side. Low
/// coordinates add cyclically; an extra cyclic dimension carries the sum of low counts
/// (modulo [`wrap_modulus`]) so that wrapped, overflowing sums are discarded.
pub fn fast_join_general<A: JoinAlgebra>(
    alg: &A,
    ctx: &FastContext,
    spec: &SigmaRhoSpec,
    left: &MemoTable<A::Value>,
    right: &MemoTable<A::Value>,
    window: Option<usize>,
) -> Result<MemoTable<A::Value>> {
    check_join_inputs(spec, left, right)?;
    let s = spec.s();
    let k = left.k();
    let entries = left.values.len();
    let fields = alg.layer_fields(ctx, single_detect_ok(spec, k, ctx));
    let mut lf = alg.lift(&left.values, &fields, window);
    let mut rf = alg.lift(&right.values, &fields, window);
    let (ql, qr) = (lf.q, rf.q);
    let (q_out, kappa) = joined_size_dim(ql, qr, window);
    let order = CoordOrder::Flat(spec.flat_order());
    let axes: Vec<usize> = (0..k).collect();
    let mut lsizes = vec![s; k];
    lsizes.push(ql);
    let mut rsizes = vec![s; k];
    rsizes.push(qr);
    for (i, field) in fields.iter().enumerate() {
        zeta_axes(field, &mut lf.layers[i], &lsizes, &axes, order, Direction::Forward);
        zeta_axes(field, &mut rf.layers[i], &rsizes, &axes, order, Direction::Forward);
    }
    let mut out = Lifted {
        q: q_out,
        offset: lf.offset + rf.offset,
        layers: vec![vec![0u64; entries * q_out]; fields.len()],
    };
    let mut engines: Vec<Ntt> = fields.iter().map(|f| Ntt::new(f)).collect();
    let strides: Vec<usize> = (0..k).map(|j| s.pow((k - 1 - j) as u32)).collect();
    let blocks = blocks(spec);
    let mut assign = vec![0usize; k];
    let mut f = Vec::new();
    let mut g = Vec::new();
    if !blocks.is_empty() || k == 0 {
        loop {
            let mut base = 0;
            let mut low: Vec<(usize, Block)> = Vec::new();
            for j in 0..k {
                let b = blocks[assign[j]];
                if b.top {
                    base += b.digit * strides[j];
                } else {
                    low.push((j, b));
                }
            }
            let q_sum = wrap_modulus(&low);
            let max_sum: usize = low.iter().map(|(_, b)| b.m - 1).sum();
            let sums = q_sum.min(max_sum + 1);
            let mut dims = vec![kappa, BoxDim::linear(sums, q_sum)];
            dims.extend(low.iter().map(|(_, b)| BoxDim::cyclic(b.m)));
            let cells: usize = low.iter().map(|(_, b)| b.m).product();
            let inner = kappa.size * sums;
            // Table index and low-count sum of every low-digit tuple, in row-major order.
            let mut tuples = Vec::with_capacity(cells);
            let mut digits = vec![0usize; low.len()];
            for _ in 0..cells {
                let mut idx = base;
                let mut sum = 0;
                for (t, &(j, b)) in low.iter().enumerate() {
                    idx += (b.digit + digits[t]) * strides[j];
                    sum += digits[t];
                }
                tuples.push((idx, sum % q_sum));
                for t in (0..digits.len()).rev() {
                    digits[t] += 1;
                    if digits[t] < low[t].1.m {
                        break;
                    }
                    digits[t] = 0;
                }
            }
            for (li, engine) in engines.iter_mut().enumerate() {
                let (la, ra) = (&lf.layers[li], &rf.layers[li]);
                f.clear();
                f.resize(cells * inner, 0);
                g.clear();
                g.resize(cells * inner, 0);
                let mut any_f = false;
                let mut any_g = false;
                for (c, &(idx, sum)) in tuples.iter().enumerate() {
                    for kap in 0..ql {
                        let x = la[idx * ql + kap];
                        any_f |= x != 0;
                        f[(kap * sums + sum) * cells + c] = x;
                    }
                    for kap in 0..qr {
                        let x = ra[idx * qr + kap];
                        any_g |= x != 0;
                        g[(kap * sums + sum) * cells + c] = x;
                    }
                }
                if !any_f || !any_g {
                    continue;
                }
                let h = engine.convolve(&dims, &f, &g)?;
                let oa = &mut out.layers[li];
                for (c, &(idx, sum)) in tuples.iter().enumerate() {
                    for kap in 0..q_out {
                        oa[idx * q_out + kap] = h[(kap * sums + sum) * cells + c];
                    }
                }
            }
            let mut j = k;
            let mut done = true;
            while j > 0 {
                j -= 1;
                assign[j] += 1;
                if assign[j] < blocks.len() {
                    done = false;
                    break;
                }
                assign[j] = 0;
            }
            if done {
                break;
            }
        }
    }
    let mut osizes = vec![s; k];
    osizes.push(q_out);
    for (i, field) in fields.iter().enumerate() {
        zeta_axes(field, &mut out.layers[i], &osizes, &axes, order, Direction::Inverse);
    }
    let values = alg.lower(&out, entries);
    Ok(MemoTable { bag: left.bag.clone(), s, values })
}

/// Join specialised to problems with one sigma label and rho labels {|0|, |>=1|}: for each
/// choice of the sigma coordinates, the rho coordinates combine by a covering product over
/// the chain |0| < |>=1|, convolved along the size dimension. Windows are taken per choice.
pub fn fast_join_dominating<A: JoinAlgebra>(
    alg: &A,
    ctx: &FastContext,
    spec: &SigmaRhoSpec,
    left: &MemoTable<A::Value>,
    right: &MemoTable<A::Value>,
    window: Option<usize>,
) -> Result<MemoTable<A::Value>> {
    check_join_inputs(spec, left, right)?;
    if !spec.has_dominating_shape() {
        return Err(Error::Precondition(format!(
            "the dominating-set join needs one sigma label and rho labels |0|,|>=1|; got {spec}"
        )));
    }
    let s = spec.s();
    let k = left.k();
    let entries = left.values.len();
    let fields = alg.layer_fields(ctx, single_detect_ok(spec, k, ctx));
    let mut engines: Vec<Ntt> = fields.iter().map(|f| Ntt::new(f)).collect();
    let strides: Vec<usize> = (0..k).map(|j| s.pow((k - 1 - j) as u32)).collect();
    let rho0 = spec.fresh_digit(crate::problem::Side::Rho);
    let mut values = vec![alg.zero(); entries];
    for mask in 0..(1usize << k) {
        let rho_pos: Vec<usize> = (0..k).filter(|&j| mask >> (k - 1 - j) & 1 == 0).collect();
        let kr = rho_pos.len();
        let cells = 1usize << kr;
        let index: Vec<usize> = (0..cells)
            .map(|b| {
                rho_pos
                    .iter()
                    .enumerate()
                    .map(|(t, &j)| (rho0 + (b >> (kr - 1 - t) & 1)) * strides[j])
                    .sum()
            })
            .collect();
        let lv: Vec<A::Value> = index.iter().map(|&i| left.values[i]).collect();
        let rv: Vec<A::Value> = index.iter().map(|&i| right.values[i]).collect();
        if lv.iter().all(|&v| alg.is_zero(v)) || rv.iter().all(|&v| alg.is_zero(v)) {
            continue;
        }
        let mut lf = alg.lift(&lv, &fields, window);
        let mut rf = alg.lift(&rv, &fields, window);
        let (ql, qr) = (lf.q, rf.q);
        let (q_out, kappa) = joined_size_dim(ql, qr, window);
        let axes: Vec<usize> = (0..kr).collect();
        let mut out = Lifted {
            q: q_out,
            offset: lf.offset + rf.offset,
            layers: Vec::with_capacity(fields.len()),
        };
        for (li, engine) in engines.iter_mut().enumerate() {
            let field = engine.field();
            let mut lsizes = vec![2; kr];
            lsizes.push(ql);
            let mut rsizes = vec![2; kr];
            rsizes.push(qr);
            zeta_axes(field, &mut lf.layers[li], &lsizes, &axes, CoordOrder::Chain(2), Direction::Forward);
            zeta_axes(field, &mut rf.layers[li], &rsizes, &axes, CoordOrder::Chain(2), Direction::Forward);
            let mut h = vec![0u64; cells * q_out];
            let mut a = vec![0u64; kappa.size];
            let mut b = vec![0u64; kappa.size];
            for c in 0..cells {
                let la = &lf.layers[li][c * ql..(c + 1) * ql];
                let ra = &rf.layers[li][c * qr..(c + 1) * qr];
                if kappa.size == 1 {
                    if la[0] != 0 && ra[0] != 0 {
                        h[c] = field.mul(la[0], ra[0]);
                    }
                    continue;
                }
                if la.iter().all(|&x| x == 0) || ra.iter().all(|&x| x == 0) {
                    continue;
                }
                a.fill(0);
                a[..ql].copy_from_slice(la);
                b.fill(0);
                b[..qr].copy_from_slice(ra);
                let conv = engine.convolve(&[kappa], &a, &b)?;
                h[c * q_out..(c + 1) * q_out].copy_from_slice(&conv[..q_out]);
            }
            let mut osizes = vec![2; kr];
            osizes.push(q_out);
            zeta_axes(field, &mut h, &osizes, &axes, CoordOrder::Chain(2), Direction::Inverse);
            out.layers.push(h);
        }
        for (c, v) in alg.lower(&out, cells).into_iter().enumerate() {
            values[index[c]] = v;
        }
    }
    Ok(MemoTable { bag: left.bag.clone(), s, values })
}
