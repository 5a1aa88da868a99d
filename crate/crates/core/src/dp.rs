use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::graph::{NiceKind, NiceTreeDecomposition};
use crate::problem::{Side, SigmaRhoSpec};
use crate::table::MemoTable;

pub fn leaf_table<A: Algebra>(alg: &A, spec: &SigmaRhoSpec) -> MemoTable<A::Value> {
    MemoTable::filled(Vec::new(), spec.s(), alg.one())
}

fn stride(s: usize, k: usize, pos: usize) -> usize {
    s.pow((k - 1 - pos) as u32)
}

/// Adds `v` to the bag. The new vertex has no forgotten neighbours yet, so only the two
/// fresh labels keep the child's value.
pub fn introduce<A: Algebra>(
    alg: &A,
    spec: &SigmaRhoSpec,
    child: &MemoTable<A::Value>,
    v: usize,
) -> Result<MemoTable<A::Value>> {
    if child.bag.contains(&v) {
        return Err(Error::Precondition(format!("vertex {v} already in bag")));
    }
    let s = spec.s();
    let pos = child.bag.partition_point(|&x| x < v);
    let mut bag = child.bag.clone();
    bag.insert(pos, v);
    let k = bag.len();
    let st = stride(s, k, pos);
    let fresh = [spec.fresh_digit(Side::Sigma), spec.fresh_digit(Side::Rho)];
    let mut out = MemoTable::filled(bag, s, alg.zero());
    for (i, slot) in out.values.iter_mut().enumerate() {
        let d = (i / st) % s;
        if fresh.contains(&d) {
            let hi = i / (st * s);
            let lo = i % st;
            *slot = child.values[hi * st + lo];
        }
    }
    Ok(out)
}

/// The vertex at `target` gains one selected neighbour (the vertex at `source`) wherever the
/// source is in sigma.
fn receive<A: Algebra>(
    alg: &A,
    spec: &SigmaRhoSpec,
    preds: &[Vec<usize>],
    values: &[A::Value],
    k: usize,
    target: usize,
    source: usize,
) -> Vec<A::Value> {
    let s = spec.s();
    let (st_t, st_s) = (stride(s, k, target), stride(s, k, source));
    let mut out = values.to_vec();
    for (i, slot) in out.iter_mut().enumerate() {
        if spec.digit_side((i / st_s) % s) != Side::Sigma {
            continue;
        }
        let dt = (i / st_t) % s;
        let base = i - dt * st_t;
        *slot = preds[dt]
            .iter()
            .fold(alg.zero(), |acc, &p| alg.add(acc, values[base + p * st_t]));
    }
    out
}

/// Removes `v` from the bag after accounting for its edges to the remaining bag vertices.
pub fn forget<A: Algebra>(
    alg: &A,
    spec: &SigmaRhoSpec,
    child: &MemoTable<A::Value>,
    v: usize,
    edges: &[usize],
) -> Result<MemoTable<A::Value>> {
    let s = spec.s();
    let k = child.k();
    let pos_v = child
        .bag
        .iter()
        .position(|&x| x == v)
        .ok_or_else(|| Error::Precondition(format!("vertex {v} not in bag")))?;
    let preds: Vec<Vec<usize>> = (0..s).map(|d| spec.predecessors(d)).collect();
    let mut values = child.values.clone();
    for &u in edges {
        let pos_u = child
            .bag
            .iter()
            .position(|&x| x == u)
            .ok_or_else(|| Error::Precondition(format!("edge endpoint {u} not in bag")))?;
        values = receive(alg, spec, &preds, &values, k, pos_u, pos_v);
        values = receive(alg, spec, &preds, &values, k, pos_v, pos_u);
    }
    let mut bag = child.bag.clone();
    bag.remove(pos_v);
    let st = stride(s, k, pos_v);
    let finals: Vec<(usize, bool)> = (0..s)
        .filter(|&d| spec.is_final(d))
        .map(|d| (d, spec.digit_side(d) == Side::Sigma))
        .collect();
    let mut out = MemoTable::filled(bag, s, alg.zero());
    for (i, slot) in out.values.iter_mut().enumerate() {
        let hi = i / st;
        let lo = i % st;
        let base = hi * st * s + lo;
        *slot = finals.iter().fold(alg.zero(), |acc, &(d, selected)| {
            let x = values[base + d * st];
            let x = if selected { alg.select(x) } else { x };
            alg.add(acc, x)
        });
    }
    Ok(out)
}

/// Runs the dynamic program bottom-up and returns the value of the empty root colouring.
pub fn run_dp<A, J>(
    alg: &A,
    spec: &SigmaRhoSpec,
    nice: &NiceTreeDecomposition,
    mut join: J,
) -> Result<A::Value>
where
    A: Algebra,
    J: FnMut(&MemoTable<A::Value>, &MemoTable<A::Value>) -> Result<MemoTable<A::Value>>,
{
    let mut tables: Vec<Option<MemoTable<A::Value>>> = vec![None; nice.nodes.len()];
    for (i, node) in nice.nodes.iter().enumerate() {
        let mut take = |j: usize| {
            tables[node.children[j]]
                .take()
                .ok_or_else(|| Error::Precondition("child table missing".into()))
        };
        let table = match &node.kind {
            NiceKind::Leaf => leaf_table(alg, spec),
            NiceKind::Introduce { v } => introduce(alg, spec, &take(0)?, *v)?,
            NiceKind::Forget { v, edges } => forget(alg, spec, &take(0)?, *v, edges)?,
            NiceKind::Join => {
                let left = take(0)?;
                let right = take(1)?;
                join(&left, &right)?
            }
        };
        tables[i] = Some(table);
    }
    let root = tables
        .pop()
        .flatten()
        .ok_or_else(|| Error::Precondition("empty decomposition".into()))?;
    if !root.bag.is_empty() {
        return Err(Error::Precondition("root bag is not empty".into()));
    }
    Ok(root.values[0])
}
