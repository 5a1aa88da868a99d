use std::collections::HashSet;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigmarho::dp::run_dp;
use sigmarho::graph::{nice_decomposition, Graph, NiceTreeDecomposition};
use sigmarho::joins::{fast_join_dominating, fast_join_general, naive_join, FastContext, JoinAlgebra, JoinStrategy};
use sigmarho::modring::{choose_prime, is_prime, PrimeField};
use sigmarho::oracle::{brute_force_solve, JoinOracle, OracleView};
use sigmarho::posets::{cover_convolution, zeta_product_order, CoordOrder, FlatOrder};
use sigmarho::scaling::join_mults;
use sigmarho::solver::count_prime_budget;
use sigmarho::table::MemoTable;
use sigmarho::transforms::{
    combined_convolution, cyclic_convolution, dft, multidim_dft, noncyclic_convolution, Dim, DimKind,
    Direction, Tensor,
};
use sigmarho::{solve, CountMod, CountOptimum, Exists, Optimum, Preset, SigmaRhoSpec, SolveOptions, Variant};

const ORACLE_LIMIT: Duration = Duration::from_secs(600);
const JOIN_LIMIT: Duration = Duration::from_secs(300);
const TRANSFORM_LIMIT: Duration = Duration::from_secs(60);
const SCALING_LIMIT: Duration = Duration::from_secs(300);

const MAX_CONNECTED_N: usize = 7;
const RANDOM_GRAPHS: usize = 200;
const RANDOM_EDGE_PROB: f64 = 0.3;
const JOIN_TRIALS: usize = 200;
const TRANSFORM_CASES: usize = 1000;
const PRIME_CASES: usize = 100;
const SCALING_KS: std::ops::RangeInclusive<usize> = 8..=12;
const FAST_GROWTH_MAX: f64 = 3.5;
const NAIVE_GROWTH_MIN: f64 = 6.0;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    known_unattainable: bool,
}

fn report(outcomes: &mut Vec<Outcome>, o: Outcome) {
    println!(
        "{} criterion {} ({}): {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.id,
        o.name,
        o.detail
    );
    outcomes.push(o);
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed < limit, format!("{} (limit {})", secs(elapsed), secs(limit)))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn edge_index(n: usize) -> Vec<Vec<usize>> {
    let mut idx = vec![vec![0; n]; n];
    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    for (e, (u, v)) in pairs.enumerate() {
        idx[u][v] = e;
        idx[v][u] = e;
    }
    idx
}

/// Extends each connected graph on n-1 vertices by a new vertex with a nonempty neighbourhood.
fn extend_connected(prev: &[Vec<(usize, usize)>], n: usize) -> Vec<Vec<(usize, usize)>> {
    let idx = edge_index(n);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let maps: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| idx[p[u]][p[v]]).collect())
        .collect();
    let mut seen = HashSet::new();
    for edges in prev {
        let base = edges.iter().fold(0u64, |acc, &(u, v)| acc | 1 << idx[u][v]);
        for nb in 1u32..(1u32 << (n - 1)) {
            let mut mask = base;
            for (u, row) in idx.iter().enumerate().take(n - 1) {
                if nb >> u & 1 == 1 {
                    mask |= 1 << row[n - 1];
                }
            }
            let canon = maps
                .iter()
                .map(|m| {
                    let mut out = 0u64;
                    let mut rest = mask;
                    while rest != 0 {
                        let e = rest.trailing_zeros() as usize;
                        out |= 1 << m[e];
                        rest &= rest - 1;
                    }
                    out
                })
                .min()
                .unwrap();
            seen.insert(canon);
        }
    }
    let mut masks: Vec<u64> = seen.into_iter().collect();
    masks.sort_unstable();
    masks
        .into_iter()
        .map(|m| pairs.iter().enumerate().filter(|&(e, _)| m >> e & 1 == 1).map(|(_, &p)| p).collect())
        .collect()
}

fn oracle_graphs() -> Vec<Graph> {
    let mut graphs = Vec::new();
    let mut level: Vec<Vec<(usize, usize)>> = vec![vec![]];
    for n in 1..=MAX_CONNECTED_N {
        if n > 1 {
            level = extend_connected(&level, n);
        }
        graphs.extend(level.iter().map(|edges| Graph::from_edges(n, edges).unwrap()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..RANDOM_GRAPHS {
        let n = rng.gen_range(8..=10);
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(RANDOM_EDGE_PROB) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        graphs.push(g);
    }
    graphs
}

fn connected_count(graphs: &[Graph]) -> Vec<usize> {
    (1..=MAX_CONNECTED_N).map(|n| graphs.iter().take(graphs.len() - RANDOM_GRAPHS).filter(|g| g.n() == n).count()).collect()
}

fn criterion_oracle(graphs: &[Graph], nices: &[NiceTreeDecomposition]) -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for preset in Preset::all(2) {
        let spec = preset.spec();
        for variant in Variant::ALL {
            for (g, nice) in graphs.iter().zip(nices) {
                let expect = brute_force_solve(g, &spec, variant).unwrap();
                for strategy in [JoinStrategy::Naive, JoinStrategy::FastGeneral] {
                    let opts = SolveOptions { strategy, replacement: false };
                    let got = solve(g, nice, &spec, variant, opts).map(|r| r.answer);
                    checked += 1;
                    if got.as_ref() != Ok(&expect) {
                        mismatches.push(format!("{} {variant} {strategy:?} on {}", preset.name(), g.to_pace().trim()));
                    }
                }
            }
        }
    }
    let (fast_enough, time) = within(start.elapsed(), ORACLE_LIMIT);
    let counts = connected_count(graphs);
    let mut detail = format!(
        "{} graphs (connected n<=7 by n: {:?}; {} random n in 8..=10), {checked} solves, {} mismatches, {time}",
        graphs.len(),
        counts,
        RANDOM_GRAPHS,
        mismatches.len()
    );
    if let Some(first) = mismatches.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    Outcome { id: 1, name: "oracle equivalence", pass: mismatches.is_empty() && fast_enough, detail, known_unattainable: false }
}

fn join_trials<A: JoinAlgebra + OracleView>(
    alg: &A,
    ctx: &FastContext,
    spec: &SigmaRhoSpec,
    k: usize,
    max_size: u32,
    rng: &mut ChaCha8Rng,
) -> usize {
    let oracle = JoinOracle::new(spec, k);
    let bag: Vec<usize> = (0..k).collect();
    let mut bad = 0;
    for _ in 0..JOIN_TRIALS {
        let l = alg.random_table(rng, bag.clone(), spec.s(), max_size);
        let r = alg.random_table(rng, bag.clone(), spec.s(), max_size);
        let expect = oracle.join(&alg.to_oracle(&l.values), &alg.to_oracle(&r.values)).unwrap();
        let naive = naive_join(alg, spec, &l, &r).unwrap();
        let fast = fast_join_general(alg, ctx, spec, &l, &r, None).unwrap();
        if alg.to_oracle(&naive.values) != expect || alg.to_oracle(&fast.values) != expect {
            bad += 1;
        }
    }
    bad
}

fn join_max_size(k: usize) -> u32 {
    if k <= 4 {
        6
    } else {
        3
    }
}

fn criterion_joins() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bad = 0;
    let mut cases = 0;
    for preset in Preset::all(2) {
        let spec = preset.spec();
        for k in 1..=6 {
            let max_size = join_max_size(k);
            let ctx = FastContext::new(&spec, 2 * max_size as usize, k, 1).unwrap();
            let field = ctx.counts[0].clone();
            bad += join_trials(&Exists, &ctx, &spec, k, max_size, &mut rng);
            bad += join_trials(&Optimum { maximise: false }, &ctx, &spec, k, max_size, &mut rng);
            bad += join_trials(&Optimum { maximise: true }, &ctx, &spec, k, max_size, &mut rng);
            bad += join_trials(&CountMod { field: field.clone() }, &ctx, &spec, k, max_size, &mut rng);
            bad += join_trials(&CountOptimum { field: field.clone(), maximise: false }, &ctx, &spec, k, max_size, &mut rng);
            bad += join_trials(&CountOptimum { field, maximise: true }, &ctx, &spec, k, max_size, &mut rng);
            cases += 6 * JOIN_TRIALS;
        }
    }
    let (fast_enough, time) = within(start.elapsed(), JOIN_LIMIT);
    Outcome {
        id: 2,
        name: "join equivalence",
        pass: bad == 0 && fast_enough,
        detail: format!(
            "{cases} table pairs over 14 problems x 6 variants x k=1..6 (sizes up to 6 for k<=4, 3 above), {bad} disagreements, {time}"
        ),
        known_unattainable: false,
    }
}

fn cells(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|mut i| {
            let mut idx = vec![0; sizes.len()];
            for d in (0..sizes.len()).rev() {
                idx[d] = i % sizes[d];
                i /= sizes[d];
            }
            idx
        })
        .collect()
}

fn transform_field(sizes: &[usize]) -> Arc<PrimeField> {
    let mut orders: Vec<u64> = sizes.iter().map(|&s| s as u64).collect();
    orders.push(64);
    let p = choose_prime(&orders, 1 << 61).unwrap();
    Arc::new(PrimeField::new(p, &orders).unwrap())
}

fn random_tensor(rng: &mut ChaCha8Rng, field: &Arc<PrimeField>, dims: Vec<Dim>) -> Tensor {
    let total: usize = dims.iter().map(|d| d.size).product();
    let data = (0..total).map(|_| rng.gen_range(0..field.modulus())).collect();
    Tensor::from_data(field.clone(), dims, data).unwrap()
}

fn direct_convolution(f: &Tensor, g: &Tensor) -> Vec<u64> {
    let all = cells(&f.sizes());
    let mut out = vec![0u64; all.len()];
    for a in &all {
        for b in &all {
            let mut c = Vec::with_capacity(a.len());
            let mut inside = true;
            for (d, dim) in f.dims.iter().enumerate() {
                let s = a[d] + b[d];
                match dim.kind {
                    DimKind::Cyclic => c.push(s % dim.size),
                    DimKind::Linear => {
                        inside &= s < dim.size;
                        c.push(s);
                    }
                }
            }
            if inside {
                let o = f.offset(&c);
                out[o] = f.field.add(out[o], f.field.mul(f.get(a), g.get(b)));
            }
        }
    }
    out
}

fn direct_dft(seq: &[u64], w: u64, f: &PrimeField) -> Vec<u64> {
    let r = seq.len() as u64;
    (0..r).map(|i| (0..r).fold(0, |acc, j| f.add(acc, f.mul(seq[j as usize], f.pow(w, i * j))))).collect()
}

fn random_shape(rng: &mut ChaCha8Rng) -> Vec<usize> {
    let dims = rng.gen_range(1..=3);
    (0..dims).map(|_| rng.gen_range(1..=6)).collect()
}

fn random_flat(rng: &mut ChaCha8Rng) -> FlatOrder {
    loop {
        let o = FlatOrder {
            sigma_low: rng.gen_range(0..=2),
            sigma_top: rng.gen_bool(0.5),
            rho_low: rng.gen_range(0..=2),
            rho_top: rng.gen_bool(0.5),
        };
        if CoordOrder::Flat(o).size() > 0 {
            return o;
        }
    }
}

fn criterion_transforms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures: Vec<&str> = Vec::new();

    for _ in 0..TRANSFORM_CASES {
        let len = rng.gen_range(1..=16);
        let f = transform_field(&[len]);
        let w = f.root(len as u64).unwrap();
        let seq: Vec<u64> = (0..len).map(|_| rng.gen_range(0..f.modulus())).collect();
        let fwd = dft(&seq, w, Direction::Forward, &f).unwrap();
        if fwd != direct_dft(&seq, w, &f) || dft(&fwd, w, Direction::Inverse, &f).unwrap() != seq {
            failures.push("dft");
        }
    }

    for _ in 0..TRANSFORM_CASES {
        let sizes = random_shape(&mut rng);
        let field = transform_field(&sizes);
        let t = random_tensor(&mut rng, &field, sizes.iter().map(|&s| Dim::cyclic(s)).collect());
        let back = multidim_dft(&multidim_dft(&t, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        if back.data != t.data {
            failures.push("multidim dft");
        }
    }

    for kind in ["cyclic", "noncyclic", "combined"] {
        for _ in 0..TRANSFORM_CASES {
            let sizes = random_shape(&mut rng);
            let field = transform_field(&sizes);
            let dims: Vec<Dim> = sizes
                .iter()
                .map(|&s| match kind {
                    "cyclic" => Dim::cyclic(s),
                    "noncyclic" => Dim::linear(s),
                    _ if rng.gen_bool(0.5) => Dim::cyclic(s),
                    _ => Dim::linear(s),
                })
                .collect();
            let a = random_tensor(&mut rng, &field, dims.clone());
            let b = random_tensor(&mut rng, &field, dims);
            let got = match kind {
                "cyclic" => cyclic_convolution(&a, &b),
                "noncyclic" => noncyclic_convolution(&a, &b),
                _ => combined_convolution(&a, &b),
            }
            .unwrap();
            if got.data != direct_convolution(&a, &b) {
                failures.push(kind);
            }
        }
    }

    let zeta_field = transform_field(&[]);
    for which in ["chain", "flat", "tds pairs"] {
        for _ in 0..TRANSFORM_CASES {
            let order = match which {
                "chain" => CoordOrder::Chain(rng.gen_range(1..=4)),
                "flat" => CoordOrder::Flat(random_flat(&mut rng)),
                _ => CoordOrder::Flat(FlatOrder::tds_pairs()),
            };
            let n = order.size();
            let k = rng.gen_range(1..=3);
            let t = random_tensor(&mut rng, &zeta_field, vec![Dim::cyclic(n); k]);
            let z = zeta_product_order(&t, order, Direction::Forward).unwrap();
            let all = cells(&t.sizes());
            let expect: Vec<u64> = all
                .iter()
                .map(|x| {
                    all.iter()
                        .filter(|y| y.iter().zip(x).all(|(&a, &b)| order.leq(a, b)))
                        .fold(0, |acc, y| t.field.add(acc, t.get(y)))
                })
                .collect();
            let back = zeta_product_order(&z, order, Direction::Inverse).unwrap();
            if z.data != expect || back.data != t.data {
                failures.push(which);
            }
        }
    }

    for _ in 0..TRANSFORM_CASES {
        let order = if rng.gen_bool(0.5) {
            CoordOrder::Chain(rng.gen_range(2..=3))
        } else {
            CoordOrder::Flat(FlatOrder::tds_pairs())
        };
        let n = order.size();
        let k = rng.gen_range(1..=2);
        let q = rng.gen_range(1..=5);
        let mut dims = vec![Dim::cyclic(n); k];
        dims.push(Dim::linear(q));
        let a = random_tensor(&mut rng, &zeta_field, dims.clone());
        let b = random_tensor(&mut rng, &zeta_field, dims);
        let axes: Vec<usize> = (0..k).collect();
        let got = cover_convolution(&a, &b, order, &axes).unwrap();
        let mut sizes = vec![n; k];
        sizes.push(q);
        let all = cells(&sizes);
        let f = &a.field;
        let mut expect = vec![0u64; all.len()];
        for x in &all {
            for y in &all {
                if x[k] + y[k] >= q {
                    continue;
                }
                let targets = all
                    .iter()
                    .filter(|z| z[k] == x[k] + y[k])
                    .filter(|z| {
                        (0..k).all(|d| order.leq(x[d], z[d]) && order.leq(y[d], z[d]))
                    })
                    .collect::<Vec<_>>();
                let prod = f.mul(a.get(x), b.get(y));
                for z in targets {
                    let mut coeff = 1i64;
                    for d in 0..k {
                        coeff *= mobius_weight(order, x[d], y[d], z[d]);
                    }
                    let o = a.offset(z);
                    let term = if coeff >= 0 {
                        f.mul(prod, coeff as u64)
                    } else {
                        f.neg(f.mul(prod, (-coeff) as u64))
                    };
                    expect[o] = f.add(expect[o], term);
                }
            }
        }
        if got.data != expect {
            failures.push("cover convolution");
        }
    }

    let (fast_enough, time) = within(start.elapsed(), TRANSFORM_LIMIT);
    let detail = format!(
        "{} cases each of dft, multidim dft, cyclic/noncyclic/combined convolution, zeta over chain/flat/tds pairs, cover convolution; {} failures, {time}",
        TRANSFORM_CASES,
        failures.len()
    );
    Outcome { id: 3, name: "transform suite", pass: failures.is_empty() && fast_enough, detail, known_unattainable: false }
}

/// Coefficient of z in the covering product of point masses at x and y along one coordinate:
/// sum over w >= x, w >= y of mu(w, z), which is 1 exactly when z is the least upper bound.
fn mobius_weight(order: CoordOrder, x: usize, y: usize, z: usize) -> i64 {
    let n = order.size();
    let ups: Vec<usize> = (0..n).filter(|&w| order.leq(x, w) && order.leq(y, w)).collect();
    ups.iter().map(|&w| mobius(order, w, z)).sum()
}

fn mobius(order: CoordOrder, a: usize, b: usize) -> i64 {
    if !order.leq(a, b) {
        return 0;
    }
    if a == b {
        return 1;
    }
    let n = order.size();
    -(0..n).filter(|&c| c != b && order.leq(a, c) && order.leq(c, b)).map(|c| mobius(order, a, c)).sum::<i64>()
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

fn criterion_primes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut bad = Vec::new();
    for _ in 0..PRIME_CASES {
        let count = rng.gen_range(1..=3);
        let orders: Vec<u64> = (0..count)
            .map(|_| match rng.gen_range(0..3) {
                0 => 1u64 << rng.gen_range(0..=12),
                1 => rng.gen_range(1..=12),
                _ => rng.gen_range(1..=60),
            })
            .collect();
        let min_value = if rng.gen_bool(0.5) { rng.gen_range(1..=100_000) } else { rng.gen_range(1u64 << 40..1u64 << 62) };
        let l = orders.iter().fold(1, |acc, &r| lcm(acc, r));
        let p = choose_prime(&orders, min_value).unwrap();
        let mut ok = p > min_value && is_prime(p) && (p - 1).is_multiple_of(l);
        let mut c = p - l;
        while ok && c > min_value {
            ok &= !is_prime(c);
            c -= l;
        }
        let field = PrimeField::new(p, &orders).unwrap();
        for &r in &orders {
            let w = field.root(r).unwrap();
            ok &= field.pow(w, r) == 1;
            let mut m = r;
            let mut q = 2;
            while m > 1 {
                if m % q == 0 {
                    ok &= field.pow(w, r / q) != 1;
                    while m % q == 0 {
                        m /= q;
                    }
                }
                q += 1;
            }
        }
        if !ok {
            bad.push(format!("{orders:?} > {min_value}"));
        }
    }
    Outcome {
        id: 4,
        name: "prime machinery",
        pass: bad.is_empty(),
        detail: format!("{PRIME_CASES} (orders, min_value) pairs, {} failures", bad.len()),
        known_unattainable: false,
    }
}

fn criterion_scaling() -> Vec<Outcome> {
    let start = Instant::now();
    let spec = Preset::DominatingSet.spec();
    let ks: Vec<usize> = SCALING_KS.collect();
    let measure = |strategy| -> Vec<u64> {
        ks.iter().map(|&k| join_mults(&spec, Variant::Count, strategy, k, 3).unwrap()).collect()
    };
    let fast = measure(JoinStrategy::FastGeneral);
    let naive = measure(JoinStrategy::Naive);
    let growth = |v: &[u64]| -> Vec<f64> { v.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect() };
    let fg = growth(&fast);
    let ng = growth(&naive);
    let ratios: Vec<f64> = fast.iter().zip(&naive).map(|(&f, &n)| f as f64 / n as f64).collect();
    let (fast_enough, time) = within(start.elapsed(), SCALING_LIMIT);
    let fast_ok = fg.iter().all(|&g| g <= FAST_GROWTH_MAX);
    let naive_ok = ng.iter().all(|&g| g >= NAIVE_GROWTH_MIN);
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let fmt = |v: &[f64]| v.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>().join(", ");
    vec![
        Outcome {
            id: 5,
            name: "scaling, fast join growth",
            pass: fast_ok && fast_enough,
            detail: format!("dominating set counting, k=8..12, mults {fast:?}, growth [{}] <= {FAST_GROWTH_MAX}, {time}", fmt(&fg)),
            known_unattainable: false,
        },
        Outcome {
            id: 5,
            name: "scaling, naive join growth",
            pass: naive_ok,
            detail: format!(
                "mults {naive:?}, growth [{}] against >= {NAIVE_GROWTH_MIN}; five compatible label pairs per bag vertex",
                fmt(&ng)
            ),
            known_unattainable: true,
        },
        Outcome {
            id: 5,
            name: "scaling, fast/naive ratio",
            pass: decreasing,
            detail: format!("ratios [{}] strictly decreasing", ratios.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>().join(", ")),
            known_unattainable: false,
        },
    ]
}

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn criterion_named_values() -> Outcome {
    let cases = [
        ("dominating_set", "min", "c5.gr", "2"),
        ("dominating_set", "count", "p3.gr", "5"),
        ("perfect_code", "existence", "c6.gr", "true"),
        ("perfect_code", "existence", "c7.gr", "false"),
        ("total_dominating_set", "min", "c4.gr", "2"),
        ("dominating_set", "min", "petersen.gr", "3"),
    ];
    let mut bad = Vec::new();
    for (problem, variant, graph, expect) in cases {
        for join in ["naive", "fast", "auto"] {
            let out = Command::new(env!("CARGO_BIN_EXE_sigmarho"))
                .args(["solve", "--problem", problem, "--variant", variant, "--graph", &data(graph), "--join", join])
                .output()
                .unwrap();
            let first = String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or_default().to_string();
            if !out.status.success() || first != expect {
                bad.push(format!("{problem} {variant} {graph} {join}: {first}"));
            }
        }
    }
    Outcome {
        id: 6,
        name: "named values",
        pass: bad.is_empty(),
        detail: format!("gamma(C5)=2, #DS(P3)=5, perfect code on C6 yes and C7 no, gamma_t(C4)=2, gamma(Petersen)=3 via the binary with naive, fast and auto joins; {} failures", bad.len()),
        known_unattainable: false,
    }
}

type Check<V> = fn(&MemoTable<V>, &MemoTable<V>, &MemoTable<V>, &MemoTable<V>) -> bool;

fn min_size<V>(t: &MemoTable<V>, size: impl Fn(&V) -> Option<u32>) -> Option<u32> {
    t.values.iter().filter_map(size).min()
}

/// Windowed value `w` must equal unwindowed `u` whenever `u`'s size is within the bound, and
/// must never claim a smaller size than `u` otherwise.
fn window_agrees<V: PartialEq + Copy>(
    l: &MemoTable<V>,
    r: &MemoTable<V>,
    u: &MemoTable<V>,
    w: &MemoTable<V>,
    size: impl Fn(&V) -> Option<u32>,
) -> bool {
    let (Some(xl), Some(xr)) = (min_size(l, &size), min_size(r, &size)) else {
        return u.values == w.values;
    };
    let bound = xl + xr + l.k() as u32;
    u.values.iter().zip(&w.values).all(|(a, b)| match (size(a), size(b)) {
        (Some(sa), _) if sa <= bound => a == b,
        (Some(sa), Some(sb)) => sb >= sa,
        (Some(_), None) => true,
        (None, sb) => sb.is_none(),
    })
}

fn window_run<A: JoinAlgebra>(
    alg: &A,
    ctx: &FastContext,
    spec: &SigmaRhoSpec,
    nice: &NiceTreeDecomposition,
    check: Check<A::Value>,
    joins: &mut usize,
    bad: &mut usize,
) {
    let mut strategies = vec![JoinStrategy::FastGeneral];
    if spec.has_dominating_shape() {
        strategies.push(JoinStrategy::FastDominating);
    }
    run_dp(alg, spec, nice, |l, r| {
        let u = fast_join_general(alg, ctx, spec, l, r, None)?;
        for &s in &strategies {
            let w = match s {
                JoinStrategy::FastDominating => fast_join_dominating(alg, ctx, spec, l, r, Some(l.k()))?,
                _ => fast_join_general(alg, ctx, spec, l, r, Some(l.k()))?,
            };
            *joins += 1;
            if !check(l, r, &u, &w) {
                *bad += 1;
            }
        }
        Ok(u)
    })
    .unwrap();
}

fn criterion_window(graphs: &[Graph], nices: &[NiceTreeDecomposition]) -> Outcome {
    let start = Instant::now();
    let mut joins = 0;
    let mut bad = 0;
    let mut answers_bad = 0;
    for preset in [Preset::DominatingSet, Preset::TotalDominatingSet] {
        let spec = preset.spec();
        for (g, nice) in graphs.iter().zip(nices) {
            let ctx = FastContext::new(&spec, g.n(), nice.max_join_bag(), count_prime_budget(g.n())).unwrap();
            let field = ctx.counts[0].clone();
            window_run(
                &Optimum { maximise: false },
                &ctx,
                &spec,
                nice,
                |l, r, u, w| window_agrees(l, r, u, w, |v| *v),
                &mut joins,
                &mut bad,
            );
            window_run(
                &CountOptimum { field, maximise: false },
                &ctx,
                &spec,
                nice,
                |l, r, u, w| window_agrees(l, r, u, w, |v| if v.1 == 0 { None } else { v.0 }),
                &mut joins,
                &mut bad,
            );
            for variant in [Variant::Minimise, Variant::CountMinimise] {
                let mut strategies = vec![JoinStrategy::FastGeneral];
                if spec.has_dominating_shape() {
                    strategies.push(JoinStrategy::FastDominating);
                }
                for strategy in strategies {
                    let on = solve(g, nice, &spec, variant, SolveOptions { strategy, replacement: true }).unwrap();
                    let off = solve(g, nice, &spec, variant, SolveOptions { strategy, replacement: false }).unwrap();
                    if on.answer != off.answer {
                        answers_bad += 1;
                    }
                }
            }
        }
    }
    Outcome {
        id: 7,
        name: "replacement window",
        pass: bad == 0 && answers_bad == 0,
        detail: format!(
            "{joins} windowed joins of DP tables (dominating and total dominating set, min and count-min), {bad} disagreements within the window bound; {answers_bad} final answers differ; {}",
            secs(start.elapsed())
        ),
        known_unattainable: false,
    }
}

fn main() {
    let build = Instant::now();
    let graphs = oracle_graphs();
    let nices: Vec<NiceTreeDecomposition> = graphs.iter().map(|g| nice_decomposition(g, None).unwrap()).collect();
    println!("generated {} graphs in {}", graphs.len(), secs(build.elapsed()));

    let mut outcomes = Vec::new();
    report(&mut outcomes, criterion_oracle(&graphs, &nices));
    report(&mut outcomes, criterion_joins());
    report(&mut outcomes, criterion_transforms());
    report(&mut outcomes, criterion_primes());
    for o in criterion_scaling() {
        report(&mut outcomes, o);
    }
    report(&mut outcomes, criterion_named_values());
    report(&mut outcomes, criterion_window(&graphs, &nices));

    let unexpected: Vec<&Outcome> = outcomes.iter().filter(|o| !o.pass && !o.known_unattainable).collect();
    let known: Vec<&Outcome> = outcomes.iter().filter(|o| !o.pass && o.known_unattainable).collect();
    for o in &known {
        println!("known unattainable: criterion {} ({})", o.id, o.name);
    }
    let fixed: Vec<&Outcome> = outcomes.iter().filter(|o| o.pass && o.known_unattainable).collect();
    for o in &fixed {
        println!("note: criterion {} ({}) now passes", o.id, o.name);
    }
    println!(
        "{} of {} checks pass, {} known unattainable, {} unexpected failures",
        outcomes.iter().filter(|o| o.pass).count(),
        outcomes.len(),
        known.len(),
        unexpected.len()
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
