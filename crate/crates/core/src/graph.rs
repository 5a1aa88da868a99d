use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Simple undirected graph on vertices 0..n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { n, adj: vec![BTreeSet::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::Shape(format!("edge {u}-{v} outside 0..{}", self.n)));
        }
        if u == v {
            return Err(Error::Shape(format!("self-loop at {u}")));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.adj[u].range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    pub fn to_pace(&self) -> String {
        let mut out = format!("p tw {} {}\n", self.n, self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{} {}", u + 1, v + 1);
        }
        out
    }
}

/// Tree decomposition with bags indexed 0..bags.len() and tree edges between bag indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn to_pace(&self, n: usize) -> String {
        let mut out = format!("s td {} {} {}\n", self.bags.len(), self.width() + 1, n);
        for (i, bag) in self.bags.iter().enumerate() {
            let _ = write!(out, "b {}", i + 1);
            for v in bag {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce { v: usize },
    /// Forget `v`; `edges` lists the bag vertices adjacent to `v`, whose edges to `v` are
    /// accounted for at this node.
    Forget { v: usize, edges: Vec<usize> },
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted bag.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Rooted nice tree decomposition. Nodes are stored so that children precede parents; the
/// last node is the root and has an empty bag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn max_join_bag(&self) -> usize {
        self.nodes
            .iter()
            .filter(|x| x.kind == NiceKind::Join)
            .map(|x| x.bag.len())
            .max()
            .unwrap_or(0)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.is_empty() || toks[0] == "c" {
            None
        } else {
            Some((i + 1, toks))
        }
    })
}

fn parse_num(line: usize, tok: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected a number, got '{tok}'")))
}

/// Parses the PACE `.gr` format (1-based vertex ids).
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "missing 'p tw' header"))?;
    if header.len() != 4 || header[0] != "p" || header[1] != "tw" {
        return Err(parse_err(hl, "expected header 'p tw <n> <m>'"));
    }
    let n = parse_num(hl, header[2])?;
    let m = parse_num(hl, header[3])?;
    let mut g = Graph::new(n);
    let mut count = 0;
    for (ln, toks) in lines {
        if toks.len() != 2 {
            return Err(parse_err(ln, "expected an edge 'u v'"));
        }
        let u = parse_num(ln, toks[0])?;
        let v = parse_num(ln, toks[1])?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(parse_err(ln, format!("vertex out of range 1..{n}")));
        }
        if u == v {
            return Err(parse_err(ln, format!("self-loop at vertex {u}")));
        }
        if g.has_edge(u - 1, v - 1) {
            return Err(parse_err(ln, format!("duplicate edge {u} {v}")));
        }
        g.add_edge(u - 1, v - 1)?;
        count += 1;
    }
    if count != m {
        return Err(parse_err(hl, format!("header announces {m} edges, found {count}")));
    }
    Ok(g)
}

/// Parses the PACE `.td` format (1-based bag and vertex ids).
pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "missing 's td' header"))?;
    if header.len() != 5 || header[0] != "s" || header[1] != "td" {
        return Err(parse_err(hl, "expected header 's td <bags> <width+1> <n>'"));
    }
    let nb = parse_num(hl, header[2])?;
    let declared = parse_num(hl, header[3])?;
    let n = parse_num(hl, header[4])?;
    let mut bags: Vec<Option<Vec<usize>>> = vec![None; nb];
    let mut edges = Vec::new();
    for (ln, toks) in lines {
        if toks[0] == "b" {
            if toks.len() < 2 {
                return Err(parse_err(ln, "bag line needs an id"));
            }
            let id = parse_num(ln, toks[1])?;
            if id == 0 || id > nb {
                return Err(parse_err(ln, format!("bag id out of range 1..{nb}")));
            }
            if bags[id - 1].is_some() {
                return Err(parse_err(ln, format!("bag {id} defined twice")));
            }
            let mut bag = Vec::new();
            for t in &toks[2..] {
                let v = parse_num(ln, t)?;
                if v == 0 || v > n {
                    return Err(parse_err(ln, format!("vertex out of range 1..{n}")));
                }
                bag.push(v - 1);
            }
            bag.sort_unstable();
            bag.dedup();
            if bag.len() > declared {
                return Err(parse_err(ln, format!("bag {id} larger than declared {declared}")));
            }
            bags[id - 1] = Some(bag);
        } else {
            if toks.len() != 2 {
                return Err(parse_err(ln, "expected a tree edge 'i j'"));
            }
            let a = parse_num(ln, toks[0])?;
            let b = parse_num(ln, toks[1])?;
            if a == 0 || b == 0 || a > nb || b > nb {
                return Err(parse_err(ln, format!("tree edge endpoint out of range 1..{nb}")));
            }
            edges.push((a - 1, b - 1));
        }
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| parse_err(hl, format!("bag {} missing", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeDecomposition { bags, edges })
}

/// Checks the tree decomposition conditions: the bag graph is a tree, every vertex and edge
/// is covered, and the bags containing any vertex are connected.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> Result<()> {
    let nb = td.bags.len();
    if nb == 0 {
        return Err(Error::InvalidTd("no bags".into()));
    }
    for bag in &td.bags {
        if let Some(&v) = bag.iter().find(|&&v| v >= g.n()) {
            return Err(Error::InvalidTd(format!("vertex {v} not in graph")));
        }
    }
    if td.edges.len() != nb - 1 {
        return Err(Error::InvalidTd(format!("{} tree edges for {nb} bags", td.edges.len())));
    }
    let tree = adjacency(nb, &td.edges)?;
    if reachable(&tree, 0, |_| true).len() != nb {
        return Err(Error::InvalidTd("bag graph is not connected".into()));
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            holders[v].push(i);
        }
    }
    for (v, hs) in holders.iter().enumerate() {
        if hs.is_empty() {
            return Err(Error::InvalidTd(format!("vertex {} not covered", v + 1)));
        }
        let inside = |b: usize| td.bags[b].contains(&v);
        if reachable(&tree, hs[0], inside).len() != hs.len() {
            return Err(Error::InvalidTd(format!("bags of vertex {} not connected", v + 1)));
        }
    }
    for (u, v) in g.edges() {
        if !td.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return Err(Error::InvalidTd(format!("edge {} {} not covered", u + 1, v + 1)));
        }
    }
    Ok(())
}

fn adjacency(nb: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    let mut tree = vec![Vec::new(); nb];
    for &(a, b) in edges {
        if a >= nb || b >= nb || a == b {
            return Err(Error::InvalidTd(format!("bad tree edge {a}-{b}")));
        }
        tree[a].push(b);
        tree[b].push(a);
    }
    Ok(tree)
}

fn reachable(tree: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut seen = vec![false; tree.len()];
    let mut stack = vec![start];
    let mut out = Vec::new();
    seen[start] = true;
    while let Some(x) = stack.pop() {
        out.push(x);
        for &y in &tree[x] {
            if !seen[y] && allowed(y) {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    out
}

/// Converts a valid tree decomposition into a nice one of the same width, rooted at bag 0,
/// with every graph edge assigned to the forget node of the endpoint forgotten first.
pub fn make_nice(g: &Graph, td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    validate_td(g, td)?;
    let nb = td.bags.len();
    let tree = adjacency(nb, &td.edges)?;
    let mut parent = vec![usize::MAX; nb];
    let mut order = Vec::with_capacity(nb);
    let mut stack = vec![0];
    parent[0] = 0;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in tree[x].iter().rev() {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut children = vec![Vec::new(); nb];
    for &x in &order[1..] {
        children[parent[x]].push(x);
    }
    for c in &mut children {
        c.sort_unstable();
    }

    let mut b = Builder { g, nodes: Vec::new() };
    let mut top = vec![usize::MAX; nb];
    for &x in order.iter().rev() {
        let mut bag = td.bags[x].clone();
        bag.sort_unstable();
        let node = if children[x].is_empty() {
            let leaf = b.push(NiceKind::Leaf, Vec::new(), Vec::new());
            b.morph(leaf, &bag)
        } else {
            let mut acc: Option<usize> = None;
            for &c in &children[x] {
                let branch = b.morph(top[c], &bag);
                acc = Some(match acc {
                    None => branch,
                    Some(left) => b.push(NiceKind::Join, bag.clone(), vec![left, branch]),
                });
            }
            acc.unwrap()
        };
        top[x] = node;
    }
    let root = b.morph(top[0], &[]);
    debug_assert_eq!(root, b.nodes.len() - 1);
    Ok(NiceTreeDecomposition { nodes: b.nodes })
}

struct Builder<'a> {
    g: &'a Graph,
    nodes: Vec<NiceNode>,
}

impl Builder<'_> {
    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Forgets everything outside `target`, then introduces what is missing.
    fn morph(&mut self, mut node: usize, target: &[usize]) -> usize {
        let current = self.nodes[node].bag.clone();
        for &v in current.iter().filter(|v| !target.contains(v)) {
            let mut bag = self.nodes[node].bag.clone();
            bag.retain(|&x| x != v);
            let edges: Vec<usize> = bag.iter().copied().filter(|&u| self.g.has_edge(u, v)).collect();
            node = self.push(NiceKind::Forget { v, edges }, bag, vec![node]);
        }
        for &v in target.iter().filter(|v| !current.contains(v)) {
            let mut bag = self.nodes[node].bag.clone();
            let pos = bag.partition_point(|&x| x < v);
            bag.insert(pos, v);
            node = self.push(NiceKind::Introduce { v }, bag, vec![node]);
        }
        node
    }
}

/// Checks the structural invariants of a nice tree decomposition for `g`.
pub fn validate_nice(g: &Graph, nice: &NiceTreeDecomposition) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidTd(m));
    let mut seen_edges = BTreeSet::new();
    let mut forgotten = vec![0usize; g.n()];
    for (i, node) in nice.nodes.iter().enumerate() {
        if node.bag.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("node {i} has an unsorted bag"));
        }
        if node.children.iter().any(|&c| c >= i) {
            return bad(format!("node {i} has a child stored after it"));
        }
        let child_bag = |j: usize| &nice.nodes[node.children[j]].bag;
        match &node.kind {
            NiceKind::Leaf => {
                if !node.children.is_empty() || !node.bag.is_empty() {
                    return bad(format!("leaf {i} is not empty"));
                }
            }
            NiceKind::Introduce { v } => {
                let mut expect = child_bag(0).clone();
                if node.children.len() != 1 || expect.contains(v) {
                    return bad(format!("bad introduce node {i}"));
                }
                expect.push(*v);
                expect.sort_unstable();
                if expect != node.bag {
                    return bad(format!("bad introduce node {i}"));
                }
            }
            NiceKind::Forget { v, edges } => {
                let mut expect = node.bag.clone();
                expect.push(*v);
                expect.sort_unstable();
                if node.children.len() != 1 || node.bag.contains(v) || &expect != child_bag(0) {
                    return bad(format!("bad forget node {i}"));
                }
                forgotten[*v] += 1;
                for &u in edges {
                    if !g.has_edge(u, *v) || !seen_edges.insert((u.min(*v), u.max(*v))) {
                        return bad(format!("bad edge list at forget node {i}"));
                    }
                }
            }
            NiceKind::Join => {
                if node.children.len() != 2 || child_bag(0) != &node.bag || child_bag(1) != &node.bag {
                    return bad(format!("bad join node {i}"));
                }
            }
        }
    }
    if !nice.nodes.last().is_some_and(|r| r.bag.is_empty()) {
        return bad("root bag is not empty".into());
    }
    if forgotten.iter().any(|&c| c != 1) {
        return bad("some vertex is not forgotten exactly once".into());
    }
    if seen_edges.len() != g.m() {
        return bad("edge lists do not cover every edge".into());
    }
    Ok(())
}

/// Tree decomposition from a greedy elimination order that picks the vertex adding the
/// fewest fill edges (ties: smaller degree, then smaller id).
pub fn min_fill_heuristic(g: &Graph) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition { bags: vec![Vec::new()], edges: Vec::new() };
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut alive = vec![true; n];
    let mut position = vec![0; n];
    let mut bags = Vec::with_capacity(n);
    let mut elim = Vec::with_capacity(n);
    for step in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill_in(&adj, v), adj[v].len(), v))
            .unwrap();
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
            adj[a].remove(&v);
        }
        alive[v] = false;
        position[v] = step;
        let mut bag = nbrs.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        elim.push((v, nbrs));
    }
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, (_, nbrs)) in elim.iter().enumerate() {
        match nbrs.iter().map(|&u| position[u]).min() {
            Some(j) => edges.push((i, j)),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition { bags, edges }
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Builds a nice tree decomposition, using `td` if given and the min-fill heuristic otherwise.
pub fn nice_decomposition(g: &Graph, td: Option<&TreeDecomposition>) -> Result<NiceTreeDecomposition> {
    match td {
        Some(td) => make_nice(g, td),
        None => make_nice(g, &min_fill_heuristic(g)),
    }
}
