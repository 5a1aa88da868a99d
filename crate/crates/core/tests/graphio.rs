mod common;

use sigmarho::graph::{
    make_nice, min_fill_heuristic, parse_graph, parse_td, validate_nice, validate_td, NiceKind,
    TreeDecomposition,
};
use sigmarho::Error;

const PATH_GR: &str = "c a path\np tw 3 2\n1 2\n2 3\n";
const PATH_TD: &str = "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n";

#[test]
fn parses_graph_and_decomposition() {
    let g = parse_graph(PATH_GR).unwrap();
    assert_eq!(g.n(), 3);
    assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
    let td = parse_td(PATH_TD).unwrap();
    assert_eq!(td.bags, vec![vec![0, 1], vec![1, 2]]);
    assert_eq!(td.width(), 1);
    validate_td(&g, &td).unwrap();
}

#[test]
fn pace_roundtrip() {
    let mut rng = common::rng(3);
    let g = common::random_graph(&mut rng, 9, 0.4);
    assert_eq!(parse_graph(&g.to_pace()).unwrap(), g);
    let td = min_fill_heuristic(&g);
    assert_eq!(parse_td(&td.to_pace(g.n())).unwrap().bags, td.bags);
}

fn parse_line(text: &str) -> usize {
    match parse_graph(text) {
        Err(Error::Parse { line, .. }) => line,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn graph_errors_carry_line_numbers() {
    assert_eq!(parse_line("p tw 2 1\n1 3\n"), 2);
    assert_eq!(parse_line("p tw 2 1\n1 1\n"), 2);
    assert_eq!(parse_line("p tw 3 2\n1 2\n2 1\n"), 3);
    assert_eq!(parse_line("c x\np tw 3 2\n1 2\n"), 2);
    assert_eq!(parse_line("p td 3 2\n"), 1);
    assert_eq!(parse_line("p tw 3 1\n1 x\n"), 2);
    assert!(parse_graph("").is_err());
}

#[test]
fn td_errors() {
    assert!(parse_td("s td 2 2 3\nb 1 1 2\n1 2\n").is_err());
    assert!(parse_td("s td 1 1 3\nb 1 1 2\n").is_err());
    assert!(parse_td("s td 1 2 3\nb 1 1 4\n").is_err());
    assert!(parse_td("s td 1 2 3\nb 2 1 2\n").is_err());
}

#[test]
fn validation_catches_each_violation() {
    let g = parse_graph(PATH_GR).unwrap();
    let td = |bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>| TreeDecomposition { bags, edges };
    let uncovered_edge = td(vec![vec![0, 1], vec![2]], vec![(0, 1)]);
    let missing_vertex = td(vec![vec![0, 1]], vec![]);
    let broken_subtree = td(vec![vec![0, 1], vec![2], vec![1, 2]], vec![(0, 1), (1, 2)]);
    let not_tree = td(vec![vec![0, 1], vec![1, 2]], vec![]);
    let cycle = td(vec![vec![0, 1], vec![1, 2], vec![1]], vec![(0, 1), (1, 2), (2, 0)]);
    for bad in [uncovered_edge, missing_vertex, broken_subtree, not_tree, cycle] {
        assert!(matches!(validate_td(&g, &bad), Err(Error::InvalidTd(_))), "{bad:?}");
    }
}

#[test]
fn nice_decompositions_keep_width_and_assign_edges_once() {
    let mut rng = common::rng(5);
    for trial in 0..200 {
        let n = trial % 14;
        let g = common::random_graph(&mut rng, n, 0.25);
        let td = min_fill_heuristic(&g);
        validate_td(&g, &td).unwrap();
        let nice = make_nice(&g, &td).unwrap();
        validate_nice(&g, &nice).unwrap();
        assert_eq!(nice.width(), td.width());
        assert!(nice.nodes.iter().all(|x| x.children.len() <= 2));
        let forgets = nice.nodes.iter().filter(|x| matches!(x.kind, NiceKind::Forget { .. })).count();
        assert_eq!(forgets, n);
    }
}

#[test]
fn high_degree_tree_node_becomes_join_chain() {
    let g = parse_graph("p tw 5 4\n1 2\n1 3\n1 4\n1 5\n").unwrap();
    let td = parse_td("s td 5 2 5\nb 1 1\nb 2 1 2\nb 3 1 3\nb 4 1 4\nb 5 1 5\n1 2\n1 3\n1 4\n1 5\n").unwrap();
    let nice = make_nice(&g, &td).unwrap();
    validate_nice(&g, &nice).unwrap();
    let joins = nice.nodes.iter().filter(|x| x.kind == NiceKind::Join).count();
    assert_eq!(joins, 3);
}
