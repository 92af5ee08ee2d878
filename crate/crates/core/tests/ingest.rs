use std::collections::HashSet;
use std::io::Cursor;

use backbone_lab::ingest::{
    ingest_bipartite, parse_bipartite, parse_weighted, read_weighted, write_bipartite, write_weighted, IngestOptions,
    IngestStats,
};
use backbone_lab::projection::project_hyperbolic;
use backbone_lab::{generate_synthetic, Error, Side, SyntheticParams};

const SAMPLE: &str = "# user\tdomain\tcount
alice\tnews.example\t3
alice\tblog.example
bob\tnews.example\t1

bob\tnews.example\t2
carol\tspam.example\t9
";

#[test]
fn bipartite_round_trip_keeps_graph() {
    let (g, rows) = parse_bipartite(Cursor::new(SAMPLE), &IngestOptions::default()).unwrap();
    assert_eq!(rows, 5);
    let stats = IngestStats::of(&g, rows);
    assert_eq!((stats.left_nodes, stats.right_nodes, stats.edges, stats.observations), (3, 3, 4, 16));
    assert_eq!(g.multiplicity(g.index_of(Side::Left, "bob").unwrap(), g.index_of(Side::Right, "news.example").unwrap()), Some(3));

    let mut out = Vec::new();
    write_bipartite(&g, &mut out, ',').unwrap();
    let options = IngestOptions { delimiter: ',', ..Default::default() };
    let (again, _) = parse_bipartite(Cursor::new(out), &options).unwrap();
    assert_eq!(again, g);
}

#[test]
fn blacklist_and_multiplicity_filters() {
    let options = IngestOptions {
        blacklist: HashSet::from(["spam.example".to_string()]),
        min_multiplicity: 2,
        ..Default::default()
    };
    let (g, rows) = parse_bipartite(Cursor::new(SAMPLE), &options).unwrap();
    // blacklisted rows are still read
    assert_eq!(rows, 5);
    assert_eq!(g.ids(Side::Right), ["news.example"]);
    assert_eq!(g.ids(Side::Left), ["alice", "bob"]);
}

#[test]
fn malformed_rows_name_their_line() {
    let bad = "a\tb\n\nc\n";
    match parse_bipartite(Cursor::new(bad), &IngestOptions::default()) {
        Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let bad = "a\tb\tzero\n";
    assert!(matches!(parse_bipartite(Cursor::new(bad), &IngestOptions::default()), Err(Error::MalformedRow { line: 1, .. })));
    assert!(matches!(parse_bipartite(Cursor::new("# nothing\n"), &IngestOptions::default()), Err(Error::EmptyGraph)));
    assert!(matches!(
        parse_bipartite(Cursor::new("a\tb\nb\tc\n"), &IngestOptions::default()),
        Err(Error::SideCollision(id)) if id == "b"
    ));
}

#[test]
fn weighted_round_trip_within_twelve_digits() {
    let g = generate_synthetic(&SyntheticParams { n_left: 40, n_right: 90, seed: 2, ..Default::default() }).unwrap();
    let w = project_hyperbolic(&g, Side::Right);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.tsv");
    let mut out = Vec::new();
    write_weighted(&w, &mut out).unwrap();
    std::fs::write(&path, &out).unwrap();
    let back = read_weighted(&path).unwrap();
    // isolated nodes are not in the file, so compare by label
    assert_eq!(back.edge_count(), w.edge_count());
    for e in w.edges() {
        let (a, b) = (&w.labels()[e.a as usize], &w.labels()[e.b as usize]);
        let ia = back.labels().iter().position(|l| l == a).unwrap() as u32;
        let ib = back.labels().iter().position(|l| l == b).unwrap() as u32;
        let x = back.weight(ia, ib).unwrap();
        assert!((x - e.weight).abs() <= 1e-11 * e.weight);
    }
    // a second write of the re-read graph is byte-identical
    let mut again = Vec::new();
    write_weighted(&back, &mut again).unwrap();
    assert_eq!(again, out);
}

#[test]
fn weighted_parse_rejects_bad_rows() {
    assert!(matches!(parse_weighted(Cursor::new("a\tb\n")), Err(Error::MalformedRow { line: 1, .. })));
    assert!(matches!(parse_weighted(Cursor::new("a\tb\t1\na\ta\t1\n")), Err(Error::MalformedRow { line: 2, .. })));
    assert!(matches!(parse_weighted(Cursor::new("a\tb\t-1\n")), Err(Error::MalformedRow { .. })));
    assert!(matches!(parse_weighted(Cursor::new("a\tb\t1\nb\ta\t2\n")), Err(Error::InvalidEdge { .. })));
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(ingest_bipartite("/nonexistent/edges.tsv", &IngestOptions::default()), Err(Error::Io(_))));
}
