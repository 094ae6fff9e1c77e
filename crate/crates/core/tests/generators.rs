use blowup_core::generators::*;
use blowup_core::graph::io::*;
use blowup_core::regularity::list_low_degree_vertices;
use blowup_core::*;
use proptest::prelude::*;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn recipe(size: usize, d: &str, delta: &str, low: &str, seed: u64) -> HostRecipe {
    HostRecipe {
        size,
        d: q(d),
        delta: q(delta),
        low_degree_fraction: q(low),
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_hosts_meet_the_minimum_degree(size in 5usize..40, seed in any::<u64>(), low in 0u32..3) {
        let r = ClusterGraph::triangle();
        let rec = recipe(size, "0.6", "0.4", &format!("{low}/20"), seed);
        let host = random_host(&r, &rec).unwrap();
        let target = rec.degraded_degree();
        for (i, j) in r.edges() {
            for (a, b) in [(i, j), (j, i)] {
                for off in 0..size {
                    let deg = host.row(a, off, b).unwrap().count();
                    prop_assert!(deg >= target);
                    if off < rec.degraded_count() {
                        prop_assert_eq!(deg, target);
                    }
                }
            }
        }
        prop_assert_eq!(&random_host(&r, &rec).unwrap(), &host);
    }

    #[test]
    fn host_files_round_trip(size in 1usize..12, seed in any::<u64>()) {
        let r = ClusterGraph::cycle(4).unwrap();
        let host = random_host(&r, &recipe(size, "1/2", "1/4", "0", seed)).unwrap();
        let text = write_host(&host);
        let back = parse_host(&text).unwrap();
        prop_assert_eq!(&back, &host);
        prop_assert_eq!(write_host(&back), text);
    }

    #[test]
    fn random_patterns_respect_their_bounds(size in 2usize..30, max_degree in 1usize..5, seed in any::<u64>(), pad in any::<bool>()) {
        let r = ClusterGraph::complete(4).unwrap();
        let rec = RandomPatternRecipe {
            size,
            max_degree,
            fill_fraction: q("3/4"),
            target_edges: 4 * size,
            attempts: 50 * size,
            seed,
            pad,
        };
        let p = pattern_random_bounded(&r, &rec).unwrap();
        prop_assert!(p.graph().max_degree() <= max_degree);
        for (x, y) in p.graph().edges() {
            prop_assert!(r.has_edge(p.cluster_of(x), p.cluster_of(y)));
        }
        prop_assert_eq!(p.is_balanced(), pad || size * 3 / 4 == size);
        let text = write_pattern(&p);
        let back = parse_pattern(&text).unwrap();
        prop_assert_eq!(back.graph, p.graph().clone());
        prop_assert_eq!(back.assignment, p.assignment().to_vec());
    }
}

#[test]
fn degraded_vertices_are_listed() {
    let r = ClusterGraph::single_edge();
    let rec = recipe(40, "0.8", "0.25", "0.1", 9);
    let host = random_host(&r, &rec).unwrap();
    // Degraded vertices have degree exactly 10 = δN; everything else is far above.
    let low = list_low_degree_vertices(&host, 0, 1, &q("0.5")).unwrap();
    assert_eq!(low, vec![0, 1, 2, 3]);
    let low = list_low_degree_vertices(&host, 1, 0, &q("0.5")).unwrap();
    assert_eq!(low, vec![40, 41, 42, 43]);
    assert!(list_low_degree_vertices(&host, 0, 1, &q("0.25")).unwrap().is_empty());
}

#[test]
fn cycles_and_paths_follow_the_sequence() {
    let r = ClusterGraph::cycle(5).unwrap();
    let p = pattern_cycles(&r, 3, &[0, 1, 2, 3, 4]).unwrap();
    assert_eq!(p.graph().edge_count(), 15);
    assert!((0..15).all(|x| p.graph().degree(x) == 2));
    assert!(pattern_cycles(&r, 3, &[0, 2, 1, 3, 4]).is_err());
    let paths = pattern_paths(&r, 4, &[1, 2, 3, 4, 0]).unwrap();
    assert_eq!(paths.graph().edge_count(), 16);
    assert_eq!(paths.class_sizes(), vec![4; 5]);
}

#[test]
fn invalid_recipes_are_rejected() {
    let r = ClusterGraph::triangle();
    assert!(random_host(&r, &recipe(10, "0", "0", "0", 1)).is_err());
    assert!(random_host(&r, &recipe(10, "0.5", "0.6", "0", 1)).is_err());
    assert!(random_host(&r, &recipe(10, "0.5", "0.4", "1", 1)).is_err());
    assert!(random_host(&r, &recipe(0, "0.5", "0.4", "0", 1)).is_err());
}

#[test]
fn malformed_files_report_the_line() {
    let err = parse_host("host 2 3\ne 0 3\ne 0 9\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }));
    let err = parse_map("map 0 1\nmap 0 2\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }));
    assert_eq!(parse_map("# comment\nmap 1 4\nmap 0 2\n").unwrap(), vec![(1, 4), (0, 2)]);
}
