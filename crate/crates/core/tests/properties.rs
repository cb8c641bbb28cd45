use proptest::prelude::*;
use tsrealize::mip::{build_subrealization_mip, check_assignment, read_lp, write_lp};
use tsrealize::splits::{induced_metric, is_two_compatible, l1_decompose, l1_two_trees, PointSet2D};
use tsrealize::tightspan::{adjacent_vertices, in_tight_span, is_vertex};
use tsrealize::{io, linf_dist, rat, realize, verify_realization, FiniteMetric};

/// Shortest-path closure of a random positive symmetric matrix.
fn metric_strategy(max_n: usize) -> impl Strategy<Value = FiniteMetric> {
    (3..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(1i64..=20, n * n).prop_map(move |raw| {
            let mut m = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        m[i][j] = raw[i.min(j) * n + i.max(j)];
                    }
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        m[i][j] = m[i][j].min(m[i][k] + m[k][j]);
                    }
                }
            }
            let rows = m.into_iter().map(|r| r.into_iter().map(rat).collect()).collect();
            FiniteMetric::with_default_labels(rows).unwrap()
        })
    })
}

fn points_strategy() -> impl Strategy<Value = PointSet2D> {
    proptest::collection::btree_set((0i64..12, 0i64..12), 2..=6)
        .prop_map(|s| PointSet2D::from_integers(&s.into_iter().collect::<Vec<_>>()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kuratowski_points_embed_isometrically(d in metric_strategy(6)) {
        for x in 0..d.len() {
            let kx = d.kuratowski(x);
            prop_assert!(in_tight_span(&d, &kx));
            prop_assert!(is_vertex(&d, &kx).unwrap());
            for y in 0..d.len() {
                prop_assert_eq!(&linf_dist(&kx, &d.kuratowski(y)).unwrap(), d.dist(x, y));
            }
        }
    }

    #[test]
    fn realization_is_exact_and_inside_the_skeleton(d in metric_strategy(6)) {
        let g = realize(&d).unwrap();
        prop_assert!(verify_realization(&g, &d).unwrap().passed());
        for v in g.vertices() {
            prop_assert!(is_vertex(&d, v).unwrap());
            prop_assert!(in_tight_span(&d, v));
        }
        for e in g.edges() {
            prop_assert_eq!(&e.weight, &linf_dist(g.vertex(e.u), g.vertex(e.v)).unwrap());
            let next: Vec<_> = adjacent_vertices(&d, g.vertex(e.u)).unwrap().into_iter().map(|a| a.point).collect();
            prop_assert!(next.contains(g.vertex(e.v)));
        }
        let again = realize(&d).unwrap();
        prop_assert_eq!(again.edges(), g.edges());
    }

    #[test]
    fn adjacency_is_symmetric(d in metric_strategy(5)) {
        let g = realize(&d).unwrap();
        for v in g.vertices() {
            for a in adjacent_vertices(&d, v).unwrap() {
                let back: Vec<_> = adjacent_vertices(&d, &a.point).unwrap().into_iter().map(|b| b.point).collect();
                prop_assert!(back.contains(v));
                prop_assert_eq!(&a.length, &linf_dist(v, &a.point).unwrap());
            }
        }
    }

    #[test]
    fn l1_metrics_split_into_two_trees(p in points_strategy()) {
        let d = p.l1_metric().unwrap();
        let system = l1_decompose(&p);
        prop_assert!(is_two_compatible(&system));
        prop_assert_eq!(&induced_metric(&system).unwrap(), &d);
        let (v, h) = l1_two_trees(&p);
        let (mv, mh) = (v.induced_matrix(), h.induced_matrix());
        for i in 0..p.len() {
            for j in 0..p.len() {
                prop_assert_eq!(&(&mv[i][j] + &mh[i][j]), d.dist(i, j));
            }
        }
    }

    #[test]
    fn subsystems_of_two_compatible_systems_stay_two_compatible(p in points_strategy(), drop in any::<u64>()) {
        let mut system = l1_decompose(&p);
        for (k, s) in system.splits().into_iter().enumerate() {
            if drop >> (k % 64) & 1 == 1 {
                system.remove(&s);
            }
            prop_assert!(is_two_compatible(&system));
        }
    }

    #[test]
    fn whole_graph_satisfies_its_mip(d in metric_strategy(5), reduce in any::<bool>()) {
        let g = realize(&d).unwrap();
        let built = build_subrealization_mip(&g, &d, reduce).unwrap();
        let all = built.assignment_for_edges(&g, &vec![true; g.edge_count()]);
        let direct = check_assignment(&built.model, &all).unwrap();
        prop_assert!(direct.feasible(), "{:?}", direct.violations);
        prop_assert_eq!(&direct.objective, &g.total_length());
        let parsed = read_lp(&write_lp(&built.model)).unwrap();
        prop_assert_eq!(check_assignment(&parsed, &all).unwrap(), direct);
    }

    #[test]
    fn text_formats_reload(d in metric_strategy(6)) {
        prop_assert_eq!(&io::read_metric(&io::write_metric(&d)).unwrap(), &d);
        let g = realize(&d).unwrap();
        let back = io::graph_from_json(&io::graph_to_json(&g)).unwrap();
        prop_assert!(verify_realization(&back, &d).unwrap().passed());
        let (a, b) = (back.edges(), g.edges());
        prop_assert_eq!(a, b);
    }
}
