// Copyright 2026 The clique-geom Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::collections::BTreeSet;

use proptest::prelude::*;

use clique_geom::log_hull::new_convex_hull;
use clique_geom::oracles::{general_position_check, hull_oracle, triangulation_validator};
use clique_geom::quick_hull::quick_convex_hull;
use clique_geom::triangulation::triangulate_set;
use clique_geom::{EngineConfig, Point};

fn point_set(n: usize, span: i64) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::btree_set((0..span, 0..span), n * n)
        .prop_map(|set: BTreeSet<(i64, i64)>| set.into_iter().map(Point::from).collect::<Vec<_>>())
        .prop_shuffle()
}

fn batches(points: &[Point], n: usize) -> Vec<Vec<Point>> {
    points.chunks(n).map(<[Point]>::to_vec).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hulls_match_the_oracle((n, pts) in (1usize..6).prop_flat_map(|n| (Just(n), point_set(n, 24)))) {
        let expected = hull_oracle(&pts).unwrap();
        let quick = quick_convex_hull(EngineConfig::new(n), batches(&pts, n)).unwrap();
        let log = new_convex_hull(EngineConfig::new(n), batches(&pts, n)).unwrap();
        prop_assert_eq!(quick.output.vertices(), expected.clone());
        prop_assert_eq!(log.output.vertices(), expected);
        prop_assert!(quick.metrics.is_compliant(n));
        prop_assert!(log.metrics.is_compliant(n));
    }

    #[test]
    fn triangulations_are_valid(pts in point_set(4, 1 << 10)) {
        prop_assume!(general_position_check(&pts).ok);
        let run = triangulate_set(EngineConfig::new(4).with_coord_bits(12), batches(&pts, 4)).unwrap();
        let hull = hull_oracle(&pts).unwrap();
        let report = triangulation_validator(&pts, &run.triangles(), &hull);
        prop_assert!(report.passed, "{:?}", report.failures);
    }

    #[test]
    fn two_node_triangulations_are_valid(pts in point_set(2, 64)) {
        prop_assume!(general_position_check(&pts).ok);
        let run = triangulate_set(EngineConfig::new(2), batches(&pts, 2)).unwrap();
        let hull = hull_oracle(&pts).unwrap();
        prop_assert_eq!(run.triangles().len(), 2 * 4 - hull.len() - 2);
        prop_assert!(triangulation_validator(&pts, &run.triangles(), &hull).passed);
    }
}
