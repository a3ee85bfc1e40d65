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

//! Parallel and sequential execution must be indistinguishable.

use clique_geom::generate::{generate, Generator};
use clique_geom::log_hull::new_convex_hull;
use clique_geom::quick_hull::quick_convex_hull;
use clique_geom::triangulation::triangulate_set;
use clique_geom::{EngineConfig, ExecMode};

fn config(n: usize, bits: u32, exec: ExecMode) -> EngineConfig {
    EngineConfig::new(n)
        .with_coord_bits(bits)
        .with_exec(exec)
        .with_trace(true)
}

#[test]
fn hulls_agree_across_modes() {
    let set = generate(&Generator::Uniform, 8, 3, false).unwrap();
    for exec in [ExecMode::Parallel, ExecMode::Sequential] {
        let a = quick_convex_hull(
            config(8, set.coord_bits, ExecMode::Parallel),
            set.batches.clone(),
        )
        .unwrap();
        let b = quick_convex_hull(config(8, set.coord_bits, exec), set.batches.clone()).unwrap();
        assert_eq!(
            (a.output, a.metrics, a.trace),
            (b.output, b.metrics, b.trace)
        );
        let a = new_convex_hull(
            config(8, set.coord_bits, ExecMode::Parallel),
            set.batches.clone(),
        )
        .unwrap();
        let b = new_convex_hull(config(8, set.coord_bits, exec), set.batches.clone()).unwrap();
        assert_eq!(
            (a.output, a.metrics, a.trace),
            (b.output, b.metrics, b.trace)
        );
    }
}

#[test]
fn triangulations_agree_across_modes() {
    let set = generate(&Generator::GridJitter, 8, 4, true).unwrap();
    let a = triangulate_set(
        config(8, set.coord_bits, ExecMode::Parallel),
        set.batches.clone(),
    )
    .unwrap();
    let b = triangulate_set(config(8, set.coord_bits, ExecMode::Sequential), set.batches).unwrap();
    assert_eq!(a.batches, b.batches);
    assert_eq!(a.metrics, b.metrics);
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.phases, b.phases);
}
