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

//! Triangulation of the whole point set in `O(log² n)` rounds.
//!
//! After the global sort every node triangulates its own batch. Then
//! `log n` phases each merge pairs of neighbouring groups: the group's hull
//! is found from pairwise bridges, the corridor between the two halves'
//! hulls is packed onto the group's nodes, and the corridor is cut in half
//! by a diagonal at the median of its longer chain, recursively, with all
//! corridors of the phase advancing in lockstep. See [`merge`].

mod local;
pub mod merge;
pub mod polygon;

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

pub use local::local_triangulation;
pub use merge::{triangulate_set, PhaseStats, TriangulationRun};
pub use polygon::{inside_wedge, mate_valid, MergePolygon, Shape};

use crate::geometry::{cross, orientation, Orientation, Point};

/// A triangle with counterclockwise vertices.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

impl Triangle {
    /// Orders the corners counterclockwise; `None` when they are collinear.
    pub fn ccw(a: Point, b: Point, c: Point) -> Option<Triangle> {
        match orientation(a, b, c) {
            Orientation::Left => Some(Triangle { a, b, c }),
            Orientation::Right => Some(Triangle { a, b: c, c: b }),
            Orientation::Collinear => None,
        }
    }

    pub fn vertices(&self) -> [Point; 3] {
        [self.a, self.b, self.c]
    }

    /// Twice the area, always positive.
    pub fn doubled_area(&self) -> i128 {
        cross(self.a, self.b, self.c)
    }
}

/// Groups merged by one phase: phase `i` joins node ranges of size `2^i`
/// pairwise into ranges of size `2^(i+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePlan {
    pub phase: u32,
    pub n: usize,
}

impl PhasePlan {
    pub fn new(phase: u32, n: usize) -> Self {
        PhasePlan { phase, n }
    }

    pub fn group_size(&self) -> usize {
        2 << self.phase
    }

    /// Node range of the group containing node index `v`.
    pub fn group_of(&self, v: usize) -> RangeInclusive<usize> {
        let g = self.group_size();
        let start = (v - 1) / g * g + 1;
        start..=start + g - 1
    }

    pub fn groups(&self) -> Vec<RangeInclusive<usize>> {
        (1..=self.n)
            .step_by(self.group_size())
            .map(|v| self.group_of(v))
            .collect()
    }

    /// True when node `v` belongs to the left half of its group.
    pub fn in_left_half(&self, v: usize) -> bool {
        (v - 1) % self.group_size() < self.group_size() / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ccw_orders_corners() {
        let t = Triangle::ccw(Point::new(0, 0), Point::new(0, 1), Point::new(1, 0)).unwrap();
        assert_eq!(t.c, Point::new(0, 1));
        assert_eq!(t.doubled_area(), 1);
        assert!(Triangle::ccw(Point::new(0, 0), Point::new(1, 1), Point::new(2, 2)).is_none());
    }

    #[test]
    fn plans_partition_the_nodes() {
        let plan = PhasePlan::new(1, 8);
        assert_eq!(plan.groups(), vec![1..=4, 5..=8]);
        assert_eq!(plan.group_of(6), 5..=8);
        assert!(plan.in_left_half(6));
        assert!(!plan.in_left_half(4));
    }
}
