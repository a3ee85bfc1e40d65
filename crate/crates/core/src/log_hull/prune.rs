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

//! Deciding which local hull vertices survive, from bridges alone.
//!
//! A vertex `v` of node `l`'s chain is on the global upper hull iff
//!
//! 1. it is not strictly inside the span of any bridge incident to the
//!    chain: left of the endpoint of a bridge to a later node, or right of
//!    the endpoint of a bridge from an earlier node; and
//! 2. there are no bridges from an earlier node `s` and to a later node `t`
//!    that both end at `v` and do not turn strictly clockwise there.
//!
//! Collinear bridges in (2) disqualify `v` because hulls are strict.

use crate::geometry::{orientation, Orientation, Point};

/// A bridge between this node's chain and a peer's, seen from this node.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct IncidentBridge {
    /// The peer's position in x-order.
    pub peer_rank: usize,
    /// Index of the bridge endpoint on this node's chain.
    pub own_index: usize,
    /// The endpoint on the peer's chain.
    pub partner: Point,
}

/// Survival flag for every vertex of `chain`, the upper chain of the node at
/// position `rank` in x-order.
pub fn prune_by_bridges(chain: &[Point], rank: usize, bridges: &[IncidentBridge]) -> Vec<bool> {
    if chain.is_empty() {
        return Vec::new();
    }
    let earlier = || bridges.iter().filter(|b| b.peer_rank < rank);
    let later = || bridges.iter().filter(|b| b.peer_rank > rank);
    let lo = earlier().map(|b| b.own_index).max().unwrap_or(0);
    let hi = later()
        .map(|b| b.own_index)
        .min()
        .unwrap_or(chain.len() - 1);
    let mut keep: Vec<bool> = (0..chain.len()).map(|k| lo <= k && k <= hi).collect();

    // a vertex touched from both sides can only be the single index lo == hi
    if lo == hi {
        let v = chain[lo];
        let reflex = earlier().filter(|s| s.own_index == lo).any(|s| {
            later()
                .filter(|t| t.own_index == lo)
                .any(|t| orientation(s.partner, v, t.partner) != Orientation::Right)
        });
        if reflex {
            keep[lo] = false;
        }
    }
    keep
}

/// The surviving vertices themselves.
pub fn survivors(chain: &[Point], rank: usize, bridges: &[IncidentBridge]) -> Vec<Point> {
    chain
        .iter()
        .zip(prune_by_bridges(chain, rank, bridges))
        .filter_map(|(&p, keep)| keep.then_some(p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn vertices_under_a_bridge_go() {
        // chain of node 1; bridge to node 2 leaves from index 1
        let chain = [p(0, 0), p(2, 4), p(4, 3)];
        let b = IncidentBridge {
            peer_rank: 2,
            own_index: 1,
            partner: p(9, 9),
        };
        assert_eq!(prune_by_bridges(&chain, 1, &[b]), vec![true, true, false]);
    }

    #[test]
    fn convex_angle_between_bridges_disqualifies() {
        // v = (5, 1) is met from (0, 5) and left towards (10, 5): a dip
        let chain = [p(5, 1)];
        let s = IncidentBridge {
            peer_rank: 1,
            own_index: 0,
            partner: p(0, 5),
        };
        let t = IncidentBridge {
            peer_rank: 3,
            own_index: 0,
            partner: p(10, 5),
        };
        assert_eq!(prune_by_bridges(&chain, 2, &[s, t]), vec![false]);
        let peak = [p(5, 9)];
        assert_eq!(prune_by_bridges(&peak, 2, &[s, t]), vec![true]);
        let flat = [p(5, 5)];
        assert_eq!(prune_by_bridges(&flat, 2, &[s, t]), vec![false]);
    }

    #[test]
    fn lone_node_keeps_everything() {
        let chain = [p(0, 0), p(1, 1), p(2, 0)];
        assert_eq!(survivors(&chain, 1, &[]), chain.to_vec());
    }
}
