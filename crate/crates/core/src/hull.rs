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

//! Pieces shared by both hull algorithms: input checks, the global sort and
//! extreme-point exchange, the upper/lower split, and output compaction.
//!
//! Lower hulls are computed as upper hulls of the 180-degree rotated plane
//! (see [`HullSide`]); rotation reverses the x-order, so the node order is
//! reversed with it.

use serde::{Deserialize, Serialize};

use crate::comm::{all_gather_one, route, sort_points};
use crate::engine::{Clique, EngineConfig, NodeId, Payload, RunMetrics, TraceRecord};
use crate::error::{Error, Result};
use crate::geometry::{orientation, Orientation, Point};

pub(crate) const TAG_ENDS: u8 = 1;
pub(crate) const TAG_COUNTS: u8 = 2;
pub(crate) const TAG_PLACE: u8 = 3;

/// A convex hull, clockwise from the lexicographically smallest point,
/// split into batches of at most `n` vertices. Consecutive nodes hold
/// consecutive batches; every batch but the last is full and trailing nodes
/// may hold nothing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullOutput {
    pub batches: Vec<Vec<Point>>,
}

impl HullOutput {
    pub fn vertices(&self) -> Vec<Point> {
        self.batches.iter().flatten().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.batches.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Result of one distributed hull run.
#[derive(Clone, Debug)]
pub struct HullRun {
    pub output: HullOutput,
    pub metrics: RunMetrics,
    pub trace: Option<Vec<TraceRecord>>,
}

impl HullRun {
    pub(crate) fn finish<S: Send>(clique: Clique<S>, output: HullOutput) -> Self {
        let (_, metrics, trace) = clique.into_parts();
        HullRun {
            output,
            metrics,
            trace,
        }
    }
}

/// Per-node state common to both hull algorithms. `X` carries the
/// algorithm's own scratch data.
#[derive(Clone, Debug, Default)]
pub(crate) struct HullNode<X> {
    pub batch: Vec<Point>,
    pub pmin: Point,
    pub pmax: Point,
    /// Upper and lower subsequences, real coordinates, sorted.
    pub upper: Vec<Point>,
    pub lower: Vec<Point>,
    /// Vertices found to be on the upper and lower hull, real coordinates.
    pub upper_hull: Vec<Point>,
    pub lower_hull: Vec<Point>,
    counts: Vec<(u64, u64)>,
    out: Vec<(u64, Point)>,
    pub ext: X,
}

/// Which half of the hull a pass computes. Passes work in "view"
/// coordinates where the chain of interest is always an upper chain.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) enum HullSide {
    Upper,
    Lower,
}

impl HullSide {
    pub fn to_view(self, p: Point) -> Point {
        match self {
            HullSide::Upper => p,
            HullSide::Lower => p.rotated(),
        }
    }

    /// `to_view` is an involution.
    pub fn out_of_view(self, p: Point) -> Point {
        self.to_view(p)
    }

    /// Position of a node in the view's x-order, 1-based.
    pub fn rank(self, id: NodeId, n: usize) -> usize {
        match self {
            HullSide::Upper => id.index(),
            HullSide::Lower => n + 1 - id.index(),
        }
    }

    /// This node's subsequence in view coordinates, sorted.
    pub fn sequence<X>(self, s: &HullNode<X>) -> Vec<Point> {
        match self {
            HullSide::Upper => s.upper.clone(),
            HullSide::Lower => s.lower.iter().rev().map(|p| p.rotated()).collect(),
        }
    }

    /// Chord endpoints in view coordinates with their holders.
    pub fn chord<X>(self, s: &HullNode<X>, n: usize) -> ((Point, NodeId), (Point, NodeId)) {
        let (first, last) = (NodeId::new(1), NodeId::new(n));
        match self {
            HullSide::Upper => ((s.pmin, first), (s.pmax, last)),
            HullSide::Lower => ((s.pmax.rotated(), last), (s.pmin.rotated(), first)),
        }
    }

    /// Records view-coordinate hull vertices found by a pass.
    pub fn store<X>(self, s: &mut HullNode<X>, view: impl IntoIterator<Item = Point>) {
        let target = match self {
            HullSide::Upper => &mut s.upper_hull,
            HullSide::Lower => &mut s.lower_hull,
        };
        target.extend(view.into_iter().map(|p| self.out_of_view(p)));
        target.sort_unstable();
        target.dedup();
    }
}

/// Checks the input shape and coordinate widths and builds the engine.
pub(crate) fn build<X: Default + Send>(
    config: EngineConfig,
    inputs: Vec<Vec<Point>>,
    default_ceiling: u64,
) -> Result<Clique<HullNode<X>>> {
    config.validate()?;
    check_inputs(&config, &inputs)?;
    let states = inputs
        .into_iter()
        .map(|batch| HullNode {
            batch,
            ..HullNode::default()
        })
        .collect();
    let ceiling = config.ceiling_or(default_ceiling);
    Ok(Clique::with_ceiling(config, states, ceiling)?)
}

pub(crate) fn check_inputs(config: &EngineConfig, inputs: &[Vec<Point>]) -> Result<()> {
    if inputs.len() != config.n {
        return Err(crate::engine::EngineError::InputCount {
            expected: config.n,
            got: inputs.len(),
        }
        .into());
    }
    if let Some(p) = inputs
        .iter()
        .flatten()
        .find(|p| !p.fits_width(config.coord_bits))
    {
        return Err(Error::InvalidInput(format!(
            "{p} does not fit in {} bits",
            config.coord_bits
        )));
    }
    Ok(())
}

/// Sort, learn the extreme points, split into upper and lower
/// subsequences. Costs one sort plus one round.
pub(crate) fn prelude<X: Send>(clique: &mut Clique<HullNode<X>>) -> Result<()> {
    sort_points(clique, |s| std::mem::take(&mut s.batch), |s, b| s.batch = b)?;
    all_gather_one(
        clique,
        |_, s| {
            Payload::new()
                .tag(TAG_ENDS)
                .point(s.batch[0])
                .point(s.batch[s.batch.len() - 1])
        },
        |_, s, all| {
            let mut first = all[0].reader();
            first.tag();
            s.pmin = first.point();
            let mut last = all[all.len() - 1].reader();
            last.tag();
            last.point();
            s.pmax = last.point();
        },
    )?;
    clique.local(|_, s, _| {
        let (a, b) = (s.pmin, s.pmax);
        s.upper = s
            .batch
            .iter()
            .copied()
            .filter(|&p| orientation(a, b, p) != Orientation::Right)
            .collect();
        s.lower = s
            .batch
            .iter()
            .copied()
            .filter(|&p| orientation(a, b, p) != Orientation::Left)
            .collect();
    });
    Ok(())
}

/// Moves the marked hull vertices into clockwise order, `n` per node.
/// One all-gather of counts and one routing invocation.
pub(crate) fn compact<X: Send>(clique: &mut Clique<HullNode<X>>) -> Result<HullOutput> {
    let n = clique.n();
    let lower_interior = |s: &HullNode<X>| {
        s.lower_hull
            .iter()
            .copied()
            .filter(|&p| p != s.pmin && p != s.pmax)
            .collect::<Vec<_>>()
    };
    all_gather_one(
        clique,
        |_, s| {
            Payload::new()
                .tag(TAG_COUNTS)
                .count(s.upper_hull.len() as u64)
                .count(lower_interior(s).len() as u64)
        },
        |_, s, all| {
            s.counts = all
                .iter()
                .map(|p| {
                    let mut r = p.reader();
                    r.tag();
                    (r.count(), r.count())
                })
                .collect();
        },
    )?;
    route(
        clique,
        |id, s| {
            let slot = id.slot();
            let upper_total: u64 = s.counts.iter().map(|c| c.0).sum();
            let upper_start: u64 = s.counts[..slot].iter().map(|c| c.0).sum();
            // lower interior runs right to left: later nodes first
            let lower_start = upper_total + s.counts[slot + 1..].iter().map(|c| c.1).sum::<u64>();
            let out: Vec<(u64, Point)> = (upper_start..)
                .zip(s.upper_hull.iter().copied())
                .chain((lower_start..).zip(lower_interior(s).into_iter().rev()))
                .collect();
            out.into_iter()
                .map(|(rank, p)| {
                    let dst = NodeId::from_slot(rank as usize / n);
                    (dst, Payload::new().tag(TAG_PLACE).point(p).count(rank))
                })
                .collect()
        },
        |_, s, msgs| {
            s.out = msgs
                .into_iter()
                .map(|(_, payload)| {
                    let mut r = payload.reader();
                    r.tag();
                    let p = r.point();
                    (r.count(), p)
                })
                .collect();
            s.out.sort_unstable();
        },
    )?;
    let batches = clique
        .states()
        .iter()
        .map(|s| s.out.iter().map(|&(_, p)| p).collect())
        .collect();
    Ok(HullOutput { batches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_views_round_trip() {
        let p = Point::new(3, -7);
        assert_eq!(HullSide::Lower.out_of_view(HullSide::Lower.to_view(p)), p);
        assert_eq!(HullSide::Lower.rank(NodeId::new(1), 4), 4);
    }

    #[test]
    fn split_puts_chord_points_in_both() {
        let config = EngineConfig::new(2);
        let inputs = vec![
            vec![Point::new(0, 0), Point::new(1, 3)],
            vec![Point::new(2, 2), Point::new(4, 4)],
        ];
        let mut clique = build::<()>(config, inputs, 100).unwrap();
        prelude(&mut clique).unwrap();
        let s = clique.states();
        assert_eq!(s[0].upper, vec![Point::new(0, 0), Point::new(1, 3)]);
        assert_eq!(s[0].lower, vec![Point::new(0, 0)]);
        assert_eq!(s[1].upper, s[1].lower);
    }

    #[test]
    fn compaction_places_by_prefix_sums() {
        let config = EngineConfig::new(4);
        let mut clique = build::<()>(config, vec![Vec::new(); 4], 100).unwrap();
        let xs = [2usize, 0, 3, 1];
        let mut next = 0;
        for (s, &c) in clique.local_all().iter_mut().zip(&xs) {
            s.pmin = Point::new(-1, -1);
            s.pmax = Point::new(-2, -2);
            s.upper_hull = (next..next + c).map(|x| Point::new(x as i64, 0)).collect();
            next += c;
        }
        let out = compact(&mut clique).unwrap();
        assert_eq!(
            out.batches.iter().map(Vec::len).collect::<Vec<_>>(),
            [4, 2, 0, 0]
        );
        assert_eq!(
            out.vertices(),
            (0..6).map(|x| Point::new(x, 0)).collect::<Vec<_>>()
        );
    }
}
