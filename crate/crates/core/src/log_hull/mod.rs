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

//! Hull in a logarithmic number of rounds.
//!
//! Every node builds the upper hull of its own points. Then every pair of
//! nodes finds the bridge between their two local hulls; the `n(n-1)/2`
//! searches run side by side, each pair exchanging one message per direction
//! per round, so all finish within `2 floor(log n) + 1` rounds. Finally each
//! node discards the local vertices the bridges rule out (see [`prune`]).
//! The lower hull is the same computation in the rotated plane.

pub mod bridge;
pub mod prune;

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

pub use bridge::{bridge_step, step_bound, BridgeSearchState, Probe, SearchPhase};
pub use prune::{prune_by_bridges, survivors, IncidentBridge};

use crate::comm::all_gather_within;
use crate::engine::{Clique, EngineConfig, NodeId, Payload};
use crate::error::{Error, Result};
use crate::geometry::{local_upper_hull, ChainKind, ConvexChain, Point, MAX_COORD_BITS};
use crate::hull::{build, compact, prelude, HullNode, HullRun, HullSide};

const TAG_SIZE: u8 = 20;
/// The two low bits carry the probe's neighbour flags.
const TAG_PROBE: u8 = 0x40;

/// One pairwise search as seen by one of its two nodes.
#[derive(Clone, Debug)]
pub(crate) struct PeerSearch {
    pub peer: NodeId,
    pub peer_rank: usize,
    /// First vertex of the right-hand chain of the pair.
    pub right_first: Point,
    pub state: BridgeSearchState,
    /// The bridge endpoint on the peer's chain, once known.
    pub partner: Option<Point>,
    pub steps: u64,
}

/// Per-node input and output of [`pairwise_bridges`].
#[derive(Clone, Debug, Default)]
pub(crate) struct BridgeWork {
    /// Upper chain in view coordinates.
    pub chain: Vec<Point>,
    /// Position of this node in the view's x-order.
    pub rank: usize,
    pub searches: Vec<PeerSearch>,
}

impl BridgeWork {
    pub fn incident(&self) -> Vec<IncidentBridge> {
        self.searches
            .iter()
            .map(|s| {
                let (l, r) = s.state.result().expect("search unfinished");
                IncidentBridge {
                    peer_rank: s.peer_rank,
                    own_index: if self.rank < s.peer_rank { l } else { r },
                    partner: s.partner.expect("search unfinished"),
                }
            })
            .collect()
    }

    pub fn survivors(&self) -> Vec<Point> {
        survivors(&self.chain, self.rank, &self.incident())
    }
}

pub(crate) trait HasBridgeWork {
    fn work(&mut self) -> &mut BridgeWork;
    fn work_ref(&self) -> &BridgeWork;
}

/// Finds the bridge between the chains of every two nodes of the same group,
/// all concurrently. `group(v)` is the inclusive node range of `v`'s group.
/// One round to exchange chain sizes, then `steps` search rounds; `steps`
/// must be at least [`step_bound`] of the largest chains involved.
pub(crate) fn pairwise_bridges<S, G>(
    clique: &mut Clique<S>,
    side: HullSide,
    group: G,
    steps: u64,
) -> Result<()>
where
    S: HasBridgeWork + Send,
    G: Fn(NodeId) -> RangeInclusive<usize> + Sync,
{
    let n = clique.n();
    clique.local(|id, s, _| {
        let w = s.work();
        w.rank = side.rank(id, n);
        w.searches.clear();
    });
    all_gather_within(
        clique,
        &group,
        |_, s| {
            let chain = &s.work_ref().chain;
            Payload::new()
                .tag(TAG_SIZE)
                .count(chain.len() as u64)
                .points(chain.first().copied())
        },
        |id, s, all| {
            let first_id = *group(id).start();
            let w = s.work();
            if w.chain.is_empty() {
                return;
            }
            for (k, payload) in all.iter().enumerate() {
                let peer = NodeId::new(first_id + k);
                if peer == id {
                    continue;
                }
                let mut r = payload.reader();
                r.tag();
                let len = r.count() as usize;
                if len == 0 {
                    continue;
                }
                let peer_first = r.point();
                let peer_rank = side.rank(peer, n);
                let (state, right_first) = if w.rank < peer_rank {
                    (BridgeSearchState::new(w.chain.len(), len), peer_first)
                } else {
                    (BridgeSearchState::new(len, w.chain.len()), w.chain[0])
                };
                w.searches.push(PeerSearch {
                    peer,
                    peer_rank,
                    right_first,
                    state,
                    partner: None,
                    steps: 0,
                });
            }
        },
    )?;

    for _ in 0..steps {
        clique.round(|ctx, s| {
            let w = s.work_ref();
            for search in w.searches.iter().filter(|x| !x.state.is_done()) {
                let (i, j) = search.state.medians();
                let own = if w.rank < search.peer_rank { i } else { j };
                ctx.send(search.peer, Probe::of(&w.chain, own).to_payload(TAG_PROBE));
            }
        })?;
        clique.local(|_, s, inbox| {
            let w = s.work();
            let rank = w.rank;
            for search in w.searches.iter_mut().filter(|x| !x.state.is_done()) {
                let at = inbox
                    .binary_search_by_key(&search.peer, |m| m.src)
                    .expect("bridge probe missing");
                let theirs = Probe::read(&mut inbox[at].payload.reader());
                let (i, j) = search.state.medians();
                let mine_left = rank < search.peer_rank;
                let mine = Probe::of(&w.chain, if mine_left { i } else { j });
                let (left, right) = if mine_left {
                    (&mine, &theirs)
                } else {
                    (&theirs, &mine)
                };
                search.state = bridge_step(search.state, left, right, search.right_first);
                search.steps += 1;
                if let Some((l, r)) = search.state.result() {
                    search.partner = Some(if mine_left {
                        if r == j {
                            right.mid
                        } else {
                            right.next.unwrap()
                        }
                    } else if l == i {
                        left.mid
                    } else {
                        left.prev.unwrap()
                    });
                }
            }
        });
    }

    let unfinished = clique
        .states()
        .iter()
        .flat_map(|s| s.work_ref().searches.iter())
        .any(|x| !x.state.is_done());
    if unfinished {
        return Err(Error::Internal(format!(
            "bridge searches unfinished after {steps} steps"
        )));
    }
    Ok(())
}

/// What pruning did on one node for one side, in real coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneRecord {
    pub node: NodeId,
    pub kind: ChainKind,
    pub local_hull: Vec<Point>,
    pub survivors: Vec<Point>,
}

#[derive(Clone, Debug, Default)]
struct LogNode {
    work: BridgeWork,
    records: Vec<PruneRecord>,
}

impl HasBridgeWork for HullNode<LogNode> {
    fn work(&mut self) -> &mut BridgeWork {
        &mut self.ext.work
    }

    fn work_ref(&self) -> &BridgeWork {
        &self.ext.work
    }
}

fn log_side(clique: &mut Clique<HullNode<LogNode>>, side: HullSide) -> Result<()> {
    let n = clique.n();
    clique.local(|_, s, _| {
        s.ext.work.chain = local_upper_hull(&side.sequence(s)).into_vertices();
    });
    pairwise_bridges(clique, side, |_| 1..=n, step_bound(n, n))?;
    clique.local(|id, s, _| {
        let kept = s.ext.work.survivors();
        let back = |v: &[Point]| -> Vec<Point> {
            let mut out: Vec<Point> = v.iter().map(|&p| side.out_of_view(p)).collect();
            out.sort_unstable();
            out
        };
        let record = PruneRecord {
            node: id,
            kind: match side {
                HullSide::Upper => ChainKind::Upper,
                HullSide::Lower => ChainKind::Lower,
            },
            local_hull: back(&s.ext.work.chain),
            survivors: back(&kept),
        };
        s.ext.records.push(record);
        side.store(s, kept);
    });
    Ok(())
}

/// Distributed hull in `O(log n)` rounds; the round count depends only on
/// `n`, never on the input.
pub fn new_convex_hull(config: EngineConfig, inputs: Vec<Vec<Point>>) -> Result<HullRun> {
    new_convex_hull_detailed(config, inputs).map(|(run, _)| run)
}

/// Like [`new_convex_hull`], also reporting what every node pruned.
pub fn new_convex_hull_detailed(
    config: EngineConfig,
    inputs: Vec<Vec<Point>>,
) -> Result<(HullRun, Vec<PruneRecord>)> {
    let n = config.n as u64;
    let mut clique = build::<LogNode>(config, inputs, 64 * n)?;
    prelude(&mut clique)?;
    log_side(&mut clique, HullSide::Upper)?;
    log_side(&mut clique, HullSide::Lower)?;
    let output = compact(&mut clique)?;
    let records = clique
        .states()
        .iter()
        .flat_map(|s| s.ext.records.iter().cloned())
        .collect();
    Ok((HullRun::finish(clique, output), records))
}

/// Outcome of a stand-alone two-node bridge search.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct BridgeSearchOutcome {
    pub left: Point,
    pub right: Point,
    /// Messages exchanged by the search itself, both directions.
    pub messages: u64,
    pub rounds: u64,
}

#[derive(Default)]
struct PairNode(BridgeWork);

impl HasBridgeWork for PairNode {
    fn work(&mut self) -> &mut BridgeWork {
        &mut self.0
    }

    fn work_ref(&self) -> &BridgeWork {
        &self.0
    }
}

/// Bridge of two x-separated chains of the same kind, computed by two clique
/// nodes each holding one chain. `left` must precede `right` in x-order.
pub fn bridge_search(left: &ConvexChain, right: &ConvexChain) -> Result<BridgeSearchOutcome> {
    if left.kind() != right.kind() {
        return Err(Error::InvalidInput("chains of different kinds".into()));
    }
    if left.is_empty() || right.is_empty() {
        return Err(Error::InvalidInput("bridge of an empty chain".into()));
    }
    if left.last() >= right.first() {
        return Err(Error::InvalidInput("chains are not x-separated".into()));
    }
    let magnitude = left
        .vertices()
        .iter()
        .chain(right.vertices())
        .map(|p| p.x.unsigned_abs().max(p.y.unsigned_abs()))
        .max()
        .unwrap_or(0);
    let bits = (u64::BITS - magnitude.leading_zeros()).max(8);
    if bits > MAX_COORD_BITS {
        return Err(Error::InvalidInput(format!(
            "coordinates exceed {MAX_COORD_BITS} bits"
        )));
    }
    // lower chains become upper chains in the rotated plane, with sides swapped
    let (a, b) = match left.kind() {
        ChainKind::Upper => (left.clone(), right.clone()),
        ChainKind::Lower => (right.rotated(), left.rotated()),
    };
    let config = EngineConfig::new(2).with_coord_bits(bits);
    let states = vec![
        PairNode(BridgeWork {
            chain: a.into_vertices(),
            ..BridgeWork::default()
        }),
        PairNode(BridgeWork {
            chain: b.into_vertices(),
            ..BridgeWork::default()
        }),
    ];
    let mut clique = Clique::new(config, states)?;
    let steps = step_bound(left.len(), right.len());
    pairwise_bridges(&mut clique, HullSide::Upper, |_| 1..=2, steps)?;
    let first = &clique.states()[0].0;
    let search = &first.searches[0];
    let (l, r) = search.state.result().expect("search finished");
    let second = &clique.states()[1].0;
    let (pl, pr) = (first.chain[l], second.chain[r]);
    let (lp, rp) = match left.kind() {
        ChainKind::Upper => (pl, pr),
        ChainKind::Lower => (pr.rotated(), pl.rotated()),
    };
    Ok(BridgeSearchOutcome {
        left: lp,
        right: rp,
        messages: 2 * search.steps,
        rounds: search.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::local_lower_hull;
    use crate::oracles::{bridge_oracle, hull_oracle};
    use rand::{Rng, SeedableRng};

    fn batches(points: Vec<Point>, n: usize) -> Vec<Vec<Point>> {
        points.chunks(n).map(<[Point]>::to_vec).collect()
    }

    fn random_points(seed: u64, count: usize, span: i64) -> Vec<Point> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut set = std::collections::BTreeSet::new();
        while set.len() < count {
            set.insert(Point::new(rng.gen_range(0..span), rng.gen_range(0..span)));
        }
        set.into_iter().collect()
    }

    #[test]
    fn two_singletons() {
        let a = local_upper_hull(&[Point::new(0, 0)]);
        let b = local_upper_hull(&[Point::new(4, 1)]);
        let out = bridge_search(&a, &b).unwrap();
        assert_eq!((out.left, out.right), (Point::new(0, 0), Point::new(4, 1)));
        assert_eq!(out.messages, 2);
    }

    #[test]
    fn lower_chains_are_supported() {
        let pts = random_points(4, 40, 30);
        let (l, r) = pts.split_at(17);
        let (a, b) = (local_lower_hull(l), local_lower_hull(r));
        let out = bridge_search(&a, &b).unwrap();
        assert_eq!((out.left, out.right), bridge_oracle(&a, &b));
    }

    #[test]
    fn hull_matches_oracle() {
        for n in [1usize, 2, 3, 4, 8] {
            for seed in 0..10 {
                let mut pts = random_points(seed, n * n, 64);
                // shuffle so the sort has work to do
                pts.reverse();
                let run = new_convex_hull(EngineConfig::new(n), batches(pts.clone(), n)).unwrap();
                assert_eq!(
                    run.output.vertices(),
                    hull_oracle(&pts).unwrap(),
                    "n={n} seed={seed}"
                );
                assert!(run.metrics.is_compliant(n));
            }
        }
    }

    #[test]
    fn rounds_do_not_depend_on_input() {
        let n = 4;
        let a =
            new_convex_hull(EngineConfig::new(n), batches(random_points(1, 16, 64), n)).unwrap();
        let circle: Vec<Point> = (0..16).map(|x| Point::new(x, x * x)).collect();
        let b = new_convex_hull(EngineConfig::new(n), batches(circle, n)).unwrap();
        assert_eq!(a.metrics.rounds_total, b.metrics.rounds_total);
    }

    #[test]
    fn pruning_is_exact() {
        for seed in 0..30 {
            let pts = random_points(seed, 16, 20);
            let hull: std::collections::HashSet<Point> =
                hull_oracle(&pts).unwrap().into_iter().collect();
            let (_, records) =
                new_convex_hull_detailed(EngineConfig::new(4), batches(pts, 4)).unwrap();
            for r in records {
                for v in &r.local_hull {
                    assert_eq!(r.survivors.contains(v), hull.contains(v), "{v} seed {seed}");
                }
            }
        }
    }
}
