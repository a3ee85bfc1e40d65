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

//! Common tangent of two x-separated upper chains by simultaneous median
//! elimination.
//!
//! The two chain owners keep identical copies of a [`BridgeSearchState`].
//! Each step both send their current median with its chain neighbours, then
//! both apply [`bridge_step`] to the same pair of probes, so they stay in
//! agreement without further messages. Every step that does not finish
//! halves at least one range, so a search over chains of sizes `p` and `q`
//! ends within `floor(log p) + floor(log q) + 1` steps.
//!
//! With `a`, `b` the medians and "above" meaning strictly left of `a -> b`:
//!
//! * `a-` above: the bridge leaves `A` strictly left of `a`;
//! * `b+` above: the bridge reaches `B` strictly right of `b`;
//! * neither neighbour above at either median: `a b` is the bridge line;
//! * `a` supporting, `b-` above: drop `b` and everything right of it;
//! * `a+` above, `b` supporting: drop `a` and everything left of it;
//! * `a+` and `b-` above: intersect the lines of edges `a a+` and `b- b`; if
//!   the intersection comes before `B`'s first vertex in x-order the bridge
//!   is right of `a`, otherwise it is left of `b`.
//!
//! When the bridge line holds an edge of a chain the outermost endpoints are
//! reported, matching the oracle.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::engine::{Payload, PayloadReader};
use crate::geometry::{cross, Point};

/// A median vertex with its neighbours on the full chain.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Probe {
    pub prev: Option<Point>,
    pub mid: Point,
    pub next: Option<Point>,
}

const HAS_PREV: u8 = 1;
const HAS_NEXT: u8 = 2;

impl Probe {
    pub fn of(chain: &[Point], index: usize) -> Self {
        Probe {
            prev: index.checked_sub(1).map(|i| chain[i]),
            mid: chain[index],
            next: chain.get(index + 1).copied(),
        }
    }

    /// Encodes the probe; `tag` must leave the two low bits clear.
    pub fn to_payload(&self, tag: u8) -> Payload {
        let mut flags = tag;
        if self.prev.is_some() {
            flags |= HAS_PREV;
        }
        if self.next.is_some() {
            flags |= HAS_NEXT;
        }
        Payload::new()
            .tag(flags)
            .points(self.prev)
            .point(self.mid)
            .points(self.next)
    }

    pub fn read(reader: &mut PayloadReader<'_>) -> Self {
        let flags = reader.tag();
        let prev = (flags & HAS_PREV != 0).then(|| reader.point());
        let mid = reader.point();
        let next = (flags & HAS_NEXT != 0).then(|| reader.point());
        Probe { prev, mid, next }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchPhase {
    /// Both ranges hold at least three vertices.
    Searching,
    /// A range is down to one or two vertices; each step is a tangent probe.
    BaseCase,
    /// Indices of the bridge endpoints on the left and right chain.
    Done { left: usize, right: usize },
}

/// Inclusive index ranges into the left chain `A` and right chain `B` that
/// still contain the bridge endpoints.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeSearchState {
    pub lo_l: usize,
    pub hi_l: usize,
    pub lo_m: usize,
    pub hi_m: usize,
    pub phase: SearchPhase,
}

impl BridgeSearchState {
    pub fn new(len_l: usize, len_m: usize) -> Self {
        assert!(len_l > 0 && len_m > 0, "bridge search on an empty chain");
        let mut s = BridgeSearchState {
            lo_l: 0,
            hi_l: len_l - 1,
            lo_m: 0,
            hi_m: len_m - 1,
            phase: SearchPhase::Searching,
        };
        s.phase = s.range_phase();
        s
    }

    fn range_phase(&self) -> SearchPhase {
        if self.hi_l - self.lo_l >= 2 && self.hi_m - self.lo_m >= 2 {
            SearchPhase::Searching
        } else {
            SearchPhase::BaseCase
        }
    }

    /// Lower medians of the two ranges.
    pub fn medians(&self) -> (usize, usize) {
        (
            self.lo_l + (self.hi_l - self.lo_l) / 2,
            self.lo_m + (self.hi_m - self.lo_m) / 2,
        )
    }

    pub fn is_done(&self) -> bool {
        matches!(self.phase, SearchPhase::Done { .. })
    }

    pub fn range_total(&self) -> usize {
        self.hi_l - self.lo_l + self.hi_m - self.lo_m + 2
    }

    pub fn result(&self) -> Option<(usize, usize)> {
        match self.phase {
            SearchPhase::Done { left, right } => Some((left, right)),
            _ => None,
        }
    }
}

/// Steps needed in the worst case for chains of the given sizes.
pub fn step_bound(len_l: usize, len_m: usize) -> u64 {
    (len_l.max(1).ilog2() + len_m.max(1).ilog2() + 1) as u64
}

/// Compares the intersection of lines `a a2` and `b1 b` with `c` in
/// x-order. The lines must not be parallel.
fn intersection_cmp(a: Point, a2: Point, b1: Point, b: Point, c: Point) -> Ordering {
    let w = |p: Point, q: Point| ((q.x - p.x) as i128, (q.y - p.y) as i128);
    let (dax, day) = w(a, a2);
    let (dbx, dby) = w(b1, b);
    let d = dax * dby - day * dbx;
    debug_assert!(d != 0, "parallel edge lines");
    // p = a + t (a2 - a) with t = cross(b1 - a, b - b1) / d
    let (ex, ey) = w(a, b1);
    let t = ex * dby - ey * dbx;
    let sign = d.signum();
    let x = ((a.x as i128 * d + t * dax) * sign).cmp(&(c.x as i128 * d * sign));
    x.then_with(|| ((a.y as i128 * d + t * day) * sign).cmp(&(c.y as i128 * d * sign)))
}

/// One elimination step. `right_first` is the first vertex of the whole
/// right chain; it stands in for the separating vertical line.
///
/// # Panics
///
/// If the probes are inconsistent with the state, which would mean the two
/// chains are not x-separated upper chains.
pub fn bridge_step(
    state: BridgeSearchState,
    left: &Probe,
    right: &Probe,
    right_first: Point,
) -> BridgeSearchState {
    if state.is_done() {
        return state;
    }
    let (i, j) = state.medians();
    let (a, b) = (left.mid, right.mid);
    let above = |p: Option<Point>| p.is_some_and(|p| cross(a, b, p) > 0);
    let on = |p: Option<Point>| p.is_some_and(|p| cross(a, b, p) == 0);
    let mut next = state;
    let shrink = "bridge search range emptied";

    let a_minus = above(left.prev);
    let b_plus = above(right.next);
    if a_minus || b_plus {
        if a_minus {
            next.hi_l = i.checked_sub(1).filter(|&h| h >= state.lo_l).expect(shrink);
        }
        if b_plus {
            next.lo_m = j + 1;
            assert!(next.lo_m <= state.hi_m, "{shrink}");
        }
    } else {
        match (above(left.next), above(right.prev)) {
            (false, false) => {
                next.phase = SearchPhase::Done {
                    left: if on(left.prev) { i - 1 } else { i },
                    right: if on(right.next) { j + 1 } else { j },
                };
                return next;
            }
            (false, true) => next.hi_m = drop_right(j, state.lo_m),
            (true, false) => next.lo_l = drop_left(i, state.hi_l),
            (true, true) => {
                let (a2, b1) = (left.next.unwrap(), right.prev.unwrap());
                if intersection_cmp(a, a2, b1, b, right_first) == Ordering::Less {
                    next.lo_l = drop_left(i, state.hi_l);
                } else {
                    next.hi_m = drop_right(j, state.lo_m);
                }
            }
        }
    }
    debug_assert!(next.range_total() < state.range_total());
    next.phase = next.range_phase();
    next
}

fn drop_left(i: usize, hi: usize) -> usize {
    assert!(i < hi, "bridge search range emptied");
    i + 1
}

fn drop_right(j: usize, lo: usize) -> usize {
    assert!(j > lo, "bridge search range emptied");
    j - 1
}

/// Runs the search sequentially on two chains in view coordinates.
/// Returns the endpoint indices and the number of steps taken.
pub fn run_local(left: &[Point], right: &[Point]) -> ((usize, usize), u64) {
    let mut state = BridgeSearchState::new(left.len(), right.len());
    let mut steps = 0;
    while !state.is_done() {
        let (i, j) = state.medians();
        state = bridge_step(state, &Probe::of(left, i), &Probe::of(right, j), right[0]);
        steps += 1;
    }
    (state.result().unwrap(), steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::local_upper_hull;
    use crate::oracles::bridge_oracle_indices;
    use rand::{Rng, SeedableRng};

    fn pts(raw: &[(i64, i64)]) -> Vec<Point> {
        raw.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn singletons_finish_in_one_step() {
        let (r, steps) = run_local(&pts(&[(0, 0)]), &pts(&[(3, 1)]));
        assert_eq!(r, (0, 0));
        assert_eq!(steps, 1);
    }

    #[test]
    fn immediate_support_is_done() {
        let a = pts(&[(0, 0), (2, 5), (4, 0)]);
        let b = pts(&[(6, 0), (8, 5), (10, 0)]);
        let (r, steps) = run_local(&a, &b);
        assert_eq!(r, (1, 1));
        assert_eq!(steps, 1);
    }

    #[test]
    fn collinear_bridge_reports_outer_pair() {
        // both chains have an edge on y = 4
        let a = pts(&[(0, 0), (1, 4), (2, 4)]);
        let b = pts(&[(5, 4), (6, 4), (7, 0)]);
        assert_eq!(run_local(&a, &b).0, (1, 1));
        let a2 = local_upper_hull(&a);
        let b2 = local_upper_hull(&b);
        assert_eq!(bridge_oracle_indices(&a2, &b2), (1, 1));
    }

    #[test]
    fn probe_payload_round_trip() {
        let chain = pts(&[(0, 0), (1, 2), (3, 1)]);
        for i in 0..3 {
            let probe = Probe::of(&chain, i);
            let payload = probe.to_payload(0x40);
            assert_eq!(Probe::read(&mut payload.reader()), probe);
        }
    }

    #[test]
    fn intersection_ordering_is_exact() {
        // lines y = x and y = 10 - x meet at (5, 5)
        let (a, a2, b1, b) = (
            Point::new(0, 0),
            Point::new(1, 1),
            Point::new(9, 1),
            Point::new(10, 0),
        );
        assert_eq!(
            intersection_cmp(a, a2, b1, b, Point::new(6, 0)),
            Ordering::Less
        );
        assert_eq!(
            intersection_cmp(a, a2, b1, b, Point::new(5, 6)),
            Ordering::Less
        );
        assert_eq!(
            intersection_cmp(a, a2, b1, b, Point::new(5, 5)),
            Ordering::Equal
        );
        assert_eq!(
            intersection_cmp(a, a2, b1, b, Point::new(5, 4)),
            Ordering::Greater
        );
    }

    #[test]
    fn matches_oracle_with_steps_and_ranges_checked() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let span = rng.gen_range(2..40);
            let mut raw: Vec<Point> = (0..rng.gen_range(1..60))
                .map(|_| Point::new(rng.gen_range(0..span), rng.gen_range(0..span)))
                .collect();
            raw.sort();
            raw.dedup();
            // split by position in x-order, so columns may straddle the cut
            let k = rng.gen_range(0..=raw.len());
            let (left, right) = (raw[..k].to_vec(), raw[k..].to_vec());
            if left.is_empty() || right.is_empty() {
                continue;
            }
            let (ha, hb) = (local_upper_hull(&left), local_upper_hull(&right));
            let expected = bridge_oracle_indices(&ha, &hb);
            // every intermediate range keeps the answer
            let mut state = BridgeSearchState::new(ha.len(), hb.len());
            let mut steps = 0;
            while !state.is_done() {
                assert!((state.lo_l..=state.hi_l).contains(&expected.0));
                assert!((state.lo_m..=state.hi_m).contains(&expected.1));
                let (i, j) = state.medians();
                state = bridge_step(
                    state,
                    &Probe::of(ha.vertices(), i),
                    &Probe::of(hb.vertices(), j),
                    hb.vertices()[0],
                );
                steps += 1;
            }
            assert_eq!(state.result(), Some(expected));
            assert!(steps <= step_bound(ha.len(), hb.len()));
        }
    }
}
