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

//! The polygon between two facing hulls, and how it is split.
//!
//! A corridor is stored as two chains listed top to bottom: `left` runs down
//! the right-hand side of the left hull, `right` down the left-hand side of
//! the right hull. Walking `left` and then `right` backwards traces the
//! boundary counterclockwise, closing through the two bridges. Positions
//! used throughout are indices into that walk.
//!
//! When a hull is a single segment its side can fold back on itself
//! (`p, q, p`); such spikes are legal corridors whose spike tip has a full
//! turn of interior angle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::triangulation::Triangle;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chain {
    Left,
    Right,
}

/// Shape of a corridor: how many vertices each chain has. Everything about
/// positions, medians and splits follows from these two numbers.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub left: usize,
    pub right: usize,
}

impl Shape {
    pub fn len(&self) -> usize {
        self.left + self.right
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn locate(&self, pos: usize) -> (Chain, usize) {
        if pos < self.left {
            (Chain::Left, pos)
        } else {
            (Chain::Right, self.len() - 1 - pos)
        }
    }

    pub fn position(&self, chain: Chain, index: usize) -> usize {
        match chain {
            Chain::Left => index,
            Chain::Right => self.len() - 1 - index,
        }
    }

    /// Median of the longer chain, the left one on ties.
    pub fn median(&self) -> (Chain, usize) {
        if self.left >= self.right {
            (Chain::Left, (self.left - 1) / 2)
        } else {
            (Chain::Right, (self.right - 1) / 2)
        }
    }

    /// Shapes of the two halves cut off by the diagonal from left vertex `i`
    /// to right vertex `k`.
    pub fn split(&self, i: usize, k: usize) -> (Shape, Shape) {
        (
            Shape {
                left: i + 1,
                right: k + 1,
            },
            Shape {
                left: self.left - i,
                right: self.right - k,
            },
        )
    }
}

/// A vertex's place in the two halves after a split by `(i, k)`, with the
/// new position and neighbours in each half it belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub first: Option<(usize, Point, Point)>,
    pub second: Option<(usize, Point, Point)>,
}

/// Where the vertex at `pos` (with neighbours `prev`, `next`) goes when the
/// corridor is cut along `diag = (left[i], right[k])`.
pub fn place(
    shape: Shape,
    (i, k): (usize, usize),
    diag: (Point, Point),
    pos: usize,
    prev: Point,
    next: Point,
) -> Placement {
    let (s1, s2) = shape.split(i, k);
    let (chain, idx) = shape.locate(pos);
    let in_first = match chain {
        Chain::Left => idx <= i,
        Chain::Right => idx <= k,
    };
    let in_second = match chain {
        Chain::Left => idx >= i,
        Chain::Right => idx >= k,
    };
    let first = in_first.then(|| match chain {
        Chain::Left if idx == i => (i, prev, diag.1),
        Chain::Left => (idx, prev, next),
        Chain::Right if idx == k => (s1.position(Chain::Right, k), diag.0, next),
        Chain::Right => (s1.position(Chain::Right, idx), prev, next),
    });
    let second = in_second.then(|| match chain {
        Chain::Left if idx == i => (0, diag.1, next),
        Chain::Left => (idx - i, prev, next),
        Chain::Right if idx == k => (s2.position(Chain::Right, 0), prev, diag.0),
        Chain::Right => (s2.position(Chain::Right, idx - k), prev, next),
    });
    Placement { first, second }
}

fn vec(a: Point, b: Point) -> (i128, i128) {
    ((b.x - a.x) as i128, (b.y - a.y) as i128)
}

fn cross2(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

fn dot2(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.0 + a.1 * b.1
}

/// Does the segment from boundary vertex `v` towards `w` start strictly
/// into the interior of a counterclockwise polygon, given `v`'s neighbours?
pub fn inside_wedge(v: Point, prev: Point, next: Point, w: Point) -> bool {
    let (e1, e2, d) = (vec(v, next), vec(v, prev), vec(v, w));
    let turn = cross2(e1, e2);
    if turn > 0 {
        cross2(e1, d) > 0 && cross2(d, e2) > 0
    } else if turn < 0 {
        !(cross2(e2, d) >= 0 && cross2(d, e1) >= 0)
    } else if dot2(e1, e2) < 0 {
        cross2(e1, d) > 0
    } else {
        // spike tip: everything but the spike itself
        !(cross2(e1, d) == 0 && dot2(e1, d) > 0)
    }
}

/// Local visibility test for a candidate diagonal `(v, u)` between the two
/// chains: the segment must leave both endpoints into the interior.
/// Edges are given as `(prev, next)` neighbours.
pub fn mate_valid(v: Point, v_edges: (Point, Point), u: Point, u_edges: (Point, Point)) -> bool {
    u != v_edges.0
        && u != v_edges.1
        && inside_wedge(v, v_edges.0, v_edges.1, u)
        && inside_wedge(u, u_edges.0, u_edges.1, v)
}

/// Preference among valid mates of `v`: smallest triangle with `v`'s next
/// neighbour, then lexicographically smallest.
pub fn mate_key(v: Point, v_next: Point, u: Point) -> (i128, Point) {
    (crate::geometry::cross(v, v_next, u).abs(), u)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergePolygon {
    pub left: Vec<Point>,
    pub right: Vec<Point>,
}

impl MergePolygon {
    pub fn shape(&self) -> Shape {
        Shape {
            left: self.left.len(),
            right: self.right.len(),
        }
    }

    /// Boundary, counterclockwise.
    pub fn boundary(&self) -> Vec<Point> {
        self.left
            .iter()
            .chain(self.right.iter().rev())
            .copied()
            .collect()
    }

    pub fn from_boundary(shape: Shape, boundary: &[Point]) -> Self {
        MergePolygon {
            left: boundary[..shape.left].to_vec(),
            right: boundary[shape.left..].iter().rev().copied().collect(),
        }
    }

    /// Triangulates sequentially by repeated median splits.
    pub fn triangulate(&self) -> Result<Vec<Triangle>> {
        let mut out = Vec::new();
        let mut work = vec![self.clone()];
        while let Some(poly) = work.pop() {
            let shape = poly.shape();
            let b = poly.boundary();
            let e = b.len();
            if e <= 2 {
                continue;
            }
            if e == 3 {
                out.push(
                    Triangle::ccw(b[0], b[1], b[2])
                        .ok_or(Error::CollinearTriple(b[0], b[1], b[2]))?,
                );
                continue;
            }
            let nb = |pos: usize| (b[(pos + e - 1) % e], b[(pos + 1) % e]);
            let (chain, idx) = shape.median();
            let vpos = shape.position(chain, idx);
            let v = b[vpos];
            let (opposite, count) = match chain {
                Chain::Left => (Chain::Right, shape.right),
                Chain::Right => (Chain::Left, shape.left),
            };
            let mate = (0..count)
                .map(|j| (j, shape.position(opposite, j)))
                .filter(|&(_, upos)| mate_valid(v, nb(vpos), b[upos], nb(upos)))
                .min_by_key(|&(_, upos)| mate_key(v, nb(vpos).1, b[upos]))
                .map(|(j, _)| j);
            let (i, k) = match (mate, chain) {
                (Some(j), Chain::Left) => (idx, j),
                (Some(j), Chain::Right) => (j, idx),
                (None, _) if shape.left == 2 && shape.right == 2 => (1, 0),
                (None, _) => return Err(Error::NoMateFound(v)),
            };
            let (p1, p2) = poly.split(i, k);
            work.push(p2);
            work.push(p1);
        }
        Ok(out)
    }

    pub fn split(&self, i: usize, k: usize) -> (MergePolygon, MergePolygon) {
        (
            MergePolygon {
                left: self.left[..=i].to_vec(),
                right: self.right[..=k].to_vec(),
            },
            MergePolygon {
                left: self.left[i..].to_vec(),
                right: self.right[k..].to_vec(),
            },
        )
    }
}
