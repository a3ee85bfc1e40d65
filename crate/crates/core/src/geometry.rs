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

//! Exact integer planar predicates and convex chains.
//!
//! Every decision is made with integer arithmetic. Coordinates are limited to
//! [`MAX_COORD_BITS`] bits so that orientation determinants fit in `i128` with
//! plenty of headroom, including the three-factor products used by the bridge
//! case analysis.
//!
//! Points are ordered lexicographically by `(x, y)`. Wherever an algorithm
//! talks about "x-order" it uses this order, which behaves like an
//! infinitesimal shear of the plane: no two distinct points share a sheared
//! x-coordinate, and orientation signs are unchanged by the shear.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::NodeId;

/// Widest coordinate supported by the exact predicates.
pub const MAX_COORD_BITS: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("line through {0} and itself is undefined")]
    CoincidentPoints(Point),
    #[error("chain is not strictly convex at vertex {index}")]
    NotConvex { index: usize },
    #[error("chain is not sorted at vertex {index}")]
    NotMonotone { index: usize },
}

#[derive(
    Copy, Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Rotation by 180 degrees. Preserves orientation and reverses the
    /// lexicographic order, which turns lower hulls into upper hulls.
    pub const fn rotated(self) -> Self {
        Point {
            x: -self.x,
            y: -self.y,
        }
    }

    pub fn fits_width(self, bits: u32) -> bool {
        let bound = 1i64 << bits;
        self.x.abs() < bound && self.y.abs() < bound
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(i64, i64)> for Point {
    fn from((x, y): (i64, i64)) -> Self {
        Point { x, y }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Left,
    Right,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// Twice the signed area of triangle `abc`, i.e. `(b - a) x (c - a)`.
#[inline]
pub fn cross(a: Point, b: Point, c: Point) -> i128 {
    let (abx, aby) = ((b.x - a.x) as i128, (b.y - a.y) as i128);
    let (acx, acy) = ((c.x - a.x) as i128, (c.y - a.y) as i128);
    abx * acy - aby * acx
}

#[inline]
pub fn orientation(a: Point, b: Point, c: Point) -> Orientation {
    match cross(a, b, c).cmp(&0) {
        Ordering::Greater => Orientation::Left,
        Ordering::Less => Orientation::Right,
        Ordering::Equal => Orientation::Collinear,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChainKind {
    Upper,
    Lower,
}

impl ChainKind {
    /// The side of a left-to-right line that lies outside a chain of this kind.
    pub fn outside(self) -> Orientation {
        match self {
            ChainKind::Upper => Orientation::Left,
            ChainKind::Lower => Orientation::Right,
        }
    }

    /// Turn direction required at interior vertices of a chain of this kind.
    pub fn turn(self) -> Orientation {
        self.outside().reversed()
    }
}

/// An x-monotone strictly convex chain: an upper or lower hull.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexChain {
    kind: ChainKind,
    vertices: Vec<Point>,
}

impl ConvexChain {
    pub fn new(kind: ChainKind, vertices: Vec<Point>) -> Result<Self, GeometryError> {
        for (index, w) in vertices.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(GeometryError::NotMonotone { index: index + 1 });
            }
        }
        for (index, w) in vertices.windows(3).enumerate() {
            if orientation(w[0], w[1], w[2]) != kind.turn() {
                return Err(GeometryError::NotConvex { index: index + 1 });
            }
        }
        Ok(ConvexChain { kind, vertices })
    }

    pub(crate) fn new_unchecked(kind: ChainKind, vertices: Vec<Point>) -> Self {
        debug_assert!(ConvexChain::new(kind, vertices.clone()).is_ok());
        ConvexChain { kind, vertices }
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> Option<Point> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<Point> {
        self.vertices.last().copied()
    }

    /// The same chain seen after a 180 degree rotation: an upper chain
    /// becomes a lower chain and vice versa.
    pub fn rotated(&self) -> ConvexChain {
        let kind = match self.kind {
            ChainKind::Upper => ChainKind::Lower,
            ChainKind::Lower => ChainKind::Upper,
        };
        let vertices = self.vertices.iter().rev().map(|p| p.rotated()).collect();
        ConvexChain { kind, vertices }
    }
}

/// A common supporting segment of two x-separated chains of the same kind.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bridge {
    pub left: Point,
    pub right: Point,
    pub left_owner: NodeId,
    pub right_owner: NodeId,
}

fn strict_hull(points: &[Point], turn: Orientation) -> Vec<Point> {
    let mut hull: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 && orientation(hull[hull.len() - 2], hull[hull.len() - 1], p) != turn
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Upper hull of points sorted by `(x, y)`, with collinear interior points
/// dropped. The first and last input points are always the endpoints.
pub fn local_upper_hull(points: &[Point]) -> ConvexChain {
    debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
    ConvexChain::new_unchecked(ChainKind::Upper, strict_hull(points, Orientation::Right))
}

/// Lower hull of points sorted by `(x, y)`; mirror of [`local_upper_hull`].
pub fn local_lower_hull(points: &[Point]) -> ConvexChain {
    debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
    ConvexChain::new_unchecked(ChainKind::Lower, strict_hull(points, Orientation::Left))
}

/// True iff no vertex of `chain` lies strictly outside the line through `p`
/// and `q` (above it for upper chains, below it for lower chains).
pub fn is_supporting(p: Point, q: Point, chain: &ConvexChain) -> Result<bool, GeometryError> {
    if p == q {
        return Err(GeometryError::CoincidentPoints(p));
    }
    let (a, b) = if p < q { (p, q) } else { (q, p) };
    let outside = chain.kind().outside();
    Ok(chain
        .vertices()
        .iter()
        .all(|&v| orientation(a, b, v) != outside))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Index of the vertex where a line through `p` touches `chain`.
///
/// `side` tells where `p` sits relative to the chain. When two chain
/// vertices lie on the tangent line the one farther from `p` is returned.
/// Runs a binary search over the chain edges.
pub fn tangent_index(p: Point, chain: &ConvexChain, side: Side) -> usize {
    let v = chain.vertices();
    assert!(!v.is_empty(), "tangent to an empty chain");
    let outside = chain.kind().outside();
    match side {
        Side::Left => {
            debug_assert!(p < v[0]);
            // first edge i -> i+1 whose head falls strictly inside the line p -> v[i]
            let (mut lo, mut hi) = (0usize, v.len() - 1);
            while lo < hi {
                let mid = (lo + hi) / 2;
                let o = orientation(p, v[mid], v[mid + 1]);
                if o == outside || o == Orientation::Collinear {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            lo
        }
        Side::Right => {
            debug_assert!(p > v[v.len() - 1]);
            // last vertex i whose predecessor falls strictly inside the line v[i] -> p
            let (mut lo, mut hi) = (0usize, v.len() - 1);
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                let o = orientation(v[mid - 1], v[mid], p);
                if o == outside || o == Orientation::Collinear {
                    hi = mid - 1;
                } else {
                    lo = mid;
                }
            }
            lo
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[(i64, i64)]) -> Vec<Point> {
        raw.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn orientation_examples() {
        let o =
            |a: (i64, i64), b: (i64, i64), c: (i64, i64)| orientation(a.into(), b.into(), c.into());
        assert_eq!(o((0, 0), (1, 0), (1, 1)), Orientation::Left);
        assert_eq!(o((0, 0), (2, 2), (4, 4)), Orientation::Collinear);
        assert_eq!(o((0, 0), (1, 1), (2, 0)), Orientation::Right);
    }

    #[test]
    fn orientation_is_exact_at_max_width() {
        let m = (1i64 << MAX_COORD_BITS) - 1;
        let a = Point::new(-m, -m);
        let b = Point::new(m, m - 1);
        let c = Point::new(m - 1, m - 2);
        // c sits just below the long diagonal a-b
        assert_eq!(orientation(a, b, c), Orientation::Right);
        assert_eq!(
            orientation(a, b, Point::new(-m + 2 * m, m - 1)),
            Orientation::Collinear
        );
    }

    #[test]
    fn upper_hull_examples() {
        let h = local_upper_hull(&pts(&[(0, 0), (1, 5), (2, 0)]));
        assert_eq!(h.vertices(), pts(&[(0, 0), (1, 5), (2, 0)]).as_slice());
        let h = local_upper_hull(&pts(&[(0, 0), (1, 1), (2, 2)]));
        assert_eq!(h.vertices(), pts(&[(0, 0), (2, 2)]).as_slice());
        assert_eq!(local_upper_hull(&[]).len(), 0);
        assert_eq!(local_upper_hull(&pts(&[(3, 3)])).len(), 1);
    }

    #[test]
    fn supporting_examples() {
        let chain = local_upper_hull(&pts(&[(0, 0), (1, 1), (2, 0)]));
        assert!(is_supporting((0, 2).into(), (5, 2).into(), &chain).unwrap());
        assert!(!is_supporting((0, 0).into(), (2, 0).into(), &chain).unwrap());
        assert!(is_supporting((1, 1).into(), (1, 1).into(), &chain).is_err());
    }

    #[test]
    fn tangent_examples() {
        let chain = local_upper_hull(&pts(&[(0, 0), (1, 1), (2, 0)]));
        assert_eq!(tangent_index((-1, 0).into(), &chain, Side::Left), 1);
        let single = local_upper_hull(&pts(&[(4, 4)]));
        assert_eq!(tangent_index((0, 0).into(), &single, Side::Left), 0);
        assert_eq!(tangent_index((9, 0).into(), &single, Side::Right), 0);
    }

    #[test]
    fn chain_validation() {
        assert!(ConvexChain::new(ChainKind::Upper, pts(&[(0, 0), (1, 1), (2, 2)])).is_err());
        assert!(ConvexChain::new(ChainKind::Upper, pts(&[(1, 0), (0, 1)])).is_err());
        let c = ConvexChain::new(ChainKind::Lower, pts(&[(0, 0), (1, -1), (2, 0)])).unwrap();
        assert_eq!(c.rotated().kind(), ChainKind::Upper);
    }
}
