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

//! Sequential ground truth. Nothing here touches the engine, and several
//! routines are deliberately naive so that they stay independent of the
//! algorithms they check.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::engine::EngineError;
use crate::geometry::{
    cross, is_supporting, local_lower_hull, local_upper_hull, orientation, ConvexChain,
    Orientation, Point,
};
use crate::triangulation::Triangle;

/// Strict convex hull, clockwise, starting at the lexicographically smallest
/// point. Collinear boundary points are not vertices.
pub fn hull_oracle(points: &[Point]) -> Result<Vec<Point>, EngineError> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(EngineError::DuplicatePoint(w[0]));
    }
    if sorted.len() <= 1 {
        return Ok(sorted);
    }
    let upper = local_upper_hull(&sorted).into_vertices();
    let lower = local_lower_hull(&sorted).into_vertices();
    let mut hull = upper;
    hull.extend(
        lower
            .iter()
            .rev()
            .skip(1)
            .take(lower.len().saturating_sub(2)),
    );
    Ok(hull)
}

/// Hull membership straight from the definition: `v` is a strict hull vertex
/// iff some line through `v` has every other point strictly on one side.
/// Checked through the equivalent condition that `v` is not in the closed
/// triangle (or segment) of any three (or two) other points. O(N^4) worst
/// case; meant for small inputs.
pub fn brute_force_hull_vertices(points: &[Point]) -> HashSet<Point> {
    let n = points.len();
    let in_segment = |p: Point, a: Point, b: Point| {
        orientation(a, b, p) == Orientation::Collinear
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
    };
    let in_triangle = |p: Point, a: Point, b: Point, c: Point| {
        let (o1, o2, o3) = (cross(a, b, p), cross(b, c, p), cross(c, a, p));
        (o1 >= 0 && o2 >= 0 && o3 >= 0) || (o1 <= 0 && o2 <= 0 && o3 <= 0)
    };
    let mut out = HashSet::new();
    'outer: for (i, &v) in points.iter().enumerate() {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in (j + 1)..n {
                if k == i {
                    continue;
                }
                if in_segment(v, points[j], points[k]) {
                    continue 'outer;
                }
                for l in (k + 1)..n {
                    if l == i {
                        continue;
                    }
                    let (a, b, c) = (points[j], points[k], points[l]);
                    if cross(a, b, c) != 0 && in_triangle(v, a, b, c) {
                        continue 'outer;
                    }
                }
            }
        }
        out.insert(v);
    }
    out
}

/// All vertex pairs `(i, j)` whose line supports both chains.
pub fn supporting_pairs(left: &ConvexChain, right: &ConvexChain) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, &a) in left.vertices().iter().enumerate() {
        for (j, &b) in right.vertices().iter().enumerate() {
            if a != b
                && is_supporting(a, b, left).unwrap_or(false)
                && is_supporting(a, b, right).unwrap_or(false)
            {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Bridge of two x-separated chains of the same kind, by exhaustive scan.
/// When the bridge line holds more than two vertices, the outermost pair is
/// returned. Indices into `left` and `right`.
pub fn bridge_oracle_indices(left: &ConvexChain, right: &ConvexChain) -> (usize, usize) {
    let pairs = supporting_pairs(left, right);
    let i = pairs
        .iter()
        .map(|p| p.0)
        .min()
        .expect("chains have no bridge");
    let j = pairs
        .iter()
        .map(|p| p.1)
        .max()
        .expect("chains have no bridge");
    (i, j)
}

pub fn bridge_oracle(left: &ConvexChain, right: &ConvexChain) -> (Point, Point) {
    let (i, j) = bridge_oracle_indices(left, right);
    (left.vertices()[i], right.vertices()[j])
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub failures: Vec<(String, String)>,
}

impl ValidationReport {
    fn fail(&mut self, check: &str, witness: String) {
        self.passed = false;
        self.failures.push((check.to_string(), witness));
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.failures.iter().map(|(c, _)| c.as_str()).collect();
        names.dedup();
        names
    }
}

/// Twice the area enclosed by a simple polygon, positive when counterclockwise.
pub fn doubled_signed_area(polygon: &[Point]) -> i128 {
    let n = polygon.len();
    (0..n)
        .map(|i| {
            let (a, b) = (polygon[i], polygon[(i + 1) % n]);
            a.x as i128 * b.y as i128 - b.x as i128 * a.y as i128
        })
        .sum()
}

/// True when open segments `ab` and `cd` cross at a single interior point.
pub fn segments_cross_properly(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    o1 != Orientation::Collinear
        && o2 != Orientation::Collinear
        && o3 != Orientation::Collinear
        && o4 != Orientation::Collinear
        && o1 != o2
        && o3 != o4
}

/// `p` lies on segment `ab` strictly between its endpoints.
pub fn on_open_segment(p: Point, a: Point, b: Point) -> bool {
    p != a
        && p != b
        && orientation(a, b, p) == Orientation::Collinear
        && (p.x - a.x) as i128 * (p.x - b.x) as i128 <= 0
        && (p.y - a.y) as i128 * (p.y - b.y) as i128 <= 0
}

/// Runs the five validity checks for a triangulation of `points`:
///
/// * `membership`: triangle corners are input points;
/// * `coverage`: every input point is a triangle corner;
/// * `overlap`: triangles are counterclockwise and non-degenerate, no edges
///   cross, no input point sits inside a triangle or an edge, no repeats;
/// * `area`: triangle areas sum to the hull area;
/// * `count`: `T = 2N - h - 2`, `E = 3N - h - 3`, and exactly `h` edges
///   bound a single triangle.
///
/// `hull` is the strict hull of `points` (see [`hull_oracle`]).
pub fn triangulation_validator(
    points: &[Point],
    triangles: &[Triangle],
    hull: &[Point],
) -> ValidationReport {
    let mut report = ValidationReport {
        passed: true,
        failures: Vec::new(),
    };
    let point_set: HashSet<Point> = points.iter().copied().collect();

    for t in triangles {
        for v in t.vertices() {
            if !point_set.contains(&v) {
                report.fail("membership", format!("{v} of {t:?}"));
            }
        }
    }

    let used: HashSet<Point> = triangles.iter().flat_map(|t| t.vertices()).collect();
    if hull.len() >= 3 {
        for p in points {
            if !used.contains(p) {
                report.fail("coverage", format!("{p} is not a triangle vertex"));
            }
        }
    }

    let mut seen = HashSet::new();
    for t in triangles {
        if orientation(t.a, t.b, t.c) != Orientation::Left {
            report.fail("overlap", format!("{t:?} is not counterclockwise"));
        }
        let mut key = t.vertices();
        key.sort_unstable();
        if !seen.insert(key) {
            report.fail("overlap", format!("{t:?} repeated"));
        }
    }

    let mut edge_use: HashMap<(Point, Point), usize> = HashMap::new();
    for t in triangles {
        let v = t.vertices();
        for k in 0..3 {
            let (a, b) = (v[k], v[(k + 1) % 3]);
            *edge_use.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut edges: Vec<(Point, Point)> = edge_use.keys().copied().collect();
    edges.sort_unstable();
    // sweep by left endpoint x
    for (i, &(a, b)) in edges.iter().enumerate() {
        let max_x = a.x.max(b.x);
        for &(c, d) in &edges[i + 1..] {
            if c.x > max_x {
                break;
            }
            if segments_cross_properly(a, b, c, d) {
                report.fail("overlap", format!("edges {a}-{b} and {c}-{d} cross"));
            }
        }
    }
    let mut by_x: Vec<Point> = points.to_vec();
    by_x.sort_unstable();
    for t in triangles {
        let [a, b, c] = t.vertices();
        let lo = a.x.min(b.x).min(c.x);
        let hi = a.x.max(b.x).max(c.x);
        let start = by_x.partition_point(|p| p.x < lo);
        for &p in by_x[start..].iter().take_while(|p| p.x <= hi) {
            if p == a || p == b || p == c {
                continue;
            }
            let strictly_inside = cross(a, b, p) > 0 && cross(b, c, p) > 0 && cross(c, a, p) > 0;
            if strictly_inside
                || on_open_segment(p, a, b)
                || on_open_segment(p, b, c)
                || on_open_segment(p, c, a)
            {
                report.fail("overlap", format!("{p} lies inside {t:?}"));
            }
        }
    }

    let hull_ccw: Vec<Point> = hull.iter().rev().copied().collect();
    let hull_area = doubled_signed_area(&hull_ccw);
    let tri_area: i128 = triangles.iter().map(|t| cross(t.a, t.b, t.c).abs()).sum();
    if hull_area != tri_area {
        report.fail(
            "area",
            format!("triangles cover {tri_area}, hull is {hull_area} (doubled)"),
        );
    }

    let (n, h) = (points.len() as i64, hull.len() as i64);
    if h >= 3 {
        let expected_t = 2 * n - h - 2;
        let expected_e = 3 * n - h - 3;
        let boundary = edge_use.values().filter(|&&c| c == 1).count() as i64;
        let overused = edge_use.values().filter(|&&c| c > 2).count();
        if triangles.len() as i64 != expected_t {
            report.fail(
                "count",
                format!("{} triangles, expected {expected_t}", triangles.len()),
            );
        }
        if edge_use.len() as i64 != expected_e || boundary != h || overused > 0 {
            report.fail(
                "count",
                format!(
                    "{} edges ({boundary} boundary, {overused} overused), expected {expected_e} ({h} boundary)",
                    edge_use.len()
                ),
            );
        }
    } else if !triangles.is_empty() {
        report.fail("count", "degenerate input cannot have triangles".into());
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralPosition {
    pub ok: bool,
    pub witness: Option<[Point; 3]>,
}

fn direction_key(from: Point, to: Point) -> (i64, i64) {
    let (mut dx, mut dy) = (to.x - from.x, to.y - from.y);
    let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()) as i64;
    if g > 0 {
        dx /= g;
        dy /= g;
    }
    if dx < 0 || (dx == 0 && dy < 0) {
        (-dx, -dy)
    } else {
        (dx, dy)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// True iff no three points are collinear; otherwise returns a witness.
/// Sorts the directions from each point to all others, O(N^2 log N).
pub fn general_position_check(points: &[Point]) -> GeneralPosition {
    for (i, &p) in points.iter().enumerate() {
        let mut dirs: Vec<((i64, i64), usize)> = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, &q)| (direction_key(p, q), j))
            .collect();
        dirs.sort_unstable();
        if let Some(w) = dirs.windows(2).find(|w| w[0].0 == w[1].0) {
            return GeneralPosition {
                ok: false,
                witness: Some([p, points[w[0].1], points[w[1].1]]),
            };
        }
    }
    GeneralPosition {
        ok: true,
        witness: None,
    }
}

/// Brute-force visibility: is the segment between polygon vertices `i` and
/// `j` a diagonal of the simple counterclockwise polygon `poly`? It must not
/// touch the boundary except at its endpoints and must start into the
/// interior.
pub fn is_diagonal(poly: &[Point], i: usize, j: usize) -> bool {
    let n = poly.len();
    if i == j || (i + 1) % n == j || (j + 1) % n == i {
        return false;
    }
    let (a, b) = (poly[i], poly[j]);
    for k in 0..n {
        let (c, d) = (poly[k], poly[(k + 1) % n]);
        if k != i && k != j && on_open_segment(c, a, b) {
            return false;
        }
        let touches = c == a || c == b || d == a || d == b;
        if !touches && segments_cross_properly(a, b, c, d) {
            return false;
        }
    }
    // the midpoint must be strictly inside: ray-casting on doubled coordinates
    let (mx, my) = (a.x as i128 + b.x as i128, a.y as i128 + b.y as i128);
    let mut inside = false;
    for k in 0..n {
        let (c, d) = (poly[k], poly[(k + 1) % n]);
        let (cx, cy, dx, dy) = (
            2 * c.x as i128,
            2 * c.y as i128,
            2 * d.x as i128,
            2 * d.y as i128,
        );
        if (cy > my) != (dy > my) {
            // x of the edge at height my, compared without division
            let lhs = (mx - cx) * (dy - cy);
            let rhs = (dx - cx) * (my - cy);
            let left_of_edge = if dy > cy { lhs < rhs } else { lhs > rhs };
            if left_of_edge {
                inside = !inside;
            }
        }
    }
    inside
}
