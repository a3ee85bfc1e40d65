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

//! Sequential triangulation of one node's batch by an x-sweep.

use crate::error::{Error, Result};
use crate::geometry::{orientation, Orientation, Point};
use crate::triangulation::Triangle;

fn triangle(a: Point, b: Point, c: Point) -> Result<Triangle> {
    Triangle::ccw(a, b, c).ok_or(Error::CollinearTriple(a, b, c))
}

/// Triangulates points sorted by `(x, y)`: each new point is joined to every
/// hull edge it sees. Fewer than three points give no triangles; a
/// collinear triple met on the way is an error.
pub fn local_triangulation(batch: &[Point]) -> Result<Vec<Triangle>> {
    debug_assert!(batch.windows(2).all(|w| w[0] < w[1]));
    let mut out = Vec::with_capacity(2 * batch.len());
    let mut lower: Vec<Point> = Vec::new();
    let mut upper: Vec<Point> = Vec::new();
    for &p in batch {
        while lower.len() >= 2 {
            let (u, v) = (lower[lower.len() - 2], lower[lower.len() - 1]);
            match orientation(u, v, p) {
                Orientation::Left => break,
                Orientation::Right => out.push(triangle(u, v, p)?),
                Orientation::Collinear => return Err(Error::CollinearTriple(u, v, p)),
            }
            lower.pop();
        }
        lower.push(p);
        while upper.len() >= 2 {
            let (u, v) = (upper[upper.len() - 2], upper[upper.len() - 1]);
            match orientation(u, v, p) {
                Orientation::Right => break,
                Orientation::Left => out.push(triangle(u, v, p)?),
                Orientation::Collinear => return Err(Error::CollinearTriple(u, v, p)),
            }
            upper.pop();
        }
        upper.push(p);
    }
    Ok(out)
}
