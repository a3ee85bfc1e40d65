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

//! Input point sets for experiments.
//!
//! Every generator is deterministic in its seed and returns `n` batches of
//! `n` distinct points, in the order the nodes receive them. Generators
//! whose shape needs more room than the default coordinate width report the
//! width they used.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::default_coord_bits;
use crate::error::{Error, Result};
use crate::geometry::{Point, MAX_COORD_BITS};
use crate::oracles::hull_oracle;

/// Where the points come from. Parses from `uniform`, `convex-circle`,
/// `parabola`, `grid-jitter` or `file:PATH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Uniform,
    ConvexCircle,
    Parabola,
    GridJitter,
    File(PathBuf),
}

impl FromStr for Generator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "uniform" => Generator::Uniform,
            "convex-circle" => Generator::ConvexCircle,
            "parabola" => Generator::Parabola,
            "grid-jitter" => Generator::GridJitter,
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Generator::File(path.into()),
                _ => {
                    return Err(format!(
                        "unknown generator `{s}` (uniform, convex-circle, parabola, grid-jitter, file:PATH)"
                    ))
                }
            },
        })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Uniform => f.write_str("uniform"),
            Generator::ConvexCircle => f.write_str("convex-circle"),
            Generator::Parabola => f.write_str("parabola"),
            Generator::GridJitter => f.write_str("grid-jitter"),
            Generator::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// A generated input: `n` batches plus the coordinate width they need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    pub batches: Vec<Vec<Point>>,
    pub coord_bits: u32,
}

impl PointSet {
    pub fn points(&self) -> Vec<Point> {
        self.batches.iter().flatten().copied().collect()
    }

    fn from_points(points: Vec<Point>, n: usize, coord_bits: u32) -> Self {
        let batches = points.chunks(n).map(<[Point]>::to_vec).collect();
        PointSet {
            batches,
            coord_bits,
        }
    }
}

/// Rejects points that would make three points collinear, by keeping the
/// set of reduced directions seen from every accepted point.
#[derive(Default)]
struct CollinearGuard {
    points: Vec<Point>,
    directions: Vec<HashSet<(i64, i64)>>,
}

fn direction(from: Point, to: Point) -> (i64, i64) {
    let (mut dx, mut dy) = (to.x - from.x, to.y - from.y);
    let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()) as i64;
    dx /= g;
    dy /= g;
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
    a.max(1)
}

impl CollinearGuard {
    fn try_add(&mut self, p: Point) -> bool {
        let dirs: Vec<(i64, i64)> = self.points.iter().map(|&q| direction(q, p)).collect();
        if self
            .points
            .iter()
            .zip(&self.directions)
            .zip(&dirs)
            .any(|((&q, seen), d)| q == p || seen.contains(d))
        {
            return false;
        }
        let mut own = HashSet::with_capacity(dirs.len());
        for (k, d) in dirs.into_iter().enumerate() {
            self.directions[k].insert(d);
            own.insert(d);
        }
        self.points.push(p);
        self.directions.push(own);
        true
    }
}

fn exhausted(wanted: usize, bits: u32) -> Error {
    Error::GenerationExhausted { wanted, bits }
}

fn bits_for(magnitude: u64) -> u32 {
    (u64::BITS - magnitude.leading_zeros() + 1).max(2)
}

/// Uniform points in `[0, 2^w)²`, rejection-sampled for distinctness and,
/// when asked, for general position.
pub fn uniform(n: usize, seed: u64, bits: u32, general: bool) -> Result<PointSet> {
    let total = n * n;
    let side = 1i64 << bits;
    if (side as u128) * (side as u128) < total as u128 {
        return Err(exhausted(total, bits));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 64 * total + 1024;
    let mut points = Vec::with_capacity(total);
    let mut seen = HashSet::with_capacity(total);
    let mut guard = CollinearGuard::default();
    for _ in 0..budget {
        if points.len() == total {
            break;
        }
        let p = Point::new(rng.gen_range(0..side), rng.gen_range(0..side));
        let fresh = if general {
            guard.try_add(p)
        } else {
            seen.insert(p)
        };
        if fresh {
            points.push(p);
        }
    }
    if points.len() < total {
        return Err(exhausted(total, bits));
    }
    Ok(PointSet::from_points(points, n, bits))
}

/// `n²` points in strictly convex position near a circle. The radius grows
/// with `N²` so that rounding to the grid cannot flatten a vertex; a seeded
/// rotation and shuffle vary the instance.
pub fn convex_circle(n: usize, seed: u64) -> Result<PointSet> {
    let total = n * n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut radius = ((total * total) as f64).max(64.0);
    loop {
        let bits = bits_for(radius as u64 + 1);
        if bits > MAX_COORD_BITS {
            return Err(exhausted(total, MAX_COORD_BITS));
        }
        let set: BTreeSet<Point> = (0..total)
            .map(|k| {
                let t = phase + std::f64::consts::TAU * k as f64 / total as f64;
                Point::new(
                    (radius * t.cos()).round() as i64,
                    (radius * t.sin()).round() as i64,
                )
            })
            .collect();
        let mut points: Vec<Point> = set.into_iter().collect();
        if points.len() == total && hull_oracle(&points)?.len() == total {
            points.shuffle(&mut rng);
            return Ok(PointSet::from_points(points, n, bits));
        }
        radius *= 2.0;
    }
}

/// `(x, x²)` for `x = 0..N`, in order; the width grows to fit `N²`.
pub fn parabola(n: usize, bits: u32) -> Result<PointSet> {
    let total = n * n;
    let top = (total as u64).saturating_sub(1).pow(2);
    let bits = bits.max(bits_for(top));
    if bits > MAX_COORD_BITS {
        return Err(exhausted(total, bits));
    }
    let points = (0..total as i64).map(|x| Point::new(x, x * x)).collect();
    Ok(PointSet::from_points(points, n, bits))
}

/// One point per cell of an `n × n` grid, jittered inside the cell. In
/// general-position mode a jitter that creates a collinear triple is
/// redrawn.
pub fn grid_jitter(n: usize, seed: u64, bits: u32, general: bool) -> Result<PointSet> {
    let total = n * n;
    let cell = (1i64 << bits) / n as i64;
    if cell < 4 {
        return Err(exhausted(total, bits));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut guard = CollinearGuard::default();
    let mut points = Vec::with_capacity(total);
    for row in 0..n as i64 {
        for col in 0..n as i64 {
            let mut placed = false;
            for _ in 0..256 {
                let p = Point::new(
                    col * cell + rng.gen_range(0..cell / 2),
                    row * cell + rng.gen_range(0..cell / 2),
                );
                if !general || guard.try_add(p) {
                    points.push(p);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(exhausted(total, bits));
            }
        }
    }
    points.shuffle(&mut rng);
    Ok(PointSet::from_points(points, n, bits))
}

/// Reads `x y` pairs, one per line; blank lines and `#` comments are
/// skipped. Exactly `n²` points are required.
pub fn from_file(path: &Path, n: usize) -> Result<PointSet> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::InvalidInput(format!("{}:{}: expected `x y`", path.display(), k + 1));
        let mut it = line.split_whitespace();
        let (Some(x), Some(y), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad());
        };
        let x: i64 = x.parse().map_err(|_| bad())?;
        let y: i64 = y.parse().map_err(|_| bad())?;
        points.push(Point::new(x, y));
    }
    if points.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "{} holds {} points, n = {n} needs {}",
            path.display(),
            points.len(),
            n * n
        )));
    }
    let magnitude = points
        .iter()
        .map(|p| p.x.unsigned_abs().max(p.y.unsigned_abs()))
        .max()
        .unwrap_or(0);
    let bits = default_coord_bits(n).max(bits_for(magnitude));
    if bits > MAX_COORD_BITS {
        return Err(Error::InvalidInput(format!(
            "coordinates need {bits} bits, limit is {MAX_COORD_BITS}"
        )));
    }
    Ok(PointSet::from_points(points, n, bits))
}

/// Dispatches on the generator. `general` asks for no three collinear
/// points; convex shapes satisfy it anyway.
pub fn generate(generator: &Generator, n: usize, seed: u64, general: bool) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let bits = default_coord_bits(n);
    match generator {
        Generator::Uniform => uniform(n, seed, bits, general),
        Generator::ConvexCircle => convex_circle(n, seed),
        Generator::Parabola => parabola(n, bits),
        Generator::GridJitter => grid_jitter(n, seed, bits, general),
        Generator::File(path) => from_file(path, n),
    }
}
