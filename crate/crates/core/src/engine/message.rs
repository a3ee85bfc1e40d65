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

use serde::{Deserialize, Serialize};

use super::NodeId;
use crate::geometry::Point;

/// Width in bits of a tag field.
pub const TAG_BITS: u32 = 8;

/// One field of a message payload. The bit cost of each field depends on the
/// coordinate width `w` and clique size `n` of the run.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    /// `w` bits.
    Coord(i64),
    /// `ceil(log2 n)` bits, at least one.
    Node(NodeId),
    /// `2w` bits.
    Count(u64),
    /// [`TAG_BITS`] bits.
    Tag(u8),
}

impl Field {
    pub fn bits(&self, coord_bits: u32, n: usize) -> u32 {
        match self {
            Field::Coord(_) => coord_bits,
            Field::Node(_) => node_id_bits(n),
            Field::Count(_) => 2 * coord_bits,
            Field::Tag(_) => TAG_BITS,
        }
    }
}

pub fn node_id_bits(n: usize) -> u32 {
    (usize::BITS - (n.max(2) - 1).leading_zeros()).max(1)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Payload {
    fields: Vec<Field>,
}

impl Payload {
    pub fn new() -> Self {
        Payload { fields: Vec::new() }
    }

    pub fn tag(mut self, tag: u8) -> Self {
        self.fields.push(Field::Tag(tag));
        self
    }

    pub fn coord(mut self, c: i64) -> Self {
        self.fields.push(Field::Coord(c));
        self
    }

    pub fn point(self, p: Point) -> Self {
        self.coord(p.x).coord(p.y)
    }

    pub fn points(self, ps: impl IntoIterator<Item = Point>) -> Self {
        ps.into_iter().fold(self, |acc, p| acc.point(p))
    }

    pub fn node(mut self, id: NodeId) -> Self {
        self.fields.push(Field::Node(id));
        self
    }

    pub fn count(mut self, c: u64) -> Self {
        self.fields.push(Field::Count(c));
        self
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn bit_size(&self, coord_bits: u32, n: usize) -> u32 {
        self.fields.iter().map(|f| f.bits(coord_bits, n)).sum()
    }

    /// First tag in the payload, or zero. Used by the trace.
    pub fn first_tag(&self) -> u8 {
        self.fields
            .iter()
            .find_map(|f| match f {
                Field::Tag(t) => Some(*t),
                _ => None,
            })
            .unwrap_or(0)
    }

    pub fn reader(&self) -> PayloadReader<'_> {
        PayloadReader {
            fields: &self.fields,
            pos: 0,
        }
    }
}

/// Sequential decoder over a payload. Protocols only ever decode payloads
/// they produced themselves, so a shape mismatch is a programming error and
/// panics.
pub struct PayloadReader<'a> {
    fields: &'a [Field],
    pos: usize,
}

impl PayloadReader<'_> {
    fn next(&mut self) -> Field {
        let f = *self
            .fields
            .get(self.pos)
            .unwrap_or_else(|| panic!("payload exhausted at field {}", self.pos));
        self.pos += 1;
        f
    }

    pub fn tag(&mut self) -> u8 {
        match self.next() {
            Field::Tag(t) => t,
            f => panic!("expected tag, found {f:?}"),
        }
    }

    pub fn coord(&mut self) -> i64 {
        match self.next() {
            Field::Coord(c) => c,
            f => panic!("expected coordinate, found {f:?}"),
        }
    }

    pub fn point(&mut self) -> Point {
        let x = self.coord();
        let y = self.coord();
        Point { x, y }
    }

    pub fn node(&mut self) -> NodeId {
        match self.next() {
            Field::Node(id) => id,
            f => panic!("expected node id, found {f:?}"),
        }
    }

    pub fn count(&mut self) -> u64 {
        match self.next() {
            Field::Count(c) => c,
            f => panic!("expected count, found {f:?}"),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pos >= self.fields.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub src: NodeId,
    pub dst: NodeId,
    pub payload: Payload,
    pub bit_size: u32,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_id_width() {
        assert_eq!(node_id_bits(1), 1);
        assert_eq!(node_id_bits(2), 1);
        assert_eq!(node_id_bits(4), 2);
        assert_eq!(node_id_bits(5), 3);
        assert_eq!(node_id_bits(64), 6);
    }

    #[test]
    fn point_payload_size() {
        let p = Payload::new().tag(1).point(Point::new(3, 4));
        assert_eq!(p.bit_size(16, 8), 32 + TAG_BITS);
        let mut r = p.reader();
        assert_eq!(r.tag(), 1);
        assert_eq!(r.point(), Point::new(3, 4));
        assert!(r.is_empty());
    }
}
