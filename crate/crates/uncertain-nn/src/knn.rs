//! Uniform-grid index with ordered nearest-neighbor streaming.
//!
//! Points land in square cells; a query walks cells in order of their
//! minimum possible distance, feeding a candidate heap. A point may be
//! emitted once its distance is no larger than the bound of the best
//! unopened cell, so the stream comes out sorted by the total order
//! `(distance, owner, location)` used everywhere else.

use crate::geom::{dist, Point2};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// One indexed location: position plus its `(owner, location)` identity.
#[derive(Debug, Clone, Copy)]
pub struct IndexedPoint {
    pub pos: Point2,
    pub owner: u32,
    pub loc: u32,
}

#[derive(Debug)]
pub struct GridIndex {
    pts: Vec<IndexedPoint>,
    cells: Vec<Vec<u32>>,
    origin: Point2,
    cell_size: f64,
    nx: usize,
}

/// Total-order key: distance first, then owner, then location index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key {
    d: f64,
    owner: u32,
    loc: u32,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.d
            .total_cmp(&other.d)
            .then(self.owner.cmp(&other.owner))
            .then(self.loc.cmp(&other.loc))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CellEntry {
    bound: f64,
    cell: usize,
}

impl Eq for CellEntry {}

impl Ord for CellEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bound.total_cmp(&other.bound).then(self.cell.cmp(&other.cell))
    }
}

impl PartialOrd for CellEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl GridIndex {
    pub fn build(points: Vec<IndexedPoint>) -> Self {
        assert!(!points.is_empty(), "cannot index an empty point set");
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &points {
            lo.x = lo.x.min(p.pos.x);
            lo.y = lo.y.min(p.pos.y);
            hi.x = hi.x.max(p.pos.x);
            hi.y = hi.y.max(p.pos.y);
        }
        let n = points.len();
        let side = (n as f64).sqrt().ceil() as usize;
        let width = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let cell_size = width / side as f64;
        let nx = (((hi.x - lo.x) / cell_size).floor() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell_size).floor() as usize + 1).max(1);
        let mut cells = vec![Vec::new(); nx * ny];
        for (i, p) in points.iter().enumerate() {
            let cx = (((p.pos.x - lo.x) / cell_size).floor() as usize).min(nx - 1);
            let cy = (((p.pos.y - lo.y) / cell_size).floor() as usize).min(ny - 1);
            cells[cy * nx + cx].push(i as u32);
        }
        GridIndex { pts: points, cells, origin: lo, cell_size, nx }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn point(&self, id: usize) -> &IndexedPoint {
        &self.pts[id]
    }

    fn cell_min_dist(&self, cell: usize, q: Point2) -> f64 {
        let cx = cell % self.nx;
        let cy = cell / self.nx;
        let x0 = self.origin.x + cx as f64 * self.cell_size;
        let y0 = self.origin.y + cy as f64 * self.cell_size;
        let dx = (x0 - q.x).max(q.x - (x0 + self.cell_size)).max(0.0);
        let dy = (y0 - q.y).max(q.y - (y0 + self.cell_size)).max(0.0);
        (dx * dx + dy * dy).sqrt()
    }

    /// Streams point ids ordered by `(distance, owner, location)`.
    pub fn nearest_stream(&self, q: Point2) -> NearestStream<'_> {
        let mut frontier = BinaryHeap::new();
        for cell in 0..self.cells.len() {
            if !self.cells[cell].is_empty() {
                frontier.push(Reverse(CellEntry { bound: self.cell_min_dist(cell, q), cell }));
            }
        }
        NearestStream { index: self, q, frontier, candidates: BinaryHeap::new() }
    }

    /// Ids of the `m` nearest points under the total order.
    pub fn k_nearest(&self, q: Point2, m: usize) -> Vec<u32> {
        self.nearest_stream(q).take(m).collect()
    }
}

pub struct NearestStream<'a> {
    index: &'a GridIndex,
    q: Point2,
    frontier: BinaryHeap<Reverse<CellEntry>>,
    candidates: BinaryHeap<Reverse<(Key, u32)>>,
}

impl Iterator for NearestStream<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        loop {
            let next_bound = self.frontier.peek().map(|Reverse(e)| e.bound);
            if let Some(Reverse((key, id))) = self.candidates.peek() {
                if next_bound.is_none_or(|b| key.d <= b) {
                    let id = *id;
                    self.candidates.pop();
                    return Some(id);
                }
            }
            let Reverse(entry) = self.frontier.pop()?;
            for &id in &self.index.cells[entry.cell] {
                let p = &self.index.pts[id as usize];
                let key = Key { d: dist(self.q, p.pos), owner: p.owner, loc: p.loc };
                self.candidates.push(Reverse((key, id)));
            }
        }
    }
}
