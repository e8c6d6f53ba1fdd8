//! 2D vectors, axis-aligned boxes and tile-grid collision queries.
//!
//! World units are tiles: cell `(x, y)` covers `[x, x + 1] × [y, y + 1]`
//! with `y` growing upward. Everything here is plain `f64` arithmetic using
//! only `+ - * /`, comparisons and `sqrt`, evaluated in a fixed order, so
//! results reproduce bit for bit on any IEEE-754 platform.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Slack used when deciding whether two edges are in contact. Positions are
/// snapped exactly onto tile edges, so this only absorbs rounding noise left
/// by moving platforms.
pub const CONTACT_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn length(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// Euclidean distance between two points.
pub fn distance(a: Vec2, b: Vec2) -> f64 {
    (a - b).length()
}

/// Steps `current` toward `target` by at most `max_delta`, landing exactly on
/// `target` when it is within reach.
pub fn move_towards(current: Vec2, target: Vec2, max_delta: f64) -> Vec2 {
    let to = target - current;
    let sq = to.x * to.x + to.y * to.y;
    if sq == 0.0 || sq <= max_delta * max_delta {
        return target;
    }
    let dist = sq.sqrt();
    Vec2::new(
        current.x + to.x / dist * max_delta,
        current.y + to.y / dist * max_delta,
    )
}

/// Axis-aligned box stored as center plus strictly positive half extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub center: Vec2,
    pub half_extents: Vec2,
}

impl Aabb {
    pub fn new(center: Vec2, half_extents: Vec2) -> Self {
        debug_assert!(half_extents.x > 0.0 && half_extents.y > 0.0);
        Self {
            center,
            half_extents,
        }
    }

    /// Unit box of grid cell `cell`.
    pub fn of_cell(cell: Cell) -> Self {
        Self::new(
            Vec2::new(cell.x as f64 + 0.5, cell.y as f64 + 0.5),
            Vec2::new(0.5, 0.5),
        )
    }

    pub fn min(&self) -> Vec2 {
        self.center - self.half_extents
    }

    pub fn max(&self) -> Vec2 {
        self.center + self.half_extents
    }

    pub fn translated(&self, by: Vec2) -> Self {
        Self {
            center: self.center + by,
            half_extents: self.half_extents,
        }
    }

    /// Grid cells whose interiors this box's interior may touch, widened by
    /// one cell of slack for callers that want closed-interval checks.
    pub fn cell_span(&self) -> (i64, i64, i64, i64) {
        let min = self.min();
        let max = self.max();
        (
            min.x.floor() as i64 - 1,
            max.x.floor() as i64 + 1,
            min.y.floor() as i64 - 1,
            max.y.floor() as i64 + 1,
        )
    }
}

/// Closed-interval overlap: boxes sharing only an edge still overlap.
pub fn aabb_overlap(a: &Aabb, b: &Aabb) -> bool {
    let (amin, amax) = (a.min(), a.max());
    let (bmin, bmax) = (b.min(), b.max());
    amin.x <= bmax.x && bmin.x <= amax.x && amin.y <= bmax.y && bmin.y <= amax.y
}

/// Open-interval overlap: true only if the interiors intersect.
pub fn interiors_overlap(a: &Aabb, b: &Aabb) -> bool {
    let (amin, amax) = (a.min(), a.max());
    let (bmin, bmax) = (b.min(), b.max());
    amin.x < bmax.x && bmin.x < amax.x && amin.y < bmax.y && bmin.y < amax.y
}

/// Integer grid cell in world orientation (`y` up).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Cell {
    pub x: i64,
    pub y: i64,
}

impl Cell {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

/// Anything the player can collide with: a tile grid plus optional free
/// boxes (moving platforms).
pub trait Solids {
    fn solid_cell(&self, cell: Cell) -> bool;

    fn solid_boxes(&self) -> &[Aabb] {
        &[]
    }
}

/// Grid-only view that hides a solid set's boxes.
pub struct CellsOnly<'a, S: Solids + ?Sized>(pub &'a S);

impl<S: Solids + ?Sized> Solids for CellsOnly<'_, S> {
    fn solid_cell(&self, cell: Cell) -> bool {
        self.0.solid_cell(cell)
    }
}

/// Grid plus a list of extra solid boxes.
pub struct WithBoxes<'a, S: Solids + ?Sized> {
    pub cells: &'a S,
    pub boxes: &'a [Aabb],
}

impl<S: Solids + ?Sized> Solids for WithBoxes<'_, S> {
    fn solid_cell(&self, cell: Cell) -> bool {
        self.cells.solid_cell(cell)
    }

    fn solid_boxes(&self) -> &[Aabb] {
        self.boxes
    }
}

fn overlaps_open(lo_a: f64, hi_a: f64, lo_b: f64, hi_b: f64) -> bool {
    lo_a < hi_b - CONTACT_EPSILON && lo_b < hi_a - CONTACT_EPSILON
}

/// True if `body` moved down by some amount in `(0, depth]` would run into a
/// solid cell or box lying below it.
pub fn probe_down<S: Solids + ?Sized>(body: &Aabb, depth: f64, solids: &S) -> bool {
    let (min, max) = (body.min(), body.max());
    let floor_lo = min.y - depth;
    let x0 = min.x.floor() as i64;
    let x1 = max.x.floor() as i64;
    let y0 = floor_lo.floor() as i64 - 1;
    let y1 = (min.y + CONTACT_EPSILON).floor() as i64;
    for cx in x0..=x1 {
        if !overlaps_open(cx as f64, cx as f64 + 1.0, min.x, max.x) {
            continue;
        }
        for cy in y0..=y1 {
            let top = cy as f64 + 1.0;
            if top >= floor_lo && top <= min.y + CONTACT_EPSILON && solids.solid_cell(Cell::new(cx, cy))
            {
                return true;
            }
        }
    }
    solids
        .solid_boxes()
        .iter()
        .any(|b| probe_down_box(body, depth, b))
}

/// Grounding probe against a single box.
pub fn probe_down_box(body: &Aabb, depth: f64, other: &Aabb) -> bool {
    let (min, max) = (body.min(), body.max());
    let (omin, omax) = (other.min(), other.max());
    overlaps_open(omin.x, omax.x, min.x, max.x)
        && omax.y >= min.y - depth
        && omax.y <= min.y + CONTACT_EPSILON
}

/// Result of [`slide_move`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlideResult {
    pub center: Vec2,
    pub hit_x: bool,
    pub hit_y: bool,
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
}

fn comp(v: Vec2, axis: Axis) -> f64 {
    match axis {
        Axis::X => v.x,
        Axis::Y => v.y,
    }
}

fn cell_at(along: i64, across: i64, axis: Axis) -> Cell {
    match axis {
        Axis::X => Cell::new(along, across),
        Axis::Y => Cell::new(across, along),
    }
}

/// Moves `body` along one axis, stopping at the first solid contact.
/// Returns the new center coordinate on that axis and whether it was clamped.
fn sweep_axis<S: Solids + ?Sized>(body: &Aabb, delta: f64, axis: Axis, solids: &S) -> (f64, bool) {
    let center = comp(body.center, axis);
    if delta == 0.0 {
        return (center, false);
    }
    let half = comp(body.half_extents, axis);
    let (min, max) = (body.min(), body.max());
    let other = match axis {
        Axis::X => Axis::Y,
        Axis::Y => Axis::X,
    };
    let (across_lo, across_hi) = (comp(min, other), comp(max, other));
    let c0 = across_lo.floor() as i64;
    let c1 = across_hi.floor() as i64;

    let mut limit: Option<f64> = None;
    if delta > 0.0 {
        let edge = comp(max, axis);
        let target = edge + delta;
        let mut along = (edge - CONTACT_EPSILON).floor() as i64;
        'scan: while (along as f64) <= target {
            if along as f64 >= edge - CONTACT_EPSILON {
                for across in c0..=c1 {
                    if overlaps_open(across as f64, across as f64 + 1.0, across_lo, across_hi)
                        && solids.solid_cell(cell_at(along, across, axis))
                    {
                        limit = Some(along as f64);
                        break 'scan;
                    }
                }
            }
            along += 1;
        }
        for b in solids.solid_boxes() {
            let (bmin, bmax) = (b.min(), b.max());
            let near = comp(bmin, axis);
            if overlaps_open(comp(bmin, other), comp(bmax, other), across_lo, across_hi)
                && near >= edge - CONTACT_EPSILON
                && near <= target
                && limit.is_none_or(|l| near < l)
            {
                limit = Some(near);
            }
        }
        match limit {
            None => (center + delta, false),
            Some(l) => {
                let mut c = l - half;
                while c + half > l {
                    c = c.next_down();
                }
                (c, true)
            }
        }
    } else {
        let edge = comp(min, axis);
        let target = edge + delta;
        // cell `along` has its far edge at along + 1
        let mut along = (edge + CONTACT_EPSILON).floor() as i64 - 1;
        'scan: while (along as f64 + 1.0) >= target {
            if along as f64 + 1.0 <= edge + CONTACT_EPSILON {
                for across in c0..=c1 {
                    if overlaps_open(across as f64, across as f64 + 1.0, across_lo, across_hi)
                        && solids.solid_cell(cell_at(along, across, axis))
                    {
                        limit = Some(along as f64 + 1.0);
                        break 'scan;
                    }
                }
            }
            along -= 1;
        }
        for b in solids.solid_boxes() {
            let (bmin, bmax) = (b.min(), b.max());
            let near = comp(bmax, axis);
            if overlaps_open(comp(bmin, other), comp(bmax, other), across_lo, across_hi)
                && near <= edge + CONTACT_EPSILON
                && near >= target
                && limit.is_none_or(|l| near > l)
            {
                limit = Some(near);
            }
        }
        match limit {
            None => (center + delta, false),
            Some(l) => {
                let mut c = l + half;
                while c - half < l {
                    c = c.next_up();
                }
                (c, true)
            }
        }
    }
}

/// Axis-separated move: x first, then y. Each axis stops flush against the
/// first solid it would enter. Callers keep each axis of `displacement`
/// within one tile.
pub fn slide_move<S: Solids + ?Sized>(body: &Aabb, displacement: Vec2, solids: &S) -> SlideResult {
    let (x, hit_x) = sweep_axis(body, displacement.x, Axis::X, solids);
    let moved = Aabb::new(Vec2::new(x, body.center.y), body.half_extents);
    let (y, hit_y) = sweep_axis(&moved, displacement.y, Axis::Y, solids);
    SlideResult {
        center: Vec2::new(x, y),
        hit_x,
        hit_y,
    }
}
