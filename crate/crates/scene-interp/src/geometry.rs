//! Qualitative spatial relations between axis-aligned bounding boxes.
//!
//! Boxes live in image coordinates: x grows rightward, y grows downward,
//! so "up" means a smaller center y. All rectangles are treated as closed
//! point sets except where a predicate explicitly works on open interiors
//! (see [`BoundingBox::overlaps`]).

use std::fmt;

/// Axis-aligned bounding box given by its top-left corner and extent.
///
/// Width and height are expected to be positive; the parsers reject
/// degenerate boxes, this type does not re-validate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

/// Requested side for [`BoundingBox::horizontal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizontalPos {
    Left,
    Right,
}

/// Requested side for [`BoundingBox::vertical`]. `Up` is toward smaller y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerticalPos {
    Up,
    Down,
}

/// Requested quadrant for [`BoundingBox::diagonal`], compass-style:
/// north is up (smaller y), east is right (greater x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalPos {
    Ne,
    Nw,
    Se,
    Sw,
}

/// Whether a proximity threshold is in pixels or relative to the extent
/// of the merged box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NearMode {
    Absolute,
    Relative,
}

/// Rejected threshold arguments.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("absolute proximity threshold must be finite and >= 0, got {0}")]
    BadAbsoluteThreshold(f64),
    #[error("relative proximity threshold must be within [0, 1], got {0}")]
    BadRelativeThreshold(f64),
}

impl fmt::Display for BoundingBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bb({}, {}, {}, {})", self.x, self.y, self.w, self.h)
    }
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        BoundingBox { x, y, w, h }
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Length of the box diagonal.
    pub fn diagonal_len(&self) -> f64 {
        self.w.hypot(self.h)
    }

    /// Smallest box enclosing both operands.
    pub fn merge(&self, other: &BoundingBox) -> BoundingBox {
        let x = self.x.min(other.x);
        let y = self.y.min(other.y);
        let right = self.right().max(other.right());
        let bottom = self.bottom().max(other.bottom());
        BoundingBox::new(x, y, right - x, bottom - y)
    }

    /// Euclidean gap between the two closed rectangles: 0 when they touch
    /// or intersect, otherwise the distance between their nearest points.
    pub fn distance(&self, other: &BoundingBox) -> f64 {
        let dx = (other.x - self.right())
            .max(self.x - other.right())
            .max(0.0);
        let dy = (other.y - self.bottom())
            .max(self.y - other.bottom())
            .max(0.0);
        dx.hypot(dy)
    }

    /// Closed containment: every point of `other` lies inside `self`,
    /// boundary included. Reflexive.
    pub fn contains(&self, other: &BoundingBox) -> bool {
        self.x <= other.x
            && self.y <= other.y
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    /// True when the closed rectangles share no point. Touching edges or
    /// corners means not disjoint.
    pub fn disjoint(&self, other: &BoundingBox) -> bool {
        self.x > other.right()
            || other.x > self.right()
            || self.y > other.bottom()
            || other.y > self.bottom()
    }

    /// Proper overlap: the open interiors intersect and neither box
    /// contains the other. Touching along an edge is not overlap, nor is
    /// full containment.
    pub fn overlaps(&self, other: &BoundingBox) -> bool {
        let interiors = self.x < other.right()
            && other.x < self.right()
            && self.y < other.bottom()
            && other.y < self.bottom();
        interiors && !self.contains(other) && !other.contains(self)
    }

    /// Horizontal alignment: the y-extents intersect (closed intervals).
    /// With a side given, additionally requires this box's center to lie
    /// on that side of the other box's center.
    pub fn horizontal(&self, other: &BoundingBox, pos: Option<HorizontalPos>) -> bool {
        let aligned = self.y <= other.bottom() && other.y <= self.bottom();
        aligned
            && match pos {
                None => true,
                Some(HorizontalPos::Left) => self.center().0 < other.center().0,
                Some(HorizontalPos::Right) => self.center().0 > other.center().0,
            }
    }

    /// Vertical alignment: the x-extents intersect (closed intervals).
    /// `Up` means this box's center is above the other's (smaller y).
    pub fn vertical(&self, other: &BoundingBox, pos: Option<VerticalPos>) -> bool {
        let aligned = self.x <= other.right() && other.x <= self.right();
        aligned
            && match pos {
                None => true,
                Some(VerticalPos::Up) => self.center().1 < other.center().1,
                Some(VerticalPos::Down) => self.center().1 > other.center().1,
            }
    }

    /// Diagonal placement: both the x-extents and the y-extents are
    /// disjoint. The quadrant names where this box sits relative to the
    /// other, by centers.
    pub fn diagonal(&self, other: &BoundingBox, pos: Option<DiagonalPos>) -> bool {
        let x_apart = self.x > other.right() || other.x > self.right();
        let y_apart = self.y > other.bottom() || other.y > self.bottom();
        if !(x_apart && y_apart) {
            return false;
        }
        let (sx, sy) = self.center();
        let (ox, oy) = other.center();
        match pos {
            None => true,
            Some(DiagonalPos::Ne) => sx > ox && sy < oy,
            Some(DiagonalPos::Nw) => sx < ox && sy < oy,
            Some(DiagonalPos::Se) => sx > ox && sy > oy,
            Some(DiagonalPos::Sw) => sx < ox && sy > oy,
        }
    }

    /// Absolute proximity: gap strictly below `threshold` pixels.
    pub fn abs_near(&self, other: &BoundingBox, threshold: f64) -> Result<bool, GeometryError> {
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(GeometryError::BadAbsoluteThreshold(threshold));
        }
        Ok(self.distance(other) < threshold)
    }

    /// Relative proximity: gap divided by the diagonal of the merged box
    /// is at most `threshold`. Scale invariant; threshold lives in [0, 1].
    pub fn rel_near(&self, other: &BoundingBox, threshold: f64) -> Result<bool, GeometryError> {
        if !threshold.is_finite() || !(0.0..=1.0).contains(&threshold) {
            return Err(GeometryError::BadRelativeThreshold(threshold));
        }
        let ratio = self.distance(other) / self.merge(other).diagonal_len();
        Ok(ratio <= threshold)
    }
}

/// Proximity under either mode, used when wiring rule thresholds through.
pub fn near(
    a: &BoundingBox,
    b: &BoundingBox,
    threshold: f64,
    mode: NearMode,
) -> Result<bool, GeometryError> {
    match mode {
        NearMode::Absolute => a.abs_near(b, threshold),
        NearMode::Relative => a.rel_near(b, threshold),
    }
}

/// Group check: at least two boxes, and the graph whose edges connect
/// near pairs (per `mode` and `threshold`) is connected. Empty and
/// singleton slices are simply not groups, not errors.
pub fn group(bbs: &[BoundingBox], threshold: f64, mode: NearMode) -> Result<bool, GeometryError> {
    match mode {
        NearMode::Absolute if !threshold.is_finite() || threshold < 0.0 => {
            return Err(GeometryError::BadAbsoluteThreshold(threshold));
        }
        NearMode::Relative if !threshold.is_finite() || !(0.0..=1.0).contains(&threshold) => {
            return Err(GeometryError::BadRelativeThreshold(threshold));
        }
        _ => {}
    }
    if bbs.len() < 2 {
        return Ok(false);
    }
    let mut reached = vec![false; bbs.len()];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..bbs.len() {
            if !reached[j] && near(&bbs[i], &bbs[j], threshold, mode)? {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    Ok(reached.into_iter().all(|r| r))
}
