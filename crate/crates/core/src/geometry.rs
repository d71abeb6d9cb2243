use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point in pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned box; `(x, y)` is the top-left corner in pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox<T> {
    pub x: T,
    pub y: T,
    pub w: T,
    pub h: T,
}

impl<T: Scalar> BoundingBox<T> {
    pub fn new(x: T, y: T, w: T, h: T) -> Self {
        Self { x, y, w, h }
    }

    /// Checked constructor rejecting non-finite coordinates and non-positive sizes.
    pub fn checked(x: T, y: T, w: T, h: T) -> Result<Self> {
        let b = Self { x, y, w, h };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite()) {
            return Err(Error::DegenerateBox(format!("non-finite box {self:?}")));
        }
        if self.w <= T::zero() || self.h <= T::zero() {
            return Err(Error::DegenerateBox(format!("non-positive size {self:?}")));
        }
        Ok(())
    }

    pub fn from_center(center: Point<T>, w: T, h: T) -> Self {
        let two = T::lit(2.0);
        Self { x: center.x - w / two, y: center.y - h / two, w, h }
    }

    pub fn center(&self) -> Point<T> {
        let two = T::lit(2.0);
        Point::new(self.x + self.w / two, self.y + self.h / two)
    }

    pub fn area(&self) -> T {
        self.w * self.h
    }

    pub fn translate(&self, dx: T, dy: T) -> Self {
        Self { x: self.x + dx, y: self.y + dy, ..*self }
    }

    /// Overlap area with `other` (zero when disjoint).
    pub fn intersection(&self, other: &Self) -> T {
        let ix = (self.x + self.w).min(other.x + other.w) - self.x.max(other.x);
        let iy = (self.y + self.h).min(other.y + other.h) - self.y.max(other.y);
        ix.max(T::zero()) * iy.max(T::zero())
    }

    pub fn cast<U: Scalar>(&self) -> BoundingBox<U> {
        BoundingBox {
            x: U::lit(self.x.to_f64_lossy()),
            y: U::lit(self.y.to_f64_lossy()),
            w: U::lit(self.w.to_f64_lossy()),
            h: U::lit(self.h.to_f64_lossy()),
        }
    }
}
