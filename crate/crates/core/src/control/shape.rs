use std::f64::consts::PI;

use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeKind {
    Circle { radius: f64 },
    Rectangle { width: f64, height: f64 },
    Square { side: f64 },
}

/// Closed planar curve the swarm has to settle on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormationShape {
    pub kind: ShapeKind,
    pub center: Vec2,
}

impl FormationShape {
    pub fn circle(center: Vec2, radius: f64) -> Self {
        Self { kind: ShapeKind::Circle { radius }, center }
    }

    pub fn rectangle(center: Vec2, width: f64, height: f64) -> Self {
        Self { kind: ShapeKind::Rectangle { width, height }, center }
    }

    pub fn square(center: Vec2, side: f64) -> Self {
        Self { kind: ShapeKind::Square { side }, center }
    }

    pub fn validate(&self) -> Result<()> {
        let dims: &[f64] = match &self.kind {
            ShapeKind::Circle { radius } => &[*radius],
            ShapeKind::Rectangle { width, height } => &[*width, *height],
            ShapeKind::Square { side } => &[*side],
        };
        if dims.iter().any(|d| !d.is_finite() || *d <= 0.0) || !self.center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidInput(format!("shape dimensions must be positive and finite: {self:?}")));
        }
        Ok(())
    }

    fn half_extents(&self) -> Option<(f64, f64)> {
        match self.kind {
            ShapeKind::Circle { .. } => None,
            ShapeKind::Rectangle { width, height } => Some((width / 2.0, height / 2.0)),
            ShapeKind::Square { side } => Some((side / 2.0, side / 2.0)),
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self.kind {
            ShapeKind::Circle { radius } => 2.0 * PI * radius,
            ShapeKind::Rectangle { width, height } => 2.0 * (width + height),
            ShapeKind::Square { side } => 4.0 * side,
        }
    }

    /// Boundary point at arc length `s` (wrapped), counter-clockwise.
    pub fn point_at(&self, s: f64) -> Vec2 {
        let s = s.rem_euclid(self.perimeter());
        match self.kind {
            ShapeKind::Circle { radius } => {
                let a = s / radius;
                self.center + Vec2::new(radius * a.cos(), radius * a.sin())
            }
            _ => {
                let (hx, hy) = self.half_extents().unwrap();
                let (w, h) = (2.0 * hx, 2.0 * hy);
                let local = if s < w {
                    Vec2::new(-hx + s, -hy)
                } else if s < w + h {
                    Vec2::new(hx, -hy + (s - w))
                } else if s < 2.0 * w + h {
                    Vec2::new(hx - (s - w - h), hy)
                } else {
                    Vec2::new(-hx, hy - (s - 2.0 * w - h))
                };
                self.center + local
            }
        }
    }

    /// Euclidean distance from `p` to the boundary curve.
    pub fn distance_to_boundary(&self, p: &Vec2) -> f64 {
        let d = p - self.center;
        match self.kind {
            ShapeKind::Circle { radius } => (d.norm() - radius).abs(),
            _ => {
                let (hx, hy) = self.half_extents().unwrap();
                let (ax, ay) = (d.x.abs(), d.y.abs());
                if ax <= hx && ay <= hy {
                    (hx - ax).min(hy - ay)
                } else {
                    let ox = (ax - hx).max(0.0);
                    let oy = (ay - hy).max(0.0);
                    (ox * ox + oy * oy).sqrt()
                }
            }
        }
    }

    /// Largest number of boundary points with pairwise separation `min_sep`
    /// that can possibly exist (a necessary condition, exact for circles).
    pub(crate) fn capacity(&self, min_sep: f64) -> usize {
        if min_sep <= 0.0 {
            return usize::MAX;
        }
        match self.kind {
            ShapeKind::Circle { radius } => {
                if min_sep > 2.0 * radius {
                    return 1;
                }
                // chord of angle a is 2 r sin(a/2)
                let angle = 2.0 * (min_sep / (2.0 * radius)).asin();
                (2.0 * PI / angle + 1e-9).floor() as usize
            }
            _ => (self.perimeter() / min_sep + 1e-9).floor() as usize,
        }
    }
}
