//! Obstacle geometry: unions of rectangles, ellipses and discs.

use serde::{Deserialize, Serialize};

/// Primitive region used to describe obstacles and partition cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Open box (x0, x1) × (y0, y1).
    Rectangle { x: [f64; 2], y: [f64; 2] },
    Ellipse { center: [f64; 2], radii: [f64; 2] },
    Disc { center: [f64; 2], radius: f64 },
}

/// Axis-aligned bounding box `[xmin, xmax, ymin, ymax]`.
pub type BBox = [f64; 4];

impl Shape {
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Shape::Rectangle { x: [x0, x1], y: [y0, y1] }
    }

    pub fn disc(cx: f64, cy: f64, r: f64) -> Self {
        Shape::Disc { center: [cx, cy], radius: r }
    }

    pub fn ellipse(cx: f64, cy: f64, rx: f64, ry: f64) -> Self {
        Shape::Ellipse { center: [cx, cy], radii: [rx, ry] }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Rectangle { x: [x0, x1], y: [y0, y1] } => x > x0 && x < x1 && y > y0 && y < y1,
            Shape::Ellipse { center: [cx, cy], radii: [rx, ry] } => {
                let u = (x - cx) / rx;
                let v = (y - cy) / ry;
                u * u + v * v < 1.0
            }
            Shape::Disc { center: [cx, cy], radius } => {
                let dx = x - cx;
                let dy = y - cy;
                dx * dx + dy * dy < radius * radius
            }
        }
    }

    pub fn bbox(&self) -> BBox {
        match *self {
            Shape::Rectangle { x, y } => [x[0], x[1], y[0], y[1]],
            Shape::Ellipse { center: [cx, cy], radii: [rx, ry] } => [cx - rx, cx + rx, cy - ry, cy + ry],
            Shape::Disc { center: [cx, cy], radius } => {
                [cx - radius, cx + radius, cy - radius, cy + radius]
            }
        }
    }

    /// Extent along x and y.
    pub fn extent(&self) -> [f64; 2] {
        let b = self.bbox();
        [b[1] - b[0], b[3] - b[2]]
    }

    pub fn area(&self) -> f64 {
        match *self {
            Shape::Rectangle { x, y } => (x[1] - x[0]) * (y[1] - y[0]),
            Shape::Ellipse { radii, .. } => std::f64::consts::PI * radii[0] * radii[1],
            Shape::Disc { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    fn is_valid(&self) -> bool {
        let finite = |v: &[f64]| v.iter().all(|c| c.is_finite());
        match self {
            Shape::Rectangle { x, y } => finite(x) && finite(y) && x[1] > x[0] && y[1] > y[0],
            Shape::Ellipse { center, radii } => {
                finite(center) && finite(radii) && radii[0] > 0.0 && radii[1] > 0.0
            }
            Shape::Disc { center, radius } => finite(center) && radius.is_finite() && *radius > 0.0,
        }
    }
}

/// Union of primitive shapes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub shapes: Vec<Shape>,
}

impl Region {
    pub fn new(shapes: Vec<Shape>) -> Self {
        Region { shapes }
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.shapes.iter().any(|s| s.contains(x, y))
    }

    pub fn bbox(&self) -> Option<BBox> {
        let mut it = self.shapes.iter().map(Shape::bbox);
        let first = it.next()?;
        Some(it.fold(first, |a, b| {
            [a[0].min(b[0]), a[1].max(b[1]), a[2].min(b[2]), a[3].max(b[3])]
        }))
    }

    /// Checks every primitive is well formed and sits inside the strip
    /// (−ℓ, ℓ) × [0, 1]. Shapes may touch the walls y = 0 and y = 1.
    pub fn validate(&self, ell: f64) -> Result<(), String> {
        if self.shapes.is_empty() {
            return Err("obstacle region is empty".into());
        }
        for (i, s) in self.shapes.iter().enumerate() {
            if !s.is_valid() {
                return Err(format!("shape {i} is degenerate: {s:?}"));
            }
            let b = s.bbox();
            if b[0] <= -ell || b[1] >= ell {
                return Err(format!("shape {i} is not strictly inside (-{ell}, {ell}) along x"));
            }
            if b[2] < 0.0 || b[3] > 1.0 {
                return Err(format!("shape {i} leaves the guide 0 <= y <= 1"));
            }
        }
        Ok(())
    }
}
