use serde::{Deserialize, Serialize};

/// Image-space box.
///
/// `center_u` runs from −1 (left image edge) to 1 (right edge); `center_v`
/// from −0.5 (top) to 0.5 (bottom) in units of image height. `width` and
/// `height` are fractions of the image width and height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub center_u: f64,
    pub center_v: f64,
    pub width: f64,
    pub height: f64,
}

/// Corner form in (u, v) image units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0).max(0.0) * (self.y1 - self.y0).max(0.0)
    }
}

impl BoundingBox {
    pub fn new(center_u: f64, center_v: f64, width: f64, height: f64) -> Self {
        Self { center_u, center_v, width, height }
    }

    pub fn is_finite(&self) -> bool {
        self.center_u.is_finite() && self.center_v.is_finite() && self.width.is_finite() && self.height.is_finite()
    }

    pub fn is_valid(&self) -> bool {
        self.is_finite() && self.width > 0.0 && self.height > 0.0
    }

    pub fn top(&self) -> f64 {
        self.center_v - 0.5 * self.height
    }

    /// A width fraction `w` spans `2w` horizontal units, so the half-extent is `w`.
    pub fn to_rect(&self) -> Rect {
        Rect {
            x0: self.center_u - self.width,
            y0: self.center_v - 0.5 * self.height,
            x1: self.center_u + self.width,
            y1: self.center_v + 0.5 * self.height,
        }
    }

    pub fn from_rect(r: &Rect) -> Self {
        Self {
            center_u: 0.5 * (r.x0 + r.x1),
            center_v: 0.5 * (r.y0 + r.y1),
            width: 0.5 * (r.x1 - r.x0),
            height: r.y1 - r.y0,
        }
    }

    /// Clips the box to the image; `None` if nothing of it remains.
    pub fn clipped(&self) -> Option<Self> {
        let r = self.to_rect();
        let c = Rect { x0: r.x0.max(-1.0), y0: r.y0.max(-0.5), x1: r.x1.min(1.0), y1: r.y1.min(0.5) };
        (c.x1 > c.x0 && c.y1 > c.y0).then(|| Self::from_rect(&c))
    }

    pub fn center_distance(&self, other: &BoundingBox) -> f64 {
        (self.center_u - other.center_u).hypot(self.center_v - other.center_v)
    }
}

pub fn iou_rect(a: &Rect, b: &Rect) -> f64 {
    let (area_a, area_b) = (a.area(), b.area());
    if area_a <= 0.0 || area_b <= 0.0 {
        return 0.0;
    }
    let inter = Rect { x0: a.x0.max(b.x0), y0: a.y0.max(b.y0), x1: a.x1.min(b.x1), y1: a.y1.min(b.y1) }.area();
    let union = area_a + area_b - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// Intersection over union; degenerate (zero-area) boxes score 0.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    if !a.is_finite() || !b.is_finite() {
        return 0.0;
    }
    iou_rect(&a.to_rect(), &b.to_rect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn iou_examples() {
        let a = BoundingBox::new(0.1, 0.0, 0.2, 0.5);
        assert_abs_diff_eq!(iou(&a, &a), 1.0);
        let far = BoundingBox::new(0.9, 0.0, 0.05, 0.5);
        assert_eq!(iou(&a, &far), 0.0);
        let r = iou_rect(&Rect::new(0.0, 0.0, 2.0, 2.0), &Rect::new(1.0, 1.0, 3.0, 3.0));
        assert_abs_diff_eq!(r, 1.0 / 7.0, epsilon = 1e-15);
        let flat = BoundingBox::new(0.1, 0.0, 0.2, 0.0);
        assert_eq!(iou(&flat, &flat), 0.0);
    }

    #[test]
    fn rect_round_trip() {
        let b = BoundingBox::new(-0.3, 0.1, 0.15, 0.4);
        let back = BoundingBox::from_rect(&b.to_rect());
        assert_abs_diff_eq!(back.center_u, b.center_u, epsilon = 1e-15);
        assert_abs_diff_eq!(back.width, b.width, epsilon = 1e-15);
        assert_abs_diff_eq!(back.height, b.height, epsilon = 1e-15);
    }

    fn arb_box() -> impl Strategy<Value = BoundingBox> {
        (-1.0..1.0f64, -0.5..0.5f64, 0.01..0.5f64, 0.01..1.0f64).prop_map(|(u, v, w, h)| BoundingBox::new(u, v, w, h))
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(a in arb_box(), b in arb_box()) {
            let x = iou(&a, &b);
            prop_assert!((0.0..=1.0).contains(&x));
            prop_assert_eq!(x, iou(&b, &a));
            if x == 1.0 {
                prop_assert!(a.to_rect() == b.to_rect());
            }
        }
    }
}
