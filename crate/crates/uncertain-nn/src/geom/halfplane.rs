//! Halfplanes and convex-polygon clipping.
//!
//! A halfplane keeps the side where `normal . x >= offset`. Regions are cut
//! out of a large axis-aligned seed box by clipping against one halfplane at
//! a time (Sutherland-Hodgman); convexity keeps every intermediate polygon
//! simple.

use super::Point2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halfplane {
    pub normal: Point2,
    pub offset: f64,
}

impl Halfplane {
    pub fn new(normal: Point2, offset: f64) -> Self {
        Halfplane { normal, offset }
    }

    /// Signed clearance of `q`, positive inside, in units of the normal.
    pub fn eval(&self, q: Point2) -> f64 {
        self.normal.dot(q) - self.offset
    }

    pub fn contains(&self, q: Point2) -> bool {
        self.eval(q) >= 0.0
    }

    /// Clearance normalized by the normal length, i.e. a distance.
    pub fn margin(&self, q: Point2) -> f64 {
        let len = self.normal.norm_sq().sqrt();
        if len <= f64::MIN_POSITIVE {
            if self.offset <= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }
        } else {
            self.eval(q) / len
        }
    }
}

/// Counterclockwise square polygon centered at `c` with half-side `h`.
pub fn box_polygon(c: Point2, h: f64) -> Vec<Point2> {
    vec![
        Point2::new(c.x - h, c.y - h),
        Point2::new(c.x + h, c.y - h),
        Point2::new(c.x + h, c.y + h),
        Point2::new(c.x - h, c.y + h),
    ]
}

/// Clips a convex polygon against one halfplane. Returns the kept part,
/// possibly empty.
pub fn clip(poly: &[Point2], hp: &Halfplane) -> Vec<Point2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let fc = hp.eval(cur);
        let fn_ = hp.eval(nxt);
        if fc >= 0.0 {
            out.push(cur);
        }
        if (fc > 0.0 && fn_ < 0.0) || (fc < 0.0 && fn_ > 0.0) {
            let s = fc / (fc - fn_);
            out.push(Point2::new(
                cur.x + s * (nxt.x - cur.x),
                cur.y + s * (nxt.y - cur.y),
            ));
        }
    }
    out
}

/// Exact crossing point of two halfplane boundary lines, if well conditioned.
pub fn line_intersection(a: &Halfplane, b: &Halfplane) -> Option<Point2> {
    let det = a.normal.x * b.normal.y - b.normal.x * a.normal.y;
    let scale = a.normal.norm_sq().sqrt() * b.normal.norm_sq().sqrt();
    if det.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(Point2::new(
        (a.offset * b.normal.y - b.offset * a.normal.y) / det,
        (a.normal.x * b.offset - b.normal.x * a.offset) / det,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_keeps_half_of_a_square() {
        let sq = box_polygon(Point2::new(0.0, 0.0), 1.0);
        // keep x >= 0
        let hp = Halfplane::new(Point2::new(1.0, 0.0), 0.0);
        let got = clip(&sq, &hp);
        assert_eq!(got.len(), 4);
        for p in &got {
            assert!(p.x >= -1e-12);
        }
        let area = polygon_area(&got);
        assert!((area - 2.0).abs() < 1e-12, "area {area}");
    }

    #[test]
    fn clip_to_empty() {
        let sq = box_polygon(Point2::new(0.0, 0.0), 1.0);
        let hp = Halfplane::new(Point2::new(1.0, 0.0), 5.0);
        assert!(clip(&sq, &hp).is_empty());
    }

    #[test]
    fn clip_no_op_when_inside() {
        let sq = box_polygon(Point2::new(0.0, 0.0), 1.0);
        let hp = Halfplane::new(Point2::new(0.0, 1.0), -5.0);
        assert_eq!(clip(&sq, &hp), sq);
    }

    #[test]
    fn corner_cut_adds_a_vertex() {
        let sq = box_polygon(Point2::new(0.0, 0.0), 1.0);
        // x + y <= 1.5  <=>  (-1,-1).x >= -1.5
        let hp = Halfplane::new(Point2::new(-1.0, -1.0), -1.5);
        let got = clip(&sq, &hp);
        assert_eq!(got.len(), 5);
        let area = polygon_area(&got);
        assert!((area - (4.0 - 0.125)).abs() < 1e-12, "area {area}");
    }

    #[test]
    fn line_intersection_basic() {
        let a = Halfplane::new(Point2::new(1.0, 0.0), 2.0);
        let b = Halfplane::new(Point2::new(0.0, 1.0), -3.0);
        let p = line_intersection(&a, &b).unwrap();
        assert!((p.x - 2.0).abs() < 1e-12 && (p.y + 3.0).abs() < 1e-12);
        assert!(line_intersection(&a, &a).is_none());
    }

    fn polygon_area(poly: &[Point2]) -> f64 {
        let n = poly.len();
        let mut acc = 0.0;
        for i in 0..n {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            acc += a.x * b.y - b.x * a.y;
        }
        0.5 * acc
    }
}
