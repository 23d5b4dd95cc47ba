//! Planar helpers shared by the developing-map code.

use nalgebra::{Isometry2, Point2, Vector2};
pub use std::f64::consts::PI;

pub type Vec2 = Vector2<f64>;
pub type Pt2 = Point2<f64>;
pub type Motion = Isometry2<f64>;

pub const TAU: f64 = 2.0 * PI;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Counterclockwise rotation by a quarter turn.
#[inline]
pub fn rot90(a: &Vec2) -> Vec2 {
    Vec2::new(-a.y, a.x)
}

#[inline]
pub fn rotate(a: &Vec2, angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(c * a.x - s * a.y, s * a.x + c * a.y)
}

/// Angle swept counterclockwise from `a` to `b`, in `[0, 2π)`.
pub fn ccw_angle(a: &Vec2, b: &Vec2) -> f64 {
    let ang = cross(a, b).atan2(a.dot(b));
    if ang < 0.0 {
        ang + TAU
    } else {
        ang
    }
}

/// Reduces an angle into `[0, period)`.
pub fn wrap(angle: f64, period: f64) -> f64 {
    let r = angle.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Orientation-preserving isometry sending `a0 -> a1` and the direction of
/// `b0 - a0` onto the direction of `b1 - a1`.
pub fn motion_between(a0: &Pt2, b0: &Pt2, a1: &Pt2, b1: &Pt2) -> Motion {
    let d0 = b0 - a0;
    let d1 = b1 - a1;
    let ang = cross(&d0, &d1).atan2(d0.dot(&d1));
    let rot = nalgebra::UnitComplex::new(ang);
    let t = a1.coords - rot * a0.coords;
    Isometry2::from_parts(nalgebra::Translation2::from(t), rot)
}

/// Parameter `s` along `p + s (q - p)` and `t` along `a + t (b - a)` of the
/// intersection of two segments' supporting lines, if not parallel.
pub fn line_params(p: &Pt2, q: &Pt2, a: &Pt2, b: &Pt2) -> Option<(f64, f64)> {
    let r = q - p;
    let s = b - a;
    let den = cross(&r, &s);
    if den.abs() < 1e-300 {
        return None;
    }
    let w = a - p;
    Some((cross(&w, &s) / den, cross(&w, &r) / den))
}

/// Distance from point `x` to segment `[a, b]`.
pub fn point_segment_distance(x: &Pt2, a: &Pt2, b: &Pt2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (x - a).norm();
    }
    let t = ((x - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (x - (a + ab * t)).norm()
}

/// Signed area of a closed polygon (positive when counterclockwise).
pub fn polygon_area(pts: &[Pt2]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        acc += a.x * b.y - a.y * b.x;
    }
    0.5 * acc
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(x: &Pt2, pts: &[Pt2]) -> bool {
    let n = pts.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (pts[i], pts[j]);
        if (a.y > x.y) != (b.y > x.y) {
            let xi = (b.x - a.x) * (x.y - a.y) / (b.y - a.y) + a.x;
            if x.x < xi {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Heron's formula in the numerically stable ordering.
pub fn heron(l: [f64; 3]) -> f64 {
    let mut v = l;
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let (a, b, c) = (v[0], v[1], v[2]);
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::close;

    mod approx_eq {
        pub fn close(a: f64, b: f64) -> bool {
            (a - b).abs() < 1e-12
        }
    }

    #[test]
    fn ccw_angle_quadrants() {
        let x = Vec2::new(1.0, 0.0);
        assert!(close(ccw_angle(&x, &Vec2::new(0.0, 1.0)), PI / 2.0));
        assert!(close(ccw_angle(&x, &Vec2::new(0.0, -1.0)), 1.5 * PI));
        assert!(close(ccw_angle(&x, &x), 0.0));
    }

    #[test]
    fn motion_maps_segment() {
        let m = motion_between(
            &Pt2::new(0.0, 0.0),
            &Pt2::new(1.0, 0.0),
            &Pt2::new(2.0, 3.0),
            &Pt2::new(2.0, 5.0),
        );
        let p = m * Pt2::new(1.0, 0.0);
        assert!(close(p.x, 2.0) && close(p.y, 4.0));
    }

    #[test]
    fn heron_right_triangle() {
        assert!(close(heron([3.0, 4.0, 5.0]), 6.0));
    }
}
