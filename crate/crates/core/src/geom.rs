//! Exact integer predicates shared by the plane-graph and arrangement code.

use std::cmp::Ordering;

pub type Point = (i64, i64);

#[inline]
pub fn sub(a: Point, b: Point) -> (i128, i128) {
    (a.0 as i128 - b.0 as i128, a.1 as i128 - b.1 as i128)
}

#[inline]
pub fn cross(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

#[inline]
pub fn dot(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.0 + a.1 * b.1
}

/// Sign of the turn `a -> b -> c`: positive for counterclockwise.
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> i128 {
    cross(sub(b, a), sub(c, a)).signum()
}

/// 0 for directions in `[0, pi)`, 1 for `[pi, 2pi)`.
#[inline]
fn half(v: (i128, i128)) -> u8 {
    if v.1 > 0 || (v.1 == 0 && v.0 > 0) {
        0
    } else {
        1
    }
}

/// Compares the polar angles of two nonzero vectors, measured counterclockwise
/// from the positive x axis in `[0, 2pi)`.
pub fn angle_cmp(a: (i128, i128), b: (i128, i128)) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(a, b).signum()))
}

/// Winding contribution of turning from direction `d1` to `d2` at a corner
/// whose face-side angle is a full turn when the directions are opposite.
/// Returns +1/-1 when the sweep passes the positive x axis.
pub fn sweep_crossings(d1: (i128, i128), d2: (i128, i128)) -> i32 {
    let c = cross(d1, d2);
    let straight = c == 0 && dot(d1, d2) > 0;
    if straight {
        return 0;
    }
    let ccw = c > 0;
    let ord = angle_cmp(d2, d1);
    if ccw {
        // counterclockwise sweep wraps through angle 0 when the target angle is smaller
        i32::from(ord == Ordering::Less)
    } else {
        // clockwise sweep (including the u-turn at a leaf)
        -i32::from(ord == Ordering::Greater)
    }
}

/// Closed-segment intersection test; touching at endpoints counts.
pub fn segments_touch(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(q1, q2, p1))
        || (d2 == 0 && on_segment(q1, q2, p2))
        || (d3 == 0 && on_segment(p1, p2, q1))
        || (d4 == 0 && on_segment(p1, p2, q2))
}

/// `p` collinear with `a b` lies within their bounding box.
#[inline]
pub fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_order_is_counterclockwise() {
        let dirs = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
        for w in dirs.windows(2) {
            assert_eq!(angle_cmp(w[0], w[1]), Ordering::Less, "{:?}", w);
        }
        assert_eq!(angle_cmp((2, 2), (1, 1)), Ordering::Equal);
    }

    #[test]
    fn touch_cases() {
        assert!(segments_touch((0, 0), (2, 2), (0, 2), (2, 0)));
        assert!(!segments_touch((0, 0), (2, 0), (0, 1), (2, 1)));
        assert!(segments_touch((0, 0), (2, 0), (2, 0), (3, 5)));
        assert!(segments_touch((0, 0), (4, 0), (2, 0), (2, 3)));
        assert!(!segments_touch((0, 0), (1, 0), (2, 0), (3, 0)));
    }

    #[test]
    fn full_turn_of_square_winds_once() {
        let d = [(1, 0), (0, 1), (-1, 0), (0, -1)];
        let total: i32 = (0..4).map(|i| sweep_crossings(d[i], d[(i + 1) % 4])).sum();
        assert_eq!(total, 1);
        let rev = [(0, -1), (-1, 0), (0, 1), (1, 0)];
        let total: i32 = (0..4).map(|i| sweep_crossings(rev[i], rev[(i + 1) % 4])).sum();
        assert_eq!(total, -1);
    }
}
