#![allow(dead_code)]

//! Independent planar hull oracle: Andrew's monotone chain plus an
//! orientation-sign point-in-polygon test. Shares no code with the LP path.

pub type P2 = [f64; 2];

pub fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull vertices without collinear points.
pub fn convex_hull(points: &[P2]) -> Vec<P2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<P2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Inside or on the boundary of a CCW convex polygon.
pub fn in_convex_polygon(poly: &[P2], q: P2) -> bool {
    (0..poly.len()).all(|i| cross(poly[i], poly[(i + 1) % poly.len()], q) >= 0.0)
}

fn segment_distance(a: P2, b: P2, q: P2) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((q[0] - a[0]) * dx + (q[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (px, py) = (a[0] + t * dx, a[1] + t * dy);
    ((q[0] - px).powi(2) + (q[1] - py).powi(2)).sqrt()
}

/// Euclidean distance from `q` to the polygon's boundary.
pub fn boundary_distance(poly: &[P2], q: P2) -> f64 {
    (0..poly.len())
        .map(|i| segment_distance(poly[i], poly[(i + 1) % poly.len()], q))
        .fold(f64::INFINITY, f64::min)
}
