//! Planar convex hull distance.

/// Euclidean distance from the origin to the convex hull of `points`.
pub fn origin_distance_to_hull(points: &[(f64, f64)]) -> f64 {
    let hull = convex_hull(points);
    match hull.len() {
        0 => f64::INFINITY,
        1 => norm(hull[0]),
        2 => segment_distance(hull[0], hull[1]),
        n => {
            let inside = (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], (0.0, 0.0)) >= -1e-15);
            if inside {
                return 0.0;
            }
            (0..n)
                .map(|i| segment_distance(hull[i], hull[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

fn norm(p: (f64, f64)) -> f64 {
    p.0.hypot(p.1)
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn segment_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return norm(a);
    }
    let t = (-(a.0 * dx + a.1 * dy) / len2).clamp(0.0, 1.0);
    norm((a.0 + t * dx, a.1 + t * dy))
}

/// Andrew's monotone chain, counter-clockwise, collinear points dropped.
fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_segment_and_polygon() {
        assert_eq!(origin_distance_to_hull(&[(1.0, 0.0)]), 1.0);
        assert!((origin_distance_to_hull(&[(1.0, 0.0), (0.0, 1.0)]) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(origin_distance_to_hull(&[(1.0, 0.0), (-1.0, 0.0)]), 0.0);
        let tri = [(1.0, 0.0), (-0.5, 0.8), (-0.5, -0.8)];
        assert_eq!(origin_distance_to_hull(&tri), 0.0);
        let off = [(2.0, 1.0), (3.0, 1.0), (2.5, 2.0)];
        assert!((origin_distance_to_hull(&off) - 5f64.sqrt()).abs() < 1e-12);
    }
}
