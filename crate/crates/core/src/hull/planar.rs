//! Two-dimensional hulls by Andrew's monotone chain.

/// Indices of the hull vertices of the planar point set `xy` (flat pairs),
/// counter-clockwise, collinear points dropped. `eps` is an area tolerance
/// for the orientation test.
pub fn monotone_chain(xy: &[f64], eps: f64) -> Vec<usize> {
    let m = xy.len() / 2;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        xy[2 * a]
            .total_cmp(&xy[2 * b])
            .then(xy[2 * a + 1].total_cmp(&xy[2 * b + 1]))
            .then(a.cmp(&b))
    });
    if m < 3 {
        return order;
    }
    let cross = |o: usize, a: usize, b: usize| {
        (xy[2 * a] - xy[2 * o]) * (xy[2 * b + 1] - xy[2 * o + 1])
            - (xy[2 * a + 1] - xy[2 * o + 1]) * (xy[2 * b] - xy[2 * o])
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * m);
    for &i in &order {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= eps {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for &i in order.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= eps {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

/// Shoelace area of a polygon given by vertex indices into `xy`.
pub fn polygon_area(xy: &[f64], ring: &[usize]) -> f64 {
    let mut twice = 0.0;
    for (a, &i) in ring.iter().enumerate() {
        let j = ring[(a + 1) % ring.len()];
        twice += xy[2 * i] * xy[2 * j + 1] - xy[2 * j] * xy[2 * i + 1];
    }
    0.5 * twice.abs()
}

/// Area of the convex hull of `xy`.
pub fn hull_area(xy: &[f64]) -> f64 {
    let scale = xy.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let ring = monotone_chain(xy, 1e-14 * scale * scale);
    if ring.len() < 3 {
        return 0.0;
    }
    polygon_area(xy, &ring)
}
