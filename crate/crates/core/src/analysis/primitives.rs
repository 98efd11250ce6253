//! Exact triangle–triangle distance and intersection kernels.

use crate::geom::Vec3;

pub type Triangle = [Vec3; 3];

/// Squared distance between segments `p1q1` and `p2q2`.
pub fn segment_segment_dist2(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    const EPS: f64 = 1e-300;

    let (s, t) = if a <= EPS && e <= EPS {
        (0.0, 0.0)
    } else if a <= EPS {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = d1.dot(&r);
        if e <= EPS {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (c1 - c2).norm_squared()
}

/// Closest point on triangle `abc` to `p`, by Voronoi-region classification.
pub fn closest_point_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// True when segment `pq` crosses the plane of `tri` at a point inside the
/// triangle. Segments lying in the triangle's plane are not reported.
pub fn segment_pierces_triangle(p: &Vec3, q: &Vec3, tri: &Triangle) -> bool {
    let [a, b, c] = tri;
    let n = (b - a).cross(&(c - a));
    let dp = n.dot(&(p - a));
    let dq = n.dot(&(q - a));
    if (dp > 0.0 && dq > 0.0) || (dp < 0.0 && dq < 0.0) || dp == dq {
        return false;
    }
    let x = p + (q - p) * (dp / (dp - dq));
    let e0 = (b - a).cross(&(x - a)).dot(&n);
    let e1 = (c - b).cross(&(x - b)).dot(&n);
    let e2 = (a - c).cross(&(x - c)).dot(&n);
    e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0
}

/// Non-coplanar triangle intersection: some edge of one pierces the other.
pub fn triangles_intersect(t1: &Triangle, t2: &Triangle) -> bool {
    (0..3).any(|i| segment_pierces_triangle(&t1[i], &t1[(i + 1) % 3], t2))
        || (0..3).any(|i| segment_pierces_triangle(&t2[i], &t2[(i + 1) % 3], t1))
}

/// Minimum Euclidean distance between two triangles; zero when they intersect.
/// Bit-identical under swapping the arguments.
pub fn triangle_distance(t1: &Triangle, t2: &Triangle) -> f64 {
    let key = |t: &Triangle| t.map(|v| [v.x, v.y, v.z]);
    if key(t2).partial_cmp(&key(t1)) == Some(std::cmp::Ordering::Less) {
        return triangle_distance_ordered(t2, t1);
    }
    triangle_distance_ordered(t1, t2)
}

fn triangle_distance_ordered(t1: &Triangle, t2: &Triangle) -> f64 {
    if triangles_intersect(t1, t2) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..3 {
        for j in 0..3 {
            let d = segment_segment_dist2(&t1[i], &t1[(i + 1) % 3], &t2[j], &t2[(j + 1) % 3]);
            best = best.min(d);
        }
    }
    for p in t1 {
        best = best.min((p - closest_point_on_triangle(p, &t2[0], &t2[1], &t2[2])).norm_squared());
    }
    for p in t2 {
        best = best.min((p - closest_point_on_triangle(p, &t1[0], &t1[1], &t1[2])).norm_squared());
    }
    best.sqrt()
}

/// Ray/triangle hit with `t > 0` (Möller–Trumbore).
pub fn ray_hits_triangle(origin: &Vec3, dir: &Vec3, tri: &Triangle) -> bool {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() < 1e-300 {
        return false;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(&h) * inv;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    e2.dot(&q) * inv > 0.0
}
