use crate::error::{NepError, Result};
use crate::linalg::dense::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Target set for eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    /// Real segment `[a, b]`.
    Interval { a: f64, b: f64 },
    /// `[a, b] × [c, d]` in the complex plane.
    Rectangle { a: f64, b: f64, c: f64, d: f64 },
    Ellipse { center: (f64, f64), rx: f64, ry: f64 },
    /// Vertices in order.
    Polygon { vertices: Vec<(f64, f64)> },
}

fn seg_dist(z: C64, p: C64, q: C64) -> f64 {
    let d = q - p;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (z - p).norm();
    }
    let t = (((z - p) * d.conj()).re / l2).clamp(0.0, 1.0);
    (z - (p + d * t)).norm()
}

/// Distance from an outside point `(u, v)` to the ellipse `(x/a)² + (y/b)² = 1`.
/// The nearest point is `(a²u/(t+a²), b²v/(t+b²))` with `t ≥ 0` the root of a
/// decreasing function, found by bisection.
fn ellipse_dist(u: f64, v: f64, a: f64, b: f64) -> f64 {
    let f = |t: f64| (a * u / (t + a * a)).powi(2) + (b * v / (t + b * b)).powi(2) - 1.0;
    let (mut lo, mut hi) = (0.0, a.max(b) * u.hypot(v));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    (u - a * a * u / (t + a * a)).hypot(v - b * b * v / (t + b * b))
}

impl Region {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a <= b) {
            return Err(NepError::InvalidInput(format!("interval [{a}, {b}] is empty")));
        }
        Ok(Region::Interval { a, b })
    }

    pub fn rectangle(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(a < b && c < d) {
            return Err(NepError::InvalidInput("degenerate rectangle".into()));
        }
        Ok(Region::Rectangle { a, b, c, d })
    }

    pub fn ellipse(center: C64, rx: f64, ry: f64) -> Result<Self> {
        if !(rx > 0.0 && ry > 0.0) {
            return Err(NepError::InvalidInput("degenerate ellipse".into()));
        }
        Ok(Region::Ellipse { center: (center.re, center.im), rx, ry })
    }

    pub fn polygon(vertices: Vec<C64>) -> Result<Self> {
        let v: Vec<(f64, f64)> = vertices.iter().map(|z| (z.re, z.im)).collect();
        let r = Region::Polygon { vertices: v };
        if vertices.len() < 3 || r.polygon_area().abs() == 0.0 {
            return Err(NepError::InvalidInput("degenerate polygon".into()));
        }
        Ok(r)
    }

    fn polygon_area(&self) -> f64 {
        match self {
            Region::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let (x0, y0) = vertices[i];
                        let (x1, y1) = vertices[(i + 1) % n];
                        x0 * y1 - x1 * y0
                    })
                    .sum::<f64>()
                    * 0.5
            }
            _ => 0.0,
        }
    }

    fn vertices(&self) -> Vec<C64> {
        match self {
            Region::Interval { a, b } => vec![C64::new(*a, 0.0), C64::new(*b, 0.0)],
            Region::Rectangle { a, b, c, d } => vec![
                C64::new(*a, *c),
                C64::new(*b, *c),
                C64::new(*b, *d),
                C64::new(*a, *d),
            ],
            Region::Polygon { vertices } => vertices.iter().map(|&(x, y)| C64::new(x, y)).collect(),
            Region::Ellipse { .. } => Vec::new(),
        }
    }

    /// Closed-set membership.
    pub fn contains(&self, z: C64) -> bool {
        match self {
            Region::Interval { a, b } => z.im == 0.0 && z.re >= *a && z.re <= *b,
            Region::Rectangle { a, b, c, d } => z.re >= *a && z.re <= *b && z.im >= *c && z.im <= *d,
            Region::Ellipse { center, rx, ry } => {
                let u = (z.re - center.0) / rx;
                let v = (z.im - center.1) / ry;
                u * u + v * v <= 1.0
            }
            Region::Polygon { .. } => {
                let v = self.vertices();
                let n = v.len();
                let mut inside = false;
                for i in 0..n {
                    let (p, q) = (v[i], v[(i + 1) % n]);
                    if seg_dist(z, p, q) == 0.0 {
                        return true;
                    }
                    if (p.im > z.im) != (q.im > z.im) {
                        let x = p.re + (z.im - p.im) * (q.re - p.re) / (q.im - p.im);
                        if z.re < x {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// Characteristic size (length of an interval, diameter otherwise).
    pub fn size(&self) -> f64 {
        match self {
            Region::Interval { a, b } => b - a,
            Region::Rectangle { a, b, c, d } => (b - a).hypot(d - c),
            Region::Ellipse { rx, ry, .. } => 2.0 * rx.max(*ry),
            Region::Polygon { .. } => {
                let v = self.vertices();
                v.iter().flat_map(|p| v.iter().map(move |q| (p - q).norm())).fold(0.0, f64::max)
            }
        }
    }

    /// Distance from `z` to the set (zero inside).
    pub fn distance(&self, z: C64) -> f64 {
        if self.contains(z) {
            return 0.0;
        }
        match self {
            Region::Interval { a, b } => seg_dist(z, C64::new(*a, 0.0), C64::new(*b, 0.0)),
            Region::Ellipse { center, rx, ry } => ellipse_dist(z.re - center.0, z.im - center.1, *rx, *ry),
            _ => {
                let v = self.vertices();
                let n = v.len();
                (0..n).map(|i| seg_dist(z, v[i], v[(i + 1) % n])).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Membership with a margin relative to the region size.
    pub fn contains_relaxed(&self, z: C64, rel_margin: f64) -> bool {
        self.distance(z) <= rel_margin * self.size().max(f64::MIN_POSITIVE)
    }

    /// `m` points uniformly parameterized along the boundary (the interval itself for intervals).
    pub fn boundary_points(&self, m: usize) -> Vec<C64> {
        let m = m.max(2);
        match self {
            Region::Interval { a, b } => {
                (0..m).map(|i| C64::new(a + (b - a) * i as f64 / (m - 1) as f64, 0.0)).collect()
            }
            Region::Ellipse { center, rx, ry } => (0..m)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / m as f64;
                    C64::new(center.0 + rx * t.cos(), center.1 + ry * t.sin())
                })
                .collect(),
            _ => {
                let v = self.vertices();
                let n = v.len();
                let lens: Vec<f64> = (0..n).map(|i| (v[(i + 1) % n] - v[i]).norm()).collect();
                let total: f64 = lens.iter().sum();
                (0..m)
                    .map(|i| {
                        let mut s = total * i as f64 / m as f64;
                        let mut e = 0;
                        while e < n - 1 && s > lens[e] {
                            s -= lens[e];
                            e += 1;
                        }
                        let t = if lens[e] > 0.0 { (s / lens[e]).min(1.0) } else { 0.0 };
                        v[e] + (v[(e + 1) % n] - v[e]) * t
                    })
                    .collect()
            }
        }
    }
}
