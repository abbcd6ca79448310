//! Planar point arithmetic and the handful of predicates the realizer needs.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counter-clockwise rotation by `a` radians.
    pub fn rotate(self, a: f64) -> Point {
        let (s, c) = a.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Twice the signed area of triangle `abc`; positive when counter-clockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Shoelace signed area; positive for counter-clockwise polygons.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        s += poly[i].cross(poly[(i + 1) % n]);
    }
    s / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CircleHit {
    /// No common point; carries the signed violation of the triangle inequality.
    Disjoint(f64),
    /// Circles touch within tolerance; the intersection is not separated.
    Tangent(Point),
    /// `left` lies to the left of the directed line from the first centre to the second.
    Two { left: Point, right: Point },
}

/// Intersects the circles `|p - a| = ra` and `|p - b| = rb`.
pub fn circle_intersection(a: Point, ra: f64, b: Point, rb: f64, eps: f64) -> CircleHit {
    let d = a.dist(b);
    if d < eps {
        return CircleHit::Disjoint(-d);
    }
    let slack = (ra + rb - d).min(d + rb - ra).min(d + ra - rb);
    if slack < -eps {
        return CircleHit::Disjoint(slack);
    }
    let u = (b - a) * (1.0 / d);
    let along = (d * d + ra * ra - rb * rb) / (2.0 * d);
    let h2 = ra * ra - along * along;
    let base = a + u * along;
    if slack <= eps || h2 <= eps * eps {
        return CircleHit::Tangent(base);
    }
    let h = h2.sqrt();
    CircleHit::Two { left: base + u.perp() * h, right: base - u.perp() * h }
}

/// Squared distance from `p` to segment `ab`.
pub fn point_segment_dist2(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        let d = p - a;
        return d.dot(d);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    let q = a + ab * t;
    let d = p - q;
    d.dot(d)
}

/// Euclidean distance between segments `ab` and `cd` (zero when they cross).
pub fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return 0.0;
    }
    point_segment_dist2(a, c, d)
        .min(point_segment_dist2(b, c, d))
        .min(point_segment_dist2(c, a, b))
        .min(point_segment_dist2(d, a, b))
        .sqrt()
}

/// Proper rigid motion (rotation then translation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Motion {
    pub cos: f64,
    pub sin: f64,
    pub shift: Point,
}

impl Motion {
    pub const IDENTITY: Motion = Motion { cos: 1.0, sin: 0.0, shift: Point::new(0.0, 0.0) };

    pub fn apply(&self, p: Point) -> Point {
        Point::new(self.cos * p.x - self.sin * p.y, self.sin * p.x + self.cos * p.y) + self.shift
    }

    /// Rotation by `angle` about `centre`.
    pub fn about(centre: Point, angle: f64) -> Motion {
        let (sin, cos) = angle.sin_cos();
        let r = Motion { cos, sin, shift: Point::default() };
        Motion { cos, sin, shift: centre - r.apply(centre) }
    }

    /// Least-squares proper motion taking `src[i]` onto `dst[i]`.
    pub fn fit(src: &[Point], dst: &[Point]) -> Motion {
        let n = src.len().min(dst.len()).max(1) as f64;
        let cs = src.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / n);
        let cd = dst.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / n);
        let (mut sc, mut ss) = (0.0, 0.0);
        for (&p, &q) in src.iter().zip(dst) {
            let a = p - cs;
            let b = q - cd;
            sc += a.dot(b);
            ss += a.cross(b);
        }
        let r = sc.hypot(ss);
        let (cos, sin) = if r < 1e-300 { (1.0, 0.0) } else { (sc / r, ss / r) };
        let rot = Motion { cos, sin, shift: Point::default() };
        Motion { cos, sin, shift: cd - rot.apply(cs) }
    }
}

/// Cyclic order test: do the angles of `pts` around `centre` follow the listed order
/// counter-clockwise (any starting rotation)?
pub fn ccw_cyclic_order(centre: Point, pts: &[Point]) -> bool {
    if pts.len() < 3 {
        return true;
    }
    let base = (pts[0] - centre).angle();
    let mut prev = 0.0;
    for p in &pts[1..] {
        let mut a = (*p - centre).angle() - base;
        while a <= 0.0 {
            a += std::f64::consts::TAU;
        }
        while a > std::f64::consts::TAU {
            a -= std::f64::consts::TAU;
        }
        if a <= prev {
            return false;
        }
        prev = a;
    }
    true
}
