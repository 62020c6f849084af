//! Small fixed-size vector helpers. Points live in `[R; 3]`; planar bodies
//! keep the third coordinate at zero.

use crate::scalar::Real;

pub type Point<R> = [R; 3];

#[inline]
pub fn zero<R: Real>() -> Point<R> {
    [R::zero(); 3]
}

#[inline]
pub fn dot<R: Real>(a: Point<R>, b: Point<R>) -> R {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn sub<R: Real>(a: Point<R>, b: Point<R>) -> Point<R> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add<R: Real>(a: Point<R>, b: Point<R>) -> Point<R> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale<R: Real>(a: Point<R>, t: R) -> Point<R> {
    [a[0] * t, a[1] * t, a[2] * t]
}

#[inline]
pub fn axpy<R: Real>(a: Point<R>, t: R, b: Point<R>) -> Point<R> {
    [a[0] + t * b[0], a[1] + t * b[1], a[2] + t * b[2]]
}

#[inline]
pub fn norm<R: Real>(a: Point<R>) -> R {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist<R: Real>(a: Point<R>, b: Point<R>) -> R {
    norm(sub(a, b))
}

#[inline]
pub fn normalize<R: Real>(a: Point<R>) -> Point<R> {
    let n = norm(a);
    scale(a, R::one() / n)
}

/// Rotate a planar point by `angle` about the z axis.
#[inline]
pub fn rotate_z<R: Real>(a: Point<R>, angle: R) -> Point<R> {
    let (s, c) = angle.sin_cos();
    [c * a[0] - s * a[1], s * a[0] + c * a[1], a[2]]
}

/// Any two unit vectors orthogonal to `v` (and each other).
pub fn tangent_frame<R: Real>(v: Point<R>) -> (Point<R>, Point<R>) {
    let pick = if v[0].abs() < R::lit(0.9) {
        [R::one(), R::zero(), R::zero()]
    } else {
        [R::zero(), R::one(), R::zero()]
    };
    let mut e1 = sub(pick, scale(v, dot(pick, v)));
    e1 = normalize(e1);
    let e2 = [
        v[1] * e1[2] - v[2] * e1[1],
        v[2] * e1[0] - v[0] * e1[2],
        v[0] * e1[1] - v[1] * e1[0],
    ];
    (e1, e2)
}
