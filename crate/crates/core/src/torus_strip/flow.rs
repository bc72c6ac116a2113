//! The strip Hamiltonian `H = -chi(x1) x2 sqrt(pi)` and its time-1 map.

use crate::error::{Error, Result};
use crate::geometry::{Mat4, PlanarPoint, Point4, RectRegion};
use crate::maps::SQRT_PI;

use super::cutoff::CutoffProfile;

pub fn hamiltonian(profile: &CutoffProfile, q: Point4) -> f64 {
    -profile.value(q.x1) * q.x2 * SQRT_PI
}

/// Closed-form time-1 flow:
/// `(x1, y1 + chi'(x1) x2 sqrt(pi), x2, y2 + chi(x1) sqrt(pi))`.
pub fn flow_time1(profile: &CutoffProfile, q: Point4) -> Point4 {
    let chi = profile.value(q.x1);
    let dchi = profile.slope(q.x1);
    Point4::new(q.x1, q.y1 + dchi * q.x2 * SQRT_PI, q.x2, q.y2 + chi * SQRT_PI)
}

pub fn flow_jacobian(profile: &CutoffProfile, q: Point4) -> Mat4 {
    let dchi = profile.slope(q.x1);
    let ddchi = profile.curvature(q.x1);
    Mat4([
        [1.0, 0.0, 0.0, 0.0],
        [ddchi * q.x2 * SQRT_PI, 1.0, dchi * SQRT_PI, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [dchi * SQRT_PI, 0.0, 0.0, 1.0],
    ])
}

/// Hamilton's equations `(dH/dy1, -dH/dx1, dH/dy2, -dH/dx2)` for `H`.
pub fn hamiltonian_field(profile: &CutoffProfile, q: Point4) -> Point4 {
    Point4::new(
        0.0,
        profile.slope(q.x1) * q.x2 * SQRT_PI,
        0.0,
        profile.value(q.x1) * SQRT_PI,
    )
}

/// Classical fourth-order Runge-Kutta integration of the field to time 1.
pub fn flow_rk4(profile: &CutoffProfile, q: Point4, steps: usize) -> Point4 {
    let h = 1.0 / steps.max(1) as f64;
    let axpy = |a: Point4, k: Point4, t: f64| {
        Point4::new(a.x1 + t * k.x1, a.y1 + t * k.y1, a.x2 + t * k.x2, a.y2 + t * k.y2)
    };
    let mut y = q;
    for _ in 0..steps.max(1) {
        let k1 = hamiltonian_field(profile, y);
        let k2 = hamiltonian_field(profile, axpy(y, k1, h / 2.0));
        let k3 = hamiltonian_field(profile, axpy(y, k2, h / 2.0));
        let k4 = hamiltonian_field(profile, axpy(y, k3, h));
        let sum = Point4::new(
            k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1,
            k1.y1 + 2.0 * k2.y1 + 2.0 * k3.y1 + k4.y1,
            k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2,
            k1.y2 + 2.0 * k2.y2 + 2.0 * k3.y2 + k4.y2,
        );
        y = axpy(y, sum, h / 6.0);
    }
    y
}

/// The horizontal strip `(-A, A) x (-eps/2, eps/2)` in the immersed picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripModel {
    pub half_length: f64,
    pub eps: f64,
}

impl StripModel {
    pub fn new(half_length: f64, eps: f64) -> Self {
        Self { half_length, eps }
    }

    pub fn rect(&self) -> RectRegion {
        RectRegion::new(
            2.0 * self.half_length,
            self.eps,
            PlanarPoint::new(-self.half_length, -self.eps / 2.0),
        )
        .expect("positive strip")
    }

    pub fn contains(&self, p: PlanarPoint) -> bool {
        p.x.abs() < self.half_length && p.y.abs() < self.eps / 2.0
    }
}

/// Apply the flow to `(p1, b)` when `p1` lies in the strip, otherwise leave
/// the pair unchanged. `b` must lie in the open square `Q(sqrt(pi))`.
pub fn interleave_eval(
    profile: &CutoffProfile,
    strip: &StripModel,
    p1: PlanarPoint,
    b: PlanarPoint,
) -> Result<Point4> {
    if !(b.x > 0.0 && b.x < SQRT_PI && b.y > 0.0 && b.y < SQRT_PI) {
        return Err(Error::domain(
            "interleave",
            format!("b = ({}, {}) outside open Q(sqrt(pi))", b.x, b.y),
        ));
    }
    if !p1.is_finite() {
        return Err(Error::domain("interleave", "non-finite p1"));
    }
    let q = Point4::from_planes(p1, b);
    Ok(if strip.contains(p1) {
        flow_time1(profile, q)
    } else {
        q
    })
}
