//! The simple spiral: a thin rectangle `R(A,B)` wound into an annulus.
//!
//! In action-angle form the map is
//!
//! ```text
//! I     = y lambda + r + (x / lambda) (B lambda + delta)
//! theta = x / lambda + theta_offset  (mod 1)
//! (u,v) = sqrt(I / pi) (cos 2 pi theta, -o sin 2 pi theta)
//! ```
//!
//! Each turn of the spiral advances the action by `B lambda + delta`; a strand
//! has action thickness `B lambda`, so consecutive strands are separated by
//! an action gap `delta`. The sign `o` is the [`Orientation`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BallRegion, Mat2, PlanarPoint, RectRegion};
use crate::maps::{affine_piece, compose, unit_mod, AffineKind, Orientation, PlanarEmbedding, PlanarMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralParams {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub delta: f64,
    pub r: f64,
    /// 0 for the plain spiral, 1/2 for the half-turn shifted one.
    pub theta_offset: f64,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionAngle {
    pub action: f64,
    pub theta: f64,
}

impl SpiralParams {
    pub fn new(a: f64, b: f64, lambda: f64, delta: f64, r: f64) -> Result<Self> {
        let all = [a, b, lambda, delta, r];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("non-finite spiral parameter in {all:?}")));
        }
        if !(a > 0.0 && b > 0.0 && lambda > 0.0) {
            return Err(Error::Parameter(format!(
                "spiral needs A, B, lambda > 0, got A={a} B={b} lambda={lambda}"
            )));
        }
        if delta < 0.0 || r < 0.0 {
            return Err(Error::Parameter(format!(
                "spiral needs delta, r >= 0, got delta={delta} r={r}"
            )));
        }
        Ok(Self {
            a,
            b,
            lambda,
            delta,
            r,
            theta_offset: 0.0,
            orientation: Orientation::Symplectic,
        })
    }

    pub fn with_theta_offset(mut self, offset: f64) -> Result<Self> {
        if offset != 0.0 && offset != 0.5 {
            return Err(Error::Parameter(format!("theta offset must be 0 or 1/2, got {offset}")));
        }
        self.theta_offset = offset;
        Ok(self)
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn domain(&self) -> RectRegion {
        RectRegion::origin(self.a, self.b).expect("validated sides")
    }

    /// Action advance per turn, `B lambda + delta`.
    pub fn pitch(&self) -> f64 {
        self.b * self.lambda + self.delta
    }

    fn check_domain(&self, p: PlanarPoint) -> Result<()> {
        if p.is_finite() && p.x > 0.0 && p.x < self.a && p.y > 0.0 && p.y < self.b {
            Ok(())
        } else {
            Err(Error::domain(
                "spiral",
                format!("point ({}, {}) outside open R({}, {})", p.x, p.y, self.a, self.b),
            ))
        }
    }

    pub fn action_angle(&self, p: PlanarPoint) -> Result<ActionAngle> {
        self.check_domain(p)?;
        let turns = p.x / self.lambda;
        let action = p.y * self.lambda + self.r + turns * self.pitch();
        if !(action > 0.0) {
            return Err(Error::domain("spiral", format!("nonpositive action {action}")));
        }
        Ok(ActionAngle {
            action,
            theta: unit_mod(turns + self.theta_offset),
        })
    }

    pub fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        let ActionAngle { action, theta } = self.action_angle(p)?;
        let rho = (action / PI).sqrt();
        let (s, c) = (2.0 * PI * theta).sin_cos();
        Ok(PlanarPoint::new(rho * c, -self.orientation.sign() * rho * s))
    }

    pub fn jacobian(&self, p: PlanarPoint) -> Result<Mat2> {
        let ActionAngle { action, theta } = self.action_angle(p)?;
        let o = self.orientation.sign();
        let rho = (action / PI).sqrt();
        let (s, c) = (2.0 * PI * theta).sin_cos();
        let radial = 1.0 / (2.0 * PI * rho);
        let i_x = self.pitch() / self.lambda;
        let i_y = self.lambda;
        let turn = 2.0 * PI * rho / self.lambda;
        Ok(Mat2([
            [c * i_x * radial - s * turn, c * i_y * radial],
            [-o * (s * i_x * radial + c * turn), -o * s * i_y * radial],
        ]))
    }

    /// Radius of the disk containing the image of `R(L, B)`, `0 < L <= A`.
    pub fn radius_bound(&self, l: f64) -> Result<f64> {
        if !(l > 0.0 && l <= self.a) {
            return Err(Error::Usage(format!("L must lie in (0, {}], got {l}", self.a)));
        }
        Ok(self.radius_bound_unchecked(l))
    }

    pub(crate) fn radius_bound_unchecked(&self, l: f64) -> f64 {
        ((self.b * self.lambda + self.r + l * self.b + l * self.delta / self.lambda) / PI).sqrt()
    }

    /// Radius of the closed disk the image avoids, `sqrt(r / pi)`.
    pub fn inner_avoid_radius(&self) -> f64 {
        (self.r / PI).sqrt()
    }

    pub fn outer_ball(&self) -> BallRegion {
        BallRegion::planar(self.radius_bound_unchecked(self.a)).expect("positive radius")
    }

    /// The same map as a composition of elementary pieces:
    /// scale, translate by `(0, r)`, shear by `B lambda + delta`, polar.
    pub fn as_planar_map(&self) -> PlanarMap {
        compose(&[
            affine_piece(AffineKind::Scale, &[self.lambda]).expect("lambda > 0"),
            affine_piece(AffineKind::Translate, &[0.0, self.r]).expect("finite"),
            affine_piece(AffineKind::Shear, &[self.pitch()]).expect("finite"),
            PlanarMap::polar(self.theta_offset, self.orientation),
        ])
        .expect("nonempty")
    }

    /// Inverse on the image: recover `(x, y)` from `(u, v)`.
    pub fn preimage(&self, q: PlanarPoint) -> Option<PlanarPoint> {
        let action = PI * q.norm_sq();
        if !(action > 0.0) {
            return None;
        }
        let angle = (-self.orientation.sign() * q.y).atan2(q.x) / (2.0 * PI);
        let base = unit_mod(angle - self.theta_offset);
        let pitch = self.pitch();
        // y in (0, B) confines x / lambda to one open window of length < 1
        let lo = (action - self.r - self.b * self.lambda) / pitch;
        let turns = (lo - base).floor() + 1.0 + base;
        let x = turns * self.lambda;
        let y = (action - self.r - turns * pitch) / self.lambda;
        let p = PlanarPoint::new(x, y);
        self.domain().contains(p).then_some(p)
    }

    /// Action intervals `(lo, hi)` swept at angle `theta` by strands `k` in
    /// `0..turns`.
    pub fn strand_intervals(&self, theta: f64, turns: usize) -> Vec<(f64, f64)> {
        let base = unit_mod(theta - self.theta_offset);
        (0..turns)
            .map(|k| {
                let lo = self.r + (k as f64 + base) * self.pitch();
                (lo, lo + self.b * self.lambda)
            })
            .collect()
    }
}

/// True when two lists of open intervals share no point. Endpoints that
/// touch up to a relative rounding slack of `1e-12` count as disjoint.
pub fn open_intervals_disjoint(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
    let le = |x: f64, y: f64| x <= y + 1e-12 * x.abs().max(y.abs()).max(1.0);
    a.iter()
        .all(|&(a0, a1)| b.iter().all(|&(b0, b1)| le(a1, b0) || le(b1, a0)))
}

/// Membership in the closed family set: all five positive, or
/// `r = 0` with the other four positive, or `delta = 0` with the other four
/// positive.
pub fn param_set_contains(a: f64, b: f64, lambda: f64, delta: f64, r: f64) -> bool {
    let base = a > 0.0 && b > 0.0 && lambda > 0.0;
    base && ((delta > 0.0 && r > 0.0) || (delta > 0.0 && r == 0.0) || (r > 0.0 && delta == 0.0))
}

impl PlanarEmbedding for SpiralParams {
    fn label(&self) -> String {
        match self.orientation {
            Orientation::Symplectic => "spiral".into(),
            Orientation::Printed => "spiral_printed".into(),
        }
    }

    fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        SpiralParams::eval(self, p)
    }

    fn jacobian(&self, p: PlanarPoint) -> Option<Result<Mat2>> {
        Some(SpiralParams::jacobian(self, p))
    }

    fn preimage(&self, q: PlanarPoint) -> Option<PlanarPoint> {
        SpiralParams::preimage(self, q)
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("A".to_string(), self.a),
            ("B".to_string(), self.b),
            ("lambda".to_string(), self.lambda),
            ("delta".to_string(), self.delta),
            ("r".to_string(), self.r),
            ("theta_offset".to_string(), self.theta_offset),
            ("orientation".to_string(), self.orientation.sign()),
        ])
    }
}
