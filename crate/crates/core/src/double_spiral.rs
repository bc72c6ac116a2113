//! Two interleaved spirals on `R1`, `R2` plus a squeeze of the central
//! piece `W` into the disk both spirals avoid.
//!
//! With `B lambda = delta = eps` every strand has action thickness `eps` and
//! leaves a gap of exactly `eps`. The `R1` spiral is shifted by half a turn,
//! which places its strands precisely in the gaps of the `R2` spiral. Both
//! start at action `M eps`, so the open disk of radius `sqrt(M eps / pi)` is
//! free for `W`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Mat2, PlanarPoint, RectRegion};
use crate::maps::PlanarEmbedding;
use crate::spiral::{open_intervals_disjoint, SpiralParams};
use crate::torus_strip::{Branch, DomainModel, TaggedPoint};

pub const DEFAULT_M: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleSpiralConfig {
    pub a: f64,
    pub eps: f64,
    pub m: f64,
}

impl DoubleSpiralConfig {
    pub fn new(a: f64, eps: f64, m: f64) -> Result<Self> {
        if !(a > 0.0 && eps > 0.0 && m > 0.0) || !(a + eps + m).is_finite() {
            return Err(Error::Parameter(format!(
                "double spiral needs A, eps, M > 0, got A={a} eps={eps} M={m}"
            )));
        }
        Ok(Self { a, eps, m })
    }

    /// `M = max(8, min_M)`.
    pub fn with_default_m(a: f64, eps: f64) -> Result<Self> {
        Self::new(a, eps, DEFAULT_M.max(min_m(a, eps)))
    }

    pub fn a_tilde(&self) -> f64 {
        self.a + 4.0 * self.eps
    }

    pub fn b(&self) -> f64 {
        PI / self.a + 4.0 * self.eps
    }

    pub fn lambda(&self) -> f64 {
        self.eps / self.b()
    }

    pub fn delta(&self) -> f64 {
        self.eps
    }

    pub fn r(&self) -> f64 {
        self.m * self.eps
    }

    /// Radius of the disk reserved for `W`.
    pub fn inner_radius(&self) -> f64 {
        (self.r() / PI).sqrt()
    }

    pub fn spiral(&self, theta_offset: f64) -> SpiralParams {
        SpiralParams::new(self.a_tilde(), self.b(), self.lambda(), self.delta(), self.r())
            .and_then(|s| s.with_theta_offset(theta_offset))
            .expect("validated config")
    }

    /// Upper bound `8 eps^2 B` on the area of `W`.
    pub fn w_area_bound(&self) -> f64 {
        8.0 * self.eps * self.eps * self.b()
    }
}

/// Smallest `M` with `M eps >= 2 * 8 eps^2 B`, i.e. `16 eps B`.
pub fn min_m(a: f64, eps: f64) -> f64 {
    16.0 * eps * (PI / a + 4.0 * eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    R1,
    R2,
}

/// One spiral branch together with its pre-transform from the `(x1, y1)`
/// plane into `R(A~, B)`: `p - anchor` on `R2`, `-p - anchor` on `R1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta {
    pub side: Side,
    pub spiral: SpiralParams,
    anchor: PlanarPoint,
}

impl Beta {
    pub fn to_local(&self, p: PlanarPoint) -> PlanarPoint {
        match self.side {
            Side::R2 => p - self.anchor,
            Side::R1 => PlanarPoint::new(-p.x, -p.y) - self.anchor,
        }
    }

    pub fn from_local(&self, q: PlanarPoint) -> PlanarPoint {
        let p = q + self.anchor;
        match self.side {
            Side::R2 => p,
            Side::R1 => PlanarPoint::new(-p.x, -p.y),
        }
    }

    pub fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        self.spiral.eval(self.to_local(p))
    }

    pub fn eval_local(&self, q: PlanarPoint) -> Result<PlanarPoint> {
        self.spiral.eval(q)
    }
}

impl PlanarEmbedding for Beta {
    fn label(&self) -> String {
        match self.side {
            Side::R1 => "beta1".into(),
            Side::R2 => "beta2".into(),
        }
    }

    fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        Beta::eval(self, p)
    }

    fn jacobian(&self, p: PlanarPoint) -> Option<Result<Mat2>> {
        let j = self.spiral.jacobian(self.to_local(p));
        Some(match self.side {
            Side::R2 => j,
            Side::R1 => j.map(|m| m * Mat2([[-1.0, 0.0], [0.0, -1.0]])),
        })
    }

    fn preimage(&self, q: PlanarPoint) -> Option<PlanarPoint> {
        self.spiral.preimage(q).map(|l| self.from_local(l))
    }

    fn params(&self) -> BTreeMap<String, f64> {
        self.spiral.params()
    }
}

/// Affine squeeze `(x, y) -> (eta (x - cx), (y - cy) / eta)` turning `W`
/// into a square centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuck {
    pub region: RectRegion,
    pub eta: f64,
    pub target_radius: f64,
}

impl Tuck {
    pub fn new(region: RectRegion, target_radius: f64) -> Result<Self> {
        let area = region.area();
        if 2.0 * area > PI * target_radius * target_radius {
            return Err(Error::Construction(format!(
                "W of area {area} does not fit: need M eps >= {}, have {}; raise M",
                2.0 * area,
                PI * target_radius * target_radius
            )));
        }
        Ok(Self {
            region,
            eta: (region.height / region.width).sqrt(),
            target_radius,
        })
    }

    pub fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        if !self.region.contains(p) {
            return Err(Error::domain("tuck", format!("({}, {}) outside W", p.x, p.y)));
        }
        let c = self.region.center();
        Ok(PlanarPoint::new(self.eta * (p.x - c.x), (p.y - c.y) / self.eta))
    }

    /// Half-diagonal of the squeezed square.
    pub fn image_radius(&self) -> f64 {
        (self.region.area() / 2.0).sqrt()
    }
}

impl PlanarEmbedding for Tuck {
    fn label(&self) -> String {
        "tuck".into()
    }

    fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        Tuck::eval(self, p)
    }

    fn jacobian(&self, p: PlanarPoint) -> Option<Result<Mat2>> {
        Some(
            Tuck::eval(self, p)
                .map(|_| Mat2([[self.eta, 0.0], [0.0, 1.0 / self.eta]])),
        )
    }

    fn preimage(&self, q: PlanarPoint) -> Option<PlanarPoint> {
        let c = self.region.center();
        let p = PlanarPoint::new(q.x / self.eta + c.x, q.y * self.eta + c.y);
        self.region.contains(p).then_some(p)
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("eta".to_string(), self.eta),
            ("w_area".to_string(), self.region.area()),
            ("target_radius".to_string(), self.target_radius),
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleSpiral {
    pub config: DoubleSpiralConfig,
    pub domain: DomainModel,
    pub beta1: Beta,
    pub beta2: Beta,
    pub tuck: Tuck,
}

impl DoubleSpiral {
    pub fn new(config: DoubleSpiralConfig) -> Result<Self> {
        let domain = DomainModel::new(config.a, config.eps)?;
        let anchor = domain.r2.anchor;
        let beta2 = Beta {
            side: Side::R2,
            spiral: config.spiral(0.0),
            anchor,
        };
        let beta1 = Beta {
            side: Side::R1,
            spiral: config.spiral(0.5),
            anchor,
        };
        let tuck = Tuck::new(domain.w, config.inner_radius())?;
        Ok(Self {
            config,
            domain,
            beta1,
            beta2,
            tuck,
        })
    }

    pub fn eval(&self, t: &TaggedPoint) -> Result<PlanarPoint> {
        match t.tags.branch() {
            Some(Branch::W) => self.tuck.eval(t.p),
            Some(Branch::R2) => self.beta2.eval(t.p),
            Some(Branch::R1) => self.beta1.eval(t.p),
            None => Err(Error::Usage(format!(
                "point ({}, {}) is not in exactly one branch of R1 u R2",
                t.p.x, t.p.y
            ))),
        }
    }

    pub fn eval_point(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        self.eval(&self.domain.tag(p))
    }

    /// Radius of the disk containing every spiral image.
    pub fn outer_radius(&self) -> f64 {
        self.config
            .spiral(0.0)
            .radius_bound(self.config.a_tilde())
            .expect("L = A~")
    }

    /// Action intervals at angle `theta` for both branches are disjoint.
    pub fn strands_interleave(&self, theta: f64, turns: usize) -> bool {
        let a = self.beta1.spiral.strand_intervals(theta, turns);
        let b = self.beta2.spiral.strand_intervals(theta, turns);
        open_intervals_disjoint(&a, &b)
    }
}

impl PlanarEmbedding for DoubleSpiral {
    fn label(&self) -> String {
        "double_spiral".into()
    }

    fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        self.eval_point(p)
    }

    fn jacobian(&self, p: PlanarPoint) -> Option<Result<Mat2>> {
        let t = self.domain.tag(p);
        match t.tags.branch() {
            Some(Branch::W) => self.tuck.jacobian(p),
            Some(Branch::R2) => self.beta2.jacobian(p),
            Some(Branch::R1) => self.beta1.jacobian(p),
            None => Some(Err(Error::Usage("point outside R1 u R2".into()))),
        }
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("A".to_string(), self.config.a),
            ("eps".to_string(), self.config.eps),
            ("M".to_string(), self.config.m),
        ])
    }
}

pub fn beta1_eval(ds: &DoubleSpiral, p: PlanarPoint) -> Result<PlanarPoint> {
    ds.beta1.eval(p)
}

pub fn beta2_eval(ds: &DoubleSpiral, p: PlanarPoint) -> Result<PlanarPoint> {
    ds.beta2.eval(p)
}

pub fn tuck_eval(ds: &DoubleSpiral, p: PlanarPoint) -> Result<PlanarPoint> {
    ds.tuck.eval(p)
}

pub fn double_spiral_eval(ds: &DoubleSpiral, t: &TaggedPoint) -> Result<PlanarPoint> {
    ds.eval(t)
}
