//! Bounding model of the immersed domain in the `(x1, y1)` plane.
//!
//! Two congruent rectangles cover the domain: `R2` on the right, reaching
//! down far enough to hold the strip after the flow has sheared it (the
//! shear moves right-hand strip points down by at most `pi |chi'|`), and
//! `R1 = -R2` on the left. They overlap exactly in the central column
//! `E(4 eps^2)`, and `W = (R1 u R2) n E(4 eps^2)` is a single rectangle.
//!
//! Besides the strip itself, one thin strand of height `eps/2` sits above the
//! strip on the right and one below it on the left. These stand in for the
//! rest of the immersed torus, away from the region swept by the flow.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PlanarPoint, RectRegion};

use super::flow::StripModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tags {
    pub in_r1: bool,
    pub in_r2: bool,
    pub in_strip: bool,
    pub in_w: bool,
}

/// Which branch of the glued map handles a point; `W` wins on overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    R1,
    R2,
    W,
}

impl Tags {
    pub fn branch(&self) -> Option<Branch> {
        if self.in_w {
            Some(Branch::W)
        } else if self.in_r2 && !self.in_r1 {
            Some(Branch::R2)
        } else if self.in_r1 && !self.in_r2 {
            Some(Branch::R1)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedPoint {
    pub p: PlanarPoint,
    pub tags: Tags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainSampling {
    /// Grid over `R1 u R2`.
    Rectangles,
    /// Grid over the strip and the strands, `rows` rows per band.
    Strands { rows: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainModel {
    pub half_length: f64,
    pub eps: f64,
    /// `A + 4 eps`.
    pub a_tilde: f64,
    /// `pi / A + 4 eps`.
    pub height: f64,
    pub r1: RectRegion,
    pub r2: RectRegion,
    pub w: RectRegion,
    pub strip: StripModel,
    pub strands: Vec<RectRegion>,
}

impl DomainModel {
    pub fn new(half_length: f64, eps: f64) -> Result<Self> {
        if !(half_length > 0.0 && eps > 0.0) {
            return Err(Error::Parameter(format!(
                "domain model needs A, eps > 0, got A={half_length} eps={eps}"
            )));
        }
        let a_tilde = half_length + 4.0 * eps;
        let height = PI / half_length + 4.0 * eps;
        let col = 2.0 * eps * eps;
        let r2 = RectRegion::new(a_tilde, height, PlanarPoint::new(-col, 2.0 * eps - height))?;
        let r1 = RectRegion::new(a_tilde, height, PlanarPoint::new(col - a_tilde, -2.0 * eps))?;
        let w = RectRegion::new(
            2.0 * col,
            2.0 * height - 4.0 * eps,
            PlanarPoint::new(-col, 2.0 * eps - height),
        )?;
        if height <= 4.0 * eps {
            return Err(Error::Construction("rectangles too short for the central column".into()));
        }
        let strand_h = eps / 2.0;
        let strands = vec![
            RectRegion::new(half_length, strand_h, PlanarPoint::new(0.0, eps))?,
            RectRegion::new(half_length, strand_h, PlanarPoint::new(-half_length, -eps - strand_h))?,
        ];
        Ok(Self {
            half_length,
            eps,
            a_tilde,
            height,
            r1,
            r2,
            w,
            strip: StripModel::new(half_length, eps),
            strands,
        })
    }

    /// Half-width of the central column, `2 eps^2`.
    pub fn column_half_width(&self) -> f64 {
        2.0 * self.eps * self.eps
    }

    pub fn tags(&self, p: PlanarPoint) -> Tags {
        let in_r1 = self.r1.contains(p);
        let in_r2 = self.r2.contains(p);
        Tags {
            in_r1,
            in_r2,
            in_strip: self.strip.contains(p),
            in_w: (in_r1 || in_r2) && p.x.abs() < self.column_half_width(),
        }
    }

    pub fn tag(&self, p: PlanarPoint) -> TaggedPoint {
        TaggedPoint { p, tags: self.tags(p) }
    }

    pub fn in_strands(&self, p: PlanarPoint) -> bool {
        self.strip.contains(p) || self.strands.iter().any(|s| s.contains(p))
    }

    /// Bands making up the strand model: the strip, then the strands.
    pub fn bands(&self) -> Vec<RectRegion> {
        let mut out = vec![self.strip.rect()];
        out.extend(self.strands.iter().copied());
        out
    }

    /// Interior-offset grid of the chosen model, tagged, in deterministic
    /// order. Rectangles: `R2` first, then the points of `R1` not in `R2`.
    pub fn sample(&self, resolution: usize, sampling: DomainSampling) -> Result<Vec<TaggedPoint>> {
        if resolution < 2 {
            return Err(Error::Usage(format!("resolution must be at least 2, got {resolution}")));
        }
        let pts: Vec<PlanarPoint> = match sampling {
            DomainSampling::Rectangles => {
                let mut v = self.r2.grid(resolution, resolution);
                v.extend(
                    self.r1
                        .grid(resolution, resolution)
                        .into_iter()
                        .filter(|p| !self.r2.contains(*p)),
                );
                v
            }
            DomainSampling::Strands { rows } => self
                .bands()
                .iter()
                .flat_map(|b| b.grid(resolution, rows.max(1)))
                .collect(),
        };
        Ok(pts.into_iter().map(|p| self.tag(p)).collect())
    }
}

pub fn sample_domain(
    model: &DomainModel,
    resolution: usize,
    sampling: DomainSampling,
) -> Result<Vec<TaggedPoint>> {
    model.sample(resolution, sampling)
}
