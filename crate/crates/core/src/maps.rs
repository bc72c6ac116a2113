//! Elementary planar symplectic pieces and their composition.
//!
//! A [`PlanarMap`] is an ordered list of [`Piece`]s applied left to right:
//! `compose([f, g])` evaluates `g(f(p))`. Jacobians are assembled from the
//! closed-form Jacobian of each piece along the evaluation chain.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Mat2, PlanarPoint};

pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Sign convention of the polar piece.
///
/// `Symplectic` maps `(theta, I)` to `(rho cos 2 pi theta, -rho sin 2 pi theta)`
/// and has Jacobian determinant `+1`. `Printed` keeps `+rho sin 2 pi theta`
/// and has determinant `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    #[default]
    Symplectic,
    Printed,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Symplectic => 1.0,
            Orientation::Printed => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffineKind {
    Scale,
    Translate,
    Shear,
    RotateTranslate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    Identity,
    /// `(x, y) -> (x / lambda, y * lambda)`.
    Scale { lambda: f64 },
    Translate { dx: f64, dy: f64 },
    /// `(x, y) -> (x, y + s x)`.
    Shear { s: f64 },
    /// Rotation by `-pi/2` about the origin, then translation by `(0, ty)`.
    RotateTranslate { ty: f64 },
    /// `(t, I) -> sqrt(I/pi) (cos 2 pi theta, -o sin 2 pi theta)` with
    /// `theta = t + theta_offset mod 1`. Defined for `I > 0`.
    SpiralPolar {
        theta_offset: f64,
        orientation: Orientation,
    },
}

/// Reduce to `[0, 1)` with a floor-based mod; never returns 1.0.
pub fn unit_mod(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl Piece {
    pub fn name(&self) -> &'static str {
        match self {
            Piece::Identity => "identity",
            Piece::Scale { .. } => "scale",
            Piece::Translate { .. } => "translate",
            Piece::Shear { .. } => "shear",
            Piece::RotateTranslate { .. } => "rotate_translate",
            Piece::SpiralPolar { .. } => "spiral_polar",
        }
    }

    pub fn apply(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        Ok(match *self {
            Piece::Identity => p,
            Piece::Scale { lambda } => PlanarPoint::new(p.x / lambda, p.y * lambda),
            Piece::Translate { dx, dy } => PlanarPoint::new(p.x + dx, p.y + dy),
            Piece::Shear { s } => PlanarPoint::new(p.x, p.y + s * p.x),
            Piece::RotateTranslate { ty } => PlanarPoint::new(p.y, ty - p.x),
            Piece::SpiralPolar {
                theta_offset,
                orientation,
            } => {
                let action = p.y;
                if !(action > 0.0) {
                    return Err(Error::domain(
                        "spiral_polar",
                        format!("action must be positive, got {action}"),
                    ));
                }
                let theta = unit_mod(p.x + theta_offset);
                let rho = (action / PI).sqrt();
                let (s, c) = (2.0 * PI * theta).sin_cos();
                PlanarPoint::new(rho * c, -orientation.sign() * rho * s)
            }
        })
    }

    pub fn jacobian(&self, p: PlanarPoint) -> Result<Mat2> {
        Ok(match *self {
            Piece::Identity | Piece::Translate { .. } => Mat2::IDENTITY,
            Piece::Scale { lambda } => Mat2([[1.0 / lambda, 0.0], [0.0, lambda]]),
            Piece::Shear { s } => Mat2([[1.0, 0.0], [s, 1.0]]),
            Piece::RotateTranslate { .. } => Mat2([[0.0, 1.0], [-1.0, 0.0]]),
            Piece::SpiralPolar {
                theta_offset,
                orientation,
            } => {
                let action = p.y;
                if !(action > 0.0) {
                    return Err(Error::domain(
                        "spiral_polar",
                        format!("action must be positive, got {action}"),
                    ));
                }
                let o = orientation.sign();
                let theta = unit_mod(p.x + theta_offset);
                let rho = (action / PI).sqrt();
                let (s, c) = (2.0 * PI * theta).sin_cos();
                let k = 1.0 / (2.0 * PI * rho);
                Mat2([
                    [-2.0 * PI * rho * s, c * k],
                    [-o * 2.0 * PI * rho * c, -o * s * k],
                ])
            }
        })
    }

    fn inverse(&self, q: PlanarPoint) -> Option<PlanarPoint> {
        Some(match *self {
            Piece::Identity => q,
            Piece::Scale { lambda } => PlanarPoint::new(q.x * lambda, q.y / lambda),
            Piece::Translate { dx, dy } => PlanarPoint::new(q.x - dx, q.y - dy),
            Piece::Shear { s } => PlanarPoint::new(q.x, q.y - s * q.x),
            Piece::RotateTranslate { ty } => PlanarPoint::new(ty - q.y, q.x),
            Piece::SpiralPolar { .. } => return None,
        })
    }
}

/// Build one affine piece from its kind and parameter list.
///
/// * `Scale`: `[lambda]`, `lambda > 0`
/// * `Translate`: `[dx, dy]`
/// * `Shear`: `[s]`
/// * `RotateTranslate`: `[]` (translation `(0, sqrt(pi))`) or `[ty]`
pub fn affine_piece(kind: AffineKind, params: &[f64]) -> Result<PlanarMap> {
    let bad = |n: &str| Error::Parameter(format!("{n}: unexpected parameter list {params:?}"));
    if params.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter(format!("non-finite parameter in {params:?}")));
    }
    let piece = match (kind, params) {
        (AffineKind::Scale, &[lambda]) => {
            if !(lambda > 0.0) {
                return Err(Error::Parameter(format!("scale needs lambda > 0, got {lambda}")));
            }
            Piece::Scale { lambda }
        }
        (AffineKind::Translate, &[dx, dy]) => Piece::Translate { dx, dy },
        (AffineKind::Shear, &[s]) => Piece::Shear { s },
        (AffineKind::RotateTranslate, &[]) => Piece::RotateTranslate { ty: SQRT_PI },
        (AffineKind::RotateTranslate, &[ty]) => Piece::RotateTranslate { ty },
        (AffineKind::Scale, _) => return Err(bad("scale")),
        (AffineKind::Translate, _) => return Err(bad("translate")),
        (AffineKind::Shear, _) => return Err(bad("shear")),
        (AffineKind::RotateTranslate, _) => return Err(bad("rotate_translate")),
    };
    Ok(PlanarMap::from_piece(piece))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarMap {
    pieces: Vec<Piece>,
}

impl PlanarMap {
    pub fn identity() -> Self {
        Self::from_piece(Piece::Identity)
    }

    pub fn from_piece(piece: Piece) -> Self {
        Self {
            pieces: vec![piece],
        }
    }

    pub fn polar(theta_offset: f64, orientation: Orientation) -> Self {
        Self::from_piece(Piece::SpiralPolar {
            theta_offset,
            orientation,
        })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn apply(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        if !p.is_finite() {
            return Err(Error::domain("planar_map", format!("non-finite input {p:?}")));
        }
        self.pieces.iter().try_fold(p, |q, piece| piece.apply(q))
    }

    /// Chain rule: `J = J_n(p_{n-1}) ... J_1(p_0)`.
    pub fn jacobian(&self, p: PlanarPoint) -> Result<Mat2> {
        let mut q = p;
        let mut jac = Mat2::IDENTITY;
        for piece in &self.pieces {
            jac = piece.jacobian(q)? * jac;
            q = piece.apply(q)?;
        }
        Ok(jac)
    }

    /// Inverse for maps built from affine pieces only.
    pub fn inverse_apply(&self, q: PlanarPoint) -> Option<PlanarPoint> {
        self.pieces.iter().rev().try_fold(q, |p, piece| piece.inverse(p))
    }
}

/// Concatenate maps; the first entry is applied first.
pub fn compose(maps: &[PlanarMap]) -> Result<PlanarMap> {
    if maps.is_empty() {
        return Err(Error::Usage("compose needs at least one map".into()));
    }
    Ok(PlanarMap {
        pieces: maps.iter().flat_map(|m| m.pieces.iter().copied()).collect(),
    })
}

pub fn apply(map: &PlanarMap, p: PlanarPoint) -> Result<PlanarPoint> {
    map.apply(p)
}

pub fn jacobian(map: &PlanarMap, p: PlanarPoint) -> Result<Mat2> {
    map.jacobian(p)
}

/// Anything the verifier can sample: a planar map with optional closed-form
/// Jacobian and optional inverse on its image.
pub trait PlanarEmbedding: Sync {
    fn label(&self) -> String;

    fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint>;

    /// Closed-form Jacobian, or `None` when the map only supports finite
    /// differences.
    fn jacobian(&self, _p: PlanarPoint) -> Option<Result<Mat2>> {
        None
    }

    /// The unique domain point mapping to `q`, if `q` lies in the image of
    /// the map's natural domain.
    fn preimage(&self, _q: PlanarPoint) -> Option<PlanarPoint> {
        None
    }

    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::new()
    }
}

impl PlanarEmbedding for PlanarMap {
    fn label(&self) -> String {
        let names: Vec<_> = self.pieces.iter().map(Piece::name).collect();
        names.join("+")
    }

    fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        self.apply(p)
    }

    fn jacobian(&self, p: PlanarPoint) -> Option<Result<Mat2>> {
        Some(PlanarMap::jacobian(self, p))
    }

    fn preimage(&self, q: PlanarPoint) -> Option<PlanarPoint> {
        self.inverse_apply(q)
    }
}

/// Wraps a closure as an embedding without Jacobian or inverse.
pub struct FnMap<F> {
    label: String,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(PlanarPoint) -> PlanarPoint + Sync,
{
    pub fn new(label: impl Into<String>, f: F) -> Self {
        Self {
            label: label.into(),
            f,
        }
    }
}

impl<F> PlanarEmbedding for FnMap<F>
where
    F: Fn(PlanarPoint) -> PlanarPoint + Sync,
{
    fn label(&self) -> String {
        self.label.clone()
    }

    fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        Ok((self.f)(p))
    }
}
