//! Points, regions and small matrices.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: &PlanarPoint) -> f64 {
        (*self - *other).norm()
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.x, self.y]
    }
}

impl Add for PlanarPoint {
    type Output = PlanarPoint;
    fn add(self, o: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for PlanarPoint {
    type Output = PlanarPoint;
    fn sub(self, o: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(self.x - o.x, self.y - o.y)
    }
}

/// A point of R^4 = R^2 x R^2, ordered (x1, y1, x2, y2).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point4 {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl Point4 {
    pub const fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    pub fn from_planes(z1: PlanarPoint, z2: PlanarPoint) -> Self {
        Self::new(z1.x, z1.y, z2.x, z2.y)
    }

    pub fn first(&self) -> PlanarPoint {
        PlanarPoint::new(self.x1, self.y1)
    }

    pub fn second(&self) -> PlanarPoint {
        PlanarPoint::new(self.x2, self.y2)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum()
    }
}

/// Axis-aligned open rectangle `anchor + (0,width) x (0,height)`.
///
/// With `unbounded_height` set the rectangle is the vertical strip over its
/// x-interval and membership ignores `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectRegion {
    pub width: f64,
    pub height: f64,
    pub anchor: PlanarPoint,
    pub unbounded_height: bool,
}

impl RectRegion {
    pub fn new(width: f64, height: f64, anchor: PlanarPoint) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(Error::Parameter(format!(
                "rectangle needs positive finite sides, got {width} x {height}"
            )));
        }
        Ok(Self {
            width,
            height,
            anchor,
            unbounded_height: false,
        })
    }

    /// `R(a, b) = (0,a) x (0,b)`.
    pub fn origin(width: f64, height: f64) -> Result<Self> {
        Self::new(width, height, PlanarPoint::ORIGIN)
    }

    /// `Q(a) = R(a, a)`.
    pub fn square(side: f64) -> Result<Self> {
        Self::origin(side, side)
    }

    /// `E(b) = (-b/2, b/2) x R`.
    pub fn vertical_strip(width: f64) -> Result<Self> {
        let mut r = Self::new(width, 1.0, PlanarPoint::new(-width / 2.0, 0.0))?;
        r.unbounded_height = true;
        Ok(r)
    }

    pub fn x_min(&self) -> f64 {
        self.anchor.x
    }
    pub fn x_max(&self) -> f64 {
        self.anchor.x + self.width
    }
    pub fn y_min(&self) -> f64 {
        self.anchor.y
    }
    pub fn y_max(&self) -> f64 {
        self.anchor.y + self.height
    }

    pub fn area(&self) -> f64 {
        if self.unbounded_height {
            f64::INFINITY
        } else {
            self.width * self.height
        }
    }

    pub fn contains(&self, p: PlanarPoint) -> bool {
        let in_x = p.x > self.x_min() && p.x < self.x_max();
        in_x && (self.unbounded_height || (p.y > self.y_min() && p.y < self.y_max()))
    }

    pub fn contains_closed(&self, p: PlanarPoint) -> bool {
        let in_x = p.x >= self.x_min() && p.x <= self.x_max();
        in_x && (self.unbounded_height || (p.y >= self.y_min() && p.y <= self.y_max()))
    }

    pub fn center(&self) -> PlanarPoint {
        PlanarPoint::new(
            self.anchor.x + self.width / 2.0,
            self.anchor.y + self.height / 2.0,
        )
    }

    /// Interior-offset grid: cell centers of an `nx` by `ny` subdivision,
    /// row-major (y outer, x inner).
    pub fn grid(&self, nx: usize, ny: usize) -> Vec<PlanarPoint> {
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                out.push(self.grid_point(i, j, nx, ny));
            }
        }
        out
    }

    /// Cell center `(i, j)` of the `nx` by `ny` grid.
    pub fn grid_point(&self, i: usize, j: usize, nx: usize, ny: usize) -> PlanarPoint {
        let dx = self.width / nx as f64;
        let dy = self.height / ny as f64;
        PlanarPoint::new(
            self.anchor.x + (i as f64 + 0.5) * dx,
            self.anchor.y + (j as f64 + 0.5) * dy,
        )
    }

    pub fn grid_step(&self, nx: usize, ny: usize) -> f64 {
        (self.width / nx as f64).max(self.height / ny as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BallCenter {
    Planar(PlanarPoint),
    Spatial(Point4),
}

/// Euclidean ball in R^2 or R^4; open unless `closed` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallRegion {
    pub radius: f64,
    pub center: BallCenter,
    pub closed: bool,
}

impl BallRegion {
    pub fn planar(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Parameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self {
            radius,
            center: BallCenter::Planar(PlanarPoint::ORIGIN),
            closed: false,
        })
    }

    /// Closed disk of radius `radius >= 0`; radius 0 is the single origin.
    pub fn planar_closed(radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::Parameter(format!("ball radius must be nonnegative, got {radius}")));
        }
        Ok(Self {
            radius,
            center: BallCenter::Planar(PlanarPoint::ORIGIN),
            closed: true,
        })
    }

    pub fn spatial(radius: f64) -> Result<Self> {
        let mut b = Self::planar(radius)?;
        b.center = BallCenter::Spatial(Point4::default());
        Ok(b)
    }

    pub fn dimension(&self) -> usize {
        match self.center {
            BallCenter::Planar(_) => 2,
            BallCenter::Spatial(_) => 4,
        }
    }

    pub fn planar_center(&self) -> PlanarPoint {
        match self.center {
            BallCenter::Planar(c) => c,
            BallCenter::Spatial(c) => c.first(),
        }
    }

    pub fn contains(&self, p: PlanarPoint) -> bool {
        let d2 = (p - self.planar_center()).norm_sq();
        if self.closed {
            d2 <= self.radius * self.radius
        } else {
            d2 < self.radius * self.radius
        }
    }
}

/// 2x2 matrix, rows first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, p: PlanarPoint) -> PlanarPoint {
        let m = &self.0;
        PlanarPoint::new(m[0][0] * p.x + m[0][1] * p.y, m[1][0] * p.x + m[1][1] * p.y)
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(c)
    }
}

/// 4x4 matrix in the (x1, y1, x2, y2) ordering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat4(pub [[f64; 4]; 4]);

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);

    /// Standard symplectic form for dx1^dy1 + dx2^dy2.
    pub const OMEGA: Mat4 = Mat4([
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]);

    pub fn transpose(&self) -> Mat4 {
        let mut t = [[0.0; 4]; 4];
        for (i, row) in self.0.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t[j][i] = *v;
            }
        }
        Mat4(t)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let mut m = self.0;
        let mut det = 1.0;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
                .unwrap_or(col);
            if m[pivot][col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            det *= m[col][col];
            for row in col + 1..4 {
                let f = m[row][col] / m[col][col];
                if f != 0.0 {
                    for k in col..4 {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
        det
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }

    /// Entrywise deviation of `J^T Omega J` from `Omega`.
    pub fn symplectic_defect(&self) -> f64 {
        (self.transpose() * Mat4::OMEGA * *self).max_abs_diff(&Mat4::OMEGA)
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, o: Mat4) -> Mat4 {
        let mut c = [[0.0; 4]; 4];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat4(c)
    }
}
