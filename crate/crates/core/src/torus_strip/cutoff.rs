//! A concrete smooth cutoff `chi` for the strip Hamiltonian.
//!
//! The profile is the mollification of a piecewise-linear even function:
//! `1` on `|x| <= p`, linear down to `0` at `|x| = q`, `0` beyond, where
//! `p = a + h`, `q = A - eps^2 - h`, `a = eps^2` and `h = eps^2 / 8` is the
//! mollifier half-width. Convolving with a smooth bump of support `[-h, h]`
//! leaves `chi = 1` exactly on `[-a, a]` and `chi = 0` exactly off
//! `[-A + eps^2, A - eps^2]`.
//!
//! Near each kink the convolution reduces to the bump's first and second
//! antiderivatives, which are evaluated with a 64-point Gauss-Legendre rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_64;

pub const DEFAULT_EPS0: f64 = 0.1;

/// Value, slope or curvature of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Value,
    Slope,
    Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub half_length: f64,
    pub eps: f64,
    /// Plateau half-width, `eps^2`.
    pub plateau: f64,
    /// `100 eps`; recorded only.
    pub eps_tilde: f64,
    knot_in: f64,
    knot_out: f64,
    slope: f64,
    smoothing: f64,
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

fn bump_mass() -> f64 {
    use std::sync::OnceLock;
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| gauss_legendre_64().integrate(-1.0, 1.0, bump))
}

/// Normalized bump CDF at `sigma` (bump scaled to `[-1, 1]`).
fn bump_cdf(sigma: f64) -> f64 {
    if sigma <= -1.0 {
        0.0
    } else if sigma >= 1.0 {
        1.0
    } else {
        (gauss_legendre_64().integrate(-1.0, sigma, bump) / bump_mass()).clamp(0.0, 1.0)
    }
}

/// `int_{-1}^{sigma} (sigma - u) bump(u) du`, normalized.
fn bump_ramp(sigma: f64) -> f64 {
    if sigma <= -1.0 {
        0.0
    } else if sigma >= 1.0 {
        sigma
    } else {
        gauss_legendre_64().integrate(-1.0, sigma, |u| (sigma - u) * bump(u)) / bump_mass()
    }
}

impl CutoffProfile {
    pub fn new(half_length: f64, eps: f64) -> Result<Self> {
        Self::with_eps0(half_length, eps, DEFAULT_EPS0)
    }

    pub fn with_eps0(half_length: f64, eps: f64, eps0: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= eps0) {
            return Err(Error::Construction(format!("eps must lie in (0, {eps0}], got {eps}")));
        }
        if !(half_length >= 0.5 && half_length.is_finite()) {
            return Err(Error::Construction(format!(
                "strip half-length must be at least 1/2, got {half_length}"
            )));
        }
        let plateau = eps * eps;
        let smoothing = plateau / 8.0;
        let knot_in = plateau + smoothing;
        let knot_out = half_length - plateau - smoothing;
        if knot_out - knot_in <= 2.0 * smoothing {
            return Err(Error::Construction("ramp too short for the mollifier".into()));
        }
        let slope = 1.0 / (knot_out - knot_in);
        if slope > 1.0 / half_length + eps {
            return Err(Error::Construction(format!(
                "ramp slope {slope} exceeds 1/A + eps = {}",
                1.0 / half_length + eps
            )));
        }
        // Deviation from the tent: kink offsets plus the mollification shift.
        let deviation = (plateau + smoothing) / half_length + slope * smoothing;
        if deviation > eps {
            return Err(Error::Construction(format!(
                "tent deviation bound {deviation} exceeds eps = {eps}"
            )));
        }
        Ok(Self {
            half_length,
            eps,
            plateau,
            eps_tilde: 100.0 * eps,
            knot_in,
            knot_out,
            slope,
            smoothing,
        })
    }

    /// Support end, `A - eps^2`.
    pub fn support(&self) -> f64 {
        self.half_length - self.plateau
    }

    pub fn max_slope(&self) -> f64 {
        self.slope
    }

    pub fn eval(&self, x: f64, order: Order) -> f64 {
        let s = x.abs();
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        let h = self.smoothing;
        let m = self.slope;
        let (p, q) = (self.knot_in, self.knot_out);
        if s <= self.plateau || s >= self.support() || !s.is_finite() {
            return match order {
                Order::Value if s <= self.plateau => 1.0,
                _ => 0.0,
            };
        }
        if s < p + h {
            let sigma = (s - p) / h;
            match order {
                Order::Value => (1.0 - m * h * bump_ramp(sigma)).clamp(0.0, 1.0),
                Order::Slope => -sign * m * bump_cdf(sigma),
                Order::Curvature => -m * bump(sigma) / (h * bump_mass()),
            }
        } else if s <= q - h {
            match order {
                Order::Value => (m * (q - s)).clamp(0.0, 1.0),
                Order::Slope => -sign * m,
                Order::Curvature => 0.0,
            }
        } else {
            let sigma = (q - s) / h;
            match order {
                Order::Value => (m * h * bump_ramp(sigma)).clamp(0.0, 1.0),
                Order::Slope => -sign * m * bump_cdf(sigma),
                Order::Curvature => m * bump(sigma) / (h * bump_mass()),
            }
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x, Order::Value)
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.eval(x, Order::Slope)
    }

    pub fn curvature(&self, x: f64) -> f64 {
        self.eval(x, Order::Curvature)
    }

    /// Check the five constraints on `n` uniformly spaced points of
    /// `[-1.25 A, 1.25 A]` (grid endpoints included).
    pub fn verify(&self, n: usize) -> CutoffReport {
        let a = self.half_length;
        let lo = -1.25 * a;
        let step = 2.5 * a / (n.max(2) - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| self.value(x)).collect();

        let mut report = CutoffReport {
            samples: n,
            ..CutoffReport::default()
        };
        for i in 1..n {
            let (x0, x1) = (xs[i - 1], xs[i]);
            let (v0, v1) = (vals[i - 1], vals[i]);
            if x1 <= 0.0 && v1 < v0 || x0 >= 0.0 && v1 > v0 {
                report.monotone_violations += 1;
            }
        }
        let slope_cap = 1.0 / a + self.eps;
        for (&x, &v) in xs.iter().zip(&vals) {
            if !(0.0..=1.0).contains(&v) {
                report.range_violations += 1;
            }
            if x.abs() <= self.plateau && v != 1.0 {
                report.plateau_violations += 1;
            }
            if x.abs() >= self.support() && v != 0.0 {
                report.support_violations += 1;
            }
            let d = self.slope(x).abs();
            report.max_abs_slope = report.max_abs_slope.max(d);
            if d > slope_cap {
                report.slope_violations += 1;
            }
            if x.abs() <= a - self.eps / 2.0 {
                let dev = (v - (1.0 - x.abs() / a)).abs();
                report.max_tent_deviation = report.max_tent_deviation.max(dev);
                if dev > self.eps {
                    report.tent_violations += 1;
                }
            }
        }
        report.slope_cap = slope_cap;
        report
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CutoffReport {
    pub samples: usize,
    pub monotone_violations: usize,
    pub range_violations: usize,
    pub plateau_violations: usize,
    pub support_violations: usize,
    pub slope_violations: usize,
    pub tent_violations: usize,
    pub max_abs_slope: f64,
    pub slope_cap: f64,
    pub max_tent_deviation: f64,
}

impl CutoffReport {
    pub fn passed(&self) -> bool {
        self.monotone_violations
            + self.range_violations
            + self.plateau_violations
            + self.support_violations
            + self.slope_violations
            + self.tent_violations
            == 0
    }
}
