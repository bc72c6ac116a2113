//! Sampled certification of planar and 4D maps.
//!
//! Every check walks a deterministic list of samples, folds per-sample
//! results with an associative merge and reports the smallest violating
//! index, so reports do not depend on how the work was split.

mod area;
mod spatial_hash;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{fold_indexed, Execution};
use crate::geometry::{BallCenter, BallRegion, Mat2, Mat4, PlanarPoint, Point4, RectRegion};
use crate::maps::PlanarEmbedding;

pub use area::{estimate_area, AreaEstimate, MIN_AREA_SAMPLES};
pub use spatial_hash::{check_injective, check_injective_points, min_cross_distance, SpatialHash};

pub const RNG_NAME: &str = "ChaCha8";
/// Finite-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Tolerance for finite differences against closed-form Jacobians.
pub const FD_TOL: f64 = 1e-4;
/// Tolerance for closed-form Jacobian determinants.
pub const ANALYTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSupplement {
    pub seed: u64,
    pub count: usize,
}

/// Interior-offset grid over a rectangle, optionally followed by seeded
/// uniform points. Sample `i` is a pure function of `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleGrid {
    pub region: RectRegion,
    pub nx: usize,
    pub ny: usize,
    pub random: Option<RandomSupplement>,
}

impl SampleGrid {
    pub fn new(region: RectRegion, nx: usize, ny: usize) -> Self {
        Self {
            region,
            nx,
            ny,
            random: None,
        }
    }

    pub fn square(region: RectRegion, n: usize) -> Self {
        Self::new(region, n, n)
    }

    pub fn with_random(mut self, seed: u64, count: usize) -> Self {
        self.random = Some(RandomSupplement { seed, count });
        self
    }

    pub fn grid_len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn len(&self) -> usize {
        self.grid_len() + self.random.map_or(0, |r| r.count)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self) -> f64 {
        self.region.grid_step(self.nx.max(1), self.ny.max(1))
    }

    pub fn point(&self, i: usize) -> PlanarPoint {
        let r = &self.region;
        if i < self.grid_len() {
            return r.grid_point(i % self.nx, i / self.nx, self.nx, self.ny);
        }
        let sup = self.random.expect("index within len");
        let mut rng = ChaCha8Rng::seed_from_u64(sup.seed);
        rng.set_stream((i - self.grid_len()) as u64);
        let mut open = || loop {
            let u: f64 = rng.gen();
            if u > 0.0 {
                return u;
            }
        };
        let (u, v) = (open(), open());
        PlanarPoint::new(r.anchor.x + u * r.width, r.anchor.y + v * r.height)
    }

    pub fn points(&self) -> Vec<PlanarPoint> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstViolation {
    pub index: usize,
    pub location: Vec<f64>,
    /// Signed margin; `None` when the map could not be evaluated there.
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub map: String,
    pub params: BTreeMap<String, f64>,
    pub samples: usize,
    pub violations: usize,
    pub worst_violation: Option<WorstViolation>,
    pub extrema: BTreeMap<String, f64>,
    pub rng: Option<String>,
    pub seed: Option<u64>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn new(check: &str, map: &str) -> Self {
        Self {
            check: check.into(),
            map: map.into(),
            params: BTreeMap::new(),
            samples: 0,
            violations: 0,
            worst_violation: None,
            extrema: BTreeMap::new(),
            rng: None,
            seed: None,
            passed: true,
        }
    }

    fn with_grid(mut self, grid: &SampleGrid) -> Self {
        if let Some(r) = grid.random {
            self.rng = Some(RNG_NAME.into());
            self.seed = Some(r.seed);
        }
        self
    }

    pub fn extremum(&self, key: &str) -> Option<f64> {
        self.extrema.get(key).copied()
    }
}

/// Per-check accumulator: sample count, violations, the first violation
/// and named extrema merged with max or min.
#[derive(Debug, Clone)]
struct Tally {
    count: usize,
    violations: usize,
    first: Option<WorstViolation>,
    maxima: Vec<f64>,
    minima: Vec<f64>,
}

impl Tally {
    fn new(nmax: usize, nmin: usize) -> Self {
        Self {
            count: 0,
            violations: 0,
            first: None,
            maxima: vec![f64::NEG_INFINITY; nmax],
            minima: vec![f64::INFINITY; nmin],
        }
    }

    fn violate(&mut self, index: usize, location: Vec<f64>, slack: Option<f64>) {
        self.violations += 1;
        if self.first.as_ref().is_none_or(|f| index < f.index) {
            self.first = Some(WorstViolation {
                index,
                location,
                slack,
            });
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.count += o.count;
        self.violations += o.violations;
        for (a, b) in self.maxima.iter_mut().zip(o.maxima) {
            *a = a.max(b);
        }
        for (a, b) in self.minima.iter_mut().zip(o.minima) {
            *a = a.min(b);
        }
        if let Some(f) = o.first {
            if self.first.as_ref().is_none_or(|s| f.index < s.index) {
                self.first = Some(f);
            }
        }
        self
    }

    fn finish(self, mut report: VerificationReport, max_keys: &[&str], min_keys: &[&str]) -> VerificationReport {
        report.samples = self.count;
        report.violations = self.violations;
        report.worst_violation = self.first;
        for (k, v) in max_keys.iter().zip(self.maxima) {
            if v.is_finite() {
                report.extrema.insert(k.to_string(), v);
            }
        }
        for (k, v) in min_keys.iter().zip(self.minima) {
            if v.is_finite() {
                report.extrema.insert(k.to_string(), v);
            }
        }
        report.passed = report.violations == 0;
        report
    }
}

fn fold_tally<F>(exec: Execution, n: usize, nmax: usize, nmin: usize, f: F) -> Tally
where
    F: Fn(&mut Tally, usize) + Sync + Send,
{
    // `fold_indexed` takes a plain `fn` initializer, so the sizes ride along
    // in the first fold step instead.
    let acc = fold_indexed(
        exec,
        n,
        || None,
        |acc: Option<Tally>, i| {
            let mut t = acc.unwrap_or_else(|| Tally::new(nmax, nmin));
            t.count += 1;
            f(&mut t, i);
            Some(t)
        },
        |a, b| match (a, b) {
            (Some(a), Some(b)) => Some(a.merge(b)),
            (a, None) => a,
            (None, b) => b,
        },
    );
    acc.unwrap_or_else(|| Tally::new(nmax, nmin))
}

/// Fourth-order central difference Jacobian of a planar map.
pub fn fd_jacobian(map: &dyn PlanarEmbedding, p: PlanarPoint, h: f64) -> Result<Mat2> {
    let mut cols = [[0.0; 2]; 2];
    for (k, dir) in [PlanarPoint::new(h, 0.0), PlanarPoint::new(0.0, h)].into_iter().enumerate() {
        let at = |t: f64| map.eval(PlanarPoint::new(p.x + t * dir.x, p.y + t * dir.y));
        let (m2, m1, p1, p2) = (at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?);
        cols[k] = [
            (m2.x - 8.0 * m1.x + 8.0 * p1.x - p2.x) / (12.0 * h),
            (m2.y - 8.0 * m1.y + 8.0 * p1.y - p2.y) / (12.0 * h),
        ];
    }
    Ok(Mat2([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]))
}

/// Fourth-order central difference Jacobian of a map on `R^4`.
pub fn fd_jacobian4(f: impl Fn(Point4) -> Point4, q: Point4, h: f64) -> Mat4 {
    let base = q.to_array();
    let mut m = [[0.0; 4]; 4];
    for k in 0..4 {
        let at = |t: f64| {
            let mut a = base;
            a[k] += t * h;
            f(Point4::from_array(a)).to_array()
        };
        let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
        for (i, row) in m.iter_mut().enumerate() {
            row[k] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
        }
    }
    Mat4(m)
}

/// `|det J - 1|` at every sample, with the closed-form Jacobian when the
/// map has one and finite differences otherwise.
pub fn check_symplectic(
    map: &dyn PlanarEmbedding,
    grid: &SampleGrid,
    tol: f64,
    exec: Execution,
) -> Result<VerificationReport> {
    if !(tol > 0.0) {
        return Err(Error::Usage(format!("tolerance must be positive, got {tol}")));
    }
    let analytic = grid.is_empty() || map.jacobian(grid.point(0)).is_some();
    let mut report = VerificationReport::new("symplectic", &map.label()).with_grid(grid);
    report.params = map.params();
    report.params.insert("tol".into(), tol);
    report.params.insert("analytic".into(), if analytic { 1.0 } else { 0.0 });
    let t = fold_tally(exec, grid.len(), 2, 1, |t, i| {
        let p = grid.point(i);
        let j = if analytic {
            map.jacobian(p).unwrap_or_else(|| fd_jacobian(map, p, FD_STEP))
        } else {
            fd_jacobian(map, p, FD_STEP)
        };
        match j {
            Ok(j) => {
                let det = j.det();
                let dev = (det - 1.0).abs();
                t.maxima[0] = t.maxima[0].max(dev);
                t.maxima[1] = t.maxima[1].max(det);
                t.minima[0] = t.minima[0].min(det);
                if !(dev <= tol) {
                    t.violate(i, p.to_array().to_vec(), Some(tol - dev));
                }
            }
            Err(_) => t.violate(i, p.to_array().to_vec(), None),
        }
    });
    Ok(t.finish(report, &["max_abs_det_minus_one", "max_det"], &["min_det"]))
}

/// Largest entrywise gap between the closed-form Jacobian and finite
/// differences.
pub fn check_fd_agreement(
    map: &dyn PlanarEmbedding,
    grid: &SampleGrid,
    tol: f64,
    exec: Execution,
) -> Result<VerificationReport> {
    if !grid.is_empty() && map.jacobian(grid.point(0)).is_none() {
        return Err(Error::Usage(format!("map {} has no closed-form Jacobian", map.label())));
    }
    let mut report = VerificationReport::new("fd_agreement", &map.label()).with_grid(grid);
    report.params = map.params();
    report.params.insert("tol".into(), tol);
    report.params.insert("fd_step".into(), FD_STEP);
    let t = fold_tally(exec, grid.len(), 1, 0, |t, i| {
        let p = grid.point(i);
        let pair = map
            .jacobian(p)
            .expect("checked above")
            .and_then(|a| fd_jacobian(map, p, FD_STEP).map(|f| (a, f)));
        match pair {
            Ok((a, f)) => {
                let gap = a.max_abs_diff(&f);
                t.maxima[0] = t.maxima[0].max(gap);
                if !(gap <= tol) {
                    t.violate(i, p.to_array().to_vec(), Some(tol - gap));
                }
            }
            Err(_) => t.violate(i, p.to_array().to_vec(), None),
        }
    });
    Ok(t.finish(report, &["max_abs_fd_gap"], &[]))
}

fn planar_ball(ball: &BallRegion) -> Result<PlanarPoint> {
    match ball.center {
        BallCenter::Planar(c) => Ok(c),
        BallCenter::Spatial(_) => Err(Error::Usage("expected a planar ball".into())),
    }
}

/// Violation when `|image - center|^2 > (radius + tol)^2`.
pub fn check_contained(
    map: &dyn PlanarEmbedding,
    grid: &SampleGrid,
    ball: &BallRegion,
    tol: f64,
    exec: Execution,
) -> Result<VerificationReport> {
    if !(tol >= 0.0) {
        return Err(Error::Usage(format!("tolerance must be nonnegative, got {tol}")));
    }
    let c = planar_ball(ball)?;
    let cap = (ball.radius + tol).powi(2);
    let mut report = VerificationReport::new("contained", &map.label()).with_grid(grid);
    report.params = map.params();
    report.params.insert("radius".into(), ball.radius);
    report.params.insert("tol".into(), tol);
    let t = fold_tally(exec, grid.len(), 1, 0, |t, i| {
        let p = grid.point(i);
        match map.eval(p) {
            Ok(q) => {
                let d2 = (q - c).norm_sq();
                t.maxima[0] = t.maxima[0].max(d2);
                if !(d2 <= cap) {
                    t.violate(i, p.to_array().to_vec(), Some(cap - d2));
                }
            }
            Err(_) => t.violate(i, p.to_array().to_vec(), None),
        }
    });
    let mut report = t.finish(report, &["sup_norm_sq"], &[]);
    if let Some(s) = report.extremum("sup_norm_sq") {
        report.extrema.insert("sup_norm".into(), s.sqrt());
    }
    Ok(report)
}

/// Violation when `|image - center|^2 <= radius^2`; the ball must be closed.
pub fn check_avoids(
    map: &dyn PlanarEmbedding,
    grid: &SampleGrid,
    ball: &BallRegion,
    exec: Execution,
) -> Result<VerificationReport> {
    if !ball.closed {
        return Err(Error::Usage("check_avoids needs a closed ball".into()));
    }
    let c = planar_ball(ball)?;
    let r2 = ball.radius * ball.radius;
    let mut report = VerificationReport::new("avoids", &map.label()).with_grid(grid);
    report.params = map.params();
    report.params.insert("radius".into(), ball.radius);
    let t = fold_tally(exec, grid.len(), 0, 1, |t, i| {
        let p = grid.point(i);
        match map.eval(p) {
            Ok(q) => {
                let d2 = (q - c).norm_sq();
                t.minima[0] = t.minima[0].min(d2);
                if d2 <= r2 || d2.is_nan() {
                    t.violate(i, p.to_array().to_vec(), Some(d2 - r2));
                }
            }
            Err(_) => t.violate(i, p.to_array().to_vec(), None),
        }
    });
    Ok(t.finish(report, &[], &["inf_norm_sq"]))
}

/// `|det J - 1|` and `|J^T Omega J - Omega|` at every sample of a 4D map.
pub fn check_symplectic_r4(
    label: &str,
    samples: &[Point4],
    jacobian: impl Fn(Point4) -> Result<Mat4> + Sync + Send,
    tol: f64,
    exec: Execution,
) -> Result<VerificationReport> {
    if !(tol > 0.0) {
        return Err(Error::Usage(format!("tolerance must be positive, got {tol}")));
    }
    let mut report = VerificationReport::new("symplectic_r4", label);
    report.params.insert("tol".into(), tol);
    let t = fold_tally(exec, samples.len(), 2, 0, |t, i| {
        let q = samples[i];
        match jacobian(q) {
            Ok(j) => {
                let dev = (j.det() - 1.0).abs();
                let defect = j.symplectic_defect();
                t.maxima[0] = t.maxima[0].max(dev);
                t.maxima[1] = t.maxima[1].max(defect);
                let worst = dev.max(defect);
                if !(worst <= tol) {
                    t.violate(i, q.to_array().to_vec(), Some(tol - worst));
                }
            }
            Err(_) => t.violate(i, q.to_array().to_vec(), None),
        }
    });
    Ok(t.finish(report, &["max_abs_det_minus_one", "max_symplectic_defect"], &[]))
}

/// Default `domain_sep` for injectivity: three grid steps.
pub fn default_domain_sep(grid: &SampleGrid) -> f64 {
    3.0 * grid.step()
}
