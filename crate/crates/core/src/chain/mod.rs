//! The composite `J = (Phi x F) o I` and the estimate chain bounding its
//! image by `|z1|^2 + |z2|^2 <= 3 + c eps`.

mod plan;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::double_spiral::{min_m, DoubleSpiral, DoubleSpiralConfig, DEFAULT_M};
use crate::error::{Error, Result};
use crate::exec::{fold_indexed, Execution};
use crate::geometry::{Mat2, PlanarPoint, Point4, RectRegion};
use crate::maps::{PlanarEmbedding, SQRT_PI};
use crate::spiral::SpiralParams;
use crate::torus_strip::{CutoffProfile, DomainSampling, StripModel, TaggedPoint};

pub use plan::{
    check_nesting, in_domain2, plan_family, plan_kh, planner_c, NestingPair, NestingReport, PlanFamily, PlanKH,
    ProbeWitness, DEFAULT_PROBES, PLAN_EPS0,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(rename = "C")]
    pub c_big: f64,
    #[serde(rename = "C_tilde")]
    pub c_tilde: f64,
    pub c: f64,
}

/// `C = (1 + M + 8 (A + 4 eps)) / (2 pi)`, `C~ = C + 4/A`,
/// `c = 1 + 2C + 1/sqrt(pi) + 4/A`.
pub fn compute_constants(eps: f64, a: f64, m: f64) -> Constants {
    let c_big = (1.0 + m + 8.0 * (a + 4.0 * eps)) / (2.0 * PI);
    Constants {
        c_big,
        c_tilde: c_big + 4.0 / a,
        c: 1.0 + 2.0 * c_big + 1.0 / SQRT_PI + 4.0 / a,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub eps: f64,
    pub a: f64,
    pub m: f64,
    pub constants: Constants,
}

impl ChainConfig {
    pub fn new(eps: f64, a: f64, m: f64) -> Result<Self> {
        DoubleSpiralConfig::new(a, eps, m)?;
        Ok(Self {
            eps,
            a,
            m,
            constants: compute_constants(eps, a, m),
        })
    }

    /// `M = max(8, min_M)`.
    pub fn with_default_m(eps: f64, a: f64) -> Result<Self> {
        Self::new(eps, a, DEFAULT_M.max(min_m(a, eps)))
    }

    pub fn double_spiral(&self) -> DoubleSpiralConfig {
        DoubleSpiralConfig {
            a: self.a,
            eps: self.eps,
            m: self.m,
        }
    }

    /// Step-1 spiral: `A = 2 sqrt(pi)`, `B = sqrt(pi)`, `lambda = eps`.
    pub fn step_one(&self) -> SpiralParams {
        SpiralParams::new(2.0 * SQRT_PI, SQRT_PI, self.eps, 0.0, 0.0).expect("eps > 0")
    }

    pub fn bound(&self) -> f64 {
        3.0 + self.constants.c * self.eps
    }
}

/// The vertical spiral `F = spiral o (x, y) -> (y, sqrt(pi) - x)` on
/// `R(sqrt(pi), 2 sqrt(pi))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FMap {
    pub spiral: SpiralParams,
}

impl FMap {
    pub fn new(eps: f64) -> Result<Self> {
        Ok(Self {
            spiral: SpiralParams::new(2.0 * SQRT_PI, SQRT_PI, eps, 0.0, 0.0)?,
        })
    }

    pub fn domain(&self) -> RectRegion {
        RectRegion::origin(SQRT_PI, 2.0 * SQRT_PI).expect("positive")
    }

    fn rotate(p: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(p.y, SQRT_PI - p.x)
    }

    pub fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        if !self.domain().contains(p) {
            return Err(Error::domain(
                "F",
                format!("({}, {}) outside R(sqrt(pi), 2 sqrt(pi))", p.x, p.y),
            ));
        }
        self.spiral.eval(Self::rotate(p))
    }
}

impl PlanarEmbedding for FMap {
    fn label(&self) -> String {
        "F".into()
    }

    fn eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        FMap::eval(self, p)
    }

    fn jacobian(&self, p: PlanarPoint) -> Option<Result<Mat2>> {
        Some(
            FMap::eval(self, p)
                .and_then(|_| self.spiral.jacobian(Self::rotate(p)))
                .map(|j| j * Mat2([[0.0, 1.0], [-1.0, 0.0]])),
        )
    }

    fn preimage(&self, q: PlanarPoint) -> Option<PlanarPoint> {
        self.spiral
            .preimage(q)
            .map(|l| PlanarPoint::new(SQRT_PI - l.y, l.x))
            .filter(|p| self.domain().contains(*p))
    }

    fn params(&self) -> BTreeMap<String, f64> {
        self.spiral.params()
    }
}

/// Everything needed to evaluate `J` for one configuration.
#[derive(Debug, Clone)]
pub struct Chain {
    pub config: ChainConfig,
    pub profile: CutoffProfile,
    pub strip: StripModel,
    pub double: DoubleSpiral,
    pub f: FMap,
}

/// One evaluated sample: the inputs, the flowed point and the image norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub p1: PlanarPoint,
    pub b: PlanarPoint,
    pub flowed: Point4,
    pub image: Point4,
    pub z1_sq: f64,
    pub z2_sq: f64,
}

impl Chain {
    pub fn new(config: ChainConfig) -> Result<Self> {
        Ok(Self {
            config,
            profile: CutoffProfile::new(config.a, config.eps)?,
            strip: StripModel::new(config.a, config.eps),
            double: DoubleSpiral::new(config.double_spiral())?,
            f: FMap::new(config.eps)?,
        })
    }

    pub fn f_eval(&self, p: PlanarPoint) -> Result<PlanarPoint> {
        self.f.eval(p)
    }

    pub fn record(&self, p1: PlanarPoint, b: PlanarPoint) -> Result<ChainRecord> {
        let flowed = crate::torus_strip::interleave_eval(&self.profile, &self.strip, p1, b)?;
        let z1 = self.double.eval_point(flowed.first())?;
        let z2 = self.f.eval(flowed.second())?;
        Ok(ChainRecord {
            p1,
            b,
            flowed,
            image: Point4::from_planes(z1, z2),
            z1_sq: z1.norm_sq(),
            z2_sq: z2.norm_sq(),
        })
    }

    pub fn j_eval(&self, p1: PlanarPoint, b: PlanarPoint) -> Result<Point4> {
        self.record(p1, b).map(|r| r.image)
    }

    pub fn bounds_check(&self, record: &ChainRecord) -> BoundsCheck {
        bounds_check(&self.config, record)
    }
}

pub fn j_eval(chain: &Chain, p1: PlanarPoint, b: PlanarPoint) -> Result<Point4> {
    chain.j_eval(p1, b)
}

pub fn f_eval(chain: &Chain, p: PlanarPoint) -> Result<PlanarPoint> {
    chain.f_eval(p)
}

/// The inequalities of the estimate chain, in proof order, followed by the
/// final bound.
pub const CHECKS: [&str; 7] = [
    "estimatez2",
    "estimatez2second",
    "dot",
    "dot2",
    "dot3",
    "abcd",
    "bound",
];

/// Slack of every inequality; a check passes when its slack is `>= 0`
/// (`> 0` for the strict lower bound `y2 > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub slack: [f64; 7],
    pub pass: [bool; 7],
}

impl BoundsCheck {
    pub fn passed(&self) -> bool {
        self.pass.iter().all(|&p| p)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        CHECKS
            .iter()
            .zip(self.pass)
            .filter(|(_, p)| !p)
            .map(|(n, _)| *n)
            .collect()
    }
}

pub fn bounds_check(config: &ChainConfig, r: &ChainRecord) -> BoundsCheck {
    let eps = config.eps;
    let k = config.constants;
    let t = r.flowed.x1.abs() / config.a;
    let y2 = r.flowed.y2;
    let rt_pi_inv = 1.0 / SQRT_PI;
    let upper_y2 = SQRT_PI * (2.0 - t + eps) - y2;
    let slack = [
        (y2 + eps) * rt_pi_inv - r.z2_sq,
        y2.min(upper_y2),
        2.0 - t + eps * (1.0 + rt_pi_inv) - r.z2_sq,
        t + k.c_big * eps - r.z1_sq / 2.0,
        1.0 + k.c_tilde * eps - r.z1_sq / 2.0,
        2.0 + (1.0 + k.c_big + rt_pi_inv) * eps - (r.z1_sq / 2.0 + r.z2_sq),
        config.bound() - (r.z1_sq + r.z2_sq),
    ];
    let mut pass = slack.map(|s| s >= 0.0);
    pass[1] = y2 > 0.0 && upper_y2 >= 0.0;
    BoundsCheck { slack, pass }
}

/// How `(p1, b)` pairs are drawn for the sup estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSampling {
    pub domain: DomainSampling,
    /// Grid resolution along each band (or rectangle side).
    pub p1_resolution: usize,
    /// Grid resolution per side of `Q(sqrt(pi))`.
    pub b_resolution: usize,
    pub random: usize,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_RANDOM: usize = 100_000;

impl ChainSampling {
    /// At least `n` samples: `10^5` seeded random pairs (fewer when `n` is
    /// small) and a product grid covering the rest.
    pub fn for_target(n: usize, seed: u64) -> Self {
        let random = DEFAULT_RANDOM.min(n / 10);
        let domain = DomainSampling::Strands { rows: 4 };
        let p1_resolution = 200;
        let p1_count = 3 * p1_resolution * 4;
        let rest = n.saturating_sub(random) as f64;
        let b_resolution = ((rest / p1_count as f64).sqrt().ceil() as usize).max(2);
        Self {
            domain,
            p1_resolution,
            b_resolution,
            random,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainViolation {
    pub index: usize,
    pub check: String,
    pub slack: f64,
    pub p1: PlanarPoint,
    pub b: PlanarPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub eps: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub samples: usize,
    pub sup_norm: f64,
    pub bound: f64,
    pub c: f64,
    #[serde(rename = "C")]
    pub c_big: f64,
    #[serde(rename = "C_tilde")]
    pub c_tilde: f64,
    pub checks: BTreeMap<String, CheckSummary>,
    pub evaluation_errors: usize,
    pub first_violation: Option<ChainViolation>,
    pub seed: u64,
    pub rng: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub violations: usize,
    pub min_slack: f64,
}

#[derive(Debug, Clone)]
struct Acc {
    count: usize,
    errors: usize,
    sup: f64,
    violations: [usize; 7],
    min_slack: [f64; 7],
    first: Option<ChainViolation>,
}

impl Acc {
    fn new() -> Self {
        Self {
            count: 0,
            errors: 0,
            sup: 0.0,
            violations: [0; 7],
            min_slack: [f64::INFINITY; 7],
            first: None,
        }
    }

    fn note(&mut self, v: ChainViolation) {
        if self.first.as_ref().is_none_or(|f| v.index < f.index) {
            self.first = Some(v);
        }
    }

    fn merge(mut self, o: Acc) -> Acc {
        self.count += o.count;
        self.errors += o.errors;
        self.sup = self.sup.max(o.sup);
        for i in 0..7 {
            self.violations[i] += o.violations[i];
            self.min_slack[i] = self.min_slack[i].min(o.min_slack[i]);
        }
        if let Some(v) = o.first {
            self.note(v);
        }
        self
    }
}

/// Uniform point of a band list, chosen with probability proportional to
/// band area.
fn random_in_bands(bands: &[RectRegion], rng: &mut ChaCha8Rng) -> PlanarPoint {
    let total: f64 = bands.iter().map(RectRegion::area).sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut band = bands[bands.len() - 1];
    for b in bands {
        if pick < b.area() {
            band = *b;
            break;
        }
        pick -= b.area();
    }
    let open = |rng: &mut ChaCha8Rng| loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    };
    PlanarPoint::new(
        band.x_min() + open(rng) * band.width,
        band.y_min() + open(rng) * band.height,
    )
}

/// Deterministic sample list for a chain run: the grid part in row-major
/// order, then the random part. Sample `i` of the random part is drawn from
/// its own ChaCha8 stream so it does not depend on the evaluation order.
pub struct ChainSamples {
    p1: Vec<TaggedPoint>,
    b: Vec<PlanarPoint>,
    bands: Vec<RectRegion>,
    random: usize,
    seed: u64,
}

impl ChainSamples {
    pub fn new(chain: &Chain, sampling: &ChainSampling) -> Result<Self> {
        let p1 = chain.double.domain.sample(sampling.p1_resolution, sampling.domain)?;
        let b = RectRegion::square(SQRT_PI)?.grid(sampling.b_resolution, sampling.b_resolution);
        let bands = match sampling.domain {
            DomainSampling::Rectangles => vec![chain.double.domain.r2, chain.double.domain.r1],
            DomainSampling::Strands { .. } => chain.double.domain.bands(),
        };
        Ok(Self {
            p1,
            b,
            bands,
            random: sampling.random,
            seed: sampling.seed,
        })
    }

    pub fn len(&self) -> usize {
        self.p1.len() * self.b.len() + self.random
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> (PlanarPoint, PlanarPoint) {
        let grid = self.p1.len() * self.b.len();
        if i < grid {
            return (self.p1[i / self.b.len()].p, self.b[i % self.b.len()]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((i - grid) as u64);
        let p1 = random_in_bands(&self.bands, &mut rng);
        let mut coord = || loop {
            let u: f64 = rng.gen();
            if u > 0.0 {
                return u * SQRT_PI;
            }
        };
        let b = PlanarPoint::new(coord(), coord());
        (p1, b)
    }
}

/// Evaluate `J` on every sample, run the estimate chain and take the sup of
/// `|z1|^2 + |z2|^2`.
pub fn verify_chain(config: ChainConfig, sampling: &ChainSampling, exec: Execution) -> Result<ChainReport> {
    let chain = Chain::new(config)?;
    let samples = ChainSamples::new(&chain, sampling)?;
    let acc = fold_indexed(
        exec,
        samples.len(),
        Acc::new,
        |mut acc, i| {
            acc.count += 1;
            let (p1, b) = samples.get(i);
            match chain.record(p1, b) {
                Ok(r) => {
                    acc.sup = acc.sup.max(r.z1_sq + r.z2_sq);
                    let bc = bounds_check(&config, &r);
                    for k in 0..7 {
                        acc.min_slack[k] = acc.min_slack[k].min(bc.slack[k]);
                        if !bc.pass[k] {
                            acc.violations[k] += 1;
                            acc.note(ChainViolation {
                                index: i,
                                check: CHECKS[k].to_string(),
                                slack: bc.slack[k],
                                p1,
                                b,
                            });
                        }
                    }
                }
                Err(e) => {
                    acc.errors += 1;
                    acc.note(ChainViolation {
                        index: i,
                        check: format!("evaluation: {e}"),
                        slack: f64::NAN,
                        p1,
                        b,
                    });
                }
            }
            acc
        },
        Acc::merge,
    );
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(k, n)| {
            (
                n.to_string(),
                CheckSummary {
                    violations: acc.violations[k],
                    min_slack: acc.min_slack[k],
                },
            )
        })
        .collect();
    let passed = acc.errors == 0 && acc.violations.iter().all(|&v| v == 0);
    Ok(ChainReport {
        eps: config.eps,
        a: config.a,
        m: config.m,
        samples: acc.count,
        sup_norm: acc.sup,
        bound: config.bound(),
        c: config.constants.c,
        c_big: config.constants.c_big,
        c_tilde: config.constants.c_tilde,
        checks,
        evaluation_errors: acc.errors,
        first_violation: acc.first,
        seed: sampling.seed,
        rng: "ChaCha8".into(),
        passed,
    })
}
