//! Uniform-grid hashing for near-collision and nearest-pair queries.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::geometry::PlanarPoint;
use crate::maps::PlanarEmbedding;

use super::{default_domain_sep, fold_tally, SampleGrid, VerificationReport};

/// Points of `R^D` bucketed by cells of side `cell`.
pub struct SpatialHash<const D: usize> {
    cell: f64,
    buckets: HashMap<[i64; D], Vec<usize>>,
}

impl<const D: usize> SpatialHash<D> {
    pub fn new(points: &[[f64; D]], cell: f64) -> Self {
        let mut buckets: HashMap<[i64; D], Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key_of(p, cell)).or_default().push(i);
        }
        Self { cell, buckets }
    }

    fn key_of(p: &[f64; D], cell: f64) -> [i64; D] {
        p.map(|x| (x / cell).floor() as i64)
    }

    /// Indices in the `3^D` cells around `p`, in ascending order.
    pub fn neighbors(&self, p: &[f64; D]) -> Vec<usize> {
        let base = Self::key_of(p, self.cell);
        let mut out = Vec::new();
        for code in 0..3usize.pow(D as u32) {
            let mut key = base;
            let mut c = code;
            for k in key.iter_mut() {
                *k += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(v) = self.buckets.get(&key) {
                out.extend_from_slice(v);
            }
        }
        out.sort_unstable();
        out
    }
}

fn dist<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Flag pairs whose images are closer than `image_tol` while their domain
/// points are more than `domain_sep` apart. Non-finite images count as
/// violations.
pub fn check_injective_points<const K: usize, const D: usize>(
    label: &str,
    domain: &[[f64; K]],
    images: &[[f64; D]],
    image_tol: f64,
    domain_sep: f64,
    exec: Execution,
) -> Result<VerificationReport> {
    if !(image_tol > 0.0 && domain_sep > 0.0) {
        return Err(Error::Usage(format!(
            "image_tol and domain_sep must be positive, got {image_tol}, {domain_sep}"
        )));
    }
    if domain.len() != images.len() {
        return Err(Error::Usage("domain and image lists differ in length".into()));
    }
    let hash = SpatialHash::new(images, image_tol);
    let mut report = VerificationReport::new("injective", label);
    report.params.insert("image_tol".into(), image_tol);
    report.params.insert("domain_sep".into(), domain_sep);
    let t = fold_tally(exec, images.len(), 1, 0, |t, i| {
        let img = &images[i];
        if !img.iter().all(|x| x.is_finite()) {
            t.violate(i, domain[i].to_vec(), None);
            return;
        }
        for j in hash.neighbors(img) {
            if j <= i {
                continue;
            }
            let d = dist(img, &images[j]);
            if d < image_tol && dist(&domain[i], &domain[j]) > domain_sep {
                t.maxima[0] = t.maxima[0].max(1.0);
                t.violate(i, domain[i].to_vec(), Some(d - image_tol));
            }
        }
    });
    let mut report = t.finish(report, &["collision_found"], &[]);
    report.extrema.entry("collision_found".into()).or_insert(0.0);
    Ok(report)
}

/// Injectivity of a planar map on a grid; `domain_sep` defaults to three
/// grid steps.
pub fn check_injective(
    map: &dyn PlanarEmbedding,
    grid: &SampleGrid,
    image_tol: f64,
    domain_sep: Option<f64>,
    exec: Execution,
) -> Result<VerificationReport> {
    let sep = domain_sep.unwrap_or_else(|| default_domain_sep(grid));
    let domain: Vec<[f64; 2]> = grid.points().into_iter().map(PlanarPoint::to_array).collect();
    let images = map_indexed(exec, domain.len(), |i| {
        map.eval(PlanarPoint::new(domain[i][0], domain[i][1]))
            .map(PlanarPoint::to_array)
            .unwrap_or([f64::NAN; 2])
    });
    let mut report = check_injective_points(&map.label(), &domain, &images, image_tol, sep, exec)?;
    let mut params = map.params();
    params.append(&mut report.params);
    report.params = params;
    report.rng = grid.random.map(|_| super::RNG_NAME.into());
    report.seed = grid.random.map(|r| r.seed);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossDistance {
    pub distance: f64,
    pub index_a: usize,
    pub index_b: usize,
}

fn better(x: Option<CrossDistance>, y: Option<CrossDistance>) -> Option<CrossDistance> {
    match (x, y) {
        (Some(a), Some(b)) => {
            let ka = (a.distance, a.index_a, a.index_b);
            let kb = (b.distance, b.index_a, b.index_b);
            Some(if kb < ka { b } else { a })
        }
        (a, None) => a,
        (None, b) => b,
    }
}

/// Uniform grid over a point set for nearest-point queries.
struct PointGrid<'a> {
    points: &'a [PlanarPoint],
    origin: PlanarPoint,
    cell: f64,
    nx: i64,
    ny: i64,
    cells: Vec<Vec<usize>>,
}

impl<'a> PointGrid<'a> {
    fn new(points: &'a [PlanarPoint]) -> Self {
        let (x0, y0, x1, y1) = bbox(points);
        let area = ((x1 - x0) * (y1 - y0)).max(f64::MIN_POSITIVE);
        let cell = (area / points.len() as f64)
            .sqrt()
            .max((x1 - x0).max(y1 - y0) / 1024.0)
            .max(1e-300);
        let nx = (((x1 - x0) / cell).floor() as i64 + 1).max(1);
        let ny = (((y1 - y0) / cell).floor() as i64 + 1).max(1);
        let mut grid = Self {
            points,
            origin: PlanarPoint::new(x0, y0),
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); (nx * ny) as usize],
        };
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = grid.coord(p);
            let k = (cy.clamp(0, ny - 1) * nx + cx.clamp(0, nx - 1)) as usize;
            grid.cells[k].push(i);
        }
        grid
    }

    fn coord(&self, p: &PlanarPoint) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.cell).floor() as i64,
            ((p.y - self.origin.y) / self.cell).floor() as i64,
        )
    }

    /// Nearest point to `q` among those within `cutoff`, by rings of cells
    /// clipped to the grid. Candidates are reported as `(distance, index)`.
    fn nearest(&self, q: &PlanarPoint, cutoff: f64) -> Option<(f64, usize)> {
        let (cx, cy) = self.coord(q);
        let (nx, ny) = (self.nx, self.ny);
        // Chebyshev distance in cells from q's cell to the grid, and to its
        // far corner.
        let gap = |c: i64, n: i64| (-c).max(c - (n - 1)).max(0);
        let first = gap(cx, nx).max(gap(cy, ny));
        let last = cx.abs().max((cx - nx + 1).abs()).max(cy.abs()).max((cy - ny + 1).abs());
        let mut best: Option<(f64, usize)> = None;
        let visit = |gx: i64, gy: i64, best: &mut Option<(f64, usize)>| {
            for &i in &self.cells[(gy * nx + gx) as usize] {
                let d = q.dist(&self.points[i]);
                if best.is_none_or(|b| (d, i) < b) {
                    *best = Some((d, i));
                }
            }
        };
        for k in first..=last {
            // Cells at ring k lie at least (k - 1) cells away.
            let floor = (k - 1).max(0) as f64 * self.cell;
            if floor > cutoff || best.is_some_and(|b| b.0 < floor) {
                break;
            }
            if k == 0 {
                visit(cx, cy, &mut best);
                continue;
            }
            let (xlo, xhi) = ((cx - k).max(0), (cx + k).min(nx - 1));
            for gy in [cy - k, cy + k] {
                if (0..ny).contains(&gy) {
                    for gx in xlo..=xhi {
                        visit(gx, gy, &mut best);
                    }
                }
            }
            let (ylo, yhi) = ((cy - k + 1).max(0), (cy + k - 1).min(ny - 1));
            for gx in [cx - k, cx + k] {
                if (0..nx).contains(&gx) {
                    for gy in ylo..=yhi {
                        visit(gx, gy, &mut best);
                    }
                }
            }
        }
        best.filter(|b| b.0 <= cutoff)
    }
}

fn bbox(points: &[PlanarPoint]) -> (f64, f64, f64, f64) {
    points.iter().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |(x0, y0, x1, y1), p| (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)),
    )
}

fn extent(points: &[PlanarPoint]) -> f64 {
    let (x0, y0, x1, y1) = bbox(points);
    (x1 - x0).max(y1 - y0)
}

/// Queries are spread over this many strided samples to seed the cutoff.
const SEED_QUERIES: usize = 64;

/// Smallest distance between the point sets `a` and `b`. The set with the
/// larger extent is bucketed on a uniform grid and the other queries it by
/// expanding rings; a cutoff taken from a strided subset of queries prunes
/// the search without changing the result. Ties resolve to the smallest
/// index pair. `None` when either set is empty.
pub fn min_cross_distance(a: &[PlanarPoint], b: &[PlanarPoint], exec: Execution) -> Option<CrossDistance> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let swapped = extent(a) > extent(b);
    let (queries, hashed) = if swapped { (b, a) } else { (a, b) };
    let grid = PointGrid::new(hashed);
    let pair = |iq: usize, (d, ih): (f64, usize)| {
        let (index_a, index_b) = if swapped { (ih, iq) } else { (iq, ih) };
        CrossDistance {
            distance: d,
            index_a,
            index_b,
        }
    };
    let stride = queries.len().div_ceil(SEED_QUERIES);
    let cutoff = (0..queries.len())
        .step_by(stride)
        .filter_map(|i| grid.nearest(&queries[i], f64::INFINITY))
        .map(|b| b.0)
        .fold(f64::INFINITY, f64::min);
    // Each query keeps its smallest hashed index at its minimal distance,
    // which is enough to recover the smallest pair after the fold.
    let found = map_indexed(exec, queries.len(), |iq| {
        grid.nearest(&queries[iq], cutoff).map(|b| pair(iq, b))
    });
    found.into_iter().fold(None, better)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RectRegion;
    use crate::maps::FnMap;
    use crate::spiral::SpiralParams;

    #[test]
    fn gapped_spiral_is_injective() {
        let s = SpiralParams::new(1.0, 1.0, 0.05, 0.25, 0.1).unwrap();
        let g = SampleGrid::square(s.domain(), 120);
        let r = check_injective(&s, &g, 1e-9, None, Execution::Parallel).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn folding_map_is_caught() {
        let fold = FnMap::new("fold", |p: PlanarPoint| PlanarPoint::new(p.x % 0.5, p.y));
        let g = SampleGrid::square(RectRegion::square(1.0).unwrap(), 100);
        let r = check_injective(&fold, &g, 1e-9, None, Execution::Sequential).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violations, 5000);
        assert_eq!(r.worst_violation.unwrap().index, 0);
    }

    #[test]
    fn neighbors_see_adjacent_cells() {
        let pts = [[0.0, 0.0], [0.9, 0.0], [2.5, 0.0], [-0.5, -0.5]];
        let h = SpatialHash::new(&pts, 1.0);
        assert_eq!(h.neighbors(&[0.1, 0.1]), vec![0, 1, 3]);
    }

    #[test]
    fn cross_distance_matches_brute_force() {
        let a: Vec<PlanarPoint> = (0..300)
            .map(|i| {
                let t = i as f64 * 0.021;
                PlanarPoint::new(t.cos() * (1.0 + 0.1 * t), t.sin())
            })
            .collect();
        let b: Vec<PlanarPoint> = (0..250)
            .map(|i| PlanarPoint::new(3.0 - i as f64 * 0.013, 0.5 + (i as f64 * 0.1).sin()))
            .collect();
        let mut brute = f64::INFINITY;
        for p in &a {
            for q in &b {
                brute = brute.min(p.dist(q));
            }
        }
        let got = min_cross_distance(&a, &b, Execution::Parallel).unwrap();
        assert_eq!(got.distance, brute);
        assert_eq!(min_cross_distance(&a, &b, Execution::Sequential), Some(got));
        assert_eq!(min_cross_distance(&a, &[], Execution::Sequential), None);
    }

    fn brute(a: &[PlanarPoint], b: &[PlanarPoint]) -> CrossDistance {
        let mut best: Option<CrossDistance> = None;
        for (ia, p) in a.iter().enumerate() {
            for (ib, q) in b.iter().enumerate() {
                best = better(best, Some(CrossDistance { distance: p.dist(q), index_a: ia, index_b: ib }));
            }
        }
        best.unwrap()
    }

    #[test]
    fn cross_distance_ties_and_swapped_roles() {
        // A wide lattice against a small cluster far outside it, with many
        // exactly tied pairs.
        let lattice: Vec<PlanarPoint> = (0..40 * 40)
            .map(|i| PlanarPoint::new((i % 40) as f64 * 0.25, (i / 40) as f64 * 0.25))
            .collect();
        let cluster: Vec<PlanarPoint> = (0..9)
            .map(|i| PlanarPoint::new(20.0 + (i % 3) as f64 * 0.25, 0.5 + (i / 3) as f64 * 0.25))
            .collect();
        for (a, b) in [(&lattice, &cluster), (&cluster, &lattice)] {
            let want = brute(a, b);
            for exec in [Execution::Sequential, Execution::Parallel] {
                assert_eq!(min_cross_distance(a, b, exec), Some(want));
            }
        }
    }
}
