//! Monte-Carlo image area through preimage membership.
//!
//! The image's bounding box is covered by square cells of side
//! `sqrt(area(region) / samples)`. One jittered point per cell is pulled back
//! with the map's inverse, and the cell counts as covered when the preimage
//! lies in the region.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{fold_indexed, map_indexed, Execution};
use crate::geometry::{PlanarPoint, RectRegion};
use crate::maps::PlanarEmbedding;

pub const MIN_AREA_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub area: f64,
    pub domain_area: f64,
    pub relative_error: f64,
    pub cell_size: f64,
    pub cells: usize,
    pub hits: usize,
    pub seed: u64,
}

pub fn estimate_area(
    map: &dyn PlanarEmbedding,
    region: &RectRegion,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<AreaEstimate> {
    if samples < MIN_AREA_SAMPLES {
        return Err(Error::Usage(format!(
            "area estimate needs at least {MIN_AREA_SAMPLES} samples, got {samples}"
        )));
    }
    let domain_area = region.area();
    if !domain_area.is_finite() {
        return Err(Error::Usage("area estimate needs a bounded region".into()));
    }
    if map.preimage(map.eval(region.center())?).is_none() {
        return Err(Error::Usage(format!("map {} has no inverse", map.label())));
    }

    let probe = region.grid(256, 256);
    let images = map_indexed(exec, probe.len(), |i| map.eval(probe[i]));
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for q in images {
        let q = q?;
        x0 = x0.min(q.x);
        y0 = y0.min(q.y);
        x1 = x1.max(q.x);
        y1 = y1.max(q.y);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0);
    let (x0, y0) = (x0 - pad, y0 - pad);
    let h = (domain_area / samples as f64).sqrt();
    let nx = ((x1 + pad - x0) / h).ceil() as usize;
    let ny = ((y1 + pad - y0) / h).ceil() as usize;
    let cells = nx * ny;

    let hits = fold_indexed(
        exec,
        cells,
        || 0usize,
        |acc, i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (u, v): (f64, f64) = (rng.gen(), rng.gen());
            let q = PlanarPoint::new(x0 + ((i % nx) as f64 + u) * h, y0 + ((i / nx) as f64 + v) * h);
            match map.preimage(q) {
                Some(p) if region.contains(p) => acc + 1,
                _ => acc,
            }
        },
        |a, b| a + b,
    );
    let area = hits as f64 * h * h;
    Ok(AreaEstimate {
        area,
        domain_area,
        relative_error: (area - domain_area).abs() / domain_area,
        cell_size: h,
        cells,
        hits,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::PlanarMap;
    use crate::spiral::SpiralParams;

    #[test]
    fn identity_area() {
        let r = RectRegion::origin(2.0, 3.0).unwrap();
        let est = estimate_area(&PlanarMap::identity(), &r, 20_000, 1, Execution::Parallel).unwrap();
        assert!(est.relative_error < 0.02, "{est:?}");
    }

    #[test]
    fn spiral_area_and_determinism() {
        let s = SpiralParams::new(1.0, 1.0, 0.05, 0.0, 0.0).unwrap();
        let a = estimate_area(&s, &s.domain(), 50_000, 9, Execution::Parallel).unwrap();
        let b = estimate_area(&s, &s.domain(), 50_000, 9, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert!(a.relative_error < 0.02, "{a:?}");
    }

    #[test]
    fn too_few_samples_rejected() {
        let r = RectRegion::square(1.0).unwrap();
        assert!(estimate_area(&PlanarMap::identity(), &r, 100, 1, Execution::Sequential).is_err());
    }
}
