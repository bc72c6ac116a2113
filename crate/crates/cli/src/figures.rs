//! Figure content: strands as polylines in domain-grid order plus the
//! bounding and avoidance circles.

use serde::Serialize;

use spiralemb::double_spiral::{DoubleSpiral, DoubleSpiralConfig};
use spiralemb::geometry::{PlanarPoint, RectRegion};
use spiralemb::maps::{PlanarEmbedding, SQRT_PI};
use spiralemb::spiral::SpiralParams;

use crate::args::{FigureArgs, FigureName};
use crate::output::{Circle, Figure, Polyline};
use crate::CliError;

/// What the figure draws, plus the `(domain, image)` pairs behind it.
pub struct Rendered {
    pub figure: Figure,
    pub rows: Vec<(PlanarPoint, PlanarPoint)>,
    pub summary: FigureSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureSummary {
    pub figure: String,
    /// Largest drawn circle; `None` for the domain picture.
    pub outer_radius: Option<f64>,
    pub inner_radius: Option<f64>,
    /// Largest distance from the origin among the plotted images.
    pub max_image_radius: f64,
    pub points: usize,
}

/// Polylines through `rows` horizontal lines of `region`, each with
/// `points` samples, pushed into `fig` and `rows_out`.
fn strands(
    map: &dyn PlanarEmbedding,
    region: &RectRegion,
    rows: usize,
    points: usize,
    class: &'static str,
    fig: &mut Figure,
    rows_out: &mut Vec<(PlanarPoint, PlanarPoint)>,
) -> Result<(), CliError> {
    for j in 0..rows {
        let mut line = Vec::with_capacity(points);
        for i in 0..points {
            let p = region.grid_point(i, j, points, rows);
            let q = map.eval(p)?;
            rows_out.push((p, q));
            line.push(q);
        }
        fig.polylines.push(Polyline {
            points: line,
            class,
            closed: false,
        });
    }
    Ok(())
}

fn rect_outline(r: &RectRegion) -> Vec<PlanarPoint> {
    vec![
        PlanarPoint::new(r.x_min(), r.y_min()),
        PlanarPoint::new(r.x_max(), r.y_min()),
        PlanarPoint::new(r.x_max(), r.y_max()),
        PlanarPoint::new(r.x_min(), r.y_max()),
    ]
}

fn spiral_figure(name: &str, s: &SpiralParams, a: &FigureArgs) -> Result<(Figure, Vec<(PlanarPoint, PlanarPoint)>), CliError> {
    let mut fig = Figure {
        title: name.into(),
        ..Figure::default()
    };
    let mut rows = Vec::new();
    strands(s, &s.domain(), a.rows, a.points, "strand", &mut fig, &mut rows)?;
    fig.circles.push(Circle {
        radius: s.radius_bound(s.a)?,
        class: "outer",
    });
    if s.r > 0.0 {
        fig.circles.push(Circle {
            radius: s.inner_avoid_radius(),
            class: "inner",
        });
    }
    Ok((fig, rows))
}

pub fn render(a: &FigureArgs) -> Result<Rendered, CliError> {
    if a.rows == 0 || a.points < 2 {
        return Err(CliError::Usage("--rows must be positive and --points at least 2".into()));
    }
    let (figure, rows) = match a.name {
        FigureName::Spiral => {
            let s = DoubleSpiralConfig::with_default_m(1.0, a.epsilon)?.spiral(0.0);
            spiral_figure("spiral", &s, a)?
        }
        FigureName::SquareToBall => {
            let s = SpiralParams::new(1.0, 1.0, 0.01, 0.0, 0.0)?;
            spiral_figure("square-to-ball", &s, a)?
        }
        FigureName::DoubleSpiral => {
            let ds = DoubleSpiral::new(DoubleSpiralConfig::with_default_m(1.0, a.epsilon)?)?;
            let mut fig = Figure {
                title: "double-spiral".into(),
                ..Figure::default()
            };
            let mut rows = Vec::new();
            strands(&ds.beta1, &ds.domain.r1, a.rows, a.points, "strand2", &mut fig, &mut rows)?;
            strands(&ds.beta2, &ds.domain.r2, a.rows, a.points, "strand", &mut fig, &mut rows)?;
            // The tuck is affine, so its image is the squeezed rectangle.
            let w = ds.tuck.region;
            let c = w.center();
            let corners = rect_outline(&w);
            let squeezed: Vec<PlanarPoint> = corners
                .iter()
                .map(|p| PlanarPoint::new(ds.tuck.eta * (p.x - c.x), (p.y - c.y) / ds.tuck.eta))
                .collect();
            rows.extend(corners.iter().copied().zip(squeezed.iter().copied()));
            fig.polylines.push(Polyline {
                points: squeezed,
                class: "tuck",
                closed: true,
            });
            fig.circles.push(Circle {
                radius: ds.outer_radius(),
                class: "outer",
            });
            fig.circles.push(Circle {
                radius: ds.config.inner_radius(),
                class: "inner",
            });
            (fig, rows)
        }
        FigureName::DomainModel => {
            let ds = DoubleSpiral::new(DoubleSpiralConfig::with_default_m(1.0, a.epsilon)?)?;
            let d = &ds.domain;
            let mut fig = Figure {
                title: "domain-model".into(),
                ..Figure::default()
            };
            let mut rows = Vec::new();
            let mut regions = vec![(d.r1, "strand2"), (d.r2, "strand"), (d.w, "tuck"), (d.strip.rect(), "region")];
            regions.extend(d.strands.iter().map(|s| (*s, "region")));
            for (r, class) in regions {
                let outline = rect_outline(&r);
                rows.extend(outline.iter().map(|p| (*p, *p)));
                fig.polylines.push(Polyline {
                    points: outline,
                    class,
                    closed: true,
                });
            }
            // The fiber square Q(sqrt(pi)) for scale.
            let q = RectRegion::square(SQRT_PI)?;
            let outline = rect_outline(&q);
            rows.extend(outline.iter().map(|p| (*p, *p)));
            fig.polylines.push(Polyline {
                points: outline,
                class: "outer",
                closed: true,
            });
            (fig, rows)
        }
    };
    let outer = figure.circles.iter().find(|c| c.class == "outer").map(|c| c.radius);
    let inner = figure.circles.iter().find(|c| c.class == "inner").map(|c| c.radius);
    let summary = FigureSummary {
        figure: figure.title.clone(),
        outer_radius: outer,
        inner_radius: inner,
        max_image_radius: rows.iter().map(|(_, q)| q.norm()).fold(0.0, f64::max),
        points: rows.len(),
    };
    Ok(Rendered { figure, rows, summary })
}
