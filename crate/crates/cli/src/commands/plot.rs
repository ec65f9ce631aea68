use std::path::PathBuf;

use clap::{Args, ValueEnum};
use divweb::measure::reflection_loop;
use divweb::web::integrate_geodesic;
use divweb::{QuadratureSpec, WebChart};
use serde_json::json;

use super::{Common, Outcome};
use crate::error::{input, Result};
use crate::input::{axes, load_spec, point_in, points, points_in};
use crate::output::report;
use crate::svg::Plot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum What {
    /// Leaves of the two foliations through a grid of points
    Leaves,
    /// Geodesics of the web connection
    Geodesics,
    /// The four reflections of one holonomy loop
    Orbit,
}

impl What {
    fn name(self) -> &'static str {
        match self {
            What::Leaves => "leaves",
            What::Geodesics => "geodesics",
            What::Orbit => "orbit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Embed {
    /// Draw chart coordinates as they are
    Chart,
    /// Read the coordinates as (r, phi) and draw in the Cartesian plane
    Polar,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Planar web spec (JSON)
    pub spec: PathBuf,
    #[arg(long, value_enum)]
    pub what: What,
    /// Where to write the SVG
    #[arg(long, value_name = "PATH")]
    pub svg: PathBuf,
    #[arg(long, value_enum, default_value_t = Embed::Chart)]
    pub embed: Embed,
    /// Leaves per foliation
    #[arg(long, value_name = "N", default_value_t = 9)]
    pub lines: usize,
    /// Geodesic start points (default: the domain centre)
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "X")]
    pub start: Vec<f64>,
    /// Initial velocities, one per start point (default: a fan of --rays directions)
    #[arg(long, num_args = 1.., allow_negative_numbers = true, value_name = "V")]
    pub velocity: Vec<f64>,
    /// Directions in the default fan
    #[arg(long, value_name = "N", default_value_t = 8)]
    pub rays: usize,
    #[arg(long, value_name = "T", default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, value_name = "N", default_value_t = 200)]
    pub steps: usize,
    /// Loop anchor (default: the origin)
    #[arg(long, num_args = 2, allow_negative_numbers = true, value_name = "X")]
    pub anchor: Vec<f64>,
    /// Loop start point
    #[arg(long, num_args = 2, allow_negative_numbers = true, value_name = "X")]
    pub point: Vec<f64>,
    #[arg(long, num_args = 2, value_name = "AXIS", default_values_t = [1, 2])]
    pub axes: Vec<usize>,
    #[command(flatten)]
    pub common: Common,
}

fn embed(e: Embed, x: &[f64]) -> [f64; 2] {
    match e {
        Embed::Chart => [x[0], x[1]],
        Embed::Polar => [x[0] * x[1].cos(), x[0] * x[1].sin()],
    }
}

// Straight chart segment, subdivided so that it bends correctly when embedded.
fn segment(e: Embed, a: &[f64], b: &[f64], n: usize) -> Vec<[f64; 2]> {
    (0..=n)
        .map(|k| {
            let t = k as f64 / n as f64;
            embed(e, &[a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
        })
        .collect()
}

fn leaves(w: &WebChart, a: &PlotArgs, plot: &mut Plot) -> Result<serde_json::Value> {
    if a.lines < 1 {
        return Err(input("--lines needs at least 1"));
    }
    let d = w.domain().normalized();
    let at = |k: usize, i: usize| {
        if a.lines == 1 {
            0.5 * (d.lo(k) + d.hi(k))
        } else {
            d.lo(k) + (d.hi(k) - d.lo(k)) * i as f64 / (a.lines - 1) as f64
        }
    };
    for i in 0..a.lines {
        let x = at(0, i);
        plot.add(
            segment(a.embed, &[x, d.lo(1)], &[x, d.hi(1)], 100),
            "#1f5fa8",
        );
        let y = at(1, i);
        plot.add(
            segment(a.embed, &[d.lo(0), y], &[d.hi(0), y], 100),
            "#b8412c",
        );
    }
    Ok(json!({ "leaves_per_foliation": a.lines }))
}

fn geodesics(w: &WebChart, a: &PlotArgs, plot: &mut Plot) -> Result<serde_json::Value> {
    let d = w.domain().normalized();
    let mut starts = if a.start.is_empty() {
        vec![d.center()]
    } else {
        points_in(&a.start, w.domain(), "start")?
    };
    let vels = if a.velocity.is_empty() {
        if a.rays < 1 {
            return Err(input("--rays needs at least 1"));
        }
        let speed = 0.25 * (d.hi(0) - d.lo(0)).min(d.hi(1) - d.lo(1)) / a.t_end;
        let fan: Vec<Vec<f64>> = (0..a.rays)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / a.rays as f64;
                vec![speed * t.cos(), speed * t.sin()]
            })
            .collect();
        let s = starts.clone();
        starts = s
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.clone(), fan.len()))
            .collect();
        s.iter().flat_map(|_| fan.clone()).collect()
    } else {
        let v = points(&a.velocity, 2, "velocity")?;
        if v.len() != starts.len() {
            return Err(input(format!(
                "{} start points but {} velocities",
                starts.len(),
                v.len()
            )));
        }
        v
    };
    let mut paths = Vec::new();
    for (p, v) in starts.iter().zip(&vels) {
        let g = integrate_geodesic(w, p, v, a.t_end, a.steps)?;
        plot.add(
            g.points.iter().map(|x| embed(a.embed, x)).collect(),
            "#1b7a3e",
        );
        paths.push(json!({
            "start": p,
            "velocity": v,
            "samples": g.points.len(),
            "end": g.points.last(),
            "left_domain": g.left_domain,
        }));
    }
    Ok(json!({ "t_end": a.t_end, "steps": a.steps, "geodesics": paths }))
}

fn orbit(
    w: &WebChart,
    a: &PlotArgs,
    quad: &QuadratureSpec,
    plot: &mut Plot,
) -> Result<serde_json::Value> {
    if a.point.is_empty() {
        return Err(input("--what orbit needs --point"));
    }
    let p = if a.anchor.is_empty() {
        vec![0.0, 0.0]
    } else {
        point_in(&a.anchor, w.domain(), "anchor")?
    };
    let q = point_in(&a.point, w.domain(), "point")?;
    let ax = axes(&a.axes, 2)?;
    if ax[0] == ax[1] {
        return Err(input("a loop needs two distinct axes"));
    }
    let l = reflection_loop(w, &p, ax[0], ax[1], &q, quad)?;
    let mut pts = Vec::new();
    for leg in l.orbit.windows(2) {
        let mut s = segment(a.embed, &leg[0], &leg[1], 20);
        if !pts.is_empty() {
            s.remove(0);
        }
        pts.extend(s);
    }
    plot.add(pts, "#7a1b6d");
    // the two leaves through the anchor
    let d = w.domain().normalized();
    plot.add(
        segment(a.embed, &[p[0], d.lo(1)], &[p[0], d.hi(1)], 100),
        "#999999",
    );
    plot.add(
        segment(a.embed, &[d.lo(0), p[1]], &[d.hi(0), p[1]], 100),
        "#999999",
    );
    Ok(json!({ "anchor": p, "orbit": l.orbit, "max_residual": l.max_residual }))
}

pub fn plot(a: &PlotArgs) -> Result<Outcome> {
    let spec = load_spec(&a.spec)?;
    let tol = a.common.tolerances(&spec.tolerances)?;
    let w = &spec.chart;
    if w.dim() != 2 {
        return Err(input("plots need a 2-dimensional chart"));
    }
    let mut svg = Plot {
        title: format!("{} of h = {}", a.what.name(), w.density()),
        ..Default::default()
    };
    let mut results = match a.what {
        What::Leaves => leaves(w, a, &mut svg)?,
        What::Geodesics => geodesics(w, a, &mut svg)?,
        What::Orbit => orbit(w, a, &tol.quad(), &mut svg)?,
    };
    results["svg"] = json!(a.svg);
    results["polylines"] = json!(svg.lines.len());
    let mut out = Outcome::new(report("plot", spec.source, &tol, results));
    out.files.push((a.svg.clone(), svg.render().into_bytes()));
    Ok(out)
}
