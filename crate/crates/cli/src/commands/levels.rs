//! Complex rung energies and eigenvector weights.

use serde::Serialize;
use tcfwm::eigen::Eigen;
use tcfwm::model::{spectrum_of, LadderBasis};

use super::{point_at, state_label, working_point, Context, WorkingPoint};
use crate::config::{Complex, Format};
use crate::error::CliError;
use crate::table::{write_json, Table};

#[derive(Serialize)]
struct Level {
    /// absolute energy (μeV), HWHM as `−im`
    value: Complex,
    weights: Vec<f64>,
}

#[derive(Serialize)]
struct Point {
    temperature: f64,
    detuning: Option<f64>,
    rung1: Vec<Level>,
    rung2: Vec<Level>,
}

#[derive(Serialize)]
struct LevelsFile {
    rung1_states: Vec<String>,
    rung2_states: Vec<String>,
    points: Vec<Point>,
}

/// `|v_ik|² / Σ_i |v_ik|²` for every eigenvector column.
pub fn weights(e: &Eigen<f64>) -> Vec<Vec<f64>> {
    (0..e.values.len())
        .map(|k| {
            let col = e.right.column(k);
            let total: f64 = col.iter().map(|z| z.norm_sqr()).sum();
            col.iter().map(|z| z.norm_sqr() / total).collect()
        })
        .collect()
}

fn levels(e: &Eigen<f64>, offset: f64) -> Vec<Level> {
    e.values
        .iter()
        .zip(weights(e))
        .map(|(v, w)| Level { value: Complex { re: v.re + offset, im: v.im }, weights: w })
        .collect()
}

fn evaluate(p: &WorkingPoint) -> Result<Point, CliError> {
    let spec = spectrum_of(&p.tuned)?;
    Ok(Point {
        temperature: p.temperature,
        detuning: p.detuning,
        rung1: levels(&spec.rung1, spec.reference),
        rung2: levels(&spec.rung2, 2.0 * spec.reference),
    })
}

fn rung_table(points: &[Point], states: &[String], rung: usize) -> Table {
    let mut header: Vec<String> =
        ["temperature_K", "detuning_ueV", "index", "re_ueV", "im_ueV"].iter().map(|s| s.to_string()).collect();
    header.extend(states.iter().map(|s| format!("w_{s}")));
    let mut t = Table::new(header)
        .comment("quantity", format!("rung-{rung} eigenvalues (absolute) and eigenvector weights"))
        .comment("convention", "HWHM = -im_ueV; weights sum to 1 per row");
    for p in points {
        let list = if rung == 1 { &p.rung1 } else { &p.rung2 };
        for (k, l) in list.iter().enumerate() {
            let mut row = vec![p.temperature, p.detuning.unwrap_or(f64::NAN), k as f64, l.value.re, l.value.im];
            row.extend(&l.weights);
            t.rows.push(row);
        }
    }
    t
}

pub fn run(ctx: &Context) -> Result<(), CliError> {
    let cfg = &ctx.cfg;
    let points: Vec<WorkingPoint> = match (ctx.point_from_flags, cfg.run.levels.temperatures) {
        (false, Some(range)) => range
            .grid("levels.temperatures")?
            .values()
            .iter()
            .map(|&t| point_at(cfg, t))
            .collect::<Result<_, _>>()?,
        _ => vec![working_point(cfg)?],
    };
    let points: Vec<Point> = points.iter().map(evaluate).collect::<Result<_, _>>()?;
    let basis = LadderBasis::new(cfg.system.n_emitters())?;
    let labels = |r: usize| basis.states()[basis.rung_range(r)].iter().map(state_label).collect::<Vec<_>>();
    let (s1, s2) = (labels(1), labels(2));
    ctx.ensure_out()?;
    match ctx.format {
        Format::Csv => {
            rung_table(&points, &s1, 1).write_file(&ctx.path("levels_rung1.csv"))?;
            rung_table(&points, &s2, 2).write_file(&ctx.path("levels_rung2.csv"))?;
        }
        Format::Json => write_json(&ctx.path("levels.json"), &LevelsFile { rung1_states: s1, rung2_states: s2, points })?,
    }
    Ok(())
}
