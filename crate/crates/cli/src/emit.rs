//! CSV and SVG emitters. Reals are written with six decimals so identical
//! inputs give identical bytes.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use facticity::collapse::{collapse_prob, facticity_threshold, max_facticity_bound};
use facticity::{Real, SweepTable};
use serde::Serialize;

use crate::Failure;

#[derive(Serialize)]
pub struct ExactRow {
    pub x: String,
    pub n: u64,
    pub k2: u64,
    pub phi: u64,
    pub k1: Option<u64>,
    pub delta: i64,
    pub rho: i64,
    pub certified: bool,
    pub label: String,
}

fn fixed(v: Real) -> String {
    format!("{v:.6}")
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

pub fn write_file(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> Result<(), Failure>,
) -> Result<(), Failure> {
    let file = File::create(path)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn exact_csv(out: impl Write, rows: &[ExactRow]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "x",
        "n",
        "k2",
        "phi",
        "k1",
        "delta",
        "rho",
        "certified",
        "label",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.x.clone(),
            r.n.to_string(),
            r.k2.to_string(),
            r.phi.to_string(),
            r.k1.map(|k| k.to_string()).unwrap_or_default(),
            r.delta.to_string(),
            r.rho.to_string(),
            r.certified.to_string(),
            r.label.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn sweep_csv(out: &mut dyn Write, table: &SweepTable) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "s",
        "p",
        "rep",
        "n",
        "k2_hat",
        "phi_hat",
        "rho_hat",
        "delta_hat",
        "label",
        "phi_collapse",
        "threshold_bits",
    ])
    .map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            fixed(r.s),
            fixed(r.p),
            r.rep.to_string(),
            r.n.to_string(),
            r.k2_hat.to_string(),
            r.phi_hat.to_string(),
            r.rho_hat.to_string(),
            r.delta_hat.to_string(),
            r.label.to_string(),
            fixed(r.phi_collapse),
            fixed(r.threshold_bits),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn curves_csv(out: &mut dyn Write, ks: &[u32], grid: usize, c: u64) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "s", "phi_collapse", "threshold_bits", "max_bound"])
        .map_err(csv_err)?;
    for &k in ks {
        let bound: Real = max_facticity_bound(k, c)?;
        for g in 0..grid {
            let s = if g + 1 == grid {
                1.0
            } else {
                g as Real / (grid - 1) as Real
            };
            let phi: Real = collapse_prob(k, s)?;
            let threshold: Real = facticity_threshold(k, s, c)?;
            w.write_record([
                k.to_string(),
                fixed(s),
                fixed(phi),
                fixed(threshold),
                fixed(bound),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

const WIDTH: Real = 640.0;
const HEIGHT: Real = 400.0;
const MARGIN: Real = 40.0;

fn polyline(points: &[(Real, Real)], y_max: Real, color: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|&(s, y)| {
            let px = MARGIN + s * (WIDTH - 2.0 * MARGIN);
            let py = HEIGHT - MARGIN - y / y_max * (HEIGHT - 2.0 * MARGIN);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    format!(
        "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
        coords.join(" ")
    )
}

/// Mean estimated facticity (black) and the threshold (red) against entropy.
pub fn sweep_svg(out: &mut dyn Write, table: &SweepTable) -> Result<(), Failure> {
    let means = table.mean_phi_by_s();
    let mut thresholds: Vec<(Real, Real)> = Vec::with_capacity(means.len());
    for r in &table.rows {
        if thresholds.last().is_none_or(|&(s, _)| s != r.s) {
            thresholds.push((r.s, r.threshold_bits));
        }
    }
    let y_max = means
        .iter()
        .map(|&(_, m)| m)
        .chain(thresholds.iter().map(|&(_, t)| t))
        .fold(1.0, Real::max);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    svg.push_str(&format!(
        "  <path fill=\"none\" stroke=\"gray\" d=\"M{MARGIN},{MARGIN} V{b} H{r}\"/>\n",
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    ));
    svg.push_str(&format!(
        "  <text x=\"{MARGIN}\" y=\"{t}\" font-size=\"12\">k = {}, n = {}, y max = {y_max:.1} bits</text>\n",
        table.k,
        table.n,
        t = MARGIN - 10.0
    ));
    svg.push_str(&polyline(&thresholds, y_max, "red"));
    svg.push_str(&polyline(&means, y_max, "black"));
    svg.push_str("</svg>\n");
    out.write_all(svg.as_bytes()).map_err(io::Error::into)
}
