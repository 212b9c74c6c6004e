//! CSV and SVG output for sweep results.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::harness::SweepResult;

pub const TRIAL_HEADER: [&str; 15] = [
    "preset", "policy", "m", "n", "beta", "rho", "M", "m1", "k", "delta", "trial", "seed",
    "matched", "unserved", "rate",
];

/// One row per trial, in `(point, trial)` order.
pub fn write_trials_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_HEADER)?;
    let spec = &result.spec;
    for p in &result.points {
        let c = &p.point.config;
        for t in &p.trials {
            w.write_record([
                spec.name.clone(),
                spec.policy.to_string(),
                c.m.to_string(),
                c.n.to_string(),
                c.beta.to_string(),
                c.rho.to_string(),
                c.memory.to_string(),
                p.point.m1.to_string(),
                p.point.k.to_string(),
                spec.delta.to_string(),
                t.trial.to_string(),
                t.seed.to_string(),
                t.matched.to_string(),
                t.unserved.to_string(),
                t.rate.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per point with `trial = -1`, the master seed, mean matched and
/// unserved counts, `rate` = mean rate and its standard error.
pub fn write_summary_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = TRIAL_HEADER.to_vec();
    header.push("stderr");
    w.write_record(&header)?;
    let spec = &result.spec;
    for p in &result.points {
        let c = &p.point.config;
        w.write_record([
            spec.name.clone(),
            spec.policy.to_string(),
            c.m.to_string(),
            c.n.to_string(),
            c.beta.to_string(),
            c.rho.to_string(),
            c.memory.to_string(),
            p.point.m1.to_string(),
            p.point.k.to_string(),
            spec.delta.to_string(),
            "-1".to_string(),
            result.seed().to_string(),
            p.mean_matched().to_string(),
            p.mean_unserved().to_string(),
            p.mean.to_string(),
            p.stderr.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Line chart of mean rate against the sweep axis, one `<polyline>` per
/// curve. `bounds`, if given, holds one lower-bound value per point and is
/// drawn as a dashed `<path>` per curve.
pub fn render_svg(result: &SweepResult, bounds: Option<&[f64]>) -> String {
    let xs: Vec<f64> = result.points.iter().map(|p| p.point.x).collect();
    let mut x_lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut x_hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Empty or single-valued axis.
    if x_hi.partial_cmp(&x_lo) != Some(std::cmp::Ordering::Greater) {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let y_max = result
        .points
        .iter()
        .map(|p| p.mean)
        .chain(bounds.into_iter().flatten().copied())
        .fold(0.0, f64::max);
    let y_hi = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_hi * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{} ({})</text>"#,
        LEFT + plot_w / 2.0,
        escape(&result.spec.name),
        result.spec.policy
    );

    // Axes.
    let (x0, y0) = (LEFT, TOP + plot_h);
    let _ = writeln!(
        s,
        r#"<g stroke="black"><line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}"/><line x1="{x0}" y1="{TOP}" x2="{x0}" y2="{y0}"/></g>"#,
        LEFT + plot_w
    );
    let mut ticks: Vec<f64> = xs.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for x in ticks {
        let px = sx(x);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 20.0,
            tick_label(x)
        );
    }
    for i in 0..=5 {
        let y = y_hi * i as f64 / 5.0;
        let py = sy(y);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{:.1}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            y
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(result.spec.sweep.axis())
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">mean transmission rate</text>"#,
        TOP + plot_h / 2.0
    );

    for (ci, label) in result.curves().into_iter().enumerate() {
        let color = COLORS[ci % COLORS.len()];
        let members: Vec<usize> = (0..result.points.len())
            .filter(|&i| result.points[i].point.curve == label)
            .collect();
        let coords: Vec<String> = members
            .iter()
            .map(|&i| {
                let p = &result.points[i];
                format!("{:.2},{:.2}", sx(p.point.x), sy(p.mean))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"><title>{}</title></polyline>"#,
            coords.join(" "),
            escape(label)
        );
        if let Some(b) = bounds {
            let d: Vec<String> = members
                .iter()
                .enumerate()
                .map(|(j, &i)| {
                    let cmd = if j == 0 { 'M' } else { 'L' };
                    format!("{cmd}{:.2},{:.2}", sx(result.points[i].point.x), sy(b[i]))
                })
                .collect();
            let _ = writeln!(
                s,
                r#"<path fill="none" stroke="{color}" stroke-dasharray="5,4" d="{}"/>"#,
                d.join(" ")
            );
        }
        let ly = TOP + 10.0 + 20.0 * ci as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 25.0,
            lx + 30.0,
            ly + 4.0,
            escape(label)
        );
    }
    if bounds.is_some() {
        let ly = TOP + 10.0 + 20.0 * result.curves().len() as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="gray" stroke-dasharray="5,4"/><text x="{}" y="{}">lower bound</text>"#,
            lx + 25.0,
            lx + 30.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
