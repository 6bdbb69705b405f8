use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;

use super::recurrence::RecurrenceOutcome;
use super::sweep::{ExperimentSpec, SummaryCell};

pub const CSV_HEADER: [&str; 11] =
    ["kind", "n", "p", "alpha", "s", "eta", "trials", "successes", "mean_remainder_frac", "stdev", "seconds"];

/// Version string of the build, `git describe` style when available.
pub fn version_string() -> String {
    match option_env!("EVENDEG_GIT_DESCRIBE") {
        Some(d) if !d.is_empty() => d.to_string(),
        _ => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes one row per cell under [`CSV_HEADER`]. Skipped cells have blank
/// `successes`, `mean_remainder_frac` and `stdev`. `seconds` is written only
/// when `record_timing` is set, so repeated runs give identical bytes.
pub fn emit_csv<W: Write>(cells: &[SummaryCell], record_timing: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for c in cells {
        let done = c.skipped.is_none();
        w.write_record([
            c.kind.as_str().to_string(),
            c.n.to_string(),
            c.p.to_string(),
            c.alpha.to_string(),
            opt(c.s),
            opt(c.eta),
            c.trials.to_string(),
            if done { c.successes.to_string() } else { String::new() },
            opt(c.mean_remainder_fraction.filter(|_| done).map(|m| format!("{m:.6}"))),
            opt(c.stdev.filter(|_| done).map(|s| format!("{s:.6}"))),
            if record_timing { format!("{:.3}", c.wall_clock) } else { String::new() },
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Report<'a> {
    version: String,
    master_seed: u64,
    spec: &'a ExperimentSpec,
    cells: &'a [SummaryCell],
}

/// JSON report embedding the spec, the build version and the master seed.
pub fn emit_report<W: Write>(cells: &[SummaryCell], spec: &ExperimentSpec, out: W) -> Result<()> {
    let report = Report { version: version_string(), master_seed: spec.master_seed, spec, cells };
    serde_json::to_writer_pretty(out, &report)?;
    Ok(())
}

/// `n,log_f,log_bound,holds` rows of a recurrence table.
pub fn emit_recurrence_csv<W: Write>(outcome: &RecurrenceOutcome, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "log_f", "log_bound", "holds"])?;
    for row in &outcome.table {
        w.write_record([
            row.n.to_string(),
            format!("{:.6}", row.log_f),
            format!("{:.6}", row.log_bound),
            (row.log_f <= row.log_bound + 1e-12).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Failure rate against `n`, one line per `p`, log-scaled on both axes.
/// Zero rates are drawn at `1 / (2 trials)`, the floor of what the trial count
/// can resolve, with a hollow marker.
pub fn emit_svg<W: Write>(cells: &[SummaryCell], mut out: W) -> Result<()> {
    let done: Vec<&SummaryCell> = cells.iter().filter(|c| c.skipped.is_none()).collect();
    let mut ps: Vec<f64> = done.iter().map(|c| c.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let rate = |c: &SummaryCell| {
        let r = c.failures as f64 / c.trials as f64;
        (r.max(0.5 / c.trials as f64), r == 0.0)
    };
    let (mut nmin, mut nmax, mut rmin) = (f64::INFINITY, 0.0f64, 1.0f64);
    for c in &done {
        nmin = nmin.min(c.n as f64);
        nmax = nmax.max(c.n as f64);
        rmin = rmin.min(rate(c).0);
    }
    if done.is_empty() {
        (nmin, nmax, rmin) = (1.0, 10.0, 0.1);
    }
    let (lx0, lx1) = (nmin.log10(), nmax.log10().max(nmin.log10() + 1e-9));
    let (ly0, ly1) = (rmin.log10().floor().min(-1.0), 0.0);
    let x = |n: f64| MARGIN + (n.log10() - lx0) / (lx1 - lx0) * (WIDTH - 2.0 * MARGIN);
    let y = |r: f64| HEIGHT - MARGIN - (r.log10() - ly0) / (ly1 - ly0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(s, r#"<path d="M{x0} {y1}V{y0}H{x1}" stroke="black" fill="none"/>"#);
    let mut decade = ly0 as i32;
    while decade <= 0 {
        let yy = y(10f64.powi(decade));
        let _ = writeln!(s, r##"<line x1="{x0}" x2="{x1}" y1="{yy:.1}" y2="{yy:.1}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{decade}</text>"#, x0 - 6.0, yy + 4.0);
        decade += 1;
    }
    let mut ns: Vec<usize> = done.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for &n in &ns {
        let xx = x(n as f64);
        let _ = writeln!(s, r#"<text x="{xx:.1}" y="{:.1}" text-anchor="middle">{n}</text>"#, y0 + 18.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">n</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">failure rate</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    for (i, &p) in ps.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts: Vec<(f64, f64, bool)> = done
            .iter()
            .filter(|c| c.p == p)
            .map(|c| {
                let (r, zero) = rate(c);
                (x(c.n as f64), y(r), zero)
            })
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|(px, py, _)| format!("{px:.1},{py:.1}")).collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="2"/>"#, path.join(" "));
        for (px, py, zero) in &pts {
            let fill = if *zero { "white" } else { color };
            let _ = writeln!(s, r#"<circle cx="{px:.1}" cy="{py:.1}" r="4" stroke="{color}" fill="{fill}"/>"#);
        }
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}" fill="{color}">p = {p}</text>"#, x1 - 70.0);
    }
    s.push_str("</svg>\n");
    out.write_all(s.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::sweep::ExperimentKind;

    fn cell(n: usize, successes: usize) -> SummaryCell {
        SummaryCell {
            kind: ExperimentKind::RemovalSuccess,
            n,
            p: 0.5,
            alpha: 0.1,
            s: Some(7),
            eta: None,
            trials: 10,
            successes,
            failures: 10 - successes,
            mean_remainder_fraction: Some(0.25),
            stdev: Some(0.01),
            wall_clock: 1.5,
            skipped: None,
        }
    }

    #[test]
    fn empty_is_header_only() {
        let mut buf = Vec::new();
        emit_csv(&[], false, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn one_cell_two_lines() {
        let mut buf = Vec::new();
        emit_csv(&[cell(500, 9)], false, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "removal-success,500,0.5,0.1,7,,10,9,0.250000,0.010000,");
        let mut timed = Vec::new();
        emit_csv(&[cell(500, 9)], true, &mut timed).unwrap();
        assert!(String::from_utf8(timed).unwrap().trim_end().ends_with(",1.500"));
    }

    #[test]
    fn report_has_version_and_seed() {
        let spec: ExperimentSpec = serde_json::from_str(
            r#"{"kind":"removal-success","nGrid":[500],"pGrid":[0.5],"trials":10,"masterSeed":3}"#,
        )
        .unwrap();
        let mut buf = Vec::new();
        emit_report(&[cell(500, 9)], &spec, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["masterSeed"], 3);
        assert!(v["version"].as_str().unwrap().starts_with('v') || !v["version"].as_str().unwrap().is_empty());
        assert_eq!(v["spec"]["nGrid"][0], 500);
    }

    #[test]
    fn svg_is_well_formed() {
        let mut buf = Vec::new();
        emit_svg(&[cell(500, 7), cell(1000, 10)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
        assert_eq!(text.matches("<circle").count(), 2);
    }
}
