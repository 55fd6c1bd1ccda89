use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::experiment::{trial_rng, ExperimentConfig};
use crate::clustering::{assign_chunks, ChunkAssignment};
use crate::dynamics::{snapshot_csv, SyncMap, SyncMapState};
use crate::error::{Error, Result};
use crate::problems::generate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Svg,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "svg" => Ok(ExportFormat::Svg),
            _ => Err(Error::Config(format!("unknown export format {s:?}; expected csv or svg"))),
        }
    }
}

/// A trained map with its clustering at the end of the last task.
#[derive(Debug, Clone)]
pub struct FittedMap {
    pub states: Vec<String>,
    pub map: SyncMapState,
    pub assignment: ChunkAssignment,
    pub truth: Vec<usize>,
    pub radius: f64,
}

/// Trains SyncMap as trial 0 of an experiment with the same config would.
pub fn fit_map(config: &ExperimentConfig) -> Result<FittedMap> {
    config.dynamics.validate()?;
    config.clustering.validate()?;
    let schedule = config.schedule()?;
    let mut rng = trial_rng(config.seed, 0);
    let seq = generate(&schedule, &mut rng);
    let mut sm = SyncMap::new(config.encoding.config(schedule.n_states()), config.dynamics, &mut rng)?;
    for k in 0..schedule.n_tasks() {
        sm.feed(seq.task(k))?;
    }
    let assignment = assign_chunks(&sm.map, &config.clustering)?;
    Ok(FittedMap {
        states: schedule.states(),
        map: sm.map,
        assignment,
        truth: seq.truth.last().cloned().unwrap_or_default(),
        radius: config.dynamics.radius,
    })
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf",
];
const NOISE_COLOR: &str = "#000000";

pub fn cluster_color(label: i64) -> &'static str {
    if label < 0 {
        NOISE_COLOR
    } else {
        PALETTE[label as usize % PALETTE.len()]
    }
}

/// Scatter of the first two map dimensions, one marker per state, filled
/// by cluster label (black for noise).
pub fn render_svg(fitted: &FittedMap) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 30.0;
    let r = fitted.radius.max(f64::MIN_POSITIVE);
    let to_px = |v: f64, flip: bool| {
        let u = (v + r) / (2.0 * r);
        let u = if flip { 1.0 - u } else { u };
        PAD + u * (SIZE - 2.0 * PAD)
    };
    let labels = fitted.assignment.export_labels();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let c = to_px(0.0, false);
    let rad = c - PAD;
    let _ = writeln!(
        out,
        r##"<circle cx="{c:.2}" cy="{c:.2}" r="{rad:.2}" fill="none" stroke="#cccccc"/>"##
    );
    for (i, row) in fitted.map.rows().enumerate() {
        let x = to_px(row[0], false);
        let y = to_px(row[1], true);
        let name = xml_escape(&fitted.states[i]);
        let label = labels[i];
        let _ = writeln!(
            out,
            r#"<circle class="state" cx="{x:.2}" cy="{y:.2}" r="6" fill="{}" data-state="{name}" data-label="{label}"/>"#,
            cluster_color(label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" font-family="sans-serif">{name}</text>"#,
            x + 8.0,
            y - 8.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn export_map(fitted: &FittedMap, format: ExportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ExportFormat::Csv => snapshot_csv(&fitted.map, &fitted.states, &fitted.assignment.export_labels())?,
        ExportFormat::Svg => render_svg(fitted),
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::Method;
    use crate::problems::ProblemId;

    fn fitted() -> FittedMap {
        let config = ExperimentConfig {
            steps_per_task: 2_000,
            seed: 3,
            ..ExperimentConfig::new(ProblemId::FixedChunks, Method::Syncmap)
        };
        fit_map(&config).unwrap()
    }

    #[test]
    fn svg_has_one_marker_per_state() {
        let f = fitted();
        let svg = render_svg(&f);
        assert_eq!(svg.matches(r#"class="state""#).count(), 12);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn formats_parse() {
        assert_eq!("csv".parse::<ExportFormat>().unwrap(), ExportFormat::Csv);
        assert_eq!("svg".parse::<ExportFormat>().unwrap(), ExportFormat::Svg);
        assert!("png".parse::<ExportFormat>().is_err());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let f = fitted();
        let err = export_map(&f, ExportFormat::Csv, Path::new("/nonexistent-dir/x/map.csv"));
        assert!(matches!(err, Err(Error::Io { .. })));
    }
}
