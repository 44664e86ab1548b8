//! Per-curve plot data files and figure manifests.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::cmat::format_g17;
use crate::error::{Error, Result};
use crate::experiments::batch::{CellSummary, TrialBatchReport};
use crate::experiments::trial::Detector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// FDP of ZD-OST against k, one curve per θ.
    F1,
    /// P_e of ZD-OST against k, one curve per θ.
    F2,
    /// ZD-OST at θ = 1 against the OST baselines.
    F3,
    /// Group against element detection, Kerdock matrix.
    F4a,
    /// Group against element detection, Bernoulli matrix.
    F4b,
}

impl FigureId {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Self::F1),
            "2" => Ok(Self::F2),
            "3" => Ok(Self::F3),
            "4a" => Ok(Self::F4a),
            "4b" => Ok(Self::F4b),
            _ => Err(Error::Config(format!("unknown figure `{s}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::F1 => "1",
            Self::F2 => "2",
            Self::F3 => "3",
            Self::F4a => "4a",
            Self::F4b => "4b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// FDP, or the zero fraction where `θ > |E|`.
    Fdp,
    Pe,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Fdp => "fdp",
            Self::Pe => "pe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub k: usize,
    pub value: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub file: String,
    pub detector: Detector,
    /// Selection size in the detector's own units; 0 for the oracle `θ = |I|`.
    pub theta: usize,
    pub metric: Metric,
    pub points: Vec<CurvePoint>,
}

struct CurveSpec {
    detector: Detector,
    grid_theta: usize,
    metric: Metric,
    /// Appended to the file stem to keep two metrics of one detector apart.
    suffix: bool,
}

fn specs(figure: FigureId, report: &TrialBatchReport) -> Vec<CurveSpec> {
    let thetas = &report.config.theta_grid;
    let per_theta = |detector, metric, suffix| {
        thetas
            .iter()
            .map(move |&grid_theta| CurveSpec {
                detector,
                grid_theta,
                metric,
                suffix,
            })
            .collect::<Vec<_>>()
    };
    let one = |detector, grid_theta, metric, suffix| CurveSpec {
        detector,
        grid_theta,
        metric,
        suffix,
    };
    match figure {
        FigureId::F1 => per_theta(Detector::ZdOst, Metric::Fdp, false),
        FigureId::F2 => per_theta(Detector::ZdOst, Metric::Pe, false),
        FigureId::F3 => vec![
            one(Detector::ZdOst, 1, Metric::Pe, false),
            one(Detector::OstTopk, 1, Metric::Pe, false),
            one(Detector::OstTopkFullSupport, 0, Metric::Pe, false),
            one(Detector::OstTopkFullSupport, 0, Metric::Fdp, true),
        ],
        FigureId::F4a | FigureId::F4b => {
            let mut v = per_theta(Detector::ZdGroth, Metric::Fdp, false);
            v.extend(per_theta(Detector::ZdOst, Metric::Fdp, false));
            v.extend(per_theta(Detector::ZdGroth, Metric::Pe, true));
            v.extend(per_theta(Detector::ZdOst, Metric::Pe, true));
            v
        }
    }
}

fn point(s: &CellSummary, metric: Metric) -> CurvePoint {
    let (value, (ci_lo, ci_hi)) = match metric {
        Metric::Fdp => s.fdp_curve_point(),
        Metric::Pe => (s.pe, s.pe_ci),
    };
    CurvePoint {
        k: s.key.k,
        value,
        ci_lo,
        ci_hi,
    }
}

/// Collects the curves of `figure` from `report`.
///
/// An empty k grid gives no curves; otherwise every required cell must be present.
pub fn figure_curves(report: &TrialBatchReport, figure: FigureId) -> Result<Vec<Curve>> {
    let ks = &report.config.k_grid;
    if ks.is_empty() {
        return Ok(Vec::new());
    }
    let mut curves = Vec::new();
    for spec in specs(figure, report) {
        let mut points = Vec::with_capacity(ks.len());
        let mut theta = spec.grid_theta;
        for &k in ks {
            let cell = report.cell(k, spec.detector, spec.grid_theta).ok_or_else(|| {
                Error::IncompleteReport(format!(
                    "figure {} needs {} at theta {} and k {k}",
                    figure.name(),
                    spec.detector.name(),
                    spec.grid_theta
                ))
            })?;
            if spec.detector.uses_theta() {
                theta = cell.summary.effective_theta;
            }
            points.push(point(&cell.summary, spec.metric));
        }
        let theta_label = if spec.detector.uses_theta() { theta.to_string() } else { "k".to_string() };
        let suffix = if spec.suffix { format!("_{}", spec.metric.name()) } else { String::new() };
        curves.push(Curve {
            file: format!("fig{}_{}_theta{}{}.csv", figure.name(), spec.detector.name(), theta_label, suffix),
            detector: spec.detector,
            theta: if spec.detector.uses_theta() { theta } else { 0 },
            metric: spec.metric,
            points,
        });
    }
    Ok(curves)
}

pub fn manifest_name(figure: FigureId) -> String {
    format!("fig{}_manifest.csv", figure.name())
}

/// Writes one `k,value,ci_lo,ci_hi` file per curve and the figure manifest into `out_dir`.
///
/// Returns the written paths, manifest last.
pub fn emit_plotdata(report: &TrialBatchReport, figure: FigureId, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let curves = figure_curves(report, figure)?;
    fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    for c in &curves {
        let path = out_dir.join(&c.file);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["k", "value", "ci_lo", "ci_hi"])?;
        for p in &c.points {
            w.write_record([p.k.to_string(), format_g17(p.value), format_g17(p.ci_lo), format_g17(p.ci_hi)])?;
        }
        w.flush()?;
        paths.push(path);
    }
    let path = out_dir.join(manifest_name(figure));
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["file", "detector", "theta", "metric"])?;
    for c in &curves {
        w.write_record([c.file.clone(), c.detector.name().to_string(), c.theta.to_string(), c.metric.name().to_string()])?;
    }
    w.flush()?;
    paths.push(path);
    Ok(paths)
}

pub fn read_curve(path: &Path) -> Result<Vec<CurvePoint>> {
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(path)?));
    let bad = |field: &str| Error::Parse(format!("{}: bad `{field}` field", path.display()));
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize, name: &str| rec.get(i).and_then(|s| s.parse::<f64>().ok()).ok_or_else(|| bad(name));
        points.push(CurvePoint {
            k: rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| bad("k"))?,
            value: num(1, "value")?,
            ci_lo: num(2, "ci_lo")?,
            ci_hi: num(3, "ci_hi")?,
        });
    }
    Ok(points)
}
