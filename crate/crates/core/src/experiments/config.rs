//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::experiments::signal::{AmplitudeLaw, SignalModel};
use crate::experiments::trial::Detector;
use crate::theory::NoiseConvention;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    Kerdock { m: usize },
    Bernoulli { rows: usize, cols: usize, seed: u64 },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub matrix: MatrixSource,
    pub signal: SignalModel,
    pub amplitude: AmplitudeLaw,
    /// Sparsity grid; counts groups when `group_size` is set.
    pub k_grid: Vec<usize>,
    pub sigma2: f64,
    /// Detection sizes; group counts when `group_size` is set, in which case the
    /// element detectors use `θ · r` so both select the same number of columns.
    pub theta_grid: Vec<usize>,
    pub trials: usize,
    pub group_size: Option<usize>,
    pub detectors: Vec<Detector>,
    pub master_seed: u64,
    pub noise_convention: NoiseConvention,
}

impl Default for ExperimentConfig {
    /// 16 x 256 Kerdock frame with tone signals, matching the reference study.
    fn default() -> Self {
        Self {
            matrix: MatrixSource::Kerdock { m: 3 },
            signal: SignalModel::Tone,
            amplitude: AmplitudeLaw::Uniform { lo: 1.0, hi: 1000.0 },
            k_grid: vec![16, 64, 128, 204],
            sigma2: 500.0,
            theta_grid: vec![1, 4, 16, 64],
            trials: 5000,
            group_size: None,
            detectors: vec![Detector::ZdOst],
            master_seed: 1,
            noise_convention: NoiseConvention::Total,
        }
    }
}

const KEYS: &[&str] = &[
    "matrix",
    "kerdock_m",
    "rows",
    "cols",
    "matrix_seed",
    "matrix_file",
    "signal",
    "amplitude_min",
    "amplitude_max",
    "k_grid",
    "sigma2",
    "theta_grid",
    "trials",
    "group_size",
    "detectors",
    "master_seed",
    "noise_convention",
];

/// Parses `key = value` lines; `#` starts a comment. Unknown or repeated keys are errors.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if out.insert(k.clone(), v).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
        }
    }
    Ok(out)
}

pub fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
}

pub fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Missing keys keep their [`Default`] values.
    pub fn parse(text: &str) -> Result<Self> {
        let kv = parse_key_values(text)?;
        if let Some(bad) = kv.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key `{bad}`")));
        }
        let get = |k: &str| kv.get(k).map(String::as_str);
        let mut cfg = Self::default();

        cfg.matrix = match get("matrix").unwrap_or("kerdock") {
            "kerdock" => MatrixSource::Kerdock {
                m: get("kerdock_m").map(|v| parse_value("kerdock_m", v)).transpose()?.unwrap_or(3),
            },
            "bernoulli" => MatrixSource::Bernoulli {
                rows: parse_value("rows", get("rows").ok_or_else(|| Error::Config("bernoulli needs `rows`".into()))?)?,
                cols: parse_value("cols", get("cols").ok_or_else(|| Error::Config("bernoulli needs `cols`".into()))?)?,
                seed: get("matrix_seed").map(|v| parse_value("matrix_seed", v)).transpose()?.unwrap_or(0),
            },
            "file" => MatrixSource::File(PathBuf::from(
                get("matrix_file").ok_or_else(|| Error::Config("file matrix needs `matrix_file`".into()))?,
            )),
            other => return Err(Error::Config(format!("unknown matrix family `{other}`"))),
        };
        if let Some(v) = get("signal") {
            cfg.signal = SignalModel::parse(v)?;
        }
        let lo = get("amplitude_min").map(|v| parse_value("amplitude_min", v)).transpose()?;
        let hi = get("amplitude_max").map(|v| parse_value("amplitude_max", v)).transpose()?;
        if lo.is_some() || hi.is_some() {
            let AmplitudeLaw::Uniform { lo: dlo, hi: dhi } = cfg.amplitude;
            cfg.amplitude = AmplitudeLaw::uniform(lo.unwrap_or(dlo), hi.unwrap_or(dhi))?;
        }
        if let Some(v) = get("k_grid") {
            cfg.k_grid = parse_list("k_grid", v)?;
        }
        if let Some(v) = get("sigma2") {
            cfg.sigma2 = parse_value("sigma2", v)?;
        }
        if let Some(v) = get("theta_grid") {
            cfg.theta_grid = parse_list("theta_grid", v)?;
        }
        if let Some(v) = get("trials") {
            cfg.trials = parse_value("trials", v)?;
        }
        if let Some(v) = get("group_size") {
            cfg.group_size = Some(parse_value("group_size", v)?);
        }
        if let Some(v) = get("detectors") {
            cfg.detectors = v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(Detector::parse)
                .collect::<Result<_>>()?;
        }
        if let Some(v) = get("master_seed") {
            cfg.master_seed = parse_value("master_seed", v)?;
        }
        if let Some(v) = get("noise_convention") {
            cfg.noise_convention = NoiseConvention::parse(v)?;
        }
        Ok(cfg)
    }

    /// Checks everything that does not need the matrix; grid ranges are checked against it later.
    pub fn validate_basic(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(Error::Config("sigma2 must be finite and >= 0".into()));
        }
        if self.detectors.is_empty() {
            return Err(Error::Config("no detectors configured".into()));
        }
        if self.group_size.is_none() && self.detectors.contains(&Detector::ZdGroth) {
            return Err(Error::Config("zd_groth needs `group_size`".into()));
        }
        Ok(())
    }

    /// Canonical text form; `parse(to_text())` gives back the same config.
    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        let mut lines = Vec::new();
        match &self.matrix {
            MatrixSource::Kerdock { m } => {
                lines.push("matrix = kerdock".to_string());
                lines.push(format!("kerdock_m = {m}"));
            }
            MatrixSource::Bernoulli { rows, cols, seed } => {
                lines.push("matrix = bernoulli".to_string());
                lines.push(format!("rows = {rows}"));
                lines.push(format!("cols = {cols}"));
                lines.push(format!("matrix_seed = {seed}"));
            }
            MatrixSource::File(p) => {
                lines.push("matrix = file".to_string());
                lines.push(format!("matrix_file = {}", p.display()));
            }
        }
        let AmplitudeLaw::Uniform { lo, hi } = self.amplitude;
        lines.push(format!("signal = {}", self.signal.name()));
        lines.push(format!("amplitude_min = {lo}"));
        lines.push(format!("amplitude_max = {hi}"));
        lines.push(format!("k_grid = {}", join(&self.k_grid)));
        lines.push(format!("sigma2 = {}", self.sigma2));
        lines.push(format!("theta_grid = {}", join(&self.theta_grid)));
        lines.push(format!("trials = {}", self.trials));
        if let Some(r) = self.group_size {
            lines.push(format!("group_size = {r}"));
        }
        let dets: Vec<&str> = self.detectors.iter().map(Detector::name).collect();
        lines.push(format!("detectors = {}", dets.join(",")));
        lines.push(format!("master_seed = {}", self.master_seed));
        lines.push(format!("noise_convention = {}", self.noise_convention.name()));
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "\
# fig 4
matrix = bernoulli
rows = 16
cols = 256
matrix_seed = 9   # trailing comment
signal = tone
k_grid = 2, 8,16
theta_grid = 1,2
sigma2 = 500
trials = 10
group_size = 8
detectors = zd_groth,zd_ost
master_seed = 77
noise_convention = per_component
";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.matrix, MatrixSource::Bernoulli { rows: 16, cols: 256, seed: 9 });
        assert_eq!(c.k_grid, vec![2, 8, 16]);
        assert_eq!(c.group_size, Some(8));
        assert_eq!(c.detectors, vec![Detector::ZdGroth, Detector::ZdOst]);
        assert_eq!(c.noise_convention, NoiseConvention::PerComponent);
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(ExperimentConfig::parse("colour = red\n").is_err());
        assert!(ExperimentConfig::parse("trials = 1\ntrials = 2\n").is_err());
        assert!(ExperimentConfig::parse("trials\n").is_err());
        assert!(ExperimentConfig::parse("trials = many\n").is_err());
        assert!(ExperimentConfig::parse("matrix = hadamard\n").is_err());
    }

    #[test]
    fn basic_validation() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate_basic().is_ok());
        c.trials = 0;
        assert!(c.validate_basic().is_err());
        let c = ExperimentConfig {
            detectors: vec![Detector::ZdGroth],
            ..ExperimentConfig::default()
        };
        assert!(c.validate_basic().is_err());
    }
}
