//! Flat `section.key = value` run configuration.
//!
//! ```text
//! # two identical particles with a sharp cutoff
//! system.m1 = 1.0
//! system.m2 = 1.0
//! particle1.kind = cutoff
//! particle1.b = 100
//! interaction.kind = coulomb
//! interaction.alpha = 1
//! interaction.delta = 0.5
//! solve.p0 = 0.0
//! ```
//!
//! Lines starting with `#` are comments. Without any `particle2.*` key the
//! second particle reuses the first particle's settings. Unknown keys are
//! rejected so typos cannot silently fall back to defaults.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::deformation::{DeformationFamily, FamilyKind, MassScalingRule};
use crate::error::{Error, Result};
use crate::kinematics::TwoBodySystem;
use crate::spectrum::Interaction;
use crate::wavefunction::DEFAULT_GRID_SIZE;

const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleConfig {
    pub kind: FamilyKind,
    pub b: Option<f64>,
    pub beta: Option<f64>,
    /// Mass scaling `b = eta m`; the mass comes from `system.m1` / `system.m2`.
    pub eta: Option<f64>,
    pub points: Option<Vec<(f64, f64)>>,
}

impl Default for ParticleConfig {
    fn default() -> Self {
        Self {
            kind: FamilyKind::Cutoff,
            b: None,
            beta: None,
            eta: None,
            points: None,
        }
    }
}

impl ParticleConfig {
    pub fn family(&self, mass: f64) -> Result<DeformationFamily> {
        let set = [
            self.b.is_some(),
            self.beta.is_some(),
            self.eta.is_some(),
            self.points.is_some(),
        ];
        if set.iter().filter(|&&x| x).count() > 1 {
            return Err(Error::Config(
                "give at most one of b, beta, eta, points per particle".into(),
            ));
        }
        if let Some(eta) = self.eta {
            return MassScalingRule::new(eta)?.from_mass(mass, self.kind);
        }
        match self.kind {
            FamilyKind::Cutoff => {
                if self.beta.is_some() {
                    return Err(Error::Config("cutoff family takes b, not beta".into()));
                }
                DeformationFamily::cutoff(self.b.unwrap_or(f64::INFINITY))
            }
            FamilyKind::Kempf => match (self.beta, self.b) {
                (Some(beta), _) => DeformationFamily::kempf(beta),
                (None, Some(b)) => DeformationFamily::kempf((FRAC_PI_2 / b).powi(2)),
                _ => Err(Error::Config("kempf family needs beta, b or eta".into())),
            },
            FamilyKind::InverseSqrt => match (self.beta, self.b) {
                (Some(beta), _) => DeformationFamily::inverse_sqrt(beta),
                (None, Some(b)) => DeformationFamily::inverse_sqrt(1.0 / (b * b)),
                _ => Err(Error::Config("inverse_sqrt family needs beta, b or eta".into())),
            },
            FamilyKind::Custom => match &self.points {
                Some(points) => DeformationFamily::custom(points),
                None => Err(Error::Config("custom family needs points".into())),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionKind {
    Delta,
    Coulomb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesRegime {
    Identical,
    Distinct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesConfig {
    /// `cutoff` or `inverse_sqrt`.
    pub family: FamilyKind,
    pub regime: SeriesRegime,
    /// Cutoffs `b2` (or `b`) for the cutoff family, `beta` for inverse_sqrt.
    pub values: Vec<f64>,
    /// `b1 = b1_ratio * b2` in the distinct regime.
    pub b1_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m1: f64,
    pub m2: f64,
    pub hbar: f64,
    pub particle1: ParticleConfig,
    /// `None` reuses `particle1`.
    pub particle2: Option<ParticleConfig>,
    pub interaction: InteractionKind,
    pub u0: Option<f64>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub p0: f64,
    pub p0_grid: Option<Vec<f64>>,
    pub n: u32,
    pub n_max: Option<u32>,
    pub tol: f64,
    pub grid_size: usize,
    pub series: SeriesConfig,
    pub format: OutputFormat,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m1: 1.0,
            m2: 1.0,
            hbar: 1.0,
            particle1: ParticleConfig::default(),
            particle2: None,
            interaction: InteractionKind::Delta,
            u0: None,
            alpha: None,
            delta: None,
            p0: 0.0,
            p0_grid: None,
            n: 0,
            n_max: None,
            tol: DEFAULT_TOL,
            grid_size: DEFAULT_GRID_SIZE,
            series: SeriesConfig {
                family: FamilyKind::Cutoff,
                regime: SeriesRegime::Identical,
                values: Vec::new(),
                b1_ratio: 3.0,
            },
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

/// Reads `key = value` lines; a repeated key is an error.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = split_assignment(line).map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key '{key}'", i + 1)));
        }
    }
    Ok(map)
}

/// Splits `key=value` at the first `=`.
pub fn split_assignment(s: &str) -> std::result::Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty key in '{s}'"));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| num(key, x.trim())).collect()
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma list.
fn grid(key: &str, v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').collect();
    if parts.len() == 1 {
        return list(key, v);
    }
    if parts.len() != 3 {
        return Err(Error::Config(format!("{key}: expected start:stop:count, got '{v}'")));
    }
    let start: f64 = num(key, parts[0].trim())?;
    let stop: f64 = num(key, parts[1].trim())?;
    let count: usize = num(key, parts[2].trim())?;
    Ok(match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    })
}

fn points(key: &str, v: &str) -> Result<Vec<(f64, f64)>> {
    v.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (p, g) = pair
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("{key}: expected p:g pairs, got '{pair}'")))?;
            Ok((num(key, p.trim())?, num(key, g.trim())?))
        })
        .collect()
}

fn apply_particle(p: &mut ParticleConfig, field: &str, key: &str, v: &str) -> Result<()> {
    match field {
        "kind" => p.kind = v.parse()?,
        "b" => p.b = Some(num(key, v)?),
        "beta" => p.beta = Some(num(key, v)?),
        "eta" => p.eta = Some(num(key, v)?),
        "points" => p.points = Some(points(key, v)?),
        _ => return Err(Error::Config(format!("unknown key '{key}'"))),
    }
    Ok(())
}

impl RunConfig {
    pub fn from_pairs(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut p2 = ParticleConfig::default();
        let mut has_p2 = false;
        for (key, v) in map {
            let v = v.as_str();
            match key.as_str() {
                "system.m1" => c.m1 = num(key, v)?,
                "system.m2" => c.m2 = num(key, v)?,
                "system.hbar" => c.hbar = num(key, v)?,
                "interaction.kind" => {
                    c.interaction = match v.to_ascii_lowercase().as_str() {
                        "delta" => InteractionKind::Delta,
                        "coulomb" => InteractionKind::Coulomb,
                        other => return Err(Error::Config(format!("unknown interaction '{other}'"))),
                    }
                }
                "interaction.u0" => c.u0 = Some(num(key, v)?),
                "interaction.alpha" => c.alpha = Some(num(key, v)?),
                "interaction.delta" => c.delta = Some(num(key, v)?),
                "solve.p0" => c.p0 = num(key, v)?,
                "solve.p0_grid" => c.p0_grid = Some(grid(key, v)?),
                "solve.n" => c.n = num(key, v)?,
                "solve.n_max" => c.n_max = Some(num(key, v)?),
                "solve.tol" => c.tol = num(key, v)?,
                "solve.grid_size" => c.grid_size = num(key, v)?,
                "series.family" => c.series.family = v.parse()?,
                "series.regime" => {
                    c.series.regime = match v.to_ascii_lowercase().as_str() {
                        "identical" => SeriesRegime::Identical,
                        "distinct" => SeriesRegime::Distinct,
                        other => return Err(Error::Config(format!("unknown series regime '{other}'"))),
                    }
                }
                "series.values" => c.series.values = list(key, v)?,
                "series.b1_ratio" => c.series.b1_ratio = num(key, v)?,
                "output.format" => c.format = v.parse()?,
                "output.path" => c.out = Some(v.to_string()),
                _ => {
                    if let Some(field) = key.strip_prefix("particle1.") {
                        apply_particle(&mut c.particle1, field, key, v)?;
                    } else if let Some(field) = key.strip_prefix("particle2.") {
                        has_p2 = true;
                        apply_particle(&mut p2, field, key, v)?;
                    } else {
                        return Err(Error::Config(format!("unknown key '{key}'")));
                    }
                }
            }
        }
        if has_p2 {
            c.particle2 = Some(p2);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::Config(format!(
                "solve.tol must lie in (0, 1e-2], got {}",
                self.tol
            )));
        }
        if self.grid_size < 2 {
            return Err(Error::Config("solve.grid_size must be at least 2".into()));
        }
        if !matches!(self.series.family, FamilyKind::Cutoff | FamilyKind::InverseSqrt) {
            return Err(Error::Config("series.family must be cutoff or inverse_sqrt".into()));
        }
        if !(self.series.b1_ratio >= 1.0) {
            return Err(Error::Config("series.b1_ratio must be at least 1".into()));
        }
        self.system()?;
        self.interaction()?;
        Ok(())
    }

    pub fn system(&self) -> Result<TwoBodySystem> {
        let f1 = self.particle1.family(self.m1)?;
        let f2 = self.particle2.as_ref().unwrap_or(&self.particle1).family(self.m2)?;
        TwoBodySystem::new(self.m1, f1, self.m2, f2, self.hbar)
    }

    pub fn interaction(&self) -> Result<Interaction> {
        match self.interaction {
            InteractionKind::Delta => Interaction::delta(
                self.u0
                    .ok_or_else(|| Error::Config("interaction.u0 is required".into()))?,
            ),
            InteractionKind::Coulomb => Interaction::coulomb(
                self.alpha
                    .ok_or_else(|| Error::Config("interaction.alpha is required".into()))?,
                self.delta
                    .ok_or_else(|| Error::Config("interaction.delta is required".into()))?,
            ),
        }
    }

    /// Every setting as `key = value` lines that parse back to `self`.
    pub fn dump(&self) -> String {
        let mut map: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| map.push((k.to_string(), v));
        put("system.m1", format!("{:?}", self.m1));
        put("system.m2", format!("{:?}", self.m2));
        put("system.hbar", format!("{:?}", self.hbar));
        let particles = [
            ("particle1", Some(&self.particle1)),
            ("particle2", self.particle2.as_ref()),
        ];
        for (name, p) in particles {
            let Some(p) = p else { continue };
            put(&format!("{name}.kind"), p.kind.as_str().to_string());
            if let Some(b) = p.b {
                put(&format!("{name}.b"), format!("{b:?}"));
            }
            if let Some(beta) = p.beta {
                put(&format!("{name}.beta"), format!("{beta:?}"));
            }
            if let Some(eta) = p.eta {
                put(&format!("{name}.eta"), format!("{eta:?}"));
            }
            if let Some(points) = &p.points {
                let s: Vec<String> = points.iter().map(|(p, g)| format!("{p:?}:{g:?}")).collect();
                put(&format!("{name}.points"), s.join(";"));
            }
        }
        let kind = match self.interaction {
            InteractionKind::Delta => "delta",
            InteractionKind::Coulomb => "coulomb",
        };
        put("interaction.kind", kind.to_string());
        for (k, v) in [
            ("interaction.u0", self.u0),
            ("interaction.alpha", self.alpha),
            ("interaction.delta", self.delta),
        ] {
            if let Some(v) = v {
                put(k, format!("{v:?}"));
            }
        }
        put("solve.p0", format!("{:?}", self.p0));
        if let Some(g) = &self.p0_grid {
            put("solve.p0_grid", join(g));
        }
        put("solve.n", self.n.to_string());
        if let Some(n) = self.n_max {
            put("solve.n_max", n.to_string());
        }
        put("solve.tol", format!("{:?}", self.tol));
        put("solve.grid_size", self.grid_size.to_string());
        put("series.family", self.series.family.as_str().to_string());
        let regime = match self.series.regime {
            SeriesRegime::Identical => "identical",
            SeriesRegime::Distinct => "distinct",
        };
        put("series.regime", regime.to_string());
        if !self.series.values.is_empty() {
            put("series.values", join(&self.series.values));
        }
        put("series.b1_ratio", format!("{:?}", self.series.b1_ratio));
        put("output.format", self.format.as_str().to_string());
        if let Some(out) = &self.out {
            put("output.path", out.clone());
        }
        let mut text = String::new();
        for (k, v) in map {
            let _ = writeln!(text, "{k} = {v}");
        }
        text
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}
