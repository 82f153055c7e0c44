//! File formats: complex pairs, polygon configs, CSV writers.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::polygon::{validate_polygon, PolygonSpec};
use crate::{Error, Result, C64};

/// A complex number on the wire: `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Pair(pub f64, pub f64);

impl From<[f64; 2]> for Pair {
    fn from(v: [f64; 2]) -> Self {
        Pair(v[0], v[1])
    }
}

impl From<Pair> for [f64; 2] {
    fn from(p: Pair) -> Self {
        [p.0, p.1]
    }
}

impl From<C64> for Pair {
    fn from(z: C64) -> Self {
        Pair(z.re, z.im)
    }
}

impl From<Pair> for C64 {
    fn from(p: Pair) -> Self {
        C64::new(p.0, p.1)
    }
}

/// Polygon config document: `{"alphas":[...], "prevertices":[...], "d0":[re,im], "d1":[re,im]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonConfig {
    pub alphas: Vec<f64>,
    pub prevertices: Vec<f64>,
    #[serde(default = "origin")]
    pub d0: Pair,
    #[serde(default = "unit")]
    pub d1: Pair,
    #[serde(default)]
    pub normalized: bool,
}

fn origin() -> Pair {
    Pair(0.0, 0.0)
}

fn unit() -> Pair {
    Pair(1.0, 0.0)
}

impl PolygonConfig {
    pub fn validate(&self) -> Result<PolygonSpec> {
        let p = validate_polygon(&self.alphas, &self.prevertices, self.d0.into(), self.d1.into())?;
        if self.normalized {
            p.check_normalized()?;
        }
        Ok(p)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    /// Reads JSON or TOML, chosen by file extension (JSON otherwise).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml(&text),
            _ => Self::from_json(&text),
        }
    }
}

impl From<&PolygonSpec> for PolygonConfig {
    fn from(p: &PolygonSpec) -> Self {
        PolygonConfig {
            alphas: p.alphas().to_vec(),
            prevertices: p.prevertices().to_vec(),
            d0: p.d0().into(),
            d1: p.d1().into(),
            normalized: false,
        }
    }
}

/// `index,x,y` rows for a point list.
pub fn points_csv(points: &[C64]) -> String {
    let mut s = String::from("index,x,y\n");
    for (i, p) in points.iter().enumerate() {
        let _ = writeln!(s, "{i},{},{}", p.re, p.im);
    }
    s
}

/// Prefixes a CSV body with a `#schema=` comment line.
pub fn with_schema(schema: &str, body: &str) -> String {
    format!("#schema={schema}\n{body}")
}
