//! Built-in charts for the orthotoric, generalized Taub-NUT, exceptional
//! Taub-NUT, exceptional half-plane and Burns surfaces.
//!
//! Every chart is produced as DSL text and parsed, so `dump-chart` output
//! re-parses to the same [`ChartSpec`]. The `chart` line carries the family
//! name; family-specific identity checks key on it.

mod charts;
mod dictionary;
pub mod displays;

use thiserror::Error;

pub use charts::{
    burns_text, exceptional_taub_nut_text, half_plane_text, orthotoric_text, taub_nut_text, OrthotoricBox,
};
pub use dictionary::{
    conformal_factor_residual, holomorphy_residual, parameter_dictionary, volumetric_map, Dictionary, Volumetric,
};

use crate::dsl::{parse_chart, ChartSpec, ParseError};
use crate::jet::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("parameter violation: {0}")]
    Params(String),
    #[error("catalog chart failed to parse: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// `F(ξ) = Aξ² + aξ + b`, `G(η) = Aη² + cη + d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthotoricParams {
    pub a2: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl OrthotoricParams {
    pub fn linear(a: f64, b: f64, c: f64, d: f64) -> Self {
        OrthotoricParams { a2: 0.0, a, b, c, d }
    }

    /// Linear family needs `a, c > 0`, `da − bc > 0`.
    pub fn validate(&self) -> Result<(), CatalogError> {
        if self.a2 == 0.0 && !(self.a > 0.0 && self.c > 0.0 && self.d * self.a - self.b * self.c > 0.0) {
            return Err(CatalogError::Params(format!(
                "linear orthotoric chart needs a, c > 0 and da - bc > 0 (a={}, b={}, c={}, d={})",
                self.a, self.b, self.c, self.d
            )));
        }
        Ok(())
    }

    /// Read back from a chart with `A a b c d` parameters.
    pub fn from_chart(chart: &ChartSpec) -> Option<Self> {
        Some(OrthotoricParams {
            a2: chart.param("A")?,
            a: chart.param("a")?,
            b: chart.param("b")?,
            c: chart.param("c")?,
            d: chart.param("d")?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaubNutParams {
    pub k: f64,
    pub m: f64,
}

impl TaubNutParams {
    pub fn validate(&self) -> Result<(), CatalogError> {
        if !(self.m > 0.0 && self.k > -1.0 && self.k < 1.0) {
            return Err(CatalogError::Params(format!(
                "Taub-NUT chart needs M > 0 and k in (-1, 1), got k={} M={}; k = ±1 is the exceptional chart",
                self.k, self.m
            )));
        }
        Ok(())
    }
}

pub fn orthotoric_chart(p: &OrthotoricParams) -> Result<ChartSpec, CatalogError> {
    p.validate()?;
    if p.a2 != 0.0 {
        return Err(CatalogError::Params("quadratic F, G need an explicit sampling box".into()));
    }
    Ok(parse_chart(&orthotoric_text(p, None, 0.0))?)
}

/// Orthotoric chart with an explicit `(xi, eta)` sampling box (any A).
pub fn orthotoric_chart_in_box(p: &OrthotoricParams, sample_box: [(f64, f64); 2]) -> Result<ChartSpec, CatalogError> {
    p.validate()?;
    Ok(parse_chart(&orthotoric_text(p, Some(sample_box), 0.0))?)
}

pub fn taubnut_chart(p: &TaubNutParams) -> Result<ChartSpec, CatalogError> {
    p.validate()?;
    Ok(parse_chart(&taub_nut_text(p))?)
}

pub fn exceptional_taubnut_chart() -> ChartSpec {
    parse_chart(&exceptional_taub_nut_text()).expect("built-in chart parses")
}

pub fn half_plane_chart() -> ChartSpec {
    parse_chart(&half_plane_text()).expect("built-in chart parses")
}

pub fn burns_chart(m: f64) -> Result<ChartSpec, CatalogError> {
    if !(m > 0.0) {
        return Err(CatalogError::Params(format!("Burns chart needs m > 0, got {m}")));
    }
    Ok(parse_chart(&burns_text(m))?)
}

/// Surface families known to the identity suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Orthotoric,
    TaubNut,
    ExceptionalTaubNut,
    HalfPlane,
    Burns,
}

impl Family {
    pub fn from_chart_name(name: &str) -> Option<Family> {
        Some(match name {
            "orthotoric" => Family::Orthotoric,
            "taub-nut" => Family::TaubNut,
            "taub-nut-exceptional" => Family::ExceptionalTaubNut,
            "half-plane" => Family::HalfPlane,
            "burns" => Family::Burns,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Orthotoric => "orthotoric",
            Family::TaubNut => "taub-nut",
            Family::ExceptionalTaubNut => "taub-nut-exceptional",
            Family::HalfPlane => "half-plane",
            Family::Burns => "burns",
        }
    }
}

/// A named catalog entry.
#[derive(Debug, Clone, Copy)]
pub struct Entry {
    pub name: &'static str,
    pub family: Family,
    pub summary: &'static str,
    build: fn() -> Result<ChartSpec, CatalogError>,
}

impl Entry {
    pub fn chart(&self) -> Result<ChartSpec, CatalogError> {
        (self.build)()
    }
}

fn ortho(a: f64, b: f64, c: f64, d: f64) -> Result<ChartSpec, CatalogError> {
    orthotoric_chart(&OrthotoricParams::linear(a, b, c, d))
}

fn tn(k: f64) -> Result<ChartSpec, CatalogError> {
    taubnut_chart(&TaubNutParams { k, m: 0.5 })
}

pub const ENTRIES: &[Entry] = &[
    Entry { name: "orthotoric", family: Family::Orthotoric, summary: "F = xi, G = eta + 1", build: || ortho(1.0, 0.0, 1.0, 1.0) },
    Entry { name: "orthotoric-asym", family: Family::Orthotoric, summary: "F = 2 xi, G = eta + 1", build: || ortho(2.0, 0.0, 1.0, 1.0) },
    Entry {
        name: "orthotoric-shifted",
        family: Family::Orthotoric,
        summary: "F = xi + 1, G = 3 eta + 4",
        build: || ortho(1.0, 1.0, 3.0, 4.0),
    },
    Entry {
        name: "orthotoric-quadratic",
        family: Family::Orthotoric,
        summary: "F = xi^2 + xi, G = eta^2 + 2 eta",
        build: || orthotoric_chart_in_box(&OrthotoricParams { a2: 1.0, a: 1.0, b: 0.0, c: 2.0, d: 0.0 }, [(0.1, 5.0), (-1.9, -0.1)]),
    },
    Entry {
        name: "orthotoric-quadratic-neg",
        family: Family::Orthotoric,
        summary: "F = 4 - xi^2, G = 1 + eta/2 - eta^2",
        build: || orthotoric_chart_in_box(&OrthotoricParams { a2: -1.0, a: 0.0, b: 4.0, c: 0.5, d: 1.0 }, [(-1.9, 1.9), (-4.0, -1.1)]),
    },
    Entry { name: "taub-nut", family: Family::TaubNut, summary: "k = 0, M = 0.5 (hyperkahler)", build: || tn(0.0) },
    Entry { name: "taub-nut-k0.5", family: Family::TaubNut, summary: "k = 0.5, M = 0.5", build: || tn(0.5) },
    Entry { name: "taub-nut-k-0.9", family: Family::TaubNut, summary: "k = -0.9, M = 0.5", build: || tn(-0.9) },
    Entry {
        name: "taub-nut-exceptional",
        family: Family::ExceptionalTaubNut,
        summary: "k = 1, Calabi type",
        build: || Ok(exceptional_taubnut_chart()),
    },
    Entry { name: "half-plane", family: Family::HalfPlane, summary: "exceptional half-plane, Calabi type", build: || Ok(half_plane_chart()) },
    Entry { name: "burns", family: Family::Burns, summary: "m = 1", build: || burns_chart(1.0) },
    Entry { name: "burns-m0.5", family: Family::Burns, summary: "m = 0.5", build: || burns_chart(0.5) },
    Entry { name: "burns-m4", family: Family::Burns, summary: "m = 4", build: || burns_chart(4.0) },
];

pub fn entry(name: &str) -> Result<&'static Entry, CatalogError> {
    ENTRIES.iter().find(|e| e.name == name).ok_or_else(|| CatalogError::UnknownChart(name.to_string()))
}

pub fn chart(name: &str) -> Result<ChartSpec, CatalogError> {
    entry(name)?.chart()
}
