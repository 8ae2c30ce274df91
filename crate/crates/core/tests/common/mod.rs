#![allow(dead_code)]

use qch_core::complex::Endo;
use qch_core::dsl::ChartSpec;
use qch_core::tensor::{form_from_eval, invert_jet_matrix, metric_from_eval, FormValue, JetMatrix};

/// Metric, its inverse and a named form at one point.
pub struct At {
    pub g: JetMatrix,
    pub g_inv: JetMatrix,
    pub chart: ChartSpec,
    pub point: Vec<f64>,
    pub order: usize,
}

impl At {
    pub fn new(chart: &ChartSpec, point: &[f64], order: usize) -> At {
        let ev = chart.at(point, order).unwrap();
        let g = metric_from_eval(&ev).unwrap();
        let g_inv = invert_jet_matrix(&g).unwrap();
        At { g, g_inv, chart: chart.clone(), point: point.to_vec(), order }
    }

    pub fn form(&self, name: &str) -> FormValue {
        let ev = self.chart.at(&self.point, self.order).unwrap();
        form_from_eval(&ev, self.chart.form(name).unwrap()).unwrap()
    }

    pub fn scalar(&self, name: &str) -> qch_core::jet::Jet {
        let ev = self.chart.at(&self.point, self.order).unwrap();
        ev.scalar(self.chart.scalar_index(name).unwrap()).unwrap()
    }

    pub fn j(&self) -> Endo {
        Endo::from_form(&self.g_inv, &self.form("omega_J")).unwrap()
    }

    pub fn i(&self) -> Endo {
        Endo::from_form_normalized(&self.g_inv, &self.form("omega_I")).unwrap()
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}
