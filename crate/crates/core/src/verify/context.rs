use std::cell::OnceCell;

use crate::complex::Endo;
use crate::dsl::{ChartSpec, PointEval};
use crate::jet::Jet;
use crate::tensor::{invert_jet_matrix, Connection, CurvaturePack, FormValue, JetMatrix};

type Cached<T> = OnceCell<Result<T, String>>;

fn get<T>(cell: &Cached<T>, f: impl FnOnce() -> Result<T, String>) -> Result<&T, String> {
    cell.get_or_init(f).as_ref().map_err(Clone::clone)
}

/// Per-point data shared by all checks at that point, computed on first use.
pub(crate) struct PointContext<'a> {
    pub chart: &'a ChartSpec,
    pub point: &'a [f64],
    pub index: usize,
    pub seed: u64,
    ev: PointEval<'a>,
    g: Cached<JetMatrix>,
    g_inv: Cached<JetMatrix>,
    pack: Cached<CurvaturePack>,
    forms: Cached<Vec<FormValue>>,
    j: Cached<Endo>,
    i: Cached<Endo>,
}

impl<'a> PointContext<'a> {
    pub fn new(chart: &'a ChartSpec, point: &'a [f64], index: usize, order: usize, seed: u64) -> Result<Self, String> {
        let ev = chart.at(point, order).map_err(|e| e.to_string())?;
        Ok(PointContext {
            chart,
            point,
            index,
            seed,
            ev,
            g: OnceCell::new(),
            g_inv: OnceCell::new(),
            pack: OnceCell::new(),
            forms: OnceCell::new(),
            j: OnceCell::new(),
            i: OnceCell::new(),
        })
    }

    pub fn eval(&self, e: &crate::dsl::Expr) -> Result<Jet, String> {
        self.ev.eval(e).map_err(|e| e.to_string())
    }

    pub fn scalar(&self, i: usize) -> Result<Jet, String> {
        self.ev.scalar(i).map_err(|e| e.to_string())
    }

    pub fn scalar_named(&self, name: &str) -> Result<Jet, String> {
        let i = self.chart.scalar_index(name).ok_or_else(|| format!("chart has no scalar `{name}`"))?;
        self.scalar(i)
    }

    pub fn constant(&self, v: f64) -> Jet {
        self.ev.constant(v)
    }

    pub fn vector(&self, i: usize) -> Result<Vec<Jet>, String> {
        self.chart.vectors[i].components.iter().map(|e| self.eval(e)).collect()
    }

    pub fn g(&self) -> Result<&JetMatrix, String> {
        get(&self.g, || crate::tensor::metric_from_eval(&self.ev).map_err(|e| e.to_string()))
    }

    pub fn g_inv(&self) -> Result<&JetMatrix, String> {
        get(&self.g_inv, || invert_jet_matrix(self.g()?).map_err(|e| e.to_string()))
    }

    pub fn pack(&self) -> Result<&CurvaturePack, String> {
        get(&self.pack, || {
            let conn = Connection::new(self.g()?.clone()).map_err(|e| e.to_string())?;
            CurvaturePack::from_connection(&conn).map_err(|e| e.to_string())
        })
    }

    fn forms(&self) -> Result<&Vec<FormValue>, String> {
        get(&self.forms, || {
            let forms = self.chart.forms.iter().map(|f| crate::tensor::form_from_eval(&self.ev, f));
            forms.collect::<Result<_, _>>().map_err(|e| e.to_string())
        })
    }

    pub fn form(&self, index: usize) -> Result<&FormValue, String> {
        Ok(&self.forms()?[index])
    }

    pub fn form_named(&self, name: &str) -> Result<&FormValue, String> {
        let i = self.chart.form_index(name).ok_or_else(|| format!("chart has no form `{name}`"))?;
        self.form(i)
    }

    /// Complex structure of `omega_J`.
    pub fn j(&self) -> Result<&Endo, String> {
        get(&self.j, || Endo::from_form(self.g_inv()?, self.form_named("omega_J")?).map_err(|e| e.to_string()))
    }

    /// Unit-normalized structure of `omega_I`.
    pub fn i(&self) -> Result<&Endo, String> {
        get(&self.i, || Endo::from_form_normalized(self.g_inv()?, self.form_named("omega_I")?).map_err(|e| e.to_string()))
    }
}
