//! Cartesian parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use wma_core::fisher::{f_total_closed, fisher_std_closed, ratio_p_numeric, ratio_q_closed, ratio_q_numeric};
use wma_core::model::{overlap, postselect_probability, weak_value, Scenario};

use crate::config::{Param, ScenarioParams};
use crate::emit::{Cell, Table};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_POINTS: usize = 1_000_000;

/// Quantity computed for each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Am,
    K2,
    RatioP,
    RatioQClosed,
    RatioQNumeric,
    FStd,
    FTotal,
    Overlap,
    WeakValueRe,
    WeakValueIm,
}

impl Output {
    pub const ALL: [Output; 10] = [
        Output::Am,
        Output::K2,
        Output::RatioP,
        Output::RatioQClosed,
        Output::RatioQNumeric,
        Output::FStd,
        Output::FTotal,
        Output::Overlap,
        Output::WeakValueRe,
        Output::WeakValueIm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Am => "A_m",
            Output::K2 => "k2",
            Output::RatioP => "ratio_p",
            Output::RatioQClosed => "ratio_q_closed",
            Output::RatioQNumeric => "ratio_q_numeric",
            Output::FStd => "F_std",
            Output::FTotal => "F_total",
            Output::Overlap => "overlap",
            Output::WeakValueRe => "weak_value_re",
            Output::WeakValueIm => "weak_value_im",
        }
    }

    /// `F_std` is the filtered standard strategy at the scenario's own `z`.
    pub fn evaluate(self, sc: &Scenario) -> wma_core::Result<f64> {
        match self {
            Output::Am => postselect_probability(sc),
            Output::K2 => Ok(sc.k2()),
            Output::RatioP => ratio_p_numeric(sc),
            Output::RatioQClosed => ratio_q_closed(sc),
            Output::RatioQNumeric => ratio_q_numeric(sc),
            Output::FStd => fisher_std_closed(sc, sc.pointer.z),
            Output::FTotal => Ok(f_total_closed(sc)),
            Output::Overlap => overlap(sc),
            Output::WeakValueRe => weak_value(&sc.system).map(|w| w.re),
            Output::WeakValueIm => weak_value(&sc.system).map(|w| w.im),
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Output::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| format!("unknown output column `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioParams,
    /// Axes in document order; the first axis varies slowest.
    pub axes: Vec<(Param, Vec<f64>)>,
    pub outputs: Vec<Output>,
    pub max_points: usize,
}

impl SweepSpec {
    pub fn new(base: ScenarioParams, axes: Vec<(Param, Vec<f64>)>, outputs: Vec<Output>) -> Result<Self> {
        let usage = |m: String| Err(Error::Usage(m));
        if axes.is_empty() {
            return usage("a sweep needs at least one sweep.axes.<param> entry".into());
        }
        if outputs.is_empty() {
            return usage("a sweep needs at least one output column".into());
        }
        for (i, (param, values)) in axes.iter().enumerate() {
            if values.is_empty() {
                return usage(format!("axis `{param}` has no values"));
            }
            if axes[..i].iter().any(|(p, _)| p == param) {
                return usage(format!("axis `{param}` given twice"));
            }
            for &v in values {
                param.check(v).map_err(|message| Error::Domain {
                    line: 0,
                    key: format!("sweep.axes.{param}"),
                    message,
                })?;
            }
        }
        let has = |p: Param| axes.iter().any(|(q, _)| *q == p);
        if has(Param::Chi) && has(Param::K2) {
            return usage("axes `chi` and `k2` both set the coupling".into());
        }
        Ok(Self {
            base,
            axes,
            outputs,
            max_points: DEFAULT_MAX_POINTS,
        })
    }

    pub fn with_max_points(mut self, max_points: usize) -> Result<Self> {
        self.max_points = max_points;
        let n = self.len_checked();
        match n {
            Some(n) if n <= max_points => Ok(self),
            _ => Err(Error::Usage(format!(
                "sweep grid has {} points, above the cap of {max_points}",
                n.map_or_else(|| "too many".to_string(), |n| n.to_string())
            ))),
        }
    }

    fn len_checked(&self) -> Option<usize> {
        self.axes
            .iter()
            .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()))
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.len_checked().unwrap_or(usize::MAX)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis values of grid point `index` in lexicographic order.
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut coords = vec![0.0; self.axes.len()];
        for (slot, (_, values)) in coords.iter_mut().zip(&self.axes).rev() {
            *slot = values[index % values.len()];
            index /= values.len();
        }
        coords
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    /// One entry per output; `None` where the computation failed.
    pub values: Vec<Option<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis_names: Vec<String>,
    pub output_names: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn error_count(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    /// Columns are the axes followed by the outputs, plus an `error` column
    /// when any row failed.
    pub fn to_table(&self) -> Table {
        let with_errors = self.error_count() > 0;
        let mut columns: Vec<String> = self
            .axis_names
            .iter()
            .chain(&self.output_names)
            .cloned()
            .collect();
        if with_errors {
            columns.push("error".into());
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut cells: Vec<Cell> = row.coords.iter().map(|&v| Cell::Number(v)).collect();
                cells.extend(row.values.iter().map(|v| v.map_or(Cell::Missing, Cell::Number)));
                if with_errors {
                    cells.push(row.error.clone().map_or(Cell::Missing, Cell::Text));
                }
                cells
            })
            .collect();
        Table { columns, rows }
    }
}

fn evaluate_point(spec: &SweepSpec, coords: Vec<f64>) -> SweepRow {
    let mut params = spec.base;
    for ((param, _), &v) in spec.axes.iter().zip(&coords) {
        params.set(*param, v);
    }
    let scenario = match params.build() {
        Ok(sc) => sc,
        Err(e) => {
            return SweepRow {
                coords,
                values: vec![None; spec.outputs.len()],
                error: Some(format!("scenario: {e}")),
            }
        }
    };
    let mut errors = Vec::new();
    let values = spec
        .outputs
        .iter()
        .map(|out| match out.evaluate(&scenario) {
            Ok(v) => Some(v),
            Err(e) => {
                errors.push(format!("{out}: {e}"));
                None
            }
        })
        .collect();
    SweepRow {
        coords,
        values,
        error: (!errors.is_empty()).then(|| errors.join("; ")),
    }
}

/// Evaluates every grid point in parallel; rows come back in grid order and
/// per-point failures are recorded rather than propagated.
pub fn run_sweep(spec: &SweepSpec) -> SweepTable {
    let rows = (0..spec.len())
        .into_par_iter()
        .map(|i| evaluate_point(spec, spec.point(i)))
        .collect();
    SweepTable {
        axis_names: spec.axes.iter().map(|(p, _)| p.name().to_string()).collect(),
        output_names: spec.outputs.iter().map(|o| o.name().to_string()).collect(),
        rows,
    }
}
