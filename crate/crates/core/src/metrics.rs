//! Gain and mean logarithmic gain over repetition ensembles.
//!
//! `G = median(reference) / median(config)` of best-so-far values at a grid
//! point; the suite score is the mean of `log10 G` over every benchmark
//! function. Medians are clamped below at [`TOLERANCE`] so converged runs
//! compare as equal instead of dividing by zero.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{FunctionId, TOLERANCE};
use crate::trace::TimedTrace;

/// Which coordinate a grid point is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Evaluations consumed (summed over colonies).
    Evals,
    /// Elapsed time in evaluation units.
    Time,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Evals => "fe",
            Axis::Time => "time",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// All repetitions of one configuration on one function.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ensemble {
    pub function: String,
    pub config: String,
    pub runs: Vec<TimedTrace>,
}

impl Ensemble {
    pub fn new(function: impl Into<String>, config: impl Into<String>, runs: Vec<TimedTrace>) -> Self {
        Self {
            function: function.into(),
            config: config.into(),
            runs,
        }
    }

    /// Best-so-far of every run at `at`, carrying last values forward.
    pub fn values_at(&self, axis: Axis, at: f64) -> Result<Vec<f64>> {
        if self.runs.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        self.runs
            .iter()
            .map(|t| {
                let v = match axis {
                    Axis::Evals => t.best_at_evals(at.max(0.0).floor() as u64),
                    Axis::Time => t.best_at_time(at),
                };
                v.ok_or(Error::EmptyEnsemble)
            })
            .collect()
    }
}

/// Median with the even-count convention (mean of the middle two), clamped
/// below at the tolerance.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let m = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    Ok(m.max(TOLERANCE))
}

/// Arithmetic mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

pub fn median_best(ens: &Ensemble, axis: Axis, at: f64) -> Result<f64> {
    median(&ens.values_at(axis, at)?)
}

/// Gain of `conf` over the reference ensemble at one grid point.
pub fn gain(conf: &Ensemble, reference: &Ensemble, axis: Axis, at: f64) -> Result<f64> {
    Ok(median_best(reference, axis, at)? / median_best(conf, axis, at)?)
}

/// Mean of `log10 G` over the suite. Every suite function must be present
/// and nothing else.
pub fn mlg(gains: &BTreeMap<FunctionId, f64>) -> Result<f64> {
    if let Some(missing) = FunctionId::ALL.iter().find(|id| !gains.contains_key(id)) {
        return Err(Error::MissingFunction(missing.as_str().to_string()));
    }
    if let Some(&g) = gains.values().find(|g| !(**g > 0.0) || !g.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "gain must be positive and finite, got {g}"
        )));
    }
    Ok(gains.values().map(|g| g.log10()).sum::<f64>() / gains.len() as f64)
}

/// Gain of one configuration as a function of the grid coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct GainCurve {
    pub axis: Axis,
    /// `(axis value, G)` pairs.
    pub points: Vec<(f64, f64)>,
}

pub fn gain_curve(conf: &Ensemble, reference: &Ensemble, axis: Axis, grid: &[f64]) -> Result<GainCurve> {
    let points = grid
        .iter()
        .map(|&at| Ok((at, gain(conf, reference, axis, at)?)))
        .collect::<Result<_>>()?;
    Ok(GainCurve { axis, points })
}

/// Evaluation grid `step, 2·step, …` up to and including `budget`.
pub fn evals_grid(budget: u64, step: u64) -> Vec<f64> {
    let step = step.max(1);
    let mut g: Vec<f64> = (1..=budget / step).map(|k| (k * step) as f64).collect();
    if !budget.is_multiple_of(step) || g.is_empty() {
        g.push(budget as f64);
    }
    g
}

/// `points + 1` normalized times `0, 1/points, …, 1`.
pub fn unit_time_grid(points: usize) -> Vec<f64> {
    let n = points.max(1);
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

/// One line of a metric table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub function: String,
    pub config: String,
    pub axis_type: Axis,
    /// Evaluations, or time normalized by the reference duration.
    pub axis_value: f64,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
    #[serde(rename = "G")]
    pub gain: f64,
    /// `log10 G / suite size`; summing a column of these gives the MLG.
    pub mlg_contribution: f64,
}

/// One line of the suite-level table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlgRow {
    pub config: String,
    pub reference: String,
    pub axis_type: Axis,
    pub axis_value: f64,
    pub mlg: f64,
}

/// Compares one configuration against the reference on every function.
///
/// `conf` and `reference` are keyed by function. Evaluation-axis points are
/// taken from `fe_grid`; time-axis points are normalized times multiplied by
/// `reference_time`, the duration of the serial reference run.
pub struct Comparison<'a> {
    pub conf: &'a BTreeMap<FunctionId, Ensemble>,
    pub reference: &'a BTreeMap<FunctionId, Ensemble>,
    pub reference_time: f64,
}

impl Comparison<'_> {
    fn pair(&self, id: FunctionId) -> Result<(&Ensemble, &Ensemble)> {
        let c = self
            .conf
            .get(&id)
            .ok_or_else(|| Error::MissingFunction(id.as_str().to_string()))?;
        let r = self
            .reference
            .get(&id)
            .ok_or_else(|| Error::MissingFunction(id.as_str().to_string()))?;
        Ok((c, r))
    }

    fn raw(&self, axis: Axis, at: f64) -> f64 {
        match axis {
            Axis::Evals => at,
            Axis::Time => at * self.reference_time,
        }
    }

    /// MLG at one point; `at` is normalized for the time axis.
    pub fn mlg_at(&self, axis: Axis, at: f64) -> Result<f64> {
        let raw = self.raw(axis, at);
        let gains = FunctionId::ALL
            .iter()
            .map(|&id| {
                let (c, r) = self.pair(id)?;
                Ok((id, gain(c, r, axis, raw)?))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        mlg(&gains)
    }

    pub fn rows(&self, axis: Axis, grid: &[f64]) -> Result<(Vec<MetricRow>, Vec<MlgRow>)> {
        let n = FunctionId::ALL.len() as f64;
        let mut rows = Vec::new();
        let mut totals = vec![0.0; grid.len()];
        let mut labels = None;
        for &id in FunctionId::ALL.iter() {
            let (c, r) = self.pair(id)?;
            labels.get_or_insert((c.config.clone(), r.config.clone()));
            for (k, &at) in grid.iter().enumerate() {
                let raw = self.raw(axis, at);
                let values = c.values_at(axis, raw)?;
                let med = median(&values)?;
                let (mean, std) = mean_std(&values)?;
                let g = median_best(r, axis, raw)? / med;
                let contribution = g.log10() / n;
                totals[k] += contribution;
                rows.push(MetricRow {
                    function: id.as_str().to_string(),
                    config: c.config.clone(),
                    axis_type: axis,
                    axis_value: at,
                    median: med,
                    mean,
                    std,
                    gain: g,
                    mlg_contribution: contribution,
                });
            }
        }
        let (config, reference) = labels.unwrap_or_default();
        let suite = grid
            .iter()
            .zip(totals)
            .map(|(&at, mlg)| MlgRow {
                config: config.clone(),
                reference: reference.clone(),
                axis_type: axis,
                axis_value: at,
                mlg,
            })
            .collect();
        Ok((rows, suite))
    }
}
