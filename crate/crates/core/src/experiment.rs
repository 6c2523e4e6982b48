//! Repetition ensembles over the benchmark suite, persisted as CSV.
//!
//! Layout under the output directory:
//!
//! ```text
//! <out>/<function>/<config>/run_<r>.csv     eval,time,best_f per evaluation
//! <out>/<function>/<config>/summary.csv     statistics over repetitions
//! <out>/compare/<config>_vs_<ref>/gain_fe.csv
//! <out>/compare/<config>_vs_<ref>/gain_time.csv
//! <out>/compare/<config>_vs_<ref>/mlg.csv
//! ```
//!
//! Repetition `r` of every configuration uses seed `seed + r`, so all
//! configurations with the same colony size start from the same sources.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::colony::{BoundsMode, ColonyConfig};
use crate::error::{Error, Result};
use crate::metrics::{self, Axis, Comparison, Ensemble, MetricRow, MlgRow};
use crate::objective::{BenchmarkSpec, FunctionId};
use crate::parallel::{self, ExecMode, ParallelPlan, RunOutcome};
use crate::tech::TechnologySet;
use crate::trace::TimedTrace;

/// A named configuration shipped with the library.
pub struct Preset {
    pub label: &'static str,
    pub description: &'static str,
    pub tech: fn() -> TechnologySet,
    pub mode: ExecMode,
}

fn only(f: impl FnOnce(&mut TechnologySet)) -> TechnologySet {
    let mut t = TechnologySet::abc();
    f(&mut t);
    t
}

pub const PRESETS: &[Preset] = &[
    Preset {
        label: "abc",
        description: "standard ABC, every technology off",
        tech: TechnologySet::abc,
        mode: ExecMode::Serial,
    },
    Preset {
        label: "asbec",
        description: "check 3, biased onlookers, opposition, interpolation, prophet 0.5",
        tech: TechnologySet::asbec,
        mode: ExecMode::Serial,
    },
    Preset {
        label: "check3",
        description: "postponed hive dance with 3 passes",
        tech: || only(|t| t.check = 3),
        mode: ExecMode::Serial,
    },
    Preset {
        label: "biased",
        description: "strictly biased onlooker assignment",
        tech: || only(|t| t.biased = true),
        mode: ExecMode::Serial,
    },
    Preset {
        label: "multi-param",
        description: "move a random number of parameters",
        tech: || only(|t| t.multi_param = true),
        mode: ExecMode::Serial,
    },
    Preset {
        label: "smart-scout",
        description: "scouts sample the hull of the food sources",
        tech: || only(|t| t.smart_scout = true),
        mode: ExecMode::Serial,
    },
    Preset {
        label: "opposition",
        description: "super-bee with opposite step",
        tech: || only(|t| t.opposition = true),
        mode: ExecMode::Serial,
    },
    Preset {
        label: "opposition-interpolation",
        description: "super-bee with opposite and parabola-vertex steps",
        tech: || {
            only(|t| {
                t.opposition = true;
                t.interpolation = true;
            })
        },
        mode: ExecMode::Serial,
    },
    Preset {
        label: "prophet",
        description: "prophet with catalyst 0.5",
        tech: || only(|t| t.prophet_catalyst = Some(0.5)),
        mode: ExecMode::Serial,
    },
    Preset {
        label: "multi-start-abc",
        description: "8 independent ABC colonies",
        tech: TechnologySet::abc,
        mode: ExecMode::MultiStart,
    },
    Preset {
        label: "multi-start-asbec",
        description: "8 independent AsBeC colonies",
        tech: TechnologySet::asbec,
        mode: ExecMode::MultiStart,
    },
    Preset {
        label: "multi-swarm-asbec",
        description: "8 AsBeC colonies exchanging their best sources every 20 cycles",
        tech: TechnologySet::asbec,
        mode: ExecMode::MultiSwarm,
    },
    Preset {
        label: "bbb-asbec",
        description: "one AsBeC colony evaluated in waves of 8",
        tech: TechnologySet::asbec,
        mode: ExecMode::BeeByBee,
    },
];

pub fn preset(label: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.label == label)
}

/// One configuration of an experiment. Missing parts come from the preset
/// with the same label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tech: Option<TechnologySet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<ParallelPlan>,
    /// Per-colony budget overriding the experiment's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

impl ConfigSpec {
    pub fn named(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            tech: None,
            plan: None,
            budget: None,
        }
    }
}

/// A fully specified configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub label: String,
    pub colony: ColonyConfig,
    pub plan: ParallelPlan,
}

impl Resolved {
    /// The preset `label` with default colony parameters.
    pub fn preset(label: &str, budget: u64) -> Result<Self> {
        ExperimentConfig {
            budget,
            ..ExperimentConfig::default()
        }
        .resolve(&ConfigSpec::named(label))
    }

    pub fn run(&self, id: FunctionId, seed: u64) -> Result<RunOutcome> {
        let cfg = ColonyConfig {
            seed,
            ..self.colony.clone()
        };
        parallel::run(&cfg, &self.plan, &BenchmarkSpec::new(id))
    }

    /// `reps` paired repetitions, executed concurrently.
    pub fn ensemble(&self, id: FunctionId, seed: u64, reps: usize) -> Result<Ensemble> {
        let runs = (0..reps as u64)
            .into_par_iter()
            .map(|r| Ok(self.run(id, seed.wrapping_add(r))?.combined))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble::new(id.as_str(), self.label.clone(), runs))
    }
}

fn default_functions() -> Vec<FunctionId> {
    FunctionId::ALL.to_vec()
}

fn default_configs() -> Vec<ConfigSpec> {
    vec![ConfigSpec::named("abc"), ConfigSpec::named("asbec")]
}

/// Experiment description, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_functions")]
    pub functions: Vec<FunctionId>,
    #[serde(default = "default_configs")]
    pub configs: Vec<ConfigSpec>,
    pub reps: usize,
    /// Seed of repetition 0.
    pub seed: u64,
    /// Evaluations per colony.
    pub budget: u64,
    pub sn: usize,
    pub on: usize,
    pub limit: u32,
    pub bounds_mode: BoundsMode,
    pub out: PathBuf,
    /// Spacing of the evaluation grid in summaries and gain tables.
    pub fe_step: u64,
    /// Number of intervals of the normalized time grid.
    pub time_points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let c = ColonyConfig::default();
        Self {
            functions: default_functions(),
            configs: default_configs(),
            reps: 50,
            seed: 1,
            budget: c.budget,
            sn: c.sn,
            on: c.on,
            limit: c.limit,
            bounds_mode: c.bounds_mode,
            out: PathBuf::from("results"),
            fe_step: 8,
            time_points: 100,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json(j) => Error::Parse {
                path: path.display().to_string(),
                reason: j.to_string(),
            },
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiment config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("at least one repetition is needed".into()));
        }
        if self.functions.is_empty() || self.configs.is_empty() {
            return Err(Error::Config("no function or no configuration selected".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for spec in &self.configs {
            if !is_label(&spec.label) {
                return Err(Error::Config(format!(
                    "config label `{}` may only use letters, digits, `-` and `_`",
                    spec.label
                )));
            }
            if !seen.insert(spec.label.as_str()) {
                return Err(Error::Config(format!("duplicate config label `{}`", spec.label)));
            }
            self.resolve(spec)?;
        }
        Ok(())
    }

    pub fn resolve(&self, spec: &ConfigSpec) -> Result<Resolved> {
        let base = preset(&spec.label);
        let tech = match (&spec.tech, base) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => (p.tech)(),
            (None, None) => return Err(Error::UnknownConfig(spec.label.clone())),
        };
        let plan = match (&spec.plan, base) {
            (Some(p), _) => p.clone(),
            (None, Some(p)) => ParallelPlan::with_mode(p.mode),
            (None, None) => ParallelPlan::serial(),
        };
        let colony = ColonyConfig {
            sn: self.sn,
            on: self.on,
            limit: self.limit,
            budget: spec.budget.unwrap_or(self.budget),
            seed: self.seed,
            bounds_mode: self.bounds_mode,
            tech,
        };
        colony.validate()?;
        plan.validate(&colony)?;
        Ok(Resolved {
            label: spec.label.clone(),
            colony,
            plan,
        })
    }

    /// Runs every function × configuration and writes traces and summaries.
    /// `log` receives one progress line per finished ensemble.
    pub fn run(&self, log: impl Fn(&str) + Sync) -> Result<()> {
        self.validate()?;
        let resolved = self
            .configs
            .iter()
            .map(|s| self.resolve(s))
            .collect::<Result<Vec<_>>>()?;
        for &id in &self.functions {
            for r in &resolved {
                let dir = self.out.join(id.as_str()).join(&r.label);
                fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                let runs = (0..self.reps as u64)
                    .into_par_iter()
                    .map(|rep| {
                        let trace = r.run(id, self.seed.wrapping_add(rep))?.combined;
                        write_atomic(&dir.join(format!("run_{rep}.csv")), &trace_csv(&trace))?;
                        Ok(trace)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let ens = Ensemble::new(id.as_str(), r.label.clone(), runs);
                write_atomic(&dir.join("summary.csv"), &summary_csv(&ens, self.fe_step)?)?;
                let final_median = metrics::median_best(&ens, Axis::Evals, f64::MAX)?;
                log(&format!(
                    "{id} {}: {} runs, median final best {}",
                    r.label,
                    self.reps,
                    fmt_f(final_median)
                ));
            }
        }
        Ok(())
    }
}

fn is_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Formats with 17 significant digits.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trace_csv(t: &TimedTrace) -> String {
    let mut s = String::with_capacity(t.len() * 40 + 20);
    s.push_str("eval,time,best_f\n");
    for p in t.points() {
        s.push_str(&format!("{},{},{}\n", p.evals, p.time, fmt_f(p.best_f)));
    }
    s
}

pub fn parse_trace_csv(text: &str, path: &Path) -> Result<TimedTrace> {
    let bad = |line: usize, what: &str| Error::Parse {
        path: path.display().to_string(),
        reason: format!("line {line}: {what}"),
    };
    let mut t = TimedTrace::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let mut next = || cols.next().ok_or_else(|| bad(n + 1, "expected 3 columns"));
        let evals = next()?.parse().map_err(|_| bad(n + 1, "bad eval"))?;
        let time = next()?.parse().map_err(|_| bad(n + 1, "bad time"))?;
        let f = next()?.parse().map_err(|_| bad(n + 1, "bad best_f"))?;
        t.push(evals, time, f);
    }
    Ok(t)
}

fn summary_csv(ens: &Ensemble, step: u64) -> Result<String> {
    let max_evals = ens.runs.iter().map(TimedTrace::total_evals).max().unwrap_or(0);
    let mut s = String::from("eval,median,mean,std,min,max\n");
    for at in metrics::evals_grid(max_evals, step) {
        let v = ens.values_at(Axis::Evals, at)?;
        let (mean, std) = metrics::mean_std(&v)?;
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        s.push_str(&format!(
            "{at},{},{},{},{},{}\n",
            fmt_f(metrics::median(&v)?),
            fmt_f(mean),
            fmt_f(std),
            fmt_f(min),
            fmt_f(max)
        ));
    }
    Ok(s)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Reads every `run_<r>.csv` of one function and configuration, in
/// repetition order.
pub fn load_ensemble(results: &Path, id: FunctionId, label: &str) -> Result<Ensemble> {
    let dir = results.join(id.as_str()).join(label);
    let mut files = Vec::new();
    let entries = fs::read_dir(&dir).map_err(|_| Error::MissingResults(format!("{} / {label}", id.as_str())))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(&dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(r) = name
            .strip_prefix("run_")
            .and_then(|n| n.strip_suffix(".csv"))
            .and_then(|n| n.parse::<u64>().ok())
        {
            files.push((r, entry.path()));
        }
    }
    if files.is_empty() {
        return Err(Error::MissingResults(format!("{} / {label}", id.as_str())));
    }
    files.sort();
    let runs = files
        .into_iter()
        .map(|(_, p)| {
            let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            parse_trace_csv(&text, &p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble::new(id.as_str(), label, runs))
}

/// Labels with results for every suite function.
pub fn result_labels(results: &Path) -> Result<Vec<String>> {
    let first = results.join(FunctionId::ALL[0].as_str());
    let mut labels: Vec<String> = fs::read_dir(&first)
        .map_err(|_| Error::MissingResults(format!("no results under {}", results.display())))?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|l| {
            FunctionId::ALL
                .iter()
                .all(|id| results.join(id.as_str()).join(l).is_dir())
        })
        .collect();
    labels.sort();
    Ok(labels)
}

/// Metric tables of one configuration against the reference.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonTables {
    pub config: String,
    pub fe: Vec<MetricRow>,
    pub time: Vec<MetricRow>,
    pub mlg: Vec<MlgRow>,
}

/// Compares every other configuration in `results` against `reference`.
/// The time axis is normalized by the reference's run duration.
pub fn compare(results: &Path, reference: &str, fe_step: u64, time_points: usize) -> Result<Vec<ComparisonTables>> {
    let labels = result_labels(results)?;
    if !labels.iter().any(|l| l == reference) {
        return Err(Error::MissingResults(format!("reference `{reference}` not found")));
    }
    let load = |label: &str| -> Result<BTreeMap<FunctionId, Ensemble>> {
        FunctionId::ALL
            .iter()
            .map(|&id| Ok((id, load_ensemble(results, id, label)?)))
            .collect()
    };
    let reference_ens = load(reference)?;
    let reference_time = reference_ens
        .values()
        .flat_map(|e| e.runs.iter().map(TimedTrace::total_time))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let time_grid = metrics::unit_time_grid(time_points);
    labels
        .iter()
        .filter(|l| l.as_str() != reference)
        .map(|label| {
            let conf = load(label)?;
            let max_evals = conf
                .values()
                .chain(reference_ens.values())
                .flat_map(|e| e.runs.iter().map(TimedTrace::total_evals))
                .max()
                .unwrap_or(0);
            let cmp = Comparison {
                conf: &conf,
                reference: &reference_ens,
                reference_time,
            };
            let (fe, mut mlg) = cmp.rows(Axis::Evals, &metrics::evals_grid(max_evals, fe_step))?;
            let (time, mlg_t) = cmp.rows(Axis::Time, &time_grid)?;
            mlg.extend(mlg_t);
            Ok(ComparisonTables {
                config: label.clone(),
                fe,
                time,
                mlg,
            })
        })
        .collect()
}

pub fn metric_csv(rows: &[MetricRow]) -> String {
    let mut s = String::from("function,config,axis_type,axis_value,median,mean,std,G,mlg_contribution\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.function,
            r.config,
            r.axis_type,
            fmt_f(r.axis_value),
            fmt_f(r.median),
            fmt_f(r.mean),
            fmt_f(r.std),
            fmt_f(r.gain),
            fmt_f(r.mlg_contribution)
        ));
    }
    s
}

pub fn mlg_csv(rows: &[MlgRow]) -> String {
    let mut s = String::from("config,reference,axis_type,axis_value,mlg\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.config,
            r.reference,
            r.axis_type,
            fmt_f(r.axis_value),
            fmt_f(r.mlg)
        ));
    }
    s
}

/// Writes the comparison tables under `<results>/compare/`. Returns the
/// directories written.
pub fn write_comparisons(results: &Path, reference: &str, tables: &[ComparisonTables]) -> Result<Vec<PathBuf>> {
    tables
        .iter()
        .map(|t| {
            let dir = results.join("compare").join(format!("{}_vs_{reference}", t.config));
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            write_atomic(&dir.join("gain_fe.csv"), &metric_csv(&t.fe))?;
            write_atomic(&dir.join("gain_time.csv"), &metric_csv(&t.time))?;
            write_atomic(&dir.join("mlg.csv"), &mlg_csv(&t.mlg))?;
            Ok(dir)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        let cfg = ExperimentConfig::default();
        for p in PRESETS {
            let r = cfg.resolve(&ConfigSpec::named(p.label)).unwrap();
            assert_eq!(r.plan.mode, p.mode);
        }
        assert_eq!(
            cfg.resolve(&ConfigSpec::named("abc")).unwrap().colony.tech,
            TechnologySet::abc()
        );
        assert_eq!(
            cfg.resolve(&ConfigSpec::named("asbec")).unwrap().colony.tech,
            TechnologySet::asbec()
        );
        assert!(matches!(
            cfg.resolve(&ConfigSpec::named("nope")),
            Err(Error::UnknownConfig(l)) if l == "nope"
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "functions": ["sphere", "levy"],
            "configs": [
                {"label": "abc"},
                {"label": "mine", "tech": {"check": 2, "biased": true}, "budget": 800},
                {"label": "swarm", "tech": {"opposition": true}, "plan": {"mode": "multi-swarm", "exchange_every": 5}}
            ],
            "reps": 3
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.reps, 3);
        assert_eq!(cfg.budget, 1600);
        let mine = cfg.resolve(&cfg.configs[1]).unwrap();
        assert_eq!(mine.colony.budget, 800);
        assert_eq!(mine.colony.tech.check, 2);
        let json = cfg.to_json();
        let again = ExperimentConfig::from_json(&json).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_json(), json);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"functions": ["nope"]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"reps": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"colour": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"configs": [{"label": "abc"}, {"label": "abc"}]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"configs": [{"label": "a/b", "tech": {}}]}"#).is_err());
        assert!(
            ExperimentConfig::from_json(r#"{"configs": [{"label": "x", "tech": {"interpolation": true}}]}"#).is_err()
        );
    }

    #[test]
    fn trace_csv_round_trip() {
        let r = Resolved::preset("asbec", 200).unwrap();
        let t = r.run(FunctionId::Ackley, 3).unwrap().combined;
        let text = trace_csv(&t);
        let back = parse_trace_csv(&text, Path::new("x")).unwrap();
        assert_eq!(back, t);
        assert!(parse_trace_csv("eval,time,best_f\n1,1\n", Path::new("x")).is_err());
    }

    #[test]
    fn paired_seeds_share_initial_sources() {
        let obj = BenchmarkSpec::new(FunctionId::Rastrigin);
        let cfg = ExperimentConfig::default();
        let a = cfg.resolve(&ConfigSpec::named("abc")).unwrap();
        let b = cfg.resolve(&ConfigSpec::named("asbec")).unwrap();
        let ca = crate::Colony::new(ColonyConfig { seed: 9, ..a.colony }, &obj).unwrap();
        let cb = crate::Colony::new(ColonyConfig { seed: 9, ..b.colony }, &obj).unwrap();
        assert_eq!(ca.sources(), cb.sources());
    }
}
