//! Black-box objectives and the ten-function benchmark suite.
//!
//! Every benchmark is shifted so that its unique global minimum is `0`.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Objective values below this are treated as converged by the metrics.
pub const TOLERANCE: f64 = 1e-16;

/// Per-dimension minimum of `-x sin(sqrt|x|)` on `[-500, 500]`, negated.
pub const SCHWEFEL_SHIFT_PER_DIM: f64 = 418.982_887_272_433_7;
/// Per-dimension minimum of `(x^4 - 16x^2 + 5x) / 2`, negated.
pub const STYBLINSKI_TANG_SHIFT_PER_DIM: f64 = 39.166_165_703_771_41;
pub const SCHWEFEL_MINIMIZER: f64 = 420.968_746_359_982_03;
pub const STYBLINSKI_TANG_MINIMIZER: f64 = -2.903_534_027_771_177;
pub const PERM_BETA: f64 = 0.5;

/// Fitness of an objective value under minimization; strictly positive and
/// strictly decreasing in `f`.
#[inline]
pub fn fitness(f: f64) -> f64 {
    if f >= 0.0 {
        1.0 / (f + 1.0)
    } else {
        1.0 - f
    }
}

/// Axis-aligned search region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "bounds need matching non-empty vectors, got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(i) =
            (0..lower.len()).find(|&i| !(lower[i].is_finite() && upper[i].is_finite() && lower[i] < upper[i]))
        {
            return Err(Error::InvalidArgument(format!(
                "bounds on dimension {i} are not a finite non-empty interval: [{}, {}]",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    #[inline]
    pub fn range(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    #[inline]
    pub fn clamp(&self, i: usize, v: f64) -> f64 {
        v.clamp(self.lower[i], self.upper[i])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(i, &v)| v >= self.lower[i] && v <= self.upper[i])
    }

    /// Uniform sample, one `unit()` draw per dimension in index order.
    pub fn sample(&self, rng: &mut RandomStream) -> Vec<f64> {
        (0..self.dim())
            .map(|i| rng.uniform(self.lower[i], self.upper[i]))
            .collect()
    }
}

/// An in-process black-box objective to be minimized.
pub trait Objective: Sync {
    fn bounds(&self) -> &Bounds;

    /// Deterministic value at `x`. `x.len()` is checked by callers.
    fn value(&self, x: &[f64]) -> f64;

    /// Relative amplitude of multiplicative noise; `0` disables noise.
    fn noise_fraction(&self) -> f64 {
        0.0
    }

    fn dim(&self) -> usize {
        self.bounds().dim()
    }

    /// Value perturbed by a pre-drawn `u` in `[-1, 1]`.
    fn value_with_noise(&self, x: &[f64], u: f64) -> f64 {
        let v = self.value(x);
        let nf = self.noise_fraction();
        if nf > 0.0 {
            v * (1.0 + nf * u)
        } else {
            v
        }
    }

    /// Evaluates `x`, consuming one `symmetric()` draw only when noisy.
    fn evaluate(&self, x: &[f64], rng: &mut RandomStream) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "position has {} coordinates, objective expects {}",
                x.len(),
                self.dim()
            )));
        }
        let u = if self.noise_fraction() > 0.0 {
            rng.symmetric()
        } else {
            0.0
        };
        Ok(self.value_with_noise(x, u))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionId {
    Sphere,
    DixonPrice,
    Schwefel,
    StyblinskiTangNoise,
    Levy,
    Rastrigin,
    Perm,
    Rosenbrock,
    Ackley,
    Griewank,
}

impl FunctionId {
    pub const ALL: [FunctionId; 10] = [
        FunctionId::Sphere,
        FunctionId::DixonPrice,
        FunctionId::Schwefel,
        FunctionId::StyblinskiTangNoise,
        FunctionId::Levy,
        FunctionId::Rastrigin,
        FunctionId::Perm,
        FunctionId::Rosenbrock,
        FunctionId::Ackley,
        FunctionId::Griewank,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionId::Sphere => "sphere",
            FunctionId::DixonPrice => "dixon_price",
            FunctionId::Schwefel => "schwefel",
            FunctionId::StyblinskiTangNoise => "styblinski_tang_noise",
            FunctionId::Levy => "levy",
            FunctionId::Rastrigin => "rastrigin",
            FunctionId::Perm => "perm",
            FunctionId::Rosenbrock => "rosenbrock",
            FunctionId::Ackley => "ackley",
            FunctionId::Griewank => "griewank",
        }
    }

    /// Properties column: unimodal/multimodal and separable/non-separable.
    pub fn properties(self) -> &'static str {
        match self {
            FunctionId::Sphere => "U S",
            FunctionId::DixonPrice => "U N",
            FunctionId::Schwefel | FunctionId::StyblinskiTangNoise | FunctionId::Levy | FunctionId::Rastrigin => "M S",
            FunctionId::Perm | FunctionId::Rosenbrock | FunctionId::Ackley | FunctionId::Griewank => "M N",
        }
    }

    /// Dimensionality and per-dimension range of the suite entry.
    pub fn table_entry(self) -> (usize, f64, f64) {
        match self {
            FunctionId::Sphere => (50, -100.0, 100.0),
            FunctionId::DixonPrice => (20, -10.0, 10.0),
            FunctionId::Schwefel => (5, -500.0, 500.0),
            FunctionId::StyblinskiTangNoise => (5, -5.0, 5.0),
            FunctionId::Levy => (10, -100.0, 100.0),
            FunctionId::Rastrigin => (10, -10.0, 10.0),
            FunctionId::Perm => (5, -5.0, 5.0),
            FunctionId::Rosenbrock => (10, -5.0, 5.0),
            FunctionId::Ackley => (10, -20.0, 70.0),
            FunctionId::Griewank => (30, -600.0, 600.0),
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FunctionId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownFunction(s.to_string()))
    }
}

/// One analytic benchmark: function, dimensionality, bounds and shift.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub id: FunctionId,
    pub bounds: Bounds,
    pub shift_value: f64,
    pub noise_fraction: f64,
}

impl BenchmarkSpec {
    /// Suite entry for `id` with the tabulated dimensionality.
    pub fn new(id: FunctionId) -> Self {
        let (m, _, _) = id.table_entry();
        Self::with_dim(id, m).expect("table entries are valid")
    }

    /// Same function at another dimensionality (used for ablations).
    pub fn with_dim(id: FunctionId, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("dimensionality must be positive".into()));
        }
        let (_, lo, hi) = id.table_entry();
        let shift_value = match id {
            FunctionId::Schwefel => SCHWEFEL_SHIFT_PER_DIM * m as f64,
            FunctionId::StyblinskiTangNoise => STYBLINSKI_TANG_SHIFT_PER_DIM * m as f64,
            _ => 0.0,
        };
        let noise_fraction = if id == FunctionId::StyblinskiTangNoise {
            0.15
        } else {
            0.0
        };
        Ok(Self {
            id,
            bounds: Bounds::uniform(m, lo, hi)?,
            shift_value,
            noise_fraction,
        })
    }

    /// Copy with noise switched off.
    pub fn noiseless(&self) -> Self {
        Self {
            noise_fraction: 0.0,
            ..self.clone()
        }
    }

    pub fn m(&self) -> usize {
        self.bounds.dim()
    }

    /// The known global minimizer.
    pub fn minimizer(&self) -> Vec<f64> {
        let m = self.m();
        match self.id {
            FunctionId::Sphere | FunctionId::Rastrigin | FunctionId::Ackley | FunctionId::Griewank => vec![0.0; m],
            FunctionId::Rosenbrock | FunctionId::Levy => vec![1.0; m],
            FunctionId::Perm => (1..=m).map(|i| i as f64).collect(),
            FunctionId::Schwefel => vec![SCHWEFEL_MINIMIZER; m],
            FunctionId::StyblinskiTangNoise => vec![STYBLINSKI_TANG_MINIMIZER; m],
            FunctionId::DixonPrice => (1..=m as i32)
                .map(|i| {
                    let p = 2f64.powi(i);
                    2f64.powf(-(p - 2.0) / p)
                })
                .collect(),
        }
    }

    fn raw(&self, x: &[f64]) -> f64 {
        match self.id {
            FunctionId::Sphere => x.iter().map(|v| v * v).sum(),
            FunctionId::DixonPrice => {
                let head = (x[0] - 1.0).powi(2);
                head + x
                    .windows(2)
                    .enumerate()
                    .map(|(k, w)| (k + 2) as f64 * (2.0 * w[1] * w[1] - w[0]).powi(2))
                    .sum::<f64>()
            }
            FunctionId::Schwefel => -x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>(),
            FunctionId::StyblinskiTangNoise => 0.5 * x.iter().map(|v| v.powi(4) - 16.0 * v * v + 5.0 * v).sum::<f64>(),
            FunctionId::Levy => {
                let w: Vec<f64> = x.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
                let last = w[w.len() - 1];
                let mid: f64 = w[..w.len() - 1]
                    .iter()
                    .map(|wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2)))
                    .sum();
                (PI * w[0]).sin().powi(2) + mid + (last - 1.0).powi(2) * (1.0 + (2.0 * PI * last).sin().powi(2))
            }
            FunctionId::Rastrigin => {
                10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
            }
            FunctionId::Perm => {
                let m = x.len();
                (1..=m as i32)
                    .map(|k| {
                        let inner: f64 = x
                            .iter()
                            .enumerate()
                            .map(|(idx, &xj)| {
                                let j = (idx + 1) as f64;
                                (j.powi(k) + PERM_BETA) * ((xj / j).powi(k) - 1.0)
                            })
                            .sum();
                        inner * inner
                    })
                    .sum()
            }
            FunctionId::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
                .sum(),
            FunctionId::Ackley => {
                let n = x.len() as f64;
                let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
                let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            FunctionId::Griewank => {
                let s = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                1.0 + s - p
            }
        }
    }
}

impl Objective for BenchmarkSpec {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.raw(x) + self.shift_value
    }

    fn noise_fraction(&self) -> f64 {
        self.noise_fraction
    }
}

/// The ten benchmark functions in table order.
pub fn make_suite() -> Vec<BenchmarkSpec> {
    FunctionId::ALL.into_iter().map(BenchmarkSpec::new).collect()
}
