//! Super-bee stage machine: random move, then its opposite, then the vertex
//! of the parabola through the three samples. Any improvement restarts the
//! sequence.

use super::movement::{opposite_point, parabola_vertex, Vertex};
use super::TechnologySet;
use crate::objective::Bounds;

/// A vertex further than this many local steps from the base is discarded.
pub const VERTEX_STEP_RATIO: f64 = 10.0;

/// A failed random move around a food source.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveRecord {
    pub base: Vec<f64>,
    pub f_base: f64,
    pub moved: Vec<f64>,
    pub f_moved: f64,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub enum SuperBeeState {
    #[default]
    Fresh,
    AfterRandomFail(MoveRecord),
    AfterOppositeFail {
        record: MoveRecord,
        opposite: Vec<f64>,
        f_opposite: f64,
    },
}

/// What a bee tried, carried from proposal to commit.
#[derive(Clone, Debug, PartialEq)]
pub enum Emitted {
    Random {
        base: Vec<f64>,
        f_base: f64,
        dims: Vec<usize>,
    },
    Opposite(MoveRecord),
    Interpolation,
}

impl SuperBeeState {
    pub fn is_fresh(&self) -> bool {
        matches!(self, SuperBeeState::Fresh)
    }

    /// Candidate dictated by the current stage, or `None` when the bee must
    /// make a fresh random move.
    ///
    /// Staged candidates are built from the recorded samples only; changes to
    /// the food source made by other bees in between are not looked at.
    pub fn staged_candidate(&self, clamp: Option<&Bounds>) -> Option<(Vec<f64>, Emitted)> {
        match self {
            SuperBeeState::Fresh => None,
            SuperBeeState::AfterRandomFail(rec) => {
                let opp = opposite_point(&rec.base, &rec.moved, &rec.dims, clamp);
                Some((opp, Emitted::Opposite(rec.clone())))
            }
            SuperBeeState::AfterOppositeFail {
                record,
                opposite,
                f_opposite,
            } => interpolation_point(record, opposite, *f_opposite, clamp).map(|x| (x, Emitted::Interpolation)),
        }
    }

    /// Stage after evaluating the candidate produced by `emitted`.
    pub fn after_evaluation(
        emitted: Emitted,
        candidate: &[f64],
        f: f64,
        improved: bool,
        tech: &TechnologySet,
    ) -> SuperBeeState {
        if improved {
            return SuperBeeState::Fresh;
        }
        match emitted {
            Emitted::Random { base, f_base, dims } if tech.opposition => SuperBeeState::AfterRandomFail(MoveRecord {
                base,
                f_base,
                moved: candidate.to_vec(),
                f_moved: f,
                dims,
            }),
            Emitted::Opposite(record) if tech.interpolation => SuperBeeState::AfterOppositeFail {
                record,
                opposite: candidate.to_vec(),
                f_opposite: f,
            },
            _ => SuperBeeState::Fresh,
        }
    }
}

/// Per-dimension parabola vertex through base, moved and opposite samples.
/// Dimensions without a usable vertex keep the base coordinate; `None` if no
/// dimension has one.
fn interpolation_point(
    rec: &MoveRecord,
    opposite: &[f64],
    f_opposite: f64,
    clamp: Option<&Bounds>,
) -> Option<Vec<f64>> {
    let mut out = rec.base.clone();
    let mut any = false;
    for &i in &rec.dims {
        let xs = [rec.base[i], rec.moved[i], opposite[i]];
        let fs = [rec.f_base, rec.f_moved, f_opposite];
        let step = (rec.moved[i] - rec.base[i]).abs();
        if let Ok(Vertex::Minimum(v)) = parabola_vertex(xs, fs) {
            if v.is_finite() && (v - rec.base[i]).abs() <= VERTEX_STEP_RATIO * step {
                out[i] = match clamp {
                    Some(b) => b.clamp(i, v),
                    None => v,
                };
                any = true;
            }
        }
    }
    any.then_some(out)
}
