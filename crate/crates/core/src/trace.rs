//! Best-so-far traces indexed by evaluation count and by adimensional time.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Evaluations consumed so far (summed over colonies for merged traces).
    pub evals: u64,
    /// Elapsed time in units of one objective evaluation.
    pub time: u64,
    pub best_f: f64,
}

/// Monotone best-so-far record, one point per evaluation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimedTrace {
    points: Vec<TracePoint>,
}

impl TimedTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            points: Vec::with_capacity(n),
        }
    }

    /// Builds a trace from raw points, enforcing the monotone best-so-far.
    pub fn from_points(points: impl IntoIterator<Item = TracePoint>) -> Self {
        let mut t = Self::new();
        for p in points {
            t.push(p.evals, p.time, p.best_f);
        }
        t
    }

    /// Appends an evaluation outcome; `f` is folded into the running minimum.
    pub fn push(&mut self, evals: u64, time: u64, f: f64) {
        let best_f = match self.points.last() {
            Some(last) if !(f < last.best_f) => last.best_f,
            _ => f,
        };
        self.points.push(TracePoint { evals, time, best_f });
    }

    pub fn points(&self) -> &[TracePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&TracePoint> {
        self.points.last()
    }

    pub fn final_best(&self) -> Option<f64> {
        self.points.last().map(|p| p.best_f)
    }

    pub fn total_evals(&self) -> u64 {
        self.points.last().map_or(0, |p| p.evals)
    }

    pub fn total_time(&self) -> u64 {
        self.points.last().map_or(0, |p| p.time)
    }

    /// Best value after `evals` evaluations, carrying the last value forward.
    /// Before the first point the first value is returned.
    pub fn best_at_evals(&self, evals: u64) -> Option<f64> {
        let idx = self.points.partition_point(|p| p.evals <= evals);
        self.points.get(idx.saturating_sub(1)).map(|p| p.best_f)
    }

    /// Best value at elapsed `time`, carrying the last value forward.
    /// Before the first point the first value is returned.
    pub fn best_at_time(&self, time: f64) -> Option<f64> {
        let idx = self.points.partition_point(|p| (p.time as f64) <= time);
        self.points.get(idx.saturating_sub(1)).map(|p| p.best_f)
    }

    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].best_f <= w[0].best_f && w[1].time >= w[0].time && w[1].evals >= w[0].evals)
    }
}

/// Merges traces that run side by side on a common clock.
///
/// The merged grid is the union of time stamps. At each stamp the merged
/// best is the minimum over traces that have started, and the evaluation
/// count is the sum of every trace's count, both by last value carried
/// forward.
pub fn pointwise_min_merge(traces: &[TimedTrace]) -> TimedTrace {
    let mut times: Vec<u64> = traces.iter().flat_map(|t| t.points.iter().map(|p| p.time)).collect();
    times.sort_unstable();
    times.dedup();

    let mut cursors = vec![0usize; traces.len()];
    let mut out = TimedTrace::with_capacity(times.len());
    for time in times {
        let mut evals = 0;
        let mut best = f64::INFINITY;
        for (t, cur) in traces.iter().zip(cursors.iter_mut()) {
            while *cur < t.points.len() && t.points[*cur].time <= time {
                *cur += 1;
            }
            if *cur > 0 {
                let p = &t.points[*cur - 1];
                evals += p.evals;
                best = best.min(p.best_f);
            }
        }
        out.push(evals, time, best);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn serial(values: &[f64]) -> TimedTrace {
        let mut t = TimedTrace::new();
        for (k, &v) in values.iter().enumerate() {
            t.push(k as u64 + 1, k as u64 + 1, v);
        }
        t
    }

    fn bests(t: &TimedTrace) -> Vec<f64> {
        t.points().iter().map(|p| p.best_f).collect()
    }

    #[test]
    fn push_keeps_running_minimum() {
        let t = serial(&[3.0, 5.0, 1.0, 2.0]);
        assert_eq!(bests(&t), vec![3.0, 3.0, 1.0, 1.0]);
        assert!(t.is_monotone());
    }

    #[test]
    fn lookups_carry_forward() {
        let t = serial(&[3.0, 2.0, 1.0]);
        assert_eq!(t.best_at_evals(0), Some(3.0));
        assert_eq!(t.best_at_evals(2), Some(2.0));
        assert_eq!(t.best_at_evals(99), Some(1.0));
        assert_eq!(t.best_at_time(2.5), Some(2.0));
        assert_eq!(TimedTrace::new().best_at_evals(1), None);
    }

    #[test]
    fn merge_examples() {
        let a = serial(&[3.0, 2.0, 2.0]);
        let b = serial(&[4.0, 1.0, 1.0]);
        let m = pointwise_min_merge(&[a.clone(), b]);
        assert_eq!(bests(&m), vec![3.0, 1.0, 1.0]);
        assert_eq!(m.points()[2].evals, 6);
        assert_eq!(m.points()[2].time, 3);

        let single = pointwise_min_merge(std::slice::from_ref(&a));
        assert_eq!(single, a);
    }

    #[test]
    fn merge_misaligned_grids() {
        let a = TimedTrace::from_points([
            TracePoint {
                evals: 8,
                time: 1,
                best_f: 5.0,
            },
            TracePoint {
                evals: 16,
                time: 2,
                best_f: 4.0,
            },
            TracePoint {
                evals: 24,
                time: 3,
                best_f: 1.0,
            },
        ]);
        let b = TimedTrace::from_points([TracePoint {
            evals: 3,
            time: 2,
            best_f: 2.0,
        }]);
        let m = pointwise_min_merge(&[a, b]);
        assert_eq!(bests(&m), vec![5.0, 2.0, 1.0]);
        let evals: Vec<u64> = m.points().iter().map(|p| p.evals).collect();
        assert_eq!(evals, vec![8, 19, 27]);
    }

    proptest! {
        #[test]
        fn merge_is_idempotent(
            a in proptest::collection::vec(0.0f64..100.0, 1..30),
            b in proptest::collection::vec(0.0f64..100.0, 1..30),
        ) {
            let ta = serial(&a);
            let tb = serial(&b);
            let m = pointwise_min_merge(&[ta.clone(), tb.clone()]);
            let again = pointwise_min_merge(&[m.clone(), ta.clone(), tb.clone()]);
            prop_assert_eq!(bests(&again), bests(&m));
            for (k, p) in m.points().iter().enumerate() {
                let ia = ta.best_at_time(p.time as f64).unwrap();
                prop_assert!(p.best_f <= ia);
                if k < tb.len() {
                    prop_assert!(p.best_f <= tb.points()[k].best_f);
                }
            }
        }
    }
}
