use std::collections::VecDeque;

/// The optimal path: last `n` improvements of the global best, oldest first.
#[derive(Clone, Debug, PartialEq)]
pub struct ProphetHistory {
    entries: VecDeque<(Vec<f64>, f64)>,
    capacity: usize,
}

impl ProphetHistory {
    pub fn new(capacity: usize) -> Self {
        Self {
            entries: VecDeque::with_capacity(capacity),
            capacity: capacity.max(1),
        }
    }

    /// Appends an improvement, dropping the oldest entry past capacity.
    /// Entries that do not improve on the newest one are ignored.
    pub fn push(&mut self, x: Vec<f64>, f: f64) {
        if let Some((_, last)) = self.entries.back() {
            if !(f < *last) {
                return;
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((x, f));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn newest(&self) -> Option<&(Vec<f64>, f64)> {
        self.entries.back()
    }

    pub fn entries(&self) -> impl Iterator<Item = &(Vec<f64>, f64)> {
        self.entries.iter()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }
}

/// Recency weight of the step ending at 1-based entry `t` (`t >= 2`).
#[inline]
fn recency_weight(t: usize) -> f64 {
    let k = (t - 1) as f64;
    k * k
}

/// Extrapolates the optimal path: `x_n + C * sum_t w(t) (x_t - x_{t-1})`.
///
/// `w(t)` is the recency weight times the objective decrease of step `t`,
/// normalized to sum to one. Returns `None` with fewer than two entries.
pub fn prophet_guess(history: &ProphetHistory, catalyst: f64) -> Option<Vec<f64>> {
    if history.len() < 2 {
        return None;
    }
    let e: Vec<&(Vec<f64>, f64)> = history.entries().collect();
    let raw: Vec<f64> = (1..e.len())
        .map(|s| recency_weight(s + 1) * (e[s].1 - e[s - 1].1))
        .collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = if total != 0.0 && total.is_finite() {
        raw.iter().map(|r| r / total).collect()
    } else {
        vec![1.0 / raw.len() as f64; raw.len()]
    };
    let newest = &e[e.len() - 1].0;
    let guess = (0..newest.len())
        .map(|i| {
            let drift: f64 = (1..e.len()).map(|s| weights[s - 1] * (e[s].0[i] - e[s - 1].0[i])).sum();
            newest[i] + catalyst * drift
        })
        .collect();
    Some(guess)
}
