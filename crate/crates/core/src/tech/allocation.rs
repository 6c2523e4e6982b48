use serde::{Deserialize, Serialize};

/// Min-max rescale of fitness values to `[0, 1]`.
///
/// When every value is equal the formula is `0/0`; all ones is returned so the
/// biased allocation splits the onlookers evenly.
pub fn rescale_fitness(fits: &[f64]) -> Vec<f64> {
    let min = fits.iter().copied().fold(f64::INFINITY, f64::min);
    let max = fits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if !(span > 0.0) {
        return vec![1.0; fits.len()];
    }
    fits.iter().map(|f| (f - min) / span).collect()
}

/// Number of onlookers sent to each food source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnlookerAllocation {
    pub counts: Vec<usize>,
}

impl OnlookerAllocation {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Onlooker-to-source assignment: source indices in ascending order,
    /// each repeated by its count, so bees sharing a source are adjacent.
    pub fn assignment(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(j, &n)| std::iter::repeat_n(j, n))
            .collect()
    }
}

/// Deterministic allocation proportional to rescaled fitness.
///
/// Each source receives `floor(on * r_j / sum r)`; the residue goes to the
/// best source (lowest index on ties).
pub fn biased_allocation(rescaled: &[f64], on: usize) -> OnlookerAllocation {
    let total: f64 = rescaled.iter().sum();
    let mut counts: Vec<usize> = rescaled
        .iter()
        .map(|r| ((on as f64) * r / total).floor() as usize)
        .collect();
    let assigned: usize = counts.iter().sum();
    // floor() never overshoots, but guard against rounding in the division
    if assigned <= on {
        let best = argmax_first(rescaled);
        counts[best] += on - assigned;
    } else {
        let mut excess = assigned - on;
        for c in counts.iter_mut().rev() {
            let take = excess.min(*c);
            *c -= take;
            excess -= take;
        }
    }
    OnlookerAllocation { counts }
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = j;
        }
    }
    best
}
