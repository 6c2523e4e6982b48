use crate::objective::Bounds;
use crate::rng::RandomStream;

/// Per-dimension extent `max - min` of the food sources.
pub fn diameters(sources: &[&[f64]], m: usize) -> Vec<f64> {
    (0..m)
        .map(|i| {
            let (lo, hi) = sources.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x[i]), hi.max(x[i]))
            });
            hi - lo
        })
        .collect()
}

/// Scout position inside the hull of the food sources, enlarged per dimension
/// by up to a quarter of `|range - diam|` either side.
///
/// Draw order: one `unit()` weight per source, then one `symmetric()` per
/// dimension. `clamp` confines the result to `bounds`.
pub fn smart_scout_position(sources: &[&[f64]], bounds: &Bounds, clamp: bool, rng: &mut RandomStream) -> Vec<f64> {
    let m = bounds.dim();
    let raw: Vec<f64> = sources.iter().map(|_| rng.unit()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = if total > 0.0 {
        raw.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / sources.len() as f64; sources.len()]
    };
    let diam = diameters(sources, m);
    (0..m)
        .map(|i| {
            let centre: f64 = sources.iter().zip(&weights).map(|(x, w)| w * x[i]).sum();
            let v = centre + rng.symmetric() / 4.0 * (bounds.range(i) - diam[i]).abs();
            if clamp {
                bounds.clamp(i, v)
            } else {
                v
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_source_at_origin() {
        let b = Bounds::uniform(3, -50.0, 50.0).unwrap();
        let origin = [0.0; 3];
        let mut rng = RandomStream::new(4);
        for _ in 0..1000 {
            let x = smart_scout_position(&[&origin], &b, false, &mut rng);
            assert!(x.iter().all(|v| v.abs() <= 25.0));
        }
    }

    #[test]
    fn half_width_reaches_quarter_range() {
        // with diam = 0 the sampled interval spans [-25, 25]; its observed
        // extent over many draws must approach the full half-range
        let b = Bounds::uniform(1, 0.0, 100.0).unwrap();
        let c = [50.0];
        let mut rng = RandomStream::new(8);
        let xs: Vec<f64> = (0..20_000)
            .map(|_| smart_scout_position(&[&c], &b, false, &mut rng)[0])
            .collect();
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo < 25.1 && hi > 74.9, "{lo} {hi}");
        assert!(lo >= 25.0 && hi <= 75.0);
    }

    #[test]
    fn convex_combination_when_diam_equals_range() {
        let b = Bounds::uniform(1, 0.0, 3.0).unwrap();
        let a = [0.0];
        let z = [3.0];
        let mut rng = RandomStream::new(1);
        let mut replay = rng.clone();
        let x = smart_scout_position(&[&a, &z], &b, false, &mut rng);
        let (w0, w1) = (replay.unit(), replay.unit());
        let expected = (w0 * 0.0 + w1 * 3.0) / (w0 + w1);
        assert!((x[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn identical_sources_stay_near_that_source() {
        let b = Bounds::uniform(2, 0.0, 1.0).unwrap();
        let p = [0.25, 0.75];
        let mut rng = RandomStream::new(6);
        for _ in 0..200 {
            let x = smart_scout_position(&[&p, &p, &p], &b, true, &mut rng);
            assert!((x[0] - 0.25).abs() <= 0.25 + 1e-12);
            assert!((x[1] - 0.75).abs() <= 0.25 + 1e-12);
        }
    }

    #[test]
    fn exact_when_no_enlargement() {
        let b = Bounds::uniform(1, -1.0, 1.0).unwrap();
        let lo = [-1.0];
        let hi = [1.0];
        let mut rng = RandomStream::new(2);
        for _ in 0..100 {
            let x = smart_scout_position(&[&lo, &hi], &b, false, &mut rng);
            assert!((-1.0..=1.0).contains(&x[0]));
        }
    }

    #[test]
    fn diam_is_max_minus_min() {
        // sources {1, 4, 2}, range 3 -> enlargement 0, result in hull [1, 4]
        let b = Bounds::uniform(1, 0.0, 3.0).unwrap();
        let s = [[1.0], [4.0], [2.0]];
        let refs: Vec<&[f64]> = s.iter().map(|x| x.as_slice()).collect();
        assert_eq!(diameters(&refs, 1), vec![3.0]);
        let mut rng = RandomStream::new(9);
        for _ in 0..1000 {
            let x = smart_scout_position(&refs, &b, false, &mut rng);
            assert!((1.0..=4.0).contains(&x[0]), "{}", x[0]);
        }
    }
}
