use crate::error::{Error, Result};
use crate::objective::Bounds;
use crate::rng::RandomStream;

/// Curvature at or below which a fitted parabola is treated as having no
/// usable minimum.
pub const VERTEX_CURVATURE_EPS: f64 = 1e-12;

/// Dimensions moved by one bee.
///
/// Single-parameter mode draws one `index(m)`. Multi-parameter mode draws a
/// count `d = 1 + index(m)` and then `d` distinct indices by a partial
/// Fisher-Yates shuffle (`index(m - t)` for `t = 0..d`). The result is sorted.
pub fn select_dims(m: usize, multi: bool, rng: &mut RandomStream) -> Vec<usize> {
    if !multi {
        return vec![rng.index(m)];
    }
    let d = 1 + rng.index(m);
    let mut pool: Vec<usize> = (0..m).collect();
    for t in 0..d {
        let s = t + rng.index(m - t);
        pool.swap(t, s);
    }
    pool.truncate(d);
    pool.sort_unstable();
    pool
}

/// Reflects `moved` through `base` on `dims`; other coordinates copy `base`.
pub fn opposite_point(base: &[f64], moved: &[f64], dims: &[usize], clamp: Option<&Bounds>) -> Vec<f64> {
    let mut out = base.to_vec();
    for &i in dims {
        let v = 2.0 * base[i] - moved[i];
        out[i] = match clamp {
            Some(b) => b.clamp(i, v),
            None => v,
        };
    }
    out
}

/// Outcome of fitting a parabola through three samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Vertex {
    Minimum(f64),
    /// Concave or flat fit.
    NoVertex,
}

/// Fits `f = a x^2 + b x + c` through three points and returns `-b / 2a`.
///
/// The Vandermonde system is solved through divided differences.
pub fn parabola_vertex(xs: [f64; 3], fs: [f64; 3]) -> Result<Vertex> {
    let [x0, x1, x2] = xs;
    let [f0, f1, f2] = fs;
    if x0 == x1 || x1 == x2 || x0 == x2 {
        return Err(Error::SingularSystem);
    }
    let d01 = (f1 - f0) / (x1 - x0);
    let d02 = (f2 - f0) / (x2 - x0);
    let a = (d02 - d01) / (x2 - x1);
    if !(a > VERTEX_CURVATURE_EPS) {
        return Ok(Vertex::NoVertex);
    }
    let b = d01 - a * (x0 + x1);
    Ok(Vertex::Minimum(-b / (2.0 * a)))
}
