//! Sample points used by the falsification sweeps.
//!
//! Random points alone rarely land on the slices where mean-type mappings
//! misbehave, so every sweep also gets structured points: two-level patterns
//! such as `(a, a, b, b)`, near-constant vectors, and one-coordinate bumps.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

/// Relative size of the bump used for near-constant vectors.
pub const NEAR_CONSTANT_BUMP: f64 = 1e-6;

/// Largest dimension for which all two-level patterns are enumerated.
const EXHAUSTIVE_PATTERN_DIM: usize = 8;

pub fn uniform_points<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    (lo, hi): (f64, f64),
    count: usize,
) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.gen_range(lo..=hi)).collect())
        .collect()
}

/// Nonconstant vectors taking only the values `lo` and `hi`.
///
/// All `2^dim - 2` of them for small `dim`; otherwise the split-in-half
/// and alternating patterns in both polarities.
pub fn two_level_points(dim: usize, (lo, hi): (f64, f64)) -> Vec<Vec<f64>> {
    if dim < 2 {
        return Vec::new();
    }
    if dim <= EXHAUSTIVE_PATTERN_DIM {
        return (1..(1u32 << dim) - 1)
            .map(|bits| {
                (0..dim)
                    .map(|k| if bits >> k & 1 == 1 { lo } else { hi })
                    .collect()
            })
            .collect();
    }
    let half: Vec<f64> = (0..dim).map(|k| if k < dim / 2 { lo } else { hi }).collect();
    let alt: Vec<f64> = (0..dim).map(|k| if k % 2 == 0 { lo } else { hi }).collect();
    let flip = |v: &Vec<f64>| v.iter().map(|&t| if t == lo { hi } else { lo }).collect();
    let (half_f, alt_f) = (flip(&half), flip(&alt));
    vec![half, half_f, alt, alt_f]
}

/// `c * (1, ..., 1)` with a single coordinate moved by `+-bump * c`.
pub fn near_constant_points(dim: usize, (lo, hi): (f64, f64)) -> Vec<Vec<f64>> {
    let c = 0.5 * (lo + hi);
    let d = NEAR_CONSTANT_BUMP * c.abs().max(1.0);
    bumped(dim, c, d)
}

/// Constant vector at the box midpoint with one coordinate moved to either
/// end of the box.
pub fn one_off_points(dim: usize, (lo, hi): (f64, f64)) -> Vec<Vec<f64>> {
    let c = 0.5 * (lo + hi);
    bumped(dim, c, 0.5 * (hi - lo))
}

fn bumped(dim: usize, c: f64, d: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim);
    for k in 0..dim {
        for sign in [1.0, -1.0] {
            let mut x = vec![c; dim];
            x[k] += sign * d;
            out.push(x);
        }
    }
    out
}

/// Structured points followed by `random` uniform ones.
pub fn mixed_points<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    bounds: (f64, f64),
    random: usize,
) -> Vec<Vec<f64>> {
    let mut pts = two_level_points(dim, bounds);
    pts.extend(near_constant_points(dim, bounds));
    pts.extend(one_off_points(dim, bounds));
    pts.extend(uniform_points(rng, dim, bounds, random));
    pts
}
