//! Minimum-norm point of a convex hull (Wolfe's algorithm).
//!
//! Given points `x_1, …, x_n` in `R^m`, finds simplex weights `w` minimizing
//! `‖Σ w_k x_k‖`. Distance to a hull is the special case where every point has
//! the target subtracted.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{dot, RealSvd};

/// Stop once `‖x‖² − min_k ⟨x, x_k⟩ ≤ GAP_REL · ‖x‖ · scale`; the distance is
/// then within `GAP_REL · scale` of the optimum.
const GAP_REL: f64 = 1e-12;
const ZERO_NORM: f64 = 1e-15;
const AFFINE_RANK_REL: f64 = 1e-13;
const SPAN_RANK_REL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct MinNormPoint {
    /// One weight per input point; nonnegative and summing to 1.
    pub weights: Vec<f64>,
    pub distance: f64,
    pub iterations: usize,
}

pub fn min_norm_point(points: &[Vec<f64>], max_iterations: usize) -> Result<MinNormPoint> {
    let n = points.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let reduced;
    let points = if points[0].len() > n {
        reduced = reduce_to_span(points);
        &reduced
    } else {
        points
    };
    let norms2: Vec<f64> = points.iter().map(|x| dot(x, x)).collect();
    let scale = Float::sqrt(norms2.iter().copied().fold(1.0, f64::max));

    let start = argmin(&norms2);
    let mut corral = vec![start];
    let mut weights = vec![1.0];
    let mut x = points[start].clone();

    for iteration in 0..max_iterations {
        let norm2 = dot(&x, &x);
        let norm = Float::sqrt(norm2);
        if norm <= ZERO_NORM * scale {
            return Ok(finish(points, &corral, &weights, iteration));
        }
        let inner: Vec<f64> = points.iter().map(|p| dot(&x, p)).collect();
        let j = argmin(&inner);
        if norm2 - inner[j] <= GAP_REL * norm * scale || corral.contains(&j) {
            return Ok(finish(points, &corral, &weights, iteration));
        }
        corral.push(j);
        weights.push(0.0);

        loop {
            let alpha = affine_minimizer(points, &corral);
            if alpha.iter().all(|&a| a > 0.0) {
                weights = alpha;
                break;
            }
            let mut theta = 1.0;
            let mut blocking = 0;
            for (k, (&w, &a)) in weights.iter().zip(&alpha).enumerate() {
                if a <= 0.0 {
                    let t = if w - a > 0.0 { w / (w - a) } else { 0.0 };
                    if t < theta {
                        theta = t;
                        blocking = k;
                    }
                }
            }
            for (w, a) in weights.iter_mut().zip(&alpha) {
                *w += theta * (a - *w);
            }
            weights[blocking] = 0.0;
            let mut k = 0;
            while k < corral.len() {
                if weights[k] <= 0.0 {
                    corral.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
        }

        let next = combine(points, &corral, &weights);
        if dot(&next, &next) >= norm2 {
            // No descent at working precision.
            return Ok(finish(points, &corral, &weights, iteration + 1));
        }
        x = next;
    }
    Err(Error::SolverDidNotConverge {
        iterations: max_iterations,
    })
}

/// Coordinates of the points in an orthonormal basis of their span; inner
/// products are unchanged and the subproblems shrink to at most `n` rows.
fn reduce_to_span(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let basis = RealSvd::new(points.to_vec(), false).range_basis(SPAN_RANK_REL);
    points
        .iter()
        .map(|x| basis.iter().map(|u| dot(u, x)).collect())
        .collect()
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = k;
        }
    }
    best
}

fn combine(points: &[Vec<f64>], corral: &[usize], weights: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; points[corral[0]].len()];
    for (&k, &w) in corral.iter().zip(weights) {
        for (xi, pi) in x.iter_mut().zip(&points[k]) {
            *xi += w * pi;
        }
    }
    x
}

/// Weights summing to 1 that minimize `‖Σ α_k x_k‖` over the affine hull of
/// the corral, via least squares on the differences `x_k − x_0`.
fn affine_minimizer(points: &[Vec<f64>], corral: &[usize]) -> Vec<f64> {
    let base = &points[corral[0]];
    if corral.len() == 1 {
        return vec![1.0];
    }
    let columns = corral[1..]
        .iter()
        .map(|&k| points[k].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let rhs: Vec<f64> = base.iter().map(|b| -b).collect();
    let beta = RealSvd::new(columns, true).solve_least_squares(&rhs, AFFINE_RANK_REL);
    let mut alpha = Vec::with_capacity(corral.len());
    alpha.push(1.0 - beta.iter().sum::<f64>());
    alpha.extend(beta);
    alpha
}

fn finish(
    points: &[Vec<f64>],
    corral: &[usize],
    weights: &[f64],
    iterations: usize,
) -> MinNormPoint {
    let mut full = vec![0.0; points.len()];
    for (&k, &w) in corral.iter().zip(weights) {
        full[k] = w;
    }
    let point = combine(points, corral, weights);
    let distance = Float::sqrt(dot(&point, &point));
    MinNormPoint {
        weights: full,
        distance,
        iterations,
    }
}
