//! Tensor-product periodic trapezoidal rule on `[0, 2π)^d`.
//!
//! The rule with `n` nodes per axis is literally the finite-torus average over
//! `T^d_n`, so refining it is the `N -> ∞` limit. Reductions run over fixed
//! flat-index chunks and combine chunk results in index order, which keeps
//! results bit-identical whether or not the `parallel` feature is on.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Hard cap on nodes per axis during refinement.
pub const NODE_CAP_PER_DIM: usize = 1 << 16;
/// Hard cap on the total node count of one tensor grid.
pub const TOTAL_NODE_CAP: usize = 1 << 22;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_dim: usize,
    pub tolerance: f64,
}

impl QuadratureSpec {
    pub fn new(nodes_per_dim: usize, tolerance: f64) -> Result<Self> {
        if nodes_per_dim < 2 {
            return Err(Error::Domain(format!(
                "nodes_per_dim must be >= 2, got {nodes_per_dim}"
            )));
        }
        if !(tolerance > 0.0) {
            return Err(Error::Domain(format!("tolerance must be > 0, got {tolerance}")));
        }
        Ok(QuadratureSpec {
            nodes_per_dim,
            tolerance,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_per_dim: 16,
            tolerance: 1e-12,
        }
    }
}

/// Number of nodes in a `d`-dimensional grid with `n` per axis, if within cap.
pub fn grid_size(d: usize, n: usize) -> Option<usize> {
    let mut total: usize = 1;
    for _ in 0..d {
        total = total.checked_mul(n)?;
    }
    (total <= TOTAL_NODE_CAP).then_some(total)
}

/// Angles of flat node `flat` (last axis fastest) into `out`.
#[inline]
pub(crate) fn node_angles(mut flat: usize, n: usize, out: &mut [f64]) {
    let h = 2.0 * PI / n as f64;
    for slot in out.iter_mut().rev() {
        *slot = h * (flat % n) as f64;
        flat /= n;
    }
}

/// Evaluates `f` at every node, in flat order.
pub(crate) fn grid_map<T, F>(d: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &[f64]) -> T + Sync,
{
    let total = n.pow(d as u32);
    let eval = |flat: usize| {
        let mut th = vec![0.0; d];
        node_angles(flat, n, &mut th);
        f(flat, &th)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..total).into_par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..total).map(eval).collect()
    }
}

/// Folds `f` over all nodes chunk by chunk and combines the chunk results in
/// index order.
pub(crate) fn grid_fold<A, I, F, C>(d: usize, n: usize, init: I, fold: F, combine: C) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(A, &[f64]) -> A + Sync,
    C: Fn(A, A) -> A,
{
    let total = n.pow(d as u32);
    let chunks = total.div_ceil(CHUNK);
    let run = |c: usize| {
        let mut acc = init();
        let mut th = vec![0.0; d];
        for flat in c * CHUNK..((c + 1) * CHUNK).min(total) {
            node_angles(flat, n, &mut th);
            acc = fold(acc, &th);
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<A> = {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<A> = (0..chunks).map(run).collect();
    parts.into_iter().fold(init(), combine)
}

/// Outcome of a doubling refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct Refined<T> {
    pub value: T,
    pub nodes: usize,
    pub delta: f64,
}

/// Doubles the per-axis node count until two successive rules agree to
/// `quad.tolerance`; returns the finer of the two.
pub(crate) fn refine<T, E, D>(
    d: usize,
    quad: &QuadratureSpec,
    min_nodes: usize,
    mut eval: E,
    dist: D,
) -> Result<Refined<T>>
where
    E: FnMut(usize) -> Result<T>,
    D: Fn(&T, &T) -> f64,
{
    let mut n = quad.nodes_per_dim.max(min_nodes).max(2);
    if grid_size(d, n).is_none() || n > NODE_CAP_PER_DIM {
        return Err(Error::accuracy(
            format!("initial grid {n}^{d} exceeds the node cap"),
            n,
            f64::INFINITY,
        ));
    }
    let mut prev = eval(n)?;
    let mut last_delta = f64::INFINITY;
    loop {
        let next = 2 * n;
        if next > NODE_CAP_PER_DIM || grid_size(d, next).is_none() {
            return Err(Error::accuracy(
                format!("no convergence to {:e} before the node cap", quad.tolerance),
                n,
                last_delta,
            ));
        }
        let cur = eval(next)?;
        let delta = dist(&prev, &cur);
        if delta < quad.tolerance {
            return Ok(Refined {
                value: cur,
                nodes: next,
                delta,
            });
        }
        if !delta.is_finite() {
            return Err(Error::accuracy("non-finite refinement delta", next, delta));
        }
        prev = cur;
        n = next;
        last_delta = delta;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_parameter_validation() {
        assert!(QuadratureSpec::new(1, 1e-8).is_err());
        assert!(QuadratureSpec::new(4, 0.0).is_err());
        assert!(QuadratureSpec::new(4, 1e-8).is_ok());
    }

    #[test]
    fn trapezoid_is_exact_for_low_trig_polynomials() {
        // mean of cos^2(a) cos^2(b) over the torus is 1/4
        let n = 6;
        let s = grid_fold(2, n, || 0.0, |a, t| a + (t[0].cos() * t[1].cos()).powi(2), |a, b| a + b);
        assert!((s / (n * n) as f64 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn grid_map_order() {
        let v = grid_map(2, 3, |flat, th| (flat, th.to_vec()));
        assert_eq!(v.len(), 9);
        assert_eq!(v[5].0, 5);
        let h = 2.0 * PI / 3.0;
        assert!((v[5].1[0] - h).abs() < 1e-15 && (v[5].1[1] - 2.0 * h).abs() < 1e-15);
    }

    #[test]
    fn refinement_converges_and_caps() {
        let quad = QuadratureSpec::new(4, 1e-13).unwrap();
        // mean of exp(cos t) = I_0(1)
        let r = refine(
            1,
            &quad,
            2,
            |n| Ok(grid_fold(1, n, || 0.0, |a, t| a + t[0].cos().exp(), |a, b| a + b) / n as f64),
            |a, b| (a - b).abs(),
        )
        .unwrap();
        assert!((r.value - 1.266_065_877_752_008_4).abs() < 1e-14);

        let bad = refine(1, &quad, 2, |n| Ok(n as f64), |a: &f64, b: &f64| (a - b).abs());
        assert!(matches!(bad, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn grid_size_cap() {
        assert_eq!(grid_size(2, 8), Some(64));
        assert_eq!(grid_size(3, 1 << 10), None);
    }
}
