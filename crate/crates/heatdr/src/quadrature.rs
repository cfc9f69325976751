//! Adaptive Gauss–Legendre quadrature at arbitrary precision.
//!
//! Rules are computed once per `(order, precision)` by Newton refinement of
//! the Legendre roots and cached. The adaptive driver bisects panels until
//! whole-panel and split-panel estimates agree to the requested tolerance,
//! and integrates vector-valued integrands so that several kernels sharing an
//! integration variable reuse every node evaluation.

use rug::Float;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::real::fl;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

fn legendre_and_derivative(n: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p0 = fl(prec, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let a = Float::with_val(prec, 2 * k as u32 - 1) * x * &p1;
        let b = Float::with_val(prec, k as u32 - 1) * &p0;
        let p2 = (a - b) / fl(prec, k as u32);
        p0 = p1;
        p1 = p2;
    }
    // p1 = P_n, p0 = P_{n-1}
    let x2m1 = Float::with_val(prec, x * x) - 1u32;
    let dp = (Float::with_val(prec, x * &p1) - &p0) * fl(prec, n as u32) / x2m1;
    (p1, dp)
}

fn build_rule(n: usize, prec: u32) -> GaussRule {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let iters = 3 + (prec as f64 / 50.0).log2().max(0.0).ceil() as usize + 2;
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = fl(prec, guess);
        for _ in 0..iters {
            let (p, dp) = legendre_and_derivative(n, &x);
            x -= p / dp;
        }
        let (_, dp) = legendre_and_derivative(n, &x);
        let one_minus = Float::with_val(prec, 1) - Float::with_val(prec, &x * &x);
        let w = fl(prec, 2) / (one_minus * Float::with_val(prec, &dp * &dp));
        nodes.push(x);
        weights.push(w);
    }
    nodes.reverse();
    weights.reverse();
    GaussRule { nodes, weights }
}

/// Cached Gauss–Legendre rule of the given order and precision.
pub fn gauss_legendre(n: usize, prec: u32) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, prec))
        .or_insert_with(|| Arc::new(build_rule(n, prec)))
        .clone()
}

fn panel_sum<F>(f: &mut F, rule: &GaussRule, a: &Float, b: &Float, dims: usize) -> Vec<Float>
where
    F: FnMut(&Float) -> Vec<Float>,
{
    let prec = a.prec();
    let half = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let mut acc = vec![fl(prec, 0); dims];
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let point = Float::with_val(prec, &half * x) + &mid;
        let vals = f(&point);
        debug_assert_eq!(vals.len(), dims);
        for (slot, v) in acc.iter_mut().zip(vals) {
            *slot += v * w;
        }
    }
    for slot in acc.iter_mut() {
        *slot *= &half;
    }
    acc
}

/// Adaptive bisection quadrature of a vector integrand over `[a, b]`.
///
/// A panel is accepted when its one-level-refined estimate agrees with the
/// unrefined one component-wise to `rel_tol` relative to the running totals
/// (with `abs_floor` guarding components that are essentially zero). Panels
/// are processed depth-first left-to-right, so the summation order, and hence
/// the result, is deterministic.
pub fn integrate_adaptive<F>(
    f: &mut F,
    a: &Float,
    b: &Float,
    dims: usize,
    rel_tol: f64,
    abs_floor: &Float,
    max_panels: usize,
) -> Result<Vec<Float>>
where
    F: FnMut(&Float) -> Vec<Float>,
{
    let prec = a.prec();
    let order = 20;
    let rule = gauss_legendre(order, prec);
    // first sweep for magnitude scales
    let coarse = panel_sum(f, &rule, a, b, dims);
    let mut scales: Vec<Float> = coarse
        .iter()
        .map(|v| {
            let av = v.clone().abs();
            if av > *abs_floor {
                av
            } else {
                abs_floor.clone()
            }
        })
        .collect();

    struct Frame {
        a: Float,
        b: Float,
        coarse: Vec<Float>,
        depth: usize,
    }

    let mut total = vec![fl(prec, 0); dims];
    let mut stack = vec![Frame { a: a.clone(), b: b.clone(), coarse, depth: 0 }];
    let mut panels = 0usize;
    while let Some(frame) = stack.pop() {
        panels += 1;
        if panels > max_panels {
            return Err(Error::QuadratureNoConvergence(max_panels));
        }
        let mid = Float::with_val(prec, &frame.a + &frame.b) / 2u32;
        let left = panel_sum(f, &rule, &frame.a, &mid, dims);
        let right = panel_sum(f, &rule, &mid, &frame.b, dims);
        let mut ok = true;
        for j in 0..dims {
            let fine = Float::with_val(prec, &left[j] + &right[j]);
            let diff = Float::with_val(prec, &fine - &frame.coarse[j]).abs();
            let tol = Float::with_val(prec, &scales[j] * rel_tol);
            if diff > tol {
                ok = false;
                break;
            }
        }
        if ok || frame.depth >= 60 {
            for j in 0..dims {
                total[j] += Float::with_val(prec, &left[j] + &right[j]);
                let mag = total[j].clone().abs();
                if mag > scales[j] {
                    scales[j] = mag;
                }
            }
        } else {
            // push right first so the left half is processed next (LIFO)
            stack.push(Frame { a: mid.clone(), b: frame.b, coarse: right, depth: frame.depth + 1 });
            stack.push(Frame { a: frame.a, b: mid, coarse: left, depth: frame.depth + 1 });
        }
    }
    Ok(total)
}

/// Scalar convenience wrapper.
pub fn integrate_scalar<F>(
    f: &mut F,
    a: &Float,
    b: &Float,
    rel_tol: f64,
    abs_floor: &Float,
    max_panels: usize,
) -> Result<Float>
where
    F: FnMut(&Float) -> Float,
{
    let mut vf = |x: &Float| vec![f(x)];
    Ok(integrate_adaptive(&mut vf, a, b, 1, rel_tol, abs_floor, max_panels)?.remove(0))
}
