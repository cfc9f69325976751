//! Envelope functions, two-sided bound reports, asymptotic expansions and the
//! Ornstein–Uhlenbeck potential.
//!
//! The envelopes are
//!
//! ```text
//! Ψ_k(r,t)  = (1 + 1/√t + r/t)^k                     if r > 1 or k even,
//!             r (1 + 1/√t + r/t)^{k-1} (1 + 1/t)     if r ≤ 1 and k odd,
//! Ψ̃_k(r,t) = like Ψ_k but with (1 + r/t) in place of r(1 + 1/t),
//! ```
//!
//! and the bounded correction factor entering sharp asymptotics is
//! `Θ_{p,q}(r) = (r e^{r/2}/((1+r) 2 sinh(r/2)))^p (r e^r/((1+2r) sinh r))^q`,
//! with limit 1 at both ends of `(0, ∞)`.
//!
//! Reports compute sup/inf ratios over deterministic grids; grid sweeps are
//! parallel with an index-ordered reduction, so results are reproducible.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::distance_calculus::{self, MultiIndex};
use crate::error::{Error, Result};
use crate::group_model::HTypeGroup;
use crate::heat_kernel::{
    dt_direct, eval, radial_derivatives_upto, rk_values, time_derivative, KernelParams,
    QuadratureConfig,
};
use crate::quadrature::integrate_adaptive;
use crate::radial_symbolics::gaussian_shift;
use crate::real::{fl, pi, powi};

/// `Ψ_k(r, t)`.
pub fn psi(k: usize, r: &Float, t: &Float) -> Float {
    let prec = r.prec();
    let base = fl(prec, 1) + t.clone().sqrt().recip() + Float::with_val(prec, r / t);
    if r.to_f64() > 1.0 || k % 2 == 0 {
        powi(&base, k as i64)
    } else {
        r.clone() * powi(&base, k as i64 - 1) * (fl(prec, 1) + t.clone().recip())
    }
}

/// `Ψ̃_k(r, t)`.
pub fn psi_tilde(k: usize, r: &Float, t: &Float) -> Float {
    let prec = r.prec();
    let base = fl(prec, 1) + t.clone().sqrt().recip() + Float::with_val(prec, r / t);
    if r.to_f64() > 1.0 || k % 2 == 0 {
        powi(&base, k as i64)
    } else {
        powi(&base, k as i64 - 1) * (fl(prec, 1) + Float::with_val(prec, r / t))
    }
}

/// `Θ_{p,q}(r)` for real exponents (half-integers appear for odd `ν`).
///
/// Both factors are evaluated in the pole-free forms
/// `r/((1+r)(1-e^{-r}))` and `2r/((1+2r)(1-e^{-2r}))`.
pub fn theta(p: &Float, q: &Float, r: &Float) -> Float {
    let prec = r.prec();
    let one_minus = -Float::with_val(prec, -r).exp_m1(); // 1 - e^{-r}
    let f1 = Float::with_val(prec, r / (Float::with_val(prec, 1 + r.clone()) * one_minus));
    let one_minus2 = -Float::with_val(prec, -2 * r.clone()).exp_m1();
    let f2 = Float::with_val(
        prec,
        2 * r.clone() / (Float::with_val(prec, 1 + 2 * r.clone()) * one_minus2),
    );
    f1.pow(p.clone()) * f2.pow(q.clone())
}

/// Convenience: `Θ_{p,q}` with integer orders.
pub fn theta_int(p: usize, q: usize, r: &Float) -> Float {
    let prec = r.prec();
    theta(&fl(prec, p as u32), &fl(prec, q as u32), r)
}

/// A deterministic rectangular grid in `(r, t)`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub r: Vec<f64>,
    pub t: Vec<f64>,
}

impl Grid {
    /// Log-spaced grid in both coordinates.
    pub fn log(r_min: f64, r_max: f64, nr: usize, t_min: f64, t_max: f64, nt: usize) -> Self {
        assert!(r_min > 0.0 && t_min > 0.0 && nr >= 2 && nt >= 2);
        let r = (0..nr)
            .map(|i| r_min * (r_max / r_min).powf(i as f64 / (nr - 1) as f64))
            .collect();
        let t = (0..nt)
            .map(|i| t_min * (t_max / t_min).powf(i as f64 / (nt - 1) as f64))
            .collect();
        Grid { r, t }
    }

    /// The standard verification grid. The radial axis is dense enough that
    /// doubling the resolution moves reported suprema by well under 5%.
    pub fn standard() -> Self {
        Grid::log(0.01, 20.0, 40, 0.05, 5.0, 14)
    }

    /// Same spans with twice the points per axis.
    pub fn refined(&self) -> Self {
        Grid::log(
            self.r[0],
            *self.r.last().unwrap(),
            self.r.len() * 2,
            self.t[0],
            *self.t.last().unwrap(),
            self.t.len() * 2,
        )
    }

    pub fn cells(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.r.len() * self.t.len());
        for &r in &self.r {
            for &t in &self.t {
                out.push((r, t));
            }
        }
        out
    }
}

/// Extremal ratios over a grid, with the location of the supremum.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub sup_ratio: f64,
    pub inf_ratio: f64,
    pub worst_point: (f64, f64),
    pub points: usize,
}

impl BoundReport {
    fn collect(values: Vec<((f64, f64), f64)>) -> Result<Self> {
        let mut sup = f64::NEG_INFINITY;
        let mut inf = f64::INFINITY;
        let mut worst = (f64::NAN, f64::NAN);
        for ((r, t), v) in &values {
            if !v.is_finite() {
                return Err(Error::OutOfRange(format!("non-finite ratio at ({r}, {t})")));
            }
            if *v > sup {
                sup = *v;
                worst = (*r, *t);
            }
            inf = inf.min(*v);
        }
        Ok(BoundReport { sup_ratio: sup, inf_ratio: inf, worst_point: worst, points: values.len() })
    }
}

/// Ratio check for the two equivalent forms of `1 + 1/√t + r/t`:
/// the right side is `1 + (1+r)/t` for `r > 1` and
/// `max(1, r²(1+(1+r)/t))^{1/2} (1+(1+r)/t)^{1/2}` for `r ≤ 1`.
pub fn envelope_equivalence_check(grid: &Grid) -> Result<BoundReport> {
    let prec = 64;
    let values: Vec<((f64, f64), f64)> = grid
        .cells()
        .into_iter()
        .map(|(r, t)| {
            let rf = fl(prec, r);
            let tf = fl(prec, t);
            let lhs = fl(prec, 1) + tf.clone().sqrt().recip() + Float::with_val(prec, &rf / &tf);
            let load = fl(prec, 1) + (fl(prec, 1) + &rf) / tf.clone();
            let rhs = if r > 1.0 {
                load
            } else {
                let inner = Float::with_val(prec, rf.clone().square() * &load);
                inner.max(&fl(prec, 1)).sqrt() * load.sqrt()
            };
            ((r, t), (lhs / rhs).to_f64())
        })
        .collect();
    BoundReport::collect(values)
}

/// Sup of `|∂_r^k h_t| / (Ψ_k h_t)` over the grid, one report per
/// `k = 1..=kmax` (a single `ℛ^j` pass per grid point).
pub fn upper_bound_reports(
    p: &KernelParams,
    kmax: usize,
    grid: &Grid,
    cfg: &QuadratureConfig,
) -> Result<Vec<BoundReport>> {
    let prec = cfg.precision_bits;
    let cells = grid.cells();
    let per_point: Vec<Result<Vec<((f64, f64), f64)>>> = cells
        .par_iter()
        .map(|&(r, t)| {
            let rf = fl(prec, r);
            let tf = fl(prec, t);
            let derivs = radial_derivatives_upto(p, kmax, &tf, &rf, cfg)?;
            let h = &derivs[0];
            Ok((1..=kmax)
                .map(|k| {
                    let env = psi(k, &rf, &tf);
                    let ratio = (derivs[k].clone().abs() / (env * h.clone())).to_f64();
                    ((r, t), ratio)
                })
                .collect())
        })
        .collect();
    let mut by_k: Vec<Vec<((f64, f64), f64)>> = vec![Vec::new(); kmax];
    for point in per_point {
        let point = point?;
        for (k, v) in point.into_iter().enumerate() {
            by_k[k].push(v);
        }
    }
    by_k.into_iter().map(BoundReport::collect).collect()
}

/// Sup of `|𝕏_J h_t| / (Ψ̃_{|J|} h_t)` over the grid for a batch of
/// multi-indices, sharing one kernel pass per grid cell. Points of radius `r`
/// are taken along a fixed generic ray.
pub fn space_bound_reports(
    group: &HTypeGroup,
    p: &KernelParams,
    js: &[MultiIndex],
    grid: &Grid,
    cfg: &QuadratureConfig,
) -> Result<Vec<BoundReport>> {
    let prec = cfg.precision_bits;
    let xhat: Vec<f64> = (0..group.mu())
        .map(|i| [1.0, 0.6, -0.4, 0.3][i % 4] * (1.0 + i as f64 * 0.1))
        .collect();
    let zhat: Vec<f64> = (0..group.nu()).map(|i| [0.7, -0.5, 0.3][i % 3]).collect();
    let kmax = js.iter().map(MultiIndex::len).max().unwrap_or(0);
    let per_point: Vec<Result<Vec<((f64, f64), f64)>>> = grid
        .cells()
        .par_iter()
        .map(|&(r, t)| {
            let g = distance_calculus::point_with_radius(group, &xhat, &zhat, 0.45, r, prec)?;
            let rf = distance_calculus::distance(group, &g);
            let tf = fl(prec, t);
            let profile = radial_derivatives_upto(p, kmax, &tf, &rf, cfg)?;
            js.iter()
                .map(|j| {
                    let k = j.len();
                    let xj = distance_calculus::apply_fields_radial(
                        group,
                        j,
                        &g,
                        &profile[..=k],
                    )?;
                    let env = psi_tilde(k, &rf, &tf);
                    let ratio = (xj.abs() / (env * profile[0].clone())).to_f64();
                    Ok(((r, t), ratio))
                })
                .collect()
        })
        .collect();
    let mut by_j: Vec<Vec<((f64, f64), f64)>> = vec![Vec::new(); js.len()];
    for point in per_point {
        let point = point?;
        for (i, v) in point.into_iter().enumerate() {
            by_j[i].push(v);
        }
    }
    by_j.into_iter().map(BoundReport::collect).collect()
}

/// Single-index convenience wrapper around [`space_bound_reports`].
pub fn space_bound_report(
    group: &HTypeGroup,
    p: &KernelParams,
    j: &MultiIndex,
    grid: &Grid,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    Ok(space_bound_reports(group, p, std::slice::from_ref(j), grid, cfg)?.remove(0))
}

/// Which sharpness regime a report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SharpnessBranch {
    /// `r > 1` with `(1+r)/t ≥ γ`.
    LargeRadius,
    /// `r ≤ 1` with `r^α (1 + (1+r)/t) < 1` and `(1+r)/t ≥ γ`.
    SmallRadius,
}

/// Inf of `|∂_r^k h_t| / (Ψ_k h_t)` over the requested sharpness region.
pub fn sharpness_report(
    p: &KernelParams,
    k: usize,
    alpha: f64,
    gamma: f64,
    branch: SharpnessBranch,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    assert!((1.0..2.0).contains(&alpha));
    let prec = cfg.precision_bits;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    match branch {
        SharpnessBranch::LargeRadius => {
            for i in 0..12 {
                let r = 1.5 * (20.0f64 / 1.5).powf(i as f64 / 11.0);
                for mult in [1.0, 3.0, 10.0, 30.0] {
                    let t = (1.0 + r) / (gamma * mult);
                    cells.push((r, t));
                }
            }
        }
        SharpnessBranch::SmallRadius => {
            for i in 0..12 {
                let r = 0.005 * (0.08f64 / 0.005).powf(i as f64 / 11.0);
                for mult in [1.0, 2.0, 4.0] {
                    let g2 = gamma * mult;
                    // region constraint: r^α (1 + (1+r)/t) < 1 with t = (1+r)/g2
                    if r.powf(alpha) * (1.0 + g2) < 1.0 {
                        cells.push((r, (1.0 + r) / g2));
                    }
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::RegionEmpty);
    }
    let values: Vec<Result<((f64, f64), f64)>> = cells
        .par_iter()
        .map(|&(r, t)| {
            let rf = fl(prec, r);
            let tf = fl(prec, t);
            let derivs = radial_derivatives_upto(p, k, &tf, &rf, cfg)?;
            let env = psi(k, &rf, &tf);
            let ratio = (derivs[k].clone().abs() / (env * derivs[0].clone())).to_f64();
            Ok(((r, t), ratio))
        })
        .collect();
    BoundReport::collect(values.into_iter().collect::<Result<Vec<_>>>()?)
}

/// The sharp large-`(1+r)/t` asymptotic expression for `∂_r^k h_t(r)`:
/// `(-1)^k 𝔠_0 t^{-1/2} e^{-Q²t/4 - r²/4t - Qr/2} (e^{-r} sinh r)^k
///  ((1+r)/t)^{μ/2} ((1/2+r)/t)^{k+ν/2} Θ_{μ/2, k+ν/2}(r)`.
pub fn asymptotic_radial(p: &KernelParams, k: usize, t: &Float, r: &Float) -> Float {
    let prec = r.prec();
    let q = p.q(prec);
    let mut acc = p.constant_c(0, prec);
    acc *= t.clone().pow(fl(prec, -0.5f64));
    let arg = -(Float::with_val(prec, q.clone().square() * t / 4u32)
        + Float::with_val(prec, r.clone().square() / (4u32 * t.clone()))
        + Float::with_val(prec, &q * r) / 2u32);
    acc *= arg.exp();
    // (e^{-r} sinh r)^k = ((1 - e^{-2r})/2)^k
    let half_fac = -Float::with_val(prec, -2 * r.clone()).exp_m1() / fl(prec, 2);
    acc *= powi(&half_fac, k as i64);
    let mu_half = fl(prec, p.mu() as u32) / 2u32;
    let nu_exp = fl(prec, k as u32) + fl(prec, p.nu() as u32) / 2u32;
    acc *= Float::with_val(prec, (fl(prec, 1) + r) / t.clone()).pow(mu_half.clone());
    acc *= Float::with_val(prec, (fl(prec, 0.5) + r) / t.clone()).pow(nu_exp.clone());
    acc *= theta(&mu_half, &nu_exp, r);
    if k % 2 == 1 {
        acc = -acc;
    }
    acc
}

/// Fixed-`t`, `r → ∞` asymptotic for `∂_t^m ∂_r^k h_t(r)`:
/// `(-1)^k 𝔠_{k+2m} t^{-1/2} e^{-Q²t/4 - r²/4t - Qr/2} (r/t)^{μ/2+ν/2+k+2m}`.
pub fn asymptotic_fixed_t(p: &KernelParams, m: usize, k: usize, t: &Float, r: &Float) -> Float {
    let prec = r.prec();
    let q = p.q(prec);
    let mut acc = p.constant_c(k + 2 * m, prec);
    acc *= t.clone().pow(fl(prec, -0.5f64));
    let arg = -(Float::with_val(prec, q.clone().square() * t / 4u32)
        + Float::with_val(prec, r.clone().square() / (4u32 * t.clone()))
        + Float::with_val(prec, &q * r) / 2u32);
    acc *= arg.exp();
    let e = fl(prec, (p.mu() + p.nu()) as u32) / 2u32 + fl(prec, (k + 2 * m) as u32);
    acc *= Float::with_val(prec, r / t).pow(e);
    if k % 2 == 1 {
        acc = -acc;
    }
    acc
}

/// Quadrature check of the Laplace-method asymptotic
/// `∫_r^∞ z_r(s) ℛ_{p,q} e^{-s²/4t} ds ~ √π e^{-r²/4t} e^{-(q-1/2+p/2)r} (r/t)^{p+q-1/2}`;
/// returns the ratio of the two sides.
pub fn laplace_method_crosscheck(
    pq: (usize, usize),
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let (pp, qq) = pq;
    assert!(pp + qq >= 1);
    let prec = cfg.precision_bits;
    let t = Float::with_val(prec, t);
    let r = Float::with_val(prec, r);
    let exp = gaussian_shift(pp, qq);
    let comp: Vec<_> = exp.coeffs().iter().map(|e| e.compile(prec)).collect();
    let inv_t = t.clone().recip();
    let big_l = fl(prec, -(cfg.rel_tol.ln()) + 50.0);
    let v_max = {
        let inner =
            Float::with_val(prec, r.clone().square() + 4u32 * Float::with_val(prec, &t * &big_l))
                .sqrt();
        Float::with_val(prec, inner - &r).sqrt()
    };
    let quarter_t = Float::with_val(prec, 4u32 * t.clone()).recip();
    let mut integrand = |v: &Float| -> Vec<Float> {
        let v2 = v.clone().square();
        let s = Float::with_val(prec, &r + &v2);
        let us = Float::with_val(prec, &s / 2u32).exp();
        let sinh_s = Float::with_val(prec, &us * &us);
        let sinh_s = (sinh_s.clone() - sinh_s.recip()) / 2u32;
        let arg1 = Float::with_val(prec, &r + Float::with_val(prec, &v2 / 2u32));
        let arg2 = Float::with_val(prec, &v2 / 2u32);
        let root = Float::with_val(prec, 2u32 * arg1.sinh() * arg2.sinh()).sqrt();
        let kfac = Float::with_val(prec, 2u32 * v.clone()) * &sinh_s / root;
        let efac = (-(Float::with_val(prec, &v2 * Float::with_val(prec, 2u32 * r.clone() + &v2))
            * &quarter_t))
            .exp();
        let mut acc = fl(prec, 0);
        let mut tp = inv_t.clone();
        for c in comp.iter() {
            acc += c.eval_with_u(&s, &us) * &tp;
            tp *= &inv_t;
        }
        vec![acc * kfac * efac]
    };
    let floor = fl(prec, 1e-250);
    let quad = integrate_adaptive(
        &mut integrand,
        &fl(prec, 0),
        &v_max,
        1,
        cfg.rel_tol,
        &floor,
        cfg.max_panels,
    )?
    .remove(0);
    // the e^{-r²/4t} factor was pulled out of the integral above
    let decay = (-(Float::with_val(prec, fl(prec, qq as u32) - fl(prec, 0.5)
        + fl(prec, pp as u32) / 2u32))
        * &r)
        .exp();
    let power = Float::with_val(prec, &r / &t)
        .pow(fl(prec, (pp + qq) as u32) - fl(prec, 0.5));
    let formula = pi(prec).sqrt() * decay * power;
    Ok(quad / formula)
}

/// The `j = 0` inner Laplace integral against its leading term
/// `Γ(1/2) (2t/r)^{1/2}`; returns the ratio.
pub fn laplace_leading_term_check(
    pq: (usize, usize),
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let (pp, qq) = pq;
    let prec = cfg.precision_bits;
    let t = Float::with_val(prec, t);
    let r = Float::with_val(prec, r);
    // ∫_0^∞ (e^s - 1)^{-1/2} e^{-s²/4t - rs/2t - (q + p/2 - 1)s} ds, with the
    // endpoint 1/√s singularity removed by s = v².
    let c_lin = fl(prec, qq as u32) + fl(prec, pp as u32) / 2u32 - 1u32;
    let quarter_t = Float::with_val(prec, 4u32 * t.clone()).recip();
    let half_t = Float::with_val(prec, 2u32 * t.clone()).recip();
    let v_max = {
        // rs/2t ≥ L cutoff (plus the Gaussian, ignored for the bound)
        let big_l = fl(prec, -(cfg.rel_tol.ln()) + 50.0);
        (Float::with_val(prec, 2u32 * t.clone() * big_l) / &r).sqrt() + fl(prec, 2)
    };
    let mut integrand = |v: &Float| -> Vec<Float> {
        let s = v.clone().square();
        let em1 = s.clone().exp_m1();
        let root = em1.sqrt();
        let arg = -(Float::with_val(prec, s.clone().square() * &quarter_t)
            + Float::with_val(prec, &s * &r) * &half_t
            + Float::with_val(prec, &s * &c_lin));
        vec![Float::with_val(prec, 2u32 * v.clone()) / root * arg.exp()]
    };
    let floor = fl(prec, 1e-250);
    let quad = integrate_adaptive(
        &mut integrand,
        &fl(prec, 0),
        &v_max,
        1,
        cfg.rel_tol,
        &floor,
        cfg.max_panels,
    )?
    .remove(0);
    let leading = pi(prec).sqrt() * (Float::with_val(prec, 2u32 * t.clone()) / &r).sqrt();
    Ok(quad / leading)
}

/// Sup of `|∂_t h_t| / ((|r²/4t² - Q²/4| + 1/t) h_t)` over the grid plus the
/// diagonal points `r = Qt`.
pub fn first_time_derivative_bound(
    p: &KernelParams,
    grid: &Grid,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    let prec = cfg.precision_bits;
    let mut cells = grid.cells();
    for t in [0.5, 1.0, 2.0] {
        cells.push((p.q_f64() * t, t));
    }
    let values: Vec<Result<((f64, f64), f64)>> = cells
        .par_iter()
        .map(|&(r, t)| {
            let rf = fl(prec, r);
            let tf = fl(prec, t);
            let dt = dt_direct(p, &tf, &rf, cfg)?;
            let h = eval(p, &tf, &rf, cfg)?;
            let q = p.q(prec);
            let gap = (Float::with_val(prec, rf.clone().square() / (4u32 * tf.clone().square()))
                - Float::with_val(prec, q.clone().square() / 4u32))
            .abs();
            let env = gap + tf.clone().recip();
            Ok(((r, t), (dt.abs() / (env * h)).to_f64()))
        })
        .collect();
    BoundReport::collect(values.into_iter().collect::<Result<Vec<_>>>()?)
}

/// The Ornstein–Uhlenbeck potential
/// `V_t(r) = -¼ (h'/h)² - ½ (rad(ℒ)h)/h`, which grows like `(r/4t)²/...`,
/// precisely `V_t(r) · 16t²/r² → 1` as `r → ∞`.
pub fn ou_potential(p: &KernelParams, t: &Float, r: &Float, cfg: &QuadratureConfig) -> Result<Float> {
    let prec = cfg.precision_bits;
    let lap = crate::heat_kernel::radial_laplacian_applied(p, t, r, cfg)?;
    let derivs = radial_derivatives_upto(p, 1, t, r, cfg)?;
    let logder = Float::with_val(prec, &derivs[1] / &derivs[0]);
    let first = -logder.square() / 4u32;
    let second = -Float::with_val(prec, &lap / &derivs[0]) / 2u32;
    Ok(first + second)
}

/// `ℛ^k h_t ≈ (-1)^k e^{-kr}(1+(1+r)/t)^k h_t`: the two-sided comparison that
/// drives every bound; returns the (sup, inf) of the ratio over the grid.
pub fn rk_comparison_report(
    p: &KernelParams,
    k: usize,
    grid: &Grid,
    cfg: &QuadratureConfig,
) -> Result<BoundReport> {
    let prec = cfg.precision_bits;
    let values: Vec<Result<((f64, f64), f64)>> = grid
        .cells()
        .par_iter()
        .map(|&(r, t)| {
            let rf = fl(prec, r);
            let tf = fl(prec, t);
            let rk = rk_values(p, k, &tf, &rf, cfg)?;
            let load = fl(prec, 1) + (fl(prec, 1) + &rf) / tf.clone();
            let env = (-Float::with_val(prec, &rf * k as u32)).exp() * powi(&load, k as i64);
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let ratio = (Float::with_val(prec, &rk[k] * sign) / (env * &rk[0])).to_f64();
            Ok(((r, t), ratio))
        })
        .collect();
    BoundReport::collect(values.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Ratio of `∂_t^m ∂_r^k h_t` to [`asymptotic_fixed_t`] at one point.
pub fn fixed_t_ratio(
    p: &KernelParams,
    m: usize,
    k: usize,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let v = time_derivative(p, m, k, t, r, cfg)?;
    let prec = cfg.precision_bits;
    let want = asymptotic_fixed_t(p, m, k, &Float::with_val(prec, t), &Float::with_val(prec, r));
    Ok(v / want)
}

/// Ratio of `∂_r^k h_t` to [`asymptotic_radial`] at one point.
pub fn radial_asymptotic_ratio(
    p: &KernelParams,
    k: usize,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let prec = cfg.precision_bits;
    let v = crate::heat_kernel::radial_derivative(p, k, t, r, cfg)?;
    let want = asymptotic_radial(p, k, &Float::with_val(prec, t), &Float::with_val(prec, r));
    Ok(v / want)
}
