//! Heat kernel evaluation and derivatives of all orders.
//!
//! For center dimension `ν` even the kernel is a finite Gaussian-shift sum
//!
//! ```text
//! h_t(r) = 𝔠_0 t^{-1/2} e^{-Q²t/4} Σ_j a_j(r) t^{-j} e^{-r²/4t},
//! ```
//!
//! while for `ν` odd it carries one extra singular integral
//! `∫_r^∞ sinh s (cosh s - cosh r)^{-1/2} (Σ_j a_j(s) t^{-j}) e^{-s²/4t} ds`,
//! which is regularized exactly by the substitution `s = r + v²` together
//! with `cosh s - cosh r = 2 sinh(r + v²/2) sinh(v²/2)`.
//!
//! All radial derivatives route through the symbolic tables
//! `∂_r^k = Σ_j f_{j,k} ℛ^j` and the `a_j`, never through nested numeric
//! differentiation; time derivatives of any order compose the radial
//! Laplacian symbolically. The first time derivative is also available
//! through direct `t`-differentiation of the defining formulas, which gives
//! the heat-equation residual check an independent route.

use rug::ops::Pow;
use rug::Float;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::distance_calculus::{self, MultiIndex};
use crate::error::{Error, Result};
use crate::group_model::{GroupPoint, HTypeGroup};
use crate::multidual::Jet;
use crate::quadrature::integrate_adaptive;
use crate::radial_symbolics::{
    gaussian_shift, radial_drift, radial_expansion, radial_laplacian, CompiledHyp,
    GaussianExpansion, HypExpr, OperatorPoly, RadialExpansion,
};
use crate::real::{fl, pi, two_pow};

/// Adaptive-quadrature and precision settings.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    /// Target relative accuracy of each integral component.
    pub rel_tol: f64,
    /// Absolute floor below which a component counts as zero.
    pub abs_tol: f64,
    /// Panel budget per integral.
    pub max_panels: usize,
    /// Working precision in bits.
    pub precision_bits: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rel_tol: 1e-10, abs_tol: 1e-40, max_panels: 4000, precision_bits: 113 }
    }
}

impl QuadratureConfig {
    pub fn with_precision(bits: u32) -> Self {
        QuadratureConfig { precision_bits: bits, ..Default::default() }
    }

    /// Tight settings for oracle and cross-check computations.
    pub fn oracle() -> Self {
        QuadratureConfig {
            rel_tol: 1e-20,
            abs_tol: 1e-60,
            max_panels: 20_000,
            precision_bits: 192,
        }
    }
}

type AjCache = Mutex<HashMap<usize, Arc<GaussianExpansion>>>;
type AjCompiled = Mutex<HashMap<(usize, u32), Arc<Vec<CompiledHyp>>>>;
type AjAux = Mutex<HashMap<(usize, u32), Arc<Vec<CompiledHyp>>>>;
type FkCache = Mutex<HashMap<usize, Arc<RadialExpansion>>>;
type FkCompiled = Mutex<HashMap<(usize, u32), Arc<Vec<CompiledHyp>>>>;
type OpCache = Mutex<HashMap<(usize, usize), Arc<OperatorPoly>>>;
type OpCompiled = Mutex<HashMap<(usize, usize, u32), Arc<Vec<(usize, CompiledHyp)>>>>;

/// Kernel evaluator for one pair `(μ, ν)`, with all symbolic tables cached.
///
/// The radial formulas depend on the group only through `(μ, ν)`; a params
/// value can therefore also be built from raw dimensions, which is useful for
/// kernel-level checks at parameter pairs without a constructed `J` family.
pub struct KernelParams {
    mu: usize,
    nu: usize,
    aj: AjCache,
    aj_compiled: AjCompiled,
    aj_s2_compiled: AjAux,
    fjk: FkCache,
    fjk_compiled: FkCompiled,
    time_ops: OpCache,
    time_ops_compiled: OpCompiled,
    drift_compiled: Mutex<HashMap<u32, Arc<CompiledHyp>>>,
}

impl KernelParams {
    pub fn new(group: &HTypeGroup) -> Self {
        Self::from_dims(group.mu(), group.nu())
    }

    pub fn from_dims(mu: usize, nu: usize) -> Self {
        assert!(mu % 2 == 0 && nu >= 1);
        KernelParams {
            mu,
            nu,
            aj: Mutex::new(HashMap::new()),
            aj_compiled: Mutex::new(HashMap::new()),
            aj_s2_compiled: Mutex::new(HashMap::new()),
            fjk: Mutex::new(HashMap::new()),
            fjk_compiled: Mutex::new(HashMap::new()),
            time_ops: Mutex::new(HashMap::new()),
            time_ops_compiled: Mutex::new(HashMap::new()),
            drift_compiled: Mutex::new(HashMap::new()),
        }
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn dim(&self) -> usize {
        self.mu + self.nu + 1
    }

    pub fn q_f64(&self) -> f64 {
        (self.mu + 2 * self.nu) as f64 / 2.0
    }

    pub fn q(&self, prec: u32) -> Float {
        fl(prec, (self.mu + 2 * self.nu) as u32) / 2u32
    }

    /// The normalization constants `𝔠_k = 2^{-μ-ν/2-1-k} π^{-n/2}`.
    pub fn constant_c(&self, k: usize, prec: u32) -> Float {
        let two_part = two_pow(prec, -((2 * self.mu + self.nu + 2 + 2 * k) as i64), 2);
        let pi_part = pi(prec).pow(-(fl(prec, self.dim() as u32) / 2u32));
        two_part * pi_part
    }

    fn parity_even(&self) -> bool {
        self.nu % 2 == 0
    }

    /// `q` of the Gaussian shift backing `ℛ^j h`: `ν/2 + j` or `(ν+1)/2 + j`.
    fn base_q(&self) -> usize {
        if self.parity_even() {
            self.nu / 2
        } else {
            (self.nu + 1) / 2
        }
    }

    fn expansion(&self, j: usize) -> Arc<GaussianExpansion> {
        let mut cache = self.aj.lock().unwrap();
        cache
            .entry(j)
            .or_insert_with(|| Arc::new(gaussian_shift(self.mu / 2, self.base_q() + j)))
            .clone()
    }

    fn compiled_expansion(&self, j: usize, prec: u32) -> Arc<Vec<CompiledHyp>> {
        {
            let cache = self.aj_compiled.lock().unwrap();
            if let Some(v) = cache.get(&(j, prec)) {
                return v.clone();
            }
        }
        let exp = self.expansion(j);
        let compiled: Vec<CompiledHyp> = exp.coeffs().iter().map(|e| e.compile(prec)).collect();
        let arc = Arc::new(compiled);
        self.aj_compiled.lock().unwrap().insert((j, prec), arc.clone());
        arc
    }

    /// `s² a_i(s)` companions of the base expansion, for direct `∂_t`.
    fn compiled_expansion_s2(&self, j: usize, prec: u32) -> Arc<Vec<CompiledHyp>> {
        {
            let cache = self.aj_s2_compiled.lock().unwrap();
            if let Some(v) = cache.get(&(j, prec)) {
                return v.clone();
            }
        }
        let exp = self.expansion(j);
        let r2 = HypExpr::r_pow(2);
        let compiled: Vec<CompiledHyp> =
            exp.coeffs().iter().map(|e| e.mul(&r2).compile(prec)).collect();
        let arc = Arc::new(compiled);
        self.aj_s2_compiled.lock().unwrap().insert((j, prec), arc.clone());
        arc
    }

    fn radial_table(&self, k: usize) -> Arc<RadialExpansion> {
        let mut cache = self.fjk.lock().unwrap();
        cache.entry(k).or_insert_with(|| Arc::new(radial_expansion(k))).clone()
    }

    fn compiled_radial_table(&self, k: usize, prec: u32) -> Arc<Vec<CompiledHyp>> {
        {
            let cache = self.fjk_compiled.lock().unwrap();
            if let Some(v) = cache.get(&(k, prec)) {
                return v.clone();
            }
        }
        let table = self.radial_table(k);
        let compiled: Vec<CompiledHyp> = table.coeffs().iter().map(|e| e.compile(prec)).collect();
        let arc = Arc::new(compiled);
        self.fjk_compiled.lock().unwrap().insert((k, prec), arc.clone());
        arc
    }

    /// `∂^k ∘ (∂² + b ∂)^m` as an operator polynomial in `∂`.
    fn time_operator(&self, m: usize, k: usize) -> Arc<OperatorPoly> {
        {
            let cache = self.time_ops.lock().unwrap();
            if let Some(v) = cache.get(&(m, k)) {
                return v.clone();
            }
        }
        let mut op = if m == 0 {
            OperatorPoly::identity()
        } else {
            radial_laplacian(m, self.mu, self.nu).op
        };
        for _ in 0..k {
            op = op.compose_partial();
        }
        let arc = Arc::new(op);
        self.time_ops.lock().unwrap().insert((m, k), arc.clone());
        arc
    }

    fn compiled_time_operator(&self, m: usize, k: usize, prec: u32) -> Arc<Vec<(usize, CompiledHyp)>> {
        {
            let cache = self.time_ops_compiled.lock().unwrap();
            if let Some(v) = cache.get(&(m, k, prec)) {
                return v.clone();
            }
        }
        let op = self.time_operator(m, k);
        let compiled: Vec<(usize, CompiledHyp)> =
            op.coeffs.iter().map(|(&d, e)| (d, e.compile(prec))).collect();
        let arc = Arc::new(compiled);
        self.time_ops_compiled.lock().unwrap().insert((m, k, prec), arc.clone());
        arc
    }

    fn drift(&self, prec: u32) -> Arc<CompiledHyp> {
        let mut cache = self.drift_compiled.lock().unwrap();
        cache
            .entry(prec)
            .or_insert_with(|| Arc::new(radial_drift(self.mu, self.nu).compile(prec)))
            .clone()
    }
}

/// `𝔠_0 t^{-1/2} e^{-Q²t/4}` (with the extra `π^{-1/2}` when `ν` is odd).
fn prefactor(p: &KernelParams, t: &Float) -> Float {
    let prec = t.prec();
    let mut out = p.constant_c(0, prec);
    out *= t.clone().pow(fl(prec, -0.5f64));
    let q = p.q(prec);
    let arg = -(q.square() * t) / 4u32;
    out *= arg.exp();
    if !p.parity_even() {
        out /= pi(prec).sqrt();
    }
    out
}

/// Values of `ℛ^j h_t(r)` for `j = 0..=jmax`, plus optionally the direct
/// first time derivative `∂_t h_t(r)` from the same pass.
fn kernel_bundle(
    p: &KernelParams,
    jmax: usize,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
    want_dt: bool,
) -> Result<(Vec<Float>, Option<Float>)> {
    let prec = cfg.precision_bits;
    let t = Float::with_val(prec, t);
    let r = Float::with_val(prec, r);
    if !(t.is_finite() && t.is_sign_positive() && !t.is_zero()) {
        return Err(Error::OutOfRange("t must be positive".into()));
    }
    if r.is_sign_negative() {
        return Err(Error::OutOfRange("r must be nonnegative".into()));
    }
    let pref = prefactor(p, &t);
    let gauss = {
        let arg = -Float::with_val(prec, r.clone().square() / (4u32 * t.clone()));
        arg.exp()
    };
    let inv_t = t.clone().recip();

    if p.parity_even() {
        let mut rk = Vec::with_capacity(jmax + 1);
        let exact_at_zero = r.is_zero();
        let u = if exact_at_zero { fl(prec, 1) } else { Float::with_val(prec, &r / 2u32).exp() };
        for j in 0..=jmax {
            let sum = if exact_at_zero {
                let exp = p.expansion(j);
                let mut acc = fl(prec, 0);
                let mut tp = inv_t.clone();
                for i in 1..=exp.len() {
                    acc += exp.coeff(i).eval(&r)? * &tp;
                    tp *= &inv_t;
                }
                acc
            } else {
                let comp = p.compiled_expansion(j, prec);
                let mut acc = fl(prec, 0);
                let mut tp = inv_t.clone();
                for c in comp.iter() {
                    acc += c.eval_with_u(&r, &u) * &tp;
                    tp *= &inv_t;
                }
                acc
            };
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            rk.push(Float::with_val(prec, &pref * &gauss) * sum * sign);
        }
        let dt = if want_dt {
            // ∂_t h = (-1/2t - Q²/4) h + pref·gauss·Σ_i a_i(r) [r²/4t² - i/t] t^{-i}
            let q = p.q(prec);
            let mut extra = fl(prec, 0);
            let exp = p.expansion(0);
            let r2_over = Float::with_val(prec, r.clone().square() / (4u32 * t.clone().square()));
            let mut tp = inv_t.clone();
            for i in 1..=exp.len() {
                let ai = if exact_at_zero {
                    exp.coeff(i).eval(&r)?
                } else {
                    p.compiled_expansion(0, prec)[i - 1].eval_with_u(&r, &u)
                };
                let factor = Float::with_val(prec, &r2_over - Float::with_val(prec, &inv_t * i as u32));
                extra += ai * factor * &tp;
                tp *= &inv_t;
            }
            let head = Float::with_val(prec, q.square() / 4u32) + Float::with_val(prec, &inv_t / 2u32);
            Some(Float::with_val(prec, &pref * &gauss) * extra - head * &rk[0])
        } else {
            None
        };
        return Ok((rk, dt));
    }

    // ν odd: one adaptive pass over v with s = r + v².
    let comp: Vec<Arc<Vec<CompiledHyp>>> =
        (0..=jmax).map(|j| p.compiled_expansion(j, prec)).collect();
    let comp_s2 = if want_dt { Some(p.compiled_expansion_s2(0, prec)) } else { None };
    let dt_parts = comp_s2.as_ref().map(|c| c.len()).unwrap_or(0);
    let dims = (jmax + 1) + 2 * dt_parts;
    // cutoff: v²(2r + v²) = 4 t L
    let big_l = fl(prec, -(cfg.rel_tol.ln()) + 50.0);
    let v_max = {
        let inner = Float::with_val(prec, r.clone().square() + 4u32 * Float::with_val(prec, &t * &big_l))
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
        let weight = Float::with_val(prec, &kfac * &efac);
        let mut out = Vec::with_capacity(dims);
        for cj in comp.iter() {
            let mut acc = fl(prec, 0);
            let mut tp = inv_t.clone();
            for c in cj.iter() {
                acc += c.eval_with_u(&s, &us) * &tp;
                tp *= &inv_t;
            }
            out.push(acc * &weight);
        }
        if let Some(cs2) = comp_s2.as_ref() {
            let base = &comp[0];
            for c in base.iter() {
                out.push(c.eval_with_u(&s, &us) * &weight);
            }
            for c in cs2.iter() {
                out.push(c.eval_with_u(&s, &us) * &weight);
            }
        }
        out
    };
    let floor = fl(prec, cfg.abs_tol) * fl(prec, 1e-200);
    let integrals = integrate_adaptive(
        &mut integrand,
        &fl(prec, 0),
        &v_max,
        dims,
        cfg.rel_tol,
        &floor,
        cfg.max_panels,
    )?;
    let mut rk = Vec::with_capacity(jmax + 1);
    for (j, val) in integrals.iter().take(jmax + 1).enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        rk.push(Float::with_val(prec, &pref * &gauss) * val * sign);
    }
    let dt = if want_dt {
        let q = p.q(prec);
        let a_ints = &integrals[jmax + 1..jmax + 1 + dt_parts];
        let b_ints = &integrals[jmax + 1 + dt_parts..];
        let mut extra = fl(prec, 0);
        let four_t2 = Float::with_val(prec, 4u32 * t.clone().square());
        let mut tp = inv_t.clone();
        for i in 1..=dt_parts {
            let term = Float::with_val(prec, &b_ints[i - 1] / &four_t2)
                - Float::with_val(prec, &a_ints[i - 1] * i as u32) * &inv_t;
            extra += term * &tp;
            tp *= &inv_t;
        }
        let head = Float::with_val(prec, q.square() / 4u32) + Float::with_val(prec, &inv_t / 2u32);
        Some(Float::with_val(prec, &pref * &gauss) * extra - head * &rk[0])
    } else {
        None
    };
    Ok((rk, dt))
}

/// `h_t(r)` for even `ν` (finite symbolic sum; `r = 0` exact).
pub fn eval_even(p: &KernelParams, t: &Float, r: &Float, cfg: &QuadratureConfig) -> Result<Float> {
    if !p.parity_even() {
        return Err(Error::WrongParity(p.nu));
    }
    Ok(kernel_bundle(p, 0, t, r, cfg, false)?.0.remove(0))
}

/// `h_t(r)` for odd `ν` (regularized singular integral).
pub fn eval_odd(p: &KernelParams, t: &Float, r: &Float, cfg: &QuadratureConfig) -> Result<Float> {
    if p.parity_even() {
        return Err(Error::WrongParity(p.nu));
    }
    Ok(kernel_bundle(p, 0, t, r, cfg, false)?.0.remove(0))
}

/// `h_t(r)`, dispatching on the parity of `ν`.
pub fn eval(p: &KernelParams, t: &Float, r: &Float, cfg: &QuadratureConfig) -> Result<Float> {
    Ok(kernel_bundle(p, 0, t, r, cfg, false)?.0.remove(0))
}

/// `ℛ^j h_t(r)` for `j = 0..=jmax` in one pass.
pub fn rk_values(
    p: &KernelParams,
    jmax: usize,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Vec<Float>> {
    Ok(kernel_bundle(p, jmax, t, r, cfg, false)?.0)
}

/// `∂_r^k h_t(r)` (requires `r > 0` for `k ≥ 1`).
pub fn radial_derivative(
    p: &KernelParams,
    k: usize,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    Ok(radial_derivatives_upto(p, k, t, r, cfg)?.remove(k))
}

/// `∂_r^i h_t(r)` for `i = 0..=kmax`, sharing one `ℛ^j` pass.
pub fn radial_derivatives_upto(
    p: &KernelParams,
    kmax: usize,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Vec<Float>> {
    let prec = cfg.precision_bits;
    let rk = rk_values(p, kmax, t, r, cfg)?;
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(rk[0].clone());
    if kmax == 0 {
        return Ok(out);
    }
    if r.is_zero() {
        return Err(Error::SingularPoint);
    }
    let r = Float::with_val(prec, r);
    let u = Float::with_val(prec, &r / 2u32).exp();
    for k in 1..=kmax {
        let table = p.compiled_radial_table(k, prec);
        let mut acc = fl(prec, 0);
        for (j, f) in table.iter().enumerate() {
            acc += f.eval_with_u(&r, &u) * &rk[j + 1];
        }
        out.push(acc);
    }
    Ok(out)
}

/// Direct first time derivative `∂_t h_t(r)` (independent of the radial
/// Laplacian route).
pub fn dt_direct(p: &KernelParams, t: &Float, r: &Float, cfg: &QuadratureConfig) -> Result<Float> {
    Ok(kernel_bundle(p, 0, t, r, cfg, true)?.1.unwrap())
}

/// `∂_t^m ∂_r^k h_t(r)` via `∂_t^m = (∂² + b∂)^m` on radial profiles.
pub fn time_derivative(
    p: &KernelParams,
    m: usize,
    k: usize,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    if m == 0 {
        return radial_derivative(p, k, t, r, cfg);
    }
    let prec = cfg.precision_bits;
    let op = p.compiled_time_operator(m, k, prec);
    let dmax = op.iter().map(|(d, _)| *d).max().unwrap_or(0);
    let derivs = radial_derivatives_upto(p, dmax, t, r, cfg)?;
    let r = Float::with_val(prec, r);
    let u = Float::with_val(prec, &r / 2u32).exp();
    let mut acc = fl(prec, 0);
    for (d, c) in op.iter() {
        acc += c.eval_with_u(&r, &u) * &derivs[*d];
    }
    Ok(acc)
}

/// `rad(ℒ) h_t(r) = -h'' - b h'`.
pub fn radial_laplacian_applied(
    p: &KernelParams,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let prec = cfg.precision_bits;
    let derivs = radial_derivatives_upto(p, 2, t, r, cfg)?;
    let r = Float::with_val(prec, r);
    let b = p.drift(prec).eval(&r);
    Ok(-Float::with_val(prec, &derivs[2] + Float::with_val(prec, &b * &derivs[1])))
}

/// The two sides of the heat equation, computed along independent routes:
/// `∂_t h` by direct `t`-differentiation of the kernel formulas, and
/// `rad(ℒ) h` through the symbolic `f_{j,k}`/`ℛ^j` tables.
pub fn heat_equation_sides(
    p: &KernelParams,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<(Float, Float)> {
    let prec = cfg.precision_bits;
    let (rk, dt) = kernel_bundle(p, 2, t, r, cfg, true)?;
    let dt = dt.unwrap();
    let r = Float::with_val(prec, r);
    let u = Float::with_val(prec, &r / 2u32).exp();
    let mut derivs = vec![rk[0].clone()];
    for k in 1..=2 {
        let table = p.compiled_radial_table(k, prec);
        let mut acc = fl(prec, 0);
        for (j, f) in table.iter().enumerate() {
            acc += f.eval_with_u(&r, &u) * &rk[j + 1];
        }
        derivs.push(acc);
    }
    let b = p.drift(prec).eval(&r);
    let lap = -Float::with_val(prec, &derivs[2] + Float::with_val(prec, &b * &derivs[1]));
    Ok((dt, lap))
}

/// Relative heat-equation residual
/// `|∂_t h + rad(ℒ) h| / (|∂_t h| + |rad(ℒ) h|)`.
pub fn heat_residual(p: &KernelParams, t: &Float, r: &Float, cfg: &QuadratureConfig) -> Result<Float> {
    let prec = cfg.precision_bits;
    let (dt, lap) = heat_equation_sides(p, t, r, cfg)?;
    let num = Float::with_val(prec, &dt + &lap).abs();
    let den = dt.abs() + lap.abs();
    Ok(num / den)
}

/// `𝕏_J h_t(g)` via the jet chain through `r`, with the radial profile and
/// its derivatives supplied by [`radial_derivatives_upto`].
pub fn space_derivative(
    p: &KernelParams,
    group: &HTypeGroup,
    j: &MultiIndex,
    t: &Float,
    g: &GroupPoint,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let r = distance_calculus::distance(group, g);
    if r.to_f64() < distance_calculus::MIN_RADIUS {
        return Err(Error::SingularPoint);
    }
    let profile = radial_derivatives_upto(p, j.len(), t, &r, cfg)?;
    distance_calculus::apply_fields_radial(group, j, g, &profile)
}

/// The mass functional `M(t) = ∫_0^∞ h_t(r) sinh^{μ+ν}(r/2) cosh^ν(r/2) dr`.
///
/// Only `t`-constancy of `M` is contractual (the radial surface constant is
/// not tracked).
pub fn mass_functional(p: &KernelParams, t: &Float, cfg: &QuadratureConfig) -> Result<Float> {
    let prec = cfg.precision_bits;
    let t = Float::with_val(prec, t);
    let q = p.q_f64();
    let tf = t.to_f64();
    let big_l = -(cfg.rel_tol.ln()) + 40.0;
    let r_max = q * tf + 2.0 * tf.sqrt() * (q * q * tf / 4.0 + big_l).sqrt();
    let inner_cfg = QuadratureConfig { rel_tol: cfg.rel_tol * 0.1, ..cfg.clone() };
    let mexp = (p.mu + p.nu) as i64;
    let mut f = |r: &Float| -> Vec<Float> {
        let h = eval(p, &t, r, &inner_cfg).expect("kernel evaluation inside mass integrand");
        let half = Float::with_val(prec, r / 2u32);
        let dens = crate::real::powi(&half.clone().sinh(), mexp)
            * crate::real::powi(&half.cosh(), p.nu as i64);
        vec![h * dens]
    };
    let floor = fl(prec, 1e-200);
    let out = integrate_adaptive(
        &mut f,
        &fl(prec, 0),
        &fl(prec, r_max),
        1,
        cfg.rel_tol,
        &floor,
        cfg.max_panels,
    )?;
    Ok(out.into_iter().next().unwrap())
}

/// The distinguished-Laplacian kernel `h_t^Δ(g) = a^{-Q/2} e^{Q²t/4} h_t(r)`.
pub fn distinguished_kernel(
    p: &KernelParams,
    group: &HTypeGroup,
    t: &Float,
    g: &GroupPoint,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let prec = cfg.precision_bits;
    let r = distance_calculus::distance(group, g);
    let h = eval(p, t, &r, cfg)?;
    let q = p.q(prec);
    let t = Float::with_val(prec, t);
    let grow = Float::with_val(prec, q.clone().square() * &t / 4u32).exp();
    let half_q = -Float::with_val(prec, &q / 2u32);
    let apow = Float::with_val(prec, &g.a).pow(half_q);
    Ok(apow * grow * h)
}

/// `∂_t^m 𝕏_J h_t^Δ(g)`: the jet of `δ^{1/2}` times the jet of the radial
/// profile `∂_t^m (e^{Q²t/4} h_t)`.
pub fn distinguished_space_time_derivative(
    p: &KernelParams,
    group: &HTypeGroup,
    m: usize,
    j: &MultiIndex,
    t: &Float,
    g: &GroupPoint,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let prec = cfg.precision_bits;
    let r = distance_calculus::distance(group, g);
    if r.to_f64() < distance_calculus::MIN_RADIUS {
        return Err(Error::SingularPoint);
    }
    let t = Float::with_val(prec, t);
    let q = p.q(prec);
    let q2_4 = Float::with_val(prec, q.clone().square() / 4u32);
    // profile derivatives ∂_r^d of ∂_t^m (e^{Q²t/4} h_t) = e^{Q²t/4} Σ_i C(m,i) (Q²/4)^{m-i} ∂_t^i h_t
    let mut profile = Vec::with_capacity(j.len() + 1);
    for d in 0..=j.len() {
        let mut acc = fl(prec, 0);
        let mut binom = 1u64;
        for i in 0..=m {
            if i > 0 {
                binom = binom * (m - i + 1) as u64 / i as u64;
            }
            let pw = crate::real::powi(&q2_4, (m - i) as i64);
            acc += time_derivative(p, i, d, &t, &r, cfg)? * pw * fl(prec, binom);
        }
        profile.push(acc);
    }
    let grow = Float::with_val(prec, &q2_4 * &t).exp();
    let half_q = -Float::with_val(prec, &q / 2u32);
    let pt = distance_calculus::moved_jet_point(group, g, j);
    let delta_half = pt.a.pow_f(&half_q);
    let radial = distance_calculus::r_jet_of(&pt)?.postcompose(&profile);
    Ok(delta_half.mul(&radial).mixed().clone() * grow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_model::StandardFamily;
    use crate::real::rel_diff;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn h3_closed_form(t: f64, r: f64, prec: u32) -> Float {
        // (4πt)^{-3/2} (r / sinh r) e^{-t - r²/4t}
        let t = fl(prec, t);
        let r = fl(prec, r);
        let four_pi_t = Float::with_val(prec, 4u32 * pi(prec) * &t);
        let pref = four_pi_t.pow(fl(prec, -1.5f64));
        let ratio = if r.is_zero() { fl(prec, 1) } else { Float::with_val(prec, &r / r.clone().sinh()) };
        let arg = -(Float::with_val(prec, &t + Float::with_val(prec, r.clone().square() / (4u32 * t.clone()))));
        pref * ratio * arg.exp()
    }

    #[test]
    fn even_kernel_matches_h3_closed_form() {
        let p = KernelParams::from_dims(0, 2);
        for (t, r) in [(1.0, 1.0), (0.3, 2.5), (2.0, 0.01), (0.5, 10.0)] {
            let v = eval_even(&p, &fl(113, t), &fl(113, r), &cfg()).unwrap();
            let want = h3_closed_form(t, r, 113);
            assert!(rel_diff(&v, &want).to_f64() < 1e-12, "H³ mismatch at ({t},{r})");
        }
    }

    #[test]
    fn kernel_positive_at_origin() {
        let p = KernelParams::from_dims(2, 2);
        let v = eval(&p, &fl(113, 1), &fl(113, 0), &cfg()).unwrap();
        assert!(v.to_f64() > 0.0 && v.is_finite());
        let podd = KernelParams::from_dims(0, 3);
        let v = eval(&podd, &fl(113, 1), &fl(113, 0), &cfg()).unwrap();
        assert!(v.to_f64() > 0.0 && v.is_finite());
    }

    #[test]
    fn parity_guards() {
        let p = KernelParams::from_dims(0, 2);
        assert!(matches!(
            eval_odd(&p, &fl(113, 1), &fl(113, 1), &cfg()),
            Err(Error::WrongParity(2))
        ));
        let p = KernelParams::from_dims(0, 3);
        assert!(matches!(
            eval_even(&p, &fl(113, 1), &fl(113, 1), &cfg()),
            Err(Error::WrongParity(3))
        ));
    }

    #[test]
    fn first_radial_derivative_matches_h3() {
        // d/dr of (4πt)^{-3/2} (r/sinh r) e^{-t-r²/4t}, analytically
        let p = KernelParams::from_dims(0, 2);
        let prec = 113;
        for (t, r) in [(1.0, 1.3), (0.4, 0.2), (2.5, 6.0)] {
            let v = radial_derivative(&p, 1, &fl(prec, t), &fl(prec, r), &cfg()).unwrap();
            let tt = fl(prec, t);
            let rr = fl(prec, r);
            let h = h3_closed_form(t, r, prec);
            // h'/h = 1/r - coth r - r/2t
            let logder = rr.clone().recip()
                - rr.clone().cosh() / rr.clone().sinh()
                - Float::with_val(prec, &rr / (2u32 * tt));
            let want = h * logder;
            assert!(rel_diff(&v, &want).to_f64() < 1e-10);
        }
    }

    #[test]
    fn rk_signs_alternate() {
        for p in [KernelParams::from_dims(0, 2), KernelParams::from_dims(0, 3)] {
            let rk = rk_values(&p, 3, &fl(113, 0.7), &fl(113, 1.9), &cfg()).unwrap();
            for (j, v) in rk.iter().enumerate() {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                assert!(v.to_f64() * sign > 0.0, "(-1)^j ℛ^j h > 0 fails at j = {j}");
            }
        }
    }

    #[test]
    fn radial_derivative_matches_finite_differences() {
        let oracle = QuadratureConfig::oracle();
        for p in [KernelParams::from_dims(0, 2), KernelParams::from_dims(2, 1)] {
            let t = fl(192, 0.8);
            let r0 = 1.6f64;
            let k = 2;
            let v = radial_derivative(&p, k, &t, &fl(192, r0), &oracle).unwrap();
            // 6th order central differences of h
            let hstep = 1e-2;
            let w = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
            let mut fd = fl(192, 0);
            for (i, wi) in w.iter().enumerate() {
                if *wi == 0.0 {
                    continue;
                }
                let mut acc = fl(192, 0);
                for (i2, wi2) in w.iter().enumerate() {
                    if *wi2 == 0.0 {
                        continue;
                    }
                    let r = r0 + (i as f64 - 3.0) * hstep + (i2 as f64 - 3.0) * hstep;
                    acc += eval(&p, &t, &fl(192, r), &oracle).unwrap() * fl(192, *wi2);
                }
                fd += acc * fl(192, *wi);
            }
            fd /= fl(192, hstep * hstep);
            assert!(rel_diff(&v, &fd).to_f64() < 1e-7, "∂²h mismatch");
        }
    }

    #[test]
    fn time_derivative_matches_finite_differences() {
        let oracle = QuadratureConfig::oracle();
        for p in [KernelParams::from_dims(0, 2), KernelParams::from_dims(0, 3)] {
            let r = fl(192, 1.1);
            let t0 = 0.9f64;
            let v = time_derivative(&p, 1, 0, &fl(192, t0), &r, &oracle).unwrap();
            let d = 1e-4;
            let up = eval(&p, &fl(192, t0 + d), &r, &oracle).unwrap();
            let dn = eval(&p, &fl(192, t0 - d), &r, &oracle).unwrap();
            let fd = (up - dn) / fl(192, 2.0 * d);
            assert!(rel_diff(&v, &fd).to_f64() < 1e-6);
            // and the direct route agrees much more tightly
            let direct = dt_direct(&p, &fl(192, t0), &r, &oracle).unwrap();
            assert!(rel_diff(&v, &direct).to_f64() < 1e-12);
        }
    }

    #[test]
    fn time_derivative_order_zero_is_radial() {
        let p = KernelParams::from_dims(2, 1);
        let a = time_derivative(&p, 0, 2, &fl(113, 0.7), &fl(113, 1.2), &cfg()).unwrap();
        let b = radial_derivative(&p, 2, &fl(113, 0.7), &fl(113, 1.2), &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn heat_equation_residual_small() {
        for (mu, nu) in [(0usize, 2usize), (0, 3), (2, 1)] {
            let p = KernelParams::from_dims(mu, nu);
            for (t, r) in [(0.5, 0.3), (1.0, 2.0), (2.0, 8.0)] {
                let res = heat_residual(&p, &fl(113, t), &fl(113, r), &cfg()).unwrap();
                assert!(
                    res.to_f64() < 1e-8,
                    "residual {} at ({mu},{nu}), t={t}, r={r}",
                    res.to_f64()
                );
            }
        }
    }

    #[test]
    fn delta_normalization_short_time() {
        // (4πt)^{n/2} h_t(0) → 1 as t → 0⁺ with an O(t) correction; Richardson
        // over t ∈ {0.02, 0.01} pins the normalization constant for both
        // parities.
        for (mu, nu) in [(0usize, 2usize), (0, 3), (2, 1), (4, 3)] {
            let p = KernelParams::from_dims(mu, nu);
            let n = p.dim() as u32;
            let mut vals = Vec::new();
            for t in [0.02, 0.01] {
                let h0 = eval(&p, &fl(113, t), &fl(113, 0), &cfg()).unwrap();
                let pref = Float::with_val(113, 4u32 * pi(113) * fl(113, t))
                    .pow(Float::with_val(113, n) / 2u32);
                vals.push((pref * h0).to_f64());
            }
            let extrapolated = 2.0 * vals[1] - vals[0];
            assert!(
                (extrapolated - 1.0).abs() < 0.01,
                "normalization off for ({mu},{nu}): {vals:?} -> {extrapolated}"
            );
            assert!((vals[1] - 1.0).abs() < (vals[0] - 1.0).abs());
        }
    }

    #[test]
    fn mass_constancy_examples() {
        let cases = [(0usize, 2usize, 0.5f64), (2, 1, 2.0), (0, 3, 0.5)];
        for (mu, nu, t) in cases {
            let p = KernelParams::from_dims(mu, nu);
            let c = QuadratureConfig { rel_tol: 1e-9, ..cfg() };
            let m1 = mass_functional(&p, &fl(113, 1), &c).unwrap();
            let mt = mass_functional(&p, &fl(113, t), &c).unwrap();
            let ratio = (mt / m1).to_f64();
            assert!((ratio - 1.0).abs() < 1e-6, "mass ratio {ratio} for ({mu},{nu})");
        }
    }

    #[test]
    fn space_derivative_examples() {
        let group = HTypeGroup::standard(StandardFamily::Heisenberg, 1).unwrap();
        let p = KernelParams::new(&group);
        let t = fl(113, 0.8);
        // on the a-axis, 𝕏_0 h = ∂_r h (𝕏_0 r = 1 there)
        let g = group.point(&[0.0, 0.0], &[0.0], 2.2, 113).unwrap();
        let j = MultiIndex(vec![0]);
        let v = space_derivative(&p, &group, &j, &t, &g, &cfg()).unwrap();
        let r = crate::distance_calculus::distance(&group, &g);
        let want = radial_derivative(&p, 1, &t, &r, &cfg()).unwrap();
        assert!(rel_diff(&v, &want).to_f64() < 1e-20);
        // |𝕏_j h| ≤ |∂_r h| pointwise
        let g = group.point(&[0.6, -0.4], &[0.3], 1.4, 113).unwrap();
        let r = crate::distance_calculus::distance(&group, &g);
        let dr = radial_derivative(&p, 1, &t, &r, &cfg()).unwrap();
        for field in 0..group.dim() {
            let v = space_derivative(&p, &group, &MultiIndex(vec![field]), &t, &g, &cfg()).unwrap();
            assert!(v.to_f64().abs() <= dr.to_f64().abs() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn distinguished_kernel_relations() {
        let group = HTypeGroup::standard(StandardFamily::Heisenberg, 1).unwrap();
        let p = KernelParams::new(&group);
        let t = fl(113, 0.7);
        // at a = 1: h^Δ = e^{Q²t/4} h
        let g = group.point(&[0.5, 0.2], &[-0.1], 1.0, 113).unwrap();
        let lhs = distinguished_kernel(&p, &group, &t, &g, &cfg()).unwrap();
        let r = crate::distance_calculus::distance(&group, &g);
        let h = eval(&p, &t, &r, &cfg()).unwrap();
        let q2t = Float::with_val(113, p.q(113).square() * &t / 4u32).exp();
        assert!(rel_diff(&lhs, &(q2t * h)).to_f64() < 1e-25);
        // same radius, different a: ratio (a/a')^{-Q/2}
        let g1 = group.point(&[0.0, 0.0], &[0.0], 2.0, 113).unwrap();
        let g2 = group.point(&[0.0, 0.0], &[0.0], 0.5, 113).unwrap();
        let v1 = distinguished_kernel(&p, &group, &t, &g1, &cfg()).unwrap();
        let v2 = distinguished_kernel(&p, &group, &t, &g2, &cfg()).unwrap();
        let want = fl(113, 4).pow(Float::with_val(113, -p.q(113) / 2u32));
        assert!(rel_diff(&Float::with_val(113, &v1 / &v2), &want).to_f64() < 1e-20);
    }
}

