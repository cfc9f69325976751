//! The radial coordinate and its derivatives along left-invariant fields.
//!
//! The distance from the identity satisfies
//!
//! ```text
//! cosh r = -1 + 2((√a + 1/√a)/2 + |x|²/(8√a))² + |z|²/(2a),
//! ```
//!
//! and nested vector-field derivatives `𝕏_J f` are computed by seeding one
//! nilpotent jet direction per derivative and moving the base point along the
//! defining curves of the fields:
//! `𝕏_J f(g) = ∂_{t_1}…∂_{t_k} f(g·γ_{J_1}(t_1)⋯γ_{J_k}(t_k))`.
//!
//! Radial compositions `f(r)` are realized by post-composing the jet of `r`
//! (or of the smooth surrogates `r²` and `cosh r` near the origin) with the
//! profile's derivative values.

use num_traits::Zero;
use rug::Float;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::group_model::{GroupPoint, HTypeGroup, JetPoint};
use crate::multidual::{Jet, MultiDual};
use crate::radial_symbolics::{rat, Rat};
use crate::real::{fl, rat_to_float};

/// Radial operations on `r` itself refuse radii below this threshold; small-r
/// claims go through the smooth surrogates `r²` and `cosh r`.
pub const MIN_RADIUS: f64 = 1e-3;

/// A multi-index `J ∈ {0,…,n-1}^k`; entry `0` is the `a`-direction,
/// `1..=μ` the first layer, `μ+1..=μ+ν` the center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(group: &HTypeGroup, entries: Vec<usize>) -> Result<Self> {
        if entries.iter().any(|&j| j >= group.dim()) {
            return Err(Error::OutOfRange(format!(
                "multi-index entries must lie in 0..{}",
                group.dim()
            )));
        }
        Ok(MultiIndex(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `cosh r(g) - 1` on jet coordinates, through the cancellation-free form
/// `(1/2a)[(a-1)² + |x|⁴/16 + (a+1)|x|²/2 + |z|²]` (every summand is ≥ 0).
fn cosh_minus_one_jet<T: Jet>(p: &JetPoint<T>) -> T {
    let one = p.a.one_like();
    let am1 = p.a.sub(&one);
    let mut acc = am1.mul(&am1);
    let mut x2 = p.a.zero_like();
    for xi in &p.x {
        x2 = x2.add(&xi.mul(xi));
    }
    let x4 = x2.mul(&x2);
    acc = acc.add(&x4.scale(1.0 / 16.0));
    acc = acc.add(&p.a.add(&one).mul(&x2).scale(0.5));
    for zi in &p.z {
        acc = acc.add(&zi.mul(zi));
    }
    acc.mul(&p.a.recip_()).scale(0.5)
}

fn to_jet_point(g: &GroupPoint) -> JetPoint<Float> {
    JetPoint { x: g.x.clone(), z: g.z.clone(), a: g.a.clone() }
}

/// `cosh r(g)`, always ≥ 1.
pub fn cosh_distance(group: &HTypeGroup, g: &GroupPoint) -> Float {
    let _ = group;
    let v = cosh_minus_one_jet(&to_jet_point(g));
    v + 1u32
}

/// Riemannian distance from the identity, stable near `r = 0`:
/// `r = log1p(v + √(v(v+2)))` with `v = cosh r - 1`.
pub fn distance(group: &HTypeGroup, g: &GroupPoint) -> Float {
    let _ = group;
    let v = cosh_minus_one_jet(&to_jet_point(g));
    let prec = v.prec();
    let s = Float::with_val(prec, &v * (Float::with_val(prec, &v + 2u32))).sqrt();
    (v + s).ln_1p()
}

// --- the series r² = G(cosh r - 1) ------------------------------------------

const R2_SERIES_LEN: usize = 56;

/// Coefficients of the inverse series `r² = Σ_{s≥1} g_s (cosh r - 1)^s`,
/// by Lagrange inversion of `v = φ(y) = Σ_{m≥1} y^m/(2m)!` (`y = r²`):
/// `g_s = (1/s)·[y^{s-1}] (y/φ(y))^s`.
fn r2_series() -> &'static Vec<Rat> {
    static CACHE: OnceLock<Vec<Rat>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let n = R2_SERIES_LEN;
        // φ(y)/y = Σ_{m≥1} y^{m-1}/(2m)!
        let mut phi_over_y = vec![Rat::zero(); n + 1];
        let mut fact = rat(2, 1); // (2m)! at m = 1
        phi_over_y[0] = rat(1, 2);
        for m in 2..=n + 1 {
            fact *= rat((2 * m as i64 - 1) * (2 * m as i64), 1);
            phi_over_y[m - 1] = rat(1, 1) / fact.clone();
        }
        let w = series_inverse(&phi_over_y, n); // (y/φ(y))
        let mut g = vec![Rat::zero(); n + 1];
        let mut wpow = w.clone();
        g[1] = wpow[0].clone();
        for s in 2..=n {
            wpow = series_mul(&wpow, &w, n);
            g[s] = &wpow[s - 1] / rat(s as i64, 1);
        }
        g
    })
}

fn series_mul(a: &[Rat], b: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n + 1];
    for i in 0..=n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..=(n - i) {
            if !b[j].is_zero() {
                out[i + j] += &a[i] * &b[j];
            }
        }
    }
    out
}

fn series_inverse(b: &[Rat], n: usize) -> Vec<Rat> {
    let mut a = vec![Rat::zero(); n + 1];
    a[0] = rat(1, 1) / b[0].clone();
    for k in 1..=n {
        let mut s = Rat::zero();
        for i in 1..=k {
            if !b[i].is_zero() {
                s += &b[i] * &a[k - i];
            }
        }
        a[k] = -s / b[0].clone();
    }
    a
}

/// Derivative values `G^{(j)}(v0)` for `j = 0..=order` of the series above.
fn r2_series_derivs(v0: &Float, order: usize) -> Vec<Float> {
    let prec = v0.prec();
    let g = r2_series();
    let mut out = vec![fl(prec, 0); order + 1];
    for (j, slot) in out.iter_mut().enumerate() {
        // G^{(j)}(v) = Σ_{s ≥ max(j,1)} s(s-1)…(s-j+1) g_s v^{s-j}, by Horner
        let mut acc = fl(prec, 0);
        let smin = j.max(1);
        for s in (smin..g.len()).rev() {
            acc *= v0;
            if !g[s].is_zero() {
                let mut c = rat_to_float(prec, &g[s]);
                for i in 0..j {
                    c *= (s - i) as u64;
                }
                acc += c;
            }
        }
        if j == 0 {
            acc *= v0; // restore the leading power: G(v) = v · Σ g_s v^{s-1}
        }
        *slot = acc;
    }
    out
}

// --- jets along the defining curves ------------------------------------------

/// The point `g · γ_{J_1}(ε_1) ⋯ γ_{J_k}(ε_k)` with one jet generator per slot.
fn dual_point(group: &HTypeGroup, g: &GroupPoint, j_idx: &[usize]) -> JetPoint<MultiDual> {
    let k = j_idx.len();
    let prec = g.prec();
    let lift = |v: &Float| MultiDual::constant(k, v.clone());
    let mut p = JetPoint {
        x: g.x.iter().map(lift).collect(),
        z: g.z.iter().map(lift).collect(),
        a: lift(&g.a),
    };
    for (slot, &dir) in j_idx.iter().enumerate() {
        let zero = MultiDual::constant(k, fl(prec, 0));
        let one = MultiDual::constant(k, fl(prec, 1));
        let eps = MultiDual::variable(k, slot, fl(prec, 0));
        let mut x = vec![zero.clone(); group.mu()];
        let mut z = vec![zero.clone(); group.nu()];
        let mut a = one.clone();
        if dir == 0 {
            // γ_0(t) = (0, 0, e^t): exp(ε) = 1 + ε exactly
            a = one.add(&eps);
        } else if dir <= group.mu() {
            x[dir - 1] = eps;
        } else {
            z[dir - group.mu() - 1] = eps;
        }
        let gamma = JetPoint { x, z, a };
        p = group.multiply_jets(&p, &gamma);
    }
    p
}

/// The jet point `g · γ_{J_1}(ε_1) ⋯ γ_{J_k}(ε_k)`, exposed for callers that
/// combine radial and non-radial factors on the same jet.
pub fn moved_jet_point(
    group: &HTypeGroup,
    g: &GroupPoint,
    j: &MultiIndex,
) -> JetPoint<MultiDual> {
    dual_point(group, g, &j.0)
}

/// Jet of `r²` at a moved point; smooth at and near `r = 0`.
pub fn r_squared_jet_of(p: &JetPoint<MultiDual>) -> MultiDual {
    let v = cosh_minus_one_jet(p);
    if v.value().to_f64() < 0.06 {
        let derivs = r2_series_derivs(v.value(), v.order());
        v.postcompose(&derivs)
    } else {
        let w = v.add_float(&fl(v.prec(), 1));
        let r = w.acosh_();
        r.mul(&r)
    }
}

/// Jet of `r` at a moved point; requires `r ≥ MIN_RADIUS`.
pub fn r_jet_of(p: &JetPoint<MultiDual>) -> Result<MultiDual> {
    let r2 = r_squared_jet_of(p);
    if r2.value().to_f64() < MIN_RADIUS * MIN_RADIUS {
        return Err(Error::SingularPoint);
    }
    Ok(r2.sqrt_())
}

fn r_squared_dual(group: &HTypeGroup, g: &GroupPoint, j_idx: &[usize]) -> MultiDual {
    r_squared_jet_of(&dual_point(group, g, j_idx))
}

fn r_dual(group: &HTypeGroup, g: &GroupPoint, j_idx: &[usize]) -> Result<MultiDual> {
    r_jet_of(&dual_point(group, g, j_idx))
}

/// `𝕏_J f(g)` for a general scalar `f` given on jet coordinates.
pub fn apply_fields_scalar<F>(group: &HTypeGroup, j: &MultiIndex, g: &GroupPoint, f: F) -> Float
where
    F: FnOnce(&JetPoint<MultiDual>) -> MultiDual,
{
    let p = dual_point(group, g, &j.0);
    f(&p).mixed().clone()
}

/// `𝕏_J (f ∘ r)(g)` for a radial profile given through derivative values
/// `profile[i] = f^{(i)}(r(g))`, `i = 0..=|J|`.
pub fn apply_fields_radial(
    group: &HTypeGroup,
    j: &MultiIndex,
    g: &GroupPoint,
    profile: &[Float],
) -> Result<Float> {
    let r = r_dual(group, g, &j.0)?;
    Ok(r.postcompose(profile).mixed().clone())
}

/// `𝕏_j f` for a single field.
pub fn apply_field_radial(
    group: &HTypeGroup,
    field: usize,
    g: &GroupPoint,
    profile: &[Float],
) -> Result<Float> {
    apply_fields_radial(group, &MultiIndex(vec![field]), g, profile)
}

/// `𝕏_J (cosh r)(g)`: exact polynomial jet, no singularity anywhere.
pub fn apply_fields_cosh_r(group: &HTypeGroup, j: &MultiIndex, g: &GroupPoint) -> Float {
    let p = dual_point(group, g, &j.0);
    cosh_minus_one_jet(&p).mixed().clone()
}

/// `𝕏_J (r^{2ℓ})(g)`: smooth surrogate composition, valid at every radius.
pub fn apply_fields_r2_pow(
    group: &HTypeGroup,
    j: &MultiIndex,
    g: &GroupPoint,
    ell: usize,
) -> Float {
    let r2 = r_squared_dual(group, g, &j.0);
    let mut acc = r2.one_like();
    for _ in 0..ell {
        acc = acc.mul(&r2);
    }
    acc.mixed().clone()
}

/// `𝕏_J r(g)`, the distance derivative; requires `r(g) ≥ MIN_RADIUS`.
pub fn distance_derivative(group: &HTypeGroup, j: &MultiIndex, g: &GroupPoint) -> Result<Float> {
    let r = r_dual(group, g, &j.0)?;
    Ok(r.mixed().clone())
}

// --- Faà di Bruno coefficients σ_{j,J} ----------------------------------------

/// The table `σ_{1,J} … σ_{|J|,J}` with `𝕏_J (g∘r) = Σ_j g^{(j)}(r) σ_{j,J}`.
#[derive(Debug, Clone)]
pub struct SigmaTable {
    pub j: MultiIndex,
    pub values: Vec<Float>,
}

impl SigmaTable {
    pub fn sigma(&self, idx: usize) -> &Float {
        &self.values[idx - 1]
    }
}

/// Inverse of the Vandermonde system `Σ_j α_m^j σ_j`, `α_m = m`, exact.
fn vandermonde_inverse(b: usize) -> Vec<Vec<Rat>> {
    // matrix V[m][j] = (m+1)^{j+1}, m, j = 0..b-1; invert by Gauss-Jordan
    let mut a: Vec<Vec<Rat>> = (0..b)
        .map(|m| {
            let mut row: Vec<Rat> = (0..b)
                .map(|j| {
                    let base = rat(m as i64 + 1, 1);
                    let mut p = rat(1, 1);
                    for _ in 0..=j {
                        p *= &base;
                    }
                    p
                })
                .collect();
            let mut id = vec![Rat::zero(); b];
            id[m] = rat(1, 1);
            row.extend(id);
            row
        })
        .collect();
    for col in 0..b {
        let pivot = (col..b).find(|&r| !a[r][col].is_zero()).expect("vandermonde nonsingular");
        a.swap(col, pivot);
        let inv = rat(1, 1) / a[col][col].clone();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..b {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * b {
                    let t = &a[col][c] * &f;
                    a[r][c] -= t;
                }
            }
        }
    }
    a.into_iter().map(|row| row[b..].to_vec()).collect()
}

/// Extracts `σ_{j,J}(g)` from exponential probes `e^{α r}` with `α = 1..|J|`.
pub fn sigma_table(group: &HTypeGroup, j: &MultiIndex, g: &GroupPoint) -> Result<SigmaTable> {
    let b = j.len();
    assert!(b >= 1);
    let prec = g.prec();
    let r0 = distance(group, g);
    if r0.to_f64() < MIN_RADIUS {
        return Err(Error::SingularPoint);
    }
    // condition estimate of the (scaled) Vandermonde in f64
    let inv = vandermonde_inverse(b);
    let norm_v: f64 = (1..=b)
        .map(|m| (1..=b).map(|p| (m as f64).powi(p as i32)).sum::<f64>())
        .fold(0.0, f64::max);
    let norm_inv: f64 = inv
        .iter()
        .map(|row| row.iter().map(|c| rat_to_float(53, c).to_f64().abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if norm_v * norm_inv > 1e12 {
        return Err(Error::IllConditioned(norm_v * norm_inv));
    }
    let mut rhs = Vec::with_capacity(b);
    for m in 1..=b {
        let alpha = fl(prec, m as u32);
        let e = Float::with_val(prec, &alpha * &r0).exp();
        // profile derivatives of e^{α r}: α^i e^{α r}
        let profile: Vec<Float> = (0..=b)
            .map(|i| Float::with_val(prec, crate::real::powi(&alpha, i as i64) * &e))
            .collect();
        let x = apply_fields_radial(group, j, g, &profile)?;
        rhs.push(x / &e);
    }
    let values: Vec<Float> = (0..b)
        .map(|row| {
            let mut acc = fl(prec, 0);
            for (col, r) in rhs.iter().enumerate() {
                acc += rat_to_float(prec, &inv[row][col]) * r;
            }
            acc
        })
        .collect();
    Ok(SigmaTable { j: j.clone(), values })
}

// --- sharpness at infinity -----------------------------------------------------

/// The witness curve `η_y(a) = (0, √((1-y)/(1+y)) a u_1, a)`.
pub fn sharpness_curve(group: &HTypeGroup, y: f64, a: f64, prec: u32) -> Result<GroupPoint> {
    if !(-1.0 < y && y < 1.0) {
        return Err(Error::OutOfRange(format!("y = {y} must lie in (-1, 1)")));
    }
    if group.nu() < 1 {
        return Err(Error::NotApplicable("curve needs a central direction".into()));
    }
    let beta = ((1.0 - y) / (1.0 + y)).sqrt();
    let mut z = vec![0.0; group.nu()];
    z[0] = beta * a;
    group.point(&vec![0.0; group.mu()], &z, a, prec)
}

/// Extrapolated `lim_{a→∞} 𝕏_0^k r` along `η_y`, by Richardson in `1/a` over
/// an increasing grid (last entry should be ≥ 1e6).
pub fn limit_polynomial(group: &HTypeGroup, k: usize, y: f64, a_grid: &[f64]) -> Result<Float> {
    assert!(!a_grid.is_empty());
    let prec = 192;
    let j = MultiIndex(vec![0; k]);
    let mut vals = Vec::with_capacity(a_grid.len());
    for &a in a_grid {
        let g = sharpness_curve(group, y, a, prec)?;
        vals.push(distance_derivative(group, &j, &g)?);
    }
    // Richardson assuming error ~ c/a and grid ratio a_{i+1}/a_i
    let mut cur = vals;
    let mut grid: Vec<f64> = a_grid.to_vec();
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        let mut ngrid = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let ratio = grid[i + 1] / grid[i];
            let num = Float::with_val(prec, &cur[i + 1] * ratio) - &cur[i];
            next.push(num / fl(prec, ratio - 1.0));
            ngrid.push(grid[i + 1]);
        }
        cur = next;
        grid = ngrid;
    }
    Ok(cur.remove(0))
}

/// Least-degree-`k` polynomial fit of `y ↦ lim_a 𝕏_0^k r(η_y(a))` over a
/// `y`-grid; returns the coefficients from constant to leading.
pub fn limit_polynomial_fit(
    group: &HTypeGroup,
    k: usize,
    ys: &[f64],
    a_grid: &[f64],
) -> Result<Vec<Float>> {
    assert!(ys.len() == k + 1, "need exactly k+1 sample ordinates");
    let prec = 192;
    let mut rhs = Vec::with_capacity(ys.len());
    for &y in ys {
        rhs.push(limit_polynomial(group, k, y, a_grid)?);
    }
    // solve the (k+1)x(k+1) Vandermonde in y by Gaussian elimination
    let n = ys.len();
    let mut m: Vec<Vec<Float>> = (0..n)
        .map(|i| {
            let mut row: Vec<Float> = (0..n)
                .map(|p| {
                    let y = fl(prec, ys[i]);
                    crate::real::powi(&y, p as i64)
                })
                .collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                m[a][col].clone().abs().partial_cmp(&m[b][col].clone().abs()).unwrap()
            })
            .unwrap();
        m.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = Float::with_val(prec, &m[r][col] / &m[col][col]);
                for c in col..=n {
                    let t = Float::with_val(prec, &m[col][c] * &f);
                    m[r][c] -= t;
                }
            }
        }
    }
    Ok((0..n).map(|i| Float::with_val(prec, &m[i][n] / &m[i][i])).collect())
}

// --- misc helpers used by sweeps ------------------------------------------------

/// Finds `s` with `r(g_s) = r_target` along the ray
/// `g_s = (s·x̂, s·ẑ, e^{s·â})`, by bracketing and bisection.
pub fn point_with_radius(
    group: &HTypeGroup,
    xhat: &[f64],
    zhat: &[f64],
    ahat: f64,
    r_target: f64,
    prec: u32,
) -> Result<GroupPoint> {
    let make = |s: f64| -> Result<GroupPoint> {
        let x: Vec<f64> = xhat.iter().map(|v| v * s).collect();
        let z: Vec<f64> = zhat.iter().map(|v| v * s).collect();
        group.point(&x, &z, (s * ahat).exp(), prec)
    };
    let mut hi = r_target.max(1e-3);
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let g = make(hi)?;
        if distance(group, &g).to_f64() >= r_target {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..500 {
        let mid = 0.5 * (lo + hi);
        let g = make(mid)?;
        let r = distance(group, &g).to_f64();
        if (r - r_target).abs() < 1e-14 * r_target.max(1e-14) {
            return Ok(g);
        }
        if r < r_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    make(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_model::StandardFamily;
    use crate::real::rel_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: u32 = 113;

    fn heis() -> HTypeGroup {
        HTypeGroup::standard(StandardFamily::Heisenberg, 1).unwrap()
    }

    fn rh2() -> HTypeGroup {
        HTypeGroup::standard(StandardFamily::RealHyperbolic, 2).unwrap()
    }

    #[test]
    fn cosh_distance_examples() {
        let g = rh2();
        let e = g.identity(P);
        assert_eq!(cosh_distance(&g, &e).to_f64(), 1.0);
        // (0,0,a): cosh r = (a + 1/a)/2, i.e. r = log a
        let p = g.point(&[], &[0.0, 0.0], 3.0, P).unwrap();
        assert!((cosh_distance(&g, &p).to_f64() - (3.0 + 1.0 / 3.0) / 2.0).abs() < 1e-30);
        assert!((distance(&g, &p).to_f64() - 3.0f64.ln()).abs() < 1e-15);
        // heisenberg, |x| = 1, z = 0, a = 1: -1 + 2(1 + 1/8)² = 1.53125
        let h = heis();
        let p = h.point(&[1.0, 0.0], &[0.0], 1.0, P).unwrap();
        assert!((cosh_distance(&h, &p).to_f64() - 1.53125).abs() < 1e-30);
    }

    #[test]
    fn distance_examples_and_symmetry() {
        let g = rh2();
        assert_eq!(distance(&g, &g.identity(P)).to_f64(), 0.0);
        let p = g.point(&[], &[0.0, 0.0], std::f64::consts::E.powi(2), P).unwrap();
        assert!((distance(&g, &p).to_f64() - 2.0).abs() < 1e-14);
        // r(g⁻¹) = r(g)
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = heis();
        for _ in 0..200 {
            let pt = h
                .point(
                    &[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                    &[rng.gen_range(-2.0..2.0)],
                    rng.gen_range(0.2..4.0),
                    P,
                )
                .unwrap();
            let r1 = distance(&h, &pt);
            let r2 = distance(&h, &h.inverse(&pt));
            assert!(rel_diff(&r1, &r2).to_f64() < 1e-10);
        }
    }

    #[test]
    fn stable_branch_keeps_digits_for_tiny_radii() {
        let g = rh2();
        // r ≈ 1e-4 along the a-axis: r = log a exactly
        let a = 1.0001f64;
        let p = g.point(&[], &[0.0, 0.0], a, P).unwrap();
        let r = distance(&g, &p);
        let want = fl(P, a).ln();
        assert!(rel_diff(&r, &want).to_f64() < 1e-25);
    }

    #[test]
    fn local_equivalence_constant() {
        // r ≈ |a-1| + |x| + |z| for r ≤ 1, with one uniform constant
        let h = heis();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for _ in 0..1000 {
            let s = rng.gen_range(0.01..0.4);
            let p = h
                .point(
                    &[s * rng.gen_range(-1.0..1.0), s * rng.gen_range(-1.0..1.0)],
                    &[s * rng.gen_range(-1.0..1.0)],
                    (s * rng.gen_range(-1.0..1.0)).exp(),
                    P,
                )
                .unwrap();
            let r = distance(&h, &p).to_f64();
            if r > 1.0 || r == 0.0 {
                continue;
            }
            let x_norm = (p.x[0].to_f64().powi(2) + p.x[1].to_f64().powi(2)).sqrt();
            let surrogate = (p.a.to_f64() - 1.0).abs() + x_norm + p.z[0].to_f64().abs();
            let ratio = r / surrogate;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        assert!(lo > 0.2 && hi < 5.0, "local equivalence constants [{lo}, {hi}]");
    }

    #[test]
    fn field_application_examples() {
        let h = heis();
        let e = h.identity(P);
        // 𝕏_0 (a^{-Q})(e) = -Q
        let j = MultiIndex(vec![0]);
        let q = h.q(P);
        let v = apply_fields_scalar(&h, &j, &e, |p| p.a.pow_f(&Float::with_val(P, -&q)));
        assert!((v.to_f64() + h.q_f64()).abs() < 1e-30);
        // 𝕏_0²(cosh r) = cosh r - |x|²/4 at random points
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let p = h
                .point(
                    &[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                    &[rng.gen_range(-2.0..2.0)],
                    rng.gen_range(0.3..3.0),
                    P,
                )
                .unwrap();
            let lhs = apply_fields_cosh_r(&h, &MultiIndex(vec![0, 0]), &p);
            let x2 = Float::with_val(P, p.x[0].clone().square() + p.x[1].clone().square());
            let want = cosh_distance(&h, &p) - x2 / 4u32;
            let diff = Float::with_val(P, &lhs - &want).abs().to_f64();
            assert!(diff < 1e-25 * want.abs().to_f64().max(1.0));
        }
        // |𝕏_ℓ r| ≤ 1 (gradient bound component)
        for _ in 0..50 {
            let p = h
                .point(
                    &[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
                    &[rng.gen_range(-2.0..2.0)],
                    rng.gen_range(0.3..3.0),
                    P,
                )
                .unwrap();
            if distance(&h, &p).to_f64() < MIN_RADIUS {
                continue;
            }
            for field in 1..h.dim() {
                let v = distance_derivative(&h, &MultiIndex(vec![field]), &p).unwrap();
                assert!(v.to_f64().abs() <= 1.0 + 1e-20);
            }
        }
    }

    #[test]
    fn distance_derivative_axis_examples() {
        let g = rh2();
        let p = g.point(&[], &[0.0, 0.0], 2.5, P).unwrap();
        let d1 = distance_derivative(&g, &MultiIndex(vec![0]), &p).unwrap();
        assert!((d1.to_f64() - 1.0).abs() < 1e-25);
        let d2 = distance_derivative(&g, &MultiIndex(vec![0, 0]), &p).unwrap();
        assert!(d2.to_f64().abs() < 1e-25);
        // refuse the singular point
        let e = g.identity(P);
        assert!(matches!(
            distance_derivative(&g, &MultiIndex(vec![0]), &e),
            Err(Error::SingularPoint)
        ));
    }

    #[test]
    fn r_squared_routes_agree() {
        // series route (small v) against acosh route (large v) at the seam
        let h = heis();
        for r_target in [0.2, 0.33, 0.36, 0.5] {
            let p = point_with_radius(&h, &[1.0, 0.4], &[0.7], 0.5, r_target, P).unwrap();
            let j = MultiIndex(vec![1, 3]);
            let a = apply_fields_r2_pow(&h, &j, &p, 1);
            // independent: 2 r 𝕏r + ... via profile composition of g(r) = r²
            let r0 = distance(&h, &p);
            let profile = vec![
                r0.clone().square(),
                Float::with_val(P, 2 * &r0),
                fl(P, 2),
            ];
            let b = apply_fields_radial(&h, &j, &p, &profile).unwrap();
            assert!(rel_diff(&a, &b).to_f64() < 1e-22, "at r = {r_target}");
        }
    }

    #[test]
    fn sigma_table_examples() {
        let g = rh2();
        let p = g.point(&[], &[0.0, 0.0], 2.0, P).unwrap();
        // |J| = 1: σ_1 = 𝕏_J r
        let j = MultiIndex(vec![0]);
        let t = sigma_table(&g, &j, &p).unwrap();
        let want = distance_derivative(&g, &j, &p).unwrap();
        assert!(rel_diff(t.sigma(1), &want).to_f64() < 1e-25);
        // |J| = 2 along the axis: σ = (0, 1)
        let j = MultiIndex(vec![0, 0]);
        let t = sigma_table(&g, &j, &p).unwrap();
        assert!(t.sigma(1).to_f64().abs() < 1e-25);
        assert!((t.sigma(2).to_f64() - 1.0).abs() < 1e-25);
    }

    #[test]
    fn sigma_probe_system_conditioning_guard() {
        // the Vandermonde in the probes degrades factorially; order 12 trips
        // the 1e12 condition guard
        let h = heis();
        let p = point_with_radius(&h, &[0.8, -0.3], &[0.5], 0.4, 0.7, P).unwrap();
        let j = MultiIndex(vec![1; 12]);
        assert!(matches!(sigma_table(&h, &j, &p), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn sigma_endpoints_hold_generically() {
        let h = heis();
        let p = point_with_radius(&h, &[0.8, -0.3], &[0.5], 0.4, 0.7, P).unwrap();
        let j = MultiIndex(vec![1, 0, 3]);
        let t = sigma_table(&h, &j, &p).unwrap();
        let first = distance_derivative(&h, &j, &p).unwrap();
        assert!(rel_diff(t.sigma(1), &first).to_f64() < 1e-18);
        let mut prod = fl(P, 1);
        for &d in &j.0 {
            prod *= distance_derivative(&h, &MultiIndex(vec![d]), &p).unwrap();
        }
        assert!(rel_diff(t.sigma(3), &prod).to_f64() < 1e-18);
    }

    #[test]
    fn commutation_relations() {
        // 𝕏_0 𝕏_j f - 𝕏_j 𝕏_0 f = c_j 𝕏_j f with c_j = 1/2 (layer), 1 (center)
        let h = heis();
        let f = |p: &JetPoint<MultiDual>| {
            // a smooth non-radial test function
            let t = p.x[0].scale(0.3).add(&p.z[0].scale(-0.2)).add(&p.a.scale(0.15));
            t.exp_().mul(&p.a.pow_f(&fl(P, 0.7)))
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let p = h
                .point(
                    &[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                    &[rng.gen_range(-1.0..1.0)],
                    rng.gen_range(0.4..2.5),
                    P,
                )
                .unwrap();
            for (field, c) in [(1usize, 0.5f64), (2, 0.5), (3, 1.0)] {
                let ab = apply_fields_scalar(&h, &MultiIndex(vec![0, field]), &p, f);
                let ba = apply_fields_scalar(&h, &MultiIndex(vec![field, 0]), &p, f);
                let single = apply_fields_scalar(&h, &MultiIndex(vec![field]), &p, f);
                let lhs = Float::with_val(P, &ab - &ba);
                let want = Float::with_val(P, &single * c);
                assert!(
                    rel_diff(&lhs, &want).to_f64() < 1e-22,
                    "commutator failed for field {field}"
                );
            }
        }
    }

    #[test]
    fn cosh_derivatives_dominated_by_cosh() {
        // |X_J cosh r| <= C cosh r over a coordinate sweep, mixed orders <= 4
        let h = heis();
        let js = [
            MultiIndex(vec![0]),
            MultiIndex(vec![1]),
            MultiIndex(vec![0, 3]),
            MultiIndex(vec![1, 2, 0]),
            MultiIndex(vec![0, 0, 1, 3]),
            MultiIndex(vec![2, 1, 2, 1]),
        ];
        let mut sup: f64 = 0.0;
        for i in 0..12 {
            let s = 0.1 + 0.45 * i as f64;
            let p = h
                .point(&[s, -0.4 * s], &[0.8 * s], (0.3 * s).exp(), P)
                .unwrap();
            let cosh = cosh_distance(&h, &p);
            for j in &js {
                let v = apply_fields_cosh_r(&h, j, &p);
                sup = sup.max((v.abs() / &cosh).to_f64());
            }
        }
        assert!(sup.is_finite() && sup < 30.0, "cosh-derivative ratio sup {sup}");
    }

    #[test]
    fn high_order_cosh_derivatives_vanish_off_axis() {
        // 𝕏_J cosh r = 0 for J ⊆ {1..n-1}, |J| ≥ 5
        let h = heis();
        let p = h.point(&[0.9, -0.2], &[0.4], 1.7, P).unwrap();
        let cosh = cosh_distance(&h, &p);
        for j in [
            MultiIndex(vec![1, 2, 1, 2, 1]),
            MultiIndex(vec![3, 1, 2, 2, 1]),
            MultiIndex(vec![1, 1, 1, 1, 1, 2]),
        ] {
            let v = apply_fields_cosh_r(&h, &j, &p);
            assert!(v.to_f64().abs() <= 1e-10 * cosh.to_f64());
        }
    }

    #[test]
    fn sharpness_limits() {
        let h = heis();
        // k = 1: 𝕏_0 r → y along η_y
        let g = sharpness_curve(&h, 0.5, 1e6, P).unwrap();
        let v = distance_derivative(&h, &MultiIndex(vec![0]), &g).unwrap();
        assert!((v.to_f64() - 0.5).abs() < 1e-6);
        assert!(matches!(
            sharpness_curve(&h, 1.0, 10.0, P),
            Err(Error::OutOfRange(_))
        ));
        // k = 2: distinct y give distinct limits fitting a quadratic
        let a_grid = [1e4, 1e5, 1e6];
        let fit =
            limit_polynomial_fit(&h, 2, &[-0.6, 0.1, 0.8], &a_grid).unwrap();
        assert!((fit[2].to_f64() + 1.0).abs() < 2e-3, "leading coeff of P_2 is -1");
        // k = 3: leading coefficient (+2)
        let fit =
            limit_polynomial_fit(&h, 3, &[-0.75, -0.25, 0.25, 0.75], &a_grid).unwrap();
        assert!((fit[3].to_f64() - 2.0).abs() < 1e-3, "leading coeff of P_3 is 2");
    }

    #[test]
    fn multidual_agrees_with_finite_differences() {
        // order-6 central differences on nested curve parameters, 160 bits
        let h = heis();
        let p = h.point(&[0.7, 0.2], &[0.3], 1.4, 160).unwrap();
        let j = MultiIndex(vec![0, 1, 3]);
        let exact = {
            let r = distance(&h, &p);
            let rr = Float::with_val(160, &r);
            let profile = vec![
                rr.clone().square(),
                Float::with_val(160, 2 * &rr),
                fl(160, 2),
                fl(160, 0),
            ];
            apply_fields_radial(&h, &j, &p, &profile).unwrap()
        };
        // finite differences of F(t1,t2,t3) = r²(g·γ(t1)γ(t2)γ(t3))
        let f = |t: [f64; 3]| -> Float {
            let gamma1 = h.point(&[0.0, 0.0], &[0.0], t[0].exp(), 160).unwrap();
            let gamma2 = h.point(&[t[1], 0.0], &[0.0], 1.0, 160).unwrap();
            let gamma3 = h.point(&[0.0, 0.0], &[t[2]], 1.0, 160).unwrap();
            let m = h
                .multiply(&h.multiply(&h.multiply(&p, &gamma1).unwrap(), &gamma2).unwrap(), &gamma3)
                .unwrap();
            distance(&h, &m).square()
        };
        let w = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
        let hstep = 1e-3;
        let mut acc = fl(160, 0);
        for (i1, w1) in w.iter().enumerate() {
            if *w1 == 0.0 {
                continue;
            }
            for (i2, w2) in w.iter().enumerate() {
                if *w2 == 0.0 {
                    continue;
                }
                for (i3, w3) in w.iter().enumerate() {
                    if *w3 == 0.0 {
                        continue;
                    }
                    let t = [
                        (i1 as f64 - 3.0) * hstep,
                        (i2 as f64 - 3.0) * hstep,
                        (i3 as f64 - 3.0) * hstep,
                    ];
                    acc += f(t) * fl(160, w1 * w2 * w3);
                }
            }
        }
        let fd = acc / fl(160, hstep * hstep * hstep);
        assert!(rel_diff(&exact, &fd).to_f64() < 1e-8);
    }
}
