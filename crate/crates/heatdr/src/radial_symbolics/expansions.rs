//! Symbolic tables built on [`HypExpr`]: the `∂_r^k = Σ_j f_{j,k} ℛ^j`
//! expansion, Gaussian-shift coefficients, and powers of the radial Laplacian.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rug::Float;

use super::hyp::HypExpr;
use super::laurent::{rat, LPoly};
use crate::error::{Error, Result};
use crate::real::fl;

/// Coefficients `f_{1,k} … f_{k,k}` of `∂_r^k = Σ_j f_{j,k}(r) ℛ^j`, where
/// `ℛ = (1/sinh r) ∂_r`.
#[derive(Debug, Clone)]
pub struct RadialExpansion {
    k: usize,
    coeffs: Vec<HypExpr>,
}

impl RadialExpansion {
    pub fn order(&self) -> usize {
        self.k
    }

    /// `f_{j,k}` for `1 ≤ j ≤ k`.
    pub fn coeff(&self, j: usize) -> &HypExpr {
        &self.coeffs[j - 1]
    }

    pub fn coeffs(&self) -> &[HypExpr] {
        &self.coeffs
    }
}

/// Builds the expansion by the recursion
/// `f_{j,k+1} = f'_{j,k} + sinh r · f_{j-1,k}` from `f_{1,1} = sinh r`.
pub fn radial_expansion(k: usize) -> RadialExpansion {
    assert!(k >= 1, "radial expansion needs k >= 1");
    let sinh = HypExpr::sinh_r();
    let mut coeffs = vec![sinh.clone()];
    for _ in 1..k {
        let prev = coeffs;
        let cur_len = prev.len() + 1;
        let mut cur = Vec::with_capacity(cur_len);
        for j in 1..=cur_len {
            let from_deriv = if j <= prev.len() { prev[j - 1].deriv() } else { HypExpr::zero() };
            let from_shift =
                if j >= 2 { sinh.mul(&prev[j - 2]) } else { HypExpr::zero() };
            cur.push(from_deriv.add(&from_shift));
        }
        coeffs = cur;
    }
    RadialExpansion { k, coeffs }
}

/// Structural facts about one `f_{j,k}` table, as verified on demand.
#[derive(Debug, Clone)]
pub struct StructuralReport {
    pub k: usize,
    /// Vanishing order of each `f_{j,k}` at `r = 0`.
    pub vanishing_orders: Vec<usize>,
    /// `sup_{r in [1,40]} f_{j,k}(r) e^{-j r}` per `j`.
    pub growth_sup: Vec<f64>,
    /// The positive sharp coefficient: `lim f_{(k+1)/2,k}/r` (odd `k`) or
    /// `f_{k/2,k}(0)` (even `k`).
    pub sharp_coefficient: f64,
}

/// Verifies the sign/vanishing structure of the `f_{j,k}`:
/// vanishing orders, nonnegativity of the first four derivatives on `(0,10]`,
/// positivity of the sharp middle coefficient, and `e^{jr}` growth.
pub fn structural_check(k: usize) -> Result<StructuralReport> {
    assert!((1..=12).contains(&k));
    let exp = radial_expansion(k);
    let prec = 113;
    let mut vanishing_orders = Vec::with_capacity(k);
    for j in 1..=k {
        let f = exp.coeff(j);
        let ord = f
            .vanishing_order(2 * k + 6)?
            .ok_or_else(|| Error::StructuralViolation(format!("f_{{{j},{k}}} is zero")))?;
        // upper block: order exactly 2j - k; lower block odd k: odd order >= 1
        if 2 * j > k {
            let want = 2 * j - k;
            if ord != want {
                return Err(Error::StructuralViolation(format!(
                    "f_{{{j},{k}}} vanishes to order {ord}, expected {want}"
                )));
            }
        } else if k % 2 == 1 && ord < 1 {
            return Err(Error::StructuralViolation(format!(
                "f_{{{j},{k}}} should vanish at r = 0 for odd k"
            )));
        }
        vanishing_orders.push(ord);
    }

    // Nonnegativity of f and its first three derivatives on a grid.
    for j in 1..=k {
        let mut f = exp.coeff(j).clone();
        for m in 0..=3 {
            let c = f.compile(prec);
            for i in 1..=40 {
                let r = fl(prec, i) / 4u32;
                let v = c.eval(&r);
                if v.to_f64() < -1e-25 {
                    return Err(Error::StructuralViolation(format!(
                        "derivative {m} of f_{{{j},{k}}} negative at r = {}",
                        r.to_f64()
                    )));
                }
            }
            f = f.deriv();
        }
    }

    // Sharp middle coefficient.
    let sharp_coefficient = if k % 2 == 1 {
        let f = exp.coeff((k + 1) / 2);
        let t = f.taylor_at_zero(2)?;
        if !t[0].is_zero() || !t[1].is_positive() {
            return Err(Error::StructuralViolation(format!(
                "lim f_{{{},{}}}/r at 0 is not positive",
                (k + 1) / 2,
                k
            )));
        }
        crate::real::rat_to_float(53, &t[1]).to_f64()
    } else {
        let v = exp.coeff(k / 2).value_at_zero()?;
        if !v.is_positive() {
            return Err(Error::StructuralViolation(format!(
                "f_{{{},{}}}(0) is not positive",
                k / 2,
                k
            )));
        }
        crate::real::rat_to_float(53, &v).to_f64()
    };

    // Growth: f_{j,k}(r) e^{-jr} bounded on r >= 1.
    let mut growth_sup = Vec::with_capacity(k);
    for j in 1..=k {
        let c = exp.coeff(j).compile(prec);
        let mut sup = 0.0f64;
        for i in 0..=39 {
            let r = fl(prec, 1) + Float::with_val(prec, i);
            let damp = Float::with_val(prec, &r * -(j as f64)).exp();
            let v = (c.eval(&r) * damp).to_f64();
            if !v.is_finite() {
                return Err(Error::StructuralViolation(format!(
                    "f_{{{j},{k}}} e^{{-jr}} not finite at r = {}",
                    r.to_f64()
                )));
            }
            sup = sup.max(v.abs());
        }
        growth_sup.push(sup);
    }

    Ok(StructuralReport { k, vanishing_orders, growth_sup, sharp_coefficient })
}

/// Coefficients `a_1 … a_{p+q}` of
/// `ℛ_{p,q} e^{-r²/4t} = Σ_j a_j(r) t^{-j} e^{-r²/4t}`, where
/// `ℛ_{p,q} = (-ℛ)^q (-(1/sinh(r/2)) ∂_r)^p`.
#[derive(Debug, Clone)]
pub struct GaussianExpansion {
    p: usize,
    q: usize,
    coeffs: Vec<HypExpr>,
}

impl GaussianExpansion {
    pub fn orders(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_j` for `1 ≤ j ≤ p + q`.
    pub fn coeff(&self, j: usize) -> &HypExpr {
        &self.coeffs[j - 1]
    }

    pub fn coeffs(&self) -> &[HypExpr] {
        &self.coeffs
    }
}

/// One application of `f ↦ -(1/w) ∂_r f` through the Gaussian: acting on the
/// table `{a_j}` it sends `a_j ↦ -a_j'/w + (r/(2w)) a_{j-1}` (the second term
/// shifts the `t`-degree up by one).
fn shift_once(table: &[HypExpr], w: &LPoly) -> Vec<HypExpr> {
    let half_r_over_w = HypExpr::r_pow(1).div_lpoly(&w.scale(&rat(2, 1)));
    let mut out = Vec::with_capacity(table.len() + 1);
    for j in 0..=table.len() {
        let from_deriv = if j < table.len() {
            table[j].deriv().neg().div_lpoly(w)
        } else {
            HypExpr::zero()
        };
        let from_shift = if j >= 1 { table[j - 1].mul(&half_r_over_w) } else { HypExpr::zero() };
        out.push(from_deriv.add(&from_shift));
    }
    out
}

/// Builds the Gaussian-shift table by applying `p` half-angle operators
/// followed by `q` full-angle operators to the seed `{1 at t⁰}`.
pub fn gaussian_shift(p: usize, q: usize) -> GaussianExpansion {
    assert!(p + q >= 1, "gaussian shift needs p + q >= 1");
    let mut table = vec![HypExpr::one()];
    for _ in 0..p {
        table = shift_once(&table, &LPoly::sinh_half());
    }
    for _ in 0..q {
        table = shift_once(&table, &LPoly::sinh_r());
    }
    debug_assert!(table[0].is_zero());
    table.remove(0);
    GaussianExpansion { p, q, coeffs: table }
}

/// Per-`j` suprema of `|a_j(r)| e^{(p/2+q) r} / (1+r)^j` over `r ∈ (0, 50]`.
pub fn gaussian_coefficient_bound_check(p: usize, q: usize) -> Vec<f64> {
    let prec = 113;
    let exp = gaussian_shift(p, q);
    let rate = fl(prec, p) / 2u32 + fl(prec, q);
    let mut sups = vec![0.0f64; exp.len()];
    for i in 0..=100 {
        let r = if i == 0 { fl(prec, 1) / 1000u32 } else { Float::with_val(prec, i) / 2u32 };
        let damp = Float::with_val(prec, &rate * &r).exp();
        let base = Float::with_val(prec, &r + 1u32);
        for j in 1..=exp.len() {
            let v = exp.coeff(j).eval(&r).expect("a_j has no pole on r >= 0");
            let ratio = v.abs() * &damp / crate::real::powi(&base, j as i64);
            sups[j - 1] = sups[j - 1].max(ratio.to_f64());
        }
    }
    sups
}

/// A differential operator `Σ_d c_d(r) ∂_r^d` with [`HypExpr`] coefficients.
#[derive(Debug, Clone)]
pub struct OperatorPoly {
    /// degree → coefficient; absent degrees are zero.
    pub coeffs: BTreeMap<usize, HypExpr>,
}

impl OperatorPoly {
    pub fn identity() -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, HypExpr::one());
        OperatorPoly { coeffs }
    }

    fn insert_add(map: &mut BTreeMap<usize, HypExpr>, d: usize, e: HypExpr) {
        if e.is_zero() {
            return;
        }
        match map.remove(&d) {
            Some(old) => {
                let s = old.add(&e);
                if !s.is_zero() {
                    map.insert(d, s);
                }
            }
            None => {
                map.insert(d, e);
            }
        }
    }

    /// Left-compose with `∂_r`.
    pub fn compose_partial(&self) -> Self {
        let mut coeffs = BTreeMap::new();
        for (&d, c) in &self.coeffs {
            Self::insert_add(&mut coeffs, d, c.deriv());
            Self::insert_add(&mut coeffs, d + 1, c.clone());
        }
        OperatorPoly { coeffs }
    }

    pub fn scale_expr(&self, g: &HypExpr) -> Self {
        let mut coeffs = BTreeMap::new();
        for (&d, c) in &self.coeffs {
            Self::insert_add(&mut coeffs, d, c.mul(g));
        }
        OperatorPoly { coeffs }
    }

    pub fn add_op(&self, o: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&d, c) in &o.coeffs {
            Self::insert_add(&mut coeffs, d, c.clone());
        }
        OperatorPoly { coeffs }
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }
}

/// The drift coefficient `b(r) = ((μ+ν)/2) coth(r/2) + (ν/2) tanh(r/2)` of
/// the radial Laplacian `rad(ℒ) = -∂² - b ∂`.
pub fn radial_drift(mu: usize, nu: usize) -> HypExpr {
    let coth_half = HypExpr::cosh_half().div_lpoly(&LPoly::sinh_half());
    let tanh_half = HypExpr::sinh_half().div_lpoly(&LPoly::cosh_half());
    coth_half
        .scale(&rat((mu + nu) as i64, 2))
        .add(&tanh_half.scale(&rat(nu as i64, 2)))
}

/// `(-1)^m rad(ℒ)^m = ∂^{2m} + Σ_{j=1}^{2m-1} c_{j,m}(r) ∂^j` with the
/// `c_{j,m}` as exact radial expressions.
#[derive(Debug, Clone)]
pub struct RadialLaplacianExpansion {
    pub m: usize,
    pub op: OperatorPoly,
}

impl RadialLaplacianExpansion {
    /// `c_{j,m}` for `1 ≤ j ≤ 2m - 1`; the leading `∂^{2m}` coefficient is 1.
    pub fn coeff(&self, j: usize) -> HypExpr {
        self.op.coeffs.get(&j).cloned().unwrap_or_else(HypExpr::zero)
    }
}

/// Composes `(-rad(ℒ)) = ∂² + b∂` with itself `m` times symbolically.
pub fn radial_laplacian(m: usize, mu: usize, nu: usize) -> RadialLaplacianExpansion {
    assert!(m >= 1);
    let b = radial_drift(mu, nu);
    let mut op = OperatorPoly::identity();
    for _ in 0..m {
        let d1 = op.compose_partial();
        let d2 = d1.compose_partial();
        op = d2.add_op(&d1.scale_expr(&b));
    }
    RadialLaplacianExpansion { m, op }
}
