//! Mixed space derivatives of the kernel near the origin.
//!
//! The Faà di Bruno expansion `𝕏_J h_t = Σ_j h_t^{(j)} σ_{j,J}` is singular
//! term by term as `r → 0`, although the left side is smooth. The machinery
//! here regroups it: Gaussian-tail-corrected radial derivatives
//!
//! ```text
//! Φ_{2b,2q,t}(r) = Σ_{ℓ=0}^{2b-1} (-r)^ℓ/ℓ! · h_t^{(2q+ℓ+1)}(r)   (b ≥ 1),
//! Φ_{0,2q,t} = h_t^{(2q+1)},
//! ```
//!
//! graded distance-derivative combinations `Υ_{2j+1,J}` and their smooth
//! residuals `Ξ_{2j,J}`, so that
//!
//! ```text
//! 𝕏_J h_t = Σ_j Φ_{k-2j-1,2j,t} Υ_{2j+1,J} + Σ_j h_t^{(2j)} Ξ_{2j,J}   (k odd)
//! ```
//!
//! and the analogous even form with the extra `h_t^{(k)} σ_{k,J}` term. Every
//! piece on the right is individually well behaved at small radius.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rug::Float;

use crate::distance_calculus::{
    self, apply_fields_r2_pow, sigma_table, MultiIndex, SigmaTable,
};
use crate::error::{Error, Result};
use crate::group_model::{GroupPoint, HTypeGroup};
use crate::heat_kernel::{radial_derivatives_upto, space_derivative, KernelParams, QuadratureConfig};
use crate::real::fl;

/// `Φ_{2b,2q,t}(r)` assembled from precomputed `h_t^{(i)}` values.
fn phi_from_derivs(b: usize, q: usize, r: &Float, derivs: &[Float]) -> Float {
    let prec = r.prec();
    if b == 0 {
        return derivs[2 * q + 1].clone();
    }
    let mut acc = fl(prec, 0);
    let mut pow = fl(prec, 1); // (-r)^ℓ / ℓ!
    for ell in 0..2 * b {
        if ell > 0 {
            pow *= -Float::with_val(prec, r / fl(prec, ell as u32));
        }
        acc += Float::with_val(prec, &pow * &derivs[2 * q + ell + 1]);
    }
    acc
}

/// `Φ_{2b,2q,t}(r)`.
pub fn phi(
    p: &KernelParams,
    b: usize,
    q: usize,
    t: &Float,
    r: &Float,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    let derivs = radial_derivatives_upto(p, 2 * b + 2 * q + 1, t, r, cfg)?;
    Ok(phi_from_derivs(b, q, &Float::with_val(cfg.precision_bits, r), &derivs))
}

/// The coefficient system `Υ_{2j+1,J}`, `Ξ_{2j,J}` at one point.
#[derive(Debug, Clone)]
pub struct UpsilonXiTable {
    pub j: MultiIndex,
    pub sigma: SigmaTable,
    /// `(index 2j+1, value)`, ascending; the last entry is the raw top
    /// `Υ_k = σ_k` (k odd) or `Υ_{k-1} = σ_{k-1}` (k even).
    pub upsilon: Vec<(usize, Float)>,
    /// `(index 2j, value)`, ascending.
    pub xi: Vec<(usize, Float)>,
    r: Float,
}

impl UpsilonXiTable {
    pub fn upsilon_at(&self, idx: usize) -> Option<&Float> {
        self.upsilon.iter().find(|(i, _)| *i == idx).map(|(_, v)| v)
    }

    pub fn xi_at(&self, idx: usize) -> Option<&Float> {
        self.xi.iter().find(|(i, _)| *i == idx).map(|(_, v)| v)
    }

    /// Verifies `Ξ_{2j} = (1/(2j)!) 𝕏_J(r^{2j}) - Σ_{ℓ<j} r^{2j-2ℓ}/(2j-2ℓ)! Ξ_{2ℓ}`
    /// against the independent smooth-surrogate computation of `𝕏_J(r^{2j})`;
    /// returns the largest relative deviation.
    pub fn verify_smooth_route(&self, group: &HTypeGroup, g: &GroupPoint) -> f64 {
        let prec = self.r.prec();
        let mut worst = 0.0f64;
        for (pos, (idx, xi)) in self.xi.iter().enumerate() {
            let jj = idx / 2;
            let mixed = apply_fields_r2_pow(group, &self.j, g, jj);
            let mut fact = fl(prec, 1);
            for i in 1..=2 * jj {
                fact *= i as u32;
            }
            let mut want = Float::with_val(prec, &mixed / &fact);
            for (idx2, xi2) in self.xi.iter().take(pos) {
                let gap = (idx - idx2) as i64;
                let mut rf = crate::real::powi(&self.r, gap);
                for i in 1..=gap {
                    rf /= i as u32;
                }
                want -= rf * xi2;
            }
            let scale = want
                .clone()
                .abs()
                .max(&xi.clone().abs())
                .max(&fl(prec, 1e-30));
            let dev = (Float::with_val(prec, xi - &want).abs() / scale).to_f64();
            worst = worst.max(dev);
        }
        worst
    }
}

/// Builds `Υ`/`Ξ` from the probe-based `σ` table by the defining recursions.
pub fn upsilon_xi_table(
    group: &HTypeGroup,
    j: &MultiIndex,
    g: &GroupPoint,
) -> Result<UpsilonXiTable> {
    let k = j.len();
    assert!(k >= 1);
    let sigma = sigma_table(group, j, g)?;
    let r = distance_calculus::distance(group, g);
    let _prec = r.prec();
    let n_rec = (k - 1) / 2; // recursion range j = 0 .. n_rec-1
    let mut upsilon: Vec<(usize, Float)> = Vec::new();
    for jj in 0..n_rec {
        let idx = 2 * jj + 1;
        let mut v = sigma.sigma(idx).clone();
        for (idx2, u2) in &upsilon {
            let gap = (idx - idx2) as i64;
            let mut rf = crate::real::powi(&r, gap);
            for i in 1..=gap {
                rf /= i as u32;
            }
            v -= rf * u2;
        }
        upsilon.push((idx, v));
    }
    // raw top index: k for odd length, k-1 for even
    let top = if k % 2 == 1 { k } else { k - 1 };
    if upsilon.last().map(|(i, _)| *i) != Some(top) {
        upsilon.push((top, sigma.sigma(top).clone()));
    }
    let mut xi: Vec<(usize, Float)> = Vec::new();
    for jj in 1..=n_rec {
        let idx = 2 * jj;
        let mut v = sigma.sigma(idx).clone();
        for (idx2, u2) in upsilon.iter().take_while(|(i, _)| *i < idx) {
            let gap = (idx - idx2) as i64;
            let mut rf = crate::real::powi(&r, gap);
            for i in 1..=gap {
                rf /= i as u32;
            }
            v += rf * u2;
        }
        xi.push((idx, v));
    }
    Ok(UpsilonXiTable { j: j.clone(), sigma, upsilon, xi, r })
}

/// Both sides of the decomposition identity: `𝕏_J h_t` from the jet chain,
/// and the `Φ·Υ + h^{(2j)}Ξ (+ h^{(k)}σ_k)` regrouping; plus their relative
/// deviation.
pub fn decomposition_sides(
    group: &HTypeGroup,
    p: &KernelParams,
    j: &MultiIndex,
    t: &Float,
    g: &GroupPoint,
    cfg: &QuadratureConfig,
) -> Result<(Float, Float, Float)> {
    let k = j.len();
    assert!((1..=5).contains(&k));
    let prec = cfg.precision_bits;
    let lhs = space_derivative(p, group, j, t, g, cfg)?;
    let r = distance_calculus::distance(group, g);
    let r = Float::with_val(prec, &r);
    let derivs = radial_derivatives_upto(p, k, t, &r, cfg)?;
    let table = upsilon_xi_table(group, j, g)?;
    let mut rhs = fl(prec, 0);
    let mut scale = fl(prec, 0);
    if k % 2 == 1 {
        for jj in 0..=(k - 1) / 2 {
            let b2 = k - 2 * jj - 1; // 2b
            let phi_v = phi_from_derivs(b2 / 2, jj, &r, &derivs);
            let ups = table.upsilon_at(2 * jj + 1).expect("upsilon entry");
            let term = Float::with_val(prec, &phi_v * ups);
            scale += term.clone().abs();
            rhs += term;
        }
        for jj in 1..=(k - 1) / 2 {
            let xi = table.xi_at(2 * jj).expect("xi entry");
            let term = Float::with_val(prec, &derivs[2 * jj] * xi);
            scale += term.clone().abs();
            rhs += term;
        }
    } else {
        for jj in 0..=(k / 2).saturating_sub(1) {
            let b2 = k - 2 * jj - 2;
            let phi_v = phi_from_derivs(b2 / 2, jj, &r, &derivs);
            let ups = table.upsilon_at(2 * jj + 1).expect("upsilon entry");
            let term = Float::with_val(prec, &phi_v * ups);
            scale += term.clone().abs();
            rhs += term;
        }
        for jj in 1..=(k / 2).saturating_sub(1) {
            let xi = table.xi_at(2 * jj).expect("xi entry");
            let term = Float::with_val(prec, &derivs[2 * jj] * xi);
            scale += term.clone().abs();
            rhs += term;
        }
        let term = Float::with_val(prec, &derivs[k] * table.sigma.sigma(k));
        scale += term.clone().abs();
        rhs += term;
    }
    let num = Float::with_val(prec, &lhs - &rhs).abs();
    let den = lhs
        .clone()
        .abs()
        .max(&rhs.clone().abs())
        .max(&Float::with_val(prec, &scale * 1e-6f64));
    let residual = num / den;
    Ok((lhs, rhs, residual))
}

/// Relative deviation of the regrouped decomposition from `𝕏_J h_t`.
pub fn decomposition_check(
    group: &HTypeGroup,
    p: &KernelParams,
    j: &MultiIndex,
    t: &Float,
    g: &GroupPoint,
    cfg: &QuadratureConfig,
) -> Result<Float> {
    Ok(decomposition_sides(group, p, j, t, g, cfg)?.2)
}

/// Sweep report for `|𝕏_j^{2k+1}(r^{2ℓ})| / r` on `r ∈ (1e-3, 1]`.
pub fn odd_power_check(group: &HTypeGroup, field: usize, k: usize, ell: usize) -> Result<f64> {
    assert!(2 * k + 1 <= 5 && ell >= 1 && ell <= 2);
    if field >= group.dim() {
        return Err(Error::OutOfRange(format!("field {field} out of range")));
    }
    let prec = 113;
    let j = MultiIndex(vec![field; 2 * k + 1]);
    let mut sup: f64 = 0.0;
    let dirs: &[(&[f64], &[f64], f64)] = &[
        (&[1.0, 0.4, 0.2, -0.3][..], &[0.6, -0.2, 0.1][..], 0.5),
        (&[-0.3, 0.8, -0.5, 0.1][..], &[0.2, 0.7, -0.4][..], -0.8),
    ];
    for (xh, zh, ah) in dirs {
        let xhat: Vec<f64> = xh.iter().cycle().take(group.mu()).copied().collect();
        let zhat: Vec<f64> = zh.iter().cycle().take(group.nu()).copied().collect();
        for i in 0..28 {
            let r_target = 1e-3 * (1000.0f64).powf(i as f64 / 27.0);
            let g = distance_calculus::point_with_radius(group, &xhat, &zhat, *ah, r_target, prec)?;
            let v = apply_fields_r2_pow(group, &j, &g, ell);
            let r = distance_calculus::distance(group, &g);
            let ratio = (v.abs() / r).to_f64();
            if !ratio.is_finite() {
                return Err(Error::StructuralViolation(format!(
                    "odd power ratio not finite at r = {r_target}"
                )));
            }
            sup = sup.max(ratio);
        }
    }
    Ok(sup)
}

/// Everything the witness example for mixed third derivatives produces.
#[derive(Debug, Clone)]
pub struct NorWitnessReport {
    /// `|𝕏_J(r²)|` at `r = 0.1` and `r = 0.01` for the mixed `J`.
    pub xjr2: [f64; 2],
    /// `Ψ_3/Ψ̃_3` at `(r, √r)` for `r = 0.1, 0.03, 0.01`.
    pub psi_ratio: [f64; 3],
    /// `|𝕏_J h_t|/(Ψ̃_3 h_t)` at the same `(r, √r)` points.
    pub derivative_ratio: [f64; 3],
    /// The multi-index used.
    pub j: MultiIndex,
}

/// Witness that `Ψ̃` cannot be replaced by `Ψ` for mixed third derivatives.
///
/// Uses `J = (ℓ, ℓ', m)` with two distinct first-layer directions and one
/// central direction, for which `𝕏_J cosh r = (a/2)(J_{u}e_{ℓ'}, e_ℓ) ≠ 0`
/// and hence `|𝕏_J(r²)| ≈ 1` for `r ≤ 1`; along `t = √r`, `r → 0⁺` the
/// ratio `|𝕏_J h_t|/(Ψ̃_3 h_t)` then stays above a positive floor while
/// `Ψ_3/Ψ̃_3 = √r → 0`.
pub fn remark_nor_witness(
    group: &HTypeGroup,
    p: &KernelParams,
    cfg: &QuadratureConfig,
) -> Result<NorWitnessReport> {
    if group.mu() < 2 {
        return Err(Error::NotApplicable(
            "witness needs two first-layer directions (mu >= 2)".into(),
        ));
    }
    // pick ℓ = 1 and an ℓ' with (J_{u_1} e_{ℓ'}, e_1) ≠ 0
    let mut lprime = None;
    for cand in 1..=group.mu() {
        if cand != 1 && group.j_entry(0, 0, cand - 1) != 0.0 {
            lprime = Some(cand);
            break;
        }
    }
    let lprime = lprime.ok_or_else(|| {
        Error::NotApplicable("no first-layer pair couples to the first center direction".into())
    })?;
    let m = group.mu() + 1;
    let j = MultiIndex(vec![1, lprime, m]);
    let prec = cfg.precision_bits;
    let xhat = {
        let mut v = vec![0.0; group.mu()];
        v[0] = 1.0;
        v[lprime - 1] = 0.7;
        v
    };
    let zhat = {
        let mut v = vec![0.0; group.nu()];
        v[0] = 0.6;
        v
    };
    let mut xjr2 = [0.0f64; 2];
    for (i, r_target) in [0.1, 0.01].into_iter().enumerate() {
        let g = distance_calculus::point_with_radius(group, &xhat, &zhat, 0.4, r_target, prec)?;
        xjr2[i] = apply_fields_r2_pow(group, &j, &g, 1).abs().to_f64();
    }
    let mut psi_ratio = [0.0f64; 3];
    let mut derivative_ratio = [0.0f64; 3];
    for (i, r_target) in [0.1, 0.03, 0.01].into_iter().enumerate() {
        let t = fl(prec, r_target).sqrt();
        let g = distance_calculus::point_with_radius(group, &xhat, &zhat, 0.4, r_target, prec)?;
        let r = distance_calculus::distance(group, &g);
        let psi = crate::bounds_asymptotics::psi(3, &r, &t);
        let psit = crate::bounds_asymptotics::psi_tilde(3, &r, &t);
        psi_ratio[i] = (psi / &psit).to_f64();
        let xj = space_derivative(p, group, &j, &t, &g, cfg)?;
        let h = crate::heat_kernel::eval(p, &t, &r, cfg)?;
        derivative_ratio[i] = (xj.abs() / (psit * h)).to_f64();
    }
    Ok(NorWitnessReport { xjr2, psi_ratio, derivative_ratio, j })
}

// --- exact rational identities shared with the sharpness machinery ------------

fn big_rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 1..=n {
        acc *= big_rat(i as i64, 1);
    }
    acc
}

/// `β_ℓ(p,j) = 1/((2j-2ℓ)!(2ℓ-2p-1)!) - 1/((2j-2ℓ+1)!(2ℓ-2p-2)!)`; the inner
/// sums `Σ_{ℓ=p+1}^{j} β_ℓ(p,j)` all vanish, which is the cancellation making
/// the `Ξ` functions smooth. Checked exactly in rationals.
pub fn beta_cancellation_exact(max_j: usize) -> bool {
    for j in 1..=max_j {
        for p in 0..j {
            let mut sum = BigRational::zero();
            for ell in p + 1..=j {
                let a = BigRational::one()
                    / (factorial(2 * j - 2 * ell) * factorial(2 * ell - 2 * p - 1));
                let b = if 2 * ell >= 2 * p + 2 {
                    BigRational::one()
                        / (factorial(2 * j - 2 * ell + 1) * factorial(2 * ell - 2 * p - 2))
                } else {
                    BigRational::zero()
                };
                sum += a - b;
            }
            if !sum.is_zero() {
                return false;
            }
        }
    }
    true
}

/// `M_k = k! Σ_j (1/j!) Σ_{m_1+…+m_j=k} Π (-1)^{m_i-1}(m_i-1)!/m_i! = 0` for
/// `k ≥ 2`: the `k`-th derivative of `x = e^{ln x}` at 1, with the inner
/// factors the derivatives of `ln` at 1. Checked exactly in rationals.
pub fn m_identity_exact(max_k: usize) -> bool {
    for k in 2..=max_k {
        let mut total = BigRational::zero();
        let mut comp = vec![k];
        loop {
            let j = comp.len();
            let mut prod = BigRational::one() / factorial(j);
            for &m in &comp {
                let sign = if (m - 1) % 2 == 1 { -1 } else { 1 };
                prod *= factorial(m - 1) / factorial(m) * big_rat(sign, 1);
            }
            total += prod;
            if !next_composition(&mut comp) {
                break;
            }
        }
        total *= factorial(k);
        if !total.is_zero() {
            return false;
        }
    }
    true
}

/// Advances to the next composition of the same total; returns false after
/// the all-ones composition.
fn next_composition(comp: &mut Vec<usize>) -> bool {
    if let Some(pos) = comp.iter().rposition(|&m| m > 1) {
        let trailing = comp.len() - pos - 1;
        comp[pos] -= 1;
        comp.truncate(pos + 1);
        comp.push(trailing + 1);
        true
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_model::StandardFamily;
    use crate::real::rel_diff;

    fn heis() -> HTypeGroup {
        HTypeGroup::standard(StandardFamily::Heisenberg, 1).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn phi_base_case_is_first_derivative() {
        let p = KernelParams::from_dims(0, 2);
        let t = fl(113, 0.7);
        let r = fl(113, 0.4);
        let a = phi(&p, 0, 0, &t, &r, &cfg()).unwrap();
        let b = crate::heat_kernel::radial_derivative(&p, 1, &t, &r, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn phi_matches_integral_form() {
        // Φ_{2,0,t}(r) = h' - r h'' = -∫_0^r s h'''(s) ds
        let p = KernelParams::from_dims(0, 2);
        let t = fl(160, 0.8);
        let r = fl(160, 0.6);
        let c = QuadratureConfig { precision_bits: 160, rel_tol: 1e-14, ..cfg() };
        let lhs = phi(&p, 1, 0, &t, &r, &c).unwrap();
        let mut f = |s: &Float| -> Vec<Float> {
            let h3 = crate::heat_kernel::radial_derivative(&p, 3, &t, s, &c).unwrap();
            vec![s.clone() * h3]
        };
        let quad = crate::quadrature::integrate_adaptive(
            &mut f,
            &fl(160, 1e-30),
            &r,
            1,
            1e-12,
            &fl(160, 1e-40),
            4000,
        )
        .unwrap();
        let rhs = -quad[0].clone();
        assert!(rel_diff(&lhs, &rhs).to_f64() < 1e-8);
    }

    #[test]
    fn phi_small_r_bound() {
        // |Φ_{2b,2q,t}| ≲ r^{2b} Ψ_{2b+2q+1} h_t on r ≤ 1 sweeps, b + q ≤ 2
        let p = KernelParams::from_dims(0, 2);
        for (b, q) in [(1usize, 0usize), (1, 1), (2, 0), (0, 2)] {
            let mut sup: f64 = 0.0;
            for t in [0.05, 0.5, 5.0] {
                let t = fl(113, t);
                for i in 1..=10 {
                    let r = fl(113, i) / 10u32;
                    let v = phi(&p, b, q, &t, &r, &cfg()).unwrap();
                    let psi = crate::bounds_asymptotics::psi(2 * b + 2 * q + 1, &r, &t);
                    let h = crate::heat_kernel::eval(&p, &t, &r, &cfg()).unwrap();
                    let denom = crate::real::powi(&r, 2 * b as i64) * psi * h;
                    sup = sup.max((v.abs() / denom).to_f64());
                }
            }
            assert!(sup.is_finite() && sup < 1e3, "Φ bound sup {sup} for (b,q)=({b},{q})");
        }
    }

    #[test]
    fn xi_two_is_half_mixed_r2() {
        // Ξ_{2,J} = σ_{2,J} + r σ_{1,J} = ½ 𝕏_J(r²)
        let h = heis();
        let g =
            distance_calculus::point_with_radius(&h, &[1.0, 0.5], &[0.4], 0.3, 0.5, 113).unwrap();
        let j = MultiIndex(vec![1, 2, 3]);
        let table = upsilon_xi_table(&h, &j, &g).unwrap();
        let xi2 = table.xi_at(2).unwrap();
        let half_mixed = apply_fields_r2_pow(&h, &j, &g, 1) / 2u32;
        assert!(rel_diff(xi2, &half_mixed).to_f64() < 1e-8);
        assert!(table.verify_smooth_route(&h, &g) < 1e-8);
    }

    #[test]
    fn upsilon_sigma_telescoping() {
        // σ_{2ℓ+1} = Σ_p r^{2ℓ-2p}/(2ℓ-2p)! Υ_{2p+1} over the recursed range
        let h = heis();
        let g =
            distance_calculus::point_with_radius(&h, &[0.9, -0.3], &[0.5], 0.2, 0.8, 113).unwrap();
        let j = MultiIndex(vec![1, 2, 3, 0, 1]);
        let table = upsilon_xi_table(&h, &j, &g).unwrap();
        let r = distance_calculus::distance(&h, &g);
        for ell in 0..2usize {
            let idx = 2 * ell + 1;
            let mut acc = fl(113, 0);
            for (idx2, u) in table.upsilon.iter().filter(|(i, _)| *i <= idx) {
                let gap = (idx - idx2) as i64;
                let mut rf = crate::real::powi(&r, gap);
                for i in 1..=gap {
                    rf /= i as u32;
                }
                acc += rf * u;
            }
            assert!(rel_diff(&acc, table.sigma.sigma(idx)).to_f64() < 1e-10);
        }
    }

    #[test]
    fn upsilon_small_r_grading() {
        // |Υ_{2j+1,J}| · r^{k-2j-1} stays bounded along a shrinking ray
        let h = heis();
        let j = MultiIndex(vec![1, 2, 3, 0]);
        let k = j.len();
        for r_target in [0.5, 0.1, 0.02, 0.005] {
            let g =
                distance_calculus::point_with_radius(&h, &[1.0, 0.5], &[0.4], 0.3, r_target, 113)
                    .unwrap();
            let table = upsilon_xi_table(&h, &j, &g).unwrap();
            let r = distance_calculus::distance(&h, &g).to_f64();
            for (idx, u) in &table.upsilon {
                let graded = u.clone().abs().to_f64() * r.powi((k - idx) as i32);
                assert!(graded < 1e3, "Υ_{idx} grading blew up at r = {r_target}");
            }
            for (_, xi) in &table.xi {
                assert!(xi.clone().abs().to_f64() < 1e3, "Ξ not bounded at r = {r_target}");
            }
        }
    }

    #[test]
    fn decomposition_identity_small_orders() {
        let h = heis();
        let p = KernelParams::new(&h);
        let t = fl(113, 0.5);
        let g =
            distance_calculus::point_with_radius(&h, &[1.0, 0.2], &[0.3], 0.4, 0.7, 113).unwrap();
        for j in [
            MultiIndex(vec![0]),
            MultiIndex(vec![1, 3]),
            MultiIndex(vec![1, 2, 3]),
            MultiIndex(vec![2, 1, 3, 0]),
        ] {
            let res = decomposition_check(&h, &p, &j, &t, &g, &cfg()).unwrap();
            assert!(res.to_f64() <= 1e-7, "residual {} for |J| = {}", res.to_f64(), j.len());
        }
    }

    #[test]
    fn odd_power_sweeps() {
        let h = heis();
        // 𝕏_j(r²) = 2r 𝕏_j r: ratio ≤ 2
        let s = odd_power_check(&h, 1, 0, 1).unwrap();
        assert!(s <= 2.0 + 1e-9, "first-order ratio {s}");
        let s = odd_power_check(&h, 0, 1, 1).unwrap();
        assert!(s.is_finite());
        let s = odd_power_check(&h, 3, 1, 2).unwrap();
        assert!(s.is_finite());
    }

    #[test]
    fn beta_and_m_identities() {
        assert!(beta_cancellation_exact(8));
        assert!(m_identity_exact(10));
    }

    #[test]
    fn composition_enumeration_is_complete() {
        for k in 1..=7 {
            let mut comp = vec![k];
            let mut count = 1;
            while next_composition(&mut comp) {
                count += 1;
            }
            assert_eq!(count, 1usize << (k - 1));
        }
    }

    #[test]
    fn nor_witness_shape() {
        let h = heis();
        let p = KernelParams::new(&h);
        let rep = remark_nor_witness(&h, &p, &cfg()).unwrap();
        for v in rep.xjr2 {
            assert!(v > 0.1 && v < 10.0, "mixed r² derivative {v} not ≈ 1");
        }
        // Ψ_3/Ψ̃_3 = √r along t = √r
        for (i, r) in [0.1f64, 0.03, 0.01].into_iter().enumerate() {
            assert!((rep.psi_ratio[i] - r.sqrt()).abs() < 1e-12);
        }
        for v in rep.derivative_ratio {
            assert!(v > 0.01, "floor {v} too small");
        }
        let rh = HTypeGroup::standard(StandardFamily::RealHyperbolic, 2).unwrap();
        let prh = KernelParams::new(&rh);
        assert!(matches!(remark_nor_witness(&rh, &prh, &cfg()), Err(Error::NotApplicable(_))));
    }
}
