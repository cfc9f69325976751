//! Multi-dual jet arithmetic.
//!
//! A `MultiDual` of order `k` is a truncated Taylor value with `k` independent
//! nilpotent generators `ε_1, …, ε_k`, each of square zero:
//!
//! ```text
//!     f = Σ_{S ⊆ {1..k}}  c_S · Π_{i ∈ S} ε_i .
//! ```
//!
//! Seeding `ε_i` as the velocity of a curve in the `i`-th slot and reading off
//! the coefficient of `ε_1⋯ε_k` yields the exact mixed derivative
//! `∂_{t_1}⋯∂_{t_k}` of a composition, which is how nested left-invariant
//! vector field derivatives are realized. Coefficients are multiprecision
//! floats; all `2^k` of them share one precision.

use rug::ops::Pow;
use rug::Float;

use crate::real::fl;

/// Truncated multivariate first-order jet with `k` nilpotent directions.
#[derive(Debug, Clone)]
pub struct MultiDual {
    order: usize,
    /// `coeff[s]` is the coefficient of `Π_{i: bit i of s set} ε_i`.
    coeff: Vec<Float>,
}

/// Minimal ring surface shared by plain floats and jets, enough to run the
/// group law and coordinate formulas generically.
pub trait Jet: Clone {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn sqrt_(&self) -> Self;
    fn recip_(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn value_f64(&self) -> f64;
}

impl Jet for Float {
    fn add(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self * o)
    }
    fn neg(&self) -> Self {
        Float::with_val(self.prec(), -self)
    }
    fn scale(&self, c: f64) -> Self {
        Float::with_val(self.prec(), self * c)
    }
    fn sqrt_(&self) -> Self {
        self.clone().sqrt()
    }
    fn recip_(&self) -> Self {
        self.clone().recip()
    }
    fn zero_like(&self) -> Self {
        fl(self.prec(), 0)
    }
    fn one_like(&self) -> Self {
        fl(self.prec(), 1)
    }
    fn value_f64(&self) -> f64 {
        self.to_f64()
    }
}

impl MultiDual {
    /// Constant jet of order `k`.
    pub fn constant(k: usize, v: Float) -> Self {
        let prec = v.prec();
        let mut coeff = vec![fl(prec, 0); 1 << k];
        coeff[0] = v;
        MultiDual { order: k, coeff }
    }

    /// Jet seeded as the `i`-th variable: value `v`, unit velocity along `ε_i`.
    pub fn variable(k: usize, i: usize, v: Float) -> Self {
        assert!(i < k);
        let prec = v.prec();
        let mut d = Self::constant(k, v);
        d.coeff[1 << i] = fl(prec, 1);
        d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn prec(&self) -> u32 {
        self.coeff[0].prec()
    }

    /// The scalar part `c_∅`.
    pub fn value(&self) -> &Float {
        &self.coeff[0]
    }

    /// Coefficient of the full product `ε_1⋯ε_k`, i.e. the mixed derivative.
    pub fn mixed(&self) -> &Float {
        &self.coeff[self.coeff.len() - 1]
    }

    pub fn coefficient(&self, mask: usize) -> &Float {
        &self.coeff[mask]
    }

    pub fn scale_float(&self, c: &Float) -> Self {
        let coeff = self.coeff.iter().map(|a| Float::with_val(a.prec(), a * c)).collect();
        MultiDual { order: self.order, coeff }
    }

    pub fn add_float(&self, c: &Float) -> Self {
        let mut out = self.clone();
        out.coeff[0] += c;
        out
    }

    /// Post-composition with a smooth univariate `g`, supplied through its
    /// derivative values `derivs[j] = g^{(j)}(value)` for `j = 0..=order`.
    pub fn postcompose(&self, derivs: &[Float]) -> Self {
        assert!(derivs.len() > self.order);
        let prec = self.prec();
        let mut nil = self.clone();
        nil.coeff[0] = fl(prec, 0);
        let mut acc = Self::constant(self.order, derivs[0].clone());
        let mut pow = Self::constant(self.order, fl(prec, 1));
        let mut factorial = fl(prec, 1);
        for j in 1..=self.order {
            pow = pow.mul(&nil);
            factorial *= j as u64;
            let c = Float::with_val(prec, &derivs[j] / &factorial);
            acc = acc.add(&pow.scale_float(&c));
        }
        acc
    }

    /// `exp` of the jet.
    pub fn exp_(&self) -> Self {
        let e = self.value().clone().exp();
        let derivs = vec![e; self.order + 1];
        self.postcompose(&derivs)
    }

    /// `ln` of the jet (value must be positive).
    pub fn ln_(&self) -> Self {
        let prec = self.prec();
        let v = self.value();
        let mut derivs = Vec::with_capacity(self.order + 1);
        derivs.push(v.clone().ln());
        // g^(j) = (-1)^{j-1} (j-1)! v^{-j}
        let inv = v.clone().recip();
        let mut p = inv.clone();
        let mut fact = fl(prec, 1);
        for j in 1..=self.order {
            if j > 1 {
                fact *= (j - 1) as u64;
                p *= &inv;
            }
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            derivs.push(Float::with_val(prec, &p * &fact) * sign);
        }
        self.postcompose(&derivs)
    }

    /// Real power `value^alpha` of the jet (value must be positive).
    pub fn pow_f(&self, alpha: &Float) -> Self {
        let prec = self.prec();
        let v = self.value();
        let mut derivs = Vec::with_capacity(self.order + 1);
        let mut factor = fl(prec, 1);
        for j in 0..=self.order {
            if j > 0 {
                factor *= Float::with_val(prec, alpha - (j as i64 - 1));
            }
            let e = Float::with_val(prec, alpha - j as i64);
            let p = v.clone().pow(e);
            derivs.push(Float::with_val(prec, &factor * &p));
        }
        self.postcompose(&derivs)
    }

    /// `arcosh` of the jet, via `ln(x + sqrt(x² − 1))`; requires value > 1.
    pub fn acosh_(&self) -> Self {
        let one = Self::constant(self.order, fl(self.prec(), 1));
        let s = self.mul(self).sub(&one).sqrt_();
        self.add(&s).ln_()
    }
}

impl Jet for MultiDual {
    fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.order, o.order);
        let coeff = self
            .coeff
            .iter()
            .zip(&o.coeff)
            .map(|(a, b)| Float::with_val(a.prec(), a + b))
            .collect();
        MultiDual { order: self.order, coeff }
    }

    fn sub(&self, o: &Self) -> Self {
        let coeff = self
            .coeff
            .iter()
            .zip(&o.coeff)
            .map(|(a, b)| Float::with_val(a.prec(), a - b))
            .collect();
        MultiDual { order: self.order, coeff }
    }

    fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.order, o.order);
        let prec = self.prec();
        let n = self.coeff.len();
        let mut coeff = vec![fl(prec, 0); n];
        // ε_i² = 0: only disjoint index sets multiply.
        for (s, out) in coeff.iter_mut().enumerate() {
            let mut t = s;
            loop {
                if !self.coeff[t].is_zero() {
                    let other = &o.coeff[s & !t];
                    if !other.is_zero() {
                        *out += Float::with_val(prec, &self.coeff[t] * other);
                    }
                }
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
        }
        MultiDual { order: self.order, coeff }
    }

    fn neg(&self) -> Self {
        let coeff = self.coeff.iter().map(|a| Float::with_val(a.prec(), -a)).collect();
        MultiDual { order: self.order, coeff }
    }

    fn scale(&self, c: f64) -> Self {
        let coeff = self.coeff.iter().map(|a| Float::with_val(a.prec(), a * c)).collect();
        MultiDual { order: self.order, coeff }
    }

    fn sqrt_(&self) -> Self {
        let prec = self.prec();
        let v = self.value();
        // g^(j) = (1/2)(1/2 - 1)…(1/2 - j + 1) v^{1/2 - j}
        let mut derivs = Vec::with_capacity(self.order + 1);
        let mut factor = fl(prec, 1);
        for j in 0..=self.order {
            if j > 0 {
                factor *= Float::with_val(prec, 0.5 - (j as f64 - 1.0));
            }
            let e = fl(prec, 0.5 - j as f64);
            derivs.push(Float::with_val(prec, &factor * v.clone().pow(e)));
        }
        self.postcompose(&derivs)
    }

    fn recip_(&self) -> Self {
        let prec = self.prec();
        let v = self.value();
        let inv = v.clone().recip();
        let mut derivs = Vec::with_capacity(self.order + 1);
        let mut p = inv.clone();
        let mut fact = fl(prec, 1);
        derivs.push(inv.clone());
        for j in 1..=self.order {
            p *= &inv;
            fact *= j as u64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            derivs.push(Float::with_val(prec, &p * &fact) * sign);
        }
        self.postcompose(&derivs)
    }

    fn zero_like(&self) -> Self {
        Self::constant(self.order, fl(self.prec(), 0))
    }

    fn one_like(&self) -> Self {
        Self::constant(self.order, fl(self.prec(), 1))
    }

    fn value_f64(&self) -> f64 {
        self.coeff[0].to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(k: usize, i: usize, v: f64) -> MultiDual {
        MultiDual::variable(k, i, fl(113, v))
    }

    #[test]
    fn product_rule_two_directions() {
        // f(s,t) = (2+s)(3+t): d²f/dsdt = 1, df/ds = 3+t at t=0.
        let a = d(2, 0, 2.0);
        let b = d(2, 1, 3.0);
        let f = a.mul(&b);
        assert_eq!(f.value().to_f64(), 6.0);
        assert_eq!(f.coefficient(0b01).to_f64(), 3.0);
        assert_eq!(f.coefficient(0b10).to_f64(), 2.0);
        assert_eq!(f.mixed().to_f64(), 1.0);
    }

    #[test]
    fn exp_of_sum_matches_product() {
        let a = d(2, 0, 0.3);
        let b = d(2, 1, -0.1);
        let lhs = a.add(&b).exp_();
        let rhs = a.exp_().mul(&b.exp_());
        for s in 0..4 {
            let diff = Float::with_val(113, lhs.coefficient(s) - rhs.coefficient(s));
            assert!(diff.abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn reciprocal_and_sqrt_invert() {
        let a = d(3, 1, 1.7).add(&d(3, 0, 0.0)).add(&d(3, 2, 0.0));
        let r = a.recip_();
        let prod = a.mul(&r);
        assert!((prod.value().to_f64() - 1.0).abs() < 1e-30);
        for s in 1..8 {
            assert!(prod.coefficient(s).clone().abs().to_f64() < 1e-28);
        }
        let s2 = a.sqrt_().mul(&a.sqrt_());
        for s in 0..8 {
            let diff = Float::with_val(113, s2.coefficient(s) - a.coefficient(s));
            assert!(diff.abs().to_f64() < 1e-28);
        }
    }

    #[test]
    fn acosh_undoes_cosh_profile() {
        // cosh composed through its jet: x = cosh(0.8 + ε), acosh(x) ≈ 0.8 + ε.
        let t = d(1, 0, 0.8);
        let e1 = t.exp_();
        let e2 = t.neg().exp_();
        let x = e1.add(&e2).scale(0.5);
        let back = x.acosh_();
        assert!((back.value().to_f64() - 0.8).abs() < 1e-30);
        assert!((back.coefficient(1).to_f64() - 1.0).abs() < 1e-25);
    }
}
