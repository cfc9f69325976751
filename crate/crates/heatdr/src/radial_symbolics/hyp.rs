//! Exact radial expressions: rational functions in `u = e^{r/2}` whose
//! numerators carry polynomial coefficients in `r`.
//!
//! The ring is closed under `+`, `×` and `d/dr` (`dr ↦ 1`, `du/dr = u/2`),
//! and contains `sinh r`, `cosh r`, `sinh(r/2)`, `cosh(r/2)` exactly, so all
//! half-angle and full-angle radial expressions embed without relations.
//! Denominators never involve `r`; every constructor keeps expressions in a
//! canonical form (numerator/denominator coprime, denominator with lowest
//! exponent 0 and leading coefficient 1).

use num_traits::{One, Zero};
use rug::Float;
use std::fmt;

use super::laurent::{rat, LPoly, Rat};
use crate::error::{Error, Result};
use crate::real::{fl, rat_to_float};

/// Polynomial in `r` with Laurent-polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RPoly {
    /// `coeffs[i]` multiplies `r^i`.
    coeffs: Vec<LPoly>,
}

impl RPoly {
    pub fn zero() -> Self {
        RPoly { coeffs: Vec::new() }
    }

    pub fn from_lpoly(l: LPoly) -> Self {
        if l.is_zero() {
            Self::zero()
        } else {
            RPoly { coeffs: vec![l] }
        }
    }

    pub fn r_pow(e: usize) -> Self {
        let mut coeffs = vec![LPoly::zero(); e + 1];
        coeffs[e] = LPoly::one();
        RPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coefficient(&self, i: usize) -> LPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(LPoly::zero)
    }

    pub fn coefficients(&self) -> &[LPoly] {
        &self.coeffs
    }

    fn normalize(mut self) -> Self {
        while self.coeffs.last().is_some_and(LPoly::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coefficient(i).add(&o.coefficient(i)));
        }
        (RPoly { coeffs }).normalize()
    }

    pub fn neg(&self) -> Self {
        RPoly { coeffs: self.coeffs.iter().map(LPoly::neg).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![LPoly::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        (RPoly { coeffs }).normalize()
    }

    pub fn mul_lpoly(&self, l: &LPoly) -> Self {
        (RPoly { coeffs: self.coeffs.iter().map(|c| c.mul(l)).collect() }).normalize()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        (RPoly { coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }).normalize()
    }

    /// `d/dr`, acting on both the explicit `r` powers and the `u` content.
    pub fn deriv_r(&self) -> Self {
        let mut coeffs = vec![LPoly::zero(); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] = coeffs[i].add(&c.deriv_r());
            if i > 0 {
                coeffs[i - 1] = coeffs[i - 1].add(&c.scale(&rat(i as i64, 1)));
            }
        }
        (RPoly { coeffs }).normalize()
    }

    pub fn eval(&self, r: &Float, u: &Float) -> Float {
        let prec = r.prec();
        let mut acc = fl(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= r;
            if !c.is_zero() {
                acc += c.eval(u);
            }
        }
        acc
    }

    /// Taylor coefficients at `r = 0` up to order `len - 1`.
    pub fn taylor_at_zero(&self, len: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i >= len || c.is_zero() {
                continue;
            }
            let t = c.taylor_at_zero(len - i);
            for (s, v) in t.into_iter().enumerate() {
                out[i + s] += v;
            }
        }
        out
    }
}

/// Exact symbolic radial expression `num(r, u) / den(u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypExpr {
    num: RPoly,
    den: LPoly,
}

impl HypExpr {
    pub fn zero() -> Self {
        HypExpr { num: RPoly::zero(), den: LPoly::one() }
    }

    pub fn one() -> Self {
        HypExpr { num: RPoly::from_lpoly(LPoly::one()), den: LPoly::one() }
    }

    pub fn constant(c: Rat) -> Self {
        HypExpr { num: RPoly::from_lpoly(LPoly::constant(c)), den: LPoly::one() }
    }

    pub fn from_lpoly(l: LPoly) -> Self {
        HypExpr { num: RPoly::from_lpoly(l), den: LPoly::one() }
    }

    pub fn from_rpoly(p: RPoly) -> Self {
        HypExpr { num: p, den: LPoly::one() }
    }

    pub fn r_pow(e: usize) -> Self {
        HypExpr { num: RPoly::r_pow(e), den: LPoly::one() }
    }

    pub fn sinh_r() -> Self {
        Self::from_lpoly(LPoly::sinh_r())
    }

    pub fn cosh_r() -> Self {
        Self::from_lpoly(LPoly::cosh_r())
    }

    pub fn sinh_half() -> Self {
        Self::from_lpoly(LPoly::sinh_half())
    }

    pub fn cosh_half() -> Self {
        Self::from_lpoly(LPoly::cosh_half())
    }

    /// `p_{a,b}(r) = sinh^a r · cosh^b r`.
    pub fn p_ab(a: usize, b: usize) -> Self {
        Self::from_lpoly(LPoly::sinh_r().pow(a).mul(&LPoly::cosh_r().pow(b)))
    }

    pub fn numerator(&self) -> &RPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Canonical form: divide out the gcd of numerator content and
    /// denominator, shift `u`-powers so the denominator starts at `u^0`, and
    /// scale the denominator monic.
    fn reduced(num: RPoly, den: LPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let mut g = den.clone();
        for c in num.coefficients() {
            if g.degree_range().map(|(lo, hi)| hi - lo) == Some(0) {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        let (mut num, mut den) = if g.degree_range().map(|(lo, hi)| hi - lo) == Some(0) {
            (num, den)
        } else {
            let nn = RPoly {
                coeffs: num
                    .coefficients()
                    .iter()
                    .map(|c| {
                        if c.is_zero() {
                            LPoly::zero()
                        } else {
                            c.div_exact(&g).expect("gcd divides numerator")
                        }
                    })
                    .collect(),
            }
            .normalize();
            (nn, den.div_exact(&g).expect("gcd divides denominator"))
        };
        // normalize units: denominator lowest exponent 0, leading coefficient 1
        let (dlo, _) = den.degree_range().unwrap();
        if dlo != 0 {
            den = den.mul_upow(-dlo);
            num = RPoly {
                coeffs: num.coefficients().iter().map(|c| c.mul_upow(-dlo)).collect(),
            }
            .normalize();
        }
        let lead = den.leading_coefficient();
        if !lead.is_one() {
            let inv = Rat::one() / lead;
            den = den.scale(&inv);
            num = num.scale(&inv);
        }
        HypExpr { num, den }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::reduced(self.num.add(&o.num), self.den.clone());
        }
        let num = self.num.mul_lpoly(&o.den).add(&o.num.mul_lpoly(&self.den));
        Self::reduced(num, self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        HypExpr { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::reduced(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        HypExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Division by an `r`-free expression.
    pub fn div(&self, o: &Self) -> Self {
        assert!(
            o.num.degree() == Some(0),
            "division is only defined by r-free expressions"
        );
        let num = self.num.mul_lpoly(&o.den);
        Self::reduced(num, self.den.mul(&o.num.coefficient(0)))
    }

    pub fn div_lpoly(&self, d: &LPoly) -> Self {
        Self::reduced(self.num.clone(), self.den.mul(d))
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// `d/dr` by the quotient rule (the denominator is `r`-free but carries
    /// `u` content, so its derivative matters).
    pub fn deriv(&self) -> Self {
        let dden = self.den.deriv_r();
        let num = self
            .num
            .deriv_r()
            .mul_lpoly(&self.den)
            .sub(&self.num.mul_lpoly(&dden));
        Self::reduced(num, self.den.mul(&self.den))
    }

    /// Exact equality as rational functions (cross-multiplied).
    pub fn equivalent(&self, o: &Self) -> bool {
        self.num.mul_lpoly(&o.den) == o.num.mul_lpoly(&self.den)
    }

    /// Taylor expansion of the expression at `r = 0`, `len` coefficients.
    ///
    /// Returns `Err(PoleAtPoint)` when the denominator vanishes at `u = 1` to
    /// higher order than the numerator.
    pub fn taylor_at_zero(&self, len: usize) -> Result<Vec<Rat>> {
        if self.is_zero() {
            return Ok(vec![Rat::zero(); len]);
        }
        let probe = len + 48;
        let dt = self.den.taylor_at_zero(probe);
        let d_ord = match dt.iter().position(|c| !c.is_zero()) {
            Some(p) => p,
            None => return Err(Error::PoleAtPoint(0.0)),
        };
        let nt = self.num.taylor_at_zero(probe + d_ord);
        let n_ord = nt.iter().position(|c| !c.is_zero());
        let n_ord = match n_ord {
            Some(p) => p,
            None => return Ok(vec![Rat::zero(); len]),
        };
        if n_ord < d_ord {
            return Err(Error::PoleAtPoint(0.0));
        }
        // divide shifted series
        let shift = n_ord - d_ord;
        let dt: Vec<Rat> = dt[d_ord..].to_vec();
        let nt: Vec<Rat> = nt[n_ord..].to_vec();
        let mut q = vec![Rat::zero(); len];
        let mut rem = nt;
        for (s, slot) in q.iter_mut().enumerate().skip(shift) {
            let k = s - shift;
            if k >= rem.len() {
                break;
            }
            let c = &rem[k] / &dt[0];
            for (j, d) in dt.iter().enumerate() {
                if k + j < rem.len() {
                    let t = d * &c;
                    rem[k + j] -= t;
                }
            }
            *slot = c;
        }
        Ok(q)
    }

    /// Order of vanishing at `r = 0` (`None` for the zero expression).
    pub fn vanishing_order(&self, max_probe: usize) -> Result<Option<usize>> {
        if self.is_zero() {
            return Ok(None);
        }
        let t = self.taylor_at_zero(max_probe + 1)?;
        Ok(t.iter().position(|c| !c.is_zero()))
    }

    /// Exact limit at `r → 0⁺` (removable singularities allowed).
    pub fn value_at_zero(&self) -> Result<Rat> {
        Ok(self.taylor_at_zero(1)?.remove(0))
    }

    /// Evaluate at `r ≥ 0`; removable singularities at `r = 0` (and the
    /// ill-conditioned region next to it) go through the exact Taylor
    /// expansion.
    pub fn eval(&self, r: &Float) -> Result<Float> {
        let prec = r.prec();
        if r.to_f64() < TAYLOR_SWITCH {
            match self.taylor_at_zero(taylor_len(prec)) {
                Ok(tay) => {
                    let mut acc = fl(prec, 0);
                    for c in tay.iter().rev() {
                        acc *= r;
                        if !c.is_zero() {
                            acc += rat_to_float(prec, c);
                        }
                    }
                    return Ok(acc);
                }
                Err(_) if !r.is_zero() => {} // genuine pole at 0: direct eval is fine away from it
                Err(e) => return Err(e),
            }
        }
        let u = Float::with_val(prec, r / 2u32).exp();
        let den = self.den.eval(&u);
        if den.is_zero() {
            return Err(Error::PoleAtPoint(r.to_f64()));
        }
        Ok(self.num.eval(r, &u) / den)
    }

    /// Precision-compiled form for repeated numeric evaluation.
    ///
    /// Direct evaluation of `num/den` is catastrophically ill-conditioned
    /// near `u = 1` when both vanish to high order there, so expressions
    /// without a genuine pole at `r = 0` also carry a truncated Taylor
    /// expansion and switch to it for small `r`. The nearest complex
    /// singularity of the hyperbolic generators is at `|r| = π`, which makes
    /// the truncation error below the switch radius negligible at any
    /// working precision matched by [`taylor_len`].
    pub fn compile(&self, prec: u32) -> CompiledHyp {
        let num = self
            .num
            .coefficients()
            .iter()
            .map(|l| CompiledL::from_lpoly(l, prec))
            .collect();
        let taylor = self
            .taylor_at_zero(taylor_len(prec))
            .ok()
            .map(|t| t.iter().map(|c| rat_to_float(prec, c)).collect());
        CompiledHyp { num, den: CompiledL::from_lpoly(&self.den, prec), taylor }
    }

    /// Deterministic canonical text: `r`-graded numerator over denominator.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.num.coefficients().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let body = c.render();
            match i {
                0 => parts.push(format!("({body})")),
                1 => parts.push(format!("({body})*r")),
                _ => parts.push(format!("({body})*r^{i}")),
            }
        }
        let num = parts.join(" + ");
        if self.den == LPoly::one() {
            num
        } else {
            format!("[{num}] / [{}]", self.den.render())
        }
    }
}

impl fmt::Display for HypExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Laurent polynomial with float coefficients, dense over its exponent span.
#[derive(Debug, Clone)]
pub struct CompiledL {
    lo: i64,
    coeffs: Vec<Float>,
}

impl CompiledL {
    fn from_lpoly(l: &LPoly, prec: u32) -> Self {
        match l.degree_range() {
            None => CompiledL { lo: 0, coeffs: Vec::new() },
            Some((lo, hi)) => {
                let coeffs = (lo..=hi)
                    .map(|m| rat_to_float(prec, &l.coefficient(m)))
                    .collect();
                CompiledL { lo, coeffs }
            }
        }
    }

    fn eval(&self, u: &Float, prec: u32) -> Float {
        let mut acc = fl(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= u;
            acc += c;
        }
        acc * crate::real::powi(u, self.lo)
    }
}

/// Switch radius below which compiled evaluation uses the Taylor branch.
pub const TAYLOR_SWITCH: f64 = 0.5;

/// Taylor length keeping the truncation error below `2^{-prec}` at the
/// switch radius (`(0.5/π)^len` decay).
pub fn taylor_len(prec: u32) -> usize {
    prec as usize / 3 + 16
}

/// A compiled [`HypExpr`]: float coefficients at one precision.
#[derive(Debug, Clone)]
pub struct CompiledHyp {
    num: Vec<CompiledL>,
    den: CompiledL,
    /// Taylor coefficients at `r = 0`; absent when the expression has a pole.
    taylor: Option<Vec<Float>>,
}

impl CompiledHyp {
    /// Evaluate at `r ≥ 0` with `u = e^{r/2}` supplied by the caller.
    pub fn eval_with_u(&self, r: &Float, u: &Float) -> Float {
        let prec = r.prec();
        if let Some(tay) = &self.taylor {
            if r.to_f64() < TAYLOR_SWITCH {
                let mut acc = fl(prec, 0);
                for c in tay.iter().rev() {
                    acc *= r;
                    acc += c;
                }
                return acc;
            }
        }
        let mut acc = fl(prec, 0);
        for c in self.num.iter().rev() {
            acc *= r;
            if !c.coeffs.is_empty() {
                acc += c.eval(u, prec);
            }
        }
        acc / self.den.eval(u, prec)
    }

    pub fn eval(&self, r: &Float) -> Float {
        let u = Float::with_val(r.prec(), r / 2u32).exp();
        self.eval_with_u(r, &u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rel_diff;

    fn as_f64(e: &HypExpr, r: f64) -> f64 {
        e.eval(&fl(113, r)).unwrap().to_f64()
    }

    #[test]
    fn derivative_rules() {
        // d/dr (sinh r) = cosh r, exactly
        assert!(HypExpr::sinh_r().deriv().equivalent(&HypExpr::cosh_r()));
        // d/dr (r·u) = u + r·u/2, exactly
        let u = HypExpr::from_lpoly(LPoly::term(Rat::one(), 1));
        let ru = HypExpr::r_pow(1).mul(&u);
        let want = u.add(&HypExpr::r_pow(1).mul(&u).scale(&rat(1, 2)));
        assert!(ru.deriv().equivalent(&want));
        // d/dr p_{a,b} = a p_{a-1,b+1} + b p_{a+1,b-1} at (a,b) = (2,3)
        let lhs = HypExpr::p_ab(2, 3).deriv();
        let rhs = HypExpr::p_ab(1, 4).scale(&rat(2, 1)).add(&HypExpr::p_ab(3, 2).scale(&rat(3, 1)));
        assert!(lhs.equivalent(&rhs));
    }

    #[test]
    fn quotient_rule_against_numeric() {
        // d/dr [ r² / sinh(r/2) ] checked numerically at a point
        let e = HypExpr::r_pow(2).div_lpoly(&LPoly::sinh_half());
        let de = e.deriv();
        let r = 0.9f64;
        let h = 1e-6;
        let fd = (as_f64(&e, r + h) - as_f64(&e, r - h)) / (2.0 * h);
        assert!((de.eval(&fl(113, r)).unwrap().to_f64() - fd).abs() < 1e-8);
    }

    #[test]
    fn removable_singularity_at_zero() {
        // r / (2 sinh r) → 1/2
        let e = HypExpr::r_pow(1).div_lpoly(&LPoly::sinh_r().scale(&rat(2, 1)));
        assert_eq!(e.value_at_zero().unwrap(), rat(1, 2));
        // sinh² r at r = 1
        let s2 = HypExpr::p_ab(2, 0);
        let v = s2.eval(&fl(113, 1)).unwrap();
        let want = fl(113, 1).sinh().square();
        assert!(rel_diff(&v, &want).to_f64() < 1e-15);
        // true pole: 1 / sinh r at r = 0
        let pole = HypExpr::one().div_lpoly(&LPoly::sinh_r());
        assert!(matches!(pole.value_at_zero(), Err(Error::PoleAtPoint(_))));
    }

    #[test]
    fn theta_small_factor_limits() {
        // the u-content of the Θ factor: r e^{r/2} / (2 sinh(r/2)) → 1 at 0;
        // divided by (1 + r) it also → 1 at ∞.
        let num = RPoly::r_pow(1).mul_lpoly(&LPoly::term(Rat::one(), 1));
        let e = HypExpr { num, den: LPoly::one() }.div_lpoly(&LPoly::sinh_half().scale(&rat(2, 1)));
        assert_eq!(e.value_at_zero().unwrap(), Rat::one());
        // r e^{r/2} / (2 sinh(r/2)) = r (1 + e^{-r} + …): approaches r like e^{-r}
        let r = fl(113, 60);
        let v = e.eval(&r).unwrap() / &r;
        assert!((v.to_f64() - 1.0).abs() < 1e-20);
    }

    #[test]
    fn canonical_form_reduces() {
        // (sinh r · r) / sinh r reduces to r with denominator 1
        let e = HypExpr::sinh_r().mul(&HypExpr::r_pow(1)).div_lpoly(&LPoly::sinh_r());
        assert_eq!(e, HypExpr::r_pow(1));
        // canonical text of cosh r
        assert_eq!(HypExpr::cosh_r().render(), "(1/2*u^-2 + 1/2*u^2)");
    }

    #[test]
    fn compiled_matches_exact_eval() {
        let e = HypExpr::p_ab(2, 1)
            .add(&HypExpr::r_pow(3).div_lpoly(&LPoly::sinh_half()))
            .mul(&HypExpr::cosh_half());
        let c = e.compile(113);
        for r in [0.01, 0.5, 1.0, 7.3, 40.0] {
            let rf = fl(113, r);
            let a = e.eval(&rf).unwrap();
            let b = c.eval(&rf);
            assert!(rel_diff(&a, &b).to_f64() < 1e-30);
        }
    }

    #[test]
    fn taylor_division() {
        // cosh r / cosh(r/2): value 1 at 0, second order (1/2 - 1/8)·r² = 3/8 r²
        let e = HypExpr::cosh_r().div_lpoly(&LPoly::cosh_half());
        let t = e.taylor_at_zero(3).unwrap();
        assert_eq!(t[0], Rat::one());
        assert_eq!(t[1], Rat::zero());
        assert_eq!(t[2], rat(3, 8));
    }
}
