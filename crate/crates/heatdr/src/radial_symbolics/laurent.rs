//! Laurent polynomials in `u = e^{r/2}` with exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rug::Float;
use std::fmt;

use crate::real::rat_to_float;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// A Laurent polynomial `Σ_i c_i u^{lo + i}` over `ℚ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPoly {
    lo: i64,
    coeffs: Vec<Rat>,
}

impl LPoly {
    pub fn zero() -> Self {
        LPoly { lo: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::term(Rat::one(), 0)
    }

    pub fn constant(c: Rat) -> Self {
        Self::term(c, 0)
    }

    /// `c · u^m`.
    pub fn term(c: Rat, m: i64) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            LPoly { lo: m, coeffs: vec![c] }
        }
    }

    /// `sinh r = (u² - u⁻²)/2`.
    pub fn sinh_r() -> Self {
        LPoly { lo: -2, coeffs: vec![rat(-1, 2), Rat::zero(), Rat::zero(), Rat::zero(), rat(1, 2)] }
    }

    /// `cosh r = (u² + u⁻²)/2`.
    pub fn cosh_r() -> Self {
        LPoly { lo: -2, coeffs: vec![rat(1, 2), Rat::zero(), Rat::zero(), Rat::zero(), rat(1, 2)] }
    }

    /// `sinh(r/2) = (u - u⁻¹)/2`.
    pub fn sinh_half() -> Self {
        LPoly { lo: -1, coeffs: vec![rat(-1, 2), Rat::zero(), rat(1, 2)] }
    }

    /// `cosh(r/2) = (u + u⁻¹)/2`.
    pub fn cosh_half() -> Self {
        LPoly { lo: -1, coeffs: vec![rat(1, 2), Rat::zero(), rat(1, 2)] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest and highest exponents; `None` for the zero polynomial.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        if self.is_zero() {
            None
        } else {
            Some((self.lo, self.lo + self.coeffs.len() as i64 - 1))
        }
    }

    pub fn coefficient(&self, m: i64) -> Rat {
        if self.is_zero() || m < self.lo {
            return Rat::zero();
        }
        let idx = (m - self.lo) as usize;
        self.coeffs.get(idx).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading_coefficient(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    fn normalize(mut self) -> Self {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let drop = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if drop > 0 {
            self.coeffs.drain(..drop);
            self.lo += drop as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(o.lo);
        let hi = (self.lo + self.coeffs.len() as i64).max(o.lo + o.coeffs.len() as i64);
        let mut coeffs = vec![Rat::zero(); (hi - lo) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.lo - lo) as usize + i] += c;
        }
        for (i, c) in o.coeffs.iter().enumerate() {
            coeffs[(o.lo - lo) as usize + i] += c;
        }
        (LPoly { lo, coeffs }).normalize()
    }

    pub fn neg(&self) -> Self {
        LPoly { lo: self.lo, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        (LPoly { lo: self.lo + o.lo, coeffs }).normalize()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LPoly { lo: self.lo, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul_upow(&self, m: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LPoly { lo: self.lo + m, coeffs: self.coeffs.clone() }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// `d/dr` under `du/dr = u/2`: maps `u^m ↦ (m/2) u^m`.
    pub fn deriv_r(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * rat(self.lo + i as i64, 2))
            .collect();
        (LPoly { lo: self.lo, coeffs }).normalize()
    }

    /// Exact division; `None` if the division leaves a remainder.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero Laurent polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.coeffs.len() < d.coeffs.len() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let qlen = self.coeffs.len() - d.coeffs.len() + 1;
        let mut q = vec![Rat::zero(); qlen];
        let dlead = d.coeffs.last().unwrap();
        for k in (0..qlen).rev() {
            let c = &rem[k + d.coeffs.len() - 1] / dlead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let t = dc * &c;
                    rem[k + j] -= t;
                }
            }
            q[k] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some((LPoly { lo: self.lo - d.lo, coeffs: q }).normalize())
    }

    /// Monic gcd, treating both as ordinary polynomials (exponent shifts are
    /// units in the Laurent ring and are ignored).
    pub fn gcd(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.monic();
        }
        if o.is_zero() {
            return self.monic();
        }
        let mut a = self.clone().shift_to_zero();
        let mut b = o.clone().shift_to_zero();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.shift_to_zero();
        }
        a.monic()
    }

    fn shift_to_zero(mut self) -> Self {
        if !self.is_zero() {
            self.lo = 0;
        }
        self
    }

    fn rem(&self, d: &Self) -> Self {
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return self.clone();
        }
        let dlead = d.coeffs.last().unwrap();
        for k in (0..=(rem.len() - d.coeffs.len())).rev() {
            let c = &rem[k + d.coeffs.len() - 1] / dlead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    let t = dc * &c;
                    rem[k + j] -= t;
                }
            }
        }
        (LPoly { lo: 0, coeffs: rem }).normalize()
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lead = self.leading_coefficient();
        self.scale(&(Rat::one() / lead))
    }

    /// Evaluate at `u` (a positive float), by Horner on the shifted polynomial.
    pub fn eval(&self, u: &Float) -> Float {
        let prec = u.prec();
        let mut acc = Float::with_val(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= u;
            if !c.is_zero() {
                acc += rat_to_float(prec, c);
            }
        }
        let upow = crate::real::powi(u, self.lo);
        acc * upow
    }

    /// Taylor coefficients in `r` at `r = 0` (with `u = e^{r/2}`), orders `0..len`.
    pub fn taylor_at_zero(&self, len: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = rat(self.lo + i as i64, 2); // u^m -> e^{m r / 2}
            let mut pw = Rat::one();
            for (s, slot) in out.iter_mut().enumerate() {
                *slot += c * &pw;
                pw = pw * &m / Rat::from(BigInt::from(s as i64 + 1));
            }
        }
        out
    }

    /// Deterministic text form `c1*u^a + c2*u^b + …` with ascending exponents.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = self.lo + i as i64;
            let cs = if c.is_integer() { c.numer().to_string() } else { c.to_string() };
            let term = match m {
                0 => cs,
                1 => format!("{cs}*u"),
                _ => format!("{cs}*u^{m}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }

    /// Number of stored coefficients (for conditioning heuristics in tests).
    pub fn terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Largest absolute coefficient as f64 (diagnostics only).
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| {
                let f = rat_to_float(64, &c.abs());
                f.to_f64()
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
