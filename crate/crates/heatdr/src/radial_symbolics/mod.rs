//! Exact symbolic calculus for radial expressions.
//!
//! Everything here is exact-rational: the ring [`HypExpr`] of rational
//! functions in `u = e^{r/2}` with `r`-polynomial numerators, the radial
//! derivative tables `f_{j,k}`, the Gaussian-shift coefficients `a_j`, and
//! symbolic powers of the radial Laplacian. Floating point enters only at the
//! evaluation boundary ([`eval_hyp`] and [`HypExpr::compile`]).

mod expansions;
mod hyp;
mod laurent;

pub use expansions::{
    gaussian_coefficient_bound_check, gaussian_shift, radial_drift, radial_expansion,
    radial_laplacian, structural_check, GaussianExpansion, OperatorPoly,
    RadialExpansion, RadialLaplacianExpansion, StructuralReport,
};
pub use hyp::{CompiledHyp, HypExpr, RPoly};
pub use laurent::{rat, LPoly, Rat};

use crate::error::Result;
use rug::Float;

/// `d/dr` on the ring (product/quotient rules exact).
pub fn hyp_differentiate(e: &HypExpr) -> HypExpr {
    e.deriv()
}

/// Evaluates a radial expression at `r ≥ 0` with `precision_bits` working
/// precision; `r = 0` uses the exact removable-singularity limit.
pub fn eval_hyp(e: &HypExpr, r: f64, precision_bits: u32) -> Result<Float> {
    e.eval(&Float::with_val(precision_bits, r))
}

#[cfg(test)]
mod eval_tests {
    use super::*;
    use crate::real::fl;

    #[test]
    fn eval_hyp_examples() {
        // removable singularity: r/(2 sinh r) -> 1/2 at r = 0
        let e = HypExpr::r_pow(1).div_lpoly(&LPoly::sinh_r().scale(&rat(2, 1)));
        assert_eq!(eval_hyp(&e, 0.0, 113).unwrap().to_f64(), 0.5);
        // sinh² at r = 1 to full precision
        let v = eval_hyp(&HypExpr::p_ab(2, 0), 1.0, 113).unwrap();
        let want = fl(113, 1).sinh().square();
        assert!(crate::real::rel_diff(&v, &want).to_f64() < 1e-15);
        // a genuine pole reports as such at the pole only
        let pole = HypExpr::one().div_lpoly(&LPoly::sinh_r());
        assert!(eval_hyp(&pole, 0.0, 113).is_err());
        assert!(eval_hyp(&pole, 0.3, 113).is_ok());
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_expr() -> impl Strategy<Value = HypExpr> {
        // sums of c · r^i · u^m / den with den drawn from the hyperbolic gens
        let term = (small_rat(), 0usize..3, -3i64..=3).prop_map(|(c, i, m)| {
            HypExpr::r_pow(i).mul(&HypExpr::from_lpoly(LPoly::term(c, m)))
        });
        let den = prop_oneof![
            Just(LPoly::one()),
            Just(LPoly::sinh_half()),
            Just(LPoly::cosh_half()),
            Just(LPoly::sinh_r()),
        ];
        (proptest::collection::vec(term, 1..4), den)
            .prop_map(|(ts, d)| ts.into_iter().fold(HypExpr::zero(), |a, b| a.add(&b)).div_lpoly(&d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_laws(a in arb_expr(), b in arb_expr(), c in arb_expr()) {
            let assoc_l = a.mul(&b).mul(&c);
            let assoc_r = a.mul(&b.mul(&c));
            prop_assert!(assoc_l.equivalent(&assoc_r));
            let dist_l = a.mul(&b.add(&c));
            let dist_r = a.mul(&b).add(&a.mul(&c));
            prop_assert!(dist_l.equivalent(&dist_r));
        }

        #[test]
        fn derivation_is_leibniz(a in arb_expr(), b in arb_expr()) {
            let lhs = a.mul(&b).deriv();
            let rhs = a.deriv().mul(&b).add(&a.mul(&b.deriv()));
            prop_assert!(lhs.equivalent(&rhs));
        }

        #[test]
        fn derivative_commutes_with_canonicalization(a in arb_expr(), b in arb_expr()) {
            // the same rational function assembled two ways has one derivative
            let sum = a.add(&b);
            let via_parts = a.deriv().add(&b.deriv());
            prop_assert!(sum.deriv().equivalent(&via_parts));
        }
    }
}
