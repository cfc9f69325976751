//! H-type groups and their Damek–Ricci extensions `S = N ⋉ ℝ⁺`.
//!
//! An H-type group is parametrized here by the first-layer dimension `μ`
//! (always even), the center dimension `ν`, and a list of `ν` skew-symmetric
//! `μ×μ` matrices `J_{u_1}, …, J_{u_ν}` satisfying the anticommutation
//! relation `J_{u_i}J_{u_j} + J_{u_j}J_{u_i} = -2δ_{ij}·Id`. Points of the
//! extension `S` are triples `(x, z, a)` with `a > 0`, multiplying as
//!
//! ```text
//! (x,z,a)·(x',z',a') = (x + √a x', z + a z' + ½√a Σ_k (J_{u_k}x, x') u_k, a a').
//! ```
//!
//! The group law is implemented once, generically over the [`Jet`] trait, so
//! the same code path drives plain multiprecision evaluation and the nested
//! jet derivatives used elsewhere in the crate.

use rug::ops::Pow;
use rug::Float;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::multidual::Jet;
use crate::real::fl;

const VALIDATION_TOL: f64 = 1e-12;

/// The algebraic datum of an H-type group together with derived constants.
#[derive(Debug, Clone)]
pub struct HTypeGroup {
    mu: usize,
    nu: usize,
    /// Row-major μ×μ matrices, one per central direction.
    j_maps: Vec<Vec<f64>>,
    /// Sparse form of each `J`: entries `(row, col, value)` with value ≠ 0.
    j_sparse: Vec<Vec<(usize, usize, f64)>>,
}

/// Catalog families with guaranteed constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardFamily {
    /// `μ = 0`, `ν` free: the degenerate case, real hyperbolic space `H^{ν+1}`.
    RealHyperbolic,
    /// `μ = 2m`, `ν = 1` with the standard symplectic matrix.
    Heisenberg,
    /// `μ = 4m`, `ν = 3` from quaternion left multiplication.
    Quaternionic,
}

impl FromStr for StandardFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real_hyperbolic" => Ok(StandardFamily::RealHyperbolic),
            "heisenberg" => Ok(StandardFamily::Heisenberg),
            "quaternionic" => Ok(StandardFamily::Quaternionic),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for StandardFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StandardFamily::RealHyperbolic => "real_hyperbolic",
            StandardFamily::Heisenberg => "heisenberg",
            StandardFamily::Quaternionic => "quaternionic",
        };
        f.write_str(name)
    }
}

/// An element `(x, z, a)` of `S`, with multiprecision coordinates and `a > 0`.
#[derive(Debug, Clone)]
pub struct GroupPoint {
    pub x: Vec<Float>,
    pub z: Vec<Float>,
    pub a: Float,
}

impl GroupPoint {
    pub fn prec(&self) -> u32 {
        self.a.prec()
    }
}

/// Coordinates of a point with entries in any jet ring.
pub struct JetPoint<T: Jet> {
    pub x: Vec<T>,
    pub z: Vec<T>,
    pub a: T,
}

impl HTypeGroup {
    /// Validates and constructs an H-type group from `(μ, ν, J)`.
    ///
    /// `j_maps` holds `ν` row-major `μ×μ` matrices. Checks skewness and the
    /// anticommutation relation entrywise to `1e-12`; entries representable
    /// exactly in `f64` (the catalog groups use only `0, ±1`) validate exactly.
    pub fn new(mu: usize, nu: usize, j_maps: Vec<Vec<f64>>) -> Result<Self> {
        if mu % 2 != 0 {
            return Err(Error::OddMu(mu));
        }
        if nu == 0 {
            return Err(Error::BadParameter(0));
        }
        if mu == 0 {
            if !j_maps.is_empty() {
                return Err(Error::DimensionMismatch(
                    "mu = 0 requires an empty list of J matrices".into(),
                ));
            }
        } else {
            if j_maps.len() != nu {
                return Err(Error::DimensionMismatch(format!(
                    "expected {} J matrices, got {}",
                    nu,
                    j_maps.len()
                )));
            }
            for (k, m) in j_maps.iter().enumerate() {
                if m.len() != mu * mu {
                    return Err(Error::DimensionMismatch(format!(
                        "J_{} must be {}x{} row-major",
                        k + 1,
                        mu,
                        mu
                    )));
                }
                for i in 0..mu {
                    for j in 0..mu {
                        if (m[i * mu + j] + m[j * mu + i]).abs() > VALIDATION_TOL {
                            return Err(Error::NotSkew(k + 1));
                        }
                    }
                }
            }
            // J_i J_j + J_j J_i = -2 δ_ij Id
            for ki in 0..nu {
                for kj in ki..nu {
                    for row in 0..mu {
                        for col in 0..mu {
                            let mut s = 0.0;
                            for p in 0..mu {
                                s += j_maps[ki][row * mu + p] * j_maps[kj][p * mu + col];
                                s += j_maps[kj][row * mu + p] * j_maps[ki][p * mu + col];
                            }
                            let want = if ki == kj && row == col { -2.0 } else { 0.0 };
                            if (s - want).abs() > VALIDATION_TOL {
                                return Err(Error::NotCliffordAnticommuting(ki + 1, kj + 1));
                            }
                        }
                    }
                }
            }
        }
        let j_sparse = if mu == 0 {
            vec![Vec::new(); nu]
        } else {
            j_maps
                .iter()
                .map(|m| {
                    let mut entries = Vec::new();
                    for i in 0..mu {
                        for j in 0..mu {
                            if m[i * mu + j] != 0.0 {
                                entries.push((i, j, m[i * mu + j]));
                            }
                        }
                    }
                    entries
                })
                .collect()
        };
        Ok(HTypeGroup { mu, nu, j_maps, j_sparse })
    }

    /// Constructor for the catalog families.
    pub fn standard(family: StandardFamily, m: i64) -> Result<Self> {
        if m < 1 {
            return Err(Error::BadParameter(m));
        }
        let m = m as usize;
        match family {
            StandardFamily::RealHyperbolic => Self::new(0, m, Vec::new()),
            StandardFamily::Heisenberg => {
                // Standard symplectic matrix on ℝ^{2m}.
                let mu = 2 * m;
                let mut j = vec![0.0; mu * mu];
                for i in 0..m {
                    j[i * mu + (m + i)] = -1.0;
                    j[(m + i) * mu + i] = 1.0;
                }
                Self::new(mu, 1, vec![j])
            }
            StandardFamily::Quaternionic => {
                // Left multiplication by i, j, k on ℍ^m ≅ ℝ^{4m}.
                let mu = 4 * m;
                let li: [[f64; 4]; 4] = [
                    [0.0, -1.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, -1.0],
                    [0.0, 0.0, 1.0, 0.0],
                ];
                let lj: [[f64; 4]; 4] = [
                    [0.0, 0.0, -1.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0],
                    [1.0, 0.0, 0.0, 0.0],
                    [0.0, -1.0, 0.0, 0.0],
                ];
                let lk: [[f64; 4]; 4] = [
                    [0.0, 0.0, 0.0, -1.0],
                    [0.0, 0.0, -1.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0, 0.0],
                ];
                let mut maps = Vec::with_capacity(3);
                for block in [li, lj, lk] {
                    let mut full = vec![0.0; mu * mu];
                    for b in 0..m {
                        for r in 0..4 {
                            for c in 0..4 {
                                full[(4 * b + r) * mu + (4 * b + c)] = block[r][c];
                            }
                        }
                    }
                    maps.push(full);
                }
                Self::new(mu, 3, maps)
            }
        }
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Dimension `n = μ + ν + 1` of `S`.
    pub fn dim(&self) -> usize {
        self.mu + self.nu + 1
    }

    /// `2Q = μ + 2ν` (twice half the homogeneous dimension of `N`).
    pub fn two_q(&self) -> u32 {
        (self.mu + 2 * self.nu) as u32
    }

    pub fn q_f64(&self) -> f64 {
        self.two_q() as f64 / 2.0
    }

    pub fn q(&self, prec: u32) -> Float {
        fl(prec, self.two_q()) / 2u32
    }

    pub fn j_entry(&self, k: usize, row: usize, col: usize) -> f64 {
        self.j_maps[k][row * self.mu + col]
    }

    /// The identity `e = (0, 0, 1)`.
    pub fn identity(&self, prec: u32) -> GroupPoint {
        GroupPoint {
            x: vec![fl(prec, 0); self.mu],
            z: vec![fl(prec, 0); self.nu],
            a: fl(prec, 1),
        }
    }

    /// Builds a point from `f64` coordinates, checking dimensions and `a > 0`.
    pub fn point(&self, x: &[f64], z: &[f64], a: f64, prec: u32) -> Result<GroupPoint> {
        if x.len() != self.mu || z.len() != self.nu {
            return Err(Error::DimensionMismatch(format!(
                "point needs |x| = {}, |z| = {}",
                self.mu, self.nu
            )));
        }
        if !(a > 0.0) {
            return Err(Error::OutOfRange(format!("a = {a} must be positive")));
        }
        Ok(GroupPoint {
            x: x.iter().map(|&v| fl(prec, v)).collect(),
            z: z.iter().map(|&v| fl(prec, v)).collect(),
            a: fl(prec, a),
        })
    }

    /// `Σ_k coeff·(J_{u_k} x, x')` entries of the group law, one per `k`.
    fn bracket_terms<T: Jet>(&self, x: &[T], xp: &[T], zero: &T) -> Vec<T> {
        (0..self.nu)
            .map(|k| {
                let mut acc = zero.clone();
                for &(i, j, v) in &self.j_sparse[k] {
                    // (J x)_i x'_i with (J x)_i = Σ_j J_ij x_j
                    acc = acc.add(&x[j].mul(&xp[i]).scale(v));
                }
                acc
            })
            .collect()
    }

    /// The group law on jet coordinates.
    pub fn multiply_jets<T: Jet>(&self, g: &JetPoint<T>, h: &JetPoint<T>) -> JetPoint<T> {
        let sqrt_a = g.a.sqrt_();
        let zero = g.a.zero_like();
        let x: Vec<T> = (0..self.mu)
            .map(|i| g.x[i].add(&sqrt_a.mul(&h.x[i])))
            .collect();
        let brackets = self.bracket_terms(&g.x, &h.x, &zero);
        let z: Vec<T> = (0..self.nu)
            .map(|k| {
                g.z[k]
                    .add(&g.a.mul(&h.z[k]))
                    .add(&sqrt_a.mul(&brackets[k]).scale(0.5))
            })
            .collect();
        JetPoint { x, z, a: g.a.mul(&h.a) }
    }

    /// Group multiplication `g · h`.
    pub fn multiply(&self, g: &GroupPoint, h: &GroupPoint) -> Result<GroupPoint> {
        if g.x.len() != self.mu || h.x.len() != self.mu || g.z.len() != self.nu || h.z.len() != self.nu
        {
            return Err(Error::DimensionMismatch("point does not match group".into()));
        }
        let gj = JetPoint { x: g.x.clone(), z: g.z.clone(), a: g.a.clone() };
        let hj = JetPoint { x: h.x.clone(), z: h.z.clone(), a: h.a.clone() };
        let out = self.multiply_jets(&gj, &hj);
        Ok(GroupPoint { x: out.x, z: out.z, a: out.a })
    }

    /// Group inverse `g⁻¹ = (-x/√a, -z/a, 1/a)`.
    pub fn inverse(&self, g: &GroupPoint) -> GroupPoint {
        let prec = g.prec();
        let sqrt_a = g.a.clone().sqrt();
        let x = g.x.iter().map(|v| -Float::with_val(prec, v / &sqrt_a)).collect();
        let z = g.z.iter().map(|v| -Float::with_val(prec, v / &g.a)).collect();
        GroupPoint { x, z, a: g.a.clone().recip() }
    }

    /// The modular function `δ(x, z, a) = a^{-Q}`.
    pub fn modular_delta(&self, g: &GroupPoint) -> Float {
        let prec = g.prec();
        let e = -self.q(prec);
        g.a.clone().pow(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rel_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const P: u32 = 113;

    fn heis() -> HTypeGroup {
        HTypeGroup::standard(StandardFamily::Heisenberg, 1).unwrap()
    }

    #[test]
    fn degenerate_group_is_valid() {
        let g = HTypeGroup::standard(StandardFamily::RealHyperbolic, 2).unwrap();
        assert_eq!(g.mu(), 0);
        assert_eq!(g.nu(), 2);
        assert_eq!(g.q_f64(), 2.0);
        assert_eq!(g.dim(), 3);
    }

    #[test]
    fn heisenberg_constructor_matches_catalog() {
        let g = heis();
        assert_eq!((g.mu(), g.nu()), (2, 1));
        assert_eq!(g.q_f64(), 2.0);
        assert_eq!(g.dim(), 4);
        // J² = -Id for the standard symplectic matrix.
        let j = vec![vec![0.0, -1.0, 1.0, 0.0]];
        let made = HTypeGroup::new(2, 1, j).unwrap();
        assert_eq!(made.j_entry(0, 0, 1), -1.0);
    }

    #[test]
    fn quaternionic_constructor_matches_catalog() {
        let g = HTypeGroup::standard(StandardFamily::Quaternionic, 1).unwrap();
        assert_eq!((g.mu(), g.nu()), (4, 3));
        assert_eq!(g.q_f64(), 5.0);
        assert_eq!(g.dim(), 8);
        assert!(HTypeGroup::standard(StandardFamily::Quaternionic, 2).is_ok());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        // J² = -4 Id: scaling breaks the anticommutation normalization.
        let err = HTypeGroup::new(2, 1, vec![vec![0.0, -2.0, 2.0, 0.0]]).unwrap_err();
        assert_eq!(err, Error::NotCliffordAnticommuting(1, 1));
        let err = HTypeGroup::new(2, 1, vec![vec![0.0, 1.0, 1.0, 0.0]]).unwrap_err();
        assert_eq!(err, Error::NotSkew(1));
        let err = HTypeGroup::new(3, 1, vec![vec![0.0; 9]]).unwrap_err();
        assert_eq!(err, Error::OddMu(3));
        assert_eq!(
            HTypeGroup::standard(StandardFamily::Heisenberg, 0).unwrap_err(),
            Error::BadParameter(0)
        );
        assert_eq!(
            "nosuch".parse::<StandardFamily>().unwrap_err(),
            Error::UnknownFamily("nosuch".into())
        );
    }

    #[test]
    fn axis_points_multiply_by_a() {
        let g = HTypeGroup::standard(StandardFamily::RealHyperbolic, 2).unwrap();
        let p = g.point(&[], &[0.0, 0.0], 2.0, P).unwrap();
        let q = g.point(&[], &[0.0, 0.0], 3.0, P).unwrap();
        let prod = g.multiply(&p, &q).unwrap();
        assert_eq!(prod.a.to_f64(), 6.0);
        assert!(prod.z[0].is_zero() && prod.z[1].is_zero());
    }

    #[test]
    fn heisenberg_product_example() {
        // ((1,0),0,1)·((0,1),0,1) = ((1,1), 1/2, 1): (J(1,0),(0,1)) = 1.
        let g = heis();
        let p = g.point(&[1.0, 0.0], &[0.0], 1.0, P).unwrap();
        let q = g.point(&[0.0, 1.0], &[0.0], 1.0, P).unwrap();
        let prod = g.multiply(&p, &q).unwrap();
        assert_eq!(prod.x[0].to_f64(), 1.0);
        assert_eq!(prod.x[1].to_f64(), 1.0);
        assert_eq!(prod.z[0].to_f64(), 0.5);
        assert_eq!(prod.a.to_f64(), 1.0);
    }

    #[test]
    fn inverse_examples() {
        let g = heis();
        let p = g.point(&[0.0, 0.0], &[0.0], 4.0, P).unwrap();
        assert_eq!(g.inverse(&p).a.to_f64(), 0.25);
        let e = g.identity(P);
        let einv = g.inverse(&e);
        assert_eq!(einv.a.to_f64(), 1.0);
        // ((1,0),1,4)⁻¹ = ((-1/2,0), -1/4, 1/4)
        let p = g.point(&[1.0, 0.0], &[1.0], 4.0, P).unwrap();
        let inv = g.inverse(&p);
        assert_eq!(inv.x[0].to_f64(), -0.5);
        assert_eq!(inv.z[0].to_f64(), -0.25);
        assert_eq!(inv.a.to_f64(), 0.25);
    }

    fn random_point(g: &HTypeGroup, rng: &mut ChaCha8Rng) -> GroupPoint {
        let x: Vec<f64> = (0..g.mu()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let z: Vec<f64> = (0..g.nu()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let a = rng.gen_range(0.2..5.0);
        g.point(&x, &z, a, P).unwrap()
    }

    #[test]
    fn identity_inverse_associativity_and_character() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for grp in [
            heis(),
            HTypeGroup::standard(StandardFamily::RealHyperbolic, 2).unwrap(),
            HTypeGroup::standard(StandardFamily::Quaternionic, 1).unwrap(),
        ] {
            let e = grp.identity(P);
            for _ in 0..100 {
                let p = random_point(&grp, &mut rng);
                let pe = grp.multiply(&p, &e).unwrap();
                for i in 0..grp.mu() {
                    assert!(rel_diff(&pe.x[i], &p.x[i]).to_f64() < 1e-30);
                }
                let pinv = grp.inverse(&p);
                let prod = grp.multiply(&p, &pinv).unwrap();
                assert!((prod.a.to_f64() - 1.0).abs() < 1e-14);
                for v in prod.x.iter().chain(prod.z.iter()) {
                    assert!(v.clone().abs().to_f64() < 1e-14);
                }
            }
            for _ in 0..30 {
                let p = random_point(&grp, &mut rng);
                let q = random_point(&grp, &mut rng);
                let r = random_point(&grp, &mut rng);
                let lhs = grp.multiply(&grp.multiply(&p, &q).unwrap(), &r).unwrap();
                let rhs = grp.multiply(&p, &grp.multiply(&q, &r).unwrap()).unwrap();
                assert!(rel_diff(&lhs.a, &rhs.a).to_f64() < 1e-12);
                for i in 0..grp.mu() {
                    let d = Float::with_val(P, &lhs.x[i] - &rhs.x[i]);
                    assert!(d.abs().to_f64() < 1e-12);
                }
                for k in 0..grp.nu() {
                    let d = Float::with_val(P, &lhs.z[k] - &rhs.z[k]);
                    assert!(d.abs().to_f64() < 1e-12);
                }
                // δ(gh) = δ(g)δ(h)
                let dprod = grp.modular_delta(&lhs);
                let dsep = Float::with_val(P, grp.modular_delta(&p) * grp.modular_delta(&q))
                    * grp.modular_delta(&r);
                assert!(rel_diff(&dprod, &dsep).to_f64() < 1e-12);
            }
        }
    }

    #[test]
    fn modular_delta_examples() {
        let rh = HTypeGroup::standard(StandardFamily::RealHyperbolic, 2).unwrap();
        let e = rh.identity(P);
        assert_eq!(rh.modular_delta(&e).to_f64(), 1.0);
        let p = rh.point(&[], &[0.0, 0.0], 2.0, P).unwrap();
        assert_eq!(rh.modular_delta(&p).to_f64(), 0.25);
        let quat = HTypeGroup::standard(StandardFamily::Quaternionic, 1).unwrap();
        let a = std::f64::consts::E;
        let p = quat.point(&[0.0; 4], &[0.0; 3], a, P).unwrap();
        let want = fl(P, -5).exp();
        assert!(rel_diff(&quat.modular_delta(&p), &want).to_f64() < 1e-13);
    }

    #[test]
    fn unit_z_isometry() {
        // J_z J_zᵀ = Id for |z| = 1 follows from skewness + anticommutation.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for grp in [heis(), HTypeGroup::standard(StandardFamily::Quaternionic, 1).unwrap()] {
            let mu = grp.mu();
            for _ in 0..20 {
                let mut z: Vec<f64> = (0..grp.nu()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                z.iter_mut().for_each(|v| *v /= norm);
                // J_z = Σ z_k J_{u_k}
                let mut jz = vec![0.0; mu * mu];
                for k in 0..grp.nu() {
                    for i in 0..mu {
                        for j in 0..mu {
                            jz[i * mu + j] += z[k] * grp.j_entry(k, i, j);
                        }
                    }
                }
                for i in 0..mu {
                    for j in 0..mu {
                        let mut s = 0.0;
                        for p in 0..mu {
                            s += jz[i * mu + p] * jz[j * mu + p];
                        }
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((s - want).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
