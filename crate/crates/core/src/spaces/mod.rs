//! Finite-dimensional real normed spaces.
//!
//! A [`NormedSpace`] is R^n together with one norm from a small catalog:
//! the ℓp family (with a distinct marker for p = ∞), the Euclidean norm,
//! the two-dimensional Day–James ℓ∞-ℓ₁ norm, and polyhedral norms given
//! by the symmetric extreme points of their unit ball.
//!
//! Spaces are immutable once built and every evaluation is a pure function,
//! so a single space can be shared freely between worker threads.

mod catalog;
mod polyhedral;
mod validate;

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use catalog::parse_point_file;
pub use polyhedral::Polytope;
pub use validate::{validate_norm_axioms, Norm, ValidationReport};

/// Worst allowed homogeneity/positivity violation in [`validate_norm_axioms`].
pub const AXIOM_TOLERANCE: f64 = 1e-9;

/// A point of R^n, n ≥ 2, with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct VectorN {
    coords: Vec<f64>,
}

impl VectorN {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidVector(format!(
                "need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidVector(format!("non-finite coordinate {bad}")));
        }
        Ok(Self { coords })
    }

    pub fn from_pair(x: f64, y: f64) -> Result<Self> {
        Self::new(vec![x, y])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }
}

impl Deref for VectorN {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

impl TryFrom<Vec<f64>> for VectorN {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<VectorN> for Vec<f64> {
    fn from(v: VectorN) -> Self {
        v.coords
    }
}

/// The (κ, τ) pair of the two-parameter constants. Both strictly positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPair {
    kappa: f64,
    tau: f64,
}

impl ParamPair {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        if !(kappa.is_finite() && tau.is_finite() && kappa > 0.0 && tau > 0.0) {
            return Err(Error::InvalidParams(format!(
                "kappa and tau must be finite and > 0, got kappa = {kappa}, tau = {tau}"
            )));
        }
        Ok(Self { kappa, tau })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn min(&self) -> f64 {
        self.kappa.min(self.tau)
    }

    pub fn max(&self) -> f64 {
        self.kappa.max(self.tau)
    }

    pub fn gap(&self) -> f64 {
        (self.kappa - self.tau).abs()
    }

    pub fn swapped(&self) -> Self {
        Self { kappa: self.tau, tau: self.kappa }
    }
}

/// Exponent of an ℓp norm. Infinity is its own variant, never a large float.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidSpace(format!("lp exponent must be >= 1, got {p}")));
        }
        Ok(Self::Finite(p))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Lp(Exponent),
    Euclidean,
    /// ℓ∞ on same-sign vectors, ℓ₁ on opposite-sign vectors (R² only).
    DayJames,
    Polyhedral(Polytope),
}

/// Precomputed evaluation strategy for an ℓp norm.
#[derive(Clone, Copy, Debug, PartialEq)]
enum LpKernel {
    One,
    Two,
    Integer(i32),
    Real(f64),
    Max,
}

#[derive(Clone, Debug)]
pub struct NormedSpace {
    id: String,
    dim: usize,
    family: Family,
    lp: Option<LpKernel>,
}

impl PartialEq for NormedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.dim == other.dim && self.family == other.family
    }
}

impl NormedSpace {
    fn check_dim(dim: usize) -> Result<()> {
        if dim < 2 {
            return Err(Error::InvalidSpace(format!("dimension must be >= 2, got {dim}")));
        }
        Ok(())
    }

    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        Self::with_exponent(Exponent::finite(p)?, dim)
    }

    pub fn lp_inf(dim: usize) -> Result<Self> {
        Self::with_exponent(Exponent::Infinity, dim)
    }

    pub fn with_exponent(exponent: Exponent, dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        let kernel = match exponent {
            Exponent::Infinity => LpKernel::Max,
            Exponent::Finite(p) => {
                if p < 1.0 || !p.is_finite() {
                    return Err(Error::InvalidSpace(format!("lp exponent must be >= 1, got {p}")));
                }
                if p == 1.0 {
                    LpKernel::One
                } else if p == 2.0 {
                    LpKernel::Two
                } else if p.fract() == 0.0 && p <= 64.0 {
                    LpKernel::Integer(p as i32)
                } else {
                    LpKernel::Real(p)
                }
            }
        };
        Ok(Self {
            id: format!("lp:{exponent}:{dim}"),
            dim,
            family: Family::Lp(exponent),
            lp: Some(kernel),
        })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self { id: format!("euclid:{dim}"), dim, family: Family::Euclidean, lp: None })
    }

    pub fn day_james() -> Self {
        Self { id: "dayjames".into(), dim: 2, family: Family::DayJames, lp: None }
    }

    /// Polyhedral norm whose unit ball is the convex hull of `points`.
    pub fn polyhedral(id: impl Into<String>, points: Vec<VectorN>) -> Result<Self> {
        let polytope = Polytope::new(points)?;
        Ok(Self { id: id.into(), dim: polytope.dim(), family: Family::Polyhedral(polytope), lp: None })
    }

    /// Resolves a catalog id: `lp:<p>:<dim>`, `euclid:<dim>`, `dayjames`, `poly:<file>`.
    pub fn from_id(id: &str) -> Result<Self> {
        catalog::resolve(id)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// True for norms induced by an inner product (Euclidean and ℓ₂).
    pub fn is_hilbert(&self) -> bool {
        match self.family {
            Family::Euclidean => true,
            Family::Lp(Exponent::Finite(p)) => p == 2.0,
            _ => false,
        }
    }

    pub fn lp_exponent(&self) -> Option<Exponent> {
        match self.family {
            Family::Lp(e) => Some(e),
            _ => None,
        }
    }

    /// ‖v‖, with the dimension checked.
    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: v.len() });
        }
        if self.family == Family::DayJames && self.dim != 2 {
            return Err(Error::UnsupportedSpace("dayjames is only defined on R^2".into()));
        }
        Ok(self.norm_unchecked(v))
    }

    /// ‖v‖ without the dimension check. `v.len()` must equal `self.dim()`.
    #[inline]
    pub fn norm_unchecked(&self, v: &[f64]) -> f64 {
        self.eval(v.len(), |i| v[i])
    }

    /// ‖a·x + b·y‖ without materializing the combination.
    #[inline]
    pub fn norm_combo(&self, a: f64, x: &[f64], b: f64, y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        self.eval(x.len(), |i| a * x[i] + b * y[i])
    }

    #[inline]
    fn eval<F: Fn(usize) -> f64>(&self, n: usize, coord: F) -> f64 {
        match self.family {
            Family::Lp(_) => lp_norm(self.lp.unwrap_or(LpKernel::Two), n, coord),
            Family::Euclidean => lp_norm(LpKernel::Two, n, coord),
            Family::DayJames => {
                let (a, b) = (coord(0), coord(1));
                if a * b >= 0.0 {
                    a.abs().max(b.abs())
                } else {
                    a.abs() + b.abs()
                }
            }
            Family::Polyhedral(ref poly) => poly.gauge_with(n, coord),
        }
    }

    /// The point of S(X) in direction (cos θ, sin θ). Only for dim = 2.
    pub fn sphere_point_2d(&self, theta: f64) -> Result<VectorN> {
        if self.dim != 2 {
            return Err(Error::UnsupportedSpace(format!(
                "sphere parametrization needs dim = 2, space {} has dim {}",
                self.id, self.dim
            )));
        }
        let [x, y] = self.circle_point(theta);
        VectorN::from_pair(x, y)
    }

    /// Unchecked hot-path form of [`Self::sphere_point_2d`].
    #[inline]
    pub fn circle_point(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        let r = self.eval(2, |i| if i == 0 { c } else { s });
        [c / r, s / r]
    }

    /// v / ‖v‖.
    pub fn normalize(&self, v: &[f64]) -> Result<VectorN> {
        let n = self.norm(v)?;
        if n == 0.0 || !n.is_finite() {
            return Err(Error::DegenerateInput("cannot normalize the zero vector".into()));
        }
        VectorN::new(v.iter().map(|c| c / n).collect())
    }
}

impl fmt::Display for NormedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

impl Norm for NormedSpace {
    fn dim(&self) -> usize {
        self.dim
    }

    fn norm(&self, v: &[f64]) -> f64 {
        self.norm_unchecked(v)
    }
}

#[inline]
fn lp_norm<F: Fn(usize) -> f64>(kernel: LpKernel, n: usize, coord: F) -> f64 {
    match kernel {
        LpKernel::One => (0..n).map(|i| coord(i).abs()).sum(),
        LpKernel::Max => (0..n).map(|i| coord(i).abs()).fold(0.0, f64::max),
        LpKernel::Two => {
            if n == 2 {
                coord(0).hypot(coord(1))
            } else {
                scaled_power_sum(n, &coord, |t| t * t).sqrt_scaled()
            }
        }
        LpKernel::Integer(k) => scaled_power_sum(n, &coord, |t| t.powi(k)).root(k as f64),
        LpKernel::Real(p) => scaled_power_sum(n, &coord, |t| t.powf(p)).root(p),
    }
}

/// Σ (|cᵢ|/m)^p together with the scale m = maxᵢ |cᵢ|.
struct ScaledSum {
    scale: f64,
    sum: f64,
}

impl ScaledSum {
    #[inline]
    fn root(self, p: f64) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale * self.sum.powf(1.0 / p)
        }
    }

    #[inline]
    fn sqrt_scaled(self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale * self.sum.sqrt()
        }
    }
}

#[inline]
fn scaled_power_sum<F: Fn(usize) -> f64>(n: usize, coord: &F, pow: impl Fn(f64) -> f64) -> ScaledSum {
    let scale = (0..n).map(|i| coord(i).abs()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return ScaledSum { scale, sum: 1.0 };
    }
    let sum = (0..n).map(|i| pow(coord(i).abs() / scale)).sum();
    ScaledSum { scale, sum }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn l1_sums_absolute_values() {
        let s = NormedSpace::lp(1.0, 2).unwrap();
        assert_eq!(s.norm(&[2.0, 3.0]).unwrap(), 5.0);
        assert_eq!(s.norm(&[-2.0, 3.0]).unwrap(), 5.0);
    }

    #[test]
    fn day_james_branches() {
        let s = NormedSpace::day_james();
        assert_eq!(s.norm(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(s.norm(&[1.0, -1.0]).unwrap(), 2.0);
        // branches agree on the axes
        assert_eq!(s.norm(&[0.0, -3.0]).unwrap(), 3.0);
        assert_eq!(s.norm(&[-0.0, 2.0]).unwrap(), 2.0);
    }

    #[test]
    fn cross_polytope_gauge_is_l1() {
        let pts = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
            .iter()
            .map(|&(a, b)| VectorN::from_pair(a, b).unwrap())
            .collect();
        let s = NormedSpace::polyhedral("cross", pts).unwrap();
        assert_relative_eq!(s.norm(&[1.0, 1.0]).unwrap(), 2.0, epsilon = 1e-15);
        assert_relative_eq!(s.norm(&[0.3, -0.9]).unwrap(), 1.2, epsilon = 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = NormedSpace::euclidean(3).unwrap();
        assert_eq!(s.norm(&[1.0, 2.0]), Err(Error::Dimension { expected: 3, found: 2 }));
    }

    #[test]
    fn sphere_points() {
        let e = NormedSpace::euclidean(2).unwrap();
        let p = e.sphere_point_2d(0.0).unwrap();
        assert_relative_eq!(p[0], 1.0);
        assert_relative_eq!(p[1], 0.0);

        let l1 = NormedSpace::lp(1.0, 2).unwrap();
        let p = l1.sphere_point_2d(FRAC_PI_4).unwrap();
        assert_relative_eq!(p[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.5, epsilon = 1e-15);

        let dj = NormedSpace::day_james();
        let p = dj.sphere_point_2d(3.0 * PI / 4.0).unwrap();
        assert_relative_eq!(p[0], -0.5, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(dj.norm(&p).unwrap(), 1.0, epsilon = 1e-15);

        let e3 = NormedSpace::euclidean(3).unwrap();
        assert!(matches!(e3.sphere_point_2d(0.0), Err(Error::UnsupportedSpace(_))));
    }

    #[test]
    fn normalize_examples() {
        let e = NormedSpace::euclidean(2).unwrap();
        let v = e.normalize(&[3.0, 4.0]).unwrap();
        assert_relative_eq!(v[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(v[1], 0.8, epsilon = 1e-15);

        let inf = NormedSpace::lp_inf(2).unwrap();
        let v = inf.normalize(&[2.0, -1.0]).unwrap();
        assert_eq!(v.coords(), &[1.0, -0.5]);

        let l4 = NormedSpace::lp(4.0, 2).unwrap();
        let v = l4.normalize(&[1.0, 1.0]).unwrap();
        let expected = 2f64.powf(-0.25);
        assert_relative_eq!(v[0], expected, epsilon = 1e-15);
        assert_relative_eq!(v[1], expected, epsilon = 1e-15);
        assert_relative_eq!(l4.norm(&v).unwrap(), 1.0, epsilon = 1e-12);

        assert!(matches!(e.normalize(&[0.0, 0.0]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(NormedSpace::lp(0.5, 2).is_err());
        assert!(NormedSpace::lp(f64::INFINITY, 2).is_err());
        assert!(NormedSpace::euclidean(1).is_err());
        assert!(VectorN::new(vec![1.0]).is_err());
        assert!(VectorN::new(vec![1.0, f64::NAN]).is_err());
        assert!(ParamPair::new(0.0, 1.0).is_err());
        assert!(ParamPair::new(1.0, -2.0).is_err());
    }

    #[test]
    fn lp_high_dim_and_large_coordinates() {
        let l3 = NormedSpace::lp(3.0, 4).unwrap();
        let v = [1.0, -2.0, 0.5, 0.0];
        let direct = (1.0f64 + 8.0 + 0.125).powf(1.0 / 3.0);
        assert_relative_eq!(l3.norm(&v).unwrap(), direct, epsilon = 1e-14);
        // scaling keeps huge inputs finite
        let big = [1e200, 1e200];
        assert!(NormedSpace::lp(4.0, 2).unwrap().norm(&big).unwrap().is_finite());
    }
}
