//! Deterministic global search over pairs of unit vectors.
//!
//! In R² every unit vector is `circle_point(θ)`, so a functional of two
//! unit vectors becomes a function of (θ₁, θ₂). The planar engine scans an
//! exhaustive coarse grid, refines the best few cells with shrinking local
//! stencils, and reports an error bound `L·h` where `h` is the final stencil
//! spacing and `L` is a sampled Lipschitz estimate (×1.5). The bound is a
//! heuristic model, not a certificate.
//!
//! In higher dimension a seeded multi-start hill climb runs instead and the
//! result is a lower bound only (`error_bound = +∞`).
//!
//! All randomness comes from ChaCha8 streams seeded by `SearchConfig::seed`.

pub mod grid;
mod multistart;
mod plane;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{NormedSpace, VectorN};

/// Coarse cells handed to local refinement.
pub const REFINE_STARTS: usize = 4;
/// Points on the t ∈ [0, 1] axis of three-axis searches.
pub const RADIUS_GRID: usize = 64;
pub const LIPSCHITZ_SAFETY: f64 = 1.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Grid points per full turn of each angle.
    pub coarse_grid: usize,
    pub refine_rounds: usize,
    pub shrink: f64,
    /// Random starts, only used when dim > 2.
    pub multistart: usize,
    pub seed: u64,
    /// Largest error bound a planar search may report and still count as
    /// converged.
    pub target_tol: f64,
    /// Restrict θ₁ to [0, π) for functionals invariant under (x, y) → (−x, −y).
    pub use_symmetry: bool,
    /// Distribute grid rows over the rayon pool. Ignored without the `rayon`
    /// feature; results are identical either way.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            coarse_grid: 2048,
            refine_rounds: 40,
            shrink: 0.5,
            multistart: 64,
            seed: 0,
            target_tol: 1e-4,
            use_symmetry: true,
            parallel: true,
        }
    }
}

impl SearchConfig {
    pub fn with_grid(mut self, coarse_grid: usize) -> Self {
        self.coarse_grid = coarse_grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidConfig(m));
        if self.coarse_grid < 8 {
            return fail(format!("coarse_grid must be >= 8, got {}", self.coarse_grid));
        }
        if self.refine_rounds < 1 {
            return fail("refine_rounds must be >= 1".into());
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return fail(format!("shrink must lie in (0, 1), got {}", self.shrink));
        }
        if !(self.target_tol > 0.0) {
            return fail(format!("target_tol must be > 0, got {}", self.target_tol));
        }
        if self.multistart < 1 {
            return fail("multistart must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Grid2d,
    Multistart,
}

/// Result of a sup/inf search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Unit vectors attaining `value`.
    pub witness: (VectorN, VectorN),
    /// (θ₁, θ₂) of the witness for planar searches.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<[f64; 2]>,
    /// Radius t applied to the second witness vector (three-axis searches).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    pub evaluations: u64,
    /// Claimed bound on |true − value|; +∞ for lower-bound-only searches.
    #[serde(with = "unbounded")]
    pub error_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    pub method: Method,
    /// Incumbent value of the winning start after the coarse scan and after
    /// each refinement round.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

impl Estimate {
    pub fn is_certified(&self) -> bool {
        self.method == Method::Grid2d && self.error_bound.is_finite()
    }

    pub fn within_target(&self, cfg: &SearchConfig) -> bool {
        self.is_certified() && self.error_bound <= cfg.target_tol
    }

    /// Applies an increasing map to the value, propagating the error bound
    /// through `bound(value, error_bound)`.
    pub fn map_monotone(mut self, map: impl Fn(f64) -> f64, bound: impl Fn(f64, f64) -> f64) -> Self {
        let old = self.value;
        self.error_bound = if self.error_bound.is_finite() { bound(old, self.error_bound) } else { f64::INFINITY };
        self.value = map(old);
        self.trace = self.trace.iter().map(|&v| map(v)).collect();
        self
    }

    /// √value, with the bound max(√(v+e) − √v, √v − √(v−e)).
    pub fn sqrt(self) -> Self {
        self.map_monotone(
            |v| v.max(0.0).sqrt(),
            |v, e| {
                let v = v.max(0.0);
                let up = (v + e).sqrt() - v.sqrt();
                let down = v.sqrt() - (v - e).max(0.0).sqrt();
                up.max(down)
            },
        )
    }
}

/// Rounding allowance added to every planar error bound.
pub(crate) fn rounding_allowance(value: f64) -> f64 {
    64.0 * f64::EPSILON * value.abs().max(1.0)
}

/// Maximizes `f` over S(X) × S(X).
///
/// dim = 2 runs the grid-and-refine engine; higher dimensions run seeded
/// multi-start hill climbing and return a lower bound.
pub fn maximize_pairwise<F>(space: &NormedSpace, f: F, cfg: &SearchConfig) -> Result<Estimate>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    if space.dim() == 2 {
        plane::maximize(space, &f, cfg)
    } else {
        multistart::maximize(space, &f, cfg)
    }
}

/// Maximizes `f(x, y, t)` over x, y ∈ S(X) and t ∈ [0, 1].
///
/// The planar engine scans a grid with `coarse_grid / 4` points per turn on
/// each angle and [`RADIUS_GRID`] points on t, then refines all three axes.
/// The witness carries unit `y`; `scale` holds t.
pub fn maximize_pairwise_scaled<F>(space: &NormedSpace, f: F, cfg: &SearchConfig) -> Result<Estimate>
where
    F: Fn(&[f64], &[f64], f64) -> f64 + Sync,
{
    cfg.validate()?;
    if space.dim() == 2 {
        plane::maximize_scaled(space, &f, cfg)
    } else {
        multistart::maximize_scaled(space, &f, cfg)
    }
}

/// Minimizes `objective` over unit pairs with ‖x − y‖ ≥ ε (dim = 2 only).
///
/// Grid points violating the constraint (tested without slack) are skipped,
/// and for every θ₁ the boundary ‖x − y‖ = ε is located by bisection in θ₂ between grid
/// neighbours that straddle it. The antipode y = −x (where ‖x − y‖ = 2) is
/// always a candidate, built as the exact negation of x.
pub fn minimize_constrained_pair<F>(space: &NormedSpace, objective: F, eps: f64, cfg: &SearchConfig) -> Result<Estimate>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::Domain(format!("constraint level must be >= 0, got {eps}")));
    }
    if eps > 2.0 {
        return Err(Error::Infeasible { eps });
    }
    if space.dim() != 2 {
        return Err(Error::UnsupportedSpace(format!(
            "constrained search needs dim = 2, space {} has dim {}",
            space.id(),
            space.dim()
        )));
    }
    plane::minimize_constrained(space, &objective, eps, cfg)
}

pub(crate) fn objective_error(value: f64, x: &[f64], y: &[f64]) -> Error {
    Error::Objective { value, x: x.to_vec(), y: y.to_vec() }
}

/// Serializes +∞ as `null`.
mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
